//! Affine singular components of the law of `X^n`.
//!
//! Conditioned on the continuity pattern `nu` over the excitation window and on the
//! atom values in its discrete slots, `X^n` lives on an affine set of dimension
//! `d_V = p + rank(Theta^[nu])`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::arma::{sample_excitation, ArmaModel, SamplePath, ToeplitzSet, build_toeplitz};
use crate::dimension::{concentration_bounds, Regime, TailVariant};
use crate::error::{Error, Result};
use crate::linalg::{
    leading_left_singular_vectors, rank_from_singular_values, select_columns, singular_values,
};
use crate::rng::SeedStream;

/// Largest window for which [`exact_dimension_distribution`] enumerates all patterns.
pub const MAX_EXHAUSTIVE_WINDOW: usize = 20;

/// Continuity flags over `xi_{p-q+1}..xi_n` (`true` = continuous draw).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NuPattern {
    flags: Vec<bool>,
}

impl NuPattern {
    pub fn new(flags: Vec<bool>) -> Self {
        Self { flags }
    }

    pub fn all(len: usize, value: bool) -> Self {
        Self {
            flags: vec![value; len],
        }
    }

    /// Pattern `bits` of a window of `len` slots, slot `j` taken from bit `j`.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        Self {
            flags: (0..len).map(|j| bits >> j & 1 == 1).collect(),
        }
    }

    pub fn from_path(path: &SamplePath) -> Self {
        Self {
            flags: path.nu.clone(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(len: usize, alpha: f64, rng: &mut R) -> Self {
        Self {
            flags: (0..len).map(|_| rng.random::<f64>() < alpha).collect(),
        }
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn popcount(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn discrete_count(&self) -> usize {
        self.len() - self.popcount()
    }

    pub fn continuous_slots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.flags[j]).collect()
    }

    pub fn discrete_slots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| !self.flags[j]).collect()
    }

    /// `ln Pr(nu = pattern)` under i.i.d. `Bern(alpha)` flags.
    pub fn log_likelihood(&self, alpha: f64) -> f64 {
        let k = self.popcount() as f64;
        let z = self.discrete_count() as f64;
        let term = |count: f64, prob: f64| if count == 0.0 { 0.0 } else { count * prob.ln() };
        term(k, alpha) + term(z, 1.0 - alpha)
    }

    fn check_window(&self, ts: &ToeplitzSet) -> Result<()> {
        if self.len() != ts.window_len() {
            return Err(Error::DimensionMismatch(format!(
                "pattern has {} flags, window has {}",
                self.len(),
                ts.window_len()
            )));
        }
        Ok(())
    }
}

/// `d_V = p + rank(Theta^[nu])`.
pub fn singular_dimension(ts: &ToeplitzSet, pattern: &NuPattern) -> Result<usize> {
    pattern.check_window(ts)?;
    let mut sv = selection_singular_values(ts, &pattern.continuous_slots());
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(ts.p + rank_from_singular_values(&sv))
}

/// Singular values of `Theta^[nu]`, unordered.
///
/// Window column `j` is supported on rows `j-q..=j`, so selected columns more than `q`
/// apart touch disjoint rows and the selection is block diagonal up to permutation.
fn selection_singular_values(ts: &ToeplitzSet, cols: &[usize]) -> Vec<f64> {
    let rows = ts.theta_mat.nrows();
    let mut out = Vec::with_capacity(cols.len());
    let mut start = 0;
    while start < cols.len() {
        let mut end = start + 1;
        while end < cols.len() && cols[end] - cols[end - 1] <= ts.q {
            end += 1;
        }
        let group = &cols[start..end];
        let r0 = group[0].saturating_sub(ts.q);
        let r1 = (group[group.len() - 1] + 1).min(rows);
        if r1 > r0 {
            let block = DMatrix::from_fn(r1 - r0, group.len(), |r, c| ts.theta_mat[(r0 + r, group[c])]);
            out.extend(singular_values(&block));
        }
        start = end;
    }
    out
}

/// `U_V = [I_p 0; 0 I^[nu]]`, an `(n+q) x (p + popcount)` selector.
pub fn selector_matrix(ts: &ToeplitzSet, pattern: &NuPattern) -> Result<DMatrix<f64>> {
    pattern.check_window(ts)?;
    let cols = pattern.continuous_slots();
    let mut u = DMatrix::zeros(ts.n + ts.q, ts.p + cols.len());
    for i in 0..ts.p {
        u[(i, i)] = 1.0;
    }
    for (c, &j) in cols.iter().enumerate() {
        u[(ts.p + j, ts.p + c)] = 1.0;
    }
    Ok(u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularComponent {
    pub pattern: NuPattern,
    pub dim: usize,
    /// `n x dim`, orthonormal columns.
    pub basis: DMatrix<f64>,
    pub offset: DVector<f64>,
    /// Atom value per discrete slot, in window order.
    pub atom_assignment: Vec<f64>,
}

impl SingularComponent {
    pub fn n(&self) -> usize {
        self.offset.len()
    }
}

/// Builds the component selected by `pattern` with the given atom values.
pub fn build_component(
    ts: &ToeplitzSet,
    pattern: &NuPattern,
    atom_assignment: &[f64],
) -> Result<SingularComponent> {
    pattern.check_window(ts)?;
    let discrete = pattern.discrete_slots();
    if discrete.len() != atom_assignment.len() {
        return Err(Error::AtomAssignmentMismatch {
            expected: discrete.len(),
            got: atom_assignment.len(),
        });
    }
    let dim = singular_dimension(ts, pattern)?;

    // Theta_hat * U_V is a column selection of Theta_hat, so M is one of the transfer matrix.
    let cols: Vec<usize> = (0..ts.p)
        .chain(pattern.continuous_slots().into_iter().map(|j| ts.p + j))
        .collect();
    let m = select_columns(&ts.transfer, &cols);
    let basis = leading_left_singular_vectors(&m, dim);

    let mut pinned = DVector::zeros(ts.n + ts.q);
    for (&j, &v) in discrete.iter().zip(atom_assignment) {
        pinned[ts.p + j] = v;
    }
    let offset = &ts.transfer * pinned;

    Ok(SingularComponent {
        pattern: pattern.clone(),
        dim,
        basis,
        offset,
        atom_assignment: atom_assignment.to_vec(),
    })
}

/// The component a path actually came from: its own flags and realized atom values.
pub fn component_of_path(ts: &ToeplitzSet, path: &SamplePath) -> Result<SingularComponent> {
    build_component(ts, &NuPattern::from_path(path), &path.atom_values())
}

/// `||(I - B B^T)(x - offset)||_2 / (1 + ||x||_2)`.
pub fn membership_residual(x: &[f64], comp: &SingularComponent) -> Result<f64> {
    if x.len() != comp.n() {
        return Err(Error::DimensionMismatch(format!(
            "vector of {} against component in R^{}",
            x.len(),
            comp.n()
        )));
    }
    let xv = DVector::from_column_slice(x);
    let centered = &xv - &comp.offset;
    let coords = comp.basis.tr_mul(&centered);
    let r = centered - &comp.basis * coords;
    Ok(r.norm() / (1.0 + xv.norm()))
}

pub fn verify_membership(path: &SamplePath, comp: &SingularComponent) -> Result<f64> {
    membership_residual(&path.x, comp)
}

/// Tally of `d_V` over sampled patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionHistogram {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub alpha: f64,
    pub trials: u64,
    /// `counts[d]` for `d` in `0..=n`.
    pub counts: Vec<u64>,
}

impl DimensionHistogram {
    pub fn empty(n: usize, p: usize, q: usize, alpha: f64) -> Self {
        Self {
            n,
            p,
            q,
            alpha,
            trials: 0,
            counts: vec![0; n + 1],
        }
    }

    pub fn record(&mut self, d: usize) {
        self.counts[d] += 1;
        self.trials += 1;
    }

    pub fn merge(mut self, other: &DimensionHistogram) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.trials += other.trials;
        self
    }

    /// Mean of `d_V / n`.
    pub fn mean_normalized(&self) -> f64 {
        let total: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(d, &c)| d as f64 * c as f64)
            .sum();
        total / (self.trials.max(1) as f64 * self.n as f64)
    }

    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (d, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = d;
            }
        }
        best
    }

    fn fraction(&self, keep: impl Fn(usize) -> bool) -> f64 {
        let hits: u64 = self
            .counts
            .iter()
            .enumerate()
            .filter(|(d, _)| keep(*d))
            .map(|(_, &c)| c)
            .sum();
        hits as f64 / self.trials.max(1) as f64
    }

    /// Empirical `Pr(d_V > k)`.
    pub fn tail_above(&self, k: usize) -> f64 {
        self.fraction(|d| d > k)
    }

    /// Empirical `Pr(d_V < k)`.
    pub fn tail_below(&self, k: usize) -> f64 {
        self.fraction(|d| d < k)
    }

    /// Empirical `Pr(|d_V/n - alpha| < delta)`.
    pub fn band_probability(&self, delta: f64) -> f64 {
        let n = self.n as f64;
        let alpha = self.alpha;
        self.fraction(|d| (d as f64 / n - alpha).abs() < delta)
    }
}

/// Draws `trials` excitation patterns from the model's law and tallies `d_V`.
///
/// Trial `t` uses `streams.trial(t)`, so the tally does not depend on thread count.
pub fn empirical_dimension_histogram(
    model: &ArmaModel,
    n: usize,
    trials: usize,
    streams: &SeedStream,
) -> Result<DimensionHistogram> {
    let ts = build_toeplitz(model, n)?;
    let window = ts.window_len();
    let dist = model.excitation();
    let empty = || DimensionHistogram::empty(n, model.p(), model.q(), model.alpha());
    let hist = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = streams.trial(t);
            let (_, nu) = sample_excitation(dist, window, &mut rng);
            singular_dimension(&ts, &NuPattern::new(nu)).expect("window length matches")
        })
        .fold(empty, |mut h, d| {
            h.record(d);
            h
        })
        .reduce(empty, |a, b| a.merge(&b));
    Ok(hist)
}

/// Exact law of `d_V` under `Bern(alpha)` flags, by enumerating every pattern.
///
/// Entry `d` of the result is `Pr(d_V = d)`; the vector has length `n + 1`.
pub fn exact_dimension_distribution(ts: &ToeplitzSet, alpha: f64) -> Result<Vec<f64>> {
    let window = ts.window_len();
    if window > MAX_EXHAUSTIVE_WINDOW {
        return Err(Error::InvalidArgument(format!(
            "window {window} exceeds the exhaustive limit {MAX_EXHAUSTIVE_WINDOW}"
        )));
    }
    let mut probs = vec![0.0; ts.n + 1];
    for bits in 0..(1u64 << window) {
        let pattern = NuPattern::from_bits(bits, window);
        let w = pattern.log_likelihood(alpha).exp();
        if w == 0.0 {
            continue;
        }
        probs[singular_dimension(ts, &pattern)?] += w;
    }
    Ok(probs)
}

/// Outcome of comparing one empirical tail with its theoretical lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationCheck {
    pub k: usize,
    pub regime: Regime,
    /// Empirical tail in the applicable direction; `None` in the void regime.
    pub empirical: Option<f64>,
    pub bound: Option<f64>,
    /// Four binomial standard errors at the histogram's trial count.
    pub slack: f64,
    pub satisfied: Option<bool>,
}

/// Checks `Pr(d_V > k)` or `Pr(d_V < k)` against the bound that applies at each `k`.
pub fn check_concentration(
    hist: &DimensionHistogram,
    k_grid: &[usize],
    variant: TailVariant,
) -> Result<Vec<ConcentrationCheck>> {
    let trials = hist.trials.max(1) as f64;
    k_grid
        .iter()
        .map(|&k| {
            let b = concentration_bounds(hist.n, hist.p, hist.q, hist.alpha, k, variant)?;
            let (empirical, bound) = match b.regime {
                Regime::Above => (Some(hist.tail_above(k)), b.p_above),
                Regime::Below => (Some(hist.tail_below(k)), b.p_below),
                Regime::Void => (None, None),
            };
            let slack = match (empirical, bound) {
                (Some(e), Some(bd)) => {
                    let var = (bd * (1.0 - bd)).max(e * (1.0 - e));
                    4.0 * (var / trials).sqrt()
                }
                _ => 0.0,
            };
            let satisfied = empirical.zip(bound).map(|(e, bd)| e >= bd - slack);
            Ok(ConcentrationCheck {
                k,
                regime: b.regime,
                empirical,
                bound,
                slack,
                satisfied,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arma::{simulate_path, DceDistribution};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn model_23(alpha: f64) -> ArmaModel {
        ArmaModel::new(
            vec![-0.5, 0.2],
            vec![0.4, -0.3, 0.25],
            DceDistribution::bernoulli_gaussian(alpha).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn extreme_patterns() {
        let ts = build_toeplitz(&model_23(0.6), 12).unwrap();
        let w = ts.window_len();
        assert_eq!(singular_dimension(&ts, &NuPattern::all(w, true)).unwrap(), 12);
        assert_eq!(singular_dimension(&ts, &NuPattern::all(w, false)).unwrap(), 2);
        assert!(singular_dimension(&ts, &NuPattern::all(w - 1, true)).is_err());
    }

    #[test]
    fn full_component_is_whole_space() {
        let ts = build_toeplitz(&model_23(1.0), 8).unwrap();
        let c = build_component(&ts, &NuPattern::all(ts.window_len(), true), &[]).unwrap();
        assert_eq!(c.dim, 8);
        let gram = c.basis.tr_mul(&c.basis);
        assert!((gram - DMatrix::identity(8, 8)).amax() < 1e-10);
        assert_eq!(c.offset.amax(), 0.0);
    }

    #[test]
    fn ar1_pinned_slot_gives_line() {
        // X_t = X_{t-1}/3 + xi_t over two steps with xi_2 pinned to 0.
        let model = ArmaModel::new(vec![-1.0 / 3.0], vec![], DceDistribution::bernoulli_gaussian(0.5).unwrap())
            .unwrap();
        let ts = build_toeplitz(&model, 2).unwrap();
        let c = build_component(&ts, &NuPattern::new(vec![false]), &[0.0]).unwrap();
        assert_eq!(c.dim, 1);
        let on_line = membership_residual(&[3.0, 1.0], &c).unwrap();
        let off_line = membership_residual(&[1.0, 1.0], &c).unwrap();
        assert!(on_line < 1e-12);
        assert!(off_line > 0.1);
    }

    #[test]
    fn mismatched_assignment_rejected() {
        let ts = build_toeplitz(&model_23(0.5), 6).unwrap();
        let pat = NuPattern::all(ts.window_len(), false);
        let err = build_component(&ts, &pat, &[0.0]).unwrap_err();
        assert!(matches!(err, Error::AtomAssignmentMismatch { .. }));
    }

    #[test]
    fn path_lies_on_its_component() {
        let model = model_23(0.5);
        let ts = build_toeplitz(&model, 30).unwrap();
        let streams = SeedStream::new(11);
        for t in 0..20 {
            let path = simulate_path(&model, 30, None, &mut streams.trial(t)).unwrap();
            let c = component_of_path(&ts, &path).unwrap();
            assert!(verify_membership(&path, &c).unwrap() < 1e-7);
        }
    }

    #[test]
    fn zero_path_zero_residual() {
        let ts = build_toeplitz(&model_23(0.0), 5).unwrap();
        let w = ts.window_len();
        let c = build_component(&ts, &NuPattern::all(w, false), &vec![0.0; w]).unwrap();
        assert_eq!(membership_residual(&[0.0; 5], &c).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_alphas_are_point_masses() {
        let streams = SeedStream::new(3);
        let h1 = empirical_dimension_histogram(&model_23(1.0), 20, 50, &streams).unwrap();
        assert_eq!(h1.counts[20], 50);
        let h0 = empirical_dimension_histogram(&model_23(0.0), 20, 50, &streams).unwrap();
        assert_eq!(h0.counts[2], 50);
        assert_relative_eq!(h0.mean_normalized(), 0.1);
    }

    #[test]
    fn exact_distribution_sums_to_one() {
        let ts = build_toeplitz(&model_23(0.6), 10).unwrap();
        let probs = exact_dimension_distribution(&ts, 0.6).unwrap();
        assert_relative_eq!(probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_eq!(probs[0], 0.0);
        assert_eq!(probs[1], 0.0);
    }

    #[test]
    fn void_k_not_applicable() {
        let streams = SeedStream::new(5);
        let h = empirical_dimension_histogram(&model_23(0.6), 100, 200, &streams).unwrap();
        let rows = check_concentration(&h, &[60], TailVariant::Theorem).unwrap();
        assert_eq!(rows[0].regime, Regime::Void);
        assert_eq!(rows[0].satisfied, None);
    }

    #[test]
    fn alpha_one_above_tail_is_certain() {
        let streams = SeedStream::new(5);
        let h = empirical_dimension_histogram(&model_23(1.0), 40, 100, &streams).unwrap();
        let rows = check_concentration(&h, &[10, 20, 39], TailVariant::Theorem).unwrap();
        for r in rows {
            assert_eq!(r.regime, Regime::Above);
            assert_eq!(r.empirical, Some(1.0));
            assert_eq!(r.satisfied, Some(true));
        }
    }

    #[test]
    fn block_route_matches_direct_rank() {
        use crate::linalg::numerical_rank;
        let streams = SeedStream::new(12);
        for (k, n) in [(0u64, 15usize), (1, 30), (2, 60)] {
            let ts = build_toeplitz(&model_23(0.5), n).unwrap();
            let mut rng = streams.trial(k);
            for _ in 0..50 {
                let pat = NuPattern::sample(ts.window_len(), 0.5, &mut rng);
                let direct = 2 + numerical_rank(&select_columns(&ts.theta_mat, &pat.continuous_slots()));
                assert_eq!(singular_dimension(&ts, &pat).unwrap(), direct);
            }
        }
    }

    proptest! {
        #[test]
        fn dimension_bounds_and_monotone(bits in 0u64..(1 << 13), extra in 0usize..13) {
            let ts = build_toeplitz(&model_23(0.5), 12).unwrap();
            let w = ts.window_len();
            let pat = NuPattern::from_bits(bits, w);
            let d = singular_dimension(&ts, &pat).unwrap();
            prop_assert!(d >= 2 && d <= 12.min(2 + pat.popcount()));
            let mut flags = pat.flags().to_vec();
            flags[extra % w] = true;
            let d2 = singular_dimension(&ts, &NuPattern::new(flags)).unwrap();
            prop_assert!(d2 >= d);
        }
    }
}
