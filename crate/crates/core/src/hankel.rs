//! Hankel matrices of impulse responses and their rank.
//!
//! Covers the `p x p` Hankel matrix of a proper rational filter, the shifted
//! matrices `H^(i) = [h[ip - p - 1 + j + k]]`, and the rank distribution of a
//! random column selection of the moving-average Toeplitz matrix.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rayon::prelude::*;

use crate::arma::{ArmaModel, DceDistribution};
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, poly_from_roots, poly_roots, select_columns, series_quotient, sigma_ratio, RANK_REL_TOL};
use crate::rng::SeedStream;

/// Poles and zeros closer than this cancel when a filter is built.
pub const CANCELLATION_TOL: f64 = 1e-10;
/// Moduli at or below this count as roots at the origin.
const ORIGIN_TOL: f64 = 1e-12;
/// Random zeros are redrawn when they fall this close to a pole.
const MIN_POLE_ZERO_SEPARATION: f64 = 1e-6;

/// `[h[offset + j + k]]` for `j, k < size`.
pub fn hankel_from_impulse(h: &[f64], size: usize, offset: usize) -> Result<DMatrix<f64>> {
    if size == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let needed = offset + 2 * (size - 1);
    if needed >= h.len() {
        return Err(Error::InsufficientImpulseLength {
            len: h.len(),
            needed,
        });
    }
    Ok(DMatrix::from_fn(size, size, |j, k| h[offset + j + k]))
}

/// `H(z) = gain * prod(z - zero) / prod(z - pole)` with removable pairs cancelled.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFilter {
    zeros: Vec<Complex<f64>>,
    poles: Vec<Complex<f64>>,
    gain: f64,
}

impl RationalFilter {
    pub fn new(zeros: Vec<Complex<f64>>, mut poles: Vec<Complex<f64>>, gain: f64) -> Result<Self> {
        let mut kept = Vec::with_capacity(zeros.len());
        for z in zeros {
            match poles
                .iter()
                .position(|p| (p - z).norm() <= CANCELLATION_TOL)
            {
                Some(idx) => {
                    poles.swap_remove(idx);
                }
                None => kept.push(z),
            }
        }
        if kept.len() > poles.len() {
            return Err(Error::ImproperFilter {
                zeros: kept.len(),
                poles: poles.len(),
            });
        }
        Ok(Self {
            zeros: kept,
            poles,
            gain,
        })
    }

    /// The transfer function `(1 + sum theta_i z^-i) / (1 + sum phi_i z^-i)` of a model.
    pub fn from_model(model: &ArmaModel) -> Result<Self> {
        let order = model.p().max(model.q());
        let pad = |c: &[f64]| {
            let mut v = c.to_vec();
            v.resize(order, 0.0);
            v
        };
        let zeros = snap_to_origin(poly_roots(&pad(model.theta())));
        let poles = snap_to_origin(poly_roots(&pad(model.phi())));
        Self::new(zeros, poles, 1.0)
    }

    pub fn zeros(&self) -> &[Complex<f64>] {
        &self.zeros
    }

    pub fn poles(&self) -> &[Complex<f64>] {
        &self.poles
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    /// Multiplicity `p'` of the pole at `z = 0`.
    pub fn zero_pole_count(&self) -> usize {
        self.poles.iter().filter(|p| p.norm() <= ORIGIN_TOL).count()
    }

    /// Number `p` of nonzero poles.
    pub fn nonzero_pole_count(&self) -> usize {
        self.poles.len() - self.zero_pole_count()
    }

    pub fn total_pole_count(&self) -> usize {
        self.poles.len()
    }

    /// Causal impulse response `h[0..len]`.
    pub fn impulse_response(&self, len: usize) -> Vec<f64> {
        let delay = self.poles.len() - self.zeros.len();
        let nonzero = |v: &[Complex<f64>]| -> Vec<Complex<f64>> {
            v.iter().copied().filter(|z| z.norm() > ORIGIN_TOL).collect()
        };
        let num = poly_from_roots(&nonzero(&self.zeros));
        let den = poly_from_roots(&nonzero(&self.poles));
        let body = series_quotient(&num, &den, len.saturating_sub(delay));
        let mut h = vec![0.0; len];
        for (k, v) in body.into_iter().enumerate() {
            h[k + delay] = self.gain * v;
        }
        h
    }
}

fn snap_to_origin(mut roots: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
    for r in roots.iter_mut() {
        if r.norm() <= ORIGIN_TOL {
            *r = Complex::new(0.0, 0.0);
        }
    }
    roots
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelCheck {
    pub size: usize,
    pub det_estimate: f64,
    pub sigma_ratio: f64,
    pub nonsingular: bool,
}

/// Builds the Hankel matrix `[h[j + k]]` whose size is the number of
/// non-removable poles (zero poles included) and tests it for singularity.
pub fn check_hankel_nonsingular(filter: &RationalFilter) -> HankelCheck {
    let size = filter.total_pole_count();
    if size == 0 {
        return HankelCheck {
            size,
            det_estimate: 1.0,
            sigma_ratio: 1.0,
            nonsingular: true,
        };
    }
    let h = filter.impulse_response(2 * size - 1);
    let a = hankel_from_impulse(&h, size, 0).expect("impulse length matches size");
    let ratio = sigma_ratio(&a);
    HankelCheck {
        size,
        det_estimate: a.determinant(),
        sigma_ratio: ratio,
        nonsingular: ratio > RANK_REL_TOL,
    }
}

/// Smallest admissible shift `ceil((p' + 1) / p) + 1`; `None` when `p = 0`.
pub fn shifted_hankel_threshold(nonzero_poles: usize, zero_poles: usize) -> Option<usize> {
    (nonzero_poles > 0).then(|| (zero_poles + 1).div_ceil(nonzero_poles) + 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedRank {
    pub i: usize,
    pub start: usize,
    pub rank: usize,
    pub sigma_ratio: f64,
    pub full: bool,
}

/// Numerical rank of `H^(i) = [h[ip - p - 1 + j + k]]_{j,k < p}`.
pub fn shifted_hankel_full_rank(filter: &RationalFilter, i: usize) -> Result<ShiftedRank> {
    let p = filter.nonzero_pole_count();
    let p_zero = filter.zero_pole_count();
    let threshold = shifted_hankel_threshold(p, p_zero).ok_or_else(|| Error::IndexBelowThreshold {
        i,
        reason: "filter has no nonzero poles".into(),
    })?;
    if i < threshold {
        return Err(Error::IndexBelowThreshold {
            i,
            reason: format!("need i >= {threshold} for p = {p}, p' = {p_zero}"),
        });
    }
    let start = i * p - p - 1;
    let h = filter.impulse_response(start + 2 * p - 1);
    let m = hankel_from_impulse(&h, p, start)?;
    let rank = numerical_rank(&m);
    Ok(ShiftedRank {
        i,
        start,
        rank,
        sigma_ratio: sigma_ratio(&m),
        full: rank == p,
    })
}

/// `count` roots closed under conjugation with moduli uniform on `[0.1, 0.9]`.
/// Roots closer than 1e-6 to any entry of `avoid` are redrawn.
pub fn random_stable_roots<R: Rng + ?Sized>(count: usize, avoid: &[Complex<f64>], rng: &mut R) -> Vec<Complex<f64>> {
    let far = |z: Complex<f64>| avoid.iter().all(|a| (a - z).norm() > MIN_POLE_ZERO_SEPARATION);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let modulus = rng.random_range(0.1..0.9);
        if count - out.len() >= 2 && rng.random_bool(0.5) {
            let angle = rng.random_range(0.0..std::f64::consts::PI);
            let z = Complex::from_polar(modulus, angle);
            if far(z) && z.im.abs() > MIN_POLE_ZERO_SEPARATION {
                out.push(z);
                out.push(z.conj());
            }
        } else {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let z = Complex::new(sign * modulus, 0.0);
            if far(z) {
                out.push(z);
            }
        }
    }
    out
}

/// A random stable, minimum-phase filter with `p` nonzero poles and `p'` poles at the
/// origin, normalised so that `h[0] = 1` (the shape of an ARMA transfer function).
///
/// With `p' > 0` it has `p + p'` nonzero zeros; otherwise `q <= p` nonzero zeros and
/// `p - q` zeros at the origin.
pub fn random_stable_filter<R: Rng + ?Sized>(p: usize, p_zero: usize, rng: &mut R) -> RationalFilter {
    let mut poles = random_stable_roots(p, &[], rng);
    let zeros = if p_zero > 0 {
        random_stable_roots(p + p_zero, &poles, rng)
    } else {
        let q = rng.random_range(0..=p);
        let mut z = random_stable_roots(q, &poles, rng);
        z.resize(p, Complex::new(0.0, 0.0));
        z
    };
    poles.resize(p + p_zero, Complex::new(0.0, 0.0));
    RationalFilter::new(zeros, poles, 1.0).expect("random filter is proper")
}

/// A random stable `(p, q)` model: AR poles and MA zeros drawn by [`random_stable_roots`].
pub fn random_stable_model<R: Rng + ?Sized>(
    p: usize,
    q: usize,
    excitation: DceDistribution,
    rng: &mut R,
) -> ArmaModel {
    let poles = random_stable_roots(p, &[], rng);
    let zeros = random_stable_roots(q, &poles, rng);
    let phi = poly_from_roots(&poles)[1..].to_vec();
    let theta = poly_from_roots(&zeros)[1..].to_vec();
    ArmaModel::new(phi, theta, excitation).expect("finite coefficients")
}

/// Tally of numerical ranks over random column selections.
#[derive(Debug, Clone, PartialEq)]
pub struct RankHistogram {
    /// `counts[r]` is the number of trials with rank `r`.
    pub counts: Vec<u64>,
    pub trials: u64,
}

impl RankHistogram {
    pub fn new(max_rank: usize) -> Self {
        Self {
            counts: vec![0; max_rank + 1],
            trials: 0,
        }
    }

    pub fn record(&mut self, rank: usize) {
        self.counts[rank] += 1;
        self.trials += 1;
    }

    /// Associative merge of two tallies over the same matrix.
    pub fn merge(mut self, other: &RankHistogram) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.trials += other.trials;
        self
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let t = self.trials.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }
}

/// Draws each column independently with probability `alpha` and records the numerical
/// rank of the selected columns, once per trial.
pub fn random_column_rank_distribution(
    theta_mat: &DMatrix<f64>,
    alpha: f64,
    trials: usize,
    streams: &SeedStream,
) -> RankHistogram {
    let max_rank = theta_mat.nrows().min(theta_mat.ncols());
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = streams.trial(t);
            let cols: Vec<usize> = (0..theta_mat.ncols())
                .filter(|_| rng.random::<f64>() < alpha)
                .collect();
            numerical_rank(&select_columns(theta_mat, &cols))
        })
        .fold(
            || RankHistogram::new(max_rank),
            |mut h, r| {
                h.record(r);
                h
            },
        )
        .reduce(|| RankHistogram::new(max_rank), |a, b| a.merge(&b))
}
