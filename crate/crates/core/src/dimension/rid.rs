//! Rényi information dimension from the growth of quantized entropy.

use std::collections::HashMap;

use rand::Rng;

use super::entropy::{entropy_from_counts, quantize_cell, EntropyMethod};
use crate::arma::{simulate_path, ArmaModel};
use crate::error::{Error, Result};

/// Joint quantization is limited to this many coordinates.
pub const MAX_JOINT_DIMENSION: usize = 3;
/// Hard cap on `m^n` cells for joint probes.
pub const MAX_JOINT_CELLS: u64 = 1_000_000;
/// Minimum samples per cell for joint probes.
pub const SAMPLES_PER_CELL: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyPoint {
    pub m: u64,
    pub entropy_bits: f64,
    pub sample_count: usize,
}

/// Quantized entropy `H([X]_m)` against precision `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    pub points: Vec<EntropyPoint>,
    pub dimension: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidEstimate {
    pub slope: f64,
    /// OLS standard error of the slope; NaN when only two points were fitted.
    pub stderr: f64,
    pub m_range: (u64, u64),
    pub method: EntropyMethod,
    pub curve: EntropyCurve,
}

/// Entropy of the joint quantization of `samples` (row-major, `dimension` values each)
/// at every `m` of the grid.
pub fn entropy_curve(samples: &[f64], dimension: usize, m_grid: &[u64], method: EntropyMethod) -> EntropyCurve {
    assert!((1..=MAX_JOINT_DIMENSION).contains(&dimension));
    let count = samples.len() / dimension;
    let points = m_grid
        .iter()
        .map(|&m| {
            let mut table: HashMap<[i64; MAX_JOINT_DIMENSION], u64> = HashMap::with_capacity(1024);
            for row in samples.chunks_exact(dimension) {
                let mut key = [0i64; MAX_JOINT_DIMENSION];
                for (k, v) in key.iter_mut().zip(row) {
                    *k = quantize_cell(*v, m);
                }
                *table.entry(key).or_insert(0) += 1;
            }
            EntropyPoint {
                m,
                entropy_bits: entropy_from_counts(table.into_values(), method),
                sample_count: count,
            }
        })
        .collect();
    EntropyCurve { points, dimension }
}

/// Least-squares slope of entropy against `log2 m` over the given points.
pub fn fit_slope(points: &[EntropyPoint]) -> Result<(f64, f64)> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.entropy_bits.is_finite())
        .map(|p| ((p.m as f64).log2(), p.entropy_bits))
        .collect();
    let k = usable.len();
    if k < 2 {
        return Err(Error::DegenerateGrid { usable: k });
    }
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / k as f64;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / k as f64;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateGrid { usable: 1 });
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let stderr = if k > 2 {
        let sse: f64 = usable
            .iter()
            .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
            .sum();
        (sse / (k - 2) as f64 / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok((slope, stderr))
}

fn validate_grid(m_grid: &[u64]) -> Result<()> {
    if m_grid.len() < 4 {
        return Err(Error::InvalidGrid(format!("{} points", m_grid.len())));
    }
    if m_grid.iter().any(|m| !m.is_power_of_two()) {
        return Err(Error::InvalidGrid(format!("{m_grid:?} has a non-dyadic entry")));
    }
    if m_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid(format!("{m_grid:?} is not increasing")));
    }
    Ok(())
}

/// Estimates the information dimension of a sampler's law.
///
/// One sample set of size `samples` is drawn and quantized at every grid
/// precision; the slope is fitted over the upper half of the grid.
pub fn estimate_rid<R, F>(
    dimension: usize,
    mut sampler: F,
    m_grid: &[u64],
    samples: usize,
    method: EntropyMethod,
    rng: &mut R,
) -> Result<RidEstimate>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R, &mut [f64]),
{
    if !(1..=MAX_JOINT_DIMENSION).contains(&dimension) {
        return Err(Error::InfeasibleProbe(format!(
            "dimension {dimension} outside 1..={MAX_JOINT_DIMENSION}"
        )));
    }
    validate_grid(m_grid)?;
    if samples == 0 {
        return Err(Error::SampleStarvation {
            samples,
            required: 1,
        });
    }
    let mut data = vec![0.0; samples * dimension];
    for row in data.chunks_exact_mut(dimension) {
        sampler(rng, row);
    }
    let curve = entropy_curve(&data, dimension, m_grid, method);
    let top = &curve.points[m_grid.len() / 2..];
    let (slope, stderr) = fit_slope(top)?;
    Ok(RidEstimate {
        slope,
        stderr,
        m_range: (top[0].m, top[top.len() - 1].m),
        method,
        curve,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdrPoint {
    pub n: usize,
    pub m: u64,
    /// `H([X^n]_m) / (n log2 m)`.
    pub value: f64,
    pub samples: usize,
}

/// Finite-scale probe of the information dimension rate: the normalized joint
/// quantized entropy of independent blocks `X^n` for each `n` in the grid.
/// It does not resolve the double limit; it only shows the trend.
pub fn estimate_idr<R: Rng + ?Sized>(
    model: &ArmaModel,
    m: u64,
    n_grid: &[usize],
    samples: usize,
    method: EntropyMethod,
    rng: &mut R,
) -> Result<Vec<IdrPoint>> {
    if !(2..=64).contains(&m) {
        return Err(Error::InfeasibleProbe(format!("m = {m} outside 2..=64")));
    }
    if n_grid.is_empty() || n_grid.len() > 3 {
        return Err(Error::InfeasibleProbe(format!(
            "n-grid must have 1 to 3 entries, got {}",
            n_grid.len()
        )));
    }
    for &n in n_grid {
        if !(1..=MAX_JOINT_DIMENSION).contains(&n) {
            return Err(Error::InfeasibleProbe(format!("block length {n} outside 1..=3")));
        }
        let cells = m.pow(n as u32);
        if cells > MAX_JOINT_CELLS {
            return Err(Error::InfeasibleProbe(format!("{cells} cells exceed {MAX_JOINT_CELLS}")));
        }
        let required = SAMPLES_PER_CELL * cells as usize;
        if samples < required {
            return Err(Error::SampleStarvation { samples, required });
        }
    }
    model.ensure_stable()?;
    let mut out = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let mut data = Vec::with_capacity(samples * n);
        for _ in 0..samples {
            data.extend(simulate_path(model, n, None, rng)?.x);
        }
        let h = entropy_curve(&data, n, &[m], method).points[0].entropy_bits;
        out.push(IdrPoint {
            n,
            m,
            value: h / (n as f64 * (m as f64).log2()),
            samples,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arma::DceDistribution;
    use crate::rng::SeedStream;

    fn dyadic(lo: u32, hi: u32) -> Vec<u64> {
        (lo..=hi).map(|k| 1u64 << k).collect()
    }

    fn scalar_rid(dist: &DceDistribution, seed: u64) -> RidEstimate {
        let mut rng = SeedStream::new(seed).trial(0);
        estimate_rid(
            1,
            |r, out: &mut [f64]| out[0] = dist.sample(r).0,
            &dyadic(4, 10),
            200_000,
            EntropyMethod::PlugIn,
            &mut rng,
        )
        .unwrap()
    }

    #[test]
    fn gaussian_slope_near_one() {
        let est = scalar_rid(&DceDistribution::gaussian(0.0, 1.0).unwrap(), 1);
        assert!((est.slope - 1.0).abs() < 0.05, "{}", est.slope);
        assert_eq!(est.m_range, (128, 1024));
    }

    #[test]
    fn atoms_slope_near_zero() {
        let est = scalar_rid(&DceDistribution::rademacher(), 2);
        assert!(est.slope.abs() < 0.02, "{}", est.slope);
    }

    #[test]
    fn mixture_slope_near_half() {
        let est = scalar_rid(&DceDistribution::bernoulli_gaussian(0.5).unwrap(), 3);
        assert!((est.slope - 0.5).abs() < 0.05, "{}", est.slope);
        // refinement never lowers the plug-in entropy on a fixed sample
        let pts = &est.curve.points;
        assert!(pts.windows(2).all(|w| w[1].entropy_bits >= w[0].entropy_bits - 1e-12));
    }

    #[test]
    fn grid_validation() {
        let mut rng = SeedStream::new(0).trial(0);
        let f = |_: &mut _, out: &mut [f64]| out[0] = 0.0;
        assert!(matches!(
            estimate_rid(1, f, &[2, 4, 8], 10, EntropyMethod::PlugIn, &mut rng),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            estimate_rid(1, f, &[2, 4, 6, 8], 10, EntropyMethod::PlugIn, &mut rng),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            estimate_rid(4, f, &[2, 4, 8, 16], 10, EntropyMethod::PlugIn, &mut rng),
            Err(Error::InfeasibleProbe(_))
        ));
    }

    #[test]
    fn two_point_fit_has_no_stderr() {
        let pts = [
            EntropyPoint { m: 2, entropy_bits: 1.0, sample_count: 1 },
            EntropyPoint { m: 4, entropy_bits: 1.5, sample_count: 1 },
        ];
        let (slope, se) = fit_slope(&pts).unwrap();
        assert!((slope - 0.5).abs() < 1e-15);
        assert!(se.is_nan());
        assert!(matches!(fit_slope(&pts[..1]), Err(Error::DegenerateGrid { usable: 1 })));
    }

    #[test]
    fn idr_probe_limits() {
        let model = ArmaModel::white(DceDistribution::gaussian(0.0, 1.0).unwrap());
        let mut rng = SeedStream::new(0).trial(0);
        assert!(matches!(
            estimate_idr(&model, 32, &[2], 1000, EntropyMethod::PlugIn, &mut rng),
            Err(Error::SampleStarvation { required: 102_400, .. })
        ));
        assert!(matches!(
            estimate_idr(&model, 128, &[1], 1_000_000, EntropyMethod::PlugIn, &mut rng),
            Err(Error::InfeasibleProbe(_))
        ));
        assert!(matches!(
            estimate_idr(&model, 4, &[4], 1_000_000, EntropyMethod::PlugIn, &mut rng),
            Err(Error::InfeasibleProbe(_))
        ));
    }

    #[test]
    fn idr_white_noise() {
        let mut rng = SeedStream::new(4).trial(0);
        let gauss = ArmaModel::white(DceDistribution::gaussian(0.0, 1.0).unwrap());
        let v = estimate_idr(&gauss, 64, &[1], 20_000, EntropyMethod::PlugIn, &mut rng).unwrap();
        // H([X]_64) ~ h(X) + 6 bits with h(N(0,1)) ~ 2.05 bits
        assert!(v[0].value > 0.9 && v[0].value < 1.5, "{:?}", v);
        let atoms = ArmaModel::white(DceDistribution::rademacher());
        let v = estimate_idr(&atoms, 64, &[1], 20_000, EntropyMethod::PlugIn, &mut rng).unwrap();
        assert!(v[0].value < 0.2);
    }
}
