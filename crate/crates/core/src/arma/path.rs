//! Stationary path simulation with the excitation flags kept alongside.

use rand::Rng;

use super::model::ArmaModel;
use crate::error::{Error, Result};

const OVERFLOW_LIMIT: f64 = 1e300;

/// A realized block `X_1..X_n` together with the excitation window
/// `xi_{p-q+1}..xi_n` and its continuity flags.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub nu: Vec<bool>,
    /// Time index of `xi[0]`, i.e. `p - q + 1`.
    pub xi_start: i64,
    pub burn_in: usize,
    pub p: usize,
    pub q: usize,
}

impl SamplePath {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `X_t` for `1 <= t <= n`.
    pub fn x_at(&self, t: i64) -> Option<f64> {
        (t >= 1).then(|| self.x.get((t - 1) as usize).copied()).flatten()
    }

    pub fn xi_at(&self, t: i64) -> Option<f64> {
        let k = t - self.xi_start;
        (k >= 0).then(|| self.xi.get(k as usize).copied()).flatten()
    }

    pub fn nu_at(&self, t: i64) -> Option<bool> {
        let k = t - self.xi_start;
        (k >= 0).then(|| self.nu.get(k as usize).copied()).flatten()
    }

    /// `X_1..X_p`.
    pub fn boundary(&self) -> &[f64] {
        &self.x[..self.p.min(self.x.len())]
    }

    /// Atom values at the discrete slots of the window, in window order.
    pub fn atom_values(&self) -> Vec<f64> {
        self.xi
            .iter()
            .zip(&self.nu)
            .filter(|(_, &nu)| !nu)
            .map(|(&v, _)| v)
            .collect()
    }
}

/// Runs the recursion from a zero state for `burn_in + n` steps and keeps the last `n`.
///
/// Excitation is drawn from time `1 - burn_in - q` on, so every moving-average lag
/// used by the retained block is a genuine draw. `burn_in = None` applies
/// [`ArmaModel::default_burn_in`].
pub fn simulate_path<R: Rng + ?Sized>(
    model: &ArmaModel,
    n: usize,
    burn_in: Option<usize>,
    rng: &mut R,
) -> Result<SamplePath> {
    model.ensure_stable()?;
    let (p, q) = (model.p(), model.q());
    let burn_in = burn_in.unwrap_or_else(|| model.default_burn_in());
    let steps = burn_in + n;
    let dist = model.excitation();

    // ex[k] is xi at time 1 - burn_in - q + k
    let mut ex = Vec::with_capacity(steps + q);
    let mut flags = Vec::with_capacity(steps + q);
    for _ in 0..steps + q {
        let (v, nu) = dist.sample(rng);
        ex.push(v);
        flags.push(nu);
    }

    let phi = model.phi();
    let theta = model.theta();
    // xs[s] is X at time 1 - burn_in + s; earlier values are zero
    let mut xs = vec![0.0; steps];
    for s in 0..steps {
        let k = s + q;
        let mut v = ex[k];
        for (i, th) in theta.iter().enumerate() {
            v += th * ex[k - i - 1];
        }
        for (i, ph) in phi.iter().enumerate() {
            if s > i {
                v -= ph * xs[s - i - 1];
            }
        }
        if !v.is_finite() || v.abs() > OVERFLOW_LIMIT {
            return Err(Error::BurnInOverflow { step: s });
        }
        xs[s] = v;
    }

    let x = xs[burn_in..].to_vec();
    let xi_start = p as i64 - q as i64 + 1;
    // time t lives at ex[t - 1 + burn_in + q]
    let first = (xi_start - 1 + burn_in as i64 + q as i64) as usize;
    let (xi, nu) = if first < ex.len() {
        (ex[first..].to_vec(), flags[first..].to_vec())
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(SamplePath {
        x,
        xi,
        nu,
        xi_start,
        burn_in,
        p,
        q,
    })
}
