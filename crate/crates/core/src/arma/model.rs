//! ARMA model definition and stationarity checks.
//!
//! Sign convention: the recursion is
//!
//! ```text
//! X_t = xi_t + sum_{i=1..q} theta_i xi_{t-i} - sum_{i=1..p} phi_i X_{t-i}
//! ```
//!
//! so the AR part enters with a minus sign. The AR(1) recursion
//! `X_t = X_{t-1} / 3 + xi_t` is therefore `phi = [-1/3]`.

use nalgebra::Complex;

use super::distribution::DceDistribution;
use crate::error::{Error, Result};
use crate::linalg::{poly_roots, series_quotient};

/// Poles must satisfy `|z| < 1 - STABILITY_MARGIN`.
pub const STABILITY_MARGIN: f64 = 1e-9;

/// Burn-in length in time constants of the slowest pole.
const BURN_IN_TIME_CONSTANTS: f64 = 60.0;
const MAX_BURN_IN: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ArmaModel {
    phi: Vec<f64>,
    theta: Vec<f64>,
    excitation: DceDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    pub stable: bool,
    /// Moduli of the AR poles, largest first.
    pub pole_moduli: Vec<f64>,
}

impl ArmaModel {
    pub fn new(phi: Vec<f64>, theta: Vec<f64>, excitation: DceDistribution) -> Result<Self> {
        check_finite("phi", &phi)?;
        check_finite("theta", &theta)?;
        Ok(Self {
            phi,
            theta,
            excitation,
        })
    }

    /// The i.i.d. process `X_t = xi_t`.
    pub fn white(excitation: DceDistribution) -> Self {
        Self {
            phi: Vec::new(),
            theta: Vec::new(),
            excitation,
        }
    }

    pub fn p(&self) -> usize {
        self.phi.len()
    }

    pub fn q(&self) -> usize {
        self.theta.len()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn excitation(&self) -> &DceDistribution {
        &self.excitation
    }

    pub fn alpha(&self) -> f64 {
        self.excitation.alpha()
    }

    pub fn with_excitation(&self, excitation: DceDistribution) -> Self {
        Self {
            excitation,
            ..self.clone()
        }
    }

    /// Roots of `z^p + phi_1 z^(p-1) + ... + phi_p`.
    pub fn poles(&self) -> Vec<Complex<f64>> {
        poly_roots(&self.phi)
    }

    pub fn validate(&self) -> StationarityReport {
        let mut pole_moduli: Vec<f64> = self.poles().iter().map(|z| z.norm()).collect();
        pole_moduli.sort_by(|a, b| b.total_cmp(a));
        let stable = pole_moduli
            .iter()
            .all(|&m| m.is_finite() && m < 1.0 - STABILITY_MARGIN);
        StationarityReport {
            stable,
            pole_moduli,
        }
    }

    pub fn ensure_stable(&self) -> Result<StationarityReport> {
        let report = self.validate();
        if report.stable {
            Ok(report)
        } else {
            Err(Error::Unstable {
                max_modulus: report.pole_moduli.first().copied().unwrap_or(f64::NAN),
            })
        }
    }

    /// First `len` impulse-response coefficients of
    /// `H(z) = (1 + sum theta_i z^-i) / (1 + sum phi_i z^-i)`.
    pub fn impulse_response(&self, len: usize) -> Result<Vec<f64>> {
        self.ensure_stable()?;
        let mut num = vec![1.0];
        num.extend_from_slice(&self.theta);
        let mut den = vec![1.0];
        den.extend_from_slice(&self.phi);
        Ok(series_quotient(&num, &den, len))
    }

    /// `ceil(60 / |ln rho_max|)` capped at 1e5; zero without an AR part.
    pub fn default_burn_in(&self) -> usize {
        if self.phi.is_empty() {
            return 0;
        }
        let rho = self.validate().pole_moduli.first().copied().unwrap_or(0.0);
        if rho <= 0.0 {
            // all poles at the origin: the AR memory is at most p steps
            return self.p();
        }
        if rho >= 1.0 {
            return MAX_BURN_IN;
        }
        let steps = (BURN_IN_TIME_CONSTANTS / rho.ln().abs()).ceil();
        if steps.is_finite() {
            (steps as usize).min(MAX_BURN_IN)
        } else {
            MAX_BURN_IN
        }
    }
}

fn check_finite(name: &'static str, coeffs: &[f64]) -> Result<()> {
    match coeffs.iter().position(|c| !c.is_finite()) {
        Some(index) => Err(Error::NonFiniteCoefficient {
            name,
            index,
            value: coeffs[index],
        }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bg() -> DceDistribution {
        DceDistribution::bernoulli_gaussian(0.5).unwrap()
    }

    #[test]
    fn pure_ma_is_stable_without_poles() {
        let m = ArmaModel::new(vec![], vec![0.5, -2.0, 3.0], bg()).unwrap();
        let r = m.validate();
        assert!(r.stable);
        assert!(r.pole_moduli.is_empty());
    }

    #[test]
    fn ar1_third_is_stable() {
        let m = ArmaModel::new(vec![-1.0 / 3.0], vec![], bg()).unwrap();
        let r = m.validate();
        assert!(r.stable);
        assert_relative_eq!(r.pole_moduli[0], 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn explosive_ar1_is_flagged() {
        let m = ArmaModel::new(vec![-1.5], vec![], bg()).unwrap();
        let r = m.validate();
        assert!(!r.stable);
        assert_relative_eq!(r.pole_moduli[0], 1.5, epsilon = 1e-15);
        assert!(matches!(m.impulse_response(4), Err(Error::Unstable { .. })));
    }

    #[test]
    fn unit_root_is_unstable() {
        let m = ArmaModel::new(vec![-1.0], vec![], bg()).unwrap();
        assert!(!m.validate().stable);
    }

    #[test]
    fn pole_moduli_sorted_descending() {
        // (z - 0.2)(z + 0.7) = z^2 + 0.5 z - 0.14
        let m = ArmaModel::new(vec![0.5, -0.14], vec![], bg()).unwrap();
        let r = m.validate();
        assert_relative_eq!(r.pole_moduli[0], 0.7, epsilon = 1e-12);
        assert_relative_eq!(r.pole_moduli[1], 0.2, epsilon = 1e-12);
    }

    #[test]
    fn non_finite_coefficients_rejected() {
        let e = ArmaModel::new(vec![f64::NAN], vec![], bg()).unwrap_err();
        assert!(matches!(e, Error::NonFiniteCoefficient { name: "phi", index: 0, .. }));
        let e = ArmaModel::new(vec![], vec![0.0, f64::INFINITY], bg()).unwrap_err();
        assert!(matches!(e, Error::NonFiniteCoefficient { name: "theta", index: 1, .. }));
    }

    #[test]
    fn fir_impulse_response() {
        let m = ArmaModel::new(vec![], vec![0.5, -0.2], bg()).unwrap();
        assert_eq!(m.impulse_response(5).unwrap(), vec![1.0, 0.5, -0.2, 0.0, 0.0]);
    }

    #[test]
    fn ar1_impulse_response_is_geometric() {
        let m = ArmaModel::new(vec![-1.0 / 3.0], vec![], bg()).unwrap();
        let h = m.impulse_response(30).unwrap();
        for (n, v) in h.iter().enumerate() {
            assert_relative_eq!(*v, 3f64.powi(-(n as i32)), max_relative = 1e-14);
        }
    }

    #[test]
    fn arma11_impulse_response() {
        let m = ArmaModel::new(vec![-1.0 / 3.0], vec![1.0], bg()).unwrap();
        let h = m.impulse_response(6).unwrap();
        let expect = [1.0, 4.0 / 3.0, 4.0 / 9.0, 4.0 / 27.0, 4.0 / 81.0, 4.0 / 243.0];
        for (a, b) in h.iter().zip(expect) {
            assert_relative_eq!(*a, b, max_relative = 1e-14);
        }
    }

    #[test]
    fn burn_in_rule() {
        let m = ArmaModel::new(vec![-1.0 / 3.0], vec![], bg()).unwrap();
        assert_eq!(m.default_burn_in(), (60.0 / 3f64.ln()).ceil() as usize);
        assert_eq!(ArmaModel::white(bg()).default_burn_in(), 0);
        let slow = ArmaModel::new(vec![-(1.0 - 1e-8)], vec![], bg()).unwrap();
        assert_eq!(slow.default_burn_in(), MAX_BURN_IN);
    }
}
