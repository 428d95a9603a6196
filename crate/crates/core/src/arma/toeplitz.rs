//! Banded Toeplitz matrices linking a block `X^n` to its excitation window.
//!
//! `Phi X^n = Theta xi_{p-q+1}^n`, and the square completion
//! `PhiHat X^n = ThetaHat [X^p; xi_{p-q+1}^n]` with `det(PhiHat) = 1`.

use nalgebra::{DMatrix, DVector};

use super::model::ArmaModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSet {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    /// `(n-p) x n`, rows `[.. phi_p .. phi_1 1 ..]`.
    pub phi_mat: DMatrix<f64>,
    /// `(n-p) x (n+q-p)`, rows `[.. theta_q .. theta_1 1 ..]`.
    pub theta_mat: DMatrix<f64>,
    /// `n x n`, `[I_p 0; Phi]`.
    pub phi_hat: DMatrix<f64>,
    /// `n x (n+q)`, `[I_p 0; 0 Theta]`.
    pub theta_hat: DMatrix<f64>,
    /// `PhiHat^{-1} ThetaHat`, `n x (n+q)`.
    pub transfer: DMatrix<f64>,
    phi: Vec<f64>,
}

pub fn build_toeplitz(model: &ArmaModel, n: usize) -> Result<ToeplitzSet> {
    let (p, q) = (model.p(), model.q());
    if n < p + 1 {
        return Err(Error::BlockTooShort { n, p });
    }
    let rows = n - p;
    let window = n + q - p;
    let phi = model.phi();
    let theta = model.theta();

    let mut phi_mat = DMatrix::zeros(rows, n);
    let mut theta_mat = DMatrix::zeros(rows, window);
    for r in 0..rows {
        phi_mat[(r, r + p)] = 1.0;
        for i in 1..=p {
            phi_mat[(r, r + p - i)] = phi[i - 1];
        }
        theta_mat[(r, r + q)] = 1.0;
        for i in 1..=q {
            theta_mat[(r, r + q - i)] = theta[i - 1];
        }
    }

    let mut phi_hat = DMatrix::zeros(n, n);
    let mut theta_hat = DMatrix::zeros(n, n + q);
    for i in 0..p {
        phi_hat[(i, i)] = 1.0;
        theta_hat[(i, i)] = 1.0;
    }
    phi_hat.rows_mut(p, rows).copy_from(&phi_mat);
    theta_hat
        .view_mut((p, p), (rows, window))
        .copy_from(&theta_mat);

    let mut ts = ToeplitzSet {
        n,
        p,
        q,
        phi_mat,
        theta_mat,
        phi_hat,
        transfer: DMatrix::zeros(0, 0),
        theta_hat,
        phi: phi.to_vec(),
    };
    ts.transfer = ts.solve_phi_hat(&ts.theta_hat);
    Ok(ts)
}

impl ToeplitzSet {
    /// Length `n + q - p` of the excitation window.
    pub fn window_len(&self) -> usize {
        self.n + self.q - self.p
    }

    /// Solves `PhiHat Y = B` by forward substitution (`PhiHat` is unit lower triangular).
    pub fn solve_phi_hat(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(rhs.nrows(), self.n);
        let mut y = rhs.clone();
        for r in self.p..self.n {
            for (i, ph) in self.phi.iter().enumerate() {
                let src = r - i - 1;
                for c in 0..y.ncols() {
                    let v = y[(src, c)];
                    y[(r, c)] -= ph * v;
                }
            }
        }
        y
    }


    /// `X^n = PhiHat^{-1} ThetaHat [x_boundary; xi_window]`.
    pub fn reconstruct_from_boundary(
        &self,
        x_boundary: &[f64],
        xi_window: &[f64],
    ) -> Result<DVector<f64>> {
        if x_boundary.len() != self.p || xi_window.len() != self.window_len() {
            return Err(Error::DimensionMismatch(format!(
                "expected boundary {} and window {}, got {} and {}",
                self.p,
                self.window_len(),
                x_boundary.len(),
                xi_window.len()
            )));
        }
        let joint = DVector::from_iterator(
            self.n + self.q,
            x_boundary.iter().chain(xi_window).copied(),
        );
        let rhs = &self.theta_hat * joint;
        let y = self.solve_phi_hat(&DMatrix::from_column_slice(self.n, 1, rhs.as_slice()));
        Ok(y.column(0).into_owned())
    }

    /// `||Phi x - Theta xi||_inf / (1 + ||x||_inf)`.
    pub fn vector_identity_residual(&self, x: &[f64], xi_window: &[f64]) -> Result<f64> {
        if x.len() != self.n || xi_window.len() != self.window_len() {
            return Err(Error::DimensionMismatch(format!(
                "expected x of {} and window of {}",
                self.n,
                self.window_len()
            )));
        }
        let xv = DVector::from_column_slice(x);
        let lhs = &self.phi_mat * &xv;
        let rhs = &self.theta_mat * DVector::from_column_slice(xi_window);
        let diff = (lhs - rhs).amax();
        Ok(diff / (1.0 + xv.amax()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arma::distribution::DceDistribution;
    use crate::arma::path::simulate_path;
    use crate::rng::SeedStream;

    fn model(phi: Vec<f64>, theta: Vec<f64>) -> ArmaModel {
        ArmaModel::new(phi, theta, DceDistribution::bernoulli_gaussian(0.5).unwrap()).unwrap()
    }

    #[test]
    fn ar1_layout() {
        let ts = build_toeplitz(&model(vec![-1.0 / 3.0], vec![]), 3).unwrap();
        let third = -1.0 / 3.0;
        assert_eq!(
            ts.phi_mat,
            DMatrix::from_row_slice(2, 3, &[third, 1.0, 0.0, 0.0, third, 1.0])
        );
        assert_eq!(ts.theta_mat, DMatrix::identity(2, 2));
    }

    #[test]
    fn arma23_band_layout() {
        let m = model(vec![0.1, 0.2], vec![0.3, 0.4, 0.5]);
        let ts = build_toeplitz(&m, 6).unwrap();
        assert_eq!(ts.phi_mat.shape(), (4, 6));
        assert_eq!(ts.theta_mat.shape(), (4, 7));
        assert_eq!(ts.phi_hat.shape(), (6, 6));
        assert_eq!(ts.theta_hat.shape(), (6, 9));
        for r in 0..4 {
            assert_eq!(
                ts.phi_mat.row(r).iter().skip(r).take(3).copied().collect::<Vec<_>>(),
                vec![0.2, 0.1, 1.0]
            );
            assert_eq!(
                ts.theta_mat.row(r).iter().skip(r).take(4).copied().collect::<Vec<_>>(),
                vec![0.5, 0.4, 0.3, 1.0]
            );
            let nonzero_phi = ts.phi_mat.row(r).iter().filter(|v| **v != 0.0).count();
            assert_eq!(nonzero_phi, 3);
        }
        assert!((ts.phi_hat.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_too_short() {
        let m = model(vec![0.1, 0.2], vec![]);
        assert_eq!(
            build_toeplitz(&m, 2).unwrap_err(),
            Error::BlockTooShort { n: 2, p: 2 }
        );
    }

    #[test]
    fn reconstruct_hand_recursion() {
        let ts = build_toeplitz(&model(vec![-1.0 / 3.0], vec![]), 5).unwrap();
        let x = ts.reconstruct_from_boundary(&[9.0], &[0.0; 4]).unwrap();
        let expect = [9.0, 3.0, 1.0, 1.0 / 3.0, 1.0 / 9.0];
        for (a, b) in x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let zero = ts.reconstruct_from_boundary(&[0.0], &[0.0; 4]).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));
        assert!(ts.reconstruct_from_boundary(&[0.0], &[0.0; 3]).is_err());
    }

    #[test]
    fn reconstruct_round_trip() {
        let m = model(vec![-0.5, 0.2], vec![0.4, -0.1, 0.3]);
        let path = simulate_path(&m, 25, None, &mut SeedStream::new(5).trial(0)).unwrap();
        let ts = build_toeplitz(&m, 25).unwrap();
        let x = ts.reconstruct_from_boundary(path.boundary(), &path.xi).unwrap();
        let scale = 1.0 + path.x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        for (a, b) in x.iter().zip(&path.x) {
            assert!((a - b).abs() / scale < 1e-8);
        }
        assert!(ts.vector_identity_residual(&path.x, &path.xi).unwrap() < 1e-9);
    }

    #[test]
    fn transfer_matrix_matches_inverse() {
        let m = model(vec![0.3, -0.2], vec![0.5]);
        let ts = build_toeplitz(&m, 7).unwrap();
        let direct = ts.phi_hat.clone().try_inverse().unwrap() * &ts.theta_hat;
        assert!((ts.transfer.clone() - direct).amax() < 1e-12);
    }
}
