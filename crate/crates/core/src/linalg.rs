//! Dense numerical helpers shared by the rank and filter code.

use nalgebra::{Complex, DMatrix, DVector};

/// Relative singular-value threshold used for every numerical rank decision.
pub const RANK_REL_TOL: f64 = 1e-8;

/// Singular values in decreasing order (empty for a matrix with a zero dimension).
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `RANK_REL_TOL * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>) -> usize {
    rank_from_singular_values(&singular_values(m))
}

pub fn rank_from_singular_values(sv: &[f64]) -> usize {
    match sv.first() {
        Some(&top) if top > 0.0 && top.is_finite() => {
            sv.iter().filter(|&&s| s > RANK_REL_TOL * top).count()
        }
        _ => 0,
    }
}

/// `sigma_min / sigma_max` over the `min(rows, cols)` singular values; 0 when degenerate.
pub fn sigma_ratio(m: &DMatrix<f64>) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

/// Left singular vectors of the `k` largest singular values, as columns.
pub fn leading_left_singular_vectors(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    if k == 0 || m.nrows() == 0 || m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let k = k.min(order.len());
    DMatrix::from_fn(m.nrows(), k, |r, c| u[(r, order[c])])
}

/// Column selection `m[:, cols]`.
pub fn select_columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

/// Roots of the monic polynomial `z^d + c[0] z^(d-1) + ... + c[d-1]`.
pub fn poly_roots(c: &[f64]) -> Vec<Complex<f64>> {
    let d = c.len();
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![Complex::new(-c[0], 0.0)];
    }
    let mut companion = DMatrix::<f64>::zeros(d, d);
    for (j, &cj) in c.iter().enumerate() {
        companion[(0, j)] = -cj;
    }
    for i in 1..d {
        companion[(i, i - 1)] = 1.0;
    }
    let mut roots: Vec<Complex<f64>> = companion.complex_eigenvalues().iter().copied().collect();
    // a few Newton steps tighten the eigenvalue estimates
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (val, der) = horner_with_derivative(c, *r);
            if der.norm() == 0.0 {
                break;
            }
            let step = val / der;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            let next = *r - step;
            if horner_with_derivative(c, next).0.norm() <= val.norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    roots
}

fn horner_with_derivative(c: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut val = Complex::new(1.0, 0.0);
    let mut der = Complex::new(0.0, 0.0);
    for &ci in c {
        der = der * z + val;
        val = val * z + ci;
    }
    (val, der)
}

/// Coefficients `[1, c1, ..., cd]` of `prod_k (1 - r_k w)`. Roots must be closed under
/// conjugation; the imaginary residue is dropped.
pub fn poly_from_roots(roots: &[Complex<f64>]) -> Vec<f64> {
    let mut coeffs = vec![Complex::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        coeffs = next;
    }
    coeffs.into_iter().map(|c| c.re).collect()
}

/// First `len` power-series coefficients of `num(w) / den(w)` (long division), `den[0] != 0`.
pub fn series_quotient(num: &[f64], den: &[f64], len: usize) -> Vec<f64> {
    assert!(!den.is_empty() && den[0] != 0.0, "leading denominator coefficient must be nonzero");
    let mut h = vec![0.0; len];
    for n in 0..len {
        let mut acc = num.get(n).copied().unwrap_or(0.0);
        for i in 1..den.len().min(n + 1) {
            acc -= den[i] * h[n - i];
        }
        h[n] = acc / den[0];
    }
    h
}

pub fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}
