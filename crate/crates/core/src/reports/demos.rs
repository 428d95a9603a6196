//! Small self-contained demonstrations: Bernoulli convolutions and lagged scatter clouds.

use rand::Rng;

use crate::arma::{simulate_path, ArmaModel};
use crate::error::{Error, Result};

/// The Cantor function on `[0, 1]`, clamped outside.
pub fn cantor_function(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let mut u = u;
    let mut value = 0.0;
    let mut scale = 0.5;
    for _ in 0..64 {
        u *= 3.0;
        let digit = u.floor();
        u -= digit;
        if digit >= 1.0 && digit < 2.0 {
            return value + scale;
        }
        if digit >= 2.0 {
            value += scale;
        }
        scale *= 0.5;
    }
    value
}

/// CDF of `sum_k 3^{-k} xi_k` with Rademacher `xi_k`, supported on `[-3/2, 3/2]`.
pub fn cantor_cdf(x: f64) -> f64 {
    cantor_function((x + 1.5) / 3.0)
}

/// Draws of `sum_{k=0}^{depth} a^k xi_k` with Rademacher `xi_k`.
pub fn sample_bernoulli_convolution<R: Rng + ?Sized>(
    a: f64,
    depth: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidArgument(format!("contraction {a} outside (0, 1)")));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    Ok((0..count)
        .map(|_| {
            let mut scale = 1.0;
            let mut sum = 0.0;
            for _ in 0..=depth {
                sum += if rng.random::<bool>() { scale } else { -scale };
                scale *= a;
            }
            sum
        })
        .collect())
}

/// Kolmogorov distance between the empirical CDF of `samples` and `cdf`.
pub fn sup_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let f = cdf(x);
        worst = worst.max((i as f64 / n - f).abs()).max((j as f64 / n - f).abs());
        i = j;
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub x_t: f64,
    pub x_lagged: f64,
    /// Every excitation draw in `t+1..=t+lag` was an atom.
    pub tagged: bool,
}

/// Pairs `(X_t, X_{t+lag})` for `t = 1..=count` along one stationary path.
pub fn joint_scatter<R: Rng + ?Sized>(
    model: &ArmaModel,
    lag: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<ScatterPoint>> {
    if lag == 0 {
        return Err(Error::InvalidArgument("lag must be at least 1".into()));
    }
    let path = simulate_path(model, count + lag, None, rng)?;
    Ok((1..=count as i64)
        .map(|t| ScatterPoint {
            x_t: path.x_at(t).expect("inside block"),
            x_lagged: path.x_at(t + lag as i64).expect("inside block"),
            tagged: (t + 1..=t + lag as i64).all(|s| path.nu_at(s) == Some(false)),
        })
        .collect())
}
