//! Closed-form bounds: block-average dimension sandwich, Bernoulli KL,
//! concentration of singular dimensions and the continuity-chance bound.
//!
//! KL divergences are in nats, matching the exponential bounds that use them.

use crate::error::{Error, Result};

/// Sandwich on `d(X^(m+p)) / (m+p)`.
///
/// `lower = m a / (m + p)`; `upper` is the smaller of `(p + q + m a) / (m + p)`
/// and `((m + q) a + p) / (m + p)`.
pub fn bid_bounds(m: usize, p: usize, q: usize, alpha: f64) -> (f64, f64) {
    let (m, p, q) = (m as f64, p as f64, q as f64);
    let denom = m + p;
    let lower = m * alpha / denom;
    let upper = ((p + q + m * alpha) / denom).min(((m + q) * alpha + p) / denom);
    (lower, upper)
}

/// `D(r || a)` between Bernoulli laws in nats, with `0 ln 0 = 0` and `+inf` when
/// `r` puts mass where `a` has none.
pub fn bernoulli_kl(r: f64, alpha: f64) -> f64 {
    fn term(x: f64, y: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else if y == 0.0 {
            f64::INFINITY
        } else {
            x * (x / y).ln()
        }
    }
    (term(r, alpha) + term(1.0 - r, 1.0 - alpha)).max(0.0)
}

/// Which argument the upper-tail KL uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailVariant {
    /// `(k + q - p) / (n + q - p)`.
    #[default]
    Theorem,
    /// `(k + q) / (n + q - p)`.
    Appendix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Above,
    Below,
    Void,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Above => "above",
            Regime::Below => "below",
            Regime::Void => "void",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationBounds {
    pub k: usize,
    /// Lower bound on `Pr(d > k)` when the upper-tail argument is below `alpha`.
    pub p_above: Option<f64>,
    /// Lower bound on `Pr(d < k)` when the lower-tail argument is above `alpha`.
    pub p_below: Option<f64>,
    pub regime: Regime,
}

/// Tail bounds on the singular dimension `d` of a `(p, q)` block of length `n`.
pub fn concentration_bounds(
    n: usize,
    p: usize,
    q: usize,
    alpha: f64,
    k: usize,
    variant: TailVariant,
) -> Result<ConcentrationBounds> {
    if n <= p {
        return Err(Error::InvalidArgument(format!("need n > p, got n = {n}, p = {p}")));
    }
    let window = (n + q - p) as f64;
    let (kf, pf, qf, nf) = (k as f64, p as f64, q as f64, n as f64);
    let above_arg = match variant {
        TailVariant::Theorem => (kf + qf - pf) / window,
        TailVariant::Appendix => (kf + qf) / window,
    };
    let below_arg = (kf - pf) / (nf - pf);
    let tail = |arg: f64| {
        let d = bernoulli_kl(arg.clamp(0.0, 1.0), alpha);
        if d.is_infinite() {
            1.0
        } else {
            -(-window * d).exp_m1()
        }
    };
    let p_above = (above_arg < alpha).then(|| tail(above_arg));
    let p_below = (below_arg > alpha).then(|| tail(below_arg));
    let regime = if p_above.is_some() {
        Regime::Above
    } else if p_below.is_some() {
        Regime::Below
    } else {
        Regime::Void
    };
    Ok(ConcentrationBounds {
        k,
        p_above,
        p_below,
        regime,
    })
}

/// Smallest block length for which the tail bounds put `d / n` within `delta` of
/// `alpha` with probability at least `1 - eps`; never below `p + 2`.
pub fn min_n_for_concentration(p: usize, q: usize, alpha: f64, eps: f64, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < alpha.min(1.0 - alpha)) {
        return Err(Error::InvalidBand(format!(
            "delta = {delta} must lie in (0, min(alpha, 1 - alpha)) for alpha = {alpha}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidBand(format!("eps = {eps} must lie in (0, 1)")));
    }
    let (pf, qf) = (p as f64, q as f64);
    let log_term = -(eps / 2.0).ln();
    let candidates = [
        2.0 * (qf * (1.0 + delta / 2.0 - alpha) - pf) / delta,
        log_term / bernoulli_kl(alpha - delta / 2.0, alpha) - qf,
        2.0 * pf / delta,
        log_term / bernoulli_kl(alpha + delta / 2.0, alpha) - qf,
    ];
    let n = candidates.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)).ceil();
    if !n.is_finite() || n > usize::MAX as f64 {
        return Err(Error::InvalidBand(format!("required block length {n} is not representable")));
    }
    Ok((n.max(0.0) as usize).max(p + 2))
}

/// `1 - (1 - d^p)^(t - i0)`.
pub fn continuity_chance_bound(d: f64, p: u32, t: u64, i0: u64) -> Result<f64> {
    if t < i0 {
        return Err(Error::InvalidArgument(format!("t = {t} < i0 = {i0}")));
    }
    let steps = (t - i0) as f64;
    Ok(1.0 - (1.0 - d.powi(p as i32)).powf(steps))
}
