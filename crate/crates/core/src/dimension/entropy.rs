//! Uniform quantization and discrete entropy estimates (bits).

use std::collections::HashMap;
use std::f64::consts::LN_2;
use std::hash::Hash;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyMethod {
    #[default]
    PlugIn,
    /// Plug-in plus `(K - 1) / (2 N ln 2)` with `K` the observed support size.
    MillerMadow,
}

impl EntropyMethod {
    pub fn name(&self) -> &'static str {
        match self {
            EntropyMethod::PlugIn => "plug-in",
            EntropyMethod::MillerMadow => "miller-madow",
        }
    }
}

/// Cell index `floor(m x)` of the lattice `Z / m`.
pub fn quantize_cell(x: f64, m: u64) -> i64 {
    (m as f64 * x).floor() as i64
}

/// `[x]_m = floor(m x) / m`, componentwise.
pub fn quantize(x: &[f64], m: u64) -> Vec<f64> {
    assert!(m >= 1, "quantization precision must be at least 1");
    x.iter()
        .map(|&v| quantize_cell(v, m) as f64 / m as f64)
        .collect()
}

/// Entropy in bits of the empirical law given by `counts`.
pub fn entropy_from_counts<I>(counts: I, method: EntropyMethod) -> f64
where
    I: IntoIterator<Item = u64>,
{
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let plug_in = -counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>();
    let plug_in = plug_in.max(0.0);
    match method {
        EntropyMethod::PlugIn => plug_in,
        EntropyMethod::MillerMadow => plug_in + (counts.len() as f64 - 1.0) / (2.0 * n * LN_2),
    }
}

/// Entropy in bits of a multiset of symbols.
pub fn empirical_entropy<T, I>(symbols: I, method: EntropyMethod) -> Result<f64>
where
    T: Hash + Eq,
    I: IntoIterator<Item = T>,
{
    let mut table: HashMap<T, u64> = HashMap::new();
    for s in symbols {
        *table.entry(s).or_insert(0) += 1;
    }
    if table.is_empty() {
        return Err(Error::InvalidArgument("entropy of an empty sample".into()));
    }
    Ok(entropy_from_counts(table.into_values(), method))
}
