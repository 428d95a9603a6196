//! Empirical check of the shifted-entropy bound `H([X + eps]_1) <= 4 H([X]_1) + C`
//! with `C = log2(c + 1) - 8/3` and `c` the smallest integer with `Pr(|X| > c) < 1/4`.

use rand::Rng;

use super::entropy::{empirical_entropy, quantize_cell, EntropyMethod};
use crate::arma::DceDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedEntropyRow {
    pub eps: f64,
    /// `H([X + eps]_1)` in bits.
    pub lhs_bits: f64,
    /// `4 H([X]_1) + C`.
    pub bound_bits: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedEntropyReport {
    /// `H([X]_1)` estimate in bits.
    pub base_entropy_bits: f64,
    pub c: u64,
    pub constant_bits: f64,
    pub slack_bits: f64,
    pub rows: Vec<ShiftedEntropyRow>,
}

impl ShiftedEntropyReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Estimates both sides of the bound on one sample of `dist` for every shift in
/// `eps_grid` (each strictly inside `(-1, 1)`); a row holds when
/// `lhs <= bound + slack_bits`.
pub fn shifted_entropy_check<R: Rng + ?Sized>(
    dist: &DceDistribution,
    eps_grid: &[f64],
    samples: usize,
    slack_bits: f64,
    rng: &mut R,
) -> Result<ShiftedEntropyReport> {
    if let Some(e) = eps_grid.iter().find(|e| !(e.abs() < 1.0)) {
        return Err(Error::InvalidArgument(format!("shift {e} outside (-1, 1)")));
    }
    if samples == 0 {
        return Err(Error::SampleStarvation { samples, required: 1 });
    }
    let xs: Vec<f64> = (0..samples).map(|_| dist.sample(rng).0).collect();
    let method = EntropyMethod::PlugIn;
    let base = empirical_entropy(xs.iter().map(|&x| quantize_cell(x, 1)), method)?;

    let mut abs: Vec<f64> = xs.iter().map(|x| x.abs()).collect();
    abs.sort_by(f64::total_cmp);
    // smallest integer c with #{|x| > c} < n / 4
    let mut c = 0u64;
    loop {
        let above = abs.len() - abs.partition_point(|&a| a <= c as f64);
        if (above as f64) < samples as f64 / 4.0 {
            break;
        }
        c += 1;
    }
    let constant = ((c + 1) as f64).log2() - 8.0 / 3.0;
    let bound = 4.0 * base + constant;

    let rows = eps_grid
        .iter()
        .map(|&eps| {
            let lhs = empirical_entropy(xs.iter().map(|&x| quantize_cell(x + eps, 1)), method)
                .expect("non-empty sample");
            ShiftedEntropyRow {
                eps,
                lhs_bits: lhs,
                bound_bits: bound,
                holds: lhs <= bound + slack_bits,
            }
        })
        .collect();
    Ok(ShiftedEntropyReport {
        base_entropy_bits: base,
        c,
        constant_bits: constant,
        slack_bits,
        rows,
    })
}
