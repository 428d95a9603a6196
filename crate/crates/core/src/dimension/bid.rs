use crate::affine::empirical_dimension_histogram;
use crate::arma::ArmaModel;
use crate::error::Result;
use crate::rng::SeedStream;

/// Genie estimate of `d(X^n)/n`: the mean of `d_V / n` over sampled continuity patterns.
pub fn estimate_bid_oracle(
    model: &ArmaModel,
    n: usize,
    trials: usize,
    streams: &SeedStream,
) -> Result<f64> {
    Ok(empirical_dimension_histogram(model, n, trials, streams)?.mean_normalized())
}
