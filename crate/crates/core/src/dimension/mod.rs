//! Information-dimension estimators and the closed-form bounds they are checked against.

mod bid;
mod bounds;
mod entropy;
mod rid;
mod shifted;

pub use bid::estimate_bid_oracle;
pub use bounds::{
    bernoulli_kl, bid_bounds, concentration_bounds, continuity_chance_bound,
    min_n_for_concentration, ConcentrationBounds, Regime, TailVariant,
};
pub use entropy::{empirical_entropy, entropy_from_counts, quantize, quantize_cell, EntropyMethod};
pub use rid::{
    entropy_curve, estimate_idr, estimate_rid, fit_slope, EntropyCurve, EntropyPoint, IdrPoint,
    RidEstimate, MAX_JOINT_CELLS, MAX_JOINT_DIMENSION, SAMPLES_PER_CELL,
};
pub use shifted::{shifted_entropy_check, ShiftedEntropyReport, ShiftedEntropyRow};
