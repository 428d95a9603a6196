//! ARMA models with discrete-continuous excitation.

pub mod distribution;
pub mod model;
pub mod path;
pub mod spec_file;
pub mod toeplitz;

pub use distribution::{compose_sum_distribution, sample_excitation, Atom, ContinuousLaw, DceDistribution};
pub use model::{ArmaModel, StationarityReport, STABILITY_MARGIN};
pub use path::{simulate_path, SamplePath};
pub use spec_file::{format_model_spec, parse_model_spec};
pub use toeplitz::{build_toeplitz, ToeplitzSet};
