//! Simulation and compressibility experiments for ARMA processes whose
//! excitation noise mixes a finite atom set with an absolutely continuous law.

pub mod affine;
pub mod arma;
pub mod cli;
pub mod compressor;
pub mod dimension;
pub mod error;
pub mod hankel;
pub mod linalg;
pub mod reports;
pub mod rng;

pub use error::{Error, Result};
