//! Parameter identification of a time-delay transfer-function model from
//! frequency-response data with a real-coded genetic algorithm and three
//! socio-cognitive variants (overlapping castes, separated castes with
//! learning, TOPSIS gravity mutation), plus the experiment harness used to
//! compare them.

pub mod bench;
pub mod engine;
pub mod error;
pub mod model;
pub mod socio;

pub use error::{Error, Result};
