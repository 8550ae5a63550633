//! Matrix moment spaces on `[0,1]` and on the unit circle: canonical moments,
//! random matrix ensembles, Schur functions and large deviation rates.

pub mod circle;
pub mod ensembles;
pub mod error;
pub mod hermitian;
pub mod interval;
pub mod json;
pub mod measure;
pub mod rng;
pub mod schur;
pub mod special;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
