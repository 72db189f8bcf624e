pub mod berkline;
pub mod cli;
pub mod diffmod;
pub mod error;
pub mod expr;
pub mod funcalc;
pub mod kompakt;
pub mod linalg;
pub mod poly;
pub mod problem;
pub mod ratfun;
pub mod scalars;
pub mod spectra;
pub mod variation;

pub use error::{Error, Result};
