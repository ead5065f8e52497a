//! Entanglement criteria built from SIC and GSIC measurement correlations.

pub mod correlations;
pub mod criteria;
pub mod error;
pub mod linalg;
pub mod partition;
pub mod povm;
pub mod scenarios;
pub mod states;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
