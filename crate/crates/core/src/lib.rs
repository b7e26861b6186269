//! Eigenpair computation by homotopy continuation with certified step control.

pub mod conditioning;
pub mod error;
pub mod geometry;
pub mod homotopy;
pub mod initial;
pub mod linalg;
pub mod newton;
pub mod oracle;
pub mod refine;
pub mod rng;
pub mod solve;

pub use error::{EigenError, Result};
pub use num_complex::Complex64;
