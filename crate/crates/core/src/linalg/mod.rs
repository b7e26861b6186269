//! Dense complex linear algebra and random matrix sampling.

pub mod householder;
pub mod lu;
pub mod matrix;
pub mod qr;
pub mod random;
pub mod svd;

pub use householder::{householder_frame, HouseholderFrame};
pub use lu::LuDecomposition;
pub use matrix::{frobenius_inner, ComplexMatrix, ComplexVector, ONE, ZERO};
pub use qr::qr_decompose;
pub use random::{sample_gaussian_matrix, sample_haar_unitary, sample_truncated_gaussian};
pub use svd::{svd, Svd};
