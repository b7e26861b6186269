#![allow(dead_code)]

pub mod checks;

use eigenpath::conditioning::EigenTriple;
use eigenpath::linalg::{sample_gaussian_matrix, ComplexMatrix, ComplexVector};
use eigenpath::oracle::reference_eigenpairs;
use eigenpath::rng::RngStream;
use eigenpath::Complex64;

/// Gaussian matrix scaled to unit Frobenius norm.
pub fn unit_gaussian(rng: &mut RngStream, n: usize) -> ComplexMatrix {
    let a = sample_gaussian_matrix(rng, n, n, None, 1.0);
    a.scale_real(1.0 / a.frobenius_norm())
}

/// A random eigentriple of a unit-norm Gaussian matrix, picked among the oracle pairs.
pub fn random_v_triple(rng: &mut RngStream, n: usize) -> EigenTriple {
    let a = unit_gaussian(rng, n);
    let spec = reference_eigenpairs(&a).unwrap();
    let k = (rng.uniform() * n as f64) as usize % n;
    spec.triples[k].clone()
}

pub fn random_unit_vector(rng: &mut RngStream, n: usize) -> ComplexVector {
    let g = sample_gaussian_matrix(rng, n, 1, None, 1.0).column(0);
    g.normalized().unwrap()
}

/// Unit vector orthogonal to the unit vector `v`.
pub fn random_orthogonal(rng: &mut RngStream, v: &ComplexVector) -> ComplexVector {
    let g = random_unit_vector(rng, v.dim());
    let c = g.inner(v);
    let h: Vec<Complex64> = g.iter().zip(v.iter()).map(|(gi, vi)| gi - c * vi).collect();
    ComplexVector::from(h).normalized().unwrap()
}

/// A pair at exactly `dist_A = delta` from `(lambda, v)` for a matrix of norm `norm_a`.
pub fn pair_at_distance(
    rng: &mut RngStream,
    norm_a: f64,
    lambda: Complex64,
    v: &ComplexVector,
    delta: f64,
) -> (Complex64, ComplexVector) {
    let theta = rng.uniform() * std::f64::consts::FRAC_PI_2;
    let phi = rng.uniform() * 2.0 * std::f64::consts::PI;
    let zeta = lambda + Complex64::from_polar(delta * theta.cos() * norm_a, phi);
    let t = delta * theta.sin();
    let u = random_orthogonal(rng, v);
    let w: Vec<Complex64> = v.iter().zip(u.iter()).map(|(a, b)| a * t.cos() + b * t.sin()).collect();
    (zeta, ComplexVector::from(w))
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}
