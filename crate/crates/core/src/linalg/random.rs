use super::matrix::ComplexMatrix;
use super::qr::qr_decompose;
use crate::rng::RngStream;

/// Matrix with i.i.d. entries `N_C(center_ij, sigma^2)`.
pub fn sample_gaussian_matrix(
    rng: &mut RngStream,
    rows: usize,
    cols: usize,
    center: Option<&ComplexMatrix>,
    sigma: f64,
) -> ComplexMatrix {
    assert!(sigma > 0.0, "sigma must be positive");
    if let Some(c) = center {
        assert_eq!(c.shape(), (rows, cols), "center shape");
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        let z = rng.complex_normal(sigma);
        match center {
            Some(c) => c[(i, j)] + z,
            None => z,
        }
    })
}

/// Truncation radius `sqrt(2) n` for the truncated Gaussian.
pub fn truncation_radius(n: usize) -> f64 {
    std::f64::consts::SQRT_2 * n as f64
}

/// Gaussian `N(center, sigma^2)` on `n x n` matrices conditioned on `|A|_F <= sqrt(2) n`.
/// Returns the sample and the number of proposals drawn.
pub fn sample_truncated_gaussian_counted(
    rng: &mut RngStream,
    n: usize,
    center: Option<&ComplexMatrix>,
    sigma: f64,
) -> (ComplexMatrix, u64) {
    let t = truncation_radius(n);
    let mut proposals = 0;
    loop {
        proposals += 1;
        let a = sample_gaussian_matrix(rng, n, n, center, sigma);
        if a.frobenius_norm() <= t {
            return (a, proposals);
        }
    }
}

pub fn sample_truncated_gaussian(
    rng: &mut RngStream,
    n: usize,
    center: Option<&ComplexMatrix>,
    sigma: f64,
) -> ComplexMatrix {
    sample_truncated_gaussian_counted(rng, n, center, sigma).0
}

/// Haar-distributed unitary: Gaussian QR with the columns of `Q` multiplied by `r_ii / |r_ii|`.
pub fn sample_haar_unitary(rng: &mut RngStream, n: usize) -> ComplexMatrix {
    assert!(n >= 1);
    let g = sample_gaussian_matrix(rng, n, n, None, 1.0);
    let (mut q, r) = qr_decompose(&g);
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { super::matrix::ONE };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}
