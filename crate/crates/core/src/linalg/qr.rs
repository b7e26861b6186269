use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE, ZERO};

/// Thin QR factorization by Householder reflections.
///
/// For an `m x n` input with `k = min(m, n)`, returns `Q` (`m x k`, orthonormal
/// columns) and `R` (`k x n`, upper triangular) with `A = Q R`. Columns that are
/// already reduced are left untouched, so the identity factors as `(Id, Id)`.
pub fn qr_decompose(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (m, n) = a.shape();
    let k = m.min(n);
    let mut r = a.clone();
    // Reflector vectors, each of full length m with zeros above index j.
    let mut reflectors: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(k);

    for j in 0..k {
        let tail_sqr: f64 = (j + 1..m).map(|i| r[(i, j)].norm_sqr()).sum();
        if tail_sqr == 0.0 {
            reflectors.push(None);
            continue;
        }
        let x0 = r[(j, j)];
        let norm = (x0.norm_sqr() + tail_sqr).sqrt();
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * norm;
        let mut v = vec![ZERO; m];
        v[j] = x0 - alpha;
        for i in j + 1..m {
            v[i] = r[(i, j)];
        }
        let vnorm_sqr: f64 = v[j..].iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm_sqr;
        apply_reflector_left(&mut r, &v, tau, j, j);
        r[(j, j)] = alpha;
        for i in j + 1..m {
            r[(i, j)] = ZERO;
        }
        reflectors.push(Some(v));
    }

    let mut q = ComplexMatrix::zeros(m, k);
    for i in 0..k {
        q[(i, i)] = ONE;
    }
    for j in (0..k).rev() {
        if let Some(v) = &reflectors[j] {
            let vnorm_sqr: f64 = v[j..].iter().map(|z| z.norm_sqr()).sum();
            apply_reflector_left(&mut q, v, 2.0 / vnorm_sqr, j, 0);
        }
    }
    let r = r.submatrix(0, 0, k, n);
    (q, r)
}

/// `M <- (I - tau v v^*) M` on rows `row0..` and columns `col0..`.
fn apply_reflector_left(mat: &mut ComplexMatrix, v: &[Complex64], tau: f64, row0: usize, col0: usize) {
    let (m, n) = mat.shape();
    for c in col0..n {
        let mut dot = ZERO;
        for i in row0..m {
            dot += v[i].conj() * mat[(i, c)];
        }
        if dot == ZERO {
            continue;
        }
        let f = dot * tau;
        for i in row0..m {
            let vi = v[i];
            mat[(i, c)] -= vi * f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::sample_gaussian_matrix;
    use crate::rng::RngStream;

    fn orthonormality_defect(q: &ComplexMatrix) -> f64 {
        (&(&q.adjoint() * q) - &ComplexMatrix::identity(q.cols())).frobenius_norm()
    }

    #[test]
    fn identity_is_fixed() {
        let id = ComplexMatrix::identity(3);
        let (q, r) = qr_decompose(&id);
        assert_eq!(q, id);
        assert_eq!(r, id);
    }

    #[test]
    fn diagonal_case() {
        let d = ComplexMatrix::real_diagonal(&[2.0, 3.0]);
        let (q, r) = qr_decompose(&d);
        assert!((&q * &r).max_abs_diff(&d) < 1e-15);
        for i in 0..2 {
            assert!((q[(i, i)].norm() - 1.0).abs() < 1e-15);
        }
        assert!((r[(0, 0)].norm() - 2.0).abs() < 1e-15);
        assert!((r[(1, 1)].norm() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_reconstruction() {
        let mut rng = RngStream::new(11, 0);
        for _ in 0..20 {
            let a = sample_gaussian_matrix(&mut rng, 4, 4, None, 1.0);
            let (q, r) = qr_decompose(&a);
            assert!((&q * &r).max_abs_diff(&a) <= 1e-12 * a.frobenius_norm());
            assert!((&(&q * &r) - &a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
            assert!(orthonormality_defect(&q) <= 1e-12 * 4.0);
            for i in 0..4 {
                for j in 0..i {
                    assert_eq!(r[(i, j)], ZERO);
                }
            }
        }
    }

    #[test]
    fn rectangular_shapes() {
        let mut rng = RngStream::new(12, 0);
        let tall = sample_gaussian_matrix(&mut rng, 6, 3, None, 1.0);
        let (q, r) = qr_decompose(&tall);
        assert_eq!(q.shape(), (6, 3));
        assert_eq!(r.shape(), (3, 3));
        assert!((&q * &r).max_abs_diff(&tall) < 1e-12 * tall.frobenius_norm());
        assert!(orthonormality_defect(&q) < 1e-12 * 3.0);

        let wide = sample_gaussian_matrix(&mut rng, 3, 5, None, 1.0);
        let (q, r) = qr_decompose(&wide);
        assert_eq!(q.shape(), (3, 3));
        assert_eq!(r.shape(), (3, 5));
        assert!((&q * &r).max_abs_diff(&wide) < 1e-12 * wide.frobenius_norm());
    }

    #[test]
    fn rank_deficient_input_is_tolerated() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let (q, r) = qr_decompose(&a);
        assert!((&q * &r).max_abs_diff(&a) < 1e-14);
        assert!(r[(1, 1)].norm() < 1e-14);
    }
}
