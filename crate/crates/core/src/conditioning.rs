//! The reduced operator `A_{l,v}`, the eigenpair condition number `mu` and its
//! variants, and left eigenvectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{EigenError, Result};
use crate::linalg::svd::{svd, RANK_CUTOFF};
use crate::linalg::{ComplexMatrix, ComplexVector, HouseholderFrame, LuDecomposition};
use crate::oracle;

/// A triple `(A, lambda, v)` with `v` of unit norm and its residual `|(A - lambda) v|`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenTriple {
    pub matrix: ComplexMatrix,
    pub eigenvalue: Complex64,
    pub eigenvector: ComplexVector,
    pub residual: f64,
}

impl EigenTriple {
    pub fn new(matrix: ComplexMatrix, eigenvalue: Complex64, eigenvector: &ComplexVector) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != eigenvector.dim() {
            return Err(EigenError::shape("eigen triple", matrix.shape(), (eigenvector.dim(), 1)));
        }
        let v = eigenvector
            .normalized()
            .ok_or_else(|| EigenError::Argument("eigenvector must be nonzero".into()))?;
        let residual = residual(&matrix, eigenvalue, &v);
        Ok(Self {
            matrix,
            eigenvalue,
            eigenvector: v,
            residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn mu(&self) -> Result<f64> {
        mu(&self.matrix, self.eigenvalue, &self.eigenvector)
    }
}

/// `|A v - lambda v| / |v|`.
pub fn residual(a: &ComplexMatrix, lambda: Complex64, v: &ComplexVector) -> f64 {
    let av = a.matvec(v);
    let r: f64 = av.iter().zip(v.iter()).map(|(x, y)| (x - lambda * y).norm_sqr()).sum();
    r.sqrt() / v.norm()
}

/// `A - lambda Id` expressed in a Householder frame `U_v` of `v`.
///
/// With `U_v^* A U_v = [[l1, a^*], [b, A_hat]]`, the block is `A_hat - lambda Id`,
/// the matrix of `P_{v perp} (A - lambda Id)` restricted to `v perp`.
#[derive(Clone, Debug)]
pub struct ReducedOperator {
    frame: HouseholderFrame,
    conjugated: ComplexMatrix,
    lambda: Complex64,
    block: ComplexMatrix,
}

impl ReducedOperator {
    pub fn frame(&self) -> &HouseholderFrame {
        &self.frame
    }

    /// `U_v^* A U_v`.
    pub fn conjugated(&self) -> &ComplexMatrix {
        &self.conjugated
    }

    pub fn block(&self) -> &ComplexMatrix {
        &self.block
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// `<A v, v>` for the unit representative.
    pub fn rayleigh(&self) -> Complex64 {
        self.conjugated[(0, 0)]
    }

    /// Coordinates of `a` (the first row of the conjugated matrix without its diagonal entry, conjugated).
    pub fn row_tail(&self) -> Vec<Complex64> {
        self.conjugated.row(0)[1..].to_vec()
    }

    /// Coordinates of `b = P_{v perp} A v` in the frame.
    pub fn column_tail(&self) -> Vec<Complex64> {
        (1..self.conjugated.rows()).map(|i| self.conjugated[(i, 0)]).collect()
    }

    /// Singular values of the block, non-increasing.
    pub fn singular_values(&self) -> Vec<f64> {
        svd(&self.block).singular_values
    }

    /// The block embedded back into `C^n` as an operator on `v perp`.
    pub fn to_ambient(&self) -> ComplexMatrix {
        let n = self.conjugated.rows();
        let mut m = ComplexMatrix::zeros(n, n);
        for j in 1..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n - 1];
            for i in 1..n {
                e[i - 1] = self.block[(i - 1, j - 1)];
            }
            m.set_column(j, &self.frame.embed_tail(&e));
        }
        let u = self.frame.to_matrix();
        &m * &u.adjoint()
    }
}

/// `A_{lambda,v}` in the Householder frame of `v`.
pub fn reduced_operator(a: &ComplexMatrix, lambda: Complex64, v: &ComplexVector) -> Result<ReducedOperator> {
    if !a.is_square() || a.rows() != v.dim() {
        return Err(EigenError::shape("reduced_operator", a.shape(), (v.dim(), 1)));
    }
    if a.rows() < 2 {
        return Err(EigenError::Argument("reduced operator needs n >= 2".into()));
    }
    let frame = HouseholderFrame::new(v)?;
    let conjugated = frame.conjugate(a);
    let n = a.rows();
    let block = conjugated.submatrix(1, 1, n - 1, n - 1).shift(lambda);
    Ok(ReducedOperator {
        frame,
        conjugated,
        lambda,
        block,
    })
}

fn nonzero_norm(a: &ComplexMatrix) -> Result<f64> {
    let na = a.frobenius_norm();
    if na == 0.0 {
        return Err(EigenError::Argument("condition number of the zero matrix".into()));
    }
    Ok(na)
}

/// Operator norm of the inverse given singular values, infinite below the rank cutoff.
pub(crate) fn inverse_norm(sv: &[f64]) -> f64 {
    let s1 = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    if smin <= RANK_CUTOFF * s1 || smin == 0.0 {
        f64::INFINITY
    } else {
        1.0 / smin
    }
}

fn inverse_frobenius_norm(sv: &[f64]) -> f64 {
    if inverse_norm(sv).is_infinite() {
        return f64::INFINITY;
    }
    sv.iter().map(|s| 1.0 / (s * s)).sum::<f64>().sqrt()
}

/// `mu(A, lambda, v) = |A|_F |A_{lambda,v}^{-1}|`, infinite on singular blocks.
pub fn mu(a: &ComplexMatrix, lambda: Complex64, v: &ComplexVector) -> Result<f64> {
    let na = nonzero_norm(a)?;
    let red = reduced_operator(a, lambda, v)?;
    Ok(na * inverse_norm(&red.singular_values()))
}

/// `mu_F(A, lambda, v) = |A|_F |A_{lambda,v}^{-1}|_F`.
pub fn mu_frobenius(a: &ComplexMatrix, lambda: Complex64, v: &ComplexVector) -> Result<f64> {
    let na = nonzero_norm(a)?;
    let red = reduced_operator(a, lambda, v)?;
    Ok(na * inverse_frobenius_norm(&red.singular_values()))
}

/// Condition numbers of all eigenpairs, in oracle order. Empty when the
/// oracle flags a near-collision of eigenvalues.
fn all_mus(a: &ComplexMatrix, f: fn(&ComplexMatrix, Complex64, &ComplexVector) -> Result<f64>) -> Result<Option<Vec<f64>>> {
    nonzero_norm(a)?;
    let spectrum = oracle::reference_eigenpairs(a)?;
    if spectrum.sigma_near {
        return Ok(None);
    }
    spectrum
        .triples
        .iter()
        .map(|t| f(a, t.eigenvalue, &t.eigenvector))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// `max_j mu(A, lambda_j, v_j)`; infinite for matrices with a repeated eigenvalue.
pub fn mu_max(a: &ComplexMatrix) -> Result<f64> {
    Ok(match all_mus(a, mu)? {
        Some(m) => m.into_iter().fold(0.0, f64::max),
        None => f64::INFINITY,
    })
}

/// Root mean square of `mu` over the eigenpairs.
pub fn mu_av(a: &ComplexMatrix) -> Result<f64> {
    Ok(match all_mus(a, mu)? {
        Some(m) => rms(&m),
        None => f64::INFINITY,
    })
}

/// Root mean square of `mu_F` over the eigenpairs.
pub fn mu_f_av(a: &ComplexMatrix) -> Result<f64> {
    Ok(match all_mus(a, mu_frobenius)? {
        Some(m) => rms(&m),
        None => f64::INFINITY,
    })
}

fn rms(xs: &[f64]) -> f64 {
    (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Left eigenvector `u = v - A_{lambda,v}^{-*} P_{v perp} A^* v`, normalized so `<u, v> = 1`.
pub fn left_eigenvector(a: &ComplexMatrix, lambda: Complex64, v: &ComplexVector) -> Result<ComplexVector> {
    let red = reduced_operator(a, lambda, v)?;
    let lu = LuDecomposition::new(red.block());
    let sv = red.singular_values();
    if inverse_norm(&sv).is_infinite() || lu.is_singular() {
        return Err(EigenError::IllPosed("left eigenvector needs an invertible reduced operator".into()));
    }
    // P_{v perp} A^* v has frame coordinates (0, a).
    let a_tail: Vec<Complex64> = red.row_tail().iter().map(|z| z.conj()).collect();
    let z = lu
        .solve_adjoint(&a_tail)
        .ok_or_else(|| EigenError::IllPosed("singular reduced operator".into()))?;
    let mut coords = Vec::with_capacity(z.len() + 1);
    coords.push(Complex64::new(1.0, 0.0));
    coords.extend(z.iter().map(|x| -x));
    let u = red.frame().apply(&coords);
    // The frame maps e_1 to v / |v|; rescale so that <u, v> = 1 for the given v.
    let vn = v.norm();
    Ok(ComplexVector::from(u).scale(Complex64::new(1.0 / vn, 0.0)))
}

/// `mu_lambda = |u| |v| / |<u, v>|`.
pub fn mu_lambda(a: &ComplexMatrix, lambda: Complex64, v: &ComplexVector) -> Result<f64> {
    let u = left_eigenvector(a, lambda, v)?;
    Ok(u.norm() * v.norm() / v.inner(&u).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{sample_gaussian_matrix, sample_haar_unitary};
    use crate::rng::RngStream;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn e(n: usize, i: usize) -> ComplexVector {
        ComplexVector::basis(n, i)
    }

    #[test]
    fn block_examples() {
        let a = ComplexMatrix::real_diagonal(&[1.0, 2.0]);
        let red = reduced_operator(&a, c(1.0), &e(2, 0)).unwrap();
        assert!((red.block()[(0, 0)] - c(1.0)).norm() < 1e-15);

        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let red = reduced_operator(&j, c(0.0), &e(2, 0)).unwrap();
        assert_eq!(red.block()[(0, 0)], c(0.0));

        let mut rng = RngStream::new(1, 0);
        let u = sample_haar_unitary(&mut rng, 3);
        let d = ComplexMatrix::real_diagonal(&[1.0, 2.0, 3.0]);
        let a = &(&u * &d) * &u.adjoint();
        let red = reduced_operator(&a, c(1.0), &u.column(0)).unwrap();
        let sv = red.singular_values();
        assert!((sv[0] - 2.0).abs() < 1e-12 && (sv[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_matches_projected_operator() {
        let mut rng = RngStream::new(2, 0);
        let a = sample_gaussian_matrix(&mut rng, 4, 4, None, 1.0);
        let v = sample_gaussian_matrix(&mut rng, 4, 1, None, 1.0).column(0).normalized().unwrap();
        let lambda = Complex64::new(0.3, -0.2);
        let red = reduced_operator(&a, lambda, &v).unwrap();
        let p = &ComplexMatrix::identity(4) - &outer(&v, &v);
        let projected = &(&p * &a.shift(lambda)) * &p;
        assert!(red.to_ambient().max_abs_diff(&projected) < 1e-12);
    }

    fn outer(x: &ComplexVector, y: &ComplexVector) -> ComplexMatrix {
        ComplexMatrix::from_fn(x.dim(), y.dim(), |i, j| x[i] * y[j].conj())
    }

    #[test]
    fn mu_examples() {
        let h = ComplexMatrix::real_diagonal(&[1.0, 0.0, 0.0]);
        assert!((mu(&h, c(1.0), &e(3, 0)).unwrap() - 1.0).abs() < 1e-15);
        let a = ComplexMatrix::real_diagonal(&[1.0, 2.0]);
        assert!((mu(&a, c(1.0), &e(2, 0)).unwrap() - 5f64.sqrt()).abs() < 1e-14);
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(mu(&j, c(0.0), &e(2, 0)).unwrap().is_infinite());
        assert!(mu(&ComplexMatrix::zeros(2, 2), c(0.0), &e(2, 0)).is_err());
    }

    #[test]
    fn mu_frobenius_examples() {
        let a = ComplexMatrix::real_diagonal(&[1.0, 2.0]);
        assert!((mu_frobenius(&a, c(1.0), &e(2, 0)).unwrap() - 5f64.sqrt()).abs() < 1e-14);
        let b = ComplexMatrix::real_diagonal(&[0.0, 1.0, 2.0]);
        assert!((mu_frobenius(&b, c(0.0), &e(3, 0)).unwrap() - 2.5).abs() < 1e-14);
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(mu_frobenius(&j, c(0.0), &e(2, 0)).unwrap().is_infinite());
    }

    #[test]
    fn mu_max_examples() {
        let a = ComplexMatrix::real_diagonal(&[1.0, 2.0]);
        assert!((mu_max(&a).unwrap() - 5f64.sqrt()).abs() < 1e-10);
        assert!((mu_av(&a).unwrap() - 5f64.sqrt()).abs() < 1e-10);
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(mu_max(&j).unwrap().is_infinite());
    }

    #[test]
    fn left_eigenvector_examples() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]);
        let u = left_eigenvector(&a, c(1.0), &e(2, 0)).unwrap();
        assert!(u.distance(&ComplexVector::from_real(&[1.0, -1.0])) < 1e-14);
        assert!((mu_lambda(&a, c(1.0), &e(2, 0)).unwrap() - 2f64.sqrt()).abs() < 1e-14);

        let d = ComplexMatrix::real_diagonal(&[1.0, 2.0, 4.0]);
        let u = left_eigenvector(&d, c(2.0), &e(3, 1)).unwrap();
        assert!(u.distance(&e(3, 1)) < 1e-15);
        assert!((mu_lambda(&d, c(2.0), &e(3, 1)).unwrap() - 1.0).abs() < 1e-15);

        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(left_eigenvector(&j, c(0.0), &e(2, 0)), Err(EigenError::IllPosed(_))));
    }

    #[test]
    fn left_eigenvector_random() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..20 {
            let a = sample_gaussian_matrix(&mut rng, 5, 5, None, 1.0);
            let spec = oracle::reference_eigenpairs(&a).unwrap();
            let t = &spec.triples[0];
            let u = left_eigenvector(&a, t.eigenvalue, &t.eigenvector).unwrap();
            assert!((t.eigenvector.inner(&u) - c(1.0)).norm() < 1e-10);
            let r = a.shift(t.eigenvalue).adjoint_matvec(&u);
            assert!(r.norm() < 1e-9 * a.frobenius_norm() * u.norm());
            let m = mu(&a, t.eigenvalue, &t.eigenvector).unwrap();
            assert!(mu_lambda(&a, t.eigenvalue, &t.eigenvector).unwrap() <= (1.0 + m * m).sqrt() * (1.0 + 1e-10));
        }
    }
}
