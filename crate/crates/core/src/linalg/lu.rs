use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE, ZERO};

/// LU factorization with partial (row) pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct LuDecomposition {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
    sign_flips: usize,
    min_pivot: f64,
    max_pivot: f64,
}

impl LuDecomposition {
    pub fn new(a: &ComplexMatrix) -> Self {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign_flips = 0;
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot: f64 = 0.0;
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm_sqr()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            let pmag = pmag.sqrt();
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign_flips += 1;
            }
            min_pivot = min_pivot.min(pmag);
            max_pivot = max_pivot.max(pmag);
            let pivot = lu[k * n + k];
            if pivot == ZERO {
                continue;
            }
            let inv = ONE / pivot;
            for i in k + 1..n {
                let f = lu[i * n + k] * inv;
                lu[i * n + k] = f;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= f * u;
                }
            }
        }
        if n == 0 {
            min_pivot = 0.0;
        }
        Self {
            n,
            lu,
            perm,
            sign_flips,
            min_pivot,
            max_pivot,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Ratio of smallest to largest pivot magnitude; zero for an exactly singular factor.
    pub fn pivot_ratio(&self) -> f64 {
        if self.max_pivot == 0.0 {
            0.0
        } else {
            self.min_pivot / self.max_pivot
        }
    }

    pub fn is_singular(&self) -> bool {
        self.min_pivot == 0.0
    }

    pub fn determinant(&self) -> Complex64 {
        let mut d = if self.sign_flips % 2 == 0 { ONE } else { -ONE };
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
        }
        d
    }

    /// Solves `A x = b`. Returns `None` if a zero pivot is met.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            let d = self.lu[i * n + i];
            if d == ZERO {
                return None;
            }
            x[i] = acc / d;
        }
        x.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(x)
    }

    /// Solves `A^* x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        // A^* = U^* L^* P, so solve U^* y = b, L^* z = y, x = P^T z.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.lu[j * n + i].conj() * y[j];
            }
            let d = self.lu[i * n + i];
            if d == ZERO {
                return None;
            }
            y[i] = acc / d.conj();
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[j * n + i].conj() * y[j];
            }
            y[i] = acc;
        }
        let mut x = vec![ZERO; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(x)
    }
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let lu = LuDecomposition::new(a);
    if lu.is_singular() {
        return None;
    }
    let n = a.rows();
    let mut inv = ComplexMatrix::zeros(n, n);
    let mut e = vec![ZERO; n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = ZERO);
        e[j] = ONE;
        let col = lu.solve(&e)?;
        inv.set_column(j, &col);
    }
    Some(inv)
}
