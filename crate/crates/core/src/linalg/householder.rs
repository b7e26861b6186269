use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ComplexVector, ONE, ZERO};
use crate::error::{EigenError, Result};

/// Unitary `U = H diag(-theta, 1, ..., 1)` with `U e_1 = v / |v|`, where `H` is a
/// single Householder reflector and `theta` the phase of `v_1`.
///
/// Stored implicitly so that products and similarity transforms cost `O(n^2)`.
#[derive(Clone, Debug)]
pub struct HouseholderFrame {
    u: Vec<Complex64>,
    tau: f64,
    d0: Complex64,
}

impl HouseholderFrame {
    pub fn new(v: &[Complex64]) -> Result<Self> {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(EigenError::Argument("householder frame of a zero or non-finite vector".into()));
        }
        let v0 = v[0] / norm;
        let theta = if v0.norm() > 0.0 { v0 / v0.norm() } else { ONE };
        let mut u: Vec<Complex64> = v.iter().map(|z| -z / norm).collect();
        u[0] -= theta;
        let usq: f64 = u.iter().map(|z| z.norm_sqr()).sum();
        Ok(Self {
            u,
            tau: 2.0 / usq,
            d0: -theta,
        })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    fn reflect(&self, x: &mut [Complex64]) {
        let dot: Complex64 = self.u.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
        let f = dot * self.tau;
        for (xi, ui) in x.iter_mut().zip(&self.u) {
            *xi -= ui * f;
        }
    }

    /// `U x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = x.to_vec();
        y[0] *= self.d0;
        self.reflect(&mut y);
        y
    }

    /// `U^* x`.
    pub fn apply_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = x.to_vec();
        self.reflect(&mut y);
        y[0] *= self.d0.conj();
        y
    }

    /// `U (0, y)`: embeds a vector of the complement coordinates.
    pub fn embed_tail(&self, tail: &[Complex64]) -> Vec<Complex64> {
        let mut y = Vec::with_capacity(tail.len() + 1);
        y.push(ZERO);
        y.extend_from_slice(tail);
        self.reflect(&mut y);
        y
    }

    /// Similarity transform `U^* B U`.
    pub fn conjugate(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        assert_eq!(b.shape(), (n, n));
        let mut c = b.clone();
        let u = &self.u;
        let tau = self.tau;
        // C <- H C: rows combination, w^T = u^* C.
        let mut w = vec![ZERO; n];
        {
            let data = c.as_slice();
            for i in 0..n {
                let ui = u[i].conj();
                if ui == ZERO {
                    continue;
                }
                let row = &data[i * n..(i + 1) * n];
                for (wj, &cij) in w.iter_mut().zip(row) {
                    *wj += ui * cij;
                }
            }
        }
        {
            let data = c.as_mut_slice();
            for i in 0..n {
                let f = u[i] * tau;
                if f == ZERO {
                    continue;
                }
                let row = &mut data[i * n..(i + 1) * n];
                for (cij, &wj) in row.iter_mut().zip(&w) {
                    *cij -= f * wj;
                }
            }
        }
        // C <- C H: z = C u, C -= tau z u^*.
        {
            let data = c.as_mut_slice();
            for i in 0..n {
                let row = &mut data[i * n..(i + 1) * n];
                let z: Complex64 = row.iter().zip(u).map(|(a, b)| a * b).sum::<Complex64>() * tau;
                for (cij, uj) in row.iter_mut().zip(u) {
                    *cij -= z * uj.conj();
                }
            }
        }
        let d = self.d0;
        let dc = d.conj();
        for j in 0..n {
            c[(0, j)] *= dc;
        }
        for i in 0..n {
            c[(i, 0)] *= d;
        }
        c
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            m.set_column(j, &self.apply(&e));
        }
        m
    }
}

/// Dense unitary `U_v` with `U_v e_1 = v / |v|`.
pub fn householder_frame(v: &ComplexVector) -> Result<ComplexMatrix> {
    Ok(HouseholderFrame::new(v)?.to_matrix())
}
