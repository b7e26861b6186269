use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ComplexVector, ONE, ZERO};

/// Relative cutoff below which a singular value counts as zero.
pub const RANK_CUTOFF: f64 = 1e-13;

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `A = U diag(s) V^*`.
///
/// `singular_values` has length `k = min(m, n)` in non-increasing order, `u` is
/// `m x k` and `v` is `n x k`, both with orthonormal columns.
#[derive(Clone, Debug)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `RANK_CUTOFF * sigma_1`.
    pub fn rank(&self) -> usize {
        let cut = RANK_CUTOFF * self.largest();
        self.singular_values.iter().filter(|&&s| s > cut && s > 0.0).count()
    }

    /// Whether the smallest singular value falls under the rank cutoff.
    pub fn is_rank_deficient(&self) -> bool {
        self.rank() < self.singular_values.len()
    }

    /// Moore-Penrose pseudoinverse with the relative rank cutoff.
    pub fn pseudoinverse(&self) -> ComplexMatrix {
        let m = self.u.rows();
        let n = self.v.rows();
        let r = self.rank();
        let mut out = ComplexMatrix::zeros(n, m);
        for k in 0..r {
            let inv = 1.0 / self.singular_values[k];
            for i in 0..n {
                let vik = self.v[(i, k)] * inv;
                for j in 0..m {
                    out[(i, j)] += vik * self.u[(j, k)].conj();
                }
            }
        }
        out
    }

    /// `A^+ b` restricted to the numerically nonzero singular values.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let r = self.rank();
        let n = self.v.rows();
        let mut x = vec![ZERO; n];
        for k in 0..r {
            let mut coeff = ZERO;
            for (j, &bj) in b.iter().enumerate() {
                coeff += self.u[(j, k)].conj() * bj;
            }
            coeff /= self.singular_values[k];
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += self.v[(i, k)] * coeff;
            }
        }
        x
    }

    /// Frobenius norm of the pseudoinverse.
    pub fn pinv_frobenius_norm(&self) -> f64 {
        let r = self.rank();
        self.singular_values[..r].iter().map(|s| 1.0 / (s * s)).sum::<f64>().sqrt()
    }
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
pub fn svd(a: &ComplexMatrix) -> Svd {
    let (m, n) = a.shape();
    if m >= n {
        let (s, u, v) = jacobi_columns(a.clone());
        Svd {
            singular_values: s,
            u,
            v,
        }
    } else {
        // A^* = V S U^*.
        let (s, v, u) = jacobi_columns(a.adjoint());
        Svd {
            singular_values: s,
            u,
            v,
        }
    }
}

/// Unit vector spanning the kernel of a full-row-rank `(n-1) x n` matrix.
///
/// Zero rows are appended to make the input square; the right singular vector of
/// the smallest singular value of the padded matrix spans the kernel.
pub fn kernel_vector(m: &ComplexMatrix) -> ComplexVector {
    let (rows, cols) = m.shape();
    assert!(rows < cols, "kernel_vector expects a wide matrix");
    let padded = ComplexMatrix::from_fn(cols, cols, |i, j| if i < rows { m[(i, j)] } else { ZERO });
    let (_, _, v) = jacobi_columns(padded);
    v.column(cols - 1)
}

/// Singular values only, non-increasing.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let (m, n) = a.shape();
    let t = if m >= n { a.clone() } else { a.adjoint() };
    let (rows, cols) = t.shape();
    let mut work = column_major(&t);
    let norms = jacobi_sweeps(&mut work, None, rows, cols);
    let mut s: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn column_major(a: &ComplexMatrix) -> Vec<Complex64> {
    let (m, n) = a.shape();
    let mut out = Vec::with_capacity(m * n);
    for j in 0..n {
        for i in 0..m {
            out.push(a[(i, j)]);
        }
    }
    out
}

/// Cyclic one-sided Jacobi on column-major `work` (`m x n`, `m >= n`); rotations
/// are mirrored on `v` (`n x n`, column-major) when given. Returns squared column norms.
fn jacobi_sweeps(work: &mut [Complex64], mut v: Option<&mut [Complex64]>, m: usize, n: usize) -> Vec<f64> {
    let col_norm = |w: &[Complex64], j: usize| w[j * m..(j + 1) * m].iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut norms: Vec<f64> = (0..n).map(|j| col_norm(work, j)).collect();
    let tol = f64::EPSILON;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let (lo, hi) = work.split_at_mut(q * m);
                let cp = &mut lo[p * m..(p + 1) * m];
                let cq = &mut hi[..m];
                let gamma: Complex64 = cp.iter().zip(cq.iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm_sqr().sqrt();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(cp, cq, c, s, phase);
                norms[p] = alpha - t * g;
                norms[q] = beta + t * g;
                if let Some(v) = v.as_deref_mut() {
                    let (lo, hi) = v.split_at_mut(q * n);
                    rotate(&mut lo[p * n..(p + 1) * n], &mut hi[..n], c, s, phase);
                }
            }
        }
        // Refresh norms to stop drift from the incremental updates.
        for (j, nj) in norms.iter_mut().enumerate() {
            *nj = col_norm(work, j);
        }
        if !rotated {
            break;
        }
    }
    norms
}

/// One-sided Jacobi on the columns of a tall (or square) matrix.
/// Returns `(sigma, U, V)` with sigma sorted descending.
fn jacobi_columns(work: ComplexMatrix) -> (Vec<f64>, ComplexMatrix, ComplexMatrix) {
    let (m, n) = work.shape();
    debug_assert!(m >= n);
    let mut cols = column_major(&work);
    let mut vflat = vec![ZERO; n * n];
    for j in 0..n {
        vflat[j * n + j] = ONE;
    }
    let norms = jacobi_sweeps(&mut cols, Some(&mut vflat), m, n);

    let sigma_raw: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma_raw[j].total_cmp(&sigma_raw[i]));

    let sigma: Vec<f64> = order.iter().map(|&k| sigma_raw[k]).collect();
    let mut u = ComplexMatrix::zeros(m, n);
    let mut v = ComplexMatrix::zeros(n, n);
    let mut filled = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = sigma_raw[src];
        v.set_column(dst, &vflat[src * n..(src + 1) * n]);
        if s > 0.0 {
            let col: Vec<Complex64> = cols[src * m..(src + 1) * m].iter().map(|z| z / s).collect();
            u.set_column(dst, &col);
            filled.push(true);
        } else {
            filled.push(false);
        }
    }
    complete_orthonormal(&mut u, &filled);
    (sigma, u, v)
}

#[inline]
fn rotate(xp: &mut [Complex64], xq: &mut [Complex64], c: f64, s: f64, phase: Complex64) {
    let pc = phase.conj();
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let bq = *b * pc;
        let na = *a * c - bq * s;
        let nb = *a * s + bq * c;
        *a = na;
        *b = nb * phase;
    }
}

/// Fills the columns of `u` flagged `false` with an orthonormal completion.
fn complete_orthonormal(u: &mut ComplexMatrix, filled: &[bool]) {
    let (m, k) = u.shape();
    if filled.iter().all(|&f| f) {
        return;
    }
    let mut basis: Vec<Vec<Complex64>> = (0..k).filter(|&j| filled[j]).map(|j| u.column(j).into_vec()).collect();
    let mut candidate = 0;
    for j in 0..k {
        if filled[j] {
            continue;
        }
        loop {
            assert!(candidate < m, "orthonormal completion ran out of candidates");
            let mut e = vec![ZERO; m];
            e[candidate] = ONE;
            candidate += 1;
            for _ in 0..2 {
                for b in &basis {
                    let d: Complex64 = b.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                    for (ei, bi) in e.iter_mut().zip(b) {
                        *ei -= bi * d;
                    }
                }
            }
            let nrm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 1e-8 {
                let col: Vec<Complex64> = e.iter().map(|z| z / nrm).collect();
                u.set_column(j, &col);
                basis.push(col);
                break;
            }
        }
    }
}
