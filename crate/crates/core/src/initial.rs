//! Initial triples for path following: the rank-one start, the hexagonal
//! lattice diagonal, and the randomized start built from `Omega_n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditioning::EigenTriple;
use crate::error::{EigenError, Result};
use crate::linalg::random::{sample_gaussian_matrix, sample_haar_unitary};
use crate::linalg::{qr_decompose, ComplexMatrix, ComplexVector, ONE, ZERO};
use crate::rng::RngStream;

pub const MAX_PROPOSALS: u64 = 1_000_000;

fn require_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(EigenError::Argument(format!("initial triples need n >= 2, got {n}")));
    }
    Ok(())
}

/// `(H, 1, e_1)` with `H = diag(1, 0, ..., 0)`.
pub fn single_start(n: usize) -> Result<EigenTriple> {
    require_dim(n)?;
    let mut d = vec![0.0; n];
    d[0] = 1.0;
    EigenTriple::new(ComplexMatrix::real_diagonal(&d), ONE, &ComplexVector::basis(n, 0))
}

/// The `n` points of the unit hexagonal lattice closest to the origin.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HexLattice {
    pub n: usize,
    pub etas: Vec<Complex64>,
}

/// Lattice points `(a + b/2) + i b sqrt3/2` ordered by modulus, then by argument in `[0, 2 pi)`.
pub fn hex_lattice(n: usize) -> HexLattice {
    let radius = (2.0 * (n as f64).sqrt()).ceil() as i64 + 2;
    let mut pts: Vec<(i64, f64, Complex64)> = Vec::new();
    for a in -radius..=radius {
        for b in -radius..=radius {
            let z = Complex64::new(a as f64 + 0.5 * b as f64, b as f64 * 3f64.sqrt() / 2.0);
            let mut arg = z.im.atan2(z.re);
            if arg < 0.0 {
                arg += 2.0 * PI;
            }
            // |eta|^2 = a^2 + ab + b^2 exactly.
            pts.push((a * a + a * b + b * b, arg, z));
        }
    }
    pts.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
    // Every lattice point of norm at most radius * sqrt3 / 2 lies in the enumerated square.
    let covered = 3.0 * (radius * radius) as f64 / 4.0;
    assert!(
        pts.len() >= n && (pts[n - 1].0 as f64) <= covered,
        "lattice enumeration too small for n = {n}"
    );
    HexLattice {
        n,
        etas: pts.into_iter().take(n).map(|p| p.2).collect(),
    }
}

/// `D = diag(eta_1, ..., eta_n)` and its eigentriples `(D, eta_j, e_j)`.
pub fn hex_diagonal(n: usize) -> Result<(ComplexMatrix, Vec<EigenTriple>)> {
    require_dim(n)?;
    let lat = hex_lattice(n);
    let d = ComplexMatrix::from_diagonal(&lat.etas);
    let triples = lat
        .etas
        .iter()
        .enumerate()
        .map(|(j, &eta)| EigenTriple::new(d.clone(), eta, &ComplexVector::basis(n, j)))
        .collect::<Result<Vec<_>>>()?;
    Ok((d, triples))
}

/// A point `(lambda, w, M, Q)` of `Omega_n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OmegaSample {
    pub lambda: Complex64,
    pub w: ComplexVector,
    pub m: ComplexMatrix,
    pub q: ComplexMatrix,
}

impl OmegaSample {
    /// `2 Re(conj(lambda) tr(MQ)) <= 1 - |lambda|^2 (n - 1)`.
    pub fn accepts(lambda: Complex64, mq: &ComplexMatrix) -> bool {
        let k = mq.rows() as f64;
        2.0 * (lambda.conj() * mq.trace()).re <= 1.0 - lambda.norm_sqr() * k
    }

    pub fn mq(&self) -> ComplexMatrix {
        &self.m * &self.q
    }
}

/// `H[:, 0..n-1] U` where `H` is unitary with last column in `ker M`.
///
/// `H` is the Q factor of the square matrix `[M^* | 0]`: its first `n-1` columns
/// span the row space of `M`, so the last one spans the kernel.
fn complement_basis(m: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    let n = m.cols();
    let mut x = ComplexMatrix::zeros(n, n);
    let mh = m.adjoint();
    for j in 0..n - 1 {
        x.set_column(j, &mh.column(j));
    }
    let (h, _) = qr_decompose(&x);
    &h.submatrix(0, 0, n, n - 1) * u
}

/// Gaussian `M` (`(n-1) x n`) and `Q` (`n x (n-1)`) uniform among isometries whose
/// columns span the orthogonal complement of `ker M`.
pub fn sample_stiefel_pair(rng: &mut RngStream, n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let u = sample_haar_unitary(rng, n - 1);
    let m = sample_gaussian_matrix(rng, n - 1, n, None, 1.0);
    let q = complement_basis(&m, &u);
    (m, q)
}

/// Rejection sampler for `Omega_n`. Returns the sample and the number of proposals.
pub fn sample_omega(rng: &mut RngStream, n: usize) -> Result<(OmegaSample, u64)> {
    require_dim(n)?;
    for proposals in 1..=MAX_PROPOSALS {
        // Step order: Haar U, then lambda and M.
        let u = sample_haar_unitary(rng, n - 1);
        let lambda = rng.complex_normal(1.0);
        let m = sample_gaussian_matrix(rng, n - 1, n, None, 1.0);
        let q = complement_basis(&m, &u);
        if OmegaSample::accepts(lambda, &(&m * &q)) {
            let w = sample_gaussian_matrix(rng, n - 1, 1, None, 1.0).column(0);
            return Ok((OmegaSample { lambda, w, m, q }, proposals));
        }
    }
    Err(EigenError::BudgetExceeded {
        what: "Omega_n proposals",
        limit: MAX_PROPOSALS,
    })
}

/// `psi_n(lambda, w, M, Q) = ([[lambda, w^*], [0, MQ + lambda Id]], lambda, e_1)`.
pub fn psi(sample: &OmegaSample) -> Result<EigenTriple> {
    let k = sample.w.dim();
    let n = k + 1;
    if sample.m.shape() != (k, n) || sample.q.shape() != (n, k) {
        return Err(EigenError::shape("psi", sample.m.shape(), sample.q.shape()));
    }
    let mq = sample.mq();
    let lambda = sample.lambda;
    let a0 = ComplexMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => lambda,
        (0, _) => sample.w[j - 1].conj(),
        (_, 0) => ZERO,
        _ => mq[(i - 1, j - 1)] + if i == j { lambda } else { ZERO },
    });
    EigenTriple::new(a0, lambda, &ComplexVector::basis(n, 0))
}

/// `psi_n` of a fresh sample of `Omega_n`.
pub fn random_initial_triple(rng: &mut RngStream, n: usize) -> Result<EigenTriple> {
    psi(&sample_omega(rng, n)?.0)
}

/// Monte-Carlo estimates of both sides of
/// `E_M E_Q alpha(MQ) = E_B alpha(B) |det B|^2 / Gamma(n)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Trick2Estimate {
    pub lhs: f64,
    pub lhs_se: f64,
    pub rhs: f64,
    pub rhs_se: f64,
}

impl Trick2Estimate {
    pub fn combined_se(&self) -> f64 {
        (self.lhs_se * self.lhs_se + self.rhs_se * self.rhs_se).sqrt()
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

pub fn montecarlo_trick2(
    rng: &mut RngStream,
    n: usize,
    trials: usize,
    alpha: impl Fn(&ComplexMatrix) -> f64,
) -> Result<Trick2Estimate> {
    require_dim(n)?;
    if trials < 2 {
        return Err(EigenError::Argument("need at least two trials".into()));
    }
    let gamma_n: f64 = (1..n).map(|k| k as f64).product();
    let mut lhs = Vec::with_capacity(trials);
    let mut rhs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let (m, q) = sample_stiefel_pair(rng, n);
        lhs.push(alpha(&(&m * &q)));
        let b = sample_gaussian_matrix(rng, n - 1, n - 1, None, 1.0);
        rhs.push(alpha(&b) * b.determinant()?.norm_sqr() / gamma_n);
    }
    let (l, lse) = mean_se(&lhs);
    let (r, rse) = mean_se(&rhs);
    Ok(Trick2Estimate {
        lhs: l,
        lhs_se: lse,
        rhs: r,
        rhs_se: rse,
    })
}
