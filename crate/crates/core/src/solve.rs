//! The three global solvers: one eigenpair from the rank-one start, all eigenpairs
//! from the lattice diagonal, and one eigenpair from a random start.

use serde::{Deserialize, Serialize};

use crate::conditioning::{mu, residual, EigenTriple};
use crate::error::{EigenError, Result};
use crate::geometry::dist_a;
use crate::homotopy::{path_follow, HomotopyTrace, PathOptions};
use crate::initial::{hex_diagonal, sample_omega, psi, single_start};
use crate::linalg::{ComplexMatrix, ONE};
use crate::newton::{beta, certify_radius, ApproxEigenpair};
use crate::rng::RngStream;

/// Relative size of `A - tr(A)/n Id` below which `A` is treated as scalar.
pub const SCALAR_TOL: f64 = 1e-14;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Solution {
    pub pair: ApproxEigenpair,
    pub steps: u64,
    /// `|A w - zeta w| / |A|_F`.
    pub residual: f64,
    /// Newton step length at the output, for the unit-norm matrix.
    pub beta: f64,
    #[serde(skip)]
    pub trace: HomotopyTrace,
}

fn check_input(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() || a.rows() < 2 {
        return Err(EigenError::Argument(format!(
            "need a square matrix of size at least 2, got {:?}",
            a.shape()
        )));
    }
    if !a.is_finite() {
        return Err(EigenError::Argument("matrix has non-finite entries".into()));
    }
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Err(EigenError::Argument("zero matrix".into()));
    }
    let n = a.rows() as f64;
    let dev = a.shift(a.trace() / n).frobenius_norm();
    if dev <= SCALAR_TOL * norm {
        return Err(EigenError::IllPosed("scalar matrix: every eigenvalue is repeated".into()));
    }
    Ok(norm)
}

fn follow_from(a: &ComplexMatrix, norm: f64, start: &EigenTriple, opts: &PathOptions) -> Result<Solution> {
    let p0 = ApproxEigenpair::new(start.eigenvalue, &start.eigenvector)?;
    let (pair, trace) = path_follow(a, &start.matrix, &p0, opts)?;
    let unit = a.scale_real(1.0 / norm);
    let b = beta(&unit, &ApproxEigenpair::new(pair.zeta / norm, &pair.w)?)?;
    Ok(Solution {
        residual: residual(a, pair.zeta, &pair.w) / norm,
        steps: trace.total_steps,
        beta: b,
        pair,
        trace,
    })
}

/// One eigenpair of `A`, tracked from `(diag(1, 0, ..., 0), 1, e_1)`.
pub fn single_eigenpair(a: &ComplexMatrix, opts: &PathOptions) -> Result<Solution> {
    let norm = check_input(a)?;
    follow_from(a, norm, &single_start(a.rows())?, opts)
}

#[derive(Clone, Debug)]
pub struct AllEigenpairs {
    pub results: Vec<std::result::Result<Solution, EigenError>>,
    /// Every pair succeeded and no two outputs lie within twice their certification radius.
    pub distinct: bool,
}

/// All eigenpairs of `A`, one path per lattice point of the diagonal start.
pub fn all_eigenpairs(a: &ComplexMatrix, opts: &PathOptions) -> Result<AllEigenpairs> {
    let norm = check_input(a)?;
    let (_, starts) = hex_diagonal(a.rows())?;
    let results: Vec<_> = starts.iter().map(|t| follow_from(a, norm, t, opts)).collect();
    let distinct = pairwise_distinct(a, norm, &results);
    Ok(AllEigenpairs { results, distinct })
}

fn pairwise_distinct(a: &ComplexMatrix, norm: f64, results: &[Result<Solution>]) -> bool {
    let Some(sols) = results.iter().map(|r| r.as_ref().ok()).collect::<Option<Vec<_>>>() else {
        return false;
    };
    let unit = a.scale_real(1.0 / norm);
    let radii: Vec<f64> = sols
        .iter()
        .map(|s| mu(&unit, s.pair.zeta / norm, &s.pair.w).map_or(0.0, certify_radius))
        .collect();
    for i in 0..sols.len() {
        for j in 0..i {
            let d = dist_a(
                &unit,
                (sols[i].pair.zeta / norm, &sols[i].pair.w),
                (sols[j].pair.zeta / norm, &sols[j].pair.w),
            );
            match d {
                Ok(d) if d > radii[i] + radii[j] => {}
                _ => return false,
            }
        }
    }
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomSolution {
    pub solution: Solution,
    pub proposals: u64,
}

/// One eigenpair of `A`, tracked from a random triple of `psi(Omega_n)`.
pub fn random_eigenpair(rng: &mut RngStream, a: &ComplexMatrix, opts: &PathOptions) -> Result<RandomSolution> {
    let norm = check_input(a)?;
    let (sample, proposals) = sample_omega(rng, a.rows())?;
    let start = psi(&sample)?;
    Ok(RandomSolution {
        solution: follow_from(a, norm, &start, opts)?,
        proposals,
    })
}

/// Unit-norm copy of `A`, or an error for the zero matrix.
pub fn normalized(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.frobenius_norm();
    if n == 0.0 || !n.is_finite() {
        return Err(EigenError::Argument("matrix norm must be positive and finite".into()));
    }
    Ok(a.scale(ONE / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn diagonal_two_by_two() {
        let a = ComplexMatrix::real_diagonal(&[2.0, 1.0]);
        let s = single_eigenpair(&a, &PathOptions::default()).unwrap();
        assert!((s.pair.zeta - Complex64::new(2.0, 0.0)).norm() < 1e-8);
        assert!(s.residual < 1e-8);
    }

    #[test]
    fn start_matrix_is_degenerate() {
        let h = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            single_eigenpair(&h, &PathOptions::default()),
            Err(EigenError::DegenerateArc { .. })
        ));
    }

    #[test]
    fn identity_is_rejected() {
        let id = ComplexMatrix::identity(3);
        assert!(matches!(all_eigenpairs(&id, &PathOptions::default()), Err(EigenError::IllPosed(_))));
    }

    #[test]
    fn all_pairs_of_diagonal() {
        let a = ComplexMatrix::real_diagonal(&[5.0, 9.0]);
        let out = all_eigenpairs(&a, &PathOptions::default()).unwrap();
        assert!(out.distinct);
        let mut z: Vec<f64> = out.results.iter().map(|r| r.as_ref().unwrap().pair.zeta.re).collect();
        z.sort_by(f64::total_cmp);
        assert!((z[0] - 5.0).abs() < 1e-8 && (z[1] - 9.0).abs() < 1e-8);
    }
}
