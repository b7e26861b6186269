//! Newton refinement of a certified eigenpair to a prescribed relative error.

use serde::{Deserialize, Serialize};

use crate::error::{EigenError, Result};
use crate::linalg::ComplexMatrix;
use crate::newton::{newton_step, ApproxEigenpair};

pub const MAX_ITERATIONS: u32 = 64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Refined {
    pub pair: ApproxEigenpair,
    pub iterations: u32,
}

/// `log2 log2 (4 / (epsilon |zeta|))`, the iteration target for the current iterate.
pub fn iteration_target(epsilon: f64, zeta_abs: f64) -> f64 {
    let x = 4.0 / (epsilon * zeta_abs);
    if x <= 2.0 {
        return 0.0;
    }
    x.log2().log2()
}

/// Newton steps until `k >= log2 log2 (4 / (epsilon |zeta'|))`. `a` must have unit Frobenius norm.
pub fn relative_error_refine(a: &ComplexMatrix, p: &ApproxEigenpair, epsilon: f64) -> Result<Refined> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(EigenError::Argument(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    let norm = a.frobenius_norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(EigenError::Argument(format!("matrix must have unit Frobenius norm, got {norm}")));
    }
    let mut pair = p.clone();
    for k in 1..=MAX_ITERATIONS {
        pair = newton_step(a, &pair)?.0;
        if k as f64 >= iteration_target(epsilon, pair.zeta.norm()) {
            return Ok(Refined { pair, iterations: k });
        }
    }
    Err(EigenError::NonConvergence {
        iterations: MAX_ITERATIONS,
        reason: "eigenvalue estimate stays at zero".into(),
    })
}
