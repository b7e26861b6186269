//! Newton's operator for the eigenpair problem.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditioning::{reduced_operator, ReducedOperator};
use crate::error::{EigenError, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, LuDecomposition};

/// The constant `c_0` of the approximate-eigenpair radius `c_0 / mu`.
pub const C0: f64 = 0.2;

/// A candidate `(zeta, w)` with `|w| = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxEigenpair {
    pub zeta: Complex64,
    pub w: ComplexVector,
}

impl ApproxEigenpair {
    /// Builds a pair, normalizing `w`.
    pub fn new(zeta: Complex64, w: &ComplexVector) -> Result<Self> {
        let w = w
            .normalized()
            .ok_or_else(|| EigenError::Argument("approximate eigenvector must be nonzero".into()))?;
        if !(zeta.re.is_finite() && zeta.im.is_finite()) || !w.is_finite() {
            return Err(EigenError::Argument("approximate eigenpair must be finite".into()));
        }
        Ok(Self { zeta, w })
    }
}

/// The Newton correction `(lambda_dot, v_dot)` and its length `beta`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NewtonStep {
    pub lambda_dot: Complex64,
    pub v_dot: ComplexVector,
    pub beta: f64,
}

/// Frame data and a factorization of the reduced operator at `(zeta, w)`.
pub(crate) struct Linearization {
    pub red: ReducedOperator,
    lu: LuDecomposition,
}

impl Linearization {
    pub fn new(a: &ComplexMatrix, p: &ApproxEigenpair) -> Result<Self> {
        let red = reduced_operator(a, p.zeta, &p.w)?;
        let lu = LuDecomposition::new(red.block());
        if lu.is_singular() {
            return Err(EigenError::IllPosed("reduced operator has a zero pivot".into()));
        }
        Ok(Self { red, lu })
    }

    fn solve_block(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.lu
            .solve(rhs)
            .ok_or_else(|| EigenError::IllPosed("reduced operator solve overflowed".into()))
    }

    /// Solves `DF|_{C x w perp} (zeta_dot, x) = y` for `y` given in frame coordinates.
    /// Returns `(zeta_dot, x')` with `x = U (0, x')`.
    pub fn solve_df(&self, y: &[Complex64]) -> Result<(Complex64, Vec<Complex64>)> {
        let x = self.solve_block(&y[1..])?;
        let a_row = &self.red.conjugated().row(0)[1..];
        let ax: Complex64 = a_row.iter().zip(&x).map(|(p, q)| p * q).sum();
        Ok((ax - y[0], x))
    }

    /// The Newton correction in frame coordinates.
    pub fn step(&self, zeta: Complex64) -> Result<(Complex64, Vec<Complex64>)> {
        let c = self.red.conjugated();
        let n = c.rows();
        // F in frame coordinates is ((l1 - zeta), b).
        let mut f = Vec::with_capacity(n);
        f.push(c[(0, 0)] - zeta);
        for i in 1..n {
            f.push(c[(i, 0)]);
        }
        self.solve_df(&f)
    }
}

/// One Newton step. The returned `w` is renormalized to unit length.
pub fn newton_step(a: &ComplexMatrix, p: &ApproxEigenpair) -> Result<(ApproxEigenpair, NewtonStep)> {
    let lin = Linearization::new(a, p)?;
    let (lambda_dot, tail) = lin.step(p.zeta)?;
    Ok(finish_step(&lin, p, lambda_dot, &tail))
}

pub(crate) fn finish_step(
    lin: &Linearization,
    p: &ApproxEigenpair,
    lambda_dot: Complex64,
    tail: &[Complex64],
) -> (ApproxEigenpair, NewtonStep) {
    let v_dot = ComplexVector::from(lin.red.frame().embed_tail(tail));
    let tail_sqr: f64 = tail.iter().map(|z| z.norm_sqr()).sum();
    let beta = (lambda_dot.norm_sqr() + tail_sqr).sqrt();
    let moved = &p.w - &v_dot;
    // |w - v_dot|^2 = 1 + |v_dot|^2 since v_dot is orthogonal to w.
    let w = moved.scale(Complex64::new(1.0 / (1.0 + tail_sqr).sqrt(), 0.0));
    let next = ApproxEigenpair {
        zeta: p.zeta - lambda_dot,
        w,
    };
    (
        next,
        NewtonStep {
            lambda_dot,
            v_dot,
            beta,
        },
    )
}

/// `N_A^k(p)`.
pub fn newton_iterate(a: &ComplexMatrix, p: &ApproxEigenpair, k: usize) -> Result<ApproxEigenpair> {
    let mut cur = p.clone();
    for _ in 0..k {
        cur = newton_step(a, &cur)?.0;
    }
    Ok(cur)
}

/// Length of the Newton step, `sqrt(|lambda_dot|^2 + |v_dot|^2)`.
pub fn beta(a: &ComplexMatrix, p: &ApproxEigenpair) -> Result<f64> {
    Ok(newton_step(a, p)?.1.beta)
}

/// Radius `c_0 / mu` within which every point is an approximate eigenpair.
pub fn certify_radius(mu_value: f64) -> f64 {
    C0 / mu_value
}

/// Matrix of `DF_A(zeta, w)` restricted to `C x w perp`, in the frame coordinates of `w`.
pub fn restricted_derivative(a: &ComplexMatrix, p: &ApproxEigenpair) -> Result<ComplexMatrix> {
    let red = reduced_operator(a, p.zeta, &p.w)?;
    let n = a.rows();
    let c = red.conjugated();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => Complex64::new(-1.0, 0.0),
        (0, _) => c[(0, j)],
        (_, 0) => Complex64::new(0.0, 0.0),
        _ => red.block()[(i - 1, j - 1)],
    }))
}
