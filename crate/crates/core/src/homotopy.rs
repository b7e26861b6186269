//! Path following along great circles with the condition-based step controller.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditioning::{inverse_norm, left_eigenvector, reduced_operator, EigenTriple};
use crate::error::{EigenError, Result};
use crate::geometry::{dist_a, great_circle, GreatCircleArc};
use crate::linalg::svd::svd;
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::newton::{finish_step, ApproxEigenpair, Linearization};
use crate::oracle;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// The constants driving the step controller and the step-count bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantLedger {
    pub c1_prime: f64,
    pub c1: f64,
    pub cu_prime: f64,
    pub cu: f64,
    pub c_star: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub k: f64,
    /// `C = 1 / c7`.
    pub big_c: f64,
}

impl ConstantLedger {
    /// Derives the remaining constants from `c1'`, `cu'`, `c*` and `K`, and
    /// checks every constraint they must satisfy.
    pub fn new(c1_prime: f64, cu_prime: f64, c_star: f64, k: f64) -> Result<Self> {
        let c1 = SQRT3 * c1_prime;
        let cu = SQRT3 * cu_prime + 3.0 * c1 * c1 * (SQRT3 - 1.0) / (2.0 * (1.0 - 3.0 * c1));
        let g_star = 1.0 + 4.0 * SQRT3 * c_star;
        let c4 = c_star + g_star * (c1 + 2.0 * cu);
        let g4 = 1.0 + 4.0 * SQRT3 * c4;
        let c5 = cu_prime / g_star - 2.0 * (2.0 * c_star + 1.5 * c1 * c1 * g_star) / (1.0 - 3.0 * c1);
        let c6 = (c5 * (1.0 - 3.0 * c1) - 2.0 * (1.0 + 3.0 * c1) * c_star) / (2.0 * (1.0 + 3.0 * c1) * g4);
        let c7 = (c1_prime / (g4 * g_star)).min(c6);
        let checks = [
            (SQRT3 * c1_prime <= c1 * (1.0 + 1e-15) && c1 < 0.5, "sqrt3 c1' <= c1 < 1/2"),
            (
                SQRT3 * cu_prime <= (cu - 1.5 * c1 * c1 * (SQRT3 - 1.0) / (1.0 - 3.0 * c1)) * (1.0 + 1e-12),
                "sqrt3 cu' <= cu - 3/2 c1^2 (sqrt3 - 1) / (1 - 3 c1)",
            ),
            (4.0 * SQRT3 * c_star < 1.0, "4 sqrt3 c* < 1"),
            (4.0 * SQRT3 * c4 < 1.0, "4 sqrt3 c4 < 1"),
            (2.0 * g_star * g4 * cu < k * c_star, "2 (1 + 4 sqrt3 c*)(1 + 4 sqrt3 c4) cu < K c*"),
            (k * c_star < 0.2, "K c* < 1/5"),
            (c1 < 1.0 / 3.0, "c1 < 1/3"),
            (c5 > 0.0, "c5 > 0"),
            (c6 > 0.0, "c6 > 0"),
            (c7 > 0.0, "c7 > 0"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(EigenError::Argument(format!("constant constraint violated: {what}")));
            }
        }
        Ok(Self {
            c1_prime,
            c1,
            cu_prime,
            cu,
            c_star,
            c4,
            c5,
            c6,
            c7,
            k,
            big_c: 1.0 / c7,
        })
    }

    /// `R = c7 / (6 (1 + 4 sqrt3 c4)^2)`, the floor constant of the step size.
    pub fn step_floor(&self) -> f64 {
        let g4 = 1.0 + 4.0 * SQRT3 * self.c4;
        self.c7 / (6.0 * g4 * g4)
    }
}

impl Default for ConstantLedger {
    fn default() -> Self {
        Self::new(1e-3, 1e-3, 1e-4, 64.0).expect("default constants are consistent")
    }
}

/// Quantities computed by one call to the step controller.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StepChoice {
    pub ds: f64,
    pub r: f64,
    pub phi: f64,
    pub beta: f64,
    pub s_prime: f64,
    pub s_double: f64,
}

/// Step controller. `B` and `A_dot` must have unit Frobenius norm and `w` unit length.
///
/// Uses `r = mu(B, zeta, w)` exactly, from one SVD of the reduced operator which
/// is also used for `beta` and `Phi`.
pub fn choose_step(
    b: &ComplexMatrix,
    a_dot: &ComplexMatrix,
    p: &ApproxEigenpair,
    ledger: &ConstantLedger,
) -> Result<StepChoice> {
    let red = reduced_operator(b, p.zeta, &p.w)?;
    let dec = svd(red.block());
    let inv = inverse_norm(&dec.singular_values);
    if inv.is_infinite() {
        return Err(EigenError::IllPosed("reduced operator is numerically singular".into()));
    }
    let r = b.frobenius_norm() * inv;
    let c = red.conjugated();
    let n = c.rows();
    let a_row = &c.row(0)[1..];
    // (DF|)^{-1} y in frame coordinates: x' = R^{-1} y', zeta_dot = a^* x' - y_0.
    let solve = |y0: Complex64, tail: &[Complex64]| -> (Complex64, Vec<Complex64>) {
        let x = dec.solve(tail);
        let ax: Complex64 = a_row.iter().zip(&x).map(|(p, q)| p * q).sum();
        (ax - y0, x)
    };
    let norm2 = |z0: Complex64, x: &[Complex64]| (z0.norm_sqr() + x.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt();

    let b_tail: Vec<Complex64> = (1..n).map(|i| c[(i, 0)]).collect();
    let (ld, vd) = solve(c[(0, 0)] - p.zeta, &b_tail);
    let beta = norm2(ld, &vd);

    let aw = red.frame().apply_adjoint(&a_dot.matvec(&p.w));
    let (z0, x) = solve(aw[0], &aw[1..]);
    let phi = norm2(z0, &x);

    let s_prime = ledger.c1 / r;
    let rhs = ledger.cu * (1.0 - 3.0 * ledger.c1) / r - beta - 1.5 * ledger.c1 * ledger.c1 * SQRT3 / r;
    let s_double = if phi > 0.0 { rhs / phi } else { f64::INFINITY };
    let ds = s_prime.min(s_double);
    Ok(StepChoice {
        ds,
        r,
        phi,
        beta,
        s_prime,
        s_double,
    })
}

/// One accepted iteration of the path follower.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepRecord {
    pub i: u64,
    /// Parameter before the step.
    pub s: f64,
    /// Step returned by the controller (before clamping to the arc length).
    pub ds: f64,
    pub r: f64,
    pub phi: f64,
    pub beta: f64,
    /// Eigenvalue iterate after the step, for the unit-norm matrix.
    pub zeta: Complex64,
    /// Eigenvector iterate after the step, kept only with `record_iterates`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<ComplexVector>,
    pub nanos: u64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct HomotopyTrace {
    pub alpha: f64,
    pub steps: Vec<StepRecord>,
    pub total_steps: u64,
    pub completed: bool,
}

/// Budget and bookkeeping options for `path_follow`.
#[derive(Clone, Debug)]
pub struct PathOptions {
    pub ledger: ConstantLedger,
    pub max_steps: u64,
    pub record_steps: bool,
    pub record_iterates: bool,
}

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000_000;

impl Default for PathOptions {
    fn default() -> Self {
        Self {
            ledger: ConstantLedger::default(),
            max_steps: DEFAULT_MAX_STEPS,
            record_steps: true,
            record_iterates: false,
        }
    }
}

/// Follows the eigenpair `p0` of `A0` along the great circle from `A0 / |A0|_F`
/// to `A / |A|_F` and returns an approximate eigenpair of `A`.
///
/// `p0.zeta` refers to the unnormalized `A0`; it is divided by `|A0|_F` together
/// with the matrix.
pub fn path_follow(
    a: &ComplexMatrix,
    a0: &ComplexMatrix,
    p0: &ApproxEigenpair,
    opts: &PathOptions,
) -> Result<(ApproxEigenpair, HomotopyTrace)> {
    if !a.is_square() || a.shape() != a0.shape() || p0.w.dim() != a.rows() {
        return Err(EigenError::shape("path_follow", a.shape(), a0.shape()));
    }
    let arc = great_circle(a0, a)?;
    let alpha = arc.alpha();
    let na = a.frobenius_norm();
    let mut p = ApproxEigenpair::new(p0.zeta / a0.frobenius_norm(), &p0.w)?;
    let mut trace = HomotopyTrace {
        alpha,
        ..Default::default()
    };
    let mut s = 0.0;
    let mut b = arc.point_at(0.0);
    let fail = |step: u64, s: f64, e: EigenError| EigenError::PathFailure {
        step,
        s,
        reason: e.to_string(),
    };
    let mut i: u64 = 0;
    while s < alpha {
        if i >= opts.max_steps {
            return Err(EigenError::BudgetExceeded {
                what: "path steps",
                limit: opts.max_steps,
            });
        }
        let t0 = opts.record_steps.then(Instant::now);
        let tangent = arc.tangent_at(s);
        let choice = choose_step(&b, &tangent, &p, &opts.ledger).map_err(|e| fail(i, s, e))?;
        if !(choice.ds > 0.0) {
            return Err(fail(
                i,
                s,
                EigenError::IllPosed(format!("step controller returned {:e}", choice.ds)),
            ));
        }
        let next_s = alpha.min(s + choice.ds);
        if next_s <= s {
            return Err(fail(i, s, EigenError::IllPosed("step below floating-point resolution".into())));
        }
        b = arc.point_at(next_s);
        for _ in 0..3 {
            let lin = Linearization::new(&b, &p).map_err(|e| fail(i, next_s, e))?;
            let (ld, tail) = lin.step(p.zeta).map_err(|e| fail(i, next_s, e))?;
            p = finish_step(&lin, &p, ld, &tail).0;
        }
        let m = p.zeta.norm();
        if m > 1.0 {
            p.zeta /= m;
        }
        if !(p.zeta.re.is_finite() && p.zeta.im.is_finite() && p.w.is_finite()) {
            return Err(fail(i, next_s, EigenError::IllPosed("iterate became non-finite".into())));
        }
        if let Some(t0) = t0 {
            trace.steps.push(StepRecord {
                i,
                s,
                ds: choice.ds,
                r: choice.r,
                phi: choice.phi,
                beta: choice.beta,
                zeta: p.zeta,
                w: opts.record_iterates.then(|| p.w.clone()),
                nanos: t0.elapsed().as_nanos() as u64,
            });
        }
        s = next_s;
        i += 1;
    }
    trace.total_steps = i;
    trace.completed = true;
    p.zeta *= na;
    Ok((p, trace))
}

/// The integrand `mu(B_s, l_s, v_s) |(B_dot, l_dot, v_dot)|` of the condition
/// length, at a point of the lifted path.
pub fn condition_integrand(triple: &EigenTriple, b_dot: &ComplexMatrix) -> Result<f64> {
    let b = &triple.matrix;
    let v = &triple.eigenvector;
    let red = reduced_operator(b, triple.eigenvalue, v)?;
    let dec = svd(red.block());
    let inv = inverse_norm(&dec.singular_values);
    if inv.is_infinite() {
        return Err(EigenError::IllPosed("condition integrand on the discriminant variety".into()));
    }
    let mu = b.frobenius_norm() * inv;
    let bv = b_dot.matvec(v);
    let u = left_eigenvector(b, triple.eigenvalue, v)?;
    let l_dot = bv.inner(&u);
    let c = red.frame().apply_adjoint(&bv);
    let v_dot = dec.solve(&c[1..]);
    let v_dot_sqr: f64 = v_dot.iter().map(|z| z.norm_sqr()).sum();
    Ok(mu * (b_dot.frobenius_norm_sqr() + l_dot.norm_sqr() + v_dot_sqr).sqrt())
}

/// Samples of the condition-length integrand on an equispaced grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionProfile {
    pub s: Vec<f64>,
    pub integrand: Vec<f64>,
}

impl ConditionProfile {
    /// Trapezoid integral over the whole grid.
    pub fn total(&self) -> f64 {
        self.s
            .windows(2)
            .zip(self.integrand.windows(2))
            .map(|(s, f)| 0.5 * (f[0] + f[1]) * (s[1] - s[0]))
            .sum()
    }

    fn interpolate(&self, x: f64) -> f64 {
        let n = self.s.len();
        let h = (self.s[n - 1] - self.s[0]) / (n - 1) as f64;
        let k = (((x - self.s[0]) / h).floor().max(0.0) as usize).min(n - 2);
        let t = ((x - self.s[k]) / h).clamp(0.0, 1.0);
        self.integrand[k] * (1.0 - t) + self.integrand[k + 1] * t
    }

    /// Integral over `[lo, hi]` of the piecewise-linear interpolant; `hi` must lie in the grid.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let n = self.s.len();
        let h = (self.s[n - 1] - self.s[0]) / (n - 1) as f64;
        let mut acc = 0.0;
        let mut x = lo;
        while x < hi {
            let k = (((x - self.s[0]) / h).floor().max(0.0) as usize).min(n - 2);
            let end = self.s[k + 1].min(hi);
            let end = if end <= x { hi.min(x + h) } else { end };
            acc += 0.5 * (self.interpolate(x) + self.interpolate(end)) * (end - x);
            x = end;
        }
        acc
    }
}

/// Oracle continuation of the eigenpair nearest to `p0` from `s = 0` to `s_end`
/// with the integrand evaluated at `samples` equispaced points.
pub fn condition_profile(
    arc: &GreatCircleArc,
    p0: &ApproxEigenpair,
    zeta_scale: f64,
    s_end: f64,
    samples: usize,
) -> Result<ConditionProfile> {
    let b0 = arc.point_at(0.0);
    let spec = oracle::reference_eigenpairs(&b0)?;
    let zeta = p0.zeta / zeta_scale;
    let start = spec
        .triples
        .iter()
        .map(|t| (dist_a(&b0, (zeta, &p0.w), (t.eigenvalue, &t.eigenvector)), t))
        .filter_map(|(d, t)| d.ok().map(|d| (d, t)))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, t)| t.clone())
        .ok_or_else(|| EigenError::OracleFailure("no start eigenpair".into()))?;
    let path = oracle::follow(arc, &start, 0.0, s_end, samples)?;
    let mut s = Vec::with_capacity(samples);
    let mut integrand = Vec::with_capacity(samples);
    for (k, t) in path.iter().enumerate() {
        let sk = s_end * k as f64 / (samples - 1) as f64;
        s.push(sk);
        integrand.push(condition_integrand(t, &arc.tangent_at(sk))?);
    }
    Ok(ConditionProfile { s, integrand })
}

/// `C` times the trapezoid approximation of the condition length of the lifted path.
pub fn step_count_ceiling(
    a: &ComplexMatrix,
    a0: &ComplexMatrix,
    p0: &ApproxEigenpair,
    quadrature_points: usize,
    ledger: &ConstantLedger,
) -> Result<f64> {
    let arc = great_circle(a0, a)?;
    let prof = condition_profile(&arc, p0, a0.frobenius_norm(), arc.alpha(), quadrature_points)?;
    Ok(ledger.big_c * prof.total())
}

/// Observed step count of one path against its ceiling `ceil(K)`, together with the
/// condition length of each controller interval `[s_i, s_i + ds_i]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CeilingAudit {
    pub steps: u64,
    pub ceiling: f64,
    pub min_interval_length: f64,
    /// Intervals whose condition length is below `c_7`.
    pub short_intervals: u64,
}

impl CeilingAudit {
    pub fn within_ceiling(&self) -> bool {
        self.steps as f64 <= self.ceiling.ceil()
    }
}

/// Runs `path_follow` and audits it against `step_count_ceiling` at `quadrature_points`.
/// The last interval may reach past the arc's end; the oracle path is extended to cover it.
pub fn ceiling_audit(
    a: &ComplexMatrix,
    a0: &ComplexMatrix,
    p0: &ApproxEigenpair,
    quadrature_points: usize,
    opts: &PathOptions,
) -> Result<(ApproxEigenpair, CeilingAudit)> {
    let opts = PathOptions {
        record_steps: true,
        ..opts.clone()
    };
    let (out, trace) = path_follow(a, a0, p0, &opts)?;
    let ceiling = step_count_ceiling(a, a0, p0, quadrature_points, &opts.ledger)?;
    let arc = great_circle(a0, a)?;
    let alpha = arc.alpha();
    let s_end = trace.steps.iter().map(|r| r.s + r.ds).fold(alpha, f64::max);
    let samples = (((quadrature_points - 1) as f64) * s_end / alpha).ceil() as usize + 1;
    let prof = condition_profile(&arc, p0, a0.frobenius_norm(), s_end, samples)?;
    let lengths: Vec<f64> = trace.steps.iter().map(|r| prof.integral(r.s, r.s + r.ds)).collect();
    let c7 = opts.ledger.c7;
    Ok((
        out,
        CeilingAudit {
            steps: trace.total_steps,
            ceiling,
            min_interval_length: lengths.iter().copied().fold(f64::INFINITY, f64::min),
            short_intervals: lengths.iter().filter(|&&l| l < c7).count() as u64,
        },
    ))
}
