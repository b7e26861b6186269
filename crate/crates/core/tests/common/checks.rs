//! Property checks shared by the proptest suites and the acceptance target.
//! Each returns `Ok(true)` when the case was checked, `Ok(false)` when the
//! random draw fell outside the property's hypotheses.

use super::*;
use eigenpath::conditioning::{mu, reduced_operator};
use eigenpath::geometry::{dist_a, triple_distance};
use eigenpath::homotopy::{choose_step, ConstantLedger};
use eigenpath::linalg::{frobenius_inner, sample_gaussian_matrix, sample_haar_unitary, svd, ComplexMatrix};
use eigenpath::newton::{newton_iterate, newton_step, restricted_derivative, ApproxEigenpair, C0};
use eigenpath::rng::RngStream;
use eigenpath::Complex64;

pub type Check = Result<bool, String>;

const SQRT3: f64 = 1.732_050_807_568_877_2;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng_from(seed: u64) -> RngStream {
    RngStream::new(seed, 0)
}

pub fn mu_unitary_invariance(seed: u64, n: usize) -> Check {
    let mut rng = rng_from(seed);
    let t = random_v_triple(&mut rng, n);
    let u = sample_haar_unitary(&mut rng, n);
    let b = &(&u * &t.matrix) * &u.adjoint();
    let m0 = t.mu().unwrap();
    let m1 = mu(&b, t.eigenvalue, &u.matvec(&t.eigenvector)).unwrap();
    ensure!(rel_diff(m0, m1) <= 1e-10, "unitary invariance: {m0} vs {m1}");
    Ok(true)
}

pub fn mu_scale_invariance(seed: u64, n: usize) -> Check {
    let mut rng = rng_from(seed);
    let t = random_v_triple(&mut rng, n);
    let s = rng.complex_normal(1.0) * 3.0;
    if s.norm() <= 1e-3 {
        return Ok(false);
    }
    let m0 = t.mu().unwrap();
    let m1 = mu(&t.matrix.scale(s), s * t.eigenvalue, &t.eigenvector).unwrap();
    ensure!(rel_diff(m0, m1) <= 1e-10, "scale invariance: {m0} vs {m1}");
    Ok(true)
}

pub fn mu_lower_bounds(seed: u64, n: usize) -> Check {
    let mut rng = rng_from(seed);
    let t = random_v_triple(&mut rng, n);
    let m = t.mu().unwrap();
    ensure!(m >= 1.0 / 2f64.sqrt() - 1e-12, "mu on V below 1/sqrt2: {m}");
    let a = unit_gaussian(&mut rng, n);
    let zeta = Complex64::from_polar(rng.uniform().sqrt(), rng.uniform() * std::f64::consts::TAU);
    let w = random_unit_vector(&mut rng, n);
    let m = mu(&a, zeta, &w).unwrap();
    ensure!(m >= 0.5 - 1e-12, "mu off V below 1/2: {m}");
    Ok(true)
}

pub fn normal_matrix_formula(seed: u64, n: usize) -> Check {
    let mut rng = rng_from(seed);
    let d: Vec<Complex64> = (0..n).map(|_| rng.complex_normal(1.0)).collect();
    let u = sample_haar_unitary(&mut rng, n);
    let a = &(&u * &ComplexMatrix::from_diagonal(&d)) * &u.adjoint();
    let i = (seed % n as u64) as usize;
    let gap = (0..n)
        .filter(|&j| j != i)
        .map(|j| (d[i] - d[j]).norm())
        .fold(f64::INFINITY, f64::min);
    let expect = a.frobenius_norm() / gap;
    let got = mu(&a, d[i], &u.column(i)).unwrap();
    ensure!(rel_diff(expect, got) <= 1e-9, "normal formula: {expect} vs {got}");
    Ok(true)
}

pub fn reduced_inverse_is_pseudoinverse(seed: u64, n: usize) -> Check {
    let mut rng = rng_from(seed);
    let t = random_v_triple(&mut rng, n);
    let red = reduced_operator(&t.matrix, t.eigenvalue, &t.eigenvector).unwrap();
    let block_inv = 1.0 / svd(red.block()).smallest();
    let v = &t.eigenvector;
    let p = ComplexMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - v[i] * v[j].conj()
    });
    let ambient = &(&p * &t.matrix.shift(t.eigenvalue)) * &p;
    let pinv_norm = svd(&svd(&ambient).pseudoinverse()).largest();
    ensure!(rel_diff(block_inv, pinv_norm) <= 1e-10, "pseudoinverse form: {block_inv} vs {pinv_norm}");
    Ok(true)
}

pub fn newton_homogeneity(seed: u64, n: usize) -> Check {
    let mut rng = rng_from(seed);
    let a = unit_gaussian(&mut rng, n);
    let p = ApproxEigenpair::new(rng.complex_normal(0.5), &random_unit_vector(&mut rng, n)).unwrap();
    let s = rng.complex_normal(2.0);
    if s.norm() <= 1e-2 {
        return Ok(false);
    }
    let (q, _) = newton_step(&a, &p).unwrap();
    let ps = ApproxEigenpair::new(s * p.zeta, &p.w).unwrap();
    let (qs, _) = newton_step(&a.scale(s), &ps).unwrap();
    let dz = (qs.zeta / s - q.zeta).norm();
    let dw = (&qs.w - &q.w).norm();
    ensure!(dz <= 1e-10 * (1.0 + q.zeta.norm()), "homogeneity in zeta: {dz:e}");
    ensure!(dw <= 1e-10, "homogeneity in w: {dw:e}");
    Ok(true)
}

pub fn newton_projective(seed: u64, n: usize) -> Check {
    let mut rng = rng_from(seed);
    let a = unit_gaussian(&mut rng, n);
    let p = ApproxEigenpair::new(rng.complex_normal(0.5), &random_unit_vector(&mut rng, n)).unwrap();
    let phase = Complex64::from_polar(1.0, rng.uniform() * std::f64::consts::TAU);
    let (q0, _) = newton_step(&a, &p).unwrap();
    let (q1, _) = newton_step(&a, &ApproxEigenpair::new(p.zeta, &p.w.scale(phase)).unwrap()).unwrap();
    ensure!((q0.zeta - q1.zeta).norm() <= 1e-12 * (1.0 + q0.zeta.norm()), "phase changed zeta");
    ensure!((&q0.w.scale(phase) - &q1.w).norm() <= 1e-12, "phase changed the projective class");
    Ok(true)
}

pub fn derivative_inverse_bound(seed: u64, n: usize) -> Check {
    let mut rng = rng_from(seed);
    let a = unit_gaussian(&mut rng, n);
    let zeta = Complex64::from_polar(rng.uniform().sqrt(), rng.uniform() * std::f64::consts::TAU);
    let p = ApproxEigenpair::new(zeta, &random_unit_vector(&mut rng, n)).unwrap();
    let inv = 1.0 / svd(&restricted_derivative(&a, &p).unwrap()).smallest();
    let m = mu(&a, p.zeta, &p.w).unwrap();
    ensure!(inv <= 3.0 * m * (1.0 + 1e-12), "|DF^-1| = {inv} exceeds 3 mu = {}", 3.0 * m);
    Ok(true)
}

/// Starting within `frac * c_0 / mu` of an eigenpair, `dist_A(N^k, (l, v)) <= 2^{1 - 2^k} dist_A(start, (l, v))`.
pub fn quadratic_contraction(seed: u64, n: usize, frac: f64) -> Check {
    let mut rng = rng_from(seed);
    let t = random_v_triple(&mut rng, n);
    let m = t.mu().unwrap();
    let d0 = frac * C0 / m;
    let (zeta, w) = pair_at_distance(&mut rng, 1.0, t.eigenvalue, &t.eigenvector, d0);
    let p = ApproxEigenpair::new(zeta, &w).unwrap();
    for k in 1..=4u32 {
        let q = newton_iterate(&t.matrix, &p, k as usize).unwrap();
        let d = dist_a(&t.matrix, (q.zeta, &q.w), (t.eigenvalue, &t.eigenvector)).unwrap();
        let bound = 0.5f64.powi(2i32.pow(k) - 1) * d0;
        // Additive floor for roundoff in the reference eigenpair itself.
        let floor = 1e-13 * m;
        ensure!(d <= bound + floor, "k={k}: dist {d:e} above {bound:e} (mu {m})");
    }
    Ok(true)
}

/// `0.9 beta <= dist_A(p, N(p)) <= beta` when `|v_dot| <= 1/3`, and
/// `beta / 2 <= dist_A(p, (l, v)) <= 2 beta` for approximate eigenpairs with `beta <= 1/3`.
pub fn beta_brackets(seed: u64, n: usize, frac: f64) -> Check {
    let mut rng = rng_from(seed);
    let t = random_v_triple(&mut rng, n);
    let m = t.mu().unwrap();
    let (zeta, w) = pair_at_distance(&mut rng, 1.0, t.eigenvalue, &t.eigenvector, frac * C0 / m);
    let p = ApproxEigenpair::new(zeta, &w).unwrap();
    let (q, step) = newton_step(&t.matrix, &p).unwrap();
    let b = step.beta;
    let slack = 1e-13 * m;
    let dn = dist_a(&t.matrix, (p.zeta, &p.w), (q.zeta, &q.w)).unwrap();
    ensure!(dn <= b * (1.0 + 1e-12) + 1e-15, "Newton displacement {dn:e} above beta {b:e}");
    if step.v_dot.norm() <= 1.0 / 3.0 {
        ensure!(dn >= 0.9 * b * (1.0 - 1e-12) - 1e-15, "Newton displacement {dn:e} below 0.9 beta {b:e}");
    }
    let de = dist_a(&t.matrix, (p.zeta, &p.w), (t.eigenvalue, &t.eigenvector)).unwrap();
    ensure!(de <= 2.0 * b + slack, "distance {de:e} above 2 beta {b:e}");
    if b <= 1.0 / 3.0 {
        ensure!(de + slack >= 0.5 * b, "distance {de:e} below beta/2 {b:e}");
    }
    Ok(true)
}

/// With `mu dist <= eps / (4 sqrt3)` and `eps = 0.5`, `mu' / mu` lies in `[1/(1+eps), 1+eps]`.
pub fn lipschitz_window(seed: u64, n: usize, frac: f64) -> Check {
    let eps = 0.5;
    let mut rng = rng_from(seed);
    let t = random_v_triple(&mut rng, n);
    let m = t.mu().unwrap();
    let part = frac * eps / (4.0 * SQRT3 * m) / SQRT3;
    let e = sample_gaussian_matrix(&mut rng, n, n, None, 1.0);
    let a1 = t.matrix.lin_comb(1.0, &e, part / e.frobenius_norm());
    let a1 = a1.scale_real(1.0 / a1.frobenius_norm());
    let l1 = t.eigenvalue + Complex64::from_polar(part, rng.uniform() * std::f64::consts::TAU);
    let (_, v1) = pair_at_distance(&mut rng, 1.0, t.eigenvalue, &t.eigenvector, part);
    let d = triple_distance((&t.matrix, t.eigenvalue, &t.eigenvector), (&a1, l1, &v1)).unwrap();
    if m * d > eps / (4.0 * SQRT3) {
        return Ok(false);
    }
    let m1 = mu(&a1, l1, &v1).unwrap();
    ensure!(m1 <= (1.0 + eps) * m && m1 >= m / (1.0 + eps), "mu moved from {m} to {m1}");
    Ok(true)
}

/// On the certified neighbourhood `dist_A <= c_* / mu`, `Choose_step` returns at least `R / mu^2`.
pub fn choose_step_floor(seed: u64, n: usize, frac: f64) -> Check {
    let ledger = ConstantLedger::default();
    let mut rng = rng_from(seed);
    let t = random_v_triple(&mut rng, n);
    let m = t.mu().unwrap();
    let (zeta, w) = pair_at_distance(&mut rng, 1.0, t.eigenvalue, &t.eigenvector, frac * ledger.c_star / m);
    let zeta = if zeta.norm() > 1.0 { zeta / zeta.norm() } else { zeta };
    let p = ApproxEigenpair::new(zeta, &w).unwrap();
    let e = sample_gaussian_matrix(&mut rng, n, n, None, 1.0);
    let re = frobenius_inner(&t.matrix, &e).unwrap().re;
    let tangent = e.lin_comb(1.0, &t.matrix, -re);
    let tangent = tangent.scale_real(1.0 / tangent.frobenius_norm());
    let choice = choose_step(&t.matrix, &tangent, &p, &ledger).unwrap();
    let mp = mu(&t.matrix, p.zeta, &p.w).unwrap();
    let floor = ledger.step_floor() / (mp * mp);
    ensure!(choice.ds >= floor * (1.0 - 1e-12), "ds {:e} below floor {floor:e}", choice.ds);
    Ok(true)
}
