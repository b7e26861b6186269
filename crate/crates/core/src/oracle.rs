//! Reference eigensolver used to check the path-following code.
//!
//! Eigenvalues come from Aberth-Ehrlich iteration on the characteristic
//! polynomial of a Hessenberg form; eigenvectors from inverse iteration. None of
//! this shares code with the Newton or homotopy modules.

use num_complex::Complex64;

use crate::conditioning::EigenTriple;
use crate::error::{EigenError, Result};
use crate::geometry::{dist_a, GreatCircleArc};
use crate::linalg::{ComplexMatrix, ComplexVector, LuDecomposition, ONE, ZERO};

pub const MAX_SWEEPS: usize = 500;
/// Relative eigenvalue gap under which a matrix is reported as near the discriminant variety.
pub const COLLISION_TOL: f64 = 1e-8;
const EPS: f64 = f64::EPSILON;

/// All eigenpairs of a matrix, with the minimal pairwise eigenvalue gap.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub triples: Vec<EigenTriple>,
    pub min_gap: f64,
    pub sigma_near: bool,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.triples.iter().map(|t| t.eigenvalue).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.triples.iter().map(|t| t.residual).fold(0.0, f64::max)
    }
}

pub fn reference_eigenpairs(a: &ComplexMatrix) -> Result<Spectrum> {
    eigenpairs_with_guess(a, None)
}

fn eigenpairs_with_guess(a: &ComplexMatrix, guess: Option<&[Complex64]>) -> Result<Spectrum> {
    if !a.is_square() || a.rows() == 0 {
        return Err(EigenError::Argument("reference eigensolver needs a nonempty square matrix".into()));
    }
    if !a.is_finite() {
        return Err(EigenError::Argument("non-finite matrix".into()));
    }
    let n = a.rows();
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        let triples = (0..n)
            .map(|j| EigenTriple::new(a.clone(), ZERO, &ComplexVector::basis(n, j)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Spectrum {
            triples,
            min_gap: 0.0,
            sigma_near: n > 1,
        });
    }
    let an = a.scale_real(1.0 / scale);
    let h = hessenberg(&an);
    let coeffs = charpoly(&h);
    let start: Option<Vec<Complex64>> = guess.map(|g| g.iter().map(|z| z / scale).collect());
    let roots = aberth(&coeffs, start.as_deref())?;

    let mut triples = Vec::with_capacity(n);
    for &z in &roots {
        let (lambda, v) = polish(&an, z);
        triples.push(EigenTriple::new(a.clone(), lambda * scale, &v)?);
    }
    let mut min_gap = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            min_gap = min_gap.min((triples[i].eigenvalue - triples[j].eigenvalue).norm());
        }
    }
    let sigma_near = min_gap < COLLISION_TOL * scale;
    Ok(Spectrum {
        triples,
        min_gap,
        sigma_near,
    })
}

/// Unitary reduction to upper Hessenberg form.
fn hessenberg(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let norm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let mut v = x.clone();
        v[0] += phase * norm;
        let tau = 2.0 / v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        // Left: rows k+1.., all columns.
        for c in 0..n {
            let d: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, c)]).sum();
            let f = d * tau;
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, c)] -= vi * f;
            }
        }
        // Right: columns k+1.., all rows.
        for r in 0..n {
            let d: Complex64 = v.iter().enumerate().map(|(i, vi)| h[(r, k + 1 + i)] * vi).sum();
            let f = d * tau;
            for (i, vi) in v.iter().enumerate() {
                h[(r, k + 1 + i)] -= f * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

/// Coefficients (ascending powers, monic) of `det(z Id - H)` for upper Hessenberg `H`.
fn charpoly(h: &ComplexMatrix) -> Vec<Complex64> {
    let n = h.rows();
    // p[k] has degree k.
    let mut p: Vec<Vec<Complex64>> = vec![vec![ONE]];
    for k in 1..=n {
        let hk = h[(k - 1, k - 1)];
        let prev = &p[k - 1];
        let mut next = vec![ZERO; k + 1];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= hk * c;
        }
        let mut prod = ONE;
        for i in (1..k).rev() {
            // prod = h_{i+1,i} ... h_{k,k-1} (1-based)
            prod *= h[(i, i - 1)];
            let coef = h[(i - 1, k - 1)] * prod;
            if coef == ZERO {
                continue;
            }
            for (d, &c) in p[i - 1].iter().enumerate() {
                next[d] -= coef * c;
            }
        }
        p.push(next);
    }
    p.pop().unwrap()
}

/// Value, derivative and a running rounding-error bound of a polynomial at `z`.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    let mut bound = 0.0;
    let az = z.norm();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        bound = bound * az + c.norm();
    }
    (p, dp, bound)
}

fn aberth(coeffs: &[Complex64], start: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    if n == 1 {
        return Ok(vec![-coeffs[0]]);
    }
    let mut z: Vec<Complex64> = match start {
        Some(s) if s.len() == n => {
            // Separate coincident guesses; Aberth needs distinct starting points.
            let mut g = s.to_vec();
            for i in 0..n {
                for j in 0..i {
                    if (g[i] - g[j]).norm() < 1e-10 {
                        g[i] += Complex64::from_polar(1e-8, 0.7 + i as f64);
                    }
                }
            }
            g
        }
        _ => (0..n)
            .map(|k| Complex64::from_polar(0.5, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
            .collect(),
    };
    let mut done = vec![false; n];
    for _ in 0..MAX_SWEEPS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp, bound) = horner(coeffs, z[i]);
            if p.norm() <= 4.0 * n as f64 * EPS * bound {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut s = ZERO;
            for j in 0..n {
                if j != i {
                    s += ONE / (z[i] - z[j]);
                }
            }
            let w = ratio / (ONE - ratio * s);
            if !(w.re.is_finite() && w.im.is_finite()) {
                z[i] += Complex64::from_polar(1e-6, i as f64);
                continue;
            }
            z[i] -= w;
            if w.norm() <= 2.0 * EPS * z[i].norm() + EPS {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    Err(EigenError::OracleFailure(format!("Aberth iteration did not converge in {MAX_SWEEPS} sweeps")))
}

/// Inverse iteration for an eigenvector, then the better of the root and the
/// Rayleigh quotient as eigenvalue.
fn polish(a: &ComplexMatrix, z: Complex64) -> (Complex64, ComplexVector) {
    let n = a.rows();
    let mut shift = z;
    let mut lu = LuDecomposition::new(&a.shift(shift));
    let mut bump = 0;
    while lu.is_singular() && bump < 8 {
        shift += Complex64::new(EPS * 4f64.powi(bump), EPS * 4f64.powi(bump));
        lu = LuDecomposition::new(&a.shift(shift));
        bump += 1;
    }
    let mut x: Vec<Complex64> = (0..n).map(|k| Complex64::new(1.0 + 0.1 * k as f64, 0.3 - 0.05 * k as f64)).collect();
    for _ in 0..2 {
        let y = lu.solve(&x).unwrap_or_else(|| x.clone());
        let nrm = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        x = if nrm > 0.0 && nrm.is_finite() { y.iter().map(|c| c / nrm).collect() } else { x };
    }
    let v = ComplexVector::from(x);
    let rq = v.inner(&a.matvec(&v)).conj();
    let res = |l: Complex64| crate::conditioning::residual(a, l, &v);
    let lambda = if res(rq) < res(z) { rq } else { z };
    (lambda, v)
}

/// Follows one eigenpair along a great-circle arc by nearest-neighbour matching
/// of oracle eigenpairs at `samples` equispaced parameters `s_k = alpha k / (samples - 1)`.
pub fn continue_path(arc: &GreatCircleArc, start: &EigenTriple, samples: usize) -> Result<Vec<EigenTriple>> {
    follow(arc, start, 0.0, arc.alpha(), samples)
}

/// As `continue_path`, over `[s0, s1]` (which may extend past the arc's end).
/// `start.matrix` must be a positive multiple of the arc point at `s0`.
pub fn follow(arc: &GreatCircleArc, start: &EigenTriple, s0: f64, s1: f64, samples: usize) -> Result<Vec<EigenTriple>> {
    if samples < 2 {
        return Err(EigenError::Argument("path continuation needs at least two samples".into()));
    }
    let b0 = arc.point_at(s0);
    let scale0 = start.matrix.frobenius_norm();
    if scale0 == 0.0 || start.matrix.scale_real(1.0 / scale0).max_abs_diff(&b0) > 1e-10 {
        return Err(EigenError::Argument("start triple does not lie over the arc point".into()));
    }
    let mut prev = EigenTriple::new(b0.clone(), start.eigenvalue / scale0, &start.eigenvector)?;
    let mut spectrum_guess = reference_eigenpairs(&b0)?.eigenvalues();
    let mut out = Vec::with_capacity(samples);
    out.push(prev.clone());
    let at = |k: usize| s0 + (s1 - s0) * k as f64 / (samples - 1) as f64;
    for k in 1..samples {
        let s = at(k);
        let b = arc.point_at(s);
        let spec = eigenpairs_with_guess(&b, Some(&spectrum_guess))?;
        let mut ranked: Vec<(f64, usize)> = spec
            .triples
            .iter()
            .enumerate()
            .map(|(i, t)| Ok((dist_a(&b, (prev.eigenvalue, &prev.eigenvector), (t.eigenvalue, &t.eigenvector))?, i)))
            .collect::<Result<Vec<_>>>()?;
        ranked.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (best, idx) = ranked[0];
        let chosen = &spec.triples[idx];
        let gap = spec
            .triples
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, t)| (t.eigenvalue - chosen.eigenvalue).norm())
            .fold(f64::INFINITY, f64::min);
        let ambiguous = ranked.len() > 1 && best >= 0.5 * ranked[1].0;
        if gap < 10.0 * COLLISION_TOL || ambiguous {
            return Err(EigenError::SigmaCrossing { s_lo: at(k - 1), s_hi: s });
        }
        // Keep the phase of the representative continuous.
        let ip = prev.eigenvector.inner(&chosen.eigenvector);
        let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { ONE };
        let v = chosen.eigenvector.scale(phase);
        spectrum_guess = spec.eigenvalues();
        prev = EigenTriple::new(b, chosen.eigenvalue, &v)?;
        out.push(prev.clone());
    }
    Ok(out)
}
