//! Distances on projective space and on the product space, and great-circle
//! arcs on the unit sphere of `C^{n x n}` viewed as a real vector space.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{EigenError, Result};
use crate::linalg::{frobenius_inner, ComplexMatrix, ComplexVector};

/// A point of `P(C^n)`, stored as a unit representative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint(ComplexVector);

impl ProjectivePoint {
    pub fn new(v: &ComplexVector) -> Result<Self> {
        v.normalized()
            .filter(|u| u.is_finite())
            .map(Self)
            .ok_or_else(|| EigenError::Argument("projective point needs a nonzero finite vector".into()))
    }

    pub fn representative(&self) -> &ComplexVector {
        &self.0
    }

    pub fn into_vector(self) -> ComplexVector {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        // atan2 of the sine and cosine parts keeps full accuracy near 0 and pi/2.
        let (v, w) = (&self.0, &other.0);
        let c: Complex64 = v.iter().zip(w.iter()).map(|(x, y)| x.conj() * y).sum();
        let sin: f64 = v
            .iter()
            .zip(w.iter())
            .map(|(x, y)| (y - c * x).norm_sqr())
            .sum::<f64>()
            .sqrt();
        sin.atan2(c.norm())
    }
}

fn clamped_acos(x: f64) -> f64 {
    x.clamp(-1.0, 1.0).acos()
}

/// `d_P(v, w) = arccos(|<v, w>| / (|v| |w|))`, in `[0, pi/2]`.
pub fn proj_distance(v: &ComplexVector, w: &ComplexVector) -> Result<f64> {
    if v.dim() != w.dim() {
        return Err(EigenError::shape("proj_distance", (v.dim(), 1), (w.dim(), 1)));
    }
    Ok(ProjectivePoint::new(v)?.distance(&ProjectivePoint::new(w)?))
}

/// Distance on `C^{n x n} x C x P(C^n)`.
pub fn triple_distance(
    p: (&ComplexMatrix, Complex64, &ComplexVector),
    q: (&ComplexMatrix, Complex64, &ComplexVector),
) -> Result<f64> {
    if p.0.shape() != q.0.shape() {
        return Err(EigenError::shape("triple_distance", p.0.shape(), q.0.shape()));
    }
    let dm = (p.0 - q.0).frobenius_norm_sqr();
    let dl = (p.1 - q.1).norm_sqr();
    let dv = proj_distance(p.2, q.2)?;
    Ok((dm + dl + dv * dv).sqrt())
}

/// `dist_A((l, v), (l', v'))^2 = |l - l'|^2 / |A|_F^2 + d_P(v, v')^2`.
pub fn dist_a(a: &ComplexMatrix, p: (Complex64, &ComplexVector), q: (Complex64, &ComplexVector)) -> Result<f64> {
    let na = a.frobenius_norm();
    if na == 0.0 {
        return Err(EigenError::Argument("dist_A needs a nonzero matrix".into()));
    }
    let dl = (p.0 - q.0).norm() / na;
    let dv = proj_distance(p.1, q.1)?;
    Ok((dl * dl + dv * dv).sqrt())
}

/// Arc-length parametrized portion of a great circle on the unit sphere `S`.
#[derive(Clone, Debug)]
pub struct GreatCircleArc {
    start: ComplexMatrix,
    direction: ComplexMatrix,
    alpha: f64,
}

/// Tolerance under which the endpoints are treated as real-linearly dependent.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// The arc from `A0 / |A0|_F` to `A1 / |A1|_F`.
pub fn great_circle(a0: &ComplexMatrix, a1: &ComplexMatrix) -> Result<GreatCircleArc> {
    if a0.shape() != a1.shape() {
        return Err(EigenError::shape("great_circle", a0.shape(), a1.shape()));
    }
    let n0 = a0.frobenius_norm();
    let n1 = a1.frobenius_norm();
    if !(n0 > 0.0 && n1 > 0.0 && n0.is_finite() && n1.is_finite()) {
        return Err(EigenError::Argument("great_circle endpoints must be nonzero and finite".into()));
    }
    let s0 = a0.scale_real(1.0 / n0);
    let s1 = a1.scale_real(1.0 / n1);
    let c = frobenius_inner(&s1, &s0)?.re;
    let alpha = clamped_acos(c);
    let sin = alpha.sin();
    if sin <= DEGENERACY_TOL || alpha >= std::f64::consts::PI - DEGENERACY_TOL {
        return Err(EigenError::DegenerateArc { angle: alpha });
    }
    let direction = s1.lin_comb(1.0 / sin, &s0, -c / sin);
    Ok(GreatCircleArc {
        start: s0,
        direction,
        alpha,
    })
}

impl GreatCircleArc {
    pub fn start(&self) -> &ComplexMatrix {
        &self.start
    }

    pub fn direction(&self) -> &ComplexMatrix {
        &self.direction
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.start.rows()
    }

    /// `B_s = start cos s + direction sin s`.
    pub fn point_at(&self, s: f64) -> ComplexMatrix {
        self.start.lin_comb(s.cos(), &self.direction, s.sin())
    }

    /// `dB_s/ds = -start sin s + direction cos s`.
    pub fn tangent_at(&self, s: f64) -> ComplexMatrix {
        self.start.lin_comb(-s.sin(), &self.direction, s.cos())
    }

    pub fn end(&self) -> ComplexMatrix {
        self.point_at(self.alpha)
    }

    /// Parameter of the point of the full circle closest to `b / |b|_F`, and the
    /// Frobenius distance from `b / |b|_F` to that point.
    pub fn project(&self, b: &ComplexMatrix) -> Result<(f64, f64)> {
        let nb = b.frobenius_norm();
        if nb == 0.0 {
            return Err(EigenError::Argument("cannot project the zero matrix".into()));
        }
        let bn = b.scale_real(1.0 / nb);
        let x = frobenius_inner(&bn, &self.start)?.re;
        let y = frobenius_inner(&bn, &self.direction)?.re;
        let s = y.atan2(x);
        Ok((s, (&bn - &self.point_at(s)).frobenius_norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::sample_gaussian_matrix;
    use crate::rng::RngStream;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn e(n: usize, i: usize) -> ComplexVector {
        ComplexVector::basis(n, i)
    }

    #[test]
    fn projective_examples() {
        assert!(proj_distance(&e(2, 0), &e(2, 0).scale(Complex64::new(3.0, 0.0))).unwrap().abs() < 1e-15);
        assert!((proj_distance(&e(2, 0), &e(2, 1)).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let d = ComplexVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert!((proj_distance(&e(2, 0), &d).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(proj_distance(&e(2, 0), &ComplexVector::zeros(2)).is_err());
    }

    #[test]
    fn triple_examples() {
        let a = ComplexMatrix::identity(2);
        let l = Complex64::new(0.5, 0.0);
        let v = e(2, 0);
        assert_eq!(triple_distance((&a, l, &v), (&a, l, &v)).unwrap(), 0.0);
        let l1 = l + 1.0;
        assert!((triple_distance((&a, l, &v), (&a, l1, &v)).unwrap() - 1.0).abs() < 1e-15);
        let a1 = &a + &ComplexMatrix::unit(2, 0, 0);
        assert!((triple_distance((&a, l, &v), (&a1, l, &v)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dist_a_examples() {
        let a = ComplexMatrix::real_diagonal(&[2.0, 0.0]);
        let l = Complex64::new(1.0, 1.0);
        assert_eq!(dist_a(&a, (l, &e(2, 0)), (l, &e(2, 0))).unwrap(), 0.0);
        assert!((dist_a(&a, (l, &e(2, 0)), (l + 2.0, &e(2, 0))).unwrap() - 1.0).abs() < 1e-15);
        let a1 = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        assert!((dist_a(&a1, (l, &e(2, 0)), (l, &e(2, 1))).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(dist_a(&ComplexMatrix::zeros(2, 2), (l, &e(2, 0)), (l, &e(2, 0))).is_err());
    }

    #[test]
    fn arc_example() {
        let a0 = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        let a1 = ComplexMatrix::real_diagonal(&[2.0, 1.0]);
        let arc = great_circle(&a0, &a1).unwrap();
        assert!((arc.alpha() - (2.0 / 5f64.sqrt()).acos()).abs() < 1e-15);
        assert!((arc.alpha() - 0.46365).abs() < 1e-5);
        assert!(arc.direction().max_abs_diff(&ComplexMatrix::real_diagonal(&[0.0, 1.0])) < 1e-15);
        assert!(arc.end().max_abs_diff(&a1.scale_real(1.0 / 5f64.sqrt())) < 1e-15);
    }

    #[test]
    fn arc_points_on_sphere() {
        let mut rng = RngStream::new(3, 0);
        let a0 = sample_gaussian_matrix(&mut rng, 3, 3, None, 1.0);
        let a1 = sample_gaussian_matrix(&mut rng, 3, 3, None, 1.0);
        let arc = great_circle(&a0, &a1).unwrap();
        for k in 0..100 {
            let s = arc.alpha() * k as f64 / 99.0;
            let p = arc.point_at(s);
            let t = arc.tangent_at(s);
            assert!((p.frobenius_norm() - 1.0).abs() < 1e-12);
            assert!((t.frobenius_norm() - 1.0).abs() < 1e-12);
            assert!(frobenius_inner(&p, &t).unwrap().re.abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_arcs() {
        let a = ComplexMatrix::real_diagonal(&[1.0, 0.0]);
        assert!(matches!(great_circle(&a, &a.scale_real(3.0)), Err(EigenError::DegenerateArc { .. })));
        assert!(matches!(great_circle(&a, &a.scale_real(-2.0)), Err(EigenError::DegenerateArc { .. })));
        // A complex multiple is not real-linearly dependent.
        assert!(great_circle(&a, &a.scale(Complex64::new(0.0, 1.0))).is_ok());
    }
}
