//! Unit tangent vectors of the hyperbolic plane, represented by frames.
//!
//! A vector `ũ` is stored as the unique isometry `g` with `ũ = g·ũ₀`, where
//! `ũ₀` has basepoint `i` and points to `∞`. The geodesic flow and the
//! horocyclic flow act by right multiplication, isometries by left
//! multiplication, so both commute with the group action at the matrix
//! level.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::hplane::{dist, endpoint_beyond, HPoint};
use crate::moebius::{BoundaryPoint, MoebiusMap};

/// Basepoint separation below which [`d2`] compares directions directly.
const COINCIDENT_BASE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    frame: MoebiusMap,
}

/// Oriented angles used by [`d2`], both in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair {
    pub alpha: f64,
    pub beta: f64,
}

impl AnglePair {
    /// Circular distance between the two angles.
    pub fn gap(&self) -> f64 {
        let raw = (self.alpha - self.beta).abs();
        raw.min(TAU - raw)
    }
}

impl UnitVector {
    /// `ũ₀`: basepoint `i`, forward endpoint `∞`.
    pub fn reference() -> Self {
        UnitVector {
            frame: MoebiusMap::IDENTITY,
        }
    }

    pub fn from_frame(frame: MoebiusMap) -> Self {
        UnitVector { frame }
    }

    /// Vector based at `base` whose geodesic ray converges to `forward`.
    pub fn frame_from(base: HPoint, forward: BoundaryPoint) -> Self {
        let lift = MoebiusMap::translation(base.x()).compose(&MoebiusMap::dilation(base.y()));
        let phi = match forward {
            BoundaryPoint::Infinity => 0.0,
            // In lifted coordinates the forward endpoint is cot φ.
            BoundaryPoint::Real(x) => 1f64.atan2((x - base.x()) / base.y()),
        };
        UnitVector {
            frame: lift.compose(&MoebiusMap::rotation(phi)),
        }
    }

    pub fn frame(&self) -> &MoebiusMap {
        &self.frame
    }

    pub fn basepoint(&self) -> HPoint {
        self.frame.apply_point(HPoint::I)
    }

    pub fn forward(&self) -> BoundaryPoint {
        self.frame.apply_boundary(BoundaryPoint::Infinity)
    }

    pub fn backward(&self) -> BoundaryPoint {
        self.frame.apply_boundary(BoundaryPoint::Real(0.0))
    }

    /// Point at time `t` along the geodesic.
    pub fn eval(&self, t: f64) -> HPoint {
        self.frame.apply_point(HPoint::new_unchecked(0.0, t.exp()))
    }

    pub fn geodesic_flow(&self, t: f64) -> Self {
        UnitVector {
            frame: self.frame.compose(&MoebiusMap::dilation(t.exp())),
        }
    }

    /// Moves the basepoint by signed arc length `s` along the horocycle
    /// centred at the forward endpoint; positive `s` moves `ũ₀` towards `+x`.
    pub fn horocycle_flow(&self, s: f64) -> Self {
        UnitVector {
            frame: self.frame.compose(&MoebiusMap::translation(s)),
        }
    }

    pub fn apply_isometry(&self, g: &MoebiusMap) -> Self {
        UnitVector {
            frame: g.compose(&self.frame),
        }
    }

    /// Rotates the vector about its basepoint by `theta` (counter-clockwise).
    pub fn rotate(&self, theta: f64) -> Self {
        // The rotation K_φ turns tangent vectors at i by -2φ.
        UnitVector {
            frame: self.frame.compose(&MoebiusMap::rotation(-0.5 * theta)),
        }
    }

    /// Euclidean direction of the vector at its basepoint, in `[0, 2π)`.
    pub fn direction_angle(&self) -> f64 {
        // g'(i) = (ci + d)^-2 applied to the upward unit vector.
        let arg = self.frame.c().atan2(self.frame.d());
        (FRAC_PI_2 - 2.0 * arg).rem_euclid(TAU)
    }
}

/// `d(ṽ(0), w̃(0)) + d(ṽ(1), w̃(1))`.
pub fn d1(v: &UnitVector, w: &UnitVector) -> f64 {
    dist(v.eval(0.0), w.eval(0.0)) + dist(v.eval(1.0), w.eval(1.0))
}

/// Angles `α` (between `C` and `ṽ` at `ṽ(0)`) and `β` (between `g_s C` and
/// `w̃` at `w̃(0)`), where `C` is the unit vector at `ṽ(0)` pointing at
/// `w̃(0)` and `s` the distance between basepoints.
///
/// Returns `None` when the basepoints coincide.
pub fn d2_angles(v: &UnitVector, w: &UnitVector) -> Option<(f64, AnglePair)> {
    let (p, q) = (v.basepoint(), w.basepoint());
    let s = dist(p, q);
    if s < COINCIDENT_BASE {
        return None;
    }
    let forward = endpoint_beyond(p, q).ok()?;
    let chord = UnitVector::frame_from(p, forward);
    let moved = chord.geodesic_flow(s);
    let alpha = (v.direction_angle() - chord.direction_angle()).rem_euclid(TAU);
    let beta = (w.direction_angle() - moved.direction_angle()).rem_euclid(TAU);
    Some((s, AnglePair { alpha, beta }))
}

/// Basepoint distance plus the circular gap between the angles of
/// [`d2_angles`]; at coincident basepoints the angle between directions.
pub fn d2(v: &UnitVector, w: &UnitVector) -> f64 {
    match d2_angles(v, w) {
        Some((s, angles)) => s + angles.gap(),
        None => {
            let s = dist(v.basepoint(), w.basepoint());
            let raw = (v.direction_angle() - w.direction_angle()).rem_euclid(TAU);
            s + raw.min(TAU - raw)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pt(x: f64, y: f64) -> HPoint {
        HPoint::new(x, y).unwrap()
    }

    fn close(a: HPoint, b: HPoint, tol: f64) -> bool {
        (a.x() - b.x()).abs() <= tol && (a.y() - b.y()).abs() <= tol
    }

    #[test]
    fn frame_from_examples() {
        let u = UnitVector::frame_from(HPoint::I, BoundaryPoint::Infinity);
        assert_eq!(*u.frame(), MoebiusMap::IDENTITY);

        let u = UnitVector::frame_from(pt(0.0, 2.0), BoundaryPoint::Infinity);
        let r2 = 2f64.sqrt();
        assert!(u
            .frame()
            .approx_eq(&MoebiusMap::new(r2, 0.0, 0.0, 1.0 / r2).unwrap(), 1e-15));

        let u = UnitVector::frame_from(HPoint::I, BoundaryPoint::Real(1.0));
        assert!(close(u.basepoint(), HPoint::I, 1e-15));
        assert!(u.forward().gap(&BoundaryPoint::Real(1.0)) < 1e-15);

        let base = pt(-3.0, 0.25);
        let u = UnitVector::frame_from(base, BoundaryPoint::Real(7.5));
        assert!(close(u.basepoint(), base, 1e-10));
        assert!(u.forward().gap(&BoundaryPoint::Real(7.5)) < 1e-12);
        // Straight down.
        let u = UnitVector::frame_from(base, BoundaryPoint::Real(-3.0));
        assert!(u.forward().gap(&BoundaryPoint::Real(-3.0)) < 1e-12);
        assert!((u.direction_angle() - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn eval_examples() {
        let u0 = UnitVector::reference();
        for t in [-2.0, 0.0, 0.5, 3.0] {
            assert!(close(u0.eval(t), pt(0.0, f64::exp(t)), 1e-14 * f64::exp(t)));
        }
        let u = UnitVector::frame_from(pt(0.4, 1.7), BoundaryPoint::Real(-2.0));
        assert!(close(u.eval(0.0), u.basepoint(), 0.0));
        let (s, t) = (0.3, 2.1);
        assert!((dist(u.eval(s), u.eval(t)) - (t - s)).abs() < 1e-12);
    }

    #[test]
    fn geodesic_flow_examples() {
        let u0 = UnitVector::reference();
        assert!(close(
            u0.geodesic_flow(2f64.ln()).basepoint(),
            pt(0.0, 2.0),
            1e-15
        ));
        let u = UnitVector::frame_from(pt(0.4, 1.7), BoundaryPoint::Real(-2.0));
        let a = u.geodesic_flow(0.7).geodesic_flow(1.1);
        let b = u.geodesic_flow(1.8);
        assert!(a.frame().approx_eq(b.frame(), 1e-14));
        assert_eq!(u.geodesic_flow(0.0), u);
        assert!(u.geodesic_flow(3.0).forward().gap(&u.forward()) < 1e-14);
    }

    #[test]
    fn horocycle_flow_examples() {
        let u0 = UnitVector::reference();
        assert!(close(
            u0.horocycle_flow(0.75).basepoint(),
            pt(0.75, 1.0),
            1e-15
        ));
        let (s, t) = (1.3, 0.8);
        let lhs = u0.horocycle_flow(s).geodesic_flow(t);
        let rhs = u0.geodesic_flow(t).horocycle_flow(s * (-t).exp());
        assert!(lhs.frame().approx_eq(rhs.frame(), 1e-15));
        assert_eq!(u0.horocycle_flow(0.0), u0);
    }

    #[test]
    fn apply_isometry_examples() {
        let u0 = UnitVector::reference();
        let shifted = u0.apply_isometry(&MoebiusMap::translation(1.0));
        assert!(close(shifted.basepoint(), pt(1.0, 1.0), 1e-15));
        assert_eq!(shifted.forward(), BoundaryPoint::Infinity);
        let g = MoebiusMap::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let u = UnitVector::frame_from(pt(0.4, 1.7), BoundaryPoint::Real(-2.0));
        let a = u.geodesic_flow(0.9).apply_isometry(&g);
        let b = u.apply_isometry(&g).geodesic_flow(0.9);
        assert!(a.frame().approx_eq(b.frame(), 1e-14));
        assert_eq!(u.apply_isometry(&MoebiusMap::IDENTITY), u);
    }

    #[test]
    fn d1_examples() {
        let u0 = UnitVector::reference();
        for t in [-1.5, 0.25, 2.0] {
            assert!((d1(&u0, &u0.geodesic_flow(t)) - 2.0 * f64::abs(t)).abs() < 1e-14);
        }
        assert_eq!(d1(&u0, &u0), 0.0);
        for s in [0.01, 0.5, 2.0] {
            let d = d1(&u0, &u0.horocycle_flow(s));
            let e = std::f64::consts::E;
            let direct = dist(HPoint::I, pt(s, 1.0)) + dist(pt(0.0, e), pt(s, e));
            assert!((d - direct).abs() < 1e-15);
            assert!(d <= s * (1.0 + (-1f64).exp()) + 1e-9);
        }
    }

    #[test]
    fn d2_examples() {
        let u0 = UnitVector::reference();
        let u = UnitVector::frame_from(pt(0.4, 1.7), BoundaryPoint::Real(-2.0));
        assert_eq!(d2(&u, &u), 0.0);
        let w = UnitVector::frame_from(pt(0.0, 2.0), BoundaryPoint::Infinity);
        assert!((d2(&u0, &w) - 2f64.ln()).abs() < 1e-14);
        for theta in [0.1, 1.0, 2.5, PI] {
            assert!(
                (d2(&u0, &u0.rotate(theta)) - theta).abs() < 1e-12,
                "theta {theta}"
            );
        }
    }

    #[test]
    fn rotation_changes_direction_angle() {
        let u = UnitVector::frame_from(pt(0.4, 1.7), BoundaryPoint::Real(-2.0));
        let r = u.rotate(0.6);
        assert!(close(r.basepoint(), u.basepoint(), 1e-14));
        let turned = (r.direction_angle() - u.direction_angle()).rem_euclid(TAU);
        assert!((turned - 0.6).abs() < 1e-12);
    }

    #[test]
    fn d2_is_invariant_under_isometries() {
        let g = MoebiusMap::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let v = UnitVector::frame_from(pt(0.4, 1.7), BoundaryPoint::Real(-2.0));
        let w = UnitVector::frame_from(pt(-1.1, 0.6), BoundaryPoint::Real(3.0));
        let before = d2(&v, &w);
        let after = d2(&v.apply_isometry(&g), &w.apply_isometry(&g));
        assert!((before - after).abs() < 1e-9);
        let before = d1(&v, &w);
        let after = d1(&v.apply_isometry(&g), &w.apply_isometry(&g));
        assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn d2_along_common_geodesic_has_no_angle_term() {
        let u = UnitVector::frame_from(pt(0.4, 1.7), BoundaryPoint::Real(-2.0));
        let (s, angles) = d2_angles(&u, &u.geodesic_flow(1.25)).unwrap();
        assert!((s - 1.25).abs() < 1e-12);
        assert!(angles.gap() < 1e-10);
    }
}
