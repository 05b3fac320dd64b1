//! Winding a geodesic ray around the axis of a hyperbolic isometry.

use crate::error::{Error, Result};
use crate::hplane::{busemann, cross_time, dist, dist_to_geodesic, Geodesic, HPoint};
use crate::moebius::{AxisData, IsometryClass, MoebiusMap};
use crate::tangent::{d1, UnitVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingResult {
    /// `Wind_γ(ũ)`: same basepoint, forward endpoint `γ(ũ(+∞))`.
    pub vector: UnitVector,
    /// Winding time `B_{ũ(+∞)}(γ⁻¹ũ(0), ũ(0))`.
    pub tau: f64,
    /// Time at which `ũ` crosses the axis.
    pub t_cross: f64,
    /// Time at which the wound vector crosses the axis.
    pub t_cross_wound: f64,
}

/// Worst values of `measured − bound` for the intermediate estimates of the
/// `8ℓ` bound. Entries stay at `-∞` when no grid point falls in their range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseSlacks {
    /// `d(ṽ(t), ũ(t)) − 2ℓ` for `t ≤ t_γ`.
    pub case1: f64,
    /// `d(ṽ(t), γũ(t)) − 2ℓ` for `t ≥ t_γ`.
    pub case2: f64,
    /// `d₁(g_t ṽ, g_t ũ) − 4ℓ` for `t ≤ t_γ − 1`.
    pub scenario_a: f64,
    /// `d₁(g_t ṽ, γ g_t ũ) − 4ℓ` for `t ≥ t_γ`.
    pub scenario_b: f64,
    /// `d₁(g_t ṽ, g_t ũ) − 6ℓ` for `t_γ − 1 < t < t_γ`.
    pub scenario_c: f64,
    /// Largest of the two distances from `ṽ(t'_γ)` to `ũ(t_γ)` and
    /// `γũ(t_γ)`, minus `ℓ`.
    pub sandwich: f64,
    /// `|t_γ − t'_γ| − ℓ`.
    pub crossing_gap: f64,
    /// Largest decrease of `d(ṽ(t), ũ(t))` between grid points up to `t_γ`.
    pub case1_monotone: f64,
    /// Largest increase of `d(γ⁻¹ṽ(t), ũ(t))` between grid points from `t_γ`.
    pub case2_monotone: f64,
    /// Relative mismatch between the closed form for `sinh²(d/2)` in the
    /// second case and the directly computed distance.
    ///
    /// This and `case2_monotone` discount the rounding drift of the computed
    /// `γ⁻¹ṽ`: its frame in the coordinates of `ũ` fixes `∞` up to a lower
    /// left entry of a few ulps, which moves the point at height `e^t`
    /// sideways by about `ε·e^{2t}`. The drift is measured against the same
    /// frame with that entry removed.
    pub case2_formula: f64,
}

impl CaseSlacks {
    fn empty() -> Self {
        let n = f64::NEG_INFINITY;
        CaseSlacks {
            case1: n,
            case2: n,
            scenario_a: n,
            scenario_b: n,
            scenario_c: n,
            sandwich: n,
            crossing_gap: n,
            case1_monotone: n,
            case2_monotone: n,
            case2_formula: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyBoundReport {
    pub grid: Vec<f64>,
    /// Per grid time, the smaller of the two `d₁` values.
    pub min_d1: Vec<f64>,
    /// `max_t (min_d1 − 8ℓ)`.
    pub worst_slack: f64,
    pub case_slacks: CaseSlacks,
    pub length: f64,
    pub winding: WindingResult,
    /// The bounded quantities are 2-Lipschitz in `t`, so between grid points
    /// they can exceed the sampled maximum by at most this much.
    pub lipschitz_slack: f64,
}

impl KeyBoundReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.worst_slack <= tol
    }
}

fn hyperbolic_axis(g: &MoebiusMap) -> Result<(AxisData, Geodesic)> {
    if g.classify() != IsometryClass::Hyperbolic {
        return Err(Error::NotHyperbolic {
            trace: g.trace().abs(),
        });
    }
    let axis = g.axis_data()?;
    let geo = Geodesic::new(axis.minus, axis.plus)?;
    Ok((axis, geo))
}

pub fn wind(g: &MoebiusMap, u: &UnitVector) -> Result<WindingResult> {
    let (_, geo) = hyperbolic_axis(g)?;
    let t_cross = cross_time(u, &geo, false).ok_or(Error::RayMissesAxis)?;
    let base = u.basepoint();
    let vector = UnitVector::frame_from(base, g.apply_boundary(u.forward()));
    let tau = busemann(u.forward(), g.inverse().apply_point(base), base);
    // The wound ray starts on the same side as `ũ` and ends beyond the axis,
    // so it crosses; allow a rounding-level negative time.
    let t_cross_wound = match cross_time(&vector, &geo, true) {
        Some(t) if t >= -1e-9 => t.max(0.0),
        _ => return Err(Error::RayMissesAxis),
    };
    Ok(WindingResult {
        vector,
        tau,
        t_cross,
        t_cross_wound,
    })
}

pub fn winding_time(g: &MoebiusMap, u: &UnitVector) -> Result<f64> {
    let (_, geo) = hyperbolic_axis(g)?;
    cross_time(u, &geo, false).ok_or(Error::RayMissesAxis)?;
    let base = u.basepoint();
    Ok(busemann(u.forward(), g.inverse().apply_point(base), base))
}

/// Defect of `g_τ(Wind_γ(ũ))` lying on the horocycle of `γũ`.
pub fn horocycle_alignment_check(g: &MoebiusMap, u: &UnitVector) -> Result<f64> {
    let w = wind(g, u)?;
    let flowed = w.vector.geodesic_flow(w.tau);
    let image = u.apply_isometry(g);
    let xi = image.forward();
    let level = busemann(xi, flowed.basepoint(), image.basepoint());
    Ok(level.abs() + flowed.forward().gap(&xi))
}

/// Relative error in `sinh(d(z,γz)/2) = cosh(d(z, axis))·sinh(ℓ/2)`.
pub fn displacement_defect(g: &MoebiusMap, z: HPoint) -> Result<f64> {
    let (axis, geo) = hyperbolic_axis(g)?;
    let gz = g.apply_point(z);
    let lhs = (gz.x() - z.x()).hypot(gz.y() - z.y()) / (2.0 * (z.y() * gz.y()).sqrt());
    let rhs = dist_to_geodesic(z, &geo).cosh() * (0.5 * axis.length).sinh();
    Ok((lhs - rhs).abs() / rhs)
}

fn grid(t_max: f64, step: f64) -> Vec<f64> {
    let n = (t_max / step + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

pub fn key_bound_report(
    g: &MoebiusMap,
    u: &UnitVector,
    t_max: f64,
    step: f64,
) -> Result<KeyBoundReport> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::SpecInvalid(format!(
            "grid step {step} outside (0, 1]"
        )));
    }
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::SpecInvalid(format!(
            "t_max {t_max} must be finite and ≥ 0"
        )));
    }
    let (axis, _) = hyperbolic_axis(g)?;
    let ell = axis.length;
    let w = wind(g, u)?;
    let v = w.vector;
    let gu = u.apply_isometry(g);
    let g_inv = g.inverse();
    let t_g = w.t_cross;

    let times = grid(t_max, step);
    let mut min_d1 = Vec::with_capacity(times.len());
    let mut worst = f64::NEG_INFINITY;
    let mut cs = CaseSlacks::empty();

    // sinh²(d(γ⁻¹ṽ(t), ũ(t))/2) in the frame of ũ: γ⁻¹ṽ is vertical above
    // a + i·e^{−τ}.
    let pulled = u
        .frame()
        .inverse()
        .apply_point(g_inv.apply_point(u.basepoint()));
    let a = pulled.x();
    let e_tau = w.tau.exp();
    let case2_closed = |t: f64| {
        0.25 * a * a * e_tau * (-2.0 * t).exp() + 0.25 * (1.0 / e_tau - 1.0).powi(2) * e_tau
    };

    let pull = u.frame().inverse().compose(&g_inv).compose(v.frame());
    let upright = {
        let [p, q, _, r] = pull.entries();
        let k = (p * r).sqrt();
        MoebiusMap::new(p / k, q / k, 0.0, r / k)?
    };
    let mut prev1: Option<f64> = None;
    let mut prev2: Option<(f64, f64)> = None;
    for &t in &times {
        let shifted = v.geodesic_flow(t + w.tau);
        let ut = u.geodesic_flow(t);
        let gut = gu.geodesic_flow(t);
        let m = d1(&shifted, &ut).min(d1(&shifted, &gut));
        worst = worst.max(m - 8.0 * ell);
        min_d1.push(m);

        let vt = v.geodesic_flow(t);
        let near_u = dist(v.eval(t), u.eval(t));
        let near_gu = dist(v.eval(t), gu.eval(t));
        if t <= t_g {
            cs.case1 = cs.case1.max(near_u - 2.0 * ell);
            if let Some(p) = prev1 {
                cs.case1_monotone = cs.case1_monotone.max(p - near_u);
            }
            prev1 = Some(near_u);
        }
        if t >= t_g {
            cs.case2 = cs.case2.max(near_gu - 2.0 * ell);
            // In the frame of ũ, so no point of height e^t passes through γ⁻¹.
            let ut0 = HPoint::new_unchecked(0.0, t.exp());
            let back = dist(pull.apply_point(ut0), ut0);
            let drift = dist(pull.apply_point(ut0), upright.apply_point(ut0));
            if let Some((p, dp)) = prev2 {
                cs.case2_monotone = cs.case2_monotone.max(back - p - drift - dp);
            }
            prev2 = Some((back, drift));
            let direct = (0.5 * back).sinh().powi(2);
            let closed = case2_closed(t);
            let scale = direct.abs().max(closed.abs()).max(f64::MIN_POSITIVE);
            let roundoff = 0.5 * (back + drift).sinh() * drift;
            let excess = ((direct - closed).abs() - roundoff).max(0.0);
            cs.case2_formula = cs.case2_formula.max(excess / scale);
            cs.scenario_b = cs.scenario_b.max(d1(&vt, &gut) - 4.0 * ell);
        }
        if t <= t_g - 1.0 {
            cs.scenario_a = cs.scenario_a.max(d1(&vt, &ut) - 4.0 * ell);
        } else if t < t_g {
            cs.scenario_c = cs.scenario_c.max(d1(&vt, &ut) - 6.0 * ell);
        }
    }

    let crossing = v.eval(w.t_cross_wound);
    cs.sandwich = (dist(crossing, u.eval(t_g)) - ell).max(dist(crossing, gu.eval(t_g)) - ell);
    cs.crossing_gap = (t_g - w.t_cross_wound).abs() - ell;

    Ok(KeyBoundReport {
        grid: times,
        min_d1,
        worst_slack: worst,
        case_slacks: cs,
        length: ell,
        winding: w,
        lipschitz_slack: step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::BoundaryPoint;

    fn symmetric(a: f64, ell: f64) -> MoebiusMap {
        MoebiusMap::hyperbolic_from_axis(BoundaryPoint::Real(-a), BoundaryPoint::Real(a), ell)
            .unwrap()
    }

    #[test]
    fn wind_example() {
        let g = symmetric(1.0, 4f64.ln());
        let w = wind(&g, &UnitVector::reference()).unwrap();
        assert!(w.vector.forward().gap(&BoundaryPoint::Real(5.0 / 3.0)) < 1e-14);
        assert!((w.tau - 2.125f64.ln()).abs() < 1e-14);
        assert!((w.tau - 0.753772).abs() < 1e-6);
        assert!(w.t_cross.abs() < 1e-14);
        assert!((w.t_cross - w.t_cross_wound).abs() <= 4f64.ln() + 1e-9);
    }

    #[test]
    fn short_generator_has_small_tau() {
        let g = symmetric(1.0, 1e-4);
        let tau = winding_time(&g, &UnitVector::reference()).unwrap();
        assert!(tau.abs() < 1e-4 && tau.abs() > 0.0);
    }

    #[test]
    fn misses_axis() {
        let g = MoebiusMap::hyperbolic_from_axis(
            BoundaryPoint::Real(1.0),
            BoundaryPoint::Real(4.0),
            1.0,
        )
        .unwrap();
        assert_eq!(
            wind(&g, &UnitVector::reference()),
            Err(Error::RayMissesAxis)
        );
        assert_eq!(
            winding_time(&g, &UnitVector::reference()),
            Err(Error::RayMissesAxis)
        );
    }

    #[test]
    fn not_hyperbolic() {
        let g = MoebiusMap::translation(1.0);
        assert!(matches!(
            wind(&g, &UnitVector::reference()),
            Err(Error::NotHyperbolic { .. })
        ));
    }

    #[test]
    fn symmetric_closed_form() {
        for (a, ell) in [(1.0, 0.3), (2.5, 1.7), (1.2, 0.05), (30.0, 1e-3)] {
            let g = symmetric(a, ell);
            let tau = winding_time(&g, &UnitVector::reference()).unwrap();
            let h = 0.5 * ell;
            let expected = (h.cosh().powi(2) + h.sinh().powi(2) / (a * a)).ln();
            assert!((tau - expected).abs() < 1e-13, "a {a} ell {ell}");
            assert!(tau.abs() <= ell + 1e-9);
        }
    }

    #[test]
    fn alignment_examples() {
        let u0 = UnitVector::reference();
        let e = std::f64::consts::E;
        for g in [
            symmetric(1.0, 4f64.ln()),
            symmetric(e, 0.125),
            symmetric(1.0, 1e-4),
        ] {
            assert!(horocycle_alignment_check(&g, &u0).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn key_bound_example() {
        let g = symmetric(1.0, 4f64.ln());
        let r = key_bound_report(&g, &UnitVector::reference(), 20.0, 0.25).unwrap();
        assert_eq!(r.grid.len(), 81);
        assert!(r.worst_slack <= 0.0);
        let cs = r.case_slacks;
        for s in [
            cs.case1,
            cs.case2,
            cs.scenario_a,
            cs.scenario_b,
            cs.scenario_c,
        ] {
            assert!(s <= 1e-9);
        }
        assert!(cs.sandwich <= 1e-9 && cs.crossing_gap <= 1e-9);
        assert!(cs.case2_monotone <= 1e-12);
        assert!(cs.case2_formula < 1e-9);
    }

    #[test]
    fn key_bound_single_point_grid() {
        let g = symmetric(1.0, 0.5);
        let r = key_bound_report(&g, &UnitVector::reference(), 0.0, 0.25).unwrap();
        assert_eq!(r.min_d1.len(), 1);
        assert!(r.passes(1e-8));
    }

    #[test]
    fn key_bound_rejects_bad_step() {
        let g = symmetric(1.0, 0.5);
        assert!(key_bound_report(&g, &UnitVector::reference(), 5.0, 0.0).is_err());
        assert!(key_bound_report(&g, &UnitVector::reference(), 5.0, 2.0).is_err());
    }

    #[test]
    fn displacement_identity_example() {
        let g = symmetric(1.0, 0.7);
        for z in [
            HPoint::I,
            HPoint::new(3.0, 0.2).unwrap(),
            HPoint::new(-0.4, 5.0).unwrap(),
        ] {
            assert!(displacement_defect(&g, z).unwrap() < 1e-12);
        }
    }
}
