use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use hypwind::hplane::{busemann, cross_time, dist};
use hypwind::schottky::{build_nested, certify_schottky, validate_nested, NestedSpec};
use hypwind::tangent::{d1, d2};
use hypwind::walpha::{quotient_d1_upper, run_alpha};
use hypwind::winding::{wind, winding_time};
use hypwind::{BoundaryPoint, Geodesic, HPoint, MoebiusMap, UnitVector};

fn point() -> impl Strategy<Value = HPoint> {
    (-3.0..3.0f64, -2.5..2.5f64).prop_map(|(x, h)| HPoint::new(x, h.exp()).unwrap())
}

fn boundary() -> impl Strategy<Value = BoundaryPoint> {
    prop_oneof![
        1 => Just(BoundaryPoint::Infinity),
        9 => (-5.0..5.0f64).prop_map(BoundaryPoint::Real),
    ]
}

fn vector() -> impl Strategy<Value = UnitVector> {
    (point(), 0.0..TAU).prop_map(|(p, th)| {
        UnitVector::from_frame(MoebiusMap::translation(p.x()).compose(&MoebiusMap::dilation(p.y())))
            .rotate(th)
    })
}

fn isometry() -> impl Strategy<Value = MoebiusMap> {
    vector().prop_map(|v| *v.frame())
}

/// A vector and a hyperbolic map whose axis its forward ray crosses at `t`.
fn crossing() -> impl Strategy<Value = (UnitVector, MoebiusMap, f64)> {
    (
        vector(),
        0.0..4.0f64,
        -2.0..2.0f64,
        -9.0..0.7f64,
        any::<bool>(),
    )
        .prop_map(|(u, t, sigma, log_len, flip)| {
            let (l, r) = (-(t + sigma).exp(), (t - sigma).exp());
            let (m, p) = if flip { (r, l) } else { (l, r) };
            let f = u.frame();
            let g = MoebiusMap::hyperbolic_from_axis(
                f.apply_boundary(BoundaryPoint::Real(m)),
                f.apply_boundary(BoundaryPoint::Real(p)),
                log_len.exp(),
            )
            .unwrap();
            (u, g, t)
        })
}

fn close(z: HPoint, w: HPoint, tol: f64) -> bool {
    dist(z, w) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inverse_and_composition(g in isometry(), h in isometry(), z in point()) {
        prop_assert!(g.compose(&g.inverse()).approx_eq(&MoebiusMap::IDENTITY, 1e-10));
        let lhs = g.compose(&h).apply_point(z);
        let rhs = g.apply_point(h.apply_point(z));
        prop_assert!(close(lhs, rhs, 1e-9));
    }

    #[test]
    fn distance_is_invariant(g in isometry(), z in point(), w in point()) {
        let d = dist(z, w);
        prop_assert!((dist(g.apply_point(z), g.apply_point(w)) - d).abs() <= 1e-9 * d.max(1.0));
    }

    #[test]
    fn busemann_cocycle_and_equivariance(xi in boundary(), x in point(), y in point(), z in point(), g in isometry()) {
        let sum = busemann(xi, x, y) + busemann(xi, y, z);
        prop_assert!((busemann(xi, x, z) - sum).abs() <= 1e-10);
        let moved = busemann(g.apply_boundary(xi), g.apply_point(x), g.apply_point(y));
        prop_assert!((moved - busemann(xi, x, y)).abs() <= 1e-8);
        prop_assert!(busemann(xi, x, y).abs() <= dist(x, y) + 1e-10);
    }

    #[test]
    fn axis_round_trip(m in boundary(), p in boundary(), log_len in -6.0..1.5f64) {
        prop_assume!(m.gap(&p) > 0.05);
        let ell = log_len.exp();
        let g = MoebiusMap::hyperbolic_from_axis(m, p, ell).unwrap();
        let a = g.axis_data().unwrap();
        prop_assert!(a.minus.gap(&m) < 1e-6 && a.plus.gap(&p) < 1e-6);
        prop_assert!((a.length - ell).abs() <= 1e-7 * ell.max(1e-2));
    }

    #[test]
    fn flows_are_consistent(u in vector(), s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let scale = u.eval(s + t).y();
        prop_assert!(close(u.geodesic_flow(s).eval(t), u.eval(s + t), 1e-10));
        prop_assert!((dist(u.basepoint(), u.eval(t)) - t.abs()).abs() <= 1e-9 * scale.max(1.0));
        let h = u.horocycle_flow(s);
        prop_assert!(h.forward().gap(&u.forward()) <= 1e-8);
        prop_assert!(busemann(u.forward(), u.basepoint(), h.basepoint()).abs() <= 1e-9);
        let lhs = u.geodesic_flow(-t).horocycle_flow(s).geodesic_flow(t);
        prop_assert!(d1(&lhs, &u.horocycle_flow(s * (-t).exp())) <= 1e-10);
    }

    #[test]
    fn rotation_turns_direction(u in vector(), theta in 0.0..TAU) {
        let turned = u.rotate(theta).direction_angle() - u.direction_angle();
        let wrapped = (turned - theta).rem_euclid(TAU);
        prop_assert!(wrapped.min(TAU - wrapped) <= 1e-10);
        prop_assert!(dist(u.rotate(theta).basepoint(), u.basepoint()) <= 1e-12);
    }

    #[test]
    fn metrics_are_invariant_and_symmetric(v in vector(), w in vector(), g in isometry()) {
        let (gv, gw) = (v.apply_isometry(&g), w.apply_isometry(&g));
        prop_assert!((d1(&gv, &gw) - d1(&v, &w)).abs() <= 1e-9);
        prop_assert!((d2(&gv, &gw) - d2(&v, &w)).abs() <= 1e-9);
        prop_assert!((d1(&v, &w) - d1(&w, &v)).abs() <= 1e-12);
        prop_assert!((d2(&v, &w) - d2(&w, &v)).abs() <= 1e-10);
        prop_assert!(d2(&v, &w) <= dist(v.basepoint(), w.basepoint()) + PI + 1e-12);
    }

    #[test]
    fn d1_triangle(u in vector(), v in vector(), w in vector()) {
        prop_assert!(d1(&u, &w) <= d1(&u, &v) + d1(&v, &w) + 1e-9);
    }

    #[test]
    fn winding_is_bounded_and_equivariant((u, g, t) in crossing(), f in isometry()) {
        let axis = g.axis_data().unwrap();
        let geo = Geodesic::new(axis.minus, axis.plus).unwrap();
        let tc = cross_time(&u, &geo, false).unwrap();
        prop_assert!((tc - t).abs() <= 1e-7);
        let w = wind(&g, &u).unwrap();
        prop_assert!(w.tau.abs() <= axis.length + 1e-9);
        prop_assert!(dist(w.vector.basepoint(), u.basepoint()) <= 1e-9);
        prop_assert!(w.vector.forward().gap(&g.apply_boundary(u.forward())) <= 1e-9);
        let moved = winding_time(&g.conjugate_by(&f), &u.apply_isometry(&f)).unwrap();
        prop_assert!((moved - w.tau).abs() <= 1e-8);
    }

    #[test]
    fn nested_sequences_validate(first in 1.5..20.0f64, margin in 2.0..16.0f64, depth in 1usize..5) {
        let spec = NestedSpec { first_scale: first, margin, ..NestedSpec::with_depth(depth) };
        let seq = build_nested(&spec).unwrap();
        prop_assert!(validate_nested(&seq).passes());
        for n in 0..depth {
            // Symmetric axes cross the reference ray at height A_n.
            let a = seq.axes[n].plus.as_real().unwrap();
            prop_assert!((seq.t[n] - a.ln()).abs() <= 1e-12 * a.ln().abs().max(1.0));
        }
        if depth <= 3 {
            prop_assert!(certify_schottky(&seq).passes());
        }
    }

    #[test]
    fn winding_times_are_cauchy(first in 1.5..20.0f64, margin in 2.0..16.0f64) {
        let spec = NestedSpec { first_scale: first, margin, ..NestedSpec::with_depth(4) };
        let seq = build_nested(&spec).unwrap();
        let run = run_alpha(&seq, &[0, 1, 2, 3]).unwrap();
        for n in 0..3 {
            prop_assert!((run.r[n + 1] - run.r[n]).abs() <= run.lengths[n + 1] + 1e-9);
            // Deep gaps are far below one ulp of the endpoints themselves, so
            // the endpoints agree only up to rounding.
            prop_assert!(run.endpoint_gaps[n] > 0.0);
            prop_assert!(run.endpoints[n + 1] <= run.endpoints[n] * (1.0 + 4.0 * f64::EPSILON));
        }
        for n in 0..=2 {
            prop_assert!((run.r[n] - run.r_direct[n]).abs() <= 1e-6);
        }
        prop_assert!(run.r.iter().all(|r| r.abs() <= 3.0));
    }

    #[test]
    fn pulled_quotient_matches_generic(t in 0.0..25.0f64, n in 0usize..2) {
        let seq = build_nested(&NestedSpec::with_depth(2)).unwrap();
        let run = run_alpha(&seq, &[0, 1]).unwrap();
        let target = UnitVector::reference().geodesic_flow(t);
        let moved = run.v[n].geodesic_flow(t + run.r[n]);
        let mut candidates = vec![MoebiusMap::IDENTITY];
        candidates.extend(run.beta[..=n].iter().map(|b| b.inverse()));
        let generic = quotient_d1_upper(&target, &moved, &candidates).unwrap();
        let pulled = std::iter::once(None)
            .chain((0..=n).map(Some))
            .map(|k| d1(&run.pulled_frame(k, n, t + run.r[n]), &target))
            .fold(f64::INFINITY, f64::min);
        prop_assert!((generic - pulled).abs() <= 1e-6 * generic.max(1.0), "{generic} vs {pulled}");
    }
}
