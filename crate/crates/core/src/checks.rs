//! Seeded randomized suites for the invariants of every module.
//!
//! Each trial yields a slack `measured − bound`; a trial violates its suite
//! when the slack is positive (or not a number).

use rand::Rng;
use rayon::prelude::*;

use crate::hplane::{busemann, busemann_oracle, dist};
use crate::moebius::MoebiusMap;
use crate::sampling::{self, trial_rng};
use crate::tangent::{d1, d2};
use crate::winding::{displacement_defect, horocycle_alignment_check, key_bound_report, wind};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub trials: u64,
    /// Largest slack over all trials; `≤ 0` when the suite passes.
    pub worst_slack: f64,
    pub violations: u64,
}

impl SuiteResult {
    pub fn passes(&self) -> bool {
        self.violations == 0
    }
}

/// Suites in report order. The position of a suite selects its RNG streams.
pub const SUITES: &[&str] = &[
    "busemann_cocycle",
    "busemann_lipschitz",
    "busemann_oracle",
    "dist_isometry",
    "axis_round_trip",
    "conjugation_covariance",
    "bound_wind",
    "key_proposition",
    "key_case_bounds",
    "key_sandwich",
    "key_monotonicity",
    "displacement_identity",
    "flow_identity",
    "metric_invariance",
    "horocycle_alignment",
];

fn worst(slacks: &[f64]) -> f64 {
    slacks.iter().fold(f64::NEG_INFINITY, |m, &s| m.max(s))
}

fn summarize(suite: &'static str, slacks: Vec<f64>) -> SuiteResult {
    let slacks: Vec<f64> = slacks
        .into_iter()
        .map(|s| if s.is_nan() { f64::INFINITY } else { s })
        .collect();
    SuiteResult {
        suite,
        trials: slacks.len() as u64,
        worst_slack: worst(&slacks),
        violations: slacks.iter().filter(|&&s| s > 0.0).count() as u64,
    }
}

fn per_trial<F>(seed: u64, suite: &'static str, trials: u64, f: F) -> SuiteResult
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let index = SUITES
        .iter()
        .position(|s| *s == suite)
        .expect("known suite") as u16;
    let slacks = (0..trials)
        .into_par_iter()
        .map(|t| f(&mut trial_rng(seed, index, t)))
        .collect();
    summarize(suite, slacks)
}

pub fn busemann_cocycle(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "busemann_cocycle", trials, |rng| {
        let xi = sampling::boundary_point(rng, 5.0);
        let (x, y, z) = (
            sampling::point(rng, 3.0, 3.0),
            sampling::point(rng, 3.0, 3.0),
            sampling::point(rng, 3.0, 3.0),
        );
        (busemann(xi, x, z) - busemann(xi, x, y) - busemann(xi, y, z)).abs() - 1e-10
    })
}

pub fn busemann_lipschitz(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "busemann_lipschitz", trials, |rng| {
        let xi = sampling::boundary_point(rng, 5.0);
        let (x, y) = (
            sampling::point(rng, 3.0, 3.0),
            sampling::point(rng, 3.0, 3.0),
        );
        busemann(xi, x, y).abs() - dist(x, y) - 1e-10
    })
}

pub fn busemann_oracle_suite(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "busemann_oracle", trials, |rng| {
        let xi = sampling::boundary_point(rng, 3.0);
        let (x, y) = (
            sampling::point(rng, 3.0, 3.0),
            sampling::point(rng, 3.0, 3.0),
        );
        (busemann(xi, x, y) - busemann_oracle(xi, x, y, 40.0)).abs() - 1e-6
    })
}

pub fn dist_isometry(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "dist_isometry", trials, |rng| {
        let g = sampling::isometry(rng);
        let (z, w) = (
            sampling::point(rng, 3.0, 3.0),
            sampling::point(rng, 3.0, 3.0),
        );
        (dist(g.apply_point(z), g.apply_point(w)) - dist(z, w)).abs() - 1e-10
    })
}

pub fn axis_round_trip(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "axis_round_trip", trials, |rng| {
        let g = sampling::hyperbolic(rng, 1e-2, 3.0);
        let Ok(axis) = g.axis_data() else {
            return f64::INFINITY;
        };
        match MoebiusMap::hyperbolic_from_axis(axis.minus, axis.plus, axis.length) {
            Ok(h) => h.distance(&g) - 1e-8,
            Err(_) => f64::INFINITY,
        }
    })
}

pub fn conjugation_covariance(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "conjugation_covariance", trials, |rng| {
        let g = sampling::hyperbolic(rng, 1e-2, 3.0);
        let f = sampling::isometry(rng);
        let (Ok(a), Ok(b)) = (g.axis_data(), g.conjugate_by(&f).axis_data()) else {
            return f64::INFINITY;
        };
        let minus = b.minus.gap(&f.apply_boundary(a.minus)) - 1e-9;
        let plus = b.plus.gap(&f.apply_boundary(a.plus)) - 1e-9;
        let length = (a.length - b.length).abs() - 1e-10;
        minus.max(plus).max(length)
    })
}

pub fn bound_wind(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "bound_wind", trials, |rng| {
        let c = sampling::crossing_config(rng, 1e-4, 2.0);
        match wind(&c.g, &c.u) {
            Ok(w) => w.tau.abs() - c.length - 1e-9,
            Err(_) => f64::INFINITY,
        }
    })
}

/// Grid used by the key-proposition suites.
pub const KEY_T_MAX: f64 = 20.0;
pub const KEY_STEP: f64 = 0.25;

/// The four key-proposition suites from one set of sampled configurations.
pub fn key_suites(seed: u64, trials: u64) -> [SuiteResult; 4] {
    let index = SUITES.iter().position(|s| *s == "key_proposition").unwrap() as u16;
    let rows: Vec<[f64; 4]> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, index, t);
            let c = sampling::crossing_config(&mut rng, 1e-4, 2.0);
            let Ok(r) = key_bound_report(&c.g, &c.u, KEY_T_MAX, KEY_STEP) else {
                return [f64::INFINITY; 4];
            };
            let cs = r.case_slacks;
            let ell = r.length;
            let scalar = 2.0 * (0.5 * ell).sinh() - ell.sinh();
            let cases = [
                cs.case1,
                cs.case2,
                cs.scenario_a,
                cs.scenario_b,
                cs.scenario_c,
                scalar,
            ];
            [
                r.worst_slack - 1e-8,
                worst(&cases) - 1e-8,
                cs.sandwich.max(cs.crossing_gap) - 1e-9,
                (cs.case1_monotone - 1e-9)
                    .max(cs.case2_monotone - 1e-9)
                    .max(cs.case2_formula - 1e-6),
            ]
        })
        .collect();
    let column = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    [
        summarize("key_proposition", column(0)),
        summarize("key_case_bounds", column(1)),
        summarize("key_sandwich", column(2)),
        summarize("key_monotonicity", column(3)),
    ]
}

pub fn displacement_identity(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "displacement_identity", trials, |rng| {
        let g = sampling::hyperbolic(rng, 1e-2, 3.0);
        let z = sampling::point(rng, 3.0, 3.0);
        displacement_defect(&g, z).unwrap_or(f64::INFINITY) - 1e-9
    })
}

pub fn flow_identity(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "flow_identity", trials, |rng| {
        let u = sampling::unit_vector(rng);
        let t: f64 = rng.random_range(-3.0..=3.0);
        let s = rng.random_range(-3.0..=3.0);
        let lhs = u.geodesic_flow(-t).horocycle_flow(s).geodesic_flow(t);
        let rhs = u.horocycle_flow(s * (-t).exp());
        let scale = lhs
            .frame()
            .entries()
            .iter()
            .fold(1.0f64, |m, e| m.max(e.abs()));
        let frame = lhs.frame().distance(rhs.frame()) / scale;
        (frame - 1e-12).max(d1(&lhs, &rhs) - 1e-10)
    })
}

pub fn metric_invariance(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "metric_invariance", trials, |rng| {
        let (v, w) = (sampling::unit_vector(rng), sampling::unit_vector(rng));
        let g = sampling::isometry(rng);
        let (gv, gw) = (v.apply_isometry(&g), w.apply_isometry(&g));
        let one = (d1(&gv, &gw) - d1(&v, &w)).abs();
        let two = (d2(&gv, &gw) - d2(&v, &w)).abs();
        one.max(two) - 1e-9
    })
}

pub fn horocycle_alignment(seed: u64, trials: u64) -> SuiteResult {
    per_trial(seed, "horocycle_alignment", trials, |rng| {
        let c = sampling::crossing_config(rng, 1e-4, 2.0);
        horocycle_alignment_check(&c.g, &c.u).unwrap_or(f64::INFINITY) - 1e-8
    })
}

/// Runs every suite with `trials` trials each, in [`SUITES`] order.
pub fn run_all(seed: u64, trials: u64) -> Vec<SuiteResult> {
    let mut out = vec![
        busemann_cocycle(seed, trials),
        busemann_lipschitz(seed, trials),
        busemann_oracle_suite(seed, trials),
        dist_isometry(seed, trials),
        axis_round_trip(seed, trials),
        conjugation_covariance(seed, trials),
        bound_wind(seed, trials),
    ];
    out.extend(key_suites(seed, trials));
    out.extend([
        displacement_identity(seed, trials),
        flow_identity(seed, trials),
        metric_invariance(seed, trials),
        horocycle_alignment(seed, trials),
    ]);
    debug_assert!(out.iter().map(|r| r.suite).eq(SUITES.iter().copied()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        for r in run_all(3, 50) {
            assert!(r.passes(), "{r:?}");
            assert_eq!(r.trials, 50);
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(run_all(11, 20), run_all(11, 20));
    }
}
