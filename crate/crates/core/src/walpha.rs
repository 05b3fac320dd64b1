//! Iterated winding along a subsequence `α` of a nested sequence and the
//! limit vector `w_α`.
//!
//! The prefix products `β_n = α_0⋯α_n` have entries of size `∏ A_k`, and
//! anything computed from them directly loses all precision a few levels
//! down. Every quantity here is therefore evaluated in coordinates pulled
//! back by `β_n`, where each step involves a single generator:
//!
//! * `p_n = β_n⁻¹(i)` is obtained by applying `α_n⁻¹` to `p_{n−1}`;
//! * `β_n⁻¹ ṽ_n` is the vector at `p_n` pointing to `∞`;
//! * endpoint differences `x_n − x_{n+1}` are pushed through the generators
//!   without ever subtracting two nearby images.

use std::f64::consts::E;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hplane::HPoint;
use crate::moebius::{image_difference, BoundaryPoint, MoebiusMap};
use crate::schottky::NestedSequence;
use crate::tangent::{d1, d2, UnitVector};
use crate::winding::winding_time;

/// Run depth up to which `r_n` is cross-checked against `−ln Im(β_n⁻¹ i)`.
pub const DIRECT_CHECK_DEPTH: usize = 3;

/// Tolerance of the incremental/direct cross-check and of the horocycle
/// height check.
pub const RUN_TOL: f64 = 1e-6;

/// Slack added to every convergence bound.
pub const BOUND_TOL: f64 = 1e-6;

/// Schedule `2^{−(2n+3)}` for the length of the `n`-th picked generator.
pub fn schedule(n: usize) -> f64 {
    (-(2.0 * n as f64 + 3.0)).exp2()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRun {
    pub pick: Vec<usize>,
    pub alpha: Vec<MoebiusMap>,
    /// Translation lengths of the picked generators.
    pub lengths: Vec<f64>,
    /// `β_n = α_0⋯α_n` as plain matrix products. Only trustworthy at shallow
    /// depth; nothing below is derived from them.
    pub beta: Vec<MoebiusMap>,
    /// `x_n = β_n(∞)`.
    pub endpoints: Vec<f64>,
    /// `x_n − x_{n+1}`, accurate even where `x_n` and `x_{n+1}` round to the
    /// same double.
    pub endpoint_gaps: Vec<f64>,
    /// `ṽ_n`: basepoint `i`, forward endpoint `x_n`.
    pub v: Vec<UnitVector>,
    /// `φ_n − φ_{n−1}`, with `ṽ_n = K_{φ_n}` and `φ_{−1} = 0`.
    pub angle_steps: Vec<f64>,
    /// `p_n = β_n⁻¹(i)`.
    pub pulled: Vec<HPoint>,
    /// `tau_inc[n] = r_{n+1} − r_n`.
    pub tau_inc: Vec<f64>,
    pub r: Vec<f64>,
    /// `−ln Im(β_n⁻¹ i)` from the matrix products.
    pub r_direct: Vec<f64>,
    /// Horocycle parameters: `β_n⁻¹ g_{r_n} ṽ_n = h_{s_n}(ũ₀)`.
    pub s: Vec<f64>,
    /// Height of the basepoint of `β_n⁻¹ g_{r_n} ṽ_n`; equal to one.
    pub heights: Vec<f64>,
    pub r_limit: f64,
    /// `Σ_{k>N} 2^{−(2k+3)}`, bounding `|r_α − r_N|`.
    pub tail_bound: f64,
}

impl AlphaRun {
    pub fn depth(&self) -> usize {
        self.alpha.len()
    }

    /// Frame of `β_k⁻¹ g_τ ṽ_n` for `k ≤ n`; `k = None` stands for the
    /// identity candidate.
    pub fn pulled_frame(&self, k: Option<usize>, n: usize, tau: f64) -> UnitVector {
        let (base, delta) = match k {
            None => (
                MoebiusMap::IDENTITY,
                self.angle_steps[..=n].iter().sum::<f64>(),
            ),
            Some(k) => {
                let p = self.pulled[k];
                let w = MoebiusMap::translation(p.x()).compose(&MoebiusMap::dilation(p.y()));
                (w, self.angle_steps[k + 1..=n].iter().sum::<f64>())
            }
        };
        UnitVector::from_frame(base.compose(&MoebiusMap::rotation(delta))).geodesic_flow(tau)
    }

    /// Gaps `x_k − x_N` between the final endpoint and the earlier orbit
    /// points `β_k(∞)`; all positive.
    pub fn orbit_gaps(&self) -> Vec<f64> {
        let n = self.depth();
        (0..n.saturating_sub(1))
            .map(|k| self.endpoint_gaps[k..n - 1].iter().sum())
            .collect()
    }
}

fn boundary_value(p: BoundaryPoint) -> f64 {
    p.as_real().unwrap_or(f64::INFINITY)
}

/// Winds `ũ₀` successively around the picked generators.
pub fn run_alpha(seq: &NestedSequence, pick: &[usize]) -> Result<AlphaRun> {
    if pick.is_empty() {
        return Err(Error::IndexError("pick is empty".into()));
    }
    if let Some(&j) = pick.iter().find(|&&j| j >= seq.len()) {
        return Err(Error::IndexError(format!(
            "index {j} out of range for a sequence of length {}",
            seq.len()
        )));
    }
    if pick.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::IndexError("pick must be strictly increasing".into()));
    }
    let alpha: Vec<MoebiusMap> = pick.iter().map(|&j| seq.gens[j]).collect();
    let lengths: Vec<f64> = pick.iter().map(|&j| seq.axes[j].length).collect();
    for (n, &l) in lengths.iter().enumerate() {
        if l > schedule(n) * (1.0 + 1e-12) {
            log::warn!(
                "picked length {l:e} at position {n} exceeds the schedule {:e}",
                schedule(n)
            );
        }
    }
    let depth = alpha.len();

    let mut beta = Vec::with_capacity(depth);
    let mut acc = MoebiusMap::IDENTITY;
    for a in &alpha {
        acc = acc.compose(a);
        beta.push(acc);
    }

    // x_n by nested application, innermost generator first.
    let endpoints: Vec<f64> = (0..depth)
        .map(|n| {
            let y = alpha[..=n]
                .iter()
                .rev()
                .fold(BoundaryPoint::Infinity, |y, a| a.apply_boundary(y));
            boundary_value(y)
        })
        .collect();
    let endpoint_gaps: Vec<f64> = (0..depth.saturating_sub(1))
        .map(|n| {
            let start = (
                BoundaryPoint::Infinity,
                alpha[n + 1].apply_boundary(BoundaryPoint::Infinity),
            );
            let (_, _, gap) = alpha[..=n]
                .iter()
                .rev()
                .fold((start.0, start.1, f64::INFINITY), |(u, v, diff), a| {
                    image_difference(a, u, v, diff)
                });
            gap
        })
        .collect();

    // arccot x_{j} − arccot x_{j−1} = atan((x_{j−1} − x_j)/(1 + x_j x_{j−1}))
    let mut angle_steps = Vec::with_capacity(depth);
    angle_steps.push(1f64.atan2(endpoints[0]));
    for j in 1..depth {
        let gap = endpoint_gaps[j - 1];
        angle_steps.push((gap / (1.0 + endpoints[j] * endpoints[j - 1])).atan());
    }
    let mut phi = 0.0;
    let v: Vec<UnitVector> = angle_steps
        .iter()
        .map(|step| {
            phi += step;
            UnitVector::from_frame(MoebiusMap::rotation(phi))
        })
        .collect();

    let mut pulled = Vec::with_capacity(depth);
    let mut p = HPoint::I;
    for a in &alpha {
        p = a.inverse().apply_point(p);
        pulled.push(p);
    }

    let mut r = Vec::with_capacity(depth);
    r.push(winding_time(&alpha[0], &UnitVector::reference())?);
    let mut tau_inc = Vec::with_capacity(depth.saturating_sub(1));
    for n in 0..depth - 1 {
        let w = UnitVector::frame_from(pulled[n], BoundaryPoint::Infinity);
        let tau = winding_time(&alpha[n + 1], &w)?;
        tau_inc.push(tau);
        r.push(r[n] + tau);
    }

    let r_direct: Vec<f64> = beta
        .iter()
        .map(|b| -b.inverse().apply_point(HPoint::I).y().ln())
        .collect();
    for n in 0..depth.min(DIRECT_CHECK_DEPTH + 1) {
        let diff = (r[n] - r_direct[n]).abs();
        if !(diff <= RUN_TOL) {
            return Err(Error::PrecisionLoss(format!(
                "incremental r_{n} = {} but direct value {} (difference {diff:e})",
                r[n], r_direct[n]
            )));
        }
    }

    let s: Vec<f64> = pulled.iter().map(|p| p.x()).collect();
    let heights: Vec<f64> = pulled
        .iter()
        .zip(&r)
        .map(|(p, r)| p.y() * r.exp())
        .collect();
    if let Some((n, h)) = heights
        .iter()
        .enumerate()
        .find(|(_, h)| !((**h - 1.0).abs() <= RUN_TOL))
    {
        return Err(Error::PrecisionLoss(format!(
            "pulled-back vector {n} sits at height {h}, off the horocycle of ũ₀"
        )));
    }

    let r_limit = *r.last().expect("depth ≥ 1");
    let tail_bound = schedule(depth) * 4.0 / 3.0;
    Ok(AlphaRun {
        pick: pick.to_vec(),
        alpha,
        lengths,
        beta,
        endpoints,
        endpoint_gaps,
        v,
        angle_steps,
        pulled,
        tau_inc,
        r,
        r_direct,
        s,
        heights,
        r_limit,
        tail_bound,
    })
}

/// `w_α ≈ g_{r_N} ṽ_N`.
///
/// Truncating at depth `N` moves the forward endpoint by less than the
/// observed decay of `x_n − x_{n+1}` and the flow time by at most
/// [`AlphaRun::tail_bound`].
pub fn w_alpha(run: &AlphaRun) -> UnitVector {
    run.v[run.depth() - 1].geodesic_flow(run.r_limit)
}

fn quotient_min(
    u: &UnitVector,
    v: &UnitVector,
    candidates: &[MoebiusMap],
    metric: fn(&UnitVector, &UnitVector) -> f64,
) -> Result<(usize, f64)> {
    candidates
        .iter()
        .enumerate()
        .map(|(k, g)| (k, metric(u, &v.apply_isometry(g))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::EmptyCandidates)
}

/// `min_γ d₁(u, γv)` over the candidates: an upper bound for the distance
/// of the projections to the quotient.
pub fn quotient_d1_upper(u: &UnitVector, v: &UnitVector, candidates: &[MoebiusMap]) -> Result<f64> {
    quotient_min(u, v, candidates, d1).map(|(_, d)| d)
}

/// As [`quotient_d1_upper`] with `d₂`.
pub fn quotient_d2_upper(u: &UnitVector, v: &UnitVector, candidates: &[MoebiusMap]) -> Result<f64> {
    quotient_min(u, v, candidates, d2).map(|(_, d)| d)
}

/// Index of the minimizing candidate together with the minimum.
pub fn quotient_d1_argmin(
    u: &UnitVector,
    v: &UnitVector,
    candidates: &[MoebiusMap],
) -> Result<(usize, f64)> {
    quotient_min(u, v, candidates, d1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub t: f64,
    /// Run index `n` of the vector `g_t g_{r_n} ṽ_n`.
    pub n: usize,
    /// Minimizing candidate: `-1` for the identity, `k` for `β_k`.
    pub n_star: i64,
    pub d1_upper: f64,
    pub d2_upper: f64,
    /// Largest level `m` with `T_m ≤ t`.
    pub level: Option<usize>,
    /// `2·2^{−level}`.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// All rows, grouped by `t` then `n`.
    pub rows: Vec<GridRow>,
    /// `T_m = max(0, max_n ln(|s_n|(1 + e^{−1})·2^{m+1}))`: from this time on the
    /// horocyclic displacement bound is below `2^{−(m+1)}`.
    pub t_levels: Vec<f64>,
    /// `max(3, T_m)`, the form with the extra margin for the winding shift.
    pub t_levels_conservative: Vec<f64>,
    /// First grid time from which every row stays below `2·2^{−m}`.
    pub first_met: Vec<Option<f64>>,
    /// Same for the `d₂` column.
    pub d2_first_met: Vec<Option<f64>>,
    /// Number of levels with `T_m ≤ t_max`.
    pub levels_covered: usize,
    /// Rows with a level whose `d₁` exceeds the bound.
    pub violations: usize,
    /// Rows at `t ≥ T_m + step` whose `d₂` exceeds `2·2^{−m}`.
    pub d2_violations: usize,
    pub pass: bool,
    pub d2_pass: bool,
}

impl ConvergenceReport {
    /// Rows for the deepest vector, i.e. the estimate of `w_α`.
    pub fn w_alpha_rows(&self) -> impl Iterator<Item = &GridRow> {
        let last = self.rows.iter().map(|r| r.n).max().unwrap_or(0);
        self.rows.iter().filter(move |r| r.n == last)
    }
}

fn level_bound(m: usize) -> f64 {
    2.0 * (-(m as f64)).exp2()
}

/// Quotient distances of `g_t g_{r_n} ṽ_n` to `g_t ũ₀` on the grid
/// `0, step, …, t_max`, with candidates `{id, β_0, …, β_n}`.
pub fn verify_wss(run: &AlphaRun, t_max: f64, step: f64, levels: usize) -> ConvergenceReport {
    let count = if step > 0.0 && t_max >= 0.0 {
        (t_max / step + 1e-9).floor() as usize + 1
    } else {
        1
    };
    let depth = run.depth();
    let smax = run.s.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let t_levels: Vec<f64> = (0..=levels)
        .map(|m| {
            (smax * (1.0 + (-1.0f64).exp()) * ((m + 1) as f64).exp2())
                .ln()
                .max(0.0)
        })
        .collect();
    let t_levels_conservative = t_levels.iter().map(|t| t.max(3.0)).collect();

    let rows: Vec<GridRow> = (0..count)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 * step;
            let target = UnitVector::reference().geodesic_flow(t);
            let level = t_levels.iter().rposition(|&tm| tm <= t);
            (0..depth)
                .map(move |n| {
                    let mut best = (f64::INFINITY, -1i64);
                    let mut best_d2 = f64::INFINITY;
                    for k in std::iter::once(None).chain((0..=n).map(Some)) {
                        let f = run.pulled_frame(k, n, t + run.r[n]);
                        let a = d1(&f, &target);
                        if a < best.0 {
                            best = (a, k.map_or(-1, |k| k as i64));
                        }
                        best_d2 = best_d2.min(d2(&f, &target));
                    }
                    GridRow {
                        t,
                        n,
                        n_star: best.1,
                        d1_upper: best.0,
                        d2_upper: best_d2,
                        level,
                        bound: level.map(level_bound),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let violations = rows
        .iter()
        .filter(|r| matches!(r.bound, Some(b) if !(r.d1_upper <= b + BOUND_TOL)))
        .count();
    let d2_violations = rows
        .iter()
        .filter(|r| {
            t_levels.iter().enumerate().any(|(m, &tm)| {
                r.t >= tm + step - 1e-12 && !(r.d2_upper <= level_bound(m) + BOUND_TOL)
            })
        })
        .count();
    let first_met_by = |value: fn(&GridRow) -> f64| -> Vec<Option<f64>> {
        (0..=levels)
            .map(|m| {
                let bound = level_bound(m) + BOUND_TOL;
                let mut first = None;
                for i in (0..count).rev() {
                    let ok = rows[i * depth..(i + 1) * depth]
                        .iter()
                        .all(|r| value(r) <= bound);
                    if !ok {
                        break;
                    }
                    first = Some(rows[i * depth].t);
                }
                first
            })
            .collect()
    };
    let first_met = first_met_by(|r| r.d1_upper);
    let d2_first_met = first_met_by(|r| r.d2_upper);
    let t_end = (count - 1) as f64 * step;
    let levels_covered = t_levels.iter().filter(|&&tm| tm <= t_end).count();

    ConvergenceReport {
        rows,
        t_levels,
        t_levels_conservative,
        first_met,
        d2_first_met,
        levels_covered,
        violations,
        d2_violations,
        pass: violations == 0,
        d2_pass: d2_violations == 0,
    }
}

/// Suggested `t_max` covering every level of [`verify_wss`] with `margin`
/// to spare.
pub fn covering_t_max(run: &AlphaRun, levels: usize, margin: f64) -> f64 {
    let smax = run.s.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let top = (smax * (1.0 + 1.0 / E) * ((levels + 1) as f64).exp2())
        .ln()
        .max(0.0);
    top + margin
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalReport {
    pub pick: Vec<usize>,
    pub targets: Vec<f64>,
    /// `y_n = α'_{n−1}⁻¹⋯α'_0⁻¹(target_n)`.
    pub pulled_targets: Vec<BoundaryPoint>,
    /// `α'_n⁺`.
    pub plus: Vec<f64>,
    /// `α'_n⋯α'_N(∞) = α'_{n−1}⁻¹⋯α'_0⁻¹(x_N)`.
    pub tails: Vec<f64>,
    /// `tails[n] > plus[n]` for every `n`.
    pub star: bool,
    /// `plus[n] > pulled_targets[n]` for every target.
    pub star_star: bool,
    /// `x_N − target_n`.
    pub target_gaps: Vec<f64>,
    /// `tails[n] − y_n`.
    pub pulled_gaps: Vec<f64>,
}

impl DiagonalReport {
    pub fn passes(&self) -> bool {
        self.star
            && self.star_star
            && self.target_gaps.iter().all(|g| g.abs() > 0.0)
            && self.pulled_gaps.iter().all(|g| *g > 0.0)
    }
}

fn pull_back(prefix: &[MoebiusMap], x: f64) -> BoundaryPoint {
    prefix
        .iter()
        .fold(BoundaryPoint::Real(x), |y, a| a.inverse().apply_boundary(y))
}

fn exceeds(x: f64, y: BoundaryPoint) -> bool {
    match y {
        BoundaryPoint::Real(y) => x > y,
        BoundaryPoint::Infinity => false,
    }
}

/// Chooses a subsequence whose limit endpoint avoids every target.
///
/// Position `n` takes the first unused index whose length fits the schedule
/// and, while targets remain, whose attracting point exceeds the target
/// pulled back by the generators already chosen. Once the targets are used
/// up the remaining admissible indices are taken in order.
pub fn diagonal_avoid(seq: &NestedSequence, targets: &[f64]) -> Result<Vec<usize>> {
    let mut pick: Vec<usize> = Vec::new();
    let mut chosen: Vec<MoebiusMap> = Vec::new();
    let mut next = 0;
    for n in 0.. {
        let pulled = targets.get(n).map(|&x| pull_back(&chosen, x));
        let found = (next..seq.len()).find(|&j| {
            let fits = seq.lengths[j] <= schedule(n) * (1.0 + 1e-12);
            let clears = match pulled {
                Some(y) => exceeds(boundary_value(seq.axes[j].plus), y),
                None => true,
            };
            fits && clears
        });
        match (found, pulled) {
            (Some(j), _) => {
                pick.push(j);
                chosen.push(seq.gens[j]);
                next = j + 1;
            }
            (None, Some(y)) => {
                return Err(Error::InsufficientDepth(format!(
                    "no generator after index {next} clears target {} (pulled back to {y})",
                    targets[n]
                )))
            }
            (None, None) => break,
        }
    }
    if pick.is_empty() {
        return Err(Error::InsufficientDepth("no admissible generator".into()));
    }
    let report = verify_diagonal(seq, &pick, targets)?;
    if !report.passes() {
        return Err(Error::PrecisionLoss(format!(
            "chosen subsequence {pick:?} fails its own verification"
        )));
    }
    Ok(pick)
}

/// Checks the avoidance inequalities for a pick.
pub fn verify_diagonal(
    seq: &NestedSequence,
    pick: &[usize],
    targets: &[f64],
) -> Result<DiagonalReport> {
    let run = run_alpha(seq, pick)?;
    let alpha = &run.alpha;
    let depth = alpha.len();
    let plus: Vec<f64> = pick
        .iter()
        .map(|&j| boundary_value(seq.axes[j].plus))
        .collect();
    let tails: Vec<f64> = (0..depth)
        .map(|n| {
            boundary_value(
                alpha[n..]
                    .iter()
                    .rev()
                    .fold(BoundaryPoint::Infinity, |y, a| a.apply_boundary(y)),
            )
        })
        .collect();
    let star = tails.iter().zip(&plus).all(|(t, p)| t > p);
    let used = targets.len().min(depth);
    let pulled_targets: Vec<BoundaryPoint> = (0..used)
        .map(|n| pull_back(&alpha[..n], targets[n]))
        .collect();
    let star_star = pulled_targets
        .iter()
        .zip(&plus)
        .all(|(y, p)| exceeds(*p, *y));
    let x_final = run.endpoints[depth - 1];
    let target_gaps = targets.iter().map(|t| x_final - t).collect();
    let pulled_gaps = pulled_targets
        .iter()
        .zip(&tails)
        .map(|(y, t)| match y {
            BoundaryPoint::Real(y) => t - y,
            BoundaryPoint::Infinity => f64::NEG_INFINITY,
        })
        .collect();
    Ok(DiagonalReport {
        pick: pick.to_vec(),
        targets: targets.to_vec(),
        pulled_targets,
        plus,
        tails,
        star,
        star_star,
        target_gaps,
        pulled_gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::{build_nested, NestedSpec};

    fn defaults(depth: usize) -> NestedSequence {
        build_nested(&NestedSpec::with_depth(depth)).unwrap()
    }

    #[test]
    fn depth_one_closed_form() {
        let run = run_alpha(&defaults(1), &[0]).unwrap();
        let h: f64 = 1.0 / 16.0;
        let expected = (h.cosh().powi(2) + h.sinh().powi(2) * (-2.0f64).exp()).ln();
        assert!((run.r[0] - expected).abs() < 1e-14);
        assert!(run.tau_inc.is_empty());
        let w = w_alpha(&run);
        let v = UnitVector::frame_from(HPoint::I, BoundaryPoint::Real(run.endpoints[0]));
        assert!(w
            .frame()
            .approx_eq(v.geodesic_flow(run.r[0]).frame(), 1e-14));
        let wound = crate::winding::wind(&run.alpha[0], &UnitVector::reference()).unwrap();
        assert!(w
            .frame()
            .approx_eq(wound.vector.geodesic_flow(wound.tau).frame(), 1e-12));
    }

    #[test]
    fn bad_picks() {
        let seq = defaults(3);
        assert!(matches!(run_alpha(&seq, &[]), Err(Error::IndexError(_))));
        assert!(matches!(
            run_alpha(&seq, &[0, 3]),
            Err(Error::IndexError(_))
        ));
        assert!(matches!(
            run_alpha(&seq, &[1, 1]),
            Err(Error::IndexError(_))
        ));
    }

    #[test]
    fn depth_three_run() {
        let seq = defaults(3);
        let run = run_alpha(&seq, &[0, 1, 2]).unwrap();
        for n in 0..2 {
            assert!(run.endpoint_gaps[n] > 0.0);
            assert!(run.endpoints[n + 1] < run.endpoints[n]);
            assert!(run.tau_inc[n].abs() <= run.lengths[n + 1] + 1e-9);
        }
        assert!(run.endpoints[2] > 0.0);
        for r in &run.r {
            assert!(r.abs() <= 3.0);
        }
        assert_eq!(run_alpha(&seq, &[0, 1, 2]).unwrap(), run);
    }

    #[test]
    fn pulled_frames_match_matrices() {
        let run = run_alpha(&defaults(2), &[0, 1]).unwrap();
        for n in 0..2 {
            for k in 0..=n {
                for tau in [0.0, 1.5, 4.0] {
                    let direct = run.beta[k]
                        .inverse()
                        .compose(run.v[n].geodesic_flow(tau).frame());
                    let pulled = run.pulled_frame(Some(k), n, tau);
                    let target = UnitVector::reference();
                    let a = d1(&UnitVector::from_frame(direct), &target);
                    let b = d1(&pulled, &target);
                    assert!(
                        (a - b).abs() < 1e-6 * a.max(1.0),
                        "n {n} k {k} tau {tau}: {a} {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn verify_depth_three() {
        let run = run_alpha(&defaults(3), &[0, 1, 2]).unwrap();
        let report = verify_wss(&run, 25.0, 0.25, 4);
        assert_eq!(report.levels_covered, 5);
        assert!(report.pass, "{} violations", report.violations);
        assert!(report.d2_pass);
        assert_eq!(report.rows.len(), 101 * 3);
    }

    #[test]
    fn corrupted_run_fails() {
        let mut run = run_alpha(&defaults(3), &[0, 1, 2]).unwrap();
        run.r[2] += 0.5;
        let report = verify_wss(&run, 25.0, 0.25, 4);
        assert!(!report.pass);
        let last = report.rows.iter().rev().find(|r| r.n == 2).unwrap();
        assert!(last.d1_upper > last.bound.unwrap());
    }

    #[test]
    fn level_zero_only() {
        let run = run_alpha(&defaults(2), &[0, 1]).unwrap();
        let report = verify_wss(&run, 25.0, 0.25, 0);
        assert_eq!(report.t_levels.len(), 1);
        assert!(report.pass);
    }

    #[test]
    fn quotient_basics() {
        let u = UnitVector::frame_from(HPoint::new(0.3, 2.0).unwrap(), BoundaryPoint::Real(4.0));
        let v = UnitVector::frame_from(HPoint::new(-1.0, 0.5).unwrap(), BoundaryPoint::Real(-7.0));
        assert_eq!(
            quotient_d1_upper(&u, &v, &[MoebiusMap::IDENTITY]).unwrap(),
            d1(&u, &v)
        );
        let g = MoebiusMap::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let gv = v.apply_isometry(&g);
        assert!(quotient_d1_upper(&gv, &v, &[MoebiusMap::IDENTITY, g]).unwrap() < 1e-10);
        assert_eq!(quotient_d1_upper(&u, &v, &[]), Err(Error::EmptyCandidates));
    }

    #[test]
    fn diagonal_examples() {
        let seq = defaults(5);
        assert_eq!(diagonal_avoid(&seq, &[]).unwrap(), vec![0, 1, 2, 3, 4]);
        let pick = diagonal_avoid(&seq, &[1.0]).unwrap();
        assert_eq!(pick[0], 0);
        let report = verify_diagonal(&seq, &pick, &[1.0]).unwrap();
        assert!(report.passes());
        assert!(report.target_gaps[0] > 0.0);
        assert!(matches!(
            diagonal_avoid(&seq, &[1e300]),
            Err(Error::InsufficientDepth(_))
        ));
    }
}
