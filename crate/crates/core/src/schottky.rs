//! Nested sequences of hyperbolic isometries whose axes cross the reference
//! ray `ũ₀` at escaping times, with shrinking translation lengths, together
//! with a ping-pong certificate of discreteness.

use std::f64::consts::{E, LN_2};

use crate::error::{Error, Result};
use crate::hplane::{cross_time, dist, Geodesic, HPoint};
use crate::moebius::{AxisData, BoundaryPoint, IsometryClass, MoebiusMap};
use crate::tangent::UnitVector;

/// Scales above `2^900` are rejected.
pub const MAX_LOG2_SCALE: f64 = 900.0;

/// Minimum displacement of `i` required from every tested reduced word.
pub const WORD_DISPLACEMENT_MIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct NestedSpec {
    pub depth: usize,
    pub lengths: Vec<f64>,
    pub first_scale: f64,
    pub margin: f64,
}

impl NestedSpec {
    /// `ℓ_n = 2^{−(2n+3)}`, `A_0 = e`, margin 4.
    pub fn with_depth(depth: usize) -> Self {
        NestedSpec {
            depth,
            lengths: default_lengths(depth),
            first_scale: E,
            margin: 4.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::SpecInvalid("depth must be at least 1".into()));
        }
        if self.lengths.len() != self.depth {
            return Err(Error::SpecInvalid(format!(
                "{} lengths given for depth {}",
                self.lengths.len(),
                self.depth
            )));
        }
        for (n, &l) in self.lengths.iter().enumerate() {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::SpecInvalid(format!("length {n} is {l}")));
            }
        }
        if self.lengths.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::SpecInvalid(
                "lengths must be strictly decreasing".into(),
            ));
        }
        if !(self.first_scale > 1.0) || !self.first_scale.is_finite() {
            return Err(Error::SpecInvalid(format!(
                "first scale {} must exceed 1",
                self.first_scale
            )));
        }
        if !(self.margin >= 1.0) || !self.margin.is_finite() {
            return Err(Error::SpecInvalid(format!(
                "margin {} must be ≥ 1",
                self.margin
            )));
        }
        Ok(())
    }
}

pub fn default_lengths(depth: usize) -> Vec<f64> {
    (0..depth)
        .map(|n| (-(2.0 * n as f64 + 3.0)).exp2())
        .collect()
}

/// Closed boundary interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    fn contains(&self, x: f64, rel: f64) -> bool {
        let slack = rel * self.lo.abs().max(self.hi.abs());
        x >= self.lo - slack && x <= self.hi + slack
    }
}

/// Ping-pong sets of one generator: `γ` maps the complement of `minus` into
/// `plus`, and `γ⁻¹` the complement of `plus` into `minus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalPair {
    pub minus: Interval,
    pub plus: Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestedSequence {
    pub gens: Vec<MoebiusMap>,
    pub axes: Vec<AxisData>,
    /// Nominal translation lengths.
    pub lengths: Vec<f64>,
    /// Crossing times with `ũ₀`; `NaN` where the axis misses the ray.
    pub t: Vec<f64>,
    pub intervals: Vec<IntervalPair>,
}

impl NestedSequence {
    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Rebuilds the derived data from generators alone. Intervals are the
    /// traces of the isometric circles of `γ` and `γ⁻¹`.
    pub fn from_generators(gens: Vec<MoebiusMap>) -> Result<Self> {
        let reference = UnitVector::reference();
        let mut axes = Vec::with_capacity(gens.len());
        let mut t = Vec::with_capacity(gens.len());
        let mut intervals = Vec::with_capacity(gens.len());
        for (n, g) in gens.iter().enumerate() {
            if g.classify() != IsometryClass::Hyperbolic {
                return Err(Error::NotHyperbolic {
                    trace: g.trace().abs(),
                });
            }
            if g.c() == 0.0 {
                return Err(Error::InvalidMatrix(format!("generator {n} fixes ∞")));
            }
            let axis = g.axis_data()?;
            let geo = Geodesic::new(axis.minus, axis.plus)?;
            t.push(cross_time(&reference, &geo, true).unwrap_or(f64::NAN));
            let r = g.c().abs().recip();
            let (lo, hi) = (-g.d() / g.c() - r, -g.d() / g.c() + r);
            let (plo, phi) = (g.a() / g.c() - r, g.a() / g.c() + r);
            intervals.push(IntervalPair {
                minus: Interval { lo, hi },
                plus: Interval { lo: plo, hi: phi },
            });
            axes.push(axis);
        }
        let lengths = axes.iter().map(|a| a.length).collect();
        Ok(NestedSequence {
            gens,
            axes,
            lengths,
            t,
            intervals,
        })
    }
}

/// Builds `γ_n` with axis `(−A_n, A_n)` and length `ℓ_n`, where
/// `A_{n+1} = margin·A_n·coth(ℓ_n/4)/tanh(ℓ_{n+1}/4)`.
///
/// The scales grow like `2^{2n²+O(n)}` for the default lengths.
pub fn build_nested(spec: &NestedSpec) -> Result<NestedSequence> {
    spec.validate()?;
    let reference = UnitVector::reference();
    let mut seq = NestedSequence {
        gens: Vec::with_capacity(spec.depth),
        axes: Vec::with_capacity(spec.depth),
        lengths: spec.lengths.clone(),
        t: Vec::with_capacity(spec.depth),
        intervals: Vec::with_capacity(spec.depth),
    };
    let mut log_scale = spec.first_scale.ln();
    for (n, &ell) in spec.lengths.iter().enumerate() {
        if n > 0 {
            let prev = spec.lengths[n - 1];
            log_scale += spec.margin.ln() - (0.25 * prev).tanh().ln() - (0.25 * ell).tanh().ln();
        }
        if log_scale / LN_2 > MAX_LOG2_SCALE {
            return Err(Error::DepthOverflow {
                index: n,
                reason: format!("scale 2^{:.1} exceeds 2^{MAX_LOG2_SCALE}", log_scale / LN_2),
            });
        }
        let scale = log_scale.exp();
        let g = MoebiusMap::hyperbolic_from_axis(
            BoundaryPoint::Real(-scale),
            BoundaryPoint::Real(scale),
            ell,
        )?;
        // Below the trace band the generator is numerically parabolic.
        if g.classify() != IsometryClass::Hyperbolic {
            return Err(Error::DepthOverflow {
                index: n,
                reason: format!(
                    "length {ell:e} gives |trace| − 2 = {:e}, inside the classification band",
                    g.trace().abs() - 2.0
                ),
            });
        }
        let axis = g.axis_data()?;
        let geo = Geodesic::new(axis.minus, axis.plus)?;
        seq.t
            .push(cross_time(&reference, &geo, false).unwrap_or(f64::NAN));
        let (lo, hi) = (scale * (0.25 * ell).tanh(), scale / (0.25 * ell).tanh());
        seq.intervals.push(IntervalPair {
            minus: Interval { lo: -hi, hi: -lo },
            plus: Interval { lo, hi },
        });
        seq.gens.push(g);
        seq.axes.push(axis);
    }
    Ok(seq)
}

/// Which defining property of a nested sequence a failure concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestedCondition {
    /// Attracting endpoints positive and increasing.
    PlusIncreasing,
    /// Repelling endpoints negative and decreasing.
    MinusDecreasing,
    /// Each axis meets `ũ₀(ℝ⁺)` at a single time `t_n > 0`.
    Crossing,
    /// Translation lengths decreasing.
    LengthsDecreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationFailure {
    pub condition: NestedCondition,
    pub index: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
    /// `t_n` strictly increasing.
    pub t_increasing: bool,
    /// `min(γ_n⁺, |γ_n⁻|)` strictly increasing.
    pub endpoints_escaping: bool,
    /// Smallest `t_{n+1} − t_n`; infinite for a single generator.
    pub min_t_increment: f64,
    /// Largest `|ℓ(axis) − ℓ_n|`, relative to `ℓ_n`.
    pub length_consistency: f64,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty() && self.t_increasing && self.endpoints_escaping
    }

    pub fn has(&self, condition: NestedCondition) -> bool {
        self.failures.iter().any(|f| f.condition == condition)
    }
}

fn finite(p: BoundaryPoint) -> f64 {
    p.as_real().unwrap_or(f64::INFINITY)
}

pub fn validate_nested(seq: &NestedSequence) -> ValidationReport {
    let mut failures = Vec::new();
    let mut fail = |condition, index, detail: String| {
        failures.push(ValidationFailure {
            condition,
            index,
            detail,
        })
    };
    let plus: Vec<f64> = seq.axes.iter().map(|a| finite(a.plus)).collect();
    let minus: Vec<f64> = seq.axes.iter().map(|a| finite(a.minus)).collect();
    for n in 0..seq.len() {
        if !(plus[n] > 0.0 && plus[n].is_finite()) {
            fail(
                NestedCondition::PlusIncreasing,
                n,
                format!("γ⁺ = {}", plus[n]),
            );
        }
        if n > 0 && !(plus[n] > plus[n - 1]) {
            fail(
                NestedCondition::PlusIncreasing,
                n,
                format!("γ⁺ = {} after {}", plus[n], plus[n - 1]),
            );
        }
        if !(minus[n] < 0.0 && minus[n].is_finite()) {
            fail(
                NestedCondition::MinusDecreasing,
                n,
                format!("γ⁻ = {}", minus[n]),
            );
        }
        if n > 0 && !(minus[n] < minus[n - 1]) {
            fail(
                NestedCondition::MinusDecreasing,
                n,
                format!("γ⁻ = {} after {}", minus[n], minus[n - 1]),
            );
        }
        let geo = Geodesic::new(seq.axes[n].minus, seq.axes[n].plus);
        let crossing = geo
            .ok()
            .and_then(|g| cross_time(&UnitVector::reference(), &g, false));
        match crossing {
            Some(t) if t > 0.0 => {}
            other => fail(
                NestedCondition::Crossing,
                n,
                format!("crossing time {other:?}"),
            ),
        }
        let ell = seq.axes[n].length;
        if n > 0 && !(ell < seq.axes[n - 1].length) {
            fail(
                NestedCondition::LengthsDecreasing,
                n,
                format!("ℓ = {ell} after {}", seq.axes[n - 1].length),
            );
        }
    }
    let t_increasing = seq.t.windows(2).all(|w| w[1] > w[0]);
    let escape: Vec<f64> = plus.iter().zip(&minus).map(|(p, m)| p.min(-m)).collect();
    let endpoints_escaping = escape.windows(2).all(|w| w[1] > w[0]);
    let min_t_increment = seq
        .t
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let length_consistency = seq
        .axes
        .iter()
        .zip(&seq.lengths)
        .map(|(a, &l)| (a.length - l).abs() / l)
        .fold(0.0, f64::max);
    ValidationReport {
        failures,
        t_increasing,
        endpoints_escaping,
        min_t_increment,
        length_consistency,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    /// All `2N` closed intervals pairwise disjoint.
    pub disjoint: bool,
    /// Smallest gap between consecutive intervals along ℝ.
    pub min_gap: f64,
    /// Sampled ping-pong inclusions that failed.
    pub pingpong_failures: usize,
    /// Smallest `d(i, w(i))` over the tested reduced words.
    pub word_check: f64,
    pub words_tested: usize,
}

impl CertReport {
    pub fn passes(&self) -> bool {
        self.disjoint && self.pingpong_failures == 0 && self.word_check >= WORD_DISPLACEMENT_MIN
    }
}

fn boundary_samples(seq: &NestedSequence) -> Vec<f64> {
    let mut xs = vec![0.0];
    for pair in &seq.intervals {
        for iv in [pair.minus, pair.plus] {
            xs.extend([iv.lo, iv.hi, 0.5 * (iv.lo + iv.hi)]);
        }
    }
    for k in -20..=300 {
        let x = 10f64.powi(k);
        xs.extend([x, -x, 3.0 * x, -3.0 * x]);
    }
    xs
}

fn image_in(g: &MoebiusMap, x: BoundaryPoint, target: &Interval) -> bool {
    match g.apply_boundary(x) {
        BoundaryPoint::Real(y) => target.contains(y, 1e-9),
        BoundaryPoint::Infinity => false,
    }
}

/// Ping-pong certificate and reduced-word displacement check.
pub fn certify_schottky(seq: &NestedSequence) -> CertReport {
    let mut all: Vec<Interval> = seq
        .intervals
        .iter()
        .flat_map(|p| [p.minus, p.plus])
        .collect();
    all.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let min_gap = all
        .windows(2)
        .map(|w| w[1].lo - w[0].hi)
        .fold(f64::INFINITY, f64::min);
    let ordered = all.iter().all(|iv| iv.lo < iv.hi);
    let disjoint = ordered && min_gap > 0.0;

    let samples = boundary_samples(seq);
    let mut pingpong_failures = 0;
    for (g, pair) in seq.gens.iter().zip(&seq.intervals) {
        let g_inv = g.inverse();
        let outside = |iv: &Interval, x: f64| !iv.contains(x, 1e-12);
        if !image_in(g, BoundaryPoint::Infinity, &pair.plus) {
            pingpong_failures += 1;
        }
        if !image_in(&g_inv, BoundaryPoint::Infinity, &pair.minus) {
            pingpong_failures += 1;
        }
        for &x in &samples {
            if outside(&pair.minus, x) && !image_in(g, BoundaryPoint::Real(x), &pair.plus) {
                pingpong_failures += 1;
            }
            if outside(&pair.plus, x) && !image_in(&g_inv, BoundaryPoint::Real(x), &pair.minus) {
                pingpong_failures += 1;
            }
        }
    }

    let letters: Vec<MoebiusMap> = seq
        .gens
        .iter()
        .take(4)
        .flat_map(|g| [*g, g.inverse()])
        .collect();
    let mut word_check = f64::INFINITY;
    let mut words_tested = 0;
    // (word, last letter index): letter 2k is γ_k, 2k+1 its inverse.
    let mut frontier: Vec<(MoebiusMap, usize)> = vec![(MoebiusMap::IDENTITY, usize::MAX)];
    for _ in 0..4 {
        let mut next = Vec::new();
        for (w, last) in &frontier {
            for (j, letter) in letters.iter().enumerate() {
                if *last != usize::MAX && j == (*last ^ 1) {
                    continue;
                }
                let word = w.compose(letter);
                word_check = word_check.min(dist(HPoint::I, word.apply_point(HPoint::I)));
                words_tested += 1;
                next.push((word, j));
            }
        }
        frontier = next;
    }

    CertReport {
        disjoint,
        min_gap,
        pingpong_failures,
        word_check,
        words_tested,
    }
}
