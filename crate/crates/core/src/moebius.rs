//! Orientation-preserving isometries of the upper half-plane, stored as
//! projective real 2x2 matrices of determinant one.
//!
//! Every [`MoebiusMap`] is kept in a canonical representative: determinant
//! one and `c > 0`, or `c == 0` and `a > 0`. Two maps are then equal iff
//! their entries agree.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::hplane::HPoint;

/// Band on `|trace| - 2` inside which a map is treated as parabolic.
pub const TRACE_BAND: f64 = 1e-9;

/// Entrywise distance to `±identity` below which a map is the identity.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Point of the boundary at infinity `R ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Real(f64),
    Infinity,
}

impl BoundaryPoint {
    /// Finite boundary point; rejects NaN and infinities.
    pub fn real(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(BoundaryPoint::Real(x))
        } else {
            Err(Error::InvalidPoint(format!(
                "boundary value {x} is not finite"
            )))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn as_real(&self) -> Option<f64> {
        match *self {
            BoundaryPoint::Real(x) => Some(x),
            BoundaryPoint::Infinity => None,
        }
    }

    /// Boundary discrepancy scaled by `max(1, |x|)`; infinite when exactly
    /// one side is `∞`.
    pub fn gap(&self, other: &BoundaryPoint) -> f64 {
        match (*self, *other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => 0.0,
            (BoundaryPoint::Real(x), BoundaryPoint::Real(y)) => {
                (x - y).abs() / x.abs().max(y.abs()).max(1.0)
            }
            _ => f64::INFINITY,
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Real(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => write!(f, "∞"),
        }
    }
}

/// Conjugacy type of an isometry, read off from the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Fixed points and translation length of a hyperbolic isometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisData {
    /// Repulsive fixed point.
    pub minus: BoundaryPoint,
    /// Attractive fixed point.
    pub plus: BoundaryPoint,
    /// Translation length along the axis.
    pub length: f64,
}

/// `z ↦ (az + b)/(cz + d)` with `ad - bc = 1` in canonical sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds a map from any matrix with positive determinant, rescaling it
    /// to determinant one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::InvalidMatrix(format!(
                "determinant {det} is not positive"
            )));
        }
        let s = det.sqrt().recip();
        Ok(Self::canonical(a * s, b * s, c * s, d * s))
    }

    /// Applies the sign convention only. The caller guarantees `det = 1`.
    fn canonical(a: f64, b: f64, c: f64, d: f64) -> Self {
        if c < 0.0 || (c == 0.0 && a < 0.0) {
            MoebiusMap {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            MoebiusMap { a, b, c, d }
        }
    }

    /// Translation `z ↦ z + s`.
    pub fn translation(s: f64) -> Self {
        MoebiusMap {
            a: 1.0,
            b: s,
            c: 0.0,
            d: 1.0,
        }
    }

    /// Dilation `z ↦ λz`, `λ > 0`.
    pub fn dilation(lambda: f64) -> Self {
        let r = lambda.sqrt();
        MoebiusMap {
            a: r,
            b: 0.0,
            c: 0.0,
            d: r.recip(),
        }
    }

    /// Rotation about `i` sending `∞` to `cot(φ)`.
    pub fn rotation(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::canonical(c, -s, s, c)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    /// Largest entrywise deviation, minimised over the two projective signs.
    pub fn distance(&self, other: &MoebiusMap) -> f64 {
        let p = self.entries();
        let q = other.entries();
        let same = p
            .iter()
            .zip(q)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let flip = p
            .iter()
            .zip(q)
            .map(|(x, y)| (x + y).abs())
            .fold(0.0, f64::max);
        same.min(flip)
    }

    pub fn approx_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        // The product of two determinant-one matrices has determinant one;
        // the computed determinant is only trusted for drift correction when
        // it is not dominated by cancellation.
        let ad = a * d;
        let bc = b * c;
        if ad.abs() + bc.abs() <= 1e6 {
            let det = ad - bc;
            if det > 0.0 {
                let s = det.sqrt().recip();
                return Self::canonical(a * s, b * s, c * s, d * s);
            }
        }
        Self::canonical(a, b, c, d)
    }

    pub fn inverse(&self) -> MoebiusMap {
        Self::canonical(self.d, -self.b, -self.c, self.a)
    }

    /// Conjugate `f ∘ self ∘ f⁻¹`.
    pub fn conjugate_by(&self, f: &MoebiusMap) -> MoebiusMap {
        f.compose(self).compose(&f.inverse())
    }

    pub fn apply_boundary(&self, xi: BoundaryPoint) -> BoundaryPoint {
        match xi {
            BoundaryPoint::Real(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Real((self.a * x + self.b) / den)
                }
            }
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Real(self.a / self.c)
                }
            }
        }
    }

    pub fn apply_point(&self, z: HPoint) -> HPoint {
        // (az+b)/(cz+d) = (az+b)(c z̄+d)/|cz+d|²
        let (x, y) = (z.x(), z.y());
        let den_re = self.c * x + self.d;
        let den_im = self.c * y;
        let num_re = self.a * x + self.b;
        let num_im = self.a * y;
        let norm = den_re * den_re + den_im * den_im;
        let re = (num_re * den_re + num_im * den_im) / norm;
        // Im((az+b)(c z̄+d)) = (ad - bc) y
        let im = y / norm;
        HPoint::new_unchecked(re, im)
    }

    pub fn classify(&self) -> IsometryClass {
        let near_id = self.distance(&MoebiusMap::IDENTITY) <= IDENTITY_TOL;
        if near_id {
            return IsometryClass::Identity;
        }
        let gap = self.trace().abs() - 2.0;
        if gap > TRACE_BAND {
            IsometryClass::Hyperbolic
        } else if gap < -TRACE_BAND {
            IsometryClass::Elliptic
        } else {
            IsometryClass::Parabolic
        }
    }

    /// Fixed points and translation length. Fails unless the map classifies
    /// as hyperbolic.
    pub fn axis_data(&self) -> Result<AxisData> {
        if self.classify() != IsometryClass::Hyperbolic {
            return Err(Error::NotHyperbolic {
                trace: self.trace().abs(),
            });
        }
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        // sinh²(ℓ/2) = tr²/4 - 1 = (a-d)²/4 + bc; the right side avoids the
        // cancellation of the trace form for short translations.
        let mut disc = (a - d) * (a - d) + 4.0 * b * c;
        if !(disc > 0.0) {
            let tr = a + d;
            disc = (tr - 2.0) * (tr + 2.0);
        }
        let root = disc.sqrt();
        let length = 2.0 * (0.5 * root).asinh();

        if c == 0.0 {
            // z ↦ (a z + b)/d, multiplier a/d at ∞.
            let finite = BoundaryPoint::Real(b / (d - a));
            let (minus, plus) = if a.abs() > d.abs() {
                (finite, BoundaryPoint::Infinity)
            } else {
                (BoundaryPoint::Infinity, finite)
            };
            return Ok(AxisData {
                minus,
                plus,
                length,
            });
        }

        // c z² + (d - a) z - b = 0, stable root pair.
        let bq = d - a;
        let sign = if bq < 0.0 { -1.0 } else { 1.0 };
        let q = -0.5 * (bq + sign * root);
        let z1 = q / c;
        let z2 = -b / q;
        // |cz + d| > 1 at the attractive point since g'(z) = (cz+d)^-2.
        let k1 = (c * z1 + d).abs();
        let k2 = (c * z2 + d).abs();
        let (plus, minus) = if k1 >= k2 { (z1, z2) } else { (z2, z1) };
        Ok(AxisData {
            minus: BoundaryPoint::Real(minus),
            plus: BoundaryPoint::Real(plus),
            length,
        })
    }

    /// Hyperbolic map with repulsive point `minus`, attractive point `plus`
    /// and translation length `length`.
    pub fn hyperbolic_from_axis(
        minus: BoundaryPoint,
        plus: BoundaryPoint,
        length: f64,
    ) -> Result<MoebiusMap> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidMatrix(format!(
                "translation length {length} must be positive"
            )));
        }
        let h = 0.5 * length;
        let (sh, ch) = (h.sinh(), h.cosh());
        let k = h.exp();
        match (minus, plus) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => Err(Error::DegenerateAxis),
            (BoundaryPoint::Real(m), BoundaryPoint::Infinity) => {
                Ok(Self::canonical(k, -2.0 * m * sh, 0.0, k.recip()))
            }
            (BoundaryPoint::Infinity, BoundaryPoint::Real(p)) => {
                Ok(Self::canonical(k.recip(), 2.0 * p * sh, 0.0, k))
            }
            (BoundaryPoint::Real(m), BoundaryPoint::Real(p)) => {
                if m == p || !(m.is_finite() && p.is_finite()) {
                    return Err(Error::DegenerateAxis);
                }
                let w = p - m;
                let skew = (p + m) / w;
                Ok(Self::canonical(
                    ch + skew * sh,
                    -2.0 * p * (m / w) * sh,
                    2.0 * sh / w,
                    ch - skew * sh,
                ))
            }
        }
    }

    /// Derivative modulus `|g'(x)| = (cx + d)^-2` at a finite boundary point.
    pub fn boundary_derivative(&self, x: f64) -> f64 {
        let k = self.c * x + self.d;
        (k * k).recip()
    }
}

impl Mul for MoebiusMap {
    type Output = MoebiusMap;

    fn mul(self, rhs: MoebiusMap) -> MoebiusMap {
        self.compose(&rhs)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// `g(u) - g(v)` for finite or infinite `u`, `v`, evaluated without
/// subtracting the two images.
///
/// Returns the images together with their difference so chains of maps can
/// propagate a gap that is far below the resolution of the images.
pub fn image_difference(
    g: &MoebiusMap,
    u: BoundaryPoint,
    v: BoundaryPoint,
    diff: f64,
) -> (BoundaryPoint, BoundaryPoint, f64) {
    let (c, d) = (g.c, g.d);
    let gu = g.apply_boundary(u);
    let gv = g.apply_boundary(v);
    let new = match (u, v) {
        (BoundaryPoint::Real(x), BoundaryPoint::Real(y)) => diff / ((c * x + d) * (c * y + d)),
        (BoundaryPoint::Infinity, BoundaryPoint::Real(y)) => 1.0 / (c * (c * y + d)),
        (BoundaryPoint::Real(x), BoundaryPoint::Infinity) => -1.0 / (c * (c * x + d)),
        (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => 0.0,
    };
    (gu, gv, new)
}
