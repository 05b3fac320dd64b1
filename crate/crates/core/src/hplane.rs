//! Points, distances, geodesics and Busemann cocycles in the upper
//! half-plane model.

use crate::error::{Error, Result};
use crate::moebius::BoundaryPoint;
use crate::tangent::UnitVector;

/// Point `x + iy` of the upper half-plane, `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    x: f64,
    y: f64,
}

impl HPoint {
    pub const I: HPoint = HPoint { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && y > 0.0 {
            Ok(HPoint { x, y })
        } else {
            Err(Error::InvalidPoint(format!(
                "({x}, {y}) is not in the upper half-plane"
            )))
        }
    }

    /// For images of valid points under isometries, where `y > 0` holds by
    /// construction.
    pub(crate) fn new_unchecked(x: f64, y: f64) -> Self {
        debug_assert!(!(y <= 0.0), "height {y} must be positive");
        HPoint { x, y }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// Unoriented geodesic, given by its two boundary endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    pub e1: BoundaryPoint,
    pub e2: BoundaryPoint,
}

impl Geodesic {
    pub fn new(e1: BoundaryPoint, e2: BoundaryPoint) -> Result<Self> {
        if e1 == e2 {
            return Err(Error::DegenerateAxis);
        }
        Ok(Geodesic { e1, e2 })
    }

    /// Same geodesic, comparing endpoints as an unordered pair.
    pub fn approx_eq(&self, other: &Geodesic, tol: f64) -> bool {
        let direct = self.e1.gap(&other.e1).max(self.e2.gap(&other.e2));
        let swapped = self.e1.gap(&other.e2).max(self.e2.gap(&other.e1));
        direct.min(swapped) <= tol
    }

    /// Endpoints sorted with `∞` last.
    fn sorted(&self) -> (BoundaryPoint, BoundaryPoint) {
        match (self.e1, self.e2) {
            (BoundaryPoint::Infinity, e) => (e, BoundaryPoint::Infinity),
            (BoundaryPoint::Real(p), BoundaryPoint::Real(q)) if q < p => {
                (BoundaryPoint::Real(q), BoundaryPoint::Real(p))
            }
            (e1, e2) => (e1, e2),
        }
    }
}

/// Comparison tolerances shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// General comparisons.
    pub eq: f64,
    /// Limit-versus-closed-form comparisons.
    pub oracle: f64,
    /// Truncation time for limit oracles.
    pub horizon: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eq: 1e-9,
            oracle: 1e-6,
            horizon: 40.0,
        }
    }
}

/// Hyperbolic distance, from `sinh(d/2) = |z - w| / (2 sqrt(Im z Im w))`.
pub fn dist(z: HPoint, w: HPoint) -> f64 {
    let chord = (z.x - w.x).hypot(z.y - w.y);
    2.0 * (0.5 * chord / (z.y.sqrt() * w.y.sqrt())).asinh()
}

/// Geodesic through two distinct points.
pub fn geodesic_through(z: HPoint, w: HPoint) -> Result<Geodesic> {
    if z == w {
        return Err(Error::CoincidentPoints);
    }
    if z.x == w.x {
        return Ok(Geodesic {
            e1: BoundaryPoint::Real(z.x),
            e2: BoundaryPoint::Infinity,
        });
    }
    let center = ((z.x * z.x + z.y * z.y) - (w.x * w.x + w.y * w.y)) / (2.0 * (z.x - w.x));
    let radius = (z.x - center).hypot(z.y);
    // Endpoints solve x² - 2cx + (c² - R²) = 0 with c² - R² = 2c·x_z - |z|².
    let big = if center >= 0.0 {
        center + radius
    } else {
        center - radius
    };
    let product = 2.0 * center * z.x - (z.x * z.x + z.y * z.y);
    let small = product / big;
    Ok(Geodesic {
        e1: BoundaryPoint::Real(small.min(big)),
        e2: BoundaryPoint::Real(small.max(big)),
    })
}

/// Endpoint of the geodesic through `z` and `w` reached by leaving `z`
/// towards `w`.
pub fn endpoint_beyond(z: HPoint, w: HPoint) -> Result<BoundaryPoint> {
    let geo = geodesic_through(z, w)?;
    let (lo, hi) = geo.sorted();
    Ok(match hi {
        BoundaryPoint::Infinity => {
            if w.y > z.y {
                BoundaryPoint::Infinity
            } else {
                lo
            }
        }
        _ => {
            if w.x > z.x {
                hi
            } else {
                lo
            }
        }
    })
}

/// Busemann cocycle `B_ξ(x, y)` in closed form.
pub fn busemann(xi: BoundaryPoint, x: HPoint, y: HPoint) -> f64 {
    match xi {
        BoundaryPoint::Infinity => y.y.ln() - x.y.ln(),
        BoundaryPoint::Real(p) => {
            let kx = (x.x - p) * (x.x - p) + x.y * x.y;
            let ky = (y.x - p) * (y.x - p) + y.y * y.y;
            (y.y.ln() + kx.ln()) - (x.y.ln() + ky.ln())
        }
    }
}

/// `d(x, σ(T)) - d(y, σ(T))` along the unit-speed ray `σ` from `i` to `ξ`.
pub fn busemann_oracle(xi: BoundaryPoint, x: HPoint, y: HPoint, horizon: f64) -> f64 {
    let sigma = UnitVector::frame_from(HPoint::I, xi).eval(horizon);
    dist(x, sigma) - dist(y, sigma)
}

/// Time at which the geodesic of `ray_frame` crosses `geo`.
///
/// With `full == false` only crossings of the forward ray (`t ≥ 0`) count.
/// Returns `None` when the geodesics are disjoint, asymptotic or equal.
pub fn cross_time(ray_frame: &UnitVector, geo: &Geodesic, full: bool) -> Option<f64> {
    let back = ray_frame.frame().inverse();
    let p = back.apply_boundary(geo.e1);
    let q = back.apply_boundary(geo.e2);
    let (p, q) = match (p, q) {
        (BoundaryPoint::Real(p), BoundaryPoint::Real(q)) => (p, q),
        _ => return None,
    };
    let product = p * q;
    // Endpoints must straddle the vertical axis strictly; an endpoint within
    // 1e-12 (relative) of 0 is a tangency-like configuration.
    let scale = p.abs().max(q.abs()).max(1.0);
    if !(product < 0.0) || p.abs().min(q.abs()) <= 1e-12 * scale {
        return None;
    }
    // crossing height sqrt(-pq)
    let t = 0.5 * (p.abs().ln() + q.abs().ln());
    if full || t >= -1e-12 {
        Some(t)
    } else {
        None
    }
}

/// Distance from `z` to a geodesic.
pub fn dist_to_geodesic(z: HPoint, geo: &Geodesic) -> f64 {
    match geo.sorted() {
        (BoundaryPoint::Real(x0), BoundaryPoint::Infinity) => ((z.x - x0).abs() / z.y).asinh(),
        (BoundaryPoint::Real(p), BoundaryPoint::Real(q)) => {
            // sinh d = |(x-p)(x-q) + y²| / (y |p - q|)
            let num = ((z.x - p) * (z.x - q) + z.y * z.y).abs();
            (num / (z.y * (q - p))).asinh()
        }
        _ => unreachable!("geodesic endpoints are distinct"),
    }
}
