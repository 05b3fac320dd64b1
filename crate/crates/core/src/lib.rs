//! Hyperbolic plane geometry for winding geodesic rays around short closed
//! geodesics: Möbius maps, unit tangent frames and their flows, winding
//! operators, nested Schottky sequences and the wound vector `w_α`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod hplane;
pub mod moebius;
pub mod sampling;
pub mod schottky;
pub mod tangent;
pub mod walpha;
pub mod winding;

pub use error::{Error, Result};
pub use hplane::{Geodesic, HPoint, Tolerances};
pub use moebius::{AxisData, BoundaryPoint, IsometryClass, MoebiusMap};
pub use tangent::{AnglePair, UnitVector};
pub use winding::{KeyBoundReport, WindingResult};
