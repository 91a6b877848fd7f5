//! Tropical series on convex domains and the wave operators `G_p`.

pub mod error;
pub mod geometry;
pub mod lift2;
mod par;
pub mod rat;
pub mod refine;
pub mod series;
pub mod stats;
pub mod svg;
pub mod curve;
mod surd;
pub mod wave;

pub use error::Error;
pub use geometry::{ConvexDomain, HalfPlane, LatticeVec, QPolygon};
pub use rat::{Point, Rat};
pub use series::{rho, QuasiDegree, TropicalSeries};
