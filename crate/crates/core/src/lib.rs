//! Two-row intersection-cut machinery over exact rational arithmetic.
//!
//! The crate builds gauge functions of maximal lattice-free sets in the
//! plane (splits, triangles, quadrilaterals), generates the corresponding
//! cut coefficients for relaxed-corner-polyhedron instances, and runs the
//! sweep harnesses that numerically certify two closure-approximation
//! bounds: the 1.71 upper bound for the quadrilateral closure and the
//! 1.125 lower-bound family for the triangle closure.
//!
//! Everything is computed in arbitrary-precision rationals; there is no
//! floating point on any decision path. Decimal renderings exist only in
//! report output, next to the exact numerator/denominator columns.

pub mod gauge;
pub mod geom2d;
pub mod latticefree;
pub mod lb_bounds;
pub mod lp;
pub mod report;
pub mod sweep;
pub mod ub_bounds;

pub use geom2d::{rat, rat_i, ClosureMode, ConvexBody2, ConvexPolygon, HalfPlane, Point2, Rat, Strip};
pub use latticefree::{Classification, LatticeFreeSet, SlopeParams, SubclassGQuad};

/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate line: the two defining points coincide")]
    DegenerateLine,
    #[error("operation requires a bounded body")]
    UnboundedBody,
    #[error("point is not strictly interior to the body")]
    NotInterior,
    #[error("ray direction must be nonzero")]
    ZeroRay,
    #[error("rays are linearly dependent")]
    SingularBasis,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("body is not maximal lattice-free")]
    NotMaximalLatticeFree,
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("ray {0} is not a convex combination of two corner rays")]
    ReductionInvalid(usize),
    #[error("empty grid")]
    EmptyGrid,
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
