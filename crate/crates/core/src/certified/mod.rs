//! Certified decisions for expanding parameters.
//!
//! For an expanding parameter every cycle of `tau_r` lies in a finite ball
//! of an adapted norm, so membership is decided by exhaustive search over
//! that ball. Rectangles of parameters are handled by making the ball
//! uniform over the rectangle and splitting it where the cycle structure
//! changes.

use thiserror::Error;

use crate::error::SrsError;

mod norm;
mod polygon;
mod region;
mod witness;

pub use norm::{
    build_norm, expanding_margin, BasisKind, ExpandingMargin, NormCertificate, VectorNorm,
    MARGIN_FLOOR,
};
pub use polygon::{Line, Polygon, Side, Q};
pub use region::{
    arrangement, cut_lines, cycle_polygons, decide_region, decide_region_with, rect_is_expanding,
    subdivide_region, total_area, uniformity_defect, CellDecision, CellVerdict, RationalRect, RegionOptions,
};
pub use witness::{
    decide_point, decide_point_report, decide_point_with, witness_cycles, witness_set,
    witness_set_limited, DecideOptions, PointDecision, WitnessSet, MAX_BOX_POINTS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error("parameter is not expanding")]
    NotExpanding,

    #[error("expansion margin {margin:e} is too small to certify")]
    MarginTooSmall { margin: f64 },

    #[error("rho = {rho} must satisfy 1 < rho < {limit}")]
    RhoOutOfRange { rho: f64, limit: f64 },

    #[error("witness box would hold {points} points")]
    WitnessExplosion { points: u128 },

    #[error("adapted norm does not expand uniformly on {0}; bisect it")]
    UniformityFailure(String),

    #[error("arrangement exceeds {0} cells")]
    CellExplosion(usize),

    #[error("invalid rectangle: {0}")]
    InvalidRect(String),

    #[error("inconsistent cell decision: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Srs(#[from] SrsError),
}
