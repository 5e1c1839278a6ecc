//! Convex planar domains, boundary frames, contact angles and the grids the
//! solver runs on.

mod contact;
mod domain;
mod grid;

pub use contact::{
    check_contact_assumptions, cos_angle, ContactAngleField, ContactAssumptions, ANGLE_GUARD,
    MIN_CONTACT_SAMPLES,
};
pub(crate) use contact::check_angle;
pub use domain::{BoundaryFrame, ConvexDomain2D, DEFAULT_ASPECT_CAP};
pub use grid::{IntervalGrid, MappedGrid, Mesh, MIN_ANGLES, MIN_RINGS};
