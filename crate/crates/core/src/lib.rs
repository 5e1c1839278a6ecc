//! Graphical anisotropic mean curvature flow over planar convex domains.
//!
//! The crate evolves `u_t = G(Du,-1) D²_p F(Du,-1) : D²u` on a boundary-fitted
//! polar grid (or an interval in one dimension) with either a prescribed
//! contact angle or Dirichlet data on the boundary, computes translating
//! solutions `w + λt`, and turns the a-priori estimates for this flow into
//! executable certificates.
//!
//! Module map:
//!
//! * [`anisotropy`] — homogeneous surface energies `F`, mobilities `G`, the
//!   sphere-sampled constants `m₀, M₀, m₁, m₂, g₀, G₀` and the Dirichlet
//!   `γ₁, γ₂` arithmetic.
//! * [`geometry`] — convex boundary curves, Frenet frames, contact-angle
//!   fields and the mapped grids the solver runs on.
//! * [`solver`] — explicit time stepping, ghost-node boundary closure, initial
//!   data compatibility and the translator solver.
//! * [`verify`] — maximum-principle monitors, gradient certificates and
//!   analytic oracles.

pub mod anisotropy;
pub mod error;
pub mod geometry;
pub mod initial;
pub mod solver;
pub mod verify;

pub use anisotropy::{
    check_curvature_condition, coefficient_matrix, coefficient_matrix_decomposed,
    estimate_constants, gamma_constants, AnisotropySpec, BoundsReport, CoefficientMatrix,
    CurvatureCheck, GammaConstants, MobilitySpec, Quadratic,
};
pub use error::{Error, Result};
pub use geometry::{
    check_contact_assumptions, BoundaryFrame, ContactAngleField, ContactAssumptions,
    ConvexDomain2D, IntervalGrid, MappedGrid, Mesh,
};
pub use solver::{
    apply_operator, compatibilize, ghost_normal_derivative, run_dirichlet, run_flow,
    solve_translator, BoundaryData, BoundaryMode, DirichletProfile, FlowState, Problem,
    SolverConfig, Stop, Trajectory, TranslatorResult,
};
pub use verify::{Certificate, CertificateStatus, OracleResult};
