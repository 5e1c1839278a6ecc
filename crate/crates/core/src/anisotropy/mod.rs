//! Homogeneous anisotropies `F`, mobilities `G` and the constants derived
//! from them.

mod bounds;
mod coefficients;
mod family;
mod gamma;
mod sampling;

pub use bounds::{estimate_constants, max_admissible_tau, BoundsReport, CONVEXITY_TOL, MIN_SAMPLES};
pub use coefficients::{coefficient_matrix, coefficient_matrix_decomposed, CoefficientMatrix};
pub(crate) use coefficients::assemble_direct;
pub use family::{
    AnisotropyFamily, AnisotropySpec, MobilityFamily, MobilitySpec, Quadratic, SphereFn,
    UserAnisotropy, VectorFn, FD_STEP, FD_STEP_HESSIAN,
};
pub use gamma::{check_curvature_condition, gamma_constants, CurvatureCheck, GammaConstants};
pub use sampling::{sphere_points, DEFAULT_SPHERE_SAMPLES, HIGH_DIM_SEED};
