//! Certificates and oracles for the a-priori estimates.

mod certificate;
mod certificates;
mod convergence;
mod oracle;
mod principles;
mod uniqueness;

pub use certificate::{Certificate, CertificateStatus, OracleResult};
pub use certificates::{
    dirichlet_normal_certificate, dirichlet_normal_certificate_for, dirichlet_rhs, frame_coefficient_bounds,
    gradient_certificate_contact, FrameCoefficientBounds,
};
pub use convergence::{check_oscillation_decay, check_translator_convergence, difference_oscillation, linear_fit, DECAY_FACTOR};
pub use oracle::{grim_reaper_oracle, grim_reaper_profile, grim_reaper_shooting, grim_reaper_speed, SHOOTING_AGREEMENT};
pub use principles::{check_gradient_boundary_principle, check_ut_principle, gradient_excess, ut_excess};
pub use uniqueness::{check_lambda_uniqueness, lambda_spread, LAMBDA_SPREAD_TOL};
