//! Fixtures shared by the benchmarks.

use capflow_core::anisotropy::{AnisotropySpec, MobilitySpec, Quadratic};
use capflow_core::geometry::{ContactAngleField, ConvexDomain2D, IntervalGrid, MappedGrid};
use capflow_core::Problem;

/// The interpolated energy used throughout the benchmarks.
pub fn interpolated(tau: f64) -> AnisotropySpec {
    let q = Quadratic::diagonal(&[1.0, 1.5, 2.0]).expect("diagonal is positive definite");
    AnisotropySpec::interpolated(tau, q).expect("tau in range")
}

/// Ellipse (2, 1) with a sinusoidal contact angle.
pub fn ellipse_problem(n_r: usize, n_phi: usize) -> Problem {
    let domain = ConvexDomain2D::ellipse(2.0, 1.0).expect("valid ellipse");
    let grid = MappedGrid::new(&domain, n_r, n_phi).expect("valid grid");
    let theta = ContactAngleField::Sinusoid { mean: 1.3, amp: 0.1, freq: 1 };
    Problem::contact_angle(grid, theta, interpolated(0.1), MobilitySpec::isotropic(2)).expect("valid problem")
}

/// The isotropic grim-reaper interval problem.
pub fn interval_problem(n_r: usize, theta: f64) -> Problem {
    let grid = IntervalGrid::new(1.0, n_r).expect("valid grid");
    Problem::interval(grid, theta, theta, AnisotropySpec::isotropic(1), MobilitySpec::isotropic(1)).expect("valid problem")
}
