use crate::error::{Error, Result};
use crate::solver::{compatibilize, run_flow, Problem, SolverConfig, Stop};

use super::certificate::{Certificate, CertificateStatus};

pub const LAMBDA_SPREAD_TOL: f64 = 1e-3;

/// `max |λᵢ − median λ|` over speeds measured from different initial data.
pub fn lambda_spread(lambdas: &[f64]) -> Result<Certificate> {
    if lambdas.is_empty() {
        return Err(Error::domain("no speeds to compare"));
    }
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 { sorted[k / 2] } else { 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]) };
    let spread = lambdas.iter().fold(0.0_f64, |m, l| m.max((l - median).abs()));
    let mut cert = Certificate::check("lambda_uniqueness", LAMBDA_SPREAD_TOL, spread).constant("median", median);
    for (i, l) in lambdas.iter().enumerate() {
        cert = cert.constant(&format!("lambda_{i}"), *l);
    }
    Ok(cert)
}

/// Flows each initial datum (after compatible correction) to a steady
/// translation and compares the terminal speeds. Inconclusive if any run
/// stops at `max_time` before becoming steady.
pub fn check_lambda_uniqueness(
    problem: &Problem,
    initial: &[Vec<f64>],
    max_time: f64,
    config: &SolverConfig,
) -> Result<Certificate> {
    let mut lambdas = Vec::with_capacity(initial.len());
    for u0 in initial {
        let u0 = compatibilize(problem, u0)?;
        let (_, traj) = run_flow(problem, u0, Stop::Steady { max_time }, config)?;
        if !traj.steady {
            return Ok(Certificate::with_status(
                "lambda_uniqueness",
                CertificateStatus::Inconclusive,
                format!("run {} not steady by t = {max_time}", lambdas.len()),
            ));
        }
        lambdas.push(traj.terminal_speed().unwrap_or(f64::NAN));
    }
    lambda_spread(&lambdas)
}
