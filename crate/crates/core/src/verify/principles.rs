use crate::error::{Error, Result};
use crate::solver::Trajectory;

use super::certificate::Certificate;

fn first(traj: &Trajectory) -> Result<&crate::solver::Sample> {
    traj.samples.first().ok_or_else(|| Error::domain("empty trajectory"))
}

/// `max_t sup|u_t| ≤ sup|u_t|(0) + 5(h² + dt)`.
pub fn check_ut_principle(traj: &Trajectory) -> Result<Certificate> {
    let s0 = first(traj)?;
    let tol = traj.tol_mp();
    let measured = traj.samples.iter().map(|s| s.sup_ut).fold(0.0, f64::max);
    Ok(Certificate::check("ut_max_principle", s0.sup_ut + tol, measured)
        .constant("C2", s0.sup_ut)
        .constant("tol_mp", tol)
        .constant("h", traj.h)
        .constant("dt", traj.dt_max))
}

/// How far `max_t sup|u_t|` rises above its initial value (zero if it never
/// does).
pub fn ut_excess(traj: &Trajectory) -> Result<f64> {
    let s0 = first(traj)?;
    let m = traj.samples.iter().map(|s| s.sup_ut).fold(0.0, f64::max);
    Ok((m - s0.sup_ut).max(0.0))
}

/// Interior `|Du|` never exceeds its values on the parabolic boundary (all
/// nodes at `t = 0`, boundary nodes at all times) by more than `5(h² + dt)`.
pub fn check_gradient_boundary_principle(traj: &Trajectory) -> Result<Certificate> {
    let s0 = first(traj)?;
    let tol = traj.tol_mp();
    let parabolic = traj.samples.iter().map(|s| s.sup_du_boundary).fold(s0.sup_du, f64::max);
    let interior = traj.samples.iter().map(|s| s.sup_du_interior).fold(0.0, f64::max);
    Ok(Certificate::check("gradient_parabolic_boundary", parabolic + tol, interior)
        .constant("sup_du_initial", s0.sup_du)
        .constant("sup_du_parabolic_boundary", parabolic)
        .constant("tol_mp", tol))
}

/// How far interior `|Du|` rises above its parabolic-boundary maximum.
pub fn gradient_excess(traj: &Trajectory) -> Result<f64> {
    let s0 = first(traj)?;
    let parabolic = traj.samples.iter().map(|s| s.sup_du_boundary).fold(s0.sup_du, f64::max);
    let interior = traj.samples.iter().map(|s| s.sup_du_interior).fold(0.0, f64::max);
    Ok((interior - parabolic).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Sample;

    fn sample(t: f64, ut: f64, du_in: f64, du_bd: f64) -> Sample {
        Sample {
            t,
            sup_du: du_in.max(du_bd),
            sup_ut: ut,
            osc: 0.0,
            mean_ut: 0.0,
            std_ut: 0.0,
            sup_du_interior: du_in,
            sup_du_boundary: du_bd,
            sup_v: 1.0,
            sup_dn_boundary: 0.0,
        }
    }

    fn traj(samples: Vec<Sample>) -> Trajectory {
        Trajectory { samples, snapshots: vec![], h: 0.01, h_min: 0.01, dt_max: 1e-5, dt_min: 1e-5, steps: 3, steady: false }
    }

    #[test]
    fn empty_trajectory_is_a_domain_error() {
        assert!(check_ut_principle(&traj(vec![])).is_err());
        assert!(check_gradient_boundary_principle(&traj(vec![])).is_err());
    }

    #[test]
    fn injected_faults_fail() {
        let mut t = traj(vec![sample(0.0, 1.0, 0.5, 0.6), sample(0.1, 0.8, 0.5, 0.6), sample(0.2, 0.5, 0.4, 0.5)]);
        assert!(check_ut_principle(&t).unwrap().pass);
        assert!(check_gradient_boundary_principle(&t).unwrap().pass);
        t.samples[1].sup_ut = 1.1;
        assert!(!check_ut_principle(&t).unwrap().pass);
        t.samples[2].sup_du_interior = 0.7;
        assert!(!check_gradient_boundary_principle(&t).unwrap().pass);
    }
}
