use crate::error::{Error, Result};
use crate::solver::{osc, Trajectory, TranslatorResult};

use super::certificate::{Certificate, CertificateStatus};

/// Required reduction of the tracked oscillation by the end of a run.
pub const DECAY_FACTOR: f64 = 0.1;

fn aligned<'a>(a: &'a Trajectory, b: &'a Trajectory) -> Result<Vec<(f64, &'a [f64], &'a [f64])>> {
    if a.snapshots.len() != b.snapshots.len() || a.snapshots.len() < 2 {
        return Err(Error::domain("trajectories need at least two matching snapshots"));
    }
    a.snapshots
        .iter()
        .zip(&b.snapshots)
        .map(|(x, y)| {
            if (x.t - y.t).abs() > 1e-12 * x.t.abs().max(1.0) || x.u.len() != y.u.len() {
                Err(Error::domain(format!("snapshots at t = {} and t = {} do not align", x.t, y.t)))
            } else {
                Ok((x.t, x.u.as_slice(), y.u.as_slice()))
            }
        })
        .collect()
}

/// `osc(u₁ − u₂)` over the snapshots of two runs of the same problem is
/// non-increasing up to `5(h² + dt)` and falls to a tenth of its initial
/// value. The certificate is normalized: `measured` is the larger of
/// `max increase / tol` and `(final / initial) / 0.1`, against bound 1.
pub fn check_oscillation_decay(a: &Trajectory, b: &Trajectory) -> Result<Certificate> {
    let pairs = aligned(a, b)?;
    let tol = a.tol_mp().max(b.tol_mp());
    let series: Vec<f64> = pairs
        .iter()
        .map(|(_, x, y)| osc(&x.iter().zip(y.iter()).map(|(p, q)| p - q).collect::<Vec<_>>()))
        .collect();
    let initial = series[0];
    let last = *series.last().unwrap();
    let mut increase: f64 = 0.0;
    for w in series.windows(2) {
        increase = increase.max(w[1] - w[0]);
    }
    let decay = if initial <= 1e-14 { 0.0 } else { last / initial / DECAY_FACTOR };
    let measured = (increase / tol).max(decay);
    Ok(Certificate::check("oscillation_decay", 1.0, measured)
        .constant("osc_initial", initial)
        .constant("osc_final", last)
        .constant("max_increase", increase)
        .constant("tol_mp", tol))
}

/// `osc(u₁ − u₂)` at each aligned snapshot.
pub fn difference_oscillation(a: &Trajectory, b: &Trajectory) -> Result<Vec<(f64, f64)>> {
    Ok(aligned(a, b)?
        .into_iter()
        .map(|(t, x, y)| (t, osc(&x.iter().zip(y).map(|(p, q)| p - q).collect::<Vec<_>>())))
        .collect())
}

/// Least-squares line through `(x, y)`: slope and `R²`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, r2)
}

/// `u(t) − λt` approaches the translator profile.
///
/// With `d(t) = osc(u − λt − w)` and `S(t) = sup|u − λt|` over the
/// snapshots, the normalized scores are `(max S on the second half − max S
/// on the first half) / tol` (boundedness) and `d_end / max(0.1·d₀, tol)`
/// (convergence). For Dirichlet problems `log d` over the second half must
/// also fit a line with negative slope and `R² > 0.9`; the certificate
/// fails otherwise. Points where `d` has reached the accuracy of `w` itself
/// (ten times its residual) are left out of the fit.
pub fn check_translator_convergence(traj: &Trajectory, tr: &TranslatorResult, dirichlet: bool) -> Result<Certificate> {
    const NAME: &str = "translator_convergence";
    if !tr.relax_converged && !tr.direct_steady {
        return Ok(Certificate::with_status(NAME, CertificateStatus::Inconclusive, "translator did not converge"));
    }
    let w = if tr.w_direct.is_empty() { &tr.w } else { &tr.w_direct };
    if traj.snapshots.len() < 4 {
        return Err(Error::domain("need at least four snapshots"));
    }
    let tol = traj.tol_mp();
    let mut times = Vec::new();
    let mut d = Vec::new();
    let mut s = Vec::new();
    for snap in &traj.snapshots {
        if snap.u.len() != w.len() {
            return Err(Error::domain("snapshot does not match the translator mesh"));
        }
        let shifted: Vec<f64> = snap.u.iter().map(|u| u - tr.lambda * snap.t).collect();
        s.push(shifted.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
        d.push(osc(&shifted.iter().zip(w).map(|(a, b)| a - b).collect::<Vec<_>>()));
        times.push(snap.t);
    }
    let half = times.len() / 2;
    let first = s[..half].iter().cloned().fold(0.0, f64::max);
    let second = s[half..].iter().cloned().fold(0.0, f64::max);
    let bounded = (second - first) / tol;
    let end = *d.last().unwrap();
    let converge = end / (DECAY_FACTOR * d[0]).max(tol);
    let mut cert = Certificate::check(NAME, 1.0, bounded.max(converge))
        .constant("lambda", tr.lambda)
        .constant("sup_shifted_first_half", first)
        .constant("sup_shifted_second_half", second)
        .constant("osc_initial", d[0])
        .constant("osc_final", end)
        .constant("tol_mp", tol);
    if dirichlet {
        let floor = (10.0 * tr.residual).max(1e-12);
        let tail: Vec<(f64, f64)> = times[half..]
            .iter()
            .zip(&d[half..])
            .filter(|(_, v)| **v > floor)
            .map(|(t, v)| (*t, v.ln()))
            .collect();
        let (slope, r2) = if tail.len() >= 3 {
            let (x, y): (Vec<f64>, Vec<f64>) = tail.into_iter().unzip();
            linear_fit(&x, &y)
        } else {
            (f64::NAN, f64::NAN)
        };
        cert = cert.constant("log_slope", slope).constant("log_r2", r2).constant("fit_floor", floor);
        if !(slope < 0.0 && r2 > 0.9) {
            cert.pass = false;
            cert.status = CertificateStatus::Fail;
            cert.note = format!("log-linear fit of the tail: slope {slope:.3e}, R² {r2:.3}");
        }
    }
    Ok(cert)
}
