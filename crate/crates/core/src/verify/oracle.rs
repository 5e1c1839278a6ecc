use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::check_angle;

use super::certificate::OracleResult;

/// Agreement required between the closed form and the shooting solution
/// before the oracle is trusted.
pub const SHOOTING_AGREEMENT: f64 = 1e-8;
const SHOOTING_STEPS: usize = 4000;

/// Speed of the isotropic translator on `(−L, L)` with contact angle `θ` at
/// both ends.
pub fn grim_reaper_speed(theta: f64, half_length: f64) -> f64 {
    (FRAC_PI_2 - theta) / half_length
}

/// Translator profile `−ln cos(λx)/λ`, identically zero when `λ = 0`.
pub fn grim_reaper_profile(theta: f64, half_length: f64, x: f64) -> f64 {
    let lambda = grim_reaper_speed(theta, half_length);
    if lambda.abs() < 1e-14 {
        return 0.0;
    }
    -(lambda * x).cos().ln() / lambda
}

/// Slope at `x = L` after integrating `q' = λ(1 + q²)` from `q(−L) = −cot θ`
/// with classical RK4; `+∞` if the slope blows up on the way.
fn shoot(lambda: f64, q0: f64, half_length: f64, steps: usize) -> f64 {
    let h = 2.0 * half_length / steps as f64;
    let f = |q: f64| lambda * (1.0 + q * q);
    let mut q = q0;
    for _ in 0..steps {
        let k1 = f(q);
        let k2 = f(q + 0.5 * h * k1);
        let k3 = f(q + 0.5 * h * k2);
        let k4 = f(q + h * k3);
        q += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !q.is_finite() || q.abs() > 1e12 {
            return f64::INFINITY * lambda.signum();
        }
    }
    q
}

/// Speed found by shooting on the slope equation and bisecting on the
/// right-hand contact condition. Independent of the closed form.
pub fn grim_reaper_shooting(theta: f64, half_length: f64) -> Result<f64> {
    check_angle(theta, -half_length)?;
    if !(half_length > 0.0) {
        return Err(Error::domain("half-length must be positive"));
    }
    let cot = theta.cos() / theta.sin();
    // Beyond these speeds the slope blows up before reaching x = L.
    let mut lo = -0.999 * theta / (2.0 * half_length);
    let mut hi = 0.999 * (std::f64::consts::PI - theta) / (2.0 * half_length);
    let residual = |l: f64| shoot(l, -cot, half_length, SHOOTING_STEPS) - cot;
    if residual(lo) > 0.0 || residual(hi) < 0.0 {
        return Err(Error::Inconclusive("shooting bracket does not contain a root".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Compares a numerical translator speed with the closed-form one, after
/// confirming the closed form against shooting.
pub fn grim_reaper_oracle(theta: f64, half_length: f64, numerical: f64, resolution: usize) -> Result<OracleResult> {
    let exact = grim_reaper_speed(theta, half_length);
    let shot = grim_reaper_shooting(theta, half_length)?;
    if (exact - shot).abs() > SHOOTING_AGREEMENT {
        return Err(Error::Inconclusive(format!(
            "closed form {exact:.12} and shooting {shot:.12} disagree"
        )));
    }
    Ok(OracleResult::new(vec![exact], vec![numerical], resolution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn shooting_matches_closed_form() {
        for &t in &[PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, 0.2, 2.9] {
            let s = grim_reaper_shooting(t, 1.0).unwrap();
            assert!((s - grim_reaper_speed(t, 1.0)).abs() < 1e-9, "theta {t}: {s}");
        }
        let s = grim_reaper_shooting(PI / 4.0, 2.5).unwrap();
        assert!((s - PI / 10.0).abs() < 1e-9);
    }

    #[test]
    fn profile_solves_the_translator_equation() {
        let (t, l) = (PI / 3.0, 1.0);
        let lambda = grim_reaper_speed(t, l);
        let h = 1e-4;
        for &x in &[-0.9, -0.3, 0.0, 0.5, 0.95] {
            let w = |x| grim_reaper_profile(t, l, x);
            let d1 = (w(x + h) - w(x - h)) / (2.0 * h);
            let d2 = (w(x + h) - 2.0 * w(x) + w(x - h)) / (h * h);
            assert!((d2 / (1.0 + d1 * d1) - lambda).abs() < 1e-6);
        }
        let slope = (grim_reaper_profile(t, l, l) - grim_reaper_profile(t, l, l - h)) / h;
        assert!((slope - 1.0 / t.tan()).abs() < 1e-3);
    }

    #[test]
    fn oracle_reports_relative_error() {
        let r = grim_reaper_oracle(PI / 3.0, 1.0, PI / 6.0 * 1.01, 100).unwrap();
        assert!((r.rel_error - 0.01).abs() < 1e-12);
        assert!(grim_reaper_oracle(0.0, 1.0, 0.0, 1).is_err());
    }
}
