use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::domain::{norm, ConvexDomain2D};
use crate::error::{Error, Result};

/// Angles closer than this to `0` or `π` are rejected outright.
pub const ANGLE_GUARD: f64 = 1e-3;

/// Minimum number of boundary samples for [`check_contact_assumptions`].
pub const MIN_CONTACT_SAMPLES: usize = 256;

/// Prescribed contact angle `θ` along the boundary, as a function of the
/// curve parameter `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContactAngleField {
    Constant(f64),
    /// `mean + amp·sin(freq·φ)`.
    Sinusoid { mean: f64, amp: f64, freq: u32 },
}

impl ContactAngleField {
    pub fn value(&self, phi: f64) -> f64 {
        match *self {
            Self::Constant(t) => t,
            Self::Sinusoid { mean, amp, freq } => mean + amp * (freq as f64 * phi).sin(),
        }
    }

    /// `dθ/dφ`.
    pub fn dphi(&self, phi: f64) -> f64 {
        match *self {
            Self::Constant(_) => 0.0,
            Self::Sinusoid { amp, freq, .. } => amp * freq as f64 * (freq as f64 * phi).cos(),
        }
    }

    /// Tangential derivative `D_T θ = θ'(φ) / |B'(φ)|`.
    pub fn tangential_derivative(&self, domain: &ConvexDomain2D, phi: f64) -> f64 {
        self.dphi(phi) / norm(domain.d1(phi))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_)) || matches!(self, Self::Sinusoid { amp, .. } if *amp == 0.0)
    }

    /// Config spelling: `const:<v>` or `sinusoid:<mean>:<amp>:<freq>`.
    pub fn describe(&self) -> String {
        match *self {
            Self::Constant(t) => format!("const:{t:?}"),
            Self::Sinusoid { mean, amp, freq } => format!("sinusoid:{mean:?}:{amp:?}:{freq}"),
        }
    }
}

/// `cos θ`, computed as `sin(π/2 - θ)` so that `θ = π/2` gives exactly zero.
#[inline]
pub fn cos_angle(theta: f64) -> f64 {
    (FRAC_PI_2 - theta).sin()
}

/// Outcome of the contact-angle assumption check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactAssumptions {
    pub pass: bool,
    /// `min (k − |D_T θ|)` over the samples.
    pub delta0: f64,
    /// `min(min θ, π − max θ)`.
    pub theta0: f64,
    /// Parameter where `k − |D_T θ|` is smallest.
    pub worst_phi: f64,
    pub n_samples: usize,
}

/// Samples `θ` at `n_samples` uniformly spaced parameters and measures the
/// margins `δ₀`, `θ₀`.
///
/// An angle outside `(0, π)`, or within [`ANGLE_GUARD`] of either end, is an
/// error naming the offending parameter; a non-positive margin is reported
/// through `pass = false`.
pub fn check_contact_assumptions(
    domain: &ConvexDomain2D,
    theta: &ContactAngleField,
    n_samples: usize,
) -> Result<ContactAssumptions> {
    if n_samples < MIN_CONTACT_SAMPLES {
        return Err(Error::domain(format!(
            "contact angle needs at least {MIN_CONTACT_SAMPLES} samples, got {n_samples}"
        )));
    }
    let mut delta0 = f64::INFINITY;
    let mut worst_phi = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n_samples {
        let phi = TAU * i as f64 / n_samples as f64;
        let t = theta.value(phi);
        check_angle(t, phi)?;
        lo = lo.min(t);
        hi = hi.max(t);
        let margin = domain.curvature_at(phi) - theta.tangential_derivative(domain, phi).abs();
        if margin < delta0 {
            delta0 = margin;
            worst_phi = phi;
        }
    }
    let theta0 = lo.min(PI - hi);
    Ok(ContactAssumptions { pass: delta0 > 0.0 && theta0 > 0.0, delta0, theta0, worst_phi, n_samples })
}

pub(crate) fn check_angle(t: f64, location: f64) -> Result<()> {
    if !(t > ANGLE_GUARD && t < PI - ANGLE_GUARD) {
        return Err(Error::Assumption {
            name: "A2",
            detail: format!("contact angle {t} at boundary parameter {location:.6} is not inside (0, π)"),
        });
    }
    Ok(())
}
