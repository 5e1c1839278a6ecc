use super::bounds::BoundsReport;
use crate::error::{Error, Result};

/// Dirichlet-problem constants built from a [`BoundsReport`] and the bound
/// `M` on the boundary data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaConstants {
    pub gamma1: f64,
    pub gamma2: f64,
    pub data_bound: f64,
}

/// `γ₁ = g₀(2m₀/(2+M²) − √2·M·m₁ − m₂)`, `γ₂ = G₀(M₀ + √2·M·m₁ + m₂)`.
///
/// `γ₁` may come out non-positive; [`check_curvature_condition`] reports it.
pub fn gamma_constants(b: &BoundsReport, data_bound: f64) -> GammaConstants {
    let m = data_bound;
    let s = std::f64::consts::SQRT_2 * m * b.grad_bound;
    GammaConstants {
        gamma1: b.g_min * (2.0 / (2.0 + m * m) * b.f_min - s - b.hess_bound),
        gamma2: b.g_max * (b.f_max + s + b.hess_bound),
        data_bound: m,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureCheck {
    pub pass: bool,
    /// `γ₁·Σ_{k≥0} k + γ₂·Σ_{k<0} k`.
    pub margin: f64,
}

/// The weighted boundary-curvature condition: `γ₁ > 0` and
/// `γ₁·Σ_{kᵢ≥0} kᵢ + γ₂·Σ_{kᵢ<0} kᵢ > 0`.
///
/// Curvatures may be given in any order.
pub fn check_curvature_condition(g: &GammaConstants, curvatures: &[f64]) -> Result<CurvatureCheck> {
    if curvatures.is_empty() {
        return Err(Error::domain("no principal curvatures given"));
    }
    let mut k = curvatures.to_vec();
    k.sort_by(|a, b| b.total_cmp(a));
    let (pos, neg): (Vec<f64>, Vec<f64>) = k.iter().partition(|&&v| v >= 0.0);
    let margin = g.gamma1 * pos.iter().sum::<f64>() + g.gamma2 * neg.iter().sum::<f64>();
    Ok(CurvatureCheck { pass: g.gamma1 > 0.0 && margin > 0.0, margin })
}
