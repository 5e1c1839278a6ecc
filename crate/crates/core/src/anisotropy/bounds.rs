use nalgebra::DMatrix;

use super::family::{AnisotropySpec, MobilitySpec, Quadratic, MAX_AMBIENT};
use super::sampling::sphere_points;
use crate::error::{Error, Result};

/// Smallest admissible sample count for [`estimate_constants`].
pub const MIN_SAMPLES: usize = 1000;

/// Eigenvalue tolerance for the sampled convexity check.
pub const CONVEXITY_TOL: f64 = 1e-8;

/// Sphere-sampled structural constants of an anisotropy/mobility pair.
///
/// `f_min ≤ F ≤ f_max` and `g_min ≤ G ≤ g_max` on unit vectors. The gradient
/// bound is the largest single component of the gradient of `p ↦ F(p/|p|)`
/// at unit points; the Hessian bound is the Frobenius norm of the full
/// `(n+1)×(n+1)` Hessian of the same map.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub f_min: f64,
    pub f_max: f64,
    pub grad_bound: f64,
    pub hess_bound: f64,
    pub g_min: f64,
    pub g_max: f64,
    pub n_samples: usize,
    /// Smallest eigenvalue of `D²F` seen at the samples.
    pub min_hessian_eigenvalue: f64,
    /// `hess_bound < f_min`.
    pub a3_holds: bool,
    /// `f_min - hess_bound`.
    pub a3_margin: f64,
    /// Filled in once the Dirichlet data bound is known.
    pub gamma_condition: Option<bool>,
}

impl BoundsReport {
    /// Constants of `F = |p|`, `G = |p|`.
    pub fn isotropic(n_samples: usize) -> Self {
        Self {
            f_min: 1.0,
            f_max: 1.0,
            grad_bound: 0.0,
            hess_bound: 0.0,
            g_min: 1.0,
            g_max: 1.0,
            n_samples,
            min_hessian_eigenvalue: 0.0,
            a3_holds: true,
            a3_margin: 1.0,
            gamma_condition: None,
        }
    }

    /// Builds a report from raw constants, deriving the A3 flag.
    pub fn from_constants(m0: f64, big_m0: f64, m1: f64, m2: f64, g0: f64, big_g0: f64) -> Self {
        Self {
            f_min: m0,
            f_max: big_m0,
            grad_bound: m1,
            hess_bound: m2,
            g_min: g0,
            g_max: big_g0,
            n_samples: 0,
            min_hessian_eigenvalue: 0.0,
            a3_holds: m2 < m0,
            a3_margin: m0 - m2,
            gamma_condition: None,
        }
    }

    /// `(m₀, M₀, m₁, m₂, g₀, G₀)` as `key=value` lines.
    pub fn key_values(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("m0", self.f_min),
            ("M0", self.f_max),
            ("m1", self.grad_bound),
            ("m2", self.hess_bound),
            ("g0", self.g_min),
            ("G0", self.g_max),
        ]
    }
}

/// Samples `F` and `G` on the unit sphere of `ℝ^{n+1}`.
///
/// Fails with [`Error::InvalidAnisotropy`] when `F` or `G` is non-positive
/// at a sample or `D²F` has an eigenvalue below `-1e-8` (not convex).
pub fn estimate_constants(f: &AnisotropySpec, g: &MobilitySpec, n_samples: usize) -> Result<BoundsReport> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::domain(format!(
            "n_samples = {n_samples} below the minimum of {MIN_SAMPLES}"
        )));
    }
    if f.dim() != g.dim() {
        return Err(Error::domain(format!(
            "anisotropy is for n = {}, mobility for n = {}",
            f.dim(),
            g.dim()
        )));
    }
    let d = f.ambient_dim();
    let pts = sphere_points(d, n_samples);
    let count = pts.len() / d;

    let mut r = BoundsReport {
        f_min: f64::INFINITY,
        f_max: f64::NEG_INFINITY,
        grad_bound: 0.0,
        hess_bound: 0.0,
        g_min: f64::INFINITY,
        g_max: f64::NEG_INFINITY,
        n_samples: count,
        min_hessian_eigenvalue: f64::INFINITY,
        a3_holds: false,
        a3_margin: 0.0,
        gamma_condition: None,
    };
    let mut grad = [0.0; MAX_AMBIENT];
    let mut hess = [0.0; MAX_AMBIENT * MAX_AMBIENT];
    for q in pts.chunks(d) {
        let fv = f.sphere_value_raw(q);
        if !(fv > 0.0 && fv.is_finite()) {
            return Err(Error::InvalidAnisotropy(format!("F = {fv} at unit vector {q:?}")));
        }
        let gv = g.sphere_value_raw(q);
        if !(gv > 0.0 && gv.is_finite()) {
            return Err(Error::InvalidAnisotropy(format!("G = {gv} at unit vector {q:?}")));
        }
        r.f_min = r.f_min.min(fv);
        r.f_max = r.f_max.max(fv);
        r.g_min = r.g_min.min(gv);
        r.g_max = r.g_max.max(gv);

        f.sphere_gradient_raw(q, &mut grad);
        let gmax = grad[..d].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        r.grad_bound = r.grad_bound.max(gmax);

        f.sphere_hessian_raw(q, &mut hess);
        let fro = hess[..d * d].iter().map(|v| v * v).sum::<f64>().sqrt();
        r.hess_bound = r.hess_bound.max(fro);

        f.hessian_raw(q, &mut hess);
        let m = DMatrix::from_row_slice(d, d, &hess[..d * d]);
        let sym = (&m + m.transpose()) * 0.5;
        let lo = sym.symmetric_eigenvalues().min();
        r.min_hessian_eigenvalue = r.min_hessian_eigenvalue.min(lo);
    }
    let hess_scale = r.f_max.max(1.0);
    if r.min_hessian_eigenvalue < -CONVEXITY_TOL * hess_scale {
        return Err(Error::InvalidAnisotropy(format!(
            "D²F has eigenvalue {:.3e} on the unit sphere; F is not convex",
            r.min_hessian_eigenvalue
        )));
    }
    r.a3_margin = r.f_min - r.hess_bound;
    r.a3_holds = r.hess_bound < r.f_min;
    Ok(r)
}

/// Largest `τ ∈ [0, 1]` for which `(1-τ)|p| + τ√(pᵀQp)` satisfies
/// `m₂ < m₀` at the sampled points, found by bisection (40 halvings).
pub fn max_admissible_tau(base: &Quadratic, n_samples: usize) -> Result<f64> {
    let n = base.dim() - 1;
    let g = MobilitySpec::isotropic(n);
    let holds = |tau: f64| -> Result<bool> {
        let f = AnisotropySpec::interpolated(tau, base.clone())?;
        Ok(estimate_constants(&f, &g, n_samples)?.a3_holds)
    };
    if holds(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_constants_are_exact() {
        let r = estimate_constants(&AnisotropySpec::isotropic(2), &MobilitySpec::isotropic(2), 1000).unwrap();
        assert_eq!((r.f_min, r.f_max, r.grad_bound, r.hess_bound), (1.0, 1.0, 0.0, 0.0));
        assert_eq!((r.g_min, r.g_max), (1.0, 1.0));
        assert!(r.a3_holds);
    }

    #[test]
    fn too_few_samples_is_a_domain_error() {
        let e = estimate_constants(&AnisotropySpec::isotropic(1), &MobilitySpec::isotropic(1), 999);
        assert!(matches!(e, Err(Error::Domain(_))));
    }

    #[test]
    fn ellipsoid_extrema() {
        let f = AnisotropySpec::ellipsoidal(Quadratic::diagonal(&[1.0, 1.0, 4.0]).unwrap()).unwrap();
        let r = estimate_constants(&f, &MobilitySpec::isotropic(2), 4097).unwrap();
        assert!((r.f_min - 1.0).abs() < 1e-12);
        assert!((r.f_max - 2.0).abs() < 1e-12);
        assert!(!r.a3_holds);
    }

    #[test]
    fn admissible_tau_is_a_threshold() {
        let q = Quadratic::diagonal(&[1.0, 1.0, 4.0]).unwrap();
        let tau = max_admissible_tau(&q, 1000).unwrap();
        assert!(tau > 0.0 && tau < 1.0);
        let g = MobilitySpec::isotropic(2);
        let below = AnisotropySpec::interpolated(0.9 * tau, q.clone()).unwrap();
        let above = AnisotropySpec::interpolated((1.1 * tau).min(1.0), q).unwrap();
        assert!(estimate_constants(&below, &g, 1000).unwrap().a3_holds);
        assert!(!estimate_constants(&above, &g, 1000).unwrap().a3_holds);
    }
}
