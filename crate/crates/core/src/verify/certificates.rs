use std::f64::consts::SQRT_2;

use crate::anisotropy::{check_curvature_condition, BoundsReport, GammaConstants};
use crate::error::Result;
use crate::geometry::Mesh;
use crate::solver::{Problem, ValidationReport};

use super::certificate::{Certificate, CertificateStatus};

/// Contact-angle gradient bound on `v = √(1+|Du|²)`.
///
/// Large-gradient branch: `(1/δ₀)(C₂/(g₀(m₀−m₂)) + k_ub + k_ub/sin θ₀)`
/// with `k_ub = max(k₀, k₁)`. Small-tangential branch: `√(2/sin²θ₀ − 1)`. The
/// maximum principle for `|Du|` also admits the initial data, so the
/// certified bound is the largest of the two branches and `sup v` at
/// `t = 0`. The bound with `k₀` in place of `k_ub` is recorded as
/// `bound_k0_reading`.
pub fn gradient_certificate_contact(
    report: &ValidationReport,
    c2: f64,
    initial_sup_v: f64,
    measured_sup_v: f64,
) -> Certificate {
    const NAME: &str = "gradient_bound_contact";
    let b = &report.bounds;
    if !b.a3_holds {
        return Certificate::with_status(NAME, CertificateStatus::Inapplicable, "m2 >= m0");
    }
    let Some(contact) = report.contact else {
        return Certificate::with_status(NAME, CertificateStatus::Inapplicable, "not a contact-angle problem");
    };
    if !contact.delta0.is_finite() || !(contact.delta0 > 0.0) || !(contact.theta0 > 0.0) {
        return Certificate::with_status(NAME, CertificateStatus::Inapplicable, "no boundary curvature margin");
    }
    let (delta0, theta0) = (contact.delta0, contact.theta0);
    let k_ub = report.k0.max(report.k1);
    let s = theta0.sin();
    let formula = |k: f64| (c2 / (b.g_min * (b.f_min - b.hess_bound)) + k + k / s) / delta0;
    let large = formula(k_ub);
    let small = (2.0 / (s * s) - 1.0).sqrt();
    let bound = large.max(small).max(initial_sup_v);
    Certificate::check(NAME, bound, measured_sup_v)
        .constant("C2", c2)
        .constant("delta0", delta0)
        .constant("theta0", theta0)
        .constant("k0", report.k0)
        .constant("k1", report.k1)
        .constant("k_ub", k_ub)
        .constant("m0", b.f_min)
        .constant("m2", b.hess_bound)
        .constant("g0", b.g_min)
        .constant("large_gradient_branch", large)
        .constant("small_gradient_branch", small)
        .constant("initial_sup_v", initial_sup_v)
        .constant("bound_k0_reading", formula(report.k0).max(small).max(initial_sup_v))
}

/// Upper bounds, with `ε = 1`, on the frame components of `A` at the
/// boundary of a Dirichlet problem in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCoefficientBounds {
    pub a_tt: f64,
    pub a_off: f64,
    pub a_tn: f64,
    pub a_nn: f64,
}

pub fn frame_coefficient_bounds(b: &BoundsReport, gamma: &GammaConstants, n: usize) -> FrameCoefficientBounds {
    let m = gamma.data_bound;
    let nm1 = (n - 1) as f64;
    FrameCoefficientBounds {
        a_tt: gamma.gamma2,
        a_off: b.g_max * (m * m / (2.0 + m * m) * b.f_max + SQRT_2 * m * b.grad_bound + b.hess_bound),
        a_tn: b.g_max * (0.5 * b.f_max + (m / SQRT_2 + 1.0) * b.grad_bound + b.hess_bound),
        a_nn: b.g_max
            * ((1.0 + nm1 * m * m) / (2.0 + nm1 * m * m) * b.f_max + 2.0 * b.grad_bound + b.hess_bound),
    }
}

/// Right-hand side of the boundary inequality for `|D_N u|` at a point with
/// principal curvatures `k`, assuming `|D_N u| ≥ 1` and data bound `M`.
pub fn dirichlet_rhs(c3: f64, a: &FrameCoefficientBounds, m: f64, n: usize, k: &[f64]) -> f64 {
    let nm1 = (n - 1) as f64;
    let sum_abs_k: f64 = k.iter().map(|v| v.abs()).sum();
    c3 + nm1 * a.a_tt * m
        + nm1 * (nm1 - 1.0) * a.a_off * m
        + 2.0 * nm1 * nm1 * a.a_tn * m * m
        + 2.0 * a.a_tn * m * sum_abs_k
        + nm1 * nm1 * a.a_nn * m * m * m
        + a.a_nn * m * m * sum_abs_k
}

/// Dirichlet normal-derivative bound
/// `max over boundary points of RHS / (γ₁ Σ_{k≥0} k + γ₂ Σ_{k<0} k)`;
/// passes when the measured boundary `sup|D_N u|` is at most
/// `max(1, bound)`.
///
/// `curvatures` holds the principal curvatures at each sampled boundary
/// point.
pub fn dirichlet_normal_certificate(
    bounds: &BoundsReport,
    gamma: &GammaConstants,
    curvatures: &[Vec<f64>],
    n: usize,
    c3: f64,
    measured_dn: f64,
) -> Result<Certificate> {
    const NAME: &str = "dirichlet_normal_bound";
    let a = frame_coefficient_bounds(bounds, gamma, n);
    let mut bound: f64 = 0.0;
    for k in curvatures {
        let check = check_curvature_condition(gamma, k)?;
        if !check.pass {
            return Ok(Certificate::with_status(
                NAME,
                CertificateStatus::Inapplicable,
                format!("curvature condition fails: gamma1 = {:.6}, margin = {:.6}", gamma.gamma1, check.margin),
            ));
        }
        bound = bound.max(dirichlet_rhs(c3, &a, gamma.data_bound, n, k) / check.margin);
    }
    Ok(Certificate::check(NAME, bound.max(1.0), measured_dn)
        .constant("C3", c3)
        .constant("M", gamma.data_bound)
        .constant("gamma1", gamma.gamma1)
        .constant("gamma2", gamma.gamma2)
        .constant("formula_bound", bound)
        .constant("a_tt", a.a_tt)
        .constant("a_off", a.a_off)
        .constant("a_tn", a.a_tn)
        .constant("a_nn", a.a_nn))
}

/// [`dirichlet_normal_certificate`] for a validated planar problem, with
/// the boundary curvature sampled at the grid's boundary nodes.
pub fn dirichlet_normal_certificate_for(problem: &Problem, c3: f64, measured_dn: f64) -> Result<Certificate> {
    let r = problem.report();
    let (Some(gamma), Mesh::Polar(grid)) = (r.gamma, problem.mesh()) else {
        return Ok(Certificate::with_status(
            "dirichlet_normal_bound",
            CertificateStatus::Inapplicable,
            "not a planar Dirichlet problem",
        ));
    };
    let curvatures: Vec<Vec<f64>> = (0..grid.n_phi()).map(|j| vec![grid.boundary_frame(j).curvature]).collect();
    dirichlet_normal_certificate(&r.bounds, &gamma, &curvatures, 2, c3, measured_dn)
}
