use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Central-difference step for first derivatives of user anisotropies,
/// applied at unit-sphere-scaled inputs.
pub const FD_STEP: f64 = 1e-5;
/// Step for second differences of user anisotropies. Larger than
/// [`FD_STEP`] because the rounding error of a second difference scales
/// with `eps / h²`.
pub const FD_STEP_HESSIAN: f64 = 1e-4;

pub type SphereFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A symmetric positive definite matrix `Q`, defining `√(pᵀQp)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    dim: usize,
    entries: Vec<f64>,
}

impl Quadratic {
    /// Builds `Q` from row-major entries; rejects non-symmetric or
    /// non-positive-definite input.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidAnisotropy(format!(
                "quadratic form needs ambient dimension >= 2, got {dim}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidAnisotropy(format!(
                "q_matrix has {} entries, expected {}",
                entries.len(),
                dim * dim
            )));
        }
        let scale = entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (entries[i * dim + j], entries[j * dim + i]);
                if (a - b).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::InvalidAnisotropy(format!(
                        "q_matrix not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
            }
        }
        let m = DMatrix::from_row_slice(dim, dim, &entries);
        if m.cholesky().is_none() {
            return Err(Error::InvalidAnisotropy(
                "q_matrix is not positive definite".into(),
            ));
        }
        Ok(Self { dim, entries })
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let mut entries = vec![0.0; d * d];
        for (i, v) in diag.iter().enumerate() {
            entries[i * d + i] = *v;
        }
        Self::new(d, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    fn apply(&self, p: &[f64], out: &mut [f64]) {
        let d = self.dim;
        for i in 0..d {
            let row = &self.entries[i * d..(i + 1) * d];
            out[i] = row.iter().zip(p).map(|(a, b)| a * b).sum();
        }
    }

    #[inline]
    fn form(&self, p: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            let row = &self.entries[i * d..(i + 1) * d];
            let qi: f64 = row.iter().zip(p).map(|(a, b)| a * b).sum();
            acc += p[i] * qi;
        }
        acc
    }

    // √(pᵀQp) and its derivatives at p.
    fn value(&self, p: &[f64]) -> f64 {
        self.form(p).sqrt()
    }

    fn gradient(&self, p: &[f64], out: &mut [f64]) {
        let phi = self.value(p);
        self.apply(p, out);
        out[..self.dim].iter_mut().for_each(|v| *v /= phi);
    }

    fn hessian(&self, p: &[f64], out: &mut [f64]) {
        let d = self.dim;
        let mut qp = [0.0; MAX_AMBIENT];
        self.apply(p, &mut qp);
        let phi2 = self.form(p);
        let phi = phi2.sqrt();
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = (self.entries[i * d + j] - qp[i] * qp[j] / phi2) / phi;
            }
        }
    }

    // h(p) = √(pᵀQp / pᵀp), the degree-0 restriction to directions, and its
    // derivatives computed from the Rayleigh quotient directly.
    fn sphere_value(&self, p: &[f64]) -> f64 {
        (self.form(p) / dot(p, p)).sqrt()
    }

    fn sphere_gradient(&self, p: &[f64], out: &mut [f64]) {
        let d = self.dim;
        let b = dot(p, p);
        let r = self.form(p) / b;
        let h = r.sqrt();
        let mut qp = [0.0; MAX_AMBIENT];
        self.apply(p, &mut qp);
        for i in 0..d {
            let dr = 2.0 * (qp[i] - r * p[i]) / b;
            out[i] = dr / (2.0 * h);
        }
    }

    fn sphere_hessian(&self, p: &[f64], out: &mut [f64]) {
        let d = self.dim;
        let b = dot(p, p);
        let r = self.form(p) / b;
        let h = r.sqrt();
        let mut qp = [0.0; MAX_AMBIENT];
        self.apply(p, &mut qp);
        let mut dr = [0.0; MAX_AMBIENT];
        for i in 0..d {
            dr[i] = 2.0 * (qp[i] - r * p[i]) / b;
        }
        for i in 0..d {
            for j in 0..d {
                let delta = if i == j { 1.0 } else { 0.0 };
                let d2r = 2.0 * (self.entries[i * d + j] - r * delta - dr[i] * p[j] - p[i] * dr[j]) / b;
                out[i * d + j] = d2r / (2.0 * h) - dr[i] * dr[j] / (4.0 * h * h * h);
            }
        }
    }
}

/// Largest ambient dimension handled by the allocation-free kernels.
pub(crate) const MAX_AMBIENT: usize = 8;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(p: &[f64]) -> f64 {
    dot(p, p).sqrt()
}

/// A user-supplied anisotropy: values on the unit sphere, optionally with
/// analytic derivatives of the homogeneous extension.
#[derive(Clone)]
pub struct UserAnisotropy {
    pub sphere_value: SphereFn,
    pub gradient: Option<VectorFn>,
    pub hessian: Option<VectorFn>,
}

#[derive(Clone)]
pub enum AnisotropyFamily {
    Isotropic,
    Ellipsoidal(Quadratic),
    /// `(1-τ)|p| + τ√(pᵀQp)`.
    Interpolated { tau: f64, base: Quadratic },
    User(UserAnisotropy),
}

impl fmt::Debug for AnisotropyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Isotropic => write!(f, "Isotropic"),
            Self::Ellipsoidal(q) => f.debug_tuple("Ellipsoidal").field(q).finish(),
            Self::Interpolated { tau, base } => f
                .debug_struct("Interpolated")
                .field("tau", tau)
                .field("base", base)
                .finish(),
            Self::User(u) => f
                .debug_struct("User")
                .field("analytic_gradient", &u.gradient.is_some())
                .field("analytic_hessian", &u.hessian.is_some())
                .finish(),
        }
    }
}

/// A convex, positive, positively 1-homogeneous surface energy density `F`
/// on `ℝ^{n+1}`, for graphs over `ℝⁿ`.
///
/// Besides `F`, `DF` and `D²F` the spec evaluates the derivatives of the
/// degree-0 map `p ↦ F(p/|p|)`; the sphere-sampled constants and the
/// decomposed coefficient assembly are built from those.
#[derive(Debug, Clone)]
pub struct AnisotropySpec {
    n: usize,
    family: AnisotropyFamily,
    scale: f64,
}

impl AnisotropySpec {
    /// `F(p) = |p|`.
    pub fn isotropic(n: usize) -> Self {
        assert!(n >= 1 && n + 1 <= MAX_AMBIENT, "unsupported dimension {n}");
        Self { n, family: AnisotropyFamily::Isotropic, scale: 1.0 }
    }

    /// `F(p) = √(pᵀQp)` with `Q` of size `(n+1)×(n+1)`.
    pub fn ellipsoidal(q: Quadratic) -> Result<Self> {
        let n = Self::check_ambient(q.dim())?;
        Ok(Self { n, family: AnisotropyFamily::Ellipsoidal(q), scale: 1.0 })
    }

    /// `F_τ(p) = (1-τ)|p| + τ√(pᵀQp)`, `τ ∈ [0, 1]`.
    pub fn interpolated(tau: f64, base: Quadratic) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidAnisotropy(format!("tau = {tau} outside [0, 1]")));
        }
        let n = Self::check_ambient(base.dim())?;
        Ok(Self { n, family: AnisotropyFamily::Interpolated { tau, base }, scale: 1.0 })
    }

    /// A user anisotropy given by its values on the unit sphere of
    /// `ℝ^{n+1}`. Missing derivatives fall back to central differences.
    pub fn user(n: usize, user: UserAnisotropy) -> Result<Self> {
        Self::check_ambient(n + 1)?;
        Ok(Self { n, family: AnisotropyFamily::User(user), scale: 1.0 })
    }

    /// Multiplies the density by `c > 0`.
    pub fn scaled(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidAnisotropy(format!("scale factor {c} must be positive")));
        }
        self.scale *= c;
        Ok(self)
    }

    fn check_ambient(d: usize) -> Result<usize> {
        if d < 2 || d > MAX_AMBIENT {
            return Err(Error::InvalidAnisotropy(format!(
                "ambient dimension {d} outside 2..={MAX_AMBIENT}"
            )));
        }
        Ok(d - 1)
    }

    /// Dimension `n` of the base space.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.n + 1
    }

    pub fn family(&self) -> &AnisotropyFamily {
        &self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn tag(&self) -> &'static str {
        match self.family {
            AnisotropyFamily::Isotropic => "isotropic",
            AnisotropyFamily::Ellipsoidal(_) => "ellipsoidal",
            AnisotropyFamily::Interpolated { .. } => "interpolated",
            AnisotropyFamily::User(_) => "user",
        }
    }

    /// Whether derivatives are exact (no finite-difference fallback).
    pub fn has_analytic_derivatives(&self) -> bool {
        match &self.family {
            AnisotropyFamily::User(u) => u.gradient.is_some() && u.hessian.is_some(),
            _ => true,
        }
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.ambient_dim() {
            return Err(Error::domain(format!(
                "expected a vector in R^{}, got length {}",
                self.ambient_dim(),
                p.len()
            )));
        }
        let r = norm(p);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::domain("anisotropy evaluated at the zero vector"));
        }
        Ok(())
    }

    /// `F(p) = |p| F(p/|p|)`.
    pub fn value(&self, p: &[f64]) -> Result<f64> {
        self.check_point(p)?;
        Ok(self.value_raw(p))
    }

    /// `DF(p)`.
    pub fn gradient(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.check_point(p)?;
        let mut out = vec![0.0; self.ambient_dim()];
        self.gradient_raw(p, &mut out);
        Ok(DVector::from_vec(out))
    }

    /// `D²F(p)`, symmetric, with `D²F(p)·p = 0`.
    pub fn hessian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let d = self.ambient_dim();
        let mut out = vec![0.0; d * d];
        self.hessian_raw(p, &mut out);
        Ok(DMatrix::from_row_slice(d, d, &out))
    }

    /// Gradient of the degree-0 map `p ↦ F(p/|p|)`.
    pub fn sphere_gradient(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.check_point(p)?;
        let mut out = vec![0.0; self.ambient_dim()];
        self.sphere_gradient_raw(p, &mut out);
        Ok(DVector::from_vec(out))
    }

    /// Hessian of the degree-0 map `p ↦ F(p/|p|)`.
    pub fn sphere_hessian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let d = self.ambient_dim();
        let mut out = vec![0.0; d * d];
        self.sphere_hessian_raw(p, &mut out);
        Ok(DMatrix::from_row_slice(d, d, &out))
    }

    /// `F(p/|p|)`.
    pub fn sphere_value(&self, p: &[f64]) -> Result<f64> {
        self.check_point(p)?;
        Ok(self.sphere_value_raw(p))
    }

    // Unchecked kernels. `p` must be nonzero with length `n+1`.

    pub(crate) fn value_raw(&self, p: &[f64]) -> f64 {
        let base = match &self.family {
            AnisotropyFamily::Isotropic => norm(p),
            AnisotropyFamily::Ellipsoidal(q) => q.value(p),
            AnisotropyFamily::Interpolated { tau, base } => (1.0 - tau) * norm(p) + tau * base.value(p),
            AnisotropyFamily::User(u) => {
                let r = norm(p);
                let xi = unit(p, r);
                r * (u.sphere_value)(&xi[..p.len()])
            }
        };
        self.scale * base
    }

    pub(crate) fn sphere_value_raw(&self, p: &[f64]) -> f64 {
        let base = match &self.family {
            AnisotropyFamily::Isotropic => 1.0,
            AnisotropyFamily::Ellipsoidal(q) => q.sphere_value(p),
            AnisotropyFamily::Interpolated { tau, base } => (1.0 - tau) + tau * base.sphere_value(p),
            AnisotropyFamily::User(u) => {
                let xi = unit(p, norm(p));
                (u.sphere_value)(&xi[..p.len()])
            }
        };
        self.scale * base
    }

    pub(crate) fn gradient_raw(&self, p: &[f64], out: &mut [f64]) {
        let d = p.len();
        match &self.family {
            AnisotropyFamily::Isotropic => {
                let r = norm(p);
                for i in 0..d {
                    out[i] = p[i] / r;
                }
            }
            AnisotropyFamily::Ellipsoidal(q) => q.gradient(p, out),
            AnisotropyFamily::Interpolated { tau, base } => {
                base.gradient(p, out);
                let r = norm(p);
                for i in 0..d {
                    out[i] = (1.0 - tau) * p[i] / r + tau * out[i];
                }
            }
            AnisotropyFamily::User(u) => match &u.gradient {
                Some(g) => out[..d].copy_from_slice(&g(p)[..d]),
                None => {
                    // DF(p) = ξ f(ξ) + |p| Dh(p), with Dh(p) = Dh(ξ)/|p|.
                    let r = norm(p);
                    let xi = unit(p, r);
                    let xi = &xi[..d];
                    let f = (u.sphere_value)(xi);
                    let mut dh = [0.0; MAX_AMBIENT];
                    user_fd_gradient(&u.sphere_value, xi, &mut dh);
                    for i in 0..d {
                        out[i] = xi[i] * f + dh[i];
                    }
                }
            },
        }
        for v in out[..d].iter_mut() {
            *v *= self.scale;
        }
    }

    pub(crate) fn hessian_raw(&self, p: &[f64], out: &mut [f64]) {
        let d = p.len();
        match &self.family {
            AnisotropyFamily::Isotropic => isotropic_hessian(p, 1.0, out),
            AnisotropyFamily::Ellipsoidal(q) => q.hessian(p, out),
            AnisotropyFamily::Interpolated { tau, base } => {
                base.hessian(p, out);
                let mut iso = [0.0; MAX_AMBIENT * MAX_AMBIENT];
                isotropic_hessian(p, 1.0, &mut iso);
                for k in 0..d * d {
                    out[k] = (1.0 - tau) * iso[k] + tau * out[k];
                }
            }
            AnisotropyFamily::User(u) => match &u.hessian {
                Some(h) => out[..d * d].copy_from_slice(&h(p)[..d * d]),
                None => {
                    // D²F(p) = [(I - ξξᵀ) f + ξ Dhᵀ + Dh ξᵀ + D²h] / |p|, all at ξ.
                    let r = norm(p);
                    let xi = unit(p, r);
                    let xi = &xi[..d];
                    let f = (u.sphere_value)(xi);
                    let mut dh = [0.0; MAX_AMBIENT];
                    let mut d2h = [0.0; MAX_AMBIENT * MAX_AMBIENT];
                    user_fd_gradient(&u.sphere_value, xi, &mut dh);
                    user_fd_hessian(&u.sphere_value, xi, &mut d2h);
                    for i in 0..d {
                        for j in 0..d {
                            let delta = if i == j { 1.0 } else { 0.0 };
                            out[i * d + j] = ((delta - xi[i] * xi[j]) * f
                                + xi[i] * dh[j]
                                + dh[i] * xi[j]
                                + d2h[i * d + j])
                                / r;
                        }
                    }
                }
            },
        }
        for v in out[..d * d].iter_mut() {
            *v *= self.scale;
        }
    }

    pub(crate) fn sphere_gradient_raw(&self, p: &[f64], out: &mut [f64]) {
        let d = p.len();
        match &self.family {
            AnisotropyFamily::Isotropic => out[..d].iter_mut().for_each(|v| *v = 0.0),
            AnisotropyFamily::Ellipsoidal(q) => q.sphere_gradient(p, out),
            AnisotropyFamily::Interpolated { tau, base } => {
                base.sphere_gradient(p, out);
                out[..d].iter_mut().for_each(|v| *v *= tau);
            }
            AnisotropyFamily::User(u) => match &u.gradient {
                Some(g) => {
                    // h = F/|p|  =>  Dh = DF/|p| - F p/|p|³.
                    let r = norm(p);
                    let grad = g(p);
                    let f = r * (u.sphere_value)(&unit(p, r)[..d]);
                    for i in 0..d {
                        out[i] = grad[i] / r - f * p[i] / (r * r * r);
                    }
                }
                None => {
                    let r = norm(p);
                    let xi = unit(p, r);
                    user_fd_gradient(&u.sphere_value, &xi[..d], out);
                    out[..d].iter_mut().for_each(|v| *v /= r);
                }
            },
        }
        for v in out[..d].iter_mut() {
            *v *= self.scale;
        }
    }

    pub(crate) fn sphere_hessian_raw(&self, p: &[f64], out: &mut [f64]) {
        let d = p.len();
        match &self.family {
            AnisotropyFamily::Isotropic => out[..d * d].iter_mut().for_each(|v| *v = 0.0),
            AnisotropyFamily::Ellipsoidal(q) => q.sphere_hessian(p, out),
            AnisotropyFamily::Interpolated { tau, base } => {
                base.sphere_hessian(p, out);
                out[..d * d].iter_mut().for_each(|v| *v *= tau);
            }
            AnisotropyFamily::User(u) => match (&u.gradient, &u.hessian) {
                (Some(g), Some(hess)) => {
                    let r = norm(p);
                    let r3 = r * r * r;
                    let grad = g(p);
                    let h2 = hess(p);
                    let f = r * (u.sphere_value)(&unit(p, r)[..d]);
                    for i in 0..d {
                        for j in 0..d {
                            let delta = if i == j { 1.0 } else { 0.0 };
                            out[i * d + j] = h2[i * d + j] / r
                                - (grad[i] * p[j] + p[i] * grad[j]) / r3
                                + f * (-delta / r3 + 3.0 * p[i] * p[j] / (r3 * r * r));
                        }
                    }
                }
                _ => {
                    let r = norm(p);
                    let xi = unit(p, r);
                    user_fd_hessian(&u.sphere_value, &xi[..d], out);
                    out[..d * d].iter_mut().for_each(|v| *v /= r * r);
                }
            },
        }
        for v in out[..d * d].iter_mut() {
            *v *= self.scale;
        }
    }
}

fn unit(p: &[f64], r: f64) -> [f64; MAX_AMBIENT] {
    let mut xi = [0.0; MAX_AMBIENT];
    for (x, v) in xi.iter_mut().zip(p) {
        *x = v / r;
    }
    xi
}

fn isotropic_hessian(p: &[f64], c: f64, out: &mut [f64]) {
    let d = p.len();
    let r2 = dot(p, p);
    let r = r2.sqrt();
    for i in 0..d {
        for j in 0..d {
            let delta = if i == j { 1.0 } else { 0.0 };
            out[i * d + j] = c * (delta - p[i] * p[j] / r2) / r;
        }
    }
}

fn eval_sphere(f: &SphereFn, p: &[f64]) -> f64 {
    let r = norm(p);
    f(&unit(p, r)[..p.len()])
}

// Central differences of h(p) = f(p/|p|) at a unit point.
fn user_fd_gradient(f: &SphereFn, xi: &[f64], out: &mut [f64]) {
    let d = xi.len();
    let h = FD_STEP;
    let mut q = [0.0; MAX_AMBIENT];
    q[..d].copy_from_slice(xi);
    for i in 0..d {
        q[i] = xi[i] + h;
        let fp = eval_sphere(f, &q[..d]);
        q[i] = xi[i] - h;
        let fm = eval_sphere(f, &q[..d]);
        q[i] = xi[i];
        out[i] = (fp - fm) / (2.0 * h);
    }
}

fn user_fd_hessian(f: &SphereFn, xi: &[f64], out: &mut [f64]) {
    let d = xi.len();
    let h = FD_STEP_HESSIAN;
    let f0 = eval_sphere(f, xi);
    let mut q = [0.0; MAX_AMBIENT];
    q[..d].copy_from_slice(xi);
    for i in 0..d {
        q[i] = xi[i] + h;
        let fp = eval_sphere(f, &q[..d]);
        q[i] = xi[i] - h;
        let fm = eval_sphere(f, &q[..d]);
        q[i] = xi[i];
        out[i * d + i] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                q[i] = xi[i] + si * h;
                q[j] = xi[j] + sj * h;
                let v = eval_sphere(f, &q[..d]);
                q[i] = xi[i];
                q[j] = xi[j];
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                / (4.0 * h * h);
            out[i * d + j] = v;
            out[j * d + i] = v;
        }
    }
}

#[derive(Clone)]
pub enum MobilityFamily {
    /// `G ≡ 1` on the sphere, i.e. `G(p) = |p|`.
    Isotropic,
    Ellipsoidal(Quadratic),
    User(SphereFn),
}

impl fmt::Debug for MobilityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Isotropic => write!(f, "Isotropic"),
            Self::Ellipsoidal(q) => f.debug_tuple("Ellipsoidal").field(q).finish(),
            Self::User(_) => write!(f, "User"),
        }
    }
}

/// A positive mobility `G`, given on the unit sphere and extended with
/// degree one.
#[derive(Debug, Clone)]
pub struct MobilitySpec {
    n: usize,
    family: MobilityFamily,
    scale: f64,
}

impl MobilitySpec {
    pub fn isotropic(n: usize) -> Self {
        assert!(n >= 1 && n + 1 <= MAX_AMBIENT, "unsupported dimension {n}");
        Self { n, family: MobilityFamily::Isotropic, scale: 1.0 }
    }

    pub fn ellipsoidal(q: Quadratic) -> Result<Self> {
        let n = AnisotropySpec::check_ambient(q.dim())?;
        Ok(Self { n, family: MobilityFamily::Ellipsoidal(q), scale: 1.0 })
    }

    pub fn user(n: usize, f: SphereFn) -> Result<Self> {
        AnisotropySpec::check_ambient(n + 1)?;
        Ok(Self { n, family: MobilityFamily::User(f), scale: 1.0 })
    }

    pub fn scaled(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidAnisotropy(format!("scale factor {c} must be positive")));
        }
        self.scale *= c;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn tag(&self) -> &'static str {
        match self.family {
            MobilityFamily::Isotropic => "isotropic",
            MobilityFamily::Ellipsoidal(_) => "ellipsoidal",
            MobilityFamily::User(_) => "user",
        }
    }

    /// `G(p)` for nonzero `p ∈ ℝ^{n+1}`.
    pub fn value(&self, p: &[f64]) -> Result<f64> {
        if p.len() != self.n + 1 {
            return Err(Error::domain(format!(
                "expected a vector in R^{}, got length {}",
                self.n + 1,
                p.len()
            )));
        }
        if !(norm(p) > 0.0) {
            return Err(Error::domain("mobility evaluated at the zero vector"));
        }
        Ok(self.value_raw(p))
    }

    pub(crate) fn value_raw(&self, p: &[f64]) -> f64 {
        let base = match &self.family {
            MobilityFamily::Isotropic => norm(p),
            MobilityFamily::Ellipsoidal(q) => q.value(p),
            MobilityFamily::User(f) => norm(p) * eval_sphere(f, p),
        };
        self.scale * base
    }

    /// `G(p/|p|)`.
    pub(crate) fn sphere_value_raw(&self, p: &[f64]) -> f64 {
        self.value_raw(p) / norm(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ellipsoid() -> AnisotropySpec {
        AnisotropySpec::ellipsoidal(Quadratic::diagonal(&[1.0, 1.0, 4.0]).unwrap()).unwrap()
    }

    #[test]
    fn isotropic_value_is_the_norm() {
        let f = AnisotropySpec::isotropic(1);
        assert_eq!(f.value(&[3.0, 4.0]).unwrap(), 5.0);
    }

    #[test]
    fn ellipsoidal_value_on_the_axis() {
        assert_eq!(ellipsoid().value(&[0.0, 0.0, -1.0]).unwrap(), 2.0);
    }

    #[test]
    fn zero_vector_is_rejected() {
        let f = ellipsoid();
        assert!(matches!(f.value(&[0.0; 3]), Err(Error::Domain(_))));
        assert!(matches!(f.gradient(&[0.0; 3]), Err(Error::Domain(_))));
        assert!(matches!(f.hessian(&[0.0; 3]), Err(Error::Domain(_))));
        assert!(matches!(f.value(&[1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn isotropic_gradient_and_hessian() {
        let f = AnisotropySpec::isotropic(1);
        let g = f.gradient(&[0.0, -1.0]).unwrap();
        assert_eq!(g.as_slice(), &[0.0, -1.0]);
        let h = f.hessian(&[0.0, -1.0]).unwrap();
        assert_eq!(h.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn ellipsoidal_gradient_matches_finite_differences() {
        let f = ellipsoid();
        let g = f.gradient(&[1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(g.as_slice()[..], [1.0, 0.0, 0.0][..], epsilon = 1e-15);
        let p = [0.3, -0.7, 1.1];
        let g = f.gradient(&p).unwrap();
        let h = 1e-6;
        for i in 0..3 {
            let mut a = p;
            let mut b = p;
            a[i] += h;
            b[i] -= h;
            let fd = (f.value(&a).unwrap() - f.value(&b).unwrap()) / (2.0 * h);
            assert_relative_eq!(g[i], fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn quadratic_rejects_bad_matrices() {
        assert!(Quadratic::new(2, vec![1.0, 0.5, 0.0, 1.0]).is_err());
        assert!(Quadratic::new(2, vec![1.0, 0.0, 0.0, -1.0]).is_err());
        assert!(Quadratic::new(2, vec![1.0, 0.0, 0.0]).is_err());
        assert!(AnisotropySpec::interpolated(1.5, Quadratic::diagonal(&[1.0, 2.0]).unwrap()).is_err());
    }

    #[test]
    fn user_fd_derivatives_track_the_analytic_family() {
        let q = Quadratic::diagonal(&[1.0, 2.0, 3.0]).unwrap();
        let qq = q.clone();
        let user = AnisotropySpec::user(
            2,
            UserAnisotropy {
                sphere_value: Arc::new(move |x| qq.value(x)),
                gradient: None,
                hessian: None,
            },
        )
        .unwrap();
        let exact = AnisotropySpec::ellipsoidal(q).unwrap();
        let p = [0.4, -0.2, 0.9];
        let (gu, ge) = (user.gradient(&p).unwrap(), exact.gradient(&p).unwrap());
        assert!((gu - ge).amax() < 1e-8);
        let (hu, he) = (user.hessian(&p).unwrap(), exact.hessian(&p).unwrap());
        assert!((hu - he).amax() < 1e-6);
    }

    #[test]
    fn mobility_extension_is_homogeneous() {
        let g = MobilitySpec::isotropic(2);
        assert_eq!(g.value(&[0.0, 3.0, -4.0]).unwrap(), 5.0);
        let g = MobilitySpec::ellipsoidal(Quadratic::diagonal(&[1.0, 1.0, 9.0]).unwrap()).unwrap();
        assert_relative_eq!(g.value(&[0.0, 0.0, -2.0]).unwrap(), 6.0);
        assert!(g.value(&[0.0; 3]).is_err());
    }
}
