use std::f64::consts::TAU;

use crate::anisotropy::{
    check_curvature_condition, estimate_constants, gamma_constants, AnisotropySpec, BoundsReport,
    CurvatureCheck, GammaConstants, MobilitySpec, DEFAULT_SPHERE_SAMPLES,
};
use crate::error::{Error, Result};
use crate::geometry::{
    check_angle, check_contact_assumptions, ContactAngleField, ContactAssumptions, IntervalGrid,
    MappedGrid, Mesh,
};

/// Boundary samples used when validating contact angles and measuring
/// Dirichlet data.
pub const VALIDATION_SAMPLES: usize = 1024;

/// Time-independent part `g` of Dirichlet data `u = g(x) + λt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirichletProfile {
    Zero,
    /// `a x + b y + c`.
    Affine { a: f64, b: f64, c: f64 },
    /// `c x y`.
    Product { c: f64 },
}

impl DirichletProfile {
    pub fn value(&self, p: [f64; 2]) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Affine { a, b, c } => a * p[0] + b * p[1] + c,
            Self::Product { c } => c * p[0] * p[1],
        }
    }

    pub fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        match *self {
            Self::Zero => [0.0, 0.0],
            Self::Affine { a, b, .. } => [a, b],
            Self::Product { c } => [c * p[1], c * p[0]],
        }
    }

    /// `(g_xx, g_xy, g_yy)`.
    pub fn hessian(&self) -> [f64; 3] {
        match *self {
            Self::Product { c } => [0.0, c, 0.0],
            _ => [0.0; 3],
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Self::Zero => "zero".into(),
            Self::Affine { a, b, c } => format!("affine:{a:?}:{b:?}:{c:?}"),
            Self::Product { c } => format!("product:{c:?}"),
        }
    }
}

/// Dirichlet data `u = g(x) + rate·t` on the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryData {
    pub profile: DirichletProfile,
    pub rate: f64,
}

impl BoundaryData {
    pub fn stationary(profile: DirichletProfile) -> Self {
        Self { profile, rate: 0.0 }
    }

    pub fn translating(profile: DirichletProfile, rate: f64) -> Self {
        Self { profile, rate }
    }

    pub fn value(&self, p: [f64; 2], t: f64) -> f64 {
        self.profile.value(p) + self.rate * t
    }
}

#[derive(Debug, Clone)]
pub enum BoundaryMode {
    /// Prescribed contact angle, one value per boundary node (polar grids:
    /// boundary ring order; intervals: left, right).
    ContactAngle { field: Option<ContactAngleField>, theta: Vec<f64> },
    Dirichlet(BoundaryData),
}

/// Everything measured while validating a problem.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub bounds: BoundsReport,
    pub contact: Option<ContactAssumptions>,
    /// Smallest / largest boundary curvature (zero for intervals).
    pub k0: f64,
    pub k1: f64,
    /// Measured bound `M` on `|f_t|`, `|D_T f|`, `|D_TT f|`.
    pub data_bound: Option<f64>,
    pub gamma: Option<GammaConstants>,
    pub curvature_check: Option<CurvatureCheck>,
}

/// A validated flow problem: mesh, energy, mobility and boundary condition.
///
/// Construction measures the structural constants and refuses inputs that
/// violate the assumptions the estimates rest on, so no time step is ever
/// taken on an unvalidated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub(crate) mesh: Mesh,
    pub(crate) f: AnisotropySpec,
    pub(crate) g: MobilitySpec,
    pub(crate) boundary: BoundaryMode,
    pub(crate) report: ValidationReport,
}

fn check_dims(f: &AnisotropySpec, g: &MobilitySpec, n: usize) -> Result<()> {
    if f.dim() != n || g.dim() != n {
        return Err(Error::domain(format!(
            "mesh has dimension {n}, anisotropy {} and mobility {}",
            f.dim(),
            g.dim()
        )));
    }
    Ok(())
}

fn require_a3(bounds: &BoundsReport) -> Result<()> {
    if !bounds.a3_holds {
        return Err(Error::Assumption {
            name: "A3",
            detail: format!(
                "m2 = {:.6} is not below m0 = {:.6}",
                bounds.hess_bound, bounds.f_min
            ),
        });
    }
    Ok(())
}

impl Problem {
    /// Contact-angle problem on a polar grid.
    pub fn contact_angle(
        grid: MappedGrid,
        field: ContactAngleField,
        f: AnisotropySpec,
        g: MobilitySpec,
    ) -> Result<Self> {
        check_dims(&f, &g, 2)?;
        let bounds = estimate_constants(&f, &g, DEFAULT_SPHERE_SAMPLES)?;
        require_a3(&bounds)?;
        let domain = grid.domain();
        let contact = check_contact_assumptions(domain, &field, VALIDATION_SAMPLES)?;
        let theta: Vec<f64> = (0..grid.n_phi()).map(|j| field.value(grid.phi(j))).collect();
        for (j, t) in theta.iter().enumerate() {
            check_angle(*t, grid.phi(j))?;
        }
        if !contact.pass {
            return Err(Error::Assumption {
                name: "A2",
                detail: format!(
                    "delta0 = {:.6} (worst at boundary parameter {:.4}), theta0 = {:.6}",
                    contact.delta0, contact.worst_phi, contact.theta0
                ),
            });
        }
        let report = ValidationReport {
            bounds,
            contact: Some(contact),
            k0: domain.k0(),
            k1: domain.k1(),
            data_bound: None,
            gamma: None,
            curvature_check: None,
        };
        Ok(Self {
            mesh: Mesh::Polar(grid),
            f,
            g,
            boundary: BoundaryMode::ContactAngle { field: Some(field), theta },
            report,
        })
    }

    /// Contact-angle problem on `[-L, L]`, angles given at the left and right
    /// endpoints.
    pub fn interval(
        grid: IntervalGrid,
        theta_left: f64,
        theta_right: f64,
        f: AnisotropySpec,
        g: MobilitySpec,
    ) -> Result<Self> {
        check_dims(&f, &g, 1)?;
        let l = grid.half_length();
        check_angle(theta_left, -l)?;
        check_angle(theta_right, l)?;
        let bounds = estimate_constants(&f, &g, DEFAULT_SPHERE_SAMPLES)?;
        require_a3(&bounds)?;
        let theta0 = theta_left.min(theta_right).min(std::f64::consts::PI - theta_left.max(theta_right));
        let report = ValidationReport {
            bounds,
            contact: Some(ContactAssumptions {
                pass: true,
                delta0: f64::INFINITY,
                theta0,
                worst_phi: 0.0,
                n_samples: 2,
            }),
            k0: 0.0,
            k1: 0.0,
            data_bound: None,
            gamma: None,
            curvature_check: None,
        };
        Ok(Self {
            mesh: Mesh::Interval(grid),
            f,
            g,
            boundary: BoundaryMode::ContactAngle { field: None, theta: vec![theta_left, theta_right] },
            report,
        })
    }

    /// Dirichlet problem `u = g + rate·t` on a polar grid.
    ///
    /// Measures `M = max(|rate|, sup|D_T g|, sup|D_TT g|)` on the boundary
    /// and requires the weighted curvature condition at every boundary
    /// point.
    pub fn dirichlet(grid: MappedGrid, data: BoundaryData, f: AnisotropySpec, g: MobilitySpec) -> Result<Self> {
        check_dims(&f, &g, 2)?;
        let mut bounds = estimate_constants(&f, &g, DEFAULT_SPHERE_SAMPLES)?;
        let domain = grid.domain();
        let m = measure_data_bound(&grid, &data);
        let gamma = gamma_constants(&bounds, m);
        // One principal curvature per boundary point in the plane; the
        // condition is tightest where k is smallest.
        let check = check_curvature_condition(&gamma, &[domain.k0()])?;
        bounds.gamma_condition = Some(check.pass);
        if !check.pass {
            return Err(Error::Assumption {
                name: "gamma",
                detail: format!(
                    "gamma1 = {:.6}, weighted curvature = {:.6} at M = {:.6}",
                    gamma.gamma1, check.margin, m
                ),
            });
        }
        let report = ValidationReport {
            bounds,
            contact: None,
            k0: domain.k0(),
            k1: domain.k1(),
            data_bound: Some(m),
            gamma: Some(gamma),
            curvature_check: Some(check),
        };
        Ok(Self { mesh: Mesh::Polar(grid), f, g, boundary: BoundaryMode::Dirichlet(data), report })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn anisotropy(&self) -> &AnisotropySpec {
        &self.f
    }

    pub fn mobility(&self) -> &MobilitySpec {
        &self.g
    }

    pub fn boundary(&self) -> &BoundaryMode {
        &self.boundary
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn is_contact(&self) -> bool {
        matches!(self.boundary, BoundaryMode::ContactAngle { .. })
    }

    /// A copy of this problem with different Dirichlet data, re-validated.
    pub fn with_dirichlet_data(&self, data: BoundaryData) -> Result<Self> {
        match &self.mesh {
            Mesh::Polar(g) => Self::dirichlet(g.clone(), data, self.f.clone(), self.g.clone()),
            Mesh::Interval(_) => Err(Error::domain("Dirichlet data needs a polar grid")),
        }
    }

    /// Boundary data at node `node` and time `t` (Dirichlet problems).
    pub(crate) fn dirichlet_value(&self, data: &BoundaryData, node: usize, t: f64) -> f64 {
        data.value(self.mesh.xy(node), t)
    }
}

/// `max(|rate|, sup|D_T g|, sup|D_TT g|)` over densely sampled boundary
/// points, with `D_TT g = Tᵀ D²g T + k ∇g·N`.
pub fn measure_data_bound(grid: &MappedGrid, data: &BoundaryData) -> f64 {
    let domain = grid.domain();
    let mut m = data.rate.abs();
    let h = data.profile.hessian();
    for i in 0..VALIDATION_SAMPLES {
        let phi = TAU * i as f64 / VALIDATION_SAMPLES as f64;
        let fr = domain.frame_at(phi);
        let grad = data.profile.gradient(fr.point);
        let t = fr.tangent;
        let nn = fr.normal;
        let dt = grad[0] * t[0] + grad[1] * t[1];
        let tht = h[0] * t[0] * t[0] + 2.0 * h[1] * t[0] * t[1] + h[2] * t[1] * t[1];
        let dtt = tht + fr.curvature * (grad[0] * nn[0] + grad[1] * nn[1]);
        m = m.max(dt.abs()).max(dtt.abs());
    }
    m
}
