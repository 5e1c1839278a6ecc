use crate::anisotropy::assemble_direct;
use crate::error::{Error, Result};
use crate::geometry::{cos_angle, IntervalGrid, MappedGrid, Mesh};

use super::problem::{BoundaryMode, Problem};

/// Cartesian first and second derivatives at a node: `du = (u_x, u_y)`,
/// `d2u = (u_xx, u_xy, u_yy)`. One-dimensional meshes use the first slot
/// of each.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeDerivs {
    pub du: [f64; 2],
    pub d2u: [f64; 3],
}

/// Normal derivative `D_N u = −cot θ·√(1 + (D_T u)²)` solving the
/// contact-angle relation `D_N u = −√(1+|Du|²) cos θ` for given `D_T u`.
pub fn ghost_normal_derivative(dt_u: f64, theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::domain(format!("contact angle {theta} outside (0, π)")));
    }
    Ok(normal_target(dt_u, theta))
}

#[inline]
pub(crate) fn normal_target(dt_u: f64, theta: f64) -> f64 {
    -cos_angle(theta) / theta.sin() * (1.0 + dt_u * dt_u).sqrt()
}

/// Scratch space and outputs of one operator evaluation.
#[derive(Debug, Clone, Default)]
pub(crate) struct Evaluation {
    pub derivs: Vec<NodeDerivs>,
    pub ut: Vec<f64>,
    pub ghost: Vec<f64>,
    /// Largest eigenvalue of `A` over all nodes where the PDE is applied.
    pub lambda_max: f64,
}

impl Evaluation {
    pub fn new(n_nodes: usize) -> Self {
        Self { derivs: vec![NodeDerivs::default(); n_nodes], ut: vec![0.0; n_nodes], ghost: Vec::new(), lambda_max: 0.0 }
    }
}

/// `u_t = a^{ij}(Du) u_{x_i x_j}` at every node, for the grid function `u`
/// at time `t`.
///
/// Contact-angle boundary nodes use ghost values built from the closed-form
/// normal derivative; Dirichlet boundary nodes report the data's time
/// derivative.
pub fn apply_operator(problem: &Problem, u: &[f64], t: f64) -> Result<Vec<f64>> {
    let mut ev = Evaluation::new(problem.mesh.n_nodes());
    problem.evaluate(u, t, &mut ev)?;
    Ok(ev.ut)
}

/// Cartesian derivatives at every node, with the same boundary closure as
/// [`apply_operator`] (one-sided differences on Dirichlet boundaries).
pub fn node_derivatives(problem: &Problem, u: &[f64], t: f64) -> Result<Vec<NodeDerivs>> {
    let mut ev = Evaluation::new(problem.mesh.n_nodes());
    problem.evaluate(u, t, &mut ev)?;
    Ok(ev.derivs)
}

#[inline]
fn eig_max_2(a: &[f64; 4]) -> f64 {
    let off = 0.5 * (a[1] + a[2]);
    let half_tr = 0.5 * (a[0] + a[3]);
    let d = 0.5 * (a[0] - a[3]);
    half_tr + (d * d + off * off).sqrt()
}

impl Problem {
    pub(crate) fn evaluate(&self, u: &[f64], t: f64, ev: &mut Evaluation) -> Result<()> {
        debug_assert_eq!(u.len(), self.mesh.n_nodes());
        if ev.ut.len() != u.len() {
            *ev = Evaluation::new(u.len());
        }
        ev.lambda_max = 0.0;
        match &self.mesh {
            Mesh::Polar(grid) => self.evaluate_polar(grid, u, t, ev),
            Mesh::Interval(grid) => self.evaluate_interval(grid, u, t, ev),
        }
    }

    fn blow_up(&self, node: usize, t: f64) -> Error {
        let p = self.mesh.xy(node);
        Error::BlowUp { node, x: p[0], y: p[1], t }
    }

    #[inline]
    fn pde_2d(&self, d: &NodeDerivs) -> (f64, f64) {
        let mut a = [0.0; 4];
        assemble_direct(&self.f, &self.g, &d.du, &mut a);
        let off = 0.5 * (a[1] + a[2]);
        let ut = a[0] * d.d2u[0] + 2.0 * off * d.d2u[1] + a[3] * d.d2u[2];
        (ut, eig_max_2(&a))
    }

    fn evaluate_polar(&self, grid: &MappedGrid, u: &[f64], t: f64, ev: &mut Evaluation) -> Result<()> {
        let nr = grid.n_r();
        let np = grid.n_phi();
        let dr = grid.dr();
        let dphi = grid.dphi();
        let idx = |i: usize, j: usize| 1 + (i - 1) * np + j;
        let jp = |j: usize| if j + 1 == np { 0 } else { j + 1 };
        let jm = |j: usize| if j == 0 { np - 1 } else { j - 1 };

        let contact = match &self.boundary {
            BoundaryMode::ContactAngle { theta, .. } => Some(theta),
            BoundaryMode::Dirichlet(_) => None,
        };
        if let Some(theta) = contact {
            ev.ghost.resize(np, 0.0);
            for j in 0..np {
                let ub = |jj: usize| u[idx(nr, jj)];
                let u_phi = (ub(jp(j)) - ub(jm(j))) / (2.0 * dphi);
                let dt_u = u_phi / grid.boundary_speed(j);
                let target = normal_target(dt_u, theta[j]);
                let [alpha, beta] = grid.normal_params(j);
                let u_r = (target - beta * u_phi) / alpha;
                ev.ghost[j] = u[idx(nr - 1, j)] + 2.0 * dr * u_r;
            }
        }

        // Center: least-squares quadratic through the center and ring 1.
        {
            let rows = grid.center_fit();
            let m = np + 1;
            // Derivative rows annihilate constants, so fitting offsets from
            // the center value keeps constant data exactly stationary.
            let mut coef = [0.0; 6];
            for (k, c) in coef.iter_mut().enumerate().skip(1) {
                let row = &rows[k * m..(k + 1) * m];
                *c = (0..np).map(|j| row[j + 1] * (u[1 + j] - u[0])).sum();
            }
            let d = NodeDerivs { du: [coef[1], coef[2]], d2u: [coef[3], coef[4], coef[5]] };
            let (ut, lam) = self.pde_2d(&d);
            if !ut.is_finite() {
                return Err(self.blow_up(0, t));
            }
            ev.derivs[0] = d;
            ev.ut[0] = ut;
            ev.lambda_max = ev.lambda_max.max(lam);
        }

        let ghost = &ev.ghost;
        for i in 1..=nr {
            let r = i as f64 * dr;
            let outer = |j: usize| if i < nr { u[idx(i + 1, j)] } else { ghost[j] };
            let inner = |j: usize| if i > 1 { u[idx(i - 1, j)] } else { u[0] };
            let dirichlet_edge = i == nr && contact.is_none();
            for j in 0..np {
                let node = idx(i, j);
                let uc = u[node];
                let (up, um) = (u[idx(i, jp(j))], u[idx(i, jm(j))]);
                let u_phi = (up - um) / (2.0 * dphi);
                let u_pp = (up - 2.0 * uc + um) / (dphi * dphi);
                let (u_r, u_rr, u_rp) = if dirichlet_edge {
                    let ring_phi = |ii: usize| (u[idx(ii, jp(j))] - u[idx(ii, jm(j))]) / (2.0 * dphi);
                    let (u1, u2, u3) = (u[idx(nr - 1, j)], u[idx(nr - 2, j)], u[idx(nr - 3, j)]);
                    (
                        (3.0 * uc - 4.0 * u1 + u2) / (2.0 * dr),
                        (2.0 * uc - 5.0 * u1 + 4.0 * u2 - u3) / (dr * dr),
                        (3.0 * u_phi - 4.0 * ring_phi(nr - 1) + ring_phi(nr - 2)) / (2.0 * dr),
                    )
                } else {
                    let (uo, ui) = (outer(j), inner(j));
                    (
                        (uo - ui) / (2.0 * dr),
                        (uo - 2.0 * uc + ui) / (dr * dr),
                        (outer(jp(j)) - outer(jm(j)) - inner(jp(j)) + inner(jm(j))) / (4.0 * dr * dphi),
                    )
                };
                let d = to_cartesian(grid, node, r, j, [u_r, u_phi], [u_rr, u_rp, u_pp]);
                ev.derivs[node] = d;
                if dirichlet_edge {
                    if let BoundaryMode::Dirichlet(data) = &self.boundary {
                        ev.ut[node] = data.rate;
                    }
                    continue;
                }
                let (ut, lam) = self.pde_2d(&d);
                if !ut.is_finite() {
                    return Err(self.blow_up(node, t));
                }
                ev.ut[node] = ut;
                ev.lambda_max = ev.lambda_max.max(lam);
            }
        }
        Ok(())
    }

    fn evaluate_interval(&self, grid: &IntervalGrid, u: &[f64], t: f64, ev: &mut Evaluation) -> Result<()> {
        let n = u.len();
        let h = grid.h();
        let (ghost_l, ghost_r) = match &self.boundary {
            BoundaryMode::ContactAngle { theta, .. } => {
                let dl = normal_target(0.0, theta[0]);
                let dr = normal_target(0.0, theta[1]);
                // Inward normals are +1 on the left and −1 on the right.
                (Some(u[1] - 2.0 * h * dl), Some(u[n - 2] - 2.0 * h * dr))
            }
            BoundaryMode::Dirichlet(_) => (None, None),
        };
        let mut du = [0.0; 1];
        let mut a = [0.0; 1];
        for i in 0..n {
            let (um, up) = match (i, i + 1 == n) {
                (0, _) => match ghost_l {
                    Some(gl) => (gl, u[1]),
                    None => {
                        let ux = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
                        ev.derivs[0] = NodeDerivs { du: [ux, 0.0], d2u: [0.0; 3] };
                        ev.ut[0] = self.dirichlet_rate();
                        continue;
                    }
                },
                (_, true) => match ghost_r {
                    Some(gr) => (u[n - 2], gr),
                    None => {
                        let ux = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
                        ev.derivs[i] = NodeDerivs { du: [ux, 0.0], d2u: [0.0; 3] };
                        ev.ut[i] = self.dirichlet_rate();
                        continue;
                    }
                },
                _ => (u[i - 1], u[i + 1]),
            };
            let ux = (up - um) / (2.0 * h);
            let uxx = (up - 2.0 * u[i] + um) / (h * h);
            du[0] = ux;
            assemble_direct(&self.f, &self.g, &du, &mut a);
            let ut = a[0] * uxx;
            if !ut.is_finite() {
                return Err(self.blow_up(i, t));
            }
            ev.derivs[i] = NodeDerivs { du: [ux, 0.0], d2u: [uxx, 0.0, 0.0] };
            ev.ut[i] = ut;
            ev.lambda_max = ev.lambda_max.max(a[0]);
        }
        Ok(())
    }

    fn dirichlet_rate(&self) -> f64 {
        match &self.boundary {
            BoundaryMode::Dirichlet(d) => d.rate,
            BoundaryMode::ContactAngle { .. } => 0.0,
        }
    }
}

/// Maps `(U_r, U_φ)` and `(U_rr, U_rφ, U_φφ)` to Cartesian derivatives:
/// `∇u = J⁻ᵀ(U_r, U_φ)`, `D²u = J⁻ᵀ (H − Σ_k ∂_k u ∂²x_k) J⁻¹`, using
/// `x_rr = 0`, `x_rφ = B'`, `x_φφ = r B''`.
#[inline]
pub(crate) fn to_cartesian(grid: &MappedGrid, node: usize, r: f64, j: usize, g: [f64; 2], h: [f64; 3]) -> NodeDerivs {
    let [a, b, c, d] = *grid.jinv(node);
    let ux = a * g[0] + c * g[1];
    let uy = b * g[0] + d * g[1];
    let b1 = grid.b1(j);
    let b2 = grid.b2(j);
    let hrr = h[0];
    let hrp = h[1] - (ux * b1[0] + uy * b1[1]);
    let hpp = h[2] - r * (ux * b2[0] + uy * b2[1]);
    NodeDerivs {
        du: [ux, uy],
        d2u: [
            a * a * hrr + 2.0 * a * c * hrp + c * c * hpp,
            a * b * hrr + (a * d + b * c) * hrp + c * d * hpp,
            b * b * hrr + 2.0 * b * d * hrp + d * d * hpp,
        ],
    }
}
