use crate::error::{Error, Result};
use crate::geometry::{cos_angle, Mesh};

use super::operator::normal_target;
use super::problem::{BoundaryMode, Problem};

/// Mismatch below which a boundary ray is left untouched.
pub const COMPAT_TARGET: f64 = 1e-8;
const MAX_ITERATIONS: usize = 20;

/// One boundary node and the nodes behind it along the inward ray.
struct Ray {
    nodes: Vec<usize>,
    /// `D_N u = coef·(3u₀ − 4u₁ + u₂) + β·U_φ`.
    coef: f64,
    beta: f64,
    /// Tangential parameter derivative and `|B'|` (zero/one on intervals).
    u_phi: f64,
    speed: f64,
    theta: f64,
}

fn rays(problem: &Problem, u: &[f64]) -> Vec<Ray> {
    let BoundaryMode::ContactAngle { theta, .. } = &problem.boundary else {
        return Vec::new();
    };
    match &problem.mesh {
        Mesh::Polar(grid) => {
            let (nr, np) = (grid.n_r(), grid.n_phi());
            (0..np)
                .map(|j| {
                    let [alpha, beta] = grid.normal_params(j);
                    let nodes: Vec<usize> = (1..=nr).rev().map(|i| grid.index(i, j)).collect();
                    let ub = |jj: usize| u[grid.index(nr, jj)];
                    let u_phi = (ub((j + 1) % np) - ub((j + np - 1) % np)) / (2.0 * grid.dphi());
                    Ray {
                        nodes,
                        coef: alpha / (2.0 * grid.dr()),
                        beta,
                        u_phi,
                        speed: grid.boundary_speed(j),
                        theta: theta[j],
                    }
                })
                .collect()
        }
        Mesh::Interval(grid) => {
            let n = grid.n_nodes();
            let half = grid.n_r() + 1;
            let coef = -1.0 / (2.0 * grid.h());
            vec![
                Ray { nodes: (0..half).collect(), coef, beta: 0.0, u_phi: 0.0, speed: 1.0, theta: theta[0] },
                Ray { nodes: (0..half).map(|k| n - 1 - k).collect(), coef, beta: 0.0, u_phi: 0.0, speed: 1.0, theta: theta[1] },
            ]
        }
    }
}

impl Ray {
    fn normal_derivative(&self, u: &[f64]) -> f64 {
        let n = &self.nodes;
        self.coef * (3.0 * u[n[0]] - 4.0 * u[n[1]] + u[n[2]]) + self.beta * self.u_phi
    }

    fn tangential(&self) -> f64 {
        self.u_phi / self.speed
    }

    fn mismatch(&self, u: &[f64]) -> f64 {
        let dn = self.normal_derivative(u);
        let dt = self.tangential();
        let v = (1.0 + dn * dn + dt * dt).sqrt();
        (dn + v * cos_angle(self.theta)).abs()
    }
}

/// Largest violation of `D_N u = −√(1+|Du|²) cos θ` over boundary nodes,
/// with one-sided second-order normal differences, and the node where it
/// occurs. Dirichlet problems report the largest deviation from the data at
/// `t = 0`.
pub fn compat_mismatch(problem: &Problem, u: &[f64]) -> Result<(usize, f64)> {
    if u.len() != problem.mesh.n_nodes() {
        return Err(Error::domain("grid function does not match the mesh"));
    }
    if let BoundaryMode::Dirichlet(data) = &problem.boundary {
        return Ok(problem
            .mesh
            .boundary_nodes()
            .into_iter()
            .map(|node| (node, (u[node] - problem.dirichlet_value(data, node, 0.0)).abs()))
            .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a }));
    }
    Ok(rays(problem, u)
        .iter()
        .map(|r| (r.nodes[0], r.mismatch(u)))
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a }))
}

/// Collar width in units of the normalized distance from the boundary.
fn collar_width(n_r: usize) -> f64 {
    (3.0 / n_r as f64).max(0.3).min(0.9)
}

fn collar(d: f64, w: f64) -> f64 {
    if d >= w {
        0.0
    } else {
        let s = 1.0 - d / w;
        -d * s * s * s
    }
}

/// Corrects `u_raw` in a boundary collar so that the contact-angle relation
/// holds at every boundary node to within `1e-8`.
///
/// Each inward ray receives a multiple of the profile `−d(1 − d/w)³`, where
/// `d` is the normalized distance from the boundary and `w` the collar
/// width; the profile vanishes on the boundary itself, so tangential
/// derivatives and the target slope do not move. Rays already within
/// tolerance are left untouched. Dirichlet problems get their boundary
/// values replaced by the data.
pub fn compatibilize(problem: &Problem, u_raw: &[f64]) -> Result<Vec<f64>> {
    let mut u = u_raw.to_vec();
    if u.len() != problem.mesh.n_nodes() {
        return Err(Error::domain("grid function does not match the mesh"));
    }
    if let BoundaryMode::Dirichlet(data) = &problem.boundary {
        for node in problem.mesh.boundary_nodes() {
            u[node] = problem.dirichlet_value(data, node, 0.0);
        }
        return Ok(u);
    }
    let n_r = match &problem.mesh {
        Mesh::Polar(g) => g.n_r(),
        Mesh::Interval(g) => g.n_r(),
    };
    let w = collar_width(n_r);
    let profile: Vec<f64> = (0..=n_r).map(|k| collar(k as f64 / n_r as f64, w)).collect();
    for _ in 0..MAX_ITERATIONS {
        let rs = rays(problem, &u);
        let mut worst: f64 = 0.0;
        for ray in &rs {
            if ray.mismatch(&u) < COMPAT_TARGET {
                continue;
            }
            let target = normal_target(ray.tangential(), ray.theta);
            let dpsi = ray.coef * (3.0 * profile[0] - 4.0 * profile[1] + profile[2]);
            let c = (target - ray.normal_derivative(&u)) / dpsi;
            for (k, &node) in ray.nodes.iter().enumerate().skip(1) {
                if profile[k] == 0.0 {
                    break;
                }
                u[node] += c * profile[k];
            }
            worst = worst.max(ray.mismatch(&u));
        }
        if worst < COMPAT_TARGET {
            break;
        }
    }
    let (node, mismatch) = compat_mismatch(problem, &u)?;
    if mismatch >= COMPAT_TARGET {
        return Err(Error::Incompatible { node, mismatch });
    }
    Ok(u)
}
