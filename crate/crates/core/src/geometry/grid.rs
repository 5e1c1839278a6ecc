use std::f64::consts::TAU;

use nalgebra::DMatrix;

use super::domain::{norm, BoundaryFrame, ConvexDomain2D};
use crate::error::{Error, Result};

type V2 = [f64; 2];

pub const MIN_RINGS: usize = 8;
pub const MIN_ANGLES: usize = 16;

/// Star-shaped polar grid `x(r, φ) = c + r (B(φ) − c)` on a convex domain.
///
/// Node 0 is the center; ring `i ∈ 1..=n_r` at `r_i = i/n_r` holds
/// `n_φ` nodes at `φ_j = 2πj/n_φ`, with index `1 + (i−1)n_φ + j`. The
/// outermost ring lies on the boundary curve.
#[derive(Debug, Clone)]
pub struct MappedGrid {
    domain: ConvexDomain2D,
    n_r: usize,
    n_phi: usize,
    dr: f64,
    dphi: f64,
    xy: Vec<V2>,
    /// Row-major `J⁻¹` per non-center node (offset by one).
    jinv: Vec<[f64; 4]>,
    phi: Vec<f64>,
    b1: Vec<V2>,
    b2: Vec<V2>,
    frames: Vec<BoundaryFrame>,
    /// `J⁻¹N` on the boundary ring.
    normal_params: Vec<V2>,
    weights: Vec<f64>,
    /// Least-squares rows mapping (center, ring 1) values to
    /// `(u, u_x, u_y, u_xx, u_xy, u_yy)` at the center.
    center_fit: Vec<f64>,
    h_min: f64,
    h_max: f64,
}

impl MappedGrid {
    pub fn new(domain: &ConvexDomain2D, n_r: usize, n_phi: usize) -> Result<Self> {
        if n_r < MIN_RINGS || n_phi < MIN_ANGLES {
            return Err(Error::domain(format!(
                "grid {n_r}x{n_phi} below the minimum {MIN_RINGS}x{MIN_ANGLES}"
            )));
        }
        let c = domain.center();
        let dr = 1.0 / n_r as f64;
        let dphi = TAU / n_phi as f64;
        let phi: Vec<f64> = (0..n_phi).map(|j| j as f64 * dphi).collect();
        let bpts: Vec<V2> = phi.iter().map(|&p| domain.point(p)).collect();
        let b1: Vec<V2> = phi.iter().map(|&p| domain.d1(p)).collect();
        let b2: Vec<V2> = phi.iter().map(|&p| domain.d2(p)).collect();
        let frames: Vec<BoundaryFrame> = phi.iter().map(|&p| domain.frame_at(p)).collect();

        let n_nodes = n_r * n_phi + 1;
        let mut xy = Vec::with_capacity(n_nodes);
        let mut jinv = Vec::with_capacity(n_nodes - 1);
        let mut weights = Vec::with_capacity(n_nodes);
        xy.push(c);
        let cross: Vec<f64> = (0..n_phi)
            .map(|j| {
                let xr = [bpts[j][0] - c[0], bpts[j][1] - c[1]];
                xr[0] * b1[j][1] - xr[1] * b1[j][0]
            })
            .collect();
        let area = 0.5 * dphi * cross.iter().sum::<f64>();
        weights.push(area * (0.5 * dr) * (0.5 * dr));

        let mut h_min = f64::INFINITY;
        let mut h_max: f64 = 0.0;
        for i in 1..=n_r {
            let r = i as f64 * dr;
            let (r_lo, r_hi) = (r - 0.5 * dr, if i == n_r { r } else { r + 0.5 * dr });
            for j in 0..n_phi {
                let xr = [bpts[j][0] - c[0], bpts[j][1] - c[1]];
                let xp = [r * b1[j][0], r * b1[j][1]];
                xy.push([c[0] + r * xr[0], c[1] + r * xr[1]]);
                let det = xr[0] * xp[1] - xp[0] * xr[1];
                let node = 1 + (i - 1) * n_phi + j;
                if !(det > 0.0) || !det.is_finite() {
                    return Err(Error::Grid {
                        node,
                        reason: format!("Jacobian determinant {det:.3e} is not positive"),
                    });
                }
                jinv.push([xp[1] / det, -xp[0] / det, -xr[1] / det, xr[0] / det]);
                weights.push(cross[j] * dphi * 0.5 * (r_hi * r_hi - r_lo * r_lo));
                let radial = dr * norm(xr);
                let angular = r * norm(b1[j]) * dphi;
                h_min = h_min.min(radial).min(angular);
                h_max = h_max.max(radial).max(angular);
            }
        }
        let normal_params = (0..n_phi)
            .map(|j| {
                let m = jinv[(n_r - 1) * n_phi + j];
                let nv = frames[j].normal;
                [m[0] * nv[0] + m[1] * nv[1], m[2] * nv[0] + m[3] * nv[1]]
            })
            .collect();

        let center_fit = center_fit_rows(&xy[1..=n_phi], c)?;
        Ok(Self {
            domain: domain.clone(),
            n_r,
            n_phi,
            dr,
            dphi,
            xy,
            jinv,
            phi,
            b1,
            b2,
            frames,
            normal_params,
            weights,
            center_fit,
            h_min,
            h_max,
        })
    }

    pub fn domain(&self) -> &ConvexDomain2D {
        &self.domain
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn dphi(&self) -> f64 {
        self.dphi
    }

    pub fn n_nodes(&self) -> usize {
        self.xy.len()
    }

    #[inline]
    pub fn index(&self, ring: usize, j: usize) -> usize {
        debug_assert!(ring >= 1 && ring <= self.n_r);
        1 + (ring - 1) * self.n_phi + j % self.n_phi
    }

    /// `(ring, j)` for a non-center node.
    #[inline]
    pub fn ring_of(&self, node: usize) -> (usize, usize) {
        debug_assert!(node > 0);
        (1 + (node - 1) / self.n_phi, (node - 1) % self.n_phi)
    }

    pub fn xy(&self, node: usize) -> V2 {
        self.xy[node]
    }

    pub fn coords(&self) -> &[V2] {
        &self.xy
    }

    /// `(r, φ)` of a node; the center reports `(0, 0)`.
    pub fn polar(&self, node: usize) -> (f64, f64) {
        if node == 0 {
            return (0.0, 0.0);
        }
        let (i, j) = self.ring_of(node);
        (i as f64 * self.dr, self.phi[j])
    }

    pub fn phi(&self, j: usize) -> f64 {
        self.phi[j]
    }

    #[inline]
    pub(crate) fn jinv(&self, node: usize) -> &[f64; 4] {
        &self.jinv[node - 1]
    }

    /// `B'(φ_j)`, i.e. `∂²x/∂r∂φ`.
    #[inline]
    pub(crate) fn b1(&self, j: usize) -> V2 {
        self.b1[j]
    }

    /// `B''(φ_j)`; `∂²x/∂φ² = r B''`.
    #[inline]
    pub(crate) fn b2(&self, j: usize) -> V2 {
        self.b2[j]
    }

    pub fn boundary_frame(&self, j: usize) -> &BoundaryFrame {
        &self.frames[j]
    }

    /// `(α, β)` with `D_N u = α U_r + β U_φ` on the boundary ring.
    #[inline]
    pub(crate) fn normal_params(&self, j: usize) -> V2 {
        self.normal_params[j]
    }

    #[inline]
    pub fn boundary_speed(&self, j: usize) -> f64 {
        norm(self.b1[j])
    }

    pub fn boundary_nodes(&self) -> std::ops::Range<usize> {
        let first = self.index(self.n_r, 0);
        first..first + self.n_phi
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        node > 0 && self.ring_of(node).0 == self.n_r
    }

    /// Quadrature weights (cell areas); they sum to the domain area up to
    /// the boundary-curve quadrature error.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn center_fit(&self) -> &[f64] {
        &self.center_fit
    }

    /// Smallest distance between neighbouring nodes.
    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    /// Largest distance between neighbouring nodes.
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Largest distance from a boundary-ring node to the boundary curve at
    /// the same parameter.
    pub fn boundary_offset(&self) -> f64 {
        self.boundary_nodes()
            .enumerate()
            .map(|(j, node)| {
                let b = self.domain.point(self.phi[j]);
                norm([self.xy[node][0] - b[0], self.xy[node][1] - b[1]])
            })
            .fold(0.0, f64::max)
    }
}

fn center_fit_rows(ring: &[V2], c: V2) -> Result<Vec<f64>> {
    let m = ring.len() + 1;
    let mut a = DMatrix::<f64>::zeros(m, 6);
    a[(0, 0)] = 1.0;
    for (k, p) in ring.iter().enumerate() {
        let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
        let row = [1.0, dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy];
        for (col, v) in row.iter().enumerate() {
            a[(k + 1, col)] = *v;
        }
    }
    let ata = a.transpose() * &a;
    let inv = ata.try_inverse().ok_or_else(|| Error::Grid {
        node: 0,
        reason: "center least-squares system is singular".into(),
    })?;
    let pinv = inv * a.transpose();
    let mut rows = Vec::with_capacity(6 * m);
    for r in 0..6 {
        for col in 0..m {
            rows.push(pinv[(r, col)]);
        }
    }
    Ok(rows)
}

/// Uniform grid on `[-L, L]` with `2 n_r + 1` nodes and spacing `L / n_r`.
#[derive(Debug, Clone)]
pub struct IntervalGrid {
    half_length: f64,
    n_r: usize,
    h: f64,
    x: Vec<f64>,
    weights: Vec<f64>,
}

impl IntervalGrid {
    pub fn new(half_length: f64, n_r: usize) -> Result<Self> {
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(Error::domain(format!("half length {half_length} must be positive")));
        }
        if n_r < MIN_RINGS {
            return Err(Error::domain(format!("interval grid needs n_r >= {MIN_RINGS}, got {n_r}")));
        }
        let h = half_length / n_r as f64;
        let x: Vec<f64> = (0..=2 * n_r).map(|i| -half_length + i as f64 * h).collect();
        let mut weights = vec![h; x.len()];
        weights[0] = 0.5 * h;
        weights[2 * n_r] = 0.5 * h;
        Ok(Self { half_length, n_r, h, x, weights })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_nodes(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// The spatial discretization a problem runs on.
#[derive(Debug, Clone)]
pub enum Mesh {
    Interval(IntervalGrid),
    Polar(MappedGrid),
}

impl Mesh {
    /// Base-space dimension `n`.
    pub fn dim(&self) -> usize {
        match self {
            Mesh::Interval(_) => 1,
            Mesh::Polar(_) => 2,
        }
    }

    pub fn n_nodes(&self) -> usize {
        match self {
            Mesh::Interval(g) => g.n_nodes(),
            Mesh::Polar(g) => g.n_nodes(),
        }
    }

    pub fn weights(&self) -> &[f64] {
        match self {
            Mesh::Interval(g) => g.weights(),
            Mesh::Polar(g) => g.weights(),
        }
    }

    pub fn h_min(&self) -> f64 {
        match self {
            Mesh::Interval(g) => g.h(),
            Mesh::Polar(g) => g.h_min(),
        }
    }

    pub fn h_max(&self) -> f64 {
        match self {
            Mesh::Interval(g) => g.h(),
            Mesh::Polar(g) => g.h_max(),
        }
    }

    /// Cartesian position; interval nodes report `(x, 0)`.
    pub fn xy(&self, node: usize) -> V2 {
        match self {
            Mesh::Interval(g) => [g.x[node], 0.0],
            Mesh::Polar(g) => g.xy(node),
        }
    }

    /// `(r, φ)` for snapshots; interval nodes report `(x, 0)`.
    pub fn polar(&self, node: usize) -> (f64, f64) {
        match self {
            Mesh::Interval(g) => (g.x[node], 0.0),
            Mesh::Polar(g) => g.polar(node),
        }
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        match self {
            Mesh::Interval(g) => vec![0, g.n_nodes() - 1],
            Mesh::Polar(g) => g.boundary_nodes().collect(),
        }
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        match self {
            Mesh::Interval(g) => node == 0 || node + 1 == g.n_nodes(),
            Mesh::Polar(g) => g.is_boundary(node),
        }
    }

    /// Index of the node used as the reference point for translator
    /// extrapolation: the center of a polar grid, the midpoint of an
    /// interval.
    pub fn reference_node(&self) -> usize {
        match self {
            Mesh::Interval(g) => g.n_r,
            Mesh::Polar(_) => 0,
        }
    }

    pub fn polar_grid(&self) -> Option<&MappedGrid> {
        match self {
            Mesh::Polar(g) => Some(g),
            Mesh::Interval(_) => None,
        }
    }

    pub fn interval_grid(&self) -> Option<&IntervalGrid> {
        match self {
            Mesh::Interval(g) => Some(g),
            Mesh::Polar(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_disk_is_standard_polar() {
        let d = ConvexDomain2D::disk(1.0).unwrap();
        let g = MappedGrid::new(&d, 8, 16).unwrap();
        assert_eq!(g.n_nodes(), 8 * 16 + 1);
        let node = g.index(4, 3);
        let (r, phi) = g.polar(node);
        let p = g.xy(node);
        assert!((p[0] - r * phi.cos()).abs() < 1e-15 && (p[1] - r * phi.sin()).abs() < 1e-15);
        assert!(g.boundary_offset() < 1e-10);
    }

    #[test]
    fn weights_sum_to_area() {
        let d = ConvexDomain2D::ellipse(2.0, 1.0).unwrap();
        let g = MappedGrid::new(&d, 10, 32).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn undersized_grids_are_rejected() {
        let d = ConvexDomain2D::disk(1.0).unwrap();
        assert!(MappedGrid::new(&d, 7, 16).is_err());
        assert!(MappedGrid::new(&d, 8, 15).is_err());
        assert!(IntervalGrid::new(1.0, 4).is_err());
    }

    #[test]
    fn interval_spacing() {
        let g = IntervalGrid::new(1.0, 200).unwrap();
        assert_eq!(g.n_nodes(), 401);
        assert_eq!(g.h(), 0.005);
        assert_eq!(g.x()[200], 0.0);
    }
}
