use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Default cap on the ellipse aspect ratio `max(a,b)/min(a,b)`.
pub const DEFAULT_ASPECT_CAP: f64 = 4.0;

const ARCLENGTH_PANELS: usize = 4096;

type V2 = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
enum Curve {
    Ellipse { a: f64, b: f64 },
    /// Periodic cubic spline through `pts` at uniform parameters, with
    /// second derivatives `m`.
    Spline { pts: Vec<V2>, m: Vec<V2> },
}

/// Unit tangent, inward unit normal and curvature at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFrame {
    pub s: f64,
    pub phi: f64,
    pub point: V2,
    pub tangent: V2,
    pub normal: V2,
    pub curvature: f64,
}

/// A uniformly convex planar domain with a counterclockwise boundary curve
/// `B(φ)`, `φ ∈ [0, 2π)`.
///
/// The curve parameter `φ` is the one the grids are built on; arclength is
/// tabulated and inverted on demand.
#[derive(Debug, Clone)]
pub struct ConvexDomain2D {
    curve: Curve,
    center: V2,
    length: f64,
    /// Cumulative arclength at `φ = 2πi/ARCLENGTH_PANELS`.
    table: Vec<f64>,
    k0: f64,
    k1: f64,
    tag: &'static str,
}

impl ConvexDomain2D {
    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!("radius {radius} must be positive")));
        }
        Self::build(Curve::Ellipse { a: radius, b: radius }, [0.0, 0.0], "disk")
    }

    /// `B(φ) = (a cos φ, b sin φ)` with the default aspect cap.
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::ellipse_with_cap(a, b, DEFAULT_ASPECT_CAP)
    }

    pub fn ellipse_with_cap(a: f64, b: f64, cap: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::domain(format!("semi-axes ({a}, {b}) must be positive")));
        }
        let ratio = a.max(b) / a.min(b);
        if ratio > cap {
            return Err(Error::domain(format!(
                "ellipse aspect ratio {ratio:.3} exceeds the cap {cap}"
            )));
        }
        Self::build(Curve::Ellipse { a, b }, [0.0, 0.0], "ellipse")
    }

    /// Periodic cubic interpolant through `points`, taken at uniformly
    /// spaced parameters. Clockwise input is reversed. The interpolant is
    /// only C², so its curvature is continuous but not smooth.
    pub fn from_points(points: &[V2]) -> Result<Self> {
        let m = points.len();
        if m < 8 {
            return Err(Error::domain(format!("need at least 8 boundary points, got {m}")));
        }
        let mut pts = points.to_vec();
        let area: f64 = (0..m)
            .map(|i| {
                let (p, q) = (pts[i], pts[(i + 1) % m]);
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>()
            * 0.5;
        if area.abs() < 1e-14 {
            return Err(Error::domain("boundary points enclose no area"));
        }
        if area < 0.0 {
            pts.reverse();
        }
        let mut center = [0.0, 0.0];
        for p in &pts {
            center[0] += p[0] / m as f64;
            center[1] += p[1] / m as f64;
        }
        let m2 = periodic_spline_moments(&pts);
        Self::build(Curve::Spline { pts, m: m2 }, center, "spline")
    }

    fn build(curve: Curve, center: V2, tag: &'static str) -> Result<Self> {
        let mut d = Self { curve, center, length: 0.0, table: Vec::new(), k0: 0.0, k1: 0.0, tag };
        let h = TAU / ARCLENGTH_PANELS as f64;
        let mut table = Vec::with_capacity(ARCLENGTH_PANELS + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for i in 0..ARCLENGTH_PANELS {
            let a = i as f64 * h;
            let speed = |t: f64| norm(d.d1(t));
            acc += h / 6.0 * (speed(a) + 4.0 * speed(a + 0.5 * h) + speed(a + h));
            table.push(acc);
        }
        d.length = acc;
        d.table = table;
        let (mut k0, mut k1) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..ARCLENGTH_PANELS {
            let k = d.curvature_at(i as f64 * h);
            k0 = k0.min(k);
            k1 = k1.max(k);
        }
        if !(k0 > 0.0) {
            return Err(Error::Assumption {
                name: "A1",
                detail: format!("boundary curvature reaches {k0:.3e}; the domain is not uniformly convex"),
            });
        }
        d.k0 = k0;
        d.k1 = k1;
        Ok(d)
    }

    pub fn tag(&self) -> &'static str {
        self.tag
    }

    pub fn center(&self) -> V2 {
        self.center
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Minimum boundary curvature.
    pub fn k0(&self) -> f64 {
        self.k0
    }

    /// Maximum boundary curvature.
    pub fn k1(&self) -> f64 {
        self.k1
    }

    /// Whether the curvature is exact (analytic curve) rather than
    /// interpolated.
    pub fn is_analytic(&self) -> bool {
        matches!(self.curve, Curve::Ellipse { .. })
    }

    pub fn semi_axes(&self) -> Option<(f64, f64)> {
        match self.curve {
            Curve::Ellipse { a, b } => Some((a, b)),
            Curve::Spline { .. } => None,
        }
    }

    /// `B(φ)`.
    pub fn point(&self, phi: f64) -> V2 {
        match &self.curve {
            Curve::Ellipse { a, b } => [a * phi.cos(), b * phi.sin()],
            Curve::Spline { pts, m } => spline_eval(pts, m, phi, 0),
        }
    }

    /// `B'(φ)`.
    pub fn d1(&self, phi: f64) -> V2 {
        match &self.curve {
            Curve::Ellipse { a, b } => [-a * phi.sin(), b * phi.cos()],
            Curve::Spline { pts, m } => spline_eval(pts, m, phi, 1),
        }
    }

    /// `B''(φ)`.
    pub fn d2(&self, phi: f64) -> V2 {
        match &self.curve {
            Curve::Ellipse { a, b } => [-a * phi.cos(), -b * phi.sin()],
            Curve::Spline { pts, m } => spline_eval(pts, m, phi, 2),
        }
    }

    /// Signed curvature at parameter `φ`; positive for convex arcs.
    pub fn curvature_at(&self, phi: f64) -> f64 {
        match &self.curve {
            Curve::Ellipse { a, b } => {
                let (s, c) = phi.sin_cos();
                a * b / (a * a * s * s + b * b * c * c).powf(1.5)
            }
            Curve::Spline { .. } => {
                let (p, q) = (self.d1(phi), self.d2(phi));
                (p[0] * q[1] - p[1] * q[0]) / norm(p).powi(3)
            }
        }
    }

    pub fn frame_at(&self, phi: f64) -> BoundaryFrame {
        let phi = phi.rem_euclid(TAU);
        let p = self.d1(phi);
        let sp = norm(p);
        let t = [p[0] / sp, p[1] / sp];
        BoundaryFrame {
            s: self.arclength_of(phi),
            phi,
            point: self.point(phi),
            tangent: t,
            normal: [-t[1], t[0]],
            curvature: self.curvature_at(phi),
        }
    }

    /// The frame at arclength `s`, wrapped to `[0, length)`.
    pub fn boundary_frame(&self, s: f64) -> BoundaryFrame {
        let s = s.rem_euclid(self.length);
        let mut f = self.frame_at(self.param_of(s));
        f.s = s;
        f
    }

    /// Arclength from `φ = 0` to `φ`.
    pub fn arclength_of(&self, phi: f64) -> f64 {
        let phi = phi.rem_euclid(TAU);
        let h = TAU / ARCLENGTH_PANELS as f64;
        let i = ((phi / h) as usize).min(ARCLENGTH_PANELS - 1);
        let a = i as f64 * h;
        let b = phi;
        let speed = |t: f64| norm(self.d1(t));
        self.table[i] + (b - a) / 6.0 * (speed(a) + 4.0 * speed(0.5 * (a + b)) + speed(b))
    }

    /// Inverse of [`arclength_of`](Self::arclength_of).
    pub fn param_of(&self, s: f64) -> f64 {
        let s = s.rem_euclid(self.length);
        let h = TAU / ARCLENGTH_PANELS as f64;
        let i = match self.table.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => return i as f64 * h,
            Err(i) => i.saturating_sub(1).min(ARCLENGTH_PANELS - 1),
        };
        let (s0, s1) = (self.table[i], self.table[i + 1]);
        let mut phi = i as f64 * h + h * (s - s0) / (s1 - s0);
        for _ in 0..8 {
            let step = (self.arclength_of(phi) - s) / norm(self.d1(phi));
            phi -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        phi
    }

    /// Largest componentwise deviation from `D_T T = kN`, `D_T N = -kT`
    /// over `n` uniformly spaced parameters, with fourth-order central
    /// differences of the frame along the curve.
    pub fn frenet_residual(&self, n: usize) -> f64 {
        let h = 1e-3;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let phi = TAU * i as f64 / n as f64;
            let f = self.frame_at(phi);
            let at = |k: f64| self.frame_at(phi + k * h);
            let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
            let speed = norm(self.d1(phi));
            for c in 0..2 {
                let dt = (m2.tangent[c] - 8.0 * m1.tangent[c] + 8.0 * p1.tangent[c] - p2.tangent[c])
                    / (12.0 * h * speed);
                let dn = (m2.normal[c] - 8.0 * m1.normal[c] + 8.0 * p1.normal[c] - p2.normal[c])
                    / (12.0 * h * speed);
                worst = worst.max((dt - f.curvature * f.normal[c]).abs());
                worst = worst.max((dn + f.curvature * f.tangent[c]).abs());
            }
        }
        worst
    }
}

#[inline]
pub(crate) fn norm(p: V2) -> f64 {
    p[0].hypot(p[1])
}

// Second derivatives of the periodic interpolating cubic with uniform
// knot spacing: M_{j-1} + 4 M_j + M_{j+1} = 6 (y_{j+1} - 2 y_j + y_{j-1}) / Δ².
// The system is strictly diagonally dominant, so Gauss-Seidel converges
// geometrically.
fn periodic_spline_moments(pts: &[V2]) -> Vec<V2> {
    let m = pts.len();
    let delta = TAU / m as f64;
    let rhs: Vec<V2> = (0..m)
        .map(|j| {
            let (a, b, c) = (pts[(j + m - 1) % m], pts[j], pts[(j + 1) % m]);
            [
                6.0 * (c[0] - 2.0 * b[0] + a[0]) / (delta * delta),
                6.0 * (c[1] - 2.0 * b[1] + a[1]) / (delta * delta),
            ]
        })
        .collect();
    let mut mm = vec![[0.0; 2]; m];
    for _ in 0..500 {
        let mut change: f64 = 0.0;
        for j in 0..m {
            let (l, r) = (mm[(j + m - 1) % m], mm[(j + 1) % m]);
            for c in 0..2 {
                let new = (rhs[j][c] - l[c] - r[c]) / 4.0;
                change = change.max((new - mm[j][c]).abs());
                mm[j][c] = new;
            }
        }
        if change < 1e-14 * (1.0 + rhs.iter().fold(0.0_f64, |a, v| a.max(v[0].abs()).max(v[1].abs()))) {
            break;
        }
    }
    mm
}

fn spline_eval(pts: &[V2], mm: &[V2], phi: f64, order: u8) -> V2 {
    let m = pts.len();
    let delta = TAU / m as f64;
    let x = phi.rem_euclid(TAU) / delta;
    let j = (x.floor() as usize).min(m - 1);
    let t = x - j as f64;
    let (y0, y1) = (pts[j], pts[(j + 1) % m]);
    let (m0, m1) = (mm[j], mm[(j + 1) % m]);
    let u = 1.0 - t;
    let mut out = [0.0; 2];
    for c in 0..2 {
        out[c] = match order {
            0 => u * y0[c] + t * y1[c] + delta * delta / 6.0 * ((u * u * u - u) * m0[c] + (t * t * t - t) * m1[c]),
            1 => (y1[c] - y0[c]) / delta + delta / 6.0 * (-(3.0 * u * u - 1.0) * m0[c] + (3.0 * t * t - 1.0) * m1[c]),
            _ => u * m0[c] + t * m1[c],
        };
    }
    out
}
