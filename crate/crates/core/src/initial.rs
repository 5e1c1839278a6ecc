//! Initial data on a mesh: sampled closed forms and seeded random smooth
//! fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Mesh;

/// Samples `f(x, y)` at every node (interval meshes pass `y = 0`).
pub fn from_fn(mesh: &Mesh, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    (0..mesh.n_nodes())
        .map(|i| {
            let p = mesh.xy(i);
            f(p[0], p[1])
        })
        .collect()
}

/// A sum of four plane waves with seeded random directions, wavenumbers in
/// `[0.5, 2.5]`, phases and weights; `|u| ≤ amplitude`.
pub fn random_smooth(mesh: &Mesh, seed: u64, amplitude: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            let dir = rng.gen_range(0.0..std::f64::consts::TAU);
            let k = rng.gen_range(0.5..2.5);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let weight = rng.gen_range(-1.0..1.0);
            (k * dir.cos(), k * dir.sin(), phase, weight)
        })
        .collect();
    let total: f64 = waves.iter().map(|w| w.3.abs()).sum::<f64>().max(1e-12);
    from_fn(mesh, |x, y| {
        amplitude / total * waves.iter().map(|(kx, ky, ph, wt)| wt * (kx * x + ky * y + ph).sin()).sum::<f64>()
    })
}

/// `height·exp(1 − 1/(1 − ρ²))` for `ρ = |x − center| / radius < 1`, zero
/// outside.
pub fn bump(mesh: &Mesh, center: [f64; 2], radius: f64, height: f64) -> Vec<f64> {
    from_fn(mesh, |x, y| {
        let rho2 = ((x - center[0]).powi(2) + (y - center[1]).powi(2)) / (radius * radius);
        if rho2 < 1.0 {
            height * (1.0 - 1.0 / (1.0 - rho2)).exp()
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexDomain2D, MappedGrid};

    #[test]
    fn random_fields_are_seeded_and_bounded() {
        let mesh = Mesh::Polar(MappedGrid::new(&ConvexDomain2D::disk(1.0).unwrap(), 8, 16).unwrap());
        let a = random_smooth(&mesh, 7, 0.2);
        assert_eq!(a, random_smooth(&mesh, 7, 0.2));
        assert_ne!(a, random_smooth(&mesh, 8, 0.2));
        assert!(a.iter().all(|v| v.abs() <= 0.2 + 1e-15));
    }
}
