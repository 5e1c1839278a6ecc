//! Deterministic point sets on the unit sphere `S^{d-1}`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Sample count used when callers do not ask for a specific one.
pub const DEFAULT_SPHERE_SAMPLES: usize = 4097;

/// Seed for the pseudo-random fallback used in ambient dimension ≥ 4.
pub const HIGH_DIM_SEED: u64 = 0x5eed_0f_5fe7e;

/// Returns at least `n` unit vectors in `ℝ^dim`, flattened row by row.
///
/// * `dim = 2`: uniform angles, count rounded up to a multiple of four so
///   the coordinate axes are hit exactly.
/// * `dim = 3`: a Fibonacci lattice with an odd count; heights are
///   `1 - 2k/(N-1)` so both poles are included.
/// * `dim ≥ 4`: normalized Gaussian vectors from a fixed ChaCha8 stream.
pub fn sphere_points(dim: usize, n: usize) -> Vec<f64> {
    assert!(dim >= 2, "sphere sampling needs dim >= 2");
    match dim {
        2 => {
            let count = n.div_ceil(4).max(1) * 4;
            let mut out = Vec::with_capacity(2 * count);
            for k in 0..count {
                let t = std::f64::consts::TAU * k as f64 / count as f64;
                out.push(t.cos());
                out.push(t.sin());
            }
            out
        }
        3 => {
            let count = if n % 2 == 0 { n + 1 } else { n }.max(3);
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            let mut out = Vec::with_capacity(3 * count);
            for k in 0..count {
                let z = 1.0 - 2.0 * k as f64 / (count - 1) as f64;
                let rho = (1.0 - z * z).max(0.0).sqrt();
                let az = golden * k as f64;
                out.push(rho * az.cos());
                out.push(rho * az.sin());
                out.push(z);
            }
            out
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(HIGH_DIM_SEED);
            let mut out = Vec::with_capacity(dim * n);
            let mut buf = vec![0.0; dim];
            let mut produced = 0;
            while produced < n {
                for b in buf.iter_mut() {
                    *b = StandardNormal.sample(&mut rng);
                }
                let r = buf.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r < 1e-8 {
                    continue;
                }
                out.extend(buf.iter().map(|v| v / r));
                produced += 1;
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_unit_and_deterministic() {
        for dim in 2..=5 {
            let a = sphere_points(dim, 1000);
            assert_eq!(a, sphere_points(dim, 1000));
            assert!(a.len() / dim >= 1000);
            for p in a.chunks(dim) {
                let r: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((r - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fibonacci_lattice_contains_both_poles() {
        let pts = sphere_points(3, 1000);
        assert_eq!(pts[2], 1.0);
        assert_eq!(pts[pts.len() - 1], -1.0);
    }
}
