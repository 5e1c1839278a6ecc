use nalgebra::DMatrix;

use super::family::{AnisotropySpec, MobilitySpec, MAX_AMBIENT};
use crate::error::{Error, Result};

/// The diffusion matrix `a^{ij}(Du) = G(Du,-1)·D²_{p_i p_j}F(Du,-1)`,
/// `i, j ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    pub du: Vec<f64>,
    /// Row-major `n×n` entries.
    pub entries: Vec<f64>,
}

impl CoefficientMatrix {
    pub fn dim(&self) -> usize {
        self.du.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim() + j]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_row_slice(n, n, &self.entries)
    }

    /// Largest eigenvalue.
    pub fn max_eigenvalue(&self) -> f64 {
        self.to_matrix().symmetric_eigenvalues().max()
    }

    /// `A : H` for a row-major symmetric `n×n` matrix `H`.
    pub fn contract(&self, h: &[f64]) -> f64 {
        self.entries.iter().zip(h).map(|(a, b)| a * b).sum()
    }
}

fn check_du(f: &AnisotropySpec, g: &MobilitySpec, du: &[f64]) -> Result<()> {
    if du.len() != f.dim() || g.dim() != f.dim() {
        return Err(Error::domain(format!(
            "gradient has length {}, anisotropy expects n = {} and mobility n = {}",
            du.len(),
            f.dim(),
            g.dim()
        )));
    }
    if du.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite gradient"));
    }
    Ok(())
}

fn lift(du: &[f64]) -> [f64; MAX_AMBIENT] {
    let mut p = [0.0; MAX_AMBIENT];
    p[..du.len()].copy_from_slice(du);
    p[du.len()] = -1.0;
    p
}

/// Direct assembly from the upper-left block of `D²F` at `(Du, -1)`.
pub fn coefficient_matrix(f: &AnisotropySpec, g: &MobilitySpec, du: &[f64]) -> Result<CoefficientMatrix> {
    check_du(f, g, du)?;
    let n = du.len();
    let mut entries = vec![0.0; n * n];
    assemble_direct(f, g, du, &mut entries);
    Ok(CoefficientMatrix { du: du.to_vec(), entries })
}

/// Assembly through the sphere restriction `h = F(p/|p|)`:
///
/// `a^{ij} = G(ξ)[(δᵢⱼ − uᵢuⱼ/v²) h + uᵢ Dⱼh + uⱼ Dᵢh + v² Dᵢⱼh]`,
/// with `h` evaluated at `ξ` and its derivatives at `p = (Du, -1)`.
pub fn coefficient_matrix_decomposed(
    f: &AnisotropySpec,
    g: &MobilitySpec,
    du: &[f64],
) -> Result<CoefficientMatrix> {
    check_du(f, g, du)?;
    let n = du.len();
    let d = n + 1;
    let p = lift(du);
    let p = &p[..d];
    let v2 = 1.0 + du.iter().map(|x| x * x).sum::<f64>();
    let h = f.sphere_value_raw(p);
    let gs = g.sphere_value_raw(p);
    let mut dh = [0.0; MAX_AMBIENT];
    let mut d2h = [0.0; MAX_AMBIENT * MAX_AMBIENT];
    f.sphere_gradient_raw(p, &mut dh);
    f.sphere_hessian_raw(p, &mut d2h);
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            entries[i * n + j] = gs
                * ((delta - du[i] * du[j] / v2) * h
                    + du[i] * dh[j]
                    + du[j] * dh[i]
                    + v2 * d2h[i * d + j]);
        }
    }
    Ok(CoefficientMatrix { du: du.to_vec(), entries })
}

/// Allocation-free direct assembly used by the solver; `out` receives
/// the row-major `n×n` block.
#[inline]
pub(crate) fn assemble_direct(f: &AnisotropySpec, g: &MobilitySpec, du: &[f64], out: &mut [f64]) {
    let n = du.len();
    let d = n + 1;
    let p = lift(du);
    let p = &p[..d];
    let mut hess = [0.0; MAX_AMBIENT * MAX_AMBIENT];
    f.hessian_raw(p, &mut hess);
    let gv = g.value_raw(p);
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = gv * hess[i * d + j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::family::Quadratic;

    #[test]
    fn flat_isotropic_graph_gives_identity() {
        let a = coefficient_matrix(&AnisotropySpec::isotropic(2), &MobilitySpec::isotropic(2), &[0.0, 0.0]).unwrap();
        assert_eq!(a.entries, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn isotropic_reduction() {
        let du = [0.7, -1.3];
        let a = coefficient_matrix(&AnisotropySpec::isotropic(2), &MobilitySpec::isotropic(2), &du).unwrap();
        let v2 = 1.0 + du[0] * du[0] + du[1] * du[1];
        for i in 0..2 {
            for j in 0..2 {
                let delta = if i == j { 1.0 } else { 0.0 };
                assert!((a.get(i, j) - (delta - du[i] * du[j] / v2)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn both_paths_agree_for_an_ellipsoid() {
        let q = Quadratic::new(3, vec![2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 1.5]).unwrap();
        let f = AnisotropySpec::ellipsoidal(q).unwrap();
        let g = MobilitySpec::isotropic(2);
        let du = [0.4, -0.9];
        let a = coefficient_matrix(&f, &g, &du).unwrap();
        let b = coefficient_matrix_decomposed(&f, &g, &du).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_length_is_rejected() {
        let f = AnisotropySpec::isotropic(2);
        let g = MobilitySpec::isotropic(2);
        assert!(coefficient_matrix(&f, &g, &[1.0]).is_err());
    }
}
