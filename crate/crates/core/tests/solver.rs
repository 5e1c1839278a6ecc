use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use approx::assert_relative_eq;
use capflow_core::anisotropy::{AnisotropySpec, MobilitySpec, Quadratic};
use capflow_core::geometry::{ContactAngleField, ConvexDomain2D, IntervalGrid, MappedGrid};
use capflow_core::initial::{from_fn, random_smooth};
use capflow_core::solver::{
    apply_operator, compat_mismatch, compatibilize, ghost_normal_derivative, run_dirichlet, run_flow,
    solve_translator, BoundaryData, DirichletProfile, Problem, SolverConfig, Stop, COMPAT_TARGET,
};
use capflow_core::Error;

fn disk_problem(n_r: usize, n_phi: usize, theta: ContactAngleField) -> Problem {
    let d = ConvexDomain2D::disk(1.0).unwrap();
    let g = MappedGrid::new(&d, n_r, n_phi).unwrap();
    Problem::contact_angle(g, theta, AnisotropySpec::isotropic(2), MobilitySpec::isotropic(2)).unwrap()
}

fn interpolated() -> AnisotropySpec {
    AnisotropySpec::interpolated(0.1, Quadratic::diagonal(&[1.0, 1.5, 2.0]).unwrap()).unwrap()
}

#[test]
fn ghost_normal_derivative_examples() {
    assert_eq!(ghost_normal_derivative(0.7, FRAC_PI_2).unwrap(), 0.0);
    assert_relative_eq!(ghost_normal_derivative(0.0, FRAC_PI_3).unwrap(), -1.0 / 3f64.sqrt(), epsilon = 1e-15);
    assert_relative_eq!(
        ghost_normal_derivative(1.0, FRAC_PI_3).unwrap(),
        -(2.0f64 / 3.0).sqrt(),
        epsilon = 1e-15
    );
    assert!(ghost_normal_derivative(0.0, 0.0).is_err());
    assert!(ghost_normal_derivative(0.0, PI).is_err());
}

#[test]
fn constant_data_is_stationary() {
    let p = disk_problem(8, 16, ContactAngleField::Constant(FRAC_PI_2));
    let u = vec![3.0; p.mesh().n_nodes()];
    let ut = apply_operator(&p, &u, 0.0).unwrap();
    assert!(ut.iter().all(|v| v.abs() < 1e-13), "{:?}", ut.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let (state, traj) = run_flow(&p, u, Stop::Time(0.2), &SolverConfig::default()).unwrap();
    assert!(traj.samples.iter().all(|s| s.sup_ut < 1e-13));
    assert!(state.u.iter().all(|v| (v - 3.0).abs() < 1e-13));
}

#[test]
fn operator_matches_the_isotropic_formula_on_a_paraboloid() {
    // u = (x² + y²)/2 has Du = x, D²u = I, so A:D²u = 2 − |x|²/(1+|x|²).
    let mut errs = Vec::new();
    for &(nr, np) in &[(16usize, 32usize), (32, 64)] {
        let p = disk_problem(nr, np, ContactAngleField::Constant(FRAC_PI_2));
        let u = from_fn(p.mesh(), |x, y| 0.5 * (x * x + y * y));
        let ut = apply_operator(&p, &u, 0.0).unwrap();
        let mut err: f64 = 0.0;
        for i in 0..p.mesh().n_nodes() {
            if p.mesh().is_boundary(i) {
                continue;
            }
            let [x, y] = p.mesh().xy(i);
            let r2 = x * x + y * y;
            err = err.max((ut[i] - (2.0 - r2 / (1.0 + r2))).abs());
        }
        errs.push(err);
    }
    assert!(errs[1] < 1e-2, "{errs:?}");
    assert!(errs[1] <= errs[0] / 3.0 || errs[1] < 1e-10, "{errs:?}");
}

#[test]
fn incompatible_data_is_rejected_and_corrected() {
    let field = ContactAngleField::Sinusoid { mean: 1.3, amp: 0.1, freq: 1 };
    let p = disk_problem(12, 24, field);
    let raw = random_smooth(p.mesh(), 5, 0.3);
    let (_, mismatch) = compat_mismatch(&p, &raw).unwrap();
    assert!(mismatch > 1e-3);
    assert!(matches!(
        run_flow(&p, raw.clone(), Stop::Time(0.01), &SolverConfig::default()),
        Err(Error::Incompatible { .. })
    ));
    let fixed = compatibilize(&p, &raw).unwrap();
    assert!(compat_mismatch(&p, &fixed).unwrap().1 <= COMPAT_TARGET);
    // Interior values away from the collar are untouched.
    assert_eq!(fixed[0], raw[0]);
}

#[test]
fn flow_commutes_with_vertical_translation_and_is_deterministic() {
    let field = ContactAngleField::Sinusoid { mean: 1.3, amp: 0.1, freq: 1 };
    let ellipse = ConvexDomain2D::ellipse(2.0, 1.0).unwrap();
    let p = Problem::contact_angle(MappedGrid::new(&ellipse, 8, 16).unwrap(), field, interpolated(), MobilitySpec::isotropic(2))
        .unwrap();
    let u0 = compatibilize(&p, &random_smooth(p.mesh(), 2, 0.3)).unwrap();
    let shifted: Vec<f64> = u0.iter().map(|v| v + 5.0).collect();
    let cfg = SolverConfig::default();
    let (a, ta) = run_flow(&p, u0.clone(), Stop::Time(0.3), &cfg).unwrap();
    let (b, _) = run_flow(&p, shifted, Stop::Time(0.3), &cfg).unwrap();
    for (x, y) in a.u.iter().zip(&b.u) {
        assert!((y - x - 5.0).abs() < 1e-10);
    }
    let (c, tc) = run_flow(&p, u0, Stop::Time(0.3), &cfg).unwrap();
    assert_eq!(a.u, c.u);
    assert_eq!(ta, tc);
}

#[test]
fn snapshots_land_on_requested_times() {
    let p = disk_problem(8, 16, ContactAngleField::Constant(1.2));
    let u0 = compatibilize(&p, &vec![0.0; p.mesh().n_nodes()]).unwrap();
    let mut cfg = SolverConfig::default();
    cfg.snapshot_times = vec![0.0, 0.05, 0.1];
    let (state, traj) = run_flow(&p, u0, Stop::Time(0.1), &cfg).unwrap();
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
    assert_eq!(times, vec![0.0, 0.05, 0.1]);
    assert_eq!(state.t, 0.1);
    assert_eq!(traj.snapshots[1].u.len(), 8 * 16 + 1);
}

#[test]
fn zero_dirichlet_data_keeps_zero_solution() {
    let e = ConvexDomain2D::ellipse(2.0, 1.0).unwrap();
    let p = Problem::dirichlet(
        MappedGrid::new(&e, 8, 16).unwrap(),
        BoundaryData::stationary(DirichletProfile::Zero),
        interpolated(),
        MobilitySpec::isotropic(2),
    )
    .unwrap();
    let (state, traj) = run_dirichlet(&p, vec![0.0; p.mesh().n_nodes()], Stop::Time(0.2), &SolverConfig::default()).unwrap();
    assert!(state.u.iter().all(|v| *v == 0.0));
    assert_eq!(traj.last().unwrap().sup_dn_boundary, 0.0);
}

#[test]
fn dirichlet_boundary_follows_the_data() {
    let e = ConvexDomain2D::ellipse(2.0, 1.0).unwrap();
    let data = BoundaryData::translating(DirichletProfile::Product { c: 0.2 }, 0.3);
    let p = Problem::dirichlet(MappedGrid::new(&e, 8, 16).unwrap(), data, AnisotropySpec::isotropic(2), MobilitySpec::isotropic(2))
        .unwrap();
    let (state, _) = run_dirichlet(&p, vec![0.0; p.mesh().n_nodes()], Stop::Time(0.5), &SolverConfig::default()).unwrap();
    for node in p.mesh().boundary_nodes() {
        let [x, y] = p.mesh().xy(node);
        assert_relative_eq!(state.u[node], 0.2 * x * y + 0.3 * 0.5, epsilon = 1e-12);
    }
}

#[test]
fn gamma_condition_failure_is_reported() {
    let e = ConvexDomain2D::ellipse(2.0, 1.0).unwrap();
    let steep = BoundaryData::stationary(DirichletProfile::Affine { a: 10.0, b: 0.0, c: 0.0 });
    let r = Problem::dirichlet(MappedGrid::new(&e, 8, 16).unwrap(), steep, interpolated(), MobilitySpec::isotropic(2));
    assert!(matches!(r, Err(Error::Assumption { name: "gamma", .. })));
}

#[test]
fn invalid_configuration() {
    let p = disk_problem(8, 16, ContactAngleField::Constant(FRAC_PI_2));
    let u0 = vec![0.0; p.mesh().n_nodes()];
    let mut cfg = SolverConfig::default();
    cfg.sigma = 0.0;
    assert!(matches!(run_flow(&p, u0.clone(), Stop::Time(0.1), &cfg), Err(Error::Config(_))));
    let mut cfg = SolverConfig::default();
    cfg.eps_schedule = vec![0.01, 0.1];
    assert!(matches!(solve_translator(&p, None, &cfg), Err(Error::Config(_))));
    assert!(run_flow(&p, vec![0.0; 3], Stop::Time(0.1), &SolverConfig::default()).is_err());
}

#[test]
fn translator_on_the_interval() {
    let p = Problem::interval(
        IntervalGrid::new(1.0, 50).unwrap(),
        FRAC_PI_3,
        FRAC_PI_3,
        AnisotropySpec::isotropic(1),
        MobilitySpec::isotropic(1),
    )
    .unwrap();
    let mut cfg = SolverConfig::default();
    cfg.steady_tol = 1e-9;
    let tr = solve_translator(&p, None, &cfg).unwrap();
    assert!((tr.lambda - PI / 6.0).abs() < 1e-4, "{}", tr.lambda);
    assert!(tr.consistent && tr.direct_steady && tr.relax_converged);
    assert!(tr.eps_w_ref.windows(2).all(|w| w[1] > w[0]));
    // The profile is the grim reaper up to a constant.
    let x = p.mesh().interval_grid().unwrap().x().to_vec();
    let exact: Vec<f64> = x.iter().map(|x| -(PI / 6.0 * x).cos().ln() / (PI / 6.0)).collect();
    let shift = tr.w_direct[50] - exact[50];
    for (w, e) in tr.w_direct.iter().zip(&exact) {
        assert!((w - e - shift).abs() < 1e-3);
    }
}
