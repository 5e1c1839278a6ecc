//! Subcommand bodies: build the problem, run it, emit files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use capflow_core::anisotropy::{check_curvature_condition, estimate_constants, gamma_constants, DEFAULT_SPHERE_SAMPLES};
use capflow_core::geometry::{check_contact_assumptions, ConvexDomain2D, IntervalGrid, MappedGrid};
use capflow_core::initial::{bump, random_smooth};
use capflow_core::solver::{
    compatibilize, measure_data_bound, run_dirichlet, run_flow, solve_dirichlet_translator, solve_translator,
    BoundaryData, Problem, SolverConfig, Stop, Trajectory, TranslatorResult, VALIDATION_SAMPLES,
};
use capflow_core::verify::{
    check_gradient_boundary_principle, check_lambda_uniqueness, check_oscillation_decay,
    check_translator_convergence, check_ut_principle, dirichlet_normal_certificate_for,
    gradient_certificate_contact, grim_reaper_oracle,
};
use capflow_core::{Certificate, CertificateStatus, Error};

use crate::config::{BoundarySpec, DomainSpec, InitialSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{self, Manifest};

/// Relative error allowed between the 1-D translator speed and the exact
/// grim-reaper speed.
pub const ORACLE_TOLERANCE: f64 = 0.01;

/// What a subcommand produced.
#[derive(Debug)]
pub struct Outcome {
    pub dir: PathBuf,
    pub certificates: Vec<Certificate>,
}

impl Outcome {
    pub fn failures(&self) -> usize {
        self.certificates.iter().filter(|c| c.is_failure()).count()
    }
}

fn domain(spec: &DomainSpec) -> capflow_core::Result<Option<ConvexDomain2D>> {
    match *spec {
        DomainSpec::Disk(r) => ConvexDomain2D::disk(r).map(Some),
        DomainSpec::Ellipse(a, b) => ConvexDomain2D::ellipse(a, b).map(Some),
        DomainSpec::Interval(_) => Ok(None),
    }
}

/// Validates the configured problem; no time step runs before this returns.
pub fn build_problem(cfg: &RunConfig) -> capflow_core::Result<Problem> {
    let (f, g) = (cfg.anisotropy.clone(), cfg.mobility.clone());
    if let DomainSpec::Interval(l) = cfg.domain {
        let BoundarySpec::Contact { theta, theta_right } = &cfg.boundary else {
            return Err(Error::Config("interval domains take contact angles".into()));
        };
        let left = theta.value(0.0);
        return Problem::interval(IntervalGrid::new(l, cfg.n_r)?, left, theta_right.unwrap_or(left), f, g);
    }
    let d = domain(&cfg.domain)?.expect("planar domain");
    let grid = MappedGrid::new(&d, cfg.n_r, cfg.n_phi)?;
    match &cfg.boundary {
        BoundarySpec::Contact { theta, .. } => Problem::contact_angle(grid, *theta, f, g),
        BoundarySpec::Dirichlet { profile, rate } => Problem::dirichlet(grid, BoundaryData::translating(*profile, *rate), f, g),
    }
}

fn initial_data(cfg: &RunConfig, p: &Problem, seed: u64) -> Vec<f64> {
    match cfg.initial {
        InitialSpec::Zero => vec![0.0; p.mesh().n_nodes()],
        InitialSpec::Random { amplitude } => random_smooth(p.mesh(), seed, amplitude),
        InitialSpec::Bump { center, radius, height } => bump(p.mesh(), center, radius, height),
    }
}

/// Contact problems need `u0` to satisfy the angle condition to start.
fn start(cfg: &RunConfig, p: &Problem, seed: u64) -> capflow_core::Result<Vec<f64>> {
    let u0 = initial_data(cfg, p, seed);
    if p.is_contact() {
        compatibilize(p, &u0)
    } else {
        Ok(u0)
    }
}

/// The solver settings with snapshots at `0` and `t_end` when none are set.
fn snapshot_config(cfg: &RunConfig, count: usize) -> SolverConfig {
    let mut s = cfg.solver.clone();
    if s.snapshot_times.is_empty() {
        s.snapshot_times = (0..=count).map(|i| cfg.t_end * i as f64 / count as f64).collect();
    }
    s
}

fn header(command: &str, cfg: &RunConfig, p: &Problem) -> Manifest {
    let mut m = Manifest::default();
    m.push("command", command);
    m.push("capflow_version", env!("CARGO_PKG_VERSION"));
    for (k, v) in &cfg.entries {
        m.push(format!("config.{k}"), v);
    }
    let r = p.report();
    m.push("anisotropy.family", p.anisotropy().tag());
    m.push("mobility.family", p.mobility().tag());
    for (k, v) in r.bounds.key_values() {
        m.push(format!("bounds.{k}"), v);
    }
    m.push("bounds.n_samples", r.bounds.n_samples);
    m.push("bounds.min_hessian_eigenvalue", r.bounds.min_hessian_eigenvalue);
    m.push("bounds.a3_margin", r.bounds.a3_margin);
    m.push("domain.k0", r.k0);
    m.push("domain.k1", r.k1);
    if let Some(c) = &r.contact {
        m.push("contact.delta0", c.delta0);
        m.push("contact.theta0", c.theta0);
    }
    if let Some(data) = r.data_bound {
        m.push("dirichlet.M", data);
    }
    if let Some(g) = &r.gamma {
        m.push("dirichlet.gamma1", g.gamma1);
        m.push("dirichlet.gamma2", g.gamma2);
    }
    if let Some(c) = &r.curvature_check {
        m.push("dirichlet.curvature_margin", c.margin);
    }
    m.push("grid.nodes", p.mesh().n_nodes());
    m.push("grid.h_min", p.mesh().h_min());
    m.push("grid.h_max", p.mesh().h_max());
    m
}

fn trajectory_summary(m: &mut Manifest, prefix: &str, traj: &Trajectory) {
    m.push(format!("{prefix}.steps"), traj.steps);
    m.push(format!("{prefix}.dt_min"), traj.dt_min);
    m.push(format!("{prefix}.dt_max"), traj.dt_max);
    m.push(format!("{prefix}.tol_mp"), traj.tol_mp());
    m.push(format!("{prefix}.steady"), traj.steady);
    if let Some(s) = traj.last() {
        m.push(format!("{prefix}.t_final"), s.t);
        m.push(format!("{prefix}.sup_du_final"), s.sup_du);
        m.push(format!("{prefix}.sup_ut_final"), s.sup_ut);
        m.push(format!("{prefix}.mean_ut_final"), s.mean_ut);
        m.push(format!("{prefix}.std_ut_final"), s.std_ut);
    }
}

fn translator_summary(m: &mut Manifest, tr: &TranslatorResult) {
    m.push("translator.lambda", tr.lambda);
    m.push("translator.lambda_direct", tr.lambda_direct);
    m.push("translator.lambda_eps", tr.lambda_eps);
    m.push("translator.lambda_eps_mean", tr.lambda_eps_mean);
    m.push("translator.residual", tr.residual);
    m.push("translator.residual_direct", tr.residual_direct);
    m.push("translator.consistent", tr.consistent);
    m.push("translator.direct_steady", tr.direct_steady);
    m.push("translator.relax_converged", tr.relax_converged);
    m.push("translator.steps", tr.steps);
}

fn write_flow(dir: &Path, cfg: &RunConfig, p: &Problem, traj: &Trajectory) -> CliResult<()> {
    output::write_trajectory(dir, traj)?;
    let snaps = dir.join("snapshots");
    output::ensure_dir(&snaps)?;
    for (k, s) in traj.snapshots.iter().enumerate() {
        output::write_field(&snaps.join(format!("snapshot_{k:03}.csv")), p.mesh(), "u", &s.u)?;
        if cfg.svg {
            output::write_svg(&snaps.join(format!("snapshot_{k:03}.svg")), p.mesh(), &s.u, &format!("t = {}", s.t))?;
        }
    }
    Ok(())
}

fn finish(dir: PathBuf, mut manifest: Manifest, certificates: Vec<Certificate>, clock: Instant) -> CliResult<Outcome> {
    output::write_certificates(&dir, &certificates)?;
    for c in &certificates {
        manifest.certificate(c);
    }
    manifest.push("wall_clock_seconds", clock.elapsed().as_secs_f64());
    manifest.write_atomic(&dir)?;
    Ok(Outcome { dir, certificates })
}

fn max_of(traj: &Trajectory, f: impl Fn(&capflow_core::solver::Sample) -> f64) -> f64 {
    traj.samples.iter().map(f).fold(0.0, f64::max)
}

fn contact_certificates(p: &Problem, traj: &Trajectory) -> CliResult<Vec<Certificate>> {
    let s0 = traj.samples[0];
    Ok(vec![
        check_ut_principle(traj)?,
        check_gradient_boundary_principle(traj)?,
        gradient_certificate_contact(p.report(), s0.sup_ut, s0.sup_v, max_of(traj, |s| s.sup_v)),
    ])
}

fn dirichlet_certificate(p: &Problem, traj: &Trajectory) -> CliResult<Certificate> {
    let c3 = traj.samples[0].sup_ut;
    Ok(dirichlet_normal_certificate_for(p, c3, max_of(traj, |s| s.sup_dn_boundary))?)
}

fn lambda_consistency(tr: &TranslatorResult, cfg: &SolverConfig) -> Certificate {
    Certificate::check("lambda_consistency", 10.0 * cfg.lambda_tol, (tr.lambda_eps - tr.lambda_direct).abs())
        .constant("lambda_direct", tr.lambda_direct)
        .constant("lambda_eps", tr.lambda_eps)
}

/// Exact speed check, applicable to isotropic symmetric intervals only.
fn oracle_certificate(cfg: &RunConfig, tr: &TranslatorResult) -> CliResult<Certificate> {
    const NAME: &str = "grim_reaper_speed";
    let (DomainSpec::Interval(l), BoundarySpec::Contact { theta, theta_right }) = (&cfg.domain, &cfg.boundary) else {
        return Ok(Certificate::with_status(NAME, CertificateStatus::Inapplicable, "needs an interval"));
    };
    let t = theta.value(0.0);
    let isotropic = cfg.anisotropy.tag() == "isotropic"
        && cfg.anisotropy.scale() == 1.0
        && cfg.mobility.tag() == "isotropic";
    if !isotropic || theta_right.is_some_and(|r| r != t) {
        return Ok(Certificate::with_status(
            NAME,
            CertificateStatus::Inapplicable,
            "exact profile known for isotropic energy and equal angles",
        ));
    }
    let o = grim_reaper_oracle(t, *l, tr.lambda, cfg.n_r)?;
    Ok(Certificate::check(NAME, ORACLE_TOLERANCE, o.rel_error)
        .constant("lambda_exact", o.analytic[0])
        .constant("lambda_numerical", tr.lambda))
}

fn prepare(dir: &Path) -> CliResult<PathBuf> {
    output::ensure_dir(dir)?;
    Ok(dir.to_path_buf())
}

pub fn simulate(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let clock = Instant::now();
    let p = build_problem(cfg)?;
    if !p.is_contact() {
        return Err(CliError::Usage("`simulate` runs contact-angle problems; use `dirichlet`".into()));
    }
    let u0 = start(cfg, &p, cfg.seed)?;
    let (_, traj) = run_flow(&p, u0, Stop::Time(cfg.t_end), &snapshot_config(cfg, 1))?;
    let dir = prepare(dir)?;
    write_flow(&dir, cfg, &p, &traj)?;
    let mut m = header("simulate", cfg, &p);
    trajectory_summary(&mut m, "run", &traj);
    let certs = contact_certificates(&p, &traj)?;
    finish(dir, m, certs, clock)
}

pub fn dirichlet(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let clock = Instant::now();
    let p = build_problem(cfg)?;
    if p.is_contact() {
        return Err(CliError::Usage("`dirichlet` needs `problem.boundary = dirichlet`".into()));
    }
    let u0 = start(cfg, &p, cfg.seed)?;
    let (_, traj) = run_dirichlet(&p, u0, Stop::Time(cfg.t_end), &snapshot_config(cfg, 1))?;
    let dir = prepare(dir)?;
    write_flow(&dir, cfg, &p, &traj)?;
    let mut m = header("dirichlet", cfg, &p);
    trajectory_summary(&mut m, "run", &traj);
    let certs = vec![dirichlet_certificate(&p, &traj)?];
    finish(dir, m, certs, clock)
}

fn solve(cfg: &RunConfig, p: &Problem) -> CliResult<TranslatorResult> {
    Ok(if p.is_contact() {
        solve_translator(p, Some(start(cfg, p, cfg.seed)?), &cfg.solver)?
    } else {
        solve_dirichlet_translator(p, None, &cfg.solver)?
    })
}

fn write_translator(dir: &Path, p: &Problem, tr: &TranslatorResult, svg: bool) -> CliResult<()> {
    output::write_field(&dir.join("translator.csv"), p.mesh(), "w", &tr.w)?;
    let mut eps = String::from("eps,eps_w_ref,eps_w_mean\n");
    for ((e, r), m) in tr.eps_schedule.iter().zip(&tr.eps_w_ref).zip(&tr.eps_w_mean) {
        eps.push_str(&format!("{e},{r},{m}\n"));
    }
    let path = dir.join("eps_sequence.csv");
    std::fs::write(&path, eps).map_err(CliError::io(&path))?;
    if svg {
        output::write_svg(&dir.join("translator.svg"), p.mesh(), &tr.w, &format!("lambda = {}", tr.lambda))?;
    }
    Ok(())
}

pub fn translator(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let clock = Instant::now();
    let p = build_problem(cfg)?;
    let tr = solve(cfg, &p)?;
    let dir = prepare(dir)?;
    write_translator(&dir, &p, &tr, cfg.svg)?;
    let mut m = header("translator", cfg, &p);
    translator_summary(&mut m, &tr);
    let mut certs = vec![lambda_consistency(&tr, &cfg.solver)];
    if p.is_contact() {
        certs.push(oracle_certificate(cfg, &tr)?);
    }
    finish(dir, m, certs, clock)
}

/// A second start for the oscillation check: the same data plus a bump.
fn perturbed(cfg: &RunConfig, p: &Problem) -> CliResult<Vec<f64>> {
    let (a, b) = match cfg.domain {
        DomainSpec::Disk(r) => (r, r),
        DomainSpec::Ellipse(a, b) => (a, b),
        DomainSpec::Interval(l) => (l, 0.0),
    };
    let s = 0.7 * cfg.seed as f64;
    let center = [0.4 * a * s.cos(), 0.4 * b * s.sin()];
    let radius = 0.6 * if b > 0.0 { a.min(b) } else { a };
    let u: Vec<f64> = initial_data(cfg, p, cfg.seed)
        .iter()
        .zip(bump(p.mesh(), center, radius, 0.4))
        .map(|(x, y)| x + y)
        .collect();
    Ok(compatibilize(p, &u)?)
}

/// The full certificate suite for one configuration.
pub fn verify(cfg: &RunConfig, dir: &Path) -> CliResult<Outcome> {
    let clock = Instant::now();
    let p = build_problem(cfg)?;
    let snaps = snapshot_config(cfg, 20);
    let dir = prepare(dir)?;
    let mut m = header("verify", cfg, &p);
    let mut certs = Vec::new();
    if p.is_contact() {
        let (_, a) = run_flow(&p, start(cfg, &p, cfg.seed)?, Stop::Time(cfg.t_end), &snaps)?;
        let (_, b) = run_flow(&p, perturbed(cfg, &p)?, Stop::Time(cfg.t_end), &snaps)?;
        write_flow(&dir, cfg, &p, &a)?;
        trajectory_summary(&mut m, "run", &a);
        certs.extend(contact_certificates(&p, &a)?);
        certs.push(check_oscillation_decay(&a, &b)?);

        let tr = solve_translator(&p, None, &cfg.solver)?;
        write_translator(&dir, &p, &tr, cfg.svg)?;
        translator_summary(&mut m, &tr);
        certs.push(check_translator_convergence(&a, &tr, false)?);
        certs.push(lambda_consistency(&tr, &cfg.solver));
        certs.push(oracle_certificate(cfg, &tr)?);

        let amplitude = match cfg.initial {
            InitialSpec::Random { amplitude } => amplitude,
            _ => 0.3,
        };
        let starts: Vec<Vec<f64>> =
            (0..cfg.verify_seeds as u64).map(|k| random_smooth(p.mesh(), cfg.seed + 1 + k, amplitude)).collect();
        certs.push(check_lambda_uniqueness(&p, &starts, cfg.verify_max_time, &cfg.solver)?);
    } else {
        let (_, traj) = run_dirichlet(&p, start(cfg, &p, cfg.seed)?, Stop::Time(cfg.t_end), &snaps)?;
        write_flow(&dir, cfg, &p, &traj)?;
        trajectory_summary(&mut m, "run", &traj);
        certs.push(dirichlet_certificate(&p, &traj)?);
        let tr = solve_dirichlet_translator(&p, None, &cfg.solver)?;
        write_translator(&dir, &p, &tr, cfg.svg)?;
        translator_summary(&mut m, &tr);
        certs.push(check_translator_convergence(&traj, &tr, true)?);
    }
    finish(dir, m, certs, clock)
}

/// One row of the `info` assumption table.
pub struct AssumptionRow {
    pub name: &'static str,
    pub status: &'static str,
    pub detail: String,
}

fn row(name: &'static str, pass: bool, detail: String) -> AssumptionRow {
    AssumptionRow { name, status: if pass { "pass" } else { "fail" }, detail }
}

/// Constants and structural assumptions, without running anything.
/// Returns the printable lines and the first failing assumption.
pub fn info(cfg: &RunConfig) -> CliResult<(Vec<String>, Option<Error>)> {
    let b = estimate_constants(&cfg.anisotropy, &cfg.mobility, DEFAULT_SPHERE_SAMPLES)?;
    let mut lines = vec![
        format!("anisotropy = {}", cfg.anisotropy.tag()),
        format!("mobility = {}", cfg.mobility.tag()),
    ];
    lines.extend(b.key_values().iter().map(|(k, v)| format!("{k} = {v}")));
    lines.push(format!("n_samples = {}", b.n_samples));
    lines.push(format!("min_hessian_eigenvalue = {}", b.min_hessian_eigenvalue));

    let mut rows = Vec::new();
    let d = domain(&cfg.domain)?;
    match &d {
        Some(d) => rows.push(row("A1", true, format!("k0 = {}, k1 = {}", d.k0(), d.k1()))),
        None => rows.push(AssumptionRow { name: "A1", status: "n/a", detail: "interval".into() }),
    }
    match (&d, &cfg.boundary) {
        (Some(d), BoundarySpec::Contact { theta, .. }) => match check_contact_assumptions(d, theta, VALIDATION_SAMPLES) {
            Ok(c) => rows.push(row("A2", c.pass, format!("delta0 = {}, theta0 = {}", c.delta0, c.theta0))),
            Err(e) => rows.push(row("A2", false, e.to_string())),
        },
        (None, BoundarySpec::Contact { theta, theta_right }) => {
            let (l, r) = (theta.value(0.0), theta_right.unwrap_or(theta.value(0.0)));
            let ok = [l, r].iter().all(|t| *t > 0.0 && *t < std::f64::consts::PI);
            rows.push(row("A2", ok, format!("theta = {l}, {r}")));
        }
        _ => rows.push(AssumptionRow { name: "A2", status: "n/a", detail: "Dirichlet data".into() }),
    }
    rows.push(row("A3", b.a3_holds, format!("m2 = {} against m0 = {}, margin {}", b.hess_bound, b.f_min, b.a3_margin)));
    if let (Some(d), BoundarySpec::Dirichlet { profile, rate }) = (&d, &cfg.boundary) {
        let grid = MappedGrid::new(d, cfg.n_r, cfg.n_phi)?;
        let m = measure_data_bound(&grid, &BoundaryData::translating(*profile, *rate));
        let g = gamma_constants(&b, m);
        let c = check_curvature_condition(&g, &[d.k0()])?;
        rows.push(row(
            "gamma",
            c.pass,
            format!("M = {m}, gamma1 = {}, gamma2 = {}, weighted curvature = {}", g.gamma1, g.gamma2, c.margin),
        ));
    }

    lines.push(String::new());
    lines.push(format!("{:<10} {:<6} quantity", "assumption", "status"));
    let mut failure = None;
    for r in &rows {
        lines.push(format!("{:<10} {:<6} {}", r.name, r.status, r.detail));
        if r.status == "fail" && failure.is_none() {
            failure = Some(Error::Assumption { name: r.name, detail: r.detail.clone() });
        }
    }
    Ok((lines, failure))
}
