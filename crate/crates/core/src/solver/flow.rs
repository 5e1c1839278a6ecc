use crate::error::{Error, Result};
use crate::geometry::Mesh;

use super::compat::compat_mismatch;
use super::operator::{Evaluation, NodeDerivs};
use super::problem::{BoundaryMode, Problem};

/// Time-stepping and stopping parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// CFL safety factor `σ ∈ (0, 1]`.
    pub sigma: f64,
    /// Record a trajectory sample every this many steps.
    pub sample_every: usize,
    /// Times at which full snapshots of `u` are kept.
    pub snapshot_times: Vec<f64>,
    pub max_steps: u64,
    /// Steady translation: weighted spatial standard deviation of `u_t`
    /// below this for `steady_window` consecutive samples.
    pub steady_tol: f64,
    pub steady_window: usize,
    /// Sup-norm residual at which a relaxation run is considered converged.
    pub relax_tol: f64,
    pub relax_max_time: f64,
    /// Decreasing `ε` values for the regularized translator problem.
    pub eps_schedule: Vec<f64>,
    /// Agreement required between translator speed estimates.
    pub lambda_tol: f64,
    /// Largest accepted contact-angle mismatch of initial data.
    pub compat_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            sigma: 0.4,
            sample_every: 10,
            snapshot_times: Vec::new(),
            max_steps: 50_000_000,
            steady_tol: 1e-6,
            steady_window: 100,
            relax_tol: 1e-7,
            relax_max_time: 200.0,
            eps_schedule: vec![0.1, 0.03, 0.01, 0.003],
            lambda_tol: 1e-4,
            compat_tol: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return Err(Error::Config(format!("sigma = {} outside (0, 1]", self.sigma)));
        }
        if self.sample_every == 0 {
            return Err(Error::Config("sample_every must be at least 1".into()));
        }
        if self.steady_window == 0 || !(self.steady_tol > 0.0) {
            return Err(Error::Config("steady-state detector needs a positive tolerance and window".into()));
        }
        if self.snapshot_times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::Config("snapshot times must be finite and non-negative".into()));
        }
        if self.eps_schedule.len() < 2 {
            return Err(Error::Config("eps schedule needs at least two values".into()));
        }
        if self.eps_schedule.iter().any(|e| !(*e > 0.0))
            || self.eps_schedule.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::Config(format!(
                "eps schedule {:?} must be positive and strictly decreasing",
                self.eps_schedule
            )));
        }
        Ok(())
    }
}

/// When a run stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    Time(f64),
    /// Until steady translation is detected, or `max_time` elapses.
    Steady { max_time: f64 },
}

/// Grid function `u` at time `t`, with `Du` and `u_t` at that state.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub u: Vec<f64>,
    pub t: f64,
    pub(crate) eval: Evaluation,
}

impl FlowState {
    pub fn new(problem: &Problem, u: Vec<f64>, t: f64) -> Result<Self> {
        if u.len() != problem.mesh.n_nodes() {
            return Err(Error::domain(format!(
                "grid function has {} values, mesh has {} nodes",
                u.len(),
                problem.mesh.n_nodes()
            )));
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            let p = problem.mesh.xy(i);
            return Err(Error::BlowUp { node: i, x: p[0], y: p[1], t });
        }
        let mut eval = Evaluation::new(u.len());
        problem.evaluate(&u, t, &mut eval)?;
        Ok(Self { u, t, eval })
    }

    pub fn derivs(&self) -> &[NodeDerivs] {
        &self.eval.derivs
    }

    pub fn ut(&self) -> &[f64] {
        &self.eval.ut
    }

    pub fn grad_norm(&self) -> Vec<f64> {
        self.eval.derivs.iter().map(|d| d.du[0].hypot(d.du[1])).collect()
    }

    /// `v = √(1 + |Du|²)` per node.
    pub fn v(&self) -> Vec<f64> {
        self.eval.derivs.iter().map(|d| (1.0 + d.du[0] * d.du[0] + d.du[1] * d.du[1]).sqrt()).collect()
    }

    pub fn sup_du(&self) -> f64 {
        self.grad_norm().into_iter().fold(0.0, f64::max)
    }

    pub fn sup_ut(&self) -> f64 {
        self.eval.ut.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn osc(&self) -> f64 {
        osc(&self.u)
    }
}

pub fn osc(u: &[f64]) -> f64 {
    let (lo, hi) = u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    hi - lo
}

pub(crate) fn weighted_mean(w: &[f64], x: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / total
}

pub(crate) fn weighted_std(w: &[f64], x: &[f64]) -> f64 {
    let m = weighted_mean(w, x);
    let total: f64 = w.iter().sum();
    (w.iter().zip(x).map(|(a, b)| a * (b - m) * (b - m)).sum::<f64>() / total).sqrt()
}

/// Diagnostics recorded every few steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub sup_du: f64,
    pub sup_ut: f64,
    pub osc: f64,
    pub mean_ut: f64,
    pub std_ut: f64,
    pub sup_du_interior: f64,
    pub sup_du_boundary: f64,
    pub sup_v: f64,
    /// `sup |D_N u|` over boundary nodes.
    pub sup_dn_boundary: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
    pub grad_norm: Vec<f64>,
}

/// Time series of diagnostics and optional snapshots of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub snapshots: Vec<Snapshot>,
    /// Largest grid spacing.
    pub h: f64,
    pub h_min: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    pub steps: u64,
    /// Whether a steady-translation stop was reached.
    pub steady: bool,
}

impl Trajectory {
    /// Maximum-principle tolerance `5(h² + dt)`.
    pub fn tol_mp(&self) -> f64 {
        5.0 * (self.h * self.h + self.dt_max)
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Terminal mean of `u_t`.
    pub fn terminal_speed(&self) -> Option<f64> {
        self.samples.last().map(|s| s.mean_ut)
    }
}

pub(crate) fn stable_dt(problem: &Problem, sigma: f64, lambda_max: f64) -> Result<f64> {
    let b = &problem.report.bounds;
    let lam = lambda_max.max(0.5 * b.f_min * b.g_min);
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::Config(format!("CFL eigenvalue bound {lambda_max} is not usable")));
    }
    let h = problem.mesh.h_min();
    Ok(sigma * h * h / (2.0 * problem.mesh.dim() as f64 * lam))
}

pub(crate) fn sample(problem: &Problem, state: &FlowState) -> Sample {
    let mesh = &problem.mesh;
    let w = mesh.weights();
    let ut = state.ut();
    let mut s = Sample {
        t: state.t,
        sup_du: 0.0,
        sup_ut: 0.0,
        osc: state.osc(),
        mean_ut: weighted_mean(w, ut),
        std_ut: weighted_std(w, ut),
        sup_du_interior: 0.0,
        sup_du_boundary: 0.0,
        sup_v: 1.0,
        sup_dn_boundary: 0.0,
    };
    for (i, d) in state.derivs().iter().enumerate() {
        let g2 = d.du[0] * d.du[0] + d.du[1] * d.du[1];
        let g = g2.sqrt();
        s.sup_du = s.sup_du.max(g);
        s.sup_v = s.sup_v.max((1.0 + g2).sqrt());
        s.sup_ut = s.sup_ut.max(ut[i].abs());
        if mesh.is_boundary(i) {
            s.sup_du_boundary = s.sup_du_boundary.max(g);
        } else {
            s.sup_du_interior = s.sup_du_interior.max(g);
        }
    }
    match mesh {
        Mesh::Polar(grid) => {
            for (j, node) in grid.boundary_nodes().enumerate() {
                let n = grid.boundary_frame(j).normal;
                let d = state.derivs()[node].du;
                s.sup_dn_boundary = s.sup_dn_boundary.max((d[0] * n[0] + d[1] * n[1]).abs());
            }
        }
        Mesh::Interval(_) => {
            for node in mesh.boundary_nodes() {
                s.sup_dn_boundary = s.sup_dn_boundary.max(state.derivs()[node].du[0].abs());
            }
        }
    }
    s
}

/// Evolves a contact-angle problem from `u0`.
///
/// `u0` must satisfy the contact-angle relation to within
/// `config.compat_tol` (see [`compatibilize`](super::compatibilize)).
pub fn run_flow(problem: &Problem, u0: Vec<f64>, stop: Stop, config: &SolverConfig) -> Result<(FlowState, Trajectory)> {
    config.validate()?;
    if !problem.is_contact() {
        return Err(Error::Config("run_flow needs a contact-angle problem; use run_dirichlet".into()));
    }
    let (node, mismatch) = compat_mismatch(problem, &u0)?;
    if mismatch > config.compat_tol {
        return Err(Error::Incompatible { node, mismatch });
    }
    let state = FlowState::new(problem, u0, 0.0)?;
    integrate(problem, state, stop, config)
}

/// Evolves a Dirichlet problem from `u0`; boundary values of `u0` are
/// replaced by the data at `t = 0`.
pub fn run_dirichlet(
    problem: &Problem,
    mut u0: Vec<f64>,
    stop: Stop,
    config: &SolverConfig,
) -> Result<(FlowState, Trajectory)> {
    config.validate()?;
    let BoundaryMode::Dirichlet(data) = problem.boundary else {
        return Err(Error::Config("run_dirichlet needs a Dirichlet problem; use run_flow".into()));
    };
    if u0.len() != problem.mesh.n_nodes() {
        return Err(Error::domain("initial data does not match the mesh"));
    }
    for node in problem.mesh.boundary_nodes() {
        u0[node] = problem.dirichlet_value(&data, node, 0.0);
    }
    let state = FlowState::new(problem, u0, 0.0)?;
    integrate(problem, state, stop, config)
}

/// One explicit Euler step of size `dt`.
pub fn advance(problem: &Problem, state: &mut FlowState, dt: f64) -> Result<()> {
    let t_new = state.t + dt;
    for (u, ut) in state.u.iter_mut().zip(&state.eval.ut) {
        *u += dt * ut;
    }
    if let BoundaryMode::Dirichlet(data) = &problem.boundary {
        for node in problem.mesh.boundary_nodes() {
            state.u[node] = problem.dirichlet_value(data, node, t_new);
        }
    }
    state.t = t_new;
    problem.evaluate(&state.u, t_new, &mut state.eval)
}

/// The CFL step for the current state.
pub fn stable_step(problem: &Problem, state: &FlowState, sigma: f64) -> Result<f64> {
    stable_dt(problem, sigma, state.eval.lambda_max)
}

fn integrate(problem: &Problem, mut state: FlowState, stop: Stop, config: &SolverConfig) -> Result<(FlowState, Trajectory)> {
    let end = match stop {
        Stop::Time(t) => t,
        Stop::Steady { max_time } => max_time,
    };
    if !(end >= 0.0 && end.is_finite()) {
        return Err(Error::Config(format!("stop time {end} must be finite and non-negative")));
    }
    let mut snaps: Vec<f64> = config.snapshot_times.iter().copied().filter(|t| *t <= end).collect();
    snaps.sort_by(f64::total_cmp);
    snaps.dedup();
    let mut next_snap = 0;

    let mut traj = Trajectory {
        samples: Vec::new(),
        snapshots: Vec::new(),
        h: problem.mesh.h_max(),
        h_min: problem.mesh.h_min(),
        dt_max: 0.0,
        dt_min: f64::INFINITY,
        steps: 0,
        steady: false,
    };
    let take_snapshots = |state: &FlowState, traj: &mut Trajectory, next: &mut usize| {
        while *next < snaps.len() && snaps[*next] <= state.t + 1e-12 {
            traj.snapshots.push(Snapshot { t: state.t, u: state.u.clone(), grad_norm: state.grad_norm() });
            *next += 1;
        }
    };
    take_snapshots(&state, &mut traj, &mut next_snap);
    let mut steady_run = 0usize;
    let mut last_sampled = u64::MAX;
    let mut steps: u64 = 0;
    loop {
        if steps % config.sample_every as u64 == 0 {
            let s = sample(problem, &state);
            last_sampled = steps;
            if matches!(stop, Stop::Steady { .. }) {
                if s.std_ut < config.steady_tol {
                    steady_run += 1;
                } else {
                    steady_run = 0;
                }
            }
            traj.samples.push(s);
            if steady_run >= config.steady_window {
                traj.steady = true;
                break;
            }
        }
        if state.t >= end - 1e-14 || steps >= config.max_steps {
            break;
        }
        let mut dt = stable_dt(problem, config.sigma, state.eval.lambda_max)?;
        let mut target = end;
        if next_snap < snaps.len() {
            target = target.min(snaps[next_snap]);
        }
        if state.t + dt >= target - 1e-14 {
            dt = target - state.t;
        }
        if dt > 0.0 {
            traj.dt_max = traj.dt_max.max(dt);
            traj.dt_min = traj.dt_min.min(dt);
            advance(problem, &mut state, dt)?;
            if target - state.t < 1e-14 {
                state.t = target;
            }
        }
        steps += 1;
        take_snapshots(&state, &mut traj, &mut next_snap);
    }
    if last_sampled != steps {
        traj.samples.push(sample(problem, &state));
    }
    traj.steps = steps;
    if traj.dt_min == f64::INFINITY {
        traj.dt_min = 0.0;
    }
    Ok((state, traj))
}
