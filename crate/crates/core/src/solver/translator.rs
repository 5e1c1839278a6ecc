use crate::error::{Error, Result};

use super::compat::compatibilize;
use super::flow::{run_flow, stable_dt, weighted_mean, FlowState, SolverConfig, Stop};
use super::problem::{BoundaryMode, Problem};

/// A translating solution `w + λt` and how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslatorResult {
    /// Profile with zero weighted mean; from the smallest `ε` for
    /// contact-angle problems.
    pub w: Vec<f64>,
    /// Reported speed. For contact-angle problems this is the direct
    /// estimate; for Dirichlet problems the prescribed value.
    pub lambda: f64,
    /// Terminal spatial mean of `u_t` from a plain flow run.
    pub lambda_direct: f64,
    /// Richardson extrapolation of `ε·w^ε` at the reference node.
    pub lambda_eps: f64,
    /// Same extrapolation applied to the spatial mean of `ε·w^ε`.
    pub lambda_eps_mean: f64,
    pub eps_schedule: Vec<f64>,
    /// `ε·w^ε` at the reference node, one per schedule entry.
    pub eps_w_ref: Vec<f64>,
    pub eps_w_mean: Vec<f64>,
    /// `‖A:D²w − λ‖_∞`.
    pub residual: f64,
    /// Same residual for the terminal profile of the direct run.
    pub residual_direct: f64,
    /// Terminal profile of the direct run, with zero mean.
    pub w_direct: Vec<f64>,
    /// Direct and extrapolated speeds agree within `10·lambda_tol`.
    pub consistent: bool,
    pub direct_steady: bool,
    pub relax_converged: bool,
    pub steps: u64,
}

fn recenter(problem: &Problem, u: &[f64]) -> Vec<f64> {
    let m = weighted_mean(problem.mesh.weights(), u);
    u.iter().map(|v| v - m).collect()
}

fn sup_residual(ut: &[f64], lambda: f64) -> f64 {
    ut.iter().fold(0.0, |m, v| m.max((v - lambda).abs()))
}

/// Steady state of `w_t = A:D²w − εw`.
///
/// After every step the constant mode is projected so that
/// `ε·mean(w) = mean(A:D²w)`; that mode otherwise relaxes at rate `ε`, and
/// stationary points are unaffected by the projection.
fn relax_eps(problem: &Problem, w0: Vec<f64>, eps: f64, config: &SolverConfig) -> Result<(Vec<f64>, bool, u64)> {
    let weights = problem.mesh.weights();
    let mut state = FlowState::new(problem, w0, 0.0)?;
    let mut rhs = vec![0.0; state.u.len()];
    let mut steps = 0u64;
    let project = |state: &mut FlowState| {
        let shift = weighted_mean(weights, state.ut()) / eps - weighted_mean(weights, &state.u);
        state.u.iter_mut().for_each(|v| *v += shift);
    };
    project(&mut state);
    while state.t < config.relax_max_time && steps < config.max_steps {
        let mut res: f64 = 0.0;
        for ((r, u), ut) in rhs.iter_mut().zip(&state.u).zip(state.ut()) {
            *r = ut - eps * u;
            res = res.max(r.abs());
        }
        if res < config.relax_tol {
            return Ok((state.u, true, steps));
        }
        let dt = stable_dt(problem, config.sigma, state.eval.lambda_max + eps)?;
        for (u, r) in state.u.iter_mut().zip(&rhs) {
            *u += dt * r;
        }
        state.t += dt;
        problem.evaluate(&state.u, state.t, &mut state.eval)?;
        project(&mut state);
        steps += 1;
    }
    Ok((state.u, false, steps))
}

/// Translating solution of a contact-angle problem.
///
/// The speed is measured twice: directly, as the terminal mean of `u_t`
/// along a flow from `u0` (default: the compatible correction of zero), and
/// by relaxing the regularized problem `A:D²w = εw` for each `ε` of the
/// schedule and extrapolating `ε·w^ε` linearly to `ε = 0` from the last two
/// values. Each relaxation is warm-started from the previous one.
pub fn solve_translator(problem: &Problem, u0: Option<Vec<f64>>, config: &SolverConfig) -> Result<TranslatorResult> {
    config.validate()?;
    if !problem.is_contact() {
        return Err(Error::Config("solve_translator needs a contact-angle problem".into()));
    }
    let u0 = match u0 {
        Some(u) => u,
        None => compatibilize(problem, &vec![0.0; problem.mesh.n_nodes()])?,
    };
    let (direct, traj) = run_flow(problem, u0, Stop::Steady { max_time: config.relax_max_time }, config)?;
    let weights = problem.mesh.weights();
    let lambda_direct = weighted_mean(weights, direct.ut());
    let residual_direct = sup_residual(direct.ut(), lambda_direct);
    let w_direct = recenter(problem, &direct.u);
    let mut steps = traj.steps;

    let x_ref = problem.mesh.reference_node();
    let mut eps_w_ref = Vec::new();
    let mut eps_w_mean = Vec::new();
    let mut converged = true;
    let mut w: Vec<f64> = w_direct.iter().map(|v| v + lambda_direct / config.eps_schedule[0]).collect();
    let mut prev_eps = config.eps_schedule[0];
    for &eps in &config.eps_schedule {
        let m = weighted_mean(weights, &w);
        let start: Vec<f64> = w.iter().map(|v| v - m + m * prev_eps / eps).collect();
        let (we, ok, n) = relax_eps(problem, start, eps, config)?;
        converged &= ok;
        steps += n;
        eps_w_ref.push(eps * we[x_ref]);
        eps_w_mean.push(eps * weighted_mean(weights, &we));
        w = we;
        prev_eps = eps;
    }
    let k = config.eps_schedule.len();
    let (e1, e2) = (config.eps_schedule[k - 2], config.eps_schedule[k - 1]);
    let extrapolate = |v: &[f64]| (e1 * v[k - 1] - e2 * v[k - 2]) / (e1 - e2);
    let lambda_eps = extrapolate(&eps_w_ref);
    let lambda_eps_mean = extrapolate(&eps_w_mean);

    let w = recenter(problem, &w);
    let check = FlowState::new(problem, w.clone(), 0.0)?;
    let residual = sup_residual(check.ut(), lambda_direct);
    Ok(TranslatorResult {
        w,
        lambda: lambda_direct,
        lambda_direct,
        lambda_eps,
        lambda_eps_mean,
        eps_schedule: config.eps_schedule.clone(),
        eps_w_ref,
        eps_w_mean,
        residual,
        residual_direct,
        w_direct,
        consistent: (lambda_eps - lambda_direct).abs() <= 10.0 * config.lambda_tol,
        direct_steady: traj.steady,
        relax_converged: converged,
        steps,
    })
}

/// Solves `A:D²w = λ` in the domain with `w = g` on the boundary, where `g`
/// and `λ` are the profile and rate of the problem's Dirichlet data, by
/// relaxing `w_t = A:D²w − λ`.
pub fn solve_dirichlet_translator(problem: &Problem, w0: Option<Vec<f64>>, config: &SolverConfig) -> Result<TranslatorResult> {
    config.validate()?;
    let BoundaryMode::Dirichlet(data) = problem.boundary else {
        return Err(Error::Config("solve_dirichlet_translator needs a Dirichlet problem".into()));
    };
    let lambda = data.rate;
    let n = problem.mesh.n_nodes();
    let mut w = w0.unwrap_or_else(|| vec![0.0; n]);
    if w.len() != n {
        return Err(Error::domain("initial profile does not match the mesh"));
    }
    let boundary = problem.mesh.boundary_nodes();
    for &node in &boundary {
        w[node] = data.profile.value(problem.mesh.xy(node));
    }
    let mut state = FlowState::new(problem, w, 0.0)?;
    let is_boundary: Vec<bool> = (0..n).map(|i| problem.mesh.is_boundary(i)).collect();
    let mut rhs = vec![0.0; n];
    let mut steps = 0u64;
    let mut converged = false;
    while state.t < config.relax_max_time && steps < config.max_steps {
        let mut res: f64 = 0.0;
        for i in 0..n {
            rhs[i] = if is_boundary[i] { 0.0 } else { state.ut()[i] - lambda };
            res = res.max(rhs[i].abs());
        }
        if res < config.relax_tol {
            converged = true;
            break;
        }
        let dt = stable_dt(problem, config.sigma, state.eval.lambda_max)?;
        for (u, r) in state.u.iter_mut().zip(&rhs) {
            *u += dt * r;
        }
        state.t += dt;
        problem.evaluate(&state.u, state.t, &mut state.eval)?;
        steps += 1;
    }
    let residual = (0..n)
        .filter(|&i| !is_boundary[i])
        .fold(0.0_f64, |m, i| m.max((state.ut()[i] - lambda).abs()));
    Ok(TranslatorResult {
        w: state.u,
        lambda,
        lambda_direct: lambda,
        lambda_eps: lambda,
        lambda_eps_mean: lambda,
        eps_schedule: Vec::new(),
        eps_w_ref: Vec::new(),
        eps_w_mean: Vec::new(),
        residual,
        residual_direct: residual,
        w_direct: Vec::new(),
        consistent: true,
        direct_steady: converged,
        relax_converged: converged,
        steps,
    })
}
