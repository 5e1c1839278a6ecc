//! Explicit time stepping of the graph flow, boundary closures and the
//! translator solvers.

mod compat;
mod flow;
mod operator;
mod problem;
mod translator;

pub use compat::{compat_mismatch, compatibilize, COMPAT_TARGET};
pub use flow::{
    advance, osc, run_dirichlet, run_flow, stable_step, FlowState, Sample, Snapshot, SolverConfig,
    Stop, Trajectory,
};
pub use operator::{apply_operator, ghost_normal_derivative, node_derivatives, NodeDerivs};
pub use problem::{
    measure_data_bound, BoundaryData, BoundaryMode, DirichletProfile, Problem, ValidationReport,
    VALIDATION_SAMPLES,
};
pub use translator::{solve_dirichlet_translator, solve_translator, TranslatorResult};

