//! Probabilistic trajectory GOSPA (PTGOSPA) between a set of ground-truth
//! trajectories and a set of time sequences of Bernoulli densities, with its
//! building blocks (GOSPA, PGOSPA, TGOSPA), the five-way error decomposition,
//! and a synthetic scenario generator for Monte Carlo studies.

pub mod assignment;
pub mod base_metric;
pub mod error;
pub mod gospa;
mod hungarian;
pub mod io;
mod lp;
pub mod model;
pub mod ptgospa;
pub mod scenario;

pub use assignment::{
    solve_exact_dp, solve_lp, AssignmentVector, CostMatrix, SolverKind, SolverSolution,
    WeightMatrix,
};
pub use base_metric::{base_distance, wasserstein2, BaseMetricKind};
pub use error::{Error, Result};
pub use gospa::{gospa, pgospa, pgospa_bernoulli, GospaReport, MultiBernoulli, PgospaReport, StateSet};
pub use model::{
    lift_ground_truth, BernoulliDensity, BernoulliSequence, Density, DiracDensity,
    GaussianDensity, MetricParams, SequenceSet, StateVector, Trajectory,
};
pub use ptgospa::{
    build_cost_matrix, ptgospa, tgospa, weighted_ptgospa, Evaluator, HypothesisMixture,
    MetricReport, StepDecomposition,
};
