//! Narrow linear-programming interface used by the relaxed solver.
//!
//! All variables are non-negative. The engine behind [`LinearProgram::solve`]
//! is the sparse revised simplex from `microlp`; swapping it only touches this
//! file.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Relation {
    Eq,
    Ge,
}

/// Sparse row `sum coef * x[var]`, relation, right-hand side.
type Constraint = (Vec<(usize, f64)>, Relation, f64);

#[derive(Debug, Default)]
pub(crate) struct LinearProgram {
    costs: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    /// Adds a variable `x >= 0` with the given objective coefficient.
    pub fn add_var(&mut self, cost: f64) -> usize {
        self.costs.push(cost);
        self.costs.len() - 1
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push((terms, relation, rhs));
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    /// Minimises the objective; returns the primal solution.
    pub fn solve(&self) -> Result<Vec<f64>> {
        if self.costs.is_empty() {
            return Ok(Vec::new());
        }
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<_> = self
            .costs
            .iter()
            .map(|&c| problem.add_var(c, (0.0, f64::INFINITY)))
            .collect();
        for (terms, relation, rhs) in &self.constraints {
            let expr: Vec<_> = terms.iter().map(|&(v, a)| (vars[v], a)).collect();
            let op = match relation {
                Relation::Eq => ComparisonOp::Eq,
                Relation::Ge => ComparisonOp::Ge,
            };
            problem.add_constraint(expr, op, *rhs);
        }
        let outcome = problem.solve().map_err(|e| match e {
            microlp::Error::Infeasible => {
                Error::Solver("relaxed assignment problem reported infeasible".into())
            }
            other => Error::Solver(format!("{other:?}")),
        })?;
        let optimal = outcome.is_optimal();
        let solution = match outcome {
            SolveOutcome::Solution(s) if optimal => s,
            SolveOutcome::Solution(s) => {
                return Err(Error::Solver(format!(
                    "solver stopped without optimality proof ({:?})",
                    s.termination_reason()
                )))
            }
            SolveOutcome::Interrupted(i) => {
                return Err(Error::Solver(format!(
                    "solver interrupted ({:?})",
                    i.termination_reason()
                )))
            }
        };
        Ok(vars.iter().map(|&v| solution.var_value_raw(v)).collect())
    }
}
