//! Single-time-step metrics: GOSPA between finite state sets and PGOSPA
//! between multi-Bernoulli densities (both with `alpha = 2`).
//!
//! Both are solved as a 2-D assignment on an `(n_x + n_y)` square matrix in
//! which unassignment is modelled by dummy partners. Among optimal
//! assignments the one whose assignment vector (`0` = unassigned, `j + 1` =
//! estimate `j`) is lexicographically smallest is reported.

use crate::base_metric::{base_distance, BaseMetricKind};
use crate::error::{Error, Result};
use crate::hungarian;
use crate::model::{BernoulliDensity, Density, MetricParams, StateVector};

/// A finite set of object states.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StateSet {
    states: Vec<StateVector>,
}

impl StateSet {
    pub fn new(states: Vec<StateVector>) -> Result<Self> {
        if let Some(first) = states.first() {
            let d = first.dim();
            if let Some(bad) = states.iter().find(|s| s.dim() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: bad.dim(),
                });
            }
        }
        Ok(Self { states })
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Multi-Bernoulli density given by its Bernoulli components.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiBernoulli {
    components: Vec<BernoulliDensity>,
}

impl MultiBernoulli {
    pub fn new(components: Vec<BernoulliDensity>) -> Result<Self> {
        if let Some(bad) = components.iter().find(|b| b.existence() <= 0.0) {
            return Err(Error::invalid(
                "multi-Bernoulli",
                format!("component with existence {} (must be > 0)", bad.existence()),
            ));
        }
        if let Some(first) = components.first() {
            let d = first.dim();
            if let Some(bad) = components.iter().find(|b| b.dim() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: bad.dim(),
                });
            }
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[BernoulliDensity] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// GOSPA value with its decomposition. Components are p-th-power costs.
#[derive(Debug, Clone, PartialEq)]
pub struct GospaReport {
    pub total: f64,
    pub localization: f64,
    pub missed: f64,
    pub false_det: f64,
    /// Matched `(x, y)` index pairs with base distance below the cut-off.
    pub assignment: Vec<(usize, usize)>,
}

/// PGOSPA value with its decomposition. Components are p-th-power costs.
#[derive(Debug, Clone, PartialEq)]
pub struct PgospaReport {
    pub total: f64,
    pub expected_localization: f64,
    pub existence_mismatch: f64,
    pub expected_missed: f64,
    pub expected_false: f64,
    pub assignment: Vec<(usize, usize)>,
}

pub fn gospa(
    x: &StateSet,
    y: &StateSet,
    params: &MetricParams,
    kind: BaseMetricKind,
) -> Result<GospaReport> {
    let xd: Vec<Density> = x.states().iter().cloned().map(Density::dirac).collect();
    let yd: Vec<Density> = y.states().iter().cloned().map(Density::dirac).collect();
    let dist = distance_table(&xd, &yd, kind)?;
    let c = params.cutoff();
    let p = params.order();
    let half = params.half_cutoff_pow();

    let problem = AssignmentProblem {
        nx: x.len(),
        ny: y.len(),
        pair: |i: usize, j: usize| dist[i][j].min(c).powf(p),
        miss: vec![half; x.len()],
        false_: vec![half; y.len()],
    };
    let targets = problem.lexicographic_optimum();

    let mut report = GospaReport {
        total: 0.0,
        localization: 0.0,
        missed: 0.0,
        false_det: 0.0,
        assignment: Vec::new(),
    };
    let mut y_used = vec![false; y.len()];
    for (i, t) in targets.iter().enumerate() {
        match *t {
            Some(j) if dist[i][j] < c => {
                report.localization += dist[i][j].powf(p);
                report.assignment.push((i, j));
                y_used[j] = true;
            }
            _ => report.missed += half,
        }
    }
    report.false_det = y_used.iter().filter(|u| !**u).count() as f64 * half;
    report.total = params.root(report.localization + report.missed + report.false_det);
    Ok(report)
}

pub fn pgospa(
    fx: &MultiBernoulli,
    fy: &MultiBernoulli,
    params: &MetricParams,
    kind: BaseMetricKind,
) -> Result<PgospaReport> {
    let xd: Vec<Density> = fx.components().iter().map(|b| b.density().clone()).collect();
    let yd: Vec<Density> = fy.components().iter().map(|b| b.density().clone()).collect();
    let dist = distance_table(&xd, &yd, kind)?;
    let rx: Vec<f64> = fx.components().iter().map(BernoulliDensity::existence).collect();
    let ry: Vec<f64> = fy.components().iter().map(BernoulliDensity::existence).collect();
    let c = params.cutoff();
    let p = params.order();
    let half = params.half_cutoff_pow();

    let problem = AssignmentProblem {
        nx: fx.len(),
        ny: fy.len(),
        pair: |i: usize, j: usize| {
            rx[i].min(ry[j]) * dist[i][j].min(c).powf(p) + (rx[i] - ry[j]).abs() * half
        },
        miss: rx.iter().map(|r| r * half).collect(),
        false_: ry.iter().map(|r| r * half).collect(),
    };
    let targets = problem.lexicographic_optimum();

    let mut report = PgospaReport {
        total: 0.0,
        expected_localization: 0.0,
        existence_mismatch: 0.0,
        expected_missed: 0.0,
        expected_false: 0.0,
        assignment: Vec::new(),
    };
    let mut y_used = vec![false; fy.len()];
    for (i, t) in targets.iter().enumerate() {
        match *t {
            Some(j) if dist[i][j] < c => {
                report.expected_localization += rx[i].min(ry[j]) * dist[i][j].powf(p);
                report.existence_mismatch += (rx[i] - ry[j]).abs() * half;
                report.assignment.push((i, j));
                y_used[j] = true;
            }
            _ => report.expected_missed += rx[i] * half,
        }
    }
    report.expected_false = ry
        .iter()
        .zip(&y_used)
        .filter(|(_, used)| !**used)
        .map(|(r, _)| r * half)
        .sum();
    report.total = params.root(
        report.expected_localization
            + report.existence_mismatch
            + report.expected_missed
            + report.expected_false,
    );
    Ok(report)
}

/// PGOSPA between two single Bernoulli densities:
/// `(min(r_x, r_y) min(d_b, c)^p + |r_x - r_y| c^p / 2)^(1/p)`.
pub fn pgospa_bernoulli(
    bx: &BernoulliDensity,
    by: &BernoulliDensity,
    params: &MetricParams,
    kind: BaseMetricKind,
) -> Result<f64> {
    let d = base_distance(kind, bx.density(), by.density())?;
    Ok(params.root(bernoulli_pair_cost(
        bx.existence(),
        by.existence(),
        d,
        params,
    )))
}

/// The p-th power of [`pgospa_bernoulli`] given the base distance.
pub(crate) fn bernoulli_pair_cost(rx: f64, ry: f64, dist: f64, params: &MetricParams) -> f64 {
    rx.min(ry) * dist.min(params.cutoff()).powf(params.order())
        + (rx - ry).abs() * params.half_cutoff_pow()
}

fn distance_table(x: &[Density], y: &[Density], kind: BaseMetricKind) -> Result<Vec<Vec<f64>>> {
    x.iter()
        .map(|a| y.iter().map(|b| base_distance(kind, a, b)).collect())
        .collect()
}

/// 2-D assignment with per-element unassignment costs.
struct AssignmentProblem<F> {
    nx: usize,
    ny: usize,
    pair: F,
    miss: Vec<f64>,
    false_: Vec<f64>,
}

impl<F: Fn(usize, usize) -> f64> AssignmentProblem<F> {
    /// Optimal cost restricted to the given rows and columns.
    fn restricted_optimum(&self, rows: &[usize], cols: &[usize]) -> f64 {
        let (r, c) = (rows.len(), cols.len());
        let n = r + c;
        let mut costs = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                costs[a * n + b] = match (a < r, b < c) {
                    (true, true) => (self.pair)(rows[a], cols[b]),
                    (true, false) => self.miss[rows[a]],
                    (false, true) => self.false_[cols[b]],
                    (false, false) => 0.0,
                };
            }
        }
        let sol = hungarian::solve(&costs, n);
        hungarian::matching_cost(&costs, n, &sol)
    }

    /// Lexicographically smallest optimal assignment vector.
    ///
    /// Rows are fixed one at a time; each candidate target (unassigned first,
    /// then estimates in index order) is kept if the residual optimum still
    /// attains the best achievable cost.
    fn lexicographic_optimum(&self) -> Vec<Option<usize>> {
        let mut free_cols: Vec<usize> = (0..self.ny).collect();
        let mut targets = Vec::with_capacity(self.nx);
        let mut fixed = 0.0;
        for i in 0..self.nx {
            let rest: Vec<usize> = ((i + 1)..self.nx).collect();
            let mut candidates: Vec<(Option<usize>, f64, f64)> = Vec::with_capacity(free_cols.len() + 1);
            candidates.push((None, self.miss[i], self.restricted_optimum(&rest, &free_cols)));
            for (pos, &j) in free_cols.iter().enumerate() {
                let mut cols = free_cols.clone();
                cols.remove(pos);
                candidates.push((Some(j), (self.pair)(i, j), self.restricted_optimum(&rest, &cols)));
            }
            let best = candidates
                .iter()
                .map(|(_, step, rest)| fixed + step + rest)
                .fold(f64::INFINITY, f64::min);
            let tol = 1e-12 * best.abs().max(1.0);
            let (choice, step, _) = candidates
                .into_iter()
                .find(|(_, step, rest)| fixed + step + rest <= best + tol)
                .expect("at least one candidate attains the minimum");
            fixed += step;
            if let Some(j) = choice {
                free_cols.retain(|&c| c != j);
            }
            targets.push(choice);
        }
        targets
    }
}
