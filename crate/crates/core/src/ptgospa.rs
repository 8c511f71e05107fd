//! The probabilistic trajectory GOSPA metric between sets of Bernoulli
//! sequences, its decomposition and its point-trajectory special case.
//!
//! Every cell `(i, j)` of the per-step cost matrix falls in one category:
//!
//! * `Detected` (T1): both sequences present and `d_b < c`; costs expected
//!   localisation `min(r_x, r_y) d_b^p` plus existence mismatch `|r_x - r_y| c^p/2`.
//! * `Missed` (T2): truth present, estimate absent or the dummy column; `r_x c^p/2`.
//! * `False` (T3): estimate present, truth absent or the dummy row; `r_y c^p/2`.
//! * `MissedAndFalse` (T4): both present with `d_b >= c`; `(r_x + r_y) c^p/2`.
//! * `Empty`: nothing present; zero.
//!
//! Decomposition terms are the category parts weighted by the optimal
//! (binary or soft) weights.

use nalgebra::DMatrix;

use crate::assignment::{self, CostMatrix, SolverKind, WeightMatrix, DEFAULT_STATE_CAP};
use crate::base_metric::{base_distance, BaseMetricKind};
use crate::error::{Error, Result};
use crate::gospa::{self, MultiBernoulli, StateSet};
use crate::model::{lift_ground_truth, MetricParams, SequenceSet, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellCategory {
    Detected,
    Missed,
    False,
    MissedAndFalse,
    Empty,
}

/// Cost parts of one cell of `D^k`, all in p-th power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub category: CellCategory,
    pub localization: f64,
    pub mismatch: f64,
    pub missed: f64,
    pub false_det: f64,
    pub truth_existence: Option<f64>,
    pub estimate_existence: Option<f64>,
}

impl Cell {
    fn empty() -> Self {
        Self {
            category: CellCategory::Empty,
            localization: 0.0,
            mismatch: 0.0,
            missed: 0.0,
            false_det: 0.0,
            truth_existence: None,
            estimate_existence: None,
        }
    }

    pub fn cost(&self) -> f64 {
        match self.category {
            CellCategory::Detected => self.localization + self.mismatch,
            CellCategory::Missed => self.missed,
            CellCategory::False => self.false_det,
            CellCategory::MissedAndFalse => self.missed + self.false_det,
            CellCategory::Empty => 0.0,
        }
    }
}

/// Categorised cells of `D^k`, `(nX+1) x (nY+1)` in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCosts {
    n_truth: usize,
    n_estimates: usize,
    cells: Vec<Cell>,
}

impl StepCosts {
    pub fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[i * (self.n_estimates + 1) + j]
    }

    pub fn to_cost_matrix(&self) -> CostMatrix {
        let m = DMatrix::from_fn(self.n_truth + 1, self.n_estimates + 1, |i, j| {
            self.cell(i, j).cost()
        });
        CostMatrix::new(m).expect("cell costs are finite, non-negative, zero at the corner")
    }

    /// Decomposition of `trace(D^T W)` at the given weights.
    fn decompose(&self, w: &WeightMatrix) -> StepDecomposition {
        let mut out = StepDecomposition::default();
        for i in 0..=self.n_truth {
            for j in 0..=self.n_estimates {
                let weight = w.get(i, j);
                if weight == 0.0 {
                    continue;
                }
                let cell = self.cell(i, j);
                match cell.category {
                    CellCategory::Detected => {
                        out.expected_localization += cell.localization * weight;
                        out.existence_mismatch += cell.mismatch * weight;
                    }
                    CellCategory::Missed => out.expected_missed += cell.missed * weight,
                    CellCategory::False => out.expected_false += cell.false_det * weight,
                    CellCategory::MissedAndFalse => {
                        out.expected_missed += cell.missed * weight;
                        out.expected_false += cell.false_det * weight;
                    }
                    CellCategory::Empty => {}
                }
            }
        }
        out
    }
}

fn check_compatible(truth: &SequenceSet, estimate: &SequenceSet) -> Result<()> {
    if truth.window_length() != estimate.window_length() {
        return Err(Error::WindowMismatch {
            left: truth.window_length(),
            right: estimate.window_length(),
        });
    }
    if let (Some(a), Some(b)) = (truth.dim(), estimate.dim()) {
        if a != b {
            return Err(Error::DimensionMismatch {
                expected: a,
                found: b,
            });
        }
    }
    Ok(())
}

/// Categorised cost cells at time step `k`.
pub fn build_step_costs(
    truth: &SequenceSet,
    estimate: &SequenceSet,
    k: usize,
    params: &MetricParams,
    kind: BaseMetricKind,
) -> Result<StepCosts> {
    check_compatible(truth, estimate)?;
    let xs = truth.tau(k)?;
    let ys = estimate.tau(k)?;
    let (nx, ny) = (xs.len(), ys.len());
    let half = params.half_cutoff_pow();
    let c = params.cutoff();
    let p = params.order();

    let mut cells = vec![Cell::empty(); (nx + 1) * (ny + 1)];
    let missed = |r: f64| Cell {
        category: CellCategory::Missed,
        missed: r * half,
        truth_existence: Some(r),
        ..Cell::empty()
    };
    let false_det = |r: f64| Cell {
        category: CellCategory::False,
        false_det: r * half,
        estimate_existence: Some(r),
        ..Cell::empty()
    };

    for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            cells[i * (ny + 1) + j] = match (x, y) {
                (Some(x), Some(y)) => {
                    let (rx, ry) = (x.existence(), y.existence());
                    let d = base_distance(kind, x.density(), y.density())?;
                    if d < c {
                        Cell {
                            category: CellCategory::Detected,
                            localization: rx.min(ry) * d.powf(p),
                            mismatch: (rx - ry).abs() * half,
                            truth_existence: Some(rx),
                            estimate_existence: Some(ry),
                            ..Cell::empty()
                        }
                    } else {
                        Cell {
                            category: CellCategory::MissedAndFalse,
                            missed: rx * half,
                            false_det: ry * half,
                            truth_existence: Some(rx),
                            estimate_existence: Some(ry),
                            ..Cell::empty()
                        }
                    }
                }
                (Some(x), None) => missed(x.existence()),
                (None, Some(y)) => false_det(y.existence()),
                (None, None) => Cell::empty(),
            };
        }
        if let Some(x) = x {
            cells[i * (ny + 1) + ny] = missed(x.existence());
        }
    }
    for (j, y) in ys.iter().enumerate() {
        if let Some(y) = y {
            cells[nx * (ny + 1) + j] = false_det(y.existence());
        }
    }
    Ok(StepCosts {
        n_truth: nx,
        n_estimates: ny,
        cells,
    })
}

/// `D^k` at time step `k`.
pub fn build_cost_matrix(
    truth: &SequenceSet,
    estimate: &SequenceSet,
    k: usize,
    params: &MetricParams,
    kind: BaseMetricKind,
) -> Result<CostMatrix> {
    build_step_costs(truth, estimate, k, params, kind).map(|s| s.to_cost_matrix())
}

/// Per-step error terms, all in p-th power.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepDecomposition {
    pub expected_localization: f64,
    pub existence_mismatch: f64,
    pub expected_missed: f64,
    pub expected_false: f64,
    /// Switching cost from this step to the next; `None` at the last step.
    pub switch_to_next: Option<f64>,
}

impl StepDecomposition {
    /// Sum of the five terms (p-th power).
    pub fn sum(&self) -> f64 {
        self.expected_localization
            + self.existence_mismatch
            + self.expected_missed
            + self.expected_false
            + self.switch_to_next.unwrap_or(0.0)
    }

    /// Step error `(l + e + m + f + s)^(1/p)` used for per-step curves.
    pub fn step_error(&self, params: &MetricParams) -> f64 {
        params.root(self.sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub total: f64,
    pub per_step: Vec<StepDecomposition>,
    pub weights: Vec<WeightMatrix>,
    pub solver: SolverKind,
}

impl MetricReport {
    /// Sum of every per-step term; equals `total^p`.
    pub fn total_pth_power(&self) -> f64 {
        self.per_step.iter().map(StepDecomposition::sum).sum()
    }

    pub fn total_localization(&self) -> f64 {
        self.per_step.iter().map(|s| s.expected_localization).sum()
    }

    pub fn total_mismatch(&self) -> f64 {
        self.per_step.iter().map(|s| s.existence_mismatch).sum()
    }

    pub fn total_missed(&self) -> f64 {
        self.per_step.iter().map(|s| s.expected_missed).sum()
    }

    pub fn total_false(&self) -> f64 {
        self.per_step.iter().map(|s| s.expected_false).sum()
    }

    pub fn total_switch(&self) -> f64 {
        self.per_step.iter().filter_map(|s| s.switch_to_next).sum()
    }
}

/// Weighted set of estimate hypotheses (e.g. the global hypotheses of a mixture).
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisMixture {
    hypotheses: Vec<(f64, SequenceSet)>,
}

impl HypothesisMixture {
    pub fn new(hypotheses: Vec<(f64, SequenceSet)>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::invalid("mixture", "needs at least one hypothesis"));
        }
        if let Some((w, _)) = hypotheses.iter().find(|(w, _)| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid("mixture", format!("weight {w} must be > 0")));
        }
        let sum: f64 = hypotheses.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "mixture",
                format!("weights sum to {sum}, expected 1"),
            ));
        }
        Ok(Self { hypotheses })
    }

    pub fn hypotheses(&self) -> &[(f64, SequenceSet)] {
        &self.hypotheses
    }
}

/// Metric settings bundled for repeated evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluator {
    pub params: MetricParams,
    pub base: BaseMetricKind,
    pub solver: SolverKind,
    pub state_cap: usize,
}

impl Default for Evaluator {
    fn default() -> Self {
        Self::new(MetricParams::default(), BaseMetricKind::default(), SolverKind::default())
    }
}

impl Evaluator {
    pub fn new(params: MetricParams, base: BaseMetricKind, solver: SolverKind) -> Self {
        Self {
            params,
            base,
            solver,
            state_cap: DEFAULT_STATE_CAP,
        }
    }

    pub fn with_state_cap(mut self, cap: usize) -> Self {
        self.state_cap = cap;
        self
    }

    pub fn with_solver(mut self, solver: SolverKind) -> Self {
        self.solver = solver;
        self
    }

    pub fn ptgospa(&self, truth: &SequenceSet, estimate: &SequenceSet) -> Result<MetricReport> {
        check_compatible(truth, estimate)?;
        let steps: Vec<StepCosts> = (1..=truth.window_length())
            .map(|k| build_step_costs(truth, estimate, k, &self.params, self.base))
            .collect::<Result<_>>()?;
        let costs: Vec<CostMatrix> = steps.iter().map(StepCosts::to_cost_matrix).collect();
        let solution = assignment::solve(
            &costs,
            self.params.switch_cost(),
            self.params.order(),
            self.solver,
            self.state_cap,
        )?;

        let half_switch = self.params.switch_cost_pow() / 2.0;
        let last = steps.len() - 1;
        let per_step: Vec<StepDecomposition> = steps
            .iter()
            .zip(&solution.weights)
            .enumerate()
            .map(|(k, (cells, w))| {
                let mut d = cells.decompose(w);
                if k < last {
                    d.switch_to_next = Some(half_switch * w.switch_mass(&solution.weights[k + 1]));
                }
                d
            })
            .collect();
        let mut report = MetricReport {
            total: 0.0,
            per_step,
            weights: solution.weights,
            solver: self.solver,
        };
        report.total = self.params.root(report.total_pth_power());
        Ok(report)
    }

    pub fn tgospa(
        &self,
        truth: &[Trajectory],
        estimate: &[Trajectory],
        window_length: usize,
    ) -> Result<MetricReport> {
        let x = lift_ground_truth(truth, window_length)?;
        let y = lift_ground_truth(estimate, window_length)?;
        self.ptgospa(&x, &y)
    }

    /// Reports for every hypothesis, paired with its weight.
    pub fn mixture_reports(
        &self,
        truth: &SequenceSet,
        mixture: &HypothesisMixture,
    ) -> Result<Vec<(f64, MetricReport)>> {
        mixture
            .hypotheses()
            .iter()
            .map(|(w, est)| self.ptgospa(truth, est).map(|r| (*w, r)))
            .collect()
    }

    /// `sum_h w_h d(truth, estimate_h)`. A reporting convenience, not a metric.
    pub fn weighted_ptgospa(&self, truth: &SequenceSet, mixture: &HypothesisMixture) -> Result<f64> {
        Ok(self
            .mixture_reports(truth, mixture)?
            .iter()
            .map(|(w, r)| w * r.total)
            .sum())
    }

    /// PGOSPA evaluated independently at every time step between the
    /// multi-Bernoulli projections; `total = (sum_k d_k^p)^(1/p)`, no switching.
    pub fn stepwise_pgospa(&self, truth: &SequenceSet, estimate: &SequenceSet) -> Result<MetricReport> {
        self.stepwise(truth, estimate, false)
    }

    /// GOSPA at every time step between the means of the present densities,
    /// ignoring existence probabilities and covariances.
    pub fn stepwise_gospa(&self, truth: &SequenceSet, estimate: &SequenceSet) -> Result<MetricReport> {
        self.stepwise(truth, estimate, true)
    }

    fn stepwise(&self, truth: &SequenceSet, estimate: &SequenceSet, points: bool) -> Result<MetricReport> {
        check_compatible(truth, estimate)?;
        let window = truth.window_length();
        let mut per_step = Vec::with_capacity(window);
        let mut weights = Vec::with_capacity(window);
        for k in 1..=window {
            let xs = truth.tau(k)?;
            let ys = estimate.tau(k)?;
            let x_idx: Vec<usize> = (0..xs.len()).filter(|&i| xs[i].is_some()).collect();
            let y_idx: Vec<usize> = (0..ys.len()).filter(|&j| ys[j].is_some()).collect();
            let (mut d, pairs) = if points {
                let x = StateSet::new(x_idx.iter().map(|&i| xs[i].unwrap().density().mean().clone()).collect())?;
                let y = StateSet::new(y_idx.iter().map(|&j| ys[j].unwrap().density().mean().clone()).collect())?;
                let r = gospa::gospa(&x, &y, &self.params, self.base)?;
                (
                    StepDecomposition {
                        expected_localization: r.localization,
                        expected_missed: r.missed,
                        expected_false: r.false_det,
                        ..Default::default()
                    },
                    r.assignment,
                )
            } else {
                let x = MultiBernoulli::new(x_idx.iter().map(|&i| xs[i].unwrap().clone()).collect())?;
                let y = MultiBernoulli::new(y_idx.iter().map(|&j| ys[j].unwrap().clone()).collect())?;
                let r = gospa::pgospa(&x, &y, &self.params, self.base)?;
                (
                    StepDecomposition {
                        expected_localization: r.expected_localization,
                        existence_mismatch: r.existence_mismatch,
                        expected_missed: r.expected_missed,
                        expected_false: r.expected_false,
                        switch_to_next: None,
                    },
                    r.assignment,
                )
            };
            if k < window {
                d.switch_to_next = Some(0.0);
            }
            per_step.push(d);

            let (nx, ny) = (xs.len(), ys.len());
            let mut w = DMatrix::zeros(nx + 1, ny + 1);
            let mut row_done = vec![false; nx];
            let mut col_done = vec![false; ny];
            for (a, b) in pairs {
                let (i, j) = (x_idx[a], y_idx[b]);
                w[(i, j)] = 1.0;
                row_done[i] = true;
                col_done[j] = true;
            }
            for i in (0..nx).filter(|&i| !row_done[i]) {
                w[(i, ny)] = 1.0;
            }
            for j in (0..ny).filter(|&j| !col_done[j]) {
                w[(nx, j)] = 1.0;
            }
            weights.push(WeightMatrix::new(w));
        }
        let mut report = MetricReport {
            total: 0.0,
            per_step,
            weights,
            solver: SolverKind::Exact,
        };
        report.total = self.params.root(report.total_pth_power());
        Ok(report)
    }
}

pub fn ptgospa(
    truth: &SequenceSet,
    estimate: &SequenceSet,
    params: &MetricParams,
    kind: BaseMetricKind,
    solver: SolverKind,
) -> Result<MetricReport> {
    Evaluator::new(*params, kind, solver).ptgospa(truth, estimate)
}

pub fn tgospa(
    truth: &[Trajectory],
    estimate: &[Trajectory],
    window_length: usize,
    params: &MetricParams,
    kind: BaseMetricKind,
    solver: SolverKind,
) -> Result<MetricReport> {
    Evaluator::new(*params, kind, solver).tgospa(truth, estimate, window_length)
}

pub fn weighted_ptgospa(
    truth: &SequenceSet,
    mixture: &HypothesisMixture,
    params: &MetricParams,
    kind: BaseMetricKind,
    solver: SolverKind,
) -> Result<f64> {
    Evaluator::new(*params, kind, solver).weighted_ptgospa(truth, mixture)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BernoulliDensity, BernoulliSequence, Density, StateVector};

    const W2: BaseMetricKind = BaseMetricKind::Wasserstein2;
    const SOLVERS: [SolverKind; 2] = [SolverKind::Exact, SolverKind::Lp];

    fn sv(v: &[f64]) -> StateVector {
        StateVector::new(v.to_vec()).unwrap()
    }

    fn point_seq(start: usize, xs: &[f64], r: f64) -> BernoulliSequence {
        BernoulliSequence::new(
            start,
            xs.iter()
                .map(|&x| BernoulliDensity::new(r, Density::dirac(sv(&[x, 0.0]))).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn traj(start: usize, xs: &[f64]) -> Trajectory {
        Trajectory::new(start, xs.iter().map(|&x| sv(&[x, 0.0])).collect())
    }

    #[test]
    fn cost_matrix_entries() {
        let p = MetricParams::default();
        let truth = SequenceSet::new(3, vec![point_seq(1, &[0.0], 1.0)]).unwrap();
        let est = SequenceSet::new(3, vec![point_seq(3, &[0.0], 1.0)]).unwrap();
        // k = 2: both absent
        let d = build_cost_matrix(&truth, &est, 2, &p, W2).unwrap();
        assert_eq!(d.entries()[(0, 0)], 0.0);
        // k = 1: truth alive, estimate absent
        let d = build_cost_matrix(&truth, &est, 1, &p, W2).unwrap();
        assert_eq!(d.entries()[(0, 0)], 50.0);
        assert_eq!(d.entries()[(0, 1)], 50.0);
        assert_eq!(d.entries()[(1, 0)], 0.0);
        assert_eq!(d.entries()[(1, 1)], 0.0);
        // d_b == c: T4, 50 + 50
        let truth = SequenceSet::new(1, vec![point_seq(1, &[0.0], 1.0)]).unwrap();
        let est = SequenceSet::new(1, vec![point_seq(1, &[10.0], 1.0)]).unwrap();
        let cells = build_step_costs(&truth, &est, 1, &p, W2).unwrap();
        assert_eq!(cells.cell(0, 0).category, CellCategory::MissedAndFalse);
        assert_eq!(cells.cell(0, 0).cost(), 100.0);
        // and the T1 formula at the same distance gives the same number
        assert_eq!(gospa::bernoulli_pair_cost(1.0, 1.0, 10.0, &p), 100.0);
    }

    #[test]
    fn window_mismatch_is_an_error() {
        let p = MetricParams::default();
        let a = SequenceSet::empty(3).unwrap();
        let b = SequenceSet::empty(4).unwrap();
        assert!(matches!(
            build_cost_matrix(&a, &b, 1, &p, W2),
            Err(Error::WindowMismatch { .. })
        ));
        assert!(ptgospa(&a, &b, &p, W2, SolverKind::Lp).is_err());
    }

    #[test]
    fn identity_is_zero() {
        let p = MetricParams::default();
        let x = SequenceSet::new(4, vec![point_seq(1, &[0.0, 1.0], 0.7), point_seq(2, &[5.0, 6.0, 7.0], 0.4)]).unwrap();
        for s in SOLVERS {
            let r = ptgospa(&x, &x, &p, W2, s).unwrap();
            assert_eq!(r.total, 0.0);
            assert!(r.per_step.iter().all(|d| d.sum() == 0.0));
        }
    }

    #[test]
    fn empty_estimate_is_all_missed() {
        let p = MetricParams::default();
        let x = lift_ground_truth(&[traj(1, &[0.0, 1.0, 2.0])], 3).unwrap();
        let y = SequenceSet::empty(3).unwrap();
        for s in SOLVERS {
            let r = ptgospa(&x, &y, &p, W2, s).unwrap();
            assert!((r.total - 150f64.sqrt()).abs() < 1e-9);
            assert!((r.total_missed() - 150.0).abs() < 1e-9);
            assert_eq!(r.total_mismatch() + r.total_false() + r.total_switch(), 0.0);
        }
    }

    #[test]
    fn colocated_with_lower_existence_is_all_mismatch() {
        let p = MetricParams::default();
        let x = lift_ground_truth(&[traj(1, &[0.0, 1.0, 2.0])], 3).unwrap();
        let y = SequenceSet::new(3, vec![point_seq(1, &[0.0, 1.0, 2.0], 0.9)]).unwrap();
        for s in SOLVERS {
            let r = ptgospa(&x, &y, &p, W2, s).unwrap();
            assert!((r.total - 15f64.sqrt()).abs() < 1e-9, "{}", r.total);
            assert!((r.total_mismatch() - 15.0).abs() < 1e-9);
        }
    }

    #[test]
    fn tgospa_cases() {
        let p = MetricParams::default();
        for s in SOLVERS {
            let a = [traj(1, &[0.0, 1.0, 2.0])];
            assert_eq!(tgospa(&a, &a, 3, &p, W2, s).unwrap().total, 0.0);

            // estimates swap identity between steps 2 and 3
            let truth = [traj(1, &[0.0, 0.0, 0.0, 0.0]), traj(1, &[50.0, 50.0, 50.0, 50.0])];
            let est = [traj(1, &[0.0, 0.0, 50.0, 50.0]), traj(1, &[50.0, 50.0, 0.0, 0.0])];
            let r = tgospa(&truth, &est, 4, &p, W2, s).unwrap();
            assert!((r.total - 8f64.sqrt()).abs() < 1e-9);
            assert!((r.total_switch() - 8.0).abs() < 1e-9);
            assert_eq!(r.total_mismatch(), 0.0);

            // truncated copy: staying assigned to the ended track costs the
            // same missed error as unassigning, without the half switch
            let truth = [traj(1, &[0.0, 1.0, 2.0])];
            let est = [traj(1, &[0.0, 1.0])];
            let r = tgospa(&truth, &est, 3, &p, W2, s).unwrap();
            assert!((r.total - 50f64.sqrt()).abs() < 1e-9);
            assert_eq!(r.total_switch(), 0.0);
            assert!((r.total_missed() - 50.0).abs() < 1e-9);

            // hand-off: the estimate passes from an ending truth to a new one,
            // two half switches
            let truth = [traj(1, &[0.0, 0.0]), traj(3, &[0.0])];
            let est = [traj(1, &[0.0, 0.0, 0.0])];
            let r = tgospa(&truth, &est, 3, &p, W2, s).unwrap();
            assert!((r.total - 2.0).abs() < 1e-9);
            assert!((r.total_switch() - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn mixtures() {
        let p = MetricParams::default();
        let ev = Evaluator::new(p, W2, SolverKind::Exact);
        let x = lift_ground_truth(&[traj(1, &[0.0, 1.0, 2.0])], 3).unwrap();
        let a = SequenceSet::new(3, vec![point_seq(1, &[0.0, 1.0, 2.0], 0.9)]).unwrap();
        let b = SequenceSet::empty(3).unwrap();
        let da = ev.ptgospa(&x, &a).unwrap().total;
        let db = ev.ptgospa(&x, &b).unwrap().total;

        let single = HypothesisMixture::new(vec![(1.0, a.clone())]).unwrap();
        assert_eq!(ev.weighted_ptgospa(&x, &single).unwrap(), da);
        let twin = HypothesisMixture::new(vec![(0.5, a.clone()), (0.5, a.clone())]).unwrap();
        assert!((ev.weighted_ptgospa(&x, &twin).unwrap() - da).abs() < 1e-12);
        let mix = HypothesisMixture::new(vec![(0.7, a), (0.3, b)]).unwrap();
        assert!((ev.weighted_ptgospa(&x, &mix).unwrap() - (0.7 * da + 0.3 * db)).abs() < 1e-12);

        assert!(HypothesisMixture::new(vec![]).is_err());
        assert!(HypothesisMixture::new(vec![(0.5, x.clone())]).is_err());
    }

    #[test]
    fn stepwise_metrics_have_no_switching() {
        let p = MetricParams::default();
        let ev = Evaluator::new(p, W2, SolverKind::Exact);
        let x = lift_ground_truth(&[traj(1, &[0.0, 1.0, 2.0])], 3).unwrap();
        let y = SequenceSet::new(3, vec![point_seq(1, &[0.0, 1.0], 0.9)]).unwrap();
        let r = ev.stepwise_pgospa(&x, &y).unwrap();
        // two steps of mismatch (5 each) plus one missed step (50)
        assert!((r.total_pth_power() - 60.0).abs() < 1e-12);
        assert_eq!(r.total_switch(), 0.0);
        let g = ev.stepwise_gospa(&x, &y).unwrap();
        assert!((g.total_pth_power() - 50.0).abs() < 1e-12);
    }
}
