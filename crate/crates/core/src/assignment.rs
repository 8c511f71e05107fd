//! Solvers for the multidimensional assignment behind the trajectory metric.
//!
//! Both solvers minimise, in p-th power,
//!
//! ```text
//! sum_k trace(D_k^T W_k) + gamma^p / 2 * sum_{k<K} sum_{i<=nX, j<=nY} |W_k(i,j) - W_{k+1}(i,j)|
//! ```
//!
//! over `(nX+1) x (nY+1)` weight matrices whose last row and column model
//! unassignment. [`solve_exact_dp`] restricts the weights to binary matrices
//! (assignment vectors); [`solve_lp`] relaxes them to non-negative reals.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation};

/// Default bound on the number of assignment vectors the exact solver enumerates.
pub const DEFAULT_STATE_CAP: usize = 2_000_000;

/// Tolerance for the row/column sum constraints of returned weights.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SolverKind {
    Exact,
    #[default]
    Lp,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Lp => "lp",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SolverKind::Exact),
            "lp" => Ok(SolverKind::Lp),
            other => Err(Error::invalid("solver", format!("unknown solver `{other}`"))),
        }
    }
}

/// Per-step assignment: `targets[i] = 0` leaves truth `i` unassigned,
/// `targets[i] = j > 0` assigns it to estimate `j - 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AssignmentVector {
    targets: Vec<usize>,
}

impl AssignmentVector {
    pub fn new(targets: Vec<usize>, n_estimates: usize) -> Result<Self> {
        let mut seen = vec![false; n_estimates + 1];
        for &t in &targets {
            if t > n_estimates {
                return Err(Error::invalid(
                    "assignment vector",
                    format!("target {t} exceeds the {n_estimates} estimates"),
                ));
            }
            if t > 0 {
                if seen[t] {
                    return Err(Error::invalid(
                        "assignment vector",
                        format!("target {t} used twice"),
                    ));
                }
                seen[t] = true;
            }
        }
        Ok(Self { targets })
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Binary weight matrix equivalent to this vector.
    pub fn to_weights(&self, n_estimates: usize) -> WeightMatrix {
        let nx = self.targets.len();
        let mut w = DMatrix::zeros(nx + 1, n_estimates + 1);
        let mut used = vec![false; n_estimates];
        for (i, &t) in self.targets.iter().enumerate() {
            if t == 0 {
                w[(i, n_estimates)] = 1.0;
            } else {
                w[(i, t - 1)] = 1.0;
                used[t - 1] = true;
            }
        }
        for (j, u) in used.iter().enumerate() {
            if !u {
                w[(nx, j)] = 1.0;
            }
        }
        WeightMatrix(w)
    }
}

/// `D^k`: the `(nX+1) x (nY+1)` per-step cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix(DMatrix<f64>);

impl CostMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let (r, c) = entries.shape();
        if r == 0 || c == 0 {
            return Err(Error::invalid("cost matrix", "needs a dummy row and column"));
        }
        if let Some(bad) = entries.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::invalid(
                "cost matrix",
                format!("entry {bad} is not a finite non-negative number"),
            ));
        }
        if entries[(r - 1, c - 1)] != 0.0 {
            return Err(Error::invalid("cost matrix", "dummy corner entry must be 0"));
        }
        Ok(Self(entries))
    }

    pub fn n_truth(&self) -> usize {
        self.0.nrows() - 1
    }

    pub fn n_estimates(&self) -> usize {
        self.0.ncols() - 1
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    /// `trace(D^T W)`.
    pub fn dot(&self, w: &WeightMatrix) -> f64 {
        self.0.component_mul(&w.0).sum()
    }
}

/// `W^k`: assignment weights, binary for the exact solver and soft for the LP.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix(DMatrix<f64>);

impl WeightMatrix {
    pub fn new(entries: DMatrix<f64>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn n_truth(&self) -> usize {
        self.0.nrows() - 1
    }

    pub fn n_estimates(&self) -> usize {
        self.0.ncols() - 1
    }

    /// Largest violation of the row-sum, column-sum, corner and sign constraints.
    pub fn constraint_violation(&self) -> f64 {
        let (nx, ny) = (self.n_truth(), self.n_estimates());
        let mut worst = self.0[(nx, ny)].abs();
        for i in 0..nx {
            worst = worst.max((self.0.row(i).sum() - 1.0).abs());
        }
        for j in 0..ny {
            worst = worst.max((self.0.column(j).sum() - 1.0).abs());
        }
        for v in self.0.iter() {
            worst = worst.max(-v);
        }
        worst
    }

    /// `sum |W(i,j) - V(i,j)|` over the non-dummy block.
    pub fn switch_mass(&self, next: &WeightMatrix) -> f64 {
        let (nx, ny) = (self.n_truth(), self.n_estimates());
        let mut total = 0.0;
        for i in 0..nx {
            for j in 0..ny {
                total += (self.0[(i, j)] - next.0[(i, j)]).abs();
            }
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSolution {
    /// Optimal objective, in p-th power.
    pub objective_pth_power: f64,
    pub weights: Vec<WeightMatrix>,
}

/// Objective of a given weight sequence.
pub fn objective(costs: &[CostMatrix], weights: &[WeightMatrix], gamma: f64, p: f64) -> f64 {
    let half_switch = gamma.powf(p) / 2.0;
    let node: f64 = costs.iter().zip(weights).map(|(d, w)| d.dot(w)).sum();
    let switch: f64 = weights
        .windows(2)
        .map(|w| half_switch * w[0].switch_mass(&w[1]))
        .sum();
    node + switch
}

pub fn solve(
    costs: &[CostMatrix],
    gamma: f64,
    p: f64,
    kind: SolverKind,
    state_cap: usize,
) -> Result<SolverSolution> {
    match kind {
        SolverKind::Exact => solve_exact_dp_capped(costs, gamma, p, state_cap),
        SolverKind::Lp => solve_lp(costs, gamma, p),
    }
}

fn check_shapes(costs: &[CostMatrix]) -> Result<(usize, usize)> {
    let first = costs
        .first()
        .ok_or_else(|| Error::invalid("cost matrices", "need at least one time step"))?;
    let (nx, ny) = (first.n_truth(), first.n_estimates());
    if let Some(bad) = costs
        .iter()
        .find(|d| d.n_truth() != nx || d.n_estimates() != ny)
    {
        return Err(Error::invalid(
            "cost matrices",
            format!(
                "shape {}x{} differs from {}x{}",
                bad.n_truth() + 1,
                bad.n_estimates() + 1,
                nx + 1,
                ny + 1
            ),
        ));
    }
    Ok((nx, ny))
}

/// Number of injective assignment vectors from `n` truths into `m` estimates:
/// `sum_k C(n,k) m!/(m-k)!`, saturating.
pub fn count_assignment_vectors(n: usize, m: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1; // C(n,k) * m!/(m-k)! for k = 0
    for k in 0..=n.min(m) {
        total = total.saturating_add(term);
        // term_{k+1} = term_k * (n-k)/(k+1) * (m-k)
        term = term
            .saturating_mul((n - k) as u128)
            .saturating_mul((m - k) as u128)
            / (k as u128 + 1);
    }
    total
}

fn lattice_size(vars: usize, radix: usize) -> u128 {
    (0..vars).fold(1u128, |acc, _| acc.saturating_mul(radix as u128))
}

/// Exact minimum with the default state cap.
pub fn solve_exact_dp(costs: &[CostMatrix], gamma: f64, p: f64) -> Result<SolverSolution> {
    solve_exact_dp_capped(costs, gamma, p, DEFAULT_STATE_CAP)
}

/// Exact minimum over binary weights by dynamic programming over time.
///
/// The switching cost couples only consecutive steps, so the problem is a
/// shortest path through layers of assignment vectors. The inner
/// minimisation `min_v G(v) + gamma^p sum_i s(u_i, v_i)` is separable over
/// coordinates and is evaluated by one 1-D pass per coordinate on the full
/// lattice `{0..m}^n`, with non-injective cells held at infinity.
///
/// Among optimal solutions the lexicographically smallest sequence of
/// vectors is returned. Vectors range over the smaller side of the problem
/// (the truth side unless transposing shrinks the lattice).
pub fn solve_exact_dp_capped(
    costs: &[CostMatrix],
    gamma: f64,
    p: f64,
    state_cap: usize,
) -> Result<SolverSolution> {
    let (nx, ny) = check_shapes(costs)?;
    let steps = costs.len();
    let states = count_assignment_vectors(nx, ny);
    let cap = state_cap as u128;
    if states > cap {
        return Err(Error::Capacity {
            resource: "assignment vectors",
            required: states,
            limit: cap,
        });
    }
    let transpose = lattice_size(ny, nx + 1) < lattice_size(nx, ny + 1);
    let (n, m) = if transpose { (ny, nx) } else { (nx, ny) };
    let lattice = lattice_size(n, m + 1);
    if lattice > 8 * cap {
        return Err(Error::Capacity {
            resource: "lattice cells",
            required: lattice,
            limit: 8 * cap,
        });
    }
    if states.saturating_mul(steps as u128) > 32 * cap {
        return Err(Error::Capacity {
            resource: "stored state values",
            required: states.saturating_mul(steps as u128),
            limit: 32 * cap,
        });
    }

    let oriented: Vec<DMatrix<f64>> = costs
        .iter()
        .map(|d| {
            if transpose {
                d.0.transpose()
            } else {
                d.0.clone()
            }
        })
        .collect();

    let dp = VectorDp::new(n, m, gamma.powf(p));
    let path = dp.run(&oriented);

    let weights: Vec<WeightMatrix> = path
        .iter()
        .map(|digits| {
            let v = AssignmentVector {
                targets: digits.iter().map(|&d| d as usize).collect(),
            };
            let w = v.to_weights(m);
            if transpose {
                WeightMatrix(w.0.transpose())
            } else {
                w
            }
        })
        .collect();
    Ok(SolverSolution {
        objective_pth_power: objective(costs, &weights, gamma, p),
        weights,
    })
}

struct VectorDp {
    /// number of vector entries
    n: usize,
    /// number of possible nonzero targets
    m: usize,
    full_switch: f64,
    /// digits of every injective vector, in lexicographic order
    digits: Vec<u32>,
    /// lattice index of every injective vector
    cells: Vec<usize>,
}

impl VectorDp {
    fn new(n: usize, m: usize, full_switch: f64) -> Self {
        let mut dp = Self {
            n,
            m,
            full_switch,
            digits: Vec::new(),
            cells: Vec::new(),
        };
        let mut current = vec![0u32; n];
        let mut used = vec![false; m + 1];
        dp.enumerate(0, 0, &mut current, &mut used);
        dp
    }

    fn enumerate(&mut self, pos: usize, index: usize, current: &mut [u32], used: &mut [bool]) {
        if pos == self.n {
            self.digits.extend_from_slice(current);
            self.cells.push(index);
            return;
        }
        let radix = self.m + 1;
        for d in 0..=self.m {
            if d > 0 && used[d] {
                continue;
            }
            if d > 0 {
                used[d] = true;
            }
            current[pos] = d as u32;
            self.enumerate(pos + 1, index * radix + d, current, used);
            if d > 0 {
                used[d] = false;
            }
        }
    }

    fn num_states(&self) -> usize {
        self.cells.len()
    }

    fn vector(&self, s: usize) -> &[u32] {
        &self.digits[s * self.n..(s + 1) * self.n]
    }

    fn node_costs(&self, d: &DMatrix<f64>) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let mut used = vec![false; m];
        (0..self.num_states())
            .map(|s| {
                used.iter_mut().for_each(|u| *u = false);
                let mut cost = 0.0;
                for (i, &t) in self.vector(s).iter().enumerate() {
                    if t == 0 {
                        cost += d[(i, m)];
                    } else {
                        cost += d[(i, t as usize - 1)];
                        used[t as usize - 1] = true;
                    }
                }
                for (j, u) in used.iter().enumerate() {
                    if !u {
                        cost += d[(n, j)];
                    }
                }
                cost
            })
            .collect()
    }

    fn switch(&self, a: &[u32], b: &[u32]) -> f64 {
        let mut units = 0.0;
        for (&x, &y) in a.iter().zip(b) {
            if x != y {
                units += if x != 0 && y != 0 { 1.0 } else { 0.5 };
            }
        }
        units * self.full_switch
    }

    /// `out(u) = min_v values(v) + full_switch * sum_i s(u_i, v_i)` over the lattice.
    fn switch_transform(&self, lattice: &mut [f64]) {
        let radix = self.m + 1;
        let half = 0.5 * self.full_switch;
        let full = self.full_switch;
        let mut line = vec![0.0; radix];
        let mut stride = 1usize;
        for _ in 0..self.n {
            let block = stride * radix;
            for base in (0..lattice.len()).step_by(block) {
                for offset in 0..stride {
                    let start = base + offset;
                    for (a, slot) in line.iter_mut().enumerate() {
                        *slot = lattice[start + a * stride];
                    }
                    // two smallest values over nonzero targets
                    let (mut b1, mut i1, mut b2) = (f64::INFINITY, 0usize, f64::INFINITY);
                    for (a, &v) in line.iter().enumerate().skip(1) {
                        if v < b1 {
                            b2 = b1;
                            b1 = v;
                            i1 = a;
                        } else if v < b2 {
                            b2 = v;
                        }
                    }
                    let zero = line[0];
                    lattice[start] = zero.min(b1 + half);
                    for b in 1..radix {
                        let other = if b == i1 { b2 } else { b1 };
                        lattice[start + b * stride] = line[b].min(zero + half).min(other + full);
                    }
                }
            }
            stride = block;
        }
    }

    fn run(&self, costs: &[DMatrix<f64>]) -> Vec<Vec<u32>> {
        let steps = costs.len();
        let lattice_len = self.cells.last().map_or(1, |_| (self.m + 1).pow(self.n as u32));
        let mut cost_to_go: Vec<Vec<f64>> = vec![Vec::new(); steps];
        cost_to_go[steps - 1] = self.node_costs(&costs[steps - 1]);
        let mut lattice = vec![f64::INFINITY; lattice_len];
        for k in (0..steps - 1).rev() {
            lattice.iter_mut().for_each(|v| *v = f64::INFINITY);
            for (s, &cell) in self.cells.iter().enumerate() {
                lattice[cell] = cost_to_go[k + 1][s];
            }
            self.switch_transform(&mut lattice);
            let node = self.node_costs(&costs[k]);
            cost_to_go[k] = node
                .iter()
                .zip(&self.cells)
                .map(|(c, &cell)| c + lattice[cell])
                .collect();
        }

        let first = first_near_min(cost_to_go[0].iter().copied());
        let mut path = vec![self.vector(first).to_vec()];
        for next in cost_to_go.iter().skip(1) {
            let prev = path.last().expect("path is non-empty").clone();
            let s = first_near_min(
                next.iter()
                    .enumerate()
                    .map(|(s, g)| g + self.switch(&prev, self.vector(s))),
            );
            path.push(self.vector(s).to_vec());
        }
        path
    }
}

/// Index of the first value within a relative 1e-12 of the minimum.
fn first_near_min(values: impl Iterator<Item = f64> + Clone) -> usize {
    let best = values.clone().fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * best.abs().max(1.0);
    values
        .enumerate()
        .find(|(_, v)| *v <= best + tol)
        .map(|(i, _)| i)
        .expect("state space is never empty")
}

/// LP relaxation: weights are non-negative with unit row sums (truths) and
/// unit column sums (estimates); `|W_k - W_{k+1}|` is linearised with an
/// auxiliary variable bounded below by both signed differences.
/// Clamps to `[0, 1]` and removes simplex round-off around the integral values.
fn snap(w: f64) -> f64 {
    const SNAP_TOL: f64 = 1e-10;
    if w < SNAP_TOL {
        0.0
    } else if w > 1.0 - SNAP_TOL {
        1.0
    } else {
        w
    }
}

pub fn solve_lp(costs: &[CostMatrix], gamma: f64, p: f64) -> Result<SolverSolution> {
    let (nx, ny) = check_shapes(costs)?;
    let steps = costs.len();
    let half_switch = gamma.powf(p) / 2.0;

    let mut lp = LinearProgram::default();
    // index[k][(i, j)] of W_k(i, j); the dummy corner has no variable
    let mut index = vec![vec![usize::MAX; (nx + 1) * (ny + 1)]; steps];
    for (k, d) in costs.iter().enumerate() {
        for i in 0..=nx {
            for j in 0..=ny {
                if i == nx && j == ny {
                    continue;
                }
                index[k][i * (ny + 1) + j] = lp.add_var(d.0[(i, j)]);
            }
        }
        for i in 0..nx {
            let row = (0..=ny).map(|j| (index[k][i * (ny + 1) + j], 1.0)).collect();
            lp.add_constraint(row, Relation::Eq, 1.0);
        }
        for j in 0..ny {
            let col = (0..=nx).map(|i| (index[k][i * (ny + 1) + j], 1.0)).collect();
            lp.add_constraint(col, Relation::Eq, 1.0);
        }
    }
    for k in 0..steps.saturating_sub(1) {
        for i in 0..nx {
            for j in 0..ny {
                let a = index[k][i * (ny + 1) + j];
                let b = index[k + 1][i * (ny + 1) + j];
                let e = lp.add_var(half_switch);
                lp.add_constraint(vec![(e, 1.0), (a, -1.0), (b, 1.0)], Relation::Ge, 0.0);
                lp.add_constraint(vec![(e, 1.0), (a, 1.0), (b, -1.0)], Relation::Ge, 0.0);
            }
        }
    }
    let values = if lp.num_vars() == 0 {
        Vec::new()
    } else {
        lp.solve()?
    };

    let weights: Vec<WeightMatrix> = (0..steps)
        .map(|k| {
            WeightMatrix(DMatrix::from_fn(nx + 1, ny + 1, |i, j| {
                if i == nx && j == ny {
                    0.0
                } else {
                    snap(values[index[k][i * (ny + 1) + j]])
                }
            }))
        })
        .collect();
    if let Some(worst) = weights
        .iter()
        .map(WeightMatrix::constraint_violation)
        .reduce(f64::max)
        .filter(|v| *v > FEASIBILITY_TOL)
    {
        return Err(Error::Solver(format!(
            "returned weights violate the assignment constraints by {worst:e}"
        )));
    }
    Ok(SolverSolution {
        objective_pth_power: objective(costs, &weights, gamma, p),
        weights,
    })
}
