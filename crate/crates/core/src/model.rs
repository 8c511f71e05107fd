//! Domain types: single-object densities, Bernoulli densities, time sequences
//! of Bernoulli densities and the sets of such sequences the metrics compare.
//!
//! Time steps are 1-based throughout, matching the window `1..=K`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-12;

/// A finite point in the single-object state space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<f64>);

impl StateVector {
    pub fn new(coordinates: Vec<f64>) -> Result<Self> {
        if coordinates.is_empty() {
            return Err(Error::invalid("state vector", "dimension must be at least 1"));
        }
        if let Some(bad) = coordinates.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(
                "state vector",
                format!("coordinate {bad} is not finite"),
            ));
        }
        Ok(Self(DVector::from_vec(coordinates)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    /// Squared Euclidean distance. The difference is taken coordinate-wise so
    /// the result is bit-identical under swapping the operands.
    pub fn distance_squared(&self, other: &StateVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl TryFrom<Vec<f64>> for StateVector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

/// Gaussian single-object density.
///
/// The covariance is kept exactly as given; the principal square root of its
/// PSD projection (eigenvalues clamped at zero) is cached for the Wasserstein
/// base metric.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDensity {
    mean: StateVector,
    covariance: DMatrix<f64>,
    sqrt_covariance: DMatrix<f64>,
}

impl GaussianDensity {
    pub fn new(mean: StateVector, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.dim();
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::invalid(
                "covariance",
                format!(
                    "expected a {d}x{d} matrix, found {}x{}",
                    covariance.nrows(),
                    covariance.ncols()
                ),
            ));
        }
        if covariance.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("covariance", "entries must be finite"));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let (a, b) = (covariance[(i, j)], covariance[(j, i)]);
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::invalid(
                        "covariance",
                        format!("not symmetric at ({i},{j}): {a} vs {b}"),
                    ));
                }
            }
        }
        let sqrt_covariance = psd_sqrt(&covariance)
            .ok_or_else(|| Error::invalid("covariance", "matrix is not positive semidefinite"))?;
        Ok(Self {
            mean,
            covariance,
            sqrt_covariance,
        })
    }

    /// Isotropic Gaussian `N(mean, variance * I)`.
    pub fn isotropic(mean: StateVector, variance: f64) -> Result<Self> {
        let d = mean.dim();
        Self::new(mean, DMatrix::from_diagonal_element(d, d, variance))
    }

    pub fn mean(&self) -> &StateVector {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub(crate) fn sqrt_covariance(&self) -> &DMatrix<f64> {
        &self.sqrt_covariance
    }
}

/// Symmetrised principal square root with eigenvalues clamped at zero, or
/// `None` when an eigenvalue is below `-PSD_TOL` (relative to the spectrum).
fn psd_sqrt(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let scale = eig.eigenvalues.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    if eig.eigenvalues.iter().any(|&v| v < -PSD_TOL * scale) {
        return None;
    }
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let q = &eig.eigenvectors;
    Some(q * DMatrix::from_diagonal(&roots) * q.transpose())
}

/// Point-mass single-object density.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracDensity {
    point: StateVector,
}

impl DiracDensity {
    pub fn new(point: StateVector) -> Self {
        Self { point }
    }

    pub fn point(&self) -> &StateVector {
        &self.point
    }
}

/// A single-object density: the operand of the base metric.
#[derive(Debug, Clone, PartialEq)]
pub enum Density {
    Gaussian(GaussianDensity),
    Dirac(DiracDensity),
}

impl Density {
    pub fn dirac(point: StateVector) -> Self {
        Density::Dirac(DiracDensity::new(point))
    }

    pub fn gaussian(mean: StateVector, covariance: DMatrix<f64>) -> Result<Self> {
        GaussianDensity::new(mean, covariance).map(Density::Gaussian)
    }

    pub fn dim(&self) -> usize {
        self.mean().dim()
    }

    /// Mean of a Gaussian, location of a Dirac.
    pub fn mean(&self) -> &StateVector {
        match self {
            Density::Gaussian(g) => g.mean(),
            Density::Dirac(d) => d.point(),
        }
    }

    pub fn covariance(&self) -> Option<&DMatrix<f64>> {
        match self {
            Density::Gaussian(g) => Some(g.covariance()),
            Density::Dirac(_) => None,
        }
    }
}

impl From<GaussianDensity> for Density {
    fn from(value: GaussianDensity) -> Self {
        Density::Gaussian(value)
    }
}

impl From<DiracDensity> for Density {
    fn from(value: DiracDensity) -> Self {
        Density::Dirac(value)
    }
}

/// Existence probability paired with a single-object density.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliDensity {
    existence: f64,
    density: Density,
}

impl BernoulliDensity {
    pub fn new(existence: f64, density: Density) -> Result<Self> {
        if !(0.0..=1.0).contains(&existence) {
            return Err(Error::invalid(
                "existence probability",
                format!("{existence} is outside [0, 1]"),
            ));
        }
        Ok(Self { existence, density })
    }

    /// Existence one, Dirac density: how a ground-truth state is represented.
    pub fn certain(point: StateVector) -> Self {
        Self {
            existence: 1.0,
            density: Density::dirac(point),
        }
    }

    pub fn existence(&self) -> f64 {
        self.existence
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn dim(&self) -> usize {
        self.density.dim()
    }
}

/// A start time plus a run of Bernoulli densities at consecutive time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSequence {
    start_time: usize,
    densities: Vec<BernoulliDensity>,
}

impl BernoulliSequence {
    pub fn new(start_time: usize, densities: Vec<BernoulliDensity>) -> Result<Self> {
        if start_time < 1 {
            return Err(Error::invalid("sequence", "start time must be at least 1"));
        }
        let Some(first) = densities.first() else {
            return Err(Error::invalid("sequence", "must contain at least one step"));
        };
        let dim = first.dim();
        for (offset, b) in densities.iter().enumerate() {
            if b.existence() <= 0.0 {
                return Err(Error::invalid(
                    "sequence",
                    format!(
                        "zero existence probability at time step {}",
                        start_time + offset
                    ),
                ));
            }
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: b.dim(),
                });
            }
        }
        Ok(Self {
            start_time,
            densities,
        })
    }

    pub fn start_time(&self) -> usize {
        self.start_time
    }

    /// Last time step covered (inclusive).
    pub fn end_time(&self) -> usize {
        self.start_time + self.densities.len() - 1
    }

    pub fn len(&self) -> usize {
        self.densities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.densities.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.densities[0].dim()
    }

    pub fn densities(&self) -> &[BernoulliDensity] {
        &self.densities
    }

    /// Bernoulli density at time step `k`, or `None` when the sequence does
    /// not cover `k`.
    pub fn at(&self, k: usize) -> Option<&BernoulliDensity> {
        if k < self.start_time {
            return None;
        }
        self.densities.get(k - self.start_time)
    }

    /// Time projection checked against a window of length `window`.
    pub fn tau(&self, k: usize, window: usize) -> Result<Option<&BernoulliDensity>> {
        if k < 1 || k > window {
            return Err(Error::OutsideWindow { step: k, window });
        }
        Ok(self.at(k))
    }
}

/// A finite set of Bernoulli sequences inside the window `1..=K`.
///
/// The storage order of `sequences` carries no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSet {
    window_length: usize,
    sequences: Vec<BernoulliSequence>,
}

impl SequenceSet {
    pub fn new(window_length: usize, sequences: Vec<BernoulliSequence>) -> Result<Self> {
        if window_length < 1 {
            return Err(Error::invalid("window", "length must be at least 1"));
        }
        let mut dim = None;
        for s in &sequences {
            if s.end_time() > window_length {
                return Err(Error::OutsideWindow {
                    step: s.end_time(),
                    window: window_length,
                });
            }
            match dim {
                None => dim = Some(s.dim()),
                Some(d) if d != s.dim() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: s.dim(),
                    })
                }
                _ => {}
            }
        }
        Ok(Self {
            window_length,
            sequences,
        })
    }

    pub fn empty(window_length: usize) -> Result<Self> {
        Self::new(window_length, Vec::new())
    }

    pub fn window_length(&self) -> usize {
        self.window_length
    }

    pub fn sequences(&self) -> &[BernoulliSequence] {
        &self.sequences
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// State dimension, `None` for an empty set.
    pub fn dim(&self) -> Option<usize> {
        self.sequences.first().map(BernoulliSequence::dim)
    }

    /// Bernoulli density of every sequence at time step `k` (in storage order).
    pub fn tau(&self, k: usize) -> Result<Vec<Option<&BernoulliDensity>>> {
        if k < 1 || k > self.window_length {
            return Err(Error::OutsideWindow {
                step: k,
                window: self.window_length,
            });
        }
        Ok(self.sequences.iter().map(|s| s.at(k)).collect())
    }
}

/// Point trajectory: a start time and the states at consecutive steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub start_time: usize,
    pub states: Vec<StateVector>,
}

impl Trajectory {
    pub fn new(start_time: usize, states: Vec<StateVector>) -> Self {
        Self { start_time, states }
    }
}

/// Lift point trajectories to existence-one Dirac sequences.
pub fn lift_ground_truth(trajectories: &[Trajectory], window_length: usize) -> Result<SequenceSet> {
    let sequences = trajectories
        .iter()
        .map(|t| {
            BernoulliSequence::new(
                t.start_time,
                t.states.iter().cloned().map(BernoulliDensity::certain).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    SequenceSet::new(window_length, sequences)
}

/// Cut-off `c`, order `p` and switching cost `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricParams {
    cutoff: f64,
    order: f64,
    switch_cost: f64,
}

impl MetricParams {
    pub fn new(cutoff: f64, order: f64, switch_cost: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::invalid("cut-off", format!("{cutoff} must be > 0")));
        }
        if !(order.is_finite() && order >= 1.0) {
            return Err(Error::invalid("order", format!("{order} must be >= 1")));
        }
        if !(switch_cost.is_finite() && switch_cost > 0.0) {
            return Err(Error::invalid(
                "switching cost",
                format!("{switch_cost} must be > 0"),
            ));
        }
        Ok(Self {
            cutoff,
            order,
            switch_cost,
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn switch_cost(&self) -> f64 {
        self.switch_cost
    }

    /// `c^p / 2`, the cost of leaving one certain object unassigned.
    pub fn half_cutoff_pow(&self) -> f64 {
        self.cutoff.powf(self.order) / 2.0
    }

    /// `gamma^p`, the cost of a full track switch.
    pub fn switch_cost_pow(&self) -> f64 {
        self.switch_cost.powf(self.order)
    }

    /// `x^(1/p)`, clamping tiny negative round-off to zero.
    pub fn root(&self, x: f64) -> f64 {
        x.max(0.0).powf(1.0 / self.order)
    }
}

impl Default for MetricParams {
    fn default() -> Self {
        Self {
            cutoff: 10.0,
            order: 2.0,
            switch_cost: 2.0,
        }
    }
}
