//! Synthetic ground truth, a surrogate tracker output and Monte Carlo
//! aggregation of per-step metric curves.
//!
//! States are laid out as `[position (h), velocity (h)]` with `h = dim / 2`.
//! Truth follows a nearly-constant-velocity model with piecewise-constant
//! white acceleration (step length 1).
//!
//! The surrogate tracker keeps one estimate track per object. The track
//! starts at the object's first detection and ends at its last one
//! (`hold_high`) or keeps coasting to the end of the window with decaying
//! existence (`decay_after_death`). Every estimate is a Gaussian centred on
//! the true state plus noise with covariance `perturbation_std^2 I`.
//!
//! Randomness: ChaCha20 seeded with `seed_from_u64(seed)`; each draw site uses
//! its own stream `purpose << 56 | object << 32 | step` with purpose 1 for
//! motion noise, 2 for detections and 3 for estimate perturbations.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    BernoulliDensity, BernoulliSequence, Density, MetricParams, SequenceSet, StateVector,
    Trajectory,
};
use crate::ptgospa::{Evaluator, MetricReport};

/// Lower bound on the existence of a coasting track.
pub const EXISTENCE_FLOOR: f64 = 0.01;

/// Estimates with existence at or below this are dropped for point-trajectory metrics.
pub const TRAJECTORY_EXISTENCE_THRESHOLD: f64 = 0.5;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExistenceModel {
    /// Existence `level` while the track is held; the track ends at the last detection.
    HoldHigh {
        #[serde(default = "one")]
        level: f64,
    },
    /// After the last detection the track coasts to the end of the window with
    /// `r_k = max(0.01, level * rate^(k - last_detection))`.
    DecayAfterDeath {
        rate: f64,
        #[serde(default = "one")]
        level: f64,
    },
}

impl ExistenceModel {
    fn level(&self) -> f64 {
        match *self {
            ExistenceModel::HoldHigh { level } | ExistenceModel::DecayAfterDeath { level, .. } => {
                level
            }
        }
    }
}

/// Exchange of the estimate remainders of two objects from `time` on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapInjection {
    pub time: usize,
    pub objects: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub window_length: usize,
    pub birth_times: Vec<usize>,
    /// Last step each object is alive (inclusive).
    pub death_times: Vec<usize>,
    /// State of each object at its birth time.
    pub initial_states: Vec<Vec<f64>>,
    pub process_noise_std: f64,
    pub detection_prob: f64,
    pub existence_model: ExistenceModel,
    pub perturbation_std: f64,
    #[serde(default)]
    pub swap_injections: Vec<SwapInjection>,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    /// Six objects that start far apart and pass close to the origin around step 41.
    fn default() -> Self {
        let birth_times = vec![1, 1, 11, 11, 21, 21];
        let death_times = vec![61, 61, 71, 71, 81, 81];
        let meet = 41.0;
        let speed = 1.0;
        let initial_states = birth_times
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let angle = i as f64 * std::f64::consts::PI / 3.0;
                let (s, c) = angle.sin_cos();
                let lead = speed * (meet - b as f64);
                // small sideways offset so the paths pass near, not through, the centre
                vec![lead * c - 1.5 * s, lead * s + 1.5 * c, -speed * c, -speed * s]
            })
            .collect();
        Self {
            window_length: 81,
            birth_times,
            death_times,
            initial_states,
            process_noise_std: 0.3,
            detection_prob: 0.7,
            existence_model: ExistenceModel::DecayAfterDeath {
                rate: 0.8,
                level: 1.0,
            },
            perturbation_std: 1.0,
            swap_injections: Vec::new(),
            seed: 1,
        }
    }
}

fn check_probability(what: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(what, format!("{v} is not in [0, 1]")))
    }
}

fn check_std(what: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(what, format!("{v} must be finite and >= 0")))
    }
}

impl ScenarioConfig {
    pub fn num_objects(&self) -> usize {
        self.birth_times.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.window_length;
        if k == 0 {
            return Err(Error::invalid("window_length", "must be at least 1"));
        }
        let n = self.birth_times.len();
        if self.death_times.len() != n || self.initial_states.len() != n {
            return Err(Error::invalid(
                "birth_times",
                format!(
                    "birth_times ({n}), death_times ({}) and initial_states ({}) differ in length",
                    self.death_times.len(),
                    self.initial_states.len()
                ),
            ));
        }
        for (i, (&b, &d)) in self.birth_times.iter().zip(&self.death_times).enumerate() {
            if !(1 <= b && b <= d && d <= k) {
                return Err(Error::invalid(
                    "death_times",
                    format!("object {i}: need 1 <= birth ({b}) <= death ({d}) <= {k}"),
                ));
            }
        }
        let dim = self.initial_states.first().map_or(2, Vec::len);
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::invalid(
                "initial_states",
                format!("dimension {dim} must be even (positions then velocities)"),
            ));
        }
        for (i, s) in self.initial_states.iter().enumerate() {
            if s.len() != dim {
                return Err(Error::invalid(
                    "initial_states",
                    format!("object {i} has dimension {}, expected {dim}", s.len()),
                ));
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("initial_states", format!("object {i} has a non-finite entry")));
            }
        }
        check_std("process_noise_std", self.process_noise_std)?;
        check_std("perturbation_std", self.perturbation_std)?;
        check_probability("detection_prob", self.detection_prob)?;
        let level = self.existence_model.level();
        if !(level > 0.0 && level <= 1.0) {
            return Err(Error::invalid("existence_model.level", format!("{level} is not in (0, 1]")));
        }
        if let ExistenceModel::DecayAfterDeath { rate, .. } = self.existence_model {
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(Error::invalid("existence_model.rate", format!("{rate} is not in (0, 1]")));
            }
        }
        for s in &self.swap_injections {
            let [a, b] = s.objects;
            if a == b || a >= n || b >= n {
                return Err(Error::invalid(
                    "swap_injections",
                    format!("objects {a} and {b} must be distinct indices below {n}"),
                ));
            }
            let alive = |o: usize| self.birth_times[o] <= s.time && s.time <= self.death_times[o];
            if !(alive(a) && alive(b)) {
                return Err(Error::invalid(
                    "swap_injections",
                    format!("objects {a} and {b} are not both alive at step {}", s.time),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Purpose {
    Motion = 1,
    Detection = 2,
    Perturbation = 3,
}

fn stream(seed: u64, purpose: Purpose, object: usize, step: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 56) | ((object as u64) << 32) | step as u64);
    rng
}

fn normals(rng: &mut ChaCha20Rng, n: usize, std: f64) -> Vec<f64> {
    (0..n).map(|_| std * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// One constant-velocity step with acceleration `accel` (length `dim / 2`).
fn propagate(state: &mut [f64], accel: &[f64]) {
    let h = state.len() / 2;
    for i in 0..h {
        state[i] += state[h + i] + 0.5 * accel[i];
        state[h + i] += accel[i];
    }
}

fn truth_states(config: &ScenarioConfig) -> Vec<Vec<Vec<f64>>> {
    (0..config.num_objects())
        .map(|o| {
            let (b, d) = (config.birth_times[o], config.death_times[o]);
            let mut state = config.initial_states[o].clone();
            let h = state.len() / 2;
            let mut states = vec![state.clone()];
            for k in b + 1..=d {
                let accel = normals(
                    &mut stream(config.seed, Purpose::Motion, o, k),
                    h,
                    config.process_noise_std,
                );
                propagate(&mut state, &accel);
                states.push(state.clone());
            }
            states
        })
        .collect()
}

/// Ground truth: one existence-one Dirac sequence per object, in object order.
pub fn generate_truth(config: &ScenarioConfig) -> Result<SequenceSet> {
    config.validate()?;
    let sequences = truth_states(config)
        .into_iter()
        .zip(&config.birth_times)
        .map(|(states, &b)| {
            let densities = states
                .into_iter()
                .map(|s| StateVector::new(s).map(BernoulliDensity::certain))
                .collect::<Result<Vec<_>>>()?;
            BernoulliSequence::new(b, densities)
        })
        .collect::<Result<Vec<_>>>()?;
    SequenceSet::new(config.window_length, sequences)
}

/// Surrogate tracker output for `truth` as produced by [`generate_truth`].
pub fn generate_estimates(truth: &SequenceSet, config: &ScenarioConfig) -> Result<SequenceSet> {
    config.validate()?;
    let n = config.num_objects();
    if truth.len() != n || truth.window_length() != config.window_length {
        return Err(Error::invalid(
            "truth",
            format!(
                "expected {n} sequences over {} steps, got {} over {}",
                config.window_length,
                truth.len(),
                truth.window_length()
            ),
        ));
    }
    let window = config.window_length;
    let sigma = config.perturbation_std;
    let level = config.existence_model.level();
    let mut slots: Vec<Vec<Option<BernoulliDensity>>> = vec![vec![None; window]; n];

    for (o, seq) in truth.sequences().iter().enumerate() {
        let detected: Vec<usize> = (seq.start_time()..=seq.end_time())
            .filter(|&k| {
                stream(config.seed, Purpose::Detection, o, k).random::<f64>() < config.detection_prob
            })
            .collect();
        let (Some(&first), Some(&last)) = (detected.first(), detected.last()) else {
            continue;
        };
        let end = match config.existence_model {
            ExistenceModel::HoldHigh { .. } => last,
            ExistenceModel::DecayAfterDeath { .. } => window,
        };
        let mut coast: Vec<f64> = Vec::new();
        for k in first..=end {
            let existence = match config.existence_model {
                ExistenceModel::DecayAfterDeath { rate, .. } if k > last => {
                    (level * rate.powi((k - last) as i32)).max(EXISTENCE_FLOOR)
                }
                _ => level,
            };
            let mean = match seq.at(k) {
                Some(x) => {
                    let noise = normals(
                        &mut stream(config.seed, Purpose::Perturbation, o, k),
                        x.dim(),
                        sigma,
                    );
                    let m: Vec<f64> = x
                        .density()
                        .mean()
                        .as_slice()
                        .iter()
                        .zip(&noise)
                        .map(|(a, e)| a + e)
                        .collect();
                    coast = m.clone();
                    m
                }
                None => {
                    // object gone: the coasting track drifts at its last estimated velocity
                    let still = vec![0.0; coast.len() / 2];
                    propagate(&mut coast, &still);
                    coast.clone()
                }
            };
            let dim = mean.len();
            let density = Density::gaussian(
                StateVector::new(mean)?,
                DMatrix::from_diagonal_element(dim, dim, sigma * sigma),
            )?;
            slots[o][k - 1] = Some(BernoulliDensity::new(existence, density)?);
        }
    }

    for s in &config.swap_injections {
        let [a, b] = s.objects;
        for k in s.time..=window {
            let tmp = slots[a][k - 1].take();
            slots[a][k - 1] = slots[b][k - 1].take();
            slots[b][k - 1] = tmp;
        }
    }

    let mut sequences = Vec::new();
    for row in slots {
        let mut k = 0;
        while k < window {
            if row[k].is_none() {
                k += 1;
                continue;
            }
            let start = k;
            let mut densities = Vec::new();
            while k < window {
                match &row[k] {
                    Some(d) => densities.push(d.clone()),
                    None => break,
                }
                k += 1;
            }
            sequences.push(BernoulliSequence::new(start + 1, densities)?);
        }
    }
    SequenceSet::new(window, sequences)
}

/// Point trajectories from the means of maximal runs with existence above `min_existence`.
pub fn threshold_trajectories(set: &SequenceSet, min_existence: f64) -> Vec<Trajectory> {
    let mut out = Vec::new();
    for seq in set.sequences() {
        let mut current: Option<Trajectory> = None;
        for (offset, d) in seq.densities().iter().enumerate() {
            if d.existence() > min_existence {
                current
                    .get_or_insert_with(|| Trajectory::new(seq.start_time() + offset, Vec::new()))
                    .states
                    .push(d.density().mean().clone());
            } else if let Some(t) = current.take() {
                out.push(t);
            }
        }
        out.extend(current);
    }
    out
}

/// Per-step curves of one run, in distance units (each term raised to `1/p`).
/// `total[k]` combines all five terms of step `k`, the switch from `k` to `k+1` included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSeries {
    pub total: Vec<f64>,
    pub localization: Vec<f64>,
    pub existence_mismatch: Vec<f64>,
    pub missed: Vec<f64>,
    #[serde(rename = "false")]
    pub false_det: Vec<f64>,
    /// Length `K - 1`.
    pub switch: Vec<f64>,
}

impl RunSeries {
    pub fn from_report(report: &MetricReport, params: &MetricParams) -> Self {
        let steps = &report.per_step;
        let root = |f: fn(&crate::ptgospa::StepDecomposition) -> f64| {
            steps.iter().map(|s| params.root(f(s))).collect::<Vec<_>>()
        };
        Self {
            total: steps.iter().map(|s| s.step_error(params)).collect(),
            localization: root(|s| s.expected_localization),
            existence_mismatch: root(|s| s.existence_mismatch),
            missed: root(|s| s.expected_missed),
            false_det: root(|s| s.expected_false),
            switch: steps
                .iter()
                .filter_map(|s| s.switch_to_next)
                .map(|v| params.root(v))
                .collect(),
        }
    }

    pub fn window_length(&self) -> usize {
        self.total.len()
    }

    fn columns(&self) -> [&Vec<f64>; 6] {
        [
            &self.total,
            &self.localization,
            &self.existence_mismatch,
            &self.missed,
            &self.false_det,
            &self.switch,
        ]
    }

    fn check_shape(&self) -> Result<()> {
        let k = self.window_length();
        let ok = self.columns()[..5].iter().all(|c| c.len() == k)
            && self.switch.len() == k.saturating_sub(1);
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("run series", "component lengths are inconsistent"))
        }
    }
}

/// Per-step root-mean-square of run series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateSeries {
    pub runs: usize,
    pub rms: RunSeries,
}

pub fn aggregate_rms(runs: &[RunSeries]) -> Result<AggregateSeries> {
    let Some(first) = runs.first() else {
        return Err(Error::invalid("runs", "need at least one run to aggregate"));
    };
    for r in runs {
        r.check_shape()?;
        if r.window_length() != first.window_length() {
            return Err(Error::WindowMismatch {
                left: first.window_length(),
                right: r.window_length(),
            });
        }
    }
    let n = runs.len() as f64;
    let rms = |pick: fn(&RunSeries) -> &Vec<f64>| {
        (0..pick(first).len())
            .map(|k| (runs.iter().map(|r| pick(r)[k] * pick(r)[k]).sum::<f64>() / n).sqrt())
            .collect::<Vec<_>>()
    };
    Ok(AggregateSeries {
        runs: runs.len(),
        rms: RunSeries {
            total: rms(|r| &r.total),
            localization: rms(|r| &r.localization),
            existence_mismatch: rms(|r| &r.existence_mismatch),
            missed: rms(|r| &r.missed),
            false_det: rms(|r| &r.false_det),
            switch: rms(|r| &r.switch),
        },
    })
}

/// Everything one Monte Carlo run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub seed: u64,
    pub truth: SequenceSet,
    pub estimates: SequenceSet,
    pub ptgospa: MetricReport,
    /// Point-trajectory metric on the estimate means with existence above 0.5.
    pub tgospa: MetricReport,
}

impl RunOutcome {
    pub fn ptgospa_series(&self, params: &MetricParams) -> RunSeries {
        RunSeries::from_report(&self.ptgospa, params)
    }

    pub fn tgospa_series(&self, params: &MetricParams) -> RunSeries {
        RunSeries::from_report(&self.tgospa, params)
    }
}

pub fn run_once(config: &ScenarioConfig, evaluator: &Evaluator) -> Result<RunOutcome> {
    let truth = generate_truth(config)?;
    let estimates = generate_estimates(&truth, config)?;
    let ptgospa = evaluator.ptgospa(&truth, &estimates)?;
    let tgospa = evaluator.tgospa(
        &threshold_trajectories(&truth, 0.0),
        &threshold_trajectories(&estimates, TRAJECTORY_EXISTENCE_THRESHOLD),
        config.window_length,
    )?;
    Ok(RunOutcome {
        seed: config.seed,
        truth,
        estimates,
        ptgospa,
        tgospa,
    })
}

/// Seed of run `index` in a Monte Carlo batch.
pub fn run_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add(index as u64)
}

/// Runs `runs` independent replicas in parallel on the current rayon pool;
/// results are in run order.
pub fn run_monte_carlo(
    config: &ScenarioConfig,
    runs: usize,
    evaluator: &Evaluator,
) -> Result<Vec<RunOutcome>> {
    if runs == 0 {
        return Err(Error::invalid("runs", "must be at least 1"));
    }
    config.validate()?;
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let cfg = ScenarioConfig {
                seed: run_seed(config.seed, i),
                ..config.clone()
            };
            run_once(&cfg, evaluator)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::SolverKind;
    use crate::base_metric::BaseMetricKind;

    fn straight(k: usize) -> ScenarioConfig {
        ScenarioConfig {
            window_length: k,
            birth_times: vec![1],
            death_times: vec![k],
            initial_states: vec![vec![0.0, 0.0, 1.0, 0.0]],
            process_noise_std: 0.0,
            detection_prob: 1.0,
            existence_model: ExistenceModel::HoldHigh { level: 1.0 },
            perturbation_std: 0.0,
            swap_injections: vec![],
            seed: 7,
        }
    }

    fn evaluator() -> Evaluator {
        Evaluator::new(MetricParams::default(), BaseMetricKind::Wasserstein2, SolverKind::Exact)
    }

    #[test]
    fn noise_free_constant_velocity() {
        let truth = generate_truth(&straight(3)).unwrap();
        let pos: Vec<Vec<f64>> = truth.sequences()[0]
            .densities()
            .iter()
            .map(|d| d.density().mean().as_slice()[..2].to_vec())
            .collect();
        assert_eq!(pos, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn single_step_window() {
        let mut cfg = ScenarioConfig::default();
        cfg.window_length = 1;
        cfg.birth_times = vec![1; 6];
        cfg.death_times = vec![1; 6];
        let truth = generate_truth(&cfg).unwrap();
        assert_eq!(truth.len(), 6);
        assert!(truth.sequences().iter().all(|s| s.len() == 1));
    }

    #[test]
    fn same_seed_same_output() {
        let cfg = ScenarioConfig::default();
        let t1 = generate_truth(&cfg).unwrap();
        let t2 = generate_truth(&cfg).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(generate_estimates(&t1, &cfg).unwrap(), generate_estimates(&t2, &cfg).unwrap());
        let other = ScenarioConfig { seed: 8, ..cfg.clone() };
        assert_ne!(t1, generate_truth(&other).unwrap());
    }

    #[test]
    fn default_config_objects() {
        let cfg = ScenarioConfig::default();
        let truth = generate_truth(&cfg).unwrap();
        let spans: Vec<(usize, usize)> =
            truth.sequences().iter().map(|s| (s.start_time(), s.end_time())).collect();
        assert_eq!(spans, vec![(1, 61), (1, 61), (11, 71), (11, 71), (21, 81), (21, 81)]);
    }

    #[test]
    fn perfect_estimation_is_zero() {
        let mut cfg = ScenarioConfig::default();
        cfg.detection_prob = 1.0;
        cfg.perturbation_std = 0.0;
        cfg.existence_model = ExistenceModel::HoldHigh { level: 1.0 };
        let truth = generate_truth(&cfg).unwrap();
        let est = generate_estimates(&truth, &cfg).unwrap();
        let r = evaluator().with_solver(SolverKind::Lp).ptgospa(&truth, &est).unwrap();
        assert!(r.total.abs() < 1e-9, "{}", r.total);
    }

    #[test]
    fn no_detections_means_all_missed() {
        let mut cfg = ScenarioConfig::default();
        cfg.detection_prob = 0.0;
        let truth = generate_truth(&cfg).unwrap();
        let est = generate_estimates(&truth, &cfg).unwrap();
        assert!(est.is_empty());
        let alive: usize = truth.sequences().iter().map(|s| s.len()).sum();
        let r = evaluator().ptgospa(&truth, &est).unwrap();
        assert!((r.total - (alive as f64 * 50.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn swap_injection_costs_two_full_switches() {
        let mut cfg = straight(6);
        cfg.birth_times = vec![1, 1];
        cfg.death_times = vec![6, 6];
        cfg.initial_states = vec![vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 50.0, 1.0, 0.0]];
        cfg.swap_injections = vec![SwapInjection { time: 4, objects: [0, 1] }];
        let truth = generate_truth(&cfg).unwrap();
        let est = generate_estimates(&truth, &cfg).unwrap();
        for s in [SolverKind::Exact, SolverKind::Lp] {
            let r = evaluator().with_solver(s).ptgospa(&truth, &est).unwrap();
            assert!((r.total_switch() - 8.0).abs() < 1e-9);
            assert!((r.total_pth_power() - 8.0).abs() < 1e-9);
        }
    }

    #[test]
    fn swap_of_non_overlapping_objects_is_rejected() {
        let mut cfg = ScenarioConfig::default();
        cfg.swap_injections = vec![SwapInjection { time: 5, objects: [0, 2] }];
        assert!(generate_truth(&cfg).is_err());
        cfg.swap_injections = vec![SwapInjection { time: 5, objects: [0, 0] }];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn decay_keeps_coasting_above_floor() {
        let mut cfg = straight(12);
        cfg.death_times = vec![5];
        cfg.existence_model = ExistenceModel::DecayAfterDeath { rate: 0.5, level: 1.0 };
        let truth = generate_truth(&cfg).unwrap();
        let est = generate_estimates(&truth, &cfg).unwrap();
        let r: Vec<f64> = est.sequences()[0].densities().iter().map(|d| d.existence()).collect();
        assert_eq!(r.len(), 12);
        assert_eq!(&r[..5], &[1.0; 5]);
        assert_eq!(r[5], 0.5);
        assert_eq!(r[9], 0.03125);
        assert_eq!(r[11], EXISTENCE_FLOOR);
    }

    #[test]
    fn rms_aggregation() {
        let series = |v: f64| RunSeries {
            total: vec![v; 2],
            localization: vec![v; 2],
            existence_mismatch: vec![0.0; 2],
            missed: vec![0.0; 2],
            false_det: vec![0.0; 2],
            switch: vec![v],
        };
        let agg = aggregate_rms(&[series(3.0), series(4.0)]).unwrap();
        assert!((agg.rms.total[0] - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(aggregate_rms(&[series(3.0)]).unwrap().rms, series(3.0));
        assert_eq!(aggregate_rms(&[series(0.0), series(0.0)]).unwrap().rms, series(0.0));
        assert!(aggregate_rms(&[]).is_err());
    }

    #[test]
    fn threshold_splits_runs() {
        let d = |r: f64| {
            BernoulliDensity::new(r, Density::dirac(StateVector::new(vec![0.0]).unwrap())).unwrap()
        };
        let set = SequenceSet::new(
            5,
            vec![BernoulliSequence::new(1, vec![d(0.9), d(0.4), d(0.8), d(0.7), d(0.2)]).unwrap()],
        )
        .unwrap();
        let t = threshold_trajectories(&set, 0.5);
        assert_eq!(t.len(), 2);
        assert_eq!((t[0].start_time, t[0].states.len()), (1, 1));
        assert_eq!((t[1].start_time, t[1].states.len()), (3, 2));
    }

    #[test]
    fn monte_carlo_is_ordered_and_deterministic() {
        let mut cfg = ScenarioConfig::default();
        cfg.window_length = 20;
        cfg.death_times = vec![15, 15, 20, 20, 20, 20];
        cfg.birth_times = vec![1, 1, 5, 5, 11, 11];
        let ev = evaluator();
        let a = run_monte_carlo(&cfg, 3, &ev).unwrap();
        let b = run_monte_carlo(&cfg, 3, &ev).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(run_monte_carlo(&cfg, 0, &ev).is_err());
        let s = a[0].ptgospa_series(&ev.params);
        assert_eq!(s.total.len(), 20);
        assert_eq!(s.switch.len(), 19);
    }
}
