//! JSON input/report documents and the per-step curve CSV.
//!
//! Covariances are row-major nested arrays. A step without `covariance` is a
//! Dirac density; a step without `existence` has existence 1.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::model::{BernoulliDensity, BernoulliSequence, Density, SequenceSet, StateVector};
use crate::ptgospa::{Evaluator, HypothesisMixture, MetricReport, StepDecomposition};
use crate::scenario::{
    aggregate_rms, threshold_trajectories, RunSeries, ScenarioConfig, TRAJECTORY_EXISTENCE_THRESHOLD,
};

/// Header of the curve CSV.
pub const CSV_HEADER: &str = "time_step,total,localization,existence_mismatch,missed,false,switch";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value at {path}: {message}")]
    Validation { path: String, message: String },
    #[error(transparent)]
    Metric(#[from] crate::error::Error),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> DocumentError {
    DocumentError::Validation {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, DocumentError> {
    serde_json::from_str(text).map_err(|e| DocumentError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    #[serde(default = "one")]
    pub existence: f64,
    pub mean: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDoc {
    pub start_time: usize,
    pub steps: Vec<StepDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisDoc {
    pub weight: f64,
    pub sequences: Vec<SequenceDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub window_length: usize,
    pub state_dimension: usize,
    #[serde(default)]
    pub sequences: Vec<SequenceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<Vec<HypothesisDoc>>,
}

/// Estimate side of a comparison: one set, or weighted hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimateInput {
    Single(SequenceSet),
    Mixture(HypothesisMixture),
}

impl InputDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_sequence_set(set: &SequenceSet, state_dimension: usize) -> Self {
        Self {
            window_length: set.window_length(),
            state_dimension: set.dim().unwrap_or(state_dimension),
            sequences: set.sequences().iter().map(sequence_doc).collect(),
            hypotheses: None,
        }
    }

    fn check_header(&self) -> Result<(), DocumentError> {
        if self.window_length == 0 {
            return Err(invalid("window_length", "must be at least 1"));
        }
        if self.state_dimension == 0 {
            return Err(invalid("state_dimension", "must be at least 1"));
        }
        Ok(())
    }

    /// The single sequence set of this document; mixtures are rejected.
    pub fn to_sequence_set(&self) -> Result<SequenceSet, DocumentError> {
        self.check_header()?;
        if self.hypotheses.is_some() {
            return Err(invalid("hypotheses", "a mixture is only accepted as the estimate"));
        }
        build_set(self.window_length, self.state_dimension, &self.sequences, "sequences")
    }

    pub fn to_estimate(&self) -> Result<EstimateInput, DocumentError> {
        self.check_header()?;
        let Some(hypotheses) = &self.hypotheses else {
            return self.to_sequence_set().map(EstimateInput::Single);
        };
        if !self.sequences.is_empty() {
            return Err(invalid("sequences", "must be empty when hypotheses are given"));
        }
        if hypotheses.is_empty() {
            return Err(invalid("hypotheses", "needs at least one hypothesis"));
        }
        let mut parts = Vec::with_capacity(hypotheses.len());
        for (h, hyp) in hypotheses.iter().enumerate() {
            if !(hyp.weight.is_finite() && hyp.weight > 0.0) {
                return Err(invalid(format!("hypotheses[{h}].weight"), "must be > 0"));
            }
            let path = format!("hypotheses[{h}].sequences");
            parts.push((hyp.weight, build_set(self.window_length, self.state_dimension, &hyp.sequences, &path)?));
        }
        HypothesisMixture::new(parts)
            .map(EstimateInput::Mixture)
            .map_err(|e| invalid("hypotheses", e.to_string()))
    }
}

fn sequence_doc(seq: &BernoulliSequence) -> SequenceDoc {
    SequenceDoc {
        start_time: seq.start_time(),
        steps: seq
            .densities()
            .iter()
            .map(|b| StepDoc {
                existence: b.existence(),
                mean: b.density().mean().as_slice().to_vec(),
                covariance: b.density().covariance().map(|c| {
                    c.row_iter().map(|r| r.iter().copied().collect()).collect()
                }),
            })
            .collect(),
    }
}

fn build_set(
    window: usize,
    dim: usize,
    docs: &[SequenceDoc],
    path: &str,
) -> Result<SequenceSet, DocumentError> {
    let mut sequences = Vec::with_capacity(docs.len());
    for (s, doc) in docs.iter().enumerate() {
        let seq_path = format!("{path}[{s}]");
        if doc.start_time == 0 {
            return Err(invalid(format!("{seq_path}.start_time"), "time steps start at 1"));
        }
        if doc.steps.is_empty() {
            return Err(invalid(format!("{seq_path}.steps"), "must contain at least one step"));
        }
        let end = doc.start_time + doc.steps.len() - 1;
        if end > window {
            return Err(invalid(
                format!("{seq_path}.steps"),
                format!("sequence ends at step {end}, after the window of {window} steps"),
            ));
        }
        let mut densities = Vec::with_capacity(doc.steps.len());
        for (k, step) in doc.steps.iter().enumerate() {
            densities.push(build_step(step, dim, &format!("{seq_path}.steps[{k}]"))?);
        }
        sequences.push(
            BernoulliSequence::new(doc.start_time, densities)
                .map_err(|e| invalid(seq_path.clone(), e.to_string()))?,
        );
    }
    SequenceSet::new(window, sequences).map_err(|e| invalid(path.to_string(), e.to_string()))
}

fn build_step(step: &StepDoc, dim: usize, path: &str) -> Result<BernoulliDensity, DocumentError> {
    if !(step.existence > 0.0 && step.existence <= 1.0) {
        return Err(invalid(format!("{path}.existence"), format!("{} is not in (0, 1]", step.existence)));
    }
    if step.mean.len() != dim {
        return Err(invalid(
            format!("{path}.mean"),
            format!("has {} entries, state_dimension is {dim}", step.mean.len()),
        ));
    }
    let mean = StateVector::new(step.mean.clone()).map_err(|e| invalid(format!("{path}.mean"), e.to_string()))?;
    let density = match &step.covariance {
        None => Density::dirac(mean),
        Some(rows) => {
            let cov_path = format!("{path}.covariance");
            if rows.len() != dim {
                return Err(invalid(cov_path, format!("has {} rows, expected {dim}", rows.len())));
            }
            if let Some(r) = rows.iter().position(|r| r.len() != dim) {
                return Err(invalid(
                    format!("{cov_path}[{r}]"),
                    format!("has {} entries, expected {dim}", rows[r].len()),
                ));
            }
            let m = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
            Density::gaussian(mean, m).map_err(|e| invalid(cov_path, e.to_string()))?
        }
    };
    BernoulliDensity::new(step.existence, density).map_err(|e| invalid(path.to_string(), e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MetricKind {
    #[default]
    Ptgospa,
    Tgospa,
    Gospa,
    Pgospa,
}

impl MetricKind {
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Ptgospa => "ptgospa",
            MetricKind::Tgospa => "tgospa",
            MetricKind::Gospa => "gospa",
            MetricKind::Pgospa => "pgospa",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ptgospa" => Ok(MetricKind::Ptgospa),
            "tgospa" => Ok(MetricKind::Tgospa),
            "gospa" => Ok(MetricKind::Gospa),
            "pgospa" => Ok(MetricKind::Pgospa),
            other => Err(format!("unknown metric '{other}' (expected ptgospa, tgospa, gospa or pgospa)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsEcho {
    pub cutoff: f64,
    pub order: f64,
    pub switch_cost: f64,
    pub base_metric: String,
}

/// Step terms in p-th power; `switch` is the cost from this step to the next
/// (0 at the last step).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRow {
    pub time_step: usize,
    pub localization: f64,
    pub existence_mismatch: f64,
    pub missed: f64,
    #[serde(rename = "false")]
    pub false_det: f64,
    pub switch: f64,
}

impl StepRow {
    fn from_step(k: usize, d: &StepDecomposition) -> Self {
        Self {
            time_step: k,
            localization: d.expected_localization,
            existence_mismatch: d.existence_mismatch,
            missed: d.expected_missed,
            false_det: d.expected_false,
            switch: d.switch_to_next.unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisTotal {
    pub weight: f64,
    pub total: f64,
}

/// Result of one comparison. For a mixture estimate, `total` and the step
/// rows are weight-averaged over the hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub metric: String,
    pub params: ParamsEcho,
    pub solver: String,
    pub window_length: usize,
    pub total: f64,
    pub per_step: Vec<StepRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypotheses: Option<Vec<HypothesisTotal>>,
    /// Optimal weight matrices per step (row-major), only when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<Vec<f64>>>>,
}

impl ReportDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    fn header(metric: MetricKind, evaluator: &Evaluator, solver: &str, window: usize) -> Self {
        Self {
            metric: metric.name().to_string(),
            params: ParamsEcho {
                cutoff: evaluator.params.cutoff(),
                order: evaluator.params.order(),
                switch_cost: evaluator.params.switch_cost(),
                base_metric: evaluator.base.name().to_string(),
            },
            solver: solver.to_string(),
            window_length: window,
            total: 0.0,
            per_step: Vec::new(),
            hypotheses: None,
            weights: None,
        }
    }

    pub fn from_report(
        metric: MetricKind,
        evaluator: &Evaluator,
        report: &MetricReport,
        emit_weights: bool,
    ) -> Self {
        let mut doc = Self::header(metric, evaluator, report.solver.name(), report.per_step.len());
        doc.total = report.total;
        doc.per_step = report
            .per_step
            .iter()
            .enumerate()
            .map(|(k, d)| StepRow::from_step(k + 1, d))
            .collect();
        if emit_weights {
            doc.weights = Some(
                report
                    .weights
                    .iter()
                    .map(|w| w.entries().row_iter().map(|r| r.iter().copied().collect()).collect())
                    .collect(),
            );
        }
        doc
    }

    pub fn from_mixture(
        metric: MetricKind,
        evaluator: &Evaluator,
        reports: &[(f64, MetricReport)],
    ) -> Self {
        let window = reports.first().map_or(0, |(_, r)| r.per_step.len());
        let solver = reports.first().map_or(evaluator.solver, |(_, r)| r.solver);
        let mut doc = Self::header(metric, evaluator, solver.name(), window);
        doc.total = reports.iter().map(|(w, r)| w * r.total).sum();
        doc.per_step = (0..window)
            .map(|k| {
                let mut row = StepRow {
                    time_step: k + 1,
                    localization: 0.0,
                    existence_mismatch: 0.0,
                    missed: 0.0,
                    false_det: 0.0,
                    switch: 0.0,
                };
                for (w, r) in reports {
                    let s = StepRow::from_step(k + 1, &r.per_step[k]);
                    row.localization += w * s.localization;
                    row.existence_mismatch += w * s.existence_mismatch;
                    row.missed += w * s.missed;
                    row.false_det += w * s.false_det;
                    row.switch += w * s.switch;
                }
                row
            })
            .collect();
        doc.hypotheses = Some(
            reports
                .iter()
                .map(|(w, r)| HypothesisTotal {
                    weight: *w,
                    total: r.total,
                })
                .collect(),
        );
        doc
    }

    /// Per-step curves in distance units.
    pub fn run_series(&self) -> Result<RunSeries, DocumentError> {
        let p = self.params.order;
        if !(p.is_finite() && p >= 1.0) {
            return Err(invalid("params.order", "must be >= 1"));
        }
        if self.per_step.len() != self.window_length {
            return Err(invalid(
                "per_step",
                format!("has {} rows for a window of {}", self.per_step.len(), self.window_length),
            ));
        }
        let root = |x: f64| x.max(0.0).powf(1.0 / p);
        let col = |f: fn(&StepRow) -> f64| self.per_step.iter().map(|r| root(f(r))).collect::<Vec<_>>();
        let mut switch = col(|r| r.switch);
        switch.truncate(self.window_length.saturating_sub(1));
        Ok(RunSeries {
            total: self
                .per_step
                .iter()
                .map(|r| root(r.localization + r.existence_mismatch + r.missed + r.false_det + r.switch))
                .collect(),
            localization: col(|r| r.localization),
            existence_mismatch: col(|r| r.existence_mismatch),
            missed: col(|r| r.missed),
            false_det: col(|r| r.false_det),
            switch,
        })
    }
}

/// Runs `metric` between two parsed documents.
pub fn compute_report(
    truth: &InputDocument,
    estimate: &InputDocument,
    metric: MetricKind,
    evaluator: &Evaluator,
    emit_weights: bool,
) -> Result<ReportDocument, DocumentError> {
    let x = truth.to_sequence_set()?;
    let estimate = estimate.to_estimate()?;
    let run = |y: &SequenceSet| -> Result<MetricReport, crate::error::Error> {
        match metric {
            MetricKind::Ptgospa => evaluator.ptgospa(&x, y),
            MetricKind::Pgospa => evaluator.stepwise_pgospa(&x, y),
            MetricKind::Gospa => evaluator.stepwise_gospa(&x, y),
            MetricKind::Tgospa => evaluator.tgospa(
                &threshold_trajectories(&x, TRAJECTORY_EXISTENCE_THRESHOLD),
                &threshold_trajectories(y, TRAJECTORY_EXISTENCE_THRESHOLD),
                x.window_length(),
            ),
        }
    };
    match estimate {
        EstimateInput::Single(y) => Ok(ReportDocument::from_report(metric, evaluator, &run(&y)?, emit_weights)),
        EstimateInput::Mixture(m) => {
            let reports = m
                .hypotheses()
                .iter()
                .map(|(w, y)| run(y).map(|r| (*w, r)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ReportDocument::from_mixture(metric, evaluator, &reports))
        }
    }
}

/// Parses and validates a scenario configuration.
pub fn parse_scenario_config(text: &str) -> Result<ScenarioConfig, DocumentError> {
    let config: ScenarioConfig = parse_json(text)?;
    config.validate().map_err(|e| match e {
        crate::error::Error::Invalid { what, reason } => invalid(what, reason),
        other => invalid("config", other.to_string()),
    })?;
    Ok(config)
}

pub fn scenario_config_json(config: &ScenarioConfig) -> String {
    let mut s = serde_json::to_string_pretty(config).expect("configs always serialize");
    s.push('\n');
    s
}

/// Curve CSV; numbers carry 17 significant digits.
pub fn curves_csv(series: &RunSeries) -> String {
    let mut out = String::with_capacity(64 * (series.total.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for k in 0..series.total.len() {
        let switch = series.switch.get(k).copied().unwrap_or(0.0);
        let _ = write!(out, "{}", k + 1);
        for v in [
            series.total[k],
            series.localization[k],
            series.existence_mismatch[k],
            series.missed[k],
            series.false_det[k],
            switch,
        ] {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}

/// RMS-aggregated curves of several reports (identity for a single one).
pub fn aggregate_reports(reports: &[ReportDocument]) -> Result<RunSeries, DocumentError> {
    let series = reports
        .iter()
        .map(ReportDocument::run_series)
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(first) = reports.first() {
        if let Some(bad) = reports.iter().position(|r| r.window_length != first.window_length) {
            return Err(invalid(
                format!("reports[{bad}].window_length"),
                format!("{} differs from {}", reports[bad].window_length, first.window_length),
            ));
        }
    }
    Ok(aggregate_rms(&series)?.rms)
}
