//! Trace evaluation: excess risk, classification error, optimal stopping,
//! network-error diagnostics, and the runtime speed-up formula.
//!
//! Aggregation follows the worst-agent convention: a per-iteration score is
//! the maximum over agents, and the optimal stopping time minimizes that
//! curve (earliest index on ties).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::engine::TrainTrace;
use crate::error::{Error, Result};
use crate::features::FeatureMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Mean squared distance to the planted noiseless targets; synthetic
    /// datasets only.
    ExcessRisk,
    /// Fraction of `1{y_hat > 1/2} != y` over `{0,1}` labels.
    ClassificationError,
    /// Plain mean squared error against the stored responses.
    Mse,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::ExcessRisk => "excess_risk",
            Metric::ClassificationError => "classification_error",
            Metric::Mse => "mse",
        }
    }
}

/// Monte Carlo estimate of the squared prediction distance to the planted
/// truth: `(1/N) sum_i (<w, phi(x_i)> - f*(x_i))^2`.
pub fn excess_risk_estimate(weights: &DVector<f64>, map: &FeatureMap, test: &Dataset) -> Result<f64> {
    let truth = test.ground_truth.as_ref().ok_or_else(|| Error::UnsupportedMetric {
        metric: "excess_risk".into(),
        reason: "test set carries no planted ground truth".into(),
    })?;
    let preds = crate::engine::predict(weights, map, &test.x)?;
    Ok((preds - &truth.noiseless).norm_squared() / test.len() as f64)
}

/// 0-1 loss of thresholded scores: predicted class is `1{y_hat > 1/2}`,
/// ties classify as 0.
pub fn classification_error(predictions: &DVector<f64>, labels: &DVector<f64>) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::dimension(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
        return Err(Error::parameter("labels", "must be 0 or 1"));
    }
    let wrong = predictions
        .iter()
        .zip(labels.iter())
        .filter(|(&p, &y)| {
            let class = if p > 0.5 { 1.0 } else { 0.0 };
            class != y
        })
        .count();
    Ok(wrong as f64 / labels.len().max(1) as f64)
}

pub fn mse(predictions: &DVector<f64>, targets: &DVector<f64>) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::dimension("prediction/target length mismatch"));
    }
    Ok((predictions - targets).norm_squared() / targets.len().max(1) as f64)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRow {
    pub t: usize,
    pub agent: usize,
    pub value: f64,
}

/// Per-checkpoint, per-agent metric table with the optimal stopping summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub metric: Metric,
    pub rows: Vec<EvalRow>,
    /// `(t, max over agents)` per checkpoint.
    pub per_t_worst: Vec<(usize, f64)>,
    /// Checkpoint index minimizing the worst-agent curve (earliest on ties).
    pub t_star: usize,
    pub best_value: f64,
    pub meta: BTreeMap<String, String>,
}

impl EvalReport {
    /// Tidy CSV: `t,agent,metric,value`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,agent,metric,value")?;
        for row in &self.rows {
            writeln!(out, "{},{},{},{}", row.t, row.agent, self.metric.name(), row.value)?;
        }
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Summary<'a> {
            metric: &'a str,
            t_star: usize,
            best_value: f64,
            meta: &'a BTreeMap<String, String>,
        }
        Ok(serde_json::to_string_pretty(&Summary {
            metric: self.metric.name(),
            t_star: self.t_star,
            best_value: self.best_value,
            meta: &self.meta,
        })?)
    }
}

/// Evaluate every checkpointed iterate of every agent on a test set.
pub fn evaluate_trace(
    trace: &TrainTrace,
    map: &FeatureMap,
    test: &Dataset,
    metric: Metric,
) -> Result<EvalReport> {
    if trace.num_checkpoints() == 0 {
        return Err(Error::parameter("trace", "has no checkpoints"));
    }
    if metric == Metric::ExcessRisk && test.ground_truth.is_none() {
        return Err(Error::UnsupportedMetric {
            metric: "excess_risk".into(),
            reason: "test set carries no planted ground truth".into(),
        });
    }
    let phi_test = map.apply_matrix(&test.x)?;
    let n_test = test.len() as f64;
    let targets: &DVector<f64> = match metric {
        Metric::ExcessRisk => &test.ground_truth.as_ref().expect("checked above").noiseless,
        _ => &test.y,
    };

    let mut rows = Vec::with_capacity(trace.num_checkpoints() * trace.n_agents);
    let mut per_t_worst = Vec::with_capacity(trace.num_checkpoints());
    for (c, &t) in trace.checkpoints.iter().enumerate() {
        // stack agent weights so the whole checkpoint is one matrix product
        let mut stacked = DMatrix::zeros(trace.feature_dim, trace.n_agents);
        for v in 0..trace.n_agents {
            stacked.set_column(v, &trace.weights[c][v]);
        }
        let preds = &phi_test * stacked;
        let mut worst = f64::NEG_INFINITY;
        for v in 0..trace.n_agents {
            let col = preds.column(v);
            let value = match metric {
                Metric::ExcessRisk | Metric::Mse => {
                    let mut acc = 0.0;
                    for i in 0..test.len() {
                        let d = col[i] - targets[i];
                        acc += d * d;
                    }
                    acc / n_test
                }
                Metric::ClassificationError => {
                    let mut wrong = 0usize;
                    for i in 0..test.len() {
                        let y = targets[i];
                        if y != 0.0 && y != 1.0 {
                            return Err(Error::parameter("labels", "must be 0 or 1"));
                        }
                        let class = if col[i] > 0.5 { 1.0 } else { 0.0 };
                        if class != y {
                            wrong += 1;
                        }
                    }
                    wrong as f64 / n_test
                }
            };
            rows.push(EvalRow { t, agent: v, value });
            worst = worst.max(value);
        }
        per_t_worst.push((t, worst));
    }

    let (t_star, best_value) = per_t_worst
        .iter()
        .copied()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)))
        .expect("at least one checkpoint");

    Ok(EvalReport {
        metric,
        rows,
        per_t_worst,
        t_star,
        best_value,
        meta: BTreeMap::new(),
    })
}

/// Smallest checkpointed iteration minimizing the worst-agent test metric,
/// and the value there.
pub fn optimal_stopping(
    trace: &TrainTrace,
    map: &FeatureMap,
    test: &Dataset,
    metric: Metric,
) -> Result<(usize, f64)> {
    let report = evaluate_trace(trace, map, test, metric)?;
    Ok((report.t_star, report.best_value))
}

/// Per-checkpoint, per-agent deviation of a distributed run from the pooled
/// single-machine path, in the covariance seminorm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkErrorTable {
    pub checkpoints: Vec<usize>,
    /// `values[c][v] = sqrt((w_{t,v} - v_t)^T C (w_{t,v} - v_t))`.
    pub values: Vec<Vec<f64>>,
}

impl NetworkErrorTable {
    /// Mean over all checkpoints and agents.
    pub fn time_mean(&self) -> f64 {
        let count: usize = self.values.iter().map(Vec::len).sum();
        if count == 0 {
            return 0.0;
        }
        self.values.iter().flatten().sum::<f64>() / count as f64
    }
}

pub fn network_error(
    distributed: &TrainTrace,
    centralized: &TrainTrace,
    c_hat: &DMatrix<f64>,
) -> Result<NetworkErrorTable> {
    if centralized.n_agents != 1 {
        return Err(Error::parameter("centralized", "baseline trace must have one agent"));
    }
    if distributed.checkpoints != centralized.checkpoints {
        return Err(Error::parameter("traces", "checkpoint grids differ"));
    }
    if distributed.feature_dim != centralized.feature_dim
        || c_hat.nrows() != distributed.feature_dim
        || c_hat.ncols() != distributed.feature_dim
    {
        return Err(Error::dimension("covariance/trace feature dimensions differ"));
    }
    if distributed.config.eta != centralized.config.eta {
        return Err(Error::parameter("traces", "step sizes differ"));
    }
    let mut values = Vec::with_capacity(distributed.num_checkpoints());
    for c in 0..distributed.num_checkpoints() {
        let reference = &centralized.weights[c][0];
        let mut at_t = Vec::with_capacity(distributed.n_agents);
        for v in 0..distributed.n_agents {
            let diff = &distributed.weights[c][v] - reference;
            let quad = (c_hat * &diff).dot(&diff);
            // clamp fp negatives at zero
            at_t.push(quad.max(0.0).sqrt());
        }
        values.push(at_t);
    }
    Ok(NetworkErrorTable {
        checkpoints: distributed.checkpoints.clone(),
        values,
    })
}

/// Runtime speed-up of the distributed run over a single machine:
/// `n m / (m + tau + M deg)`, with one gradient costing a unit of time and
/// `tau` the per-round communication delay.
pub fn speedup_estimate(n: usize, m: usize, num_features: usize, tau: f64, deg: usize) -> f64 {
    let numerator = (n * m) as f64;
    let denominator = m as f64 + tau + (num_features * deg) as f64;
    numerator / denominator
}
