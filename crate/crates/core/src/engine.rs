//! Synchronous distributed gradient descent over a gossip matrix, plus the
//! pooled single-machine baseline.
//!
//! One round is: every agent takes a full-batch gradient step on its own `m`
//! samples, then weights are averaged through the mixing matrix — exactly in
//! that order. Iterates are indexed from 1 (`t = 1` is the zero
//! initialization) through `T + 1`, and traces always checkpoint both ends.
//!
//! Local steps are independent within a round and run in parallel; the mixing
//! step is a barrier that accumulates neighbor sums in fixed agent order, so
//! traces are bit-identical for any worker count.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, ShardedData};
use crate::error::{Error, Result};
use crate::features::FeatureMap;
use crate::topology::MixingMatrix;

/// Seeds a run was produced from; carried for provenance only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedBundle {
    pub feature: u64,
    pub shard: u64,
    pub noise: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Fixed step size.
    pub eta: f64,
    /// Iteration budget `T`; the trace ends at index `T + 1`.
    pub iters: usize,
    /// Explicit checkpoint stride; `None` picks an automatic schedule.
    pub checkpoint_every: Option<usize>,
    /// Cap for the automatic schedule.
    pub max_checkpoints: usize,
    /// Skip the `eta * kappa^2 <= 1` admissibility check.
    pub allow_large_step: bool,
    pub seeds: SeedBundle,
}

impl RunConfig {
    pub fn new(eta: f64, iters: usize) -> Self {
        RunConfig {
            eta,
            iters,
            checkpoint_every: None,
            max_checkpoints: 512,
            allow_large_step: false,
            seeds: SeedBundle::default(),
        }
    }

    fn validate(&self, map: &FeatureMap) -> Result<()> {
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::config("eta", "must be a positive finite number"));
        }
        if let Some(kappa) = map.psi_bound() {
            let product = self.eta * kappa * kappa;
            if product > 1.0 + 1e-12 && !self.allow_large_step {
                return Err(Error::config(
                    "eta",
                    format!(
                        "eta * kappa^2 = {product:.6} exceeds 1; lower eta or set allow_large_step"
                    ),
                ));
            }
        }
        if self.max_checkpoints < 2 {
            return Err(Error::config("max_checkpoints", "need at least 2"));
        }
        Ok(())
    }
}

/// Checkpoint indices in `1..=t_end`: both endpoints, every power of two, and
/// an arithmetic stride chosen so the schedule stays within the budget.
pub fn checkpoint_schedule(t_end: usize, every: Option<usize>, max_checkpoints: usize) -> Vec<usize> {
    assert!(t_end >= 1);
    let mut picks: Vec<usize> = vec![1, t_end];
    let mut p = 2usize;
    while p <= t_end {
        picks.push(p);
        p *= 2;
    }
    let stride = match every {
        Some(s) => s.max(1),
        None => {
            let budget = max_checkpoints.saturating_sub(picks.len()).max(1);
            t_end.div_ceil(budget)
        }
    };
    let mut t = 1usize;
    while t <= t_end {
        picks.push(t);
        t += stride;
    }
    picks.sort_unstable();
    picks.dedup();
    picks
}

/// Per-iteration, per-agent weight vectors at the checkpointed indices.
#[derive(Debug, Clone)]
pub struct TrainTrace {
    /// Ascending iteration indices, starting at 1.
    pub checkpoints: Vec<usize>,
    /// `weights[c][v]` is agent `v` at checkpoint `checkpoints[c]`.
    pub weights: Vec<Vec<DVector<f64>>>,
    pub n_agents: usize,
    pub feature_dim: usize,
    pub config: RunConfig,
}

impl TrainTrace {
    pub fn num_checkpoints(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn weights_at(&self, checkpoint: usize, agent: usize) -> &DVector<f64> {
        &self.weights[checkpoint][agent]
    }

    /// Final iterate of one agent.
    pub fn last_weights(&self, agent: usize) -> &DVector<f64> {
        &self.weights.last().expect("trace is never empty")[agent]
    }

    /// Tidy CSV: `t,agent,w0..w{M-1}`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = ["t".to_string(), "agent".to_string()]
            .into_iter()
            .chain((0..self.feature_dim).map(|j| format!("w{j}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (c, &t) in self.checkpoints.iter().enumerate() {
            for v in 0..self.n_agents {
                let mut row = vec![t.to_string(), v.to_string()];
                row.extend(self.weights[c][v].iter().map(|w| format!("{w}")));
                writeln!(out, "{}", row.join(","))?;
            }
        }
        Ok(())
    }

    /// Rebuild a trace from `write_csv` output. The run config is not stored
    /// in the CSV; pass the one recorded alongside it.
    pub fn read_csv<R: std::io::Read>(input: R, config: RunConfig) -> Result<TrainTrace> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let headers = reader.headers()?.clone();
        if headers.len() < 3 || &headers[0] != "t" || &headers[1] != "agent" {
            return Err(Error::Ingestion {
                row: 0,
                reason: "expected header t,agent,w0,...".into(),
            });
        }
        let dim = headers.len() - 2;
        let mut checkpoints = Vec::new();
        let mut weights: Vec<Vec<DVector<f64>>> = Vec::new();
        let mut n_agents = 0usize;
        for (idx, record) in reader.records().enumerate() {
            let record = record?;
            let row_no = idx + 1;
            let bad = |what: &str| Error::Ingestion {
                row: row_no,
                reason: what.to_string(),
            };
            let t: usize = record[0].parse().map_err(|_| bad("bad iteration index"))?;
            let agent: usize = record[1].parse().map_err(|_| bad("bad agent index"))?;
            let mut w = DVector::zeros(dim);
            for j in 0..dim {
                w[j] = record[j + 2].parse().map_err(|_| bad("bad weight"))?;
            }
            if checkpoints.last() != Some(&t) {
                checkpoints.push(t);
                weights.push(Vec::new());
            }
            let slot = weights.last_mut().expect("pushed above");
            if slot.len() != agent {
                return Err(bad("agents out of order"));
            }
            slot.push(w);
            n_agents = n_agents.max(agent + 1);
        }
        if checkpoints.is_empty() {
            return Err(Error::Ingestion {
                row: 0,
                reason: "empty trace".into(),
            });
        }
        Ok(TrainTrace {
            checkpoints,
            weights,
            n_agents,
            feature_dim: dim,
            config,
        })
    }
}

struct AgentData {
    phi: DMatrix<f64>,
    y: DVector<f64>,
}

impl AgentData {
    /// One full-batch step `w - (eta/m) Phi^T (Phi w - y)`.
    fn step(&self, w: &DVector<f64>, eta: f64) -> DVector<f64> {
        let residual = &self.phi * w - &self.y;
        let grad = self.phi.transpose() * residual;
        w - grad * (eta / self.phi.nrows() as f64)
    }
}

/// Run distributed gradient descent from the zero initialization.
pub fn run_distributed(
    shards: &ShardedData,
    map: &FeatureMap,
    mixing: &MixingMatrix,
    config: &RunConfig,
) -> Result<TrainTrace> {
    let n = shards.n_agents();
    let init = vec![DVector::zeros(map.num_features()); n];
    run_distributed_with_init(init, shards, map, mixing, config)
}

/// Same recursion with caller-supplied initial weights (checkpoint index 1).
/// Used by consensus diagnostics; the standard entry point starts at zero.
pub fn run_distributed_with_init(
    init: Vec<DVector<f64>>,
    shards: &ShardedData,
    map: &FeatureMap,
    mixing: &MixingMatrix,
    config: &RunConfig,
) -> Result<TrainTrace> {
    let n = shards.n_agents();
    if n == 0 {
        return Err(Error::parameter("shards", "need at least one agent"));
    }
    if mixing.n() != n {
        return Err(Error::dimension(format!(
            "{} shards for a {}-node mixing matrix",
            n,
            mixing.n()
        )));
    }
    if init.len() != n || init.iter().any(|w| w.len() != map.num_features()) {
        return Err(Error::dimension("initial weights do not match agents/features"));
    }
    if shards.shards.iter().any(|s| s.is_empty()) {
        return Err(Error::parameter("shards", "every agent needs at least one sample"));
    }
    config.validate(map)?;

    let agents: Vec<AgentData> = shards
        .shards
        .iter()
        .map(|s| {
            Ok(AgentData {
                phi: map.apply_matrix(&s.x)?,
                y: s.y.clone(),
            })
        })
        .collect::<Result<_>>()?;

    let t_end = config.iters + 1;
    let schedule = checkpoint_schedule(t_end, config.checkpoint_every, config.max_checkpoints);
    let mut trace = TrainTrace {
        checkpoints: Vec::with_capacity(schedule.len()),
        weights: Vec::with_capacity(schedule.len()),
        n_agents: n,
        feature_dim: map.num_features(),
        config: config.clone(),
    };
    let mut next = schedule.iter().copied().peekable();

    let mut state = init;
    if next.peek() == Some(&1) {
        next.next();
        trace.checkpoints.push(1);
        trace.weights.push(state.clone());
    }
    for t in 1..=config.iters {
        // local full-batch steps; independent across agents
        let stepped: Vec<DVector<f64>> = state
            .par_iter()
            .zip_eq(agents.par_iter())
            .map(|(w, agent)| agent.step(w, config.eta))
            .collect();
        // gossip: accumulate neighbor sums in fixed agent order
        let mixed: Vec<DVector<f64>> = (0..n)
            .into_par_iter()
            .map(|v| {
                let mut acc = DVector::zeros(map.num_features());
                for (w, stepped_w) in stepped.iter().enumerate() {
                    let weight = mixing.p[(v, w)];
                    if weight != 0.0 {
                        acc.axpy(weight, stepped_w, 1.0);
                    }
                }
                acc
            })
            .collect();
        state = mixed;
        if next.peek() == Some(&(t + 1)) {
            next.next();
            trace.checkpoints.push(t + 1);
            trace.weights.push(state.clone());
        }
    }
    Ok(trace)
}

/// Full-batch gradient descent on the whole dataset (one pseudo-agent).
pub fn run_centralized(dataset: &Dataset, map: &FeatureMap, config: &RunConfig) -> Result<TrainTrace> {
    if dataset.is_empty() {
        return Err(Error::parameter("dataset", "is empty"));
    }
    config.validate(map)?;
    let agent = AgentData {
        phi: map.apply_matrix(&dataset.x)?,
        y: dataset.y.clone(),
    };
    let t_end = config.iters + 1;
    let schedule = checkpoint_schedule(t_end, config.checkpoint_every, config.max_checkpoints);
    let mut trace = TrainTrace {
        checkpoints: Vec::with_capacity(schedule.len()),
        weights: Vec::with_capacity(schedule.len()),
        n_agents: 1,
        feature_dim: map.num_features(),
        config: config.clone(),
    };
    let mut next = schedule.iter().copied().peekable();
    let mut w = DVector::zeros(map.num_features());
    if next.peek() == Some(&1) {
        next.next();
        trace.checkpoints.push(1);
        trace.weights.push(vec![w.clone()]);
    }
    for t in 1..=config.iters {
        w = agent.step(&w, config.eta);
        if next.peek() == Some(&(t + 1)) {
            next.next();
            trace.checkpoints.push(t + 1);
            trace.weights.push(vec![w.clone()]);
        }
    }
    Ok(trace)
}

/// Predictions `<weights, phi(x_i)>` for every row of `x_test`.
pub fn predict(weights: &DVector<f64>, map: &FeatureMap, x_test: &DMatrix<f64>) -> Result<DVector<f64>> {
    if weights.len() != map.num_features() {
        return Err(Error::dimension(format!(
            "{} weights for a map with {} features",
            weights.len(),
            map.num_features()
        )));
    }
    Ok(map.apply_matrix(x_test)? * weights)
}
