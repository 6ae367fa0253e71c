//! Synthetic data generation, CSV ingestion, and i.i.d. sharding across
//! agents.
//!
//! Synthetic responses are planted inside the span of a known feature map, so
//! the best-in-class predictor is available exactly and excess risk can be
//! measured against noiseless targets on held-out draws. Covariates are
//! uniform on `[-1, 1]^D`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMap;

/// The planted model behind a synthetic dataset.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub map: FeatureMap,
    pub weights: DVector<f64>,
    pub noise_sigma: f64,
    /// Noiseless targets for the stored covariates.
    pub noiseless: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    /// Covariates, one sample per row (`N x D`).
    pub x: DMatrix<f64>,
    /// Responses; `{0, 1}`-valued for classification tasks.
    pub y: DVector<f64>,
    pub ground_truth: Option<GroundTruth>,
}

/// Per-column standardization parameters fitted on a training split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    pub std: f64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    /// Fit per-feature mean/std on this dataset and return both the fitted
    /// stats and the standardized copy. Constant columns are left unscaled.
    pub fn standardize(&self) -> (Dataset, Vec<ColumnStats>) {
        let n = self.len() as f64;
        let mut stats = Vec::with_capacity(self.dim());
        let mut x = self.x.clone();
        for j in 0..self.dim() {
            let col = self.x.column(j);
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let std = if var > 0.0 { var.sqrt() } else { 1.0 };
            for i in 0..self.len() {
                x[(i, j)] = (self.x[(i, j)] - mean) / std;
            }
            stats.push(ColumnStats { mean, std });
        }
        (
            Dataset {
                x,
                y: self.y.clone(),
                ground_truth: None,
            },
            stats,
        )
    }

    /// Apply previously fitted stats (e.g. to a test split).
    pub fn standardize_with(&self, stats: &[ColumnStats]) -> Result<Dataset> {
        if stats.len() != self.dim() {
            return Err(Error::dimension(format!(
                "{} column stats for {} columns",
                stats.len(),
                self.dim()
            )));
        }
        let mut x = self.x.clone();
        for j in 0..self.dim() {
            for i in 0..self.len() {
                x[(i, j)] = (self.x[(i, j)] - stats[j].mean) / stats[j].std;
            }
        }
        Ok(Dataset {
            x,
            y: self.y.clone(),
            ground_truth: None,
        })
    }

    /// Snapshot as CSV (`y` first, then features) for audit.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = std::iter::once("y".to_string())
            .chain((0..self.dim()).map(|j| format!("x{j}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.len() {
            let mut row = vec![format!("{}", self.y[i])];
            row.extend((0..self.dim()).map(|j| format!("{}", self.x[(i, j)])));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Draw `n` covariates uniform on `[-1,1]^D`, plant responses
/// `y_i = <weights, phi(x_i)> + N(0, noise_sigma^2)`, and record the truth.
pub fn gen_synthetic(
    n: usize,
    dim: usize,
    target_map: &FeatureMap,
    target_weights: &DVector<f64>,
    noise_sigma: f64,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::parameter("n", "needs at least one sample"));
    }
    if dim != target_map.input_dim() {
        return Err(Error::dimension(format!(
            "dim {} does not match the target map input dimension {}",
            dim,
            target_map.input_dim()
        )));
    }
    if target_weights.len() != target_map.num_features() {
        return Err(Error::dimension(format!(
            "{} target weights for a map with {} features",
            target_weights.len(),
            target_map.num_features()
        )));
    }
    if noise_sigma < 0.0 {
        return Err(Error::parameter("noise_sigma", "must be nonnegative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(n, dim, |_, _| rng.random_range(-1.0..1.0));
    let noiseless = target_map.apply_matrix(&x)? * target_weights;
    let mut y = noiseless.clone();
    if noise_sigma > 0.0 {
        for i in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            y[i] += noise_sigma * z;
        }
    }
    Ok(Dataset {
        x,
        y,
        ground_truth: Some(GroundTruth {
            map: target_map.clone(),
            weights: target_weights.clone(),
            noise_sigma,
            noiseless,
        }),
    })
}

/// Load a delimited file into a dataset. `label_column` picks the response;
/// `feature_columns` defaults to every other column. Rows are kept in file
/// order; parsing stops after `limit` rows when given.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: usize,
    feature_columns: Option<&[usize]>,
    limit: Option<usize>,
    has_header: bool,
    delimiter: u8,
) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .delimiter(delimiter)
        .flexible(false)
        .from_path(path.as_ref())?;

    let mut ys = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let row_no = idx + 1;
        if let Some(limit) = limit {
            if ys.len() >= limit {
                break;
            }
        }
        let record = record.map_err(|e| Error::Ingestion {
            row: row_no,
            reason: e.to_string(),
        })?;
        if label_column >= record.len() {
            return Err(Error::Ingestion {
                row: row_no,
                reason: format!(
                    "label column {label_column} out of range for {} fields",
                    record.len()
                ),
            });
        }
        let parse = |col: usize| -> Result<f64> {
            let raw = record.get(col).ok_or_else(|| Error::Ingestion {
                row: row_no,
                reason: format!("missing column {col}"),
            })?;
            let v: f64 = raw.trim().parse().map_err(|_| Error::Ingestion {
                row: row_no,
                reason: format!("cannot parse `{raw}` in column {col}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Ingestion {
                    row: row_no,
                    reason: format!("non-finite value in column {col}"),
                });
            }
            Ok(v)
        };
        ys.push(parse(label_column)?);
        let cols: Vec<usize> = match feature_columns {
            Some(cols) => cols.to_vec(),
            None => (0..record.len()).filter(|&c| c != label_column).collect(),
        };
        match width {
            None => width = Some(cols.len()),
            Some(w) if w != cols.len() => {
                return Err(Error::Ingestion {
                    row: row_no,
                    reason: format!("expected {w} features, found {}", cols.len()),
                });
            }
            _ => {}
        }
        let mut row = Vec::with_capacity(cols.len());
        for c in cols {
            row.push(parse(c)?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parameter("path", "no data rows"));
    }
    let dim = width.unwrap_or(0);
    let x = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    Ok(Dataset {
        x,
        y: DVector::from_vec(ys),
        ground_truth: None,
    })
}

/// One agent's slice of a dataset.
#[derive(Debug, Clone)]
pub struct AgentShard {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    /// Row indices into the source dataset, for provenance.
    pub indices: Vec<usize>,
}

impl AgentShard {
    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A dataset split uniformly at random into `n` disjoint shards of `m` points.
#[derive(Debug, Clone)]
pub struct ShardedData {
    pub shards: Vec<AgentShard>,
    pub permutation_seed: u64,
}

impl ShardedData {
    pub fn n_agents(&self) -> usize {
        self.shards.len()
    }

    pub fn samples_per_agent(&self) -> usize {
        self.shards.first().map_or(0, AgentShard::len)
    }

    /// All sharded points concatenated in agent order, as one dataset.
    pub fn pooled_dataset(&self) -> Dataset {
        let total: usize = self.shards.iter().map(AgentShard::len).sum();
        let dim = self.shards.first().map_or(0, |s| s.x.ncols());
        let mut x = DMatrix::zeros(total, dim);
        let mut y = DVector::zeros(total);
        let mut at = 0;
        for shard in &self.shards {
            for i in 0..shard.len() {
                x.set_row(at, &shard.x.row(i));
                y[at] = shard.y[i];
                at += 1;
            }
        }
        Dataset {
            x,
            y,
            ground_truth: None,
        }
    }
}

/// Permute the dataset uniformly at random and split the first `n*m` points
/// into `n` blocks of `m`.
pub fn shard(dataset: &Dataset, n: usize, m: usize, seed: u64) -> Result<ShardedData> {
    if n == 0 || m == 0 {
        return Err(Error::parameter("n,m", "need at least one agent and one sample"));
    }
    if n * m > dataset.len() {
        return Err(Error::parameter(
            "n*m",
            format!("{} samples requested, dataset has {}", n * m, dataset.len()),
        ));
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Fisher-Yates
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut shards = Vec::with_capacity(n);
    for block in 0..n {
        let indices: Vec<usize> = order[block * m..(block + 1) * m].to_vec();
        let mut x = DMatrix::zeros(m, dataset.dim());
        let mut y = DVector::zeros(m);
        for (i, &src) in indices.iter().enumerate() {
            x.set_row(i, &dataset.x.row(src));
            y[i] = dataset.y[src];
        }
        shards.push(AgentShard { x, y, indices });
    }
    Ok(ShardedData {
        shards,
        permutation_seed: seed,
    })
}
