//! Experiment configuration: a nested TOML file covering dataset, topology,
//! features, run, evaluation, seeds and output, plus optional sweep axes.
//!
//! Any run is reproducible from its config and base seed alone; per-repetition
//! seeds are derived deterministically with a splitmix-style hash.

use std::path::PathBuf;

use dgdrf::analysis::Metric;
use dgdrf::engine::SeedBundle;
use dgdrf::error::Error;
use dgdrf::features::FeatureKind;
use dgdrf::topology::{GraphKind, MixingScheme};
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Synthetic,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub kind: DatasetKind,
    /// Covariate dimension (synthetic).
    pub dim: usize,
    pub noise_sigma: f64,
    /// Feature count of the planted target map (synthetic).
    pub target_features: usize,
    /// Source file (csv).
    pub path: Option<PathBuf>,
    pub label_column: usize,
    pub feature_columns: Option<Vec<usize>>,
    pub limit: Option<usize>,
    pub has_header: bool,
    /// Field delimiter (csv); a single character.
    pub delimiter: String,
    /// Standardize features per column, fitted on the training split (csv).
    pub standardize: bool,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            kind: DatasetKind::Synthetic,
            dim: 3,
            noise_sigma: 0.3,
            target_features: 16,
            path: None,
            label_column: 0,
            feature_columns: None,
            limit: None,
            has_header: false,
            delimiter: ",".into(),
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    pub kind: GraphKind,
    pub n: usize,
    pub scheme: MixingScheme,
    /// Expander degree.
    pub degree: usize,
    /// Wrap-around grid edges.
    pub toroidal: bool,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            kind: GraphKind::Cycle,
            n: 8,
            scheme: MixingScheme::LazyUniform,
            degree: 6,
            toroidal: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesConfig {
    pub kind: FeatureKind,
    pub num_features: usize,
    /// Bandwidth multiplier; the experimental default is 10^(-1/2).
    pub xi: f64,
    /// Drop the sqrt(2) cosine normalization (amplitude bound 1, so a unit
    /// step size becomes admissible).
    pub legacy_experiment_scaling: bool,
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        FeaturesConfig {
            kind: FeatureKind::GaussianRff,
            num_features: 64,
            xi: 0.31622776601683794,
            legacy_experiment_scaling: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub eta: f64,
    pub iters: usize,
    /// Samples per agent (m).
    pub samples_per_agent: usize,
    pub checkpoint_every: Option<usize>,
    pub max_checkpoints: usize,
    pub allow_large_step: bool,
    /// Also run pooled single-machine descent on the same samples.
    pub centralized_baseline: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            eta: 0.5,
            iters: 256,
            samples_per_agent: 64,
            checkpoint_every: None,
            max_checkpoints: 512,
            allow_large_step: false,
            centralized_baseline: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub metric: Metric,
    pub test_size: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            metric: Metric::ExcessRisk,
            test_size: 2048,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedsConfig {
    pub base: u64,
    pub repetitions: usize,
}

impl Default for SeedsConfig {
    fn default() -> Self {
        SeedsConfig {
            base: 0,
            repetitions: 5,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

/// Optional sweep axes; absent axes fall back to the base value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub num_features: Option<Vec<usize>>,
    pub samples_per_agent: Option<Vec<usize>>,
    pub n: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub topology: TopologyConfig,
    pub features: FeaturesConfig,
    pub run: RunSection,
    pub evaluation: EvalConfig,
    pub seeds: SeedsConfig,
    pub output: OutputConfig,
    pub sweep: SweepConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<ExperimentConfig, Error> {
        toml::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn to_canonical_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Stable hex digest of the canonical form, used to stamp run manifests.
    /// The output directory is excluded: it relocates results without
    /// changing what was computed.
    pub fn hash(&self) -> String {
        let mut scientific = self.clone();
        scientific.output = OutputConfig::default();
        let digest = Sha256::digest(scientific.to_canonical_toml().as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }

    /// Cross-field consistency checks; errors name the offending field.
    pub fn validate(&self) -> Result<(), Error> {
        let t = &self.topology;
        if t.n == 0 {
            return Err(Error::config("topology.n", "need at least one agent"));
        }
        if t.kind == GraphKind::Grid {
            let k = (t.n as f64).sqrt().round() as usize;
            if k < 2 || k * k != t.n {
                return Err(Error::config(
                    "topology.n",
                    format!("grid needs a perfect square >= 4, got {}", t.n),
                ));
            }
        }
        if t.kind == GraphKind::Expander {
            if t.degree == 0 || t.degree >= t.n {
                return Err(Error::config("topology.degree", "need 0 < degree < n"));
            }
            if !(t.degree * t.n).is_multiple_of(2) {
                return Err(Error::config("topology.degree", "n * degree must be even"));
            }
        }

        let f = &self.features;
        if f.num_features == 0 {
            return Err(Error::config("features.num_features", "must be positive"));
        }
        if !(f.xi > 0.0) {
            return Err(Error::config("features.xi", "must be positive"));
        }

        let d = &self.dataset;
        match d.kind {
            DatasetKind::Synthetic => {
                if d.dim == 0 {
                    return Err(Error::config("dataset.dim", "must be positive"));
                }
                if d.target_features == 0 {
                    return Err(Error::config("dataset.target_features", "must be positive"));
                }
                if d.noise_sigma < 0.0 {
                    return Err(Error::config("dataset.noise_sigma", "must be nonnegative"));
                }
            }
            DatasetKind::Csv => {
                if d.path.is_none() {
                    return Err(Error::config("dataset.path", "csv datasets need a path"));
                }
                if d.delimiter.len() != 1 {
                    return Err(Error::config("dataset.delimiter", "must be a single character"));
                }
                if self.evaluation.metric == Metric::ExcessRisk {
                    return Err(Error::config(
                        "evaluation.metric",
                        "excess_risk needs planted ground truth; csv data supports classification_error or mse",
                    ));
                }
            }
        }

        let r = &self.run;
        if !(r.eta > 0.0) {
            return Err(Error::config("run.eta", "must be positive"));
        }
        if r.samples_per_agent == 0 {
            return Err(Error::config("run.samples_per_agent", "must be positive"));
        }
        if let Some(kappa) = kappa_for(f) {
            if r.eta * kappa * kappa > 1.0 + 1e-12 && !r.allow_large_step {
                return Err(Error::config(
                    "run.eta",
                    format!(
                        "eta * kappa^2 = {} exceeds 1; lower eta, enable legacy scaling, or set allow_large_step",
                        r.eta * kappa * kappa
                    ),
                ));
            }
        }
        if self.evaluation.test_size == 0 {
            return Err(Error::config("evaluation.test_size", "must be positive"));
        }
        if self.seeds.repetitions == 0 {
            return Err(Error::config("seeds.repetitions", "must be positive"));
        }
        if t.scheme == MixingScheme::LazyUniform {
            let regular = match t.kind {
                GraphKind::Cycle | GraphKind::Complete | GraphKind::Expander => true,
                GraphKind::Grid => t.toroidal,
                GraphKind::Custom => false,
            };
            if !regular {
                return Err(Error::config(
                    "topology.scheme",
                    "lazy_uniform needs a regular graph; use metropolis",
                ));
            }
        }
        Ok(())
    }
}

fn kappa_for(f: &FeaturesConfig) -> Option<f64> {
    match f.kind {
        FeatureKind::GaussianRff => Some(if f.legacy_experiment_scaling {
            1.0
        } else {
            std::f64::consts::SQRT_2
        }),
        FeatureKind::LinearSketch => None,
    }
}

/// Seed slots one repetition draws from.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RepSeeds {
    pub target: u64,
    pub data: u64,
    pub shard: u64,
    pub feature: u64,
    pub test: u64,
    pub graph: u64,
}

impl RepSeeds {
    pub fn bundle(&self) -> SeedBundle {
        SeedBundle {
            feature: self.feature,
            shard: self.shard,
            noise: self.data,
        }
    }
}

fn mix64(base: u64, rep: u64, slot: u64) -> u64 {
    let mut z = base
        ^ rep.wrapping_mul(0xA076_1D64_78BD_642F)
        ^ slot.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rep_seeds(base: u64, rep: u64) -> RepSeeds {
    RepSeeds {
        target: mix64(base, rep, 1),
        data: mix64(base, rep, 2),
        shard: mix64(base, rep, 3),
        feature: mix64(base, rep, 4),
        test: mix64(base, rep, 5),
        graph: mix64(base, 0, 6), // one graph per run, shared by repetitions
    }
}
