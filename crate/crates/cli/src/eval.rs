//! The `eval` subcommand: re-evaluate a finished run directory from its
//! stored traces and feature maps, without re-training.

use std::fs;
use std::path::Path;

use dgdrf::analysis::evaluate_trace;
use dgdrf::engine::TrainTrace;
use dgdrf::error::{Error, Result};
use dgdrf::features::FeatureMap;
use serde::Deserialize;

use crate::config::{rep_seeds, DatasetKind, ExperimentConfig};
use crate::runner::{csv_rep, engine_config, load_csv_pool, synthetic_rep};

#[derive(Deserialize)]
struct ManifestIn {
    config: ExperimentConfig,
}

pub fn run_eval(run_dir: &Path) -> Result<()> {
    let manifest_path = run_dir.join("manifest.json");
    let manifest: ManifestIn = serde_json::from_str(&fs::read_to_string(&manifest_path)?)?;
    let cfg = manifest.config;
    cfg.validate()?;

    let pool = match cfg.dataset.kind {
        DatasetKind::Csv => Some(load_csv_pool(&cfg)?),
        DatasetKind::Synthetic => None,
    };

    println!("re-evaluating {} repetitions from {}", cfg.seeds.repetitions, run_dir.display());
    for rep in 0..cfg.seeds.repetitions as u64 {
        let seeds = rep_seeds(cfg.seeds.base, rep);
        let map_path = run_dir.join(format!("featuremap_rep{rep}.json"));
        let map = FeatureMap::from_json(&fs::read_to_string(&map_path)?)?;
        let trace_path = run_dir.join(format!("trace_distributed_rep{rep}.csv"));
        let trace_file = fs::File::open(&trace_path)?;
        let trace = TrainTrace::read_csv(trace_file, engine_config(&cfg, &seeds))?;
        let data = match &pool {
            Some(pool) => csv_rep(&cfg, pool, &seeds)?,
            None => synthetic_rep(&cfg, &seeds)?,
        };
        if trace.feature_dim != map.num_features() {
            return Err(Error::dimension(format!(
                "trace has {} weights per agent, feature map has {}",
                trace.feature_dim,
                map.num_features()
            )));
        }
        let report = evaluate_trace(&trace, &map, &data.test, cfg.evaluation.metric)?;
        println!(
            "rep {rep}: {} t*={} best={:.6e} over {} checkpoints x {} agents",
            cfg.evaluation.metric.name(),
            report.t_star,
            report.best_value,
            trace.num_checkpoints(),
            trace.n_agents
        );
    }
    Ok(())
}
