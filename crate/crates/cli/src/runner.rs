//! Shared experiment machinery: data preparation, one-cell execution, and the
//! `run` command's output directory.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use dgdrf::analysis::{evaluate_trace, network_error};
use dgdrf::data::{gen_synthetic, load_csv, shard, ColumnStats, Dataset, ShardedData};
use dgdrf::engine::{run_centralized, run_distributed, RunConfig, TrainTrace};
use dgdrf::error::{Error, Result};
use dgdrf::features::{empirical_covariance, sample_feature_map, FeatureMap};
use dgdrf::theory::{self, TheoryParams};
use dgdrf::topology::{build_graph, mixing_matrix, GraphParams, MixingMatrix};
use nalgebra::DVector;
use rand::{Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{rep_seeds, DatasetKind, ExperimentConfig, RepSeeds};

/// Training shards plus the test set for one repetition.
pub struct PreparedData {
    pub sharded: ShardedData,
    pub test: Dataset,
}

/// Source rows a CSV run draws from, loaded once per process.
pub struct CsvPool {
    pub train_pool: Dataset,
    pub test: Dataset,
    pub standardization: Option<Vec<ColumnStats>>,
}

pub fn load_csv_pool(cfg: &ExperimentConfig) -> Result<CsvPool> {
    let d = &cfg.dataset;
    let path = d.path.as_ref().expect("validated");
    let full = load_csv(
        path,
        d.label_column,
        d.feature_columns.as_deref(),
        d.limit,
        d.has_header,
        d.delimiter.as_bytes()[0],
    )?;
    let test_size = cfg.evaluation.test_size;
    if full.len() <= test_size {
        return Err(Error::config(
            "dataset.path",
            format!(
                "{} rows loaded, but the test split alone needs {}",
                full.len(),
                test_size
            ),
        ));
    }
    // held-out test split first, training pool after it
    let test_raw = Dataset {
        x: full.x.rows(0, test_size).into_owned(),
        y: full.y.rows(0, test_size).into_owned(),
        ground_truth: None,
    };
    let train_raw = Dataset {
        x: full.x.rows(test_size, full.len() - test_size).into_owned(),
        y: full.y.rows(test_size, full.len() - test_size).into_owned(),
        ground_truth: None,
    };
    if d.standardize {
        let (train_pool, stats) = train_raw.standardize();
        let test = test_raw.standardize_with(&stats)?;
        Ok(CsvPool {
            train_pool,
            test,
            standardization: Some(stats),
        })
    } else {
        Ok(CsvPool {
            train_pool: train_raw,
            test: test_raw,
            standardization: None,
        })
    }
}

/// Draw the planted synthetic task for one repetition: fresh target map,
/// unit-normal target weights, a noisy training draw, a noiseless test draw.
pub fn synthetic_rep(cfg: &ExperimentConfig, seeds: &RepSeeds) -> Result<PreparedData> {
    let d = &cfg.dataset;
    let target = sample_feature_map(
        cfg.features.kind,
        d.dim,
        d.target_features,
        cfg.features.xi,
        seeds.target,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seeds.target ^ 0x5EED);
    let w_star = DVector::from_fn(d.target_features, |_, _| rng.sample(rand_distr::StandardNormal));
    let n_train = cfg.topology.n * cfg.run.samples_per_agent;
    let train = gen_synthetic(n_train, d.dim, &target, &w_star, d.noise_sigma, seeds.data)?;
    let test = gen_synthetic(cfg.evaluation.test_size, d.dim, &target, &w_star, 0.0, seeds.test)?;
    let sharded = shard(&train, cfg.topology.n, cfg.run.samples_per_agent, seeds.shard)?;
    Ok(PreparedData { sharded, test })
}

pub fn csv_rep(cfg: &ExperimentConfig, pool: &CsvPool, seeds: &RepSeeds) -> Result<PreparedData> {
    let sharded = shard(
        &pool.train_pool,
        cfg.topology.n,
        cfg.run.samples_per_agent,
        seeds.shard,
    )?;
    Ok(PreparedData {
        sharded,
        test: pool.test.clone(),
    })
}

pub fn build_mixing(cfg: &ExperimentConfig, graph_seed: u64) -> Result<MixingMatrix> {
    let params = GraphParams {
        degree: cfg.topology.degree,
        seed: graph_seed,
        toroidal: cfg.topology.toroidal,
    };
    let graph = build_graph(cfg.topology.kind, cfg.topology.n, &params)?;
    mixing_matrix(&graph, cfg.topology.scheme)
}

pub fn learner_map(cfg: &ExperimentConfig, input_dim: usize, seed: u64) -> Result<FeatureMap> {
    Ok(sample_feature_map(
        cfg.features.kind,
        input_dim,
        cfg.features.num_features,
        cfg.features.xi,
        seed,
    )?
    .with_legacy_scaling(cfg.features.legacy_experiment_scaling))
}

pub fn engine_config(cfg: &ExperimentConfig, seeds: &RepSeeds) -> RunConfig {
    RunConfig {
        eta: cfg.run.eta,
        iters: cfg.run.iters,
        checkpoint_every: cfg.run.checkpoint_every,
        max_checkpoints: cfg.run.max_checkpoints,
        allow_large_step: cfg.run.allow_large_step,
        seeds: seeds.bundle(),
    }
}

/// Everything one repetition produced.
pub struct RepOutcome {
    pub map: FeatureMap,
    pub distributed: TrainTrace,
    pub centralized: Option<TrainTrace>,
    pub report: dgdrf::analysis::EvalReport,
    pub central_report: Option<dgdrf::analysis::EvalReport>,
    pub network_error_mean: Option<f64>,
}

pub fn run_rep(
    cfg: &ExperimentConfig,
    mixing: &MixingMatrix,
    data: &PreparedData,
    seeds: &RepSeeds,
) -> Result<RepOutcome> {
    let map = learner_map(cfg, data.test.dim(), seeds.feature)?;
    let engine_cfg = engine_config(cfg, seeds);
    let distributed = run_distributed(&data.sharded, &map, mixing, &engine_cfg)?;
    let report = evaluate_trace(&distributed, &map, &data.test, cfg.evaluation.metric)?;

    let mut centralized = None;
    let mut central_report = None;
    let mut network_error_mean = None;
    if cfg.run.centralized_baseline {
        let pooled = data.sharded.pooled_dataset();
        let trace = run_centralized(&pooled, &map, &engine_cfg)?;
        central_report = Some(evaluate_trace(&trace, &map, &data.test, cfg.evaluation.metric)?);
        let c_hat = empirical_covariance(&map, &pooled.x)?;
        network_error_mean = Some(network_error(&distributed, &trace, &c_hat)?.time_mean());
        centralized = Some(trace);
    }
    Ok(RepOutcome {
        map,
        distributed,
        centralized,
        report,
        central_report,
        network_error_mean,
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    config_hash: String,
    tool_version: &'a str,
    config: &'a ExperimentConfig,
    sigma2: f64,
    inverse_spectral_gap: f64,
    seeds: Vec<RepSeeds>,
    standardization: Option<&'a Vec<ColumnStats>>,
    files: Vec<String>,
}

#[derive(Serialize)]
struct SummaryFile {
    config_hash: String,
    metric: &'static str,
    reps: Vec<RepSummary>,
}

#[derive(Serialize)]
struct RepSummary {
    rep: u64,
    t_star: usize,
    best_value: f64,
    centralized_t_star: Option<usize>,
    centralized_best_value: Option<f64>,
    network_error_time_mean: Option<f64>,
}

#[derive(Serialize)]
struct PrescriptionFile {
    sigma2: f64,
    basic: dgdrf::theory::Prescription,
    refined_default: dgdrf::theory::Prescription,
    leading_terms: dgdrf::theory::TermBreakdown,
    t_mix_used: u64,
}

/// Execute the full `run` command into `out_dir`; returns the paths written.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let base = cfg.seeds.base;
    let graph_seed = rep_seeds(base, 0).graph;
    let mixing = build_mixing(cfg, graph_seed)?;

    let csv_pool = match cfg.dataset.kind {
        DatasetKind::Csv => Some(load_csv_pool(cfg)?),
        DatasetKind::Synthetic => None,
    };

    let mut files = Vec::new();
    let mut metrics = csv_writer(out_dir.join("metrics.csv"), &mut files)?;
    writeln!(metrics, "rep,run,t,agent,metric,value")?;
    let mut summaries = Vec::new();
    let mut seed_table = Vec::new();

    for rep in 0..cfg.seeds.repetitions as u64 {
        let seeds = rep_seeds(base, rep);
        seed_table.push(seeds);
        let data = match &csv_pool {
            Some(pool) => csv_rep(cfg, pool, &seeds)?,
            None => synthetic_rep(cfg, &seeds)?,
        };
        let outcome = run_rep(cfg, &mixing, &data, &seeds)?;

        for row in &outcome.report.rows {
            writeln!(
                metrics,
                "{rep},distributed,{},{},{},{}",
                row.t,
                row.agent,
                cfg.evaluation.metric.name(),
                row.value
            )?;
        }
        if let Some(central) = &outcome.central_report {
            for row in &central.rows {
                writeln!(
                    metrics,
                    "{rep},centralized,{},{},{},{}",
                    row.t,
                    row.agent,
                    cfg.evaluation.metric.name(),
                    row.value
                )?;
            }
        }

        write_file(
            out_dir.join(format!("featuremap_rep{rep}.json")),
            outcome.map.to_json()?.as_bytes(),
            &mut files,
        )?;
        let mut trace_buf = Vec::new();
        outcome.distributed.write_csv(&mut trace_buf)?;
        write_file(
            out_dir.join(format!("trace_distributed_rep{rep}.csv")),
            &trace_buf,
            &mut files,
        )?;
        if let Some(central) = &outcome.centralized {
            let mut buf = Vec::new();
            central.write_csv(&mut buf)?;
            write_file(out_dir.join(format!("trace_centralized_rep{rep}.csv")), &buf, &mut files)?;
        }

        summaries.push(RepSummary {
            rep,
            t_star: outcome.report.t_star,
            best_value: outcome.report.best_value,
            centralized_t_star: outcome.central_report.as_ref().map(|r| r.t_star),
            centralized_best_value: outcome.central_report.as_ref().map(|r| r.best_value),
            network_error_time_mean: outcome.network_error_mean,
        });
    }
    metrics.flush()?;

    // theory side-car: prescriptions and leading-order terms at this
    // operating point
    let (n, m) = (cfg.topology.n as u64, cfg.run.samples_per_agent as u64);
    let params = TheoryParams {
        eta: cfg.run.eta,
        ..TheoryParams::default()
    };
    let t_mix = theory::default_t_mix(n, m, cfg.run.iters as u64, mixing.sigma2)?;
    let prescriptions = PrescriptionFile {
        sigma2: mixing.sigma2,
        basic: theory::prescribe_basic(n, m, mixing.sigma2)?,
        refined_default: theory::prescribe_refined(n, m, mixing.sigma2, &params)?,
        leading_terms: theory::leading_terms(
            n,
            m,
            cfg.features.num_features as u64,
            mixing.sigma2,
            cfg.run.iters.max(1) as u64,
            t_mix,
            &params,
        )?,
        t_mix_used: t_mix,
    };
    write_file(
        out_dir.join("prescription.json"),
        serde_json::to_string_pretty(&prescriptions)?.as_bytes(),
        &mut files,
    )?;
    let summary_file = SummaryFile {
        config_hash: cfg.hash(),
        metric: cfg.evaluation.metric.name(),
        reps: summaries,
    };
    write_file(
        out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary_file)?.as_bytes(),
        &mut files,
    )?;

    let edge_path = out_dir.join("graph_edges.csv");
    let mut edge_buf = Vec::new();
    mixing.graph.write_edge_csv(&mut edge_buf)?;
    write_file(edge_path, &edge_buf, &mut files)?;
    let mut p_buf = Vec::new();
    mixing.write_matrix_csv(&mut p_buf)?;
    write_file(out_dir.join("mixing_matrix.csv"), &p_buf, &mut files)?;

    let manifest = Manifest {
        config_hash: cfg.hash(),
        tool_version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        sigma2: mixing.sigma2,
        inverse_spectral_gap: mixing.inverse_gap(),
        seeds: seed_table,
        standardization: csv_pool.as_ref().and_then(|p| p.standardization.as_ref()),
        files: files.iter().map(|p| file_name(p)).collect(),
    };
    let manifest_path = out_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    files.push(manifest_path);
    Ok(files)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn csv_writer(path: PathBuf, files: &mut Vec<PathBuf>) -> Result<std::io::BufWriter<fs::File>> {
    let writer = std::io::BufWriter::new(fs::File::create(&path)?);
    files.push(path);
    Ok(writer)
}

fn write_file(path: PathBuf, bytes: &[u8], files: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, bytes)?;
    files.push(path);
    Ok(())
}
