//! Figure sweeps: tidy CSV tables (per-seed rows retained) plus gnuplot
//! script stubs. Desk scale runs synthetic planted data in minutes with no
//! external inputs; paper scale is a best-effort variant over a user-supplied
//! CSV and is labeled as such in the output.

use std::fs;

use dgdrf::analysis::{optimal_stopping, Metric};
use dgdrf::error::{Error, Result};
use dgdrf::topology::GraphKind;
use rayon::prelude::*;

use crate::config::{DatasetKind, ExperimentConfig};
use crate::runner::{
    build_mixing, csv_rep, engine_config, learner_map, load_csv_pool, run_rep, synthetic_rep,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Error against the number of random features at fixed nm.
    Fig1,
    /// Error against total samples nm at fixed features.
    Fig2,
    /// Optimal stopping time against total samples nm.
    Fig3,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Desk,
    Paper,
}

/// Knobs a figure run can override from the command line.
#[derive(Debug, Clone)]
pub struct FigureOptions {
    pub scale: Scale,
    pub out_dir: std::path::PathBuf,
    pub base_seed: u64,
    pub reps: Option<usize>,
    pub nm: Option<usize>,
    pub iters: Option<usize>,
    pub test_size: Option<usize>,
    pub n_values: Option<Vec<usize>>,
    pub m_values: Option<Vec<usize>>,
    pub nm_values: Option<Vec<usize>>,
    pub csv_path: Option<std::path::PathBuf>,
    pub label_column: usize,
    pub has_header: bool,
}

struct Cell {
    topology: Option<(GraphKind, usize)>, // None = pooled single machine
    nm: usize,
    num_features: usize,
    iters: usize,
    rep: u64,
}

struct CellRow {
    topology: String,
    n: usize,
    nm: usize,
    num_features: usize,
    rep: u64,
    t_star: usize,
    best_value: f64,
    sigma2: f64,
}

fn base_config(opts: &FigureOptions) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    cfg.seeds.base = opts.base_seed;
    match opts.scale {
        Scale::Desk => {
            cfg.evaluation.metric = Metric::ExcessRisk;
            cfg.evaluation.test_size = opts.test_size.unwrap_or(2048);
        }
        Scale::Paper => {
            let path = opts.csv_path.clone().ok_or_else(|| {
                Error::config("dataset.path", "paper scale needs --csv pointing at the dataset")
            })?;
            cfg.dataset.kind = DatasetKind::Csv;
            cfg.dataset.path = Some(path);
            cfg.dataset.label_column = opts.label_column;
            cfg.dataset.has_header = opts.has_header;
            cfg.evaluation.metric = Metric::ClassificationError;
            cfg.evaluation.test_size = opts.test_size.unwrap_or(10_000);
        }
    }
    Ok(cfg)
}

fn run_cell(
    base: &ExperimentConfig,
    pool: Option<&crate::runner::CsvPool>,
    cell: &Cell,
) -> Result<CellRow> {
    let mut cfg = base.clone();
    cfg.features.num_features = cell.num_features;
    cfg.run.iters = cell.iters;
    let seeds = crate::config::rep_seeds(cfg.seeds.base, cell.rep);
    match cell.topology {
        Some((kind, n)) => {
            cfg.topology.kind = kind;
            cfg.topology.n = n;
            cfg.topology.scheme = match kind {
                GraphKind::Grid => dgdrf::topology::MixingScheme::Metropolis,
                _ => dgdrf::topology::MixingScheme::LazyUniform,
            };
            cfg.run.samples_per_agent = (cell.nm / n).max(1);
            cfg.run.centralized_baseline = false;
            let mixing = build_mixing(&cfg, seeds.graph)?;
            let data = match pool {
                Some(pool) => csv_rep(&cfg, pool, &seeds)?,
                None => synthetic_rep(&cfg, &seeds)?,
            };
            let outcome = run_rep(&cfg, &mixing, &data, &seeds)?;
            Ok(CellRow {
                topology: format!("{:?}", kind).to_lowercase(),
                n,
                nm: cfg.run.samples_per_agent * n,
                num_features: cell.num_features,
                rep: cell.rep,
                t_star: outcome.report.t_star,
                best_value: outcome.report.best_value,
                sigma2: mixing.sigma2,
            })
        }
        None => {
            // pooled single machine on the same nm samples
            cfg.topology.kind = GraphKind::Complete;
            cfg.topology.n = 1;
            cfg.run.samples_per_agent = cell.nm;
            cfg.run.centralized_baseline = false;
            let data = match pool {
                Some(pool) => csv_rep(&cfg, pool, &seeds)?,
                None => synthetic_rep(&cfg, &seeds)?,
            };
            let map = learner_map(&cfg, data.test.dim(), seeds.feature)?;
            let engine_cfg = engine_config(&cfg, &seeds);
            let pooled = data.sharded.pooled_dataset();
            let trace = dgdrf::engine::run_centralized(&pooled, &map, &engine_cfg)?;
            let (t_star, best_value) =
                optimal_stopping(&trace, &map, &data.test, cfg.evaluation.metric)?;
            Ok(CellRow {
                topology: "single_machine".into(),
                n: 1,
                nm: cell.nm,
                num_features: cell.num_features,
                rep: cell.rep,
                t_star,
                best_value,
                sigma2: 0.0,
            })
        }
    }
}

fn is_square(n: usize) -> bool {
    let k = (n as f64).sqrt().round() as usize;
    k >= 2 && k * k == n
}

pub fn run_figure(figure: Figure, opts: &FigureOptions) -> Result<Vec<std::path::PathBuf>> {
    let base = base_config(opts)?;
    let pool = match opts.scale {
        Scale::Paper => Some(load_csv_pool(&base)?),
        Scale::Desk => None,
    };
    let reps = opts.reps.unwrap_or(5) as u64;
    let mut cells = Vec::new();
    match figure {
        Figure::Fig1 => {
            let nm = opts.nm.unwrap_or(1024);
            let iters = opts.iters.unwrap_or(nm);
            let n_values = opts.n_values.clone().unwrap_or_else(|| vec![9, 25]);
            let m_values = opts.m_values.clone().unwrap_or_else(|| {
                let root = (nm as f64).sqrt();
                [0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
                    .iter()
                    .map(|f| ((f * root).round() as usize).max(2))
                    .collect()
            });
            for &kind in &[GraphKind::Cycle, GraphKind::Grid] {
                for &n in &n_values {
                    if kind == GraphKind::Grid && !is_square(n) {
                        continue;
                    }
                    for &m_features in &m_values {
                        for rep in 0..reps {
                            cells.push(Cell {
                                topology: Some((kind, n)),
                                nm,
                                num_features: m_features,
                                iters,
                                rep,
                            });
                        }
                    }
                }
            }
            // single-machine reference at the same nm
            for &m_features in &m_values {
                for rep in 0..reps {
                    cells.push(Cell {
                        topology: None,
                        nm,
                        num_features: m_features,
                        iters,
                        rep,
                    });
                }
            }
        }
        Figure::Fig2 | Figure::Fig3 => {
            let nm_values = opts
                .nm_values
                .clone()
                .unwrap_or_else(|| vec![128, 256, 512, 1024, 2048, 4096, 8192]);
            let num_features = opts
                .m_values
                .as_ref()
                .and_then(|v| v.first().copied())
                .unwrap_or(64);
            let iters = opts.iters.unwrap_or(1024);
            let n_values = opts.n_values.clone().unwrap_or_else(|| vec![16]);
            for &nm in &nm_values {
                for &kind in &[GraphKind::Cycle, GraphKind::Grid] {
                    for &n in &n_values {
                        if nm / n == 0 || (kind == GraphKind::Grid && !is_square(n)) {
                            continue;
                        }
                        for rep in 0..reps {
                            cells.push(Cell {
                                topology: Some((kind, n)),
                                nm,
                                num_features,
                                iters,
                                rep,
                            });
                        }
                    }
                }
                for rep in 0..reps {
                    cells.push(Cell {
                        topology: None,
                        nm,
                        num_features,
                        iters,
                        rep,
                    });
                }
            }
        }
    }

    // cells are independent and deterministic; run them in parallel
    let rows: Result<Vec<CellRow>> =
        cells.par_iter().map(|c| run_cell(&base, pool.as_ref(), c)).collect();
    let mut rows = rows?;
    rows.sort_by(|a, b| {
        (a.topology.as_str(), a.n, a.nm, a.num_features, a.rep).cmp(&(
            b.topology.as_str(),
            b.n,
            b.nm,
            b.num_features,
            b.rep,
        ))
    });

    fs::create_dir_all(&opts.out_dir)?;
    let mut written = Vec::new();
    let csv_path = opts.out_dir.join(format!("{}.csv", figure.name()));
    let mut out = String::new();
    out.push_str("figure,scale,topology,n,nm,num_features,rep,metric,t_star,best_value,sigma2\n");
    let scale = match opts.scale {
        Scale::Desk => "desk",
        Scale::Paper => "paper_best_effort",
    };
    for r in &rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            figure.name(),
            scale,
            r.topology,
            r.n,
            r.nm,
            r.num_features,
            r.rep,
            base.evaluation.metric.name(),
            r.t_star,
            r.best_value,
            r.sigma2
        ));
    }
    fs::write(&csv_path, out)?;
    written.push(csv_path);

    let gp_path = opts.out_dir.join(format!("{}.gp", figure.name()));
    fs::write(&gp_path, gnuplot_stub(figure, opts, &base))?;
    written.push(gp_path);
    Ok(written)
}

fn gnuplot_stub(figure: Figure, opts: &FigureOptions, base: &ExperimentConfig) -> String {
    let metric = base.evaluation.metric.name();
    let name = figure.name();
    let (xlabel, xcol, vline) = match figure {
        Figure::Fig1 => {
            let nm = opts.nm.unwrap_or(1024) as f64;
            ("random features M", 6, Some(nm.sqrt()))
        }
        Figure::Fig2 | Figure::Fig3 => ("total samples nm", 5, None),
    };
    let ycol = if figure == Figure::Fig3 { 9 } else { 10 };
    let ylabel = if figure == Figure::Fig3 {
        "optimal stopping time".to_string()
    } else {
        format!("{metric} (min over t, max over agents)")
    };
    let mut s = String::new();
    s.push_str(&format!(
        "# gnuplot stub for {name}.csv; aggregate over the rep column as needed\n"
    ));
    s.push_str("set datafile separator \",\"\nset key outside\nset logscale xy\n");
    s.push_str(&format!("set xlabel \"{xlabel}\"\nset ylabel \"{ylabel}\"\n"));
    if let Some(x) = vline {
        s.push_str(&format!(
            "set arrow from {x},graph 0 to {x},graph 1 nohead dashtype 2\n"
        ));
    }
    s.push_str(&format!(
        "plot \"{name}.csv\" using (strcol(3) eq \"cycle\" ? ${xcol} : NaN):${ycol} title \"cycle\", \\\n     \"{name}.csv\" using (strcol(3) eq \"grid\" ? ${xcol} : NaN):${ycol} title \"grid\", \\\n     \"{name}.csv\" using (strcol(3) eq \"single_machine\" ? ${xcol} : NaN):${ycol} title \"single machine\"\n"
    ));
    s
}
