//! The `theory` subcommand: prescription tables, leading-order terms, and
//! the two lemma verification suites. A lemma violation is a distinct failure
//! class from bad parameters (exit 3 vs 2).

use std::fs;
use std::path::PathBuf;

use dgdrf::error::{Error, Result};
use dgdrf::theory::{
    self, default_t_mix, leading_terms, prescribe_basic, prescribe_refined, random_unit_norm_psd,
    TheoryParams,
};
use dgdrf::topology::{mixing_matrix, Graph, MixingMatrix, MixingScheme};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct TheoryArgs {
    pub n: u64,
    pub m: u64,
    pub sigma2: f64,
    pub r: f64,
    pub gamma: f64,
    pub eta: f64,
    pub num_features: Option<u64>,
    pub iters: Option<u64>,
    pub json_out: Option<PathBuf>,
}

/// Raised when a verifier finds a counterexample; mapped to exit code 3.
#[derive(Debug)]
pub struct LemmaViolation(pub String);

/// Topologies the verification suites sweep: small cycles, grids, complete
/// graphs, and one 6-regular expander.
pub fn standard_suite() -> Result<Vec<(String, MixingMatrix)>> {
    let mut suite = Vec::new();
    for n in [4usize, 8, 16] {
        suite.push((
            format!("cycle n={n}"),
            mixing_matrix(&Graph::cycle(n)?, MixingScheme::LazyUniform)?,
        ));
    }
    for n in [9usize, 16] {
        suite.push((
            format!("grid n={n}"),
            mixing_matrix(&Graph::grid(n, false)?, MixingScheme::Metropolis)?,
        ));
    }
    for n in [4usize, 8] {
        suite.push((
            format!("complete n={n}"),
            mixing_matrix(&Graph::complete(n)?, MixingScheme::LazyUniform)?,
        ));
    }
    suite.push((
        "expander n=16 d=6".into(),
        mixing_matrix(&Graph::expander(16, 6, 0)?, MixingScheme::LazyUniform)?,
    ));
    Ok(suite)
}

#[derive(Serialize)]
struct TheoryReport {
    basic: dgdrf::theory::Prescription,
    refined: dgdrf::theory::Prescription,
    leading_terms: dgdrf::theory::TermBreakdown,
    t_mix_used: u64,
    spectral_bound: Vec<(String, dgdrf::theory::SpectralBoundReport)>,
    contraction_worst_ratio: f64,
}

pub fn run_theory(args: &TheoryArgs) -> Result<std::result::Result<(), LemmaViolation>> {
    let params = TheoryParams {
        r: args.r,
        gamma: args.gamma,
        eta: args.eta,
        ..TheoryParams::default()
    };
    params.validate()?;

    let basic = prescribe_basic(args.n, args.m, args.sigma2)?;
    let refined = prescribe_refined(args.n, args.m, args.sigma2, &params)?;
    println!("prescriptions for n={} m={} sigma2={}", args.n, args.m, args.sigma2);
    println!("  {:<28} {:>12} {:>12}", "", "basic", "refined");
    println!("  {:<28} {:>12} {:>12}", "features M", basic.m_star, refined.m_star);
    println!(
        "  {:<28} {:>12} {:>12}",
        "iterations t", basic.t_star_iters, refined.t_star_iters
    );
    println!("  {:<28} {:>12} {:>12}", "samples per agent m_min", basic.m_min, refined.m_min);
    println!("  {:<28} {:>12} {:>12}", "mixing horizon t*", basic.t_mix, refined.t_mix);
    println!(
        "  {:<28} {:>12} {:>12}",
        "m large enough",
        basic.satisfied,
        refined.satisfied
    );
    for note in &refined.notes {
        println!("  note: {note}");
    }

    let t = args.iters.unwrap_or(refined.t_star_iters);
    let m_features = args.num_features.unwrap_or(refined.m_star);
    let t_mix = default_t_mix(args.n, args.m, t, args.sigma2)?;
    let terms = leading_terms(args.n, args.m, m_features, args.sigma2, t, t_mix, &params)?;
    println!("leading-order terms at t={t}, M={m_features}, t_mix={t_mix}:");
    println!("  network population   {:>14.6e}", terms.network_population);
    println!("  network residual     {:>14.6e}", terms.network_residual);
    println!("  statistical variance {:>14.6e}", terms.stat_variance);
    println!("  statistical features {:>14.6e}", terms.stat_features);
    println!("  statistical bias     {:>14.6e}", terms.stat_bias);
    println!("  total                {:>14.6e}", terms.total());

    let mut spectral_reports = Vec::new();
    let mut violation: Option<String> = None;
    for (name, mix) in standard_suite()? {
        let report = theory::verify_spectral_bound(&mix.p, 50)?;
        println!(
            "spectral bound {:<20} sigma2 {:.4}  violations {}  worst slack {:+.3e}",
            name, report.sigma2, report.violations, report.worst_slack
        );
        if !report.holds {
            violation = Some(format!("spectral bound failed on {name}"));
        }
        spectral_reports.push((name, report));
    }

    let mut contraction_worst: f64 = 0.0;
    for seed in 0..20u64 {
        let l = random_unit_norm_psd(20, seed);
        for &a in &[0.5, 1.0] {
            let report = theory::verify_contraction(&l, 1.0, 100, a)?;
            contraction_worst = contraction_worst.max(report.max_ratio);
            if !report.holds {
                violation = Some(format!("contraction failed at seed {seed}, a {a}"));
            }
        }
    }
    println!("contraction scan: worst lhs/rhs {contraction_worst:.4} over 20 matrices, a in {{1/2, 1}}");

    if let Some(path) = &args.json_out {
        let report = TheoryReport {
            basic,
            refined,
            leading_terms: terms,
            t_mix_used: t_mix,
            spectral_bound: spectral_reports,
            contraction_worst_ratio: contraction_worst,
        };
        fs::write(path, serde_json::to_string_pretty(&report).map_err(Error::from)?)?;
        println!("report written to {}", path.display());
    }

    match violation {
        Some(msg) => Ok(Err(LemmaViolation(msg))),
        None => {
            println!("all lemma checks passed");
            Ok(Ok(()))
        }
    }
}
