//! `zres`: experiment driver for the resonance-method library.
//!
//! Exit codes: 0 success, 1 invariant violation (a check failed),
//! 2 invalid configuration or domain error, 3 resource refusal.

mod config;
mod report;

use clap::{Args, Parser, Subcommand};
use config::ExperimentConfig;
use report::{csv_cell, emit_plot_data, RunReport};
use serde_json::json;
use std::path::PathBuf;
use std::time::Instant;
use zeta_resonance::construction::{build_b, build_d, choose_m, choose_r, verify_bucket_window};
use zeta_resonance::resonance::{
    frequency_decomposition, l2_envelope_ratio, resonant_pair_check, resonator_square_integral,
    verify_seven_over_a_bound, verify_type2_nonnegativity,
};
use zeta_resonance::zeta::{batch_zeta_modulus, zeta_corrected, zeta_reference, zeta_truncated};
use zeta_resonance::{Error, Result};

#[derive(Parser)]
#[command(name = "zres", version, about = "Resonance-method experiments for zeta extreme values")]
struct Cli {
    /// JSON config file; command-line flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cap the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the multiplicative set B and the representative set D.
    Construct(CommonArgs),
    /// GCD sums: brute force, row product, distance-restricted, or the
    /// full chain report.
    GcdSum(GcdSumArgs),
    /// Run one of the named numeric checks (1, 1a, 1b, 1c, 2, 3, 4).
    LemmaCheck(LemmaArgs),
    /// Evaluate zeta(alpha + it) by one of the three methods.
    Zeta(ZetaArgs),
    /// Frequency-classified decomposition of the resonance integral.
    Resonate(ResonateArgs),
    /// Grid search for large |zeta(alpha + it)| on [0, T].
    Search(SearchArgs),
    /// Monte-Carlo measure of the level set above the tau threshold.
    Measure(MeasureArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "T")]
    t_param: Option<f64>,
    /// Number of primes M (default: chosen from T and alpha).
    #[arg(long = "M")]
    m: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct GcdSumArgs {
    /// bruteforce | product | restricted | chain
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "M")]
    m: Option<u32>,
    /// Distance R for restricted mode (default: the chosen R, clamped).
    #[arg(long)]
    r: Option<u32>,
    /// Row index k for restricted mode.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct LemmaArgs {
    /// Check id: 1, 1a, 1b, 1c, 2, 3 or 4.
    #[arg(long)]
    lemma: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "T")]
    t_param: Option<f64>,
    #[arg(long = "M")]
    m: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct ZetaArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    /// truncated | corrected | reference
    #[arg(long)]
    method: Option<String>,
    /// Dirichlet cutoff T for the truncated method.
    #[arg(long = "T")]
    t_param: Option<f64>,
    /// Cutoff x for the corrected method.
    #[arg(long)]
    x: Option<f64>,
    /// Target digits for the reference method.
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long)]
    grid_start: Option<f64>,
    #[arg(long)]
    grid_end: Option<f64>,
    #[arg(long)]
    grid_points: Option<u64>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct ResonateArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "T")]
    t_param: Option<f64>,
    #[arg(long = "M")]
    m: Option<u32>,
    #[arg(long)]
    mn_limit: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct SearchArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "T")]
    t_param: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    refine: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct MeasureArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "T")]
    t_param: Option<f64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            report.print_summary();
            if !report.all_passed() {
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<RunReport> {
    let file_cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let flag_cfg = flags_to_config(&cli);
    let cfg = flag_cfg.over(file_cfg);
    if let Some(n) = cli.threads.or(cfg.threads) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let command = cfg
        .command
        .clone()
        .ok_or_else(|| Error::invalid("no command given (flag or config file)"))?;
    let started = Instant::now();
    let mut report = dispatch(&command, &cfg)?;
    report.wall_ms = started.elapsed().as_millis() as u64;
    if let Some(out) = &cfg.out {
        report.write_artifact(out)?;
    }
    Ok(report)
}

fn flags_to_config(cli: &Cli) -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    match &cli.command {
        None => {}
        Some(Command::Construct(a)) => {
            c.command = Some("construct".into());
            c.alpha = a.alpha;
            c.t_param = a.t_param;
            c.m = a.m;
            c.out = a.out.clone();
        }
        Some(Command::GcdSum(a)) => {
            c.command = Some("gcd-sum".into());
            c.mode = a.mode.clone();
            c.alpha = a.alpha;
            c.m = a.m;
            c.r = a.r;
            c.k = a.k;
            c.out = a.out.clone();
        }
        Some(Command::LemmaCheck(a)) => {
            c.command = Some("lemma-check".into());
            c.lemma = a.lemma.clone();
            c.alpha = a.alpha;
            c.t_param = a.t_param;
            c.m = a.m;
            c.out = a.out.clone();
        }
        Some(Command::Zeta(a)) => {
            c.command = Some("zeta".into());
            c.alpha = a.alpha;
            c.t = a.t;
            c.method = a.method.clone();
            c.t_param = a.t_param;
            c.x = a.x;
            c.digits = a.digits;
            c.grid_start = a.grid_start;
            c.grid_end = a.grid_end;
            c.grid_points = a.grid_points;
            c.csv = a.csv.clone();
            c.out = a.out.clone();
        }
        Some(Command::Resonate(a)) => {
            c.command = Some("resonate".into());
            c.alpha = a.alpha;
            c.t_param = a.t_param;
            c.m = a.m;
            c.mn_limit = a.mn_limit;
            c.out = a.out.clone();
            c.csv = a.csv.clone();
        }
        Some(Command::Search(a)) => {
            c.command = Some("search".into());
            c.alpha = a.alpha;
            c.t_param = a.t_param;
            c.step = a.step;
            c.refine = a.refine;
            c.out = a.out.clone();
            c.csv = a.csv.clone();
        }
        Some(Command::Measure(a)) => {
            c.command = Some("measure".into());
            c.alpha = a.alpha;
            c.tau = a.tau;
            c.t_param = a.t_param;
            c.samples = a.samples;
            c.seed = a.seed;
            c.out = a.out.clone();
            c.csv = a.csv.clone();
        }
    }
    c
}

fn config_echo(cfg: &ExperimentConfig) -> serde_json::Value {
    serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null)
}

fn dispatch(command: &str, cfg: &ExperimentConfig) -> Result<RunReport> {
    match command {
        "construct" => cmd_construct(cfg),
        "gcd-sum" => cmd_gcd_sum(cfg),
        "lemma-check" => cmd_lemma_check(cfg),
        "zeta" => cmd_zeta(cfg),
        "resonate" => cmd_resonate(cfg),
        "search" => cmd_search(cfg),
        "measure" => cmd_measure(cfg),
        other => Err(Error::invalid(format!("unknown command '{other}'"))),
    }
}

fn resolve_m(cfg: &ExperimentConfig) -> Result<u32> {
    match cfg.m {
        Some(m) => Ok(m),
        None => choose_m(cfg.require_t_param()?, cfg.require_alpha()?),
    }
}

fn cmd_construct(cfg: &ExperimentConfig) -> Result<RunReport> {
    let caps = cfg.caps();
    let alpha = cfg.require_alpha()?;
    let t_param = cfg.require_t_param()?;
    let m = resolve_m(cfg)?;
    let b = build_b(m, &caps)?;
    let d = build_d(&b, t_param)?;
    let mut report = RunReport::new("construct", config_echo(cfg));
    report.output_str("M", m.to_string());
    report.output_str("N", b.len().to_string());
    report.output_str("K", d.k().to_string());
    report.output_str(
        "multi_element_buckets",
        d.multi_element_buckets().to_string(),
    );
    report.check("bucket_window", verify_bucket_window(&b, &d).is_ok());
    report.payload = d.to_json(Some(alpha));
    Ok(report)
}

fn cmd_gcd_sum(cfg: &ExperimentConfig) -> Result<RunReport> {
    use zeta_resonance::gcd_sums::*;
    let caps = cfg.caps();
    let alpha = cfg.require_alpha()?;
    let m = cfg
        .m
        .ok_or_else(|| Error::invalid("missing required parameter: m"))?;
    let mode = cfg.mode.clone().unwrap_or_else(|| "product".into());
    let mut report = RunReport::new("gcd-sum", config_echo(cfg));
    match mode.as_str() {
        "product" => {
            let log = gcd_sum_row_product_log(m, alpha)?;
            report.output("row_product", log.exp().to_f64());
            report.output("row_product_log", log.to_f64());
        }
        "bruteforce" => {
            let b = build_b(m, &caps)?;
            let set: Vec<_> = b.elements().iter().map(|e| e.exact_value().clone()).collect();
            let brute = gcd_sum_bruteforce(&set, alpha, &caps)?;
            let closed = (b.len() as f64) * gcd_sum_row_product(m, alpha)?;
            report.output("bruteforce_sum", brute);
            report.output("closed_form", closed);
            report.check(
                "bruteforce_matches_closed_form",
                (brute - closed).abs() <= 1e-9 * closed.abs(),
            );
        }
        "restricted" => {
            let b = build_b(m, &caps)?;
            let choice = choose_r(m.max(3), alpha)?;
            let r = cfg.r.unwrap_or_else(|| choice.clamped());
            if cfg.r.is_none() && choice.asymptotic_regime {
                report.flags.push("R clamped to 1 (formula value 0)".into());
            }
            let k = cfg.k.unwrap_or(0);
            let v = gcd_sum_distance_restricted(&b, k, r, alpha, &caps)?;
            report.output("restricted_sum", v);
            report.output_str("R", r.to_string());
        }
        "chain" => {
            let chain = if m <= 16 {
                let b = build_b(m, &caps)?;
                lemma1_chain_check_with_set(&b, cfg.k.unwrap_or(0), alpha, &caps)?
            } else {
                lemma1_chain_check(m, alpha)?
            };
            if chain.r_clamped {
                report.flags.push("R clamped to 1 (formula value 0)".into());
            }
            report.check("binomial_vs_stirling", chain.link_binomial_vs_stirling);
            report.output("exponent_margin", chain.exponent_margin);
            report.output("final_bound", chain.final_bound);
            report.payload = chain.to_json();
        }
        other => return Err(Error::invalid(format!("unknown gcd-sum mode '{other}'"))),
    }
    Ok(report)
}

fn cmd_lemma_check(cfg: &ExperimentConfig) -> Result<RunReport> {
    use zeta_resonance::gcd_sums::lemma1_chain_check_with_set;
    let caps = cfg.caps();
    let alpha = cfg.require_alpha()?;
    let t_param = cfg.require_t_param()?;
    let id = cfg
        .lemma
        .clone()
        .ok_or_else(|| Error::invalid("missing required parameter: lemma"))?;
    let m = resolve_m(cfg)?;
    let mut report = RunReport::new("lemma-check", config_echo(cfg));
    match id.as_str() {
        "1" => {
            let b = build_b(m, &caps)?;
            let chain = lemma1_chain_check_with_set(&b, 0, alpha, &caps)?;
            if chain.r_clamped {
                report.flags.push("R clamped to 1 (formula value 0)".into());
            }
            report.check("binomial_vs_stirling", chain.link_binomial_vs_stirling);
            report.check(
                "per_term_upper",
                chain.per_term_upper_ok.unwrap_or(false),
            );
            // the per-term floor rests on the prime bound, valid from M = 6
            if m >= 6 {
                report.check("per_term_floor", chain.per_term_floor_ok.unwrap_or(false));
            } else {
                report.flags.push(format!(
                    "per-term floor not asserted at M = {m} (prime bound needs r >= 6); value: {}",
                    chain.per_term_floor_ok.unwrap_or(false)
                ));
            }
            report.output("exponent_margin", chain.exponent_margin);
            report.payload = chain.to_json();
        }
        "1a" => {
            let b = build_b(m, &caps)?;
            let r = choose_r(m.max(3), alpha)?.clamped();
            let rep = zeta_resonance::construction::verify_pair_separation(
                &b, r, t_param, &caps,
            )?;
            report.check("denominator_bound", rep.denominator_violations == 0);
            report.check("bucket_disjointness", rep.same_bucket_violations == 0);
            if rep.chain_applies {
                report.check("ratio_separation", rep.ratio_violations == 0);
            } else {
                report
                    .flags
                    .push("separation chain does not apply at these parameters".into());
            }
            report.output("min_ratio", rep.min_ratio);
            report.output_str("pairs", rep.pairs_in_distance_range.to_string());
        }
        "1b" => {
            let b = build_b(m, &caps)?;
            let d = build_d(&b, t_param)?;
            let checked = verify_bucket_window(&b, &d)?;
            report.check("bucket_window", true);
            report.output_str("elements_checked", checked.to_string());
        }
        "1c" => {
            let b = build_b(m, &caps)?;
            let d = build_d(&b, t_param)?;
            match zeta_resonance::construction::verify_representative_ratios(&d) {
                Ok(rep) => {
                    report.check("representative_ratios", true);
                    report.output_str("pairs_checked", rep.pairs_checked.to_string());
                    report.output("min_log_margin", rep.min_log_margin);
                }
                Err(Error::ConstructionBug(msg)) => {
                    report.check("representative_ratios", false);
                    report.flags.push(msg);
                }
                Err(e) => return Err(e),
            }
        }
        "2" => {
            let b = build_b(m, &caps)?;
            let d = build_d(&b, t_param)?;
            let rep = resonant_pair_check(&d, alpha, &caps)?;
            if rep.r_clamped {
                report.flags.push("R clamped to 1 (formula value 0)".into());
            }
            report.check(
                "construction_identity_exact",
                rep.construction_identities == rep.quadruples,
            );
            report.check("frequencies_within_type1", rep.frequency_violations == 0);
            report.check("mn_within_range", rep.outside_mn_range == 0);
            report.check(
                "contribution_clears_floor",
                rep.min_contribution_ratio >= 1.0,
            );
            report.output("min_contribution_ratio", rep.min_contribution_ratio);
            report.payload = rep.to_json();
        }
        "3" => {
            let rep = verify_type2_nonnegativity(alpha, t_param, 10_000)?;
            report.check("type2_nonnegative", rep.violations == 0);
            report.output("worst_margin", rep.worst_margin);
        }
        "4" => {
            let rep = verify_seven_over_a_bound(alpha, t_param, 10_000, 1e3)?;
            report.check("seven_over_a", rep.violations == 0);
            report.output("worst_margin", rep.worst_margin);
        }
        other => return Err(Error::invalid(format!("unknown lemma id '{other}'"))),
    }
    Ok(report)
}

fn cmd_zeta(cfg: &ExperimentConfig) -> Result<RunReport> {
    let caps = cfg.caps();
    let alpha = cfg.require_alpha()?;
    let method = cfg.method.clone().unwrap_or_else(|| "truncated".into());
    let mut report = RunReport::new("zeta", config_echo(cfg));

    if let (Some(start), Some(end), Some(points)) =
        (cfg.grid_start, cfg.grid_end, cfg.grid_points)
    {
        if method != "truncated" {
            return Err(Error::invalid("grid mode supports only the truncated method"));
        }
        let t_param = cfg.require_t_param()?;
        let grid: Vec<f64> = if points == 0 {
            Vec::new()
        } else if points == 1 {
            vec![start]
        } else {
            (0..points)
                .map(|i| start + (end - start) * i as f64 / (points - 1) as f64)
                .collect()
        };
        let moduli = batch_zeta_modulus(alpha, &grid, t_param)?;
        let ev = zeta_resonance::zeta::TruncatedEvaluator::new(alpha, t_param)?;
        let rows: Vec<Vec<String>> = grid
            .iter()
            .zip(&moduli)
            .map(|(&t, &modulus)| {
                let v = ev.value_unchecked(t);
                vec![
                    csv_cell(t),
                    csv_cell(v.re),
                    csv_cell(v.im),
                    csv_cell(modulus),
                    "truncated".to_string(),
                ]
            })
            .collect();
        if let Some(csv) = &cfg.csv {
            emit_plot_data(csv, &["t", "re", "im", "modulus", "method"], &rows)?;
        }
        report.output_str("grid_points", grid.len().to_string());
        if let Some(max) = moduli.iter().cloned().fold(None::<f64>, |acc, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        }) {
            report.output("grid_max_modulus", max);
        }
        return Ok(report);
    }

    let t = cfg
        .t
        .ok_or_else(|| Error::invalid("missing required parameter: t"))?;
    let sample = match method.as_str() {
        "truncated" => zeta_truncated(alpha, t, cfg.require_t_param()?)?,
        "corrected" => zeta_corrected(alpha, t, cfg.x.unwrap_or(1e5))?,
        "reference" => zeta_reference(alpha, t, cfg.digits.unwrap_or(20), &caps)?,
        other => return Err(Error::invalid(format!("unknown zeta method '{other}'"))),
    };
    report.output("re", sample.value.re);
    report.output("im", sample.value.im);
    report.output("modulus", sample.value.norm());
    report.output("est_error", sample.est_error);
    Ok(report)
}

fn cmd_resonate(cfg: &ExperimentConfig) -> Result<RunReport> {
    let caps = cfg.caps();
    let alpha = cfg.require_alpha()?;
    let t_param = cfg.require_t_param()?;
    let m = resolve_m(cfg)?;
    let mn_limit = cfg.mn_limit.unwrap_or(t_param.floor() as u64);
    let b = build_b(m, &caps)?;
    let d = build_d(&b, t_param)?;
    let dec = frequency_decomposition(&d, alpha, mn_limit, &caps)?;
    let square = resonator_square_integral(&d, t_param);
    let ratio = l2_envelope_ratio(&d, square, t_param);

    let mut report = RunReport::new("resonate", config_echo(cfg));
    if dec.resonant_pairs.r_clamped {
        report.flags.push("R clamped to 1 (formula value 0)".into());
    }
    let partition = (dec.class_sum_total() - dec.total).abs()
        <= 1e-6 * dec.total.abs().max(1e-300);
    report.check("partition_identity", partition);
    report.output("type1_sum", dec.type1_sum);
    report.output("type2_sum", dec.type2_sum);
    report.output("type3_sum", dec.type3_sum);
    report.output("total", dec.total);
    report.output("square_integral", square);
    report.output("l2_bound_ratio", ratio);
    let mut payload = dec.to_json();
    payload["square_integral"] = json!(csv_cell(square));
    payload["l2_bound_ratio"] = json!(csv_cell(ratio));
    report.payload = payload;
    if let Some(csv) = &cfg.csv {
        let rows = vec![
            vec!["type1".to_string(), csv_cell(dec.type1_sum)],
            vec!["type2".to_string(), csv_cell(dec.type2_sum)],
            vec!["type3".to_string(), csv_cell(dec.type3_sum)],
        ];
        emit_plot_data(csv, &["class", "sum"], &rows)?;
    }
    Ok(report)
}

fn cmd_search(cfg: &ExperimentConfig) -> Result<RunReport> {
    let caps = cfg.caps();
    let alpha = cfg.require_alpha()?;
    let t_param = cfg.require_t_param()?;
    let step = cfg
        .step
        .ok_or_else(|| Error::invalid("missing required parameter: step"))?;
    let refine = cfg.refine.unwrap_or(30);
    let (result, grid) =
        zeta_resonance::search::search_max_with_grid(alpha, t_param, step, refine, &caps)?;
    let mut report = RunReport::new("search", config_echo(cfg));
    report.check("bound_exceeded", result.exceeded);
    report.output("t_star", result.t_star);
    report.output("max_modulus", result.max_modulus);
    report.output("theorem1_bound", result.theorem1_bound);
    report.output_str(
        "max_in_resonance_window",
        result.max_in_resonance_window.to_string(),
    );
    report.payload = result.to_json();
    if let Some(csv) = &cfg.csv {
        let rows: Vec<Vec<String>> = grid
            .iter()
            .map(|&(t, v)| vec![csv_cell(t), csv_cell(v)])
            .collect();
        emit_plot_data(csv, &["t", "modulus"], &rows)?;
    }
    Ok(report)
}

fn cmd_measure(cfg: &ExperimentConfig) -> Result<RunReport> {
    let caps = cfg.caps();
    let alpha = cfg.require_alpha()?;
    let t_param = cfg.require_t_param()?;
    let tau = cfg
        .tau
        .ok_or_else(|| Error::invalid("missing required parameter: tau"))?;
    let samples = cfg
        .samples
        .ok_or_else(|| Error::invalid("missing required parameter: samples"))?;
    let seed = cfg.seed.unwrap_or(0);
    let (rep, rows) = zeta_resonance::search::measure_estimate_with_rows(
        alpha, tau, t_param, samples, seed, &caps,
    )?;
    let mut report = RunReport::new("measure", config_echo(cfg));
    report.check("above_theorem2_floor", rep.estimated_measure >= rep.theorem2_floor);
    report.output("threshold", rep.threshold);
    report.output("estimated_measure", rep.estimated_measure);
    report.output("std_error", rep.std_error);
    report.output("theorem2_floor", rep.theorem2_floor);
    report.output("beta", rep.beta);
    report.output("sampled_fraction", rep.sampled_fraction);
    report.payload = rep.to_json();
    if let Some(csv) = &cfg.csv {
        let lines: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    csv_cell(r.t),
                    csv_cell(r.modulus),
                    (r.above_threshold as u8).to_string(),
                ]
            })
            .collect();
        emit_plot_data(csv, &["t", "modulus", "above_threshold"], &lines)?;
    }
    Ok(report)
}
