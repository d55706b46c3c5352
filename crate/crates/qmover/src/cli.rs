//! Command-line front end: threshold searches, Werner witness scans,
//! map verification, constraint residuals, and the scalar falsifier.
//!
//! Exit codes: 0 = all claims verified, 1 = a claim was violated,
//! 2 = usage error. Output is byte-identical for identical flags; the
//! `QMOVER_OUT_DIR` environment variable supplies a default directory
//! for relative `--out` paths.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channels::{convex_combine, is_completely_positive, is_trace_preserving, SuperOperator};
use crate::error::Result;
use crate::movers::{
    appendix_a_solve, check_gqm_constraints, constraint_tensor, cp_threshold, is_gqm,
    output_purity, purity_check, universal_inverter, witness_scan_cell, InverterParams,
    WitnessParams,
};
use crate::movers::witness_map;
use crate::states::random_pure_state;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "qmover", version, about = "Superoperator claim checks and entanglement-witness scans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bisect the complete-positivity threshold of the inverter family.
    Threshold(ThresholdArgs),
    /// Scan Werner states against the witness map on a (q, p) grid.
    Witness(WitnessArgs),
    /// Verify the claimed properties of one map.
    Verify(VerifyArgs),
    /// Report the orthonormal-pair constraint residuals of the inverter.
    Constraints(ConstraintsArgs),
    /// Run the scalar no-go falsifier.
    Nogo(NogoArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MapKind {
    Inverter,
    Witness,
    Mix,
}

/// Witness axis given as `x,y,z`.
#[derive(Debug, Clone, Copy)]
pub struct Axis(pub [f64; 3]);

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(format!("axis must be `x,y,z`, got `{s}`"));
        }
        let mut v = [0.0f64; 3];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("bad axis component `{part}`: {e}"))?;
        }
        Ok(Axis(v))
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; written in addition to stdout. Relative paths are
    /// resolved against QMOVER_OUT_DIR when it is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub d: usize,
    /// Acceptance tolerance on |empirical - 1/(d+1)|.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long, default_value_t = 0.0)]
    pub q_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q_max: f64,
    #[arg(long, default_value_t = 21)]
    pub q_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.95)]
    pub p_max: f64,
    #[arg(long, default_value_t = 21)]
    pub p_steps: usize,
    /// Witness axis n̂ as `x,y,z`.
    #[arg(long, default_value = "0,0,1")]
    pub axis: Axis,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub map: MapKind,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value = "0,0,1")]
    pub axis: Axis,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConstraintsArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub p: f64,
    /// Number of Haar-random orthonormal pairs.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NogoArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Deterministic per-cell seed derivation (splitmix64 over seed and index).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn fmt12(x: f64) -> String {
    format!("{:.11e}", x)
}

fn linspace(min: f64, max: f64, steps: usize) -> Option<Vec<f64>> {
    if steps == 0 || min > max {
        return None;
    }
    if steps == 1 {
        return Some(vec![min]);
    }
    Some((0..steps).map(|k| min + (max - min) * k as f64 / (steps - 1) as f64).collect())
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    print!("{text}");
    if let Some(path) = out {
        let resolved = if path.is_relative() {
            match std::env::var_os("QMOVER_OUT_DIR") {
                Some(dir) => PathBuf::from(dir).join(path),
                None => path.clone(),
            }
        } else {
            path.clone()
        };
        if let Some(parent) = resolved.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(resolved, text)?;
    }
    Ok(())
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    2
}

pub fn run() -> i32 {
    dispatch(Cli::parse())
}

pub fn dispatch(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Threshold(args) => cmd_threshold(args),
        Command::Witness(args) => cmd_witness(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Constraints(args) => cmd_constraints(args),
        Command::Nogo(args) => cmd_nogo(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => usage_error(&e.to_string()),
    }
}

#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
}

impl Meta {
    fn new(command: &'static str, seed: u64) -> Self {
        Meta { tool: "qmover", version: VERSION, command, seed }
    }

    fn csv_header(&self, config: &str) -> String {
        format!(
            "# {} {}\n# command: {}\n# seed: {}\n# config: {}\n",
            self.tool, self.version, self.command, self.seed, config
        )
    }
}

#[derive(Serialize)]
struct ThresholdReportOut {
    meta: Meta,
    d: usize,
    empirical_threshold: f64,
    analytic_upper: f64,
    analytic_lower: f64,
    bisection_iterations: usize,
}

fn cmd_threshold(args: ThresholdArgs) -> Result<i32> {
    if args.d < 2 {
        return Ok(usage_error(&format!("threshold requires --d >= 2, got {}", args.d)));
    }
    if args.tol <= 0.0 {
        return Ok(usage_error("--tol must be positive"));
    }
    let report = cp_threshold(args.d, args.tol)?;
    let out = ThresholdReportOut {
        meta: Meta::new("threshold", 0),
        d: report.d,
        empirical_threshold: report.empirical,
        analytic_upper: report.analytic_upper,
        analytic_lower: report.analytic_lower,
        bisection_iterations: report.iterations,
    };
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&out).unwrap()),
        Format::Csv => {
            let mut s = out.meta.csv_header(&format!("d={} tol={:e}", args.d, args.tol));
            s.push_str("d,empirical_threshold,analytic_upper,analytic_lower,bisection_iterations\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                out.d,
                fmt12(out.empirical_threshold),
                fmt12(out.analytic_upper),
                fmt12(out.analytic_lower),
                out.bisection_iterations
            );
            s
        }
    };
    emit(&text, &args.output.out)?;
    let ok = (report.empirical - report.analytic_upper).abs() <= args.tol;
    if !ok {
        eprintln!(
            "claim violated: empirical threshold {} differs from 1/(d+1) = {} by more than {:e}",
            report.empirical, report.analytic_upper, args.tol
        );
    }
    Ok(if ok { 0 } else { 1 })
}

#[derive(Serialize)]
struct WitnessRowOut {
    q: f64,
    p: f64,
    lambda_formula: f64,
    lambda_numeric: f64,
    min_other: f64,
    detected: bool,
}

#[derive(Serialize)]
struct WitnessReportOut {
    meta: Meta,
    axis: [f64; 3],
    max_formula_deviation: f64,
    max_axis_deviation: f64,
    rows: Vec<WitnessRowOut>,
}

fn cmd_witness(args: WitnessArgs) -> Result<i32> {
    let q_grid = match linspace(args.q_min, args.q_max, args.q_steps) {
        Some(g) if args.q_min >= 0.0 && args.q_max <= 1.0 => g,
        _ => return Ok(usage_error("q grid must be non-empty, ascending, inside [0, 1]")),
    };
    let p_grid = match linspace(args.p_min, args.p_max, args.p_steps) {
        Some(g) if args.p_min >= 0.0 && args.p_max < 1.0 => g,
        _ => return Ok(usage_error("p grid must be non-empty, ascending, inside [0, 1)")),
    };
    if args.tol <= 0.0 {
        return Ok(usage_error("--tol must be positive"));
    }

    // 8 extra Haar axes probe axis-independence of the scan.
    let mut axis_rng = ChaCha8Rng::seed_from_u64(derive_seed(args.seed, u64::MAX));
    let extra_axes: Vec<[f64; 3]> = (0..8)
        .map(|_| {
            [
                axis_rng.gen::<f64>() - 0.5,
                axis_rng.gen::<f64>() - 0.5,
                axis_rng.gen::<f64>() - 0.5,
            ]
        })
        .collect();

    let mut rows = Vec::with_capacity(q_grid.len() * p_grid.len());
    let mut max_dev = 0.0f64;
    let mut max_axis_dev = 0.0f64;
    let mut violation: Option<String> = None;
    for &q in &q_grid {
        for &p in &p_grid {
            let row = witness_scan_cell(q, p, args.axis.0, args.tol)?;
            let dev = (row.lambda_formula - row.lambda_numeric).abs();
            max_dev = max_dev.max(dev);
            if dev > args.tol && violation.is_none() {
                violation = Some(format!(
                    "q={q} p={p}: |lambda_formula - lambda_numeric| = {dev:e} > {:e}",
                    args.tol
                ));
            }
            for axis in &extra_axes {
                let alt = witness_scan_cell(q, p, *axis, args.tol)?;
                max_axis_dev =
                    max_axis_dev.max((alt.lambda_numeric - row.lambda_numeric).abs());
            }
            rows.push(WitnessRowOut {
                q,
                p,
                lambda_formula: row.lambda_formula,
                lambda_numeric: row.lambda_numeric,
                min_other: row.min_other,
                detected: row.detected,
            });
        }
    }

    let report = WitnessReportOut {
        meta: Meta::new("witness", args.seed),
        axis: args.axis.0,
        max_formula_deviation: max_dev,
        max_axis_deviation: max_axis_dev,
        rows,
    };
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => {
            let mut s = report.meta.csv_header(&format!(
                "q=[{},{}]x{} p=[{},{}]x{} axis={},{},{} tol={:e}",
                args.q_min,
                args.q_max,
                args.q_steps,
                args.p_min,
                args.p_max,
                args.p_steps,
                args.axis.0[0],
                args.axis.0[1],
                args.axis.0[2],
                args.tol
            ));
            let _ = writeln!(s, "# max_axis_deviation: {}", fmt12(report.max_axis_deviation));
            s.push_str("q,p,lambda_formula,lambda_numeric,min_other,detected\n");
            for row in &report.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    fmt12(row.q),
                    fmt12(row.p),
                    fmt12(row.lambda_formula),
                    fmt12(row.lambda_numeric),
                    fmt12(row.min_other),
                    row.detected
                );
            }
            s
        }
    };
    emit(&text, &args.output.out)?;
    if let Some(v) = violation {
        eprintln!("claim violated: {v}");
        return Ok(1);
    }
    Ok(0)
}

#[derive(Serialize)]
struct VerifyReportOut {
    meta: Meta,
    map: String,
    d: usize,
    p: f64,
    is_tp: bool,
    is_gqm: bool,
    max_fidelity_deviation: f64,
    is_cp: bool,
    min_choi_eigenvalue: f64,
    purity_formula: Option<f64>,
    purity_numeric: Option<f64>,
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    if args.d < 2 {
        return Ok(usage_error(&format!("--d must be >= 2, got {}", args.d)));
    }
    if args.tol <= 0.0 || args.samples == 0 {
        return Ok(usage_error("--tol must be positive and --samples >= 1"));
    }
    let (map, cp_expected, purity_applies): (SuperOperator, bool, bool) = match args.map {
        MapKind::Inverter => {
            let params = match InverterParams::new(args.d, args.p) {
                Ok(p) => p,
                Err(e) => return Ok(usage_error(&e.to_string())),
            };
            (universal_inverter(&params), args.p >= params.cp_boundary() - 1e-12, true)
        }
        MapKind::Witness => {
            if args.d != 2 {
                return Ok(usage_error("--map witness uses the qubit construction; requires --d 2"));
            }
            let params = match WitnessParams::qubit(args.p, args.axis.0) {
                Ok(p) => p,
                Err(e) => return Ok(usage_error(&e.to_string())),
            };
            (witness_map(&params)?, false, false)
        }
        MapKind::Mix => {
            if !(0.0..=1.0).contains(&args.p) {
                return Ok(usage_error(&format!("--p = {} outside [0, 1]", args.p)));
            }
            // equal-weight mixture of inverters at p ± δ, averaging to p
            let delta = 0.5 * args.p.min(1.0 - args.p);
            let lo = universal_inverter(&InverterParams::new(args.d, args.p - delta)?);
            let hi = universal_inverter(&InverterParams::new(args.d, args.p + delta)?);
            let mix = convex_combine(&[(lo, 0.5), (hi, 0.5)])?;
            (mix, args.p >= 1.0 / (args.d as f64 + 1.0) - 1e-12, true)
        }
    };

    let tp = is_trace_preserving(&map, args.tol);
    let gqm = is_gqm(&map, args.p, args.samples, args.seed, args.tol)?;
    let cp = is_completely_positive(&map, args.tol.max(1e-9))?;
    let (purity_formula, purity_numeric) = if purity_applies {
        let params = InverterParams::new(args.d, args.p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(args.seed, 1));
        let psi = random_pure_state(args.d, &mut rng)?;
        (Some(output_purity(&params)), Some(purity_check(&map, &psi)?))
    } else {
        (None, None)
    };

    let report = VerifyReportOut {
        meta: Meta::new("verify", args.seed),
        map: format!("{:?}", args.map).to_lowercase(),
        d: args.d,
        p: args.p,
        is_tp: tp.is_tp,
        is_gqm: gqm.is_gqm,
        max_fidelity_deviation: gqm.max_deviation,
        is_cp: cp.is_cp,
        min_choi_eigenvalue: cp.min_choi_eigenvalue,
        purity_formula,
        purity_numeric,
    };
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => {
            let mut s = report
                .meta
                .csv_header(&format!("map={} d={} p={}", report.map, args.d, args.p));
            s.push_str("key,value\n");
            let _ = writeln!(s, "is_tp,{}", report.is_tp);
            let _ = writeln!(s, "is_gqm,{}", report.is_gqm);
            let _ = writeln!(s, "max_fidelity_deviation,{}", fmt12(report.max_fidelity_deviation));
            let _ = writeln!(s, "is_cp,{}", report.is_cp);
            let _ = writeln!(s, "min_choi_eigenvalue,{}", fmt12(report.min_choi_eigenvalue));
            if let (Some(f), Some(n)) = (report.purity_formula, report.purity_numeric) {
                let _ = writeln!(s, "purity_formula,{}", fmt12(f));
                let _ = writeln!(s, "purity_numeric,{}", fmt12(n));
            }
            s
        }
    };
    emit(&text, &args.output.out)?;

    let mut ok = tp.is_tp && gqm.is_gqm && cp.is_cp == cp_expected;
    if let (Some(f), Some(n)) = (purity_formula, purity_numeric) {
        ok &= (f - n).abs() <= args.tol;
    }
    if !ok {
        eprintln!(
            "claim violated: is_tp={} is_gqm={} is_cp={} (expected cp={})",
            tp.is_tp, gqm.is_gqm, cp.is_cp, cp_expected
        );
    }
    Ok(if ok { 0 } else { 1 })
}

#[derive(Serialize)]
struct ConstraintsReportOut {
    meta: Meta,
    d: usize,
    p: f64,
    pairs: usize,
    entry_kk_kpkp: f64,
    entry_kkp_kpk: f64,
    entry_kkp_kkp: f64,
    max_line1: f64,
    max_line2: f64,
    max_line3: f64,
    trace_residual: f64,
    sum_rule_residual: f64,
    sum_rule_value: f64,
    kraus_bound_max_entry: Option<f64>,
    kraus_bound_satisfied: Option<bool>,
}

fn cmd_constraints(args: ConstraintsArgs) -> Result<i32> {
    if args.d < 2 {
        return Ok(usage_error(&format!("--d must be >= 2, got {}", args.d)));
    }
    let params = match InverterParams::new(args.d, args.p) {
        Ok(p) => p,
        Err(e) => return Ok(usage_error(&e.to_string())),
    };
    if args.tol <= 0.0 {
        return Ok(usage_error("--tol must be positive"));
    }
    let mut map = universal_inverter(&params);
    if args.p >= params.cp_boundary() - 1e-12 {
        map = map.with_kraus_from_choi(1e-9)?;
    }
    let report = check_gqm_constraints(&map, args.p, args.samples, args.seed, args.tol)?;
    let canonical = constraint_tensor(&map, 0, 1)?;
    let df = args.d as f64;

    let out = ConstraintsReportOut {
        meta: Meta::new("constraints", args.seed),
        d: args.d,
        p: args.p,
        pairs: args.samples,
        entry_kk_kpkp: canonical.get(0, 0, 1, 1).re,
        entry_kkp_kpk: canonical.get(0, 1, 1, 0).re,
        entry_kkp_kkp: canonical.get(0, 1, 0, 1).norm(),
        max_line1: report.max_line1,
        max_line2: report.max_line2,
        max_line3: report.max_line3,
        trace_residual: report.trace_residual,
        sum_rule_residual: report.sum_rule_residual,
        sum_rule_value: df * (df * args.p - 1.0),
        kraus_bound_max_entry: report.kraus_bound.as_ref().map(|b| b.max_entry_abs),
        kraus_bound_satisfied: report.kraus_bound.as_ref().map(|b| b.satisfied),
    };
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&out).unwrap()),
        Format::Csv => {
            let mut s = out.meta.csv_header(&format!(
                "d={} p={} pairs={} tol={:e}",
                args.d, args.p, args.samples, args.tol
            ));
            s.push_str("key,value\n");
            let _ = writeln!(s, "entry_kk_kpkp,{}", fmt12(out.entry_kk_kpkp));
            let _ = writeln!(s, "entry_kkp_kpk,{}", fmt12(out.entry_kkp_kpk));
            let _ = writeln!(s, "entry_kkp_kkp,{}", fmt12(out.entry_kkp_kkp));
            let _ = writeln!(s, "max_line1,{}", fmt12(out.max_line1));
            let _ = writeln!(s, "max_line2,{}", fmt12(out.max_line2));
            let _ = writeln!(s, "max_line3,{}", fmt12(out.max_line3));
            let _ = writeln!(s, "trace_residual,{}", fmt12(out.trace_residual));
            let _ = writeln!(s, "sum_rule_residual,{}", fmt12(out.sum_rule_residual));
            let _ = writeln!(s, "sum_rule_value,{}", fmt12(out.sum_rule_value));
            if let Some(v) = out.kraus_bound_max_entry {
                let _ = writeln!(s, "kraus_bound_max_entry,{}", fmt12(v));
                let _ = writeln!(s, "kraus_bound_satisfied,{}", out.kraus_bound_satisfied.unwrap());
            }
            s
        }
    };
    emit(&text, &args.output.out)?;

    let mut ok = report.max_residual() <= args.tol;
    if let Some(b) = &report.kraus_bound {
        ok &= b.satisfied;
    }
    if !ok {
        eprintln!("claim violated: max constraint residual {:e}", report.max_residual());
    }
    Ok(if ok { 0 } else { 1 })
}

#[derive(Serialize)]
struct NogoReportOut {
    meta: Meta,
    p: f64,
    trials: usize,
    falsified_count: usize,
    max_combination_residual_at_solution: f64,
    max_constancy_residual_at_solution: f64,
}

fn cmd_nogo(args: NogoArgs) -> Result<i32> {
    if !(0.0..1.0).contains(&args.p) {
        return Ok(usage_error(&format!("--p = {} outside [0, 1)", args.p)));
    }
    if args.trials < 1 {
        return Ok(usage_error("--trials must be >= 1"));
    }
    if args.tol <= 0.0 {
        return Ok(usage_error("--tol must be positive"));
    }
    let report = appendix_a_solve(args.p, args.trials, args.seed)?;
    let out = NogoReportOut {
        meta: Meta::new("nogo", args.seed),
        p: args.p,
        trials: report.trials,
        falsified_count: report.falsified_count,
        max_combination_residual_at_solution: report.max_combination_residual_at_solution,
        max_constancy_residual_at_solution: report.max_constancy_residual_at_solution,
    };
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&out).unwrap()),
        Format::Csv => {
            let mut s = out.meta.csv_header(&format!(
                "p={} trials={} tol={:e}",
                args.p, args.trials, args.tol
            ));
            s.push_str("key,value\n");
            let _ = writeln!(s, "trials,{}", out.trials);
            let _ = writeln!(s, "falsified_count,{}", out.falsified_count);
            let _ = writeln!(
                s,
                "max_combination_residual_at_solution,{}",
                fmt12(out.max_combination_residual_at_solution)
            );
            let _ = writeln!(
                s,
                "max_constancy_residual_at_solution,{}",
                fmt12(out.max_constancy_residual_at_solution)
            );
            s
        }
    };
    emit(&text, &args.output.out)?;

    let ok = report.falsified_count == report.trials
        && report.max_combination_residual_at_solution <= args.tol
        && report.max_constancy_residual_at_solution <= args.tol;
    if !ok {
        eprintln!(
            "claim violated: falsified {}/{} trials, solution residuals {:e} / {:e}",
            report.falsified_count,
            report.trials,
            report.max_combination_residual_at_solution,
            report.max_constancy_residual_at_solution
        );
    }
    Ok(if ok { 0 } else { 1 })
}
