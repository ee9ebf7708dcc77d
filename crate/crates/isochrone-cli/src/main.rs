//! `isochrone` — period functions of conservative oscillators from the
//! command line.
//!
//! Every output file is reproducible: reruns of the same invocation are
//! byte-identical, floats are written with 17 significant digits (lossless
//! for doubles), and each file embeds or is accompanied by a manifest of
//! the run parameters.

// `!(x > 0.0)` also rejects NaN, unlike `x <= 0.0`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod manifest;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use isochrone::criteria::{self, CheckConfig};
use isochrone::isochrony::{self, EvenCoefficients, SeriesMatch};
use isochrone::oracle::{self, SimConfig};
use isochrone::period::{self, ScanTable};
use isochrone::potential::Potential;
use isochrone::series::Rational;

use manifest::{OutputSink, RunManifest};

#[derive(Parser)]
#[command(
    name = "isochrone",
    version,
    about = "Period functions of conservative oscillators: scans, isochronicity verdicts, exact coefficient tables, and an independent integration oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate T(c) and T'(c) over an energy grid.
    Scan(ScanArgs),
    /// Combined isochronicity verdict (exit code 0 isochronous, 1 monotone,
    /// 2 inconclusive, 3 error).
    Check(CheckArgs),
    /// Exact-rational coefficient tables of the matching recursion.
    Coeffs(CoeffsArgs),
    /// Compare the quadrature period against direct integration of the flow.
    Oracle(OracleArgs),
    /// Turning-point distance vs the fractional integral of the period.
    Abel(AbelArgs),
    /// Family utilities.
    Family(FamilyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ScanArgs {
    /// Family spec, e.g. `urabe:alpha=0.3` or `series:a2=0,a3=1`.
    #[arg(long)]
    family: String,
    /// Smallest energy (default: c-max / count).
    #[arg(long)]
    c_min: Option<f64>,
    /// Largest energy (default: 0.9 of the critical energy, capped at 1).
    #[arg(long)]
    c_max: Option<f64>,
    /// Number of energies.
    #[arg(long, default_value_t = 50)]
    count: usize,
    /// Quadrature nodes per period evaluation.
    #[arg(long, default_value_t = 256)]
    nodes: usize,
    /// Tolerance separating "constant" from a real trend in the summary.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Recorded in the manifest (no sampling is randomized today).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    family: String,
    /// Pointwise φ-symmetry tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol_residual: f64,
    /// Period-scan spread tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol_spread: f64,
    /// Quadrature nodes for the embedded scan.
    #[arg(long, default_value_t = 192)]
    nodes: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoeffsMode {
    /// Solve the odd coefficients (and the matching function) from free
    /// even ones.
    OddFromEven,
    /// Build the force series from matching coefficients b0, b1, ...
    GFromB,
    /// Decide isochronicity of a fully given series and extract the b's.
    BFromG,
}

#[derive(Args)]
struct CoeffsArgs {
    #[arg(long, value_enum)]
    mode: CoeffsMode,
    /// Truncation order of the series work.
    #[arg(long, default_value_t = 14)]
    order: usize,
    /// Even coefficients for odd-from-even (exact: integers, decimals or p/q).
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a4: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a6: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a8: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a10: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a12: Option<String>,
    /// Matching coefficients for g-from-b.
    #[arg(long, allow_hyphen_values = true)]
    b0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b3: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b4: Option<String>,
    /// Full series for b-from-g, e.g. `a2=0,a3=1`.
    #[arg(long)]
    series: Option<String>,
    /// Also verify the computed odd coefficients against the published
    /// closed-form table.
    #[arg(long)]
    check_paper_table: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    family: String,
    /// Energy of the orbit.
    #[arg(long)]
    c: f64,
    /// Quadrature nodes.
    #[arg(long, default_value_t = 256)]
    nodes: usize,
    /// Local error tolerance of the integrator.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AbelArgs {
    #[arg(long)]
    family: String,
    /// Energies, comma separated.
    #[arg(long, value_delimiter = ',')]
    c: Vec<f64>,
    #[arg(long, default_value_t = 256)]
    nodes: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyArgs {
    #[command(subcommand)]
    sub: FamilySub,
}

#[derive(Subcommand)]
enum FamilySub {
    /// Pointwise dump of x, G(x), g(x).
    Eval(EvalArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct EvalArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    x_min: f64,
    #[arg(long)]
    x_max: f64,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Scan(args) => cmd_scan(args),
        Command::Check(args) => return cmd_check(args),
        Command::Coeffs(args) => cmd_coeffs(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Abel(args) => cmd_abel(args),
        Command::Family(args) => match args.sub {
            FamilySub::Eval(eval) => cmd_family_eval(eval),
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(3)
        }
    }
}

fn build_potential(spec: &str) -> Result<Potential> {
    Potential::parse(spec).with_context(|| format!("family `{spec}`"))
}

fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_scan(args: ScanArgs) -> Result<()> {
    if args.count < 2 {
        bail!("scan needs --count >= 2");
    }
    let potential = build_potential(&args.family)?;
    let c_max = args.c_max.unwrap_or_else(|| period::effective_c_max(&potential));
    let c_min = args.c_min.unwrap_or(c_max / args.count as f64);
    if !(0.0 < c_min && c_min <= c_max) || c_max >= potential.critical_energy() {
        bail!(
            "energy window ({c_min}, {c_max}) invalid for {} (critical energy {})",
            potential.label(),
            potential.critical_energy()
        );
    }
    let grid = period::energy_grid(c_min, c_max, args.count);
    let table = period::period_scan(&potential, &grid, args.nodes)?;
    let summary = format!("{:?}", table.monotonicity(args.tol)).to_lowercase();

    let mut params = BTreeMap::new();
    params.insert("c_min".into(), f17(c_min));
    params.insert("c_max".into(), f17(c_max));
    params.insert("count".into(), args.count.to_string());
    params.insert("nodes".into(), args.nodes.to_string());
    params.insert("tol".into(), f17(args.tol));
    let manifest = RunManifest::new("scan", Some(&args.family), params, args.seed);

    match args.format {
        Format::Csv => {
            OutputSink::new(args.out)?.write_csv(&table.to_csv(), &manifest)?;
        }
        Format::Json => {
            let body = scan_json(&table, &summary, &manifest)?;
            OutputSink::new(args.out)?.write_text(&body)?;
        }
    }
    println!("scan {}: {} energies in [{c_min:.6e}, {c_max:.6e}], monotonicity: {summary}, spread {:.3e}",
        potential.label(), args.count, table.spread());
    Ok(())
}

fn scan_json(table: &ScanTable, summary: &str, manifest: &RunManifest) -> Result<String> {
    let value = serde_json::json!({
        "manifest": manifest,
        "summary": summary,
        "spread": table.spread(),
        "samples": table.samples,
    });
    Ok(serde_json::to_string_pretty(&value)?)
}

fn cmd_check(args: CheckArgs) -> ExitCode {
    let run = || -> Result<criteria::IsochronyReport> {
        let potential = build_potential(&args.family)?;
        let cfg = CheckConfig {
            tol_residual: args.tol_residual,
            tol_spread: args.tol_spread,
            nodes: args.nodes,
            ..CheckConfig::default()
        };
        Ok(criteria::isochrony_verdict(&potential, &cfg)?)
    };
    match run() {
        Ok(report) => {
            let mut params = BTreeMap::new();
            params.insert("tol_residual".into(), f17(args.tol_residual));
            params.insert("tol_spread".into(), f17(args.tol_spread));
            params.insert("nodes".into(), args.nodes.to_string());
            let manifest = RunManifest::new("check", Some(&args.family), params, args.seed);
            let body = serde_json::json!({
                "manifest": manifest,
                "report": report,
            });
            let text = serde_json::to_string_pretty(&body).expect("serialization");
            match OutputSink::new(args.out).and_then(|sink| sink.write_text(&text)) {
                Ok(()) => {}
                Err(error) => {
                    eprintln!("error: {error:#}");
                    return ExitCode::from(3);
                }
            }
            eprintln!("verdict: {:?}", report.verdict);
            ExitCode::from(report.verdict.exit_code() as u8)
        }
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(3)
        }
    }
}

fn parse_rational_arg(name: &str, raw: &str) -> Result<Rational> {
    isochrone::potential::parse_rational(raw)
        .with_context(|| format!("cannot parse --{name} {raw} as a rational (use p/q, decimal or integer)"))
}

fn rational_str(r: &Rational) -> String {
    r.to_string()
}

fn cmd_coeffs(args: CoeffsArgs) -> Result<()> {
    let mut params = BTreeMap::new();
    params.insert("order".into(), args.order.to_string());
    let mode_name = match args.mode {
        CoeffsMode::OddFromEven => "odd-from-even",
        CoeffsMode::GFromB => "g-from-b",
        CoeffsMode::BFromG => "b-from-g",
    };
    params.insert("mode".into(), mode_name.into());

    let body = match args.mode {
        CoeffsMode::OddFromEven => {
            let mut evens = EvenCoefficients::new();
            for (index, raw) in [
                (2usize, &args.a2),
                (4, &args.a4),
                (6, &args.a6),
                (8, &args.a8),
                (10, &args.a10),
                (12, &args.a12),
            ] {
                if let Some(raw) = raw {
                    let value = parse_rational_arg(&format!("a{index}"), raw)?;
                    params.insert(format!("a{index}"), value.to_string());
                    evens.insert(index, value)?;
                }
            }
            let solved = isochrony::odd_from_even(&evens, args.order)?;
            let odd: BTreeMap<String, String> = solved
                .odd
                .iter()
                .map(|(k, v)| (format!("a{k}"), rational_str(v)))
                .collect();
            let b: Vec<String> = solved.b.iter().map(rational_str).collect();
            let table_check = if args.check_paper_table {
                let mut failures = Vec::new();
                for (index, expected) in isochrony::odd_coefficient_table(&evens) {
                    if index <= args.order {
                        if let Some(got) = solved.odd.get(&index) {
                            if *got != expected {
                                failures.push(format!("a{index}: recursion {got}, table {expected}"));
                            }
                        }
                    }
                }
                if !failures.is_empty() {
                    bail!("published-table check failed: {}", failures.join("; "));
                }
                Some("ok")
            } else {
                None
            };
            serde_json::json!({
                "manifest": RunManifest::new("coeffs", None, params, None),
                "odd": odd,
                "b": b,
                "table_check": table_check,
            })
        }
        CoeffsMode::GFromB => {
            let mut b = Vec::new();
            for (index, raw) in [&args.b0, &args.b1, &args.b2, &args.b3, &args.b4]
                .into_iter()
                .enumerate()
            {
                match raw {
                    Some(raw) => {
                        let value = parse_rational_arg(&format!("b{index}"), raw)?;
                        params.insert(format!("b{index}"), value.to_string());
                        while b.len() < index {
                            b.push(isochrone::series::rat(0, 1));
                        }
                        b.push(value);
                    }
                    None => continue,
                }
            }
            let g = isochrony::g_from_b(&b, args.order)?;
            let coeffs: Vec<String> = (0..=g.order()).map(|k| rational_str(g.coeff(k))).collect();
            serde_json::json!({
                "manifest": RunManifest::new("coeffs", None, params, None),
                "g_coefficients": coeffs,
            })
        }
        CoeffsMode::BFromG => {
            let raw = args
                .series
                .as_deref()
                .context("b-from-g needs --series a2=...,a3=...")?;
            params.insert("series".into(), raw.to_string());
            let spec: isochrone::FamilySpec = format!("series:{raw}").parse()?;
            let isochrone::FamilySpec::Series { coeffs } = spec else {
                unreachable!("series prefix forces the series variant")
            };
            let mut series = isochrone::RationalSeries::identity(args.order);
            for (k, v) in &coeffs {
                if *k <= args.order {
                    series.set_coeff(*k, v.clone());
                }
            }
            match isochrony::b_from_g(&series)? {
                SeriesMatch::Isochronous { b } => serde_json::json!({
                    "manifest": RunManifest::new("coeffs", None, params, None),
                    "isochronous_to_order": args.order,
                    "b": b.iter().map(rational_str).collect::<Vec<_>>(),
                }),
                SeriesMatch::Mismatch { order, residual, b } => serde_json::json!({
                    "manifest": RunManifest::new("coeffs", None, params, None),
                    "mismatch": {
                        "order": order,
                        "residual": residual.to_string(),
                    },
                    "b_prefix": b.iter().map(rational_str).collect::<Vec<_>>(),
                }),
            }
        }
    };
    let text = serde_json::to_string_pretty(&body)?;
    OutputSink::new(args.out)?.write_text(&text)?;
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let potential = build_potential(&args.family)?;
    let t_quad = period::period(&potential, args.c, args.nodes)?;
    let sim = oracle::simulate_period(
        &potential,
        args.c,
        &SimConfig { tol: args.tol, ..SimConfig::default() },
    )?;
    let difference = (sim.period - t_quad).abs();
    let relative = difference / t_quad;

    let mut params = BTreeMap::new();
    params.insert("c".into(), f17(args.c));
    params.insert("nodes".into(), args.nodes.to_string());
    params.insert("tol".into(), f17(args.tol));
    let manifest = RunManifest::new("oracle", Some(&args.family), params, None);
    let body = serde_json::json!({
        "manifest": manifest,
        "T_quadrature": t_quad,
        "T_simulated": sim.period,
        "difference": difference,
        "relative_difference": relative,
        "half_crossing": sim.half_crossing,
        "energy_drift": sim.energy_drift,
        "drift_warning": sim.drift_warning,
        "steps": sim.steps,
    });
    let text = serde_json::to_string_pretty(&body)?;
    OutputSink::new(args.out)?.write_text(&text)?;
    println!(
        "T_quad = {}  T_sim = {}  |diff| = {:.3e}  drift = {:.3e}",
        f17(t_quad),
        f17(sim.period),
        difference,
        sim.energy_drift
    );
    Ok(())
}

fn cmd_abel(args: AbelArgs) -> Result<()> {
    if args.c.is_empty() {
        bail!("abel needs at least one energy via --c");
    }
    let potential = build_potential(&args.family)?;
    let mut rows = Vec::new();
    for &c in &args.c {
        let (lhs, rhs) = period::abel_turning_distance(&potential, c, args.nodes)?;
        println!(
            "c = {c:.6e}: b - a = {}  integral = {}  |diff| = {:.3e}",
            f17(lhs),
            f17(rhs),
            (lhs - rhs).abs()
        );
        rows.push(serde_json::json!({
            "c": c,
            "turning_distance": lhs,
            "integral": rhs,
            "difference": (lhs - rhs).abs(),
        }));
    }
    let mut params = BTreeMap::new();
    params.insert(
        "c".into(),
        args.c.iter().map(|c| f17(*c)).collect::<Vec<_>>().join(","),
    );
    params.insert("nodes".into(), args.nodes.to_string());
    let manifest = RunManifest::new("abel", Some(&args.family), params, None);
    let body = serde_json::json!({ "manifest": manifest, "rows": rows });
    if args.out.is_some() {
        let text = serde_json::to_string_pretty(&body)?;
        OutputSink::new(args.out)?.write_text(&text)?;
    }
    Ok(())
}

fn cmd_family_eval(args: EvalArgs) -> Result<()> {
    let potential = build_potential(&args.family)?;
    if args.points < 2 {
        bail!("need at least 2 points");
    }
    if !(args.x_min < args.x_max) {
        bail!("need x_min < x_max");
    }
    let (lo, hi) = potential.domain();
    if args.x_min <= lo || args.x_max >= hi {
        bail!("window [{}, {}] exceeds the domain ({lo}, {hi})", args.x_min, args.x_max);
    }
    let mut params = BTreeMap::new();
    params.insert("x_min".into(), f17(args.x_min));
    params.insert("x_max".into(), f17(args.x_max));
    params.insert("points".into(), args.points.to_string());
    let manifest = RunManifest::new("family eval", Some(&args.family), params, None);

    let xs: Vec<f64> = (0..args.points)
        .map(|i| args.x_min + (args.x_max - args.x_min) * i as f64 / (args.points as f64 - 1.0))
        .collect();
    match args.format {
        Format::Csv => {
            let mut csv = String::from("x,G,g\n");
            for &x in &xs {
                csv.push_str(&format!("{},{},{}\n", f17(x), f17(potential.big_g(x)), f17(potential.g(x))));
            }
            OutputSink::new(args.out)?.write_csv(&csv, &manifest)?;
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = xs
                .iter()
                .map(|&x| {
                    serde_json::json!({ "x": x, "G": potential.big_g(x), "g": potential.g(x) })
                })
                .collect();
            let body = serde_json::json!({ "manifest": manifest, "rows": rows });
            OutputSink::new(args.out)?.write_text(&serde_json::to_string_pretty(&body)?)?;
        }
    }
    Ok(())
}
