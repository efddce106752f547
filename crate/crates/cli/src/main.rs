use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use c0dyn::arith::parse_rational;
use c0dyn::literal::{parse_base_set, parse_rect};
use c0dyn::product::Rectangle;
use c0dyn::witness::WitnessSchedule;
use c0dyn_cli::run::{
    build_schedule_for, coefficient_json, fc_json, rotation_json, run_ai_table, run_c0_scan, run_cover,
    run_mixing_scan, run_mu, run_non_sigma_finite,
};
use c0dyn_cli::{resolve, run_full_report, ExperimentConfig, Table, OUTPUT_DIR_ENV};
use clap::{Parser, Subcommand};
use serde_json::Value;

#[derive(Parser)]
#[command(
    name = "c0dyn",
    version,
    about = "Exact experiments on infinite product measures and their diagonal actions"
)]
struct Cli {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Config override `key=value`; repeatable, wins over the file.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (same as `--set output_dir=...`).
    #[arg(long, global = true)]
    out: Option<String>,
    /// Table format, csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// nu(dA ∩ B) against nu(A) nu(B) for |d| <= d_max.
    MixingScan {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        d_max: Option<u64>,
    },
    /// Overlap and symmetric-difference table of the majority sets.
    AiTable { n_max: u64, d_max: u64 },
    /// Measure of a set expression over `{rect ...}` operands with & - + and parentheses.
    Mu { expr: String },
    /// mu(gA ∩ B) for |g| <= g_max, with a plot-data file.
    C0Scan {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        g_max: Option<u64>,
        #[arg(long)]
        depth: Option<usize>,
        /// Where to write the plot data (default: c0_plot.dat in the output directory).
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Witness schedule, coefficients, fc certificates, rotation and cover.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// The 2^N pairwise disjoint rectangles of measure 1.
    NonSigmaFinite {
        #[arg(long)]
        n: Option<u32>,
        /// Base set A; its complement supplies the other factor.
        #[arg(long, default_value = "cyl 0:1")]
        base: String,
    },
    /// Writes every table and certificate plus summary.txt; exits nonzero if any check fails.
    Report,
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Builds the schedule and prints one certificate record per (k, m).
    Build {
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        mmax: Option<u64>,
    },
    /// Re-verifies a certificate file.
    Verify { file: PathBuf },
    /// The coefficient <g xi_m, xi_m>.
    Coeff {
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true)]
        g: i64,
        #[arg(long)]
        depth: usize,
    },
    /// Checks a rectangle's tail factors for uniform almost invariance.
    FcCheck {
        #[arg(long)]
        rect: String,
        #[arg(long)]
        radius: Option<u64>,
    },
    /// Constant product of an arc of length 1/2 against its rotation.
    Rotation {
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value = "arc 0/1 1/2")]
        arc: String,
    },
    /// The translates g X_m for |g| <= radius, m <= mmax.
    Cover {
        #[arg(long)]
        radius: Option<u64>,
        #[arg(long)]
        mmax: Option<u64>,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let file = match &cli.config {
        Some(p) => Some(fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let env = std::env::var(OUTPUT_DIR_ENV).ok();
    let mut overrides = cli.overrides.clone();
    if let Some(o) = &cli.out {
        overrides.push(format!("output_dir={o}"));
    }
    if let Some(f) = &cli.format {
        overrides.push(format!("format={f}"));
    }
    resolve(file.as_deref(), env.as_deref(), &overrides)
}

fn print_table(config: &ExperimentConfig, t: &Table) -> Result<()> {
    std::io::stdout().write_all(t.render(config.format)?.as_bytes())?;
    Ok(())
}

fn print_json(v: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn schedule_for(config: &ExperimentConfig) -> Result<Arc<WitnessSchedule>> {
    Ok(Arc::new(build_schedule_for(config)?))
}

fn rect_arg(text: &str, config: &ExperimentConfig) -> Result<Rectangle> {
    let lit = parse_rect(text).with_context(|| format!("in '{text}'"))?;
    let schedule = match lit.tail {
        c0dyn::literal::TailLiteral::Schedule { .. } => Some(schedule_for(config)?),
        _ => None,
    };
    Ok(Rectangle::from_literal(&lit, schedule.as_ref())?)
}

fn run(cli: Cli) -> Result<bool> {
    let mut config = load_config(&cli)?;
    match cli.command {
        Command::MixingScan { a, b, d_max } => {
            let a = parse_base_set(&a).with_context(|| format!("in '{a}'"))?;
            let b = parse_base_set(&b).with_context(|| format!("in '{b}'"))?;
            let scan = run_mixing_scan(&config, &a, &b, d_max.unwrap_or(config.d_max))?;
            eprintln!("mixing threshold: {}", scan.threshold);
            print_table(&config, &scan.table)?;
        }
        Command::AiTable { n_max, d_max } => print_table(&config, &run_ai_table(n_max, d_max))?,
        Command::Mu { expr } => print_table(&config, &run_mu(&config, &expr)?)?,
        Command::C0Scan {
            a,
            b,
            g_max,
            depth,
            plot,
        } => {
            if let Some(d) = depth {
                config.depth = d;
            }
            let (a, b) = (rect_arg(&a, &config)?, rect_arg(&b, &config)?);
            let scan = run_c0_scan(&config, &a, &b, g_max.unwrap_or(config.d_max))?;
            let plot = match plot {
                Some(p) => p,
                None => {
                    fs::create_dir_all(&config.output_dir)?;
                    config.output_dir.join("c0_plot.dat")
                }
            };
            fs::write(&plot, &scan.plot).with_context(|| format!("writing {}", plot.display()))?;
            eprintln!("plot data: {}", plot.display());
            print_table(&config, &scan.table)?;
        }
        Command::Witness(w) => match w {
            WitnessCommand::Build { kmax, mmax } => {
                config.k_max = kmax.unwrap_or(config.k_max);
                config.m_max = mmax.unwrap_or(config.m_max);
                print!("{}", schedule_for(&config)?.to_jsonl());
            }
            WitnessCommand::Verify { file } => {
                let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
                let s = WitnessSchedule::from_jsonl(&text)?;
                let violations = s.verify();
                for v in &violations {
                    println!("violation k={} m={}: {}", v.k, v.m, v.reason);
                }
                println!("{} records, {} violations", s.entries().count(), violations.len());
                return Ok(violations.is_empty());
            }
            WitnessCommand::Coeff { m, g, depth } => {
                config.m_max = config.m_max.max(m);
                config.k_max = config.k_max.max(depth);
                print_json(&coefficient_json(&schedule_for(&config)?, g, m, depth)?)?;
            }
            WitnessCommand::FcCheck { rect, radius } => {
                let a = rect_arg(&rect, &config)?;
                print_json(&fc_json(&a, radius.unwrap_or(config.radius))?)?;
            }
            WitnessCommand::Rotation { theta, depth, arc } => {
                let theta = match theta {
                    Some(t) => parse_rational(&t)?,
                    None => config.theta.clone(),
                };
                let a = parse_base_set(&arc).with_context(|| format!("in '{arc}'"))?;
                print_json(&rotation_json(&theta, &a, depth.unwrap_or(config.depth))?)?;
            }
            WitnessCommand::Cover { radius, mmax } => {
                config.m_max = mmax.unwrap_or(config.m_max);
                let t = run_cover(&schedule_for(&config)?, radius.unwrap_or(config.radius), config.m_max)?;
                print_table(&config, &t)?;
            }
        },
        Command::NonSigmaFinite { n, base } => {
            let a = parse_base_set(&base).with_context(|| format!("in '{base}'"))?;
            let listing = run_non_sigma_finite(n.unwrap_or(config.family_n), &a)?;
            eprintln!(
                "disjointness certificates: {}",
                if listing.certified { "verified" } else { "FAILED" }
            );
            print_table(&config, &listing.table)?;
            return Ok(listing.certified);
        }
        Command::Report => {
            let outcome = run_full_report(&config)?;
            print!("{}", outcome.summary_text());
            eprintln!("report written to {}", config.output_dir.display());
            return Ok(outcome.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
