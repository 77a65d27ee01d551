//! Command-line front end: generate synthetic days, detect DR events,
//! optimize single days or batches, and export solver-ready MPS instances.
//!
//! All outputs are files under `--out`; stdout carries stable `key: value`
//! summary lines. Exit codes: 0 success, 1 data/validation error, 2 solver
//! infeasibility, 3 internal error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use gridplan_core::config::ModelConfig;
use gridplan_core::dr_events::{events_to_json, identify_events};
use gridplan_core::ingest::{aggregate, parse_day, DayProfile};
use gridplan_core::lp::{build_model, emit_mps};
use gridplan_core::scenario::{run_batch, run_day, RunError};
use gridplan_core::schedule::CostReport;
use gridplan_core::solver::SolveStatus;
use gridplan_core::synth::{parse_archetype, synth_day, Archetype};

#[derive(Parser)]
#[command(
    name = "gridplan",
    about = "Demand-response scheduling for a 24-hour microgrid horizon",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Config file (falls back to $GRIDPLAN_CONFIG, then built-in defaults).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. --set delta_peak=0.85 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory for generated files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Omit the timestamp field from report.json (byte-stable outputs).
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic day profile CSV.
    Synth {
        /// One of: high-price, high-demand, high-solar-low-price,
        /// low-solar-high-price, high-variability, weekday, weekend.
        #[arg(long)]
        archetype: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Optimize one day: writes schedule.csv, report.json, events.json.
    Optimize {
        /// Day profile CSV.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Optimize the seven archetypes (or a directory of days): writes table.csv.
    Batch {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Directory of day CSVs; omits the built-in archetypes.
        #[arg(long = "in-dir")]
        in_dir: Option<PathBuf>,
        /// Concurrent day solves.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Detect DR events only: writes events.json.
    Events {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Build the day's LP and export it as MPS: writes model.mps.
    ExportMps {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check the effective configuration and print any violations.
    ValidateConfig,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems are data errors (exit 1); --help/--version are
            // not errors at all.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn data(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
    fn infeasible(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
    fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

fn run_error(e: RunError) -> CliError {
    match &e {
        RunError::NotSolved { status, .. } => match status {
            SolveStatus::Infeasible | SolveStatus::Unbounded => CliError::infeasible(e.to_string()),
            _ => CliError::internal(e.to_string()),
        },
        RunError::Config(_) | RunError::Ingest(_) | RunError::Events(_) => {
            CliError::data(e.to_string())
        }
        RunError::Build(_) | RunError::Solver(_) | RunError::Extract(_) | RunError::Verification(_) => {
            CliError::internal(e.to_string())
        }
    }
}

fn load_config(cli: &Cli) -> Result<ModelConfig, CliError> {
    let path = cli.config.clone().or_else(|| {
        std::env::var_os("GRIDPLAN_CONFIG").map(PathBuf::from)
    });
    let mut cfg = match path {
        Some(p) => ModelConfig::load_file(&p).map_err(|e| CliError::data(e.to_string()))?,
        None => ModelConfig::standard(),
    };
    for pair in &cli.set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::data(format!("--set needs KEY=VALUE, got `{pair}`")))?;
        cfg.set_key(k.trim(), v.trim())
            .map_err(|e| CliError::data(e.to_string()))?;
    }
    Ok(cfg)
}

fn validated_config(cli: &Cli) -> Result<ModelConfig, CliError> {
    let cfg = load_config(cli)?;
    let issues = cfg.validate();
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(CliError::data(format!(
            "invalid config: {}",
            issues.join("; ")
        )))
    }
}

fn read_profile(path: &Path) -> Result<DayProfile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let mut profile =
        parse_day(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    if profile.label.is_empty() {
        profile.label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "day".into());
    }
    Ok(profile)
}

fn ensure_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::data(format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    println!("wrote: {}", path.display());
    Ok(())
}

fn report_json(
    report: &CostReport,
    scenario: &str,
    status: SolveStatus,
    events: usize,
    with_timestamp: bool,
) -> String {
    #[derive(serde::Serialize)]
    struct Doc<'a> {
        schema: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        generated_at_unix: Option<u64>,
        scenario: &'a str,
        status: SolveStatus,
        events: usize,
        #[serde(flatten)]
        report: &'a CostReport,
    }
    let generated_at_unix = with_timestamp.then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    serde_json::to_string_pretty(&Doc {
        schema: "gridplan.report/1",
        generated_at_unix,
        scenario,
        status,
        events,
        report,
    })
    .expect("report serialization cannot fail")
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Synth { archetype, seed } => {
            let arch: Archetype = parse_archetype(archetype).map_err(CliError::data)?;
            let profile = synth_day(*seed, arch);
            ensure_out(&cli.out)?;
            let path = cli.out.join(format!("{}.csv", profile.label));
            write_file(&path, &profile.to_csv())?;
            println!("scenario: {}", profile.label);
            let agg = aggregate(&profile);
            println!("total_mwh: {}", agg.total_energy());
            println!("peak_mw: {}", agg.p_peak);
            Ok(())
        }
        Cmd::Optimize { input } => {
            let cfg = validated_config(cli)?;
            let profile = read_profile(input)?;
            let outcome = run_day(&profile, &cfg).map_err(run_error)?;
            ensure_out(&cli.out)?;
            write_file(&cli.out.join("events.json"), &events_to_json(&outcome.events))?;
            write_file(
                &cli.out.join("schedule.csv"),
                &outcome.schedule.to_csv(&profile, &cfg),
            )?;
            write_file(
                &cli.out.join("schedule.json"),
                &outcome.schedule.to_json(&profile),
            )?;
            write_file(
                &cli.out.join("report.json"),
                &report_json(
                    &outcome.report,
                    &profile.label,
                    outcome.schedule.status,
                    outcome.events.len(),
                    !cli.no_timestamp,
                ),
            )?;
            println!("scenario: {}", profile.label);
            println!("status: {}", status_token(outcome.schedule.status));
            println!("events: {}", outcome.events.len());
            let r = &outcome.report;
            println!("peak_before_mw: {}", r.peak_before_mw);
            println!("peak_after_mw: {}", r.peak_after_mw);
            println!("peak_reduction_pct: {}", r.peak_reduction_pct);
            println!("energy_cost_savings_pct: {}", r.energy_cost_savings_pct);
            println!("total_cost_savings_pct: {}", r.total_cost_savings_pct);
            println!("optimized_total_cost: {}", r.optimized_total_cost);
            Ok(())
        }
        Cmd::Batch { seed, in_dir, jobs } => {
            let cfg = validated_config(cli)?;
            let profiles: Vec<DayProfile> = match in_dir {
                Some(dir) => {
                    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                        .map_err(|e| CliError::data(format!("{}: {e}", dir.display())))?
                        .filter_map(|entry| entry.ok().map(|e| e.path()))
                        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                        .collect();
                    paths.sort();
                    paths
                        .iter()
                        .map(|p| read_profile(p))
                        .collect::<Result<_, _>>()?
                }
                None => Archetype::ALL
                    .iter()
                    .map(|&a| synth_day(*seed, a))
                    .collect(),
            };
            let table = run_batch(&profiles, &cfg, *jobs)
                .map_err(|e| CliError::data(e.to_string()))?;
            ensure_out(&cli.out)?;
            write_file(&cli.out.join("table.csv"), &table.to_csv())?;
            print!("{}", table.to_text());
            let failed = table.rows.iter().filter(|r| r.error.is_some()).count();
            println!("days: {}", table.rows.len());
            println!("failed: {failed}");
            if failed > 0 {
                return Err(CliError::infeasible(format!("{failed} day(s) failed")));
            }
            Ok(())
        }
        Cmd::Events { input } => {
            let cfg = validated_config(cli)?;
            let profile = read_profile(input)?;
            let agg = aggregate(&profile);
            let events =
                identify_events(&agg, &cfg).map_err(|e| CliError::data(e.to_string()))?;
            ensure_out(&cli.out)?;
            write_file(&cli.out.join("events.json"), &events_to_json(&events))?;
            println!("scenario: {}", profile.label);
            println!("events: {}", events.len());
            for e in &events {
                println!(
                    "event: hours {}-{} avg_price {:.2} avg_load {:.3} trigger {:?}",
                    e.start_hour, e.end_hour, e.avg_price, e.avg_load, e.trigger
                );
            }
            Ok(())
        }
        Cmd::ExportMps { input } => {
            let cfg = validated_config(cli)?;
            let profile = read_profile(input)?;
            let agg = aggregate(&profile);
            let events =
                identify_events(&agg, &cfg).map_err(|e| CliError::data(e.to_string()))?;
            let model = build_model(&profile, &events, &cfg)
                .map_err(|e| CliError::internal(e.to_string()))?;
            let doc = emit_mps(&model.lp);
            ensure_out(&cli.out)?;
            write_file(&cli.out.join("model.mps"), &doc.text)?;
            let mut renames = String::from("original,mps_name\n");
            for (orig, new) in &doc.renamed {
                renames.push_str(&format!("{orig},{new}\n"));
            }
            write_file(&cli.out.join("mps_renames.csv"), &renames)?;
            write_file(&cli.out.join("rows_debug.json"), &model.lp.rows_debug_json())?;
            println!("scenario: {}", profile.label);
            println!("columns: {}", model.lp.num_cols());
            println!("rows: {}", model.lp.num_rows());
            Ok(())
        }
        Cmd::ValidateConfig => {
            let cfg = load_config(cli)?;
            let issues = cfg.validate();
            if issues.is_empty() {
                println!("config: ok");
                println!("batteries: {}", cfg.batteries.len());
                Ok(())
            } else {
                for issue in &issues {
                    println!("violation: {issue}");
                }
                Err(CliError::data(format!(
                    "config has {} violation(s)",
                    issues.len()
                )))
            }
        }
    }
}

fn status_token(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::SoftInfeasible => "soft-infeasible",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
        SolveStatus::TimeLimit => "time-limit",
    }
}
