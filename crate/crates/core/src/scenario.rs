//! End-to-end orchestration: one day through the whole pipeline, or a batch
//! of days into a comparison table.

use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::config::ModelConfig;
use crate::dr_events::{identify_events, DrError, DrEvent};
use crate::ingest::{aggregate, DayProfile, IngestError};
use crate::lp::{build_model, BuildError};
use crate::schedule::{cost_report, extract, verify, CostReport, Schedule, ScheduleError};
use crate::solver::{solve_lp, SolveStatus, SolverError, SolverOptions};

/// Everything produced by one day's run.
pub struct DayOutcome {
    pub events: Vec<DrEvent>,
    pub schedule: Schedule,
    pub report: CostReport,
}

/// Pipeline failures, labeled with the stage that raised them.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("ingest: {0}")]
    Ingest(#[from] IngestError),
    #[error("event detection: {0}")]
    Events(#[from] DrError),
    #[error("model build: {0}")]
    Build(#[from] BuildError),
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("solve ended {status:?}{}", note.as_deref().map(|n| format!(": {n}")).unwrap_or_default())]
    NotSolved {
        status: SolveStatus,
        note: Option<String>,
    },
    #[error("schedule extraction: {0}")]
    Extract(#[from] ScheduleError),
    #[error("verification failed with {} violation(s): {}", .0.len(), .0.join("; "))]
    Verification(Vec<String>),
}

/// Runs classification, event identification, model build, solve, extraction,
/// verification, and reporting for one day.
///
/// An optimal solve whose realized schedule fails the independent verifier is
/// an error, not a result.
pub fn run_day(profile: &DayProfile, cfg: &ModelConfig) -> Result<DayOutcome, RunError> {
    let issues = cfg.validate();
    if !issues.is_empty() {
        return Err(RunError::Config(issues.join("; ")));
    }
    profile.check()?;

    let agg = aggregate(profile);
    let events = identify_events(&agg, cfg)?;
    let model = build_model(profile, &events, cfg)?;
    let opts = SolverOptions::from_config(&cfg.solver);
    let result = solve_lp(&model.lp, &opts)?;
    match result.status {
        SolveStatus::Optimal | SolveStatus::TimeLimit => {}
        status => {
            return Err(RunError::NotSolved {
                status,
                note: result.note,
            })
        }
    }
    let schedule = extract(&result, &model, profile, cfg)?;
    if schedule.status == SolveStatus::Optimal {
        let violations = verify(&schedule, profile, &events, cfg);
        if !violations.is_empty() {
            return Err(RunError::Verification(violations));
        }
    }
    let report = cost_report(&schedule, profile, cfg);
    Ok(DayOutcome {
        events,
        schedule,
        report,
    })
}

/// One row of the scenario comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioRow {
    pub scenario: String,
    pub total_mwh: f64,
    pub critical_mwh: f64,
    pub flexible_mwh: f64,
    pub curtailable_mwh: f64,
    pub solar_mwh: f64,
    pub peak_reduction_pct: f64,
    pub energy_cost_savings_pct: f64,
    pub total_cost_savings_pct: f64,
    pub load_reduction_pct: f64,
    /// Present when the day failed; metric fields are then zero.
    pub error: Option<String>,
}

/// Scenario comparison table. `SCHEMA` names the fixed column set.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonTable {
    pub schema: &'static str,
    pub rows: Vec<ScenarioRow>,
}

impl ComparisonTable {
    pub const SCHEMA: &'static str = "gridplan.scenario-table/1";

    const COLUMNS: [&'static str; 11] = [
        "scenario",
        "total_mwh",
        "critical_mwh",
        "flexible_mwh",
        "curtailable_mwh",
        "solar_mwh",
        "peak_reduction_pct",
        "energy_cost_savings_pct",
        "total_cost_savings_pct",
        "load_reduction_pct",
        "error",
    ];

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema: {}\n", Self::SCHEMA);
        out.push_str(&Self::COLUMNS.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.2},{:.2},{:.2},{:.2},{:.2},{:.1},{:.1},{:.1},{:.1},{}\n",
                r.scenario,
                r.total_mwh,
                r.critical_mwh,
                r.flexible_mwh,
                r.curtailable_mwh,
                r.solar_mwh,
                r.peak_reduction_pct,
                r.energy_cost_savings_pct,
                r.total_cost_savings_pct,
                r.load_reduction_pct,
                r.error.as_deref().unwrap_or(""),
            ));
        }
        out
    }

    /// Fixed-width text rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<28} {:>9} {:>9} {:>9} {:>11} {:>9} {:>9} {:>11} {:>10} {:>9}\n",
            "scenario",
            "total",
            "critical",
            "flexible",
            "curtailable",
            "solar",
            "peak red",
            "energy sav",
            "total sav",
            "load red"
        ));
        out.push_str(&format!(
            "{:<28} {:>9} {:>9} {:>9} {:>11} {:>9} {:>9} {:>11} {:>10} {:>9}\n",
            "", "MWh", "MWh", "MWh", "MWh", "MWh", "%", "%", "%", "%"
        ));
        for r in &self.rows {
            if let Some(err) = &r.error {
                out.push_str(&format!("{:<28} failed: {}\n", r.scenario, err));
                continue;
            }
            out.push_str(&format!(
                "{:<28} {:>9.2} {:>9.2} {:>9.2} {:>11.2} {:>9.2} {:>9.1} {:>11.1} {:>10.1} {:>9.1}\n",
                r.scenario,
                r.total_mwh,
                r.critical_mwh,
                r.flexible_mwh,
                r.curtailable_mwh,
                r.solar_mwh,
                r.peak_reduction_pct,
                r.energy_cost_savings_pct,
                r.total_cost_savings_pct,
                r.load_reduction_pct,
            ));
        }
        out
    }
}

fn row_for(profile: &DayProfile, outcome: Result<DayOutcome, RunError>) -> ScenarioRow {
    let agg = aggregate(profile);
    let by_class: Vec<f64> = agg
        .by_class
        .iter()
        .map(|series| series.iter().sum())
        .collect();
    let solar_mwh: f64 = profile
        .solar_units
        .iter()
        .map(|s| s.avail.iter().sum::<f64>())
        .sum();
    match outcome {
        Ok(out) => ScenarioRow {
            scenario: profile.label.clone(),
            total_mwh: agg.total_energy(),
            critical_mwh: by_class[0],
            flexible_mwh: by_class[1],
            curtailable_mwh: by_class[2],
            solar_mwh,
            peak_reduction_pct: out.report.peak_reduction_pct,
            energy_cost_savings_pct: out.report.energy_cost_savings_pct,
            total_cost_savings_pct: out.report.total_cost_savings_pct,
            load_reduction_pct: out.report.load_reduction_pct,
            error: None,
        },
        Err(e) => ScenarioRow {
            scenario: profile.label.clone(),
            total_mwh: agg.total_energy(),
            critical_mwh: by_class[0],
            flexible_mwh: by_class[1],
            curtailable_mwh: by_class[2],
            solar_mwh,
            peak_reduction_pct: 0.0,
            energy_cost_savings_pct: 0.0,
            total_cost_savings_pct: 0.0,
            load_reduction_pct: 0.0,
            error: Some(e.to_string()),
        },
    }
}

#[derive(Debug, Error)]
#[error("no profiles")]
pub struct EmptyBatch;

/// Runs a batch of days, up to `workers` concurrently. Per-day failures
/// become failed rows; the batch continues. Row order follows input order
/// regardless of the worker count.
pub fn run_batch(
    profiles: &[DayProfile],
    cfg: &ModelConfig,
    workers: usize,
) -> Result<ComparisonTable, EmptyBatch> {
    if profiles.is_empty() {
        return Err(EmptyBatch);
    }
    let workers = workers.max(1).min(profiles.len());
    let rows: Mutex<Vec<Option<ScenarioRow>>> = Mutex::new(vec![None; profiles.len()]);

    std::thread::scope(|scope| {
        for w in 0..workers {
            let rows = &rows;
            scope.spawn(move || {
                for (i, profile) in profiles.iter().enumerate() {
                    if i % workers != w {
                        continue;
                    }
                    let row = row_for(profile, run_day(profile, cfg));
                    rows.lock().expect("row mutex poisoned")[i] = Some(row);
                }
            });
        }
    });

    let rows = rows
        .into_inner()
        .expect("row mutex poisoned")
        .into_iter()
        .map(|r| r.expect("every index filled"))
        .collect();
    Ok(ComparisonTable {
        schema: ComparisonTable::SCHEMA,
        rows,
    })
}
