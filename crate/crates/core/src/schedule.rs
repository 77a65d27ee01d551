//! Solution post-processing: physical schedules, the cost decomposition with
//! savings metrics, and an independent feasibility verifier.
//!
//! The verifier re-checks every constraint family from the realized schedule
//! values without touching the LP row assembly, so a bug in either side shows
//! up as a disagreement.

use serde::Serialize;
use thiserror::Error;

use crate::config::ModelConfig;
use crate::dr_events::{in_any_event, DrEvent};
use crate::ingest::{aggregate, DayProfile, HourSeries, LoadClass, HOURS};
use crate::lp::{admissible_shift_targets, shift_benefit, LpModel, BALANCE_SLACK_PENALTY};
use crate::solver::{SolveResult, SolveStatus};

/// One realized load shift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftFlow {
    pub load: usize,
    pub from: usize,
    pub to: usize,
    /// Power departed at `from`, MW; `eta_shift * mw` arrives at `to`.
    pub mw: f64,
}

/// Per-hour optimal dispatch for every variable family.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub status: SolveStatus,
    /// Solver objective, $.
    pub objective: f64,
    /// Grid import per load, MW.
    pub grid: Vec<HourSeries>,
    /// Solar allocation per unit and load, MW.
    pub solar: Vec<Vec<HourSeries>>,
    /// Charge per battery and load, MW.
    pub charge: Vec<Vec<HourSeries>>,
    /// Discharge per battery and load, MW.
    pub discharge: Vec<Vec<HourSeries>>,
    /// State of charge per battery, MWh.
    pub soc: Vec<HourSeries>,
    /// Curtailment per load, MW.
    pub reduce: Vec<HourSeries>,
    pub shift_flows: Vec<ShiftFlow>,
    /// Peak variable value, MW.
    pub peak_mw: f64,
    /// Total grid import per hour, MW.
    pub grid_total: HourSeries,
    /// Demand actually served per hour after DR actions, MW.
    pub served_total: HourSeries,
    /// Balance slack magnitude per load, MW.
    pub slack: Vec<HourSeries>,
    pub warnings: Vec<String>,
}

impl Schedule {
    /// All-zero schedule shell, mostly for tests and hand-built cases.
    pub fn zeros(n_loads: usize, n_solar: usize, n_batteries: usize) -> Schedule {
        Schedule {
            status: SolveStatus::Optimal,
            objective: 0.0,
            grid: vec![[0.0; HOURS]; n_loads],
            solar: vec![vec![[0.0; HOURS]; n_loads]; n_solar],
            charge: vec![vec![[0.0; HOURS]; n_loads]; n_batteries],
            discharge: vec![vec![[0.0; HOURS]; n_loads]; n_batteries],
            soc: vec![[0.0; HOURS]; n_batteries],
            reduce: vec![[0.0; HOURS]; n_loads],
            shift_flows: Vec::new(),
            peak_mw: 0.0,
            grid_total: [0.0; HOURS],
            served_total: [0.0; HOURS],
            slack: vec![[0.0; HOURS]; n_loads],
            warnings: Vec::new(),
        }
    }

    /// Departed shift power from load `l` at hour `t1`, MW.
    pub fn shift_out(&self, l: usize, t1: usize) -> f64 {
        self.shift_flows
            .iter()
            .filter(|f| f.load == l && f.from == t1)
            .map(|f| f.mw)
            .sum()
    }

    /// Arrived shift power at load `l`, hour `t2`, MW (after losses).
    pub fn shift_in(&self, l: usize, t2: usize, eta_shift: f64) -> f64 {
        self.shift_flows
            .iter()
            .filter(|f| f.load == l && f.to == t2)
            .map(|f| f.mw * eta_shift)
            .sum()
    }

    /// Tidy CSV: `hour,series,value`, hours ascending, series in a fixed
    /// order (grid per load, solar per unit/load, charge/discharge/soc per
    /// battery, reduce per load, shift_out/shift_in per load, totals).
    pub fn to_csv(&self, profile: &DayProfile, cfg: &ModelConfig) -> String {
        let mut out = String::from("hour,series,value\n");
        let mut push = |t: usize, series: &str, v: f64| {
            out.push_str(&format!("{t},{series},{}\n", crate::schedule::fmt_num(v)));
        };
        for t in 0..HOURS {
            for (l, g) in self.grid.iter().enumerate() {
                push(t, &format!("grid:{}", profile.loads[l].id), g[t]);
            }
            for (s, per_load) in self.solar.iter().enumerate() {
                for (l, a) in per_load.iter().enumerate() {
                    push(
                        t,
                        &format!("solar:{}:{}", profile.solar_units[s].id, profile.loads[l].id),
                        a[t],
                    );
                }
            }
            for (b, per_load) in self.charge.iter().enumerate() {
                let total: f64 = per_load.iter().map(|r| r[t]).sum();
                push(t, &format!("charge:{b}"), total);
            }
            for (b, per_load) in self.discharge.iter().enumerate() {
                let total: f64 = per_load.iter().map(|r| r[t]).sum();
                push(t, &format!("discharge:{b}"), total);
            }
            for (b, s) in self.soc.iter().enumerate() {
                push(t, &format!("soc:{b}"), s[t]);
            }
            for (l, r) in self.reduce.iter().enumerate() {
                push(t, &format!("reduce:{}", profile.loads[l].id), r[t]);
            }
            for l in 0..self.grid.len() {
                push(t, &format!("shift_out:{}", profile.loads[l].id), self.shift_out(l, t));
                push(
                    t,
                    &format!("shift_in:{}", profile.loads[l].id),
                    self.shift_in(l, t, cfg.eta_shift),
                );
            }
            push(t, "grid_total", self.grid_total[t]);
            push(t, "served_total", self.served_total[t]);
        }
        out
    }

    pub fn to_json(&self, profile: &DayProfile) -> String {
        #[derive(Serialize)]
        struct Dump<'a> {
            status: SolveStatus,
            objective: f64,
            peak_mw: f64,
            load_ids: Vec<&'a str>,
            grid: &'a [HourSeries],
            solar: &'a [Vec<HourSeries>],
            charge: &'a [Vec<HourSeries>],
            discharge: &'a [Vec<HourSeries>],
            soc: &'a [HourSeries],
            reduce: &'a [HourSeries],
            shift_flows: &'a [ShiftFlow],
            grid_total: &'a HourSeries,
            served_total: &'a HourSeries,
            warnings: &'a [String],
        }
        let dump = Dump {
            status: self.status,
            objective: self.objective,
            peak_mw: self.peak_mw,
            load_ids: profile.loads.iter().map(|l| l.id.as_str()).collect(),
            grid: &self.grid,
            solar: &self.solar,
            charge: &self.charge,
            discharge: &self.discharge,
            soc: &self.soc,
            reduce: &self.reduce,
            shift_flows: &self.shift_flows,
            grid_total: &self.grid_total,
            served_total: &self.served_total,
            warnings: &self.warnings,
        };
        serde_json::to_string_pretty(&dump).expect("schedule serialization cannot fail")
    }
}

pub(crate) fn fmt_num(v: f64) -> String {
    format!("{v}")
}

/// Objective decomposition and the savings metrics.
#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    /// Energy purchase cost, $.
    pub j_energy: f64,
    /// Peak demand charge, $.
    pub j_peak: f64,
    /// DR reduction credit, $.
    pub j_dr: f64,
    /// Shift benefit credit, $.
    pub j_shift: f64,
    /// Peak-period and ramping penalties (diagnostic, not billed), $.
    pub j_penalty: f64,
    /// Balance slack penalty (diagnostic), $.
    pub j_slack: f64,
    pub original_energy_cost: f64,
    pub original_peak_charge: f64,
    pub original_total_cost: f64,
    pub optimized_energy_cost: f64,
    pub optimized_peak_charge: f64,
    /// Billed total: energy + peak - DR credit - shift credit, $.
    pub optimized_total_cost: f64,
    pub peak_before_mw: f64,
    pub peak_after_mw: f64,
    pub peak_reduction_pct: f64,
    pub energy_cost_savings_pct: f64,
    pub peak_charge_savings_pct: f64,
    pub total_cost_savings_pct: f64,
    /// Demand energy of the raw profile, MWh.
    pub energy_before_mwh: f64,
    /// Energy drawn from the grid after optimization, MWh.
    pub grid_energy_after_mwh: f64,
    /// Demand actually served after DR actions, MWh.
    pub served_energy_after_mwh: f64,
    /// Reduction of grid-supplied energy, percent.
    pub load_reduction_pct: f64,
    /// Reduction of served demand (curtailment and shift losses), percent.
    pub served_reduction_pct: f64,
    pub reduced_energy_mwh: f64,
    pub shifted_energy_mwh: f64,
    /// Solver objective for the cross-check.
    pub solver_objective: f64,
    /// |recomputed - solver| / max(1, |solver|).
    pub objective_identity_gap: f64,
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("no schedule available: solve ended {status:?}{}", note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default())]
    NoSolution {
        status: SolveStatus,
        note: Option<String>,
    },
    #[error("solution vector has {got} values, expected {expected}")]
    ShapeMismatch { got: usize, expected: usize },
}

fn snap(v: f64) -> f64 {
    if v.abs() < 1e-9 {
        0.0
    } else {
        v
    }
}

/// Converts a solver result back into a physical [`Schedule`].
///
/// Balance slack above the feasibility tolerance downgrades the status to
/// soft-infeasible and surfaces per-hour warnings.
pub fn extract(
    result: &SolveResult,
    model: &LpModel,
    profile: &DayProfile,
    cfg: &ModelConfig,
) -> Result<Schedule, ScheduleError> {
    match result.status {
        SolveStatus::Optimal | SolveStatus::TimeLimit | SolveStatus::SoftInfeasible => {}
        status => {
            return Err(ScheduleError::NoSolution {
                status,
                note: result.note.clone(),
            })
        }
    }
    if result.values.len() != model.lp.num_cols() {
        return Err(ScheduleError::ShapeMismatch {
            got: result.values.len(),
            expected: model.lp.num_cols(),
        });
    }
    let x = &result.values;
    let vars = &model.vars;
    let n_l = profile.loads.len();
    let n_s = profile.solar_units.len();
    let n_b = cfg.batteries.len();

    let mut sched = Schedule::zeros(n_l, n_s, n_b);
    sched.status = result.status;
    sched.objective = result.objective;
    sched.peak_mw = snap(x[vars.peak]);

    for l in 0..n_l {
        for t in 0..HOURS {
            sched.grid[l][t] = snap(x[vars.grid[l][t]]);
        }
    }
    for s in 0..n_s {
        for l in 0..n_l {
            for t in 0..HOURS {
                sched.solar[s][l][t] = snap(x[vars.solar[s][l][t]]);
            }
        }
    }
    for b in 0..n_b {
        for l in 0..n_l {
            for t in 0..HOURS {
                sched.charge[b][l][t] = snap(x[vars.charge[b][l][t]]);
                sched.discharge[b][l][t] = snap(x[vars.discharge[b][l][t]]);
            }
        }
        for t in 0..HOURS {
            sched.soc[b][t] = snap(x[vars.soc[b][t]]);
        }
    }
    for (&(l, t), &col) in &vars.reduce {
        sched.reduce[l][t] = snap(x[col]);
    }
    for (&(l, t1, t2), &col) in &vars.shift {
        let mw = snap(x[col]);
        if mw > 0.0 {
            sched.shift_flows.push(ShiftFlow {
                load: l,
                from: t1,
                to: t2,
                mw,
            });
        }
    }

    let mut worst_slack = 0.0f64;
    for l in 0..n_l {
        for t in 0..HOURS {
            let s = x[vars.slack_pos[l][t]].abs() + x[vars.slack_neg[l][t]].abs();
            sched.slack[l][t] = snap(s);
            if s > cfg.solver.feasibility_tol {
                worst_slack = worst_slack.max(s);
                sched.warnings.push(format!(
                    "balance slack {:.3e} MW on load {} at hour {t}",
                    s, profile.loads[l].id
                ));
            }
        }
    }
    if worst_slack > cfg.solver.feasibility_tol && sched.status == SolveStatus::Optimal {
        sched.status = SolveStatus::SoftInfeasible;
    }

    for t in 0..HOURS {
        sched.grid_total[t] = (0..n_l).map(|l| sched.grid[l][t]).sum();
        let mut served = 0.0;
        for l in 0..n_l {
            served += profile.loads[l].demand[t] - sched.reduce[l][t] - sched.shift_out(l, t)
                + sched.shift_in(l, t, cfg.eta_shift);
        }
        sched.served_total[t] = served;
    }
    Ok(sched)
}

/// Recomputes every objective term from the realized schedule and derives the
/// savings metrics against the grid-only baseline.
pub fn cost_report(schedule: &Schedule, profile: &DayProfile, cfg: &ModelConfig) -> CostReport {
    let agg = aggregate(profile);

    let j_energy: f64 = (0..HOURS)
        .map(|t| profile.price[t] * schedule.grid_total[t])
        .sum();
    let peak_after = schedule
        .grid_total
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    let j_peak = cfg.c_p * peak_after;
    let reduced_energy: f64 = schedule.reduce.iter().flatten().sum();
    let j_dr = cfg.c_dr * reduced_energy;
    let j_shift: f64 = schedule
        .shift_flows
        .iter()
        .map(|f| shift_benefit(cfg, f.from, f.to) * f.mw)
        .sum();

    let mut j_penalty = 0.0;
    for t in 0..HOURS {
        if cfg.periods.is_peak(t) {
            j_penalty += cfg.lambda_p * schedule.grid_total[t];
        }
        let prev = if t == 0 {
            agg.p_total[0]
        } else {
            schedule.grid_total[t - 1]
        };
        j_penalty += cfg.lambda_r * (schedule.grid_total[t] - prev).abs();
    }
    let j_slack: f64 =
        BALANCE_SLACK_PENALTY * schedule.slack.iter().flatten().sum::<f64>();

    let original_energy_cost: f64 = (0..HOURS).map(|t| profile.price[t] * agg.p_total[t]).sum();
    let original_peak_charge = cfg.c_p * agg.p_peak;
    let original_total_cost = original_energy_cost + original_peak_charge;
    let optimized_total_cost = j_energy + j_peak - j_dr - j_shift;

    let energy_before: f64 = agg.total_energy();
    let grid_energy_after: f64 = schedule.grid_total.iter().sum();
    let served_energy_after: f64 = schedule.served_total.iter().sum();
    let shifted_energy: f64 = schedule.shift_flows.iter().map(|f| f.mw).sum();

    let pct = |saved: f64, base: f64| if base > 0.0 { 100.0 * saved / base } else { 0.0 };
    let recomputed = optimized_total_cost + j_penalty + j_slack;
    let identity_gap = (recomputed - schedule.objective).abs() / schedule.objective.abs().max(1.0);

    CostReport {
        j_energy,
        j_peak,
        j_dr,
        j_shift,
        j_penalty,
        j_slack,
        original_energy_cost,
        original_peak_charge,
        original_total_cost,
        optimized_energy_cost: j_energy,
        optimized_peak_charge: j_peak,
        optimized_total_cost,
        peak_before_mw: agg.p_peak,
        peak_after_mw: peak_after,
        peak_reduction_pct: pct(agg.p_peak - peak_after, agg.p_peak),
        energy_cost_savings_pct: pct(original_energy_cost - j_energy, original_energy_cost),
        peak_charge_savings_pct: pct(original_peak_charge - j_peak, original_peak_charge),
        total_cost_savings_pct: pct(
            original_total_cost - optimized_total_cost,
            original_total_cost,
        ),
        energy_before_mwh: energy_before,
        grid_energy_after_mwh: grid_energy_after,
        served_energy_after_mwh: served_energy_after,
        load_reduction_pct: pct(energy_before - grid_energy_after, energy_before),
        served_reduction_pct: pct(energy_before - served_energy_after, energy_before),
        reduced_energy_mwh: reduced_energy,
        shifted_energy_mwh: shifted_energy,
        solver_objective: schedule.objective,
        objective_identity_gap: identity_gap,
    }
}

/// Independently re-checks every constraint family on realized values.
/// Returns one message per violation; empty means clean.
///
/// Deliberately separate code from the LP row assembly: it walks the
/// schedule, not the rows.
pub fn verify(
    schedule: &Schedule,
    profile: &DayProfile,
    events: &[DrEvent],
    cfg: &ModelConfig,
) -> Vec<String> {
    let tol = 1e-6;
    let mut v = Vec::new();
    let n_l = profile.loads.len();
    let n_s = profile.solar_units.len();
    let n_b = cfg.batteries.len();
    let agg = aggregate(profile);

    // Nonnegativity of every dispatched quantity.
    let mut check_nonneg = |name: String, val: f64| {
        if val < -1e-9 {
            v.push(format!("negative value {val:.3e} in {name}"));
        }
    };
    for (l, g) in schedule.grid.iter().enumerate() {
        for (t, &val) in g.iter().enumerate() {
            check_nonneg(format!("grid[l={l},t={t}]"), val);
        }
    }
    for f in &schedule.shift_flows {
        check_nonneg(format!("shift[l={},{}->{}]", f.load, f.from, f.to), f.mw);
    }

    // Eq. 23: power balance per load and hour.
    for l in 0..n_l {
        for t in 0..HOURS {
            let supply: f64 = schedule.grid[l][t]
                + (0..n_s).map(|s| schedule.solar[s][l][t]).sum::<f64>()
                + (0..n_b)
                    .map(|b| schedule.discharge[b][l][t] - schedule.charge[b][l][t])
                    .sum::<f64>();
            let need = profile.loads[l].demand[t] - schedule.reduce[l][t]
                - schedule.shift_out(l, t)
                + schedule.shift_in(l, t, cfg.eta_shift);
            if (supply - need).abs() > tol {
                v.push(format!(
                    "Eq. 23 violated at (l={l},t={t}): balance residual {:.3e} MW",
                    supply - need
                ));
            }
        }
    }

    // Eq. 24: solar allocation within availability.
    for s in 0..n_s {
        for t in 0..HOURS {
            let used: f64 = (0..n_l).map(|l| schedule.solar[s][l][t]).sum();
            let avail = profile.solar_units[s].avail[t];
            if used > avail + tol {
                v.push(format!(
                    "Eq. 24 violated at (s={s},t={t}): allocated {used:.6} > available {avail:.6}"
                ));
            }
        }
    }

    // Eq. 25/26: SOC recursion and bounds; Eq. 27/28: power ratings.
    for (b, bat) in cfg.batteries.iter().enumerate() {
        for t in 0..HOURS {
            let prev = if t == 0 {
                bat.soc_init * bat.capacity
            } else {
                schedule.soc[b][t - 1]
            };
            let ch: f64 = (0..n_l).map(|l| schedule.charge[b][l][t]).sum();
            let dis: f64 = (0..n_l).map(|l| schedule.discharge[b][l][t]).sum();
            let expect = prev + bat.eta_b * ch - dis / bat.eta_b;
            if (schedule.soc[b][t] - expect).abs() > tol {
                v.push(format!(
                    "Eq. 25 violated at (b={b},t={t}): SOC residual {:.3e} MWh",
                    schedule.soc[b][t] - expect
                ));
            }
            let (lo, hi) = (bat.soc_min * bat.capacity, bat.soc_max * bat.capacity);
            if schedule.soc[b][t] < lo - tol || schedule.soc[b][t] > hi + tol {
                v.push(format!(
                    "Eq. 26 violated at (b={b},t={t}): SOC {:.6} outside [{lo:.6}, {hi:.6}]",
                    schedule.soc[b][t]
                ));
            }
            if ch > bat.p_max + tol {
                v.push(format!(
                    "Eq. 27 violated at (b={b},t={t}): charging {ch:.6} > rating {:.6}",
                    bat.p_max
                ));
            }
            if dis > bat.p_max + tol {
                v.push(format!(
                    "Eq. 27 violated at (b={b},t={t}): discharging {dis:.6} > rating {:.6}",
                    bat.p_max
                ));
            }
            if cfg.periods.is_peak(t) && ch > cfg.eps_peak * bat.p_max + tol {
                v.push(format!(
                    "Eq. 28 violated at (b={b},t={t}): peak-period charging {ch:.6} > {:.6}",
                    cfg.eps_peak * bat.p_max
                ));
            }
        }
        if schedule.soc[b][HOURS - 1] < bat.soc_init * bat.capacity - tol {
            v.push(format!(
                "terminal SOC of battery {b} ({:.6}) below initial level {:.6}",
                schedule.soc[b][HOURS - 1],
                bat.soc_init * bat.capacity
            ));
        }
    }

    // Eq. 29: reduction cap, scope, and class.
    for l in 0..n_l {
        for t in 0..HOURS {
            let r = schedule.reduce[l][t];
            if r <= tol {
                continue;
            }
            if profile.loads[l].class != LoadClass::Curtailable {
                v.push(format!(
                    "reduction on non-curtailable load {} at hour {t}",
                    profile.loads[l].id
                ));
            }
            if !in_any_event(events, t) {
                v.push(format!(
                    "reduction outside any DR event at (l={l},t={t})"
                ));
            }
            let cap = cfg.alpha_max * profile.loads[l].demand[t];
            if r > cap + tol {
                v.push(format!(
                    "Eq. 29 violated at (l={l},t={t}): reduction {r:.6} > cap {cap:.6}"
                ));
            }
        }
    }

    // Eq. 30 and shift admissibility.
    for f in &schedule.shift_flows {
        if f.mw <= tol {
            continue;
        }
        if profile.loads[f.load].class != LoadClass::Flexible {
            v.push(format!(
                "shift on non-flexible load {} ({} -> {})",
                profile.loads[f.load].id, f.from, f.to
            ));
        }
        if !in_any_event(events, f.from) {
            v.push(format!(
                "shift departing outside any DR event at (l={},t1={})",
                f.load, f.from
            ));
        }
        if !admissible_shift_targets(f.from, cfg).contains(&f.to) {
            v.push(format!(
                "inadmissible shift target (l={},{} -> {})",
                f.load, f.from, f.to
            ));
        }
    }
    for l in 0..n_l {
        for t1 in 0..HOURS {
            let out = schedule.shift_out(l, t1);
            let cap = cfg.beta_max * profile.loads[l].demand[t1];
            if out > cap + tol {
                v.push(format!(
                    "Eq. 30 violated at (l={l},t1={t1}): shifted {out:.6} > cap {cap:.6}"
                ));
            }
        }
    }

    // Shift conservation (Eq. 31 semantics): arrivals equal eta_shift times
    // departures, per load.
    for l in 0..n_l {
        let departed: f64 = (0..HOURS).map(|t| schedule.shift_out(l, t)).sum();
        let arrived: f64 = (0..HOURS).map(|t| schedule.shift_in(l, t, cfg.eta_shift)).sum();
        if (arrived - cfg.eta_shift * departed).abs() > 1e-9 {
            v.push(format!(
                "Eq. 31 violated for load {l}: arrivals {arrived:.9} != eta * departures {:.9}",
                cfg.eta_shift * departed
            ));
        }
    }

    // Eq. 32: the peak variable dominates every hour's import.
    for t in 0..HOURS {
        if schedule.grid_total[t] > schedule.peak_mw + tol {
            v.push(format!(
                "Eq. 32 violated at t={t}: import {:.6} > peak variable {:.6}",
                schedule.grid_total[t], schedule.peak_mw
            ));
        }
    }

    // Eq. 33: ramping (hour 0 against the original import level).
    for t in 0..HOURS {
        let prev = if t == 0 {
            agg.p_total[0]
        } else {
            schedule.grid_total[t - 1]
        };
        let delta = (schedule.grid_total[t] - prev).abs();
        let cap = cfg.gamma_ramp * agg.p_peak;
        if delta > cap + tol {
            v.push(format!(
                "Eq. 33 violated at t={t}: ramp {delta:.6} > {cap:.6}"
            ));
        }
    }

    // Eq. 34: peak-period import cap.
    for t in 0..HOURS {
        if cfg.periods.is_peak(t) {
            let cap = cfg.delta_peak * agg.p_peak;
            if schedule.grid_total[t] > cap + tol {
                v.push(format!(
                    "Eq. 34 violated at t={t}: import {:.6} exceeds cap {cap:.6} by {:.3e}",
                    schedule.grid_total[t],
                    schedule.grid_total[t] - cap
                ));
            }
        }
    }

    // Eq. 35: minimum grid service.
    for t in 0..HOURS {
        let floor = cfg.phi_min * agg.p_total[t];
        if schedule.grid_total[t] < floor - tol {
            v.push(format!(
                "Eq. 35 violated at t={t}: import {:.6} below {floor:.6}",
                schedule.grid_total[t]
            ));
        }
    }

    v
}
