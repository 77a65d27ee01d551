//! Builds the dispatch LP for one day: decision variables, the composite
//! objective, and the full constraint family set, as a sparse instance with
//! labeled rows.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::config::{ModelConfig, Period};
use crate::dr_events::DrEvent;
use crate::ingest::{aggregate, DayProfile, LoadClass, HOURS};
use crate::lp::{LinearProgram, Sense, INF};

/// Penalty rate on balance slack, $/MWh. Large enough to dominate every real
/// cost (peak charge rate included) so slack only activates when the physical
/// constraint set is genuinely infeasible.
pub const BALANCE_SLACK_PENALTY: f64 = 1e5;

/// Variable families of the dispatch model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarFamily {
    Grid,
    SolarAlloc,
    Charge,
    Discharge,
    Soc,
    Reduce,
    Shift,
    Peak,
    RampAuxPos,
    RampAuxNeg,
    SlackPos,
    SlackNeg,
}

/// Reverse lookup entry: which (family, indices) a column encodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarRef {
    pub family: VarFamily,
    pub load: Option<usize>,
    pub solar: Option<usize>,
    pub battery: Option<usize>,
    /// Hour `t`, or the source hour `t1` for shifts.
    pub hour: Option<usize>,
    /// Target hour `t2` for shifts.
    pub target_hour: Option<usize>,
    pub col: usize,
}

impl VarRef {
    fn new(family: VarFamily, col: usize) -> Self {
        VarRef {
            family,
            load: None,
            solar: None,
            battery: None,
            hour: None,
            target_hour: None,
            col,
        }
    }
}

/// Column table: dense ids plus per-family lookup structures.
#[derive(Debug, Clone)]
pub struct VarTable {
    pub refs: Vec<VarRef>,
    /// `grid[l][t]`
    pub grid: Vec<[usize; HOURS]>,
    /// `solar[s][l][t]`
    pub solar: Vec<Vec<[usize; HOURS]>>,
    /// `charge[b][l][t]`
    pub charge: Vec<Vec<[usize; HOURS]>>,
    /// `discharge[b][l][t]`
    pub discharge: Vec<Vec<[usize; HOURS]>>,
    /// `soc[b][t]`
    pub soc: Vec<[usize; HOURS]>,
    /// `(load, hour) -> column`, curtailable loads on event hours only.
    pub reduce: BTreeMap<(usize, usize), usize>,
    /// `(load, source, target) -> column`, flexible loads on admissible triples.
    pub shift: BTreeMap<(usize, usize, usize), usize>,
    pub peak: usize,
    pub ramp_pos: [usize; HOURS],
    pub ramp_neg: [usize; HOURS],
    pub slack_pos: Vec<[usize; HOURS]>,
    pub slack_neg: Vec<[usize; HOURS]>,
}

/// A fully built instance with its column table and the原 profile peak.
pub struct LpModel {
    pub lp: LinearProgram,
    pub vars: VarTable,
    /// Daily peak of the raw demand profile, MW.
    pub p_peak_orig: f64,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("periods do not cover hour {0}; validate the config first")]
    UncoveredHour(usize),
    #[error("event [{0}-{1}] extends past hour 23")]
    EventOutOfRange(usize, usize),
    #[error("model structure: {0}")]
    Structure(String),
}

/// Admissible shift targets for source hour `t1`: within `tau_max` hours,
/// outside the peak period, and distinct from `t1`.
pub fn admissible_shift_targets(t1: usize, cfg: &ModelConfig) -> Vec<usize> {
    let lo = t1.saturating_sub(cfg.tau_max);
    let hi = (t1 + cfg.tau_max).min(HOURS - 1);
    (lo..=hi)
        .filter(|&t2| t2 != t1 && !cfg.periods.is_peak(t2))
        .collect()
}

/// Shift benefit rate for a `t1 -> t2` move, $/MWh. Peak-to-off-peak pays
/// best, then peak-to-shoulder, then shoulder-to-off-peak; other moves earn
/// nothing.
pub fn shift_benefit(cfg: &ModelConfig, t1: usize, t2: usize) -> f64 {
    match (cfg.periods.period_of(t1), cfg.periods.period_of(t2)) {
        (Some(Period::Peak), Some(Period::OffPeak)) => cfg.b_po,
        (Some(Period::Peak), Some(Period::Shoulder)) => cfg.b_ps,
        (Some(Period::Shoulder), Some(Period::OffPeak)) => cfg.b_so,
        _ => 0.0,
    }
}

fn event_hours(events: &[DrEvent]) -> Vec<usize> {
    let mut hours: Vec<usize> = events.iter().flat_map(|e| e.hours()).collect();
    hours.sort_unstable();
    hours.dedup();
    hours
}

/// Instantiates every decision variable with its bounds. Objective
/// coefficients start at zero; see [`build_objective`].
pub fn build_variables(
    profile: &DayProfile,
    events: &[DrEvent],
    cfg: &ModelConfig,
) -> Result<(LinearProgram, VarTable), BuildError> {
    for e in events {
        if e.end_hour >= HOURS {
            return Err(BuildError::EventOutOfRange(e.start_hour, e.end_hour));
        }
    }
    for t in 0..HOURS {
        if cfg.periods.period_of(t).is_none() {
            return Err(BuildError::UncoveredHour(t));
        }
    }

    let mut lp = LinearProgram::new(format!("dispatch:{}", profile.label));
    let n_l = profile.loads.len();
    let n_s = profile.solar_units.len();
    let n_b = cfg.batteries.len();
    let ev_hours = event_hours(events);

    let mut refs: Vec<VarRef> = Vec::new();
    let push = |refs: &mut Vec<VarRef>, r: VarRef| refs.push(r);

    let mut grid = Vec::with_capacity(n_l);
    for l in 0..n_l {
        let mut row = [0usize; HOURS];
        for (t, slot) in row.iter_mut().enumerate() {
            let col = lp.add_col(format!("grid[{l},{t}]"), 0.0, INF, 0.0);
            *slot = col;
            let mut r = VarRef::new(VarFamily::Grid, col);
            r.load = Some(l);
            r.hour = Some(t);
            push(&mut refs, r);
        }
        grid.push(row);
    }

    let mut solar = Vec::with_capacity(n_s);
    for s in 0..n_s {
        let mut per_load = Vec::with_capacity(n_l);
        for l in 0..n_l {
            let mut row = [0usize; HOURS];
            for (t, slot) in row.iter_mut().enumerate() {
                let col = lp.add_col(format!("sol[{s},{l},{t}]"), 0.0, INF, 0.0);
                *slot = col;
                let mut r = VarRef::new(VarFamily::SolarAlloc, col);
                r.solar = Some(s);
                r.load = Some(l);
                r.hour = Some(t);
                push(&mut refs, r);
            }
            per_load.push(row);
        }
        solar.push(per_load);
    }

    let mut charge = Vec::with_capacity(n_b);
    let mut discharge = Vec::with_capacity(n_b);
    for (b, bat) in cfg.batteries.iter().enumerate() {
        let mut ch_per_load = Vec::with_capacity(n_l);
        let mut dis_per_load = Vec::with_capacity(n_l);
        for l in 0..n_l {
            let mut ch_row = [0usize; HOURS];
            let mut dis_row = [0usize; HOURS];
            for t in 0..HOURS {
                let col = lp.add_col(format!("ch[{b},{l},{t}]"), 0.0, bat.p_max, 0.0);
                ch_row[t] = col;
                let mut r = VarRef::new(VarFamily::Charge, col);
                r.battery = Some(b);
                r.load = Some(l);
                r.hour = Some(t);
                push(&mut refs, r);

                let col = lp.add_col(format!("dis[{b},{l},{t}]"), 0.0, bat.p_max, 0.0);
                dis_row[t] = col;
                let mut r = VarRef::new(VarFamily::Discharge, col);
                r.battery = Some(b);
                r.load = Some(l);
                r.hour = Some(t);
                push(&mut refs, r);
            }
            ch_per_load.push(ch_row);
            dis_per_load.push(dis_row);
        }
        charge.push(ch_per_load);
        discharge.push(dis_per_load);
    }

    let mut soc = Vec::with_capacity(n_b);
    for (b, bat) in cfg.batteries.iter().enumerate() {
        let mut row = [0usize; HOURS];
        for (t, slot) in row.iter_mut().enumerate() {
            // Terminal SOC may not dip below the initial level, so the last
            // hour's lower bound is lifted to soc_init.
            let lb = if t == HOURS - 1 {
                bat.soc_min.max(bat.soc_init) * bat.capacity
            } else {
                bat.soc_min * bat.capacity
            };
            let col = lp.add_col(format!("soc[{b},{t}]"), lb, bat.soc_max * bat.capacity, 0.0);
            *slot = col;
            let mut r = VarRef::new(VarFamily::Soc, col);
            r.battery = Some(b);
            r.hour = Some(t);
            push(&mut refs, r);
        }
        soc.push(row);
    }

    let mut reduce = BTreeMap::new();
    for (l, load) in profile.loads.iter().enumerate() {
        if load.class != LoadClass::Curtailable {
            continue;
        }
        for &t in &ev_hours {
            let col = lp.add_col(format!("red[{l},{t}]"), 0.0, INF, 0.0);
            reduce.insert((l, t), col);
            let mut r = VarRef::new(VarFamily::Reduce, col);
            r.load = Some(l);
            r.hour = Some(t);
            push(&mut refs, r);
        }
    }

    let mut shift = BTreeMap::new();
    for (l, load) in profile.loads.iter().enumerate() {
        if load.class != LoadClass::Flexible {
            continue;
        }
        for &t1 in &ev_hours {
            for t2 in admissible_shift_targets(t1, cfg) {
                let col = lp.add_col(format!("shf[{l},{t1},{t2}]"), 0.0, INF, 0.0);
                shift.insert((l, t1, t2), col);
                let mut r = VarRef::new(VarFamily::Shift, col);
                r.load = Some(l);
                r.hour = Some(t1);
                r.target_hour = Some(t2);
                push(&mut refs, r);
            }
        }
    }

    let peak = lp.add_col("peak", 0.0, INF, 0.0);
    push(&mut refs, VarRef::new(VarFamily::Peak, peak));

    let agg = aggregate(profile);
    let ramp_bound = cfg.gamma_ramp * agg.p_peak;
    let mut ramp_pos = [0usize; HOURS];
    let mut ramp_neg = [0usize; HOURS];
    for t in 0..HOURS {
        let col = lp.add_col(format!("rpos[{t}]"), 0.0, ramp_bound, 0.0);
        ramp_pos[t] = col;
        let mut r = VarRef::new(VarFamily::RampAuxPos, col);
        r.hour = Some(t);
        push(&mut refs, r);

        let col = lp.add_col(format!("rneg[{t}]"), 0.0, ramp_bound, 0.0);
        ramp_neg[t] = col;
        let mut r = VarRef::new(VarFamily::RampAuxNeg, col);
        r.hour = Some(t);
        push(&mut refs, r);
    }

    let mut slack_pos = Vec::with_capacity(n_l);
    let mut slack_neg = Vec::with_capacity(n_l);
    for l in 0..n_l {
        let mut sp_row = [0usize; HOURS];
        let mut sn_row = [0usize; HOURS];
        for t in 0..HOURS {
            let col = lp.add_col(format!("sp[{l},{t}]"), 0.0, INF, 0.0);
            sp_row[t] = col;
            let mut r = VarRef::new(VarFamily::SlackPos, col);
            r.load = Some(l);
            r.hour = Some(t);
            push(&mut refs, r);

            let col = lp.add_col(format!("sn[{l},{t}]"), 0.0, INF, 0.0);
            sn_row[t] = col;
            let mut r = VarRef::new(VarFamily::SlackNeg, col);
            r.load = Some(l);
            r.hour = Some(t);
            push(&mut refs, r);
        }
        slack_pos.push(sp_row);
        slack_neg.push(sn_row);
    }

    let table = VarTable {
        refs,
        grid,
        solar,
        charge,
        discharge,
        soc,
        reduce,
        shift,
        peak,
        ramp_pos,
        ramp_neg,
        slack_pos,
        slack_neg,
    };
    Ok((lp, table))
}

/// Fills in the objective: energy cost plus peak charge, minus DR and shift
/// credits, plus peak-period and ramping penalties and the slack penalty.
pub fn build_objective(
    lp: &mut LinearProgram,
    vars: &VarTable,
    profile: &DayProfile,
    cfg: &ModelConfig,
) {
    for (l, row) in vars.grid.iter().enumerate() {
        let _ = l;
        for (t, &col) in row.iter().enumerate() {
            let mut c = profile.price[t];
            if cfg.periods.is_peak(t) {
                c += cfg.lambda_p;
            }
            lp.objective[col] = c;
        }
    }
    lp.objective[vars.peak] = cfg.c_p;
    for (&(_, _), &col) in &vars.reduce {
        lp.objective[col] = -cfg.c_dr;
    }
    for (&(_, t1, t2), &col) in &vars.shift {
        lp.objective[col] = -shift_benefit(cfg, t1, t2);
    }
    for t in 0..HOURS {
        lp.objective[vars.ramp_pos[t]] = cfg.lambda_r;
        lp.objective[vars.ramp_neg[t]] = cfg.lambda_r;
    }
    for l in 0..vars.slack_pos.len() {
        for t in 0..HOURS {
            lp.objective[vars.slack_pos[l][t]] = BALANCE_SLACK_PENALTY;
            lp.objective[vars.slack_neg[l][t]] = BALANCE_SLACK_PENALTY;
        }
    }
}

/// Emits every constraint row. Shift energy conservation (the eq31 slot) is
/// realized inside the balance rows: arrivals are credited at `eta_shift`
/// times the departed power, so a standalone conservation row would only
/// duplicate them and none is emitted.
pub fn build_constraints(
    lp: &mut LinearProgram,
    vars: &VarTable,
    profile: &DayProfile,
    cfg: &ModelConfig,
) -> Result<(), BuildError> {
    let n_l = profile.loads.len();
    let n_s = profile.solar_units.len();
    let n_b = cfg.batteries.len();
    let agg = aggregate(profile);
    let p_peak_orig = agg.p_peak;

    for (&(l, _), _) in &vars.reduce {
        if profile.loads[l].class != LoadClass::Curtailable {
            return Err(BuildError::Structure(format!(
                "reduce variable on non-curtailable load {l}"
            )));
        }
    }
    for (&(l, _, _), _) in &vars.shift {
        if profile.loads[l].class != LoadClass::Flexible {
            return Err(BuildError::Structure(format!(
                "shift variable on non-flexible load {l}"
            )));
        }
    }

    // (a) Power balance per load and hour, with slack.
    for l in 0..n_l {
        for t in 0..HOURS {
            let mut terms = vec![(vars.grid[l][t], 1.0)];
            for s in 0..n_s {
                terms.push((vars.solar[s][l][t], 1.0));
            }
            for b in 0..n_b {
                terms.push((vars.discharge[b][l][t], 1.0));
                terms.push((vars.charge[b][l][t], -1.0));
            }
            terms.push((vars.slack_pos[l][t], 1.0));
            terms.push((vars.slack_neg[l][t], -1.0));
            if let Some(&col) = vars.reduce.get(&(l, t)) {
                terms.push((col, 1.0));
            }
            for (&(ll, t1, t2), &col) in &vars.shift {
                if ll != l {
                    continue;
                }
                if t1 == t {
                    terms.push((col, 1.0)); // departure
                } else if t2 == t {
                    terms.push((col, -cfg.eta_shift)); // arrival, after losses
                }
            }
            lp.add_row(
                format!("eq23:balance[l={l},t={t}]"),
                terms,
                Sense::Eq,
                profile.loads[l].demand[t],
            );
        }
    }

    // (b) Solar allocation capped by availability.
    for s in 0..n_s {
        for t in 0..HOURS {
            let terms = (0..n_l).map(|l| (vars.solar[s][l][t], 1.0)).collect();
            lp.add_row(
                format!("eq24:solar_cap[s={s},t={t}]"),
                terms,
                Sense::Le,
                profile.solar_units[s].avail[t],
            );
        }
    }

    // (c) SOC recursion, power ratings, and the peak-period charge cap.
    for (b, bat) in cfg.batteries.iter().enumerate() {
        for t in 0..HOURS {
            let mut terms = vec![(vars.soc[b][t], 1.0)];
            if t > 0 {
                terms.push((vars.soc[b][t - 1], -1.0));
            }
            for l in 0..n_l {
                terms.push((vars.charge[b][l][t], -bat.eta_b));
                terms.push((vars.discharge[b][l][t], 1.0 / bat.eta_b));
            }
            let rhs = if t == 0 {
                bat.soc_init * bat.capacity
            } else {
                0.0
            };
            lp.add_row(format!("eq25:soc[b={b},t={t}]"), terms, Sense::Eq, rhs);
        }
        for t in 0..HOURS {
            let ch_terms: Vec<_> = (0..n_l).map(|l| (vars.charge[b][l][t], 1.0)).collect();
            lp.add_row(
                format!("eq27:charge_rating[b={b},t={t}]"),
                ch_terms.clone(),
                Sense::Le,
                bat.p_max,
            );
            let dis_terms = (0..n_l).map(|l| (vars.discharge[b][l][t], 1.0)).collect();
            lp.add_row(
                format!("eq27:discharge_rating[b={b},t={t}]"),
                dis_terms,
                Sense::Le,
                bat.p_max,
            );
            if cfg.periods.is_peak(t) {
                lp.add_row(
                    format!("eq28:peak_charge_cap[b={b},t={t}]"),
                    ch_terms,
                    Sense::Le,
                    cfg.eps_peak * bat.p_max,
                );
            }
        }
    }

    // (d) DR participation limits.
    for (&(l, t), &col) in &vars.reduce {
        lp.add_row(
            format!("eq29:reduce_cap[l={l},t={t}]"),
            vec![(col, 1.0)],
            Sense::Le,
            cfg.alpha_max * profile.loads[l].demand[t],
        );
    }
    let mut shift_sources: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (&(l, t1, _), &col) in &vars.shift {
        shift_sources.entry((l, t1)).or_default().push(col);
    }
    for ((l, t1), cols) in shift_sources {
        lp.add_row(
            format!("eq30:shift_out_cap[l={l},t={t1}]"),
            cols.into_iter().map(|c| (c, 1.0)).collect(),
            Sense::Le,
            cfg.beta_max * profile.loads[l].demand[t1],
        );
    }

    // (e) Peak definition, ramping, and the peak-period import cap.
    for t in 0..HOURS {
        let mut terms: Vec<_> = (0..n_l).map(|l| (vars.grid[l][t], 1.0)).collect();
        terms.push((vars.peak, -1.0));
        lp.add_row(format!("eq32:peak_def[t={t}]"), terms, Sense::Le, 0.0);
    }
    for t in 0..HOURS {
        let mut terms: Vec<_> = (0..n_l).map(|l| (vars.grid[l][t], 1.0)).collect();
        let rhs = if t == 0 {
            // Hour 0 ramps against the original hour-0 import.
            agg.p_total[0]
        } else {
            for l in 0..n_l {
                terms.push((vars.grid[l][t - 1], -1.0));
            }
            0.0
        };
        terms.push((vars.ramp_pos[t], -1.0));
        terms.push((vars.ramp_neg[t], 1.0));
        lp.add_row(format!("eq33:ramp[t={t}]"), terms, Sense::Eq, rhs);
    }
    for t in 0..HOURS {
        if cfg.periods.is_peak(t) {
            let terms = (0..n_l).map(|l| (vars.grid[l][t], 1.0)).collect();
            lp.add_row(
                format!("eq34:peak_window_cap[t={t}]"),
                terms,
                Sense::Le,
                cfg.delta_peak * p_peak_orig,
            );
        }
    }

    // (f) Minimum grid service.
    for t in 0..HOURS {
        let terms = (0..n_l).map(|l| (vars.grid[l][t], 1.0)).collect();
        lp.add_row(
            format!("eq35:min_service[t={t}]"),
            terms,
            Sense::Ge,
            cfg.phi_min * agg.p_total[t],
        );
    }

    Ok(())
}

/// Builds the complete instance for one day.
pub fn build_model(
    profile: &DayProfile,
    events: &[DrEvent],
    cfg: &ModelConfig,
) -> Result<LpModel, BuildError> {
    let (mut lp, vars) = build_variables(profile, events, cfg)?;
    build_objective(&mut lp, &vars, profile, cfg);
    build_constraints(&mut lp, &vars, profile, cfg)?;
    lp.check().map_err(BuildError::Structure)?;
    let p_peak_orig = aggregate(profile).p_peak;
    Ok(LpModel {
        lp,
        vars,
        p_peak_orig,
    })
}
