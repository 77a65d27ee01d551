//! Acceptance suite. Each criterion is one test that prints a single
//! `criterion N: PASS` line (visible with `--nocapture`); a failed assertion
//! names the criterion instead.
//!
//! Criterion 8 (external-solver cross-check of the MPS export) is manual and
//! therefore `#[ignore]`d; run it with
//! `cargo test -p gridplan --test acceptance -- --ignored --nocapture`.

use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gridplan_core::config::ModelConfig;
use gridplan_core::dr_events::identify_events;
use gridplan_core::ingest::{aggregate, DayProfile, Load, LoadClass};
use gridplan_core::lp::{emit_mps, parse_mps, LinearProgram, Sense, INF};
use gridplan_core::scenario::{run_day, DayOutcome};
use gridplan_core::schedule::verify;
use gridplan_core::solver::{solve_bnb, solve_lp, SolveStatus, SolverOptions};
use gridplan_core::synth::{synth_day, Archetype};

// ---------------------------------------------------------------------------
// Independent oracles (kept free of the solver implementation they check).
// ---------------------------------------------------------------------------

/// Brute-force LP oracle: enumerate every basic point (each choice of
/// `n` active constraints from rows-as-equalities plus bounds), keep the
/// feasible ones, and take the best objective. Exact for bounded boxes.
mod vertex_oracle {
    use gridplan_core::lp::{LinearProgram, Sense};

    /// Solves `a x = b` by Gaussian elimination; `None` when singular.
    fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a
            .iter()
            .zip(b)
            .map(|(row, &rhs)| {
                let mut r = row.clone();
                r.push(rhs);
                r
            })
            .collect();
        for k in 0..n {
            let (piv, best) = (k..n)
                .map(|i| (i, m[i][k].abs()))
                .max_by(|x, y| x.1.total_cmp(&y.1))?;
            if best < 1e-10 {
                return None;
            }
            m.swap(k, piv);
            for i in (k + 1)..n {
                let f = m[i][k] / m[k][k];
                if f != 0.0 {
                    for j in k..=n {
                        m[i][j] -= f * m[k][j];
                    }
                }
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = m[i][n];
            for j in (i + 1)..n {
                s -= m[i][j] * x[j];
            }
            x[i] = s / m[i][i];
        }
        Some(x)
    }

    fn feasible(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
        for j in 0..lp.num_cols() {
            if x[j] < lp.lower[j] - tol || x[j] > lp.upper[j] + tol {
                return false;
            }
        }
        for row in &lp.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(c, a)| a * x[c]).sum();
            let ok = match row.sense {
                Sense::Le => lhs <= row.rhs + tol,
                Sense::Ge => lhs >= row.rhs - tol,
                Sense::Eq => (lhs - row.rhs).abs() <= tol,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Minimum objective over feasible vertices, or `None` when no vertex is
    /// feasible (for a bounded box that means the LP is infeasible).
    pub fn best_vertex(lp: &LinearProgram) -> Option<f64> {
        let n = lp.num_cols();
        // Candidate active constraints as dense (normal, rhs) pairs.
        let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
        for row in &lp.rows {
            let mut normal = vec![0.0; n];
            for &(c, a) in &row.coeffs {
                normal[c] = a;
            }
            cons.push((normal, row.rhs));
        }
        for j in 0..n {
            if lp.lower[j].is_finite() {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                cons.push((e, lp.lower[j]));
            }
            if lp.upper[j].is_finite() {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                cons.push((e, lp.upper[j]));
            }
        }
        if cons.len() < n {
            return None;
        }

        let mut best: Option<f64> = None;
        let mut pick = vec![0usize; n];
        // Iterate all n-combinations of constraint indices.
        fn walk(
            cons: &[(Vec<f64>, f64)],
            lp: &LinearProgram,
            pick: &mut Vec<usize>,
            depth: usize,
            start: usize,
            best: &mut Option<f64>,
        ) {
            let n = lp.num_cols();
            if depth == n {
                let a: Vec<Vec<f64>> = pick.iter().map(|&i| cons[i].0.clone()).collect();
                let b: Vec<f64> = pick.iter().map(|&i| cons[i].1).collect();
                if let Some(x) = solve_square(&a, &b) {
                    if feasible(lp, &x, 1e-6) {
                        let obj = lp.objective_value(&x);
                        if best.map_or(true, |cur| obj < cur) {
                            *best = Some(obj);
                        }
                    }
                }
                return;
            }
            for i in start..cons.len() {
                pick[depth] = i;
                walk(cons, lp, pick, depth + 1, i + 1, best);
            }
        }
        walk(&cons, lp, &mut pick, 0, 0, &mut best);
        best
    }
}

/// Exhaustive integer-lattice oracle for small all-integer instances.
mod lattice_oracle {
    use gridplan_core::lp::{LinearProgram, Sense};

    pub fn best_point(lp: &LinearProgram) -> Option<f64> {
        let n = lp.num_cols();
        let ranges: Vec<(i64, i64)> = (0..n)
            .map(|j| (lp.lower[j].ceil() as i64, lp.upper[j].floor() as i64))
            .collect();
        let mut best: Option<f64> = None;
        let mut point = vec![0i64; n];
        fn walk(
            lp: &LinearProgram,
            ranges: &[(i64, i64)],
            point: &mut Vec<i64>,
            depth: usize,
            best: &mut Option<f64>,
        ) {
            if depth == ranges.len() {
                let x: Vec<f64> = point.iter().map(|&v| v as f64).collect();
                for row in &lp.rows {
                    let lhs: f64 = row.coeffs.iter().map(|&(c, a)| a * x[c]).sum();
                    let ok = match row.sense {
                        Sense::Le => lhs <= row.rhs + 1e-9,
                        Sense::Ge => lhs >= row.rhs - 1e-9,
                        Sense::Eq => (lhs - row.rhs).abs() <= 1e-9,
                    };
                    if !ok {
                        return;
                    }
                }
                let obj = lp.objective_value(&x);
                if best.map_or(true, |cur| obj < cur) {
                    *best = Some(obj);
                }
                return;
            }
            for v in ranges[depth].0..=ranges[depth].1 {
                point[depth] = v;
                walk(lp, ranges, point, depth + 1, best);
            }
        }
        walk(lp, &ranges, &mut point, 0, &mut best);
        best
    }
}

// ---------------------------------------------------------------------------
// Shared archetype runs (criteria 1, 3, 5, 6 reuse one set of solves).
// ---------------------------------------------------------------------------

struct ArchRun {
    archetype: Archetype,
    profile: DayProfile,
    outcome: DayOutcome,
    wall_s: f64,
}

fn archetype_runs() -> &'static Vec<ArchRun> {
    static RUNS: OnceLock<Vec<ArchRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut cfg = ModelConfig::standard();
        // Desk instances solve in well under a second; a 30 s budget keeps
        // a hung solve from stalling the suite.
        cfg.solver.time_budget = 30.0;
        Archetype::ALL
            .iter()
            .map(|&archetype| {
                let profile = synth_day(1, archetype);
                let t0 = Instant::now();
                let outcome = run_day(&profile, &cfg)
                    .unwrap_or_else(|e| panic!("{archetype:?} failed: {e}"));
                ArchRun {
                    archetype,
                    profile,
                    outcome,
                    wall_s: t0.elapsed().as_secs_f64(),
                }
            })
            .collect()
    })
}

fn savings(archetype: Archetype) -> f64 {
    archetype_runs()
        .iter()
        .find(|r| r.archetype == archetype)
        .expect("archetype present")
        .outcome
        .report
        .energy_cost_savings_pct
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

/// Criterion 1: every archetype lands at 10.0% +/- 0.1 peak reduction with
/// the default config, in under 10 seconds per day.
#[test]
fn criterion_1_peak_reduction() {
    for run in archetype_runs() {
        let red = run.outcome.report.peak_reduction_pct;
        assert!(
            (red - 10.0).abs() <= 0.1,
            "criterion 1: {:?} peak reduction {red:.4}% not within 10.0 +/- 0.1",
            run.archetype
        );
        assert!(
            run.wall_s < 10.0,
            "criterion 1: {:?} took {:.2}s (budget 10s)",
            run.archetype,
            run.wall_s
        );
    }
    println!(
        "criterion 1: PASS - peak reduction 10.0% +/- 0.1 on all {} archetypes, max {:.2}s/day",
        archetype_runs().len(),
        archetype_runs()
            .iter()
            .map(|r| r.wall_s)
            .fold(0.0f64, f64::max)
    );
}

/// Criterion 2: candidate hours {7,8,9,10,17,18} group into exactly the
/// events [7-10] and [17-18] under the default thresholds.
#[test]
fn criterion_2_event_grouping() {
    // Build a day whose thresholds select exactly those hours: load clears
    // gamma * peak on 7-10 and 17-18; price clears the 150 floor on 17-18.
    let mut total = [0.49; 24];
    for t in 7..=10 {
        total[t] = 0.686;
    }
    total[17] = 0.659;
    total[18] = 0.70;
    let mut price = [95.0; 24];
    price[17] = 219.79;
    price[18] = 219.79;
    let profile = DayProfile {
        label: "grouping".into(),
        price,
        loads: vec![Load {
            id: "all".into(),
            class: LoadClass::Flexible,
            demand: total,
        }],
        solar_units: vec![],
    };
    let cfg = ModelConfig::standard();
    let agg = aggregate(&profile);
    // Sanity: the candidate set really is {7..=10, 17, 18}.
    let sig = gridplan_core::dr_events::signal(&agg, &cfg).unwrap();
    let candidates: Vec<usize> = (0..24).filter(|&t| sig.candidate[t]).collect();
    assert_eq!(
        candidates,
        vec![7, 8, 9, 10, 17, 18],
        "criterion 2: unexpected candidate set"
    );
    let events = identify_events(&agg, &cfg).unwrap();
    let spans: Vec<_> = events.iter().map(|e| (e.start_hour, e.end_hour)).collect();
    assert_eq!(
        spans,
        vec![(7, 10), (17, 18)],
        "criterion 2: wrong event grouping"
    );
    println!("criterion 2: PASS - candidates {{7,8,9,10,17,18}} group into [7-10] and [17-18]");
}

/// Criterion 3: energy-cost savings order across archetypes: high solar beats
/// the weekday, the weekday is positive, and low-solar-high-price is the
/// floor of the set.
#[test]
fn criterion_3_savings_ordering() {
    let high_solar = savings(Archetype::HighSolarLowPrice);
    let weekday = savings(Archetype::Weekday);
    let lshp = savings(Archetype::LowSolarHighPrice);
    assert!(
        high_solar > weekday,
        "criterion 3: high-solar {high_solar:.2}% must exceed weekday {weekday:.2}%"
    );
    assert!(weekday > 0.0, "criterion 3: weekday savings must be positive");
    for &other in &Archetype::ALL {
        if other == Archetype::LowSolarHighPrice {
            continue;
        }
        let s = savings(other);
        assert!(
            lshp < s,
            "criterion 3: low-solar-high-price {lshp:.2}% must be the minimum, but {other:?} has {s:.2}%"
        );
    }
    println!(
        "criterion 3: PASS - savings ordering holds (high-solar {high_solar:.1}% > weekday {weekday:.1}% > 0, min is low-solar-high-price {lshp:.1}%)"
    );
}

/// Criterion 4: the embedded simplex against brute-force vertex enumeration
/// on 220 random bounded LPs (1e-6 absolute), and branch-and-bound against
/// exhaustive lattice enumeration on 60 random 3-integer instances.
#[test]
fn criterion_4_solver_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240915);
    let opts = SolverOptions::default();

    // Anchored (always feasible) random LPs.
    let mut lp_checked = 0;
    while lp_checked < 220 {
        let lp = random_box_lp(&mut rng, true);
        let oracle = vertex_oracle::best_vertex(&lp);
        let res = solve_lp(&lp, &opts).expect("solve failed");
        let oracle_obj = oracle.expect("anchored instance must have a feasible vertex");
        assert_eq!(
            res.status,
            SolveStatus::Optimal,
            "criterion 4: simplex called a feasible instance {:?}",
            res.status
        );
        assert!(
            (res.objective - oracle_obj).abs() <= 1e-6,
            "criterion 4: simplex {:.9} vs oracle {:.9} (diff {:.2e})",
            res.objective,
            oracle_obj,
            (res.objective - oracle_obj).abs()
        );
        assert!(
            lp.max_violation(&res.values) <= 1e-6,
            "criterion 4: solution violates constraints by {:.2e}",
            lp.max_violation(&res.values)
        );
        lp_checked += 1;
    }

    // Unanchored instances: statuses must agree with the oracle.
    let mut infeasible_seen = 0;
    for _ in 0..30 {
        let lp = random_box_lp(&mut rng, false);
        let oracle = vertex_oracle::best_vertex(&lp);
        let res = solve_lp(&lp, &opts).expect("solve failed");
        match oracle {
            Some(obj) => {
                assert_eq!(res.status, SolveStatus::Optimal, "criterion 4: status mismatch");
                assert!(
                    (res.objective - obj).abs() <= 1e-6,
                    "criterion 4: {:.9} vs {:.9}",
                    res.objective,
                    obj
                );
            }
            None => {
                infeasible_seen += 1;
                assert_eq!(
                    res.status,
                    SolveStatus::Infeasible,
                    "criterion 4: oracle says infeasible, simplex says {:?}",
                    res.status
                );
            }
        }
    }

    // Branch-and-bound vs exhaustive enumeration, exact (gap 0).
    let exact = SolverOptions {
        rel_gap: 0.0,
        ..SolverOptions::default()
    };
    for k in 0..60 {
        let lp = random_integer_lp(&mut rng);
        let integral: Vec<usize> = (0..lp.num_cols()).collect();
        let oracle = lattice_oracle::best_point(&lp);
        let res = solve_bnb(&lp, &integral, &exact).expect("bnb failed");
        match oracle {
            Some(obj) => {
                assert_eq!(
                    res.status,
                    SolveStatus::Optimal,
                    "criterion 4: bnb instance {k} status {:?}",
                    res.status
                );
                assert!(
                    (res.objective - obj).abs() <= 1e-9,
                    "criterion 4: bnb {:.12} vs enumeration {:.12}",
                    res.objective,
                    obj
                );
                for (j, v) in res.values.iter().enumerate() {
                    assert!(
                        (v - v.round()).abs() <= 1e-9,
                        "criterion 4: bnb column {j} not integral: {v}"
                    );
                }
            }
            None => {
                assert_eq!(res.status, SolveStatus::Infeasible, "criterion 4: bnb instance {k}");
            }
        }
    }

    println!(
        "criterion 4: PASS - 250 random LPs match vertex enumeration within 1e-6 ({infeasible_seen} infeasible agreed), 60 integer instances match exhaustive search"
    );
}

fn random_box_lp(rng: &mut ChaCha8Rng, anchored: bool) -> LinearProgram {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(0..=6);
    let mut lp = LinearProgram::new("rand");
    let mut x0 = Vec::with_capacity(n);
    for j in 0..n {
        let ub = rng.gen_range(1.0..10.0);
        lp.add_col(format!("x{j}"), 0.0, ub, rng.gen_range(-5.0..5.0));
        x0.push(rng.gen_range(0.0..ub));
    }
    for i in 0..m {
        let mut coeffs = Vec::new();
        let mut activity = 0.0;
        for (j, &xj) in x0.iter().enumerate() {
            if rng.gen_bool(0.7) {
                let a = rng.gen_range(-3.0..3.0);
                coeffs.push((j, a));
                activity += a * xj;
            }
        }
        if coeffs.is_empty() {
            coeffs.push((0, 1.0));
            activity = x0[0];
        }
        let (sense, rhs) = if anchored {
            match rng.gen_range(0..10) {
                0 => (Sense::Eq, activity),
                k if k < 6 => (Sense::Le, activity + rng.gen_range(0.0..2.0)),
                _ => (Sense::Ge, activity - rng.gen_range(0.0..2.0)),
            }
        } else {
            let sense = if rng.gen_bool(0.5) { Sense::Le } else { Sense::Ge };
            (sense, rng.gen_range(-6.0..6.0))
        };
        lp.add_row(format!("r{i}"), coeffs, sense, rhs);
    }
    lp
}

fn random_integer_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let mut lp = LinearProgram::new("int");
    let mut x0 = Vec::new();
    for j in 0..3 {
        let ub = rng.gen_range(1..=4) as f64;
        lp.add_col(format!("z{j}"), 0.0, ub, rng.gen_range(-5.0..5.0));
        x0.push(rng.gen_range(0..=(ub as i64)) as f64);
    }
    let m = rng.gen_range(1..=4);
    for i in 0..m {
        let mut coeffs = Vec::new();
        let mut activity = 0.0;
        for (j, &xj) in x0.iter().enumerate() {
            if rng.gen_bool(0.8) {
                let a = rng.gen_range(-3.0..3.0);
                coeffs.push((j, a));
                activity += a * xj;
            }
        }
        if coeffs.is_empty() {
            coeffs.push((0, 1.0));
            activity = x0[0];
        }
        if rng.gen_bool(0.85) {
            lp.add_row(format!("r{i}"), coeffs, Sense::Le, activity + rng.gen_range(0.0..1.5));
        } else {
            lp.add_row(format!("r{i}"), coeffs, Sense::Ge, activity - rng.gen_range(0.0..1.5));
        }
    }
    lp
}

/// Criterion 5: on every optimal archetype solve the independent verifier is
/// clean at 1e-6, shift conservation holds at 1e-9, and SOC stays inside the
/// 20-95% band.
#[test]
fn criterion_5_feasibility_verification() {
    let cfg = ModelConfig::standard();
    for run in archetype_runs() {
        assert_eq!(
            run.outcome.schedule.status,
            SolveStatus::Optimal,
            "criterion 5: {:?} not optimal",
            run.archetype
        );
        let violations = verify(&run.outcome.schedule, &run.profile, &run.outcome.events, &cfg);
        assert!(
            violations.is_empty(),
            "criterion 5: {:?} has violations: {violations:?}",
            run.archetype
        );
        // Shift conservation, re-checked here at the tighter tolerance.
        for (l, _) in run.profile.loads.iter().enumerate() {
            let departed: f64 = (0..24).map(|t| run.outcome.schedule.shift_out(l, t)).sum();
            let arrived: f64 = (0..24)
                .map(|t| run.outcome.schedule.shift_in(l, t, cfg.eta_shift))
                .sum();
            assert!(
                (arrived - cfg.eta_shift * departed).abs() <= 1e-9,
                "criterion 5: {:?} shift conservation off by {:.2e}",
                run.archetype,
                (arrived - cfg.eta_shift * departed).abs()
            );
        }
        for (b, bat) in cfg.batteries.iter().enumerate() {
            for t in 0..24 {
                let soc = run.outcome.schedule.soc[b][t];
                assert!(
                    soc >= bat.soc_min * bat.capacity - 1e-9
                        && soc <= bat.soc_max * bat.capacity + 1e-9,
                    "criterion 5: {:?} SOC {soc:.6} out of band at (b={b},t={t})",
                    run.archetype
                );
            }
        }
    }
    println!("criterion 5: PASS - verifier clean on all archetype solves, shift conservation 1e-9, SOC in [20%, 95%]");
}

/// Criterion 6: the recomputed decomposition equals the solver objective
/// within 1e-6 relative on every solve.
#[test]
fn criterion_6_objective_decomposition() {
    for run in archetype_runs() {
        let gap = run.outcome.report.objective_identity_gap;
        assert!(
            gap <= 1e-6,
            "criterion 6: {:?} identity gap {gap:.2e}",
            run.archetype
        );
    }
    println!("criterion 6: PASS - objective decomposition closes within 1e-6 relative on every solve");
}

/// Criterion 7: with no events, batteries, or solar, the optimized energy
/// cost is exactly the price-weighted demand and every saving is zero.
#[test]
fn criterion_7_null_intervention() {
    // Isolated one-hour peak: the candidate run is shorter than t_min, so no
    // events form; prices stay under the 150 floor.
    let mut demand = [0.40; 24];
    demand[8] = 0.52;
    let profile = DayProfile {
        label: "null".into(),
        price: std::array::from_fn(|t| 90.0 + (t as f64) * 0.5),
        loads: vec![Load {
            id: "all".into(),
            class: LoadClass::Curtailable,
            demand,
        }],
        solar_units: vec![],
    };
    let mut cfg = ModelConfig::standard();
    cfg.batteries.clear();

    let out = run_day(&profile, &cfg).expect("null-intervention run");
    assert!(out.events.is_empty(), "criterion 7: expected zero events");
    let expected: f64 = (0..24).map(|t| profile.price[t] * demand[t]).sum();
    let rel = (out.report.optimized_energy_cost - expected).abs() / expected;
    assert!(
        rel <= 1e-9,
        "criterion 7: energy cost {:.9} differs from price*demand {:.9} (rel {:.2e})",
        out.report.optimized_energy_cost,
        expected,
        rel
    );
    for (name, v) in [
        ("energy", out.report.energy_cost_savings_pct),
        ("peak", out.report.peak_charge_savings_pct),
        ("total", out.report.total_cost_savings_pct),
        ("peak reduction", out.report.peak_reduction_pct),
    ] {
        assert!(
            v.abs() <= 1e-7,
            "criterion 7: {name} savings should be 0.0%, got {v:.2e}"
        );
    }
    println!("criterion 7: PASS - null intervention reproduces price*demand exactly, all savings 0.0%");
}

/// Criterion 8 (manual): export the last-day-style instance as MPS, solve it
/// with an external LP solver (scipy/HiGHS via python3), and compare to the
/// embedded objective within 1e-4 relative. Also round-trips the file through
/// our own parser. Not CI-gated; run with `-- --ignored --nocapture`.
#[test]
#[ignore = "requires python3 + scipy; see README"]
fn criterion_8_mps_cross_check() {
    let cfg = ModelConfig::standard();
    let profile = synth_day(1, Archetype::Weekday);
    let agg = aggregate(&profile);
    let events = identify_events(&agg, &cfg).unwrap();
    let model = gridplan_core::lp::build_model(&profile, &events, &cfg).unwrap();
    let opts = SolverOptions::from_config(&cfg.solver);
    let embedded = solve_lp(&model.lp, &opts).unwrap();
    assert_eq!(embedded.status, SolveStatus::Optimal);

    // Round trip through our own reader first.
    let doc = emit_mps(&model.lp);
    let reparsed = parse_mps(&doc.text).unwrap();
    let re_solved = solve_lp(&reparsed.lp, &opts).unwrap();
    let rt_rel = (re_solved.objective - embedded.objective).abs() / embedded.objective.abs();
    assert!(rt_rel <= 1e-9, "criterion 8: MPS round trip drifted {rt_rel:.2e}");

    let dir = std::env::temp_dir().join("gridplan-mps-crosscheck");
    std::fs::create_dir_all(&dir).unwrap();
    let mps_path = dir.join("model.mps");
    std::fs::write(&mps_path, &doc.text).unwrap();
    let script_path = dir.join("solve_mps.py");
    std::fs::write(&script_path, PYTHON_MPS_SOLVER).unwrap();

    let output = Command::new("python3")
        .arg(&script_path)
        .arg(&mps_path)
        .output()
        .expect("criterion 8: python3 not available");
    assert!(
        output.status.success(),
        "criterion 8: external solve failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let external: f64 = String::from_utf8_lossy(&output.stdout)
        .trim()
        .parse()
        .expect("criterion 8: unparseable external objective");
    let rel = (external - embedded.objective).abs() / embedded.objective.abs();
    assert!(
        rel <= 1e-4,
        "criterion 8: external {external:.6} vs embedded {:.6} (rel {rel:.2e})",
        embedded.objective
    );
    println!(
        "criterion 8: PASS - external solver objective {external:.4} matches embedded {:.4} (rel {rel:.2e})",
        embedded.objective
    );
}

/// Minimal reader for the MPS dialect this tool emits, solved with HiGHS.
const PYTHON_MPS_SOLVER: &str = r#"
import sys
import numpy as np
from scipy.optimize import linprog

INF = float("inf")

def read_mps(path):
    rows = {}        # name -> (sense, index)
    row_order = []
    obj_row = None
    cols = {}        # name -> index
    entries = []     # (row_idx, col_idx, value)
    obj = {}
    rhs = {}
    bounds = {}
    section = None
    with open(path) as f:
        for raw in f:
            if raw.startswith("*") or not raw.strip():
                continue
            if not raw[0].isspace():
                section = raw.split()[0]
                continue
            toks = raw.split()
            if section == "ROWS":
                kind, name = toks
                if kind == "N":
                    obj_row = name
                else:
                    rows[name] = (kind, len(row_order))
                    row_order.append(name)
            elif section == "COLUMNS":
                name = toks[0]
                if name not in cols:
                    cols[name] = len(cols)
                j = cols[name]
                for rname, val in zip(toks[1::2], toks[2::2]):
                    v = float(val)
                    if rname == obj_row:
                        obj[j] = obj.get(j, 0.0) + v
                    else:
                        entries.append((rows[rname][1], j, v))
            elif section == "RHS":
                for rname, val in zip(toks[1::2], toks[2::2]):
                    rhs[rows[rname][1]] = float(val)
            elif section == "BOUNDS":
                kind, _, cname = toks[0], toks[1], toks[2]
                j = cols[cname]
                lo, hi = bounds.get(j, (0.0, INF))
                if kind == "UP":
                    hi = float(toks[3])
                elif kind == "LO":
                    lo = float(toks[3])
                elif kind == "FX":
                    lo = hi = float(toks[3])
                elif kind == "FR":
                    lo, hi = -INF, INF
                elif kind == "MI":
                    lo = -INF
                elif kind == "PL":
                    hi = INF
                bounds[j] = (lo, hi)
    n = len(cols)
    m = len(row_order)
    c = np.zeros(n)
    for j, v in obj.items():
        c[j] = v
    a = np.zeros((m, n))
    for i, j, v in entries:
        a[i, j] += v
    b = np.zeros(m)
    for i, v in rhs.items():
        b[i] = v
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for name in row_order:
        kind, i = rows[name]
        if kind == "L":
            a_ub.append(a[i]); b_ub.append(b[i])
        elif kind == "G":
            a_ub.append(-a[i]); b_ub.append(-b[i])
        else:
            a_eq.append(a[i]); b_eq.append(b[i])
    bnds = [bounds.get(j, (0.0, INF)) for j in range(n)]
    bnds = [(None if lo == -INF else lo, None if hi == INF else hi) for lo, hi in bnds]
    res = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bnds,
        method="highs",
    )
    if res.status != 0:
        print(f"solver status {res.status}: {res.message}", file=sys.stderr)
        sys.exit(1)
    return res.fun

print(repr(read_mps(sys.argv[1])))
"#;

/// Criterion 9: identical runs with --no-timestamp produce byte-identical
/// outputs, exercised through the actual binary.
#[test]
fn criterion_9_determinism() {
    let bin = env!("CARGO_BIN_EXE_gridplan");
    let dir = std::env::temp_dir().join(format!("gridplan-acc9-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();

    // One synthetic day, optimized twice.
    let synth = Command::new(bin)
        .args(["synth", "--archetype", "weekday", "--seed", "1", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(synth.status.success(), "criterion 9: synth failed");
    let day = dir.join("weekday-1.csv");
    for run in ["r1", "r2"] {
        let out = Command::new(bin)
            .args(["optimize", "--no-timestamp", "--in"])
            .arg(&day)
            .arg("--out")
            .arg(dir.join(run))
            .output()
            .unwrap();
        assert!(out.status.success(), "criterion 9: optimize failed");
    }
    for file in ["report.json", "schedule.csv", "events.json", "schedule.json"] {
        let a = std::fs::read(dir.join("r1").join(file)).unwrap();
        let b = std::fs::read(dir.join("r2").join(file)).unwrap();
        assert_eq!(a, b, "criterion 9: {file} differs between runs");
    }

    // The full seven-archetype batch, twice.
    for run in ["b1", "b2"] {
        let out = Command::new(bin)
            .args(["batch", "--seed", "1", "--jobs", "4", "--no-timestamp", "--out"])
            .arg(dir.join(run))
            .output()
            .unwrap();
        assert!(out.status.success(), "criterion 9: batch failed");
    }
    let a = std::fs::read(dir.join("b1").join("table.csv")).unwrap();
    let b = std::fs::read(dir.join("b2").join("table.csv")).unwrap();
    assert_eq!(a, b, "criterion 9: table.csv differs between runs");

    println!("criterion 9: PASS - byte-identical report.json, schedule.csv, events.json, table.csv across repeated runs");
}

/// The degenerate-instance examples from the solver contract, pinned here so
/// the acceptance target is self-contained.
#[test]
fn solver_contract_examples() {
    let opts = SolverOptions::default();
    // min -x, x in [0,1]
    let mut lp = LinearProgram::new("a");
    lp.add_col("x", 0.0, 1.0, -1.0);
    let res = solve_lp(&lp, &opts).unwrap();
    assert!((res.objective + 1.0).abs() < 1e-9);
    // min x+y st x+y >= 2, x,y in [0,3]
    let mut lp = LinearProgram::new("b");
    let x = lp.add_col("x", 0.0, 3.0, 1.0);
    let y = lp.add_col("y", 0.0, 3.0, 1.0);
    lp.add_row("r", vec![(x, 1.0), (y, 1.0)], Sense::Ge, 2.0);
    let res = solve_lp(&lp, &opts).unwrap();
    assert!((res.objective - 2.0).abs() < 1e-9);
    // min -x, x in [0, 2.5] integral -> -2
    let mut lp = LinearProgram::new("c");
    let x = lp.add_col("x", 0.0, 2.5, -1.0);
    let res = solve_bnb(&lp, &[x], &opts).unwrap();
    assert!((res.objective + 2.0).abs() < 1e-9);
    // unbounded detection
    let mut lp = LinearProgram::new("d");
    lp.add_col("x", 0.0, INF, -1.0);
    let res = solve_lp(&lp, &opts).unwrap();
    assert_eq!(res.status, SolveStatus::Unbounded);
}

/// Keep the solar series assumptions of criterion 1 visible: the spike hours
/// carry no solar in any archetype (the peak pin depends on it).
#[test]
fn archetype_spike_hours_have_no_solar() {
    for run in archetype_runs() {
        for unit in &run.profile.solar_units {
            assert_eq!(unit.avail[17], 0.0);
            assert_eq!(unit.avail[18], 0.0);
        }
    }
}
