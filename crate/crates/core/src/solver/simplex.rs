//! Bounded-variable primal simplex with a two-phase start.
//!
//! Every row gets a logical column turning it into an equality; rows whose
//! logical starts outside its bounds get an artificial column, and phase 1
//! drives the artificials to zero. The basis inverse is kept explicitly and
//! refactored from a dense LU every `REFACTOR_EVERY` pivots. Pivot selection
//! is Dantzig with index tie-breaking, falling back to Bland's rule while the
//! iteration is stalling, so runs are deterministic.

use std::time::Instant;

use crate::lp::{LinearProgram, Sense, INF};
use crate::solver::dense::Lu;
use crate::solver::{SolverError, SolverOptions};

const REFACTOR_EVERY: u64 = 50;
const PIVOT_TOL: f64 = 1e-9;
const STALL_LIMIT: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexStatus {
    Optimal,
    Infeasible,
    Unbounded,
    TimeLimit,
}

pub struct SimplexOutcome {
    pub status: SimplexStatus,
    /// Values of the structural columns.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row duals with respect to the real objective.
    pub duals: Vec<f64>,
    pub iterations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column, held at zero.
    FreeZero,
}

struct Engine {
    m: usize,
    /// Structural column count; logicals and artificials follow.
    n_struct: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    /// Phase-2 costs (structural costs; zeros elsewhere).
    cost: Vec<f64>,
    rhs: Vec<f64>,
    x: Vec<f64>,
    state: Vec<ColState>,
    basis: Vec<usize>,
    /// Row-major m x m basis inverse.
    b_inv: Vec<f64>,
    iterations: u64,
    pivots_since_refactor: u64,
    stall_count: u64,
    started: Instant,
    time_budget: f64,
    opt_tol: f64,
    max_iterations: u64,
}

enum PhaseEnd {
    Converged,
    Unbounded,
    TimeLimit,
}

impl Engine {
    fn new(lp: &LinearProgram, opts: &SolverOptions) -> Engine {
        let m = lp.num_rows();
        let n = lp.num_cols();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(c, a) in &row.coeffs {
                cols[c].push((i, a));
            }
        }
        let mut lb = lp.lower.clone();
        let mut ub = lp.upper.clone();
        let mut cost = lp.objective.clone();
        let mut rhs = Vec::with_capacity(m);
        // Logical column per row: row + logical = rhs.
        for (i, row) in lp.rows.iter().enumerate() {
            cols.push(vec![(i, 1.0)]);
            let (l, u) = match row.sense {
                Sense::Le => (0.0, INF),
                Sense::Ge => (-INF, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lb.push(l);
            ub.push(u);
            cost.push(0.0);
            rhs.push(row.rhs);
        }
        let total = n + m;
        Engine {
            m,
            n_struct: n,
            cols,
            lb,
            ub,
            cost,
            rhs,
            x: vec![0.0; total],
            state: vec![ColState::AtLower; total],
            basis: Vec::new(),
            b_inv: Vec::new(),
            iterations: 0,
            pivots_since_refactor: 0,
            stall_count: 0,
            started: Instant::now(),
            time_budget: opts.time_budget,
            opt_tol: opts.optimality_tol,
            max_iterations: opts.max_iterations,
        }
    }

    fn nonbasic_resting_state(&self, j: usize) -> (ColState, f64) {
        if self.lb[j].is_finite() {
            (ColState::AtLower, self.lb[j])
        } else if self.ub[j].is_finite() {
            (ColState::AtUpper, self.ub[j])
        } else {
            (ColState::FreeZero, 0.0)
        }
    }

    /// Row activity of the nonbasic part.
    fn nonbasic_activity(&self) -> Vec<f64> {
        let mut act = vec![0.0; self.m];
        for j in 0..self.cols.len() {
            if self.state[j] == ColState::Basic || self.x[j] == 0.0 {
                continue;
            }
            for &(r, a) in &self.cols[j] {
                act[r] += a * self.x[j];
            }
        }
        act
    }

    fn refactor(&mut self) -> Result<(), SolverError> {
        let m = self.m;
        let mut b = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for &(r, a) in &self.cols[j] {
                b[r * m + k] = a;
            }
        }
        let lu = Lu::factor(b, m).ok_or(SolverError::Numerical {
            iteration: self.iterations,
            detail: "singular basis at refactorization".into(),
        })?;
        self.b_inv = lu.inverse();
        // Recompute basic values from scratch to shed accumulated drift.
        let act = self.nonbasic_activity();
        let resid: Vec<f64> = (0..m).map(|i| self.rhs[i] - act[i]).collect();
        for (k, &j) in self.basis.iter().enumerate() {
            let mut v = 0.0;
            for i in 0..m {
                v += self.b_inv[k * m + i] * resid[i];
            }
            self.x[j] = v;
        }
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            let c = cost[j];
            if c != 0.0 {
                for i in 0..m {
                    y[i] += c * self.b_inv[k * m + i];
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64], cost: &[f64]) -> f64 {
        let mut d = cost[j];
        for &(r, a) in &self.cols[j] {
            d -= y[r] * a;
        }
        d
    }

    /// `B^-1 A_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut w = vec![0.0; m];
        for &(r, a) in &self.cols[j] {
            if a != 0.0 {
                for i in 0..m {
                    w[i] += self.b_inv[i * m + r] * a;
                }
            }
        }
        w
    }

    fn run_phase(&mut self, cost: &[f64]) -> Result<PhaseEnd, SolverError> {
        loop {
            if self.iterations >= self.max_iterations {
                return Err(SolverError::IterationLimit(self.max_iterations));
            }
            if self.iterations % 64 == 0
                && self.started.elapsed().as_secs_f64() > self.time_budget
            {
                return Ok(PhaseEnd::TimeLimit);
            }
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }

            let y = self.duals(cost);
            let bland = self.stall_count >= STALL_LIMIT;

            // Pricing.
            let mut entering: Option<(usize, f64, i8)> = None; // (col, |d|, dir)
            for j in 0..self.cols.len() {
                if self.state[j] == ColState::Basic || self.lb[j] == self.ub[j] {
                    continue;
                }
                let d = self.reduced_cost(j, &y, cost);
                let dir: i8 = match self.state[j] {
                    ColState::AtLower if d < -self.opt_tol => 1,
                    ColState::AtUpper if d > self.opt_tol => -1,
                    ColState::FreeZero if d.abs() > self.opt_tol => {
                        if d < 0.0 {
                            1
                        } else {
                            -1
                        }
                    }
                    _ => continue,
                };
                if bland {
                    entering = Some((j, d.abs(), dir));
                    break;
                }
                match entering {
                    Some((_, best, _)) if d.abs() <= best => {}
                    _ => entering = Some((j, d.abs(), dir)),
                }
            }

            let Some((j_in, _, dir)) = entering else {
                return Ok(PhaseEnd::Converged);
            };
            let dir = dir as f64;

            let w = self.ftran(j_in);

            // Ratio test: how far can x[j_in] move along `dir`.
            let own_span = self.ub[j_in] - self.lb[j_in]; // INF allowed
            let mut best_step = own_span;
            let mut leaving: Option<(usize, f64, bool)> = None; // (basis slot, |w|, to_upper)
            for (k, &bj) in self.basis.iter().enumerate() {
                let delta = dir * w[k]; // basic value moves by -delta * step
                if delta > PIVOT_TOL {
                    if self.lb[bj].is_finite() {
                        let step = (self.x[bj] - self.lb[bj]) / delta;
                        if step < best_step - 1e-12
                            || (step < best_step + 1e-12 && better_tie(&leaving, k, w[k], bland, &self.basis))
                        {
                            best_step = step.max(0.0);
                            leaving = Some((k, w[k].abs(), false));
                        }
                    }
                } else if delta < -PIVOT_TOL && self.ub[bj].is_finite() {
                    let step = (self.ub[bj] - self.x[bj]) / -delta;
                    if step < best_step - 1e-12
                        || (step < best_step + 1e-12 && better_tie(&leaving, k, w[k], bland, &self.basis))
                    {
                        best_step = step.max(0.0);
                        leaving = Some((k, w[k].abs(), true));
                    }
                }
            }

            if best_step.is_infinite() {
                return Ok(PhaseEnd::Unbounded);
            }

            self.iterations += 1;
            if best_step < 1e-10 {
                self.stall_count += 1;
            } else {
                self.stall_count = 0;
            }

            // Apply the move.
            let step = best_step;
            for (k, &bj) in self.basis.iter().enumerate() {
                self.x[bj] -= dir * w[k] * step;
            }
            self.x[j_in] += dir * step;

            match leaving {
                None => {
                    // Bound flip: j_in travelled its whole span.
                    self.state[j_in] = if dir > 0.0 {
                        ColState::AtUpper
                    } else {
                        ColState::AtLower
                    };
                    // Snap to the exact bound.
                    self.x[j_in] = if dir > 0.0 { self.ub[j_in] } else { self.lb[j_in] };
                }
                Some((slot, _, to_upper)) => {
                    let j_out = self.basis[slot];
                    self.x[j_out] = if to_upper { self.ub[j_out] } else { self.lb[j_out] };
                    self.state[j_out] = if to_upper {
                        ColState::AtUpper
                    } else {
                        ColState::AtLower
                    };
                    self.state[j_in] = ColState::Basic;
                    self.basis[slot] = j_in;
                    self.update_b_inv(slot, &w)?;
                    self.pivots_since_refactor += 1;
                }
            }
        }
    }

    /// Product-form update of the explicit inverse after column `slot` of the
    /// basis is replaced; `w` is the ftran of the entering column.
    fn update_b_inv(&mut self, slot: usize, w: &[f64]) -> Result<(), SolverError> {
        let m = self.m;
        let piv = w[slot];
        if piv.abs() < 1e-11 {
            return Err(SolverError::Numerical {
                iteration: self.iterations,
                detail: format!("pivot element {piv:.3e} too small in basis update"),
            });
        }
        let row_slot: Vec<f64> = (0..m).map(|c| self.b_inv[slot * m + c] / piv).collect();
        for i in 0..m {
            if i == slot {
                continue;
            }
            let f = w[i];
            if f != 0.0 {
                for c in 0..m {
                    self.b_inv[i * m + c] -= f * row_slot[c];
                }
            }
        }
        self.b_inv[slot * m..(slot + 1) * m].copy_from_slice(&row_slot);
        Ok(())
    }
}

fn better_tie(
    current: &Option<(usize, f64, bool)>,
    k: usize,
    w_k: f64,
    bland: bool,
    basis: &[usize],
) -> bool {
    match current {
        None => true,
        Some((cur_k, cur_w, _)) => {
            if bland {
                basis[k] < basis[*cur_k]
            } else {
                let (a, b) = (w_k.abs(), *cur_w);
                a > b + 1e-12 || ((a - b).abs() <= 1e-12 && basis[k] < basis[*cur_k])
            }
        }
    }
}

/// LPs with no rows reduce to bound selection.
fn trivial_solve(lp: &LinearProgram, opts: &SolverOptions) -> SimplexOutcome {
    let n = lp.num_cols();
    let mut x = vec![0.0; n];
    for j in 0..n {
        let c = lp.objective[j];
        if c > opts.optimality_tol {
            if lp.lower[j].is_infinite() {
                return SimplexOutcome {
                    status: SimplexStatus::Unbounded,
                    x,
                    objective: -INF,
                    duals: Vec::new(),
                    iterations: 0,
                };
            }
            x[j] = lp.lower[j];
        } else if c < -opts.optimality_tol {
            if lp.upper[j].is_infinite() {
                return SimplexOutcome {
                    status: SimplexStatus::Unbounded,
                    x,
                    objective: -INF,
                    duals: Vec::new(),
                    iterations: 0,
                };
            }
            x[j] = lp.upper[j];
        } else if lp.lower[j].is_finite() {
            x[j] = lp.lower[j];
        } else if lp.upper[j].is_finite() {
            x[j] = lp.upper[j].min(0.0);
        }
    }
    let objective = lp.objective_value(&x);
    SimplexOutcome {
        status: SimplexStatus::Optimal,
        x,
        objective,
        duals: Vec::new(),
        iterations: 0,
    }
}

/// Solves `lp` to optimality (or detects infeasible/unbounded) with the
/// bounded-variable two-phase simplex.
pub fn solve(lp: &LinearProgram, opts: &SolverOptions) -> Result<SimplexOutcome, SolverError> {
    if lp.num_rows() == 0 {
        return Ok(trivial_solve(lp, opts));
    }
    // Columns with crossed bounds make the instance trivially infeasible.
    for j in 0..lp.num_cols() {
        if lp.lower[j] > lp.upper[j] {
            return Ok(SimplexOutcome {
                status: SimplexStatus::Infeasible,
                x: Vec::new(),
                objective: INF,
                duals: Vec::new(),
                iterations: 0,
            });
        }
    }

    let mut eng = Engine::new(lp, opts);
    let m = eng.m;
    let n = eng.n_struct;

    // Structural columns rest at a bound; logicals form the starting basis.
    for j in 0..n {
        let (st, v) = eng.nonbasic_resting_state(j);
        eng.state[j] = st;
        eng.x[j] = v;
    }
    let act = eng.nonbasic_activity();
    eng.basis = (n..n + m).collect();
    for i in 0..m {
        eng.state[n + i] = ColState::Basic;
        eng.x[n + i] = eng.rhs[i] - act[i];
    }

    // Rows whose logical starts out of bounds get an artificial column.
    let mut artificials: Vec<usize> = Vec::new();
    for i in 0..m {
        let s = n + i;
        let v = eng.x[s];
        let (viol, sigma, park) = if v < eng.lb[s] - 1e-12 {
            (eng.lb[s] - v, -1.0, ColState::AtLower)
        } else if v > eng.ub[s] + 1e-12 {
            (v - eng.ub[s], 1.0, ColState::AtUpper)
        } else {
            continue;
        };
        let a_col = eng.cols.len();
        eng.cols.push(vec![(i, sigma)]);
        eng.lb.push(0.0);
        eng.ub.push(INF);
        eng.cost.push(0.0);
        eng.x.push(viol);
        eng.state.push(ColState::Basic);
        // Park the logical at the violated bound and put the artificial in
        // its basis slot.
        eng.x[s] = if park == ColState::AtLower {
            eng.lb[s]
        } else {
            eng.ub[s]
        };
        eng.state[s] = park;
        eng.basis[i] = a_col;
        artificials.push(a_col);
    }

    eng.refactor()?;

    if !artificials.is_empty() {
        let mut phase1_cost = vec![0.0; eng.cols.len()];
        for &a in &artificials {
            phase1_cost[a] = 1.0;
        }
        match eng.run_phase(&phase1_cost)? {
            PhaseEnd::Converged => {}
            PhaseEnd::TimeLimit => {
                return Ok(SimplexOutcome {
                    status: SimplexStatus::TimeLimit,
                    x: eng.x[..n].to_vec(),
                    objective: lp.objective_value(&eng.x[..n]),
                    duals: Vec::new(),
                    iterations: eng.iterations,
                });
            }
            PhaseEnd::Unbounded => {
                return Err(SolverError::Numerical {
                    iteration: eng.iterations,
                    detail: "phase-1 objective unbounded below".into(),
                });
            }
        }
        let infeas: f64 = artificials.iter().map(|&a| eng.x[a]).sum();
        if infeas > opts.feasibility_tol.max(1e-9) {
            return Ok(SimplexOutcome {
                status: SimplexStatus::Infeasible,
                x: eng.x[..n].to_vec(),
                objective: INF,
                duals: Vec::new(),
                iterations: eng.iterations,
            });
        }
        // Artificials may not re-enter; any still basic sit at zero and leave
        // on first contact in the ratio test.
        for &a in &artificials {
            eng.ub[a] = 0.0;
            if eng.state[a] != ColState::Basic {
                eng.x[a] = 0.0;
                eng.state[a] = ColState::AtLower;
            }
        }
    }

    let cost = eng.cost.clone();
    let end = eng.run_phase(&cost)?;
    eng.refactor()?;
    let duals = eng.duals(&cost);
    let x = eng.x[..n].to_vec();
    let objective = lp.objective_value(&x);
    let status = match end {
        PhaseEnd::Converged => SimplexStatus::Optimal,
        PhaseEnd::Unbounded => SimplexStatus::Unbounded,
        PhaseEnd::TimeLimit => SimplexStatus::TimeLimit,
    };
    Ok(SimplexOutcome {
        status,
        x,
        objective,
        duals,
        iterations: eng.iterations,
    })
}
