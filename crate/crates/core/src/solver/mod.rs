//! LP solving: presolve, the embedded simplex engine, and a branch-and-bound
//! layer for columns marked integral.

mod dense;
mod presolve;
mod simplex;

pub use presolve::{presolve, PresolveOutcome, Presolved};
pub use simplex::{SimplexOutcome, SimplexStatus};

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::config::SolverConfig;
use crate::lp::{LinearProgram, INF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    /// Optimal but only with nonzero balance slack; set by the schedule layer.
    SoftInfeasible,
    Infeasible,
    Unbounded,
    TimeLimit,
}

/// Outcome of one solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: f64,
    /// One value per structural column; empty when no point is available.
    pub values: Vec<f64>,
    /// Row duals, present only for direct (unpresolved) simplex solves.
    pub duals: Option<Vec<f64>>,
    pub iterations: u64,
    pub wall_time_s: f64,
    /// Achieved relative gap, for branch-and-bound runs.
    pub gap: Option<f64>,
    /// Diagnostic detail, e.g. the row that presolve proved impossible.
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Wall-clock budget, seconds.
    pub time_budget: f64,
    /// Relative optimality gap for branch-and-bound pruning.
    pub rel_gap: f64,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Run presolve before the simplex. Disables dual output.
    pub presolve: bool,
    pub max_iterations: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            time_budget: 600.0,
            rel_gap: 0.01,
            feasibility_tol: 1e-7,
            optimality_tol: 1e-7,
            presolve: true,
            max_iterations: 500_000,
        }
    }
}

impl SolverOptions {
    pub fn from_config(cfg: &SolverConfig) -> Self {
        SolverOptions {
            time_budget: cfg.time_budget,
            rel_gap: cfg.rel_gap,
            feasibility_tol: cfg.feasibility_tol,
            optimality_tol: cfg.optimality_tol,
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid instance: {0}")]
    BadInstance(String),
    #[error("numerical breakdown at iteration {iteration}: {detail}")]
    Numerical { iteration: u64, detail: String },
    #[error("iteration limit {0} exceeded")]
    IterationLimit(u64),
}

fn outcome_to_result(out: SimplexOutcome, wall: f64, duals_ok: bool) -> SolveResult {
    let status = match out.status {
        SimplexStatus::Optimal => SolveStatus::Optimal,
        SimplexStatus::Infeasible => SolveStatus::Infeasible,
        SimplexStatus::Unbounded => SolveStatus::Unbounded,
        SimplexStatus::TimeLimit => SolveStatus::TimeLimit,
    };
    SolveResult {
        status,
        objective: out.objective,
        values: out.x,
        duals: if duals_ok && status == SolveStatus::Optimal {
            Some(out.duals)
        } else {
            None
        },
        iterations: out.iterations,
        wall_time_s: wall,
        gap: None,
        note: None,
    }
}

/// Solves a pure LP. With `opts.presolve` the instance is reduced first and
/// the solution mapped back; duals are then omitted.
pub fn solve_lp(lp: &LinearProgram, opts: &SolverOptions) -> Result<SolveResult, SolverError> {
    lp.check().map_err(SolverError::BadInstance)?;
    let started = Instant::now();

    if !opts.presolve {
        let out = simplex::solve(lp, opts)?;
        return Ok(outcome_to_result(out, started.elapsed().as_secs_f64(), true));
    }

    match presolve(lp) {
        PresolveOutcome::Infeasible { detail } => Ok(SolveResult {
            status: SolveStatus::Infeasible,
            objective: INF,
            values: Vec::new(),
            duals: None,
            iterations: 0,
            wall_time_s: started.elapsed().as_secs_f64(),
            gap: None,
            note: Some(detail),
        }),
        PresolveOutcome::Reduced(p) => {
            let out = simplex::solve(&p.lp, opts)?;
            let status = out.status;
            let mut result = outcome_to_result(out, 0.0, false);
            if status == SimplexStatus::Optimal || status == SimplexStatus::TimeLimit {
                let full = p.restore(&result.values);
                result.objective = lp.objective_value(&full);
                result.values = full;
            }
            result.wall_time_s = started.elapsed().as_secs_f64();
            Ok(result)
        }
    }
}

/// Branch-and-bound node ordered best-first by relaxation bound, ties by id.
struct Node {
    bound: f64,
    id: u64,
    overrides: Vec<(usize, f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert for smallest bound first.
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then(other.id.cmp(&self.id))
    }
}

const INT_TOL: f64 = 1e-6;

/// Best-first branch-and-bound over the columns listed in `integral`.
/// An empty set reduces to [`solve_lp`].
pub fn solve_bnb(
    lp: &LinearProgram,
    integral: &[usize],
    opts: &SolverOptions,
) -> Result<SolveResult, SolverError> {
    if integral.is_empty() {
        return solve_lp(lp, opts);
    }
    lp.check().map_err(SolverError::BadInstance)?;
    for &j in integral {
        if j >= lp.num_cols() {
            return Err(SolverError::BadInstance(format!(
                "integral column {j} out of range"
            )));
        }
    }

    let started = Instant::now();
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut next_id = 0u64;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes_explored = 0u64;
    let mut iterations = 0u64;
    let mut timed_out = false;

    heap.push(Node {
        bound: -INF,
        id: next_id,
        overrides: Vec::new(),
    });
    next_id += 1;

    let mut best_open_bound = -INF;

    while let Some(node) = heap.pop() {
        best_open_bound = node.bound;
        if started.elapsed().as_secs_f64() > opts.time_budget {
            timed_out = true;
            break;
        }
        if let Some((inc_obj, _)) = &incumbent {
            // Prune on the relative-gap cutoff.
            if node.bound >= inc_obj * (1.0 - opts.rel_gap) - 1e-12 {
                continue;
            }
        }

        let mut node_lp = lp.clone();
        let mut empty_box = false;
        for &(j, lo, hi) in &node.overrides {
            node_lp.lower[j] = node_lp.lower[j].max(lo);
            node_lp.upper[j] = node_lp.upper[j].min(hi);
            if node_lp.lower[j] > node_lp.upper[j] {
                empty_box = true;
            }
        }
        if empty_box {
            nodes_explored += 1;
            continue;
        }
        let relax = solve_lp(&node_lp, opts)?;
        nodes_explored += 1;
        iterations += relax.iterations;
        match relax.status {
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded => {
                if node.overrides.is_empty() {
                    return Ok(SolveResult {
                        status: SolveStatus::Unbounded,
                        objective: -INF,
                        values: Vec::new(),
                        duals: None,
                        iterations,
                        wall_time_s: started.elapsed().as_secs_f64(),
                        gap: None,
                        note: Some("relaxation unbounded at root".into()),
                    });
                }
                continue;
            }
            SolveStatus::TimeLimit => {
                timed_out = true;
                break;
            }
            _ => {}
        }

        if let Some((inc_obj, _)) = &incumbent {
            if relax.objective >= inc_obj * (1.0 - opts.rel_gap) - 1e-12 {
                continue;
            }
        }

        // Most fractional integral column, ties to the smallest index.
        let mut branch: Option<(usize, f64, f64)> = None;
        for &j in integral {
            let v = relax.values[j];
            let frac = (v - v.round()).abs();
            if frac > INT_TOL {
                let dist = (v - v.floor()).min(v.ceil() - v);
                if branch.map_or(true, |(_, _, best)| dist > best + 1e-12) {
                    branch = Some((j, v, dist));
                }
            }
        }

        match branch {
            None => {
                // Integral: candidate incumbent. Snap the integer columns.
                let mut values = relax.values.clone();
                for &j in integral {
                    values[j] = values[j].round();
                }
                let obj = lp.objective_value(&values);
                if incumbent.as_ref().map_or(true, |(best, _)| obj < *best) {
                    incumbent = Some((obj, values));
                }
            }
            Some((j, v, _)) => {
                let mut down = node.overrides.clone();
                down.push((j, -INF, v.floor()));
                heap.push(Node {
                    bound: relax.objective,
                    id: next_id,
                    overrides: down,
                });
                next_id += 1;
                let mut up = node.overrides.clone();
                up.push((j, v.ceil(), INF));
                heap.push(Node {
                    bound: relax.objective,
                    id: next_id,
                    overrides: up,
                });
                next_id += 1;
            }
        }
    }

    let wall = started.elapsed().as_secs_f64();
    match incumbent {
        Some((obj, values)) => {
            let open_bound = heap
                .iter()
                .map(|n| n.bound)
                .fold(if timed_out { best_open_bound } else { INF }, f64::min);
            let gap = if open_bound.is_finite() && open_bound < obj {
                (obj - open_bound) / obj.abs().max(1e-9)
            } else {
                0.0
            };
            Ok(SolveResult {
                status: if timed_out && gap > opts.rel_gap {
                    SolveStatus::TimeLimit
                } else {
                    SolveStatus::Optimal
                },
                objective: obj,
                values,
                duals: None,
                iterations,
                wall_time_s: wall,
                gap: Some(gap.max(0.0)),
                note: Some(format!("nodes explored: {nodes_explored}")),
            })
        }
        None => Ok(SolveResult {
            status: if timed_out {
                SolveStatus::TimeLimit
            } else {
                SolveStatus::Infeasible
            },
            objective: INF,
            values: Vec::new(),
            duals: None,
            iterations,
            wall_time_s: wall,
            gap: None,
            note: Some(format!("nodes explored: {nodes_explored}")),
        }),
    }
}
