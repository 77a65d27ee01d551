//! Presolve: strips fixed columns, empty rows, and singleton rows before the
//! simplex sees the instance, with an exact undo for solution recovery.

use crate::lp::{LinearProgram, Row, Sense, INF};

/// Reduced instance plus everything needed to map solutions back.
pub struct Presolved {
    pub lp: LinearProgram,
    /// Objective contribution of eliminated fixed columns.
    pub obj_offset: f64,
    /// `reduced column -> original column`.
    col_map: Vec<usize>,
    /// Fixed `(original column, value)` pairs.
    fixed: Vec<(usize, f64)>,
    orig_cols: usize,
}

impl Presolved {
    /// Expands a reduced solution to the original column space.
    pub fn restore(&self, reduced_x: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.orig_cols];
        for (&(j, v), _) in self.fixed.iter().zip(std::iter::repeat(())) {
            x[j] = v;
        }
        for (r, &j) in self.col_map.iter().enumerate() {
            x[j] = reduced_x[r];
        }
        x
    }
}

pub enum PresolveOutcome {
    Reduced(Box<Presolved>),
    /// Infeasibility detected without running the simplex; carries the
    /// offending row's label (or a column description for crossed bounds).
    Infeasible { detail: String },
}

const TOL: f64 = 1e-9;

/// Runs fixed-column substitution, empty-row elimination, and singleton-row
/// bound folding to a fixpoint.
pub fn presolve(lp: &LinearProgram) -> PresolveOutcome {
    let n = lp.num_cols();
    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    let mut rows: Vec<Option<Row>> = lp.rows.iter().cloned().map(Some).collect();
    let mut fixed_value: Vec<Option<f64>> = vec![None; n];

    loop {
        let mut changed = false;

        // Fixed columns: substitute into rows.
        for j in 0..n {
            if fixed_value[j].is_some() {
                continue;
            }
            if lower[j] > upper[j] + TOL {
                return PresolveOutcome::Infeasible {
                    detail: format!(
                        "column {} has crossed bounds [{}, {}]",
                        lp.col_names[j], lower[j], upper[j]
                    ),
                };
            }
            if (upper[j] - lower[j]).abs() <= 0.0 {
                let v = lower[j];
                fixed_value[j] = Some(v);
                changed = true;
                for row in rows.iter_mut().flatten() {
                    if let Some(pos) = row.coeffs.iter().position(|&(c, _)| c == j) {
                        let (_, a) = row.coeffs.remove(pos);
                        row.rhs -= a * v;
                    }
                }
            }
        }

        for slot in rows.iter_mut() {
            let Some(row) = slot else { continue };
            match row.coeffs.len() {
                0 => {
                    // Empty row: 0 (sense) rhs must hold.
                    let ok = match row.sense {
                        Sense::Le => 0.0 <= row.rhs + TOL,
                        Sense::Ge => 0.0 >= row.rhs - TOL,
                        Sense::Eq => row.rhs.abs() <= TOL,
                    };
                    if !ok {
                        return PresolveOutcome::Infeasible {
                            detail: format!("row {} reduced to an impossible constant", row.label),
                        };
                    }
                    *slot = None;
                    changed = true;
                }
                1 => {
                    // Singleton row folds into a bound.
                    let (j, a) = row.coeffs[0];
                    let v = row.rhs / a;
                    let (new_lb, new_ub) = match (row.sense, a > 0.0) {
                        (Sense::Le, true) | (Sense::Ge, false) => (-INF, v),
                        (Sense::Le, false) | (Sense::Ge, true) => (v, INF),
                        (Sense::Eq, _) => (v, v),
                    };
                    if new_lb > lower[j] {
                        lower[j] = new_lb;
                    }
                    if new_ub < upper[j] {
                        upper[j] = new_ub;
                    }
                    if lower[j] > upper[j] + TOL {
                        return PresolveOutcome::Infeasible {
                            detail: format!(
                                "row {} forces column {} outside its bounds",
                                row.label, lp.col_names[j]
                            ),
                        };
                    }
                    // Snap near-equal bounds so the fix pass picks them up.
                    if lower[j] > upper[j] {
                        let mid = 0.5 * (lower[j] + upper[j]);
                        lower[j] = mid;
                        upper[j] = mid;
                    }
                    *slot = None;
                    changed = true;
                }
                _ => {}
            }
        }

        if !changed {
            break;
        }
    }

    // Compact the surviving columns and rows.
    let mut col_map = Vec::new();
    let mut new_index = vec![usize::MAX; n];
    let mut reduced = LinearProgram::new(format!("{}:presolved", lp.name));
    for j in 0..n {
        if fixed_value[j].is_none() {
            new_index[j] = col_map.len();
            col_map.push(j);
            reduced.add_col(lp.col_names[j].clone(), lower[j], upper[j], lp.objective[j]);
        }
    }
    for row in rows.into_iter().flatten() {
        let coeffs = row
            .coeffs
            .iter()
            .map(|&(c, a)| (new_index[c], a))
            .collect();
        reduced.add_row(row.label, coeffs, row.sense, row.rhs);
    }

    let fixed: Vec<(usize, f64)> = fixed_value
        .iter()
        .enumerate()
        .filter_map(|(j, v)| v.map(|v| (j, v)))
        .collect();
    let obj_offset = fixed.iter().map(|&(j, v)| lp.objective[j] * v).sum();

    PresolveOutcome::Reduced(Box::new(Presolved {
        lp: reduced,
        obj_offset,
        col_map,
        fixed,
        orig_cols: n,
    }))
}
