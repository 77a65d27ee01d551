//! Sparse standard-form linear programs: variables with bounds, a
//! minimization objective, and labeled constraint rows.

mod build;
mod mps;

pub use build::{
    admissible_shift_targets, build_constraints, build_model, build_objective, build_variables,
    shift_benefit, BuildError, LpModel, VarFamily, VarRef, VarTable, BALANCE_SLACK_PENALTY,
};
pub use mps::{emit_mps, parse_mps, MpsDocument, MpsError, ParsedMps};

use serde::Serialize;

pub const INF: f64 = f64::INFINITY;

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

/// One sparse constraint row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    /// Carries the equation the row encodes, e.g. `eq23:balance[l=0,t=5]`.
    pub label: String,
    /// `(column, coefficient)` pairs, strictly increasing by column.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A linear program in minimization form.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub name: String,
    pub col_names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Objective coefficients (minimize).
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(name: impl Into<String>) -> Self {
        LinearProgram {
            name: name.into(),
            col_names: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            objective: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn num_cols(&self) -> usize {
        self.col_names.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a column and returns its id. Ids are dense 0..n.
    pub fn add_col(&mut self, name: impl Into<String>, lower: f64, upper: f64, obj: f64) -> usize {
        let id = self.col_names.len();
        self.col_names.push(name.into());
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.push(obj);
        id
    }

    /// Adds a row; coefficients are sorted and merged by column.
    pub fn add_row(
        &mut self,
        label: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) {
        let mut coeffs = coeffs;
        coeffs.sort_by_key(|&(c, _)| c);
        coeffs.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                earlier.1 += later.1;
                true
            } else {
                false
            }
        });
        coeffs.retain(|&(_, v)| v != 0.0);
        self.rows.push(Row {
            label: label.into(),
            coeffs,
            sense,
            rhs,
        });
    }

    /// Structural soundness: every coefficient finite and pointing at a real
    /// column, bounds ordered, objective finite.
    pub fn check(&self) -> Result<(), String> {
        let n = self.num_cols();
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(format!(
                    "column {} ({}) has crossed bounds [{}, {}]",
                    j, self.col_names[j], self.lower[j], self.upper[j]
                ));
            }
            if !self.objective[j].is_finite() {
                return Err(format!("column {} has non-finite objective", j));
            }
        }
        for row in &self.rows {
            for &(c, v) in &row.coeffs {
                if c >= n {
                    return Err(format!("row {} references missing column {}", row.label, c));
                }
                if !v.is_finite() {
                    return Err(format!("row {} has non-finite coefficient", row.label));
                }
            }
            if !row.rhs.is_finite() {
                return Err(format!("row {} has non-finite rhs", row.label));
            }
        }
        Ok(())
    }

    /// Objective value of a full assignment.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Left-hand-side value of row `i` under assignment `x`.
    pub fn row_activity(&self, i: usize, x: &[f64]) -> f64 {
        self.rows[i].coeffs.iter().map(|&(c, a)| a * x[c]).sum()
    }

    /// Largest bound or constraint violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.num_cols() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for (i, row) in self.rows.iter().enumerate() {
            let lhs = self.row_activity(i, x);
            let v = match row.sense {
                Sense::Le => lhs - row.rhs,
                Sense::Ge => row.rhs - lhs,
                Sense::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    /// JSON dump of the rows with their labels, for debugging model builds.
    pub fn rows_debug_json(&self) -> String {
        #[derive(Serialize)]
        struct RowDump<'a> {
            label: &'a str,
            sense: Sense,
            rhs: f64,
            terms: Vec<(String, f64)>,
        }
        let dump: Vec<RowDump> = self
            .rows
            .iter()
            .map(|r| RowDump {
                label: &r.label,
                sense: r.sense,
                rhs: r.rhs,
                terms: r
                    .coeffs
                    .iter()
                    .map(|&(c, v)| (self.col_names[c].clone(), v))
                    .collect(),
            })
            .collect();
        serde_json::to_string_pretty(&dump).expect("row dump serialization cannot fail")
    }
}
