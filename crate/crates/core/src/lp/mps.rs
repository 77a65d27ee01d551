//! MPS export and import, for cross-checking instances against external
//! solvers.
//!
//! The writer lays fields out at the classic fixed-format offsets; values too
//! wide for their field spill over and stay whitespace-separated, which every
//! free-format reader (including ours) accepts. Names are truncated to eight
//! characters with deterministic de-collision suffixes, and the rename map is
//! returned alongside the text.

use std::collections::HashMap;

use thiserror::Error;

use crate::lp::{LinearProgram, Sense, INF};

/// Writer output: the MPS text plus the name maps.
pub struct MpsDocument {
    pub text: String,
    /// Row labels in emitted order, original form.
    pub row_labels: Vec<String>,
    /// Column names in emitted order, original form.
    pub col_labels: Vec<String>,
    /// `(original, mps_name)` for every name that had to change.
    pub renamed: Vec<(String, String)>,
}

#[derive(Debug, Error)]
pub enum MpsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported MPS feature: {0}")]
    Unsupported(String),
}

/// Sanitizes and truncates to eight characters, resolving collisions with a
/// numeric suffix. Returns the final name and whether it differs.
fn mps_name(original: &str, taken: &mut HashMap<String, usize>) -> (String, bool) {
    let mut base: String = original
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    if base.is_empty() {
        base.push('X');
    }
    base.truncate(8);
    if !taken.contains_key(&base) {
        taken.insert(base.clone(), 0);
        let changed = base != original;
        return (base, changed);
    }
    let mut k = taken[&base];
    loop {
        k += 1;
        let suffix = k.to_string();
        let keep = 8usize.saturating_sub(suffix.len());
        let candidate = format!("{}{}", &base[..keep.min(base.len())], suffix);
        if !taken.contains_key(&candidate) {
            taken.insert(base.clone(), k);
            taken.insert(candidate.clone(), 0);
            return (candidate, true);
        }
    }
}

fn field(s: &str, width: usize) -> String {
    if s.len() >= width {
        format!("{s} ")
    } else {
        format!("{s:<width$}")
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Serializes the instance as MPS. The objective row is named `COST`.
pub fn emit_mps(lp: &LinearProgram) -> MpsDocument {
    let mut taken: HashMap<String, usize> = HashMap::new();
    taken.insert("COST".to_string(), 0);
    let mut renamed = Vec::new();

    let mut row_names = Vec::with_capacity(lp.num_rows());
    for row in &lp.rows {
        let (name, changed) = mps_name(&row.label, &mut taken);
        if changed {
            renamed.push((row.label.clone(), name.clone()));
        }
        row_names.push(name);
    }
    let mut col_names = Vec::with_capacity(lp.num_cols());
    for label in &lp.col_names {
        let (name, changed) = mps_name(label, &mut taken);
        if changed {
            renamed.push((label.clone(), name.clone()));
        }
        col_names.push(name);
    }

    let mut out = String::new();
    out.push_str(&format!("NAME          {}\n", sanitize_title(&lp.name)));
    out.push_str("ROWS\n");
    out.push_str(" N  COST\n");
    for (row, name) in lp.rows.iter().zip(&row_names) {
        let tag = match row.sense {
            Sense::Le => "L",
            Sense::Eq => "E",
            Sense::Ge => "G",
        };
        out.push_str(&format!(" {tag}  {name}\n"));
    }

    out.push_str("COLUMNS\n");
    // Entries per column: objective first, then rows in order.
    let mut col_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.num_cols()];
    for (i, row) in lp.rows.iter().enumerate() {
        for &(c, a) in &row.coeffs {
            col_rows[c].push((i, a));
        }
    }
    for j in 0..lp.num_cols() {
        let mut entries: Vec<(String, f64)> = Vec::new();
        if lp.objective[j] != 0.0 {
            entries.push(("COST".to_string(), lp.objective[j]));
        }
        for &(i, a) in &col_rows[j] {
            entries.push((row_names[i].clone(), a));
        }
        let mut it = entries.into_iter().peekable();
        while let Some((r1, v1)) = it.next() {
            let mut line = format!("    {}{}{}", field(&col_names[j], 10), field(&r1, 10), num(v1));
            if let Some((r2, v2)) = it.next() {
                let pad = line.len().max(39);
                line = format!("{line:<pad$}   {}{}", field(&r2, 10), num(v2));
            }
            out.push_str(&line);
            out.push('\n');
        }
    }

    out.push_str("RHS\n");
    {
        let mut it = lp
            .rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.rhs != 0.0)
            .map(|(i, r)| (row_names[i].clone(), r.rhs))
            .peekable();
        while let Some((r1, v1)) = it.next() {
            let mut line = format!("    {}{}{}", field("RHS", 10), field(&r1, 10), num(v1));
            if let Some((r2, v2)) = it.next() {
                let pad = line.len().max(39);
                line = format!("{line:<pad$}   {}{}", field(&r2, 10), num(v2));
            }
            out.push_str(&line);
            out.push('\n');
        }
    }
    out.push_str("RANGES\n");
    out.push_str("BOUNDS\n");
    for j in 0..lp.num_cols() {
        let (lb, ub) = (lp.lower[j], lp.upper[j]);
        let name = &col_names[j];
        if lb == ub {
            out.push_str(&format!(" FX {}{}{}\n", field("BND", 10), field(name, 10), num(lb)));
        } else if lb == -INF && ub == INF {
            out.push_str(&format!(" FR {}{}\n", field("BND", 10), name));
        } else {
            if lb == -INF {
                out.push_str(&format!(" MI {}{}\n", field("BND", 10), name));
            } else if lb != 0.0 {
                out.push_str(&format!(" LO {}{}{}\n", field("BND", 10), field(name, 10), num(lb)));
            }
            if ub != INF {
                out.push_str(&format!(" UP {}{}{}\n", field("BND", 10), field(name, 10), num(ub)));
            }
        }
    }
    out.push_str("ENDATA\n");

    MpsDocument {
        text: out,
        row_labels: lp.rows.iter().map(|r| r.label.clone()).collect(),
        col_labels: lp.col_names.clone(),
        renamed,
    }
}

fn sanitize_title(name: &str) -> String {
    let mut t: String = name
        .chars()
        .map(|c| if c.is_ascii_graphic() { c } else { '_' })
        .collect();
    if t.is_empty() {
        t.push_str("LP");
    }
    t
}

/// Parse result: the instance plus any columns flagged integral by markers.
pub struct ParsedMps {
    pub lp: LinearProgram,
    pub integer_cols: Vec<usize>,
}

/// Reads (free-format, whitespace-separated) MPS text back into an instance.
pub fn parse_mps(text: &str) -> Result<ParsedMps, MpsError> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Ranges,
        Bounds,
        Done,
    }

    let mut lp = LinearProgram::new("parsed");
    let mut section = Section::None;
    let mut obj_row: Option<String> = None;
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut row_sense: Vec<Sense> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut col_entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut col_obj: Vec<f64> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut row_names: Vec<String> = Vec::new();
    let mut bounds: Vec<(f64, f64)> = Vec::new();
    let mut explicit_lower: Vec<bool> = Vec::new();
    let mut integer_cols: Vec<usize> = Vec::new();
    let mut in_integer_block = false;

    let err = |line: usize, msg: String| MpsError::Parse { line, msg };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.starts_with('*') || raw.trim().is_empty() {
            continue;
        }
        let starts_at_margin = !raw.starts_with(' ') && !raw.starts_with('\t');
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if starts_at_margin {
            section = match toks[0] {
                "NAME" => {
                    if let Some(name) = toks.get(1) {
                        lp.name = name.to_string();
                    }
                    section
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::Done,
                other => return Err(err(lineno, format!("unknown section `{other}`"))),
            };
            continue;
        }
        match section {
            Section::Rows => {
                if toks.len() != 2 {
                    return Err(err(lineno, "ROWS lines need `<type> <name>`".into()));
                }
                match toks[0] {
                    "N" => {
                        if obj_row.is_some() {
                            return Err(err(lineno, "multiple objective rows".into()));
                        }
                        obj_row = Some(toks[1].to_string());
                    }
                    t => {
                        let sense = match t {
                            "L" => Sense::Le,
                            "G" => Sense::Ge,
                            "E" => Sense::Eq,
                            _ => return Err(err(lineno, format!("unknown row type `{t}`"))),
                        };
                        row_index.insert(toks[1].to_string(), row_sense.len());
                        row_sense.push(sense);
                        row_names.push(toks[1].to_string());
                        rhs.push(0.0);
                    }
                }
            }
            Section::Columns => {
                // INTORG/INTEND markers toggle integrality.
                if toks.len() >= 3 && toks[1] == "'MARKER'" {
                    match toks[2] {
                        "'INTORG'" => in_integer_block = true,
                        "'INTEND'" => in_integer_block = false,
                        other => return Err(err(lineno, format!("unknown marker {other}"))),
                    }
                    continue;
                }
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err(lineno, "COLUMNS lines need 3 or 5 fields".into()));
                }
                let col = *col_index.entry(toks[0].to_string()).or_insert_with(|| {
                    col_entries.push(Vec::new());
                    col_obj.push(0.0);
                    bounds.push((0.0, INF));
                    explicit_lower.push(false);
                    lp.col_names.push(toks[0].to_string());
                    if in_integer_block {
                        integer_cols.push(lp.col_names.len() - 1);
                    }
                    lp.col_names.len() - 1
                });
                for pair in toks[1..].chunks(2) {
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|e| err(lineno, format!("bad number {:?}: {e}", pair[1])))?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        col_obj[col] += value;
                    } else {
                        let &r = row_index
                            .get(pair[0])
                            .ok_or_else(|| err(lineno, format!("unknown row `{}`", pair[0])))?;
                        col_entries[col].push((r, value));
                    }
                }
            }
            Section::Rhs => {
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err(lineno, "RHS lines need 3 or 5 fields".into()));
                }
                for pair in toks[1..].chunks(2) {
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|e| err(lineno, format!("bad number {:?}: {e}", pair[1])))?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        return Err(MpsError::Unsupported("objective-row RHS offset".into()));
                    }
                    let &r = row_index
                        .get(pair[0])
                        .ok_or_else(|| err(lineno, format!("unknown row `{}`", pair[0])))?;
                    rhs[r] = value;
                }
            }
            Section::Ranges => {
                return Err(MpsError::Unsupported("RANGES entries".into()));
            }
            Section::Bounds => {
                if toks.len() < 3 {
                    return Err(err(lineno, "BOUNDS lines need at least 3 fields".into()));
                }
                let kind = toks[0];
                let &col = col_index
                    .get(toks[2])
                    .ok_or_else(|| err(lineno, format!("unknown column `{}`", toks[2])))?;
                let value = || -> Result<f64, MpsError> {
                    toks.get(3)
                        .ok_or_else(|| err(lineno, "missing bound value".into()))?
                        .parse()
                        .map_err(|e| err(lineno, format!("bad bound value: {e}")))
                };
                match kind {
                    "UP" => bounds[col].1 = value()?,
                    "LO" => {
                        bounds[col].0 = value()?;
                        explicit_lower[col] = true;
                    }
                    "FX" => {
                        let v = value()?;
                        bounds[col] = (v, v);
                        explicit_lower[col] = true;
                    }
                    "FR" => {
                        bounds[col] = (-INF, INF);
                        explicit_lower[col] = true;
                    }
                    "MI" => {
                        bounds[col].0 = -INF;
                        explicit_lower[col] = true;
                    }
                    "PL" => bounds[col].1 = INF,
                    "BV" => {
                        bounds[col] = (0.0, 1.0);
                        explicit_lower[col] = true;
                        integer_cols.push(col);
                    }
                    other => {
                        return Err(MpsError::Unsupported(format!("bound type `{other}`")));
                    }
                }
            }
            Section::Done | Section::None => {
                return Err(err(lineno, "data outside any section".into()));
            }
        }
    }

    // Negative UP bound with no explicit lower implies a free-below column
    // in several dialects; reject it instead of guessing.
    for (j, &(lb, ub)) in bounds.iter().enumerate() {
        if ub < lb && !explicit_lower[j] && ub < 0.0 {
            return Err(MpsError::Unsupported(format!(
                "negative UP bound without LO on column {}",
                lp.col_names[j]
            )));
        }
    }

    lp.lower = bounds.iter().map(|&(l, _)| l).collect();
    lp.upper = bounds.iter().map(|&(_, u)| u).collect();
    lp.objective = col_obj;
    for (i, name) in row_names.iter().enumerate() {
        let coeffs = col_entries
            .iter()
            .enumerate()
            .flat_map(|(c, entries)| {
                entries
                    .iter()
                    .filter(|&&(r, _)| r == i)
                    .map(move |&(_, a)| (c, a))
            })
            .collect();
        lp.add_row(name.clone(), coeffs, row_sense[i], rhs[i]);
    }

    integer_cols.sort_unstable();
    integer_cols.dedup();
    Ok(ParsedMps { lp, integer_cols })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_lp, SolveStatus, SolverOptions};

    #[test]
    fn one_variable_round_trip() {
        // min x, x >= 1 -> optimum 1
        let mut lp = LinearProgram::new("tiny");
        let x = lp.add_col("x", 0.0, INF, 1.0);
        lp.add_row("floor", vec![(x, 1.0)], Sense::Ge, 1.0);
        let doc = emit_mps(&lp);
        assert!(doc.text.contains("COLUMNS"));
        let parsed = parse_mps(&doc.text).unwrap();
        assert_eq!(parsed.lp.num_cols(), 1);
        assert_eq!(parsed.lp.num_rows(), 1);
        let res = solve_lp(&parsed.lp, &SolverOptions::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert!((res.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_lp_has_empty_sections() {
        let mut lp = LinearProgram::new("empty");
        lp.add_col("x", 0.0, 2.0, 1.0);
        let doc = emit_mps(&lp);
        assert!(doc.text.contains("RHS\nRANGES\nBOUNDS\n"));
        let parsed = parse_mps(&doc.text).unwrap();
        assert_eq!(parsed.lp.num_rows(), 0);
        assert_eq!(parsed.lp.num_cols(), 1);
        assert_eq!(parsed.lp.upper[0], 2.0);
    }

    #[test]
    fn name_collisions_resolved_deterministically() {
        let mut lp = LinearProgram::new("clash");
        let x = lp.add_col("verylongname_alpha", 0.0, 1.0, 1.0);
        let y = lp.add_col("verylongname_beta", 0.0, 1.0, 1.0);
        lp.add_row("r", vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.0);
        let doc1 = emit_mps(&lp);
        let doc2 = emit_mps(&lp);
        assert_eq!(doc1.text, doc2.text);
        // Both columns truncate to "verylong"; the second must differ.
        assert!(doc1.renamed.iter().any(|(o, _)| o == "verylongname_alpha"));
        assert!(doc1.renamed.iter().any(|(o, _)| o == "verylongname_beta"));
        let names: Vec<&String> = doc1.renamed.iter().map(|(_, n)| n).collect();
        assert_ne!(names[0], names[1]);
        let parsed = parse_mps(&doc1.text).unwrap();
        assert_eq!(parsed.lp.num_cols(), 2);
    }

    /// Emit, reparse, and compare instance semantics (modulo renaming).
    #[test]
    fn round_trip_preserves_instance() {
        let mut lp = LinearProgram::new("rt");
        let x = lp.add_col("x", -1.5, 4.0, 2.5);
        let y = lp.add_col("y", 0.0, INF, -1.0);
        let z = lp.add_col("z", -INF, INF, 0.25);
        let w = lp.add_col("w", 3.0, 3.0, 0.0);
        lp.add_row("r1", vec![(x, 1.0), (y, 2.0)], Sense::Le, 10.0);
        lp.add_row("r2", vec![(y, 1.0), (z, -3.5)], Sense::Ge, -2.0);
        lp.add_row("r3", vec![(x, 1.0), (z, 1.0), (w, 1.0)], Sense::Eq, 4.0);
        let doc = emit_mps(&lp);
        let parsed = parse_mps(&doc.text).unwrap().lp;
        assert_eq!(parsed.num_cols(), lp.num_cols());
        assert_eq!(parsed.num_rows(), lp.num_rows());
        for j in 0..lp.num_cols() {
            assert_eq!(parsed.lower[j], lp.lower[j], "lower {j}");
            assert_eq!(parsed.upper[j], lp.upper[j], "upper {j}");
            assert_eq!(parsed.objective[j], lp.objective[j], "obj {j}");
        }
        for i in 0..lp.num_rows() {
            assert_eq!(parsed.rows[i].sense, lp.rows[i].sense);
            assert_eq!(parsed.rows[i].rhs, lp.rows[i].rhs);
            assert_eq!(parsed.rows[i].coeffs, lp.rows[i].coeffs);
        }
    }
}
