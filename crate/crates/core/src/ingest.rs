//! Hourly day-profile ingestion: CSV parsing, serialization, and load
//! aggregation.
//!
//! A profile is one 24-hour day of per-load demand, per-unit solar
//! availability, and electricity price. Load class is static metadata carried
//! in the CSV header, not inferred from the data.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// One value per hour of the day.
pub type HourSeries = [f64; 24];

pub const HOURS: usize = 24;

/// DR class of a load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadClass {
    /// Cannot be modified.
    Critical,
    /// Can be time-shifted.
    Flexible,
    /// Can be reduced in magnitude.
    Curtailable,
}

impl LoadClass {
    pub const ALL: [LoadClass; 3] = [
        LoadClass::Critical,
        LoadClass::Flexible,
        LoadClass::Curtailable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LoadClass::Critical => "critical",
            LoadClass::Flexible => "flexible",
            LoadClass::Curtailable => "curtailable",
        }
    }
}

impl FromStr for LoadClass {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "critical" => Ok(LoadClass::Critical),
            "flexible" => Ok(LoadClass::Flexible),
            "curtailable" => Ok(LoadClass::Curtailable),
            _ => Err(()),
        }
    }
}

impl fmt::Display for LoadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One metered load with its DR class.
#[derive(Debug, Clone, PartialEq)]
pub struct Load {
    pub id: String,
    pub class: LoadClass,
    /// Demand per hour, MW.
    pub demand: HourSeries,
}

/// One solar generation unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SolarUnit {
    pub id: String,
    /// Available generation per hour, MW.
    pub avail: HourSeries,
}

/// A validated 24-hour day of data.
#[derive(Debug, Clone, PartialEq)]
pub struct DayProfile {
    pub label: String,
    /// Electricity price per hour, $/MWh.
    pub price: HourSeries,
    pub loads: Vec<Load>,
    pub solar_units: Vec<SolarUnit>,
}

impl DayProfile {
    /// Checks the structural invariants: nonnegative demand/availability,
    /// finite prices, and some demand somewhere.
    pub fn check(&self) -> Result<(), IngestError> {
        for (t, p) in self.price.iter().enumerate() {
            if !p.is_finite() {
                return Err(IngestError::BadSeries {
                    series: "price".into(),
                    hour: t,
                    msg: format!("non-finite price {p}"),
                });
            }
        }
        for load in &self.loads {
            for (t, d) in load.demand.iter().enumerate() {
                if !d.is_finite() || *d < 0.0 {
                    return Err(IngestError::BadSeries {
                        series: format!("load:{}", load.id),
                        hour: t,
                        msg: format!("demand must be finite and >= 0, got {d}"),
                    });
                }
            }
        }
        for s in &self.solar_units {
            for (t, a) in s.avail.iter().enumerate() {
                if !a.is_finite() || *a < 0.0 {
                    return Err(IngestError::BadSeries {
                        series: format!("solar:{}", s.id),
                        hour: t,
                        msg: format!("availability must be finite and >= 0, got {a}"),
                    });
                }
            }
        }
        let any_demand = (0..HOURS).any(|t| self.loads.iter().map(|l| l.demand[t]).sum::<f64>() > 0.0);
        if !any_demand {
            return Err(IngestError::EmptyDemand);
        }
        Ok(())
    }

    /// Total demand at hour `t`, MW.
    pub fn total_demand(&self, t: usize) -> f64 {
        self.loads.iter().map(|l| l.demand[t]).sum()
    }

    /// Sum of demand over loads of `class` at hour `t`, MW.
    pub fn class_demand(&self, class: LoadClass, t: usize) -> f64 {
        self.loads
            .iter()
            .filter(|l| l.class == class)
            .map(|l| l.demand[t])
            .sum()
    }

    /// Serializes to the same CSV dialect `parse_day` accepts.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.label.is_empty() {
            out.push_str(&format!("# date: {}\n", self.label));
        }
        out.push_str("hour,price");
        for l in &self.loads {
            out.push_str(&format!(",load:{}:{}", l.id, l.class));
        }
        for s in &self.solar_units {
            out.push_str(&format!(",solar:{}", s.id));
        }
        out.push('\n');
        for t in 0..HOURS {
            out.push_str(&format!("{},{}", t, fmt_cell(self.price[t])));
            for l in &self.loads {
                out.push_str(&format!(",{}", fmt_cell(l.demand[t])));
            }
            for s in &self.solar_units {
                out.push_str(&format!(",{}", fmt_cell(s.avail[t])));
            }
            out.push('\n');
        }
        out
    }
}

/// Shortest representation that round-trips through `f64::from_str`.
fn fmt_cell(v: f64) -> String {
    format!("{v}")
}

/// Derived per-day aggregates used by threshold and score computations.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadAggregates {
    /// Total demand per hour, MW.
    pub p_total: HourSeries,
    /// Daily peak of total demand, MW.
    pub p_peak: f64,
    /// Mean electricity price, $/MWh.
    pub pi_bar: f64,
    /// Price per hour (copied for convenience), $/MWh.
    pub price: HourSeries,
    /// Per-class demand subtotals per hour, MW, ordered critical/flexible/curtailable.
    pub by_class: [HourSeries; 3],
}

impl LoadAggregates {
    pub fn class_series(&self, class: LoadClass) -> &HourSeries {
        match class {
            LoadClass::Critical => &self.by_class[0],
            LoadClass::Flexible => &self.by_class[1],
            LoadClass::Curtailable => &self.by_class[2],
        }
    }

    /// Total energy over the day, MWh (1-hour steps).
    pub fn total_energy(&self) -> f64 {
        self.p_total.iter().sum()
    }
}

/// Sums loads into per-hour totals, the daily peak, and the mean price.
pub fn aggregate(profile: &DayProfile) -> LoadAggregates {
    let mut p_total = [0.0; HOURS];
    let mut by_class = [[0.0; HOURS]; 3];
    for load in &profile.loads {
        let slot = match load.class {
            LoadClass::Critical => 0,
            LoadClass::Flexible => 1,
            LoadClass::Curtailable => 2,
        };
        for t in 0..HOURS {
            p_total[t] += load.demand[t];
            by_class[slot][t] += load.demand[t];
        }
    }
    let p_peak = p_total.iter().cloned().fold(0.0, f64::max);
    let pi_bar = profile.price.iter().sum::<f64>() / HOURS as f64;
    LoadAggregates {
        p_total,
        p_peak,
        pi_bar,
        price: profile.price,
        by_class,
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing header row")]
    MissingHeader,
    #[error("header column {col}: {msg}")]
    BadHeader { col: usize, msg: String },
    #[error("expected 24 rows, got {0}")]
    WrongRowCount(usize),
    #[error("line {line}, column {col} ({name}): {msg}")]
    BadCell {
        line: usize,
        col: usize,
        name: String,
        msg: String,
    },
    #[error("line {line}: missing hour {hour}")]
    MissingHour { line: usize, hour: usize },
    #[error("line {line}: duplicate hour {hour}")]
    DuplicateHour { line: usize, hour: usize },
    #[error("line {line}: expected {expected} cells, got {got}")]
    WrongCellCount {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("{series} at hour {hour}: {msg}")]
    BadSeries {
        series: String,
        hour: usize,
        msg: String,
    },
    #[error("profile has zero total demand at every hour")]
    EmptyDemand,
}

enum ColumnRole {
    Hour,
    Price,
    Load { id: String, class: LoadClass },
    Solar { id: String },
}

/// Parses one day of CSV into a validated [`DayProfile`].
///
/// The header declares column roles: `hour`, `price`, `load:<id>:<class>`,
/// `solar:<id>`. Rows may appear in any hour order; the result is sorted
/// 0..23. An optional leading `# date: <label>` comment carries the label.
pub fn parse_day(text: &str) -> Result<DayProfile, IngestError> {
    let mut label = String::new();
    let mut lines = text.lines().enumerate().peekable();

    // Leading comment lines; `# date:` sets the label.
    while let Some((_, line)) = lines.peek() {
        let trimmed = line.trim();
        if trimmed.starts_with('#') {
            if let Some(rest) = trimmed.trim_start_matches('#').trim().strip_prefix("date:") {
                label = rest.trim().to_string();
            }
            lines.next();
        } else if trimmed.is_empty() {
            lines.next();
        } else {
            break;
        }
    }

    let (header_idx, header) = lines.next().ok_or(IngestError::MissingHeader)?;
    let columns = parse_header(header)?;
    let ncols = columns.len();
    let hour_col = columns
        .iter()
        .position(|c| matches!(c, ColumnRole::Hour))
        .ok_or(IngestError::BadHeader {
            col: 0,
            msg: "no `hour` column declared".into(),
        })?;
    if !columns.iter().any(|c| matches!(c, ColumnRole::Price)) {
        return Err(IngestError::BadHeader {
            col: 0,
            msg: "no `price` column declared".into(),
        });
    }

    let mut price = [f64::NAN; HOURS];
    let mut loads: Vec<Load> = columns
        .iter()
        .filter_map(|c| match c {
            ColumnRole::Load { id, class } => Some(Load {
                id: id.clone(),
                class: *class,
                demand: [f64::NAN; HOURS],
            }),
            _ => None,
        })
        .collect();
    let mut solar_units: Vec<SolarUnit> = columns
        .iter()
        .filter_map(|c| match c {
            ColumnRole::Solar { id } => Some(SolarUnit {
                id: id.clone(),
                avail: [f64::NAN; HOURS],
            }),
            _ => None,
        })
        .collect();

    let mut seen = [false; HOURS];
    let mut seen_line = [0usize; HOURS];
    let mut nrows = 0usize;

    for (idx, raw) in lines {
        let line_no = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = trimmed.split(',').collect();
        if cells.len() != ncols {
            return Err(IngestError::WrongCellCount {
                line: line_no,
                expected: ncols,
                got: cells.len(),
            });
        }
        nrows += 1;
        if nrows > HOURS {
            return Err(IngestError::WrongRowCount(nrows));
        }

        let hour: usize = cells[hour_col].trim().parse().map_err(|e| IngestError::BadCell {
            line: line_no,
            col: hour_col + 1,
            name: "hour".into(),
            msg: format!("bad hour: {e}"),
        })?;
        if hour >= HOURS {
            return Err(IngestError::BadCell {
                line: line_no,
                col: hour_col + 1,
                name: "hour".into(),
                msg: format!("hour {hour} out of range 0..=23"),
            });
        }
        if seen[hour] {
            return Err(IngestError::DuplicateHour {
                line: line_no,
                hour,
            });
        }
        seen[hour] = true;
        seen_line[hour] = line_no;

        let mut load_i = 0usize;
        let mut solar_i = 0usize;
        for (c, (cell, role)) in cells.iter().zip(columns.iter()).enumerate() {
            let value = || -> Result<f64, IngestError> {
                let v: f64 = cell.trim().parse().map_err(|e| IngestError::BadCell {
                    line: line_no,
                    col: c + 1,
                    name: role_name(role),
                    msg: format!("not a number: {e}"),
                })?;
                if !v.is_finite() {
                    return Err(IngestError::BadCell {
                        line: line_no,
                        col: c + 1,
                        name: role_name(role),
                        msg: format!("non-finite value {v}"),
                    });
                }
                Ok(v)
            };
            match role {
                ColumnRole::Hour => {}
                ColumnRole::Price => price[hour] = value()?,
                ColumnRole::Load { .. } => {
                    let v = value()?;
                    if v < 0.0 {
                        return Err(IngestError::BadCell {
                            line: line_no,
                            col: c + 1,
                            name: role_name(role),
                            msg: format!("negative demand {v} rejected"),
                        });
                    }
                    loads[load_i].demand[hour] = v;
                    load_i += 1;
                }
                ColumnRole::Solar { .. } => {
                    let v = value()?;
                    if v < 0.0 {
                        return Err(IngestError::BadCell {
                            line: line_no,
                            col: c + 1,
                            name: role_name(role),
                            msg: format!("negative availability {v} rejected"),
                        });
                    }
                    solar_units[solar_i].avail[hour] = v;
                    solar_i += 1;
                }
            }
        }
    }

    if nrows != HOURS {
        return Err(IngestError::WrongRowCount(nrows));
    }
    if let Some(hour) = seen.iter().position(|s| !s) {
        return Err(IngestError::MissingHour {
            line: header_idx + 1,
            hour,
        });
    }

    let profile = DayProfile {
        label,
        price,
        loads,
        solar_units,
    };
    profile.check()?;
    Ok(profile)
}

fn role_name(role: &ColumnRole) -> String {
    match role {
        ColumnRole::Hour => "hour".into(),
        ColumnRole::Price => "price".into(),
        ColumnRole::Load { id, class } => format!("load:{id}:{class}"),
        ColumnRole::Solar { id } => format!("solar:{id}"),
    }
}

fn parse_header(header: &str) -> Result<Vec<ColumnRole>, IngestError> {
    header
        .trim()
        .split(',')
        .enumerate()
        .map(|(col, tok)| {
            let tok = tok.trim();
            let err = |msg: String| IngestError::BadHeader { col: col + 1, msg };
            if tok == "hour" {
                Ok(ColumnRole::Hour)
            } else if tok == "price" {
                Ok(ColumnRole::Price)
            } else if let Some(rest) = tok.strip_prefix("load:") {
                let (id, class_tok) = rest
                    .rsplit_once(':')
                    .ok_or_else(|| err(format!("load column `{tok}` needs `load:<id>:<class>`")))?;
                let class = class_tok.parse::<LoadClass>().map_err(|_| {
                    err(format!(
                        "unknown class token `{class_tok}` (expected critical, flexible, or curtailable)"
                    ))
                })?;
                if id.is_empty() {
                    return Err(err(format!("load column `{tok}` has an empty id")));
                }
                Ok(ColumnRole::Load {
                    id: id.to_string(),
                    class,
                })
            } else if let Some(id) = tok.strip_prefix("solar:") {
                if id.is_empty() {
                    return Err(err(format!("solar column `{tok}` has an empty id")));
                }
                Ok(ColumnRole::Solar { id: id.to_string() })
            } else {
                Err(err(format!("unrecognized column `{tok}`")))
            }
        })
        .collect()
}
