//! Model parameters: stock defaults, validation, and the flat key-value
//! config file format.
//!
//! Every tunable of the formulation lives in [`ModelConfig`]. All of them can
//! be overridden through a config file or `--set key=value`; field docs note
//! how the stock values were sized.

use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Time-of-use period of an hour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    OffPeak,
    Shoulder,
    Peak,
}

/// The off-peak / shoulder / peak partition of the 24-hour day.
#[derive(Debug, Clone, PartialEq)]
pub struct Periods {
    pub off_peak: Vec<usize>,
    pub shoulder: Vec<usize>,
    pub peak: Vec<usize>,
}

impl Periods {
    /// Standard tariff partition: off-peak [0-5] and [22-23], shoulder
    /// [6-9], [13-16], [20-21], peak [10-12] and [17-19].
    pub fn standard() -> Self {
        Periods {
            off_peak: vec![0, 1, 2, 3, 4, 5, 22, 23],
            shoulder: vec![6, 7, 8, 9, 13, 14, 15, 16, 20, 21],
            peak: vec![10, 11, 12, 17, 18, 19],
        }
    }

    /// Period containing hour `t`, or `None` if the partition does not cover it.
    pub fn period_of(&self, t: usize) -> Option<Period> {
        if self.peak.contains(&t) {
            Some(Period::Peak)
        } else if self.shoulder.contains(&t) {
            Some(Period::Shoulder)
        } else if self.off_peak.contains(&t) {
            Some(Period::OffPeak)
        } else {
            None
        }
    }

    pub fn is_peak(&self, t: usize) -> bool {
        self.period_of(t) == Some(Period::Peak)
    }
}

/// One battery energy storage unit.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryConfig {
    /// Usable energy capacity, MWh.
    pub capacity: f64,
    /// Charge/discharge power rating, MW.
    pub p_max: f64,
    /// One-way efficiency; round trip is `eta_b^2`.
    pub eta_b: f64,
    /// Minimum state of charge, fraction of capacity.
    pub soc_min: f64,
    /// Maximum state of charge, fraction of capacity.
    pub soc_max: f64,
    /// State of charge at the start of the horizon, fraction of capacity.
    pub soc_init: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            capacity: 1.0,
            p_max: 0.25,
            eta_b: 0.95,
            soc_min: 0.2,
            soc_max: 0.95,
            soc_init: 0.5,
        }
    }
}

/// Solver knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Wall-clock budget, seconds.
    pub time_budget: f64,
    /// Relative optimality gap for branch-and-bound.
    pub rel_gap: f64,
    /// Constraint residual tolerance.
    pub feasibility_tol: f64,
    /// Reduced-cost tolerance.
    pub optimality_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            time_budget: 600.0,
            rel_gap: 0.01,
            feasibility_tol: 1e-7,
            optimality_tol: 1e-7,
        }
    }
}

/// Every tunable parameter of the formulation.
///
/// Immutable after load by convention: scenario solves share it read-only.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    /// Price-threshold multiplier on the daily mean price.
    pub beta: f64,
    /// Base price threshold, $/MWh.
    pub pi_base: f64,
    /// Load-threshold factor on the daily peak.
    pub gamma: f64,
    /// Maximum curtailment fraction for curtailable loads.
    pub alpha_max: f64,
    /// Shift window half-width, hours.
    pub tau_max: usize,
    /// Minimum DR event duration, hours.
    pub t_min: usize,
    /// Maximum DR event duration, hours.
    pub t_max: usize,
    /// Flexible load adjustment factor (capacity estimate).
    pub delta_f: f64,
    /// Peak demand charge rate, $/MW. Sized so a ~0.70 MW peak bills ~$6,085.
    pub c_p: f64,
    /// DR reduction incentive, $/MWh. Sized so ~0.37 MWh of reduction earns ~$74.
    pub c_dr: f64,
    /// Shift benefit, peak→off-peak, $/MWh.
    pub b_po: f64,
    /// Shift benefit, peak→shoulder, $/MWh.
    pub b_ps: f64,
    /// Shift benefit, shoulder→off-peak, $/MWh.
    pub b_so: f64,
    /// Peak-period import penalty, $/MWh.
    pub lambda_p: f64,
    /// Ramping penalty, $/MW of hour-to-hour change.
    pub lambda_r: f64,
    /// Peak-period charge derating: charging capped at `eps_peak * p_max`.
    pub eps_peak: f64,
    /// Maximum shiftable fraction of a flexible load's hourly demand.
    pub beta_max: f64,
    /// Shift efficiency: energy arriving per unit departed.
    pub eta_shift: f64,
    /// Ramp limit as a fraction of the original daily peak.
    pub gamma_ramp: f64,
    /// Peak-period import cap as a fraction of the original daily peak.
    pub delta_peak: f64,
    /// Minimum grid service as a fraction of hourly demand.
    pub phi_min: f64,
    /// Battery fleet.
    pub batteries: Vec<BatteryConfig>,
    /// Solver settings.
    pub solver: SolverConfig,
    /// Time-of-use partition.
    pub periods: Periods,
}

impl ModelConfig {
    /// Stock parameterization: the threshold, DR-limit, tariff, and fleet
    /// values the tooling and tests run with unless overridden.
    pub fn standard() -> Self {
        ModelConfig {
            beta: 1.2,
            pi_base: 150.0,
            gamma: 0.8,
            alpha_max: 0.2,
            tau_max: 4,
            t_min: 2,
            t_max: 4,
            delta_f: 0.3,
            c_p: 8700.0,
            c_dr: 200.0,
            b_po: 90.0,
            b_ps: 60.0,
            b_so: 30.0,
            lambda_p: 20.0,
            lambda_r: 10.0,
            eps_peak: 0.2,
            beta_max: 0.3,
            eta_shift: 0.95,
            gamma_ramp: 0.3,
            delta_peak: 0.9,
            phi_min: 0.5,
            batteries: vec![BatteryConfig::default(), BatteryConfig::default()],
            solver: SolverConfig::default(),
            periods: Periods::standard(),
        }
    }

    /// Checks every invariant; returns one message per violation, each naming
    /// the offending field. Empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();

        if !(self.alpha_max > 0.0 && self.alpha_max < 1.0) {
            v.push(format!("alpha_max out of (0,1): {}", self.alpha_max));
        }
        if !(self.beta_max > 0.0 && self.beta_max <= 1.0) {
            v.push(format!("beta_max out of (0,1]: {}", self.beta_max));
        }
        if !(self.eta_shift > 0.0 && self.eta_shift <= 1.0) {
            v.push(format!("eta_shift out of (0,1]: {}", self.eta_shift));
        }
        if self.t_min > self.t_max {
            v.push(format!("t_min {} exceeds t_max {}", self.t_min, self.t_max));
        }
        if self.tau_max < 1 {
            v.push(format!("tau_max must be >= 1, got {}", self.tau_max));
        }
        if !(self.phi_min > 0.0 && self.phi_min < self.delta_peak && self.delta_peak <= 1.0) {
            v.push(format!(
                "phi_min/delta_peak must satisfy 0 < phi_min < delta_peak <= 1, got {} / {}",
                self.phi_min, self.delta_peak
            ));
        }
        for (i, b) in self.batteries.iter().enumerate() {
            if !(b.eta_b > 0.0 && b.eta_b <= 1.0) {
                v.push(format!("batteries.{i}.eta_b out of (0,1]: {}", b.eta_b));
            }
            if !(b.soc_min < b.soc_init && b.soc_init < b.soc_max && b.soc_max <= 1.0) {
                v.push(format!(
                    "batteries.{i} SOC bounds must satisfy soc_min < soc_init < soc_max <= 1, \
                     got {} / {} / {}",
                    b.soc_min, b.soc_init, b.soc_max
                ));
            }
            if b.capacity <= 0.0 {
                v.push(format!("batteries.{i}.capacity must be > 0: {}", b.capacity));
            }
            if b.p_max <= 0.0 {
                v.push(format!("batteries.{i}.p_max must be > 0: {}", b.p_max));
            }
        }

        // The three period sets must partition 0..24.
        let mut seen: [Option<&str>; 24] = [None; 24];
        for (name, hours) in [
            ("off_peak", &self.periods.off_peak),
            ("shoulder", &self.periods.shoulder),
            ("peak", &self.periods.peak),
        ] {
            for &t in hours {
                if t >= 24 {
                    v.push(format!("periods.{name} contains out-of-range hour {t}"));
                    continue;
                }
                match seen[t] {
                    None => seen[t] = Some(name),
                    Some(_) => v.push(format!("periods overlap at hour {t}")),
                }
            }
        }
        for (t, slot) in seen.iter().enumerate() {
            if slot.is_none() {
                v.push(format!("periods do not cover hour {t}"));
            }
        }

        v
    }

    /// Sets one field by its dotted key, the grammar shared by config files
    /// and `--set` overrides.
    pub fn set_key(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |msg: String| ConfigError::BadValue {
            key: key.to_string(),
            msg,
        };
        let f = |value: &str| -> Result<f64, ConfigError> {
            value
                .trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("expected a number, got {value:?} ({e})")))
        };
        let u = |value: &str| -> Result<usize, ConfigError> {
            value
                .trim()
                .parse::<usize>()
                .map_err(|e| bad(format!("expected a non-negative integer, got {value:?} ({e})")))
        };

        match key {
            "beta" => self.beta = f(value)?,
            "pi_base" => self.pi_base = f(value)?,
            "gamma" => self.gamma = f(value)?,
            "alpha_max" => self.alpha_max = f(value)?,
            "tau_max" => self.tau_max = u(value)?,
            "t_min" => self.t_min = u(value)?,
            "t_max" => self.t_max = u(value)?,
            "delta_f" => self.delta_f = f(value)?,
            "c_p" => self.c_p = f(value)?,
            "c_dr" => self.c_dr = f(value)?,
            "b_po" => self.b_po = f(value)?,
            "b_ps" => self.b_ps = f(value)?,
            "b_so" => self.b_so = f(value)?,
            "lambda_p" => self.lambda_p = f(value)?,
            "lambda_r" => self.lambda_r = f(value)?,
            "eps_peak" => self.eps_peak = f(value)?,
            "beta_max" => self.beta_max = f(value)?,
            "eta_shift" => self.eta_shift = f(value)?,
            "gamma_ramp" => self.gamma_ramp = f(value)?,
            "delta_peak" => self.delta_peak = f(value)?,
            "phi_min" => self.phi_min = f(value)?,
            "solver.time_budget" => self.solver.time_budget = f(value)?,
            "solver.rel_gap" => self.solver.rel_gap = f(value)?,
            "solver.feasibility_tol" => self.solver.feasibility_tol = f(value)?,
            "solver.optimality_tol" => self.solver.optimality_tol = f(value)?,
            "periods.off_peak" => self.periods.off_peak = parse_hours(value).map_err(bad)?,
            "periods.shoulder" => self.periods.shoulder = parse_hours(value).map_err(bad)?,
            "periods.peak" => self.periods.peak = parse_hours(value).map_err(bad)?,
            "batteries.count" => {
                let n = u(value)?;
                self.batteries.resize(n, BatteryConfig::default());
            }
            _ => {
                if let Some(rest) = key.strip_prefix("batteries.") {
                    let (idx, field) = rest
                        .split_once('.')
                        .ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
                    let i: usize = idx
                        .parse()
                        .map_err(|_| ConfigError::UnknownKey(key.to_string()))?;
                    let n = self.batteries.len();
                    let b = self.batteries.get_mut(i).ok_or_else(|| {
                        ConfigError::BadValue {
                            key: key.to_string(),
                            msg: format!("battery index {i} out of range (count is {n})"),
                        }
                    })?;
                    match field {
                        "capacity" => b.capacity = f(value)?,
                        "p_max" => b.p_max = f(value)?,
                        "eta_b" => b.eta_b = f(value)?,
                        "soc_min" => b.soc_min = f(value)?,
                        "soc_max" => b.soc_max = f(value)?,
                        "soc_init" => b.soc_init = f(value)?,
                        _ => return Err(ConfigError::UnknownKey(key.to_string())),
                    }
                } else {
                    return Err(ConfigError::UnknownKey(key.to_string()));
                }
            }
        }
        Ok(())
    }

    /// Serializes to the flat key-value format. `load_str(save_string(cfg))`
    /// reproduces `cfg` exactly.
    pub fn save_string(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("beta", fmt_f64(self.beta));
        kv("pi_base", fmt_f64(self.pi_base));
        kv("gamma", fmt_f64(self.gamma));
        kv("alpha_max", fmt_f64(self.alpha_max));
        kv("tau_max", self.tau_max.to_string());
        kv("t_min", self.t_min.to_string());
        kv("t_max", self.t_max.to_string());
        kv("delta_f", fmt_f64(self.delta_f));
        kv("c_p", fmt_f64(self.c_p));
        kv("c_dr", fmt_f64(self.c_dr));
        kv("b_po", fmt_f64(self.b_po));
        kv("b_ps", fmt_f64(self.b_ps));
        kv("b_so", fmt_f64(self.b_so));
        kv("lambda_p", fmt_f64(self.lambda_p));
        kv("lambda_r", fmt_f64(self.lambda_r));
        kv("eps_peak", fmt_f64(self.eps_peak));
        kv("beta_max", fmt_f64(self.beta_max));
        kv("eta_shift", fmt_f64(self.eta_shift));
        kv("gamma_ramp", fmt_f64(self.gamma_ramp));
        kv("delta_peak", fmt_f64(self.delta_peak));
        kv("phi_min", fmt_f64(self.phi_min));
        kv("periods.off_peak", fmt_hours(&self.periods.off_peak));
        kv("periods.shoulder", fmt_hours(&self.periods.shoulder));
        kv("periods.peak", fmt_hours(&self.periods.peak));
        kv("solver.time_budget", fmt_f64(self.solver.time_budget));
        kv("solver.rel_gap", fmt_f64(self.solver.rel_gap));
        kv("solver.feasibility_tol", fmt_f64(self.solver.feasibility_tol));
        kv("solver.optimality_tol", fmt_f64(self.solver.optimality_tol));
        kv("batteries.count", self.batteries.len().to_string());
        for (i, b) in self.batteries.iter().enumerate() {
            kv(&format!("batteries.{i}.capacity"), fmt_f64(b.capacity));
            kv(&format!("batteries.{i}.p_max"), fmt_f64(b.p_max));
            kv(&format!("batteries.{i}.eta_b"), fmt_f64(b.eta_b));
            kv(&format!("batteries.{i}.soc_min"), fmt_f64(b.soc_min));
            kv(&format!("batteries.{i}.soc_max"), fmt_f64(b.soc_max));
            kv(&format!("batteries.{i}.soc_init"), fmt_f64(b.soc_init));
        }
        out
    }

    /// Parses the key-value format, applying keys in file order on top of the
    /// paper defaults. Unknown keys are errors.
    pub fn load_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ModelConfig::standard();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax {
                line: lineno + 1,
                msg: "expected `key = value`".to_string(),
            })?;
            cfg.set_key(key.trim(), value.trim())
                .map_err(|e| e.at_line(lineno + 1))?;
        }
        Ok(cfg)
    }

    pub fn save_file(&self, path: &Path) -> Result<(), ConfigError> {
        std::fs::write(path, self.save_string()).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })
    }

    pub fn load_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Self::load_str(&text)
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::standard()
    }
}

/// Shortest decimal representation that parses back to the same f64.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_hours(hours: &[usize]) -> String {
    hours
        .iter()
        .map(|h| h.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_hours(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad hour {tok:?}: {e}"))
        })
        .collect()
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {msg}")]
    BadValue { key: String, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

impl ConfigError {
    fn at_line(self, line: usize) -> ConfigError {
        match self {
            ConfigError::UnknownKey(k) => ConfigError::Syntax {
                line,
                msg: format!("unknown config key `{k}`"),
            },
            ConfigError::BadValue { key, msg } => ConfigError::Syntax {
                line,
                msg: format!("bad value for `{key}`: {msg}"),
            },
            other => other,
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::OffPeak => write!(f, "off-peak"),
            Period::Shoulder => write!(f, "shoulder"),
            Period::Peak => write!(f, "peak"),
        }
    }
}
