//! Experiment configuration: a flat `key = value` file, `#` comments, with
//! command-line overrides applied through the same keys.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use volte_core::channel::{RadioParams, DEFAULT_CELL_RADIUS_M, DEFAULT_PATHLOSS_EXPONENT};
use volte_core::sched::{frame_program_vars, tti_program_vars, Policy, DEFAULT_GAMMA, FRAME_TTIS};

use crate::error::SimError;

/// Supported carrier bandwidths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bandwidth {
    Mhz1_4,
    Mhz3,
    Mhz10,
}

impl Bandwidth {
    pub fn num_prb(self) -> usize {
        match self {
            Bandwidth::Mhz1_4 => 7,
            Bandwidth::Mhz3 => 15,
            Bandwidth::Mhz10 => 50,
        }
    }

    pub fn mhz(self) -> f64 {
        match self {
            Bandwidth::Mhz1_4 => 1.4,
            Bandwidth::Mhz3 => 3.0,
            Bandwidth::Mhz10 => 10.0,
        }
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bandwidth::Mhz1_4 => "1.4",
            Bandwidth::Mhz3 => "3",
            Bandwidth::Mhz10 => "10",
        })
    }
}

impl FromStr for Bandwidth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mhz: f64 = s
            .trim()
            .trim_end_matches("MHz")
            .trim_end_matches("mhz")
            .trim()
            .parse()
            .map_err(|_| format!("`{s}` is not a number"))?;
        [Bandwidth::Mhz1_4, Bandwidth::Mhz3, Bandwidth::Mhz10]
            .into_iter()
            .find(|b| (b.mhz() - mhz).abs() < 1e-9)
            .ok_or_else(|| format!("{s} MHz is not supported (use 1.4, 3 or 10)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub bandwidth: Bandwidth,
    pub num_data: usize,
    /// VoLTE user counts, ascending and distinct.
    pub volte_sweep: Vec<usize>,
    pub policies: Vec<Policy>,
    pub runs: usize,
    /// Frames simulated per run; PF averages carry over between them.
    pub frames: usize,
    pub seed: u64,
    pub gamma: f64,
    pub strict_pseudocode: bool,
    /// Redraw fading every TTI instead of once per frame.
    pub per_tti_fading: bool,
    pub cell_radius_m: f64,
    pub pathloss_exponent: f64,
    pub radio: RadioParams,
    pub frame_var_cap: usize,
    pub tti_var_cap: usize,
    /// Branch-and-bound nodes per solve; `None` solves every program to
    /// optimality.
    pub node_limit: Option<u64>,
}

pub const DEFAULT_FRAME_VAR_CAP: usize = 2000;
pub const DEFAULT_TTI_VAR_CAP: usize = 600;
pub const DEFAULT_NODE_LIMIT: u64 = 20_000;
pub const DEFAULT_RUNS: usize = 30;

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            bandwidth: Bandwidth::Mhz3,
            num_data: 5,
            volte_sweep: (0..=30).step_by(5).collect(),
            policies: vec![Policy::Heuristic, Policy::HeuristicPf, Policy::Baseline],
            runs: DEFAULT_RUNS,
            frames: 1,
            seed: 1,
            gamma: DEFAULT_GAMMA,
            strict_pseudocode: false,
            per_tti_fading: false,
            cell_radius_m: DEFAULT_CELL_RADIUS_M,
            pathloss_exponent: DEFAULT_PATHLOSS_EXPONENT,
            radio: RadioParams::default(),
            frame_var_cap: DEFAULT_FRAME_VAR_CAP,
            tti_var_cap: DEFAULT_TTI_VAR_CAP,
            node_limit: Some(DEFAULT_NODE_LIMIT),
        }
    }
}

/// Keys accepted in config files.
pub const KEYS: &[&str] = &[
    "bandwidth",
    "num_data",
    "volte_sweep",
    "policies",
    "runs",
    "frames",
    "seed",
    "gamma",
    "strict_pseudocode",
    "per_tti_fading",
    "cell_radius_m",
    "pathloss_exponent",
    "tx_power",
    "interferer_tx_power",
    "noise_power",
    "frame_var_cap",
    "tti_var_cap",
    "node_limit",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, SimError> {
    value
        .parse()
        .map_err(|_| SimError::invalid(key, format!("cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, SimError> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(SimError::invalid(key, format!("`{value}` is not a boolean"))),
    }
}

fn positive(key: &str, value: &str) -> Result<f64, SimError> {
    let v: f64 = parse(key, value)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(SimError::invalid(key, "must be positive"))
    }
}

/// `0,5,10`, `0:600:50` (inclusive range) or a mix of both.
pub fn parse_sweep(value: &str) -> Result<Vec<usize>, SimError> {
    let key = "volte_sweep";
    let mut out = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [v] => out.push(parse(key, v)?),
            [a, b, step] => {
                let (a, b, step): (usize, usize, usize) = (parse(key, a)?, parse(key, b)?, parse(key, step)?);
                if step == 0 || a > b {
                    return Err(SimError::invalid(key, format!("bad range `{part}`")));
                }
                out.extend((a..=b).step_by(step));
            }
            _ => return Err(SimError::invalid(key, format!("bad entry `{part}`"))),
        }
    }
    if out.is_empty() {
        return Err(SimError::invalid(key, "empty sweep"));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn parse_policies(value: &str) -> Result<Vec<Policy>, SimError> {
    let mut out: Vec<Policy> = Vec::new();
    for name in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let p: Policy = name
            .parse()
            .map_err(|_| SimError::invalid("policies", format!("unknown policy `{name}`")))?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err(SimError::invalid("policies", "no policy given"));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Sets one key. Range checks that involve several keys happen in
    /// [`ExperimentConfig::validate`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SimError> {
        let value = value.trim();
        match key {
            "bandwidth" => self.bandwidth = value.parse().map_err(|m| SimError::invalid(key, m))?,
            "num_data" => self.num_data = parse(key, value)?,
            "volte_sweep" => self.volte_sweep = parse_sweep(value)?,
            "policies" => self.policies = parse_policies(value)?,
            "runs" => self.runs = parse(key, value)?,
            "frames" => self.frames = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "strict_pseudocode" => self.strict_pseudocode = parse_bool(key, value)?,
            "per_tti_fading" => self.per_tti_fading = parse_bool(key, value)?,
            "cell_radius_m" => self.cell_radius_m = positive(key, value)?,
            "pathloss_exponent" => self.pathloss_exponent = positive(key, value)?,
            "tx_power" => self.radio.tx_power = positive(key, value)?,
            "interferer_tx_power" => {
                let v: f64 = parse(key, value)?;
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(SimError::invalid(key, "must be nonnegative"));
                }
                self.radio.interferer_tx_power = v;
            }
            "noise_power" => self.radio.noise_power = positive(key, value)?,
            "frame_var_cap" => self.frame_var_cap = parse(key, value)?,
            "tti_var_cap" => self.tti_var_cap = parse(key, value)?,
            "node_limit" => {
                self.node_limit = match value {
                    "none" | "unlimited" => None,
                    v => Some(parse(key, v)?),
                }
            }
            _ => return Err(SimError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies a config file's contents on top of `self`.
    pub fn apply_str(&mut self, text: &str) -> Result<(), SimError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(SimError::Config {
                    line: i + 1,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            self.set(key.trim(), value).map_err(|e| match e {
                SimError::UnknownKey(_) | SimError::InvalidValue { .. } => SimError::Config {
                    line: i + 1,
                    message: e.to_string(),
                },
                e => e,
            })?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_str(&text)?;
        Ok(cfg)
    }

    pub fn num_prb(&self) -> usize {
        self.bandwidth.num_prb()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.runs == 0 {
            return Err(SimError::invalid("runs", "must be positive"));
        }
        if self.frames == 0 {
            return Err(SimError::invalid("frames", "must be positive"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(SimError::invalid("gamma", format!("{} is outside (0, 1)", self.gamma)));
        }
        if self.node_limit == Some(0) {
            return Err(SimError::invalid("node_limit", "must be positive"));
        }
        if self.volte_sweep.is_empty() {
            return Err(SimError::invalid("volte_sweep", "empty sweep"));
        }
        if self.policies.is_empty() {
            return Err(SimError::invalid("policies", "no policy given"));
        }
        if self.pathloss_exponent <= 2.0 {
            return Err(SimError::invalid("pathloss_exponent", "must exceed 2"));
        }
        Ok(())
    }

    /// Refuses optimal policies whose programs exceed the size caps.
    pub fn check_caps(&self) -> Result<(), SimError> {
        let n = self.num_prb();
        for &policy in &self.policies {
            for &u in &self.volte_sweep {
                let (vars, cap, which, key) = match policy {
                    Policy::FrameOptimal => (
                        frame_program_vars(n, u, FRAME_TTIS, self.per_tti_fading),
                        self.frame_var_cap,
                        "frame-level",
                        "frame_var_cap",
                    ),
                    Policy::TtiOptimal | Policy::TtiOptimalPf => {
                        (tti_program_vars(n, u), self.tti_var_cap, "TTI-level", "tti_var_cap")
                    }
                    _ => continue,
                };
                if vars > cap {
                    return Err(SimError::SizeCap {
                        policy: policy.name(),
                        num_volte: u,
                        vars,
                        cap,
                        which,
                        key,
                    });
                }
            }
        }
        Ok(())
    }
}
