//! Flat key/value experiment configuration with dotted sections.
//!
//! Lines are `key = value`; `#` starts a comment. `init.mode` may repeat to
//! build the initial condition as `sum A cos(n theta + phase)` terms, or
//! `init.csv` points at a Fourier coefficient file. Unknown keys are parse
//! errors so typos fail loudly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use teichflow_core::dynamics::SimulationConfig;
use teichflow_core::welding::WeldingOptions;
use teichflow_core::{FourierField, OperatorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse { line: usize, message: String },
    Validation { field: String, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            ConfigError::Validation { field, message } => write!(f, "invalid `{field}`: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn validation(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field: field.into(), message: message.into() }
}

/// One cosine term of the initial condition: `amplitude cos(mode theta + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTerm {
    pub mode: usize,
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Modes(Vec<ModeTerm>),
    CsvPath(PathBuf),
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub equation: OperatorKind,
    pub initial: InitialCondition,
    pub band_limit: usize,
    pub flow_points: usize,
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_times: Vec<f64>,
    pub sample_every: usize,
    pub slope_floor: f64,
    pub tail_limit: f64,
    pub continue_past_blowup: bool,
    pub refine_levels: u32,
    pub welding_enabled: bool,
    pub welding_input_dir: Option<PathBuf>,
    pub kernel_prefactor_scale: f64,
    pub welding_slope_floor: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            equation: OperatorKind::Wunsch,
            initial: InitialCondition::Modes(Vec::new()),
            band_limit: 256,
            flow_points: 512,
            dt: 1e-4,
            t_final: 0.5,
            snapshot_times: Vec::new(),
            sample_every: 10,
            slope_floor: 1e-3,
            tail_limit: 0.01,
            continue_past_blowup: false,
            refine_levels: 0,
            welding_enabled: false,
            welding_input_dir: None,
            kernel_prefactor_scale: 1.0,
            welding_slope_floor: 1e-6,
            out_dir: PathBuf::from("out"),
            seed: 0,
            trials: 100,
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "equation",
    "band_limit",
    "flow_points",
    "dt",
    "t_final",
    "init.mode",
    "init.csv",
    "snapshots",
    "output.cadence",
    "output.dir",
    "blowup.slope_floor",
    "blowup.tail_limit",
    "blowup.continue_past",
    "blowup.refine_levels",
    "welding.enabled",
    "welding.input_dir",
    "welding.prefactor_scale",
    "welding.slope_floor",
    "seed",
    "verify.trials",
];

/// Raw key/value view of a document, preserving repeated `init.mode` lines.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    pub singles: BTreeMap<String, String>,
    pub init_modes: Vec<String>,
}

pub fn parse_key_values(text: &str) -> Result<KeyValues, ConfigError> {
    let mut kv = KeyValues::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::Parse { line: line_no, message: format!("unknown key `{key}`") });
        }
        if value.is_empty() {
            return Err(ConfigError::Parse { line: line_no, message: format!("empty value for `{key}`") });
        }
        if key == "init.mode" {
            kv.init_modes.push(value.to_string());
        } else {
            kv.singles.insert(key.to_string(), value.to_string());
        }
    }
    Ok(kv)
}

/// Applies `--override key=value` pairs. An override of `init.mode`
/// replaces the whole mode list with the single given term.
pub fn apply_overrides(kv: &mut KeyValues, overrides: &[(String, String)]) -> Result<(), ConfigError> {
    for (key, value) in overrides {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(validation(key, "unknown key in override"));
        }
        if key == "init.mode" {
            kv.init_modes = vec![value.clone()];
        } else {
            kv.singles.insert(key.clone(), value.clone());
        }
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(kv: &KeyValues, key: &str) -> Result<Option<T>, ConfigError> {
    match kv.singles.get(key) {
        None => Ok(None),
        Some(s) => s
            .parse::<T>()
            .map(Some)
            .map_err(|_| validation(key, format!("cannot parse `{s}`"))),
    }
}

fn parse_bool(kv: &KeyValues, key: &str) -> Result<Option<bool>, ConfigError> {
    match kv.singles.get(key).map(|s| s.as_str()) {
        None => Ok(None),
        Some("true") | Some("on") | Some("1") => Ok(Some(true)),
        Some("false") | Some("off") | Some("0") => Ok(Some(false)),
        Some(other) => Err(validation(key, format!("expected true/false, got `{other}`"))),
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    build_config(parse_key_values(text)?)
}

pub fn build_config(kv: KeyValues) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();

    if let Some(eq) = kv.singles.get("equation") {
        cfg.equation = match eq.as_str() {
            "wunsch" => OperatorKind::Wunsch,
            "ewp" => OperatorKind::Ewp,
            "clm" => OperatorKind::Clm,
            other => return Err(validation("equation", format!("unknown equation `{other}`"))),
        };
    }
    if let Some(v) = parse_field::<usize>(&kv, "band_limit")? {
        cfg.band_limit = v;
    }
    if let Some(v) = parse_field::<usize>(&kv, "flow_points")? {
        cfg.flow_points = v;
    } else {
        cfg.flow_points = 2 * cfg.band_limit;
    }
    if let Some(v) = parse_field::<f64>(&kv, "dt")? {
        cfg.dt = v;
    }
    if let Some(v) = parse_field::<f64>(&kv, "t_final")? {
        cfg.t_final = v;
    }
    if let Some(v) = parse_field::<usize>(&kv, "output.cadence")? {
        cfg.sample_every = v;
    }
    if let Some(v) = kv.singles.get("output.dir") {
        cfg.out_dir = PathBuf::from(v);
    }
    if let Some(v) = parse_field::<f64>(&kv, "blowup.slope_floor")? {
        cfg.slope_floor = v;
    }
    if let Some(v) = parse_field::<f64>(&kv, "blowup.tail_limit")? {
        cfg.tail_limit = v;
    }
    if let Some(v) = parse_bool(&kv, "blowup.continue_past")? {
        cfg.continue_past_blowup = v;
    }
    if let Some(v) = parse_field::<u32>(&kv, "blowup.refine_levels")? {
        cfg.refine_levels = v;
    }
    if let Some(v) = parse_bool(&kv, "welding.enabled")? {
        cfg.welding_enabled = v;
    }
    if let Some(v) = kv.singles.get("welding.input_dir") {
        cfg.welding_input_dir = Some(PathBuf::from(v));
    }
    if let Some(v) = parse_field::<f64>(&kv, "welding.prefactor_scale")? {
        cfg.kernel_prefactor_scale = v;
    }
    if let Some(v) = parse_field::<f64>(&kv, "welding.slope_floor")? {
        cfg.welding_slope_floor = v;
    }
    if let Some(v) = parse_field::<u64>(&kv, "seed")? {
        cfg.seed = v;
    }
    if let Some(v) = parse_field::<usize>(&kv, "verify.trials")? {
        cfg.trials = v;
    }

    if let Some(times) = kv.singles.get("snapshots") {
        let mut parsed = Vec::new();
        for tok in times.split_whitespace() {
            let t: f64 = tok
                .parse()
                .map_err(|_| validation("snapshots", format!("cannot parse time `{tok}`")))?;
            parsed.push(t);
        }
        cfg.snapshot_times = parsed;
    }

    let csv = kv.singles.get("init.csv");
    match (kv.init_modes.is_empty(), csv) {
        (false, Some(_)) => {
            return Err(validation("init.csv", "give either init.mode terms or init.csv, not both"))
        }
        (false, None) => {
            let mut terms = Vec::new();
            for spec in &kv.init_modes {
                let parts: Vec<&str> = spec.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(validation(
                        "init.mode",
                        format!("expected `mode amplitude phase`, got `{spec}`"),
                    ));
                }
                let mode: usize = parts[0]
                    .parse()
                    .map_err(|_| validation("init.mode", format!("bad mode `{}`", parts[0])))?;
                let amplitude: f64 = parts[1]
                    .parse()
                    .map_err(|_| validation("init.mode", format!("bad amplitude `{}`", parts[1])))?;
                let phase: f64 = parts[2]
                    .parse()
                    .map_err(|_| validation("init.mode", format!("bad phase `{}`", parts[2])))?;
                terms.push(ModeTerm { mode, amplitude, phase });
            }
            cfg.initial = InitialCondition::Modes(terms);
        }
        (true, Some(path)) => cfg.initial = InitialCondition::CsvPath(PathBuf::from(path)),
        (true, None) => cfg.initial = InitialCondition::Modes(Vec::new()),
    }

    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(validation("dt", "must be positive"));
    }
    if !(cfg.t_final > 0.0 && cfg.t_final.is_finite()) {
        return Err(validation("t_final", "must be positive"));
    }
    if cfg.band_limit < 4 {
        return Err(validation("band_limit", "must be >= 4"));
    }
    if cfg.flow_points < 4 {
        return Err(validation("flow_points", "must be >= 4"));
    }
    if cfg.sample_every == 0 {
        return Err(validation("output.cadence", "must be >= 1"));
    }
    if !(cfg.slope_floor > 0.0 && cfg.slope_floor < 1.0) {
        return Err(validation("blowup.slope_floor", "must lie in (0, 1)"));
    }
    if !(cfg.tail_limit > 0.0 && cfg.tail_limit < 1.0) {
        return Err(validation("blowup.tail_limit", "must lie in (0, 1)"));
    }
    for &t in &cfg.snapshot_times {
        if !(0.0..=cfg.t_final).contains(&t) {
            return Err(validation("snapshots", format!("time {t} outside [0, {}]", cfg.t_final)));
        }
    }
    if let InitialCondition::Modes(terms) = &cfg.initial {
        for term in terms {
            if term.mode > cfg.band_limit {
                return Err(validation(
                    "init.mode",
                    format!("mode {} exceeds band limit {}", term.mode, cfg.band_limit),
                ));
            }
            if !term.amplitude.is_finite() || !term.phase.is_finite() {
                return Err(validation("init.mode", "non-finite amplitude or phase"));
            }
        }
    }
    if let InitialCondition::CsvPath(path) = &cfg.initial {
        if !path.exists() {
            return Err(validation("init.csv", format!("path {} does not exist", path.display())));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    /// The initial velocity field at the configured band limit.
    pub fn initial_field(&self) -> Result<FourierField, ConfigError> {
        match &self.initial {
            InitialCondition::Modes(terms) => {
                if terms.is_empty() {
                    return Err(validation("init.mode", "no initial condition configured"));
                }
                // A cos(n t + p) = A cos p cos(n t) - A sin p sin(n t)
                let converted: Vec<(usize, f64, f64)> = terms
                    .iter()
                    .map(|t| {
                        (t.mode, t.amplitude * t.phase.cos(), -t.amplitude * t.phase.sin())
                    })
                    .collect();
                Ok(FourierField::from_modes(self.band_limit, &converted))
            }
            InitialCondition::CsvPath(path) => {
                let field = crate::io::read_field_csv(path)
                    .map_err(|e| validation("init.csv", e.to_string()))?;
                Ok(if field.band_limit() <= self.band_limit {
                    field.pad_to(self.band_limit)
                } else {
                    field.truncated(self.band_limit)
                })
            }
        }
    }

    pub fn simulation_config(&self) -> SimulationConfig {
        SimulationConfig {
            operator: self.equation,
            band_limit: self.band_limit,
            flow_points: self.flow_points,
            dt: self.dt,
            t_final: self.t_final,
            slope_floor: self.slope_floor,
            tail_limit: self.tail_limit,
            sample_every: self.sample_every,
            continue_past_blowup: self.continue_past_blowup,
        }
    }

    pub fn welding_options(&self) -> WeldingOptions {
        WeldingOptions {
            kernel_prefactor_scale: self.kernel_prefactor_scale,
            slope_floor: self.welding_slope_floor,
            ..WeldingOptions::default()
        }
    }

    /// Canonical text form of the resolved configuration; hashed into
    /// reports so outputs are traceable to their exact inputs.
    pub fn canonical_string(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("band_limit = {}\n", self.band_limit));
        s.push_str(&format!("blowup.continue_past = {}\n", self.continue_past_blowup));
        s.push_str(&format!("blowup.refine_levels = {}\n", self.refine_levels));
        s.push_str(&format!("blowup.slope_floor = {}\n", self.slope_floor));
        s.push_str(&format!("blowup.tail_limit = {}\n", self.tail_limit));
        s.push_str(&format!("dt = {}\n", self.dt));
        s.push_str(&format!("equation = {}\n", self.equation.name()));
        s.push_str(&format!("flow_points = {}\n", self.flow_points));
        match &self.initial {
            InitialCondition::Modes(terms) => {
                for t in terms {
                    s.push_str(&format!("init.mode = {} {} {}\n", t.mode, t.amplitude, t.phase));
                }
            }
            InitialCondition::CsvPath(p) => s.push_str(&format!("init.csv = {}\n", p.display())),
        }
        s.push_str(&format!("output.cadence = {}\n", self.sample_every));
        s.push_str(&format!("seed = {}\n", self.seed));
        let times: Vec<String> = self.snapshot_times.iter().map(|t| t.to_string()).collect();
        if !times.is_empty() {
            s.push_str(&format!("snapshots = {}\n", times.join(" ")));
        }
        s.push_str(&format!("t_final = {}\n", self.t_final));
        s.push_str(&format!("verify.trials = {}\n", self.trials));
        s.push_str(&format!("welding.enabled = {}\n", self.welding_enabled));
        if let Some(dir) = &self.welding_input_dir {
            s.push_str(&format!("welding.input_dir = {}\n", dir.display()));
        }
        s.push_str(&format!("welding.prefactor_scale = {}\n", self.kernel_prefactor_scale));
        s.push_str(&format!("welding.slope_floor = {}\n", self.welding_slope_floor));
        s
    }
}

/// Reads and resolves a config file with command-line overrides applied.
pub fn load_config(
    path: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig, ConfigError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| ConfigError::Validation {
            field: "config".into(),
            message: format!("cannot read {}: {e}", p.display()),
        })?,
        None => String::new(),
    };
    let mut kv = parse_key_values(&text)?;
    apply_overrides(&mut kv, overrides)?;
    build_config(kv)
}
