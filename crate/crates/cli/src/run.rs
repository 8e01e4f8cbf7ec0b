//! Verb execution: `simulate`, `weld`, `verify`, `certify` and
//! `reproduce-paper`. Every verb writes its artifacts plus a manifest with
//! content hashes into the output directory; identical configuration and
//! seed produce byte-identical files.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use teichflow_core::analysis::growth_monitor;
use teichflow_core::dynamics::{
    refine_blowup, run_simulation, BlowupVerdict, LagrangianState, Snapshot, TrajectoryRecord,
};
use teichflow_core::error::DynamicsError;
use teichflow_core::welding::{
    interior_coefficients, normalize_curve, solve_welding, welding_residual, CircleDiffeo,
    NormalizedCurve, WeldingOptions,
};
use teichflow_core::{FourierField, OperatorKind};

use crate::config::{ConfigError, ExperimentConfig};
use crate::io::{
    bound_report_json, certificate_json, curve_to_csv, field_to_csv, grid_to_csv, read_grid_csv,
    sha256_hex, trajectory_to_csv, verdict_json,
};
use crate::svg::{export_svg, Series};
use crate::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Simulate,
    Weld,
    Verify,
    Certify,
    ReproducePaper,
}

#[derive(Debug)]
pub enum CliError {
    /// Configuration or input validation failure; exit code 2.
    Validation { field: String, message: String },
    /// Runtime or numeric failure; exit code 3.
    Runtime { kind: String, message: String },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation { field, message } => write!(f, "invalid `{field}`: {message}"),
            CliError::Runtime { kind, message } => write!(f, "{kind}: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Runtime { .. } => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Validation { field, message } => json!({
                "error": { "kind": "validation", "field": field, "message": message, "exit_code": 2 }
            }),
            CliError::Runtime { kind, message } => json!({
                "error": { "kind": kind, "message": message, "exit_code": 3 }
            }),
        }
    }

    fn runtime(kind: &str, err: impl fmt::Display) -> Self {
        CliError::Runtime { kind: kind.into(), message: err.to_string() }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Parse { line, message } => {
                CliError::Validation { field: format!("line {line}"), message }
            }
            ConfigError::Validation { field, message } => CliError::Validation { field, message },
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::runtime("io", e)
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::InvalidConfig { field, message } => {
                CliError::Validation { field: field.into(), message: message.into() }
            }
            other => CliError::runtime("dynamics", other),
        }
    }
}

/// Collects written files and their content hashes.
struct OutputWriter {
    root: PathBuf,
    entries: BTreeMap<String, (String, usize)>,
}

impl OutputWriter {
    fn new(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(OutputWriter { root: root.to_path_buf(), entries: BTreeMap::new() })
    }

    fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.entries.insert(rel.to_string(), (sha256_hex(bytes), bytes.len()));
        Ok(())
    }

    fn write_json(&mut self, rel: &str, value: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(rel, text.as_bytes())
    }

    fn finish(mut self, summary: Value) -> Result<Value, CliError> {
        let manifest = json!({
            "files": self
                .entries
                .iter()
                .map(|(path, (hash, bytes))| json!({ "path": path, "sha256": hash, "bytes": bytes }))
                .collect::<Vec<_>>(),
            "summary": summary.clone(),
        });
        let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
        text.push('\n');
        let path = self.root.join("manifest.json");
        fs::write(&path, text.as_bytes())?;
        self.entries.clear();
        Ok(manifest)
    }
}

/// Runs a verb against a resolved configuration; returns the manifest value.
pub fn execute(verb: Verb, config: &ExperimentConfig) -> Result<Value, CliError> {
    match verb {
        Verb::Simulate => simulate(config),
        Verb::Weld => weld(config),
        Verb::Verify => run_verify(config),
        Verb::Certify => certify(config),
        Verb::ReproducePaper => reproduce_paper(config),
    }
}

fn time_label(t: f64) -> String {
    format!("{t:.6}")
}

fn snapshot_series_u(snap: &Snapshot) -> Series {
    let m = snap.flow.len();
    let u = snap.state.velocity.sample_values(m);
    let pts = snap.flow.grid.iter().copied().zip(u).collect();
    Series::line(format!("u at t={}", time_label(snap.state.time)), pts)
}

fn snapshot_series_eta(snap: &Snapshot) -> Series {
    let pts = snap.flow.grid.iter().copied().zip(snap.flow.eta.iter().copied()).collect();
    Series::line(format!("eta at t={}", time_label(snap.state.time)), pts)
}

fn write_snapshot_files(
    writer: &mut OutputWriter,
    dir: &str,
    snap: &Snapshot,
) -> Result<(), CliError> {
    let label = time_label(snap.state.time);
    let m = snap.flow.len();
    let u = snap.state.velocity.sample_values(m);
    writer.write(
        &format!("{dir}/snapshot_t{label}.csv"),
        grid_to_csv(&snap.flow, &u).as_bytes(),
    )?;
    writer.write(
        &format!("{dir}/velocity_t{label}.csv"),
        field_to_csv(&snap.state.velocity).as_bytes(),
    )?;
    Ok(())
}

fn write_profile_figures(
    writer: &mut OutputWriter,
    dir: &str,
    snap: &Snapshot,
    what: &str,
) -> Result<(), CliError> {
    let label = time_label(snap.state.time);
    let series = match what {
        "u" => snapshot_series_u(snap),
        _ => snapshot_series_eta(snap),
    };
    let svg = export_svg(&[series]).map_err(|e| CliError::runtime("svg", e))?;
    writer.write(&format!("{dir}/{what}_profile_t{label}.svg"), svg.as_bytes())?;
    Ok(())
}

fn energy_drift(record: &TrajectoryRecord) -> f64 {
    let e0 = record.samples[0].energy;
    if e0 == 0.0 {
        return 0.0;
    }
    record
        .samples
        .iter()
        .map(|s| ((s.energy - e0) / e0).abs())
        .fold(0.0f64, f64::max)
}

fn simulate(config: &ExperimentConfig) -> Result<Value, CliError> {
    let u0 = config.initial_field()?;
    let sim = config.simulation_config();
    sim.validate()?;
    let record = run_simulation(&sim, &u0, &config.snapshot_times)?;

    let mut writer = OutputWriter::new(&config.out_dir)?;
    writer.write("trajectory.csv", trajectory_to_csv(&record).as_bytes())?;
    writer.write("initial_field.csv", field_to_csv(&u0).as_bytes())?;
    for snap in &record.snapshots {
        write_snapshot_files(&mut writer, "snapshots", snap)?;
        write_profile_figures(&mut writer, "figures", snap, "u")?;
        write_profile_figures(&mut writer, "figures", snap, "eta")?;
    }

    let refined = match (&record.verdict, config.refine_levels) {
        (BlowupVerdict::Detected { bracket, .. }, levels @ 1..) => {
            Some(refine_blowup(&sim, &u0, *bracket, levels)?)
        }
        _ => None,
    };

    let mut report = json!({
        "equation": config.equation.name(),
        "verdict": verdict_json(&record.verdict),
        "energy_drift": energy_drift(&record),
        "samples": record.samples.len(),
        "final_time": record.samples.last().map(|s| s.time),
        "final_min_eta_theta": record.samples.last().map(|s| s.min_eta_theta),
        "config_sha256": sha256_hex(config.canonical_string().as_bytes()),
    });
    if let Some(r) = refined {
        report["refined_verdict"] = verdict_json(&r);
    }
    if config.equation == OperatorKind::Ewp {
        let e0 = record.samples[0].energy;
        report["growth_monitor"] = bound_report_json(&growth_monitor(&record, e0));
    }
    writer.write_json("report.json", &report)?;
    writer.finish(report)
}

struct WeldOutcome {
    label: String,
    result: Result<(NormalizedCurve, f64, f64, f64), String>,
}

fn weld_one(
    diffeo: &CircleDiffeo,
    opts: &WeldingOptions,
) -> Result<(NormalizedCurve, f64, f64, f64), String> {
    let sol = solve_welding(diffeo, opts).map_err(|e| e.to_string())?;
    let interior = interior_coefficients(&sol, opts).map_err(|e| e.to_string())?;
    let curve = normalize_curve(&sol, &interior).map_err(|e| e.to_string())?;
    let defect = welding_residual(&curve, diffeo, opts).map_err(|e| e.to_string())?;
    Ok((curve, sol.residual, interior.negative_mode_fraction, defect))
}

fn write_weld_outputs(
    writer: &mut OutputWriter,
    dir: &str,
    outcome: &WeldOutcome,
    grid: &[f64],
    config_hash: &str,
) -> Result<Value, CliError> {
    let label = &outcome.label;
    match &outcome.result {
        Ok((curve, residual, neg_fraction, defect)) => {
            writer.write(
                &format!("{dir}/curve_t{label}.csv"),
                curve_to_csv(grid, &curve.points).as_bytes(),
            )?;
            let pts: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.re, p.im)).collect();
            let svg = export_svg(&[Series::closed_curve(format!("curve t={label}"), pts)])
                .map_err(|e| CliError::runtime("svg", e))?;
            writer.write(&format!("{dir}/curve_t{label}.svg"), svg.as_bytes())?;
            let sidecar = json!({
                "a0": { "re": curve.translation.re, "im": curve.translation.im },
                "a1": { "re": curve.scale.re, "im": curve.scale.im },
                "solver_residual": residual,
                "negative_mode_fraction": neg_fraction,
                "round_trip_defect": defect,
                "config_sha256": config_hash,
            });
            writer.write_json(&format!("{dir}/curve_t{label}.json"), &sidecar)?;
            Ok(json!({ "time": label, "status": "welded", "round_trip_defect": defect }))
        }
        Err(message) => Ok(json!({ "time": label, "status": "refused", "reason": message })),
    }
}

fn weld(config: &ExperimentConfig) -> Result<Value, CliError> {
    let input_dir = config
        .welding_input_dir
        .clone()
        .unwrap_or_else(|| config.out_dir.join("snapshots"));
    if !input_dir.is_dir() {
        return Err(CliError::Validation {
            field: "welding.input_dir".into(),
            message: format!("{} is not a directory", input_dir.display()),
        });
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&input_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("snapshot_t") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Validation {
            field: "welding.input_dir".into(),
            message: format!("no snapshot_t*.csv files in {}", input_dir.display()),
        });
    }

    let opts = config.welding_options();
    let config_hash = sha256_hex(config.canonical_string().as_bytes());
    let mut writer = OutputWriter::new(&config.out_dir)?;
    let mut statuses = Vec::new();
    let mut failures = Vec::new();
    for path in &files {
        let name = path.file_name().unwrap().to_str().unwrap();
        let label = name
            .trim_start_matches("snapshot_t")
            .trim_end_matches(".csv")
            .to_string();
        let data = read_grid_csv(path)?;
        let outcome = match CircleDiffeo::from_samples(data.eta, data.eta_theta) {
            Ok(diffeo) => WeldOutcome { label: label.clone(), result: weld_one(&diffeo, &opts) },
            Err(e) => WeldOutcome { label: label.clone(), result: Err(e.to_string()) },
        };
        let grid = teichflow_core::field::uniform_grid(data.theta.len());
        let status = write_weld_outputs(&mut writer, "welding", &outcome, &grid, &config_hash)?;
        if outcome.result.is_err() {
            failures.push(label);
        }
        statuses.push(status);
    }
    let report = json!({
        "input_dir": input_dir.display().to_string(),
        "welds": statuses,
        "config_sha256": config_hash,
    });
    writer.write_json("weld_report.json", &report)?;
    let manifest = writer.finish(report)?;
    if failures.is_empty() {
        Ok(manifest)
    } else {
        Err(CliError::Runtime {
            kind: "welding".into(),
            message: format!("{} snapshot(s) refused: t = {}", failures.len(), failures.join(", ")),
        })
    }
}

fn run_verify(config: &ExperimentConfig) -> Result<Value, CliError> {
    let results = verify::run_all(config.seed, config.trials);
    let report = verify::report_json(config.seed, config.trials, &results);
    let mut writer = OutputWriter::new(&config.out_dir)?;
    writer.write_json("verify_report.json", &report)?;
    let manifest = writer.finish(report.clone())?;
    if results.iter().all(|r| r.passed()) {
        Ok(manifest)
    } else {
        let failed: Vec<&str> =
            results.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
        Err(CliError::Runtime {
            kind: "verify".into(),
            message: format!("suites failed: {}", failed.join(", ")),
        })
    }
}

fn certify(config: &ExperimentConfig) -> Result<Value, CliError> {
    let u0 = config.initial_field()?;
    let cert = teichflow_core::analysis::certify_blowup(&u0)
        .map_err(|e| CliError::runtime("certify", e))?;
    let mut writer = OutputWriter::new(&config.out_dir)?;
    let report = json!({
        "equation": config.equation.name(),
        "certificate": certificate_json(&cert),
        "config_sha256": sha256_hex(config.canonical_string().as_bytes()),
    });
    writer.write_json("certificate.json", &report)?;
    writer.finish(report)
}

/// The paper's initial condition for every figure: `sin(2x) + cos(3x)/2`.
fn paper_initial(band: usize) -> FourierField {
    FourierField::from_modes(band, &[(2, 0.0, 1.0), (3, 0.5, 0.0)])
}

fn run_with_retreat(
    sim: &teichflow_core::dynamics::SimulationConfig,
    u0: &FourierField,
    snapshots: &[f64],
) -> Result<(TrajectoryRecord, Option<f64>), CliError> {
    match run_simulation(sim, u0, snapshots) {
        Ok(record) => Ok((record, None)),
        Err(DynamicsError::NonFiniteState { time }) => {
            // post-blowup data eventually overflows; retreat to just before
            let mut shorter = sim.clone();
            shorter.t_final = (time - 20.0 * sim.dt).max(sim.dt);
            let kept: Vec<f64> =
                snapshots.iter().copied().filter(|&t| t <= shorter.t_final).collect();
            let record = run_simulation(&shorter, u0, &kept)?;
            Ok((record, Some(shorter.t_final)))
        }
        Err(e) => Err(e.into()),
    }
}

fn reproduce_paper(config: &ExperimentConfig) -> Result<Value, CliError> {
    let mut writer = OutputWriter::new(&config.out_dir)?;
    let u0 = paper_initial(256);
    let opts = config.welding_options();

    // Wunsch: frames before (t = 0.125) and after (t = 0.25) the breaking
    // time; integration continues past detection for the comparison frame.
    let mut wunsch_sim = teichflow_core::dynamics::SimulationConfig::new(OperatorKind::Wunsch);
    wunsch_sim.t_final = 0.26;
    wunsch_sim.continue_past_blowup = true;
    let (wunsch_record, wunsch_truncated) =
        run_with_retreat(&wunsch_sim, &u0, &[0.125, 0.25])?;
    writer.write("table1_wunsch_eulerian/trajectory.csv", trajectory_to_csv(&wunsch_record).as_bytes())?;
    for snap in &wunsch_record.snapshots {
        write_snapshot_files(&mut writer, "table1_wunsch_eulerian", snap)?;
        write_profile_figures(&mut writer, "table1_wunsch_eulerian", snap, "u")?;
        write_profile_figures(&mut writer, "table3_wunsch_lagrangian", snap, "eta")?;
    }

    // EWP: global solution, frames at t = 0.25 and t = 0.5.
    let ewp_sim = teichflow_core::dynamics::SimulationConfig::new(OperatorKind::Ewp);
    let ewp_record = run_simulation(&ewp_sim, &u0, &[0.25, 0.5])?;
    writer.write("table2_ewp_eulerian/trajectory.csv", trajectory_to_csv(&ewp_record).as_bytes())?;
    for snap in &ewp_record.snapshots {
        write_snapshot_files(&mut writer, "table2_ewp_eulerian", snap)?;
        write_profile_figures(&mut writer, "table2_ewp_eulerian", snap, "u")?;
        write_profile_figures(&mut writer, "table4_ewp_lagrangian", snap, "eta")?;
    }

    let config_hash = sha256_hex(config.canonical_string().as_bytes());
    let mut weld_statuses = Vec::new();
    let mut weld_observations = Vec::new();
    let mut weld_wunsch = |writer: &mut OutputWriter, snap: &Snapshot| -> Result<(), CliError> {
        let label = time_label(snap.state.time);
        let outcome = match CircleDiffeo::from_flow(&snap.flow) {
            Ok(diffeo) => WeldOutcome { label: label.clone(), result: weld_one(&diffeo, &opts) },
            Err(e) => WeldOutcome { label, result: Err(e.to_string()) },
        };
        if let Ok((curve, ..)) = &outcome.result {
            // the paper notes translation/scale stay nearly trivial when
            // the sin(x) mode vanishes; record the observed magnitudes
            weld_observations.push(json!({
                "time": outcome.label,
                "a0_abs": curve.translation.norm(),
                "a1_abs": curve.scale.norm(),
            }));
        }
        let status = write_weld_outputs(
            writer,
            "table5_wunsch_welding",
            &outcome,
            &snap.flow.grid,
            &config_hash,
        )?;
        weld_statuses.push(json!({ "table": 5, "status": status }));
        Ok(())
    };
    for snap in &wunsch_record.snapshots {
        weld_wunsch(&mut writer, snap)?;
    }
    for snap in &ewp_record.snapshots {
        let label = time_label(snap.state.time);
        let outcome = match CircleDiffeo::from_flow(&snap.flow) {
            Ok(diffeo) => WeldOutcome { label: label.clone(), result: weld_one(&diffeo, &opts) },
            Err(e) => WeldOutcome { label, result: Err(e.to_string()) },
        };
        let status = write_weld_outputs(
            &mut writer,
            "table6_ewp_welding",
            &outcome,
            &snap.flow.grid,
            &config_hash,
        )?;
        weld_statuses.push(json!({ "table": 6, "status": status }));
    }

    let e0 = ewp_record.samples[0].energy;
    let report = json!({
        "initial_condition": "sin(2x) + cos(3x)/2",
        "wunsch": {
            "verdict": verdict_json(&wunsch_record.verdict),
            "integration_truncated_at": wunsch_truncated,
            "energy_drift_pre_blowup": wunsch_record
                .samples
                .iter()
                .take_while(|s| s.min_eta_theta > wunsch_sim.slope_floor)
                .map(|s| ((s.energy - wunsch_record.samples[0].energy)
                    / wunsch_record.samples[0].energy)
                    .abs())
                .fold(0.0f64, f64::max),
        },
        "ewp": {
            "verdict": verdict_json(&ewp_record.verdict),
            "energy_drift": energy_drift(&ewp_record),
            "final_min_eta_theta": ewp_record.samples.last().map(|s| s.min_eta_theta),
            "growth_monitor": bound_report_json(&growth_monitor(&ewp_record, e0)),
        },
        "weldings": weld_statuses,
        "normalization_observations": weld_observations,
        "config_sha256": config_hash,
    });
    writer.write_json("report.json", &report)?;
    writer.finish(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small_config(dir: &Path) -> ExperimentConfig {
        let text = "equation = wunsch\nband_limit = 32\nflow_points = 64\ndt = 1e-3\n\
                    t_final = 0.05\ninit.mode = 2 1.0 0.0\nsnapshots = 0.02\n";
        let mut cfg = parse_config(text).unwrap();
        cfg.out_dir = dir.to_path_buf();
        cfg
    }

    #[test]
    fn simulate_writes_expected_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path());
        let manifest = execute(Verb::Simulate, &cfg).unwrap();
        let files: Vec<String> = manifest["files"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| f["path"].as_str().unwrap().to_string())
            .collect();
        assert!(files.contains(&"trajectory.csv".to_string()));
        assert!(files.iter().any(|f| f.starts_with("snapshots/snapshot_t0.02")));
        assert!(files.iter().any(|f| f.ends_with(".svg")));
        assert!(dir.path().join("manifest.json").exists());
        assert!(dir.path().join("report.json").exists());
    }

    #[test]
    fn simulate_then_weld_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path());
        execute(Verb::Simulate, &cfg).unwrap();
        let mut weld_cfg = cfg.clone();
        weld_cfg.out_dir = dir.path().join("weld_out");
        weld_cfg.welding_input_dir = Some(dir.path().join("snapshots"));
        let manifest = execute(Verb::Weld, &weld_cfg).unwrap();
        let files: Vec<String> = manifest["files"]
            .as_array()
            .unwrap()
            .iter()
            .map(|f| f["path"].as_str().unwrap().to_string())
            .collect();
        assert!(files.iter().any(|f| f.starts_with("welding/curve_t") && f.ends_with(".csv")));
        assert!(files.iter().any(|f| f.ends_with(".json")));
    }

    #[test]
    fn weld_without_snapshots_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_config(dir.path());
        cfg.welding_input_dir = Some(dir.path().join("missing"));
        let err = execute(Verb::Weld, &cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert_eq!(err.to_json()["error"]["exit_code"], 2);
    }

    #[test]
    fn verify_writes_all_pass_report() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_config(dir.path());
        cfg.trials = 5;
        cfg.seed = 0;
        let manifest = execute(Verb::Verify, &cfg).unwrap();
        assert_eq!(manifest["summary"]["all_pass"], true);
    }

    #[test]
    fn certify_emits_certificate() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config(dir.path());
        let manifest = execute(Verb::Certify, &cfg).unwrap();
        let slope = manifest["summary"]["certificate"]["u0_slope"].as_f64().unwrap();
        assert!(slope < 0.0);
    }

    #[test]
    fn identical_runs_produce_identical_manifests() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let mut cfg_a = small_config(dir_a.path());
        let mut cfg_b = small_config(dir_b.path());
        cfg_a.out_dir = dir_a.path().to_path_buf();
        cfg_b.out_dir = dir_b.path().to_path_buf();
        execute(Verb::Simulate, &cfg_a).unwrap();
        execute(Verb::Simulate, &cfg_b).unwrap();
        let a = fs::read_to_string(dir_a.path().join("manifest.json")).unwrap();
        let b = fs::read_to_string(dir_b.path().join("manifest.json")).unwrap();
        assert_eq!(a, b);
    }
}
