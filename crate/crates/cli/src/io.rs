//! CSV readers/writers and JSON report assembly. All float output uses the
//! shortest round-trip form so files are byte-deterministic and lossless.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};
use teichflow_core::analysis::{BlowupCertificate, BoundReport};
use teichflow_core::dynamics::{BlowupTrigger, BlowupVerdict, LagrangianState, TrajectoryRecord};
use teichflow_core::FourierField;

/// Fourier field CSV: header `n,re,im`, one row per mode from -N to N.
pub fn field_to_csv(field: &FourierField) -> String {
    let mut out = String::from("n,re,im\n");
    for (n, c) in field.iter() {
        let _ = writeln!(out, "{},{},{}", n, c.re, c.im);
    }
    out
}

pub fn read_field_csv(path: &Path) -> io::Result<FourierField> {
    let text = fs::read_to_string(path)?;
    parse_field_csv(&text).map_err(|m| io::Error::new(io::ErrorKind::InvalidData, m))
}

pub fn parse_field_csv(text: &str) -> Result<FourierField, String> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line.trim() != "n,re,im" {
                return Err(format!("expected header `n,re,im`, got `{line}`"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(format!("row {idx}: expected 3 columns"));
        }
        let n: i64 = cols[0].trim().parse().map_err(|_| format!("row {idx}: bad mode index"))?;
        let re: f64 = cols[1].trim().parse().map_err(|_| format!("row {idx}: bad value"))?;
        let im: f64 = cols[2].trim().parse().map_err(|_| format!("row {idx}: bad value"))?;
        rows.push((n, Complex64::new(re, im)));
    }
    if rows.is_empty() {
        return Err("no data rows".into());
    }
    let band = rows.len() / 2;
    if rows.len() != 2 * band + 1 {
        return Err(format!("expected an odd number of rows, got {}", rows.len()));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * band + 1];
    for (k, (n, c)) in rows.into_iter().enumerate() {
        if n != k as i64 - band as i64 {
            return Err(format!("modes must run -N..N in order; row {k} has n = {n}"));
        }
        coeffs[k] = c;
    }
    FourierField::from_coeffs(band, coeffs).map_err(|e| e.to_string())
}

/// Trajectory CSV with the diagnostic columns in spec order.
pub fn trajectory_to_csv(record: &TrajectoryRecord) -> String {
    let mut out = String::from("t,energy,min_u_theta,max_abs_u,tail_fraction,min_eta_theta\n");
    for s in &record.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.time, s.energy, s.min_u_theta, s.max_abs_u, s.tail_fraction, s.min_eta_theta
        );
    }
    out
}

/// Snapshot grid CSV: `theta,u,eta,eta_theta`.
pub fn grid_to_csv(flow: &LagrangianState, u_values: &[f64]) -> String {
    let mut out = String::from("theta,u,eta,eta_theta\n");
    for j in 0..flow.len() {
        let _ = writeln!(out, "{},{},{},{}", flow.grid[j], u_values[j], flow.eta[j], flow.eta_theta[j]);
    }
    out
}

pub struct GridData {
    pub theta: Vec<f64>,
    pub u: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_theta: Vec<f64>,
}

pub fn read_grid_csv(path: &Path) -> io::Result<GridData> {
    let text = fs::read_to_string(path)?;
    parse_grid_csv(&text).map_err(|m| io::Error::new(io::ErrorKind::InvalidData, m))
}

pub fn parse_grid_csv(text: &str) -> Result<GridData, String> {
    let mut data = GridData { theta: Vec::new(), u: Vec::new(), eta: Vec::new(), eta_theta: Vec::new() };
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line.trim() != "theta,u,eta,eta_theta" {
                return Err(format!("expected header `theta,u,eta,eta_theta`, got `{line}`"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(format!("row {idx}: expected 4 columns"));
        }
        let mut vals = [0.0f64; 4];
        for (slot, col) in vals.iter_mut().zip(cols.iter()) {
            *slot = col.trim().parse().map_err(|_| format!("row {idx}: bad value `{col}`"))?;
        }
        data.theta.push(vals[0]);
        data.u.push(vals[1]);
        data.eta.push(vals[2]);
        data.eta_theta.push(vals[3]);
    }
    if data.theta.is_empty() {
        return Err("no data rows".into());
    }
    Ok(data)
}

/// Curve CSV: `theta,re,im` for the normalized plane curve.
pub fn curve_to_csv(grid: &[f64], points: &[Complex64]) -> String {
    let mut out = String::from("theta,re,im\n");
    for (t, p) in grid.iter().zip(points.iter()) {
        let _ = writeln!(out, "{},{},{}", t, p.re, p.im);
    }
    out
}

pub fn bound_report_json(report: &BoundReport) -> Value {
    let mut obj = json!({
        "quantity": report.quantity,
        "sup_norm": report.sup_norm,
        "bound": report.bound,
        "slack": report.slack,
        "seminorms": {
            "h_half_sq": report.seminorms.h_half_sq,
            "h_one_sq": report.seminorms.h_one_sq,
            "h_three_halves_sq": report.seminorms.h_three_halves_sq,
        },
    });
    if let Some(c) = report.growth_constant {
        obj["growth_constant"] = json!(c);
    }
    obj
}

pub fn certificate_json(cert: &BlowupCertificate) -> Value {
    json!({
        "theta0": cert.theta0,
        "u0_slope": cert.u0_slope,
        "omega0_value": cert.omega0_value,
        "refinement_tolerance": cert.refinement_tolerance,
    })
}

pub fn verdict_json(verdict: &BlowupVerdict) -> Value {
    match verdict {
        BlowupVerdict::None => json!({ "blowup": false }),
        BlowupVerdict::Detected { bracket, trigger } => json!({
            "blowup": true,
            "bracket": [bracket.0, bracket.1],
            "trigger": match trigger {
                BlowupTrigger::SlopeCollapse => "slope_collapse",
                BlowupTrigger::SpectralTail => "spectral_tail",
            },
        }),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_csv_round_trip() {
        let f = FourierField::from_modes(3, &[(1, 0.25, -0.5), (3, 1.0, 2.0)]);
        let csv = field_to_csv(&f);
        assert!(csv.starts_with("n,re,im\n"));
        let back = parse_field_csv(&csv).unwrap();
        for n in -3i64..=3 {
            assert!((f.coeff(n) - back.coeff(n)).norm() < 1e-15);
        }
    }

    #[test]
    fn field_csv_rejects_malformed_input() {
        assert!(parse_field_csv("wrong,header\n").is_err());
        assert!(parse_field_csv("n,re,im\n0,1.0\n").is_err());
        assert!(parse_field_csv("n,re,im\n5,1.0,0.0\n").is_err());
    }

    #[test]
    fn grid_csv_round_trip() {
        let flow = LagrangianState::identity(8);
        let u: Vec<f64> = (0..8).map(|j| j as f64 * 0.1).collect();
        let csv = grid_to_csv(&flow, &u);
        let data = parse_grid_csv(&csv).unwrap();
        assert_eq!(data.theta.len(), 8);
        assert!((data.u[3] - 0.3).abs() < 1e-15);
        assert!((data.eta[5] - flow.eta[5]).abs() < 1e-15);
    }

    #[test]
    fn hashes_are_stable() {
        assert_eq!(
            sha256_hex(b"teichflow"),
            sha256_hex(b"teichflow"),
        );
        assert_ne!(sha256_hex(b"a"), sha256_hex(b"b"));
    }
}
