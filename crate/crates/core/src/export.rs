//! CSV writers, provenance comment blocks and the run manifest.
//!
//! Floats are written with 17 significant digits; lines end in LF.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dpa::{mean_fractions, ModelParams, Trajectory};
use crate::error::Result;
use crate::optimize::OptimizationResult;
use crate::profit::ProfitCurve;
use crate::sweep::{Status, SweepResult, ThresholdScan};

/// 17 significant digits, scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `# key: value` lines placed above a CSV header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    entries: Vec<(String, String)>,
}

impl Provenance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.push(key, value);
        self
    }

    pub fn params(mut self, p: &ModelParams) -> Self {
        self.push(
            "params",
            format!(
                "alpha={} beta1={} beta2={} gamma={} theta={} horizon={}",
                p.alpha, p.beta1, p.beta2, p.gamma, p.theta, p.horizon
            ),
        );
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let mut lines = v.lines();
            let _ = writeln!(out, "# {k}: {}", lines.next().unwrap_or(""));
            for line in lines {
                if line.is_empty() {
                    out.push_str("#\n");
                } else {
                    let _ = writeln!(out, "#   {line}");
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryForm {
    /// `t,node,P,A`
    Long,
    /// `t,P_mean,A_mean`
    Mean,
}

pub fn trajectory_csv(traj: &Trajectory, form: TrajectoryForm, prov: &Provenance) -> String {
    let mut out = prov.render();
    match form {
        TrajectoryForm::Long => {
            out.push_str("t,node,P,A\n");
            for (&t, s) in traj.times().iter().zip(traj.states()) {
                let t = fmt_float(t);
                for (i, (&p, &a)) in s.potential().iter().zip(s.adopting()).enumerate() {
                    let _ = writeln!(out, "{t},{i},{},{}", fmt_float(p), fmt_float(a));
                }
            }
        }
        TrajectoryForm::Mean => {
            out.push_str("t,P_mean,A_mean\n");
            for m in mean_fractions(traj) {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    fmt_float(m.t),
                    fmt_float(m.potential),
                    fmt_float(m.adopting)
                );
            }
        }
    }
    out
}

pub fn profit_curve_csv(curve: &ProfitCurve, prov: &Provenance) -> String {
    let mut out = prov.render();
    out.push_str("theta,EP\n");
    for (&t, &ep) in curve.thetas.iter().zip(&curve.profits) {
        let _ = writeln!(out, "{},{}", fmt_float(t), fmt_float(ep));
    }
    out
}

pub fn optimization_csv(r: &OptimizationResult, prov: &Provenance) -> String {
    let mut out = prov.render();
    out.push_str("theta_star,ep_star,evaluations,method\n");
    let _ = writeln!(
        out,
        "{},{},{},{}",
        fmt_float(r.theta_star),
        fmt_float(r.ep_star),
        r.evaluations,
        r.method
    );
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// One row per sweep value.
pub fn sweep_records_csv(result: &SweepResult, prov: &Provenance) -> String {
    let mut out = prov.render();
    out.push_str(
        "index,factor,value,graph_id,realizations,status,P_steady,P_steady_sd,\
         A_steady,A_steady_sd,reached,t_stop,EP,EP_sd\n",
    );
    for (i, r) in result.records.iter().enumerate() {
        let status = match &r.status {
            Status::Ok => "ok".to_string(),
            Status::Failed(msg) => format!("error: {msg}"),
        };
        let s = r.steady.as_ref();
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            result.spec.factor,
            csv_field(&r.value.to_string()),
            csv_field(&r.graph_id),
            r.realizations,
            csv_field(&status),
            opt_float(s.map(|s| s.potential.mean)),
            opt_float(s.map(|s| s.potential.sd)),
            opt_float(s.map(|s| s.adopting.mean)),
            opt_float(s.map(|s| s.adopting.sd)),
            s.map(|s| s.reached.to_string()).unwrap_or_default(),
            opt_float(s.map(|s| s.t_stop.mean)),
            opt_float(r.profit.map(|p| p.mean)),
            opt_float(r.profit.map(|p| p.sd)),
        );
    }
    out
}

/// Long-form mean trajectories, `None` when none were requested.
pub fn sweep_trajectories_csv(result: &SweepResult, prov: &Provenance) -> Option<String> {
    if result.records.iter().all(|r| r.trajectory.is_none()) {
        return None;
    }
    let mut out = prov.render();
    out.push_str("index,value,t,P_mean,A_mean\n");
    for (i, r) in result.records.iter().enumerate() {
        let value = csv_field(&r.value.to_string());
        for m in r.trajectory.iter().flatten() {
            let _ = writeln!(
                out,
                "{i},{value},{},{},{}",
                fmt_float(m.t),
                fmt_float(m.potential),
                fmt_float(m.adopting)
            );
        }
    }
    Some(out)
}

/// EP matrix: one row per β₁, one column per network, then the row label.
pub fn threshold_csv(scan: &ThresholdScan, prov: &Provenance) -> String {
    let mut prov = prov.clone();
    if scan.flips.is_empty() {
        prov.push("flips", "none");
    }
    for f in &scan.flips {
        prov.push(
            "flip",
            format!(
                "beta1 in ({}, {}): {} -> {}",
                f.beta1_low, f.beta1_high, f.from, f.to
            ),
        );
    }
    let mut out = prov.render();
    out.push_str("beta1");
    for n in &scan.networks {
        let _ = write!(out, ",{}", csv_field(n));
    }
    for n in &scan.networks {
        let _ = write!(out, ",{}", csv_field(&format!("sd {n}")));
    }
    out.push_str(",direction\n");
    for (row, &b) in scan.beta1.iter().enumerate() {
        out.push_str(&fmt_float(b));
        for v in scan.ep[row].iter().chain(&scan.ep_sd[row]) {
            let _ = write!(out, ",{}", fmt_float(*v));
        }
        let _ = writeln!(out, ",{}", scan.directions[row]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub outputs: Vec<ManifestEntry>,
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Writes `files` (name, contents) into `dir` plus `manifest.json` listing
/// each file with its size and SHA-256.
pub fn write_outputs(dir: impl AsRef<Path>, files: &[(String, String)]) -> Result<Manifest> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents)?;
        outputs.push(ManifestEntry {
            file: name.clone(),
            bytes: contents.len(),
            sha256: sha256_hex(contents.as_bytes()),
        });
    }
    let manifest = Manifest { outputs };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    std::fs::write(dir.join("manifest.json"), json)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpa::{integrate, StateVector};
    use crate::network::{influential_degree, Graph};

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(0.0), "0.0000000000000000e0");
        let x: f64 = fmt_float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(x, std::f64::consts::PI);
    }

    #[test]
    fn trajectory_headers() {
        let g = Graph::complete(2);
        let d = influential_degree(&g);
        let params = ModelParams { horizon: 0.2, ..Default::default() };
        let traj = integrate(&StateVector::zeros(2), &params, &g, &d, 0.1).unwrap();
        let prov = Provenance::new().with("dt", 0.1);
        let long = trajectory_csv(&traj, TrajectoryForm::Long, &prov);
        let mut lines = long.lines();
        assert_eq!(lines.next(), Some("# dt: 0.1"));
        assert_eq!(lines.next(), Some("t,node,P,A"));
        assert_eq!(long.lines().count(), 2 + 3 * 2);

        let mean = trajectory_csv(&traj, TrajectoryForm::Mean, &Provenance::new());
        assert_eq!(mean.lines().next(), Some("t,P_mean,A_mean"));
        assert_eq!(mean.lines().count(), 4);
        assert!(!mean.contains('\r'));
    }

    #[test]
    fn multiline_provenance() {
        let p = Provenance::new().with("config", "a = 1\nb = 2");
        assert_eq!(p.render(), "# config: a = 1\n#   b = 2\n");
    }

    #[test]
    fn manifest_hashes_files() {
        let dir = tempfile::tempdir().unwrap();
        let m = write_outputs(dir.path(), &[("a.csv".into(), "x\n".into())]).unwrap();
        assert_eq!(m.outputs[0].sha256, sha256_hex(b"x\n"));
        assert_eq!(std::fs::read_to_string(dir.path().join("a.csv")).unwrap(), "x\n");
        assert!(dir.path().join("manifest.json").exists());
    }
}
