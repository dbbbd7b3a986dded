//! Deterministic artifact writers: CSV files at full precision and the
//! JSON run manifest.

use selsys::mesh::GridFunction;
use selsys::regimes::RegimeReport;
use selsys::system::SystemRunReport;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// 17 significant digits, enough to make reruns byte-comparable.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| format!("mkdir {}: {e}", parent.display()))?;
    }
    let mut file =
        std::fs::File::create(path).map_err(|e| format!("create {}: {e}", path.display()))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| format!("write {}: {e}", path.display()))
}

/// `solution.csv`: node, coordinate, boundary distance, u and (for
/// systems) v.
pub fn write_solution(
    path: &Path,
    u: &GridFunction<f64>,
    v: Option<&GridFunction<f64>>,
) -> Result<(), String> {
    let mesh = u.mesh();
    let mut out = String::from("node,x,d,u,v\n");
    for i in 0..mesh.len() {
        let vcol = v.map(|g| f17(g.get(i))).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i,
            f17(mesh.node(i)),
            f17(mesh.distance(i)),
            f17(u.get(i)),
            vcol
        ));
    }
    write_file(path, &out)
}

/// `convergence.csv`: per-iteration residuals and change.
pub fn write_convergence_system(path: &Path, report: &SystemRunReport<f64>) -> Result<(), String> {
    let mut out = String::from("iter,res_u,res_v,change\n");
    for (i, rec) in report.history.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            f17(rec.res_u),
            f17(rec.res_v),
            f17(rec.change)
        ));
    }
    write_file(path, &out)
}

pub fn write_convergence_scalar(path: &Path, residuals: &[f64]) -> Result<(), String> {
    let mut out = String::from("iter,res_u,res_v,change\n");
    for (i, r) in residuals.iter().enumerate() {
        out.push_str(&format!("{},{},,\n", i + 1, f17(*r)));
    }
    write_file(path, &out)
}

#[derive(Debug, Clone, Serialize)]
pub struct FitRow {
    pub component: String,
    pub gamma_hat: f64,
    pub stderr: f64,
    pub predicted: Option<f64>,
    pub abs_dev: Option<f64>,
    pub log_exponent_hat: Option<f64>,
    pub log_exponent_predicted: Option<f64>,
}

/// `fits.csv`: fitted exponent vs prediction per component.
pub fn write_fits(path: &Path, rows: &[FitRow]) -> Result<(), String> {
    let mut out = String::from("component,gamma_hat,stderr,predicted,abs_dev\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.component,
            f17(row.gamma_hat),
            f17(row.stderr),
            row.predicted.map(f17).unwrap_or_default(),
            row.abs_dev.map(f17).unwrap_or_default(),
        ));
    }
    write_file(path, &out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeManifest {
    pub feasible: bool,
    pub regime: String,
    pub gamma_u: Option<f64>,
    pub gamma_v: Option<f64>,
    pub slowly_varying_u: (f64, f64),
    pub slowly_varying_v: (f64, f64),
    pub log_correction_u: Option<f64>,
    pub log_correction_v: Option<f64>,
    pub sigma: Option<f64>,
    pub sigma_window: Option<(f64, f64)>,
    pub regularity: String,
    pub epsilon: Option<f64>,
    pub gamma_w: Option<f64>,
    pub margins: Vec<(String, f64)>,
}

impl RegimeManifest {
    pub fn from_report(report: &RegimeReport<f64>) -> Self {
        Self {
            feasible: report.feasible,
            regime: report.regime.to_string(),
            gamma_u: report.gamma_u,
            gamma_v: report.gamma_v,
            slowly_varying_u: report.slowly_varying_u,
            slowly_varying_v: report.slowly_varying_v,
            log_correction_u: report.log_correction_u,
            log_correction_v: report.log_correction_v,
            sigma: report.sigma.map(|s| s.value),
            sigma_window: report.sigma.map(|s| (s.lo, s.hi)),
            regularity: report.regularity.to_string(),
            epsilon: report.epsilon,
            gamma_w: report.gamma_w,
            margins: report.margins.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub method: String,
    pub iterations: usize,
    pub converged: bool,
    pub final_res_u: f64,
    pub final_res_v: Option<f64>,
    pub m: Option<f64>,
    pub sigma: Option<f64>,
    pub kappa_u: Option<f64>,
    pub kappa_v: Option<f64>,
    pub max_shell_violation: Option<f64>,
    pub monotone_min_increment: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketManifest {
    pub lower_exponent: f64,
    pub upper_exponent: f64,
    pub c_lower: f64,
    pub c_upper: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub scenario: Option<String>,
    pub seed: u64,
    pub settings: BTreeMap<String, String>,
    pub regime: RegimeManifest,
    pub run: RunSummary,
    pub fits: Vec<FitRow>,
    pub bracket: Option<BracketManifest>,
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<(), String> {
    let json = serde_json::to_string_pretty(manifest).map_err(|e| e.to_string())?;
    write_file(path, &(json + "\n"))
}

/// Plain-text calibration table keyed by r.
pub fn write_calibration(path: &Path, rows: &[(f64, f64)]) -> Result<(), String> {
    let mut out = String::from("# r  C_r\n");
    for (r, c) in rows {
        out.push_str(&format!("{} {}\n", r, f17(*c)));
    }
    write_file(path, &out)
}
