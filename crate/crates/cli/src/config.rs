//! Flat `key = value` configuration with dotted keys, layered as
//! defaults → scenario → config file → command-line flags, resolved into
//! typed run parameters.

use crate::scenarios;
use selsys::karamata::LogPowerFactor;
use selsys::mesh::{GradedMesh1D, Geometry};
use selsys::regimes::{AbsorptionSpec, CompetitionSpec, SystemSpec};
use selsys::system::{SystemFamily, SystemOptions};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "spec.family",
    "spec.p",
    "spec.q",
    "spec.a1",
    "spec.a2",
    "spec.b1",
    "spec.b2",
    "spec.k1",
    "spec.k2",
    "spec.alpha1",
    "spec.alpha2",
    "spec.beta1",
    "spec.beta2",
    "spec.lambda1",
    "spec.lambda2",
    "spec.mu1",
    "spec.mu2",
    "spec.r",
    "spec.k",
    "spec.delta",
    "spec.L.A",
    "spec.L.mus",
    "spec.L1.A",
    "spec.L1.mus",
    "spec.L2.A",
    "spec.L2.mus",
    "mesh.geometry",
    "mesh.dim",
    "mesh.n",
    "mesh.s",
    "solver.tol_residual",
    "solver.max_newton",
    "solver.damping",
    "solver.eps_grad",
    "solver.max_outer",
    "solver.tol_change",
    "solver.tol_system_residual",
    "solver.gauss_seidel",
    "run.m_init",
    "run.stages",
    "run.seed",
    "run.out",
    "fit.window_lo",
    "fit.window_hi",
    "fit.log_a",
    "verify.suite",
];

/// Layered flat settings; later applications override earlier ones.
#[derive(Debug, Clone)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

impl Default for Settings {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        let defaults = [
            ("spec.family", "system"),
            ("spec.p", "2"),
            ("spec.q", "2"),
            ("spec.a1", "0"),
            ("spec.a2", "0"),
            ("spec.b1", "0.5"),
            ("spec.b2", "0.5"),
            ("spec.k1", "0"),
            ("spec.k2", "0"),
            ("mesh.geometry", "interval"),
            ("mesh.dim", "2"),
            ("mesh.n", "1025"),
            ("mesh.s", "2"),
            ("solver.tol_residual", "1e-10"),
            ("solver.max_newton", "200"),
            ("solver.damping", "0.5"),
            ("solver.eps_grad", "1e-10"),
            ("solver.max_outer", "500"),
            ("solver.tol_change", "1e-9"),
            ("solver.tol_system_residual", "1e-7"),
            ("solver.gauss_seidel", "false"),
            ("run.m_init", "0.5"),
            ("run.stages", "12"),
            ("run.seed", "42"),
            ("run.out", "out"),
            ("fit.window_lo", "1e-4"),
            ("fit.window_hi", "1e-2"),
            (
                "verify.suite",
                "peral_r1.5,peral_r2,peral_r3,comparison,shell_invariance,monotone,symmetry,subhomogeneity",
            ),
        ];
        for (k, v) in defaults {
            map.insert(k.to_string(), v.to_string());
        }
        Self { map }
    }
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(format!("unknown configuration key '{key}'"));
        }
        self.map.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn map(&self) -> &BTreeMap<String, String> {
        &self.map
    }

    pub fn apply_scenario(&mut self, name: &str) -> Result<(), String> {
        let pairs = scenarios::settings_for(name)
            .ok_or_else(|| format!("unknown scenario '{name}'"))?;
        self.map.insert("scenario".into(), name.into());
        for (k, v) in pairs {
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Parses a flat `key = value` file (# comments, blank lines allowed).
    pub fn parse_file_pairs(path: &Path) -> Result<Vec<(String, String)>, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(pairs)
    }

    fn f64(&self, key: &str) -> Result<f64, String> {
        let raw = self
            .map
            .get(key)
            .ok_or_else(|| format!("missing key '{key}'"))?;
        raw.parse()
            .map_err(|_| format!("key '{key}': '{raw}' is not a number"))
    }

    fn usize(&self, key: &str) -> Result<usize, String> {
        let raw = self
            .map
            .get(key)
            .ok_or_else(|| format!("missing key '{key}'"))?;
        raw.parse()
            .map_err(|_| format!("key '{key}': '{raw}' is not a count"))
    }

    fn bool(&self, key: &str) -> Result<bool, String> {
        match self.map.get(key).map(|s| s.as_str()) {
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") | None => Ok(false),
            Some(other) => Err(format!("key '{key}': '{other}' is not a boolean")),
        }
    }

    fn log_factor(&self, prefix: &str, diameter: f64) -> Result<LogPowerFactor<f64>, String> {
        let a_key = format!("{prefix}.A");
        let mus_key = format!("{prefix}.mus");
        let a = self.map.get(&a_key);
        let mus = self.map.get(&mus_key);
        if a.is_none() && mus.is_none() {
            return Ok(LogPowerFactor::one(diameter));
        }
        let scale: f64 = a
            .ok_or_else(|| format!("{mus_key} given without {a_key}"))?
            .parse()
            .map_err(|_| format!("key '{a_key}' is not a number"))?;
        let exponents: Vec<f64> = match mus {
            None => Vec::new(),
            Some(list) => list
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse()
                        .map_err(|_| format!("key '{mus_key}': bad exponent '{t}'"))
                })
                .collect::<Result<_, _>>()?,
        };
        LogPowerFactor::new(scale, exponents, diameter).map_err(|e| e.to_string())
    }

    /// Builds the typed run description.
    pub fn resolve(&self) -> Result<ResolvedRun, String> {
        let geometry = match self.map.get("mesh.geometry").map(|s| s.as_str()) {
            Some("interval") | None => Geometry::Interval,
            Some("disk") => Geometry::RadialDisk {
                dim: self.usize("mesh.dim")? as u32,
            },
            Some(other) => return Err(format!("unknown geometry '{other}'")),
        };
        let n = self.usize("mesh.n")?;
        let s = self.f64("mesh.s")?;
        let mesh = GradedMesh1D::build(geometry, n, s).map_err(|e| e.to_string())?;
        let diameter = mesh.diameter();

        let problem = match self.map.get("spec.family").map(|s| s.as_str()) {
            Some("system") | None => {
                let spec = SystemSpec::new(
                    self.f64("spec.p")?,
                    self.f64("spec.q")?,
                    self.f64("spec.a1")?,
                    self.f64("spec.a2")?,
                    self.f64("spec.b1")?,
                    self.f64("spec.b2")?,
                    self.f64("spec.k1")?,
                    self.f64("spec.k2")?,
                    self.log_factor("spec.L1", diameter)?,
                    self.log_factor("spec.L2", diameter)?,
                )
                .map_err(|e| e.to_string())?;
                ProblemKind::Family(SystemFamily::PowerCoupling(spec))
            }
            Some("absorption") => {
                let spec = AbsorptionSpec {
                    p: self.f64("spec.p")?,
                    q: self.f64("spec.q")?,
                    a1: self.f64("spec.a1")?,
                    a2: self.f64("spec.a2")?,
                    b1: self.f64("spec.b1")?,
                    b2: self.f64("spec.b2")?,
                    alpha1: self.f64("spec.alpha1")?,
                    alpha2: self.f64("spec.alpha2")?,
                    beta1: self.f64("spec.beta1")?,
                    beta2: self.f64("spec.beta2")?,
                };
                ProblemKind::Family(SystemFamily::Absorption(spec))
            }
            Some("competition") => {
                let spec = CompetitionSpec {
                    p: self.f64("spec.p")?,
                    q: self.f64("spec.q")?,
                    lambda1: self.f64("spec.lambda1")?,
                    lambda2: self.f64("spec.lambda2")?,
                    mu1: self.f64("spec.mu1")?,
                    mu2: self.f64("spec.mu2")?,
                    alpha1: self.f64("spec.alpha1")?,
                    alpha2: self.f64("spec.alpha2")?,
                    beta1: self.f64("spec.beta1")?,
                    beta2: self.f64("spec.beta2")?,
                    a1: self.f64("spec.a1")?,
                    a2: self.f64("spec.a2")?,
                    b1: self.f64("spec.b1")?,
                    b2: self.f64("spec.b2")?,
                };
                spec.validate().map_err(|e| e.to_string())?;
                ProblemKind::Family(SystemFamily::Competition(spec))
            }
            Some("scalar") => ProblemKind::Scalar {
                r: self.f64("spec.r")?,
                k: self.f64("spec.k")?,
                delta: self.f64("spec.delta")?,
                l: self.log_factor("spec.L", diameter)?,
            },
            Some(other) => return Err(format!("unknown spec family '{other}'")),
        };

        let mut opts = SystemOptions::<f64>::default();
        opts.scalar.tol_residual = self.f64("solver.tol_residual")?;
        opts.scalar.max_newton = self.usize("solver.max_newton")?;
        opts.scalar.damping = self.f64("solver.damping")?;
        opts.scalar.eps_grad = self.f64("solver.eps_grad")?;
        opts.max_outer = self.usize("solver.max_outer")?;
        opts.tol_change = self.f64("solver.tol_change")?;
        opts.tol_residual = self.f64("solver.tol_system_residual")?;
        opts.gauss_seidel = self.bool("solver.gauss_seidel")?;

        let fit_window = (self.f64("fit.window_lo")?, self.f64("fit.window_hi")?);
        if !(fit_window.0 > 0.0 && fit_window.0 < fit_window.1) {
            return Err(format!("bad fit window ({}, {})", fit_window.0, fit_window.1));
        }
        let log_a = match self.map.get("fit.log_a") {
            Some(raw) => raw
                .parse()
                .map_err(|_| format!("key 'fit.log_a': '{raw}' is not a number"))?,
            None => 2.0 * diameter,
        };

        let suite = self
            .map
            .get("verify.suite")
            .map(|s| {
                s.split(',')
                    .map(|t| t.trim().to_string())
                    .filter(|t| !t.is_empty())
                    .collect()
            })
            .unwrap_or_default();

        Ok(ResolvedRun {
            settings: self.map.clone(),
            scenario: self.map.get("scenario").cloned(),
            problem,
            mesh,
            opts,
            m_init: self.f64("run.m_init")?,
            stages: self.usize("run.stages")?,
            fit_window,
            log_a,
            seed: self.usize("run.seed")? as u64,
            out_dir: PathBuf::from(self.map.get("run.out").cloned().unwrap_or_else(|| "out".into())),
            suite,
        })
    }
}

/// The problem being run: one of the coupled families or a scalar case.
#[derive(Debug, Clone)]
pub enum ProblemKind {
    Family(SystemFamily<f64>),
    Scalar {
        r: f64,
        k: f64,
        delta: f64,
        l: LogPowerFactor<f64>,
    },
}

/// Fully resolved run parameters plus the flat settings they came from.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub settings: BTreeMap<String, String>,
    pub scenario: Option<String>,
    pub problem: ProblemKind,
    pub mesh: Arc<GradedMesh1D<f64>>,
    pub opts: SystemOptions<f64>,
    pub m_init: f64,
    pub stages: usize,
    pub fit_window: (f64, f64),
    pub log_a: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub suite: Vec<String>,
}

/// Layers settings in the documented order and resolves them.
pub fn build_settings(
    config: Option<&Path>,
    scenario_flag: Option<&str>,
    out_flag: Option<&Path>,
    seed_flag: Option<u64>,
) -> Result<Settings, String> {
    let file_pairs = match config {
        Some(path) => Settings::parse_file_pairs(path)?,
        None => Vec::new(),
    };
    let scenario = scenario_flag
        .map(|s| s.to_string())
        .or_else(|| {
            file_pairs
                .iter()
                .find(|(k, _)| k == "scenario")
                .map(|(_, v)| v.clone())
        });
    let mut settings = Settings::default();
    if let Some(name) = &scenario {
        settings.apply_scenario(name)?;
    }
    for (k, v) in &file_pairs {
        if k == "scenario" {
            continue;
        }
        settings.set(k, v)?;
    }
    if let Some(out) = out_flag {
        settings.set("run.out", &out.display().to_string())?;
    }
    if let Some(seed) = seed_flag {
        settings.set("run.seed", &seed.to_string())?;
    }
    Ok(settings)
}
