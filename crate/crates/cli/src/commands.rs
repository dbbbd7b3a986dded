//! The three subcommands. Each returns its process exit code:
//! classify: 0 feasible, 2 infeasible, 1 malformed config;
//! solve: 0 converged, 3 no convergence, 4 shell construction failure,
//! 1 config; verify: 0 all properties pass, 5 any failure, 1 config.

use crate::config::{ProblemKind, ResolvedRun};
use crate::output::{self, BracketManifest, FitRow, Manifest, RegimeManifest, RunSummary};
use selsys::analysis::{
    calibrate_cr, check_comparison, fit_boundary_exponent, fit_log_correction, peral_gap,
    ComparisonVerdict,
};
use selsys::error::SolverError;
use selsys::karamata::LogPowerFactor;
use selsys::mesh::{GradedMesh1D, Geometry, GridFunction};
use selsys::regimes::{scalar_regime, BoundProfile, RegimeReport, SystemSpec};
use selsys::scalar_solver::{solve_scalar, ScalarProblem, SolveOptions};
use selsys::system::{
    aux_profile_exponent, build_shell, composite_scaling_exponent, fixed_point_iterate,
    monotone_scheme, uniqueness_probe, StartPoint, SystemFamily, SystemOptions, SystemRunReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn classify_problem(run: &ResolvedRun) -> Result<RegimeReport<f64>, String> {
    match &run.problem {
        ProblemKind::Family(family) => Ok(family.classify()),
        ProblemKind::Scalar { r, k, delta, l } => {
            scalar_regime(*r, *k, *delta, l).map_err(|e| e.to_string())
        }
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

/// Prints the regime, predicted exponents, σ-window and all margins.
pub fn run_classify(run: &ResolvedRun) -> i32 {
    let report = match classify_problem(run) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if !report.feasible {
        let reason = report
            .margins
            .iter()
            .find(|(_, m)| *m <= 0.0)
            .map(|(name, m)| format!("{name} margin {m}"))
            .unwrap_or_else(|| "no regime matched".into());
        let reason = if reason.starts_with("H1") {
            format!("subhomogeneity margin {}", reason.trim_start_matches("H1 margin "))
        } else {
            reason
        };
        println!("infeasible: {reason}");
        for (name, value) in &report.margins {
            println!("margin {name} = {value}");
        }
        return 2;
    }
    let mut line = format!(
        "regime={} gamma_u={} gamma_v={} regularity={}",
        report.regime,
        fmt_opt(report.gamma_u),
        fmt_opt(report.gamma_v),
        report.regularity
    );
    if matches!(report.regularity, selsys::regimes::Regularity::VeryWeak) {
        line.push_str(" solution_space=very-weak");
    }
    if let Some(sigma) = report.sigma {
        line.push_str(&format!(
            " sigma={} sigma_window=({},{})",
            sigma.value, sigma.lo, sigma.hi
        ));
    }
    if let Some(eps) = report.epsilon {
        line.push_str(&format!(" epsilon={eps}"));
    }
    if let Some(ell) = report.log_correction_u {
        line.push_str(&format!(" log_correction_u={ell}"));
    }
    if let Some(ell) = report.log_correction_v {
        line.push_str(&format!(" log_correction_v={ell}"));
    }
    if let Some(gw) = report.gamma_w {
        line.push_str(&format!(" gamma_w={gw}"));
    }
    println!("{line}");
    for (name, value) in &report.margins {
        println!("margin {name} = {value}");
    }
    0
}

fn solver_exit_code(err: &SolverError) -> i32 {
    match err {
        SolverError::NonConvergence { .. } => 3,
        SolverError::ShellConstructionFailure { .. } => 4,
        _ => 1,
    }
}

/// Runs the configured scenario and writes solution, convergence, fits and
/// manifest artifacts.
pub fn run_solve(run: &ResolvedRun) -> i32 {
    let report = match classify_problem(run) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if !report.feasible {
        eprintln!("error: spec is infeasible; run `classify` for the margins");
        return 1;
    }
    match &run.problem {
        ProblemKind::Scalar { r, k, delta, l } => solve_scalar_case(run, &report, *r, *k, *delta, l),
        ProblemKind::Family(family) => solve_system_case(run, &report, family),
    }
}

fn solve_scalar_case(
    run: &ResolvedRun,
    regime: &RegimeReport<f64>,
    r: f64,
    k: f64,
    delta: f64,
    l: &LogPowerFactor<f64>,
) -> i32 {
    let mesh = &run.mesh;
    let l_local = l.clone();
    let coefficient = GridFunction::from_distance_fn(Arc::clone(mesh), move |d| {
        d.powf(-k) * l_local.eval(d).unwrap_or(1.0)
    });
    let prob = ScalarProblem::power(r, coefficient, delta);
    let warm_exponent = aux_profile_exponent(r, k, delta);
    let warm = GridFunction::from_distance_fn(Arc::clone(mesh), |d| d.powf(warm_exponent));
    let (w, scalar_report) = match solve_scalar(&prob, mesh, &run.opts.scalar, Some(&warm)) {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {e}");
            return solver_exit_code(&e);
        }
    };
    let mut fits = Vec::new();
    match fit_boundary_exponent(&w, run.fit_window) {
        Ok(fit) => {
            let predicted = regime.gamma_u;
            let log_hat = regime.log_correction_u.and_then(|_| {
                fit_log_correction(&w, regime.gamma_u.unwrap_or(1.0), run.log_a, run.fit_window)
                    .ok()
            });
            fits.push(FitRow {
                component: "u".into(),
                gamma_hat: fit.gamma_hat,
                stderr: fit.stderr,
                predicted,
                abs_dev: predicted.map(|p| (fit.gamma_hat - p).abs()),
                log_exponent_hat: log_hat,
                log_exponent_predicted: regime.log_correction_u,
            });
        }
        Err(e) => eprintln!("warning: exponent fit skipped: {e}"),
    }

    let manifest = Manifest {
        scenario: run.scenario.clone(),
        seed: run.seed,
        settings: run.settings.clone(),
        regime: RegimeManifest::from_report(regime),
        run: RunSummary {
            method: "scalar".into(),
            iterations: scalar_report.newton_iterations,
            converged: true,
            final_res_u: scalar_report.final_residual,
            final_res_v: None,
            m: None,
            sigma: None,
            kappa_u: None,
            kappa_v: None,
            max_shell_violation: None,
            monotone_min_increment: None,
        },
        fits: fits.clone(),
        bracket: None,
    };
    if let Err(e) = write_artifacts_scalar(run, &w, &scalar_report.residual_history, &fits, &manifest) {
        eprintln!("error: {e}");
        return 1;
    }
    println!(
        "solved scalar case: regime={} iterations={} residual={}",
        regime.regime, scalar_report.newton_iterations, scalar_report.final_residual
    );
    0
}

fn write_artifacts_scalar(
    run: &ResolvedRun,
    w: &GridFunction<f64>,
    residuals: &[f64],
    fits: &[FitRow],
    manifest: &Manifest,
) -> Result<(), String> {
    let dir = &run.out_dir;
    output::write_solution(&dir.join("solution.csv"), w, None)?;
    output::write_convergence_scalar(&dir.join("convergence.csv"), residuals)?;
    output::write_fits(&dir.join("fits.csv"), fits)?;
    output::write_manifest(&dir.join("manifest.json"), manifest)
}

fn solve_system_case(run: &ResolvedRun, regime: &RegimeReport<f64>, family: &SystemFamily<f64>) -> i32 {
    let mesh = &run.mesh;
    let shell = match build_shell(family, regime, mesh, run.m_init, &run.opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return solver_exit_code(&e);
        }
    };
    // cooperative very-weak regimes run the expanding-domain scheme
    let very_weak = matches!(regime.regularity, selsys::regimes::Regularity::VeryWeak);
    let (solution, method) = if very_weak && family.is_strictly_cooperative() {
        match monotone_scheme(family, regime, &shell, mesh, &run.opts, run.stages) {
            Ok(sol) => (sol, "monotone_scheme"),
            Err(e) => {
                eprintln!("error: {e}");
                return solver_exit_code(&e);
            }
        }
    } else {
        match fixed_point_iterate(family, regime, &shell, mesh, &run.opts, StartPoint::LowerCorner)
        {
            Ok(sol) => (sol, "fixed_point"),
            Err(e) => {
                eprintln!("error: {e}");
                return solver_exit_code(&e);
            }
        }
    };

    let mut report = solution.report.clone();
    let mut fits = Vec::new();
    for (component, grid, predicted, log_predicted) in [
        ("u", &solution.u, regime.gamma_u, regime.log_correction_u),
        ("v", &solution.v, regime.gamma_v, regime.log_correction_v),
    ] {
        match fit_boundary_exponent(grid, run.fit_window) {
            Ok(fit) => {
                let log_hat = log_predicted.and_then(|_| {
                    fit_log_correction(grid, predicted.unwrap_or(1.0), run.log_a, run.fit_window)
                        .ok()
                });
                if component == "u" {
                    report.fitted_gamma_u = Some(fit.gamma_hat);
                } else {
                    report.fitted_gamma_v = Some(fit.gamma_hat);
                }
                fits.push(FitRow {
                    component: component.into(),
                    gamma_hat: fit.gamma_hat,
                    stderr: fit.stderr,
                    predicted,
                    abs_dev: predicted.map(|p| (fit.gamma_hat - p).abs()),
                    log_exponent_hat: log_hat,
                    log_exponent_predicted: log_predicted,
                });
            }
            Err(e) => eprintln!("warning: {component} exponent fit skipped: {e}"),
        }
    }

    let bracket = bracket_check(run, regime, &solution.u);
    let manifest = Manifest {
        scenario: run.scenario.clone(),
        seed: run.seed,
        settings: run.settings.clone(),
        regime: RegimeManifest::from_report(regime),
        run: RunSummary {
            method: method.into(),
            iterations: report.iterations,
            converged: report.converged,
            final_res_u: report.final_res_u,
            final_res_v: Some(report.final_res_v),
            m: Some(report.m),
            sigma: Some(report.sigma),
            kappa_u: Some(report.kappa_u),
            kappa_v: Some(report.kappa_v),
            max_shell_violation: Some(report.max_shell_violation),
            monotone_min_increment: report.monotone_min_increment,
        },
        fits: fits.clone(),
        bracket: bracket.clone(),
    };

    let dir = &run.out_dir;
    let write = (|| -> Result<(), String> {
        output::write_solution(&dir.join("solution.csv"), &solution.u, Some(&solution.v))?;
        output::write_convergence_system(&dir.join("convergence.csv"), &report)?;
        output::write_fits(&dir.join("fits.csv"), &fits)?;
        output::write_manifest(&dir.join("manifest.json"), &manifest)
    })();
    if let Err(e) = write {
        eprintln!("error: {e}");
        return 1;
    }
    println!(
        "solved system: regime={} method={} iterations={} converged={} res_u={} res_v={}",
        regime.regime,
        method,
        report.iterations,
        report.converged,
        report.final_res_u,
        report.final_res_v
    );
    if report.converged {
        0
    } else {
        3
    }
}

/// For limit regimes: extracts the two-sided bracket constants
/// `C_lo d^{e_lo} ≤ u ≤ C_hi d^{e_hi}` over the fit window and verifies
/// them nodewise.
fn bracket_check(
    run: &ResolvedRun,
    regime: &RegimeReport<f64>,
    u: &GridFunction<f64>,
) -> Option<BracketManifest> {
    regime.epsilon?;
    let recipe = regime.recipe_u.as_ref()?;
    let lower_exponent = match recipe.lower {
        BoundProfile::DistancePower { exponent } => exponent,
        BoundProfile::AuxSolution => 1.0,
    };
    let upper_exponent = match recipe.upper {
        BoundProfile::DistancePower { exponent } => exponent,
        BoundProfile::AuxSolution => regime.gamma_u.unwrap_or(1.0),
    };
    let mesh = u.mesh();
    let mut c_lower = f64::INFINITY;
    let mut c_upper = 0.0f64;
    let mut any = false;
    for i in mesh.interior_indices() {
        let d = mesh.distance(i);
        if d < run.fit_window.0 || d > run.fit_window.1 {
            continue;
        }
        any = true;
        c_lower = c_lower.min(u.get(i) / d.powf(lower_exponent));
        c_upper = c_upper.max(u.get(i) / d.powf(upper_exponent));
    }
    if !any {
        return None;
    }
    let mut holds = c_lower > 0.0 && c_lower.is_finite() && c_upper.is_finite();
    if holds {
        for i in mesh.interior_indices() {
            let d = mesh.distance(i);
            if d < run.fit_window.0 || d > run.fit_window.1 {
                continue;
            }
            let lo = c_lower * d.powf(lower_exponent);
            let hi = c_upper * d.powf(upper_exponent);
            if !(lo <= u.get(i) * (1.0 + 1e-12) && u.get(i) <= hi * (1.0 + 1e-12)) {
                holds = false;
                break;
            }
        }
    }
    Some(BracketManifest {
        lower_exponent,
        upper_exponent,
        c_lower,
        c_upper,
        holds,
    })
}

struct PropertyOutcome {
    name: String,
    pass: bool,
    detail: String,
}

/// Runs the selected property suites and prints one machine-readable
/// PASS/FAIL line per property.
pub fn run_verify(run: &ResolvedRun) -> i32 {
    let mut outcomes = Vec::new();
    let mut calibration_rows = Vec::new();
    for name in &run.suite {
        let outcome = match name.as_str() {
            "peral_r1.5" => peral_property(1.5, run.seed, &mut calibration_rows),
            "peral_r2" => peral_property(2.0, run.seed, &mut calibration_rows),
            "peral_r3" => peral_property(3.0, run.seed, &mut calibration_rows),
            "comparison" => comparison_property(),
            "shell_invariance" => shell_invariance_property(run),
            "monotone" => monotone_property(run),
            "symmetry" => symmetry_property(),
            "subhomogeneity" => subhomogeneity_property(),
            other => PropertyOutcome {
                name: other.into(),
                pass: false,
                detail: "unknown property".into(),
            },
        };
        outcomes.push(outcome);
    }
    if !calibration_rows.is_empty() {
        if let Err(e) = output::write_calibration(&run.out_dir.join("calibration.txt"), &calibration_rows)
        {
            eprintln!("warning: could not write calibration table: {e}");
        }
    }
    let mut failures = 0;
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {} {}", o.name, o.detail);
        if !o.pass {
            failures += 1;
        }
    }
    println!(
        "properties: {} passed, {} failed",
        outcomes.len() - failures,
        failures
    );
    if failures == 0 {
        0
    } else {
        5
    }
}

fn peral_property(r: f64, seed: u64, calibration: &mut Vec<(f64, f64)>) -> PropertyOutcome {
    let name = format!("peral_r{r}");
    let c = match calibrate_cr(r, 100_000, seed) {
        Ok(c) => c,
        Err(e) => {
            return PropertyOutcome {
                name,
                pass: false,
                detail: e.to_string(),
            }
        }
    };
    calibration.push((r, c));
    if r == 2.0 && c != 0.5 {
        return PropertyOutcome {
            name,
            pass: false,
            detail: format!("calibration at r=2 must be exactly 0.5, got {c}"),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut min_gap = f64::INFINITY;
    let check = |x: [f64; 2], y: [f64; 2], min_gap: &mut f64| -> Result<(), String> {
        if r < 2.0 && x == [0.0, 0.0] && y == [0.0, 0.0] {
            return Ok(());
        }
        let gap = peral_gap(&x, &y, r, c).map_err(|e| e.to_string())?;
        *min_gap = min_gap.min(gap);
        Ok(())
    };
    for _ in 0..100_000 {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let y = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if let Err(e) = check(x, y, &mut min_gap) {
            return PropertyOutcome {
                name,
                pass: false,
                detail: e,
            };
        }
    }
    for kk in 1..200 {
        let t = kk as f64 / 200.0;
        for y in [[t * 0.5, 0.0], [-t, 0.0], [2.0 * t, 0.0], [t + 1e-4, 1e-4]] {
            if let Err(e) = check([t, 0.0], y, &mut min_gap) {
                return PropertyOutcome {
                    name,
                    pass: false,
                    detail: e,
                };
            }
        }
    }
    PropertyOutcome {
        name,
        pass: min_gap >= -1e-12,
        detail: format!("C_r={c} min_gap={min_gap}"),
    }
}

fn comparison_property() -> PropertyOutcome {
    let name = "comparison".to_string();
    let mesh = GradedMesh1D::build(Geometry::Interval, 513, 2.0).unwrap();
    let k = GridFunction::from_fn(Arc::clone(&mesh), |_| 1.0);
    let prob = ScalarProblem::power(2.0, k.clone(), -0.5);
    let psi = match solve_scalar(&prob, &mesh, &SolveOptions::default(), None) {
        Ok((psi, _)) => psi,
        Err(e) => {
            return PropertyOutcome {
                name,
                pass: false,
                detail: e.to_string(),
            }
        }
    };
    let scaled_holds = matches!(
        check_comparison(&psi.scale(0.9), &psi, &k, -0.5, 2.0, None).verdict,
        ComparisonVerdict::Holds
    );
    let equal_holds = matches!(
        check_comparison(&psi, &psi, &k, -0.5, 2.0, None).verdict,
        ComparisonVerdict::Holds
    );
    let gated = matches!(
        check_comparison(&psi.scale(1.1), &psi, &k, -0.5, 2.0, None).verdict,
        ComparisonVerdict::HypothesesNotSatisfied { .. }
    );
    PropertyOutcome {
        name,
        pass: scaled_holds && equal_holds && gated,
        detail: format!("scaled={scaled_holds} equal={equal_holds} hypothesis_gate={gated}"),
    }
}

fn small_mesh() -> Arc<GradedMesh1D<f64>> {
    GradedMesh1D::build(Geometry::Interval, 257, 2.0).unwrap()
}

fn default_alt2_family() -> SystemFamily<f64> {
    SystemFamily::PowerCoupling(
        SystemSpec::new(
            2.0,
            2.0,
            0.0,
            0.0,
            0.5,
            0.5,
            0.0,
            0.0,
            LogPowerFactor::one(1.0),
            LogPowerFactor::one(1.0),
        )
        .unwrap(),
    )
}

/// The resolved family when the config names one, the built-in
/// cooperative default otherwise.
fn property_family(run: &ResolvedRun) -> SystemFamily<f64> {
    match &run.problem {
        ProblemKind::Family(f) => f.clone(),
        ProblemKind::Scalar { .. } => default_alt2_family(),
    }
}

fn shell_invariance_property(run: &ResolvedRun) -> PropertyOutcome {
    let name = "shell_invariance".to_string();
    let family = property_family(run);
    let regime = family.classify();
    let mesh = small_mesh();
    let opts = SystemOptions::default();
    let result = (|| -> Result<(bool, String), SolverError> {
        let shell = build_shell(&family, &regime, &mesh, 0.5, &opts)?;
        let sol = fixed_point_iterate(&family, &regime, &shell, &mesh, &opts, StartPoint::LowerCorner)?;
        let confined = sol.report.max_shell_violation <= 1e-9;
        Ok((
            sol.report.converged && confined,
            format!(
                "converged={} max_violation={}",
                sol.report.converged, sol.report.max_shell_violation
            ),
        ))
    })();
    match result {
        Ok((pass, detail)) => PropertyOutcome { name, pass, detail },
        Err(e) => PropertyOutcome {
            name,
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn monotone_property(run: &ResolvedRun) -> PropertyOutcome {
    let name = "monotone".to_string();
    let family = property_family(run);
    let regime = family.classify();
    let mesh = small_mesh();
    let opts = SystemOptions::default();
    let stages = run.stages.min(6).max(1);
    let result = (|| -> Result<(bool, String), SolverError> {
        let shell = build_shell(&family, &regime, &mesh, run.m_init.min(0.9), &opts)?;
        let sol = monotone_scheme(&family, &regime, &shell, &mesh, &opts, stages)?;
        let min_inc = sol.report.monotone_min_increment.unwrap_or(f64::NEG_INFINITY);
        let confined = sol.report.max_shell_violation <= 1e-9;
        Ok((
            min_inc >= -1e-10 && confined,
            format!(
                "min_increment={min_inc} max_violation={}",
                sol.report.max_shell_violation
            ),
        ))
    })();
    match result {
        Ok((pass, detail)) => PropertyOutcome { name, pass, detail },
        Err(e) => PropertyOutcome {
            name,
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn symmetry_property() -> PropertyOutcome {
    let name = "symmetry".to_string();
    let family = default_alt2_family();
    let regime = family.classify();
    let mesh = small_mesh();
    let opts = SystemOptions::default();
    let result = (|| -> Result<(bool, String), SolverError> {
        let shell = build_shell(&family, &regime, &mesh, 0.5, &opts)?;
        let sol = fixed_point_iterate(&family, &regime, &shell, &mesh, &opts, StartPoint::Midpoint)?;
        let distance = sol.u.sup_distance(&sol.v);
        Ok((distance <= 1e-8, format!("|u - v| = {distance}")))
    })();
    match result {
        Ok((pass, detail)) => PropertyOutcome { name, pass, detail },
        Err(e) => PropertyOutcome {
            name,
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn subhomogeneity_property() -> PropertyOutcome {
    let name = "subhomogeneity".to_string();
    let spec = SystemSpec::new(
        2.0,
        2.0,
        0.0,
        0.0,
        0.5,
        0.5,
        0.0,
        0.0,
        LogPowerFactor::one(1.0),
        LogPowerFactor::one(1.0),
    )
    .unwrap();
    let mesh = small_mesh();
    let u0 = GridFunction::from_distance_fn(Arc::clone(&mesh), |d| d);
    match composite_scaling_exponent(&spec, &mesh, &SolveOptions::default(), &u0, 0.5) {
        Ok(exponent) => {
            let predicted = 0.25;
            PropertyOutcome {
                name,
                pass: (exponent - predicted).abs() <= 0.05,
                detail: format!("exponent={exponent} predicted={predicted}"),
            }
        }
        Err(e) => PropertyOutcome {
            name,
            pass: false,
            detail: e.to_string(),
        },
    }
}

/// Multi-start uniqueness distance for a resolved system run (used by the
/// acceptance suite).
pub fn uniqueness_distance(run: &ResolvedRun) -> Result<f64, String> {
    let family = match &run.problem {
        ProblemKind::Family(f) => f.clone(),
        _ => return Err("uniqueness probe needs a system family".into()),
    };
    let regime = family.classify();
    let shell = build_shell(&family, &regime, &run.mesh, run.m_init, &run.opts)
        .map_err(|e| e.to_string())?;
    uniqueness_probe(&family, &regime, &shell, &run.mesh, &run.opts).map_err(|e| e.to_string())
}

/// Full solve returning the in-memory artifacts (used by the acceptance
/// suite to inspect histories).
pub fn solve_in_memory(
    run: &ResolvedRun,
) -> Result<(GridFunction<f64>, GridFunction<f64>, SystemRunReport<f64>, RegimeReport<f64>), String>
{
    let family = match &run.problem {
        ProblemKind::Family(f) => f.clone(),
        _ => return Err("system solve needs a system family".into()),
    };
    let regime = family.classify();
    if !regime.feasible {
        return Err("infeasible spec".into());
    }
    let shell = build_shell(&family, &regime, &run.mesh, run.m_init, &run.opts)
        .map_err(|e| e.to_string())?;
    let very_weak = matches!(regime.regularity, selsys::regimes::Regularity::VeryWeak);
    let sol = if very_weak && family.is_strictly_cooperative() {
        monotone_scheme(&family, &regime, &shell, &run.mesh, &run.opts, run.stages)
    } else {
        fixed_point_iterate(
            &family,
            &regime,
            &shell,
            &run.mesh,
            &run.opts,
            StartPoint::LowerCorner,
        )
    }
    .map_err(|e| e.to_string())?;
    Ok((sol.u, sol.v, sol.report, regime))
}
