//! Oracle-backed integration tests: closed-form solutions, predicted
//! boundary exponents at reduced resolution, and the composite scaling
//! law. The full-resolution versions live in the CLI acceptance suite.

use selsys::analysis::{fit_boundary_exponent, fit_log_correction};
use selsys::karamata::LogPowerFactor;
use selsys::mesh::{GradedMesh1D, Geometry, GridFunction};
use selsys::regimes::{classify_regime, scalar_regime, Regime};
use selsys::scalar_solver::{solve_scalar, ScalarProblem, SolveOptions};
use selsys::system::{
    build_shell, fixed_point_iterate, monotone_scheme, uniqueness_probe, StartPoint, SystemFamily,
    SystemOptions,
};
use selsys::SystemSpec64;
use std::sync::Arc;

fn interval(n: usize, s: f64) -> Arc<GradedMesh1D<f64>> {
    GradedMesh1D::build(Geometry::Interval, n, s).unwrap()
}

fn l_one() -> LogPowerFactor<f64> {
    LogPowerFactor::one(1.0)
}

/// Closed form of `-Δ_p w = 1` on (0,1).
fn p_poisson_exact(p: f64, x: f64) -> f64 {
    let c = p / (p - 1.0);
    (p - 1.0) / p * (0.5f64.powf(c) - (x - 0.5).abs().powf(c))
}

#[test]
fn scalar_p_poisson_matches_closed_form() {
    for p in [1.5, 2.0, 3.0] {
        let mesh = interval(513, 1.0);
        let rhs = GridFunction::from_fn(Arc::clone(&mesh), |_| 1.0);
        let prob = ScalarProblem::fixed(p, rhs);
        let (w, _) = solve_scalar(&prob, &mesh, &SolveOptions::default(), None).unwrap();
        let mut err: f64 = 0.0;
        for (i, &x) in mesh.nodes().iter().enumerate() {
            err = err.max((w.get(i) - p_poisson_exact(p, x)).abs());
        }
        assert!(err <= 1e-3, "p = {p}: max error {err}");
    }
}

#[test]
fn scalar_exponent_recovery_case_i_and_iii() {
    // reduced-resolution version of the full acceptance run
    let cases = [(-0.5, 1.0, 0.0), (-1.5, 0.8, 0.0)];
    for (delta, predicted, k) in cases {
        let mesh = interval(1025, 3.0);
        let coeff = GridFunction::from_distance_fn(Arc::clone(&mesh), |d| d.powf(-k));
        let prob = ScalarProblem::power(2.0, coeff, delta);
        let (w, _) = solve_scalar(&prob, &mesh, &SolveOptions::default(), None).unwrap();
        let fit = fit_boundary_exponent(&w, (1e-4, 1e-2)).unwrap();
        assert!(
            (fit.gamma_hat - predicted).abs() <= 0.03,
            "delta = {delta}: fitted {} vs predicted {predicted}",
            fit.gamma_hat
        );
    }
}

#[test]
fn scalar_log_correction_case_ii() {
    let mesh = interval(1025, 3.0);
    let coeff = GridFunction::from_distance_fn(Arc::clone(&mesh), |d| d.powf(-1.0));
    let prob = ScalarProblem::power(2.0, coeff, 0.0);
    let (w, _) = solve_scalar(&prob, &mesh, &SolveOptions::default(), None).unwrap();
    let report = scalar_regime(2.0, 1.0, 0.0, &l_one()).unwrap();
    assert_eq!(report.regime, Regime::Scalar2);
    let ell = fit_log_correction(&w, 1.0, 2.0, (1e-4, 1e-2)).unwrap();
    assert!(
        (ell - report.log_correction_u.unwrap()).abs() <= 0.1,
        "log exponent {ell}"
    );
}

#[test]
fn limit_regime_run_converges_and_brackets_distance() {
    let spec = SystemSpec64::new(
        2.0, 2.0, -0.5, -0.5, 0.5, 0.5, 1.0, 1.0, l_one(), l_one(),
    )
    .unwrap();
    let family = SystemFamily::PowerCoupling(spec);
    let regime = family.classify();
    assert_eq!(regime.regime, Regime::Limit1);
    let mesh = interval(1025, 2.0);
    let opts = SystemOptions::default();
    let shell = build_shell(&family, &regime, &mesh, 0.5, &opts).unwrap();
    let sol = fixed_point_iterate(&family, &regime, &shell, &mesh, &opts, StartPoint::LowerCorner)
        .unwrap();
    assert!(sol.report.converged, "iterations {}", sol.report.iterations);
    let eps = regime.epsilon.unwrap();
    // extract the bracket constants on the fit window and verify nodewise
    let mut c_lo = f64::INFINITY;
    let mut c_hi = 0.0f64;
    for i in mesh.interior_indices() {
        let d = mesh.distance(i);
        if !(1e-4..=1e-2).contains(&d) {
            continue;
        }
        c_lo = c_lo.min(sol.u.get(i) / d);
        c_hi = c_hi.max(sol.u.get(i) / d.powf(1.0 - eps));
    }
    assert!(c_lo > 0.0 && c_lo.is_finite());
    assert!(c_hi > 0.0 && c_hi.is_finite());
    for i in mesh.interior_indices() {
        let d = mesh.distance(i);
        if !(1e-4..=1e-2).contains(&d) {
            continue;
        }
        assert!(c_lo * d <= sol.u.get(i) * (1.0 + 1e-12));
        assert!(sol.u.get(i) <= c_hi * d.powf(1.0 - eps) * (1.0 + 1e-12));
    }
}

#[test]
fn coop_very_weak_monotone_run_recovers_exponent() {
    let spec = SystemSpec64::new(
        2.0, 2.0, 0.0, 0.0, 0.1, 0.1, 1.8, 1.8, l_one(), l_one(),
    )
    .unwrap();
    let family = SystemFamily::PowerCoupling(spec);
    let regime = family.classify();
    assert_eq!(regime.regime, Regime::Coop1);
    let mesh = interval(1025, 3.0);
    let opts = SystemOptions::default();
    let shell = build_shell(&family, &regime, &mesh, 0.9, &opts).unwrap();
    let sol = monotone_scheme(&family, &regime, &shell, &mesh, &opts, 8).unwrap();
    assert!(sol.report.monotone_min_increment.unwrap() >= -1e-10);
    assert!(sol.report.max_shell_violation <= 1e-9);
    let fit = fit_boundary_exponent(&sol.u, (1e-3, 1e-1)).unwrap();
    assert!(
        (fit.gamma_hat - 2.0 / 9.0).abs() <= 0.05,
        "fitted {}",
        fit.gamma_hat
    );
}

#[test]
fn alt1_system_run_recovers_exponent_and_uniqueness() {
    let spec = SystemSpec64::new(
        2.0, 2.0, 0.0, 0.0, -0.5, -0.5, 1.2, 1.2, l_one(), l_one(),
    )
    .unwrap();
    let family = SystemFamily::PowerCoupling(spec);
    let regime = family.classify();
    assert_eq!(regime.regime, Regime::Alt1);
    let mesh = interval(1025, 3.0);
    let opts = SystemOptions::default();
    let shell = build_shell(&family, &regime, &mesh, 0.5, &opts).unwrap();
    let sol = fixed_point_iterate(&family, &regime, &shell, &mesh, &opts, StartPoint::LowerCorner)
        .unwrap();
    assert!(sol.report.converged);
    let fit = fit_boundary_exponent(&sol.u, (1e-4, 1e-2)).unwrap();
    assert!(
        (fit.gamma_hat - 8.0 / 15.0).abs() <= 0.05,
        "fitted {} vs 8/15",
        fit.gamma_hat
    );
    let distance = uniqueness_probe(&family, &regime, &shell, &mesh, &opts).unwrap();
    assert!(distance <= 1e-6, "probe distance {distance}");
}
