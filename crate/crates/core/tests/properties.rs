//! Property tests for the classification calculus, the Karamata factors
//! and the discretization.

use proptest::prelude::*;
use selsys::karamata::LogPowerFactor;
use selsys::mesh::{distance_fn, r_laplacian_residual, GradedMesh1D, Geometry, GridFunction};
use selsys::regimes::{check_subhomogeneity, classify_regime, find_sigma, Regime, SystemSpec};
use std::sync::Arc;

fn l_one() -> LogPowerFactor<f64> {
    LogPowerFactor::one(1.0)
}

fn arb_spec() -> impl Strategy<Value = SystemSpec<f64>> {
    (
        1.2f64..3.5,
        1.2f64..3.5,
        -1.5f64..0.9,
        -1.5f64..0.9,
        -1.2f64..1.2,
        -1.2f64..1.2,
        0.0f64..1.9,
        0.0f64..1.9,
    )
        .prop_filter_map("spec invariants", |(p, q, a1, a2, b1, b2, k1, k2)| {
            if b1.abs() < 1e-3 || b2.abs() < 1e-3 {
                return None;
            }
            let k1 = k1.min(p - 0.05);
            let k2 = k2.min(q - 0.05);
            let a1 = a1.min(p - 1.05);
            let a2 = a2.min(q - 1.05);
            SystemSpec::new(p, q, a1, a2, b1, b2, k1, k2, l_one(), l_one()).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sigma_window_empty_iff_subhomogeneity_fails(spec in arb_spec()) {
        let (ok, _) = check_subhomogeneity(&spec);
        prop_assert_eq!(find_sigma(&spec).is_some(), ok);
    }

    #[test]
    fn classification_commutes_with_component_swap(spec in arb_spec()) {
        let direct = classify_regime(&spec.swapped());
        let expected = classify_regime(&spec).swapped_components();
        prop_assert_eq!(direct.regime, expected.regime);
        match (direct.gamma_u, expected.gamma_u) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-10),
            (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
        }
        match (direct.gamma_v, expected.gamma_v) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-10),
            (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
        }
    }

    #[test]
    fn alt1_internal_delta_lies_in_admissible_window(spec in arb_spec()) {
        let report = classify_regime(&spec);
        if report.regime == Regime::Alt1 {
            let gamma1 = report.gamma_u.unwrap();
            let delta1 = (spec.p - 1.0) - (spec.p - spec.k1) / gamma1;
            let lo = spec.k1 - 2.0 + (spec.k1 - 1.0) / (spec.p - 1.0);
            let hi = spec.k1 - 1.0;
            prop_assert!(delta1 > lo && delta1 < hi, "delta1 = {delta1} not in ({lo}, {hi})");
            let aux = report.recipe_u.as_ref().unwrap().aux.unwrap();
            prop_assert!((aux.delta - delta1).abs() < 1e-12);
        }
    }

    #[test]
    fn regime_is_scale_free_in_l_factors(spec in arb_spec()) {
        let with_l = SystemSpec::new(
            spec.p, spec.q, spec.a1, spec.a2, spec.b1, spec.b2, spec.k1, spec.k2,
            LogPowerFactor::new(50.0, vec![0.4], 1.0).unwrap(),
            LogPowerFactor::new(70.0, vec![-0.2], 1.0).unwrap(),
        ).unwrap();
        let ra = classify_regime(&with_l);
        let rb = classify_regime(&spec);
        prop_assert_eq!(ra.regime, rb.regime);
        match (ra.gamma_u, rb.gamma_u) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
            (a, b) => prop_assert_eq!(a.is_some(), b.is_some()),
        }
    }

    #[test]
    fn karamata_product_closure(
        mus_a in prop::collection::vec(-1.5f64..1.5, 0..3),
        mus_b in prop::collection::vec(-1.5f64..1.5, 0..3),
        t in 1e-6f64..1.0,
    ) {
        let a = LogPowerFactor::new(100.0, mus_a, 1.0).unwrap();
        let b = LogPowerFactor::new(100.0, mus_b, 1.0).unwrap();
        let combined = a.concat(&b);
        let lhs = combined.eval(t).unwrap();
        let rhs = a.eval(t).unwrap() * b.eval(t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    // The slowly varying limits only become visible along t = 2^{-j},
    // j = 10..40, once ε·ln(1/t) dominates Σ|μ_n|·lnln(1/t); that bounds
    // the admissible exponent sizes for this sampled range.
    #[test]
    fn karamata_slowly_varying_limits(
        mus in prop::collection::vec(-0.02f64..0.02, 0..3),
    ) {
        let l = LogPowerFactor::new(100.0, mus, 1.0).unwrap();
        for eps in [0.1, 0.01] {
            let mut up_prev = f64::INFINITY;
            let mut down_prev = 0.0f64;
            for j in 10..=40 {
                let t = 2.0f64.powi(-j);
                let v = l.eval(t).unwrap();
                let up = t.powf(eps) * v;
                let down = t.powf(-eps) * v;
                prop_assert!(up < up_prev, "t^eps L not decreasing at j = {j}");
                prop_assert!(down > down_prev, "t^-eps L not increasing at j = {j}");
                up_prev = up;
                down_prev = down;
            }
            prop_assert!(up_prev < 1.0, "t^eps L should head to zero");
            prop_assert!(down_prev > 1.0, "t^-eps L should grow");
        }
    }

    #[test]
    fn karamata_integral_monotone_in_lower_bound(
        mus in prop::collection::vec(-1.0f64..1.0, 0..3),
        t1 in 1e-5f64..0.5,
        shrink in 0.1f64..0.9,
    ) {
        let l = LogPowerFactor::new(100.0, mus, 1.0).unwrap();
        let t0 = t1 * shrink;
        let big = l.integral_over_t(t0, 2.0).unwrap();
        let small = l.integral_over_t(t1, 2.0).unwrap();
        prop_assert!(big > small);
    }

    #[test]
    fn residual_is_linear_at_r_two(seed in 0u64..1000) {
        use rand::{Rng, SeedableRng};
        let mesh = GradedMesh1D::build(Geometry::Interval, 33, 2.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut sample = || {
            GridFunction::new(
                Arc::clone(&mesh),
                (0..mesh.len()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )
        };
        let u = sample();
        let w = sample();
        let zero = GridFunction::zeros(Arc::clone(&mesh));
        let (alpha, beta) = (0.37, -1.21);
        let combo = GridFunction::new(
            Arc::clone(&mesh),
            u.values().iter().zip(w.values()).map(|(&a, &b)| alpha * a + beta * b).collect(),
        );
        let ru = r_laplacian_residual(&u, 2.0, &zero, 0.0);
        let rw = r_laplacian_residual(&w, 2.0, &zero, 0.0);
        let rc = r_laplacian_residual(&combo, 2.0, &zero, 0.0);
        for i in 0..mesh.len() {
            let expected: f64 = alpha * ru.get(i) + beta * rw.get(i);
            let scale = expected.abs().max(1.0);
            prop_assert!((rc.get(i) - expected).abs() < 1e-8 * scale);
        }
    }

    #[test]
    fn distance_field_properties(n in 16usize..80, s in 1.0f64..4.0) {
        let mesh = GradedMesh1D::build(Geometry::Interval, n, s).unwrap();
        let d = distance_fn(&mesh);
        for i in 0..mesh.len() {
            prop_assert!(d.get(i) >= 0.0);
            prop_assert_eq!(d.get(i) == 0.0, mesh.is_boundary(i));
            if i > 0 {
                let dx = mesh.node(i) - mesh.node(i - 1);
                prop_assert!((d.get(i) - d.get(i - 1)).abs() <= dx + 1e-15);
            }
        }
    }
}
