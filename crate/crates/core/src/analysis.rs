//! Boundary-exponent and log-correction fitting, the discrete
//! weak-comparison verdict, and the convexity-gap oracle behind it.

use crate::error::SolverError;
use crate::mesh::{r_laplacian_residual, Geometry, GridFunction};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

const MIN_FIT_POINTS: usize = 8;

/// Least-squares boundary-exponent estimate.
#[derive(Debug, Clone, Copy)]
pub struct ExponentFit<T> {
    pub gamma_hat: T,
    pub stderr: T,
    pub window: (T, T),
    pub n_points: usize,
    pub log_exponent_hat: Option<T>,
}

/// Default fitting window in d-units.
pub fn default_window<T: Real>() -> (T, T) {
    (T::lit(1e-4), T::lit(1e-2))
}

/// Nodes used for boundary fits: within the d-window and, on the interval,
/// only the half nearest the left endpoint.
fn fit_nodes<T: Real>(u: &GridFunction<T>, window: (T, T)) -> Vec<(T, T)> {
    let mesh = u.mesh();
    let mut pts = Vec::new();
    for i in mesh.interior_indices() {
        let d = mesh.distance(i);
        if d < window.0 || d > window.1 {
            continue;
        }
        if matches!(mesh.geometry(), Geometry::Interval) && mesh.node(i) > T::half() {
            continue;
        }
        pts.push((d, u.get(i)));
    }
    pts
}

fn least_squares_slope<T: Real>(xs: &[T], ys: &[T]) -> (T, T) {
    let n = T::from_usize(xs.len()).unwrap();
    let mean_x = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let mean_y = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx = sxx + (x - mean_x) * (x - mean_x);
        sxy = sxy + (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ssr = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let e = y - (intercept + slope * x);
        ssr = ssr + e * e;
    }
    let dof = T::from_usize(xs.len().saturating_sub(2).max(1)).unwrap();
    let stderr = (ssr / dof / sxx).sqrt();
    (slope, stderr)
}

/// Slope of `ln u` against `ln d` over the window nodes.
pub fn fit_boundary_exponent<T: Real>(
    u: &GridFunction<T>,
    window: (T, T),
) -> Result<ExponentFit<T>, SolverError> {
    let pts = fit_nodes(u, window);
    if pts.len() < MIN_FIT_POINTS {
        return Err(SolverError::InsufficientWindow {
            points: pts.len(),
            required: MIN_FIT_POINTS,
        });
    }
    for &(_, v) in &pts {
        if !(v > T::zero()) {
            return Err(SolverError::InvalidInput(
                "boundary fit needs positive values on the window".into(),
            ));
        }
    }
    let xs: Vec<T> = pts.iter().map(|&(d, _)| d.ln()).collect();
    let ys: Vec<T> = pts.iter().map(|&(_, v)| v.ln()).collect();
    let (slope, stderr) = least_squares_slope(&xs, &ys);
    Ok(ExponentFit {
        gamma_hat: slope,
        stderr,
        window,
        n_points: pts.len(),
        log_exponent_hat: None,
    })
}

/// Slope of `ln(u / d^γ)` against `ln ln(A/d)`: the power `ℓ` in
/// `u ≈ C d^γ (ln(A/d))^ℓ`.
pub fn fit_log_correction<T: Real>(
    u: &GridFunction<T>,
    gamma: T,
    a_scale: T,
    window: (T, T),
) -> Result<T, SolverError> {
    let pts = fit_nodes(u, window);
    if pts.len() < MIN_FIT_POINTS {
        return Err(SolverError::InsufficientWindow {
            points: pts.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let mut xs = Vec::with_capacity(pts.len());
    let mut ys = Vec::with_capacity(pts.len());
    for &(d, v) in &pts {
        if !(v > T::zero()) {
            return Err(SolverError::InvalidInput(
                "log-correction fit needs positive values on the window".into(),
            ));
        }
        xs.push((a_scale / d).ln().ln());
        ys.push((v / d.powf(gamma)).ln());
    }
    let (slope, _) = least_squares_slope(&xs, &ys);
    Ok(slope)
}

/// Outcome of the discrete weak-comparison check.
#[derive(Debug, Clone, PartialEq)]
pub enum ComparisonVerdict<T> {
    /// All hypotheses hold and `u ≤ v` nodewise.
    Holds,
    /// All hypotheses hold but the conclusion fails (worst violation).
    Violated { worst: T },
    /// A hypothesis failed; the conclusion was not evaluated.
    HypothesesNotSatisfied { which: String, margin: T },
}

/// Comparison check report with the raw margins.
#[derive(Debug, Clone)]
pub struct ComparisonReport<T> {
    pub verdict: ComparisonVerdict<T>,
    /// Worst scaled margin of `-Δ_r u ≤ K u^δ`.
    pub sub_margin: T,
    /// Worst scaled margin of `-Δ_r v ≥ K v^δ`.
    pub super_margin: T,
    /// Discrete integral `Σ K w₀^{δ+1} |cell|` (δ > 0 only).
    pub integrability: Option<T>,
}

/// Discretely verifies the sub/supersolution hypotheses
/// `-Δ_r u ≤ K u^δ`, `-Δ_r v ≥ K v^δ` (scaled tolerance 1e-8) and, for
/// δ > 0, the integrability of `K w₀^{δ+1}`; reports whether `u ≤ v`.
pub fn check_comparison<T: Real>(
    u: &GridFunction<T>,
    v: &GridFunction<T>,
    coefficient: &GridFunction<T>,
    delta: T,
    r: T,
    w0: Option<&GridFunction<T>>,
) -> ComparisonReport<T> {
    let mesh = u.mesh();
    let tol = T::lit(1e-8);
    let zero_rhs = GridFunction::zeros(Arc::clone(mesh));
    let lap_u = r_laplacian_residual(u, r, &zero_rhs, T::lit(1e-10));
    let lap_v = r_laplacian_residual(v, r, &zero_rhs, T::lit(1e-10));
    let mut sub_margin = T::infinity();
    let mut super_margin = T::infinity();
    for i in mesh.interior_indices() {
        let ku = coefficient.get(i) * u.get(i).powf(delta);
        let kv = coefficient.get(i) * v.get(i).powf(delta);
        let su = (ku - lap_u.get(i)) / (T::one() + ku.abs());
        let sv = (lap_v.get(i) - kv) / (T::one() + kv.abs());
        sub_margin = sub_margin.min(su);
        super_margin = super_margin.min(sv);
    }
    let mut integrability = None;
    if delta > T::zero() {
        let bound = |i: usize| match w0 {
            Some(w) => w.get(i),
            None => u.get(i).min(v.get(i)),
        };
        let mut total = T::zero();
        for i in mesh.interior_indices() {
            let lo = if i == 0 { mesh.node(0) } else { mesh.node(i - 1) };
            let hi = if i + 1 < mesh.len() {
                mesh.node(i + 1)
            } else {
                mesh.node(i)
            };
            let cell = (hi - lo) * T::half();
            total = total + coefficient.get(i) * bound(i).powf(delta + T::one()) * cell;
        }
        integrability = Some(total);
    }

    let verdict = if sub_margin < -tol {
        ComparisonVerdict::HypothesesNotSatisfied {
            which: "subsolution inequality".into(),
            margin: sub_margin,
        }
    } else if super_margin < -tol {
        ComparisonVerdict::HypothesesNotSatisfied {
            which: "supersolution inequality".into(),
            margin: super_margin,
        }
    } else if matches!(integrability, Some(t) if !t.is_finite()) {
        ComparisonVerdict::HypothesesNotSatisfied {
            which: "integrability".into(),
            margin: T::neg_infinity(),
        }
    } else {
        let mut worst = T::zero();
        for i in 0..mesh.len() {
            worst = worst.max(u.get(i) - v.get(i));
        }
        if worst <= tol {
            ComparisonVerdict::Holds
        } else {
            ComparisonVerdict::Violated { worst }
        }
    };
    ComparisonReport {
        verdict,
        sub_margin,
        super_margin,
        integrability,
    }
}

fn norm<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |a, &c| a + c * c).sqrt()
}

fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |a, (&c, &d)| a + c * d)
}

/// Signed convexity gap
/// `|y|^r − |x|^r − r|x|^{r−2} x·(y−x) − C·penalty(x, y)`
/// with penalty `|x−y|^r` for `r ≥ 2` and `|x−y|²/(|x|+|y|)^{2−r}` for
/// `1 < r < 2`; nonnegative for all pairs when `C` is small enough.
pub fn peral_gap<T: Real>(x: &[T], y: &[T], r: T, c: T) -> Result<T, SolverError> {
    if x.len() != y.len() || x.is_empty() {
        return Err(SolverError::InvalidInput(
            "gap needs two vectors of equal nonzero dimension".into(),
        ));
    }
    let nx = norm(x);
    let ny = norm(y);
    if r < T::two() && nx == T::zero() && ny == T::zero() {
        return Err(SolverError::InvalidInput(
            "the pair (0, 0) is excluded for r < 2".into(),
        ));
    }
    let diff: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
    let nd = norm(&diff);
    // x·(y−x) computed from the difference so the gap vanishes exactly at x = y
    let lhs = if nx == T::zero() {
        ny.powf(r)
    } else {
        let grad = r * nx.powf(r - T::two());
        ny.powf(r) - nx.powf(r) + grad * dot(x, &diff)
    };
    let penalty = if r >= T::two() {
        nd.powf(r)
    } else {
        nd * nd / (nx + ny).powf(T::two() - r)
    };
    Ok(lhs - c * penalty)
}

fn gap_ratio<T: Real>(x: &[T], y: &[T], r: T) -> Option<T> {
    let gap = peral_gap(x, y, r, T::zero()).ok()?;
    let penalty = {
        let diff: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
        let nd = norm(&diff);
        if r >= T::two() {
            nd.powf(r)
        } else {
            nd * nd / (norm(x) + norm(y)).powf(T::two() - r)
        }
    };
    (penalty > T::lit(1e-12)).then(|| gap / penalty)
}

/// Calibrates the constant of the convexity inequality: half the smallest
/// observed ratio `lhs / penalty` over seeded random pairs in `[-1,1]²`
/// plus structured pairs (collinear, antipodal, near-equal). The factor
/// 0.5 keeps the calibrated constant strictly inside the admissible range.
/// At `r = 2` the ratio is identically 1, so the result is exactly 0.5.
pub fn calibrate_cr<T: Real>(r: T, samples: usize, seed: u64) -> Result<T, SolverError> {
    if samples < 10_000 {
        return Err(SolverError::InvalidInput(format!(
            "calibration needs at least 1e4 samples, got {samples}"
        )));
    }
    if r == T::two() {
        return Ok(T::half());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_ratio = T::infinity();
    let consider = |x: &[T; 2], y: &[T; 2], min_ratio: &mut T| {
        if let Some(ratio) = gap_ratio(x, y, r) {
            *min_ratio = min_ratio.min(ratio);
        }
    };
    for _ in 0..samples {
        let x = [
            T::lit(rng.gen_range(-1.0..1.0)),
            T::lit(rng.gen_range(-1.0..1.0)),
        ];
        let y = [
            T::lit(rng.gen_range(-1.0..1.0)),
            T::lit(rng.gen_range(-1.0..1.0)),
        ];
        consider(&x, &y, &mut min_ratio);
    }
    // structured families: collinear, antipodal, stretched, near-equal
    for k in 1..200usize {
        let t = T::from_usize(k).unwrap() / T::lit(200.0);
        let x = [t, T::zero()];
        consider(&x, &[t * T::half(), T::zero()], &mut min_ratio);
        consider(&x, &[-t, T::zero()], &mut min_ratio);
        consider(&x, &[t * T::two(), T::zero()], &mut min_ratio);
        let close = [t + T::lit(1e-4), T::lit(1e-4)];
        consider(&x, &close, &mut min_ratio);
        let angled = [t * T::lit(0.8), t * T::lit(0.6)];
        consider(&x, &angled, &mut min_ratio);
    }
    if !min_ratio.is_finite() || min_ratio <= T::zero() {
        return Err(SolverError::InvalidInput(format!(
            "calibration failed, min ratio {min_ratio}"
        )));
    }
    Ok(T::half() * min_ratio)
}
