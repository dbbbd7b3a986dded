//! Slowly varying perturbation factors of log-power type.
//!
//! The coefficient functions of the singular systems have the form
//! `K(x) = d(x)^{-k} · L(d(x))` where `L` is slowly varying at zero. This
//! module implements the iterated-log family
//!
//! ```text
//! L(t) = Π_n ( log_n(A / t) )^{μ_n},        log_n = log ∘ … ∘ log  (n times)
//! ```
//!
//! together with the boundary-layer integral `∫_t^U L(s)/s ds` that governs
//! the critical-exponent asymptotics.

use crate::error::SolverError;
use crate::scalar::Real;

/// Product of iterated-log powers `Π_n (log_n(A/t))^{μ_n}` on `(0, D]`.
///
/// An empty exponent list denotes `L ≡ 1`. The scale `A` must exceed `2D`
/// so every iterated log stays positive on the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPowerFactor<T> {
    scale: T,
    exponents: Vec<T>,
    diameter: T,
}

impl<T: Real> LogPowerFactor<T> {
    /// Builds the factor, validating the scale against the domain diameter.
    ///
    /// Rejects `A ≤ 2D`, and for nested logs (`n ≥ 2`) rejects scales for
    /// which `log_n(A/t)` is not `> 1` everywhere on `(0, D]`; since the
    /// iterated logs are decreasing in `t`, checking `t = D` suffices.
    pub fn new(scale: T, exponents: Vec<T>, diameter: T) -> Result<Self, SolverError> {
        if !(diameter > T::zero()) {
            return Err(SolverError::InvalidInput(format!(
                "diameter must be positive, got {diameter}"
            )));
        }
        if !(scale > T::two() * diameter) {
            return Err(SolverError::InvalidInput(format!(
                "log-power scale {scale} must exceed twice the diameter {diameter}"
            )));
        }
        let mut level = (scale / diameter).ln();
        for n in 2..=exponents.len() {
            level = level.ln();
            if !(level > T::one()) {
                return Err(SolverError::InvalidInput(format!(
                    "iterated log of depth {n} is {level} at t = D; scale too small"
                )));
            }
        }
        Ok(Self {
            scale,
            exponents,
            diameter,
        })
    }

    /// The factor `L ≡ 1` on `(0, D]`.
    pub fn one(diameter: T) -> Self {
        Self {
            scale: T::lit(4.0) * diameter,
            exponents: Vec::new(),
            diameter,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn exponents(&self) -> &[T] {
        &self.exponents
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    /// Concatenates the exponent lists of two factors with a common scale.
    ///
    /// `eval` of the result equals the product of the two `eval`s.
    pub fn concat(&self, other: &Self) -> Self {
        let mut exponents = self.exponents.clone();
        for (n, &mu) in other.exponents.iter().enumerate() {
            if n < exponents.len() {
                exponents[n] += mu;
            } else {
                exponents.push(mu);
            }
        }
        Self {
            scale: self.scale,
            exponents,
            diameter: self.diameter,
        }
    }

    /// Returns the factor raised to the power `w` (all exponents scaled).
    pub fn pow(&self, w: T) -> Self {
        Self {
            scale: self.scale,
            exponents: self.exponents.iter().map(|&mu| mu * w).collect(),
            diameter: self.diameter,
        }
    }

    /// Evaluates `L(t)` for `0 < t ≤ D`.
    pub fn eval(&self, t: T) -> Result<T, SolverError> {
        if !(t > T::zero()) || t > self.diameter {
            return Err(SolverError::InvalidInput(format!(
                "t = {t} outside (0, {}]",
                self.diameter
            )));
        }
        Ok(self.eval_unchecked(t))
    }

    fn eval_unchecked(&self, t: T) -> T {
        if self.exponents.is_empty() {
            return T::one();
        }
        let mut level = (self.scale / t).ln();
        let mut product = level.powf(self.exponents[0]);
        for &mu in &self.exponents[1..] {
            level = level.ln();
            product = product * level.powf(mu);
        }
        product
    }

    /// Quadrature of `∫_t^{upper} L(s)/s ds` with relative error ≤ 1e-8.
    ///
    /// Substituting `s = e^{-y}` turns the integrand into the smooth
    /// function `y ↦ L(e^{-y})` on a finite interval, which an adaptive
    /// Gauss–Kronrod 7/15 rule resolves without endpoint trouble.
    pub fn integral_over_t(&self, t: T, upper: T) -> Result<T, SolverError> {
        let two_d = T::two() * self.diameter;
        if !(t > T::zero()) || !(t < upper) || upper > two_d {
            return Err(SolverError::InvalidInput(format!(
                "integral bounds ({t}, {upper}) must satisfy 0 < t < upper <= {two_d}"
            )));
        }
        // y runs from ln(1/upper) to ln(1/t); L is evaluated with the scale
        // argument A/s = A e^y, which stays valid above the domain cap.
        let lo = upper.recip().ln();
        let hi = t.recip().ln();
        let f = |y: T| {
            if self.exponents.is_empty() {
                return T::one();
            }
            let mut level = self.scale.ln() + y;
            let mut product = level.powf(self.exponents[0]);
            for &mu in &self.exponents[1..] {
                level = level.ln();
                product = product * level.powf(mu);
            }
            product
        };
        Ok(adaptive_gauss_kronrod(&f, lo, hi, T::lit(1e-8)))
    }
}

// 7-point Gauss / 15-point Kronrod abscissas and weights on [-1, 1].
const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_23,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_panel<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let center = (a + b) * T::half();
    let radius = (b - a) * T::half();
    let mut kronrod = T::zero();
    let mut gauss = T::zero();
    for (i, &xi) in GK_NODES.iter().enumerate() {
        let x = T::lit(xi);
        let wk = T::lit(GK_WEIGHTS_K[i]);
        let value = if i == 7 {
            f(center)
        } else {
            f(center - radius * x) + f(center + radius * x)
        };
        kronrod = kronrod + wk * value;
        if i % 2 == 1 {
            // odd Kronrod nodes (and the center, i = 7) carry the Gauss rule
            gauss = gauss + T::lit(GK_WEIGHTS_G[i / 2]) * value;
        }
    }
    (kronrod * radius, (kronrod - gauss).abs() * radius)
}

fn adaptive_gauss_kronrod<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, rel_tol: T) -> T {
    let (whole, _) = gauss_kronrod_panel(f, a, b);
    let floor = T::lit(1e-300);
    let tol = rel_tol * (whole.abs() + floor);
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut total = T::zero();
    while let Some((lo, hi, estimate, depth)) = stack.pop() {
        let (value, err) = gauss_kronrod_panel(f, lo, hi);
        let local_tol = tol * ((hi - lo) / (b - a)).abs();
        if err <= local_tol || depth >= 50 {
            total = total + value;
        } else {
            let mid = (lo + hi) * T::half();
            stack.push((lo, mid, estimate, depth + 1));
            stack.push((mid, hi, estimate, depth + 1));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factor(scale: f64, mus: &[f64]) -> LogPowerFactor<f64> {
        LogPowerFactor::new(scale, mus.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn empty_exponents_give_one() {
        let l = LogPowerFactor::<f64>::one(1.0);
        assert_eq!(l.eval(0.3).unwrap(), 1.0);
    }

    #[test]
    fn single_log_matches_hand_value() {
        let l = factor(10.0, &[1.0]);
        assert!((l.eval(1.0).unwrap() - 10.0_f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn squared_log_matches_hand_value() {
        let l = factor(10.0, &[2.0]);
        let expected = 10.0_f64.ln().powi(2);
        assert!((l.eval(1.0).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let l = factor(10.0, &[1.0]);
        assert!(l.eval(0.0).is_err());
        assert!(l.eval(-0.5).is_err());
        assert!(l.eval(1.5).is_err());
    }

    #[test]
    fn constructor_rejects_small_scale() {
        assert!(LogPowerFactor::new(1.5_f64, vec![1.0], 1.0).is_err());
        // depth-2 logs need ln(A/D) > e
        assert!(LogPowerFactor::new(5.0_f64, vec![1.0, 1.0], 1.0).is_err());
        assert!(LogPowerFactor::new(40.0_f64, vec![1.0, 1.0], 1.0).is_ok());
    }

    #[test]
    fn trivial_integral_is_log_ratio() {
        let l = LogPowerFactor::<f64>::one(1.0);
        let value = l.integral_over_t(0.1, 2.0).unwrap();
        assert!((value - 20.0_f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn single_log_integral_matches_antiderivative() {
        // ∫ ln(A/s)/s ds = -ln²(A/s)/2, A = 10, from 0.1 to 2.
        let l = factor(10.0, &[1.0]);
        let value = l.integral_over_t(0.1, 2.0).unwrap();
        let exact = 0.5 * (100.0_f64.ln().powi(2) - 5.0_f64.ln().powi(2));
        assert!((value - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn vanishing_interval_integral() {
        let l = LogPowerFactor::<f64>::one(1.0);
        let value = l.integral_over_t(1.0, 1.0 + 1e-12).unwrap();
        assert!((value - 1e-12).abs() < 1e-15);
    }

    #[test]
    fn integral_rejects_inverted_bounds() {
        let l = LogPowerFactor::<f64>::one(1.0);
        assert!(l.integral_over_t(1.0, 0.5).is_err());
        assert!(l.integral_over_t(0.5, 2.5).is_err());
    }

    #[test]
    fn integral_decreases_in_lower_bound() {
        let l = factor(40.0, &[1.0, 0.5]);
        let mut prev = f64::INFINITY;
        for &t in &[1e-4, 1e-3, 1e-2, 0.1, 0.5] {
            let value = l.integral_over_t(t, 2.0).unwrap();
            assert!(value < prev);
            prev = value;
        }
    }

    #[test]
    fn eval_is_generic_over_scalar() {
        let l = LogPowerFactor::<f32>::new(10.0, vec![1.0], 1.0).unwrap();
        assert!((l.eval(1.0).unwrap() - 10.0_f32.ln()).abs() < 1e-6);
    }
}
