//! Closed-form feasibility conditions, boundary exponents and regime
//! classification for the three coupled singular system families, plus the
//! scalar four-case classification.
//!
//! A classification never errors on parameters inside the type invariants:
//! infeasibility is reported as a value, and every tested inequality is
//! recorded as a signed margin so near-boundary calls can be explained.

use crate::error::SolverError;
use crate::karamata::LogPowerFactor;
use crate::scalar::Real;

/// Relative tolerance used when a regime condition is an exact equality.
const EQ_TOL: f64 = 1e-12;

/// Power-coupled system `-Δ_p u = K1 u^{a1} v^{b1}`, `-Δ_q v = K2 v^{a2} u^{b2}`
/// with `K_i = d^{-k_i} L_i(d)`.
#[derive(Debug, Clone)]
pub struct SystemSpec<T> {
    pub p: T,
    pub q: T,
    pub a1: T,
    pub a2: T,
    pub b1: T,
    pub b2: T,
    pub k1: T,
    pub k2: T,
    pub l1: LogPowerFactor<T>,
    pub l2: LogPowerFactor<T>,
}

impl<T: Real> SystemSpec<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: T,
        q: T,
        a1: T,
        a2: T,
        b1: T,
        b2: T,
        k1: T,
        k2: T,
        l1: LogPowerFactor<T>,
        l2: LogPowerFactor<T>,
    ) -> Result<Self, SolverError> {
        if !(p > T::one()) || !(q > T::one()) {
            return Err(SolverError::InvalidInput(format!(
                "exponents p, q must exceed 1, got p = {p}, q = {q}"
            )));
        }
        if !(a1 < p - T::one()) || !(a2 < q - T::one()) {
            return Err(SolverError::InvalidInput(format!(
                "need a1 < p-1 and a2 < q-1, got a1 = {a1}, a2 = {a2}"
            )));
        }
        if b1 == T::zero() || b2 == T::zero() {
            return Err(SolverError::InvalidInput(
                "coupling exponents b1, b2 must be nonzero".into(),
            ));
        }
        if !(k1 >= T::zero() && k1 < p) || !(k2 >= T::zero() && k2 < q) {
            return Err(SolverError::InvalidInput(format!(
                "singularity orders need 0 <= k1 < p and 0 <= k2 < q, got k1 = {k1}, k2 = {k2}"
            )));
        }
        Ok(Self {
            p,
            q,
            a1,
            a2,
            b1,
            b2,
            k1,
            k2,
            l1,
            l2,
        })
    }

    pub fn is_cooperative(&self) -> bool {
        self.b1 > T::zero() && self.b2 > T::zero()
    }

    pub fn is_competitive(&self) -> bool {
        self.b1 < T::zero() && self.b2 < T::zero()
    }

    /// The spec with components (p,a1,b1,k1,L1) and (q,a2,b2,k2,L2) swapped.
    pub fn swapped(&self) -> Self {
        Self {
            p: self.q,
            q: self.p,
            a1: self.a2,
            a2: self.a1,
            b1: self.b2,
            b2: self.b1,
            k1: self.k2,
            k2: self.k1,
            l1: self.l2.clone(),
            l2: self.l1.clone(),
        }
    }
}

/// Competition/logistic system
/// `-Δ_p u = λ1 u^{α1} - u^{β1} - μ1 u^{a1} v^{b1}` (and symmetric in v).
#[derive(Debug, Clone)]
pub struct CompetitionSpec<T> {
    pub p: T,
    pub q: T,
    pub lambda1: T,
    pub lambda2: T,
    pub mu1: T,
    pub mu2: T,
    pub alpha1: T,
    pub alpha2: T,
    pub beta1: T,
    pub beta2: T,
    pub a1: T,
    pub a2: T,
    pub b1: T,
    pub b2: T,
}

impl<T: Real> CompetitionSpec<T> {
    pub fn validate(&self) -> Result<(), SolverError> {
        let lower1 = -T::two() - (self.p - T::one()).recip();
        let lower2 = -T::two() - (self.q - T::one()).recip();
        if !(self.lambda1 > T::zero() && self.lambda2 > T::zero()) {
            return Err(SolverError::InvalidInput("lambda_i must be positive".into()));
        }
        if !(self.mu1 > T::zero() && self.mu2 > T::zero()) {
            return Err(SolverError::InvalidInput("mu_i must be positive".into()));
        }
        if !(self.alpha1 > lower1 && self.alpha1 < self.p - T::one()) {
            return Err(SolverError::InvalidInput(format!(
                "alpha1 = {} outside ({lower1}, p-1)",
                self.alpha1
            )));
        }
        if !(self.alpha2 > lower2 && self.alpha2 < self.q - T::one()) {
            return Err(SolverError::InvalidInput(format!(
                "alpha2 = {} outside ({lower2}, q-1)",
                self.alpha2
            )));
        }
        if !(self.alpha1 < self.beta1) || !(self.alpha2 < self.beta2) {
            return Err(SolverError::InvalidInput("need alpha_i < beta_i".into()));
        }
        Ok(())
    }
}

/// Absorption system `-Δ_p u = u^{a1} v^{b1} - u^{α1} v^{β1}` (symmetric in v).
#[derive(Debug, Clone)]
pub struct AbsorptionSpec<T> {
    pub p: T,
    pub q: T,
    pub a1: T,
    pub a2: T,
    pub b1: T,
    pub b2: T,
    pub alpha1: T,
    pub alpha2: T,
    pub beta1: T,
    pub beta2: T,
}

/// Regime tag of a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Alt1,
    Alt2,
    Alt3,
    Alt4,
    Limit1,
    Limit2,
    Limit3,
    Limit4,
    Coop1,
    Coop2,
    Coop3,
    Scalar1,
    Scalar2,
    Scalar3,
    Scalar4,
    Infeasible,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Alt1 => "Alt1",
            Regime::Alt2 => "Alt2",
            Regime::Alt3 => "Alt3",
            Regime::Alt4 => "Alt4",
            Regime::Limit1 => "Limit-i",
            Regime::Limit2 => "Limit-ii",
            Regime::Limit3 => "Limit-iii",
            Regime::Limit4 => "Limit-iv",
            Regime::Coop1 => "Coop-i",
            Regime::Coop2 => "Coop-ii",
            Regime::Coop3 => "Coop-iii",
            Regime::Scalar1 => "Scalar-i",
            Regime::Scalar2 => "Scalar-ii",
            Regime::Scalar3 => "Scalar-iii",
            Regime::Scalar4 => "Scalar-iv",
            Regime::Infeasible => "Infeasible",
        };
        f.write_str(s)
    }
}

/// Predicted Hölder class of the solution pair (the weaker component).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    C1Alpha,
    C0Alpha,
    VeryWeak,
}

impl std::fmt::Display for Regularity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regularity::C1Alpha => "C1alpha",
            Regularity::C0Alpha => "C0alpha",
            Regularity::VeryWeak => "very-weak",
        };
        f.write_str(s)
    }
}

/// Admissible window and chosen value of the scaling exponent σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaChoice<T> {
    pub lo: T,
    pub hi: T,
    /// Geometric mean of the window endpoints.
    pub value: T,
}

/// Auxiliary scalar problem `-Δ_r w = d^{-k} L1^{l1_pow} L2^{l2_pow} w^{delta}`
/// whose solution provides one component of the shell profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxProblem<T> {
    pub r: T,
    pub delta: T,
    pub k_sing: T,
    pub l1_pow: T,
    pub l2_pow: T,
}

/// How one side of a shell bound is realized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundProfile<T> {
    /// `m^{±w}` times the auxiliary solution.
    AuxSolution,
    /// `m^{±w}` times the explicit profile `d^{exponent}`.
    DistancePower { exponent: T },
}

/// Shell construction data for one component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentRecipe<T> {
    pub aux: Option<AuxProblem<T>>,
    pub lower: BoundProfile<T>,
    pub upper: BoundProfile<T>,
    /// d-exponent of the compensation term `κ d^{e} u` in the fixed-point
    /// operator (the growth order of `∂f/∂u` relative to `d`).
    pub absorb_exponent: T,
}

/// Outcome of a classification: feasibility, regime, predicted exponents,
/// slowly varying factors, σ, regularity and the signed condition margins.
#[derive(Debug, Clone)]
pub struct RegimeReport<T> {
    pub feasible: bool,
    pub regime: Regime,
    pub gamma_u: Option<T>,
    pub gamma_v: Option<T>,
    /// Powers `(α1, β1)` of `(L1, L2)` in the u-estimate.
    pub slowly_varying_u: (T, T),
    /// Powers `(α2, β2)` of `(L2, L1)` in the v-estimate.
    pub slowly_varying_v: (T, T),
    /// Power of the `|ln d|`-type correction on u, when the regime has one.
    pub log_correction_u: Option<T>,
    pub log_correction_v: Option<T>,
    pub sigma: Option<SigmaChoice<T>>,
    pub regularity: Regularity,
    /// ε of the two-sided `d^{γ±ε}` bracket estimates of the limit regimes.
    pub epsilon: Option<T>,
    /// Sobolev-membership threshold of the scalar very-weak case.
    pub gamma_w: Option<T>,
    pub margins: Vec<(String, T)>,
    pub recipe_u: Option<ComponentRecipe<T>>,
    pub recipe_v: Option<ComponentRecipe<T>>,
}

impl<T: Real> RegimeReport<T> {
    fn infeasible(margins: Vec<(String, T)>, sigma: Option<SigmaChoice<T>>) -> Self {
        Self {
            feasible: false,
            regime: Regime::Infeasible,
            gamma_u: None,
            gamma_v: None,
            slowly_varying_u: (T::zero(), T::zero()),
            slowly_varying_v: (T::zero(), T::zero()),
            log_correction_u: None,
            log_correction_v: None,
            sigma,
            regularity: Regularity::VeryWeak,
            epsilon: None,
            gamma_w: None,
            margins,
            recipe_u: None,
            recipe_v: None,
        }
    }

    /// The report with the u- and v-sides exchanged (and the symmetric
    /// regime tags swapped), for the swap-symmetry property.
    pub fn swapped_components(&self) -> Self {
        let regime = match self.regime {
            Regime::Alt3 => Regime::Alt4,
            Regime::Alt4 => Regime::Alt3,
            Regime::Limit1 => Regime::Limit2,
            Regime::Limit2 => Regime::Limit1,
            Regime::Limit3 => Regime::Limit4,
            Regime::Limit4 => Regime::Limit3,
            Regime::Coop2 => Regime::Coop3,
            Regime::Coop3 => Regime::Coop2,
            other => other,
        };
        Self {
            regime,
            gamma_u: self.gamma_v,
            gamma_v: self.gamma_u,
            slowly_varying_u: self.slowly_varying_v,
            slowly_varying_v: self.slowly_varying_u,
            log_correction_u: self.log_correction_v,
            log_correction_v: self.log_correction_u,
            recipe_u: self.recipe_v.clone(),
            recipe_v: self.recipe_u.clone(),
            margins: Vec::new(),
            ..self.clone()
        }
    }
}

fn approx_eq<T: Real>(a: T, b: T) -> bool {
    let scale = T::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= T::lit(EQ_TOL) * scale
}

fn geometric_mean<T: Real>(lo: T, hi: T) -> T {
    (lo * hi).sqrt()
}

/// Subhomogeneity check: margin `(p-1-a1)(q-1-a2) - |b1 b2|` and its sign.
pub fn check_subhomogeneity<T: Real>(spec: &SystemSpec<T>) -> (bool, T) {
    let margin =
        (spec.p - T::one() - spec.a1) * (spec.q - T::one() - spec.a2) - (spec.b1 * spec.b2).abs();
    (margin > T::zero(), margin)
}

/// Admissible σ-window `(|b2|/(q-1-a2), (p-1-a1)/|b1|)`; empty exactly when
/// subhomogeneity fails. The chosen σ is the geometric mean of the window.
pub fn find_sigma<T: Real>(spec: &SystemSpec<T>) -> Option<SigmaChoice<T>> {
    let lo = spec.b2.abs() / (spec.q - T::one() - spec.a2);
    let hi = (spec.p - T::one() - spec.a1) / spec.b1.abs();
    (lo < hi).then(|| SigmaChoice {
        lo,
        hi,
        value: geometric_mean(lo, hi),
    })
}

/// A labeled batch of signed condition margins; a candidate regime matches
/// when all its margins are positive.
struct Margins<T> {
    items: Vec<(String, T)>,
}

impl<T: Real> Margins<T> {
    fn new() -> Self {
        Self { items: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>, value: T) -> &mut Self {
        self.items.push((name.into(), value));
        self
    }

    /// Margin of an equality condition: positive inside the tolerance band.
    fn push_eq(&mut self, name: impl Into<String>, lhs: T, rhs: T) -> &mut Self {
        let scale = T::one().max(lhs.abs()).max(rhs.abs());
        self.push(name, T::lit(EQ_TOL) * scale - (lhs - rhs).abs())
    }

    fn all_pass(&self) -> bool {
        self.items.iter().all(|(_, m)| *m > T::zero())
    }

    fn take(self) -> Vec<(String, T)> {
        self.items
    }
}

/// Limit-regime ε: starts from the default 0.01 and halves until every
/// ε-dependent strict inequality holds with margin at least 1e-6.
fn choose_epsilon<T: Real>(constraints: impl Fn(T) -> T) -> Option<T> {
    let safety = T::lit(1e-6);
    let mut eps = T::lit(1e-2);
    for _ in 0..40 {
        if constraints(eps) >= safety {
            return Some(eps);
        }
        eps = eps * T::half();
    }
    None
}

struct Family1Exponents<T> {
    gamma1: T,
    gamma2: T,
    alpha1: T,
    alpha2: T,
    beta1: T,
    beta2: T,
    gamma3: T,
    gamma4: T,
}

fn family1_exponents<T: Real>(p: T, q: T, a1: T, a2: T, b1: T, b2: T, k1: T, k2: T) -> Family1Exponents<T> {
    let one = T::one();
    let denom = (p - one - a1) * (q - one - a2) - b1 * b2;
    Family1Exponents {
        gamma1: ((p - k1) * (q - one - a2) + (q - k2) * b1) / denom,
        gamma2: ((q - k2) * (p - one - a1) + (p - k1) * b2) / denom,
        alpha1: (q - one - a2) / denom,
        alpha2: (p - one - a1) / denom,
        beta1: b1 / denom,
        beta2: b2 / denom,
        gamma3: (p - k1 + b1) / (p - one - a1),
        gamma4: (q - k2 + b2) / (q - one - a2),
    }
}

/// Classifies the power-coupled family against the alternatives of the
/// main existence theorem, its limiting cases and the cooperative
/// very-weak cases, in the fixed order Alt2, Alt1, Alt3, Alt4,
/// Limit-i..iv, Coop-i..iii.
pub fn classify_regime<T: Real>(spec: &SystemSpec<T>) -> RegimeReport<T> {
    let one = T::one();
    let (p, q) = (spec.p, spec.q);
    let (a1, a2, b1, b2, k1, k2) = (spec.a1, spec.a2, spec.b1, spec.b2, spec.k1, spec.k2);
    let (h1_ok, h1_margin) = check_subhomogeneity(spec);
    let mut margins = Margins::new();
    margins.push("H1", h1_margin);
    let sigma = find_sigma(spec);
    if !h1_ok || sigma.is_none() {
        return RegimeReport::infeasible(margins.take(), sigma);
    }
    let sigma = sigma.unwrap();
    let e = family1_exponents(p, q, a1, a2, b1, b2, k1, k2);

    let base = |regime: Regime, mut report: RegimeReport<T>| -> RegimeReport<T> {
        report.feasible = true;
        report.regime = regime;
        report.sigma = Some(sigma);
        report
    };
    let blank = || RegimeReport::infeasible(Vec::new(), Some(sigma));

    // Alt2: both couplings inside the linear-growth band; u ~ d, v ~ d.
    {
        let mut m = Margins::new();
        m.push("alt2.u_lower", (a1 + b1) - (k1 - one))
            .push("alt2.u_upper", (p - one) - (a1 + b1))
            .push("alt2.v_lower", (a2 + b2) - (k2 - one))
            .push("alt2.v_upper", (q - one) - (a2 + b2));
        if m.all_pass() {
            margins.items.extend(m.take());
            let mut report = base(Regime::Alt2, blank());
            report.gamma_u = Some(one);
            report.gamma_v = Some(one);
            report.regularity = Regularity::C1Alpha;
            report.recipe_u = Some(ComponentRecipe {
                aux: Some(AuxProblem {
                    r: p,
                    delta: a1 + b1,
                    k_sing: k1,
                    l1_pow: one,
                    l2_pow: T::zero(),
                }),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::AuxSolution,
                absorb_exponent: (a1 - one) + b1 - k1,
            });
            report.recipe_v = Some(ComponentRecipe {
                aux: Some(AuxProblem {
                    r: q,
                    delta: a2 + b2,
                    k_sing: k2,
                    l1_pow: T::zero(),
                    l2_pow: one,
                }),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::AuxSolution,
                absorb_exponent: (a2 - one) + b2 - k2,
            });
            report.margins = margins.take();
            return report;
        }
        margins.items.extend(m.take());
    }

    // Alt1: both predicted exponents inside (1 - 1/r, 1).
    {
        let mut m = Margins::new();
        m.push("alt1.gamma1_lower", e.gamma1 - (one - p.recip()))
            .push("alt1.gamma1_upper", one - e.gamma1)
            .push("alt1.gamma2_lower", e.gamma2 - (one - q.recip()))
            .push("alt1.gamma2_upper", one - e.gamma2);
        if m.all_pass() {
            margins.items.extend(m.take());
            let delta1 = (p - one) - (p - k1) / e.gamma1;
            let delta2 = (q - one) - (q - k2) / e.gamma2;
            let mut report = base(Regime::Alt1, blank());
            report.gamma_u = Some(e.gamma1);
            report.gamma_v = Some(e.gamma2);
            report.slowly_varying_u = (e.alpha1, e.beta1);
            report.slowly_varying_v = (e.alpha2, e.beta2);
            report.regularity = Regularity::C0Alpha;
            report.recipe_u = Some(ComponentRecipe {
                aux: Some(AuxProblem {
                    r: p,
                    delta: delta1,
                    k_sing: k1,
                    l1_pow: e.alpha1 * (p - one - delta1),
                    l2_pow: e.beta1 * (p - one - delta1),
                }),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::AuxSolution,
                absorb_exponent: (a1 - one) * e.gamma1 + b1 * e.gamma2 - k1,
            });
            report.recipe_v = Some(ComponentRecipe {
                aux: Some(AuxProblem {
                    r: q,
                    delta: delta2,
                    k_sing: k2,
                    l1_pow: e.beta2 * (q - one - delta2),
                    l2_pow: e.alpha2 * (q - one - delta2),
                }),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::AuxSolution,
                absorb_exponent: (a2 - one) * e.gamma2 + b2 * e.gamma1 - k2,
            });
            report.margins = margins.take();
            return report;
        }
        margins.items.extend(m.take());
    }

    // Alt3 / Alt4: one singular-exponent component, the other linear.
    for (tag, gamma, mirrored) in [(Regime::Alt3, e.gamma3, false), (Regime::Alt4, e.gamma4, true)] {
        let (rp, rq, ra1, ra2, rb1, rb2, rk1, rk2) = if mirrored {
            (q, p, a2, a1, b2, b1, k2, k1)
        } else {
            (p, q, a1, a2, b1, b2, k1, k2)
        };
        let name = if mirrored { "alt4" } else { "alt3" };
        let mut m = Margins::new();
        m.push(format!("{name}.gamma_lower"), gamma - (one - rp.recip()))
            .push(format!("{name}.gamma_upper"), one - gamma)
            .push(format!("{name}.other_lower"), (ra2 + rb2 * gamma) - (rk2 - one))
            .push(format!("{name}.other_upper"), (rq - one) - (ra2 + rb2 * gamma));
        if m.all_pass() {
            margins.items.extend(m.take());
            let delta_sing = (rp - one) - (rp - rk1) / gamma;
            let lam_sing = (rp - one - delta_sing) / (rp - one - ra1);
            let delta_lin = ra2 + rb2 * gamma;
            let mu_lin = rb2 / (rp - one - ra1);
            let sv = (rp - one - ra1).recip();
            let singular = ComponentRecipe {
                aux: Some(AuxProblem {
                    r: rp,
                    delta: delta_sing,
                    k_sing: rk1,
                    l1_pow: if mirrored { T::zero() } else { lam_sing },
                    l2_pow: if mirrored { lam_sing } else { T::zero() },
                }),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::AuxSolution,
                absorb_exponent: (ra1 - one) * gamma + rb1 - rk1,
            };
            let linear = ComponentRecipe {
                aux: Some(AuxProblem {
                    r: rq,
                    delta: delta_lin,
                    k_sing: rk2,
                    l1_pow: if mirrored { one } else { mu_lin },
                    l2_pow: if mirrored { mu_lin } else { one },
                }),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::AuxSolution,
                absorb_exponent: (ra2 - one) + rb2 * gamma - rk2,
            };
            let mut report = base(tag, blank());
            report.regularity = Regularity::C0Alpha;
            if mirrored {
                report.gamma_u = Some(one);
                report.gamma_v = Some(gamma);
                report.slowly_varying_v = (sv, T::zero());
                report.recipe_u = Some(linear);
                report.recipe_v = Some(singular);
            } else {
                report.gamma_u = Some(gamma);
                report.gamma_v = Some(one);
                report.slowly_varying_u = (sv, T::zero());
                report.recipe_u = Some(singular);
                report.recipe_v = Some(linear);
            }
            report.margins = margins.take();
            return report;
        }
        margins.items.extend(m.take());
    }

    // Limit-i / Limit-ii: one coupling exactly on the k-1 line.
    for (tag, mirrored) in [(Regime::Limit1, false), (Regime::Limit2, true)] {
        let (rp, rq, ra1, ra2, rb1, rb2, rk1, rk2) = if mirrored {
            (q, p, a2, a1, b2, b1, k2, k1)
        } else {
            (p, q, a1, a2, b1, b2, k1, k2)
        };
        let name = if mirrored { "limit2" } else { "limit1" };
        let mut m = Margins::new();
        m.push_eq(format!("{name}.on_line"), ra1 + rb1, rk1 - one)
            .push(
                format!("{name}.other_lower"),
                (ra2 + rb2) - (rk2 - one) + T::lit(EQ_TOL),
            )
            .push(format!("{name}.other_upper"), (rq - one) - (ra2 + rb2));
        if m.all_pass() {
            margins.items.extend(m.take());
            let eps = match choose_epsilon(|eps: T| (one - sigma.value * eps).min(one - eps)) {
                Some(eps) => eps,
                None => return RegimeReport::infeasible(margins.take(), Some(sigma)),
            };
            let sing = ComponentRecipe {
                aux: Some(AuxProblem {
                    r: rp,
                    delta: ((rk1 - one) + (rp - one)) * T::half(),
                    k_sing: rk1,
                    l1_pow: if mirrored { T::zero() } else { one },
                    l2_pow: if mirrored { one } else { T::zero() },
                }),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::DistancePower {
                    exponent: one - eps,
                },
                absorb_exponent: (ra1 - one) + rb1 - rk1,
            };
            let other = ComponentRecipe {
                aux: Some(AuxProblem {
                    r: rq,
                    delta: ((ra2 + rb2) + (rq - one)) * T::half(),
                    k_sing: rk2,
                    l1_pow: if mirrored { one } else { T::zero() },
                    l2_pow: if mirrored { T::zero() } else { one },
                }),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::DistancePower {
                    exponent: one - sigma.value * eps,
                },
                absorb_exponent: (ra2 - one) + rb2 - rk2,
            };
            let mut report = base(tag, blank());
            report.gamma_u = Some(one);
            report.gamma_v = Some(one);
            report.regularity = Regularity::C0Alpha;
            report.epsilon = Some(eps);
            if mirrored {
                report.recipe_u = Some(other);
                report.recipe_v = Some(sing);
            } else {
                report.recipe_u = Some(sing);
                report.recipe_v = Some(other);
            }
            report.margins = margins.take();
            return report;
        }
        margins.items.extend(m.take());
    }

    // Limit-iii / Limit-iv: the composed coupling exactly on the k-1 line.
    for (tag, gamma, mirrored) in [(Regime::Limit3, e.gamma3, false), (Regime::Limit4, e.gamma4, true)] {
        let (rp, rq, ra2, rb2, rk2) = if mirrored {
            (q, p, a1, b1, k1)
        } else {
            (p, q, a2, b2, k2)
        };
        let name = if mirrored { "limit4" } else { "limit3" };
        let mut m = Margins::new();
        m.push(format!("{name}.gamma_lower"), gamma - (one - rp.recip()))
            .push(format!("{name}.gamma_upper"), one - gamma)
            .push_eq(format!("{name}.on_line"), ra2 + rb2 * gamma, rk2 - one);
        if m.all_pass() {
            margins.items.extend(m.take());
            let eps = match choose_epsilon(|eps: T| {
                ((gamma - eps) - (one - rp.recip()))
                    .min(one - (gamma + eps))
                    .min(one - sigma.value * eps)
            }) {
                Some(eps) => eps,
                None => return RegimeReport::infeasible(margins.take(), Some(sigma)),
            };
            let sing = ComponentRecipe {
                aux: None,
                lower: BoundProfile::DistancePower {
                    exponent: gamma + eps,
                },
                upper: BoundProfile::DistancePower {
                    exponent: gamma - eps,
                },
                absorb_exponent: if mirrored {
                    (a2 - one) * gamma + b2 - k2
                } else {
                    (a1 - one) * gamma + b1 - k1
                },
            };
            let other = ComponentRecipe {
                aux: Some(AuxProblem {
                    r: rq,
                    delta: ((ra2 + rb2 * gamma) + (rq - one)) * T::half(),
                    k_sing: rk2,
                    l1_pow: if mirrored { one } else { T::zero() },
                    l2_pow: if mirrored { T::zero() } else { one },
                }),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::DistancePower {
                    exponent: one - sigma.value * eps,
                },
                absorb_exponent: (ra2 - one) + rb2 * gamma - rk2,
            };
            let mut report = base(tag, blank());
            report.regularity = Regularity::C0Alpha;
            report.epsilon = Some(eps);
            if mirrored {
                report.gamma_u = Some(one);
                report.gamma_v = Some(gamma);
                report.recipe_u = Some(other);
                report.recipe_v = Some(sing);
            } else {
                report.gamma_u = Some(gamma);
                report.gamma_v = Some(one);
                report.recipe_u = Some(sing);
                report.recipe_v = Some(other);
            }
            report.margins = margins.take();
            return report;
        }
        margins.items.extend(m.take());
    }

    // Cooperative very-weak regimes.
    if spec.is_cooperative() {
        // Coop-i: both exponents positive and below 1 with at least one at
        // or under the Sobolev threshold 1 - 1/r.
        {
            let thr1 = one - p.recip();
            let thr2 = one - q.recip();
            let branch_a = e.gamma1.min(e.gamma2).min(thr1 - e.gamma1).min(thr2 - e.gamma2);
            let branch_b = (e.gamma1 - thr1)
                .min(one - e.gamma1)
                .min(e.gamma2)
                .min(thr2 - e.gamma2);
            let branch_c = e.gamma1
                .min(thr1 - e.gamma1)
                .min(e.gamma2 - thr2)
                .min(one - e.gamma2);
            let mut m = Margins::new();
            m.push("coop1.window", branch_a.max(branch_b).max(branch_c));
            if m.all_pass() {
                margins.items.extend(m.take());
                let delta1 = (p - one) - (p - k1) / e.gamma1;
                let delta2 = (q - one) - (q - k2) / e.gamma2;
                let mut report = base(Regime::Coop1, blank());
                report.gamma_u = Some(e.gamma1);
                report.gamma_v = Some(e.gamma2);
                report.slowly_varying_u = (e.alpha1, e.beta1);
                report.slowly_varying_v = (e.alpha2, e.beta2);
                report.regularity = Regularity::VeryWeak;
                report.recipe_u = Some(ComponentRecipe {
                    aux: Some(AuxProblem {
                        r: p,
                        delta: delta1,
                        k_sing: k1,
                        l1_pow: e.alpha1 * (p - one - delta1),
                        l2_pow: e.beta1 * (p - one - delta1),
                    }),
                    lower: BoundProfile::AuxSolution,
                    upper: BoundProfile::AuxSolution,
                    absorb_exponent: (a1 - one) * e.gamma1 + b1 * e.gamma2 - k1,
                });
                report.recipe_v = Some(ComponentRecipe {
                    aux: Some(AuxProblem {
                        r: q,
                        delta: delta2,
                        k_sing: k2,
                        l1_pow: e.beta2 * (q - one - delta2),
                        l2_pow: e.alpha2 * (q - one - delta2),
                    }),
                    lower: BoundProfile::AuxSolution,
                    upper: BoundProfile::AuxSolution,
                    absorb_exponent: (a2 - one) * e.gamma2 + b2 * e.gamma1 - k2,
                });
                report.margins = margins.take();
                return report;
            }
            margins.items.extend(m.take());
        }

        // Coop-ii / Coop-iii: the Alt3/Alt4 construction with the singular
        // exponent at or below the Sobolev threshold.
        for (tag, gamma, mirrored) in [(Regime::Coop2, e.gamma3, false), (Regime::Coop3, e.gamma4, true)] {
            let (rp, rq, ra1, ra2, rb1, rb2, rk1, rk2) = if mirrored {
                (q, p, a2, a1, b2, b1, k2, k1)
            } else {
                (p, q, a1, a2, b1, b2, k1, k2)
            };
            let name = if mirrored { "coop3" } else { "coop2" };
            let mut m = Margins::new();
            m.push(format!("{name}.gamma_positive"), gamma)
                .push(
                    format!("{name}.gamma_at_most_threshold"),
                    (one - rp.recip()) - gamma + T::lit(EQ_TOL),
                )
                .push(format!("{name}.other_lower"), (ra2 + rb2 * gamma) - (rk2 - one))
                .push(format!("{name}.other_upper"), (rq - one) - (ra2 + rb2 * gamma));
            if m.all_pass() {
                margins.items.extend(m.take());
                let delta_sing = (rp - one) - (rp - rk1) / gamma;
                let lam_sing = (rp - one - delta_sing) / (rp - one - ra1);
                let sv = (rp - one - ra1).recip();
                let singular = ComponentRecipe {
                    aux: Some(AuxProblem {
                        r: rp,
                        delta: delta_sing,
                        k_sing: rk1,
                        l1_pow: if mirrored { T::zero() } else { lam_sing },
                        l2_pow: if mirrored { lam_sing } else { T::zero() },
                    }),
                    lower: BoundProfile::AuxSolution,
                    upper: BoundProfile::AuxSolution,
                    absorb_exponent: (ra1 - one) * gamma + rb1 - rk1,
                };
                let linear = ComponentRecipe {
                    aux: Some(AuxProblem {
                        r: rq,
                        delta: ra2 + rb2 * gamma,
                        k_sing: rk2,
                        l1_pow: if mirrored { one } else { rb2 / (rp - one - ra1) },
                        l2_pow: if mirrored { rb2 / (rp - one - ra1) } else { one },
                    }),
                    lower: BoundProfile::AuxSolution,
                    upper: BoundProfile::AuxSolution,
                    absorb_exponent: (ra2 - one) + rb2 * gamma - rk2,
                };
                let mut report = base(tag, blank());
                report.regularity = Regularity::VeryWeak;
                if mirrored {
                    report.gamma_u = Some(one);
                    report.gamma_v = Some(gamma);
                    report.slowly_varying_v = (sv, T::zero());
                    report.recipe_u = Some(linear);
                    report.recipe_v = Some(singular);
                } else {
                    report.gamma_u = Some(gamma);
                    report.gamma_v = Some(one);
                    report.slowly_varying_u = (sv, T::zero());
                    report.recipe_u = Some(singular);
                    report.recipe_v = Some(linear);
                }
                report.margins = margins.take();
                return report;
            }
            margins.items.extend(m.take());
        }
    }

    RegimeReport::infeasible(margins.take(), Some(sigma))
}

/// Scalar four-case classification for `-Δ_r w = d^{-k} L(d) w^δ`.
pub fn scalar_regime<T: Real>(
    r: T,
    k: T,
    delta: T,
    _l: &LogPowerFactor<T>,
) -> Result<RegimeReport<T>, SolverError> {
    let one = T::one();
    if !(r > one) {
        return Err(SolverError::InvalidInput(format!("need r > 1, got {r}")));
    }
    if !(k >= T::zero() && k < r) {
        return Err(SolverError::InvalidInput(format!(
            "need 0 <= k < r, got k = {k}"
        )));
    }
    if !(delta < r - one) {
        return Err(SolverError::InvalidInput(format!(
            "need delta < r - 1, got delta = {delta}"
        )));
    }
    let mut report = RegimeReport::infeasible(Vec::new(), None);
    report.feasible = true;
    let very_weak_line = k - T::two() + (k - one) / (r - one);
    let mut margins = Margins::new();
    margins
        .push("scalar.delta_above_k_minus_1", delta - (k - one))
        .push("scalar.delta_above_very_weak_line", delta - very_weak_line);
    if delta > k - one && !approx_eq(delta, k - one) {
        report.regime = Regime::Scalar1;
        report.gamma_u = Some(one);
        report.regularity = Regularity::C1Alpha;
    } else if approx_eq(delta, k - one) {
        report.regime = Regime::Scalar2;
        report.gamma_u = Some(one);
        report.log_correction_u = Some((r - k).recip());
        report.regularity = Regularity::C0Alpha;
    } else {
        let gamma = (r - k) / (r - one - delta);
        report.gamma_u = Some(gamma);
        report.slowly_varying_u = ((r - one - delta).recip(), T::zero());
        if delta > very_weak_line && !approx_eq(delta, very_weak_line) {
            report.regime = Regime::Scalar3;
            report.regularity = Regularity::C0Alpha;
        } else {
            report.regime = Regime::Scalar4;
            report.regularity = Regularity::VeryWeak;
            report.gamma_w = Some((r - one) * (r - one - delta) / (r * (r - k)));
        }
    }
    report.recipe_u = Some(ComponentRecipe {
        aux: Some(AuxProblem {
            r,
            delta,
            k_sing: k,
            l1_pow: one,
            l2_pow: T::zero(),
        }),
        lower: BoundProfile::AuxSolution,
        upper: BoundProfile::AuxSolution,
        absorb_exponent: (delta - one) * report.gamma_u.unwrap() - k,
    });
    report.margins = margins.take();
    Ok(report)
}

/// Classifies the competition/logistic family: the four power cases and
/// the `α_i = -1` log-corrected limiting cases.
pub fn classify_competition<T: Real>(spec: &CompetitionSpec<T>) -> RegimeReport<T> {
    let one = T::one();
    let (p, q) = (spec.p, spec.q);
    let (al1, al2) = (spec.alpha1, spec.alpha2);
    let (a1, a2, b1, b2) = (spec.a1, spec.a2, spec.b1, spec.b2);
    let mut margins = Margins::new();

    // σ-window of the two interaction-domination conditions.
    let lo = if a2 - al2 > T::zero() {
        Some(b2.abs() / (a2 - al2))
    } else {
        None
    };
    let hi = if a1 - al1 > T::zero() {
        Some((a1 - al1) / b1.abs())
    } else {
        None
    };
    let sigma = match (lo, hi) {
        (Some(lo), Some(hi)) if lo < hi => SigmaChoice {
            lo,
            hi,
            value: geometric_mean(lo, hi),
        },
        _ => {
            margins.push("sigma.window", T::lit(-1.0));
            return RegimeReport::infeasible(margins.take(), None);
        }
    };
    margins.push("sigma.window", sigma.hi - sigma.lo);

    let gamma1 = p / (p - one - al1);
    let gamma2 = q / (q - one - al2);
    let aux1 = AuxProblem {
        r: p,
        delta: al1,
        k_sing: T::zero(),
        l1_pow: T::zero(),
        l2_pow: T::zero(),
    };
    let aux2 = AuxProblem {
        r: q,
        delta: al2,
        k_sing: T::zero(),
        l1_pow: T::zero(),
        l2_pow: T::zero(),
    };
    let recipe = |aux: AuxProblem<T>, absorb: T| ComponentRecipe {
        aux: Some(aux),
        lower: BoundProfile::AuxSolution,
        upper: BoundProfile::AuxSolution,
        absorb_exponent: absorb,
    };
    let absorb1 = |gu: T, gv: T| {
        ((al1 - one) * gu)
            .min((spec.beta1 - one) * gu)
            .min((a1 - one) * gu + b1 * gv)
    };
    let absorb2 = |gu: T, gv: T| {
        ((al2 - one) * gv)
            .min((spec.beta2 - one) * gv)
            .min((a2 - one) * gv + b2 * gu)
    };
    let finish = |regime: Regime,
                  gamma_u: T,
                  gamma_v: T,
                  log_u: Option<T>,
                  log_v: Option<T>,
                  regularity: Regularity,
                  margins: Vec<(String, T)>| {
        RegimeReport {
            feasible: true,
            regime,
            gamma_u: Some(gamma_u),
            gamma_v: Some(gamma_v),
            slowly_varying_u: (T::zero(), T::zero()),
            slowly_varying_v: (T::zero(), T::zero()),
            log_correction_u: log_u,
            log_correction_v: log_v,
            sigma: Some(sigma),
            regularity,
            epsilon: None,
            gamma_w: None,
            margins,
            recipe_u: Some(recipe(aux1, absorb1(gamma_u, gamma_v))),
            recipe_v: Some(recipe(aux2, absorb2(gamma_u, gamma_v))),
        }
    };

    let u_log = approx_eq(al1, -one);
    let v_log = approx_eq(al2, -one);

    // Case (ii): both absorption exponents above -1, u ~ d and v ~ d.
    {
        let mut m = Margins::new();
        m.push("comp2.alpha1_above", al1 + one)
            .push("comp2.margin1", a1 - al1 + b1)
            .push("comp2.alpha2_above", al2 + one)
            .push("comp2.margin2", a2 - al2 + b2);
        if !u_log && !v_log && m.all_pass() {
            margins.items.extend(m.take());
            return finish(Regime::Alt2, one, one, None, None, Regularity::C1Alpha, margins.take());
        }
        margins.items.extend(m.take());
    }

    // Case (i): both below -1, power exponents p/(p-1-α1), q/(q-1-α2).
    {
        let mut m = Margins::new();
        m.push("comp1.alpha1_below", -one - al1)
            .push("comp1.margin1", (a1 - al1) * gamma1 + b1 * gamma2)
            .push("comp1.alpha2_below", -one - al2)
            .push("comp1.margin2", (a2 - al2) * gamma2 + b2 * gamma1);
        if !u_log && !v_log && m.all_pass() {
            margins.items.extend(m.take());
            return finish(
                Regime::Alt1,
                gamma1,
                gamma2,
                None,
                None,
                Regularity::C0Alpha,
                margins.take(),
            );
        }
        margins.items.extend(m.take());
    }

    // Cases (iii)/(iv): one below -1, the other above.
    for (tag, mirrored) in [(Regime::Alt3, false), (Regime::Alt4, true)] {
        let (ral1, ral2, ra1, ra2, rb1, rb2, g_sing) = if mirrored {
            (al2, al1, a2, a1, b2, b1, gamma2)
        } else {
            (al1, al2, a1, a2, b1, b2, gamma1)
        };
        let name = if mirrored { "comp4" } else { "comp3" };
        let is_log = if mirrored { v_log } else { u_log };
        let mut m = Margins::new();
        m.push(format!("{name}.alpha_sing_below"), -one - ral1)
            .push(format!("{name}.margin_sing"), (ra1 - ral1) * g_sing + rb1)
            .push(format!("{name}.alpha_lin_above"), ral2 + one)
            .push(format!("{name}.margin_lin"), (ra2 - ral2) + rb2 * g_sing);
        if !is_log && m.all_pass() {
            margins.items.extend(m.take());
            let (gu, gv) = if mirrored { (one, g_sing) } else { (g_sing, one) };
            return finish(tag, gu, gv, None, None, Regularity::C0Alpha, margins.take());
        }
        margins.items.extend(m.take());
    }

    // Log-corrected limiting cases on the α = -1 line.
    if u_log || v_log {
        let lp = p.recip();
        let lq = q.recip();
        if u_log && v_log {
            let mut m = Margins::new();
            m.push("complog2.margin1", a1 - al1 + b1)
                .push("complog2.margin2", a2 - al2 + b2);
            if m.all_pass() {
                margins.items.extend(m.take());
                return finish(
                    Regime::Limit2,
                    one,
                    one,
                    Some(lp),
                    Some(lq),
                    Regularity::C0Alpha,
                    margins.take(),
                );
            }
            margins.items.extend(m.take());
        } else {
            // exactly one component on the line; the other is a power or
            // linear case depending on the side of -1
            let (ra1, ra2, rb1, rb2, ral2, other_gamma, mirrored) = if u_log {
                (a1, a2, b1, b2, al2, gamma2, false)
            } else {
                (a2, a1, b2, b1, al1, gamma1, true)
            };
            let name = if mirrored { "complog_v" } else { "complog_u" };
            if ral2 < -one {
                let mut m = Margins::new();
                m.push(format!("{name}.margin_log"), (ra1 + one) + rb1 * other_gamma)
                    .push(format!("{name}.margin_power"), (ra2 - ral2) * other_gamma + rb2);
                if m.all_pass() {
                    margins.items.extend(m.take());
                    let (gu, gv, lu, lv) = if mirrored {
                        (other_gamma, one, None, Some(lq))
                    } else {
                        (one, other_gamma, Some(lp), None)
                    };
                    return finish(Regime::Limit1, gu, gv, lu, lv, Regularity::C0Alpha, margins.take());
                }
                margins.items.extend(m.take());
            } else {
                let mut m = Margins::new();
                m.push(format!("{name}.margin_log"), ra1 + one + rb1)
                    .push(format!("{name}.alpha_lin_above"), ral2 + one)
                    .push(format!("{name}.margin_lin"), (ra2 - ral2) + rb2);
                if m.all_pass() {
                    margins.items.extend(m.take());
                    let (gu, gv, lu, lv) = if mirrored {
                        (one, one, None, Some(lq))
                    } else {
                        (one, one, Some(lp), None)
                    };
                    return finish(Regime::Limit3, gu, gv, lu, lv, Regularity::C0Alpha, margins.take());
                }
                margins.items.extend(m.take());
            }
        }
    }

    RegimeReport::infeasible(margins.take(), Some(sigma))
}

/// Classifies the absorption family: the power-coupled classification at
/// `k = 0`, `L ≡ 1` with the extra absorption-domination margins, plus the
/// limiting ε-bracket cases.
pub fn classify_absorption<T: Real>(spec: &AbsorptionSpec<T>) -> RegimeReport<T> {
    let one = T::one();
    let (p, q) = (spec.p, spec.q);
    let (a1, a2, b1, b2) = (spec.a1, spec.a2, spec.b1, spec.b2);
    let (al1, al2, be1, be2) = (spec.alpha1, spec.alpha2, spec.beta1, spec.beta2);
    let mut margins = Margins::new();

    let (h1_ok, h1_margin) = {
        let margin = (p - one - a1) * (q - one - a2) - (b1 * b2).abs();
        (margin > T::zero(), margin)
    };
    margins.push("H1", h1_margin);

    // σ-window intersecting the coupling and absorption-domination pairs.
    let mut lo = b2.abs() / (q - one - a2);
    let mut hi = (p - one - a1) / b1.abs();
    if be1.abs() > b1.abs() {
        if al1 - a1 <= T::zero() {
            margins.push("sigma.window", T::lit(-1.0));
            return RegimeReport::infeasible(margins.take(), None);
        }
        hi = hi.min((al1 - a1) / (be1.abs() - b1.abs()));
    }
    if be2.abs() > b2.abs() {
        if al2 - a2 <= T::zero() {
            margins.push("sigma.window", T::lit(-1.0));
            return RegimeReport::infeasible(margins.take(), None);
        }
        lo = lo.max((be2.abs() - b2.abs()) / (al2 - a2));
    }
    if !h1_ok || !(lo < hi) {
        margins.push("sigma.window", hi - lo);
        return RegimeReport::infeasible(margins.take(), None);
    }
    let sigma = SigmaChoice {
        lo,
        hi,
        value: geometric_mean(lo, hi),
    };
    margins.push("sigma.window", hi - lo);

    let e = family1_exponents(p, q, a1, a2, b1, b2, T::zero(), T::zero());
    let aux = |r: T, delta: T| AuxProblem {
        r,
        delta,
        k_sing: T::zero(),
        l1_pow: T::zero(),
        l2_pow: T::zero(),
    };
    let plain = |aux_problem: AuxProblem<T>, absorb: T| ComponentRecipe {
        aux: Some(aux_problem),
        lower: BoundProfile::AuxSolution,
        upper: BoundProfile::AuxSolution,
        absorb_exponent: absorb,
    };
    let absorb_u = |gu: T, gv: T| ((a1 - one) * gu + b1 * gv).min((al1 - one) * gu + be1 * gv);
    let absorb_v = |gu: T, gv: T| ((a2 - one) * gv + b2 * gu).min((al2 - one) * gv + be2 * gu);
    let finish = |regime: Regime,
                  gamma_u: T,
                  gamma_v: T,
                  recipe_u: ComponentRecipe<T>,
                  recipe_v: ComponentRecipe<T>,
                  regularity: Regularity,
                  epsilon: Option<T>,
                  margins: Vec<(String, T)>| {
        RegimeReport {
            feasible: true,
            regime,
            gamma_u: Some(gamma_u),
            gamma_v: Some(gamma_v),
            slowly_varying_u: (T::zero(), T::zero()),
            slowly_varying_v: (T::zero(), T::zero()),
            log_correction_u: None,
            log_correction_v: None,
            sigma: Some(sigma),
            regularity,
            epsilon,
            gamma_w: None,
            margins,
            recipe_u: Some(recipe_u),
            recipe_v: Some(recipe_v),
        }
    };

    // Case (ii): u ~ d, v ~ d.
    {
        let mut m = Margins::new();
        m.push("abs2.u_lower", (a1 + b1) + one)
            .push("abs2.u_upper", (p - one) - (a1 + b1))
            .push("abs2.margin1", (al1 - a1) + (be1 - b1))
            .push("abs2.v_lower", (a2 + b2) + one)
            .push("abs2.v_upper", (q - one) - (a2 + b2))
            .push("abs2.margin2", (al2 - a2) + (be2 - b2));
        if m.all_pass() {
            margins.items.extend(m.take());
            return finish(
                Regime::Alt2,
                one,
                one,
                plain(aux(p, a1 + b1), absorb_u(one, one)),
                plain(aux(q, a2 + b2), absorb_v(one, one)),
                Regularity::C1Alpha,
                None,
                margins.take(),
            );
        }
        margins.items.extend(m.take());
    }

    // Case (i): both exponents in the singular window.
    {
        let mut m = Margins::new();
        m.push("abs1.gamma1_lower", e.gamma1 - (one - p.recip()))
            .push("abs1.gamma1_upper", one - e.gamma1)
            .push("abs1.margin1", (al1 - a1) * e.gamma1 + (be1 - b1) * e.gamma2)
            .push("abs1.gamma2_lower", e.gamma2 - (one - q.recip()))
            .push("abs1.gamma2_upper", one - e.gamma2)
            .push("abs1.margin2", (al2 - a2) * e.gamma2 + (be2 - b2) * e.gamma1);
        if m.all_pass() {
            margins.items.extend(m.take());
            let delta1 = (p - one) - p / e.gamma1;
            let delta2 = (q - one) - q / e.gamma2;
            return finish(
                Regime::Alt1,
                e.gamma1,
                e.gamma2,
                plain(aux(p, delta1), absorb_u(e.gamma1, e.gamma2)),
                plain(aux(q, delta2), absorb_v(e.gamma1, e.gamma2)),
                Regularity::C0Alpha,
                None,
                margins.take(),
            );
        }
        margins.items.extend(m.take());
    }

    // Cases (iii)/(iv): one singular component, the other linear.
    for (tag, gamma, mirrored) in [(Regime::Alt3, e.gamma3, false), (Regime::Alt4, e.gamma4, true)] {
        let (rp, rq, ra1, ra2, rb1, rb2, ral1, ral2, rbe1, rbe2) = if mirrored {
            (q, p, a2, a1, b2, b1, al2, al1, be2, be1)
        } else {
            (p, q, a1, a2, b1, b2, al1, al2, be1, be2)
        };
        let name = if mirrored { "abs4" } else { "abs3" };
        let mut m = Margins::new();
        m.push(format!("{name}.gamma_lower"), gamma - (one - rp.recip()))
            .push(format!("{name}.gamma_upper"), one - gamma)
            .push(format!("{name}.margin_sing"), (ral1 - ra1) * gamma + (rbe1 - rb1))
            .push(format!("{name}.other_lower"), (ra2 + rb2 * gamma) + one)
            .push(format!("{name}.other_upper"), (rq - one) - (ra2 + rb2 * gamma))
            .push(format!("{name}.margin_lin"), (ral2 - ra2) + (rbe2 - rb2) * gamma);
        if m.all_pass() {
            margins.items.extend(m.take());
            let delta_sing = (rp - one) - rp / gamma;
            let delta_lin = ra2 + rb2 * gamma;
            let (gu_eff, gv_eff) = if mirrored { (one, gamma) } else { (gamma, one) };
            let sing = plain(
                aux(rp, delta_sing),
                if mirrored { absorb_v(gu_eff, gv_eff) } else { absorb_u(gu_eff, gv_eff) },
            );
            let lin = plain(
                aux(rq, delta_lin),
                if mirrored { absorb_u(gu_eff, gv_eff) } else { absorb_v(gu_eff, gv_eff) },
            );
            let (gu, gv, ru, rv) = if mirrored {
                (one, gamma, lin, sing)
            } else {
                (gamma, one, sing, lin)
            };
            return finish(tag, gu, gv, ru, rv, Regularity::C0Alpha, None, margins.take());
        }
        margins.items.extend(m.take());
    }

    // Limiting ε-bracket cases on the -1 lines.
    for (tag, mirrored) in [(Regime::Limit1, false), (Regime::Limit2, true)] {
        let (rq, ra1, ra2, rb1, rb2, ral1, ral2, rbe1, rbe2) = if mirrored {
            (p, a2, a1, b2, b1, al2, al1, be2, be1)
        } else {
            (q, a1, a2, b1, b2, al1, al2, be1, be2)
        };
        let name = if mirrored { "abslimit2" } else { "abslimit1" };
        let mut m = Margins::new();
        m.push_eq(format!("{name}.on_line"), ra1 + rb1, -one)
            .push(format!("{name}.margin1"), (ral1 - ra1) + (rbe1 - rb1))
            .push(format!("{name}.other_lower"), (ra2 + rb2) + one + T::lit(EQ_TOL))
            .push(format!("{name}.other_upper"), (rq - one) - (ra2 + rb2))
            .push(format!("{name}.margin2"), (ral2 - ra2) + (rbe2 - rb2));
        if m.all_pass() {
            margins.items.extend(m.take());
            let eps = match choose_epsilon(|eps: T| (one - sigma.value * eps).min(one - eps)) {
                Some(eps) => eps,
                None => return RegimeReport::infeasible(margins.take(), Some(sigma)),
            };
            let rp_sing = if mirrored { q } else { p };
            let sing = ComponentRecipe {
                aux: Some(aux(rp_sing, (-one + (rp_sing - one)) * T::half())),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::DistancePower { exponent: one - eps },
                absorb_exponent: if mirrored { absorb_v(one, one) } else { absorb_u(one, one) },
            };
            let rq_other = if mirrored { p } else { q };
            let other = ComponentRecipe {
                aux: Some(aux(rq_other, ((ra2 + rb2) + (rq_other - one)) * T::half())),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::DistancePower {
                    exponent: one - sigma.value * eps,
                },
                absorb_exponent: if mirrored { absorb_u(one, one) } else { absorb_v(one, one) },
            };
            let (ru, rv) = if mirrored { (other, sing) } else { (sing, other) };
            return finish(
                tag,
                one,
                one,
                ru,
                rv,
                Regularity::C0Alpha,
                Some(eps),
                margins.take(),
            );
        }
        margins.items.extend(m.take());
    }

    for (tag, gamma, mirrored) in [(Regime::Limit3, e.gamma3, false), (Regime::Limit4, e.gamma4, true)] {
        let (rp, rq, ra1, ra2, rb2, ral1, ral2, rbe1, rbe2, rb1) = if mirrored {
            (q, p, a2, a1, b1, al2, al1, be2, be1, b2)
        } else {
            (p, q, a1, a2, b2, al1, al2, be1, be2, b1)
        };
        let name = if mirrored { "abslimit4" } else { "abslimit3" };
        let mut m = Margins::new();
        m.push(format!("{name}.gamma_lower"), gamma - (one - rp.recip()))
            .push(format!("{name}.gamma_upper"), one - gamma)
            .push(format!("{name}.margin_sing"), (ral1 - ra1) * gamma + (rbe1 - rb1))
            .push_eq(format!("{name}.on_line"), ra2 + rb2 * gamma, -one)
            .push(format!("{name}.margin_lin"), (ral2 - ra2) + (rbe2 - rb2) * gamma);
        if m.all_pass() {
            margins.items.extend(m.take());
            let eps = match choose_epsilon(|eps: T| {
                ((gamma - eps) - (one - rp.recip()))
                    .min(one - (gamma + eps))
                    .min(one - sigma.value * eps)
            }) {
                Some(eps) => eps,
                None => return RegimeReport::infeasible(margins.take(), Some(sigma)),
            };
            let sing = ComponentRecipe {
                aux: None,
                lower: BoundProfile::DistancePower { exponent: gamma + eps },
                upper: BoundProfile::DistancePower { exponent: gamma - eps },
                absorb_exponent: {
                    let (gu_eff, gv_eff) = if mirrored { (one, gamma) } else { (gamma, one) };
                    if mirrored { absorb_v(gu_eff, gv_eff) } else { absorb_u(gu_eff, gv_eff) }
                },
            };
            let other = ComponentRecipe {
                aux: Some(aux(rq, ((ra2 + rb2 * gamma) + (rq - one)) * T::half())),
                lower: BoundProfile::AuxSolution,
                upper: BoundProfile::DistancePower {
                    exponent: one - sigma.value * eps,
                },
                absorb_exponent: {
                    let (gu_eff, gv_eff) = if mirrored { (one, gamma) } else { (gamma, one) };
                    if mirrored { absorb_u(gu_eff, gv_eff) } else { absorb_v(gu_eff, gv_eff) }
                },
            };
            let (gu, gv, ru, rv) = if mirrored {
                (one, gamma, other, sing)
            } else {
                (gamma, one, sing, other)
            };
            return finish(tag, gu, gv, ru, rv, Regularity::C0Alpha, Some(eps), margins.take());
        }
        margins.items.extend(m.take());
    }

    RegimeReport::infeasible(margins.take(), Some(sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l_one() -> LogPowerFactor<f64> {
        LogPowerFactor::one(1.0)
    }

    fn spec(p: f64, q: f64, a: (f64, f64), b: (f64, f64), k: (f64, f64)) -> SystemSpec<f64> {
        SystemSpec::new(p, q, a.0, a.1, b.0, b.1, k.0, k.1, l_one(), l_one()).unwrap()
    }

    #[test]
    fn subhomogeneity_examples() {
        let (ok, m) = check_subhomogeneity(&spec(2.0, 2.0, (0.0, 0.0), (1.0, 1.0), (0.0, 0.0)));
        assert!(!ok);
        assert_eq!(m, 0.0);
        let (ok, m) = check_subhomogeneity(&spec(2.0, 2.0, (0.0, 0.0), (0.5, 0.5), (0.0, 0.0)));
        assert!(ok);
        assert!((m - 0.75).abs() < 1e-15);
        let (ok, m) = check_subhomogeneity(&spec(3.0, 2.0, (1.0, 0.5), (0.5, 0.5), (0.0, 0.0)));
        assert!(ok);
        assert!((m - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sigma_window_examples() {
        let s = find_sigma(&spec(2.0, 2.0, (0.0, 0.0), (0.5, 0.5), (0.0, 0.0))).unwrap();
        assert!((s.lo - 0.5).abs() < 1e-15);
        assert!((s.hi - 2.0).abs() < 1e-15);
        assert!((s.value - 1.0).abs() < 1e-15);

        assert!(find_sigma(&spec(2.0, 2.0, (0.0, 0.0), (1.0, 1.0), (0.0, 0.0))).is_none());

        let s = find_sigma(&spec(3.0, 2.0, (1.0, 0.5), (0.5, 0.5), (0.0, 0.0))).unwrap();
        assert!((s.lo - 1.0).abs() < 1e-15);
        assert!((s.hi - 2.0).abs() < 1e-15);
        assert!((s.value - 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn classify_alt2() {
        let report = classify_regime(&spec(2.0, 2.0, (0.0, 0.0), (0.5, 0.5), (0.0, 0.0)));
        assert_eq!(report.regime, Regime::Alt2);
        assert_eq!(report.gamma_u, Some(1.0));
        assert_eq!(report.gamma_v, Some(1.0));
        assert_eq!(report.regularity, Regularity::C1Alpha);
    }

    #[test]
    fn classify_alt1_competitive() {
        let report = classify_regime(&spec(2.0, 2.0, (0.0, 0.0), (-0.5, -0.5), (1.2, 1.2)));
        assert_eq!(report.regime, Regime::Alt1);
        let g = report.gamma_u.unwrap();
        assert!((g - 8.0 / 15.0).abs() < 1e-14, "gamma_u = {g}");
        assert!((report.gamma_v.unwrap() - 8.0 / 15.0).abs() < 1e-14);
        assert_eq!(report.regularity, Regularity::C0Alpha);
        // internal delta of the auxiliary problem sits in the admissible window
        let aux = report.recipe_u.as_ref().unwrap().aux.unwrap();
        let window = (1.2 - 2.0 + (1.2 - 1.0) / 1.0, 1.2 - 1.0);
        assert!(aux.delta > window.0 && aux.delta < window.1);
    }

    #[test]
    fn classify_coop_very_weak() {
        let report = classify_regime(&spec(2.0, 2.0, (0.0, 0.0), (0.1, 0.1), (1.8, 1.8)));
        assert_eq!(report.regime, Regime::Coop1);
        assert!((report.gamma_u.unwrap() - 2.0 / 9.0).abs() < 1e-14);
        assert_eq!(report.regularity, Regularity::VeryWeak);
    }

    #[test]
    fn classify_limit_epsilon() {
        let report = classify_regime(&spec(2.0, 2.0, (-0.5, -0.5), (0.5, 0.5), (1.0, 1.0)));
        assert_eq!(report.regime, Regime::Limit1);
        assert!(report.epsilon.is_some());
        let ru = report.recipe_u.unwrap();
        match ru.upper {
            BoundProfile::DistancePower { exponent } => {
                assert!((exponent - 0.99).abs() < 1e-12)
            }
            _ => panic!("limit regime upper bound should be a distance power"),
        }
    }

    #[test]
    fn infeasible_at_h1_boundary() {
        let report = classify_regime(&spec(2.0, 2.0, (0.0, 0.0), (1.0, 1.0), (0.0, 0.0)));
        assert!(!report.feasible);
        assert_eq!(report.regime, Regime::Infeasible);
    }

    #[test]
    fn swap_symmetry_on_asymmetric_spec() {
        let s = spec(2.5, 2.0, (0.3, -0.2), (0.4, 0.6), (0.5, 0.1));
        let report = classify_regime(&s);
        let swapped = classify_regime(&s.swapped());
        let expected = report.swapped_components();
        assert_eq!(swapped.regime, expected.regime);
        match (swapped.gamma_u, expected.gamma_u) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
            (a, b) => assert_eq!(a.is_some(), b.is_some()),
        }
    }

    #[test]
    fn scalar_regime_cases() {
        let l = l_one();
        let r1 = scalar_regime(2.0, 0.0, 0.5, &l).unwrap();
        assert_eq!(r1.regime, Regime::Scalar1);
        assert_eq!(r1.gamma_u, Some(1.0));

        let r3 = scalar_regime(2.0, 0.0, -1.5, &l).unwrap();
        assert_eq!(r3.regime, Regime::Scalar3);
        assert!((r3.gamma_u.unwrap() - 0.8).abs() < 1e-15);

        let r2 = scalar_regime(2.0, 1.0, 0.0, &l).unwrap();
        assert_eq!(r2.regime, Regime::Scalar2);
        assert_eq!(r2.gamma_u, Some(1.0));
        assert!((r2.log_correction_u.unwrap() - 1.0).abs() < 1e-15);

        let r4 = scalar_regime(2.0, 0.0, -3.5, &l).unwrap();
        assert_eq!(r4.regime, Regime::Scalar4);
        assert!((r4.gamma_u.unwrap() - 4.0 / 9.0).abs() < 1e-15);
        assert!((r4.gamma_w.unwrap() - 1.125).abs() < 1e-15);
        assert_eq!(r4.regularity, Regularity::VeryWeak);

        assert!(scalar_regime(2.0, 0.0, 1.5, &l).is_err());
    }

    fn competition(
        alpha: (f64, f64),
        beta: (f64, f64),
        a: (f64, f64),
        b: (f64, f64),
    ) -> CompetitionSpec<f64> {
        CompetitionSpec {
            p: 2.0,
            q: 2.0,
            lambda1: 1.0,
            lambda2: 1.0,
            mu1: 1.0,
            mu2: 1.0,
            alpha1: alpha.0,
            alpha2: alpha.1,
            beta1: beta.0,
            beta2: beta.1,
            a1: a.0,
            a2: a.1,
            b1: b.0,
            b2: b.1,
        }
    }

    #[test]
    fn classify_competition_power_case() {
        let spec = competition((-1.5, -1.5), (0.0, 0.0), (1.0, 1.0), (1.0, 1.0));
        spec.validate().unwrap();
        let report = classify_competition(&spec);
        assert_eq!(report.regime, Regime::Alt1);
        assert!((report.gamma_u.unwrap() - 0.8).abs() < 1e-14);
        assert!((report.gamma_v.unwrap() - 0.8).abs() < 1e-14);
        // the first interaction margin evaluates to 2.8
        let m = report
            .margins
            .iter()
            .find(|(n, _)| n == "comp1.margin1")
            .unwrap()
            .1;
        assert!((m - 2.8).abs() < 1e-13);
    }

    #[test]
    fn classify_competition_linear_case() {
        let spec = competition((0.0, 0.0), (1.0, 1.0), (1.0, 1.0), (0.5, 0.5));
        spec.validate().unwrap();
        let report = classify_competition(&spec);
        assert_eq!(report.regime, Regime::Alt2);
        assert_eq!(report.gamma_u, Some(1.0));
        assert_eq!(report.regularity, Regularity::C1Alpha);
    }

    #[test]
    fn classify_competition_rejects_empty_sigma_window() {
        // a - α = |b| on both sides forces σ < 1 and σ > 1 at once.
        let spec = competition((0.0, 0.0), (1.0, 1.0), (1.0, 1.0), (1.0, 1.0));
        spec.validate().unwrap();
        let report = classify_competition(&spec);
        assert!(!report.feasible);
    }

    #[test]
    fn classify_competition_log_case() {
        let spec = competition((-1.0, -1.0), (0.0, 0.0), (1.0, 1.0), (1.0, 1.0));
        spec.validate().unwrap();
        let report = classify_competition(&spec);
        assert_eq!(report.regime, Regime::Limit2);
        assert_eq!(report.gamma_u, Some(1.0));
        assert!((report.log_correction_u.unwrap() - 0.5).abs() < 1e-15);
        assert!((report.log_correction_v.unwrap() - 0.5).abs() < 1e-15);
    }

    fn absorption(
        a: (f64, f64),
        b: (f64, f64),
        alpha: (f64, f64),
        beta: (f64, f64),
    ) -> AbsorptionSpec<f64> {
        AbsorptionSpec {
            p: 2.0,
            q: 2.0,
            a1: a.0,
            a2: a.1,
            b1: b.0,
            b2: b.1,
            alpha1: alpha.0,
            alpha2: alpha.1,
            beta1: beta.0,
            beta2: beta.1,
        }
    }

    #[test]
    fn classify_absorption_linear_case() {
        let report = classify_absorption(&absorption(
            (-0.5, -0.5),
            (0.25, 0.25),
            (0.0, 0.0),
            (0.5, 0.5),
        ));
        assert_eq!(report.regime, Regime::Alt2);
        assert_eq!(report.gamma_u, Some(1.0));
        let s = report.sigma.unwrap();
        assert!((s.lo - 0.5).abs() < 1e-14, "sigma lo = {}", s.lo);
        assert!((s.hi - 2.0).abs() < 1e-14, "sigma hi = {}", s.hi);
    }

    #[test]
    fn classify_absorption_infeasible() {
        let report = classify_absorption(&absorption((0.0, 0.0), (1.0, 1.0), (1.0, 1.0), (1.0, 1.0)));
        assert!(!report.feasible);
    }

    #[test]
    fn classify_absorption_falls_through_case_one() {
        // gamma1 = 4/3 is outside (1/2, 1) so case (i) fails; case (ii)
        // applies with a+b = -0.5 in (-1, 1) and margin 1.
        let report = classify_absorption(&absorption(
            (0.0, 0.0),
            (-0.5, -0.5),
            (0.5, 0.5),
            (0.0, 0.0),
        ));
        assert_eq!(report.regime, Regime::Alt2);
        assert_eq!(report.gamma_u, Some(1.0));
        let e = family1_exponents(2.0_f64, 2.0, 0.0, 0.0, -0.5, -0.5, 0.0, 0.0);
        assert!((e.gamma1 - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn l_factors_do_not_change_regime_or_gamma() {
        let with_l = SystemSpec::new(
            2.0,
            2.0,
            0.0,
            0.0,
            -0.5,
            -0.5,
            1.2,
            1.2,
            LogPowerFactor::new(40.0, vec![0.7], 1.0).unwrap(),
            LogPowerFactor::new(40.0, vec![-0.3], 1.0).unwrap(),
        )
        .unwrap();
        let without = spec(2.0, 2.0, (0.0, 0.0), (-0.5, -0.5), (1.2, 1.2));
        let ra = classify_regime(&with_l);
        let rb = classify_regime(&without);
        assert_eq!(ra.regime, rb.regime);
        assert!((ra.gamma_u.unwrap() - rb.gamma_u.unwrap()).abs() < 1e-15);
        assert!((ra.gamma_v.unwrap() - rb.gamma_v.unwrap()).abs() < 1e-15);
    }
}
