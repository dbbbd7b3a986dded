//! The two constructive algorithms for the coupled systems: conical shells
//! assembled from sub/supersolution profiles, the compensated two-component
//! fixed-point operator with Picard iteration, the cooperative
//! expanding-domain monotone scheme, and a multi-start uniqueness probe.

use crate::error::SolverError;
use crate::mesh::{r_laplacian_residual, GradedMesh1D, GridFunction};
use crate::regimes::{
    classify_absorption, classify_competition, classify_regime, AbsorptionSpec, AuxProblem,
    BoundProfile, CompetitionSpec, RegimeReport, SystemSpec,
};
use crate::scalar::Real;
use crate::scalar_solver::{
    solve_scalar, solve_scalar_window, ScalarProblem, SideCondition, SolveOptions, SolveWindow,
};
use std::sync::Arc;

/// One of the three coupled system families.
#[derive(Debug, Clone)]
pub enum SystemFamily<T> {
    /// `-Δ_p u = K1(x) u^{a1} v^{b1}` and symmetric in v.
    PowerCoupling(SystemSpec<T>),
    /// `-Δ_p u = u^{a1} v^{b1} − u^{α1} v^{β1}`.
    Absorption(AbsorptionSpec<T>),
    /// `-Δ_p u = λ1 u^{α1} − u^{β1} − μ1 u^{a1} v^{b1}`.
    Competition(CompetitionSpec<T>),
}

impl<T: Real> SystemFamily<T> {
    pub fn exponents(&self) -> (T, T) {
        match self {
            SystemFamily::PowerCoupling(s) => (s.p, s.q),
            SystemFamily::Absorption(s) => (s.p, s.q),
            SystemFamily::Competition(s) => (s.p, s.q),
        }
    }

    pub fn classify(&self) -> RegimeReport<T> {
        match self {
            SystemFamily::PowerCoupling(s) => classify_regime(s),
            SystemFamily::Absorption(s) => classify_absorption(s),
            SystemFamily::Competition(s) => classify_competition(s),
        }
    }

    /// Strict cooperativity `∂f1/∂v > 0`, `∂f2/∂u > 0` (the monotone-scheme
    /// precondition); only the power-coupled family with positive couplings
    /// qualifies.
    pub fn is_strictly_cooperative(&self) -> bool {
        matches!(self, SystemFamily::PowerCoupling(s) if s.is_cooperative())
    }

    /// Both couplings of one sign (the uniqueness precondition).
    pub fn has_signed_coupling(&self) -> bool {
        matches!(self, SystemFamily::PowerCoupling(s) if s.b1 * s.b2 > T::zero())
    }

    fn f1(&self, k1: T, u: T, v: T) -> T {
        match self {
            SystemFamily::PowerCoupling(s) => k1 * u.powf(s.a1) * v.powf(s.b1),
            SystemFamily::Absorption(s) => {
                u.powf(s.a1) * v.powf(s.b1) - u.powf(s.alpha1) * v.powf(s.beta1)
            }
            SystemFamily::Competition(s) => {
                s.lambda1 * u.powf(s.alpha1)
                    - u.powf(s.beta1)
                    - s.mu1 * u.powf(s.a1) * v.powf(s.b1)
            }
        }
    }

    fn f2(&self, k2: T, u: T, v: T) -> T {
        match self {
            SystemFamily::PowerCoupling(s) => k2 * v.powf(s.a2) * u.powf(s.b2),
            SystemFamily::Absorption(s) => {
                v.powf(s.a2) * u.powf(s.b2) - v.powf(s.alpha2) * u.powf(s.beta2)
            }
            SystemFamily::Competition(s) => {
                s.lambda2 * v.powf(s.alpha2)
                    - v.powf(s.beta2)
                    - s.mu2 * v.powf(s.a2) * u.powf(s.b2)
            }
        }
    }

    fn df1_du(&self, k1: T, u: T, v: T) -> T {
        match self {
            SystemFamily::PowerCoupling(s) => {
                k1 * s.a1 * u.powf(s.a1 - T::one()) * v.powf(s.b1)
            }
            SystemFamily::Absorption(s) => {
                s.a1 * u.powf(s.a1 - T::one()) * v.powf(s.b1)
                    - s.alpha1 * u.powf(s.alpha1 - T::one()) * v.powf(s.beta1)
            }
            SystemFamily::Competition(s) => {
                s.lambda1 * s.alpha1 * u.powf(s.alpha1 - T::one())
                    - s.beta1 * u.powf(s.beta1 - T::one())
                    - s.mu1 * s.a1 * u.powf(s.a1 - T::one()) * v.powf(s.b1)
            }
        }
    }

    fn df2_dv(&self, k2: T, u: T, v: T) -> T {
        match self {
            SystemFamily::PowerCoupling(s) => {
                k2 * s.a2 * v.powf(s.a2 - T::one()) * u.powf(s.b2)
            }
            SystemFamily::Absorption(s) => {
                s.a2 * v.powf(s.a2 - T::one()) * u.powf(s.b2)
                    - s.alpha2 * v.powf(s.alpha2 - T::one()) * u.powf(s.beta2)
            }
            SystemFamily::Competition(s) => {
                s.lambda2 * s.alpha2 * v.powf(s.alpha2 - T::one())
                    - s.beta2 * v.powf(s.beta2 - T::one())
                    - s.mu2 * s.a2 * v.powf(s.a2 - T::one()) * u.powf(s.b2)
            }
        }
    }

    /// Sign of the monotonicity of `f1` in `v` across the shell (the
    /// competition family couples through a subtracted term).
    fn f1_increasing_in_v(&self) -> bool {
        match self {
            SystemFamily::PowerCoupling(s) => s.b1 > T::zero(),
            SystemFamily::Absorption(s) => s.b1 > T::zero(),
            SystemFamily::Competition(s) => s.b1 < T::zero(),
        }
    }

    fn f2_increasing_in_u(&self) -> bool {
        match self {
            SystemFamily::PowerCoupling(s) => s.b2 > T::zero(),
            SystemFamily::Absorption(s) => s.b2 > T::zero(),
            SystemFamily::Competition(s) => s.b2 < T::zero(),
        }
    }

    /// Coefficient grids of `f1`, `f2`: `d^{-k_i} L_i(d)` for the
    /// power-coupled family, 1 otherwise. Boundary entries are zero.
    fn coefficient_grids(
        &self,
        mesh: &Arc<GradedMesh1D<T>>,
    ) -> (GridFunction<T>, GridFunction<T>) {
        match self {
            SystemFamily::PowerCoupling(s) => {
                let k1 = s.k1;
                let k2 = s.k2;
                let l1 = s.l1.clone();
                let l2 = s.l2.clone();
                (
                    GridFunction::from_distance_fn(Arc::clone(mesh), |d| {
                        d.powf(-k1) * l1.eval(d).unwrap_or(T::one())
                    }),
                    GridFunction::from_distance_fn(Arc::clone(mesh), |d| {
                        d.powf(-k2) * l2.eval(d).unwrap_or(T::one())
                    }),
                )
            }
            _ => (
                GridFunction::from_distance_fn(Arc::clone(mesh), |_| T::one()),
                GridFunction::from_distance_fn(Arc::clone(mesh), |_| T::one()),
            ),
        }
    }
}

/// Discrete sub/supersolution quadruple with its scaling parameter.
#[derive(Debug, Clone)]
pub struct ConicalShell<T> {
    pub u_low: GridFunction<T>,
    pub u_up: GridFunction<T>,
    pub v_low: GridFunction<T>,
    pub v_up: GridFunction<T>,
    pub m: T,
    pub sigma: T,
}

impl<T: Real> ConicalShell<T> {
    /// Largest nodewise violation of `low − tol ≤ g ≤ up + tol` for the
    /// component pair.
    pub fn violation(&self, u: &GridFunction<T>, v: &GridFunction<T>) -> T {
        let mut worst = T::zero();
        for i in 0..u.len() {
            worst = worst
                .max(self.u_low.get(i) - u.get(i))
                .max(u.get(i) - self.u_up.get(i))
                .max(self.v_low.get(i) - v.get(i))
                .max(v.get(i) - self.v_up.get(i));
        }
        worst
    }
}

/// Picard / monotone-scheme controls on top of the scalar solver options.
#[derive(Debug, Clone)]
pub struct SystemOptions<T> {
    pub scalar: SolveOptions<T>,
    /// Outer iteration cap of the fixed-point loop.
    pub max_outer: usize,
    /// Relative sup-norm change declaring the fixed point converged.
    pub tol_change: T,
    /// Target scaled PDE residual of both equations.
    pub tol_residual: T,
    /// Use the just-updated u in the second equation of each monotone stage.
    pub gauss_seidel: bool,
}

impl<T: Real> Default for SystemOptions<T> {
    fn default() -> Self {
        Self {
            scalar: SolveOptions::default(),
            max_outer: 500,
            tol_change: T::lit(1e-9),
            tol_residual: T::lit(1e-7),
            gauss_seidel: false,
        }
    }
}

/// Starting corner of the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartPoint {
    LowerCorner,
    UpperCorner,
    /// Nodewise geometric mean of the shell bounds.
    Midpoint,
}

/// Per-iteration record of a system run.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord<T> {
    pub res_u: T,
    pub res_v: T,
    pub change: T,
    pub shell_violation: T,
}

/// Outcome bundle of a system solve.
#[derive(Debug, Clone)]
pub struct SystemRunReport<T> {
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterationRecord<T>>,
    pub m: T,
    pub sigma: T,
    pub kappa_u: T,
    pub kappa_v: T,
    pub final_res_u: T,
    pub final_res_v: T,
    pub max_shell_violation: T,
    /// Most negative nodewise increment seen by the monotone scheme.
    pub monotone_min_increment: Option<T>,
    /// Boundary-exponent fits, filled by the caller after analysis.
    pub fitted_gamma_u: Option<T>,
    pub fitted_gamma_v: Option<T>,
}

#[derive(Debug, Clone)]
pub struct SystemSolution<T> {
    pub u: GridFunction<T>,
    pub v: GridFunction<T>,
    pub report: SystemRunReport<T>,
}

fn aux_coefficient<T: Real>(
    mesh: &Arc<GradedMesh1D<T>>,
    aux: &AuxProblem<T>,
    family: &SystemFamily<T>,
) -> GridFunction<T> {
    let (l1, l2) = match family {
        SystemFamily::PowerCoupling(s) => (Some(s.l1.clone()), Some(s.l2.clone())),
        _ => (None, None),
    };
    let k = aux.k_sing;
    let (p1, p2) = (aux.l1_pow, aux.l2_pow);
    GridFunction::from_distance_fn(Arc::clone(mesh), move |d| {
        let mut value = d.powf(-k);
        if let Some(l) = &l1 {
            if p1 != T::zero() {
                value = value * l.eval(d).unwrap_or(T::one()).powf(p1);
            }
        }
        if let Some(l) = &l2 {
            if p2 != T::zero() {
                value = value * l.eval(d).unwrap_or(T::one()).powf(p2);
            }
        }
        value
    })
}

/// Boundary exponent of the aux solution per the scalar four-case
/// classification, used to seed the Newton iteration at the right profile.
pub fn aux_profile_exponent<T: Real>(r: T, k: T, delta: T) -> T {
    if delta > k - T::one() {
        T::one()
    } else {
        (r - k) / (r - T::one() - delta)
    }
}

fn solve_aux<T: Real>(
    mesh: &Arc<GradedMesh1D<T>>,
    aux: &AuxProblem<T>,
    family: &SystemFamily<T>,
    opts: &SolveOptions<T>,
) -> Result<GridFunction<T>, SolverError> {
    let coefficient = aux_coefficient(mesh, aux, family);
    let prob = ScalarProblem::power(aux.r, coefficient, aux.delta);
    let gamma = aux_profile_exponent(aux.r, aux.k_sing, aux.delta);
    let warm = GridFunction::from_distance_fn(Arc::clone(mesh), |d| d.powf(gamma));
    let (psi, _) = solve_scalar(&prob, mesh, opts, Some(&warm))?;
    Ok(psi)
}

fn profile<T: Real>(
    mesh: &Arc<GradedMesh1D<T>>,
    bound: &BoundProfile<T>,
    aux_solution: Option<&GridFunction<T>>,
) -> Result<GridFunction<T>, SolverError> {
    match bound {
        BoundProfile::AuxSolution => aux_solution.cloned().ok_or_else(|| {
            SolverError::InvalidInput("recipe references a missing auxiliary solution".into())
        }),
        BoundProfile::DistancePower { exponent } => {
            let e = *exponent;
            Ok(GridFunction::from_distance_fn(Arc::clone(mesh), |d| {
                d.powf(e)
            }))
        }
    }
}

struct ShellProfiles<T> {
    lower_u: GridFunction<T>,
    upper_u: GridFunction<T>,
    lower_v: GridFunction<T>,
    upper_v: GridFunction<T>,
}

fn shell_profiles<T: Real>(
    family: &SystemFamily<T>,
    regime: &RegimeReport<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    opts: &SolveOptions<T>,
) -> Result<ShellProfiles<T>, SolverError> {
    let recipe_u = regime.recipe_u.as_ref().ok_or_else(|| {
        SolverError::InvalidInput("regime report carries no u-component recipe".into())
    })?;
    let recipe_v = regime.recipe_v.as_ref().ok_or_else(|| {
        SolverError::InvalidInput("regime report carries no v-component recipe".into())
    })?;
    let psi_u = match &recipe_u.aux {
        Some(aux) => Some(solve_aux(mesh, aux, family, opts)?),
        None => None,
    };
    let psi_v = match &recipe_v.aux {
        Some(aux) => Some(solve_aux(mesh, aux, family, opts)?),
        None => None,
    };
    Ok(ShellProfiles {
        lower_u: profile(mesh, &recipe_u.lower, psi_u.as_ref())?,
        upper_u: profile(mesh, &recipe_u.upper, psi_u.as_ref())?,
        lower_v: profile(mesh, &recipe_v.lower, psi_v.as_ref())?,
        upper_v: profile(mesh, &recipe_v.upper, psi_v.as_ref())?,
    })
}

fn assemble_shell<T: Real>(profiles: &ShellProfiles<T>, m: T, sigma: T) -> ConicalShell<T> {
    ConicalShell {
        u_low: profiles.lower_u.scale(m),
        u_up: profiles.upper_u.scale(m.recip()),
        v_low: profiles.lower_v.scale(m.powf(sigma)),
        v_up: profiles.upper_v.scale(m.powf(-sigma)),
        m,
        sigma,
    }
}

/// Signed scaled margins of the four sub/supersolution inequalities,
/// each evaluated at the adversarial corner of the opposite interval.
/// Order: sub-u, super-u, sub-v, super-v.
pub fn verify_subsuper<T: Real>(
    family: &SystemFamily<T>,
    shell: &ConicalShell<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    opts: &SolveOptions<T>,
) -> [T; 4] {
    let (p, q) = family.exponents();
    let (k1, k2) = family.coefficient_grids(mesh);
    let zero = GridFunction::zeros(Arc::clone(mesh));
    let lap = |g: &GridFunction<T>, r: T| r_laplacian_residual(g, r, &zero, opts.eps_grad);
    let lap_ul = lap(&shell.u_low, p);
    let lap_uu = lap(&shell.u_up, p);
    let lap_vl = lap(&shell.v_low, q);
    let lap_vu = lap(&shell.v_up, q);

    let inc_v = family.f1_increasing_in_v();
    let inc_u = family.f2_increasing_in_u();
    let mut margins = [T::infinity(); 4];
    for i in mesh.interior_indices() {
        // sub-u: -Δ_p u_low ≤ f1(u_low, v*) with f1 minimized over v
        let v_star = if inc_v { shell.v_low.get(i) } else { shell.v_up.get(i) };
        let f = family.f1(k1.get(i), shell.u_low.get(i), v_star);
        margins[0] = margins[0].min((f - lap_ul.get(i)) / (T::one() + f.abs()));
        // super-u: -Δ_p u_up ≥ f1(u_up, v*) with f1 maximized over v
        let v_star = if inc_v { shell.v_up.get(i) } else { shell.v_low.get(i) };
        let f = family.f1(k1.get(i), shell.u_up.get(i), v_star);
        margins[1] = margins[1].min((lap_uu.get(i) - f) / (T::one() + f.abs()));
        // sub-v
        let u_star = if inc_u { shell.u_low.get(i) } else { shell.u_up.get(i) };
        let f = family.f2(k2.get(i), u_star, shell.v_low.get(i));
        margins[2] = margins[2].min((f - lap_vl.get(i)) / (T::one() + f.abs()));
        // super-v
        let u_star = if inc_u { shell.u_up.get(i) } else { shell.u_low.get(i) };
        let f = family.f2(k2.get(i), u_star, shell.v_up.get(i));
        margins[3] = margins[3].min((lap_vu.get(i) - f) / (T::one() + f.abs()));
    }
    margins
}

fn shell_ordered<T: Real>(shell: &ConicalShell<T>, mesh: &GradedMesh1D<T>) -> bool {
    mesh.interior_indices().all(|i| {
        shell.u_low.get(i) > T::zero()
            && shell.v_low.get(i) > T::zero()
            && shell.u_low.get(i) <= shell.u_up.get(i)
            && shell.v_low.get(i) <= shell.v_up.get(i)
    })
}

/// Builds a verified conical shell: solves the regime's auxiliary problems,
/// assembles `(m·ψ1, m^{-1}·ψ1, m^σ·ψ2, m^{-σ}·ψ2)` (distance-power
/// profiles where the recipe says so) and halves `m` until all four
/// sub/supersolution margins are nonnegative, at most 40 halvings.
pub fn build_shell<T: Real>(
    family: &SystemFamily<T>,
    regime: &RegimeReport<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    m_init: T,
    opts: &SystemOptions<T>,
) -> Result<ConicalShell<T>, SolverError> {
    if !regime.feasible {
        return Err(SolverError::InvalidInput(
            "cannot build a shell for an infeasible regime".into(),
        ));
    }
    if !(m_init > T::zero() && m_init < T::one()) {
        return Err(SolverError::InvalidInput(format!(
            "m_init must lie in (0, 1), got {m_init}"
        )));
    }
    let sigma = regime.sigma.map(|s| s.value).unwrap_or(T::one());
    let profiles = shell_profiles(family, regime, mesh, &opts.scalar)?;
    let mut m = m_init;
    let mut worst = T::neg_infinity();
    for _ in 0..=40 {
        let shell = assemble_shell(&profiles, m, sigma);
        if shell_ordered(&shell, mesh) {
            let margins = verify_subsuper(family, &shell, mesh, &opts.scalar);
            worst = margins.iter().fold(T::infinity(), |a, &x| a.min(x));
            if worst >= T::zero() {
                return Ok(shell);
            }
        }
        m = m * T::half();
    }
    Err(SolverError::ShellConstructionFailure {
        m: m.to_f64().unwrap_or(f64::NAN),
        worst_margin: worst.to_f64().unwrap_or(f64::NAN),
    })
}

/// The compensated operator `T = (T1, T2)` specialized to a shell: each
/// application solves the two absorbed scalar problems with the cut-off at
/// the upper shell bound.
pub struct TOperator<'a, T> {
    family: &'a SystemFamily<T>,
    mesh: &'a Arc<GradedMesh1D<T>>,
    shell: &'a ConicalShell<T>,
    opts: &'a SystemOptions<T>,
    k1: GridFunction<T>,
    k2: GridFunction<T>,
    /// Corner-sup compensations, used by the monotone scheme stages.
    absorb_u: Option<GridFunction<T>>,
    absorb_v: Option<GridFunction<T>>,
    /// Shell-wide certified compensation constants.
    pub kappa_u: T,
    pub kappa_v: T,
    e_u: T,
    e_v: T,
    p: T,
    q: T,
}

impl<'a, T: Real> TOperator<'a, T> {
    pub fn new(
        family: &'a SystemFamily<T>,
        regime: &'a RegimeReport<T>,
        shell: &'a ConicalShell<T>,
        mesh: &'a Arc<GradedMesh1D<T>>,
        opts: &'a SystemOptions<T>,
    ) -> Result<Self, SolverError> {
        let (p, q) = family.exponents();
        let (k1, k2) = family.coefficient_grids(mesh);
        let e_u = regime
            .recipe_u
            .as_ref()
            .map(|r| r.absorb_exponent)
            .unwrap_or(T::zero());
        let e_v = regime
            .recipe_v
            .as_ref()
            .map(|r| r.absorb_exponent)
            .unwrap_or(T::zero());

        // κ = 1.1 × the largest |∂f/∂own| · d^{-e} over interior nodes and
        // shell corners: the smallest compensation that makes the absorbed
        // right-hand side monotone on the whole shell.
        let mut sup_u = T::zero();
        let mut sup_v = T::zero();
        for i in mesh.interior_indices() {
            let d = mesh.distance(i);
            for (uc, vc) in [
                (shell.u_low.get(i), shell.v_low.get(i)),
                (shell.u_low.get(i), shell.v_up.get(i)),
                (shell.u_up.get(i), shell.v_low.get(i)),
                (shell.u_up.get(i), shell.v_up.get(i)),
            ] {
                sup_u = sup_u.max(family.df1_du(k1.get(i), uc, vc).abs() * d.powf(-e_u));
                sup_v = sup_v.max(family.df2_dv(k2.get(i), uc, vc).abs() * d.powf(-e_v));
            }
        }
        let kappa_u = T::lit(1.1) * sup_u;
        let kappa_v = T::lit(1.1) * sup_v;
        let absorb_u = (kappa_u > T::zero()).then(|| {
            GridFunction::from_distance_fn(Arc::clone(mesh), |d| kappa_u * d.powf(e_u))
        });
        let absorb_v = (kappa_v > T::zero()).then(|| {
            GridFunction::from_distance_fn(Arc::clone(mesh), |d| kappa_v * d.powf(e_v))
        });
        Ok(Self {
            family,
            mesh,
            shell,
            opts,
            k1,
            k2,
            absorb_u,
            absorb_v,
            kappa_u,
            kappa_v,
            e_u,
            e_v,
            p,
            q,
        })
    }

    /// Absorption grid recomputed from the current iterate: the corner-sup
    /// constant certifies shell-wide monotonicity but over-damps the Picard
    /// map when the shell is wide (small m), so each application uses the
    /// smallest compensation that dominates `∂f/∂own` along the iterate
    /// itself. The fixed-point set is unchanged for any compensation.
    fn local_absorption(&self, first: bool, u: &[T], v: &[T]) -> Option<GridFunction<T>> {
        let e = if first { self.e_u } else { self.e_v };
        let mut sup = T::zero();
        for i in self.mesh.interior_indices() {
            let d = self.mesh.distance(i);
            let df = if first {
                self.family.df1_du(self.k1.get(i), u[i], v[i])
            } else {
                self.family.df2_dv(self.k2.get(i), u[i], v[i])
            };
            sup = sup.max(df.abs() * d.powf(-e));
        }
        let kappa = T::lit(1.1) * sup;
        (kappa > T::zero()).then(|| {
            GridFunction::from_distance_fn(Arc::clone(self.mesh), |d| kappa * d.powf(e))
        })
    }

    fn clamp_to_shell(&self, u: &GridFunction<T>, v: &GridFunction<T>) -> Result<(Vec<T>, Vec<T>), SolverError> {
        let violation = self.shell.violation(u, v);
        if violation > T::lit(1e-9) {
            return Err(SolverError::InvalidInput(format!(
                "input pair lies outside the shell by {violation}"
            )));
        }
        let mut uc = u.values().to_vec();
        let mut vc = v.values().to_vec();
        for i in 0..uc.len() {
            uc[i] = uc[i]
                .max(self.shell.u_low.get(i))
                .min(self.shell.u_up.get(i));
            vc[i] = vc[i]
                .max(self.shell.v_low.get(i))
                .min(self.shell.v_up.get(i));
        }
        Ok((uc, vc))
    }

    /// One application `(u, v) ↦ (T1(u,v), T2(u,v))`.
    pub fn apply(
        &self,
        u: &GridFunction<T>,
        v: &GridFunction<T>,
    ) -> Result<(GridFunction<T>, GridFunction<T>), SolverError> {
        let (uc, vc) = self.clamp_to_shell(u, v)?;
        let absorb_u = self.local_absorption(true, &uc, &vc);
        let absorb_v = self.local_absorption(false, &uc, &vc);
        let u_next = self.solve_component(true, &uc, &vc, u, &absorb_u)?;
        let v_next = self.solve_component(false, &uc, &vc, v, &absorb_v)?;
        let violation = self.shell.violation(&u_next, &v_next);
        if violation > T::lit(1e-6) {
            return Err(SolverError::ShellEscape {
                violation: violation.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok((u_next, v_next))
    }

    fn solve_component(
        &self,
        first: bool,
        u: &[T],
        v: &[T],
        warm: &GridFunction<T>,
        absorb: &Option<GridFunction<T>>,
    ) -> Result<GridFunction<T>, SolverError> {
        let n = self.mesh.len();
        let mut rhs = vec![T::zero(); n];
        for i in self.mesh.interior_indices() {
            let f = if first {
                self.family.f1(self.k1.get(i), u[i], v[i])
            } else {
                self.family.f2(self.k2.get(i), u[i], v[i])
            };
            let own = if first { u[i] } else { v[i] };
            let comp = absorb.as_ref().map_or(T::zero(), |a| a.get(i) * own);
            rhs[i] = f + comp;
        }
        let prob = ScalarProblem {
            r: if first { self.p } else { self.q },
            coeff_c: absorb.clone(),
            rhs_fixed: Some(GridFunction::new(Arc::clone(self.mesh), rhs)),
            rhs_power: None,
            cutoff_upper: absorb.as_ref().map(|_| {
                if first {
                    self.shell.u_up.clone()
                } else {
                    self.shell.v_up.clone()
                }
            }),
        };
        let (w, _) = solve_scalar(&prob, self.mesh, &self.opts.scalar, Some(warm))?;
        Ok(w)
    }

    /// Scaled PDE residuals of the pair under the raw system.
    pub fn system_residuals(&self, u: &GridFunction<T>, v: &GridFunction<T>) -> (T, T) {
        let mut f1 = vec![T::zero(); self.mesh.len()];
        let mut f2 = vec![T::zero(); self.mesh.len()];
        for i in self.mesh.interior_indices() {
            let ui = u.get(i).max(T::lit(1e-300));
            let vi = v.get(i).max(T::lit(1e-300));
            f1[i] = self.family.f1(self.k1.get(i), ui, vi);
            f2[i] = self.family.f2(self.k2.get(i), ui, vi);
        }
        let f1 = GridFunction::new(Arc::clone(self.mesh), f1);
        let f2 = GridFunction::new(Arc::clone(self.mesh), f2);
        let res_u = r_laplacian_residual(u, self.p, &f1, self.opts.scalar.eps_grad);
        let res_v = r_laplacian_residual(v, self.q, &f2, self.opts.scalar.eps_grad);
        let mut worst_u = T::zero();
        let mut worst_v = T::zero();
        for i in self.mesh.interior_indices() {
            worst_u = worst_u.max(res_u.get(i).abs() / (T::one() + f1.get(i).abs()));
            worst_v = worst_v.max(res_v.get(i).abs() / (T::one() + f2.get(i).abs()));
        }
        (worst_u, worst_v)
    }
}

fn start_pair<T: Real>(shell: &ConicalShell<T>, start: StartPoint) -> (GridFunction<T>, GridFunction<T>) {
    match start {
        StartPoint::LowerCorner => (shell.u_low.clone(), shell.v_low.clone()),
        StartPoint::UpperCorner => (shell.u_up.clone(), shell.v_up.clone()),
        StartPoint::Midpoint => {
            let mesh = shell.u_low.mesh();
            let gu = GridFunction::new(
                Arc::clone(mesh),
                (0..shell.u_low.len())
                    .map(|i| (shell.u_low.get(i) * shell.u_up.get(i)).sqrt())
                    .collect(),
            );
            let gv = GridFunction::new(
                Arc::clone(mesh),
                (0..shell.v_low.len())
                    .map(|i| (shell.v_low.get(i) * shell.v_up.get(i)).sqrt())
                    .collect(),
            );
            (gu, gv)
        }
    }
}

/// Picard iteration of the compensated operator until the relative
/// sup-norm change of both components drops below `tol_change`; a run that
/// exhausts `max_outer` comes back with `converged = false` and its full
/// history rather than an error.
pub fn fixed_point_iterate<T: Real>(
    family: &SystemFamily<T>,
    regime: &RegimeReport<T>,
    shell: &ConicalShell<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    opts: &SystemOptions<T>,
    start: StartPoint,
) -> Result<SystemSolution<T>, SolverError> {
    let operator = TOperator::new(family, regime, shell, mesh, opts)?;
    let (mut u, mut v) = start_pair(shell, start);
    let mut report = SystemRunReport {
        iterations: 0,
        converged: false,
        history: Vec::new(),
        m: shell.m,
        sigma: shell.sigma,
        kappa_u: operator.kappa_u,
        kappa_v: operator.kappa_v,
        final_res_u: T::infinity(),
        final_res_v: T::infinity(),
        max_shell_violation: T::zero(),
        monotone_min_increment: None,
        fitted_gamma_u: None,
        fitted_gamma_v: None,
    };
    if opts.max_outer == 0 {
        let (ru, rv) = operator.system_residuals(&u, &v);
        report.final_res_u = ru;
        report.final_res_v = rv;
        return Ok(SystemSolution { u, v, report });
    }
    for _ in 0..opts.max_outer {
        let (u_next, v_next) = operator.apply(&u, &v)?;
        let change_u = u_next.sup_distance(&u) / (T::one() + u_next.sup_norm());
        let change_v = v_next.sup_distance(&v) / (T::one() + v_next.sup_norm());
        let change = change_u.max(change_v);
        let violation = shell.violation(&u_next, &v_next);
        let (ru, rv) = operator.system_residuals(&u_next, &v_next);
        report.history.push(IterationRecord {
            res_u: ru,
            res_v: rv,
            change,
            shell_violation: violation,
        });
        report.iterations += 1;
        report.max_shell_violation = report.max_shell_violation.max(violation);
        u = u_next;
        v = v_next;
        if change <= opts.tol_change {
            report.converged = true;
            break;
        }
    }
    let (ru, rv) = operator.system_residuals(&u, &v);
    report.final_res_u = ru;
    report.final_res_v = rv;
    Ok(SystemSolution { u, v, report })
}

/// Expanding-domain monotone scheme for strictly cooperative systems:
/// stage n solves the two decoupled absorbed problems on the subdomain
/// `{d ≥ 1/(n+2)}` with the subsolution as internal Dirichlet data and the
/// previous stage's extension in the right-hand sides. Iterates must be
/// nondecreasing nodewise and stay within the shell.
pub fn monotone_scheme<T: Real>(
    family: &SystemFamily<T>,
    regime: &RegimeReport<T>,
    shell: &ConicalShell<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    opts: &SystemOptions<T>,
    n_stages: usize,
) -> Result<SystemSolution<T>, SolverError> {
    if !family.is_strictly_cooperative() {
        return Err(SolverError::InvalidInput(
            "monotone scheme requires a strictly cooperative system (b1, b2 > 0)".into(),
        ));
    }
    if n_stages == 0 {
        return Err(SolverError::InvalidInput("need at least one stage".into()));
    }
    let operator = TOperator::new(family, regime, shell, mesh, opts)?;
    let (p, q) = family.exponents();
    let mut u = shell.u_low.clone();
    let mut v = shell.v_low.clone();
    let mut report = SystemRunReport {
        iterations: 0,
        converged: true,
        history: Vec::new(),
        m: shell.m,
        sigma: shell.sigma,
        kappa_u: operator.kappa_u,
        kappa_v: operator.kappa_v,
        final_res_u: T::infinity(),
        final_res_v: T::infinity(),
        max_shell_violation: T::zero(),
        monotone_min_increment: Some(T::infinity()),
        fitted_gamma_u: None,
        fitted_gamma_v: None,
    };

    for stage in 1..=n_stages {
        let cutoff = (T::from_usize(stage + 2).unwrap()).recip();
        let window = subdomain_window(mesh, cutoff, &shell.u_low)?;
        let window_v = subdomain_window(mesh, cutoff, &shell.v_low)?;
        let u_next = monotone_stage(
            &operator, true, p, &u, &v, &window, &shell.u_low, mesh, opts,
        )?;
        let v_source = if opts.gauss_seidel { &u_next } else { &u };
        let v_next = monotone_stage(
            &operator, false, q, v_source, &v, &window_v, &shell.v_low, mesh, opts,
        )?;

        let mut min_increment = T::infinity();
        for i in 0..mesh.len() {
            min_increment = min_increment
                .min(u_next.get(i) - u.get(i))
                .min(v_next.get(i) - v.get(i));
        }
        if min_increment < -T::lit(1e-10) {
            let node = (0..mesh.len())
                .find(|&i| {
                    u_next.get(i) - u.get(i) < -T::lit(1e-10)
                        || v_next.get(i) - v.get(i) < -T::lit(1e-10)
                })
                .unwrap_or(0);
            return Err(SolverError::MonotonicityViolation {
                node,
                decrease: (-min_increment).to_f64().unwrap_or(f64::NAN),
            });
        }
        let violation = shell.violation(&u_next, &v_next);
        report.max_shell_violation = report.max_shell_violation.max(violation);
        report.monotone_min_increment = report
            .monotone_min_increment
            .map(|m| m.min(min_increment));
        let change = u_next.sup_distance(&u).max(v_next.sup_distance(&v));
        u = u_next;
        v = v_next;
        let (ru, rv) = operator.system_residuals(&u, &v);
        report.history.push(IterationRecord {
            res_u: ru,
            res_v: rv,
            change,
            shell_violation: violation,
        });
        report.iterations += 1;
    }
    let (ru, rv) = operator.system_residuals(&u, &v);
    report.final_res_u = ru;
    report.final_res_v = rv;
    Ok(SystemSolution { u, v, report })
}

/// Contiguous index window of the subdomain `{d ≥ cutoff}` with the
/// subsolution as Dirichlet data on its internal boundary.
fn subdomain_window<T: Real>(
    mesh: &Arc<GradedMesh1D<T>>,
    cutoff: T,
    boundary_data: &GridFunction<T>,
) -> Result<SolveWindow<T>, SolverError> {
    let n = mesh.len();
    let mut lo = None;
    let mut hi = None;
    for i in 0..n {
        if mesh.distance(i) >= cutoff {
            if lo.is_none() {
                lo = Some(i);
            }
            hi = Some(i);
        }
    }
    let (lo, hi) = match (lo, hi) {
        (Some(a), Some(b)) if b > a + 1 => (a, b),
        _ => {
            return Err(SolverError::InvalidInput(format!(
                "subdomain cutoff {cutoff} leaves no interior nodes"
            )))
        }
    };
    let bc_lo = if lo == 0 && !mesh.is_boundary(0) {
        SideCondition::Mirror
    } else {
        SideCondition::Dirichlet(boundary_data.get(lo))
    };
    Ok(SolveWindow {
        lo,
        hi,
        bc_lo,
        bc_hi: SideCondition::Dirichlet(boundary_data.get(hi)),
    })
}

#[allow(clippy::too_many_arguments)]
fn monotone_stage<T: Real>(
    operator: &TOperator<'_, T>,
    first: bool,
    r: T,
    u_prev: &GridFunction<T>,
    v_prev: &GridFunction<T>,
    window: &SolveWindow<T>,
    extension: &GridFunction<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    opts: &SystemOptions<T>,
) -> Result<GridFunction<T>, SolverError> {
    let n = mesh.len();
    let mut rhs = vec![T::zero(); n];
    let absorb = if first {
        &operator.absorb_u
    } else {
        &operator.absorb_v
    };
    for i in mesh.interior_indices() {
        let f = if first {
            operator
                .family
                .f1(operator.k1.get(i), u_prev.get(i), v_prev.get(i))
        } else {
            operator
                .family
                .f2(operator.k2.get(i), u_prev.get(i), v_prev.get(i))
        };
        let own = if first { u_prev.get(i) } else { v_prev.get(i) };
        rhs[i] = f + absorb.as_ref().map_or(T::zero(), |a| a.get(i) * own);
    }
    let prob = ScalarProblem {
        r,
        coeff_c: absorb.clone(),
        rhs_fixed: Some(GridFunction::new(Arc::clone(mesh), rhs)),
        rhs_power: None,
        cutoff_upper: None,
    };
    let warm = if first { u_prev } else { v_prev };
    let (solved, _) = solve_scalar_window(&prob, mesh, *window, &opts.scalar, Some(warm))?;
    // extend by the subsolution outside the stage subdomain
    let mut values = extension.values().to_vec();
    for i in window.lo..=window.hi {
        values[i] = solved.get(i);
    }
    // monotonicity can be blurred by solver tolerance at the seam nodes
    for (i, value) in values.iter_mut().enumerate() {
        let prev = if first { u_prev.get(i) } else { v_prev.get(i) };
        if *value < prev && *value > prev - T::lit(1e-12) {
            *value = prev;
        }
    }
    Ok(GridFunction::new(Arc::clone(mesh), values))
}

/// Runs the fixed-point iteration from the three canonical starts and
/// returns the largest pairwise sup-distance among the limits.
pub fn uniqueness_probe<T: Real>(
    family: &SystemFamily<T>,
    regime: &RegimeReport<T>,
    shell: &ConicalShell<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    opts: &SystemOptions<T>,
) -> Result<T, SolverError> {
    if !family.has_signed_coupling() {
        return Err(SolverError::InvalidInput(
            "uniqueness probe requires b1·b2 > 0".into(),
        ));
    }
    let starts = [
        StartPoint::LowerCorner,
        StartPoint::UpperCorner,
        StartPoint::Midpoint,
    ];
    let mut limits = Vec::with_capacity(3);
    for start in starts {
        let solution = fixed_point_iterate(family, regime, shell, mesh, opts, start)?;
        if !solution.report.converged {
            return Err(SolverError::NonConvergence {
                iterations: solution.report.iterations,
                residual: solution
                    .report
                    .final_res_u
                    .max(solution.report.final_res_v)
                    .to_f64()
                    .unwrap_or(f64::NAN),
            });
        }
        limits.push(solution);
    }
    let mut worst = T::zero();
    for i in 0..limits.len() {
        for j in i + 1..limits.len() {
            worst = worst
                .max(limits[i].u.sup_distance(&limits[j].u))
                .max(limits[i].v.sup_distance(&limits[j].v));
        }
    }
    Ok(worst)
}

/// Output-scaling exponent of the composite map `S1 ∘ S2` under input
/// scaling by `c`, where `S2(u)` solves `-Δ_q v = K2 v^{a2} u^{b2}` and
/// `S1(v)` solves `-Δ_p u = K1 u^{a1} v^{b1}`. For the pure power family
/// the exact exponent is `b1·b2 / ((p-1-a1)(q-1-a2))`; the estimate is the
/// median of `ln(ratio)/ln(c)` over the region `d ∈ [0.1, 0.4]`.
pub fn composite_scaling_exponent<T: Real>(
    spec: &SystemSpec<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    opts: &SolveOptions<T>,
    u0: &GridFunction<T>,
    c: T,
) -> Result<T, SolverError> {
    let family = SystemFamily::PowerCoupling(spec.clone());
    let (k1, k2) = family.coefficient_grids(mesh);
    let composite = |input: &GridFunction<T>| -> Result<GridFunction<T>, SolverError> {
        let coeff_v = GridFunction::new(
            Arc::clone(mesh),
            (0..mesh.len())
                .map(|i| {
                    if mesh.is_boundary(i) {
                        T::zero()
                    } else {
                        k2.get(i) * input.get(i).powf(spec.b2)
                    }
                })
                .collect(),
        );
        let (v, _) = solve_scalar(
            &ScalarProblem::power(spec.q, coeff_v, spec.a2),
            mesh,
            opts,
            None,
        )?;
        let coeff_u = GridFunction::new(
            Arc::clone(mesh),
            (0..mesh.len())
                .map(|i| {
                    if mesh.is_boundary(i) {
                        T::zero()
                    } else {
                        k1.get(i) * v.get(i).powf(spec.b1)
                    }
                })
                .collect(),
        );
        let (u, _) = solve_scalar(
            &ScalarProblem::power(spec.p, coeff_u, spec.a1),
            mesh,
            opts,
            None,
        )?;
        Ok(u)
    };
    let base = composite(u0)?;
    let scaled = composite(&u0.scale(c))?;
    let mut ratios: Vec<T> = mesh
        .interior_indices()
        .filter(|&i| {
            let d = mesh.distance(i);
            d >= T::lit(0.1) && d <= T::lit(0.4)
        })
        .map(|i| (scaled.get(i) / base.get(i)).ln() / c.ln())
        .collect();
    if ratios.is_empty() {
        return Err(SolverError::InvalidInput(
            "no nodes in the interior region d in [0.1, 0.4]".into(),
        ));
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ratios[ratios.len() / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::karamata::LogPowerFactor;
    use crate::mesh::Geometry;
    use crate::regimes::Regime;

    fn l_one() -> LogPowerFactor<f64> {
        LogPowerFactor::one(1.0)
    }

    fn family(p: f64, q: f64, a: (f64, f64), b: (f64, f64), k: (f64, f64)) -> SystemFamily<f64> {
        SystemFamily::PowerCoupling(
            SystemSpec::new(p, q, a.0, a.1, b.0, b.1, k.0, k.1, l_one(), l_one()).unwrap(),
        )
    }

    fn mesh(n: usize, s: f64) -> Arc<GradedMesh1D<f64>> {
        GradedMesh1D::build(Geometry::Interval, n, s).unwrap()
    }

    #[test]
    fn alt2_shell_is_accepted_and_symmetric() {
        let fam = family(2.0, 2.0, (0.0, 0.0), (0.5, 0.5), (0.0, 0.0));
        let regime = fam.classify();
        assert_eq!(regime.regime, Regime::Alt2);
        let mesh = mesh(257, 2.0);
        let opts = SystemOptions::default();
        let shell = build_shell(&fam, &regime, &mesh, 0.5, &opts).unwrap();
        assert!(shell.m >= 2.0_f64.powi(-40));
        let margins = verify_subsuper(&fam, &shell, &mesh, &opts.scalar);
        for m in margins {
            assert!(m >= 0.0, "margin {m}");
        }
        // fully symmetric spec: identical component profiles
        assert!(shell.u_low.sup_distance(&shell.v_low) < 1e-12);
        assert!(shell.u_up.sup_distance(&shell.v_up) < 1e-12);
    }

    #[test]
    fn shell_ordering_in_m() {
        let fam = family(2.0, 2.0, (0.0, 0.0), (0.5, 0.5), (0.0, 0.0));
        let regime = fam.classify();
        let mesh = mesh(129, 2.0);
        let opts = SystemOptions::default();
        let shell_a = build_shell(&fam, &regime, &mesh, 0.5, &opts).unwrap();
        let shell_b = build_shell(&fam, &regime, &mesh, 0.25, &opts).unwrap();
        for i in 0..mesh.len() {
            assert!(shell_b.u_low.get(i) <= shell_a.u_low.get(i) + 1e-15);
            assert!(shell_b.u_up.get(i) >= shell_a.u_up.get(i) - 1e-15);
        }
    }

    #[test]
    fn large_m_fails_margins_for_logistic_competition() {
        // at m close to 1 the subtracted -u^β term overwhelms λu^α away
        // from the boundary, so the subsolution inequality must fail;
        // build_shell has to shrink m to recover it.
        let spec = CompetitionSpec {
            p: 2.0,
            q: 2.0,
            lambda1: 1.0,
            lambda2: 1.0,
            mu1: 1.0,
            mu2: 1.0,
            alpha1: -1.5,
            alpha2: -1.5,
            beta1: 0.0,
            beta2: 0.0,
            a1: 1.0,
            a2: 1.0,
            b1: 1.0,
            b2: 1.0,
        };
        let fam = SystemFamily::Competition(spec);
        let regime = fam.classify();
        assert_eq!(regime.regime, Regime::Alt1);
        let mesh = mesh(257, 3.0);
        let opts = SystemOptions::default();
        let profiles = shell_profiles(&fam, &regime, &mesh, &opts.scalar).unwrap();
        let sigma = regime.sigma.unwrap().value;
        let shell = assemble_shell(&profiles, 0.99, sigma);
        let margins = verify_subsuper(&fam, &shell, &mesh, &opts.scalar);
        assert!(
            margins.iter().any(|&m| m < 0.0),
            "margins unexpectedly nonnegative at m = 0.99: {margins:?}"
        );
        let accepted = build_shell(&fam, &regime, &mesh, 0.99, &opts).unwrap();
        assert!(accepted.m < 0.99);
    }

    #[test]
    fn fixed_point_symmetric_spec_gives_equal_components() {
        let fam = family(2.0, 2.0, (0.0, 0.0), (0.5, 0.5), (0.0, 0.0));
        let regime = fam.classify();
        let mesh = mesh(257, 2.0);
        let opts = SystemOptions::default();
        let shell = build_shell(&fam, &regime, &mesh, 0.5, &opts).unwrap();
        let sol = fixed_point_iterate(&fam, &regime, &shell, &mesh, &opts, StartPoint::LowerCorner)
            .unwrap();
        assert!(sol.report.converged);
        assert!(sol.u.sup_distance(&sol.v) <= 1e-8);
        assert!(sol.report.max_shell_violation <= 1e-9);
        assert!(sol.report.final_res_u <= 1e-7);
    }

    #[test]
    fn apply_t_preserves_symmetry_and_fixed_points() {
        let fam = family(2.0, 2.0, (0.0, 0.0), (0.5, 0.5), (0.0, 0.0));
        let regime = fam.classify();
        let mesh = mesh(257, 2.0);
        let opts = SystemOptions::default();
        let shell = build_shell(&fam, &regime, &mesh, 0.5, &opts).unwrap();
        let op = TOperator::new(&fam, &regime, &shell, &mesh, &opts).unwrap();
        // symmetric input gives symmetric output
        let (tu, tv) = op.apply(&shell.u_low, &shell.v_low).unwrap();
        assert!(tu.sup_distance(&tv) <= 1e-9);
        // shell invariance of the image
        assert!(shell.violation(&tu, &tv) <= 1e-9);
        // a converged solution is a fixed point
        let sol = fixed_point_iterate(&fam, &regime, &shell, &mesh, &opts, StartPoint::Midpoint)
            .unwrap();
        let (fu, fv) = op.apply(&sol.u, &sol.v).unwrap();
        assert!(fu.sup_distance(&sol.u) <= 1e-8);
        assert!(fv.sup_distance(&sol.v) <= 1e-8);
    }

    #[test]
    fn zero_outer_iterations_returns_start() {
        let fam = family(2.0, 2.0, (0.0, 0.0), (0.5, 0.5), (0.0, 0.0));
        let regime = fam.classify();
        let mesh = mesh(129, 2.0);
        let mut opts = SystemOptions::default();
        opts.max_outer = 0;
        let shell = build_shell(&fam, &regime, &mesh, 0.5, &opts).unwrap();
        let sol = fixed_point_iterate(&fam, &regime, &shell, &mesh, &opts, StartPoint::LowerCorner)
            .unwrap();
        assert!(!sol.report.converged);
        assert_eq!(sol.report.iterations, 0);
        assert!(sol.u.sup_distance(&shell.u_low) == 0.0);
    }

    #[test]
    fn cooperative_operator_preserves_order() {
        use rand::{Rng, SeedableRng};
        let fam = family(2.0, 2.0, (0.0, 0.0), (0.5, 0.5), (0.0, 0.0));
        let regime = fam.classify();
        let mesh = mesh(129, 2.0);
        let opts = SystemOptions::default();
        let shell = build_shell(&fam, &regime, &mesh, 0.5, &opts).unwrap();
        let op = TOperator::new(&fam, &regime, &shell, &mesh, &opts).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let t1: f64 = rng.gen_range(0.0..0.5);
            let t2: f64 = rng.gen_range(0.5..1.0);
            let blend = |lo: &GridFunction<f64>, up: &GridFunction<f64>, t: f64| {
                GridFunction::new(
                    Arc::clone(&mesh),
                    (0..mesh.len())
                        .map(|i| lo.get(i) + t * (up.get(i) - lo.get(i)))
                        .collect(),
                )
            };
            let (ua, va) = (
                blend(&shell.u_low, &shell.u_up, t1),
                blend(&shell.v_low, &shell.v_up, t1),
            );
            let (ub, vb) = (
                blend(&shell.u_low, &shell.u_up, t2),
                blend(&shell.v_low, &shell.v_up, t2),
            );
            let (tua, tva) = op.apply(&ua, &va).unwrap();
            let (tub, tvb) = op.apply(&ub, &vb).unwrap();
            for i in 0..mesh.len() {
                assert!(tua.get(i) <= tub.get(i) + 1e-9);
                assert!(tva.get(i) <= tvb.get(i) + 1e-9);
            }
        }
    }

    #[test]
    fn monotone_scheme_single_stage_extends_subsolution() {
        let fam = family(2.0, 2.0, (-0.5, -0.5), (0.25, 0.25), (0.0, 0.0));
        let regime = fam.classify();
        assert_eq!(regime.regime, Regime::Alt2);
        let mesh = mesh(257, 2.0);
        let opts = SystemOptions::default();
        let shell = build_shell(&fam, &regime, &mesh, 0.5, &opts).unwrap();
        let sol = monotone_scheme(&fam, &regime, &shell, &mesh, &opts, 1).unwrap();
        // outside the first subdomain the extension equals the subsolution
        for i in 0..mesh.len() {
            if mesh.distance(i) < 1.0 / 3.0 {
                assert_eq!(sol.u.get(i), shell.u_low.get(i));
            }
        }
        assert!(sol.report.monotone_min_increment.unwrap() >= -1e-10);
    }

    #[test]
    fn monotone_scheme_iterates_are_nondecreasing_and_confined() {
        let fam = family(2.0, 2.0, (-0.5, -0.5), (0.25, 0.25), (0.0, 0.0));
        let regime = fam.classify();
        let mesh = mesh(257, 2.0);
        let opts = SystemOptions::default();
        let shell = build_shell(&fam, &regime, &mesh, 0.5, &opts).unwrap();
        let sol = monotone_scheme(&fam, &regime, &shell, &mesh, &opts, 6).unwrap();
        assert!(sol.report.monotone_min_increment.unwrap() >= -1e-10);
        assert!(sol.report.max_shell_violation <= 1e-9);
    }

    #[test]
    fn monotone_scheme_rejects_competitive_systems() {
        let fam = family(2.0, 2.0, (0.0, 0.0), (-0.5, -0.5), (1.2, 1.2));
        let regime = fam.classify();
        let mesh = mesh(129, 3.0);
        let opts = SystemOptions::default();
        let shell = build_shell(&fam, &regime, &mesh, 0.5, &opts).unwrap();
        assert!(matches!(
            monotone_scheme(&fam, &regime, &shell, &mesh, &opts, 3),
            Err(SolverError::InvalidInput(_))
        ));
    }

    #[test]
    fn uniqueness_probe_identical_starts_have_zero_distance() {
        let fam = family(2.0, 2.0, (0.0, 0.0), (0.5, 0.5), (0.0, 0.0));
        let regime = fam.classify();
        let mesh = mesh(129, 2.0);
        let opts = SystemOptions::default();
        let shell = build_shell(&fam, &regime, &mesh, 0.5, &opts).unwrap();
        let a = fixed_point_iterate(&fam, &regime, &shell, &mesh, &opts, StartPoint::LowerCorner)
            .unwrap();
        let b = fixed_point_iterate(&fam, &regime, &shell, &mesh, &opts, StartPoint::LowerCorner)
            .unwrap();
        assert_eq!(a.u.sup_distance(&b.u), 0.0);
    }

    #[test]
    fn composite_scaling_matches_subhomogeneity_exponent() {
        let spec = SystemSpec::new(
            2.0, 2.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0, l_one(), l_one(),
        )
        .unwrap();
        let mesh = mesh(257, 2.0);
        let u0 = GridFunction::from_distance_fn(Arc::clone(&mesh), |d| d);
        let exponent = composite_scaling_exponent(
            &spec,
            &mesh,
            &SolveOptions::default(),
            &u0,
            0.5,
        )
        .unwrap();
        let predicted = 0.5 * 0.5 / (1.0 * 1.0);
        assert!(
            (exponent - predicted).abs() <= 0.05,
            "exponent {exponent} vs predicted {predicted}"
        );
    }
}
