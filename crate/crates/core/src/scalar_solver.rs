//! Damped-Newton solver for the scalar problems
//! `-Δ_r w + c(x)·g(w) = rhs(x) + K(x)·w^δ` with zero or prescribed
//! Dirichlet data, optionally restricted to an index window of the mesh.
//!
//! `g` is either the identity or the three-branch cut-off
//! `g(z) = clamp(z, 0, ū(x))`, matching the compensated operator of the
//! fixed-point construction. Negative power exponents are handled by a
//! positivity floor driven down a continuation schedule, each stage warm
//! started from the previous one.

use crate::error::SolverError;
use crate::mesh::{GradedMesh1D, Geometry, GridFunction};
use crate::scalar::Real;
use std::sync::Arc;

/// Self-coupled power term `K(x) · w^δ` on the right-hand side.
#[derive(Debug, Clone)]
pub struct PowerRhs<T> {
    pub coefficient: GridFunction<T>,
    pub exponent: T,
}

/// One scalar boundary value problem.
#[derive(Debug, Clone)]
pub struct ScalarProblem<T> {
    /// Operator exponent r of `-Δ_r`.
    pub r: T,
    /// Nonnegative absorption coefficient `c(x)`.
    pub coeff_c: Option<GridFunction<T>>,
    /// Known right-hand side.
    pub rhs_fixed: Option<GridFunction<T>>,
    /// Self-coupled power term.
    pub rhs_power: Option<PowerRhs<T>>,
    /// Upper cut-off `ū` applied inside the absorption term.
    pub cutoff_upper: Option<GridFunction<T>>,
}

impl<T: Real> ScalarProblem<T> {
    /// Pure power problem `-Δ_r w = K(x) w^δ`.
    pub fn power(r: T, coefficient: GridFunction<T>, exponent: T) -> Self {
        Self {
            r,
            coeff_c: None,
            rhs_fixed: None,
            rhs_power: Some(PowerRhs {
                coefficient,
                exponent,
            }),
            cutoff_upper: None,
        }
    }

    /// Fixed right-hand side problem `-Δ_r w = rhs(x)`.
    pub fn fixed(r: T, rhs: GridFunction<T>) -> Self {
        Self {
            r,
            coeff_c: None,
            rhs_fixed: Some(rhs),
            rhs_power: None,
            cutoff_upper: None,
        }
    }
}

/// Newton/continuation controls.
#[derive(Debug, Clone)]
pub struct SolveOptions<T> {
    /// Tolerance on the scaled sup-norm residual.
    pub tol_residual: T,
    /// Newton iteration cap per continuation stage.
    pub max_newton: usize,
    /// Strictly decreasing positivity floors for δ < 0.
    pub continuation_floors: Vec<T>,
    /// Backtracking factor of the line search.
    pub damping: T,
    /// Gradient regularization floor in the flux weights.
    pub eps_grad: T,
    /// Line-search step cap.
    pub max_backtracks: usize,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            tol_residual: T::lit(1e-10),
            max_newton: 200,
            continuation_floors: (2..=8).map(|k| T::lit(10f64.powi(-k))).collect(),
            damping: T::half(),
            eps_grad: T::lit(1e-10),
            max_backtracks: 60,
        }
    }
}

/// Index window with its two side conditions.
#[derive(Debug, Clone, Copy)]
pub struct SolveWindow<T> {
    pub lo: usize,
    pub hi: usize,
    pub bc_lo: SideCondition<T>,
    pub bc_hi: SideCondition<T>,
}

#[derive(Debug, Clone, Copy)]
pub enum SideCondition<T> {
    Dirichlet(T),
    /// Zero-flux closure at the disk origin (node index 0 only).
    Mirror,
}

impl<T: Real> SolveWindow<T> {
    /// The natural full-domain window of a mesh: homogeneous Dirichlet at
    /// the boundary, mirror closure at the disk origin.
    pub fn full(mesh: &GradedMesh1D<T>) -> Self {
        let bc_lo = match mesh.geometry() {
            Geometry::Interval => SideCondition::Dirichlet(T::zero()),
            Geometry::RadialDisk { .. } => SideCondition::Mirror,
        };
        Self {
            lo: 0,
            hi: mesh.len() - 1,
            bc_lo,
            bc_hi: SideCondition::Dirichlet(T::zero()),
        }
    }
}

/// Iteration record of one scalar solve.
#[derive(Debug, Clone)]
pub struct ScalarRunReport<T> {
    pub newton_iterations: usize,
    pub stage_floors: Vec<T>,
    pub residual_history: Vec<T>,
    pub final_residual: T,
}

struct Assembly<T> {
    residual: Vec<T>,
    lower: Vec<T>,
    diag: Vec<T>,
    upper: Vec<T>,
    scaled_norm: T,
}

struct WindowContext<'a, T> {
    prob: &'a ScalarProblem<T>,
    mesh: &'a Arc<GradedMesh1D<T>>,
    window: SolveWindow<T>,
    /// First and last unknown index.
    ustart: usize,
    uend: usize,
    eps_grad: T,
    floor: T,
}

impl<'a, T: Real> WindowContext<'a, T> {
    fn new(
        prob: &'a ScalarProblem<T>,
        mesh: &'a Arc<GradedMesh1D<T>>,
        window: SolveWindow<T>,
        eps_grad: T,
        floor: T,
    ) -> Result<Self, SolverError> {
        if window.hi <= window.lo || window.hi >= mesh.len() {
            return Err(SolverError::InvalidInput(format!(
                "bad window [{}, {}] on mesh of {} nodes",
                window.lo,
                window.hi,
                mesh.len()
            )));
        }
        let ustart = match window.bc_lo {
            SideCondition::Dirichlet(_) => window.lo + 1,
            SideCondition::Mirror => {
                if window.lo != 0 || matches!(mesh.geometry(), Geometry::Interval) {
                    return Err(SolverError::InvalidInput(
                        "mirror condition only applies at the disk origin".into(),
                    ));
                }
                0
            }
        };
        let uend = match window.bc_hi {
            SideCondition::Dirichlet(_) => window.hi - 1,
            SideCondition::Mirror => {
                return Err(SolverError::InvalidInput(
                    "mirror condition only applies at the disk origin".into(),
                ))
            }
        };
        if uend < ustart {
            return Err(SolverError::InvalidInput("window has no unknowns".into()));
        }
        Ok(Self {
            prob,
            mesh,
            window,
            ustart,
            uend,
            eps_grad,
            floor,
        })
    }

    fn apply_bc(&self, w: &mut [T]) {
        if let SideCondition::Dirichlet(v) = self.window.bc_lo {
            w[self.window.lo] = v;
        }
        if let SideCondition::Dirichlet(v) = self.window.bc_hi {
            w[self.window.hi] = v;
        }
    }

    fn power_value(&self, i: usize, wi: T) -> T {
        match &self.prob.rhs_power {
            Some(p) => p.coefficient.get(i) * wi.max(self.floor).powf(p.exponent),
            None => T::zero(),
        }
    }

    fn power_derivative(&self, i: usize, wi: T) -> T {
        match &self.prob.rhs_power {
            Some(p) => {
                if wi > self.floor {
                    p.coefficient.get(i) * p.exponent * wi.powf(p.exponent - T::one())
                } else {
                    T::zero()
                }
            }
            None => T::zero(),
        }
    }

    fn absorption_value(&self, i: usize, wi: T) -> T {
        match &self.prob.coeff_c {
            Some(c) => {
                let z = match &self.prob.cutoff_upper {
                    Some(up) => wi.max(T::zero()).min(up.get(i)),
                    None => wi,
                };
                c.get(i) * z
            }
            None => T::zero(),
        }
    }

    fn absorption_derivative(&self, i: usize, wi: T) -> T {
        match &self.prob.coeff_c {
            Some(c) => match &self.prob.cutoff_upper {
                Some(up) => {
                    if wi > T::zero() && wi < up.get(i) {
                        c.get(i)
                    } else {
                        T::zero()
                    }
                }
                None => c.get(i),
            },
            None => T::zero(),
        }
    }

    fn rhs_fixed(&self, i: usize) -> T {
        self.prob
            .rhs_fixed
            .as_ref()
            .map_or(T::zero(), |g| g.get(i))
    }

    /// Flux through face (i, i+1) and the slope derivative of the flux.
    fn flux_pair(&self, i: usize, w: &[T]) -> (T, T) {
        let h = self.mesh.node(i + 1) - self.mesh.node(i);
        let s = (w[i + 1] - w[i]) / h;
        let r = self.prob.r;
        let e2 = self.eps_grad * self.eps_grad;
        let base = s * s + e2;
        let weight = base.powf((r - T::two()) * T::half());
        let dphi = base.powf((r - T::lit(4.0)) * T::half()) * ((r - T::one()) * s * s + e2);
        let fw = self.face_weight(i);
        (fw * weight * s, fw * dphi)
    }

    fn face_weight(&self, i: usize) -> T {
        match self.mesh.geometry() {
            Geometry::Interval => T::one(),
            Geometry::RadialDisk { dim } => {
                let rho = (self.mesh.node(i) + self.mesh.node(i + 1)) * T::half();
                rho.powi(dim as i32 - 1)
            }
        }
    }

    fn cell_measure(&self, i: usize) -> T {
        match self.mesh.geometry() {
            Geometry::Interval => {
                let left = if i == 0 {
                    self.mesh.node(0)
                } else {
                    self.mesh.node(i - 1)
                };
                let right = if i + 1 < self.mesh.len() {
                    self.mesh.node(i + 1)
                } else {
                    self.mesh.node(i)
                };
                (right - left) * T::half()
            }
            Geometry::RadialDisk { dim } => {
                let n = T::from_u32(dim).unwrap();
                let lo = if i == 0 {
                    T::zero()
                } else {
                    (self.mesh.node(i - 1) + self.mesh.node(i)) * T::half()
                };
                let hi = if i + 1 < self.mesh.len() {
                    (self.mesh.node(i) + self.mesh.node(i + 1)) * T::half()
                } else {
                    self.mesh.node(i)
                };
                (hi.powi(dim as i32) - lo.powi(dim as i32)) / n
            }
        }
    }

    /// Scaled residual the rounding of `w` itself can reach: one ulp of the
    /// unknowns propagated through the Jacobian rows. Below this level the
    /// discrete residual is quantized and Newton cannot make progress.
    fn attainable_floor(&self, w: &[T], a: &Assembly<T>) -> T {
        let mut floor = T::zero();
        for (row, i) in (self.ustart..=self.uend).enumerate() {
            let left = if i > 0 { w[i - 1].abs() } else { T::zero() };
            let right = if i + 1 < w.len() { w[i + 1].abs() } else { T::zero() };
            let sensitivity = a.diag[row].abs() * w[i].abs()
                + a.lower[row].abs() * left
                + a.upper[row].abs() * right;
            let rhs_total = self.rhs_fixed(i) + self.power_value(i, w[i]);
            floor = floor.max(sensitivity / (T::one() + rhs_total.abs()));
        }
        floor * T::epsilon() * T::lit(8.0)
    }

    fn assemble(&self, w: &[T]) -> Assembly<T> {
        let m = self.uend - self.ustart + 1;
        let mut residual = vec![T::zero(); m];
        let mut lower = vec![T::zero(); m];
        let mut diag = vec![T::zero(); m];
        let mut upper = vec![T::zero(); m];
        let mut scaled_norm = T::zero();
        for (row, i) in (self.ustart..=self.uend).enumerate() {
            let measure = self.cell_measure(i);
            let (flux_out, dphi_out) = self.flux_pair(i, w);
            let (flux_in, dphi_in) = if i > 0 {
                self.flux_pair(i - 1, w)
            } else {
                (T::zero(), T::zero())
            };
            let lapl = -(flux_out - flux_in) / measure;
            let rhs_total = self.rhs_fixed(i) + self.power_value(i, w[i]);
            let f = lapl + self.absorption_value(i, w[i]) - rhs_total;
            residual[row] = f;
            let h_out = self.mesh.node(i + 1) - self.mesh.node(i);
            let d_out = dphi_out / h_out;
            let d_in = if i > 0 {
                dphi_in / (self.mesh.node(i) - self.mesh.node(i - 1))
            } else {
                T::zero()
            };
            diag[row] = (d_out + d_in) / measure + self.absorption_derivative(i, w[i])
                - self.power_derivative(i, w[i]);
            upper[row] = -d_out / measure;
            lower[row] = -d_in / measure;
            let scale = T::one() + rhs_total.abs();
            scaled_norm = scaled_norm.max(f.abs() / scale);
        }
        Assembly {
            residual,
            lower,
            diag,
            upper,
            scaled_norm,
        }
    }
}

/// Thomas solve of the tridiagonal system `J d = -residual`.
fn tridiagonal_solve<T: Real>(a: &Assembly<T>) -> Result<Vec<T>, SolverError> {
    let m = a.residual.len();
    let mut c_prime = vec![T::zero(); m];
    let mut d_prime = vec![T::zero(); m];
    let mut denom = a.diag[0];
    let scale0 = a.diag[0].abs() + a.upper[0].abs() + T::lit(1e-300);
    if denom.abs() <= T::lit(1e-14) * scale0 {
        return Err(SolverError::SingularJacobian {
            pivot: denom.to_f64().unwrap_or(0.0),
        });
    }
    c_prime[0] = a.upper[0] / denom;
    d_prime[0] = -a.residual[0] / denom;
    for i in 1..m {
        denom = a.diag[i] - a.lower[i] * c_prime[i - 1];
        let scale = a.diag[i].abs() + a.lower[i].abs() + a.upper[i].abs() + T::lit(1e-300);
        if denom.abs() <= T::lit(1e-14) * scale {
            return Err(SolverError::SingularJacobian {
                pivot: denom.to_f64().unwrap_or(0.0),
            });
        }
        c_prime[i] = a.upper[i] / denom;
        d_prime[i] = (-a.residual[i] - a.lower[i] * d_prime[i - 1]) / denom;
    }
    let mut step = d_prime;
    for i in (0..m - 1).rev() {
        let next = step[i + 1];
        step[i] = step[i] - c_prime[i] * next;
    }
    Ok(step)
}

/// Discrete energy of the cut-off/fixed form (no power term), used as a
/// monotonicity safeguard for accepted Newton steps.
pub fn discrete_energy<T: Real>(
    prob: &ScalarProblem<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    window: SolveWindow<T>,
    w: &GridFunction<T>,
) -> T {
    let r = prob.r;
    let values = w.values();
    let mut energy = T::zero();
    for i in window.lo..window.hi {
        let h = mesh.node(i + 1) - mesh.node(i);
        let s = (values[i + 1] - values[i]) / h;
        let fw = match mesh.geometry() {
            Geometry::Interval => T::one(),
            Geometry::RadialDisk { dim } => {
                let rho = (mesh.node(i) + mesh.node(i + 1)) * T::half();
                rho.powi(dim as i32 - 1)
            }
        };
        energy = energy + fw * h * s.abs().powf(r) / r;
    }
    let ctx = match WindowContext::new(prob, mesh, window, T::zero(), T::zero()) {
        Ok(c) => c,
        Err(_) => return energy,
    };
    for i in ctx.ustart..=ctx.uend {
        let measure = ctx.cell_measure(i);
        let zi = values[i];
        let g_primitive = match (&prob.coeff_c, &prob.cutoff_upper) {
            (Some(c), Some(up)) => {
                let u = up.get(i);
                let z = zi.max(T::zero());
                if z <= u {
                    c.get(i) * z * z * T::half()
                } else {
                    c.get(i) * (u * z - u * u * T::half())
                }
            }
            (Some(c), None) => c.get(i) * zi * zi * T::half(),
            (None, _) => T::zero(),
        };
        energy = energy + measure * (g_primitive - ctx.rhs_fixed(i) * zi);
    }
    energy
}

/// Solves the problem on the full mesh with its natural side conditions.
pub fn solve_scalar<T: Real>(
    prob: &ScalarProblem<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    opts: &SolveOptions<T>,
    warm_start: Option<&GridFunction<T>>,
) -> Result<(GridFunction<T>, ScalarRunReport<T>), SolverError> {
    solve_scalar_window(prob, mesh, SolveWindow::full(mesh), opts, warm_start)
}

/// Solves the problem restricted to an index window.
pub fn solve_scalar_window<T: Real>(
    prob: &ScalarProblem<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    window: SolveWindow<T>,
    opts: &SolveOptions<T>,
    warm_start: Option<&GridFunction<T>>,
) -> Result<(GridFunction<T>, ScalarRunReport<T>), SolverError> {
    let delta = prob.rhs_power.as_ref().map(|p| p.exponent);
    let floors: Vec<T> = match delta {
        Some(d) if d < T::zero() => {
            if opts.continuation_floors.is_empty() {
                return Err(SolverError::InvalidInput(
                    "negative power exponent needs a continuation schedule".into(),
                ));
            }
            opts.continuation_floors.clone()
        }
        Some(d) if d < T::one() => {
            vec![*opts.continuation_floors.last().unwrap_or(&T::lit(1e-8))]
        }
        _ => vec![T::zero()],
    };

    let mut w: Vec<T> = match warm_start {
        Some(g) => g.values().to_vec(),
        None => (0..mesh.len())
            .map(|i| {
                if mesh.is_boundary(i) {
                    T::zero()
                } else {
                    mesh.distance(i)
                }
            })
            .collect(),
    };

    let mut report = ScalarRunReport {
        newton_iterations: 0,
        stage_floors: Vec::new(),
        residual_history: Vec::new(),
        final_residual: T::zero(),
    };

    let mut stagnant_floors = 0usize;
    let mut final_residual = T::infinity();
    let mut last_stage_reached = false;
    for &floor in &floors {
        let ctx = WindowContext::new(prob, mesh, window, opts.eps_grad, floor)?;
        ctx.apply_bc(&mut w);
        for i in ctx.ustart..=ctx.uend {
            if !(w[i] > T::zero()) {
                w[i] = floor.max(T::lit(1e-12));
            }
        }
        report.stage_floors.push(floor);
        last_stage_reached = newton_stage(&ctx, &mut w, opts, &mut report)?;
        final_residual = *report.residual_history.last().unwrap_or(&final_residual);
        if last_stage_reached {
            stagnant_floors = 0;
        } else {
            stagnant_floors += 1;
            if stagnant_floors >= 3 {
                return Err(SolverError::NonConvergence {
                    iterations: report.newton_iterations,
                    residual: final_residual.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    if !last_stage_reached {
        return Err(SolverError::NonConvergence {
            iterations: report.newton_iterations,
            residual: final_residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    report.final_residual = final_residual;
    Ok((GridFunction::new(Arc::clone(mesh), w), report))
}

/// Runs Newton with backtracking at a fixed floor; returns whether the
/// residual tolerance was reached.
fn newton_stage<T: Real>(
    ctx: &WindowContext<'_, T>,
    w: &mut Vec<T>,
    opts: &SolveOptions<T>,
    report: &mut ScalarRunReport<T>,
) -> Result<bool, SolverError> {
    let energy_guard = ctx.prob.rhs_power.is_none();
    let window = ctx.window;
    for _ in 0..opts.max_newton {
        let assembly = ctx.assemble(w);
        report.residual_history.push(assembly.scaled_norm);
        if assembly.scaled_norm <= opts.tol_residual {
            return Ok(true);
        }
        let step = tridiagonal_solve(&assembly)?;
        let current_energy = if energy_guard {
            discrete_energy(
                ctx.prob,
                ctx.mesh,
                window,
                &GridFunction::new(Arc::clone(ctx.mesh), w.clone()),
            )
        } else {
            T::zero()
        };
        let mut lambda = T::one();
        let mut accepted = false;
        let mut positivity_blocked = true;
        for _ in 0..opts.max_backtracks {
            let mut trial = w.clone();
            for (row, i) in (ctx.ustart..=ctx.uend).enumerate() {
                trial[i] = trial[i] + lambda * step[row];
            }
            let positive = (ctx.ustart..=ctx.uend).all(|i| trial[i] > T::zero());
            if positive {
                positivity_blocked = false;
                let trial_assembly = ctx.assemble(&trial);
                let sufficient = trial_assembly.scaled_norm < assembly.scaled_norm
                    && trial_assembly.scaled_norm
                        <= assembly.scaled_norm * (T::one() - T::lit(1e-4) * lambda);
                let energy_ok = if energy_guard {
                    let e = discrete_energy(
                        ctx.prob,
                        ctx.mesh,
                        window,
                        &GridFunction::new(Arc::clone(ctx.mesh), trial.clone()),
                    );
                    e <= current_energy + T::lit(1e-12) * (T::one() + current_energy.abs())
                } else {
                    true
                };
                if sufficient && energy_ok {
                    *w = trial;
                    accepted = true;
                    break;
                }
            }
            lambda = lambda * opts.damping;
        }
        report.newton_iterations += 1;
        if !accepted {
            if positivity_blocked {
                let node = (ctx.ustart..=ctx.uend)
                    .find(|&i| !(w[i] + step[i - ctx.ustart] > T::zero()))
                    .unwrap_or(ctx.ustart);
                return Err(SolverError::LossOfPositivity { node });
            }
            // the line search found no improving step: converged if the
            // residual already sits at the rounding-attainable level
            let reached = assembly.scaled_norm <= ctx.attainable_floor(w, &assembly);
            return Ok(reached);
        }
    }
    Ok(false)
}

/// One damped Newton step from `w_current`; returns the new iterate and the
/// sup-norm of the accepted update.
pub fn linearized_step<T: Real>(
    prob: &ScalarProblem<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    w_current: &GridFunction<T>,
    opts: &SolveOptions<T>,
) -> Result<(GridFunction<T>, T), SolverError> {
    let window = SolveWindow::full(mesh);
    let floor = match prob.rhs_power.as_ref().map(|p| p.exponent) {
        Some(d) if d < T::one() => *opts.continuation_floors.last().unwrap_or(&T::lit(1e-8)),
        _ => T::zero(),
    };
    let ctx = WindowContext::new(prob, mesh, window, opts.eps_grad, floor)?;
    let mut w = w_current.values().to_vec();
    ctx.apply_bc(&mut w);
    let assembly = ctx.assemble(&w);
    if assembly.scaled_norm <= opts.tol_residual {
        return Ok((GridFunction::new(Arc::clone(mesh), w), T::zero()));
    }
    let step = tridiagonal_solve(&assembly)?;
    let mut lambda = T::one();
    for _ in 0..opts.max_backtracks {
        let mut trial = w.clone();
        for (row, i) in (ctx.ustart..=ctx.uend).enumerate() {
            trial[i] = trial[i] + lambda * step[row];
        }
        let positive = (ctx.ustart..=ctx.uend).all(|i| trial[i] > T::zero());
        if positive {
            let trial_assembly = ctx.assemble(&trial);
            if trial_assembly.scaled_norm < assembly.scaled_norm {
                let norm = step
                    .iter()
                    .fold(T::zero(), |acc, &s| acc.max((lambda * s).abs()));
                return Ok((GridFunction::new(Arc::clone(mesh), trial), norm));
            }
        }
        lambda = lambda * opts.damping;
    }
    Err(SolverError::NonConvergence {
        iterations: 1,
        residual: assembly.scaled_norm.to_f64().unwrap_or(f64::NAN),
    })
}

/// Scaled sup-norm residual of `w` for the problem on the full window.
pub fn scaled_residual<T: Real>(
    prob: &ScalarProblem<T>,
    mesh: &Arc<GradedMesh1D<T>>,
    w: &GridFunction<T>,
    opts: &SolveOptions<T>,
) -> Result<T, SolverError> {
    let floor = match prob.rhs_power.as_ref().map(|p| p.exponent) {
        Some(d) if d < T::one() => *opts.continuation_floors.last().unwrap_or(&T::lit(1e-8)),
        _ => T::zero(),
    };
    let ctx = WindowContext::new(prob, mesh, SolveWindow::full(mesh), opts.eps_grad, floor)?;
    Ok(ctx.assemble(w.values()).scaled_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{distance_fn, GradedMesh1D, Geometry};

    fn interval(n: usize, s: f64) -> Arc<GradedMesh1D<f64>> {
        GradedMesh1D::build(Geometry::Interval, n, s).unwrap()
    }

    fn ones(mesh: &Arc<GradedMesh1D<f64>>) -> GridFunction<f64> {
        GridFunction::from_fn(Arc::clone(mesh), |_| 1.0)
    }

    #[test]
    fn laplace_constant_rhs_matches_parabola() {
        let mesh = interval(513, 1.0);
        let prob = ScalarProblem::power(2.0, ones(&mesh), 0.0);
        let (w, report) = solve_scalar(&prob, &mesh, &SolveOptions::default(), None).unwrap();
        let mut err: f64 = 0.0;
        for (i, &x) in mesh.nodes().iter().enumerate() {
            err = err.max((w.get(i) - 0.5 * x * (1.0 - x)).abs());
        }
        assert!(err <= 1e-4, "max error {err}");
        assert!(report.final_residual <= 1e-10);
    }

    #[test]
    fn p_three_constant_rhs_matches_closed_form() {
        let mesh = interval(513, 1.0);
        let prob = ScalarProblem::fixed(3.0, ones(&mesh));
        let (w, _) = solve_scalar(&prob, &mesh, &SolveOptions::default(), None).unwrap();
        let mut err: f64 = 0.0;
        for (i, &x) in mesh.nodes().iter().enumerate() {
            let exact = (2.0 / 3.0) * (0.5f64.powf(1.5) - (x - 0.5).abs().powf(1.5));
            err = err.max((w.get(i) - exact).abs());
        }
        assert!(err <= 1e-3, "max error {err}");
    }

    #[test]
    fn singular_power_solution_stays_positive() {
        let mesh = interval(513, 3.0);
        let prob = ScalarProblem::power(2.0, ones(&mesh), -0.5);
        let (w, _) = solve_scalar(&prob, &mesh, &SolveOptions::default(), None).unwrap();
        for i in mesh.interior_indices() {
            assert!(w.get(i) > 0.0);
        }
    }

    #[test]
    fn continuation_is_stable_under_floor_halving() {
        let mesh = interval(513, 3.0);
        let prob = ScalarProblem::power(2.0, ones(&mesh), -0.5);
        let (w1, _) = solve_scalar(&prob, &mesh, &SolveOptions::default(), None).unwrap();
        let mut opts = SolveOptions::default();
        opts.continuation_floors.push(0.5e-8);
        let (w2, _) = solve_scalar(&prob, &mesh, &opts, None).unwrap();
        assert!(w1.sup_distance(&w2) <= 1e-6);
    }

    #[test]
    fn newton_fixed_point_at_exact_solution() {
        let mesh = interval(257, 1.0);
        let prob = ScalarProblem::fixed(2.0, ones(&mesh));
        let (w, _) = solve_scalar(&prob, &mesh, &SolveOptions::default(), None).unwrap();
        let (w2, step_norm) = linearized_step(&prob, &mesh, &w, &SolveOptions::default()).unwrap();
        assert!(step_norm <= 1e-10, "step {step_norm}");
        assert!(w.sup_distance(&w2) <= 1e-10);
    }

    #[test]
    fn linear_problem_converges_in_one_step() {
        let mesh = interval(257, 1.0);
        let prob = ScalarProblem::fixed(2.0, ones(&mesh));
        let start = GridFunction::from_distance_fn(Arc::clone(&mesh), |_| 0.1);
        let (w, _) = linearized_step(&prob, &mesh, &start, &SolveOptions::default()).unwrap();
        let res = scaled_residual(&prob, &mesh, &w, &SolveOptions::default()).unwrap();
        assert!(res <= 1e-9, "residual after one step {res}");
    }

    #[test]
    fn damped_steps_decrease_residual_for_p_three() {
        let mesh = interval(257, 1.0);
        let prob = ScalarProblem::fixed(3.0, ones(&mesh));
        let mut w = GridFunction::from_distance_fn(Arc::clone(&mesh), |_| 0.1);
        let opts = SolveOptions::default();
        let mut prev = scaled_residual(&prob, &mesh, &w, &opts).unwrap();
        for _ in 0..20 {
            if prev <= opts.tol_residual {
                break;
            }
            let (next, _) = linearized_step(&prob, &mesh, &w, &opts).unwrap();
            let res = scaled_residual(&prob, &mesh, &next, &opts).unwrap();
            assert!(res < prev, "residual did not decrease: {prev} -> {res}");
            w = next;
            prev = res;
        }
    }

    #[test]
    fn weak_maximum_principle_nonnegative_rhs() {
        let mesh = interval(129, 2.0);
        for r in [2.0, 2.5] {
            let rhs = GridFunction::from_fn(Arc::clone(&mesh), |x| (6.3 * x).sin().abs());
            let prob = ScalarProblem {
                r,
                coeff_c: Some(distance_fn(&mesh)),
                rhs_fixed: Some(rhs),
                rhs_power: None,
                cutoff_upper: None,
            };
            let (w, _) = solve_scalar(&prob, &mesh, &SolveOptions::default(), None).unwrap();
            for i in 0..mesh.len() {
                assert!(w.get(i) >= -1e-12, "negative value at node {i}");
            }
        }
    }

    #[test]
    fn linear_comparison_in_rhs() {
        let mesh = interval(129, 2.0);
        let r1 = GridFunction::from_fn(Arc::clone(&mesh), |x| 1.0 + x);
        let r2 = GridFunction::from_fn(Arc::clone(&mesh), |x| 1.5 + x * x + x);
        let (w1, _) = solve_scalar(
            &ScalarProblem::fixed(2.0, r1),
            &mesh,
            &SolveOptions::default(),
            None,
        )
        .unwrap();
        let (w2, _) = solve_scalar(
            &ScalarProblem::fixed(2.0, r2),
            &mesh,
            &SolveOptions::default(),
            None,
        )
        .unwrap();
        for i in 0..mesh.len() {
            assert!(w1.get(i) <= w2.get(i) + 1e-9);
        }
    }

    #[test]
    fn window_solve_with_dirichlet_data() {
        // -w'' = 0 with data w = 1 at both window ends is w = 1 inside.
        let mesh = interval(65, 1.0);
        let prob = ScalarProblem::fixed(2.0, GridFunction::zeros(Arc::clone(&mesh)));
        let window = SolveWindow {
            lo: 10,
            hi: 50,
            bc_lo: SideCondition::Dirichlet(1.0),
            bc_hi: SideCondition::Dirichlet(1.0),
        };
        let start = GridFunction::from_fn(Arc::clone(&mesh), |_| 1.0);
        let (w, _) =
            solve_scalar_window(&prob, &mesh, window, &SolveOptions::default(), Some(&start))
                .unwrap();
        for i in 10..=50 {
            assert!((w.get(i) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn disk_solve_with_origin_mirror() {
        let mesh = GradedMesh1D::build(Geometry::RadialDisk { dim: 2 }, 257, 1.0).unwrap();
        let prob = ScalarProblem::fixed(2.0, ones(&mesh));
        let (w, _) = solve_scalar(&prob, &mesh, &SolveOptions::default(), None).unwrap();
        let mut err: f64 = 0.0;
        for (i, &rho) in mesh.nodes().iter().enumerate() {
            err = err.max((w.get(i) - 0.25 * (1.0 - rho * rho)).abs());
        }
        assert!(err <= 1e-4, "max error {err}");
    }

    #[test]
    fn energy_decreases_with_cutoff_absorption() {
        let mesh = interval(129, 2.0);
        let d = distance_fn(&mesh);
        let upper = GridFunction::from_distance_fn(Arc::clone(&mesh), |t| 2.0 * t);
        let prob = ScalarProblem {
            r: 2.0,
            coeff_c: Some(d.map(|t| if t > 0.0 { 3.0 / t.sqrt() } else { 0.0 })),
            rhs_fixed: Some(ones(&mesh)),
            rhs_power: None,
            cutoff_upper: Some(upper),
        };
        let opts = SolveOptions::default();
        let window = SolveWindow::full(&mesh);
        let mut w = GridFunction::from_distance_fn(Arc::clone(&mesh), |t| 0.3 * t);
        let mut prev = discrete_energy(&prob, &mesh, window, &w);
        for _ in 0..30 {
            let res = scaled_residual(&prob, &mesh, &w, &opts).unwrap();
            if res <= opts.tol_residual {
                break;
            }
            let (next, _) = linearized_step(&prob, &mesh, &w, &opts).unwrap();
            let e = discrete_energy(&prob, &mesh, window, &next);
            assert!(
                e <= prev + 1e-12 * (1.0 + prev.abs()),
                "energy increased: {prev} -> {e}"
            );
            prev = e;
            w = next;
        }
    }
}
