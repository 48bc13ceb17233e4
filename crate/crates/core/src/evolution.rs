//! Time integration of both coupled models as index-1 DAEs.
//!
//! The constrained component is eliminated through its elliptic solve, which
//! leaves a linear ODE `x' = -S x` for the evolving component. Each step
//! advances `x` and then re-solves the constraint at the new time.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::elliptic::ConstraintSolver;
use crate::energy::{dissipation_form, energy_ev, energy_f, energy_model2};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{
    expm_pade, spectral_norm, sym_eigen, symmetrize_weighted, weighted_mean, weighted_norm, weighted_sum, Factorized,
};
use crate::mesh::{assemble_system, DiscreteSystem, Partition1D};

/// Which subdomain evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Heat equation on `A`, nonlocal balance on `B`.
    ParabolicElliptic,
    /// Neumann problem on `A`, nonlocal evolution on `B`.
    EllipticParabolic,
}

impl ModelKind {
    pub fn evolving_weights(self, sys: &DiscreteSystem) -> &[f64] {
        match self {
            ModelKind::ParabolicElliptic => sys.grid_a.weights(),
            ModelKind::EllipticParabolic => sys.grid_b.weights(),
        }
    }

    pub fn evolving_len(self, sys: &DiscreteSystem) -> usize {
        self.evolving_weights(sys).len()
    }

    /// Solver that reconstructs the constrained component.
    pub fn constraint(self, sys: &DiscreteSystem) -> Result<ConstraintSolver> {
        match self {
            ModelKind::ParabolicElliptic => ConstraintSolver::balance(sys),
            ModelKind::EllipticParabolic => ConstraintSolver::local(sys),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeScheme {
    #[default]
    ImplicitEuler,
    CrankNicolson,
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: DVector<f64>,
    pub v: DVector<f64>,
}

impl State {
    pub fn evolving(&self, model: ModelKind) -> &DVector<f64> {
        match model {
            ModelKind::ParabolicElliptic => &self.u,
            ModelKind::EllipticParabolic => &self.v,
        }
    }

    pub fn constrained(&self, model: ModelKind) -> &DVector<f64> {
        match model {
            ModelKind::ParabolicElliptic => &self.v,
            ModelKind::EllipticParabolic => &self.u,
        }
    }

    fn assemble(model: ModelKind, t: f64, evolving: DVector<f64>, constrained: DVector<f64>) -> State {
        match model {
            ModelKind::ParabolicElliptic => State { t, u: evolving, v: constrained },
            ModelKind::EllipticParabolic => State { t, u: constrained, v: evolving },
        }
    }
}

/// Per-snapshot diagnostics.
///
/// `energy_ev` and `energy_f` hold `E_v(u)` and `F(v)` for the
/// parabolic–elliptic model and `E(u)` and `F_u(v)` for the elliptic–parabolic one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub mass_a: f64,
    pub mass_b: f64,
    pub l2_u: f64,
    pub l2_v: f64,
    pub dissipation: f64,
    pub energy_ev: f64,
    pub energy_f: f64,
}

pub fn diagnose(sys: &DiscreteSystem, model: ModelKind, state: &State) -> Diagnostics {
    let (wa, wb) = (sys.grid_a.weights(), sys.grid_b.weights());
    let (energy_ev, energy_f) = match model {
        ModelKind::ParabolicElliptic => {
            (energy_ev(sys, &state.u, &state.v), energy_f(sys, &state.u, &state.v))
        }
        ModelKind::EllipticParabolic => {
            let (f_u, e) = energy_model2(sys, &state.u, &state.v);
            (e, f_u)
        }
    };
    Diagnostics {
        t: state.t,
        mass_a: weighted_sum(&state.u, wa),
        mass_b: weighted_sum(&state.v, wb),
        l2_u: weighted_norm(&state.u, wa),
        l2_v: weighted_norm(&state.v, wb),
        dissipation: dissipation_form(sys, &state.u, &state.v).total,
        energy_ev,
        energy_f,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub model: ModelKind,
    pub snapshots: Vec<State>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn new(model: ModelKind) -> Trajectory {
        Trajectory { model, snapshots: Vec::new(), diagnostics: Vec::new() }
    }

    pub fn push(&mut self, sys: &DiscreteSystem, state: State) {
        self.diagnostics.push(diagnose(sys, self.model, &state));
        self.snapshots.push(state);
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &State {
        self.snapshots.last().expect("trajectory has at least the initial snapshot")
    }
}

/// Reduced generator `S` with `x' = -S x` for the evolving component.
pub fn schur_generator(sys: &DiscreteSystem, model: ModelKind) -> Result<DMatrix<f64>> {
    let closure = model.constraint(sys)?.operator();
    Ok(match model {
        ModelKind::ParabolicElliptic => sys.local_matrix() - &sys.jab * closure,
        ModelKind::EllipticParabolic => sys.balance_matrix() - &sys.jba * closure,
    })
}

/// Constrained component solved from the evolving initial datum.
pub fn initial_state(sys: &DiscreteSystem, model: ModelKind, init: &DVector<f64>) -> Result<State> {
    let n = model.evolving_len(sys);
    if init.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: init.len() });
    }
    let constrained = model.constraint(sys)?.solve(init);
    Ok(State::assemble(model, 0.0, init.clone(), constrained))
}

fn check_step(dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("time step must be positive, got {dt}")));
    }
    Ok(())
}

/// Factored one-step map for a fixed model, scheme and step size.
///
/// Constants are stationary, so only the deviation from the weighted mean is
/// propagated; the mean is carried over unchanged. This keeps the rounding
/// of the stiff step matrix from acting on the conserved mode.
#[derive(Debug, Clone)]
pub struct Stepper {
    model: ModelKind,
    dt: f64,
    weights: Vec<f64>,
    lhs: Factorized,
    explicit: Option<DMatrix<f64>>,
    constraint: ConstraintSolver,
}

impl Stepper {
    pub fn new(sys: &DiscreteSystem, model: ModelKind, dt: f64, scheme: TimeScheme) -> Result<Stepper> {
        check_step(dt)?;
        let s = schur_generator(sys, model)?;
        let n = s.nrows();
        let ident = DMatrix::<f64>::identity(n, n);
        let (lhs, explicit) = match scheme {
            TimeScheme::ImplicitEuler => (&ident + &s * dt, None),
            TimeScheme::CrankNicolson => (&ident + &s * (0.5 * dt), Some(&ident - &s * (0.5 * dt))),
        };
        Ok(Stepper {
            model,
            dt,
            weights: model.evolving_weights(sys).to_vec(),
            lhs: Factorized::new(lhs, "time-step matrix")?,
            explicit,
            constraint: model.constraint(sys)?,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances the evolving component only.
    pub fn advance(&self, x: &DVector<f64>) -> DVector<f64> {
        let mean = weighted_mean(x, &self.weights);
        let y = x.add_scalar(-mean);
        let next = match &self.explicit {
            None => self.lhs.solve(&y),
            Some(rhs) => self.lhs.solve(&(rhs * y)),
        };
        next.add_scalar(mean)
    }

    pub fn step(&self, state: &State) -> State {
        let next = self.advance(state.evolving(self.model));
        let constrained = self.constraint.solve(&next);
        State::assemble(self.model, state.t + self.dt, next, constrained)
    }
}

pub fn step(sys: &DiscreteSystem, model: ModelKind, state: &State, dt: f64, scheme: TimeScheme) -> Result<State> {
    Ok(Stepper::new(sys, model, dt, scheme)?.step(state))
}

/// Number of uniform steps covering `[0, t_end]` with steps no longer than `dt`.
pub fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    check_step(dt)?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("final time must be positive, got {t_end}")));
    }
    Ok((libm::ceil(t_end / dt * (1.0 - 1e-12)) as usize).max(1))
}

/// Integrates from the evolving initial datum; the constrained datum is elliptic-solved.
pub fn integrate(
    sys: &DiscreteSystem,
    model: ModelKind,
    init: &DVector<f64>,
    t_end: f64,
    dt: f64,
    scheme: TimeScheme,
) -> Result<Trajectory> {
    let steps = step_count(t_end, dt)?;
    let h = t_end / steps as f64;
    let stepper = Stepper::new(sys, model, h, scheme)?;
    let mut traj = Trajectory::new(model);
    let mut state = initial_state(sys, model, init)?;
    traj.push(sys, state.clone());
    for k in 1..=steps {
        state = stepper.step(&state);
        state.t = k as f64 * h;
        traj.push(sys, state.clone());
    }
    Ok(traj)
}

/// Exact propagator `exp(-t S)` of a generator that is self-adjoint in a weighted inner product.
#[derive(Debug, Clone)]
pub struct ExactFlow {
    sqrt_w: Vec<f64>,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl ExactFlow {
    pub fn new(s: &DMatrix<f64>, weights: &[f64]) -> Result<ExactFlow> {
        let (values, vectors) = sym_eigen(symmetrize_weighted(s, weights))?;
        Ok(ExactFlow { sqrt_w: weights.iter().map(|w| libm::sqrt(*w)).collect(), values, vectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn apply(&self, t: f64, x0: &DVector<f64>) -> DVector<f64> {
        let y = DVector::from_iterator(x0.len(), x0.iter().zip(&self.sqrt_w).map(|(x, s)| x * s));
        let mut coeffs = self.vectors.tr_mul(&y);
        for (c, lam) in coeffs.iter_mut().zip(&self.values) {
            *c *= libm::exp(-t * lam);
        }
        let z = &self.vectors * coeffs;
        DVector::from_iterator(z.len(), z.iter().zip(&self.sqrt_w).map(|(z, s)| z / s))
    }
}

fn is_weighted_symmetric(s: &DMatrix<f64>, w: &[f64]) -> bool {
    let n = s.nrows();
    let scale = s.amax().max(f64::MIN_POSITIVE);
    (0..n).all(|i| (0..n).all(|j| (w[i] * s[(i, j)] - w[j] * s[(j, i)]).abs() <= 1e-10 * scale * w[i].max(w[j])))
}

/// `exp(-t S) x0`.
///
/// Uses the eigendecomposition of `W^{1/2} S W^{-1/2}` when `S` is
/// self-adjoint for the weights (uniform weights if none are given) and
/// falls back to Padé scaling and squaring otherwise.
pub fn expm_reference(s: &DMatrix<f64>, t: f64, x0: &DVector<f64>, weights: Option<&[f64]>) -> Result<DVector<f64>> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: s.ncols() });
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    if t == 0.0 {
        return Ok(x0.clone());
    }
    let uniform = alloc::vec![1.0; n];
    let w = weights.unwrap_or(&uniform);
    if is_weighted_symmetric(s, w) {
        Ok(ExactFlow::new(s, w)?.apply(t, x0))
    } else {
        Ok(expm_pade(&(s * -t))? * x0)
    }
}

/// Fixed point of the Picard map together with its convergence record.
#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub trajectory: Trajectory,
    pub iterations: usize,
    pub contraction_factor: f64,
    pub last_increment: f64,
}

const PICARD_MAX_SWEEPS: usize = 10_000;

/// Solves the parabolic–elliptic model on `[0, t_end]` by iterating
/// `u -> T_BA(T_AB(u))` on whole trajectories.
///
/// `T_AB` closes `v` from `u` at every time level and `T_BA` solves the heat
/// equation on `A` with the transmission source `Jab v` (implicit Euler).
/// The iteration is only attempted when the a-priori contraction factor
/// `t_end * ‖Jab (M^{-1} Jba)‖_w` is below one; otherwise shorten the window.
pub fn picard_solve(
    sys: &DiscreteSystem,
    u0: &DVector<f64>,
    t_end: f64,
    dt: f64,
    tol: f64,
) -> Result<PicardSolution> {
    let model = ModelKind::ParabolicElliptic;
    let steps = step_count(t_end, dt)?;
    let h = t_end / steps as f64;
    let n = sys.n_a();
    if u0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u0.len() });
    }
    let closure = ConstraintSolver::balance(sys)?;
    let feedback = &sys.jab * closure.operator();
    let wa = sys.grid_a.weights();
    let sqrt_w: Vec<f64> = wa.iter().map(|w| libm::sqrt(*w)).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| sqrt_w[i] * feedback[(i, j)] / sqrt_w[j]);
    // the heat resolvent is a contraction in the weighted norm, so only the feedback counts
    let factor = h * steps as f64 * spectral_norm(&scaled)?;
    if factor >= 1.0 {
        return Err(Error::NoContraction { factor });
    }
    let ident = DMatrix::<f64>::identity(n, n);
    let resolvent = Factorized::new(&ident + sys.local_matrix() * h, "heat resolvent")?;

    let mut us: Vec<DVector<f64>> = alloc::vec![u0.clone(); steps + 1];
    let mut iterations = 0;
    let mut increment;
    loop {
        iterations += 1;
        let vs: Vec<DVector<f64>> = us.iter().map(|u| closure.solve(u)).collect();
        let mut next = Vec::with_capacity(steps + 1);
        next.push(u0.clone());
        for k in 1..=steps {
            let rhs = &next[k - 1] + &sys.jab * &vs[k] * h;
            next.push(resolvent.solve(&rhs));
        }
        increment = us
            .iter()
            .zip(&next)
            .map(|(a, b)| weighted_norm(&(a - b), wa))
            .fold(0.0, f64::max);
        us = next;
        if increment < tol {
            break;
        }
        if iterations >= PICARD_MAX_SWEEPS {
            return Err(Error::NotConverged { iterations });
        }
    }
    let mut trajectory = Trajectory::new(model);
    for (k, u) in us.into_iter().enumerate() {
        let v = closure.solve(&u);
        trajectory.push(sys, State { t: k as f64 * h, u, v });
    }
    Ok(PicardSolution { trajectory, iterations, contraction_factor: factor, last_increment: increment })
}

/// Kernels and initial profile for the interface-trace experiment on `A = (-1,0)`, `B = (0,1)`.
#[derive(Debug, Clone)]
pub struct JumpScenario {
    pub kernel_j: Kernel,
    pub kernel_g: Kernel,
    pub initial: fn(f64) -> f64,
}

impl JumpScenario {
    /// Box transmission kernel of radius 1, tent jump kernel of radius 1/2,
    /// and `u0(x) = 1 + x`, which peaks at the interface.
    pub fn standard() -> JumpScenario {
        JumpScenario {
            kernel_j: Kernel::box_kernel(1.0).expect("valid radius"),
            kernel_g: Kernel::tent(0.5).expect("valid radius"),
            initial: |x| 1.0 + x,
        }
    }

    /// `u0 ≡ 1`, for which the whole solution is the constant 1.
    pub fn constant() -> JumpScenario {
        JumpScenario { initial: |_| 1.0, ..JumpScenario::standard() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpReport {
    pub times: Vec<f64>,
    pub u_interface: Vec<f64>,
    pub v_interface: Vec<f64>,
    pub jump: Vec<f64>,
}

/// Traces the values in the two cells adjacent to the interface.
pub fn interface_jump_trace(
    sys: &DiscreteSystem,
    u0: &DVector<f64>,
    t_end: f64,
    dt: f64,
) -> Result<JumpReport> {
    let traj = integrate(sys, ModelKind::ParabolicElliptic, u0, t_end, dt, TimeScheme::ImplicitEuler)?;
    let (ia, ib) = if sys.partition.a().hi <= sys.partition.b().lo {
        (sys.n_a() - 1, 0)
    } else {
        (0, sys.n_b() - 1)
    };
    let mut report = JumpReport { times: Vec::new(), u_interface: Vec::new(), v_interface: Vec::new(), jump: Vec::new() };
    for s in &traj.snapshots {
        report.times.push(s.t);
        report.u_interface.push(s.u[ia]);
        report.v_interface.push(s.v[ib]);
        report.jump.push(s.u[ia] - s.v[ib]);
    }
    Ok(report)
}

/// Runs the parabolic–elliptic model on `A = (-1,0)`, `B = (0,1)` with
/// `resolution` cells per subdomain and reports the interface traces.
pub fn interface_jump_demo(resolution: usize, dt: f64, t_end: f64, scenario: &JumpScenario) -> Result<JumpReport> {
    let partition = Partition1D::new((-1.0, 0.0), (0.0, 1.0))?;
    let sys = assemble_system(partition, scenario.kernel_j.clone(), scenario.kernel_g.clone(), resolution, resolution)?;
    let u0 = sys.grid_a.sample(scenario.initial);
    interface_jump_trace(&sys, &u0, t_end, dt)
}
