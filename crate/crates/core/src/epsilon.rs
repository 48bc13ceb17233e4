//! Fully parabolic relaxations and their convergence to the coupled limits.
//!
//! For the parabolic–elliptic model the fast component is `v`:
//! `u' = L u + Jab v - b u`, `ε v' = Gbb v - g v + Jba u - a v`.
//! For the elliptic–parabolic model `ε` multiplies `u'` instead. Both share
//! the joint generator `Q = [[-L + diag(b), -Jab], [-Jba, diag(g+a) - Gbb]]`
//! and are stepped with implicit Euler on the joint vector.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::evolution::{integrate, step_count, ModelKind, State, TimeScheme, Trajectory};
use crate::linalg::{weighted_norm, Factorized};
use crate::mesh::DiscreteSystem;

/// Joint generator on `(u, v)`.
pub fn joint_generator(sys: &DiscreteSystem) -> DMatrix<f64> {
    let (na, nb) = (sys.n_a(), sys.n_b());
    let mut q = DMatrix::zeros(na + nb, na + nb);
    q.view_mut((0, 0), (na, na)).copy_from(&sys.local_matrix());
    q.view_mut((0, na), (na, nb)).copy_from(&(-&sys.jab));
    q.view_mut((na, 0), (nb, na)).copy_from(&(-&sys.jba));
    q.view_mut((na, na), (nb, nb)).copy_from(&sys.balance_matrix());
    q
}

fn time_scales(sys: &DiscreteSystem, model: ModelKind, eps: f64) -> DVector<f64> {
    let (na, nb) = (sys.n_a(), sys.n_b());
    DVector::from_fn(na + nb, |i, _| match (model, i < na) {
        (ModelKind::ParabolicElliptic, false) | (ModelKind::EllipticParabolic, true) => eps,
        _ => 1.0,
    })
}

/// Integrates the ε-relaxed system from `(u0, v0)` with joint implicit Euler.
///
/// `eps = 0` is accepted and reproduces the coupled limit; the fast initial
/// datum is then replaced by its elliptic solve.
pub fn solve_epsilon(
    sys: &DiscreteSystem,
    model: ModelKind,
    eps: f64,
    u0: &DVector<f64>,
    v0: &DVector<f64>,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("relaxation parameter must be nonnegative, got {eps}")));
    }
    let (na, nb) = (sys.n_a(), sys.n_b());
    if u0.len() != na {
        return Err(Error::DimensionMismatch { expected: na, got: u0.len() });
    }
    if v0.len() != nb {
        return Err(Error::DimensionMismatch { expected: nb, got: v0.len() });
    }
    let steps = step_count(t_end, dt)?;
    let h = t_end / steps as f64;
    let scales = time_scales(sys, model, eps);
    let lhs = DMatrix::from_diagonal(&scales) + joint_generator(sys) * h;
    let factor = Factorized::new(lhs, "relaxed joint system")?;

    let mut traj = Trajectory::new(model);
    let first = if eps == 0.0 {
        match model {
            ModelKind::ParabolicElliptic => {
                State { t: 0.0, u: u0.clone(), v: model.constraint(sys)?.solve(u0) }
            }
            ModelKind::EllipticParabolic => {
                State { t: 0.0, u: model.constraint(sys)?.solve(v0), v: v0.clone() }
            }
        }
    } else {
        State { t: 0.0, u: u0.clone(), v: v0.clone() }
    };
    let mut y = DVector::zeros(na + nb);
    y.rows_mut(0, na).copy_from(&first.u);
    y.rows_mut(na, nb).copy_from(&first.v);
    traj.push(sys, first);
    for k in 1..=steps {
        y = factor.solve(&y.component_mul(&scales));
        traj.push(
            sys,
            State { t: k as f64 * h, u: y.rows(0, na).into_owned(), v: y.rows(na, nb).into_owned() },
        );
    }
    Ok(traj)
}

/// Distances of the relaxed trajectories to the coupled limit along an ε ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonStudy {
    pub model: ModelKind,
    pub eps_ladder: Vec<f64>,
    /// `L²(A x [0,T])` distance of `u`.
    pub errors_u: Vec<f64>,
    /// Largest `L²(B)` distance of `v` over `[t_layer, T]`.
    pub errors_v_tail: Vec<f64>,
    /// Largest distance of the fast component over `[0, t_layer)`.
    pub errors_layer: Vec<f64>,
    pub t_layer: f64,
    /// Slope of `ln(errors_u)` against `ln(ε)`.
    pub observed_order: f64,
}

/// Default initial-layer cutoff as a fraction of the horizon.
pub const DEFAULT_LAYER_FRACTION: f64 = 0.05;

#[allow(clippy::too_many_arguments)]
pub fn convergence_study(
    sys: &DiscreteSystem,
    model: ModelKind,
    eps_ladder: &[f64],
    u0: &DVector<f64>,
    v0: &DVector<f64>,
    t_end: f64,
    dt: f64,
    t_layer: Option<f64>,
) -> Result<EpsilonStudy> {
    if eps_ladder.len() < 3 {
        return Err(Error::InvalidArgument("ε ladder needs at least 3 rungs".into()));
    }
    if eps_ladder.iter().any(|e| !(e.is_finite() && *e > 0.0)) || eps_ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("ε ladder must be positive and strictly decreasing".into()));
    }
    let t_layer = t_layer.unwrap_or(DEFAULT_LAYER_FRACTION * t_end);
    if !(t_layer > 0.0 && t_layer <= t_end) {
        return Err(Error::InvalidArgument(alloc::format!("layer cutoff {t_layer} outside (0, T]")));
    }
    let slow = match model {
        ModelKind::ParabolicElliptic => u0,
        ModelKind::EllipticParabolic => v0,
    };
    let limit = integrate(sys, model, slow, t_end, dt, TimeScheme::ImplicitEuler)?;
    let (wa, wb) = (sys.grid_a.weights(), sys.grid_b.weights());

    let mut errors_u = Vec::new();
    let mut errors_v_tail = Vec::new();
    let mut errors_layer = Vec::new();
    for &eps in eps_ladder {
        let relaxed = solve_epsilon(sys, model, eps, u0, v0, t_end, dt)?;
        let mut sq = 0.0;
        let mut tail: f64 = 0.0;
        let mut layer: f64 = 0.0;
        for (k, (a, b)) in relaxed.snapshots.iter().zip(&limit.snapshots).enumerate() {
            let du = weighted_norm(&(&a.u - &b.u), wa);
            let dv = weighted_norm(&(&a.v - &b.v), wb);
            if k > 0 {
                sq += (a.t - relaxed.snapshots[k - 1].t) * du * du;
            }
            if a.t >= t_layer * (1.0 - 1e-12) {
                tail = tail.max(dv);
            } else {
                let fast = match model {
                    ModelKind::ParabolicElliptic => dv,
                    ModelKind::EllipticParabolic => du,
                };
                layer = layer.max(fast);
            }
        }
        errors_u.push(libm::sqrt(sq));
        errors_v_tail.push(tail);
        errors_layer.push(layer);
    }
    let observed_order = log_slope(eps_ladder, &errors_u);
    Ok(EpsilonStudy {
        model,
        eps_ladder: eps_ladder.to_vec(),
        errors_u,
        errors_v_tail,
        errors_layer,
        t_layer,
        observed_order,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| libm::log(*v)).collect();
    let ly: Vec<f64> = y.iter().map(|v| libm::log(*v)).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
