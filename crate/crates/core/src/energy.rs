//! Discrete energy functionals and the dissipation form.
//!
//! All double integrals use the same midpoint rule as the assembled
//! operators, and gradients on `A` are forward differences, so that
//! `-L = D^T D / h^2` and summation by parts holds exactly.

use nalgebra::DVector;

use crate::elliptic::ConstraintSolver;
use crate::error::Result;
use crate::evolution::ModelKind;
use crate::mesh::DiscreteSystem;

/// The three dissipation contributions and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub grad_term: f64,
    pub g_term: f64,
    pub j_term: f64,
    pub total: f64,
}

/// `Σ |(u_{i+1} - u_i)/h|^2 h` over the interior faces of `A`.
pub fn gradient_energy(sys: &DiscreteSystem, u: &DVector<f64>) -> f64 {
    let h = sys.grid_a.h();
    (0..u.len().saturating_sub(1))
        .map(|i| {
            let d = (u[i + 1] - u[i]) / h;
            d * d * h
        })
        .sum()
}

/// `ΣΣ G(x_i - x_j) (v_j - v_i)^2 w_i w_j` on `B x B`.
pub fn g_form(sys: &DiscreteSystem, v: &DVector<f64>) -> f64 {
    let w = sys.grid_b.weights();
    let mut acc = 0.0;
    for i in 0..v.len() {
        let mut row = 0.0;
        for j in 0..v.len() {
            let d = v[j] - v[i];
            row += sys.gbb[(i, j)] * d * d;
        }
        acc += w[i] * row;
    }
    acc
}

/// `ΣΣ J(x_i - y_j) (u_i - v_j)^2 w_i w_j` over `A x B`.
pub fn j_form(sys: &DiscreteSystem, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let w = sys.grid_a.weights();
    let mut acc = 0.0;
    for i in 0..u.len() {
        let mut row = 0.0;
        for j in 0..v.len() {
            let d = u[i] - v[j];
            row += sys.jab[(i, j)] * d * d;
        }
        acc += w[i] * row;
    }
    acc
}

/// `ΣΣ J(x_i - y_j) u_i v_j w_i w_j` over `A x B`.
fn j_cross(sys: &DiscreteSystem, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let jv = &sys.jab * v;
    u.iter().zip(jv.iter()).zip(sys.grid_a.weights()).map(|((u, jv), w)| u * jv * w).sum()
}

/// Energy whose gradient flow in `u` (with `v` frozen) is the heat equation on `A`.
pub fn energy_ev(sys: &DiscreteSystem, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let wa = sys.grid_a.weights();
    let absorb: f64 = (0..u.len()).map(|i| sys.b_vec[i] * u[i] * u[i] * wa[i]).sum();
    0.5 * gradient_energy(sys, u) + 0.5 * absorb - j_cross(sys, u, v)
}

/// Energy minimized by the nonlocal balance on `B`.
pub fn energy_f(sys: &DiscreteSystem, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    0.25 * g_form(sys, v) + 0.5 * j_form(sys, u, v)
}

/// `(F_u(v), E(u))` for the elliptic–parabolic model.
///
/// `F_u` drives the nonlocal evolution on `B` with `u` frozen; `E` is minimized
/// by the Neumann constraint on `A`.
pub fn energy_model2(sys: &DiscreteSystem, u: &DVector<f64>, v: &DVector<f64>) -> (f64, f64) {
    let wb = sys.grid_b.weights();
    let absorb: f64 = (0..v.len()).map(|j| sys.a_vec[j] * v[j] * v[j] * wb[j]).sum();
    let f_u = 0.25 * g_form(sys, v) + 0.5 * absorb - j_cross(sys, u, v);
    let e = 0.5 * gradient_energy(sys, u) + 0.5 * j_form(sys, u, v);
    (f_u, e)
}

/// Dissipation `Σ|∇u|² + ½ G-form + J-form` at a given pair.
pub fn dissipation_form(sys: &DiscreteSystem, u: &DVector<f64>, v: &DVector<f64>) -> EnergyBreakdown {
    let grad_term = gradient_energy(sys, u);
    let g_term = 0.5 * g_form(sys, v);
    let j_term = j_form(sys, u, v);
    EnergyBreakdown { grad_term, g_term, j_term, total: grad_term + g_term + j_term }
}

/// Dissipation of the parabolic–elliptic model at `u`, with `v` closed by the balance.
///
/// Semi-discretely `d/dt ½‖u‖²_w = -D(u)`.
pub fn dissipation(sys: &DiscreteSystem, u: &DVector<f64>) -> Result<EnergyBreakdown> {
    dissipation_for(sys, ModelKind::ParabolicElliptic, u)
}

/// Dissipation for either model given its evolving component.
pub fn dissipation_for(sys: &DiscreteSystem, model: ModelKind, evolving: &DVector<f64>) -> Result<EnergyBreakdown> {
    Ok(match model {
        ModelKind::ParabolicElliptic => {
            let v = ConstraintSolver::balance(sys)?.solve(evolving);
            dissipation_form(sys, evolving, &v)
        }
        ModelKind::EllipticParabolic => {
            let u = ConstraintSolver::local(sys)?.solve(evolving);
            dissipation_form(sys, &u, evolving)
        }
    })
}
