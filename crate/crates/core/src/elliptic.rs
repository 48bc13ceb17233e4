//! The two stationary constraints and the discrete coercivity constant.
//!
//! Model 1 closes `v` on `B` from the nonlocal balance
//! `(diag(g + a) - Gbb) v = Jba u`; model 2 closes `u` on `A` from the
//! Neumann problem `(-L + diag(b)) u = Jab v`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, sym_eigen, symmetrize_weighted, weighted_norm, Factorized};
use crate::mesh::DiscreteSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Direct,
    JacobiFixedPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSolveReport {
    pub solution: DVector<f64>,
    pub residual_norm: f64,
    pub method: SolveMethod,
}

fn check_len(v: &DVector<f64>, expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: v.len() });
    }
    Ok(())
}

/// Reusable factorization of one constraint block together with its coupling.
#[derive(Debug, Clone)]
pub struct ConstraintSolver {
    lhs: DMatrix<f64>,
    coupling: DMatrix<f64>,
    factor: Factorized,
}

impl ConstraintSolver {
    /// Solver for `v` given `u` (model 1).
    pub fn balance(sys: &DiscreteSystem) -> Result<ConstraintSolver> {
        if sys.a_vec.iter().all(|&a| a <= 0.0) {
            return Err(Error::SingularSystem("J does not reach B: nonlocal balance is singular"));
        }
        let lhs = sys.balance_matrix();
        let factor = Factorized::new(lhs.clone(), "nonlocal balance on B")?;
        Ok(ConstraintSolver { lhs, coupling: sys.jba.clone(), factor })
    }

    /// Solver for `u` given `v` (model 2).
    pub fn local(sys: &DiscreteSystem) -> Result<ConstraintSolver> {
        if sys.b_vec.iter().all(|&b| b <= 0.0) {
            return Err(Error::SingularSystem("J does not reach A: Neumann problem is singular"));
        }
        let lhs = sys.local_matrix();
        let factor = Factorized::new(lhs.clone(), "Neumann problem on A")?;
        Ok(ConstraintSolver { lhs, coupling: sys.jab.clone(), factor })
    }

    pub fn solve(&self, data: &DVector<f64>) -> DVector<f64> {
        self.factor.solve(&(&self.coupling * data))
    }

    pub fn solve_report(&self, data: &DVector<f64>) -> EllipticSolveReport {
        let rhs = &self.coupling * data;
        let mut x = self.factor.solve(&rhs);
        // one step of iterative refinement
        let r = &rhs - &self.lhs * &x;
        x += self.factor.solve(&r);
        let residual_norm = (&rhs - &self.lhs * &x).norm();
        EllipticSolveReport { solution: x, residual_norm, method: SolveMethod::Direct }
    }

    /// The linear map from data to solution as a dense matrix.
    pub fn operator(&self) -> DMatrix<f64> {
        self.factor.solve_matrix(&self.coupling)
    }
}

pub fn solve_v_given_u(sys: &DiscreteSystem, u: &DVector<f64>) -> Result<EllipticSolveReport> {
    check_len(u, sys.n_a())?;
    Ok(ConstraintSolver::balance(sys)?.solve_report(u))
}

pub fn solve_u_given_v(sys: &DiscreteSystem, v: &DVector<f64>) -> Result<EllipticSolveReport> {
    check_len(v, sys.n_b())?;
    Ok(ConstraintSolver::local(sys)?.solve_report(v))
}

/// `k` Jacobi sweeps `v <- (Gbb v + Jba u) / (g + a)`.
///
/// Cells with `g + a = 0` have no neighbours at all and keep their value.
pub fn v_formula_iterate(sys: &DiscreteSystem, u: &DVector<f64>, v0: &DVector<f64>, k: usize) -> DVector<f64> {
    let source = &sys.jba * u;
    let degree = &sys.g_vec + &sys.a_vec;
    let mut v = v0.clone();
    for _ in 0..k {
        let gv = &sys.gbb * &v;
        for i in 0..v.len() {
            if degree[i] > 0.0 {
                v[i] = (gv[i] + source[i]) / degree[i];
            }
        }
    }
    v
}

/// Smallest eigenvalue of the balance form relative to the weighted norm, with its eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct Coercivity {
    pub constant: f64,
    pub eigenvector: DVector<f64>,
}

impl Coercivity {
    pub fn holds(&self) -> bool {
        self.constant > 1e-12
    }
}

pub fn coercivity_constant(sys: &DiscreteSystem) -> Result<Coercivity> {
    let w = sys.grid_b.weights();
    let sym = symmetrize_weighted(&sys.balance_matrix(), w);
    let (values, vectors) = sym_eigen(sym)?;
    let mut eigenvector = DVector::from_iterator(
        w.len(),
        vectors.column(0).iter().zip(w).map(|(x, w)| x / libm::sqrt(*w)),
    );
    let norm = weighted_norm(&eigenvector, w);
    eigenvector /= norm;
    if eigenvector.sum() < 0.0 {
        eigenvector = -eigenvector;
    }
    Ok(Coercivity { constant: values[0].max(0.0), eigenvector })
}

/// Lipschitz constant of `u -> v(u)` between the weighted norms on `A` and `B`.
pub fn lipschitz_constant(sys: &DiscreteSystem) -> Result<f64> {
    let op = ConstraintSolver::balance(sys)?.operator();
    let (wa, wb) = (sys.grid_a.weights(), sys.grid_b.weights());
    let scaled = DMatrix::from_fn(op.nrows(), op.ncols(), |i, j| {
        libm::sqrt(wb[i]) * op[(i, j)] / libm::sqrt(wa[j])
    });
    spectral_norm(&scaled)
}
