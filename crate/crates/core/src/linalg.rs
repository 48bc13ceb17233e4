//! Dense linear-algebra helpers shared by the solvers.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, LU};

use crate::error::{Error, Result};

const PIVOT_RTOL: f64 = 1e-13;

/// LU factorization that refuses numerically singular matrices.
#[derive(Debug, Clone)]
pub struct Factorized {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Factorized {
    pub fn new(m: DMatrix<f64>, what: &'static str) -> Result<Factorized> {
        let lu = m.lu();
        let u = lu.u();
        let diag = u.diagonal();
        let max = diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
        let min = diag.iter().fold(f64::INFINITY, |acc, d| acc.min(d.abs()));
        if !(max > 0.0) || !(min > PIVOT_RTOL * max) {
            return Err(Error::SingularSystem(what));
        }
        Ok(Factorized { lu })
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.lu.solve(rhs).expect("factorization checked for singularity")
    }

    pub fn solve_matrix(&self, rhs: &DMatrix<f64>) -> DMatrix<f64> {
        self.lu.solve(rhs).expect("factorization checked for singularity")
    }
}

pub fn weighted_dot(x: &DVector<f64>, y: &DVector<f64>, w: &[f64]) -> f64 {
    x.iter().zip(y.iter()).zip(w).map(|((a, b), w)| a * b * w).sum()
}

pub fn weighted_norm(x: &DVector<f64>, w: &[f64]) -> f64 {
    libm::sqrt(weighted_dot(x, x, w))
}

/// `Σ x_i w_i`.
pub fn weighted_sum(x: &DVector<f64>, w: &[f64]) -> f64 {
    x.iter().zip(w).map(|(a, w)| a * w).sum()
}

pub fn weighted_mean(x: &DVector<f64>, w: &[f64]) -> f64 {
    weighted_sum(x, w) / w.iter().sum::<f64>()
}

/// `W^{1/2} S W^{-1/2}`, symmetrized to clear roundoff.
pub fn symmetrize_weighted(s: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let n = s.nrows();
    let sq: Vec<f64> = w.iter().map(|w| libm::sqrt(*w)).collect();
    let x = DMatrix::from_fn(n, n, |i, j| sq[i] * s[(i, j)] / sq[j]);
    (&x + x.transpose()) * 0.5
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
pub fn sym_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let eig = m.try_symmetric_eigen(f64::EPSILON, 10_000).ok_or(Error::EigFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    let gram = m.transpose() * m;
    let (values, _) = sym_eigen(gram)?;
    Ok(libm::sqrt(values.last().copied().unwrap_or(0.0).max(0.0)))
}

// Padé [13/13] coefficients for exp.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm_pade(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let norm = norm1(a);
    let s = if norm > THETA13 { libm::ceil(libm::log2(norm / THETA13)) as i32 } else { 0 };
    let a = a * libm::pow(2.0, -(s as f64));
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9]) + &a6 * b[7] + &a4 * b[5] + &a2 * b[3]
        + &ident * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8]) + &a6 * b[6] + &a4 * b[4] + &a2 * b[2]
        + &ident * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = Factorized::new(q, "Padé denominator")?.solve_matrix(&p);
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}
