//! Independent oracles shared by the integration tests.
//!
//! Nothing here touches the assembled matrices or the library solvers: sums
//! are evaluated from kernel values at cell centers, linear systems go
//! through a hand-rolled Gaussian elimination, and eigenvalues through
//! cyclic Jacobi rotations.

#![allow(dead_code, clippy::needless_range_loop)]

use locnl_core::{assemble_system, DVector, DiscreteSystem, Kernel, Partition1D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn system(n_a: usize, n_b: usize, j: Kernel, g: Kernel) -> DiscreteSystem {
    let p = Partition1D::new((-1.0, 0.0), (0.0, 1.0)).unwrap();
    assemble_system(p, j, g, n_a, n_b).unwrap()
}

/// Box kernels of radius 1 on `A = (-1,0)`, `B = (0,1)`.
pub fn reference(n_a: usize, n_b: usize) -> DiscreteSystem {
    system(n_a, n_b, Kernel::box_kernel(1.0).unwrap(), Kernel::box_kernel(1.0).unwrap())
}

/// Box `J` of radius 1 with a narrower tent `G`.
pub fn mixed(n_a: usize, n_b: usize) -> DiscreteSystem {
    system(n_a, n_b, Kernel::box_kernel(1.0).unwrap(), Kernel::tent(0.5).unwrap())
}

pub fn weighted_norm(x: &[f64], w: &[f64]) -> f64 {
    x.iter().zip(w).map(|(x, w)| x * x * w).sum::<f64>().sqrt()
}

pub fn weighted_sum(x: &[f64], w: &[f64]) -> f64 {
    x.iter().zip(w).map(|(x, w)| x * w).sum()
}

pub fn grad_sq(u: &[f64], h: f64) -> f64 {
    u.windows(2).map(|p| (p[1] - p[0]) * (p[1] - p[0]) / h).sum()
}

struct Pts<'a> {
    xa: &'a [f64],
    wa: &'a [f64],
    xb: &'a [f64],
    wb: &'a [f64],
}

fn pts(sys: &DiscreteSystem) -> Pts<'_> {
    Pts { xa: sys.grid_a.centers(), wa: sys.grid_a.weights(), xb: sys.grid_b.centers(), wb: sys.grid_b.weights() }
}

/// `ΣΣ G(x_i - x_j) (v_j - v_i)^2 w_i w_j`.
pub fn g_sum(sys: &DiscreteSystem, v: &[f64]) -> f64 {
    let p = pts(sys);
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in 0..v.len() {
            s += sys.kernel_g.eval(p.xb[i] - p.xb[j]) * (v[j] - v[i]).powi(2) * p.wb[i] * p.wb[j];
        }
    }
    s
}

/// `ΣΣ J(x_i - y_j) (u_i - v_j)^2 w_i w_j`.
pub fn j_sum(sys: &DiscreteSystem, u: &[f64], v: &[f64]) -> f64 {
    let p = pts(sys);
    let mut s = 0.0;
    for i in 0..u.len() {
        for j in 0..v.len() {
            s += sys.kernel_j.eval(p.xa[i] - p.xb[j]) * (u[i] - v[j]).powi(2) * p.wa[i] * p.wb[j];
        }
    }
    s
}

pub fn naive_ev(sys: &DiscreteSystem, u: &[f64], v: &[f64]) -> f64 {
    let p = pts(sys);
    let mut s = 0.5 * grad_sq(u, sys.grid_a.h());
    for i in 0..u.len() {
        for j in 0..v.len() {
            let k = sys.kernel_j.eval(p.xa[i] - p.xb[j]) * p.wa[i] * p.wb[j];
            s += 0.5 * k * u[i] * u[i] - k * u[i] * v[j];
        }
    }
    s
}

pub fn naive_f(sys: &DiscreteSystem, u: &[f64], v: &[f64]) -> f64 {
    0.25 * g_sum(sys, v) + 0.5 * j_sum(sys, u, v)
}

/// `(F_u(v), E(u))` of the elliptic–parabolic model.
pub fn naive_model2(sys: &DiscreteSystem, u: &[f64], v: &[f64]) -> (f64, f64) {
    let p = pts(sys);
    let mut f = 0.25 * g_sum(sys, v);
    for i in 0..u.len() {
        for j in 0..v.len() {
            let k = sys.kernel_j.eval(p.xa[i] - p.xb[j]) * p.wa[i] * p.wb[j];
            f += 0.5 * k * v[j] * v[j] - k * u[i] * v[j];
        }
    }
    let e = 0.5 * grad_sq(u, sys.grid_a.h()) + 0.5 * j_sum(sys, u, v);
    (f, e)
}

pub fn naive_dissipation(sys: &DiscreteSystem, u: &[f64], v: &[f64]) -> f64 {
    grad_sq(u, sys.grid_a.h()) + 0.5 * g_sum(sys, v) + j_sum(sys, u, v)
}

/// Gradient by unit-step central differences, which is exact for quadratics up to roundoff.
pub fn quadratic_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|k| {
            y[k] = x[k] + 1.0;
            let fp = f(&y);
            y[k] = x[k] - 1.0;
            let fm = f(&y);
            y[k] = x[k];
            0.5 * (fp - fm)
        })
        .collect()
}

/// Steepest descent with exact line search on a convex quadratic, run until the gradient norm is below `tol`.
pub fn minimize_quadratic(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], tol: f64) -> Vec<f64> {
    let mut x = x0.to_vec();
    for _ in 0..1_000_000 {
        let g = quadratic_gradient(f, &x);
        let gn = g.iter().map(|c| c * c).sum::<f64>().sqrt();
        if gn < tol {
            return x;
        }
        let d: Vec<f64> = g.iter().map(|c| -c / gn).collect();
        let plus: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
        let minus: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a - b).collect();
        let curvature = f(&plus) + f(&minus) - 2.0 * f(&x);
        let t = gn / curvature;
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += t * di;
        }
    }
    panic!("gradient descent did not reach {tol}");
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= m * a[c][k];
            }
            b[r] -= m * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Simpson's rule with `panels` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut s = f(lo) + f(hi);
    for k in 1..panels {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(lo + k as f64 * h);
    }
    s * h / 3.0
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
