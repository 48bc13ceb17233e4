//! Partitions, cell-centered grids and assembly of the discrete operators.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::{validate_hypothesis, Kernel};

/// Open interval `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidPartition(format!("interval ({lo}, {hi}) is empty or not finite")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The two disjoint subdomains: `A` carries the local operator, `B` the nonlocal one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partition1D {
    a: Interval,
    b: Interval,
}

impl Partition1D {
    pub fn new(a: (f64, f64), b: (f64, f64)) -> Result<Partition1D> {
        let a = Interval::new(a.0, a.1)?;
        let b = Interval::new(b.0, b.1)?;
        if a.lo < b.hi && b.lo < a.hi {
            return Err(Error::InvalidPartition(format!(
                "A = ({}, {}) and B = ({}, {}) overlap",
                a.lo, a.hi, b.lo, b.hi
            )));
        }
        Ok(Partition1D { a, b })
    }

    pub fn a(&self) -> Interval {
        self.a
    }

    pub fn b(&self) -> Interval {
        self.b
    }

    /// `inf |x - y|` over `x` in `A`, `y` in `B`.
    pub fn distance(&self) -> f64 {
        (self.b.lo - self.a.hi).max(self.a.lo - self.b.hi).max(0.0)
    }
}

/// Uniform cell-centered grid with midpoint quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    centers: Vec<f64>,
    h: f64,
    weights: Vec<f64>,
}

impl Grid {
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Samples `f` at the cell centers.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.centers.iter().map(|&x| f(x)))
    }
}

pub fn build_grid(interval: Interval, n: usize) -> Result<Grid> {
    if n < 2 {
        return Err(Error::InvalidResolution { n });
    }
    let h = interval.length() / n as f64;
    let centers = (0..n).map(|i| interval.lo + (i as f64 + 0.5) * h).collect();
    Ok(Grid { centers, h, weights: alloc::vec![h; n] })
}

/// Second-difference matrix with mirror ghost cells at both ends.
///
/// Symmetric, zero row sums, negative semidefinite; equals `-D^T D / h^2`
/// where `D` is the forward-difference matrix.
pub fn assemble_laplacian_neumann(grid: &Grid) -> DMatrix<f64> {
    let n = grid.len();
    let inv_h2 = 1.0 / (grid.h * grid.h);
    let mut lap = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        lap[(i, i)] -= inv_h2;
        lap[(i + 1, i + 1)] -= inv_h2;
        lap[(i, i + 1)] += inv_h2;
        lap[(i + 1, i)] += inv_h2;
    }
    lap
}

/// `M[i][j] = K(x_i - y_j) w_j`, so `(M v)_i` is the midpoint rule for `∫ K(x_i - y) v(y) dy`.
pub fn assemble_nonlocal(kernel: &Kernel, grid_x: &Grid, grid_y: &Grid) -> DMatrix<f64> {
    DMatrix::from_fn(grid_x.len(), grid_y.len(), |i, j| {
        kernel.eval(grid_x.centers[i] - grid_y.centers[j]) * grid_y.weights[j]
    })
}

/// All assembled operators of both coupled models.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub partition: Partition1D,
    pub kernel_j: Kernel,
    pub kernel_g: Kernel,
    pub grid_a: Grid,
    pub grid_b: Grid,
    /// Neumann Laplacian on `A`.
    pub lap: DMatrix<f64>,
    /// `G(x_i - y_j) w_j` on `B x B`.
    pub gbb: DMatrix<f64>,
    /// `J(x_i - y_j) w_j`, `x` in `A`, `y` in `B`.
    pub jab: DMatrix<f64>,
    /// `J(x_i - y_j) w_j`, `x` in `B`, `y` in `A`.
    pub jba: DMatrix<f64>,
    /// `a(x) = ∫_A J(x - y) dy` on `B`.
    pub a_vec: DVector<f64>,
    /// `b(x) = ∫_B J(x - y) dy` on `A`.
    pub b_vec: DVector<f64>,
    /// `∫_B G(x - y) dy` on `B`.
    pub g_vec: DVector<f64>,
}

/// Validates the support condition on `J`, then assembles.
pub fn assemble_system(
    partition: Partition1D,
    kernel_j: Kernel,
    kernel_g: Kernel,
    n_a: usize,
    n_b: usize,
) -> Result<DiscreteSystem> {
    let report = validate_hypothesis(&kernel_j, &partition);
    if !report.passed {
        return Err(Error::HypothesisViolation { dist: report.dist, radius: report.radius });
    }
    DiscreteSystem::assemble_unchecked(partition, kernel_j, kernel_g, n_a, n_b)
}

impl DiscreteSystem {
    /// Assembles without the support check, e.g. to study degenerate couplings.
    pub fn assemble_unchecked(
        partition: Partition1D,
        kernel_j: Kernel,
        kernel_g: Kernel,
        n_a: usize,
        n_b: usize,
    ) -> Result<DiscreteSystem> {
        let grid_a = build_grid(partition.a(), n_a)?;
        let grid_b = build_grid(partition.b(), n_b)?;
        let lap = assemble_laplacian_neumann(&grid_a);
        let gbb = assemble_nonlocal(&kernel_g, &grid_b, &grid_b);
        let jab = assemble_nonlocal(&kernel_j, &grid_a, &grid_b);
        let jba = assemble_nonlocal(&kernel_j, &grid_b, &grid_a);
        let a_vec = &jba * DVector::from_element(n_a, 1.0);
        let b_vec = &jab * DVector::from_element(n_b, 1.0);
        let g_vec = &gbb * DVector::from_element(n_b, 1.0);
        Ok(DiscreteSystem {
            partition,
            kernel_j,
            kernel_g,
            grid_a,
            grid_b,
            lap,
            gbb,
            jab,
            jba,
            a_vec,
            b_vec,
            g_vec,
        })
    }

    pub fn n_a(&self) -> usize {
        self.grid_a.len()
    }

    pub fn n_b(&self) -> usize {
        self.grid_b.len()
    }

    /// Nonlocal balance operator on `B`: `diag(g + a) - Gbb`.
    pub fn balance_matrix(&self) -> DMatrix<f64> {
        let mut m = -self.gbb.clone();
        for i in 0..self.n_b() {
            m[(i, i)] += self.g_vec[i] + self.a_vec[i];
        }
        m
    }

    /// Local operator on `A` with transmission absorption: `-L + diag(b)`.
    pub fn local_matrix(&self) -> DMatrix<f64> {
        let mut m = -self.lap.clone();
        for i in 0..self.n_a() {
            m[(i, i)] += self.b_vec[i];
        }
        m
    }

    /// `∫∫_{A x B} J(x - y)` by the same midpoint rule as the operators.
    pub fn transmission_mass(&self) -> f64 {
        self.b_vec.iter().zip(self.grid_a.weights()).map(|(b, w)| b * w).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_system(n_a: usize, n_b: usize) -> DiscreteSystem {
        let p = Partition1D::new((-1.0, 0.0), (0.0, 1.0)).unwrap();
        assemble_system(p, Kernel::box_kernel(1.0).unwrap(), Kernel::box_kernel(1.0).unwrap(), n_a, n_b)
            .unwrap()
    }

    #[test]
    fn midpoint_grid() {
        let g = build_grid(Interval::new(0.0, 1.0).unwrap(), 4).unwrap();
        assert_eq!(g.centers(), &[0.125, 0.375, 0.625, 0.875]);
        assert_eq!(g.h(), 0.25);
        let g = build_grid(Interval::new(-1.0, 0.0).unwrap(), 2).unwrap();
        assert_eq!(g.centers(), &[-0.75, -0.25]);
        assert!(matches!(
            build_grid(Interval::new(0.0, 1.0).unwrap(), 1),
            Err(Error::InvalidResolution { n: 1 })
        ));
    }

    #[test]
    fn weights_sum_to_length() {
        let g = build_grid(Interval::new(-0.3, 1.7).unwrap(), 37).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-13);
        for w in g.centers().windows(2) {
            assert!((w[1] - w[0] - g.h()).abs() < 1e-14);
        }
    }

    #[test]
    fn partition_rejects_overlap() {
        assert!(Partition1D::new((-1.0, 0.5), (0.0, 1.0)).is_err());
        assert!(Partition1D::new((0.0, 1.0), (-1.0, 0.0)).is_ok());
        assert!(Partition1D::new((1.0, 0.0), (2.0, 3.0)).is_err());
    }

    #[test]
    fn laplacian_three_cells() {
        let g = build_grid(Interval::new(0.0, 1.0).unwrap(), 3).unwrap();
        let lap = assemble_laplacian_neumann(&g);
        let s = 1.0 / (g.h() * g.h());
        let expected = DMatrix::from_row_slice(3, 3, &[-1.0, 1.0, 0.0, 1.0, -2.0, 1.0, 0.0, 1.0, -1.0]) * s;
        assert_eq!(lap, expected);
        let ones = DVector::from_element(3, 1.0);
        assert_eq!(&lap * ones, DVector::zeros(3));
    }

    #[test]
    fn laplacian_second_order_on_quadratic() {
        // interior residual of L x^2 against 2 on a refinement ladder
        for n in [16usize, 32, 64] {
            let g = build_grid(Interval::new(0.0, 1.0).unwrap(), n).unwrap();
            let lu = assemble_laplacian_neumann(&g) * g.sample(|x| x * x);
            for i in 1..n - 1 {
                assert!((lu[i] - 2.0).abs() < 1e-8, "n={n} i={i} {}", lu[i]);
            }
        }
    }

    #[test]
    fn reference_scenario_degree_positive() {
        let sys = reference_system(16, 16);
        assert!(sys.a_vec.iter().all(|&a| a > 0.0));
        assert!(sys.b_vec.iter().all(|&b| b > 0.0));
    }

    #[test]
    fn near_partition_degree_support() {
        let p = Partition1D::new((-1.0, 0.0), (0.4, 1.0)).unwrap();
        let sys = assemble_system(p, Kernel::box_kernel(0.5).unwrap(), Kernel::box_kernel(0.5).unwrap(), 20, 12)
            .unwrap();
        for (x, a) in sys.grid_b.centers().iter().zip(sys.a_vec.iter()) {
            if *x < 0.5 {
                assert!(*a > 0.0, "x={x}");
            } else {
                assert_eq!(*a, 0.0, "x={x}");
            }
        }
    }

    #[test]
    fn hypothesis_violation_propagates() {
        let p = Partition1D::new((-1.0, 0.0), (2.0, 3.0)).unwrap();
        let err = assemble_system(p, Kernel::box_kernel(0.5).unwrap(), Kernel::box_kernel(0.5).unwrap(), 4, 4)
            .unwrap_err();
        assert!(matches!(err, Error::HypothesisViolation { .. }));
    }

    #[test]
    fn structural_identities() {
        let p = Partition1D::new((-1.0, 0.0), (0.0, 1.5)).unwrap();
        let sys = assemble_system(
            p,
            Kernel::tent(0.7).unwrap(),
            Kernel::truncated_gaussian(0.2, 0.5).unwrap(),
            13,
            9,
        )
        .unwrap();
        let (wa, wb) = (sys.grid_a.weights(), sys.grid_b.weights());
        for i in 0..sys.n_a() {
            let row: f64 = sys.lap.row(i).iter().sum();
            assert!(row.abs() < 1e-13 * 13.0 * 13.0);
            for j in 0..sys.n_a() {
                assert_eq!(sys.lap[(i, j)], sys.lap[(j, i)]);
            }
        }
        for i in 0..sys.n_b() {
            for j in 0..sys.n_b() {
                assert!((sys.gbb[(i, j)] / wb[j] - sys.gbb[(j, i)] / wb[i]).abs() < 1e-13);
            }
        }
        for i in 0..sys.n_a() {
            for j in 0..sys.n_b() {
                assert!((sys.jab[(i, j)] / wb[j] - sys.jba[(j, i)] / wa[i]).abs() < 1e-13);
            }
        }
        // degree vectors are recomputable bit-for-bit
        let recomputed: Vec<f64> = (0..sys.n_b()).map(|i| sys.jba.row(i).iter().sum()).collect();
        assert_eq!(sys.a_vec.as_slice(), recomputed.as_slice());
        let recomputed: Vec<f64> = (0..sys.n_a()).map(|i| sys.jab.row(i).iter().sum()).collect();
        assert_eq!(sys.b_vec.as_slice(), recomputed.as_slice());
        let recomputed: Vec<f64> = (0..sys.n_b()).map(|i| sys.gbb.row(i).iter().sum()).collect();
        assert_eq!(sys.g_vec.as_slice(), recomputed.as_slice());
    }

    #[test]
    fn assembly_is_deterministic() {
        let a = reference_system(11, 7);
        let b = reference_system(11, 7);
        assert_eq!(a.jab, b.jab);
        assert_eq!(a.gbb, b.gbb);
        assert_eq!(a.a_vec, b.a_vec);
    }
}
