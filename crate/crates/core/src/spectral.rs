//! Spectral gap of the reduced generators and exponential-decay certificates.

use alloc::vec::Vec;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::evolution::{schur_generator, step_count, ExactFlow, ModelKind};
use crate::linalg::{sym_eigen, symmetrize_weighted, weighted_mean, weighted_norm};
use crate::mesh::DiscreteSystem;

/// Spectral gap `λ₁` of a model with its weighted-mean-zero eigenvector.
///
/// `eigenvector` lives on the evolving grid (`A` for the parabolic–elliptic
/// model, `B` for the elliptic–parabolic one) and has unit weighted norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    pub model: ModelKind,
    pub lambda1: f64,
    pub eigenvector: DVector<f64>,
    pub constant_mode_eigenvalue: f64,
    pub residual: f64,
}

/// Second eigenvalue of `W^{1/2} S W^{-1/2}` after projecting out the constant mode.
pub fn lambda1(sys: &DiscreteSystem, model: ModelKind) -> Result<SpectralResult> {
    let s = schur_generator(sys, model)?;
    let w = model.evolving_weights(sys);
    let n = w.len();
    let sym = symmetrize_weighted(&s, w);

    let mut q = DVector::from_iterator(n, w.iter().map(|w| libm::sqrt(*w)));
    q /= q.norm();
    let constant_mode_eigenvalue = q.dot(&(&sym * &q));

    // P S P with P = I - q q^T
    let sq = &sym * &q;
    let qs = sym.tr_mul(&q);
    let projected = &sym - &sq * q.transpose() - &q * qs.transpose() + &q * q.transpose() * constant_mode_eigenvalue;
    let (values, vectors) = sym_eigen(projected)?;

    let k = (0..n)
        .filter(|&k| vectors.column(k).dot(&q).abs() < 0.5)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .ok_or(Error::EigFailure)?;
    let lambda1 = values[k];
    let phi: DVector<f64> = vectors.column(k).into_owned();
    let residual = (&sym * &phi - &phi * lambda1).norm();

    let mut eigenvector = DVector::from_iterator(n, phi.iter().zip(w).map(|(p, w)| p / libm::sqrt(*w)));
    let mean = weighted_mean(&eigenvector, w);
    eigenvector.add_scalar_mut(-mean);
    let norm = weighted_norm(&eigenvector, w);
    eigenvector /= norm;
    // fix the sign so output is reproducible
    if eigenvector[0] < 0.0 {
        eigenvector = -eigenvector;
    }
    Ok(SpectralResult { model, lambda1, eigenvector, constant_mode_eigenvalue, residual })
}

/// Least-squares slope of `-ln(norm)` against time.
pub fn fit_decay_rate(times: &[f64], norms: &[f64]) -> Result<f64> {
    if times.len() != norms.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), got: norms.len() });
    }
    if times.len() < 3 || norms.iter().any(|&n| !(n > 1e-300)) {
        return Err(Error::DegenerateFit);
    }
    let m = times.len() as f64;
    let logs: Vec<f64> = norms.iter().map(|n| -libm::log(*n)).collect();
    let t_mean = times.iter().sum::<f64>() / m;
    let l_mean = logs.iter().sum::<f64>() / m;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (t, l) in times.iter().zip(&logs) {
        sxy += (t - t_mean) * (l - l_mean);
        sxx += (t - t_mean) * (t - t_mean);
    }
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit);
    }
    Ok(sxy / sxx)
}

/// Relative slack allowed on `‖x(t) - x̄‖ ≤ e^{-λ₁ t} ‖x0 - x̄‖`.
pub const DECAY_BOUND_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCertificate {
    pub bound_holds: bool,
    /// `None` when the deviation from the mean vanishes identically.
    pub fitted_rate: Option<f64>,
    pub lambda1: f64,
    pub times: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Largest `‖x(t) - x̄‖ / (e^{-λ₁ t} ‖x0 - x̄‖)` over the samples.
    pub worst_ratio: f64,
}

/// Checks the exponential decay bound along the semi-discrete flow sampled every `dt`.
///
/// The evolving datum has its weighted mean removed first; the flow is
/// propagated exactly through the eigendecomposition of the generator.
pub fn decay_certificate(
    sys: &DiscreteSystem,
    model: ModelKind,
    init: &DVector<f64>,
    t_end: f64,
    dt: f64,
) -> Result<DecayCertificate> {
    let w = model.evolving_weights(sys);
    if init.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: w.len(), got: init.len() });
    }
    let spectral = lambda1(sys, model)?;
    let lam = spectral.lambda1;
    let flow = ExactFlow::new(&schur_generator(sys, model)?, w)?;
    let mut x0 = init.add_scalar(-weighted_mean(init, w));
    let mut d0 = weighted_norm(&x0, w);
    // roundoff left over from subtracting the mean of a constant
    if d0 <= 1e-13 * weighted_norm(init, w).max(1.0) {
        x0.fill(0.0);
        d0 = 0.0;
    }

    let steps = step_count(t_end, dt)?;
    let h = t_end / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut deviations = Vec::with_capacity(steps + 1);
    let mut bound_holds = true;
    let mut worst_ratio: f64 = 0.0;
    for k in 0..=steps {
        let t = k as f64 * h;
        let dev = weighted_norm(&flow.apply(t, &x0), w);
        let bound = libm::exp(-lam * t) * d0;
        if dev > bound * (1.0 + DECAY_BOUND_SLACK) {
            bound_holds = false;
        }
        if bound > 0.0 {
            worst_ratio = worst_ratio.max(dev / bound);
        }
        times.push(t);
        deviations.push(dev);
    }

    let half = times.len() / 2;
    let fitted_rate = fit_decay_rate(&times[half..], &deviations[half..]).ok();
    Ok(DecayCertificate { bound_holds, fitted_rate, lambda1: lam, times, deviations, worst_ratio })
}
