//! Radial interaction kernels with compact support and unit mass.
//!
//! A [`Kernel`] is a nonnegative even profile supported in `[-radius, radius]`,
//! scaled so that its integral over the line is one. Both the cross-domain
//! transmission kernel `J` and the in-domain jump kernel `G` are of this form.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mesh::Partition1D;

/// Number of composite-Simpson subintervals used to normalize analytic profiles.
pub const NORMALIZATION_PANELS: usize = 4096;

const ZERO_MASS_THRESHOLD: f64 = 1e-14;

/// Unscaled radial shape of a kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// Constant on the support.
    Box,
    /// Linear decay from the center to zero at the support radius.
    Tent,
    /// Gaussian `exp(-r^2 / 2 sigma^2)` cut off at the support radius.
    TruncatedGaussian { sigma: f64 },
    /// Piecewise-linear through `(radius, value)` samples, zero past the last sample.
    Table(Vec<(f64, f64)>),
}

impl Profile {
    fn raw(&self, r: f64, radius: f64) -> f64 {
        let r = libm::fabs(r);
        if r > radius {
            return 0.0;
        }
        match self {
            Profile::Box => 1.0,
            Profile::Tent => 1.0 - r / radius,
            Profile::TruncatedGaussian { sigma } => libm::exp(-r * r / (2.0 * sigma * sigma)),
            Profile::Table(samples) => table_lookup(samples, r),
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            Profile::TruncatedGaussian { sigma } if !(sigma.is_finite() && *sigma > 0.0) => {
                Err(Error::InvalidKernel(format!("gaussian sigma must be positive, got {sigma}")))
            }
            Profile::Table(samples) => {
                if samples.is_empty() {
                    return Err(Error::InvalidKernel("table profile has no samples".into()));
                }
                let mut prev = -1.0;
                for &(r, v) in samples {
                    if !(r.is_finite() && v.is_finite()) || r < 0.0 || v < 0.0 {
                        return Err(Error::InvalidKernel(format!(
                            "table sample ({r}, {v}) must be finite and nonnegative"
                        )));
                    }
                    if r <= prev {
                        return Err(Error::InvalidKernel(
                            "table radii must be strictly increasing".into(),
                        ));
                    }
                    prev = r;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn table_lookup(samples: &[(f64, f64)], r: f64) -> f64 {
    let (r0, v0) = samples[0];
    if r <= r0 {
        return v0;
    }
    for pair in samples.windows(2) {
        let (ra, va) = pair[0];
        let (rb, vb) = pair[1];
        if r <= rb {
            let s = (r - ra) / (rb - ra);
            return va + s * (vb - va);
        }
    }
    0.0
}

/// Composite Simpson rule with `panels` (even) subintervals.
pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    debug_assert!(panels.is_multiple_of(2) && panels > 0);
    let h = (hi - lo) / panels as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + k as f64 * h);
    }
    acc * h / 3.0
}

/// A normalized radial kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    profile: Profile,
    radius: f64,
    norm_const: f64,
}

impl Kernel {
    /// Scales `profile` to unit mass on `[-radius, radius]`.
    pub fn normalize(profile: Profile, radius: f64) -> Result<Kernel> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidKernel(format!("support radius must be positive, got {radius}")));
        }
        profile.check()?;
        let mass = raw_mass(&profile, radius);
        if !(mass > ZERO_MASS_THRESHOLD) {
            return Err(Error::ZeroMass { mass });
        }
        if profile.raw(0.0, radius) <= 0.0 {
            return Err(Error::InvalidKernel("profile must be positive at the origin".into()));
        }
        Ok(Kernel { profile, radius, norm_const: 1.0 / mass })
    }

    pub fn box_kernel(radius: f64) -> Result<Kernel> {
        Kernel::normalize(Profile::Box, radius)
    }

    pub fn tent(radius: f64) -> Result<Kernel> {
        Kernel::normalize(Profile::Tent, radius)
    }

    pub fn truncated_gaussian(sigma: f64, radius: f64) -> Result<Kernel> {
        Kernel::normalize(Profile::TruncatedGaussian { sigma }, radius)
    }

    pub fn table(samples: Vec<(f64, f64)>, radius: f64) -> Result<Kernel> {
        Kernel::normalize(Profile::Table(samples), radius)
    }

    /// Same shape with total mass `amplitude` instead of one.
    ///
    /// Used for amplitude sweeps; the result no longer has unit mass.
    pub fn scaled(&self, amplitude: f64) -> Kernel {
        Kernel { norm_const: self.norm_const * amplitude, ..self.clone() }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        self.norm_const * self.profile.raw(r, self.radius)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Integral of the scaled kernel over its support.
    pub fn mass(&self) -> f64 {
        self.norm_const * raw_mass(&self.profile, self.radius)
    }
}

fn raw_mass(profile: &Profile, radius: f64) -> f64 {
    match profile {
        // Piecewise linear: integrate each linear piece exactly with the midpoint rule.
        Profile::Table(samples) => {
            let mut breaks: Vec<f64> = Vec::with_capacity(samples.len() + 2);
            breaks.push(0.0);
            breaks.extend(samples.iter().map(|s| s.0).filter(|&r| r > 0.0 && r < radius));
            breaks.push(radius);
            let half: f64 = breaks
                .windows(2)
                .map(|w| (w[1] - w[0]) * profile.raw(0.5 * (w[0] + w[1]), radius))
                .sum();
            2.0 * half
        }
        _ => simpson(|r| profile.raw(r, radius), -radius, radius, NORMALIZATION_PANELS),
    }
}

/// Outcome of checking the support condition between `A` and `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub passed: bool,
    pub dist: f64,
    pub radius: f64,
    pub value_at_origin: f64,
    pub failures: Vec<String>,
}

/// Checks that `J` is positive at the origin and reaches across from `A` to `B`.
pub fn validate_hypothesis(kernel_j: &Kernel, partition: &Partition1D) -> HypothesisReport {
    let dist = partition.distance();
    let radius = kernel_j.radius();
    let value_at_origin = kernel_j.eval(0.0);
    let mut failures = Vec::new();
    if !(dist < radius) {
        failures.push(format!(
            "dist(A,B) = {dist} is not below the support radius {radius} of J"
        ));
    }
    if !(value_at_origin > 0.0) {
        failures.push(format!("J(0) = {value_at_origin} is not positive"));
    }
    HypothesisReport { passed: failures.is_empty(), dist, radius, value_at_origin, failures }
}
