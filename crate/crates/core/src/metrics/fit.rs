//! Fitting truncated normals to empirical distributions.
//!
//! Distances are Wasserstein-1 between CDFs on `[0, 1]`, integrated with the
//! trapezoidal rule on a fixed grid of 1000 intervals. The fit is an
//! exhaustive search over a `(mu, sigma)` grid; the minimum is taken under
//! the total order (distance, mu, sigma) so the result does not depend on
//! how the search is split across threads.

use rayon::prelude::*;
use serde::Serialize;

use super::quality::{truncated_cdf_unchecked, FittedParams};
use crate::error::{Error, Result};

/// Number of trapezoid intervals on `[0, 1]`.
pub const QUADRATURE_INTERVALS: usize = 1000;

pub const MIN_FIT_SAMPLES: usize = 10;

/// A cumulative distribution function supported on `[0, 1]`.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;
}

/// Step function `F(x) = #{samples <= x} / n`.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("empirical distribution needs at least one sample"));
        }
        if samples.iter().any(|s| s.is_nan()) {
            return Err(Error::InvalidArgument("NaN sample".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

impl Cdf for EmpiricalCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|s| *s <= x) as f64 / self.sorted.len() as f64
    }
}

/// Normal distribution truncated to `[0, 1]`, parameterised by its deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormal {
    pub mu: f64,
    pub sigma: f64,
}

impl Cdf for TruncatedNormal {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            truncated_cdf_unchecked(x, self.mu, self.sigma, 0.0, 1.0)
        }
    }
}

/// Unit mass at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointMass(pub f64);

impl Cdf for PointMass {
    fn cdf(&self, x: f64) -> f64 {
        if x >= self.0 {
            1.0
        } else {
            0.0
        }
    }
}

fn grid_point(i: usize) -> f64 {
    i as f64 / QUADRATURE_INTERVALS as f64
}

fn tabulate(f: &impl Cdf) -> Vec<f64> {
    (0..=QUADRATURE_INTERVALS).map(|i| f.cdf(grid_point(i))).collect()
}

fn trapezoid_abs_diff(f: &[f64], g: &[f64]) -> f64 {
    let h = 1.0 / QUADRATURE_INTERVALS as f64;
    let d: Vec<f64> = f.iter().zip(g).map(|(a, b)| (a - b).abs()).collect();
    let inner: f64 = d[1..d.len() - 1].iter().sum();
    h * (inner + 0.5 * (d[0] + d[d.len() - 1]))
}

/// Wasserstein-1 distance `∫ |F - G|` over `[0, 1]`.
pub fn wasserstein_1d(f: &impl Cdf, g: &impl Cdf) -> f64 {
    trapezoid_abs_diff(&tabulate(f), &tabulate(g))
}

/// Search ranges for the fit. Means and deviations are enumerated as
/// `min + i * step` up to and including `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitGrid {
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_step: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma_step: f64,
}

impl Default for FitGrid {
    fn default() -> Self {
        FitGrid {
            mu_min: -0.5,
            mu_max: 1.0,
            mu_step: 0.01,
            sigma_min: 0.05,
            sigma_max: 1.0,
            sigma_step: 0.01,
        }
    }
}

impl FitGrid {
    fn axis(min: f64, max: f64, step: f64) -> Vec<f64> {
        let n = ((max - min) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| min + i as f64 * step).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        Self::axis(self.mu_min, self.mu_max, self.mu_step)
    }

    pub fn sigmas(&self) -> Vec<f64> {
        Self::axis(self.sigma_min, self.sigma_max, self.sigma_step)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.mu_step > 0.0
            && self.sigma_step > 0.0
            && self.mu_min <= self.mu_max
            && self.sigma_min > 0.0
            && self.sigma_min <= self.sigma_max;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid fit grid {self:?}")))
        }
    }
}

/// Best grid cell for one variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisFit {
    pub mu: f64,
    pub sigma: f64,
    pub distance: f64,
    /// The optimum sits on the smallest deviation of the grid, which is what
    /// (near) constant samples produce.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionFit {
    pub params: FittedParams,
    pub containment: AxisFit,
    pub cardinality: AxisFit,
}

/// Fits one truncated normal to the samples by exhaustive grid search.
pub fn fit_truncated_normal(samples: &[f64], grid: &FitGrid) -> Result<AxisFit> {
    grid.validate()?;
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "fitting needs at least {MIN_FIT_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(Error::InvalidArgument("fit samples must lie in [0, 1]".into()));
    }
    let target = tabulate(&EmpiricalCdf::new(samples)?);
    let means = grid.means();
    let sigmas = grid.sigmas();

    let (_, mi, si, distance) = (0..means.len() * sigmas.len())
        .into_par_iter()
        .map(|cell| {
            let (mi, si) = (cell / sigmas.len(), cell % sigmas.len());
            let model = TruncatedNormal { mu: means[mi], sigma: sigmas[si] };
            let d = trapezoid_abs_diff(&tabulate(&model), &target);
            (cell, mi, si, d)
        })
        .min_by(|a, b| a.3.total_cmp(&b.3).then(a.0.cmp(&b.0)))
        .expect("grid is non-empty");

    Ok(AxisFit { mu: means[mi], sigma: sigmas[si], distance, degenerate: si == 0 })
}

/// Fits independent truncated normals to containment and cardinality
/// proportion samples. Variances in the result are squared deviations.
pub fn fit_distribution(c_samples: &[f64], k_samples: &[f64], grid: &FitGrid) -> Result<DistributionFit> {
    let containment = fit_truncated_normal(c_samples, grid)?;
    let cardinality = fit_truncated_normal(k_samples, grid)?;
    Ok(DistributionFit {
        params: FittedParams {
            mu_c: containment.mu,
            mu_k: cardinality.mu,
            var_c: containment.sigma * containment.sigma,
            var_k: cardinality.sigma * cardinality.sigma,
            bounds: [0.0, 1.0],
        },
        containment,
        cardinality,
    })
}
