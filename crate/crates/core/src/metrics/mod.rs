//! Exact join metrics and their calibration.

mod fit;
mod quality;
mod sets;

pub use fit::{
    fit_distribution, fit_truncated_normal, wasserstein_1d, AxisFit, Cdf, DistributionFit,
    EmpiricalCdf, FitGrid, PointMass, TruncatedNormal, MIN_FIT_SAMPLES, QUADRATURE_INTERVALS,
};
pub use quality::{
    continuous_quality, discrete_quality, std_normal_cdf, truncated_normal_cdf, CdfEval,
    FittedParams, QualityKind, QualityScore, Strictness, DEFAULT_PARAMS_JSON,
};
pub use sets::{
    cardinality_proportion, cardinality_proportion_of, containment, jaccard, set_coefficients,
    SetCoefficients, ValueSet,
};
