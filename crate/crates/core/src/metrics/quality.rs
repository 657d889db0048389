//! Discrete and continuous join quality.
//!
//! The discrete metric buckets containment into `L` equal levels and requires
//! the cardinality proportion to clear a threshold that halves with every
//! level below the top: level `j` is attained when `C >= j/L` and
//! `K >= 2^-(L-j)`. For `L = 2`, level 1 is exactly `C >= 1/2 && K >= 1/2`.
//!
//! The continuous metric is the product of two normal CDFs truncated to
//! `[0, 1]`, one over containment (mean shifted by the strictness) and one
//! over the cardinality proportion.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PARAMS_JSON: &str = include_str!("../../data/default_params.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityKind {
    DiscreteLevel,
    Continuous,
    Predicted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityScore {
    pub value: f64,
    pub kind: QualityKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub level_count: Option<u32>,
}

impl QualityScore {
    pub fn predicted(value: f64) -> Self {
        QualityScore { value, kind: QualityKind::Predicted, level_count: None }
    }

    /// Attained level `j` for discrete scores.
    pub fn level(&self) -> Option<u32> {
        self.level_count.map(|l| (self.value * l as f64).round() as u32)
    }

    /// Label of a level on the four-level scale.
    pub fn label(&self) -> Option<&'static str> {
        match (self.level_count, self.level()) {
            (Some(4), Some(j)) => Some(["None", "Low", "Medium", "Good", "High"][j as usize]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    Relaxed,
    Balanced,
    Strict,
}

impl Strictness {
    pub const ALL: [Strictness; 3] = [Strictness::Relaxed, Strictness::Balanced, Strictness::Strict];

    /// Offset added to the containment mean.
    pub fn offset(self) -> f64 {
        match self {
            Strictness::Relaxed => 0.0,
            Strictness::Balanced => 0.25,
            Strictness::Strict => 0.5,
        }
    }
}

impl fmt::Display for Strictness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strictness::Relaxed => "relaxed",
            Strictness::Balanced => "balanced",
            Strictness::Strict => "strict",
        })
    }
}

impl FromStr for Strictness {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "relaxed" => Ok(Strictness::Relaxed),
            "balanced" => Ok(Strictness::Balanced),
            "strict" => Ok(Strictness::Strict),
            other => Err(Error::InvalidArgument(format!(
                "strictness must be relaxed, balanced or strict, got {other:?}"
            ))),
        }
    }
}

/// Parameters of the two truncated normals. Variances, not deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittedParams {
    pub mu_c: f64,
    pub mu_k: f64,
    pub var_c: f64,
    pub var_k: f64,
    pub bounds: [f64; 2],
}

impl Default for FittedParams {
    fn default() -> Self {
        FittedParams { mu_c: 0.0, mu_k: 0.44, var_c: 0.19, var_k: 0.28, bounds: [0.0, 1.0] }
    }
}

impl FittedParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.mu_c, self.mu_k, self.var_c, self.var_k].iter().all(|v| v.is_finite());
        if !finite || self.var_c <= 0.0 || self.var_k <= 0.0 {
            return Err(Error::InvalidArgument(format!("invalid fitted parameters {self:?}")));
        }
        if self.bounds != [0.0, 1.0] {
            return Err(Error::InvalidArgument("fitted parameters must be bounded to [0, 1]".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: FittedParams = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FittedParams::from_json(&text).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} is outside [0, 1]")))
    }
}

/// Highest level `j/L` with `c >= j/L` and `k >= 2^-(L-j)`; 0 when none holds.
pub fn discrete_quality(c: f64, k: f64, levels: u32) -> Result<QualityScore> {
    check_unit("containment", c)?;
    check_unit("cardinality proportion", k)?;
    if levels == 0 {
        return Err(Error::InvalidArgument("number of levels must be at least 1".into()));
    }
    let l = levels as f64;
    let attained = (1..=levels)
        .rev()
        .find(|&j| c >= j as f64 / l && k >= 0.5f64.powi((levels - j) as i32))
        .unwrap_or(0);
    Ok(QualityScore {
        value: attained as f64 / l,
        kind: QualityKind::DiscreteLevel,
        level_count: Some(levels),
    })
}

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn std_normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// A truncated-CDF evaluation; `clamped` is set when `x` fell outside `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfEval {
    pub value: f64,
    pub clamped: bool,
}

/// CDF of `N(mu, var)` truncated to `[a, b]`, evaluated at `x`.
pub fn truncated_normal_cdf(x: f64, mu: f64, var: f64, a: f64, b: f64) -> Result<CdfEval> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("truncation bounds [{a}, {b}] are empty")));
    }
    if !(var > 0.0) || !var.is_finite() || !mu.is_finite() || x.is_nan() {
        return Err(Error::InvalidArgument(format!("invalid normal parameters mu={mu} var={var}")));
    }
    if x <= a {
        return Ok(CdfEval { value: 0.0, clamped: x < a });
    }
    if x >= b {
        return Ok(CdfEval { value: 1.0, clamped: x > b });
    }
    Ok(CdfEval { value: truncated_cdf_unchecked(x, mu, var.sqrt(), a, b), clamped: false })
}

/// Inner evaluation for `a < x < b`, `sigma > 0`.
///
/// When the whole interval sits in the upper tail the survival function is
/// used instead so both numerator and denominator keep full precision.
pub(crate) fn truncated_cdf_unchecked(x: f64, mu: f64, sigma: f64, a: f64, b: f64) -> f64 {
    let za = (a - mu) / sigma;
    let zb = (b - mu) / sigma;
    let zx = (x - mu) / sigma;
    let (num, den) = if za > 0.0 {
        let sa = std_normal_sf(za);
        (sa - std_normal_sf(zx), sa - std_normal_sf(zb))
    } else {
        let pa = std_normal_cdf(za);
        (std_normal_cdf(zx) - pa, std_normal_cdf(zb) - pa)
    };
    if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else {
        // all mass collapsed onto the bound nearest to mu
        if mu <= a {
            1.0
        } else {
            0.0
        }
    }
}

/// Continuous join quality for containment `c`, cardinality proportion `k` and
/// strictness offset `s` in `[0, 0.5]`.
pub fn continuous_quality(c: f64, k: f64, s: f64, params: &FittedParams) -> Result<QualityScore> {
    check_unit("containment", c)?;
    check_unit("cardinality proportion", k)?;
    if !(0.0..=0.5).contains(&s) {
        return Err(Error::InvalidArgument(format!("strictness {s} is outside [0, 0.5]")));
    }
    params.validate()?;
    let [a, b] = params.bounds;
    let qc = truncated_normal_cdf(c, params.mu_c + s, params.var_c, a, b)?.value;
    let qk = truncated_normal_cdf(k, params.mu_k, params.var_k, a, b)?.value;
    Ok(QualityScore { value: qc * qk, kind: QualityKind::Continuous, level_count: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_defaults_match() {
        assert_eq!(FittedParams::from_json(DEFAULT_PARAMS_JSON).unwrap(), FittedParams::default());
    }

    #[test]
    fn discrete_levels() {
        let q = discrete_quality(0.8, 0.40, 4).unwrap();
        assert_eq!(q.value, 0.5);
        assert_eq!(q.label(), Some("Medium"));
        let q = discrete_quality(0.95, 0.15, 4).unwrap();
        assert_eq!(q.value, 0.25);
        assert_eq!(q.label(), Some("Low"));
        for l in 1..8 {
            assert_eq!(discrete_quality(1.0, 1.0, l).unwrap().value, 1.0);
        }
        assert_eq!(discrete_quality(0.0, 1.0, 4).unwrap().value, 0.0);
        assert!(discrete_quality(1.2, 0.5, 4).is_err());
        assert!(discrete_quality(0.5, 0.5, 0).is_err());
    }

    #[test]
    fn two_levels_is_the_binary_rule() {
        for i in 0..=100 {
            for j in 0..=100 {
                let (c, k) = (i as f64 / 100.0, j as f64 / 100.0);
                let binary = c >= 0.5 && k >= 0.5;
                assert_eq!(discrete_quality(c, k, 2).unwrap().value >= 0.5, binary, "c={c} k={k}");
            }
        }
    }

    #[test]
    fn discrete_is_monotone() {
        for l in 1..=6 {
            for i in 0..=40 {
                for j in 0..=40 {
                    let (c, k) = (i as f64 / 40.0, j as f64 / 40.0);
                    let q = discrete_quality(c, k, l).unwrap().value;
                    if i < 40 {
                        assert!(discrete_quality((i + 1) as f64 / 40.0, k, l).unwrap().value >= q);
                    }
                    if j < 40 {
                        assert!(discrete_quality(c, (j + 1) as f64 / 40.0, l).unwrap().value >= q);
                    }
                }
            }
        }
    }

    #[test]
    fn truncated_cdf_bounds_and_symmetry() {
        let at = |x| truncated_normal_cdf(x, 0.3, 0.2, 0.0, 1.0).unwrap();
        assert_eq!(at(0.0).value, 0.0);
        assert_eq!(at(1.0).value, 1.0);
        let clamped = at(1.5);
        assert!(clamped.clamped && clamped.value == 1.0);
        let clamped = at(-0.5);
        assert!(clamped.clamped && clamped.value == 0.0);
        let mid = truncated_normal_cdf(0.5, 0.5, 0.3, 0.0, 1.0).unwrap().value;
        assert!((mid - 0.5).abs() < 1e-15);
        assert!(truncated_normal_cdf(0.5, 0.5, 0.3, 1.0, 0.0).is_err());
        assert!(truncated_normal_cdf(0.5, 0.5, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn truncated_cdf_far_tail_is_finite() {
        // mean far below the interval: almost all mass near 0
        let v = truncated_normal_cdf(0.9, -0.5, 0.0025, 0.0, 1.0).unwrap().value;
        assert!((v - 1.0).abs() < 1e-12, "{v}");
        let v = truncated_normal_cdf(0.01, -0.5, 0.0025, 0.0, 1.0).unwrap().value;
        assert!(v > 0.0 && v < 1.0);
        let v = truncated_normal_cdf(0.1, 2.0, 0.0025, 0.0, 1.0).unwrap().value;
        assert!(v.is_finite() && v < 1e-100);
    }

    #[test]
    fn continuous_reference_values() {
        // frozen from 40-digit adaptive quadrature of the truncated densities
        let p = FittedParams::default();
        for (c, k, s, expected) in [
            (0.8, 0.4, 0.25, 0.37247695699136211),
            (0.8, 0.4, 0.0, 0.39073287343811283),
            (0.8, 0.4, 0.5, 0.34381898497064959),
            (0.95, 0.15, 0.25, 0.13412067965430613),
            (0.75, 1.0, 0.25, 0.87686968826075871),
            (0.5, 0.5, 0.0, 0.40166887689744376),
        ] {
            let q = continuous_quality(c, k, s, &p).unwrap().value;
            assert!((q - expected).abs() < 1e-9, "Q({c},{k},{s}) = {q}, expected {expected}");
        }
    }

    #[test]
    fn continuous_edges() {
        let p = FittedParams::default();
        for s in [0.0, 0.25, 0.5] {
            assert_eq!(continuous_quality(0.0, 0.7, s, &p).unwrap().value, 0.0);
            assert_eq!(continuous_quality(1.0, 1.0, s, &p).unwrap().value, 1.0);
        }
        assert!(continuous_quality(0.5, 0.5, 0.6, &p).is_err());
        assert!(continuous_quality(0.5, 0.5, -0.1, &p).is_err());
    }

    #[test]
    fn strictness_names() {
        for s in Strictness::ALL {
            assert_eq!(s.to_string().parse::<Strictness>().unwrap(), s);
        }
        assert!("lenient".parse::<Strictness>().is_err());
    }
}
