//! Profile normalization and pairwise distance vectors.
//!
//! Meta-features measured on unbounded scales (counts, lengths, words) are
//! Z-scored over the comparison pool before differencing; fractions enter as
//! raw absolute differences. The vector layout is fixed and versioned by
//! [`LAYOUT_VERSION`]; models record the version they were trained on.
//!
//! Layout, in order (see [`feature_names`]):
//!
//! 1. 14 normalized features, `|z(a) - z(b)|`: cardinality, entropy,
//!    freq_avg, freq_min, freq_max, freq_sd, len_longest, len_shortest,
//!    len_avg, words_count, words_avg, words_min, words_max, words_sd
//! 2. 25 fraction features, `|a - b|`: uniqueness, incompleteness, the 7
//!    octiles, freq_min_pct, freq_max_pct, freq_sd_pct, constancy, the 5
//!    data-type percentages and the 7 specific-type percentages
//! 3. 2 categorical features, 0 when equal and 1 otherwise: data_type,
//!    specific_type
//! 4. 2 set features, Jaccard distance: frequent_words, soundex_words
//! 5. 3 pair features, raw: best_containment, flipped_containment,
//!    name_distance

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiler::{AttributeProfile, BinaryFeatures, DataType, SpecificType};

pub const LAYOUT_VERSION: &str = "joinscout-distance-v1";

pub const NORMALIZED_FEATURES: [&str; 14] = [
    "cardinality",
    "entropy",
    "freq_avg",
    "freq_min",
    "freq_max",
    "freq_sd",
    "len_longest",
    "len_shortest",
    "len_avg",
    "words_count",
    "words_avg",
    "words_min",
    "words_max",
    "words_sd",
];

pub const LAYOUT_LEN: usize = 14 + 25 + 2 + 2 + 3;

fn normalized_values(p: &AttributeProfile) -> [f64; 14] {
    [
        p.cardinality as f64,
        p.entropy,
        p.freq_avg,
        p.freq_min,
        p.freq_max,
        p.freq_sd,
        p.len_longest,
        p.len_shortest,
        p.len_avg,
        p.words_count,
        p.words_avg,
        p.words_min,
        p.words_max,
        p.words_sd,
    ]
}

fn fraction_values(p: &AttributeProfile) -> Vec<f64> {
    let mut v = Vec::with_capacity(25);
    v.push(p.uniqueness);
    v.push(p.incompleteness);
    v.extend_from_slice(&p.octiles);
    v.extend([p.freq_min_pct, p.freq_max_pct, p.freq_sd_pct, p.constancy]);
    v.extend(DataType::ALL.iter().map(|t| p.pct_data_type.get(t).copied().unwrap_or(0.0)));
    v.extend(SpecificType::ALL.iter().map(|t| p.pct_specific_type.get(t).copied().unwrap_or(0.0)));
    v
}

/// Names of the distance-vector entries, in layout order.
pub fn feature_names() -> Vec<String> {
    let mut names: Vec<String> = NORMALIZED_FEATURES.iter().map(|s| s.to_string()).collect();
    names.extend(["uniqueness", "incompleteness"].map(String::from));
    names.extend((1..=7).map(|i| format!("octile_{i}")));
    names.extend(["freq_min_pct", "freq_max_pct", "freq_sd_pct", "constancy"].map(String::from));
    names.extend(DataType::ALL.iter().map(|t| format!("pct_data_type_{}", json_name(t))));
    names.extend(SpecificType::ALL.iter().map(|t| format!("pct_specific_type_{}", json_name(t))));
    names.extend(
        [
            "data_type",
            "specific_type",
            "frequent_words",
            "soundex_words",
            "best_containment",
            "flipped_containment",
            "name_distance",
        ]
        .map(String::from),
    );
    names
}

fn json_name<T: Serialize>(t: &T) -> String {
    serde_json::to_value(t)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
}

/// Population mean and deviation of each normalizable meta-feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub layout_version: String,
    pub features: Vec<FeatureStats>,
}

impl NormalizationStats {
    /// Features with zero deviation over the pool; they contribute 0 distance.
    pub fn constant_features(&self) -> Vec<&str> {
        self.features.iter().filter(|f| f.sd == 0.0).map(|f| f.name.as_str()).collect()
    }

    fn check_layout(&self) -> Result<()> {
        let names_match = self.features.len() == NORMALIZED_FEATURES.len()
            && self.features.iter().zip(NORMALIZED_FEATURES).all(|(f, n)| f.name == n);
        if self.layout_version != LAYOUT_VERSION || !names_match {
            return Err(Error::LayoutMismatch {
                expected: LAYOUT_VERSION.to_string(),
                found: format!("{} ({} features)", self.layout_version, self.features.len()),
            });
        }
        Ok(())
    }
}

pub fn compute_normalization(pool: &[AttributeProfile]) -> Result<NormalizationStats> {
    if pool.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "normalization needs a pool of at least 2 profiles, got {}",
            pool.len()
        )));
    }
    let n = pool.len() as f64;
    let mut sum = [0.0; 14];
    for p in pool {
        for (s, v) in sum.iter_mut().zip(normalized_values(p)) {
            *s += v;
        }
    }
    let means = sum.map(|s| s / n);
    let mut sq = [0.0; 14];
    for p in pool {
        for ((s, v), m) in sq.iter_mut().zip(normalized_values(p)).zip(means) {
            *s += (v - m) * (v - m);
        }
    }
    let features = NORMALIZED_FEATURES
        .iter()
        .zip(means.iter().zip(sq))
        .map(|(name, (mean, sq))| FeatureStats {
            name: name.to_string(),
            mean: *mean,
            sd: (sq / n).sqrt(),
        })
        .collect();
    Ok(NormalizationStats { layout_version: LAYOUT_VERSION.to_string(), features })
}

/// `(x - mean) / sd`, or 0 for a constant feature.
pub fn zscore(x: f64, stats: &FeatureStats) -> f64 {
    if stats.sd == 0.0 {
        0.0
    } else {
        (x - stats.mean) / stats.sd
    }
}

/// Distances between two profiles in the fixed layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceVector {
    pub layout: String,
    pub values: Vec<f64>,
}

impl DistanceVector {
    pub fn new(values: Vec<f64>) -> Self {
        DistanceVector { layout: LAYOUT_VERSION.to_string(), values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn jaccard_distance(a: &[String], b: &[String]) -> f64 {
    let a: HashSet<&str> = a.iter().map(String::as_str).collect();
    let b: HashSet<&str> = b.iter().map(String::as_str).collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 0.0;
    }
    1.0 - a.intersection(&b).count() as f64 / union as f64
}

pub fn distance_vector(
    a: &AttributeProfile,
    b: &AttributeProfile,
    pair: &BinaryFeatures,
    stats: &NormalizationStats,
) -> Result<DistanceVector> {
    stats.check_layout()?;
    let mut values = Vec::with_capacity(LAYOUT_LEN);

    for ((va, vb), st) in normalized_values(a).into_iter().zip(normalized_values(b)).zip(&stats.features) {
        values.push((zscore(va, st) - zscore(vb, st)).abs());
    }
    for (va, vb) in fraction_values(a).into_iter().zip(fraction_values(b)) {
        values.push((va - vb).abs());
    }
    values.push(f64::from(u8::from(a.data_type != b.data_type)));
    values.push(f64::from(u8::from(a.specific_type != b.specific_type)));
    values.push(jaccard_distance(&a.frequent_words, &b.frequent_words));
    values.push(jaccard_distance(&a.soundex_words, &b.soundex_words));
    values.extend([pair.best_containment, pair.flipped_containment, pair.name_distance]);

    debug_assert_eq!(values.len(), LAYOUT_LEN);
    if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite distance for feature {}",
            feature_names()[bad]
        )));
    }
    Ok(DistanceVector::new(values))
}
