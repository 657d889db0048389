//! Attribute profiling.
//!
//! A profile summarizes a column through cardinality, value-distribution and
//! syntactic meta-features. All meta-features are computed over the
//! preprocessed values (see [`crate::tabular::preprocess`]).
//!
//! Definitions fixed by this module:
//!
//! - frequencies are counts of each distinct non-missing value; percentages
//!   are those counts divided by the number of non-missing cells;
//! - `uniqueness` = distinct / non-missing cells, `incompleteness` =
//!   missing / rows, `constancy` = modal count / rows;
//! - `entropy` is the Shannon entropy (nats) of the value frequencies divided
//!   by `ln(cardinality)`, and 0 when the cardinality is at most 1;
//! - `octiles` are the 12.5%, 25%, ..., 87.5% nearest-rank quantiles of the
//!   percentage distribution;
//! - words are whitespace-separated tokens; `words_count` is the total over
//!   all non-missing cells, the other word and length statistics are per cell;
//! - standard deviations are population standard deviations.

mod document;
mod names;
mod syntax;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

pub use document::ProfileDocument;
pub use names::{levenshtein, levenshtein_name_distance, soundex};
pub use syntax::{infer_data_type, infer_specific_type, DataType, SpecificType, PHRASE_MIN_WORDS};

use crate::error::{Error, Result};
use crate::tabular::{preprocess, Column};

pub const TOP_WORDS: usize = 10;
pub const OCTILES: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeProfile {
    pub dataset_name: String,
    pub attribute_name: String,
    pub cardinality: u64,
    pub uniqueness: f64,
    pub incompleteness: f64,
    pub entropy: f64,
    pub freq_avg: f64,
    pub freq_min: f64,
    pub freq_max: f64,
    pub freq_sd: f64,
    pub octiles: [f64; OCTILES],
    pub freq_min_pct: f64,
    pub freq_max_pct: f64,
    pub freq_sd_pct: f64,
    pub constancy: f64,
    pub frequent_words: Vec<String>,
    pub soundex_words: Vec<String>,
    pub data_type: DataType,
    pub specific_type: SpecificType,
    pub pct_data_type: BTreeMap<DataType, f64>,
    pub pct_specific_type: BTreeMap<SpecificType, f64>,
    pub len_longest: f64,
    pub len_shortest: f64,
    pub len_avg: f64,
    pub words_count: f64,
    pub words_avg: f64,
    pub words_min: f64,
    pub words_max: f64,
    pub words_sd: f64,
}

/// Pair meta-features that need no access to the values themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryFeatures {
    pub best_containment: f64,
    pub flipped_containment: f64,
    pub name_distance: f64,
}

/// Rounds to 12 significant digits, the precision used in persisted profiles.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

impl AttributeProfile {
    /// Copy with every real-valued field rounded to 12 significant digits.
    pub fn rounded(&self) -> AttributeProfile {
        let r = round_sig12;
        AttributeProfile {
            uniqueness: r(self.uniqueness),
            incompleteness: r(self.incompleteness),
            entropy: r(self.entropy),
            freq_avg: r(self.freq_avg),
            freq_min: r(self.freq_min),
            freq_max: r(self.freq_max),
            freq_sd: r(self.freq_sd),
            octiles: self.octiles.map(r),
            freq_min_pct: r(self.freq_min_pct),
            freq_max_pct: r(self.freq_max_pct),
            freq_sd_pct: r(self.freq_sd_pct),
            constancy: r(self.constancy),
            pct_data_type: self.pct_data_type.iter().map(|(k, v)| (*k, r(*v))).collect(),
            pct_specific_type: self.pct_specific_type.iter().map(|(k, v)| (*k, r(*v))).collect(),
            len_longest: r(self.len_longest),
            len_shortest: r(self.len_shortest),
            len_avg: r(self.len_avg),
            words_count: r(self.words_count),
            words_avg: r(self.words_avg),
            words_min: r(self.words_min),
            words_max: r(self.words_max),
            words_sd: r(self.words_sd),
            ..self.clone()
        }
    }
}

#[derive(Default)]
struct Moments {
    n: f64,
    sum: f64,
    sum_sq: f64,
    min: f64,
    max: f64,
}

impl Moments {
    fn add(&mut self, x: f64, weight: f64) {
        if self.n == 0.0 {
            self.min = x;
            self.max = x;
        } else {
            self.min = self.min.min(x);
            self.max = self.max.max(x);
        }
        self.n += weight;
        self.sum += x * weight;
        self.sum_sq += x * x * weight;
    }

    fn mean(&self) -> f64 {
        if self.n == 0.0 {
            0.0
        } else {
            self.sum / self.n
        }
    }

    fn sd(&self) -> f64 {
        if self.n == 0.0 {
            return 0.0;
        }
        let mean = self.mean();
        (self.sum_sq / self.n - mean * mean).max(0.0).sqrt()
    }
}

/// Nearest-rank quantile of an ascending slice.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

fn modal<K: Copy + Ord>(pcts: &BTreeMap<K, f64>, fallback: K) -> K {
    // BTreeMap iterates in declaration order, so ties resolve to the earlier variant
    pcts.iter()
        .fold((fallback, 0.0), |(best, best_pct), (k, v)| {
            if *v > best_pct {
                (*k, *v)
            } else {
                (best, best_pct)
            }
        })
        .0
}

/// Computes the unary profile of a column.
pub fn build_profile(column: &Column) -> Result<AttributeProfile> {
    if column.is_empty() {
        return Err(Error::Profiling(format!(
            "column {}.{} has no cells",
            column.dataset_name, column.attribute_name
        )));
    }
    let clean = preprocess(column);
    let rows = clean.len() as f64;

    let mut counts: HashMap<&str, u64> = HashMap::new();
    for value in clean.non_missing() {
        *counts.entry(value).or_insert(0) += 1;
    }
    // lexicographic order makes every floating-point reduction below deterministic
    let mut freq: Vec<(&str, u64)> = counts.into_iter().collect();
    freq.sort_unstable_by(|a, b| a.0.cmp(b.0));

    let present: u64 = freq.iter().map(|(_, c)| c).sum();
    let present_f = present as f64;
    let cardinality = freq.len();

    let mut counts_m = Moments::default();
    let mut pct_m = Moments::default();
    let mut pcts = Vec::with_capacity(cardinality);
    let mut entropy = 0.0;
    let mut len_m = Moments::default();
    let mut words_m = Moments::default();
    let mut pct_data_type: BTreeMap<DataType, f64> =
        DataType::ALL.iter().map(|t| (*t, 0.0)).collect();
    let mut pct_specific_type: BTreeMap<SpecificType, f64> =
        SpecificType::ALL.iter().map(|t| (*t, 0.0)).collect();

    for &(value, count) in &freq {
        let c = count as f64;
        let p = c / present_f;
        counts_m.add(c, 1.0);
        pct_m.add(p, 1.0);
        pcts.push(p);
        entropy -= p * p.ln();

        len_m.add(value.chars().count() as f64, c);
        words_m.add(value.split_whitespace().count() as f64, c);
        *pct_data_type.get_mut(&infer_data_type(value)).expect("all types present") += p;
        *pct_specific_type.get_mut(&infer_specific_type(value)).expect("all types present") += p;
    }

    let entropy = if cardinality <= 1 {
        0.0
    } else {
        (entropy / (cardinality as f64).ln()).clamp(0.0, 1.0)
    };
    pcts.sort_unstable_by(f64::total_cmp);
    let octiles: [f64; OCTILES] =
        std::array::from_fn(|i| nearest_rank(&pcts, (i + 1) as f64 / 8.0));

    let mut by_frequency = freq.clone();
    by_frequency.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let frequent_words: Vec<String> = by_frequency
        .iter()
        .take(TOP_WORDS)
        .map(|(v, _)| v.to_string())
        .collect();
    let soundex_words = frequent_words.iter().filter_map(|w| soundex(w).ok()).collect();
    let modal_count = by_frequency.first().map_or(0, |(_, c)| *c) as f64;

    let fraction = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };

    Ok(AttributeProfile {
        dataset_name: column.dataset_name.clone(),
        attribute_name: column.attribute_name.clone(),
        cardinality: cardinality as u64,
        uniqueness: fraction(cardinality as f64, present_f),
        incompleteness: (rows - present_f) / rows,
        entropy,
        freq_avg: counts_m.mean(),
        freq_min: counts_m.min,
        freq_max: counts_m.max,
        freq_sd: counts_m.sd(),
        octiles,
        freq_min_pct: pct_m.min,
        freq_max_pct: pct_m.max,
        freq_sd_pct: pct_m.sd(),
        constancy: modal_count / rows,
        frequent_words,
        soundex_words,
        data_type: modal(&pct_data_type, DataType::NonAlphanumeric),
        specific_type: modal(&pct_specific_type, SpecificType::Other),
        pct_data_type,
        pct_specific_type,
        len_longest: len_m.max,
        len_shortest: len_m.min,
        len_avg: len_m.mean(),
        words_count: words_m.sum,
        words_avg: words_m.mean(),
        words_min: words_m.min,
        words_max: words_m.max,
        words_sd: words_m.sd(),
    })
}

/// Pair meta-features for the candidate pair `(a, b)`, seen from `a`.
pub fn binary_features(a: &AttributeProfile, b: &AttributeProfile) -> Result<BinaryFeatures> {
    if a.cardinality == 0 || b.cardinality == 0 {
        return Err(Error::InvalidArgument(
            "binary features need non-empty value sets on both sides".into(),
        ));
    }
    let (ca, cb) = (a.cardinality as f64, b.cardinality as f64);
    let overlap = ca.min(cb);
    Ok(BinaryFeatures {
        best_containment: overlap / ca,
        flipped_containment: overlap / ca.max(cb),
        name_distance: levenshtein_name_distance(&a.attribute_name, &b.attribute_name),
    })
}
