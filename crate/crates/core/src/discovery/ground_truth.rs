use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AttributeId, ProfileStore};
use crate::compare::distance_vector;
use crate::error::{Error, Result};
use crate::metrics::{continuous_quality, discrete_quality, set_coefficients, FittedParams, Strictness, ValueSet};
use crate::predictor::TrainingExample;
use crate::profiler::binary_features;
use crate::tabular::{string_columns, Dataset, DEFAULT_NUMERIC_EXCLUSION};

/// Number of discrete levels recorded in ground truth.
pub const LEVELS: u32 = 4;
/// Pairs at or above this level out of [`LEVELS`] count as semantically
/// joinable.
pub const SEMANTIC_LEVEL: u32 = 3;

/// Exact metrics for one ordered attribute pair. Containment and the discrete
/// level are measured from `a`'s side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthEntry {
    pub dataset_a: String,
    pub attribute_a: String,
    pub dataset_b: String,
    pub attribute_b: String,
    pub containment: f64,
    pub jaccard: f64,
    pub k: f64,
    pub level: u32,
    pub q_relaxed: f64,
    pub q_balanced: f64,
    pub q_strict: f64,
}

impl GroundTruthEntry {
    pub fn a(&self) -> AttributeId {
        AttributeId::new(&self.dataset_a, &self.attribute_a)
    }

    pub fn b(&self) -> AttributeId {
        AttributeId::new(&self.dataset_b, &self.attribute_b)
    }

    pub fn quality(&self, strictness: Strictness) -> f64 {
        match strictness {
            Strictness::Relaxed => self.q_relaxed,
            Strictness::Balanced => self.q_balanced,
            Strictness::Strict => self.q_strict,
        }
    }

    pub fn is_semantic(&self) -> bool {
        self.level >= SEMANTIC_LEVEL
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthOptions {
    pub numeric_threshold: f64,
    pub params: FittedParams,
}

impl Default for GroundTruthOptions {
    fn default() -> Self {
        GroundTruthOptions {
            numeric_threshold: DEFAULT_NUMERIC_EXCLUSION,
            params: FittedParams::default(),
        }
    }
}

/// Exact metrics for every ordered pair of string attributes drawn from two
/// different datasets. Attributes without any value are skipped.
pub fn generate_ground_truth(datasets: &[Dataset], options: &GroundTruthOptions) -> Result<Vec<GroundTruthEntry>> {
    options.params.validate()?;
    let columns: Vec<(usize, AttributeId, ValueSet)> = datasets
        .iter()
        .enumerate()
        .flat_map(|(di, d)| {
            string_columns(d, options.numeric_threshold)
                .into_iter()
                .map(move |c| (di, AttributeId::new(&d.name, &c.attribute_name), c))
        })
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(di, id, c)| (di, id, ValueSet::from_column(c)))
        .filter(|(_, _, v)| !v.is_empty())
        .collect();

    let pairs: Vec<(usize, usize)> = (0..columns.len())
        .flat_map(|i| (0..columns.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| columns[i].0 != columns[j].0)
        .collect();

    pairs
        .into_par_iter()
        .map(|(i, j)| {
            let (_, ida, va) = &columns[i];
            let (_, idb, vb) = &columns[j];
            let coef = set_coefficients(va, vb)?;
            let (c, k) = (coef.containment, coef.cardinality_proportion);
            let level = discrete_quality(c, k, LEVELS)?.level().unwrap_or(0);
            let q = |s: Strictness| continuous_quality(c, k, s.offset(), &options.params).map(|q| q.value);
            Ok(GroundTruthEntry {
                dataset_a: ida.dataset.clone(),
                attribute_a: ida.attribute.clone(),
                dataset_b: idb.dataset.clone(),
                attribute_b: idb.attribute.clone(),
                containment: c,
                jaccard: coef.jaccard,
                k,
                level,
                q_relaxed: q(Strictness::Relaxed)?,
                q_balanced: q(Strictness::Balanced)?,
                q_strict: q(Strictness::Strict)?,
            })
        })
        .collect()
}

pub fn write_ground_truth(path: impl AsRef<Path>, entries: &[GroundTruthEntry]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parse(e.to_string()))?;
    for e in entries {
        w.serialize(e).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_ground_truth(path: impl AsRef<Path>) -> Result<Vec<GroundTruthEntry>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Malformed {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    r.deserialize()
        .map(|row| {
            row.map_err(|e| Error::Malformed { path: path.to_path_buf(), reason: e.to_string() })
        })
        .collect()
}

/// Keeps every pair with overlap and at most `ratio` times as many
/// zero-containment pairs, chosen by a seeded shuffle. Order is preserved.
pub fn subsample_zero_overlap(entries: &[GroundTruthEntry], ratio: f64, seed: u64) -> Vec<GroundTruthEntry> {
    let mut zero: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].containment == 0.0).collect();
    let keep = ((entries.len() - zero.len()) as f64 * ratio.max(0.0)).floor() as usize;
    zero.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let dropped: HashSet<usize> = zero.into_iter().skip(keep).collect();
    entries
        .iter()
        .enumerate()
        .filter(|(i, _)| !dropped.contains(i))
        .map(|(_, e)| e.clone())
        .collect()
}

/// Distance vectors for ground-truth pairs, labelled with the continuous
/// quality at `strictness`.
pub fn training_examples(
    entries: &[GroundTruthEntry],
    store: &ProfileStore,
    strictness: Strictness,
) -> Result<Vec<TrainingExample>> {
    entries
        .par_iter()
        .map(|e| {
            let lookup = |id: AttributeId| {
                store.get(&id).ok_or_else(|| Error::UnknownAttribute(id.to_string()))
            };
            let (pa, pb) = (lookup(e.a())?, lookup(e.b())?);
            let pair = binary_features(pa, pb)?;
            Ok(TrainingExample {
                vector: distance_vector(pa, pb, &pair, &store.stats)?,
                label: e.quality(strictness),
            })
        })
        .collect()
}
