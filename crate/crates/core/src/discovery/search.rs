use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AttributeId, ProfileStore};
use crate::compare::distance_vector;
use crate::error::{Error, Result};
use crate::metrics::QualityScore;
use crate::predictor::RegressionModel;
use crate::profiler::binary_features;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub dataset: String,
    pub attribute: String,
    pub score: f64,
}

impl RankedCandidate {
    pub fn id(&self) -> AttributeId {
        AttributeId::new(&self.dataset, &self.attribute)
    }
}

/// Candidates for a query attribute, best first. Equal scores are ordered by
/// `(dataset, attribute)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub query: AttributeId,
    pub candidates: Vec<RankedCandidate>,
}

impl Ranking {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// The JSON list `[{dataset, attribute, score}, ...]`.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.candidates)?)
    }

    /// Sorts scored candidates into ranking order and keeps the first `k`.
    pub fn from_scores(query: AttributeId, mut scored: Vec<(AttributeId, QualityScore)>, k: usize) -> Self {
        scored.sort_by(|(ia, qa), (ib, qb)| qb.value.total_cmp(&qa.value).then_with(|| ia.cmp(ib)));
        scored.truncate(k);
        let candidates = scored
            .into_iter()
            .map(|(id, q)| RankedCandidate { dataset: id.dataset, attribute: id.attribute, score: q.value })
            .collect();
        Ranking { query, candidates }
    }
}

/// Predicts join quality between the query and every attribute of the other
/// datasets in the store, returning the top `k`.
pub fn discover_by_attribute(
    store: &ProfileStore,
    model: &RegressionModel,
    query: &AttributeId,
    k: usize,
) -> Result<Ranking> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if model.layout_version != store.layout_version {
        return Err(Error::LayoutMismatch {
            expected: store.layout_version.clone(),
            found: model.layout_version.clone(),
        });
    }
    let q = store.get(query).ok_or_else(|| Error::UnknownAttribute(query.to_string()))?;
    let scored: Vec<(AttributeId, QualityScore)> = store
        .profiles()
        .par_iter()
        .filter(|p| p.dataset_name != q.dataset_name)
        .map(|p| {
            let pair = binary_features(q, p)?;
            let v = distance_vector(q, p, &pair, &store.stats)?;
            Ok((AttributeId::of(p), model.predict(&v)?))
        })
        .collect::<Result<_>>()?;
    Ok(Ranking::from_scores(query.clone(), scored, k))
}
