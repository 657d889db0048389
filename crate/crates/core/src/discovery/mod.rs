//! Profile repository, discovery-by-attribute and evaluation.

mod evaluation;
mod ground_truth;
mod search;
mod store;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use evaluation::{
    evaluate_threshold_classifier, ranking_metrics, relevant_candidates, threshold_classifier,
    ClassifierReport, RankingMetrics, ScoreColumn,
};
pub use ground_truth::{
    generate_ground_truth, read_ground_truth, subsample_zero_overlap, training_examples, write_ground_truth,
    GroundTruthEntry, GroundTruthOptions, LEVELS, SEMANTIC_LEVEL,
};
pub use search::{discover_by_attribute, RankedCandidate, Ranking};
pub use store::{index_repository, profile_dataset, IndexOptions, IndexOutcome, ProfileStore};

use crate::error::{Error, Result};
use crate::profiler::AttributeProfile;

/// `(dataset, attribute)` identity of a column, written `dataset.attribute`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AttributeId {
    pub dataset: String,
    pub attribute: String,
}

impl AttributeId {
    pub fn new(dataset: impl Into<String>, attribute: impl Into<String>) -> Self {
        AttributeId { dataset: dataset.into(), attribute: attribute.into() }
    }

    pub fn of(profile: &AttributeProfile) -> Self {
        AttributeId::new(&profile.dataset_name, &profile.attribute_name)
    }

    /// Splits `dataset.attribute` at the first dot.
    pub fn parse(text: &str) -> Result<Self> {
        match text.split_once('.') {
            Some((d, a)) if !d.is_empty() && !a.is_empty() => Ok(AttributeId::new(d, a)),
            _ => Err(Error::InvalidArgument(format!(
                "attribute id {text:?} is not of the form dataset.attribute"
            ))),
        }
    }
}

impl fmt::Display for AttributeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.dataset, self.attribute)
    }
}
