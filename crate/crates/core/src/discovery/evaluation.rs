use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{AttributeId, GroundTruthEntry, Ranking};
use crate::error::{Error, Result};
use crate::metrics::Strictness;

/// Which ground-truth column a threshold classifier scores with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreColumn {
    Containment,
    Jaccard,
    Cardinality,
    Quality(Strictness),
}

impl ScoreColumn {
    pub fn of(self, e: &GroundTruthEntry) -> f64 {
        match self {
            ScoreColumn::Containment => e.containment,
            ScoreColumn::Jaccard => e.jaccard,
            ScoreColumn::Cardinality => e.k,
            ScoreColumn::Quality(s) => e.quality(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub accuracy: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Scores strictly above `threshold` are predicted positive. Precision is 0
/// when nothing is predicted positive.
pub fn threshold_classifier(scored: &[(f64, bool)], threshold: f64) -> Result<ClassifierReport> {
    if scored.is_empty() {
        return Err(Error::Empty("no examples to classify"));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for &(score, truth) in scored {
        match (score > threshold, truth) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    if tp + fn_ == 0 {
        return Err(Error::Undefined("recall without any positive example"));
    }
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = tp as f64 / (tp + fn_) as f64;
    let f_score = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    let accuracy = (tp + tn) as f64 / scored.len() as f64;
    Ok(ClassifierReport { precision, recall, f_score, accuracy, tp, fp, tn, fn_ })
}

/// Threshold classifier over a ground-truth column, with positives being the
/// pairs at or above the semantic level.
pub fn evaluate_threshold_classifier(
    entries: &[GroundTruthEntry],
    column: ScoreColumn,
    threshold: f64,
) -> Result<ClassifierReport> {
    let scored: Vec<(f64, bool)> = entries.iter().map(|e| (column.of(e), e.is_semantic())).collect();
    threshold_classifier(&scored, threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingMetrics {
    pub precision_at_k: f64,
    pub recall_at_ground_truth: f64,
    /// Recall within the first `|ground truth|` candidates.
    pub recall_at_size_of_gt: f64,
    /// Precision within the first `ceil(|ground truth| / 2)` candidates.
    pub precision_at_50: f64,
    /// Set when the ranking is empty; all metrics are then 0.
    pub empty: bool,
}

fn hits(ranking: &Ranking, relevant: &HashSet<AttributeId>, n: usize) -> usize {
    ranking.candidates.iter().take(n).filter(|c| relevant.contains(&c.id())).count()
}

pub fn ranking_metrics(ranking: &Ranking, relevant: &HashSet<AttributeId>, k: usize) -> Result<RankingMetrics> {
    if relevant.is_empty() {
        return Err(Error::Empty("ground truth for the query is empty"));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if ranking.is_empty() {
        return Ok(RankingMetrics {
            precision_at_k: 0.0,
            recall_at_ground_truth: 0.0,
            recall_at_size_of_gt: 0.0,
            precision_at_50: 0.0,
            empty: true,
        });
    }
    let g = relevant.len();
    let half = g.div_ceil(2);
    Ok(RankingMetrics {
        precision_at_k: hits(ranking, relevant, k) as f64 / k as f64,
        recall_at_ground_truth: hits(ranking, relevant, usize::MAX) as f64 / g as f64,
        recall_at_size_of_gt: hits(ranking, relevant, g) as f64 / g as f64,
        precision_at_50: hits(ranking, relevant, half) as f64 / half as f64,
        empty: false,
    })
}

/// Attributes that form a semantic join with `query`, measured from the
/// query's side.
pub fn relevant_candidates(entries: &[GroundTruthEntry], query: &AttributeId) -> HashSet<AttributeId> {
    entries
        .iter()
        .filter(|e| e.is_semantic() && e.dataset_a == query.dataset && e.attribute_a == query.attribute)
        .map(|e| e.b())
        .collect()
}
