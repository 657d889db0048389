use serde::{Deserialize, Serialize};

use super::{RegressionModel, TrainingExample};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub mse: f64,
    pub mae: f64,
    pub r2: f64,
    pub spearman: f64,
}

/// Mid-ranks (1-based), ties sharing the average of their positions.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            out[i] = rank;
        }
        start = end;
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        None
    } else {
        Some(sxy / (sxx * syy).sqrt())
    }
}

/// Spearman rank correlation; 0 when either side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y)).unwrap_or(0.0)
}

pub fn regression_metrics(predictions: &[f64], labels: &[f64]) -> Result<RegressionReport> {
    if predictions.len() != labels.len() {
        return Err(Error::InvalidArgument("predictions and labels differ in length".into()));
    }
    if labels.is_empty() {
        return Err(Error::Empty("regression evaluation needs at least one example"));
    }
    if labels.len() < 2 {
        return Err(Error::Undefined("r2 needs at least two examples"));
    }
    let n = labels.len() as f64;
    let mean = labels.iter().sum::<f64>() / n;
    let (mut ss_res, mut abs, mut ss_tot) = (0.0, 0.0, 0.0);
    for (p, y) in predictions.iter().zip(labels) {
        ss_res += (y - p) * (y - p);
        abs += (y - p).abs();
        ss_tot += (y - mean) * (y - mean);
    }
    if ss_tot == 0.0 {
        return Err(Error::Undefined("r2 is undefined for constant labels"));
    }
    Ok(RegressionReport {
        mse: ss_res / n,
        mae: abs / n,
        r2: 1.0 - ss_res / ss_tot,
        spearman: spearman(predictions, labels),
    })
}

/// MSE, MAE, R² and Spearman of the model's (clamped) predictions.
pub fn evaluate_regression(model: &RegressionModel, test: &[TrainingExample]) -> Result<RegressionReport> {
    let vectors: Vec<_> = test.iter().map(|e| e.vector.clone()).collect();
    let predictions: Vec<f64> = model.predict_batch(&vectors)?.into_iter().map(|q| q.value).collect();
    let labels: Vec<f64> = test.iter().map(|e| e.label).collect();
    regression_metrics(&predictions, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LABELS: [f64; 5] = [0.1, 0.4, 0.35, 0.8, 0.6];

    #[test]
    fn perfect_predictions() {
        let r = regression_metrics(&LABELS, &LABELS).unwrap();
        assert_eq!((r.mse, r.mae, r.r2, r.spearman), (0.0, 0.0, 1.0, 1.0));
    }

    #[test]
    fn mean_prediction_has_zero_r2() {
        let mean = LABELS.iter().sum::<f64>() / 5.0;
        let r = regression_metrics(&[mean; 5], &LABELS).unwrap();
        assert!(r.r2.abs() < 1e-12);
    }

    #[test]
    fn constant_offset() {
        let shifted: Vec<f64> = LABELS.iter().map(|v| v + 0.1).collect();
        let r = regression_metrics(&shifted, &LABELS).unwrap();
        assert!((r.mae - 0.1).abs() < 1e-12);
        assert!((r.mse - 0.01).abs() < 1e-12);
        assert_eq!(r.spearman, 1.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(regression_metrics(&[0.2], &[0.3]), Err(Error::Undefined(_))));
        assert!(regression_metrics(&[], &[]).is_err());
        assert!(matches!(regression_metrics(&[0.1, 0.2], &[0.5, 0.5]), Err(Error::Undefined(_))));
    }

    #[test]
    fn tied_ranks() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
        let rho = spearman(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]);
        assert!((rho + 1.0).abs() < 1e-12);
    }
}
