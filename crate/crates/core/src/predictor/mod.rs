//! Regression model predicting join quality from distance vectors.
//!
//! The model is a multilayer perceptron with one ReLU hidden layer (width
//! 100 by default) and a linear scalar output, trained on mean squared error
//! with an L2 penalty using mini-batch Adam. Inputs are standardized with
//! statistics of the training set, stored alongside the weights. Predictions
//! are clamped to `[0, 1]`.
//!
//! Training is single-threaded and fully determined by [`TrainConfig`],
//! including the seed, so the same corpus always yields the same weights.

mod eval;
mod network;

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use eval::{evaluate_regression, regression_metrics, spearman, RegressionReport};
pub use network::{Gradient, Network};

use crate::compare::DistanceVector;
use crate::error::{Error, Result};
use crate::metrics::QualityScore;

pub const MODEL_FORMAT: &str = "joinscout-mlp";
pub const MODEL_FORMAT_VERSION: u32 = 1;
pub const MIN_TRAINING_EXAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub vector: DistanceVector,
    pub label: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub hidden: usize,
    pub alpha: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { seed: 0, epochs: 200, learning_rate: 1e-3, batch_size: 32, hidden: 100, alpha: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    pub inputs: usize,
    pub hidden: usize,
    pub activation: String,
    pub outputs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub config: TrainConfig,
    pub examples: usize,
    /// Mean of the per-batch objective in each epoch.
    pub loss_curve: Vec<f64>,
    pub final_train_mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub format: String,
    pub format_version: u32,
    pub layout_version: String,
    pub architecture: Architecture,
    pub alpha: f64,
    pub input_mean: Vec<f64>,
    pub input_scale: Vec<f64>,
    pub network: Network,
    pub training: TrainingMetadata,
}

fn check_label(label: f64) -> Result<()> {
    if (0.0..=1.0).contains(&label) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("training label {label} is outside [0, 1]")))
    }
}

fn standardizer(rows: &[&[f64]], width: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = vec![0.0; width];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; width];
    for r in rows {
        for ((s, v), m) in var.iter_mut().zip(r.iter()).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let scale = var.into_iter().map(|s| {
        let sd = (s / n).sqrt();
        if sd > 1e-12 {
            sd
        } else {
            1.0
        }
    });
    (mean, scale.collect())
}

/// Fits a model to the examples.
pub fn train(examples: &[TrainingExample], config: &TrainConfig) -> Result<RegressionModel> {
    if examples.len() < MIN_TRAINING_EXAMPLES {
        return Err(Error::InvalidArgument(format!(
            "training needs at least {MIN_TRAINING_EXAMPLES} examples, got {}",
            examples.len()
        )));
    }
    if config.epochs == 0 || config.batch_size == 0 || config.hidden == 0 {
        return Err(Error::InvalidArgument("epochs, batch size and hidden width must be positive".into()));
    }
    if !(config.learning_rate > 0.0) || !(config.alpha >= 0.0) {
        return Err(Error::InvalidArgument("learning rate must be positive and alpha non-negative".into()));
    }
    let layout = examples[0].vector.layout.clone();
    let width = examples[0].vector.len();
    for ex in examples {
        if ex.vector.layout != layout || ex.vector.len() != width {
            return Err(Error::LayoutMismatch {
                expected: format!("{layout} ({width} entries)"),
                found: format!("{} ({} entries)", ex.vector.layout, ex.vector.len()),
            });
        }
        check_label(ex.label)?;
    }

    let raw: Vec<&[f64]> = examples.iter().map(|e| e.vector.values.as_slice()).collect();
    let (input_mean, input_scale) = standardizer(&raw, width);
    let inputs: Vec<Vec<f64>> = raw
        .iter()
        .map(|r| r.iter().zip(&input_mean).zip(&input_scale).map(|((v, m), s)| (v - m) / s).collect())
        .collect();
    let labels: Vec<f64> = examples.iter().map(|e| e.label).collect();
    let label_mean = labels.iter().sum::<f64>() / labels.len() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut net = Network::init(width, config.hidden, label_mean, &mut rng);
    let mut adam = network::Adam::new(net.parameter_count(), config.learning_rate);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut loss_curve = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let xs: Vec<&[f64]> = chunk.iter().map(|&i| inputs[i].as_slice()).collect();
            let ys: Vec<f64> = chunk.iter().map(|&i| labels[i]).collect();
            let (loss, grad) = net.loss_and_gradient(&xs, &ys, config.alpha);
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch });
            }
            adam.update(&mut net, &grad);
            epoch_loss += loss;
            batches += 1;
        }
        if !net.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        loss_curve.push(epoch_loss / batches as f64);
    }

    let final_train_mse = inputs
        .iter()
        .zip(&labels)
        .map(|(x, y)| (net.forward(x) - y).powi(2))
        .sum::<f64>()
        / labels.len() as f64;

    Ok(RegressionModel {
        format: MODEL_FORMAT.to_string(),
        format_version: MODEL_FORMAT_VERSION,
        layout_version: layout,
        architecture: Architecture {
            inputs: width,
            hidden: config.hidden,
            activation: "relu".to_string(),
            outputs: 1,
        },
        alpha: config.alpha,
        input_mean,
        input_scale,
        network: net,
        training: TrainingMetadata {
            config: *config,
            examples: examples.len(),
            loss_curve,
            final_train_mse,
        },
    })
}

impl RegressionModel {
    fn check_vector(&self, v: &DistanceVector) -> Result<()> {
        if v.layout != self.layout_version || v.len() != self.architecture.inputs {
            return Err(Error::LayoutMismatch {
                expected: format!("{} ({} entries)", self.layout_version, self.architecture.inputs),
                found: format!("{} ({} entries)", v.layout, v.len()),
            });
        }
        Ok(())
    }

    /// Unclamped network output.
    pub fn raw_output(&self, v: &DistanceVector) -> Result<f64> {
        self.check_vector(v)?;
        let x: Vec<f64> = v
            .values
            .iter()
            .zip(&self.input_mean)
            .zip(&self.input_scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect();
        Ok(self.network.forward(&x))
    }

    pub fn predict(&self, v: &DistanceVector) -> Result<QualityScore> {
        let out = self.raw_output(v)?;
        Ok(QualityScore::predicted(if out.is_nan() { 0.0 } else { out.clamp(0.0, 1.0) }))
    }

    pub fn predict_batch(&self, vectors: &[DistanceVector]) -> Result<Vec<QualityScore>> {
        vectors.par_iter().map(|v| self.predict(v)).collect()
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.format != MODEL_FORMAT {
            return Err(format!("unknown model format {:?}", self.format));
        }
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(format!(
                "model format version {} is not supported (expected {MODEL_FORMAT_VERSION})",
                self.format_version
            ));
        }
        let a = &self.architecture;
        let n = &self.network;
        let shapes_ok = a.activation == "relu"
            && a.outputs == 1
            && n.inputs == a.inputs
            && n.hidden == a.hidden
            && n.w1.len() == a.inputs * a.hidden
            && n.b1.len() == a.hidden
            && n.w2.len() == a.hidden
            && self.input_mean.len() == a.inputs
            && self.input_scale.len() == a.inputs;
        if !shapes_ok {
            return Err("weight shapes do not match the architecture".into());
        }
        if !n.is_finite() || self.input_scale.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err("non-finite weights".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RegressionModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let malformed = |reason: String| Error::Malformed { path: path.to_path_buf(), reason };
        let model: RegressionModel = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
        model.validate().map_err(malformed)?;
        Ok(model)
    }
}

/// Writes a training corpus, one JSON record per line.
pub fn write_corpus(path: impl AsRef<Path>, examples: &[TrainingExample]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for ex in examples {
        serde_json::to_writer(&mut out, ex)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<TrainingExample>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut examples = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let ex: TrainingExample = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            reason: format!("line {}: {e}", i + 1),
        })?;
        examples.push(ex);
    }
    Ok(examples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn corpus(n: usize, width: usize, seed: u64, label: impl Fn(&[f64]) -> f64) -> Vec<TrainingExample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let values: Vec<f64> = (0..width).map(|_| rng.gen_range(0.0..1.0)).collect();
                let label = label(&values);
                TrainingExample { vector: DistanceVector::new(values), label }
            })
            .collect()
    }

    fn quick() -> TrainConfig {
        TrainConfig { epochs: 30, hidden: 16, ..TrainConfig::default() }
    }

    #[test]
    fn constant_labels() {
        let data = corpus(200, 5, 1, |_| 0.5);
        let m = train(&data, &TrainConfig { hidden: 16, ..TrainConfig::default() }).unwrap();
        let curve = &m.training.loss_curve;
        assert!(curve[curve.len() - 1] < curve[0] / 10.0);
        assert!(m.training.final_train_mse < 5e-3, "{}", m.training.final_train_mse);
        let p = m.predict(&data[3].vector).unwrap();
        assert!((p.value - 0.5).abs() < 0.05);
    }

    #[test]
    fn rejects_small_or_mixed_corpora() {
        assert!(train(&corpus(10, 3, 1, |_| 0.1), &quick()).is_err());
        let mut data = corpus(60, 3, 1, |_| 0.1);
        data[7].vector.layout = "other".into();
        assert!(matches!(train(&data, &quick()), Err(Error::LayoutMismatch { .. })));
        let mut data = corpus(60, 3, 1, |_| 0.1);
        data[7].label = 1.5;
        assert!(train(&data, &quick()).is_err());
    }

    #[test]
    fn predictions_are_clamped_and_batched() {
        let data = corpus(100, 4, 2, |v| v[0]);
        let m = train(&data, &quick()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let probes: Vec<DistanceVector> = (0..50)
            .map(|_| DistanceVector::new((0..4).map(|_| rng.gen_range(-50.0..50.0)).collect()))
            .collect();
        let batch = m.predict_batch(&probes).unwrap();
        for (v, b) in probes.iter().zip(&batch) {
            let single = m.predict(v).unwrap();
            assert!((0.0..=1.0).contains(&single.value));
            assert_eq!(single.value.to_bits(), b.value.to_bits());
        }
    }

    #[test]
    fn same_seed_same_weights() {
        let data = corpus(80, 3, 5, |v| v[1] * 0.5);
        let a = train(&data, &quick()).unwrap();
        let b = train(&data, &quick()).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let c = train(&data, &TrainConfig { seed: 1, ..quick() }).unwrap();
        assert_ne!(a.network, c.network);
    }

    #[test]
    fn layout_guard_on_predict() {
        let data = corpus(60, 3, 5, |v| v[1]);
        let m = train(&data, &quick()).unwrap();
        let wrong = DistanceVector { layout: "joinscout-distance-v2".into(), values: vec![0.0; 3] };
        assert!(matches!(m.predict(&wrong), Err(Error::LayoutMismatch { .. })));
        assert!(m.predict(&DistanceVector::new(vec![0.0; 4])).is_err());
    }

    #[test]
    fn save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let data = corpus(60, 4, 3, |v| (v[0] + v[1]) / 2.0);
        let m = train(&data, &quick()).unwrap();
        let path = dir.path().join("m.jsmodel.json");
        m.save(&path).unwrap();
        let back = RegressionModel::load(&path).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let v = DistanceVector::new((0..4).map(|_| rng.gen_range(-2.0..2.0)).collect());
            assert_eq!(m.raw_output(&v).unwrap().to_bits(), back.raw_output(&v).unwrap().to_bits());
        }

        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(RegressionModel::load(&path), Err(Error::Malformed { .. })));

        let bumped = text.replace("\"format_version\":1", "\"format_version\":2");
        std::fs::write(&path, bumped).unwrap();
        assert!(matches!(RegressionModel::load(&path), Err(Error::Malformed { .. })));
    }

    #[test]
    fn corpus_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let data = corpus(5, 3, 3, |v| v[2]);
        let path = dir.path().join("corpus.jsonl");
        write_corpus(&path, &data).unwrap();
        assert_eq!(read_corpus(&path).unwrap(), data);
    }
}
