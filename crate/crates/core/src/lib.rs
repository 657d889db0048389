//! Join discovery over repositories of independent tabular files.
//!
//! The crate is organised along the pipeline it implements:
//!
//! - [`tabular`] loads delimited files and preprocesses cell values.
//! - [`profiler`] turns a column into an [`AttributeProfile`] of meta-features.
//! - [`metrics`] holds the exact set coefficients (containment, Jaccard,
//!   cardinality proportion) and the discrete and continuous join quality
//!   metrics, together with the distribution fitting used to calibrate them.
//! - [`compare`] normalizes profiles over a pool and builds the
//!   [`DistanceVector`] fed to the predictor.
//! - [`predictor`] trains and serves the regression model estimating join
//!   quality from distance vectors.
//! - [`discovery`] keeps a profile repository, answers discovery-by-attribute
//!   queries and computes ground truth and evaluation metrics.

pub mod compare;
pub mod discovery;
pub mod error;
pub mod metrics;
pub mod predictor;
pub mod profiler;
pub mod tabular;

pub use compare::{DistanceVector, NormalizationStats, LAYOUT_VERSION};
pub use discovery::{AttributeId, GroundTruthEntry, ProfileStore, Ranking};
pub use error::{Error, Result};
pub use metrics::{FittedParams, QualityKind, QualityScore, Strictness, ValueSet};
pub use predictor::{RegressionModel, TrainConfig, TrainingExample};
pub use profiler::{AttributeProfile, BinaryFeatures, DataType, SpecificType};
pub use tabular::{Column, Dataset};
