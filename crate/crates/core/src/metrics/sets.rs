use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::tabular::{preprocess_value, Column};

/// Distinct preprocessed values of an attribute.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValueSet {
    values: HashSet<String>,
}

impl ValueSet {
    /// Distinct non-missing cells after preprocessing.
    pub fn from_column(column: &Column) -> Self {
        column.non_missing().filter_map(preprocess_value).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: &str) -> bool {
        self.values.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.values.iter().map(String::as_str)
    }

    /// Size of the intersection, probing the smaller set.
    pub fn intersection_len(&self, other: &ValueSet) -> usize {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.values.iter().filter(|v| large.values.contains(*v)).count()
    }
}

impl<S: Into<String>> FromIterator<S> for ValueSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        ValueSet { values: iter.into_iter().map(Into::into).collect() }
    }
}

/// |A ∩ B| / |A|.
pub fn containment(a: &ValueSet, b: &ValueSet) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::Empty("containment of an empty value set"));
    }
    Ok(a.intersection_len(b) as f64 / a.len() as f64)
}

/// |A ∩ B| / |A ∪ B|.
pub fn jaccard(a: &ValueSet, b: &ValueSet) -> Result<f64> {
    let inter = a.intersection_len(b);
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return Err(Error::Empty("jaccard of two empty value sets"));
    }
    Ok(inter as f64 / union as f64)
}

/// min(|A|, |B|) / max(|A|, |B|).
pub fn cardinality_proportion(a: &ValueSet, b: &ValueSet) -> Result<f64> {
    cardinality_proportion_of(a.len(), b.len())
}

pub fn cardinality_proportion_of(a: usize, b: usize) -> Result<f64> {
    if a == 0 || b == 0 {
        return Err(Error::Empty("cardinality proportion of an empty value set"));
    }
    Ok(a.min(b) as f64 / a.max(b) as f64)
}

/// All three coefficients from one intersection pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetCoefficients {
    pub containment: f64,
    pub jaccard: f64,
    pub cardinality_proportion: f64,
}

pub fn set_coefficients(a: &ValueSet, b: &ValueSet) -> Result<SetCoefficients> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("set coefficients need two non-empty value sets"));
    }
    let inter = a.intersection_len(b) as f64;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    Ok(SetCoefficients {
        containment: inter / na,
        jaccard: inter / (na + nb - inter),
        cardinality_proportion: na.min(nb) / na.max(nb),
    })
}
