use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AttributeId;
use crate::compare::{compute_normalization, NormalizationStats, LAYOUT_VERSION};
use crate::error::{Error, Result};
use crate::profiler::{build_profile, AttributeProfile};
use crate::tabular::{load_dataset, string_columns, Dataset, DEFAULT_NUMERIC_EXCLUSION};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub numeric_threshold: f64,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions { delimiter: b',', has_header: true, numeric_threshold: DEFAULT_NUMERIC_EXCLUSION }
    }
}

/// Profiles every string column of a dataset, in column order.
pub fn profile_dataset(dataset: &Dataset, numeric_threshold: f64) -> Result<Vec<AttributeProfile>> {
    string_columns(dataset, numeric_threshold)
        .par_iter()
        .map(|c| build_profile(c))
        .collect()
}

/// Immutable snapshot of profiled attributes plus the normalization
/// statistics computed over exactly those profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileStore {
    pub version: u64,
    pub layout_version: String,
    pub stats: NormalizationStats,
    profiles: Vec<AttributeProfile>,
}

impl ProfileStore {
    /// Builds a snapshot. Profiles are rounded to their persisted precision
    /// first so a saved and reloaded store is identical to the original.
    pub fn from_profiles(profiles: Vec<AttributeProfile>, version: u64) -> Result<Self> {
        let mut by_id: BTreeMap<AttributeId, AttributeProfile> = BTreeMap::new();
        for p in profiles {
            if p.cardinality == 0 {
                continue;
            }
            let id = AttributeId::of(&p);
            if by_id.insert(id.clone(), p.rounded()).is_some() {
                return Err(Error::InvalidArgument(format!("attribute {id} profiled twice")));
            }
        }
        let profiles: Vec<AttributeProfile> = by_id.into_values().collect();
        let stats = compute_normalization(&profiles)?;
        Ok(ProfileStore { version, layout_version: LAYOUT_VERSION.to_string(), stats, profiles })
    }

    /// New snapshot with `profiles` added; datasets already present are
    /// replaced wholesale. Statistics are recomputed and the version bumped.
    pub fn with_added(&self, profiles: Vec<AttributeProfile>) -> Result<Self> {
        let replaced: std::collections::HashSet<&str> =
            profiles.iter().map(|p| p.dataset_name.as_str()).collect();
        let mut all: Vec<AttributeProfile> = self
            .profiles
            .iter()
            .filter(|p| !replaced.contains(p.dataset_name.as_str()))
            .cloned()
            .collect();
        all.extend(profiles);
        ProfileStore::from_profiles(all, self.version + 1)
    }

    /// Profiles sorted by `(dataset, attribute)`.
    pub fn profiles(&self) -> &[AttributeProfile] {
        &self.profiles
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn get(&self, id: &AttributeId) -> Option<&AttributeProfile> {
        self.profiles
            .binary_search_by(|p| {
                (p.dataset_name.as_str(), p.attribute_name.as_str())
                    .cmp(&(id.dataset.as_str(), id.attribute.as_str()))
            })
            .ok()
            .map(|i| &self.profiles[i])
    }

    pub fn datasets(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.profiles.iter().map(|p| p.dataset_name.as_str()).collect();
        names.dedup();
        names
    }

    /// Resolves `dataset.attribute` where either part may itself contain dots.
    pub fn resolve(&self, text: &str) -> Result<AttributeId> {
        let parsed = AttributeId::parse(text)?;
        if self.get(&parsed).is_some() {
            return Ok(parsed);
        }
        for (pos, _) in text.match_indices('.').skip(1) {
            let id = AttributeId::new(&text[..pos], &text[pos + 1..]);
            if self.get(&id).is_some() {
                return Ok(id);
            }
        }
        Err(Error::UnknownAttribute(text.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let malformed = |reason: String| Error::Malformed { path: path.to_path_buf(), reason };
        let store: ProfileStore = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
        if store.layout_version != LAYOUT_VERSION {
            return Err(Error::LayoutMismatch {
                expected: LAYOUT_VERSION.to_string(),
                found: store.layout_version,
            });
        }
        let sorted = store
            .profiles
            .windows(2)
            .all(|w| AttributeId::of(&w[0]) < AttributeId::of(&w[1]));
        if !sorted {
            return Err(malformed("profiles are not sorted by attribute id".into()));
        }
        Ok(store)
    }
}

#[derive(Debug)]
pub struct IndexOutcome {
    pub store: ProfileStore,
    pub datasets: Vec<Dataset>,
    pub failures: Vec<(PathBuf, Error)>,
}

/// Loads and profiles every file. Files that fail are collected in
/// `failures`; the call errors only if nothing could be indexed.
pub fn index_repository(paths: &[PathBuf], options: &IndexOptions) -> Result<IndexOutcome> {
    if paths.is_empty() {
        return Err(Error::Empty("no input files to index"));
    }
    let loaded: Vec<(PathBuf, Result<(Dataset, Vec<AttributeProfile>)>)> = paths
        .par_iter()
        .map(|path| {
            let result = load_dataset(path, options.delimiter, options.has_header).and_then(|d| {
                let profiles = profile_dataset(&d, options.numeric_threshold)?;
                Ok((d, profiles))
            });
            (path.clone(), result)
        })
        .collect();

    let mut datasets = Vec::new();
    let mut profiles = Vec::new();
    let mut failures = Vec::new();
    let mut names = std::collections::HashSet::new();
    for (path, result) in loaded {
        match result {
            Ok((d, p)) if names.insert(d.name.clone()) => {
                info!("profiled {} ({} string attributes)", path.display(), p.len());
                profiles.extend(p);
                datasets.push(d);
            }
            Ok((d, _)) => {
                let err = Error::InvalidArgument(format!("dataset name {} is already indexed", d.name));
                warn!("{}: {err}", path.display());
                failures.push((path, err));
            }
            Err(err) => {
                warn!("{}: {err}", path.display());
                failures.push((path, err));
            }
        }
    }
    if datasets.is_empty() {
        return Err(Error::Empty("every input file failed to load"));
    }
    let store = ProfileStore::from_profiles(profiles, 1)?;
    Ok(IndexOutcome { store, datasets, failures })
}
