use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AttributeProfile;
use crate::error::{Error, Result};

/// Persisted profiles of one dataset. Reals carry 12 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDocument {
    pub dataset: String,
    pub attributes: Vec<AttributeProfile>,
}

impl ProfileDocument {
    pub fn new(dataset: impl Into<String>, attributes: &[AttributeProfile]) -> Self {
        ProfileDocument {
            dataset: dataset.into(),
            attributes: attributes.iter().map(AttributeProfile::rounded).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
    }
}
