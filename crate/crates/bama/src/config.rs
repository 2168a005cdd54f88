//! JSON run configurations. Every field except the student profile has a
//! default, and unknown fields are rejected.

use std::path::Path;

use bama_core::{PolicyConfig, PosteriorState, StudentProfile};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Input of `assess`: one simulated student run through the policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessConfig {
    pub profile: StudentProfile,
    #[serde(default = "PosteriorState::optimistic")]
    pub prior: PosteriorState,
    #[serde(default)]
    pub policy: PolicyConfig,
    #[serde(default)]
    pub seed: u64,
}

impl AssessConfig {
    pub fn validate(&self) -> Result<()> {
        self.profile
            .validate()
            .map_err(|e| Error::config("profile", e))?;
        self.prior
            .validate()
            .map_err(|e| Error::config("prior", e))?;
        self.policy
            .validate()
            .map_err(|e| Error::config("policy", e))?;
        Ok(())
    }
}

/// Reads a JSON document. Unreadable or malformed files are config errors.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}
