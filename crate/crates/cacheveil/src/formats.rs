//! JSON documents: scenarios, policies and per-file caching probabilities.

use std::fs;
use std::path::Path;

use anyhow::Context;
use cacheveil_core::dpc::AlphaVector;
use cacheveil_core::enumeration::{Family, Partition, PlacementSet};
use cacheveil_core::scenario::PopularitySource;
use cacheveil_core::{Policy, Scenario};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZipfDoc {
    pub alpha: f64,
    /// Optional; must equal `num_files` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub num_files: usize,
    pub num_caches: usize,
    pub cache_capacity: usize,
    pub chunks_per_file: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub popularity: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zipf: Option<ZipfDoc>,
    pub request_gen: Vec<f64>,
}

impl ScenarioDoc {
    pub fn from_scenario(s: &Scenario) -> Self {
        let (popularity, zipf) = match s.source() {
            PopularitySource::Zipf { alpha } => (None, Some(ZipfDoc { alpha, n: None })),
            PopularitySource::Explicit => (Some(s.popularity().to_vec()), None),
        };
        Self {
            num_files: s.num_files(),
            num_caches: s.num_caches(),
            cache_capacity: s.cache_capacity(),
            chunks_per_file: s.chunks_per_file(),
            popularity,
            zipf,
            request_gen: s.request_gen().to_vec(),
        }
    }

    pub fn to_scenario(&self) -> Result<Scenario, CliError> {
        match (&self.popularity, &self.zipf) {
            (Some(p), None) => Ok(Scenario::new(
                self.num_files,
                self.num_caches,
                self.cache_capacity,
                self.chunks_per_file,
                p,
                &self.request_gen,
            )?),
            (None, Some(z)) => {
                if let Some(n) = z.n {
                    if n != self.num_files {
                        return Err(CliError::Validation(format!(
                            "zipf.n = {n} but num_files = {}",
                            self.num_files
                        )));
                    }
                }
                Ok(Scenario::with_zipf(
                    self.num_files,
                    self.num_caches,
                    self.cache_capacity,
                    self.chunks_per_file,
                    z.alpha,
                    &self.request_gen,
                )?)
            }
            (Some(_), Some(_)) => Err(CliError::Validation(
                "give either `popularity` or `zipf`, not both".into(),
            )),
            (None, None) => Err(CliError::Validation(
                "missing `popularity` or `zipf`".into(),
            )),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Io)
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    parse::<ScenarioDoc>(text, "scenario")?.to_scenario()
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    parse_scenario(&read(path)?)
}

/// SHA-256 of the canonical JSON of the validated scenario, so formatting
/// and key order do not change the digest.
pub fn scenario_digest(s: &Scenario) -> String {
    let canonical =
        serde_json::to_string(&ScenarioDoc::from_scenario(s)).expect("scenario serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyEntry {
    pub placement_index: usize,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyDoc {
    pub family: Family,
    /// Subset sizes, required for the subset family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<usize>>,
    pub caches: Vec<Vec<PolicyEntry>>,
}

impl PolicyDoc {
    pub fn from_policy(policy: &Policy, set: &PlacementSet) -> Self {
        Self {
            family: policy.family(),
            partition: set.partition().map(|p| p.sizes().to_vec()),
            caches: policy
                .caches()
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|&(placement_index, prob)| PolicyEntry {
                            placement_index,
                            prob,
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn partition(&self, s: &Scenario) -> Result<Option<Partition>, CliError> {
        match (&self.partition, self.family) {
            (Some(sizes), Family::Subset) => Ok(Some(Partition::new(sizes, s.num_files())?)),
            (None, Family::Subset) => Err(CliError::Validation(
                "subset policy needs `partition`".into(),
            )),
            (Some(_), _) => Err(CliError::Validation(
                "`partition` only applies to the subset family".into(),
            )),
            (None, _) => Ok(None),
        }
    }

    pub fn to_policy(&self, set: &PlacementSet) -> Result<Policy, CliError> {
        let caches = self
            .caches
            .iter()
            .map(|c| c.iter().map(|e| (e.placement_index, e.prob)).collect())
            .collect();
        Ok(Policy::new(set, caches)?)
    }
}

pub fn load_policy(path: &Path) -> Result<PolicyDoc, CliError> {
    parse(&read(path)?, "policy")
}

/// One cache's per-file caching probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaDoc {
    pub cache_capacity: usize,
    pub alpha: Vec<f64>,
}

impl AlphaDoc {
    pub fn to_alpha(&self) -> Result<AlphaVector, CliError> {
        Ok(AlphaVector::new(&self.alpha, self.cache_capacity)?)
    }
}

pub fn load_alpha(path: &Path) -> Result<AlphaDoc, CliError> {
    parse(&read(path)?, "alpha")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    text.push('\n');
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Io)
}
