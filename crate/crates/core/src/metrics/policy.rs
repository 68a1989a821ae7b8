use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::enumeration::{Family, PlacementSet};
use crate::scenario::PROB_TOLERANCE;
use crate::{Error, Result};

/// Per-cache probability distribution over a placement set, stored sparsely
/// as `(placement index, probability)` pairs sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    family: Family,
    set_len: usize,
    caches: Vec<Vec<(usize, f64)>>,
}

impl Policy {
    pub fn new(set: &PlacementSet, caches: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if caches.is_empty() {
            return Err(Error::Validation(
                "a policy needs at least one cache".into(),
            ));
        }
        let mut sorted = Vec::with_capacity(caches.len());
        for (k, mut entries) in caches.into_iter().enumerate() {
            entries.sort_by_key(|&(idx, _)| idx);
            let mut total = 0.0;
            for (pos, &(idx, prob)) in entries.iter().enumerate() {
                if idx >= set.len() {
                    return Err(Error::IndexOutOfRange {
                        what: "placement",
                        index: idx,
                        len: set.len(),
                    });
                }
                if pos > 0 && entries[pos - 1].0 == idx {
                    return Err(Error::Validation(format!(
                        "cache {}: placement {idx} listed twice",
                        k + 1
                    )));
                }
                if !prob.is_finite() || !(0.0..=1.0).contains(&prob) {
                    return Err(Error::Validation(format!(
                        "cache {}: probability {prob} of placement {idx} is not in [0, 1]",
                        k + 1
                    )));
                }
                total += prob;
            }
            if (total - 1.0).abs() > PROB_TOLERANCE {
                return Err(Error::Validation(format!(
                    "cache {}: probabilities sum to {total}",
                    k + 1
                )));
            }
            sorted.push(entries);
        }
        Ok(Self {
            family: set.family(),
            set_len: set.len(),
            caches: sorted,
        })
    }

    /// Every cache stores placement `index` with probability one.
    pub fn deterministic(set: &PlacementSet, num_caches: usize, index: usize) -> Result<Self> {
        Self::new(set, vec![vec![(index, 1.0)]; num_caches])
    }

    /// Every cache picks each placement of `set` with equal probability.
    pub fn uniform(set: &PlacementSet, num_caches: usize) -> Result<Self> {
        let p = 1.0 / set.len() as f64;
        let entries: Vec<(usize, f64)> = (0..set.len()).map(|idx| (idx, p)).collect();
        Self::new(set, vec![entries; num_caches])
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn num_caches(&self) -> usize {
        self.caches.len()
    }

    pub fn cache(&self, cache: usize) -> &[(usize, f64)] {
        &self.caches[cache]
    }

    pub fn caches(&self) -> &[Vec<(usize, f64)>] {
        &self.caches
    }

    /// Probability that `cache` stores placement `index`.
    pub fn prob(&self, cache: usize, index: usize) -> f64 {
        let entries = &self.caches[cache];
        entries
            .binary_search_by_key(&index, |&(idx, _)| idx)
            .map(|pos| entries[pos].1)
            .unwrap_or(0.0)
    }

    /// Checks that the policy was built for `set` and has one distribution
    /// per cache of the scenario.
    pub(crate) fn check_against(&self, set: &PlacementSet, num_caches: usize) -> Result<()> {
        if self.family != set.family() || self.set_len != set.len() {
            return Err(Error::Validation(format!(
                "policy over a {} family of {} placements does not match the {} family of {}",
                self.family,
                self.set_len,
                set.family(),
                set.len()
            )));
        }
        if self.caches.len() != num_caches {
            return Err(Error::Validation(format!(
                "policy has {} caches, scenario has {num_caches}",
                self.caches.len()
            )));
        }
        Ok(())
    }
}
