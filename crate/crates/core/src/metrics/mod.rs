//! Analytic evaluation of caching policies.
//!
//! Every metric is a function of the transfer distributions
//! `P(Y = y | k, item)`: the probability that `y` chunks cross the shared
//! link when cache `k` requests a file (plain families) or a file of subset
//! `item` (subset family). [`TransferTable`] holds those distributions and
//! [`map_decision`] turns one into the MAP adversary's decision table and the
//! privacy degree.

mod bounds;
mod plain;
mod policy;
pub(crate) mod spc;

use alloc::vec;
use alloc::vec::Vec;

pub use bounds::{privacy_bounds, spc_privacy_bounds, SpcPrivacyBounds};
pub use plain::{
    communication_cost, hit_ratio, marginal_chunk_prob, plain_transfer_table, privacy_degree,
    transfer_distribution, Marginals,
};
pub use policy::Policy;
pub use spc::{
    spc_communication_cost, spc_hit_ratio, spc_privacy_degree, spc_transfer_distribution,
    spc_transfer_table, SubsetMarginals,
};

use crate::enumeration::{Family, PlacementSet};
use crate::{Result, Scenario};

/// `P(Y = y | cache, item)` for every cache, item and `y ∈ 0..=C`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferTable {
    caches: usize,
    items: usize,
    outcomes: usize,
    probs: Vec<f64>,
}

impl TransferTable {
    pub fn zeros(caches: usize, items: usize, chunks_per_file: usize) -> Self {
        let outcomes = chunks_per_file + 1;
        Self {
            caches,
            items,
            outcomes,
            probs: vec![0.0; caches * items * outcomes],
        }
    }

    pub fn caches(&self) -> usize {
        self.caches
    }

    pub fn items(&self) -> usize {
        self.items
    }

    /// `C + 1`.
    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    fn offset(&self, cache: usize, item: usize) -> usize {
        (cache * self.items + item) * self.outcomes
    }

    /// Distribution over `y` for one `(cache, item)` pair.
    pub fn row(&self, cache: usize, item: usize) -> &[f64] {
        let o = self.offset(cache, item);
        &self.probs[o..o + self.outcomes]
    }

    pub fn row_mut(&mut self, cache: usize, item: usize) -> &mut [f64] {
        let o = self.offset(cache, item);
        &mut self.probs[o..o + self.outcomes]
    }

    pub fn get(&self, cache: usize, item: usize, y: usize) -> f64 {
        self.probs[self.offset(cache, item) + y]
    }
}

/// What the adversary's item estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DecisionKind {
    File,
    Subset,
}

/// MAP estimate for one observed chunk count.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecisionEntry {
    pub y: usize,
    pub cache: usize,
    /// Estimated file (plain families) or subset (subset family).
    pub item: usize,
    /// Estimated file; for subsets, the most popular file of `item`.
    pub file: usize,
    /// `p_g^(k̂) · weight(item) · P(Y = y | k̂, item)`.
    pub score: f64,
}

/// The MAP adversary's decision for every `y ∈ 0..=C`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdversaryDecision {
    pub kind: DecisionKind,
    pub entries: Vec<DecisionEntry>,
}

impl AdversaryDecision {
    /// Probability that the adversary guesses `(cache, file)` correctly.
    pub fn success_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.score).sum()
    }

    pub fn entry(&self, y: usize) -> &DecisionEntry {
        &self.entries[y]
    }
}

/// Builds the MAP decision table for `table` and returns `(Ψ, decision)`.
///
/// `weights[item]` is the prior of the item the adversary reports (`p_i`, or
/// `p*_l` for subsets) and `report_file[item]` the file named in the
/// decision. Ties go to the smallest cache, then the smallest item.
pub fn map_decision(
    request_gen: &[f64],
    weights: &[f64],
    report_file: &[usize],
    kind: DecisionKind,
    table: &TransferTable,
) -> (f64, AdversaryDecision) {
    let mut entries = Vec::with_capacity(table.outcomes());
    for y in 0..table.outcomes() {
        let mut best = DecisionEntry {
            y,
            cache: 0,
            item: 0,
            file: report_file[0],
            score: request_gen[0] * weights[0] * table.get(0, 0, y),
        };
        for (k, &pg) in request_gen.iter().enumerate() {
            for (item, &w) in weights.iter().enumerate() {
                let score = pg * w * table.get(k, item, y);
                if score > best.score {
                    best = DecisionEntry {
                        y,
                        cache: k,
                        item,
                        file: report_file[item],
                        score,
                    };
                }
            }
        }
        entries.push(best);
    }
    let decision = AdversaryDecision { kind, entries };
    (1.0 - decision.success_probability(), decision)
}

/// Communication cost, privacy degree, hit ratios and decision table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvaluationReport {
    pub omega: f64,
    pub psi: f64,
    pub hit_ratio: Vec<f64>,
    pub average_hit_ratio: f64,
    pub decision: AdversaryDecision,
}

/// Full evaluation of `policy`, dispatching on its family.
pub fn evaluate(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
) -> Result<EvaluationReport> {
    match policy.family() {
        Family::Chunk | Family::File => {
            let marginals = Marginals::new(scenario, set, policy)?;
            let (psi, decision) = marginals.privacy_degree(scenario);
            let (hit_ratio, average_hit_ratio) = marginals.hit_ratio(scenario);
            Ok(EvaluationReport {
                omega: marginals.communication_cost(scenario),
                psi,
                hit_ratio,
                average_hit_ratio,
                decision,
            })
        }
        Family::Subset => {
            let marginals = SubsetMarginals::new(scenario, set, policy)?;
            let (psi, decision) = marginals.privacy_degree(scenario);
            let (hit_ratio, average_hit_ratio) = marginals.hit_ratio(scenario);
            Ok(EvaluationReport {
                omega: marginals.communication_cost(scenario),
                psi,
                hit_ratio,
                average_hit_ratio,
                decision,
            })
        }
    }
}

/// `Pr{Y = y}` summed over all requests, for each `y`.
pub fn observation_distribution(
    scenario: &Scenario,
    weights_per_item: &[f64],
    table: &TransferTable,
) -> Vec<f64> {
    let mut out = vec![0.0; table.outcomes()];
    for (k, &pg) in scenario.request_gen().iter().enumerate() {
        for (item, &w) in weights_per_item.iter().enumerate() {
            for (y, slot) in out.iter_mut().enumerate() {
                *slot += pg * w * table.get(k, item, y);
            }
        }
    }
    out
}
