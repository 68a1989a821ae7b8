//! Metrics for subset-family policies. Within a subset the cached chunks are
//! a uniform draw without replacement, so the chunk count of any one file is
//! hypergeometric given the subset's chunk count.

use alloc::vec;
use alloc::vec::Vec;

use super::{map_decision, AdversaryDecision, DecisionKind, Policy, TransferTable};
use crate::combinatorics::hypergeometric_pmf;
use crate::enumeration::{Family, Partition, PlacementSet};
use crate::{Error, Result, Scenario};

/// `q^(k)_{l,x}`: probability that cache `k` holds `x` chunks of subset `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetMarginals {
    caches: usize,
    chunks: usize,
    partition: Partition,
    q: Vec<Vec<f64>>,
}

/// Probability that `held` of the `C` chunks of one file are among the
/// `x` chunks drawn from a subset of `size` files.
pub(crate) fn chunks_of_file(size: usize, chunks: usize, x: usize, held: usize) -> f64 {
    hypergeometric_pmf((size * chunks) as i64, chunks as i64, x as i64, held as i64)
}

impl SubsetMarginals {
    pub fn new(scenario: &Scenario, set: &PlacementSet, policy: &Policy) -> Result<Self> {
        if policy.family() != Family::Subset {
            return Err(Error::WrongFamily {
                expected: "subset family",
                found: policy.family(),
            });
        }
        let partition = set
            .partition()
            .ok_or_else(|| Error::Validation("subset placement set without a partition".into()))?
            .clone();
        set.check_matches(scenario, Some(&partition))?;
        policy.check_against(set, scenario.num_caches())?;
        let caches = scenario.num_caches();
        let chunks = scenario.chunks_per_file();
        let subsets = partition.len();
        let mut q: Vec<Vec<f64>> = (0..caches)
            .flat_map(|_| partition.sizes().iter().map(|s| vec![0.0; s * chunks + 1]))
            .collect();
        for k in 0..caches {
            for &(idx, prob) in policy.cache(k) {
                for (l, &x) in set.get(idx).iter().enumerate() {
                    q[k * subsets + l][x as usize] += prob;
                }
            }
        }
        Ok(Self {
            caches,
            chunks,
            partition,
            q,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// `q^(k)_{l,·}`, indexed by `x ∈ 0..=|S_l|·C`.
    pub fn get(&self, cache: usize, subset: usize) -> &[f64] {
        &self.q[cache * self.partition.len() + subset]
    }

    /// `P(Y = y | l, k) = sum_x q^(k)_{l,x} · P_{x, C-y}`.
    pub fn transfer_table(&self) -> TransferTable {
        let c = self.chunks;
        let mut table = TransferTable::zeros(self.caches, self.partition.len(), c);
        for k in 0..self.caches {
            for l in 0..self.partition.len() {
                let size = self.partition.size(l);
                let q = self.get(k, l);
                let row = table.row_mut(k, l);
                for (y, slot) in row.iter_mut().enumerate() {
                    let held = c - y;
                    *slot = (held..q.len())
                        .filter(|&x| q[x] != 0.0)
                        .map(|x| q[x] * chunks_of_file(size, c, x, held))
                        .sum();
                }
            }
        }
        table
    }

    fn subset_popularity(&self, scenario: &Scenario) -> Vec<f64> {
        (0..self.partition.len())
            .map(|l| {
                self.partition
                    .files(l)
                    .map(|i| scenario.popularity()[i])
                    .sum()
            })
            .collect()
    }

    /// `Ω = (1/C) sum_k sum_l sum_x p_g^(k) a_l q^(k)_{l,x} (C - x/|S_l|)`.
    pub fn communication_cost(&self, scenario: &Scenario) -> f64 {
        let c = self.chunks as f64;
        let a = self.subset_popularity(scenario);
        let mut total = 0.0;
        for (k, &pg) in scenario.request_gen().iter().enumerate() {
            for (l, &al) in a.iter().enumerate() {
                let size = self.partition.size(l) as f64;
                let missing: f64 = self
                    .get(k, l)
                    .iter()
                    .enumerate()
                    .map(|(x, &q)| q * (c - x as f64 / size))
                    .sum();
                total += pg * al * missing;
            }
        }
        total / c
    }

    pub fn privacy_degree(&self, scenario: &Scenario) -> (f64, AdversaryDecision) {
        let (weights, report) = most_popular_per_subset(scenario, &self.partition);
        map_decision(
            scenario.request_gen(),
            &weights,
            &report,
            DecisionKind::Subset,
            &self.transfer_table(),
        )
    }

    pub fn hit_ratio(&self, scenario: &Scenario) -> (Vec<f64>, f64) {
        let a = self.subset_popularity(scenario);
        let c = self.chunks;
        let per_cache: Vec<f64> = (0..self.caches)
            .map(|k| {
                a.iter()
                    .enumerate()
                    .map(|(l, &al)| {
                        let size = self.partition.size(l);
                        let hit: f64 = self
                            .get(k, l)
                            .iter()
                            .enumerate()
                            .map(|(x, &q)| q * (1.0 - chunks_of_file(size, c, x, 0)))
                            .sum();
                        al * hit
                    })
                    .sum()
            })
            .collect();
        let average = per_cache
            .iter()
            .zip(scenario.request_gen())
            .map(|(h, pg)| h * pg)
            .sum();
        (per_cache, average)
    }
}

/// `p*_l` and the index of that file, for every subset.
pub(crate) fn most_popular_per_subset(
    scenario: &Scenario,
    partition: &Partition,
) -> (Vec<f64>, Vec<usize>) {
    (0..partition.len())
        .map(|l| {
            let first = partition.files(l).start;
            (scenario.popularity()[first], first)
        })
        .unzip()
}

fn check_cache_subset(
    scenario: &Scenario,
    set: &PlacementSet,
    cache: usize,
    subset: usize,
) -> Result<()> {
    if cache >= scenario.num_caches() {
        return Err(Error::IndexOutOfRange {
            what: "cache",
            index: cache,
            len: scenario.num_caches(),
        });
    }
    if subset >= set.width() {
        return Err(Error::IndexOutOfRange {
            what: "subset",
            index: subset,
            len: set.width(),
        });
    }
    Ok(())
}

/// `P(Y = y | l, k)` for `y ∈ 0..=C`.
pub fn spc_transfer_distribution(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
    cache: usize,
    subset: usize,
) -> Result<Vec<f64>> {
    let m = SubsetMarginals::new(scenario, set, policy)?;
    check_cache_subset(scenario, set, cache, subset)?;
    Ok(m.transfer_table().row(cache, subset).to_vec())
}

pub fn spc_transfer_table(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
) -> Result<TransferTable> {
    Ok(SubsetMarginals::new(scenario, set, policy)?.transfer_table())
}

pub fn spc_communication_cost(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
) -> Result<f64> {
    Ok(SubsetMarginals::new(scenario, set, policy)?.communication_cost(scenario))
}

/// `Ψ = 1 - sum_y max_{l,k} p_g^(k) p*_l P(Y = y | l, k)` with the decision
/// table over `(k̂, l̂)`; the reported file is the most popular one of `l̂`.
pub fn spc_privacy_degree(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
) -> Result<(f64, AdversaryDecision)> {
    Ok(SubsetMarginals::new(scenario, set, policy)?.privacy_degree(scenario))
}

pub fn spc_hit_ratio(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
) -> Result<(Vec<f64>, f64)> {
    Ok(SubsetMarginals::new(scenario, set, policy)?.hit_ratio(scenario))
}
