//! Metrics for chunk- and file-family policies.

use alloc::vec;
use alloc::vec::Vec;

use super::{map_decision, AdversaryDecision, DecisionKind, Policy, TransferTable};
use crate::enumeration::{Family, PlacementSet};
use crate::{Error, Result, Scenario};

fn require_plain(policy: &Policy) -> Result<()> {
    match policy.family() {
        Family::Chunk | Family::File => Ok(()),
        found => Err(Error::WrongFamily {
            expected: "chunk or file family",
            found,
        }),
    }
}

/// Per-file chunk-count marginals `q^(k)_{i,x} = sum_{z: z_i = x} P^(k)(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    caches: usize,
    files: usize,
    chunks: usize,
    q: Vec<f64>,
}

impl Marginals {
    pub fn new(scenario: &Scenario, set: &PlacementSet, policy: &Policy) -> Result<Self> {
        require_plain(policy)?;
        set.check_matches(scenario, None)?;
        policy.check_against(set, scenario.num_caches())?;
        let caches = scenario.num_caches();
        let files = scenario.num_files();
        let chunks = scenario.chunks_per_file();
        let mut q = vec![0.0; caches * files * (chunks + 1)];
        for k in 0..caches {
            for &(idx, prob) in policy.cache(k) {
                for (i, &x) in set.get(idx).iter().enumerate() {
                    q[(k * files + i) * (chunks + 1) + x as usize] += prob;
                }
            }
        }
        Ok(Self {
            caches,
            files,
            chunks,
            q,
        })
    }

    pub fn get(&self, cache: usize, file: usize, x: usize) -> f64 {
        self.q[(cache * self.files + file) * (self.chunks + 1) + x]
    }

    /// `P(Y = y | k, i) = q^(k)_{i, C - y}`.
    pub fn transfer_table(&self) -> TransferTable {
        let mut table = TransferTable::zeros(self.caches, self.files, self.chunks);
        for k in 0..self.caches {
            for i in 0..self.files {
                let row = table.row_mut(k, i);
                for (y, slot) in row.iter_mut().enumerate() {
                    *slot = self.get(k, i, self.chunks - y);
                }
            }
        }
        table
    }

    pub fn communication_cost(&self, scenario: &Scenario) -> f64 {
        let c = self.chunks as f64;
        let mut total = 0.0;
        for (k, &pg) in scenario.request_gen().iter().enumerate() {
            for (i, &p) in scenario.popularity().iter().enumerate() {
                let expected_missing: f64 = (0..=self.chunks)
                    .map(|x| (self.chunks - x) as f64 * self.get(k, i, x))
                    .sum();
                total += pg * p * expected_missing;
            }
        }
        total / c
    }

    pub fn privacy_degree(&self, scenario: &Scenario) -> (f64, AdversaryDecision) {
        let files: Vec<usize> = (0..self.files).collect();
        map_decision(
            scenario.request_gen(),
            scenario.popularity(),
            &files,
            DecisionKind::File,
            &self.transfer_table(),
        )
    }

    /// `h^(k) = sum_i p_i (1 - q^(k)_{i,0})` and the `p_g`-weighted average.
    pub fn hit_ratio(&self, scenario: &Scenario) -> (Vec<f64>, f64) {
        let per_cache: Vec<f64> = (0..self.caches)
            .map(|k| {
                scenario
                    .popularity()
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| p * (1.0 - self.get(k, i, 0)))
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

fn check_cache_file(scenario: &Scenario, cache: usize, file: usize) -> Result<()> {
    if cache >= scenario.num_caches() {
        return Err(Error::IndexOutOfRange {
            what: "cache",
            index: cache,
            len: scenario.num_caches(),
        });
    }
    if file >= scenario.num_files() {
        return Err(Error::IndexOutOfRange {
            what: "file",
            index: file,
            len: scenario.num_files(),
        });
    }
    Ok(())
}

/// Probability that `cache` holds exactly `x` chunks of `file`.
pub fn marginal_chunk_prob(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
    cache: usize,
    file: usize,
    x: usize,
) -> Result<f64> {
    check_cache_file(scenario, cache, file)?;
    let m = Marginals::new(scenario, set, policy)?;
    Ok(if x > scenario.chunks_per_file() {
        0.0
    } else {
        m.get(cache, file, x)
    })
}

/// `P(Y = y | cache, file)` for `y ∈ 0..=C`.
pub fn transfer_distribution(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
    cache: usize,
    file: usize,
) -> Result<Vec<f64>> {
    check_cache_file(scenario, cache, file)?;
    let m = Marginals::new(scenario, set, policy)?;
    Ok(m.transfer_table().row(cache, file).to_vec())
}

pub fn plain_transfer_table(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
) -> Result<TransferTable> {
    Ok(Marginals::new(scenario, set, policy)?.transfer_table())
}

/// Expected files transferred per request, `Ω`.
pub fn communication_cost(scenario: &Scenario, set: &PlacementSet, policy: &Policy) -> Result<f64> {
    Ok(Marginals::new(scenario, set, policy)?.communication_cost(scenario))
}

/// Error probability of the MAP adversary, `Ψ`, with its decision table.
pub fn privacy_degree(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
) -> Result<(f64, AdversaryDecision)> {
    Ok(Marginals::new(scenario, set, policy)?.privacy_degree(scenario))
}

/// Per-cache hit ratios and their `p_g`-weighted average.
pub fn hit_ratio(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
) -> Result<(Vec<f64>, f64)> {
    Ok(Marginals::new(scenario, set, policy)?.hit_ratio(scenario))
}
