//! The random dummy approach: cache the `M` most popular files and answer a
//! cached request with `C` dummy chunks with probability `s`.

use alloc::format;
use alloc::vec::Vec;

use crate::metrics::{
    map_decision, privacy_bounds, AdversaryDecision, DecisionKind, TransferTable,
};
use crate::{Error, Result, Scenario};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RdaConfig {
    s: f64,
}

impl RdaConfig {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || !(0.0..=1.0).contains(&s) {
            return Err(Error::Validation(format!(
                "dummy probability {s} is not in [0, 1]"
            )));
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// `1 - p_g^max ((1 - s) p_1 + max{p_{M+1}, s p_1})`.
pub fn rda_privacy(scenario: &Scenario, cfg: RdaConfig) -> f64 {
    let p = scenario.popularity();
    let s = cfg.s;
    let next = p[scenario.cache_capacity()];
    1.0 - scenario.max_request_gen() * ((1.0 - s) * p[0] + next.max(s * p[0]))
}

/// `s sum_{i<=M} p_i + sum_{i>M} p_i`.
pub fn rda_cost(scenario: &Scenario, cfg: RdaConfig) -> f64 {
    let m = scenario.cache_capacity();
    let p = scenario.popularity();
    let cached: f64 = p[..m].iter().sum();
    let uncached: f64 = p[m..].iter().sum();
    cfg.s * cached + uncached
}

/// Smallest `s` whose privacy degree is `zeta`.
pub fn rda_for_target(scenario: &Scenario, zeta: f64) -> Result<RdaConfig> {
    let (min, max) = privacy_bounds(scenario);
    let slack = 1e-12;
    if !zeta.is_finite() || zeta < min - slack || zeta > max + slack {
        return Err(Error::UnreachableTarget { zeta, min, max });
    }
    let p = scenario.popularity();
    let next = p[scenario.cache_capacity()];
    let raw = (p[0] + next - (1.0 - zeta) / scenario.max_request_gen()) / p[0];
    RdaConfig::new(raw.clamp(0.0, next / p[0]))
}

/// `P(Y = y | k, i)`: cached files send nothing with probability `1 - s`
/// and `C` dummy chunks otherwise; uncached files always send `C`.
pub fn rda_transfer_table(scenario: &Scenario, cfg: RdaConfig) -> TransferTable {
    let c = scenario.chunks_per_file();
    let mut table = TransferTable::zeros(scenario.num_caches(), scenario.num_files(), c);
    for k in 0..scenario.num_caches() {
        for i in 0..scenario.num_files() {
            let row = table.row_mut(k, i);
            if i < scenario.cache_capacity() {
                row[0] += 1.0 - cfg.s;
                row[c] += cfg.s;
            } else {
                row[c] = 1.0;
            }
        }
    }
    table
}

/// MAP decision table and privacy degree computed from the transfer table;
/// agrees with [`rda_privacy`].
pub fn rda_decision(scenario: &Scenario, cfg: RdaConfig) -> (f64, AdversaryDecision) {
    let files: Vec<usize> = (0..scenario.num_files()).collect();
    map_decision(
        scenario.request_gen(),
        scenario.popularity(),
        &files,
        DecisionKind::File,
        &rda_transfer_table(scenario, cfg),
    )
}
