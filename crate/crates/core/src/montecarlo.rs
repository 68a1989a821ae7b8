//! Request-level simulation of the delivery phase.
//!
//! Each request draws its randomness from its own ChaCha8 stream (seeded by
//! the run seed, stream number = request index), so any partition of the
//! request range over workers yields the same counters. Accumulators are
//! integers and merge by addition.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::baselines::{rda_decision, rda_transfer_table, RdaConfig};
use crate::enumeration::{Family, PlacementSet};
use crate::metrics::{
    evaluate, observation_distribution, plain_transfer_table, spc_transfer_table,
    AdversaryDecision, DecisionKind, Policy,
};
use crate::{Error, Result, Scenario};

/// Stream used for the held placements of a run.
const HELD_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub num_requests: u64,
    pub seed: u64,
    pub resample_placements_each_request: bool,
}

impl SimConfig {
    pub fn new(num_requests: u64, seed: u64) -> Result<Self> {
        if num_requests == 0 {
            return Err(Error::Validation(
                "a simulation needs at least one request".into(),
            ));
        }
        Ok(Self {
            num_requests,
            seed,
            resample_placements_each_request: true,
        })
    }
}

/// What the server does.
#[derive(Debug, Clone, Copy)]
pub enum Mechanism<'a> {
    /// Each cache draws a placement from `policy` over `set`.
    Placement {
        set: &'a PlacementSet,
        policy: &'a Policy,
    },
    /// Top-`M` caching with dummy responses.
    Rda(RdaConfig),
}

/// Integer accumulators of a (partial) run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimCounts {
    pub requests: u64,
    /// Sum of transferred chunk counts `y`.
    pub chunks: u64,
    /// Sum of `y^2`.
    pub chunks_sq: u64,
    pub adversary_correct: u64,
    /// Requests per observed `y`.
    pub histogram: Vec<u64>,
    /// Correct adversary guesses per observed `y`.
    pub correct_by_y: Vec<u64>,
}

impl SimCounts {
    pub fn empty(chunks_per_file: usize) -> Self {
        Self {
            histogram: vec![0; chunks_per_file + 1],
            correct_by_y: vec![0; chunks_per_file + 1],
            ..Self::default()
        }
    }

    pub fn merge(&mut self, other: &SimCounts) {
        self.requests += other.requests;
        self.chunks += other.chunks;
        self.chunks_sq += other.chunks_sq;
        self.adversary_correct += other.adversary_correct;
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        for (a, b) in self.correct_by_y.iter_mut().zip(&other.correct_by_y) {
            *a += b;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimReport {
    pub num_requests: u64,
    pub seed: u64,
    pub resample_placements_each_request: bool,
    /// Mean files transferred per request.
    pub omega: f64,
    pub omega_se: f64,
    /// Adversary error rate.
    pub psi: f64,
    pub psi_se: f64,
    pub histogram: Vec<u64>,
    pub correct_by_y: Vec<u64>,
}

impl SimReport {
    pub fn from_counts(counts: &SimCounts, chunks_per_file: usize, cfg: &SimConfig) -> Self {
        let n = counts.requests as f64;
        let c = chunks_per_file as f64;
        let mean_y = counts.chunks as f64 / n;
        let var_y = (counts.chunks_sq as f64 / n - mean_y * mean_y).max(0.0);
        let psi = 1.0 - counts.adversary_correct as f64 / n;
        Self {
            num_requests: counts.requests,
            seed: cfg.seed,
            resample_placements_each_request: cfg.resample_placements_each_request,
            omega: mean_y / c,
            omega_se: libm::sqrt(var_y / n) / c,
            psi,
            psi_se: libm::sqrt(psi * (1.0 - psi) / n),
            histogram: counts.histogram.clone(),
            correct_by_y: counts.correct_by_y.clone(),
        }
    }
}

/// Cumulative distribution for inverse-transform draws.
#[derive(Debug, Clone)]
struct Cdf {
    cum: Vec<f64>,
}

impl Cdf {
    fn new(weights: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cum: Vec<f64> = weights
            .into_iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { cum }
    }

    /// First index whose cumulative weight exceeds `u · total`, skipping
    /// zero-weight entries.
    fn draw(&self, u: f64) -> usize {
        let total = *self.cum.last().expect("non-empty distribution");
        let target = u * total;
        let pos = self.cum.partition_point(|&c| c <= target);
        pos.min(self.cum.len() - 1)
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The `index`-th uniform draw in `[0, 1)` of the run seeded with `seed`.
pub fn uniform_draw(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    uniform(&mut rng)
}

/// A prepared simulation: sampling tables plus a validated decision table.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    scenario: &'a Scenario,
    mechanism: Mechanism<'a>,
    decision: AdversaryDecision,
    cache_cdf: Cdf,
    file_cdf: Cdf,
    placement_cdfs: Vec<(Vec<usize>, Cdf)>,
    base: ChaCha8Rng,
    held: Option<Vec<Vec<u32>>>,
}

impl<'a> Simulator<'a> {
    /// Fails when `decision` is not the MAP table of the mechanism.
    pub fn new(
        scenario: &'a Scenario,
        mechanism: Mechanism<'a>,
        decision: &AdversaryDecision,
        cfg: &SimConfig,
    ) -> Result<Self> {
        if cfg.num_requests == 0 {
            return Err(Error::Validation(
                "a simulation needs at least one request".into(),
            ));
        }
        let expected = match mechanism {
            Mechanism::Placement { set, policy } => evaluate(scenario, set, policy)?.decision,
            Mechanism::Rda(r) => rda_decision(scenario, r).1,
        };
        let consistent = expected.kind == decision.kind
            && expected.entries.len() == decision.entries.len()
            && expected
                .entries
                .iter()
                .zip(&decision.entries)
                .all(|(a, b)| {
                    a.y == b.y && a.cache == b.cache && a.item == b.item && a.file == b.file
                });
        if !consistent {
            return Err(Error::Validation(
                "decision table does not belong to the simulated policy".into(),
            ));
        }
        let placement_cdfs = match mechanism {
            Mechanism::Placement { policy, .. } => policy
                .caches()
                .iter()
                .map(|entries| {
                    (
                        entries.iter().map(|e| e.0).collect(),
                        Cdf::new(entries.iter().map(|e| e.1)),
                    )
                })
                .collect(),
            Mechanism::Rda(_) => Vec::new(),
        };
        let mut sim = Self {
            scenario,
            mechanism,
            decision: decision.clone(),
            cache_cdf: Cdf::new(scenario.request_gen().iter().copied()),
            file_cdf: Cdf::new(scenario.popularity().iter().copied()),
            placement_cdfs,
            base: ChaCha8Rng::seed_from_u64(cfg.seed),
            held: None,
        };
        if !cfg.resample_placements_each_request {
            if let Mechanism::Placement { set, .. } = mechanism {
                let mut rng = sim.stream(HELD_STREAM);
                let held = (0..scenario.num_caches())
                    .map(|k| sim.realize(set, k, &mut rng))
                    .collect();
                sim.held = Some(held);
            }
        }
        Ok(sim)
    }

    fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        rng
    }

    /// Per-file cached chunk counts of one random placement of cache `k`;
    /// subset placements draw their chunk identities one at a time.
    fn realize(&self, set: &PlacementSet, k: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
        let (indices, cdf) = &self.placement_cdfs[k];
        let z = set.get(indices[cdf.draw(uniform(rng))]);
        match set.partition() {
            None => z.to_vec(),
            Some(part) => {
                let c = set.chunks_per_file();
                let mut counts = vec![0u32; part.num_files()];
                for (l, &x) in z.iter().enumerate() {
                    let files = part.files(l);
                    let mut left: Vec<usize> = vec![c; files.len()];
                    let mut pool = files.len() * c;
                    for _ in 0..x {
                        let pick = (uniform(rng) * pool as f64) as usize;
                        let mut acc = 0;
                        let mut chosen = left.len() - 1;
                        for (j, &n) in left.iter().enumerate() {
                            acc += n;
                            if pick < acc {
                                chosen = j;
                                break;
                            }
                        }
                        left[chosen] -= 1;
                        counts[files.start + chosen] += 1;
                        pool -= 1;
                    }
                }
                counts
            }
        }
    }

    /// Cached chunks of `file` at cache `k` for a fresh placement draw.
    fn cached_chunks(
        &self,
        set: &PlacementSet,
        k: usize,
        file: usize,
        rng: &mut ChaCha8Rng,
    ) -> u32 {
        let (indices, cdf) = &self.placement_cdfs[k];
        let z = set.get(indices[cdf.draw(uniform(rng))]);
        match set.partition() {
            None => z[file],
            Some(part) => {
                let c = set.chunks_per_file();
                let l = part.subset_of(file);
                // Sequential draws without replacement from |S_l|·C chunks,
                // C of which belong to the requested file.
                let mut pool = part.size(l) * c;
                let mut mine = c;
                let mut held = 0;
                for _ in 0..z[l] {
                    if (uniform(rng) * pool as f64) < mine as f64 {
                        mine -= 1;
                        held += 1;
                    }
                    pool -= 1;
                }
                held
            }
        }
    }

    /// Simulates requests `range` (zero-based request indices).
    pub fn run_range(&self, range: Range<u64>) -> SimCounts {
        let c = self.scenario.chunks_per_file();
        let mut counts = SimCounts::empty(c);
        for index in range {
            let mut rng = self.stream(index);
            let k = self.cache_cdf.draw(uniform(&mut rng));
            let i = self.file_cdf.draw(uniform(&mut rng));
            let y = match self.mechanism {
                Mechanism::Placement { set, .. } => {
                    let held = match &self.held {
                        Some(h) => h[k][i],
                        None => self.cached_chunks(set, k, i, &mut rng),
                    };
                    c - held as usize
                }
                Mechanism::Rda(r) => {
                    if i < self.scenario.cache_capacity() && uniform(&mut rng) >= r.s() {
                        0
                    } else {
                        c
                    }
                }
            };
            counts.requests += 1;
            counts.chunks += y as u64;
            counts.chunks_sq += (y * y) as u64;
            counts.histogram[y] += 1;
            let guess = self.decision.entry(y);
            if guess.cache == k && guess.file == i {
                counts.adversary_correct += 1;
                counts.correct_by_y[y] += 1;
            }
        }
        counts
    }

    /// `Pr{Y = y}` implied by the mechanism.
    pub fn analytic_histogram(&self) -> Result<Vec<f64>> {
        match self.mechanism {
            Mechanism::Placement { set, policy } => match set.family() {
                Family::Chunk | Family::File => Ok(observation_distribution(
                    self.scenario,
                    self.scenario.popularity(),
                    &plain_transfer_table(self.scenario, set, policy)?,
                )),
                Family::Subset => {
                    let part = set.partition().ok_or_else(|| {
                        Error::Validation("subset family without a partition".into())
                    })?;
                    let p = self.scenario.popularity();
                    let mass: Vec<f64> = (0..part.len())
                        .map(|l| part.files(l).map(|i| p[i]).sum())
                        .collect();
                    Ok(observation_distribution(
                        self.scenario,
                        &mass,
                        &spc_transfer_table(self.scenario, set, policy)?,
                    ))
                }
            },
            Mechanism::Rda(r) => Ok(observation_distribution(
                self.scenario,
                self.scenario.popularity(),
                &rda_transfer_table(self.scenario, r),
            )),
        }
    }
}

/// Single-threaded run over all requests.
pub fn simulate(
    scenario: &Scenario,
    mechanism: Mechanism<'_>,
    decision: &AdversaryDecision,
    cfg: &SimConfig,
) -> Result<SimReport> {
    let sim = Simulator::new(scenario, mechanism, decision, cfg)?;
    let counts = sim.run_range(0..cfg.num_requests);
    Ok(SimReport::from_counts(
        &counts,
        scenario.chunks_per_file(),
        cfg,
    ))
}

/// Checks that a decision table has the expected kind for the mechanism.
pub fn expected_kind(mechanism: &Mechanism<'_>) -> DecisionKind {
    match mechanism {
        Mechanism::Placement { set, .. } if set.family() == Family::Subset => DecisionKind::Subset,
        _ => DecisionKind::File,
    }
}
