//! Privacy degree, cost and hit ratio against an exhaustive tabulation of
//! `P(Y = y | k, i)` that re-derives the chunk counts from scratch.

#![allow(clippy::needless_range_loop)]

use cacheveil_core::enumeration::{count_placements, enumerate, Family, Partition, PlacementSet};
use cacheveil_core::metrics::{evaluate, privacy_bounds};
use cacheveil_core::{Policy, Scenario};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const MAX_PLACEMENTS: u128 = 200;

#[derive(Debug, Clone)]
struct Case {
    scenario: Scenario,
    family: Family,
    partition: Option<Partition>,
    weights: Vec<Vec<f64>>,
}

fn scenario_strategy() -> impl Strategy<Value = (Scenario, Family, Option<Vec<usize>>)> {
    (2usize..=5, 1usize..=3, 1usize..=3, 0usize..3).prop_flat_map(|(n, k, c, fam)| {
        (
            1..n,
            proptest::collection::vec(1u32..100, n),
            proptest::collection::vec(1u32..100, k),
            proptest::collection::vec(1usize..=3, n),
        )
            .prop_filter_map("valid scenario", move |(m, pw, gw, cuts)| {
                let pt: f64 = pw.iter().map(|&w| f64::from(w)).sum();
                let p: Vec<f64> = pw.iter().map(|&w| f64::from(w) / pt).collect();
                let gt: f64 = gw.iter().map(|&w| f64::from(w)).sum();
                let g: Vec<f64> = gw.iter().map(|&w| f64::from(w) / gt).collect();
                let s = Scenario::new(n, k, m, c, &p, &g).ok()?;
                let family = [Family::Chunk, Family::File, Family::Subset][fam];
                let sizes = (family == Family::Subset).then(|| {
                    let mut sizes = Vec::new();
                    let mut left = n;
                    for &cut in &cuts {
                        if left == 0 {
                            break;
                        }
                        let take = cut.min(left);
                        sizes.push(take);
                        left -= take;
                    }
                    sizes
                });
                Some((s, family, sizes))
            })
    })
}

fn case_strategy() -> impl Strategy<Value = Case> {
    scenario_strategy()
        .prop_filter_map("small family", |(s, family, sizes)| {
            let partition = sizes.map(|sz| Partition::new(&sz, s.num_files()).unwrap());
            if let Some(p) = &partition {
                // Keep the chunk-slot enumeration below 2^14 subsets.
                if p.sizes().iter().any(|&z| z * s.chunks_per_file() > 14) {
                    return None;
                }
            }
            let count = count_placements(&s, family, partition.as_ref()).ok()?;
            (count <= MAX_PLACEMENTS).then_some((s, family, partition, count as usize))
        })
        .prop_flat_map(|(s, family, partition, count)| {
            let k = s.num_caches();
            proptest::collection::vec(
                proptest::collection::vec(prop_oneof![2 => Just(0u32), 3 => 1u32..50], count),
                k,
            )
            .prop_map(move |raw| Case {
                scenario: s.clone(),
                family,
                partition: partition.clone(),
                weights: raw
                    .into_iter()
                    .map(|mut w| {
                        if w.iter().all(|&x| x == 0) {
                            w[0] = 1;
                        }
                        let t: f64 = w.iter().map(|&x| f64::from(x)).sum();
                        w.into_iter().map(|x| f64::from(x) / t).collect()
                    })
                    .collect(),
            })
        })
}

fn policy_of(case: &Case, set: &PlacementSet) -> Policy {
    let caches = case
        .weights
        .iter()
        .map(|w| {
            w.iter()
                .copied()
                .enumerate()
                .filter(|&(_, p)| p > 0.0)
                .collect()
        })
        .collect();
    Policy::new(set, caches).unwrap()
}

/// Distribution of how many chunks of each file a placement leaves in the
/// cache: exact counts for plain families, and for subset placements the
/// fraction of all equally likely chunk-slot choices.
fn file_chunk_dist(s: &Scenario, set: &PlacementSet, z: &[u32]) -> Vec<Vec<f64>> {
    let c = s.chunks_per_file();
    let n = s.num_files();
    let mut dist = vec![vec![0.0; c + 1]; n];
    match set.partition() {
        None => {
            for i in 0..n {
                dist[i][z[i] as usize] = 1.0;
            }
        }
        Some(part) => {
            for l in 0..part.len() {
                let files: Vec<usize> = part.files(l).collect();
                let slots = files.len() * c;
                let draws = z[l];
                let mut total = 0u64;
                let mut counts = vec![vec![0u64; c + 1]; files.len()];
                for mask in 0u32..(1 << slots) {
                    if mask.count_ones() != draws {
                        continue;
                    }
                    total += 1;
                    for (j, row) in counts.iter_mut().enumerate() {
                        let held = (0..c).filter(|t| mask & (1 << (j * c + t)) != 0).count();
                        row[held] += 1;
                    }
                }
                for (j, &i) in files.iter().enumerate() {
                    for x in 0..=c {
                        dist[i][x] = counts[j][x] as f64 / total as f64;
                    }
                }
            }
        }
    }
    dist
}

struct Brute {
    psi: f64,
    omega: f64,
    hit: f64,
}

fn brute_force(s: &Scenario, set: &PlacementSet, policy: &Policy) -> Brute {
    let c = s.chunks_per_file();
    let n = s.num_files();
    let k = s.num_caches();
    // table[k][i][y]
    let mut table = vec![vec![vec![0.0; c + 1]; n]; k];
    for (kk, row) in table.iter_mut().enumerate() {
        for &(idx, prob) in policy.cache(kk) {
            let dist = file_chunk_dist(s, set, set.get(idx));
            for i in 0..n {
                for x in 0..=c {
                    row[i][c - x] += prob * dist[i][x];
                }
            }
        }
    }
    let pg = s.request_gen();
    let p = s.popularity();
    let mut success = 0.0;
    let mut omega = 0.0;
    let mut hit = 0.0;
    for y in 0..=c {
        let mut best = 0.0f64;
        for kk in 0..k {
            for i in 0..n {
                let score = pg[kk] * p[i] * table[kk][i][y];
                best = best.max(score);
                omega += score * y as f64 / c as f64;
                if y < c {
                    hit += score;
                }
            }
        }
        success += best;
    }
    Brute {
        psi: 1.0 - success,
        omega,
        hit,
    }
}

#[test]
fn analytic_metrics_match_exhaustive_tabulation() {
    let config = Config {
        cases: 60,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner
        .run(&case_strategy(), |case| {
            let s = &case.scenario;
            let set = enumerate(s, case.family, case.partition.as_ref(), 10_000).unwrap();
            let policy = policy_of(&case, &set);
            let report = evaluate(s, &set, &policy).unwrap();
            let brute = brute_force(s, &set, &policy);
            prop_assert!(
                (report.psi - brute.psi).abs() <= 1e-12,
                "psi {} vs {}",
                report.psi,
                brute.psi
            );
            prop_assert!(
                (report.omega - brute.omega).abs() <= 1e-12,
                "omega {} vs {}",
                report.omega,
                brute.omega
            );
            prop_assert!((report.average_hit_ratio - brute.hit).abs() <= 1e-12);
            let (_, psi_max) = privacy_bounds(s);
            prop_assert!(report.psi >= -1e-12 && report.psi <= psi_max + 1e-12);
            if s.chunks_per_file() == 1 {
                prop_assert!((report.average_hit_ratio - (1.0 - report.omega)).abs() <= 1e-12);
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn decision_table_scores_sum_to_success() {
    let s = Scenario::baseline().with_chunks(2).unwrap();
    let set = enumerate(&s, Family::Chunk, None, 10_000).unwrap();
    let policy = Policy::uniform(&set, 2).unwrap();
    let report = evaluate(&s, &set, &policy).unwrap();
    let brute = brute_force(&s, &set, &policy);
    assert!((report.psi - brute.psi).abs() <= 1e-12);
    let success: f64 = report.decision.entries.iter().map(|e| e.score).sum();
    assert!((1.0 - success - report.psi).abs() <= 1e-15);
}
