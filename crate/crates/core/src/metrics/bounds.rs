//! Closed-form privacy extremes.

use super::spc::{chunks_of_file, most_popular_per_subset};
use crate::enumeration::Partition;
use crate::{Error, Result, Scenario};

/// `(Ψ_min, Ψ_max) = (1 - p_g^max (p_1 + p_{M+1}), 1 - p_g^max p_1)` for the
/// joint, disjoint and dummy-based policies.
pub fn privacy_bounds(scenario: &Scenario) -> (f64, f64) {
    let pg = scenario.max_request_gen();
    let p = scenario.popularity();
    let p_first = p[0];
    let p_next_uncached = p[scenario.cache_capacity()];
    (1.0 - pg * (p_first + p_next_uncached), 1.0 - pg * p_first)
}

/// Subset-family privacy extremes and the greedy placement they come from.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpcPrivacyBounds {
    pub psi_min: f64,
    pub psi_max: f64,
    /// Zero-based index of the first subset the greedy fill leaves incomplete.
    pub boundary_subset: usize,
    /// Chunks the greedy fill places in `boundary_subset`.
    pub boundary_chunks: usize,
    /// The capacity exactly exhausts the subsets before `boundary_subset`.
    pub exact_fill: bool,
}

/// Privacy extremes of the subset family.
///
/// The minimum is the privacy degree of the greedy most-popular placement:
/// every chunk of subsets `0..m` and `z_m` chunks of subset `m`. Writing
/// `P0 = C(|S_m|C - C, z_m - C) / C(|S_m|C, z_m)` and
/// `PC = C(|S_m|C - C, z_m) / C(|S_m|C, z_m)`:
///
/// ```text
/// Ψ_min = 1 - p_g^max · ( max{p*_1 [m > 0], p*_m P0}
///                       + max{p*_m PC, p*_{m+1}}
///                       + p*_m (1 - P0 - PC) )
/// ```
///
/// When `m = 0` the `y = 0` term is `p*_1 P0`, not `p*_1`. An exact fill
/// (`z_m = 0`) gives `P0 = 0`, `PC = 1`, so the middle term vanishes and the
/// `y = C` term is `p*_m`.
pub fn spc_privacy_bounds(scenario: &Scenario, partition: &Partition) -> Result<SpcPrivacyBounds> {
    if partition.num_files() != scenario.num_files() {
        return Err(Error::Validation(alloc::format!(
            "partition covers {} files, scenario has {}",
            partition.num_files(),
            scenario.num_files()
        )));
    }
    let c = scenario.chunks_per_file();
    let pg = scenario.max_request_gen();
    let (top, _) = most_popular_per_subset(scenario, partition);

    let mut remaining = scenario.capacity_chunks();
    let mut m = 0;
    while remaining >= partition.size(m) * c {
        remaining -= partition.size(m) * c;
        m += 1;
        if m == partition.len() {
            // M < N rules this out for a valid scenario.
            return Err(Error::Validation(
                "capacity covers the whole library".into(),
            ));
        }
    }
    let z_m = remaining;
    let size = partition.size(m);
    let p0 = chunks_of_file(size, c, z_m, c);
    let pc = chunks_of_file(size, c, z_m, 0);

    let y0 = if m > 0 {
        top[0].max(top[m] * p0)
    } else {
        top[m] * p0
    };
    let next = top.get(m + 1).copied().unwrap_or(0.0);
    let yc = (top[m] * pc).max(next);
    let middle = top[m] * (1.0 - p0 - pc).max(0.0);

    Ok(SpcPrivacyBounds {
        psi_min: 1.0 - pg * (y0 + yc + middle),
        psi_max: 1.0 - pg * top[0],
        boundary_subset: m,
        boundary_chunks: z_m,
        exact_fill: z_m == 0,
    })
}
