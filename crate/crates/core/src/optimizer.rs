//! The joint (JPC), disjoint (DPC) and subset-based (SPC) programs.
//!
//! Variable layout is fixed so that solver determinism gives reproducible
//! policies:
//!
//! * JPC: `P^(k)(z)` cache-major in canonical placement order, then
//!   `Γ_0..Γ_C`;
//! * DPC: `α^(k)_i` cache-major, then `γ_0, γ_1`;
//! * SPC: `O^(k)(ẑ)` cache-major, then `Γ_0..Γ_C`.
//!
//! The `Γ_y` stand in for the per-`y` maxima of the adversary's score, so
//! `1 - sum Γ_y >= ζ` linearizes the privacy constraint. Placement
//! probabilities need no explicit upper bound: the per-cache normalization
//! rows already force them into `[0, 1]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dpc::{build_layout, layout_to_distribution, AlphaVector, FillOrder};
use crate::enumeration::{enumerate, Family, Partition, PlacementSet};
use crate::metrics::spc::chunks_of_file;
use crate::metrics::{evaluate, EvaluationReport, Marginals, Policy};
use crate::simplex::{solve, LinearProgram, LpStatus, Relation};
use crate::{Error, Result, Scenario};

/// Tolerance of the post-solve verification.
pub const VERIFY_TOL: f64 = 1e-6;
/// Placement probabilities below this are solver dust.
pub const DUST: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Targets {
    zeta: f64,
    beta: Option<f64>,
}

impl Targets {
    pub fn new(zeta: f64, beta: Option<f64>) -> Result<Self> {
        let unit = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        if !unit(zeta) {
            return Err(Error::Validation(format!(
                "privacy threshold {zeta} is not in [0, 1]"
            )));
        }
        if let Some(b) = beta {
            if !unit(b) {
                return Err(Error::Validation(format!(
                    "hit-ratio threshold {b} is not in [0, 1]"
                )));
            }
        }
        Ok(Self { zeta, beta })
    }

    pub fn privacy(zeta: f64) -> Result<Self> {
        Self::new(zeta, None)
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    Jpc,
    Dpc,
    Spc,
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Method::Jpc => "jpc",
            Method::Dpc => "dpc",
            Method::Spc => "spc",
        })
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jpc" => Ok(Method::Jpc),
            "dpc" => Ok(Method::Dpc),
            "spc" => Ok(Method::Spc),
            other => Err(Error::Validation(format!("unknown method `{other}`"))),
        }
    }
}

fn placement_cost(scenario: &Scenario, z: &[u32]) -> f64 {
    let c = scenario.chunks_per_file() as f64;
    scenario
        .popularity()
        .iter()
        .zip(z)
        .map(|(p, &x)| p * (c - x as f64))
        .sum::<f64>()
        / c
}

fn placement_hit(scenario: &Scenario, z: &[u32]) -> f64 {
    scenario
        .popularity()
        .iter()
        .zip(z)
        .filter(|(_, &x)| x > 0)
        .map(|(p, _)| p)
        .sum()
}

/// JPC program over a chunk- or file-family placement set.
pub fn build_jpc_lp(
    scenario: &Scenario,
    set: &PlacementSet,
    targets: &Targets,
) -> Result<LinearProgram> {
    match set.family() {
        Family::Chunk | Family::File => {}
        found => {
            return Err(Error::WrongFamily {
                expected: "chunk or file family",
                found,
            })
        }
    }
    set.check_matches(scenario, None)?;
    let k_count = scenario.num_caches();
    let n = scenario.num_files();
    let c = scenario.chunks_per_file();
    let f = set.len();
    let gamma0 = k_count * f;
    let mut lp = LinearProgram::new(gamma0 + c + 1);

    let cost: Vec<f64> = set.iter().map(|z| placement_cost(scenario, z)).collect();
    for (k, &pg) in scenario.request_gen().iter().enumerate() {
        for (idx, &w) in cost.iter().enumerate() {
            lp.set_objective(k * f + idx, pg * w);
        }
    }

    lp.add_constraint(
        (0..=c).map(|y| (gamma0 + y, 1.0)).collect(),
        Relation::Le,
        1.0 - targets.zeta(),
    );

    // Γ_y >= p_g^(k) p_i sum_{z: z_i = C - y} P^(k)(z)
    let mut by_count: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); c + 1]; n];
    for (idx, z) in set.iter().enumerate() {
        for (i, &x) in z.iter().enumerate() {
            by_count[i][x as usize].push(idx);
        }
    }
    for y in 0..=c {
        for (k, &pg) in scenario.request_gen().iter().enumerate() {
            for (i, &p) in scenario.popularity().iter().enumerate() {
                let w = pg * p;
                let mut terms: Vec<(usize, f64)> = by_count[i][c - y]
                    .iter()
                    .map(|&idx| (k * f + idx, w))
                    .collect();
                terms.push((gamma0 + y, -1.0));
                lp.add_constraint(terms, Relation::Le, 0.0);
            }
        }
    }

    for k in 0..k_count {
        lp.add_constraint(
            (0..f).map(|idx| (k * f + idx, 1.0)).collect(),
            Relation::Eq,
            1.0,
        );
    }

    if let Some(beta) = targets.beta() {
        let hit: Vec<f64> = set.iter().map(|z| placement_hit(scenario, z)).collect();
        let mut terms = Vec::with_capacity(k_count * f);
        for (k, &pg) in scenario.request_gen().iter().enumerate() {
            for (idx, &h) in hit.iter().enumerate() {
                terms.push((k * f + idx, pg * h));
            }
        }
        lp.add_constraint(terms, Relation::Ge, beta);
    }
    Ok(lp)
}

/// DPC program: `α` per cache and file, then `γ_0, γ_1`.
pub fn build_dpc_lp(scenario: &Scenario, targets: &Targets) -> Result<LinearProgram> {
    if targets.beta().is_some() {
        return Err(Error::Validation(
            "the disjoint method has no chunk-level hit-ratio target (its hit ratio is 1 - cost); use jpc or spc".into(),
        ));
    }
    let k_count = scenario.num_caches();
    let n = scenario.num_files();
    let g0 = k_count * n;
    let g1 = g0 + 1;
    let mut lp = LinearProgram::new(g0 + 2);
    lp.set_objective_offset(1.0);
    for (k, &pg) in scenario.request_gen().iter().enumerate() {
        for (i, &p) in scenario.popularity().iter().enumerate() {
            lp.set_objective(k * n + i, -pg * p);
            lp.set_bounds(k * n + i, 0.0, 1.0);
        }
    }
    lp.add_constraint(
        vec![(g0, 1.0), (g1, 1.0)],
        Relation::Le,
        1.0 - targets.zeta(),
    );
    for (k, &pg) in scenario.request_gen().iter().enumerate() {
        for (i, &p) in scenario.popularity().iter().enumerate() {
            lp.add_constraint(vec![(k * n + i, pg * p), (g0, -1.0)], Relation::Le, 0.0);
        }
    }
    for (k, &pg) in scenario.request_gen().iter().enumerate() {
        for (i, &p) in scenario.popularity().iter().enumerate() {
            lp.add_constraint(vec![(k * n + i, pg * p), (g1, 1.0)], Relation::Ge, pg * p);
        }
    }
    for k in 0..k_count {
        lp.add_constraint(
            (0..n).map(|i| (k * n + i, 1.0)).collect(),
            Relation::Eq,
            scenario.cache_capacity() as f64,
        );
    }
    Ok(lp)
}

/// SPC program over a subset-family placement set.
pub fn build_spc_lp(
    scenario: &Scenario,
    partition: &Partition,
    set: &PlacementSet,
    targets: &Targets,
) -> Result<LinearProgram> {
    if set.family() != Family::Subset {
        return Err(Error::WrongFamily {
            expected: "subset family",
            found: set.family(),
        });
    }
    set.check_matches(scenario, Some(partition))?;
    let k_count = scenario.num_caches();
    let c = scenario.chunks_per_file();
    let cf = c as f64;
    let f = set.len();
    let subsets = partition.len();
    let gamma0 = k_count * f;
    let mut lp = LinearProgram::new(gamma0 + c + 1);

    let p = scenario.popularity();
    let mass: Vec<f64> = (0..subsets)
        .map(|l| partition.files(l).map(|i| p[i]).sum())
        .collect();
    let top: Vec<f64> = (0..subsets).map(|l| p[partition.files(l).start]).collect();

    let cost: Vec<f64> = set
        .iter()
        .map(|z| {
            z.iter()
                .enumerate()
                .map(|(l, &x)| mass[l] * (cf - x as f64 / partition.size(l) as f64))
                .sum::<f64>()
                / cf
        })
        .collect();
    for (k, &pg) in scenario.request_gen().iter().enumerate() {
        for (idx, &w) in cost.iter().enumerate() {
            lp.set_objective(k * f + idx, pg * w);
        }
    }

    lp.add_constraint(
        (0..=c).map(|y| (gamma0 + y, 1.0)).collect(),
        Relation::Le,
        1.0 - targets.zeta(),
    );

    for y in 0..=c {
        for (k, &pg) in scenario.request_gen().iter().enumerate() {
            for l in 0..subsets {
                let size = partition.size(l);
                let w = pg * top[l];
                let mut terms: Vec<(usize, f64)> = set
                    .iter()
                    .enumerate()
                    .filter_map(|(idx, z)| {
                        let h = chunks_of_file(size, c, z[l] as usize, c - y);
                        (h != 0.0).then_some((k * f + idx, w * h))
                    })
                    .collect();
                terms.push((gamma0 + y, -1.0));
                lp.add_constraint(terms, Relation::Le, 0.0);
            }
        }
    }

    for k in 0..k_count {
        lp.add_constraint(
            (0..f).map(|idx| (k * f + idx, 1.0)).collect(),
            Relation::Eq,
            1.0,
        );
    }

    if let Some(beta) = targets.beta() {
        let hit: Vec<f64> = set
            .iter()
            .map(|z| {
                z.iter()
                    .enumerate()
                    .map(|(l, &x)| {
                        mass[l] * (1.0 - chunks_of_file(partition.size(l), c, x as usize, 0))
                    })
                    .sum()
            })
            .collect();
        let mut terms = Vec::with_capacity(k_count * f);
        for (k, &pg) in scenario.request_gen().iter().enumerate() {
            for (idx, &h) in hit.iter().enumerate() {
                terms.push((k * f + idx, pg * h));
            }
        }
        lp.add_constraint(terms, Relation::Ge, beta);
    }
    Ok(lp)
}

/// A scenario with its method and (for JPC and SPC) enumerated placement
/// set, ready to be solved for any number of targets.
#[derive(Debug, Clone)]
pub struct Prepared {
    scenario: Scenario,
    method: Method,
    set: PlacementSet,
    partition: Option<Partition>,
}

impl Prepared {
    /// `family` selects chunk or file placements for JPC (default chunk);
    /// `partition` is required for SPC.
    pub fn new(
        scenario: &Scenario,
        method: Method,
        family: Option<Family>,
        partition: Option<&Partition>,
        cap: usize,
    ) -> Result<Self> {
        let (set, partition) = match method {
            Method::Jpc => {
                let family = family.unwrap_or(Family::Chunk);
                if family == Family::Subset {
                    return Err(Error::Validation(
                        "jpc takes the chunk or file family; use spc for subsets".into(),
                    ));
                }
                (enumerate(scenario, family, None, cap)?, None)
            }
            // The file family realizes the per-file probabilities.
            Method::Dpc => (enumerate(scenario, Family::File, None, cap)?, None),
            Method::Spc => {
                let part = partition
                    .ok_or_else(|| Error::Validation("spc needs a partition".into()))?
                    .clone();
                (
                    enumerate(scenario, Family::Subset, Some(&part), cap)?,
                    Some(part),
                )
            }
        };
        Ok(Self {
            scenario: scenario.clone(),
            method,
            set,
            partition,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn placements(&self) -> &PlacementSet {
        &self.set
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    pub fn build(&self, targets: &Targets) -> Result<LinearProgram> {
        match self.method {
            Method::Jpc => build_jpc_lp(&self.scenario, &self.set, targets),
            Method::Dpc => build_dpc_lp(&self.scenario, targets),
            Method::Spc => build_spc_lp(
                &self.scenario,
                self.partition
                    .as_ref()
                    .expect("spc is prepared with a partition"),
                &self.set,
                targets,
            ),
        }
    }

    /// Builds, solves, extracts and verifies.
    pub fn solve(&self, targets: &Targets) -> Result<OptimizationOutcome> {
        let lp = self.build(targets)?;
        let solution = solve(&lp)?;
        let mut outcome = OptimizationOutcome {
            method: self.method,
            targets: *targets,
            status: solution.status,
            omega_star: f64::NAN,
            policy: None,
            alpha: None,
            gamma: Vec::new(),
            verification: None,
            num_vars: lp.num_vars(),
            num_rows: lp.num_rows(),
            iterations: solution.iterations,
        };
        if solution.status != LpStatus::Optimal {
            return Ok(outcome);
        }
        outcome.omega_star = solution.objective;
        let x = &solution.x;
        let k_count = self.scenario.num_caches();
        let policy = match self.method {
            Method::Jpc | Method::Spc => {
                let f = self.set.len();
                outcome.gamma = x[k_count * f..].to_vec();
                extract_policy(&self.set, x, k_count)?
            }
            Method::Dpc => {
                let n = self.scenario.num_files();
                outcome.gamma = x[k_count * n..].to_vec();
                let m = self.scenario.cache_capacity();
                let alphas = (0..k_count)
                    .map(|k| {
                        let a: Vec<f64> = x[k * n..(k + 1) * n]
                            .iter()
                            .map(|v| v.clamp(0.0, 1.0))
                            .collect();
                        AlphaVector::new(&a, m)
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Verification(format!("dpc solution: {e}")))?;
                let policy =
                    embed_into(&self.scenario, &self.set, &alphas, &FillOrder::ascending(n))?;
                outcome.alpha = Some(alphas);
                policy
            }
        };
        let report = evaluate(&self.scenario, &self.set, &policy)?;
        check_report(&report, outcome.omega_star, targets)?;
        outcome.policy = Some(policy);
        outcome.verification = Some(report);
        Ok(outcome)
    }
}

fn extract_policy(set: &PlacementSet, x: &[f64], caches: usize) -> Result<Policy> {
    let f = set.len();
    let mut dists = Vec::with_capacity(caches);
    for k in 0..caches {
        let mut entries: Vec<(usize, f64)> = x[k * f..(k + 1) * f]
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= DUST)
            .map(|(idx, &v)| (idx, v))
            .collect();
        let total: f64 = entries.iter().map(|e| e.1).sum();
        if total <= 0.0 {
            return Err(Error::Verification(format!(
                "cache {} received no placement mass",
                k + 1
            )));
        }
        for e in entries.iter_mut() {
            e.1 = (e.1 / total).min(1.0);
        }
        dists.push(entries);
    }
    Policy::new(set, dists)
}

fn check_report(report: &EvaluationReport, omega_star: f64, targets: &Targets) -> Result<()> {
    if report.psi < targets.zeta() - VERIFY_TOL {
        return Err(Error::Verification(format!(
            "recomputed privacy {} is below the target {}",
            report.psi,
            targets.zeta()
        )));
    }
    if (report.omega - omega_star).abs() > VERIFY_TOL {
        return Err(Error::Verification(format!(
            "recomputed cost {} differs from the optimum {omega_star}",
            report.omega
        )));
    }
    if let Some(beta) = targets.beta() {
        if report.average_hit_ratio < beta - VERIFY_TOL {
            return Err(Error::Verification(format!(
                "recomputed hit ratio {} is below the target {beta}",
                report.average_hit_ratio
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationOutcome {
    pub method: Method,
    pub targets: Targets,
    pub status: LpStatus,
    /// Optimal cost; `NaN` unless optimal.
    pub omega_star: f64,
    /// The optimal policy over the prepared placement set; for DPC, the
    /// interval-filling realization of `alpha` over the file family.
    pub policy: Option<Policy>,
    pub alpha: Option<Vec<AlphaVector>>,
    /// `Γ_0..Γ_C`, or `γ_0, γ_1` for DPC.
    pub gamma: Vec<f64>,
    pub verification: Option<EvaluationReport>,
    pub num_vars: usize,
    pub num_rows: usize,
    pub iterations: usize,
}

impl OptimizationOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Average probability mass the caches put on `placement` (a diagnostic
    /// for how strongly the optimum favors, say, the top-`M` placement).
    pub fn mass_on(&self, set: &PlacementSet, placement: &[u32]) -> Option<f64> {
        let policy = self.policy.as_ref()?;
        let idx = set.index_of(placement)?;
        let k = policy.num_caches() as f64;
        Some(
            (0..policy.num_caches())
                .map(|c| policy.prob(c, idx))
                .sum::<f64>()
                / k,
        )
    }
}

/// Builds, solves and verifies one program.
pub fn optimize(
    scenario: &Scenario,
    method: Method,
    targets: &Targets,
    partition: Option<&Partition>,
    family: Option<Family>,
    cap: usize,
) -> Result<OptimizationOutcome> {
    Prepared::new(scenario, method, family, partition, cap)?.solve(targets)
}

/// One point of a privacy sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepPoint {
    pub method: Method,
    pub zeta: f64,
    pub status: LpStatus,
    pub omega_star: f64,
    pub psi_verified: f64,
    pub hit_ratio: f64,
    pub num_vars: usize,
    pub num_rows: usize,
    pub iterations: usize,
}

impl SweepPoint {
    pub fn from_outcome(outcome: &OptimizationOutcome) -> Self {
        let (psi, hit) = outcome
            .verification
            .as_ref()
            .map(|r| (r.psi, r.average_hit_ratio))
            .unwrap_or((f64::NAN, f64::NAN));
        Self {
            method: outcome.method,
            zeta: outcome.targets.zeta(),
            status: outcome.status,
            omega_star: outcome.omega_star,
            psi_verified: psi,
            hit_ratio: hit,
            num_vars: outcome.num_vars,
            num_rows: outcome.num_rows,
            iterations: outcome.iterations,
        }
    }
}

/// `start:stop:step` grid, inclusive of `stop` within `1e-12`. Points are
/// rounded to twelve decimals so `0.56:0.65:0.01` yields `0.57`, not
/// `0.5700000000000001`.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || stop < start {
        return Err(Error::Validation(format!("bad grid {start}:{stop}:{step}")));
    }
    let count = libm::floor((stop - start) / step + 1e-9) as usize;
    let mut out: Vec<f64> = (0..=count)
        .map(|j| libm::round((start + j as f64 * step) * 1e12) / 1e12)
        .collect();
    if let Some(last) = out.last_mut() {
        if (*last - stop).abs() <= 1e-12 {
            *last = stop;
        }
    }
    Ok(out)
}

/// One solve per grid point, in grid order.
pub fn sweep_privacy(prepared: &Prepared, zeta_grid: &[f64]) -> Result<Vec<SweepPoint>> {
    check_ascending(zeta_grid)?;
    zeta_grid
        .iter()
        .map(|&z| {
            let targets = Targets::privacy(z)?;
            Ok(SweepPoint::from_outcome(&prepared.solve(&targets)?))
        })
        .collect()
}

pub fn check_ascending(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Validation("empty grid".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Validation("grid must be ascending".into()));
    }
    Ok(())
}

/// Result of the smallest-chunk-count search.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkSearch {
    /// Smallest feasible `C`, if any up to the limit.
    pub c_min: Option<usize>,
    pub outcome: Option<OptimizationOutcome>,
    /// Status per tried `C`; `None` when enumeration hit the cap.
    pub tried: Vec<(usize, Option<LpStatus>)>,
}

/// Smallest `C` in `1..=c_max` for which the program is feasible. A `C`
/// whose placement family exceeds `cap` ends the search.
pub fn min_feasible_chunks(
    scenario: &Scenario,
    method: Method,
    targets: &Targets,
    partition: Option<&Partition>,
    family: Option<Family>,
    c_max: usize,
    cap: usize,
) -> Result<ChunkSearch> {
    if method == Method::Dpc {
        return Err(Error::Validation(
            "chunk search applies to jpc and spc".into(),
        ));
    }
    if targets.beta().is_none() {
        return Err(Error::Validation(
            "chunk search needs a hit-ratio target".into(),
        ));
    }
    if c_max == 0 {
        return Err(Error::Validation(
            "the chunk limit must be at least 1".into(),
        ));
    }
    let mut tried = Vec::new();
    for c in 1..=c_max {
        let s = scenario.with_chunks(c)?;
        let prepared = match Prepared::new(&s, method, family, partition, cap) {
            Ok(p) => p,
            Err(Error::CapExceeded { .. }) => {
                tried.push((c, None));
                break;
            }
            Err(e) => return Err(e),
        };
        let outcome = prepared.solve(targets)?;
        tried.push((c, Some(outcome.status)));
        if outcome.is_optimal() {
            return Ok(ChunkSearch {
                c_min: Some(c),
                outcome: Some(outcome),
                tried,
            });
        }
    }
    Ok(ChunkSearch {
        c_min: None,
        outcome: None,
        tried,
    })
}

/// `α^(k)_i = E[z_i] / C` of a chunk- or file-family policy.
pub fn project_to_dpc(
    scenario: &Scenario,
    set: &PlacementSet,
    policy: &Policy,
) -> Result<Vec<AlphaVector>> {
    let marginals = Marginals::new(scenario, set, policy)?;
    let c = scenario.chunks_per_file();
    (0..scenario.num_caches())
        .map(|k| {
            let alpha: Vec<f64> = (0..scenario.num_files())
                .map(|i| {
                    let e: f64 = (0..=c).map(|x| x as f64 * marginals.get(k, i, x)).sum();
                    (e / c as f64).clamp(0.0, 1.0)
                })
                .collect();
            AlphaVector::new(&alpha, scenario.cache_capacity())
        })
        .collect()
}

/// Realizes per-cache `α` as a file-family policy via interval filling.
pub fn embed_dpc_as_jpc(
    scenario: &Scenario,
    alphas: &[AlphaVector],
    order: &FillOrder,
    cap: usize,
) -> Result<(PlacementSet, Policy)> {
    let set = enumerate(scenario, Family::File, None, cap)?;
    let policy = embed_into(scenario, &set, alphas, order)?;
    Ok((set, policy))
}

fn embed_into(
    scenario: &Scenario,
    set: &PlacementSet,
    alphas: &[AlphaVector],
    order: &FillOrder,
) -> Result<Policy> {
    if alphas.len() != scenario.num_caches() {
        return Err(Error::Validation(format!(
            "{} alpha vectors for {} caches",
            alphas.len(),
            scenario.num_caches()
        )));
    }
    let c = scenario.chunks_per_file() as u32;
    let n = scenario.num_files();
    let mut dists = Vec::with_capacity(alphas.len());
    for alpha in alphas {
        if alpha.len() != n || alpha.capacity() != scenario.cache_capacity() {
            return Err(Error::Validation(
                "alpha vector does not match the scenario".into(),
            ));
        }
        let layout = build_layout(alpha, order)?;
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for (files, prob) in layout_to_distribution(&layout) {
            let mut z = vec![0u32; n];
            for f in files {
                z[f] = c;
            }
            let idx = set.index_of(&z).ok_or_else(|| {
                Error::Verification("interval filling produced an unknown placement".into())
            })?;
            entries.push((idx, prob));
        }
        let total: f64 = entries.iter().map(|e| e.1).sum();
        for e in entries.iter_mut() {
            e.1 /= total;
        }
        dists.push(entries);
    }
    Policy::new(set, dists)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::DEFAULT_CAP;
    use crate::metrics::privacy_bounds;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn jpc_lp_shape() {
        let s = Scenario::baseline().with_chunks(1).unwrap();
        let set = enumerate(&s, Family::File, None, DEFAULT_CAP).unwrap();
        let lp = build_jpc_lp(&s, &set, &Targets::privacy(0.0).unwrap()).unwrap();
        assert_eq!(lp.num_vars(), 22);
        assert_eq!(lp.num_rows(), 23);
        let lp = build_jpc_lp(&s, &set, &Targets::new(0.0, Some(0.5)).unwrap()).unwrap();
        assert_eq!(lp.num_rows(), 24);
    }

    #[test]
    fn dpc_lp_shape() {
        let lp = build_dpc_lp(&Scenario::baseline(), &Targets::privacy(0.6).unwrap()).unwrap();
        assert_eq!(lp.num_vars(), 12);
        assert_eq!(lp.num_rows(), 1 + 10 + 10 + 2);
        assert!(build_dpc_lp(
            &Scenario::baseline(),
            &Targets::new(0.6, Some(0.5)).unwrap()
        )
        .is_err());
    }

    #[test]
    fn jpc_below_the_floor_is_top_m() {
        let s = Scenario::baseline().with_chunks(1).unwrap();
        let out = optimize(
            &s,
            Method::Jpc,
            &Targets::privacy(0.5).unwrap(),
            None,
            None,
            DEFAULT_CAP,
        )
        .unwrap();
        assert!(out.is_optimal());
        assert!(close(out.omega_star, 0.32, 1e-9));
    }

    #[test]
    fn above_the_ceiling_is_infeasible() {
        let s = Scenario::baseline().with_chunks(1).unwrap();
        let t = Targets::privacy(0.7).unwrap();
        for method in [Method::Jpc, Method::Dpc] {
            let out = optimize(&s, method, &t, None, None, DEFAULT_CAP).unwrap();
            assert_eq!(out.status, LpStatus::Infeasible, "{method}");
        }
    }

    #[test]
    fn dpc_at_the_floor() {
        let s = Scenario::baseline();
        let (lo, _) = privacy_bounds(&s);
        let out = optimize(
            &s,
            Method::Dpc,
            &Targets::privacy(lo).unwrap(),
            None,
            None,
            DEFAULT_CAP,
        )
        .unwrap();
        assert!(close(out.omega_star, 0.32, 1e-9));
        for a in out.alpha.unwrap() {
            for (v, e) in a.values().iter().zip([1.0, 1.0, 0.0, 0.0, 0.0]) {
                assert!(close(*v, e, 1e-9));
            }
        }
    }

    #[test]
    fn jpc_and_dpc_agree() {
        let s = Scenario::baseline().with_chunks(1).unwrap();
        let t = Targets::privacy(0.6).unwrap();
        let j = optimize(&s, Method::Jpc, &t, None, None, DEFAULT_CAP).unwrap();
        let d = optimize(&s, Method::Dpc, &t, None, None, DEFAULT_CAP).unwrap();
        assert!(close(j.omega_star, d.omega_star, 1e-6));
    }

    #[test]
    fn projection_examples() {
        let s = Scenario::new(2, 1, 1, 1, &[0.8, 0.2], &[1.0]).unwrap();
        let set = enumerate(&s, Family::File, None, DEFAULT_CAP).unwrap();
        let a = set.index_of(&[1, 0]).unwrap();
        let b = set.index_of(&[0, 1]).unwrap();
        let pol = Policy::new(&set, vec![vec![(a, 0.7), (b, 0.3)]]).unwrap();
        let alpha = project_to_dpc(&s, &set, &pol).unwrap();
        assert!(close(alpha[0].values()[0], 0.7, 1e-12));
        assert!(close(alpha[0].values()[1], 0.3, 1e-12));
    }

    #[test]
    fn embedding_example() {
        let s = Scenario::new(4, 1, 2, 1, &[0.4, 0.3, 0.2, 0.1], &[1.0]).unwrap();
        let alpha = AlphaVector::new(&[0.7, 0.6, 0.4, 0.3], 2).unwrap();
        let (set, pol) =
            embed_dpc_as_jpc(&s, &[alpha], &FillOrder::ascending(4), DEFAULT_CAP).unwrap();
        assert!(close(
            pol.prob(0, set.index_of(&[1, 1, 0, 0]).unwrap()),
            0.3,
            1e-12
        ));
        assert!(close(
            pol.prob(0, set.index_of(&[1, 0, 1, 0]).unwrap()),
            0.4,
            1e-12
        ));
        assert!(close(
            pol.prob(0, set.index_of(&[0, 1, 0, 1]).unwrap()),
            0.3,
            1e-12
        ));
    }

    #[test]
    fn grid_is_inclusive() {
        let g = grid(0.56, 0.65, 0.01).unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(*g.last().unwrap(), 0.65);
        assert!(grid(0.5, 0.4, 0.1).is_err());
    }
}
