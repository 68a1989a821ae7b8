//! Thread pool sizing and the parallel drivers for sweeps and simulation.

use cacheveil_core::montecarlo::{SimConfig, SimCounts, Simulator};
use cacheveil_core::optimizer::{check_ascending, Prepared, SweepPoint, Targets};
use rayon::prelude::*;
use std::time::Instant;

use crate::error::CliError;

pub const THREADS_VAR: &str = "CACHEVEIL_THREADS";

/// Requests per simulation work item.
const SIM_BLOCK: u64 = 4096;

/// Worker count from `CACHEVEIL_THREADS`, or `None` for machine parallelism.
pub fn configured_threads() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Validation(format!(
                "{THREADS_VAR} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

pub fn pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = configured_threads()? {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Internal(format!("thread pool: {e}")))
}

/// Solves every grid point concurrently; results come back in grid order
/// together with the wall-clock solve time in milliseconds.
pub fn sweep(prepared: &Prepared, grid: &[f64]) -> Result<Vec<(SweepPoint, f64)>, CliError> {
    check_ascending(grid)?;
    let points: Result<Vec<(SweepPoint, f64)>, cacheveil_core::Error> = pool()?.install(|| {
        grid.par_iter()
            .map(|&z| {
                let start = Instant::now();
                let outcome = prepared.solve(&Targets::privacy(z)?)?;
                Ok((
                    SweepPoint::from_outcome(&outcome),
                    start.elapsed().as_secs_f64() * 1e3,
                ))
            })
            .collect()
    });
    Ok(points?)
}

/// Runs all requests in blocks across the pool. Every request has its own
/// random stream, so the result does not depend on the worker count.
pub fn simulate(
    sim: &Simulator<'_>,
    cfg: &SimConfig,
    chunks_per_file: usize,
) -> Result<SimCounts, CliError> {
    let blocks: Vec<(u64, u64)> = (0..cfg.num_requests.div_ceil(SIM_BLOCK))
        .map(|b| (b * SIM_BLOCK, ((b + 1) * SIM_BLOCK).min(cfg.num_requests)))
        .collect();
    let parts: Vec<SimCounts> = pool()?.install(|| {
        blocks
            .par_iter()
            .map(|&(lo, hi)| sim.run_range(lo..hi))
            .collect()
    });
    let mut total = SimCounts::empty(chunks_per_file);
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}
