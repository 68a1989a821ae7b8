//! Probabilistic cache placement with a privacy guarantee against a
//! chunk-counting adversary.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`scenario`]: network instances and Zipf popularity profiles,
//! * [`enumeration`]: the chunk, file and subset placement families,
//! * [`metrics`]: communication cost, MAP-adversary privacy degree, hit
//!   ratio and the closed-form privacy bounds,
//! * [`simplex`]: a dense two-phase primal simplex solver,
//! * [`optimizer`]: the joint, disjoint and subset-based linear programs,
//! * [`dpc`]: the interval-filling placement strategy for per-file
//!   caching probabilities,
//! * [`baselines`]: the random dummy approach,
//! * [`montecarlo`]: a counter-based request simulator.
//!
//! File formats, parallel sweeps and the command line live in the
//! companion `cacheveil` crate.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod baselines;
pub mod combinatorics;
pub mod dpc;
pub mod enumeration;
mod error;
pub mod metrics;
pub mod montecarlo;
pub mod optimizer;
pub mod scenario;
pub mod simplex;

pub use enumeration::{Family, Partition, PlacementSet};
pub use error::{Error, Result};
pub use metrics::{AdversaryDecision, EvaluationReport, Policy};
pub use scenario::{Scenario, ZipfSpec};
