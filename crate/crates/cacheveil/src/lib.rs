//! File formats, output plumbing and the command-line front end for the
//! `cacheveil-core` cache-placement toolkit.

pub mod cli;
pub mod error;
pub mod formats;
pub mod output;
pub mod parallel;
pub mod recipes;
