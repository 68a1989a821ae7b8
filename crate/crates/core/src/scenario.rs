//! Network instances: library size, caches, capacity, chunking and the two
//! request distributions (file popularity and per-cache request generation).

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Tolerance on probability vectors summing to one.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Zipf popularity profile `p_i ∝ i^(-alpha)` over `n` files.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZipfSpec {
    pub alpha: f64,
    pub n: usize,
}

/// Normalized Zipf popularities, most popular first.
pub fn zipf_popularity(spec: ZipfSpec) -> Result<Vec<f64>> {
    if spec.n == 0 {
        return Err(Error::Validation("zipf profile needs n >= 1".into()));
    }
    if !spec.alpha.is_finite() || spec.alpha < 0.0 {
        return Err(Error::Validation(format!(
            "zipf alpha must be a finite nonnegative number, got {}",
            spec.alpha
        )));
    }
    let weights: Vec<f64> = (1..=spec.n)
        .map(|i| libm::pow(i as f64, -spec.alpha))
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Where the popularity vector of a scenario came from.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PopularitySource {
    Explicit,
    Zipf { alpha: f64 },
}

/// A validated, immutable network instance.
///
/// Files are stored in descending popularity order; `original_index` maps a
/// stored file back to its position in the input vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    num_files: usize,
    num_caches: usize,
    cache_capacity: usize,
    chunks_per_file: usize,
    popularity: Vec<f64>,
    request_gen: Vec<f64>,
    original_index: Vec<usize>,
    source: PopularitySource,
}

fn check_distribution(name: &str, values: &[f64]) -> Result<Vec<f64>> {
    for (idx, &v) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Validation(format!(
                "{name}[{idx}] = {v} is not a probability"
            )));
        }
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::Validation(format!("{name} sum = {total}")));
    }
    Ok(values.iter().map(|v| v / total).collect())
}

impl Scenario {
    pub fn new(
        num_files: usize,
        num_caches: usize,
        cache_capacity: usize,
        chunks_per_file: usize,
        popularity: &[f64],
        request_gen: &[f64],
    ) -> Result<Self> {
        Self::build(
            num_files,
            num_caches,
            cache_capacity,
            chunks_per_file,
            popularity,
            request_gen,
            PopularitySource::Explicit,
        )
    }

    /// Scenario whose popularity is the Zipf(`alpha`) profile over `num_files`.
    pub fn with_zipf(
        num_files: usize,
        num_caches: usize,
        cache_capacity: usize,
        chunks_per_file: usize,
        alpha: f64,
        request_gen: &[f64],
    ) -> Result<Self> {
        let popularity = zipf_popularity(ZipfSpec {
            alpha,
            n: num_files,
        })?;
        Self::build(
            num_files,
            num_caches,
            cache_capacity,
            chunks_per_file,
            &popularity,
            request_gen,
            PopularitySource::Zipf { alpha },
        )
    }

    /// The five-file, two-cache instance used throughout the evaluation:
    /// `p = {0.5, 0.18, 0.12, 0.11, 0.09}`, `p_g = {0.7, 0.3}`, `M = 2`, `C = 10`.
    pub fn baseline() -> Self {
        Self::new(5, 2, 2, 10, &[0.5, 0.18, 0.12, 0.11, 0.09], &[0.7, 0.3])
            .expect("baseline scenario is valid")
    }

    fn build(
        num_files: usize,
        num_caches: usize,
        cache_capacity: usize,
        chunks_per_file: usize,
        popularity: &[f64],
        request_gen: &[f64],
        source: PopularitySource,
    ) -> Result<Self> {
        if num_files == 0 {
            return Err(Error::Validation("num_files must be positive".into()));
        }
        if num_caches == 0 {
            return Err(Error::Validation("num_caches must be positive".into()));
        }
        if chunks_per_file == 0 {
            return Err(Error::Validation("chunks_per_file must be positive".into()));
        }
        if cache_capacity == 0 || cache_capacity >= num_files {
            return Err(Error::Validation(format!(
                "cache_capacity must satisfy 0 < M < N, got M = {cache_capacity}, N = {num_files}"
            )));
        }
        if popularity.len() != num_files {
            return Err(Error::Validation(format!(
                "popularity has {} entries, expected num_files = {num_files}",
                popularity.len()
            )));
        }
        if request_gen.len() != num_caches {
            return Err(Error::Validation(format!(
                "request_gen has {} entries, expected num_caches = {num_caches}",
                request_gen.len()
            )));
        }
        let popularity = check_distribution("popularity", popularity)?;
        let request_gen = check_distribution("request_gen", request_gen)?;

        // Stable sort keeps ties in input order.
        let mut original_index: Vec<usize> = (0..num_files).collect();
        original_index.sort_by(|&a, &b| {
            popularity[b]
                .partial_cmp(&popularity[a])
                .expect("finite popularities")
        });
        let sorted = original_index.iter().map(|&i| popularity[i]).collect();

        Ok(Self {
            num_files,
            num_caches,
            cache_capacity,
            chunks_per_file,
            popularity: sorted,
            request_gen,
            original_index,
            source,
        })
    }

    /// Same instance with a different number of chunks per file.
    pub fn with_chunks(&self, chunks_per_file: usize) -> Result<Self> {
        if chunks_per_file == 0 {
            return Err(Error::Validation("chunks_per_file must be positive".into()));
        }
        Ok(Self {
            chunks_per_file,
            ..self.clone()
        })
    }

    /// Same instance with a different request-generation distribution.
    pub fn with_request_gen(&self, request_gen: &[f64]) -> Result<Self> {
        if request_gen.is_empty() {
            return Err(Error::Validation("num_caches must be positive".into()));
        }
        let request_gen = check_distribution("request_gen", request_gen)?;
        Ok(Self {
            num_caches: request_gen.len(),
            request_gen,
            ..self.clone()
        })
    }

    pub fn num_files(&self) -> usize {
        self.num_files
    }

    pub fn num_caches(&self) -> usize {
        self.num_caches
    }

    pub fn cache_capacity(&self) -> usize {
        self.cache_capacity
    }

    pub fn chunks_per_file(&self) -> usize {
        self.chunks_per_file
    }

    /// Popularities in descending order.
    pub fn popularity(&self) -> &[f64] {
        &self.popularity
    }

    pub fn request_gen(&self) -> &[f64] {
        &self.request_gen
    }

    pub fn source(&self) -> PopularitySource {
        self.source
    }

    /// Input position of the file stored at `file`.
    pub fn original_index(&self, file: usize) -> usize {
        self.original_index[file]
    }

    /// Largest request-generation probability, `p_g^max`.
    pub fn max_request_gen(&self) -> f64 {
        self.request_gen.iter().copied().fold(0.0, f64::max)
    }

    /// Capacity in chunks, `M·C`.
    pub fn capacity_chunks(&self) -> usize {
        self.cache_capacity * self.chunks_per_file
    }

    /// `P(k, i) = p_i · p_g^(k)`, zero-based indices.
    pub fn joint_request_prob(&self, cache: usize, file: usize) -> Result<f64> {
        if cache >= self.num_caches {
            return Err(Error::IndexOutOfRange {
                what: "cache",
                index: cache,
                len: self.num_caches,
            });
        }
        if file >= self.num_files {
            return Err(Error::IndexOutOfRange {
                what: "file",
                index: file,
                len: self.num_files,
            });
        }
        Ok(self.popularity[file] * self.request_gen[cache])
    }
}
