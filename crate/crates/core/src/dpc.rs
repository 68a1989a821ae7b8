//! Interval filling: turning per-file caching probabilities into a
//! distribution over complete-file placements.
//!
//! `M` unit intervals are laid end to end and filled with the `α_i` one
//! after another in a chosen order. A vertical line at height `u ∈ [0, 1)`
//! crosses exactly one segment per interval, and because every `α_i <= 1`
//! those `M` segments belong to distinct files. Drawing `u` uniformly and
//! caching the crossed files therefore stores file `i` with probability
//! `α_i`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::scenario::PROB_TOLERANCE;
use crate::{Error, Result};

/// Bands narrower than this are coincident boundaries and are dropped.
const BAND_EPS: f64 = 1e-12;

/// Per-file caching probabilities of one cache.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaVector {
    alpha: Vec<f64>,
    capacity: usize,
}

impl AlphaVector {
    /// Requires every entry in `[0, 1]` and `sum = capacity` within `1e-9`.
    pub fn new(alpha: &[f64], capacity: usize) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Validation("alpha vector is empty".into()));
        }
        for (i, &a) in alpha.iter().enumerate() {
            if !a.is_finite() || !(0.0..=1.0).contains(&a) {
                return Err(Error::Validation(format!(
                    "alpha of file {} is {a}, outside [0, 1]",
                    i + 1
                )));
            }
        }
        let total: f64 = alpha.iter().sum();
        if (total - capacity as f64).abs() > PROB_TOLERANCE {
            return Err(Error::Validation(format!(
                "alpha sums to {total}, cache holds {capacity} files"
            )));
        }
        Ok(Self {
            alpha: alpha.to_vec(),
            capacity,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.alpha
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// The order in which files are packed into the intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillOrder {
    order: Vec<usize>,
}

impl FillOrder {
    pub fn ascending(num_files: usize) -> Self {
        Self {
            order: (0..num_files).collect(),
        }
    }

    /// Most popular first; ties keep index order.
    pub fn by_popularity(popularity: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..popularity.len()).collect();
        order.sort_by(|&a, &b| popularity[b].total_cmp(&popularity[a]));
        Self { order }
    }

    /// Zero-based permutation of `0..n`.
    pub fn explicit(order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &i in order {
            if i >= order.len() || seen[i] {
                return Err(Error::Validation(format!(
                    "fill order {order:?} is not a permutation"
                )));
            }
            seen[i] = true;
        }
        Ok(Self {
            order: order.to_vec(),
        })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }
}

/// A piece of one interval assigned to a file.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Segment {
    pub file: usize,
    pub start: f64,
    pub end: f64,
}

/// A horizontal band `[start, end)` and the files a vertical line in it
/// crosses, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub start: f64,
    pub end: f64,
    pub files: Vec<usize>,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalLayout {
    num_files: usize,
    intervals: Vec<Vec<Segment>>,
    bands: Vec<Band>,
}

impl IntervalLayout {
    pub fn intervals(&self) -> &[Vec<Segment>] {
        &self.intervals
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn num_files(&self) -> usize {
        self.num_files
    }
}

/// Packs `alpha` into `M` unit intervals in `order`.
pub fn build_layout(alpha: &AlphaVector, order: &FillOrder) -> Result<IntervalLayout> {
    let n = alpha.len();
    if order.as_slice().len() != n {
        return Err(Error::Validation(format!(
            "fill order has {} files, alpha has {n}",
            order.as_slice().len()
        )));
    }
    let m = alpha.capacity();
    let total = m as f64;
    let mut intervals: Vec<Vec<Segment>> = vec![Vec::new(); m];
    let mut cursor = 0.0f64;
    let last = order
        .as_slice()
        .iter()
        .rposition(|&i| alpha.values()[i] > 0.0);
    for (pos, &file) in order.as_slice().iter().enumerate() {
        let a = alpha.values()[file];
        if a <= 0.0 {
            continue;
        }
        let mut end = cursor + a;
        if Some(pos) == last {
            end = total;
        }
        let nearest = libm::round(end);
        if (end - nearest).abs() <= BAND_EPS {
            end = nearest;
        }
        let end = end.min(total);
        let mut start = cursor;
        while start < end {
            let j = (libm::floor(start) as usize).min(m - 1);
            let stop = end.min((j + 1) as f64);
            if stop - start > 0.0 {
                intervals[j].push(Segment {
                    file,
                    start: start - j as f64,
                    end: stop - j as f64,
                });
            }
            start = stop;
        }
        cursor = end;
    }
    let bands = compute_bands(n, &intervals)?;
    Ok(IntervalLayout {
        num_files: n,
        intervals,
        bands,
    })
}

fn compute_bands(num_files: usize, intervals: &[Vec<Segment>]) -> Result<Vec<Band>> {
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    for seg in intervals.iter().flatten() {
        cuts.push(seg.start);
        cuts.push(seg.end);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= BAND_EPS);
    let mut bands = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= BAND_EPS {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let mut files: Vec<usize> = intervals
            .iter()
            .filter_map(|segs| {
                segs.iter()
                    .find(|s| s.start <= mid && mid < s.end)
                    .map(|s| s.file)
            })
            .collect();
        files.sort_unstable();
        if files.windows(2).any(|p| p[0] == p[1]) || files.len() != intervals.len() {
            return Err(Error::Verification(format!(
                "band [{lo}, {hi}) crosses files {files:?}"
            )));
        }
        debug_assert!(files.iter().all(|&f| f < num_files));
        bands.push(Band {
            start: lo,
            end: hi,
            files,
        });
    }
    Ok(bands)
}

/// The placement distribution: distinct file sets with their total band
/// width, sorted by file set.
pub fn layout_to_distribution(layout: &IntervalLayout) -> Vec<(Vec<usize>, f64)> {
    let mut out: Vec<(Vec<usize>, f64)> = Vec::new();
    for band in &layout.bands {
        match out.iter_mut().find(|(files, _)| *files == band.files) {
            Some(entry) => entry.1 += band.width(),
            None => out.push((band.files.clone(), band.width())),
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Per-file marginals of the layout's distribution.
pub fn layout_marginals(layout: &IntervalLayout) -> Vec<f64> {
    let mut marginals = vec![0.0; layout.num_files];
    for band in &layout.bands {
        for &f in &band.files {
            marginals[f] += band.width();
        }
    }
    marginals
}

/// Files of the band containing `u`; `u` is clamped into `[0, 1)`.
pub fn sample_placement(layout: &IntervalLayout, u: f64) -> &[usize] {
    let bands = &layout.bands;
    let pos = bands.partition_point(|b| b.end <= u);
    &bands[pos.min(bands.len() - 1)].files
}
