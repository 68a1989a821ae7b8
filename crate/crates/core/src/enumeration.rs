//! The three placement families and their canonical enumeration.
//!
//! * chunk family: `0 <= z_i <= C`, `sum z = M·C` (one entry per file),
//! * file family: `z_i ∈ {0, C}`, `sum z = M·C`,
//! * subset family: `0 <= z_l <= |S_l|·C`, `sum z = M·C` (one entry per subset).
//!
//! Placements are listed in ascending lexicographic order, so a placement's
//! index is reproducible and doubles as an LP column offset.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::combinatorics::{
    binomial_exact, count_bounded_compositions, count_uniform_compositions,
};
use crate::{Error, Result, Scenario};

/// Default enumeration cap (placements per family).
pub const DEFAULT_CAP: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    Chunk,
    File,
    Subset,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Chunk => "chunk",
            Family::File => "file",
            Family::Subset => "subset",
        })
    }
}

/// Contiguous partition of the popularity-ordered files into `L` subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    sizes: Vec<usize>,
    starts: Vec<usize>,
}

impl Partition {
    pub fn new(sizes: &[usize], num_files: usize) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Validation(
                "a partition needs at least one subset".into(),
            ));
        }
        if let Some(l) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Validation(format!("subset {} is empty", l + 1)));
        }
        let total: usize = sizes.iter().sum();
        if total != num_files {
            return Err(Error::Validation(format!(
                "subset sizes sum to {total}, expected num_files = {num_files}"
            )));
        }
        let mut starts = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for &s in sizes {
            starts.push(acc);
            acc += s;
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            starts,
        })
    }

    /// `parts` subsets whose sizes differ by at most one, larger subsets first.
    pub fn balanced(num_files: usize, parts: usize) -> Result<Self> {
        if parts == 0 || parts > num_files {
            return Err(Error::Validation(format!(
                "cannot split {num_files} files into {parts} nonempty subsets"
            )));
        }
        let base = num_files / parts;
        let extra = num_files % parts;
        let sizes: Vec<usize> = (0..parts).map(|l| base + usize::from(l < extra)).collect();
        Self::new(&sizes, num_files)
    }

    /// One subset per file.
    pub fn singletons(num_files: usize) -> Self {
        Self::new(&vec![1; num_files], num_files).expect("singletons are a valid partition")
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, subset: usize) -> usize {
        self.sizes[subset]
    }

    /// Zero-based file indices of `subset`.
    pub fn files(&self, subset: usize) -> Range<usize> {
        self.starts[subset]..self.starts[subset] + self.sizes[subset]
    }

    pub fn subset_of(&self, file: usize) -> usize {
        match self.starts.binary_search(&file) {
            Ok(l) => l,
            Err(l) => l - 1,
        }
    }

    pub fn num_files(&self) -> usize {
        self.sizes.iter().sum()
    }
}

/// An enumerated placement family in canonical (ascending lexicographic)
/// order. Placements are stored flat, `width` entries each.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementSet {
    family: Family,
    width: usize,
    chunks_per_file: usize,
    capacity_chunks: usize,
    partition: Option<Partition>,
    data: Vec<u32>,
}

impl PlacementSet {
    pub fn family(&self) -> Family {
        self.family
    }

    /// Entries per placement: `N` for chunk and file families, `L` for subsets.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn chunks_per_file(&self) -> usize {
        self.chunks_per_file
    }

    pub fn capacity_chunks(&self) -> usize {
        self.capacity_chunks
    }

    pub fn partition(&self) -> Option<&Partition> {
        self.partition.as_ref()
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, index: usize) -> &[u32] {
        &self.data[index * self.width..(index + 1) * self.width]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.data.chunks_exact(self.width)
    }

    /// Index of `placement`, if it belongs to the set.
    pub fn index_of(&self, placement: &[u32]) -> Option<usize> {
        if placement.len() != self.width {
            return None;
        }
        let n = self.len();
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(placement) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Checks that the set is the family of `scenario` (and `partition` for
    /// subsets) it claims to be.
    pub fn check_matches(&self, scenario: &Scenario, partition: Option<&Partition>) -> Result<()> {
        let width = match self.family {
            Family::Chunk | Family::File => scenario.num_files(),
            Family::Subset => partition.map(Partition::len).unwrap_or(0),
        };
        let same_partition = match self.family {
            Family::Subset => partition == self.partition.as_ref(),
            _ => true,
        };
        if self.width != width
            || self.chunks_per_file != scenario.chunks_per_file()
            || self.capacity_chunks != scenario.capacity_chunks()
            || !same_partition
        {
            return Err(Error::Validation(format!(
                "the {} placement set does not belong to this scenario",
                self.family
            )));
        }
        Ok(())
    }
}

/// Number of placements in a family, computed without enumerating.
pub fn count_placements(
    scenario: &Scenario,
    family: Family,
    partition: Option<&Partition>,
) -> Result<u128> {
    let n = scenario.num_files();
    let c = scenario.chunks_per_file();
    let m = scenario.cache_capacity();
    Ok(match family {
        Family::Chunk => count_uniform_compositions(m * c, n, c)
            .unwrap_or_else(|| count_bounded_compositions(m * c, &vec![c; n])),
        Family::File => binomial_exact(n as i64, m as i64).unwrap_or(u128::MAX),
        Family::Subset => {
            let part = require_partition(scenario, partition)?;
            let caps: Vec<usize> = part.sizes().iter().map(|s| s * c).collect();
            count_bounded_compositions(m * c, &caps)
        }
    })
}

fn require_partition<'a>(
    scenario: &Scenario,
    partition: Option<&'a Partition>,
) -> Result<&'a Partition> {
    let part =
        partition.ok_or_else(|| Error::Validation("the subset family needs a partition".into()))?;
    if part.num_files() != scenario.num_files() {
        return Err(Error::Validation(format!(
            "partition covers {} files, scenario has {}",
            part.num_files(),
            scenario.num_files()
        )));
    }
    Ok(part)
}

fn check_cap(family: Family, count: u128, cap: usize) -> Result<()> {
    if count > cap as u128 {
        return Err(Error::CapExceeded { family, count, cap });
    }
    Ok(())
}

/// All vectors `v` with `0 <= v_j <= caps[j]`, `sum v = total`, ascending
/// lexicographic order, written flat into `out`.
fn bounded_compositions(total: usize, caps: &[usize], scale: u32, out: &mut Vec<u32>) {
    let width = caps.len();
    // suffix[j] = sum of caps[j..]
    let mut suffix = vec![0usize; width + 1];
    for j in (0..width).rev() {
        suffix[j] = suffix[j + 1] + caps[j];
    }
    if total > suffix[0] {
        return;
    }
    let mut current = vec![0usize; width];
    let lower = |j: usize, remaining: usize| remaining.saturating_sub(suffix[j + 1]);

    // Depth-first walk with explicit state: fill position `j` with the
    // smallest admissible value, then advance the deepest incrementable slot.
    let mut remaining = total;
    for j in 0..width {
        current[j] = lower(j, remaining);
        remaining -= current[j];
    }
    loop {
        out.extend(current.iter().map(|&v| v as u32 * scale));
        // Find the rightmost position (excluding the last, which is forced)
        // that can be incremented while keeping the suffix feasible.
        let mut j = width.saturating_sub(1);
        let mut rem_after = current[width - 1];
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            // rem_after: chunks held by positions j+1.. in the current vector
            if current[j] < caps[j] && rem_after > 0 {
                break;
            }
            rem_after += current[j];
        }
        current[j] += 1;
        let mut remaining = rem_after - 1;
        for t in j + 1..width {
            current[t] = lower(t, remaining);
            remaining -= current[t];
        }
    }
}

/// Chunk family of `scenario` (errors above `cap`).
pub fn enumerate_chunk_placements(scenario: &Scenario, cap: usize) -> Result<PlacementSet> {
    let count = count_placements(scenario, Family::Chunk, None)?;
    check_cap(Family::Chunk, count, cap)?;
    let n = scenario.num_files();
    let c = scenario.chunks_per_file();
    let mut data = Vec::with_capacity(count as usize * n);
    bounded_compositions(scenario.capacity_chunks(), &vec![c; n], 1, &mut data);
    Ok(PlacementSet {
        family: Family::Chunk,
        width: n,
        chunks_per_file: c,
        capacity_chunks: scenario.capacity_chunks(),
        partition: None,
        data,
    })
}

/// File family: every choice of `M` whole files.
pub fn enumerate_file_placements(scenario: &Scenario, cap: usize) -> Result<PlacementSet> {
    let count = count_placements(scenario, Family::File, None)?;
    check_cap(Family::File, count, cap)?;
    let n = scenario.num_files();
    let c = scenario.chunks_per_file();
    let mut data = Vec::with_capacity(count as usize * n);
    bounded_compositions(scenario.cache_capacity(), &vec![1; n], c as u32, &mut data);
    Ok(PlacementSet {
        family: Family::File,
        width: n,
        chunks_per_file: c,
        capacity_chunks: scenario.capacity_chunks(),
        partition: None,
        data,
    })
}

/// Subset family for `partition`.
pub fn enumerate_subset_placements(
    scenario: &Scenario,
    partition: &Partition,
    cap: usize,
) -> Result<PlacementSet> {
    let count = count_placements(scenario, Family::Subset, Some(partition))?;
    check_cap(Family::Subset, count, cap)?;
    let c = scenario.chunks_per_file();
    let caps: Vec<usize> = partition.sizes().iter().map(|s| s * c).collect();
    let mut data = Vec::with_capacity(count as usize * caps.len());
    bounded_compositions(scenario.capacity_chunks(), &caps, 1, &mut data);
    Ok(PlacementSet {
        family: Family::Subset,
        width: caps.len(),
        chunks_per_file: c,
        capacity_chunks: scenario.capacity_chunks(),
        partition: Some(partition.clone()),
        data,
    })
}

/// Enumerates `family`, taking the partition for the subset family.
pub fn enumerate(
    scenario: &Scenario,
    family: Family,
    partition: Option<&Partition>,
    cap: usize,
) -> Result<PlacementSet> {
    match family {
        Family::Chunk => enumerate_chunk_placements(scenario, cap),
        Family::File => enumerate_file_placements(scenario, cap),
        Family::Subset => {
            let part = require_partition(scenario, partition)?;
            enumerate_subset_placements(scenario, part, cap)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn scenario(n: usize, m: usize, c: usize) -> Scenario {
        let p = vec![1.0 / n as f64; n];
        Scenario::new(n, 1, m, c, &p, &[1.0]).unwrap()
    }

    fn rows(set: &PlacementSet) -> Vec<Vec<u32>> {
        set.iter().map(|z| z.to_vec()).collect()
    }

    #[test]
    fn tiny_chunk_family() {
        let set = enumerate_chunk_placements(&scenario(2, 1, 2), DEFAULT_CAP).unwrap();
        assert_eq!(rows(&set), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn baseline_chunk_family_size() {
        let s = Scenario::baseline();
        let set = enumerate_chunk_placements(&s, DEFAULT_CAP).unwrap();
        assert_eq!(set.len(), 7051);
        assert_eq!(count_placements(&s, Family::Chunk, None).unwrap(), 7051);
    }

    #[test]
    fn single_chunk_collapses_to_file_family() {
        let s = scenario(5, 2, 1);
        let chunk = enumerate_chunk_placements(&s, DEFAULT_CAP).unwrap();
        let file = enumerate_file_placements(&s, DEFAULT_CAP).unwrap();
        assert_eq!(chunk.len(), 10);
        assert_eq!(rows(&chunk), rows(&file));
    }

    #[test]
    fn file_family_four_choose_two() {
        let c = 3;
        let set = enumerate_file_placements(&scenario(4, 2, c), DEFAULT_CAP).unwrap();
        let mut got = rows(&set);
        let mut want = vec![
            vec![3, 3, 0, 0],
            vec![3, 0, 3, 0],
            vec![3, 0, 0, 3],
            vec![0, 3, 3, 0],
            vec![0, 3, 0, 3],
            vec![0, 0, 3, 3],
        ];
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(
            enumerate_file_placements(&scenario(12, 3, 7), DEFAULT_CAP)
                .unwrap()
                .len(),
            220
        );
    }

    #[test]
    fn subset_family_counts() {
        let s = scenario(12, 3, 1);
        let three = Partition::balanced(12, 3).unwrap();
        assert_eq!(
            enumerate_subset_placements(&s, &three, DEFAULT_CAP)
                .unwrap()
                .len(),
            10
        );
        let twelve = Partition::singletons(12);
        assert_eq!(
            enumerate_subset_placements(&s, &twelve, DEFAULT_CAP)
                .unwrap()
                .len(),
            220
        );
        let six = Partition::balanced(12, 6).unwrap();
        assert_eq!(
            count_placements(&s, Family::Subset, Some(&six)).unwrap(),
            50
        );
        let one = Partition::balanced(12, 1).unwrap();
        let set = enumerate_subset_placements(&scenario(12, 3, 4), &one, DEFAULT_CAP).unwrap();
        assert_eq!(rows(&set), vec![vec![12]]);
    }

    #[test]
    fn cap_is_enforced_before_materializing() {
        let s = scenario(12, 3, 10);
        match enumerate_chunk_placements(&s, 1000) {
            Err(Error::CapExceeded {
                family: Family::Chunk,
                count,
                cap: 1000,
            }) => {
                assert_eq!(Some(count), count_uniform_compositions(30, 12, 10));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn index_lookup_round_trips() {
        let set = enumerate_chunk_placements(&scenario(4, 2, 3), DEFAULT_CAP).unwrap();
        for (idx, z) in set.iter().enumerate() {
            assert_eq!(set.index_of(z), Some(idx));
        }
        assert_eq!(set.index_of(&[3, 3, 3, 0]), None);
    }

    #[test]
    fn partition_geometry() {
        let p = Partition::new(&[2, 3, 1], 6).unwrap();
        assert_eq!(p.files(1), 2..5);
        assert_eq!(p.subset_of(0), 0);
        assert_eq!(p.subset_of(4), 1);
        assert_eq!(p.subset_of(5), 2);
        assert!(Partition::new(&[2, 0, 4], 6).is_err());
        assert!(Partition::new(&[2, 3], 6).is_err());
        assert_eq!(
            Partition::balanced(12, 5).unwrap().sizes(),
            &[3, 3, 2, 2, 2]
        );
    }
}
