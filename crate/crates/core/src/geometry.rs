//! Sparse index sets and their difference (lag) structure.
//!
//! Each radar axis is described by a set of non-negative integers: sensor
//! positions in units of the element spacing `d`, frequency-offset indices in
//! units of `Δf`, and pulse times in units of the base interval `T`. The
//! second-order statistics of the received signal only see pairwise
//! *differences* of these indices, so a sparse physical set whose difference
//! set is large behaves like a much bigger filled array. This module builds
//! the index sets for every supported scheme and characterises their
//! difference sets: contiguous segment, holes, and lag counts.
//!
//! The workhorse is the co-prime union
//!
//! ```text
//! S = {m·i : 0 <= i <= n-1}  ∪  {n·j : 1 <= j <= 2m-1},   gcd(m,n) = 1
//! ```
//!
//! whose difference set is contiguous on [-(mn+m-1), mn+m-1] with n+2m-1
//! physical elements. The remaining schemes exist for the design-space
//! comparisons in [`crate::altdesigns`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A validated pair of co-prime integers with `m < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct CoprimePair {
    m: u32,
    n: u32,
}

impl CoprimePair {
    /// Builds a pair, rejecting `m >= n`, zeros, and non-co-prime inputs.
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Parameter("co-prime pair entries must be positive".into()));
        }
        if m >= n {
            return Err(Error::Parameter(format!("co-prime pair requires m < n, got ({m}, {n})")));
        }
        if gcd(m, n) != 1 {
            return Err(Error::Parameter(format!("({m}, {n}) are not co-prime")));
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    m: u32,
    n: u32,
}

impl From<CoprimePair> for RawPair {
    fn from(p: CoprimePair) -> Self {
        RawPair { m: p.m, n: p.n }
    }
}

impl TryFrom<RawPair> for CoprimePair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        CoprimePair::new(raw.m, raw.n)
    }
}

/// Recipe for one axis's index set.
///
/// `Uniform` and `Coprime` drive the live signal path; the rest are sparse
/// designs kept for coupling and occupancy comparisons. On the wire the
/// variant is selected by a `kind` field (`"uniform"`, `"coprime"`,
/// `"cadis"`, `"nested"`, `"super-nested"`, `"cna"`, `"gna"`,
/// `"multi-coset"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SchemeSpec {
    /// Filled array `{0, …, count-1}`.
    Uniform { count: u32 },
    /// Co-prime union of two sub-patterns with strides `m` and `n`.
    Coprime { pair: CoprimePair },
    /// Co-prime subarrays displaced by `l`: `n` elements at stride `m`, then
    /// `2m-1` elements at stride `n` starting `l` past the first subarray.
    Cadis { m: u32, n: u32, l: u32 },
    /// Dense block of `n1` followed by `n2` elements at stride `n1+1`.
    Nested { n1: u32, n2: u32 },
    /// Rearranged nested array with the same aperture and hole-free
    /// difference set but minimal small-separation pair counts.
    SuperNested { n1: u32, n2: u32 },
    /// Nested array concatenated with its own mirror image.
    Cna { n1: u32, n2: u32 },
    /// Two-stride generalisation: `n1` elements at stride `alpha`, then `n2`
    /// at stride `beta` (co-prime strides).
    Gna { n1: u32, n2: u32, alpha: u32, beta: u32 },
    /// `pattern` repeated every `block` indices for `periods` blocks.
    MultiCoset { pattern: Vec<u32>, block: u32, periods: u32 },
}

impl SchemeSpec {
    /// Shorthand for a co-prime scheme, validating the pair.
    pub fn coprime(m: u32, n: u32) -> Result<Self> {
        Ok(SchemeSpec::Coprime { pair: CoprimePair::new(m, n)? })
    }
}

/// Strictly increasing non-negative integers with first element 0.
///
/// The zero anchor matters: the two arms of the L-shaped array share the
/// element at the origin, and phase references along every axis are taken
/// relative to index 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexSet {
    values: Vec<u32>,
}

impl IndexSet {
    /// Validates and wraps a list of indices. The list is sorted here;
    /// duplicates and a missing zero anchor are rejected.
    pub fn new(mut values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("index set must be non-empty".into()));
        }
        values.sort_unstable();
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter("index set contains duplicate values".into()));
        }
        if values[0] != 0 {
            return Err(Error::Parameter("index set must contain 0".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest index, i.e. the span in units of the axis step.
    pub fn aperture(&self) -> u32 {
        *self.values.last().expect("index sets are non-empty")
    }
}

/// Difference-set summary of one index set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LagProfile {
    /// All distinct pairwise differences, ascending. Symmetric about 0.
    pub lags: Vec<i64>,
    /// Largest `L` such that every lag in `[-L, L]` is present.
    pub contiguous_halfwidth: u32,
    /// Positive lags missing between 1 and the maximum lag.
    pub holes: Vec<u32>,
    /// Number of distinct non-negative lags.
    pub nonneg_count: usize,
}

// ---------------------------------------------------------------------------
// Index-set generation
// ---------------------------------------------------------------------------

/// Realizes a scheme as a concrete index set.
pub fn generate_index_set(spec: &SchemeSpec) -> Result<IndexSet> {
    let values: Vec<u32> = match spec {
        SchemeSpec::Uniform { count } => {
            require(*count >= 1, "uniform scheme needs count >= 1")?;
            (0..*count).collect()
        }
        SchemeSpec::Coprime { pair } => {
            let (m, n) = (pair.m(), pair.n());
            let mut set = BTreeSet::new();
            set.extend((0..n).map(|i| m * i));
            set.extend((1..2 * m).map(|j| n * j));
            let values: Vec<u32> = set.into_iter().collect();
            debug_assert_eq!(values.len() as u32, n + 2 * m - 1);
            values
        }
        SchemeSpec::Cadis { m, n, l } => {
            require(*m >= 1 && *l >= 1, "cadis scheme needs m, l >= 1")?;
            require(*m < *n, "cadis scheme needs m < n")?;
            require(gcd(*m, *n) == 1, "cadis strides must be co-prime")?;
            let offset = (n - 1) * m + l;
            let mut set = BTreeSet::new();
            set.extend((0..*n).map(|i| m * i));
            set.extend((0..2 * m - 1).map(|j| offset + n * j));
            set.into_iter().collect()
        }
        SchemeSpec::Nested { n1, n2 } => {
            require(*n1 >= 1 && *n2 >= 1, "nested scheme needs n1, n2 >= 1")?;
            nested_values(*n1, *n2)
        }
        SchemeSpec::SuperNested { n1, n2 } => super_nested_values(*n1, *n2)?.to_vec(),
        SchemeSpec::Cna { n1, n2 } => {
            require(*n1 >= 1 && *n2 >= 1, "cna scheme needs n1, n2 >= 1")?;
            let parent = nested_values(*n1, *n2);
            let span = 2 * (n2 * (n1 + 1) - 1) + 1;
            let mut set: BTreeSet<u32> = parent.iter().copied().collect();
            set.extend(parent.iter().map(|&s| span - s));
            set.into_iter().collect()
        }
        SchemeSpec::Gna { n1, n2, alpha, beta } => {
            require(*n1 >= 1 && *n2 >= 1, "gna scheme needs n1, n2 >= 1")?;
            require(*alpha >= 1 && *beta >= 1, "gna strides must be positive")?;
            require(gcd(*alpha, *beta) == 1, "gna strides must be co-prime")?;
            let offset = alpha * (n1 - 1);
            let mut set: BTreeSet<u32> = (0..*n1).map(|i| alpha * i).collect();
            set.extend((1..=*n2).map(|j| offset + beta * j));
            set.into_iter().collect()
        }
        SchemeSpec::MultiCoset { pattern, block, periods } => {
            require(!pattern.is_empty(), "multi-coset pattern must be non-empty")?;
            require(*periods >= 1, "multi-coset needs periods >= 1")?;
            require(
                pattern.iter().all(|&p| p < *block),
                "multi-coset pattern entries must lie in [0, block)",
            )?;
            require(pattern.contains(&0), "multi-coset pattern must contain 0")?;
            let mut set = BTreeSet::new();
            for k in 0..*periods {
                set.extend(pattern.iter().map(|&p| p + block * k));
            }
            require(
                set.len() == pattern.len() * *periods as usize,
                "multi-coset pattern contains duplicates",
            )?;
            set.into_iter().collect()
        }
    };
    IndexSet::new(values)
}

fn nested_values(n1: u32, n2: u32) -> Vec<u32> {
    let mut set: BTreeSet<u32> = (0..n1).collect();
    set.extend((1..=n2).map(|j| (n1 + 1) * j - 1));
    set.into_iter().collect()
}

/// Precomputed rearranged-nested position tables.
///
/// Found by exhaustive search: among all sets with `n1+n2` elements on
/// `[0, n2(n1+1)-1]` containing both endpoints and having a hole-free
/// difference set over the whole aperture, these minimise the pair-separation
/// weight vector (w(1), w(2), …) lexicographically. Guard tests below
/// re-verify every row's defining properties.
const SUPER_NESTED_TABLE: &[((u32, u32), &[u32])] = &[
    ((2, 2), &[0, 1, 3, 5]),
    ((2, 3), &[0, 1, 4, 6, 8]),
    ((2, 4), &[0, 1, 4, 6, 9, 11]),
    ((2, 5), &[0, 1, 4, 7, 9, 12, 14]),
    ((2, 6), &[0, 1, 4, 7, 9, 12, 15, 17]),
    ((2, 7), &[0, 1, 4, 7, 10, 12, 15, 18, 20]),
    ((2, 8), &[0, 1, 4, 7, 10, 12, 15, 18, 21, 23]),
    ((3, 2), &[0, 1, 3, 5, 7]),
    ((3, 3), &[0, 1, 4, 6, 9, 11]),
    ((3, 4), &[0, 1, 4, 7, 10, 13, 15]),
    ((3, 5), &[0, 1, 4, 8, 12, 14, 17, 19]),
    ((3, 6), &[0, 1, 4, 8, 12, 16, 18, 21, 23]),
    ((3, 7), &[0, 1, 4, 8, 12, 16, 20, 22, 25, 27]),
    ((4, 2), &[0, 1, 3, 5, 7, 9]),
    ((4, 3), &[0, 1, 4, 7, 9, 12, 14]),
    ((4, 4), &[0, 1, 4, 8, 12, 14, 17, 19]),
    ((4, 5), &[0, 1, 6, 9, 12, 17, 20, 22, 24]),
    ((4, 6), &[0, 1, 6, 9, 14, 17, 22, 25, 27, 29]),
    ((5, 2), &[0, 1, 3, 5, 7, 9, 11]),
    ((5, 3), &[0, 1, 4, 7, 9, 12, 15, 17]),
    ((5, 4), &[0, 1, 4, 8, 12, 16, 18, 21, 23]),
    ((5, 5), &[0, 1, 6, 9, 14, 17, 22, 25, 27, 29]),
    ((6, 2), &[0, 1, 3, 5, 7, 9, 11, 13]),
    ((6, 3), &[0, 1, 4, 7, 10, 12, 15, 18, 20]),
    ((6, 4), &[0, 1, 4, 8, 12, 16, 20, 22, 25, 27]),
    ((7, 2), &[0, 1, 3, 5, 7, 9, 11, 13, 15]),
    ((7, 3), &[0, 1, 4, 7, 10, 12, 15, 18, 21, 23]),
    ((8, 2), &[0, 1, 3, 5, 7, 9, 11, 13, 15, 17]),
];

fn super_nested_values(n1: u32, n2: u32) -> Result<&'static [u32]> {
    SUPER_NESTED_TABLE
        .iter()
        .find(|((a, b), _)| (*a, *b) == (n1, n2))
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            Error::Parameter(format!(
                "super-nested table covers 2 <= n1, n2 with n1 + n2 <= 10; ({n1}, {n2}) is outside"
            ))
        })
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Parameter(msg.into()))
    }
}

pub(crate) fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// ---------------------------------------------------------------------------
// Difference sets
// ---------------------------------------------------------------------------

/// Computes the full difference-set summary of an index set.
pub fn difference_profile(set: &IndexSet) -> LagProfile {
    let mut lags = BTreeSet::new();
    for &a in set.values() {
        for &b in set.values() {
            lags.insert(i64::from(a) - i64::from(b));
        }
    }
    let max = *lags.iter().next_back().expect("difference set is non-empty");
    let mut halfwidth = 0i64;
    while lags.contains(&(halfwidth + 1)) {
        halfwidth += 1;
    }
    let holes = (1..=max).filter(|l| !lags.contains(l)).map(|l| l as u32).collect();
    let nonneg_count = lags.iter().filter(|&&l| l >= 0).count();
    LagProfile {
        lags: lags.into_iter().collect(),
        contiguous_halfwidth: halfwidth as u32,
        holes,
        nonneg_count,
    }
}

/// Closed form for the contiguous halfwidth of a co-prime difference set:
/// `m·n + m - 1`.
pub fn contiguous_bound(pair: CoprimePair) -> u32 {
    pair.m() * pair.n() + pair.m() - 1
}

/// Physical and coarray lag counts of a three-axis design, both restricted
/// to non-negative frequency-offset indices.
///
/// The physical count is the number of (sensor, offset, pulse) triples the
/// hardware realises; the coarray count is the number of distinct
/// non-negative difference triples available to second-order processing.
pub fn lag_counts(spatial: &IndexSet, fo: &IndexSet, pri: &IndexSet) -> (u64, u64) {
    let physical = spatial.len() as u64 * fo.len() as u64 * pri.len() as u64;
    let nonneg = |s: &IndexSet| difference_profile(s).nonneg_count as u64;
    (physical, nonneg(spatial) * nonneg(fo) * nonneg(pri))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
