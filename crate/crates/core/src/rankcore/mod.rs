//! Sparse unfoldings of an indicator function and their exact ranks.
//!
//! An [`Unfolding`] keeps only the configurations that occur among family
//! members. Absent configurations are all-zero rows or columns of the full
//! `2^|A| x 2^|Ā|` matrix, so dropping them leaves the rank unchanged.

mod exact;
mod factor;
pub mod oracle;
mod svd;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::images::{ImageFamily, Region};

pub use exact::{bareiss_rank, exact_rank, sparse_rank};
pub use factor::{factorize, RankFactorization};
pub use svd::{checked_svd, Svd};

/// Ordered pixel sets `A` (left) and `Ā` (right), as 1-based flat indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    n: usize,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    /// Sorts both sides; fails on out-of-range or overlapping pixels.
    pub fn new(n: usize, mut left: Vec<usize>, mut right: Vec<usize>) -> Result<Self> {
        left.sort_unstable();
        right.sort_unstable();
        let mut seen = vec![false; n * n + 1];
        for &k in left.iter().chain(right.iter()) {
            if k == 0 || k > n * n {
                return Err(Error::Structure(format!(
                    "pixel {k} outside 1..={}",
                    n * n
                )));
            }
            if seen[k] {
                return Err(Error::Structure(format!("pixel {k} appears twice")));
            }
            seen[k] = true;
        }
        Ok(Self { n, left, right })
    }

    /// `A` = the region, `Ā` = its complement.
    pub fn from_region(region: &Region) -> Self {
        Self {
            n: region.n,
            left: region.pixels(),
            right: region.complement(),
        }
    }

    /// Rows `1..=i` against rows `i+1..=n` (the cut of `F_i`).
    pub fn row_prefix(n: usize, i: usize) -> Result<Self> {
        Ok(Self::from_region(&Region::row_prefix(n, i)?))
    }

    /// Pixels `1..=k` against the rest (the cut of `F_{B_k}`).
    pub fn pixel_prefix(n: usize, k: usize) -> Result<Self> {
        Ok(Self::from_region(&Region::pixel_prefix(n, k)?))
    }

    /// Rows above `i` against rows below `i`; row `i` itself is left out for
    /// a [`FixedRowConstraint`].
    pub fn around_row(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::InvalidParameter(format!("row {i} outside 1..={n}")));
        }
        Ok(Self {
            n,
            left: (1..=(i - 1) * n).collect(),
            right: (i * n + 1..=n * n).collect(),
        })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn swapped(&self) -> Self {
        Self {
            n: self.n,
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }
}

/// Row `i` pinned to configuration `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedRowConstraint {
    pub row: usize,
    pub config: Vec<u8>,
}

impl FixedRowConstraint {
    pub fn new(n: usize, row: usize, config: Vec<u8>) -> Result<Self> {
        if row == 0 || row > n {
            return Err(Error::InvalidParameter(format!("row {row} outside 1..={n}")));
        }
        if config.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: config.len(),
            });
        }
        Ok(Self { row, config })
    }

    fn pixels(&self, n: usize) -> std::ops::RangeInclusive<usize> {
        (self.row - 1) * n + 1..=self.row * n
    }
}

/// Sparse 0/1 biadjacency between distinct left and right configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unfolding {
    pub left_configs: Vec<Vec<u8>>,
    pub right_configs: Vec<Vec<u8>>,
    /// `(p, q)` pairs with `B[p][q] = 1`, sorted.
    pub entries: Vec<(usize, usize)>,
}

impl Unfolding {
    pub fn rows(&self) -> usize {
        self.left_configs.len()
    }

    pub fn cols(&self) -> usize {
        self.right_configs.len()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<(usize, usize)> = self.entries.iter().map(|&(p, q)| (q, p)).collect();
        entries.sort_unstable();
        Self {
            left_configs: self.right_configs.clone(),
            right_configs: self.left_configs.clone(),
            entries,
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.rows(), self.cols());
        for &(p, q) in &self.entries {
            m[(p, q)] = 1.0;
        }
        m
    }
}

fn index_configs(configs: &[Vec<u8>]) -> (Vec<Vec<u8>>, HashMap<Vec<u8>, usize>) {
    let mut sorted = configs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let index = sorted
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    (sorted, index)
}

/// Reshapes `f` across `bipartition`, optionally after pinning one row.
///
/// Members whose pinned row differs from the constraint are skipped. The
/// left side, right side and pinned row must cover every pixel exactly once.
pub fn unfold(
    family: &ImageFamily,
    bipartition: &Bipartition,
    constraint: Option<&FixedRowConstraint>,
) -> Result<Unfolding> {
    let n = family.side();
    if bipartition.side() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bipartition.side(),
        });
    }
    let mut cover = vec![0u8; n * n + 1];
    for &k in bipartition.left.iter().chain(&bipartition.right) {
        cover[k] += 1;
    }
    if let Some(c) = constraint {
        if c.config.len() != n || c.row == 0 || c.row > n {
            return Err(Error::Structure("constraint does not fit the image".into()));
        }
        for k in c.pixels(n) {
            cover[k] += 1;
        }
    }
    if let Some(k) = (1..=n * n).find(|&k| cover[k] != 1) {
        return Err(Error::Structure(format!(
            "pixel {k} is covered {} times by the bipartition and constraint",
            cover[k]
        )));
    }

    let selected: Vec<_> = family
        .members()
        .iter()
        .filter(|m| constraint.is_none_or(|c| m.row(c.row) == c.config.as_slice()))
        .collect();
    let lefts: Vec<Vec<u8>> = selected.iter().map(|m| m.restrict(&bipartition.left)).collect();
    let rights: Vec<Vec<u8>> = selected.iter().map(|m| m.restrict(&bipartition.right)).collect();
    let (left_configs, left_index) = index_configs(&lefts);
    let (right_configs, right_index) = index_configs(&rights);
    let mut entries: Vec<(usize, usize)> = lefts
        .iter()
        .zip(&rights)
        .map(|(l, r)| (left_index[l], right_index[r]))
        .collect();
    entries.sort_unstable();
    entries.dedup();
    Ok(Unfolding {
        left_configs,
        right_configs,
        entries,
    })
}
