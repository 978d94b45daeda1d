//! Exact rank over the rationals of sparse 0/1 matrices.
//!
//! Reductions applied before elimination, all exact:
//! * a line (row or column) with a single nonzero contributes 1 and is
//!   removed together with the crossing line;
//! * duplicate rows and duplicate columns are dropped;
//! * the matrix splits into connected components of its bipartite graph,
//!   and the rank of a block-diagonal matrix is the sum of block ranks.
//!
//! What remains is eliminated with fraction-free (Bareiss) integer
//! elimination, first in `i128` and, on overflow, in arbitrary precision.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Unfolding;

/// Rank of the unfolding's biadjacency matrix; no floating tolerance.
pub fn exact_rank(unfolding: &Unfolding) -> usize {
    sparse_rank(unfolding.rows(), unfolding.cols(), &unfolding.entries)
}

struct Pattern {
    rows: Vec<BTreeSet<usize>>,
    cols: Vec<BTreeSet<usize>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
}

impl Pattern {
    fn remove_row(&mut self, r: usize) {
        self.row_alive[r] = false;
        for c in std::mem::take(&mut self.rows[r]) {
            self.cols[c].remove(&r);
        }
    }

    fn remove_col(&mut self, c: usize) {
        self.col_alive[c] = false;
        for r in std::mem::take(&mut self.cols[c]) {
            self.rows[r].remove(&c);
        }
    }

    /// Peels singleton lines; returns the rank they account for.
    fn peel_singletons(&mut self) -> usize {
        let mut rank = 0;
        let mut changed = true;
        while changed {
            changed = false;
            for c in 0..self.cols.len() {
                if !self.col_alive[c] {
                    continue;
                }
                match self.cols[c].len() {
                    0 => self.col_alive[c] = false,
                    1 => {
                        let r = *self.cols[c].iter().next().unwrap();
                        self.remove_row(r);
                        self.remove_col(c);
                        rank += 1;
                        changed = true;
                    }
                    _ => {}
                }
            }
            for r in 0..self.rows.len() {
                if !self.row_alive[r] {
                    continue;
                }
                match self.rows[r].len() {
                    0 => self.row_alive[r] = false,
                    1 => {
                        let c = *self.rows[r].iter().next().unwrap();
                        self.remove_col(c);
                        self.remove_row(r);
                        rank += 1;
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        rank
    }

    /// Drops repeated rows and columns; returns whether anything changed.
    fn drop_duplicates(&mut self) -> bool {
        let mut changed = false;
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        for r in 0..self.rows.len() {
            if !self.row_alive[r] {
                continue;
            }
            let key: Vec<usize> = self.rows[r].iter().copied().collect();
            if seen.insert(key, r).is_some() {
                self.remove_row(r);
                changed = true;
            }
        }
        seen.clear();
        for c in 0..self.cols.len() {
            if !self.col_alive[c] {
                continue;
            }
            let key: Vec<usize> = self.cols[c].iter().copied().collect();
            if seen.insert(key, c).is_some() {
                self.remove_col(c);
                changed = true;
            }
        }
        changed
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Exact rank of the `rows x cols` 0/1 matrix with ones at `entries`.
pub fn sparse_rank(rows: usize, cols: usize, entries: &[(usize, usize)]) -> usize {
    let mut pattern = Pattern {
        rows: vec![BTreeSet::new(); rows],
        cols: vec![BTreeSet::new(); cols],
        row_alive: vec![true; rows],
        col_alive: vec![true; cols],
    };
    for &(r, c) in entries {
        pattern.rows[r].insert(c);
        pattern.cols[c].insert(r);
    }
    let mut rank = pattern.peel_singletons();
    while pattern.drop_duplicates() {
        rank += pattern.peel_singletons();
    }

    // Connected components over rows (0..rows) and columns (rows..).
    let mut parent: Vec<usize> = (0..rows + cols).collect();
    for r in 0..rows {
        for &c in &pattern.rows[r] {
            let a = find(&mut parent, r);
            let b = find(&mut parent, rows + c);
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut components: HashMap<usize, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for r in (0..rows).filter(|&r| !pattern.rows[r].is_empty()) {
        let root = find(&mut parent, r);
        components.entry(root).or_default().0.push(r);
    }
    for c in (0..cols).filter(|&c| !pattern.cols[c].is_empty()) {
        let root = find(&mut parent, rows + c);
        components.entry(root).or_default().1.push(c);
    }
    for (comp_rows, comp_cols) in components.values() {
        let col_pos: HashMap<usize, usize> =
            comp_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut dense = vec![vec![0i64; comp_cols.len()]; comp_rows.len()];
        for (i, &r) in comp_rows.iter().enumerate() {
            for c in &pattern.rows[r] {
                dense[i][col_pos[c]] = 1;
            }
        }
        rank += bareiss_rank(dense);
    }
    rank
}

/// Fraction-free Gaussian elimination on an integer matrix.
pub fn bareiss_rank(matrix: Vec<Vec<i64>>) -> usize {
    let wide: Vec<Vec<i128>> = matrix
        .iter()
        .map(|row| row.iter().map(|&x| x as i128).collect())
        .collect();
    match bareiss_i128(wide) {
        Some(r) => r,
        None => bareiss_big(
            matrix
                .into_iter()
                .map(|row| row.into_iter().map(BigInt::from).collect())
                .collect(),
        ),
    }
}

/// `None` on overflow.
fn bareiss_i128(mut a: Vec<Vec<i128>>) -> Option<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev: i128 = 1;
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][c];
        for r in rank + 1..rows {
            let factor = a[r][c];
            for j in c + 1..cols {
                let lhs = pivot.checked_mul(a[r][j])?;
                let rhs = factor.checked_mul(a[rank][j])?;
                a[r][j] = lhs.checked_sub(rhs)? / prev;
            }
            a[r][c] = 0;
        }
        prev = pivot;
        rank += 1;
    }
    Some(rank)
}

fn bareiss_big(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = pivot_row[c].clone();
        for row in tail.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = &pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}
