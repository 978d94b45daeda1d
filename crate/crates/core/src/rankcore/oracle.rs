//! Independent reference routes: the fully materialized unfolding and rank
//! by Gaussian elimination over exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::Bipartition;
use crate::error::{Error, Result};
use crate::images::ImageFamily;

/// Maximum number of pixels on either side of a dense unfolding.
pub const DENSE_SIDE_LIMIT: usize = 12;

/// The full `2^|A| x 2^|Ā|` 0/1 matrix. Configurations are read as binary
/// numbers with the first listed pixel as the most significant bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseUnfolding {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl DenseUnfolding {
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub fn rank(&self) -> usize {
        let data: Vec<i64> = self.data.iter().map(|&x| x as i64).collect();
        rational_rank(self.rows, self.cols, &data)
    }
}

fn code(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub fn dense_unfolding_oracle(family: &ImageFamily, bipartition: &Bipartition) -> Result<DenseUnfolding> {
    let (a, b) = (bipartition.left().len(), bipartition.right().len());
    if a > DENSE_SIDE_LIMIT || b > DENSE_SIDE_LIMIT {
        return Err(Error::OracleTooLarge {
            left: a,
            right: b,
            limit: DENSE_SIDE_LIMIT,
        });
    }
    if a + b != family.side() * family.side() {
        return Err(Error::Structure("dense oracle needs a full bipartition".into()));
    }
    let (rows, cols) = (1usize << a, 1usize << b);
    let mut data = vec![0u8; rows * cols];
    for m in family.members() {
        let r = code(&m.restrict(bipartition.left()));
        let c = code(&m.restrict(bipartition.right()));
        data[r * cols + c] = 1;
    }
    Ok(DenseUnfolding { rows, cols, data })
}

/// Rank of a row-major integer matrix over `Q`.
pub fn rational_rank(rows: usize, cols: usize, data: &[i64]) -> usize {
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            (0..cols)
                .map(|c| BigRational::from_integer(BigInt::from(data[r * cols + c])))
                .collect()
        })
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let factor = &row[c] / &pivot_row[c];
            for j in c..cols {
                if !pivot_row[j].is_zero() {
                    let delta = &factor * &pivot_row[j];
                    row[j] -= delta;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
