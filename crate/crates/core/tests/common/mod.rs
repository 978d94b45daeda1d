//! Test-side oracles, written without the library's rank code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use imgtn::images::ImageFamily;

const PRIMES: [u64; 2] = [2_147_483_647, 4_294_967_291];

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn rank_mod(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = pow_mod(rows[rank][c], p - 2, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let factor = rows[r][c] * inv % p;
                for k in c..cols {
                    let sub = factor * rows[rank][k] % p;
                    rows[r][k] = (rows[r][k] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of a 0/1 matrix over the rationals. The rank modulo a prime never
/// exceeds it and equals it unless the prime divides every maximal minor,
/// so the larger of two primes is taken.
pub fn rank01(rows: &[Vec<u8>]) -> usize {
    PRIMES
        .iter()
        .map(|&p| rank_mod(rows.iter().map(|r| r.iter().map(|&b| u64::from(b)).collect()).collect(), p))
        .max()
        .unwrap_or(0)
}

/// Unfolding of `f` with rows indexed by the restriction to `left`
/// (0-based flat indices) and columns by the rest, over occurring
/// configurations only; zero rows and columns do not change the rank.
pub fn unfolding(family: &ImageFamily, left: &[usize]) -> Vec<Vec<u8>> {
    let n = family.side();
    let mut in_left = vec![false; n * n];
    for &p in left {
        in_left[p] = true;
    }
    let mut row_ids = BTreeMap::new();
    let mut col_ids = BTreeMap::new();
    let mut cells = Vec::new();
    for m in family.members() {
        let bits = m.bits();
        let (a, b): (Vec<u8>, Vec<u8>) = {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for (p, &v) in bits.iter().enumerate() {
                if in_left[p] { a.push(v) } else { b.push(v) }
            }
            (a, b)
        };
        let next = row_ids.len();
        let r = *row_ids.entry(a).or_insert(next);
        let next = col_ids.len();
        let c = *col_ids.entry(b).or_insert(next);
        cells.push((r, c));
    }
    let mut m = vec![vec![0u8; col_ids.len()]; row_ids.len()];
    for (r, c) in cells {
        m[r][c] = 1;
    }
    m
}

/// Rank of the cut after the first `k` row-major pixels.
pub fn prefix_rank(family: &ImageFamily, k: usize) -> usize {
    rank01(&unfolding(family, &(0..k).collect::<Vec<_>>()))
}

/// Rank of the cut around the `height x width` block at 0-based `(top, left)`.
pub fn block_rank(family: &ImageFamily, top: usize, left: usize, height: usize, width: usize) -> usize {
    let n = family.side();
    let pixels: Vec<usize> = (top..top + height)
        .flat_map(|r| (left..left + width).map(move |c| r * n + c))
        .collect();
    rank01(&unfolding(family, &pixels))
}

/// Full `2^k x 2^(N-k)` unfolding of the value table, zero rows included.
pub fn dense_prefix_unfolding(family: &ImageFamily, k: usize) -> Vec<Vec<u8>> {
    let total = family.side() * family.side();
    let mut m = vec![vec![0u8; 1 << (total - k)]; 1 << k];
    for img in family.members() {
        let index = |range: std::ops::Range<usize>| range.fold(0usize, |acc, p| acc << 1 | usize::from(img.bits()[p]));
        m[index(0..k)][index(k..total)] = 1;
    }
    m
}
