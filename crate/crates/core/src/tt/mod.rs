//! Tensor trains over the row-major pixel order.
//!
//! Pixel `k` carries two matrices `M_{k,0}`, `M_{k,1}` of shape
//! `l_{k-1} x l_k`; an image `y` evaluates to the scalar
//! `M_{1,y_1} M_{2,y_2} ... M_{n²,y_{n²}}` with `l_0 = l_{n²} = 1`.

pub mod dense;
mod io;

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::certify::{check_sizes, fixed_row_rank, Quantity, ScalingReport, POLY_SLOPE_THRESHOLD};
use crate::error::{Error, Result};
use crate::images::{position, BinaryImage, Generator, ImageFamily};
use crate::rankcore::{checked_svd, exact_rank, unfold, Bipartition};

pub use io::{load_tt, parse_tt, save_tt, write_tt};

/// Cores indexed by pixel (0-based here) and bit.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorTrain {
    n: usize,
    cores: Vec<[DMatrix<f64>; 2]>,
}

fn check_chain(n: usize, cores: &[[DMatrix<f64>; 2]]) -> Result<()> {
    if n == 0 || cores.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: cores.len(),
        });
    }
    let mut left = 1;
    for (k, [m0, m1]) in cores.iter().enumerate() {
        if m0.shape() != m1.shape() || m0.nrows() != left || m0.ncols() == 0 {
            return Err(Error::Structure(format!(
                "core {} has shapes {:?}/{:?}, expected {left} rows",
                k + 1,
                m0.shape(),
                m1.shape()
            )));
        }
        left = m0.ncols();
    }
    if left != 1 {
        return Err(Error::Structure(format!("last bond dimension is {left}, not 1")));
    }
    Ok(())
}

impl TensorTrain {
    pub fn new(n: usize, cores: Vec<[DMatrix<f64>; 2]>) -> Result<Self> {
        check_chain(n, &cores)?;
        Ok(Self { n, cores })
    }

    /// The zero function with every bond dimension 1.
    pub fn zero(n: usize) -> Self {
        let cores = (0..n * n)
            .map(|_| [DMatrix::zeros(1, 1), DMatrix::zeros(1, 1)])
            .collect();
        Self { n, cores }
    }

    /// Rank-1 train of the indicator of a single image.
    pub fn elementary(image: &BinaryImage) -> Self {
        let cores = image
            .bits()
            .iter()
            .map(|&b| {
                let mut pair = [DMatrix::zeros(1, 1), DMatrix::zeros(1, 1)];
                pair[b as usize][(0, 0)] = 1.0;
                pair
            })
            .collect();
        Self {
            n: image.side(),
            cores,
        }
    }

    /// Sum of one elementary train per member, with bond dimension `|members|`
    /// at every internal cut.
    pub fn elementary_sum(family: &ImageFamily) -> Self {
        let n = family.side();
        let m = family.len();
        let sites = n * n;
        if m == 0 {
            return Self::zero(n);
        }
        let cores = (0..sites)
            .map(|k| {
                let rows = if k == 0 { 1 } else { m };
                let cols = if k + 1 == sites { 1 } else { m };
                let mut pair = [DMatrix::zeros(rows, cols), DMatrix::zeros(rows, cols)];
                for (t, member) in family.members().iter().enumerate() {
                    let r = if rows == 1 { 0 } else { t };
                    let c = if cols == 1 { 0 } else { t };
                    pair[member.bits()[k] as usize][(r, c)] = 1.0;
                }
                pair
            })
            .collect();
        Self { n, cores }
    }

    /// The elementary sum with members sharing a prefix merged into one bond
    /// index: the bond at cut `k` ranges over distinct length-`k` prefixes,
    /// in lexicographic order. Exact, with 0/1 cores.
    pub fn prefix_automaton(family: &ImageFamily) -> Self {
        let n = family.side();
        let sites = n * n;
        if family.is_empty() {
            return Self::zero(n);
        }
        // state[t] = bond index of member t's prefix at the current cut
        let mut state = vec![0usize; family.len()];
        let mut width = 1;
        let mut cores = Vec::with_capacity(sites);
        for k in 0..sites {
            let last = k + 1 == sites;
            let mut children: Vec<(usize, u8)> = family
                .members()
                .iter()
                .zip(&state)
                .map(|(m, &s)| (s, m.bits()[k]))
                .collect();
            children.sort_unstable();
            children.dedup();
            let index: HashMap<(usize, u8), usize> =
                children.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let cols = if last { 1 } else { children.len() };
            let mut pair = [DMatrix::zeros(width, cols), DMatrix::zeros(width, cols)];
            for &(parent, bit) in &children {
                let c = if last { 0 } else { index[&(parent, bit)] };
                pair[bit as usize][(parent, c)] = 1.0;
            }
            for (s, m) in state.iter_mut().zip(family.members()) {
                *s = index[&(*s, m.bits()[k])];
            }
            cores.push(pair);
            width = cols;
        }
        Self { n, cores }
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn cores(&self) -> &[[DMatrix<f64>; 2]] {
        &self.cores
    }

    /// `l_0, l_1, ..., l_{n²}`.
    pub fn bond_dims(&self) -> Vec<usize> {
        std::iter::once(1)
            .chain(self.cores.iter().map(|c| c[0].ncols()))
            .collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    pub fn parameter_count(&self) -> usize {
        self.cores.iter().map(|c| 2 * c[0].len()).sum()
    }

    /// Left-to-right product for a row-major bit string.
    pub fn eval_bits(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.cores.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cores.len(),
                got: bits.len(),
            });
        }
        let mut v = vec![1.0];
        for (core, &b) in self.cores.iter().zip(bits) {
            let m = &core[b as usize & 1];
            v = (0..m.ncols()).map(|q| m.column(q).iter().zip(&v).map(|(a, x)| a * x).sum()).collect();
        }
        Ok(v[0])
    }

    pub fn eval(&self, image: &BinaryImage) -> Result<f64> {
        if image.side() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: image.side(),
            });
        }
        self.eval_bits(image.bits())
    }

    pub fn scale(&mut self, factor: f64) {
        for m in self.cores[0].iter_mut() {
            *m *= factor;
        }
    }

    /// Train of the pointwise sum; bond dimensions add.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let sites = self.cores.len();
        let cores = (0..sites)
            .map(|k| {
                let (a, b) = (&self.cores[k], &other.cores[k]);
                std::array::from_fn(|bit| {
                    let (x, y) = (&a[bit], &b[bit]);
                    if sites == 1 {
                        x + y
                    } else if k == 0 {
                        let mut m = DMatrix::zeros(1, x.ncols() + y.ncols());
                        m.view_mut((0, 0), x.shape()).copy_from(x);
                        m.view_mut((0, x.ncols()), y.shape()).copy_from(y);
                        m
                    } else if k + 1 == sites {
                        let mut m = DMatrix::zeros(x.nrows() + y.nrows(), 1);
                        m.view_mut((0, 0), x.shape()).copy_from(x);
                        m.view_mut((x.nrows(), 0), y.shape()).copy_from(y);
                        m
                    } else {
                        let mut m = DMatrix::zeros(x.nrows() + y.nrows(), x.ncols() + y.ncols());
                        m.view_mut((0, 0), x.shape()).copy_from(x);
                        m.view_mut(x.shape(), y.shape()).copy_from(y);
                        m
                    }
                })
            })
            .collect();
        Ok(Self { n: self.n, cores })
    }

    /// Right-to-left orthogonalization followed by left-to-right truncated
    /// SVD, keeping singular values above `tol` times the largest at each cut.
    pub fn round(&self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParameter(format!("tolerance {tol} outside (0, 1)")));
        }
        let mut cores = self.cores.clone();
        let sites = cores.len();

        for k in (1..sites).rev() {
            let (rows, cols) = cores[k][0].shape();
            let mut wide = DMatrix::zeros(rows, 2 * cols);
            wide.view_mut((0, 0), (rows, cols)).copy_from(&cores[k][0]);
            wide.view_mut((0, cols), (rows, cols)).copy_from(&cores[k][1]);
            // orthonormal rows from a checked SVD; nalgebra's QR was seen to
            // return wrong factors on wide inputs
            let svd = checked_svd(&wide)?;
            let kept = svd.singular_values.len();
            let mut us = svd.u;
            for (mut col, &sigma) in us.column_iter_mut().zip(svd.singular_values.iter()) {
                col *= sigma;
            }
            cores[k] = [
                svd.v_t.view((0, 0), (kept, cols)).into_owned(),
                svd.v_t.view((0, cols), (kept, cols)).into_owned(),
            ];
            for m in cores[k - 1].iter_mut() {
                *m = &*m * &us;
            }
        }

        for k in 0..sites.saturating_sub(1) {
            let (rows, cols) = cores[k][0].shape();
            let mut tall = DMatrix::zeros(2 * rows, cols);
            tall.view_mut((0, 0), (rows, cols)).copy_from(&cores[k][0]);
            tall.view_mut((rows, 0), (rows, cols)).copy_from(&cores[k][1]);
            let svd = checked_svd(&tall)?;
            let (u, v_t) = (&svd.u, &svd.v_t);
            let sigma = &svd.singular_values;
            let sigma_max = sigma.max();
            let mut order: Vec<usize> = (0..sigma.len()).collect();
            order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
            let keep: Vec<usize> = order
                .iter()
                .copied()
                .filter(|&t| sigma[t] > tol * sigma_max)
                .collect();
            let keep = if keep.is_empty() { vec![order[0]] } else { keep };
            let r = keep.len();
            let mut u_r = DMatrix::zeros(2 * rows, r);
            let mut sv = DMatrix::zeros(r, cols);
            for (i, &t) in keep.iter().enumerate() {
                u_r.set_column(i, &u.column(t));
                sv.set_row(i, &(v_t.row(t) * sigma[t]));
            }
            cores[k] = [
                u_r.view((0, 0), (rows, r)).into_owned(),
                u_r.view((rows, 0), (rows, r)).into_owned(),
            ];
            for m in cores[k + 1].iter_mut() {
                *m = &sv * &*m;
            }
        }
        Ok(Self { n: self.n, cores })
    }
}

/// Exact train of `f`: the member sum (prefix-merged) rounded to the
/// minimal bond dimensions `l_k = rank F_{B_k}`.
pub fn tt_from_family(family: &ImageFamily, tol: f64) -> Result<TensorTrain> {
    TensorTrain::prefix_automaton(family).round(tol)
}

pub fn tt_eval(tt: &TensorTrain, image: &BinaryImage) -> Result<f64> {
    tt.eval(image)
}

pub fn tt_round(tt: &TensorTrain, tol: f64) -> Result<TensorTrain> {
    tt.round(tol)
}

/// `rank F_{B_k}` for `k = 1..n²-1`, exactly.
pub fn prefix_ranks(family: &ImageFamily) -> Result<Vec<usize>> {
    let n = family.side();
    (1..n * n)
        .map(|k| Ok(exact_rank(&unfold(family, &Bipartition::pixel_prefix(n, k)?, None)?)))
        .collect()
}

/// `Σ rank F_{B_k,Y₁,Y₂}` over the occurring splits of row `i` at pixel `k`,
/// where `Y₁` covers row `i` up to `k` and `Y₂` the rest of that row.
///
/// Each block has rows indexed by the rows above `i` and columns by the rows
/// below `i`, with row `i` pinned to `Y₁Y₂`.
pub fn block_partition_bound(family: &ImageFamily, k: usize) -> Result<usize> {
    let n = family.side();
    if k == 0 || k >= n * n {
        return Err(Error::InvalidParameter(format!(
            "cut {k} outside 1..={}",
            (n * n).saturating_sub(1)
        )));
    }
    let (i, j) = position(n, k);
    let mut splits: Vec<(Vec<u8>, Vec<u8>)> = family
        .members()
        .iter()
        .map(|m| {
            let row = m.row(i);
            (row[..j].to_vec(), row[j..].to_vec())
        })
        .collect();
    splits.sort_unstable();
    splits.dedup();
    splits
        .iter()
        .map(|(y1, y2)| {
            let y: Vec<u8> = y1.iter().chain(y2).copied().collect();
            fixed_row_rank(family, i, &y)
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Size {
    pub n: usize,
    pub members: usize,
    /// `l_0..l_{n²}` of the rounded train.
    pub bonds: Vec<usize>,
    pub max_bond: usize,
    /// Block bound for `k = 1..n²-1`.
    pub block_bounds: Vec<usize>,
    /// Every `l_k` is at most its block bound.
    pub within_block_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Report {
    pub sizes: Vec<Theorem2Size>,
    pub scaling: ScalingReport,
}

/// Builds the rounded train per `n`, compares every bond against the block
/// bound, and fits `log2 max_k l_k` against `log2 n`.
pub fn verify_theorem2(generator: &Generator, ns: &[usize], tol: f64) -> Result<Theorem2Report> {
    check_sizes(ns)?;
    let mut sizes = Vec::with_capacity(ns.len());
    for &n in ns {
        let family = generator.generate(n)?;
        let tt = tt_from_family(&family, tol)?;
        let bonds = tt.bond_dims();
        let block_bounds = (1..n * n)
            .map(|k| block_partition_bound(&family, k))
            .collect::<Result<Vec<_>>>()?;
        let within_block_bound = block_bounds
            .iter()
            .enumerate()
            .all(|(idx, &b)| bonds[idx + 1] <= b);
        sizes.push(Theorem2Size {
            n,
            members: family.len(),
            max_bond: tt.max_bond(),
            bonds,
            block_bounds,
            within_block_bound,
        });
    }
    let series = sizes.iter().map(|s| (s.n, s.max_bond)).collect();
    let scaling = ScalingReport::from_series(
        generator.label(),
        Quantity::MaxBondDim,
        series,
        POLY_SLOPE_THRESHOLD,
    );
    Ok(Theorem2Report { sizes, scaling })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::images::{gen_random_family, gen_rectangle_outlines, gen_vertical_bars, FamilyMeta};
    use rand::{Rng, SeedableRng};

    fn all_images(n: usize) -> impl Iterator<Item = BinaryImage> {
        let sites = n * n;
        (0u64..1 << sites).map(move |code| {
            let bits = (0..sites).map(|k| ((code >> (sites - 1 - k)) & 1) as u8).collect();
            BinaryImage::from_bits(n, bits).unwrap()
        })
    }

    #[test]
    fn single_member_rounds_to_unit_bonds() {
        let img = BinaryImage::parse(3, "101010101").unwrap();
        let f = ImageFamily::from_members(3, vec![img.clone()], FamilyMeta::new("one", None)).unwrap();
        let tt = tt_from_family(&f, 1e-9).unwrap();
        assert!(tt.bond_dims().iter().all(|&l| l == 1));
        assert!((tt.eval(&img).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_family_is_zero_function() {
        let f = ImageFamily::new(3, FamilyMeta::new("empty", None));
        let tt = tt_from_family(&f, 1e-9).unwrap();
        assert!(tt.bond_dims().iter().all(|&l| l == 1));
        for img in all_images(3) {
            assert_eq!(tt.eval(&img).unwrap(), 0.0);
        }
    }

    #[test]
    fn exhaustive_exactness_at_n3() {
        for f in [
            gen_rectangle_outlines(3, 3).unwrap(),
            gen_vertical_bars(3, 2).unwrap(),
            gen_random_family(3, 40, 5).unwrap(),
        ] {
            let tt = tt_from_family(&f, 1e-9).unwrap();
            for img in all_images(3) {
                assert!((tt.eval(&img).unwrap() - f.indicator(&img)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rounded_bonds_equal_prefix_ranks() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        let tt = tt_from_family(&f, 1e-9).unwrap();
        let ranks = prefix_ranks(&f).unwrap();
        assert_eq!(&tt.bond_dims()[1..16], ranks.as_slice());
        assert_eq!(tt.max_bond(), *ranks.iter().max().unwrap());
    }

    #[test]
    fn elementary_sum_and_automaton_agree() {
        let f = gen_vertical_bars(4, 2).unwrap();
        let a = TensorTrain::elementary_sum(&f);
        assert_eq!(a.max_bond(), f.len());
        let b = TensorTrain::prefix_automaton(&f);
        let ra = a.round(1e-9).unwrap();
        let rb = b.round(1e-9).unwrap();
        assert_eq!(ra.bond_dims(), rb.bond_dims());
        for m in f.members() {
            assert!((a.eval(m).unwrap() - 1.0).abs() < 1e-12);
            assert!((b.eval(m).unwrap() - 1.0).abs() < 1e-12);
            assert!((ra.eval(m).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rounding_is_idempotent_and_monotone() {
        let f = gen_rectangle_outlines(5, 3).unwrap();
        let raw = TensorTrain::prefix_automaton(&f);
        let once = raw.round(1e-9).unwrap();
        let twice = once.round(1e-9).unwrap();
        assert_eq!(once.bond_dims(), twice.bond_dims());
        for (a, b) in raw.bond_dims().iter().zip(once.bond_dims()) {
            assert!(b <= *a);
        }
    }

    #[test]
    fn doubled_member_rounds_to_single() {
        let img = BinaryImage::parse(3, "111101111").unwrap();
        let mut half = TensorTrain::elementary(&img);
        half.scale(0.5);
        let sum = half.add(&half).unwrap();
        assert_eq!(sum.max_bond(), 2);
        let r = sum.round(1e-9).unwrap();
        assert!(r.bond_dims().iter().all(|&l| l == 1));
        assert!((r.eval(&img).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sum_of_disjoint_families_is_linear() {
        let a = gen_rectangle_outlines(4, 3).unwrap();
        let b = gen_vertical_bars(4, 2).unwrap();
        let ta = TensorTrain::elementary_sum(&a);
        let tb = TensorTrain::elementary_sum(&b);
        let sum = ta.add(&tb).unwrap();
        let union = TensorTrain::elementary_sum(&a.union(&b).unwrap());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let probes: Vec<BinaryImage> = a
            .members()
            .iter()
            .chain(b.members())
            .cloned()
            .chain((0..200).map(|_| {
                BinaryImage::from_bits(4, (0..16).map(|_| rng.random::<bool>() as u8).collect()).unwrap()
            }))
            .collect();
        for img in &probes {
            let expected = a.indicator(img) + b.indicator(img);
            assert!((sum.eval(img).unwrap() - expected).abs() < 1e-12);
            assert!((union.eval(img).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn eval_rejects_wrong_side() {
        let tt = TensorTrain::zero(3);
        assert!(tt.eval(&BinaryImage::blank(4)).is_err());
        assert!(tt.eval_bits(&[0; 8]).is_err());
    }

    #[test]
    fn new_checks_chain() {
        let bad = vec![[DMatrix::zeros(1, 2), DMatrix::zeros(1, 2)], [DMatrix::zeros(1, 1), DMatrix::zeros(1, 1)]];
        assert!(TensorTrain::new(1, bad.clone()).is_err());
        let bad4: Vec<_> = bad.into_iter().cycle().take(4).collect();
        assert!(TensorTrain::new(2, bad4).is_err());
    }

    #[test]
    fn block_bound_at_row_end_is_fixed_row_sum() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        for i in 1..4 {
            let fixed_row_sum: usize = f
                .row_configs(i)
                .iter()
                .map(|y| fixed_row_rank(&f, i, y).unwrap())
                .sum();
            assert_eq!(block_partition_bound(&f, i * 4).unwrap(), fixed_row_sum);
        }
        let empty = ImageFamily::new(4, FamilyMeta::new("empty", None));
        assert_eq!(block_partition_bound(&empty, 6).unwrap(), 0);
        let ranks = prefix_ranks(&f).unwrap();
        assert!(block_partition_bound(&f, 6).unwrap() >= ranks[5]);
        assert!(block_partition_bound(&f, 0).is_err());
        assert!(block_partition_bound(&f, 16).is_err());
    }

    #[test]
    fn scaling_report_small() {
        let r = verify_theorem2(&Generator::rect(), &[4, 8], 1e-9).unwrap();
        assert!(r.sizes.iter().all(|s| s.within_block_bound));
        assert!(r.scaling.fit.unwrap().slope <= 3.0);
    }
}
