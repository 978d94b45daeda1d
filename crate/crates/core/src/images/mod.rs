//! Binary images, rectangular regions and explicit image families.
//!
//! Pixels are addressed 1-based: pixel `(i, j)` (row `i`, column `j`) has the
//! row-major flat index `k = (i - 1) * n + j`.

mod format;
mod generators;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::{load_family, parse_family, save_family, write_family};
pub use generators::{
    gen_random_family, gen_rectangle_outlines, gen_rectangle_outlines_with, gen_stacked_outlines,
    gen_vertical_bars, random_images, Generator, OutlineParams,
};

/// Flat 1-based index of pixel `(row, col)`.
pub fn flat_index(n: usize, row: usize, col: usize) -> usize {
    (row - 1) * n + col
}

/// Inverse of [`flat_index`].
pub fn position(n: usize, k: usize) -> (usize, usize) {
    ((k - 1) / n + 1, (k - 1) % n + 1)
}

/// An `n x n` black-and-white image. Bit `1` is a black pixel.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryImage {
    n: usize,
    bits: Vec<u8>,
}

impl BinaryImage {
    /// All-white image.
    pub fn blank(n: usize) -> Self {
        Self {
            n,
            bits: vec![0; n * n],
        }
    }

    pub fn from_bits(n: usize, bits: Vec<u8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("image side must be positive".into()));
        }
        if bits.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: bits.len(),
            });
        }
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!("pixel value {b} is not 0 or 1")));
        }
        Ok(Self { n, bits })
    }

    /// Parses a row-major string of `'0'`/`'1'` characters.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidParameter(format!(
                    "unexpected character {other:?} in pixel string"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(n, bits)
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[flat_index(self.n, row, col) - 1]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        let k = flat_index(self.n, row, col);
        self.bits[k - 1] = value as u8;
    }

    /// Pixel at 1-based flat index `k`.
    pub fn flat(&self, k: usize) -> u8 {
        self.bits[k - 1]
    }

    /// Configuration of row `i` (1-based).
    pub fn row(&self, i: usize) -> &[u8] {
        &self.bits[(i - 1) * self.n..i * self.n]
    }

    /// Values at the given 1-based flat indices, in order.
    pub fn restrict(&self, pixels: &[usize]) -> Vec<u8> {
        pixels.iter().map(|&k| self.bits[k - 1]).collect()
    }

    /// Embeds the image in the top-left corner of a larger white canvas.
    pub fn padded(&self, side: usize) -> Result<Self> {
        if side < self.n {
            return Err(Error::InvalidParameter(format!(
                "cannot pad a {0}x{0} image down to {side}",
                self.n
            )));
        }
        let mut out = Self::blank(side);
        for i in 1..=self.n {
            let dst = (i - 1) * side;
            out.bits[dst..dst + self.n].copy_from_slice(self.row(i));
        }
        Ok(out)
    }

    pub fn count_black(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionKind {
    /// Rows `1..=i`.
    RowPrefix { rows: usize },
    Rectangle {
        top: usize,
        left: usize,
        height: usize,
        width: usize,
    },
    /// Pixels with flat index `1..=k`.
    PixelPrefix { pixels: usize },
}

/// A pixel region `A` inside an `n x n` grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub n: usize,
    pub kind: RegionKind,
}

impl Region {
    pub fn row_prefix(n: usize, rows: usize) -> Result<Self> {
        if rows == 0 || rows >= n {
            return Err(Error::InvalidParameter(format!(
                "row prefix {rows} outside 1..={}",
                n.saturating_sub(1)
            )));
        }
        Ok(Self {
            n,
            kind: RegionKind::RowPrefix { rows },
        })
    }

    pub fn pixel_prefix(n: usize, pixels: usize) -> Result<Self> {
        if pixels == 0 || pixels >= n * n {
            return Err(Error::InvalidParameter(format!(
                "pixel prefix {pixels} outside 1..={}",
                (n * n).saturating_sub(1)
            )));
        }
        Ok(Self {
            n,
            kind: RegionKind::PixelPrefix { pixels },
        })
    }

    pub fn rectangle(n: usize, top: usize, left: usize, height: usize, width: usize) -> Result<Self> {
        if top == 0 || left == 0 || height == 0 || width == 0 || top + height - 1 > n || left + width - 1 > n
        {
            return Err(Error::InvalidParameter(format!(
                "rectangle (top={top}, left={left}, {height}x{width}) does not fit a {n}x{n} grid"
            )));
        }
        Ok(Self {
            n,
            kind: RegionKind::Rectangle {
                top,
                left,
                height,
                width,
            },
        })
    }

    /// Number of pixels `|A|`.
    pub fn size(&self) -> usize {
        match self.kind {
            RegionKind::RowPrefix { rows } => rows * self.n,
            RegionKind::Rectangle { height, width, .. } => height * width,
            RegionKind::PixelPrefix { pixels } => pixels,
        }
    }

    /// Perimeter `|∂A|` of the region, measured as a polygon in the grid.
    pub fn boundary(&self) -> usize {
        match self.kind {
            RegionKind::RowPrefix { rows } => 2 * (rows + self.n),
            RegionKind::Rectangle { height, width, .. } => 2 * (height + width),
            // Staircase shapes are orthogonally convex: perimeter equals that
            // of the bounding box.
            RegionKind::PixelPrefix { pixels } => {
                let (rows, _) = position(self.n, pixels);
                let width = if rows == 1 { pixels } else { self.n };
                2 * (rows + width)
            }
        }
    }

    pub fn contains(&self, k: usize) -> bool {
        let (i, j) = position(self.n, k);
        match self.kind {
            RegionKind::RowPrefix { rows } => i <= rows,
            RegionKind::Rectangle {
                top,
                left,
                height,
                width,
            } => i >= top && i < top + height && j >= left && j < left + width,
            RegionKind::PixelPrefix { pixels } => k <= pixels,
        }
    }

    /// Flat indices of the region, ascending.
    pub fn pixels(&self) -> Vec<usize> {
        (1..=self.n * self.n).filter(|&k| self.contains(k)).collect()
    }

    /// Flat indices of the complement, ascending.
    pub fn complement(&self) -> Vec<usize> {
        (1..=self.n * self.n).filter(|&k| !self.contains(k)).collect()
    }
}

/// Generator name, parameters and seed recorded alongside a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMeta {
    /// Generator name and parameters, e.g. `rect:min_side=3,linewidth=1`.
    /// Never contains whitespace.
    pub name: String,
    pub seed: Option<u64>,
}

impl FamilyMeta {
    pub fn new(name: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            name: name.into(),
            seed,
        }
    }
}

/// The explicit set `f⁻¹(1)` of an indicator function on `n x n` images.
///
/// Members keep their insertion order; membership queries are hashed.
#[derive(Clone, Debug)]
pub struct ImageFamily {
    n: usize,
    members: Vec<BinaryImage>,
    index: HashSet<BinaryImage>,
    meta: FamilyMeta,
}

impl PartialEq for ImageFamily {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.meta == other.meta && self.members == other.members
    }
}

impl Eq for ImageFamily {}

impl ImageFamily {
    pub fn new(n: usize, meta: FamilyMeta) -> Self {
        Self {
            n,
            members: Vec::new(),
            index: HashSet::new(),
            meta,
        }
    }

    /// Builds a family, rejecting duplicates and side mismatches.
    pub fn from_members(n: usize, members: Vec<BinaryImage>, meta: FamilyMeta) -> Result<Self> {
        let mut family = Self::new(n, meta);
        for image in members {
            if !family.insert(image)? {
                return Err(Error::InvalidParameter("duplicate family member".into()));
            }
        }
        Ok(family)
    }

    /// Adds a member; returns `false` if it was already present.
    pub fn insert(&mut self, image: BinaryImage) -> Result<bool> {
        if image.side() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: image.side(),
            });
        }
        if self.index.contains(&image) {
            return Ok(false);
        }
        self.index.insert(image.clone());
        self.members.push(image);
        Ok(true)
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn meta(&self) -> &FamilyMeta {
        &self.meta
    }

    pub fn members(&self) -> &[BinaryImage] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, image: &BinaryImage) -> bool {
        self.index.contains(image)
    }

    /// `f(x)`.
    pub fn indicator(&self, image: &BinaryImage) -> f64 {
        if self.contains(image) {
            1.0
        } else {
            0.0
        }
    }

    /// Distinct configurations of row `i` among members, sorted.
    pub fn row_configs(&self, i: usize) -> Vec<Vec<u8>> {
        let mut rows: Vec<Vec<u8>> = self.members.iter().map(|m| m.row(i).to_vec()).collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    /// The same family embedded in a larger white canvas.
    pub fn padded(&self, side: usize) -> Result<Self> {
        let members = self
            .members
            .iter()
            .map(|m| m.padded(side))
            .collect::<Result<Vec<_>>>()?;
        Self::from_members(side, members, self.meta.clone())
    }

    /// Disjoint union with another family of the same side.
    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for m in &other.members {
            out.insert(m.clone())?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_index_round_trip() {
        for n in 1..=6 {
            for i in 1..=n {
                for j in 1..=n {
                    let k = flat_index(n, i, j);
                    assert!((1..=n * n).contains(&k));
                    assert_eq!(position(n, k), (i, j));
                }
            }
        }
    }

    #[test]
    fn image_rejects_bad_bits() {
        assert!(BinaryImage::from_bits(2, vec![0, 1, 0]).is_err());
        assert!(BinaryImage::from_bits(2, vec![0, 1, 2, 0]).is_err());
        assert!(BinaryImage::parse(2, "01x0").is_err());
        let img = BinaryImage::parse(2, "0110").unwrap();
        assert_eq!(img.get(1, 2), 1);
        assert_eq!(img.get(2, 2), 0);
        assert_eq!(img.to_string(), "0110");
    }

    #[test]
    fn padding_keeps_top_left() {
        let img = BinaryImage::parse(3, "100010001").unwrap();
        let p = img.padded(4).unwrap();
        assert_eq!(p.to_string(), "1000010000100000");
    }

    #[test]
    fn region_sizes_and_boundaries() {
        let r = Region::rectangle(8, 2, 3, 4, 2).unwrap();
        assert_eq!(r.size(), 8);
        assert_eq!(r.boundary(), 12);
        assert_eq!(r.pixels().len(), 8);
        assert_eq!(Region::row_prefix(4, 2).unwrap().size(), 8);
        assert!(Region::row_prefix(4, 4).is_err());
        assert!(Region::row_prefix(4, 0).is_err());
        assert!(Region::pixel_prefix(4, 16).is_err());
        assert!(Region::rectangle(4, 3, 1, 3, 1).is_err());
        let p = Region::pixel_prefix(4, 6).unwrap();
        assert_eq!(p.pixels(), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(p.complement().len(), 10);
    }

    #[test]
    fn family_rejects_duplicates_and_mismatches() {
        let a = BinaryImage::parse(2, "1000").unwrap();
        let meta = FamilyMeta::new("test", None);
        assert!(ImageFamily::from_members(2, vec![a.clone(), a.clone()], meta.clone()).is_err());
        assert!(ImageFamily::from_members(3, vec![a.clone()], meta.clone()).is_err());
        let f = ImageFamily::from_members(2, vec![a.clone()], meta).unwrap();
        assert!(f.contains(&a));
        assert_eq!(f.indicator(&BinaryImage::blank(2)), 0.0);
    }
}
