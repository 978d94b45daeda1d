//! The complete binary tree over an `n x n` grid, `n = 2^d`.
//!
//! Layer `i` runs from 1 (pixels) to `2d + 1` (root). Node `(i, j, k)` covers
//! a block of `2^⌊i/2⌋` rows by `2^⌊(i-1)/2⌋` columns: even layers merge two
//! vertically adjacent children, odd layers two horizontally adjacent ones.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::images::{flat_index, Region};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TreeIndex {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl TreeIndex {
    pub fn new(i: usize, j: usize, k: usize) -> Self {
        Self { i, j, k }
    }
}

/// Pixel rectangle covered by a node, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Support {
    pub top: usize,
    pub left: usize,
    pub height: usize,
    pub width: usize,
}

impl Support {
    /// Flat indices in row-major order.
    pub fn pixels(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.height * self.width);
        for r in self.top..self.top + self.height {
            for c in self.left..self.left + self.width {
                out.push(flat_index(n, r, c));
            }
        }
        out
    }

    pub fn to_region(&self, n: usize) -> Result<Region> {
        Region::rectangle(n, self.top, self.left, self.height, self.width)
    }
}

/// Tree shape for one power-of-two side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    n: usize,
    depth: usize,
}

pub fn tree_structure(n: usize) -> Result<Tree> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "tree side {n} is not a power of two >= 2; pad the image first"
        )));
    }
    Ok(Tree {
        n,
        depth: n.trailing_zeros() as usize,
    })
}

impl Tree {
    pub fn side(&self) -> usize {
        self.n
    }

    /// `2 log2 n + 1`.
    pub fn layer_count(&self) -> usize {
        2 * self.depth + 1
    }

    pub fn root(&self) -> TreeIndex {
        TreeIndex::new(self.layer_count(), 1, 1)
    }

    /// Support height and width of layer `i`.
    pub fn block(&self, i: usize) -> (usize, usize) {
        (1 << (i / 2), 1 << ((i - 1) / 2))
    }

    /// Extent of `j` and `k` in layer `i`.
    pub fn grid(&self, i: usize) -> (usize, usize) {
        let (h, w) = self.block(i);
        (self.n / h, self.n / w)
    }

    pub fn layer_len(&self, i: usize) -> usize {
        let (rows, cols) = self.grid(i);
        rows * cols
    }

    /// Nodes of layer `i` in `(j, k)` order.
    pub fn layer(&self, i: usize) -> Vec<TreeIndex> {
        let (rows, cols) = self.grid(i);
        (1..=rows)
            .flat_map(|j| (1..=cols).map(move |k| TreeIndex::new(i, j, k)))
            .collect()
    }

    /// Position of `node` within `layer(node.i)`.
    pub fn position(&self, node: TreeIndex) -> usize {
        let (_, cols) = self.grid(node.i);
        (node.j - 1) * cols + (node.k - 1)
    }

    pub fn contains(&self, node: TreeIndex) -> bool {
        if node.i == 0 || node.i > self.layer_count() {
            return false;
        }
        let (rows, cols) = self.grid(node.i);
        (1..=rows).contains(&node.j) && (1..=cols).contains(&node.k)
    }

    pub fn support(&self, node: TreeIndex) -> Support {
        let (h, w) = self.block(node.i);
        Support {
            top: (node.j - 1) * h + 1,
            left: (node.k - 1) * w + 1,
            height: h,
            width: w,
        }
    }

    /// First and second child; `None` for leaves.
    pub fn children(&self, node: TreeIndex) -> Option<[TreeIndex; 2]> {
        let TreeIndex { i, j, k } = node;
        match i {
            0 | 1 => None,
            _ if i % 2 == 0 => Some([TreeIndex::new(i - 1, 2 * j - 1, k), TreeIndex::new(i - 1, 2 * j, k)]),
            _ => Some([TreeIndex::new(i - 1, j, 2 * k - 1), TreeIndex::new(i - 1, j, 2 * k)]),
        }
    }

    pub fn parent(&self, node: TreeIndex) -> Option<TreeIndex> {
        let TreeIndex { i, j, k } = node;
        if i >= self.layer_count() {
            return None;
        }
        Some(if (i + 1) % 2 == 0 {
            TreeIndex::new(i + 1, j.div_ceil(2), k)
        } else {
            TreeIndex::new(i + 1, j, k.div_ceil(2))
        })
    }

    /// Whether `node` is its parent's first child (the `u` input).
    pub fn is_first_child(&self, node: TreeIndex) -> bool {
        if (node.i + 1).is_multiple_of(2) {
            node.j % 2 == 1
        } else {
            node.k % 2 == 1
        }
    }

    pub fn sibling(&self, node: TreeIndex) -> Option<TreeIndex> {
        let [a, b] = self.children(self.parent(node)?)?;
        Some(if a == node { b } else { a })
    }

    /// Leaf descendants, found by walking the child rule.
    pub fn leaf_descendants(&self, node: TreeIndex) -> Vec<TreeIndex> {
        match self.children(node) {
            None => vec![node],
            Some([a, b]) => {
                let mut out = self.leaf_descendants(a);
                out.extend(self.leaf_descendants(b));
                out
            }
        }
    }

    /// Re-derives the support properties from the child rule alone.
    pub fn verify(&self) -> StructureReport {
        let n = self.n;
        let mut layer_sizes = true;
        let mut descendants = true;
        let mut disjoint = true;
        let mut union = true;
        let mut shapes = true;
        let mut family_links = true;
        for i in 1..=self.layer_count() {
            let nodes = self.layer(i);
            layer_sizes &= nodes.len() == (n * n) >> (i - 1);
            let mut cover = vec![0u32; n * n + 1];
            for &node in &nodes {
                let support = self.support(node);
                let mut from_leaves: Vec<usize> = self
                    .leaf_descendants(node)
                    .iter()
                    .map(|l| flat_index(n, l.j, l.k))
                    .collect();
                from_leaves.sort_unstable();
                let mut pixels = support.pixels(n);
                pixels.sort_unstable();
                descendants &= from_leaves == pixels;
                for &p in &pixels {
                    cover[p] += 1;
                }
                shapes &= if i % 2 == 1 {
                    support.height == support.width
                } else {
                    support.height == 2 * support.width
                };
                if let Some([a, b]) = self.children(node) {
                    let mut merged = self.support(a).pixels(n);
                    merged.extend(self.support(b).pixels(n));
                    merged.sort_unstable();
                    union &= merged == pixels;
                    family_links &= self.contains(a)
                        && self.contains(b)
                        && self.parent(a) == Some(node)
                        && self.parent(b) == Some(node)
                        && self.is_first_child(a)
                        && !self.is_first_child(b)
                        && self.sibling(a) == Some(b);
                }
            }
            disjoint &= cover[1..].iter().all(|&c| c == 1);
        }
        StructureReport {
            n,
            layers: self.layer_count(),
            layer_sizes,
            descendants,
            disjoint,
            union,
            shapes,
            family_links,
        }
    }
}

/// Outcome of [`Tree::verify`]; `descendants`, `disjoint`, `union` and
/// `shapes` are the four support properties.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub n: usize,
    pub layers: usize,
    /// Layer `i` has `n² / 2^(i-1)` nodes.
    pub layer_sizes: bool,
    /// The support formula equals the set of leaf descendants.
    pub descendants: bool,
    /// Each layer tiles the grid without overlap.
    pub disjoint: bool,
    /// A parent's support is the union of its children's.
    pub union: bool,
    /// Squares on odd layers, 2:1 rectangles on even ones.
    pub shapes: bool,
    /// Parent, child and sibling maps are mutually consistent.
    pub family_links: bool,
}

impl StructureReport {
    pub fn all_hold(&self) -> bool {
        self.layer_sizes && self.descendants && self.disjoint && self.union && self.shapes && self.family_links
    }
}
