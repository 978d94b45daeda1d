//! Synthetic image families.
//!
//! Every generator is a pure function of its arguments (and seed) and
//! enumerates members in a fixed lexicographic order.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BinaryImage, FamilyMeta, ImageFamily};
use crate::error::{Error, Result};

/// Shape parameters for rectangle outlines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutlineParams {
    pub min_side: usize,
    pub linewidth: usize,
}

impl Default for OutlineParams {
    fn default() -> Self {
        Self {
            min_side: 3,
            linewidth: 1,
        }
    }
}

fn draw_outline(
    img: &mut BinaryImage,
    top: usize,
    left: usize,
    height: usize,
    width: usize,
    linewidth: usize,
) {
    let bottom = top + height - 1;
    let right = left + width - 1;
    for r in top..=bottom {
        for c in left..=right {
            let on_edge = r < top + linewidth
                || r + linewidth > bottom
                || c < left + linewidth
                || c + linewidth > right;
            if on_edge {
                img.set(r, c, true);
            }
        }
    }
}

/// All axis-aligned rectangle outlines of linewidth 1 with both sides at
/// least `min_side`, at every position.
pub fn gen_rectangle_outlines(n: usize, min_side: usize) -> Result<ImageFamily> {
    gen_rectangle_outlines_with(
        n,
        OutlineParams {
            min_side,
            linewidth: 1,
        },
    )
}

/// Rectangle outlines enumerated in `(top, left, height, width)` order.
pub fn gen_rectangle_outlines_with(n: usize, params: OutlineParams) -> Result<ImageFamily> {
    let OutlineParams {
        min_side,
        linewidth,
    } = params;
    if linewidth == 0 || min_side < 2 * linewidth + 1 {
        return Err(Error::InvalidParameter(format!(
            "min_side {min_side} leaves no white interior at linewidth {linewidth}"
        )));
    }
    if n < min_side {
        return Err(Error::EmptyFamily(format!(
            "no rectangle with sides >= {min_side} fits a {n}x{n} grid"
        )));
    }
    let meta = FamilyMeta::new(
        format!("rect:min_side={min_side},linewidth={linewidth}"),
        None,
    );
    let mut family = ImageFamily::new(n, meta);
    for top in 1..=n {
        for left in 1..=n {
            for height in min_side..=(n + 1 - top) {
                for width in min_side..=(n + 1 - left) {
                    let mut img = BinaryImage::blank(n);
                    draw_outline(&mut img, top, left, height, width, linewidth);
                    family.insert(img)?;
                }
            }
        }
    }
    Ok(family)
}

/// Single vertical segments of length at least `min_len`, enumerated in
/// `(column, top, length)` order.
pub fn gen_vertical_bars(n: usize, min_len: usize) -> Result<ImageFamily> {
    if min_len < 1 {
        return Err(Error::InvalidParameter("min_len must be positive".into()));
    }
    if n < min_len {
        return Err(Error::EmptyFamily(format!(
            "no bar of length >= {min_len} fits a {n}x{n} grid"
        )));
    }
    let meta = FamilyMeta::new(format!("bars:min_len={min_len}"), None);
    let mut family = ImageFamily::new(n, meta);
    for col in 1..=n {
        for top in 1..=n {
            for len in min_len..=(n + 1 - top) {
                let mut img = BinaryImage::blank(n);
                for r in top..top + len {
                    img.set(r, col, true);
                }
                family.insert(img)?;
            }
        }
    }
    Ok(family)
}

/// Two rectangle outlines of equal width stacked vertically so that the
/// bottom edge of the upper one is the top edge of the lower one (an "8").
/// Enumerated in `(top, left, upper height, lower height, width)` order.
pub fn gen_stacked_outlines(n: usize, min_side: usize) -> Result<ImageFamily> {
    if min_side < 3 {
        return Err(Error::InvalidParameter(format!(
            "min_side {min_side} leaves no white interior"
        )));
    }
    if n + 1 < 2 * min_side {
        return Err(Error::EmptyFamily(format!(
            "two stacked outlines with sides >= {min_side} need n >= {}, got {n}",
            2 * min_side - 1
        )));
    }
    let meta = FamilyMeta::new(format!("stacked:min_side={min_side}"), None);
    let mut family = ImageFamily::new(n, meta);
    for top in 1..=n {
        for left in 1..=n {
            for upper in min_side..=n {
                for lower in min_side..=n {
                    if top + upper + lower - 2 > n {
                        continue;
                    }
                    for width in min_side..=(n + 1 - left) {
                        let mut img = BinaryImage::blank(n);
                        draw_outline(&mut img, top, left, upper, width, 1);
                        draw_outline(&mut img, top + upper - 1, left, lower, width, 1);
                        family.insert(img)?;
                    }
                }
            }
        }
    }
    Ok(family)
}

fn image_from_index(n: usize, mut code: u64) -> BinaryImage {
    let pixels = n * n;
    let mut bits = vec![0u8; pixels];
    for k in (0..pixels).rev() {
        bits[k] = (code & 1) as u8;
        code >>= 1;
    }
    BinaryImage { n, bits }
}

/// `m` distinct images drawn uniformly from `{0,1}^{n²}`.
pub fn gen_random_family(n: usize, m: usize, seed: u64) -> Result<ImageFamily> {
    if n == 0 {
        return Err(Error::InvalidParameter("image side must be positive".into()));
    }
    let pixels = n * n;
    if pixels < 64 && (m as u128) > (1u128 << pixels) {
        return Err(Error::InvalidParameter(format!(
            "cannot draw {m} distinct images from 2^{pixels}"
        )));
    }
    let meta = FamilyMeta::new(format!("random:m={m}"), Some(seed));
    let mut family = ImageFamily::new(n, meta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if pixels <= 32 {
        let total = 1usize << pixels;
        for code in index::sample(&mut rng, total, m).into_iter() {
            family.insert(image_from_index(n, code as u64))?;
        }
    } else {
        while family.len() < m {
            let bits = (0..pixels).map(|_| rng.random::<bool>() as u8).collect();
            family.insert(BinaryImage { n, bits })?;
        }
    }
    Ok(family)
}

/// `count` independent uniform images (repeats allowed), for probing.
pub fn random_images(n: usize, count: usize, seed: u64) -> Vec<BinaryImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| BinaryImage {
            n,
            bits: (0..n * n).map(|_| rng.random::<bool>() as u8).collect(),
        })
        .collect()
}

/// A named generator with its parameters; `generate(n)` is pure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Generator {
    Rect(OutlineParams),
    Bars { min_len: usize },
    Stacked { min_side: usize },
    Random { m: usize, seed: u64 },
    /// A random family with as many members as `reference` has at the same `n`.
    RandomMatched { reference: Box<Generator>, seed: u64 },
}

impl Generator {
    pub fn rect() -> Self {
        Generator::Rect(OutlineParams::default())
    }

    pub fn generate(&self, n: usize) -> Result<ImageFamily> {
        match self {
            Generator::Rect(p) => gen_rectangle_outlines_with(n, *p),
            Generator::Bars { min_len } => gen_vertical_bars(n, *min_len),
            Generator::Stacked { min_side } => gen_stacked_outlines(n, *min_side),
            Generator::Random { m, seed } => gen_random_family(n, *m, *seed),
            Generator::RandomMatched { reference, seed } => {
                let m = reference.generate(n)?.len();
                gen_random_family(n, m, *seed)
            }
        }
    }

    /// The random family with the same member count as this generator at `n`.
    pub fn matched_random(&self, seed: u64) -> Self {
        Generator::RandomMatched {
            reference: Box::new(self.clone()),
            seed,
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, Generator::Random { .. } | Generator::RandomMatched { .. })
    }

    pub fn label(&self) -> String {
        match self {
            Generator::Rect(_) => "rect".into(),
            Generator::Bars { .. } => "bars".into(),
            Generator::Stacked { .. } => "stacked".into(),
            Generator::Random { .. } => "random".into(),
            Generator::RandomMatched { reference, .. } => format!("random~{}", reference.label()),
        }
    }
}
