//! Convolutional arithmetic circuits in hierarchical Tucker form.
//!
//! Leaves emit a pixel basis vector. A non-leaf node with first-child output
//! `u` and second-child output `v` emits, per channel `m`,
//!
//! * generalized form: `v M_m uᵀ = Σ_{a,b} v_a M_m[a][b] u_b`,
//! * diagonal form: `Σ_c V_m[c] u_c v_c`.

mod io;
mod tree;

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::certify::{check_sizes, semilog_fit, Fit, Quantity, ScalingReport, POLY_SLOPE_THRESHOLD};
use crate::error::{Error, Result};
use crate::images::{random_images, BinaryImage, Generator, ImageFamily};
use crate::rankcore::{exact_rank, factorize, unfold, Bipartition};
use crate::tt::{tt_from_family, TensorTrain};

pub use io::{load_ht, parse_ht, save_ht, write_ht};
pub use tree::{tree_structure, StructureReport, Support, Tree, TreeIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Generalized,
    Diagonal,
}

impl Form {
    pub fn name(&self) -> &'static str {
        match self {
            Form::Generalized => "generalized",
            Form::Diagonal => "diagonal",
        }
    }
}

/// Leaf channel values: channel `c` of a leaf with map `s` is 1 when the
/// pixel is black and `s[c] == 0`, or white and `s[c] == 1`.
pub const BLACK: u8 = 0;
pub const WHITE: u8 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct HtNetwork {
    tree: Tree,
    input_side: usize,
    form: Form,
    /// `l_1..l_L`.
    channels: Vec<usize>,
    /// Rank of each node's support unfolding, per layer in `(j, k)` order.
    node_ranks: Vec<Vec<usize>>,
    /// Per leaf, the basis element each channel emits.
    leaves: Vec<Vec<u8>>,
    /// `params[i - 2][node]`, flattened: `[m][a][b]` or `[m][c]`.
    params: Vec<Vec<Vec<f64>>>,
}

/// Generalized node function on one channel; `m` is row-major `l x l`.
pub fn node_generalized(m: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let l = u.len();
    v.iter()
        .enumerate()
        .map(|(a, &va)| {
            if va == 0.0 {
                return 0.0;
            }
            let row = &m[a * l..(a + 1) * l];
            va * row.iter().zip(u).map(|(x, y)| x * y).sum::<f64>()
        })
        .sum()
}

/// Diagonal node function on one channel.
pub fn node_diagonal(weights: &[f64], u: &[f64], v: &[f64]) -> f64 {
    weights.iter().zip(u).zip(v).map(|((w, x), y)| w * x * y).sum()
}

/// `(x_1..x_l, x_1..x_l, ...)`: `x` repeated `l` times as a block.
pub fn tile(x: &[f64], times: usize) -> Vec<f64> {
    (0..times).flat_map(|_| x.iter().copied()).collect()
}

/// `(x_1, .., x_1, x_2, ..)`: each entry of `x` repeated `times` times.
pub fn repeat(x: &[f64], times: usize) -> Vec<f64> {
    x.iter().flat_map(|&v| std::iter::repeat_n(v, times)).collect()
}

/// Old channel that new channel `c` copies under the duplication scheme.
fn source_channel(c: usize, width: usize, first_child: bool) -> usize {
    if first_child {
        c % width
    } else {
        c / width
    }
}

impl HtNetwork {
    /// Assembles a network from explicit parameters, checking every shape.
    pub fn from_parts(
        n: usize,
        form: Form,
        channels: Vec<usize>,
        leaves: Vec<Vec<u8>>,
        params: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let tree = tree_structure(n)?;
        let layers = tree.layer_count();
        if channels.len() != layers {
            return Err(Error::DimensionMismatch {
                expected: layers,
                got: channels.len(),
            });
        }
        if channels[layers - 1] != 1 || channels.contains(&0) {
            return Err(Error::Structure("root must emit one channel and no layer may be empty".into()));
        }
        if leaves.len() != n * n || leaves.iter().any(|s| s.len() != channels[0] || s.iter().any(|&b| b > 1)) {
            return Err(Error::Structure(format!("expected {} leaves of {} channels", n * n, channels[0])));
        }
        if params.len() != layers - 1 {
            return Err(Error::DimensionMismatch {
                expected: layers - 1,
                got: params.len(),
            });
        }
        for i in 2..=layers {
            let (out, inp) = (channels[i - 1], channels[i - 2]);
            let per_node = match form {
                Form::Generalized => out * inp * inp,
                Form::Diagonal => out * inp,
            };
            let layer = &params[i - 2];
            if layer.len() != tree.layer_len(i) || layer.iter().any(|p| p.len() != per_node) {
                return Err(Error::Structure(format!(
                    "layer {i}: expected {} nodes of {per_node} parameters",
                    tree.layer_len(i)
                )));
            }
        }
        let node_ranks = (1..=layers).map(|i| vec![0; tree.layer_len(i)]).collect();
        Ok(Self {
            tree,
            input_side: n,
            form,
            channels,
            node_ranks,
            leaves,
            params,
        })
    }

    pub fn side(&self) -> usize {
        self.tree.side()
    }

    /// Side of the images the network was built for, before padding.
    pub fn input_side(&self) -> usize {
        self.input_side
    }

    pub fn is_padded(&self) -> bool {
        self.input_side != self.side()
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn channels(&self) -> &[usize] {
        &self.channels
    }

    pub fn max_channels(&self) -> usize {
        self.channels.iter().copied().max().unwrap_or(1)
    }

    pub fn node_ranks(&self) -> &[Vec<usize>] {
        &self.node_ranks
    }

    pub fn leaves(&self) -> &[Vec<u8>] {
        &self.leaves
    }

    pub fn params(&self) -> &[Vec<Vec<f64>>] {
        &self.params
    }

    pub fn node_params(&self, node: TreeIndex) -> Option<&[f64]> {
        if node.i < 2 || !self.tree.contains(node) {
            return None;
        }
        Some(&self.params[node.i - 2][self.tree.position(node)])
    }

    pub fn parameter_count(&self) -> usize {
        self.params.iter().flatten().map(Vec::len).sum()
    }

    fn prepare(&self, image: &BinaryImage) -> Result<BinaryImage> {
        if image.side() == self.side() {
            Ok(image.clone())
        } else if image.side() == self.input_side {
            image.padded(self.side())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.input_side,
                got: image.side(),
            })
        }
    }

    /// Every node's output vector, per layer in `(j, k)` order.
    pub fn forward(&self, image: &BinaryImage) -> Result<Vec<Vec<Vec<f64>>>> {
        let image = self.prepare(image)?;
        let tree = &self.tree;
        let leaf_outputs: Vec<Vec<f64>> = tree
            .layer(1)
            .iter()
            .zip(&self.leaves)
            .map(|(node, map)| {
                let bit = image.get(node.j, node.k);
                let emitted = if bit == 1 { BLACK } else { WHITE };
                map.iter().map(|&s| f64::from(u8::from(s == emitted))).collect()
            })
            .collect();
        let mut outputs = vec![leaf_outputs];
        for i in 2..=tree.layer_count() {
            let below = &outputs[i - 2];
            let out_width = self.channels[i - 1];
            let in_width = self.channels[i - 2];
            let layer: Vec<Vec<f64>> = tree
                .layer(i)
                .iter()
                .zip(&self.params[i - 2])
                .map(|(&node, p)| {
                    let [a, b] = tree.children(node).expect("non-leaf");
                    let u = &below[tree.position(a)];
                    let v = &below[tree.position(b)];
                    match self.form {
                        Form::Generalized => {
                            let block = in_width * in_width;
                            (0..out_width)
                                .map(|m| node_generalized(&p[m * block..(m + 1) * block], u, v))
                                .collect()
                        }
                        Form::Diagonal => {
                            // u ⊙ v is shared by every channel and mostly zero
                            let uv: Vec<(usize, f64)> = u
                                .iter()
                                .zip(v)
                                .map(|(x, y)| x * y)
                                .enumerate()
                                .filter(|&(_, w)| w != 0.0)
                                .collect();
                            (0..out_width)
                                .map(|m| {
                                    let weights = &p[m * in_width..(m + 1) * in_width];
                                    uv.iter().map(|&(c, w)| weights[c] * w).sum()
                                })
                                .collect()
                        }
                    }
                })
                .collect();
            outputs.push(layer);
        }
        Ok(outputs)
    }

    pub fn eval(&self, image: &BinaryImage) -> Result<f64> {
        let outputs = self.forward(image)?;
        Ok(outputs.last().expect("root layer")[0][0])
    }
}

pub fn ht_eval(net: &HtNetwork, image: &BinaryImage) -> Result<f64> {
    net.eval(image)
}

/// Orthonormal basis of a support's occupied function space: for each
/// occurring configuration, the values of the basis functions.
type Basis = HashMap<Vec<u8>, Vec<f64>>;

fn leaf_basis() -> Basis {
    HashMap::from([(vec![1u8], vec![1.0, 0.0]), (vec![0u8], vec![0.0, 1.0])])
}

/// Exact generalized-form network of `f`, padding with white pixels to the
/// next power of two when needed.
///
/// Each support `S` gets the left singular vectors of `F_S` as its basis;
/// its parameters are the coordinates of that basis in the product basis
/// of its children. The root uses `f` itself. Layer widths are the maximum
/// node rank, with unused channels zero.
pub fn ht_from_family(family: &ImageFamily, tol: f64) -> Result<HtNetwork> {
    let input_side = family.side();
    let n = input_side.next_power_of_two().max(2);
    let padded = if n == input_side {
        family.clone()
    } else {
        family.padded(n)?
    };
    let tree = tree_structure(n)?;
    let layers = tree.layer_count();
    let leaf_count = n * n;
    let mut channels = vec![2];
    let mut node_ranks = vec![vec![2; leaf_count]];
    let mut params = Vec::with_capacity(layers - 1);
    let mut bases: Vec<Basis> = vec![leaf_basis(); leaf_count];

    for i in 2..=layers {
        let nodes = tree.layer(i);
        let is_root = i == layers;
        let in_width = channels[i - 2];
        let mut next_bases = Vec::with_capacity(nodes.len());
        let mut ranks = Vec::with_capacity(nodes.len());
        for &node in &nodes {
            let support = tree.support(node).pixels(n);
            let basis: Basis = if is_root {
                padded.members().iter().map(|m| (m.bits().to_vec(), vec![1.0])).collect()
            } else {
                let complement: Vec<usize> = {
                    let inside: HashSet<usize> = support.iter().copied().collect();
                    (1..=n * n).filter(|k| !inside.contains(k)).collect()
                };
                let u = unfold(&padded, &Bipartition::new(n, support.clone(), complement)?, None)?;
                let fac = factorize(&u, tol)?;
                u.left_configs
                    .iter()
                    .enumerate()
                    .map(|(p, x)| {
                        let coords = fac
                            .left
                            .iter()
                            .zip(&fac.singular_values)
                            .map(|(l, s)| l[p] / s)
                            .collect();
                        (x.clone(), coords)
                    })
                    .collect()
            };
            ranks.push(if is_root {
                usize::from(!padded.is_empty())
            } else {
                basis.values().next().map_or(0, Vec::len)
            });
            next_bases.push(basis);
        }
        let out_width = if is_root {
            1
        } else {
            ranks.iter().copied().max().unwrap_or(0).max(1)
        };

        let layer_params = nodes
            .iter()
            .zip(&next_bases)
            .map(|(&node, basis)| {
                let [a, b] = tree.children(node).expect("non-leaf");
                let support = tree.support(node).pixels(n);
                let first = tree.support(a).pixels(n);
                let second = tree.support(b).pixels(n);
                // positions of each child's pixels within the parent's configuration
                let locate = |child: &[usize]| -> Vec<usize> {
                    child.iter().map(|k| support.binary_search(k).expect("nested support")).collect()
                };
                let (pos_first, pos_second) = (locate(&first), locate(&second));
                let basis_first = &bases[tree.position(a)];
                let basis_second = &bases[tree.position(b)];
                let block = in_width * in_width;
                let mut p = vec![0.0; out_width * block];
                let mut configs: Vec<&Vec<u8>> = basis.keys().collect();
                configs.sort_unstable();
                for x in configs {
                    let phi = &basis[x];
                    let x1: Vec<u8> = pos_first.iter().map(|&q| x[q]).collect();
                    let x2: Vec<u8> = pos_second.iter().map(|&q| x[q]).collect();
                    let (Some(u), Some(v)) = (basis_first.get(&x1), basis_second.get(&x2)) else {
                        unreachable!("child configurations occur whenever the parent's do");
                    };
                    for (m, &pm) in phi.iter().enumerate() {
                        for (ai, &va) in v.iter().enumerate() {
                            let w = pm * va;
                            if w == 0.0 {
                                continue;
                            }
                            for (bi, &ub) in u.iter().enumerate() {
                                p[m * block + ai * in_width + bi] += w * ub;
                            }
                        }
                    }
                }
                p
            })
            .collect();
        params.push(layer_params);
        channels.push(out_width);
        node_ranks.push(ranks);
        bases = next_bases;
    }

    Ok(HtNetwork {
        tree,
        input_side,
        form: Form::Generalized,
        channels,
        node_ranks,
        leaves: vec![vec![BLACK, WHITE]; leaf_count],
        params,
    })
}

/// Largest diagonal-form network [`diagonalize`] will materialize.
pub const DIAGONAL_PARAM_LIMIT: usize = 50_000_000;

/// Converts to diagonal form by squaring every non-root width.
///
/// Node matrices are flattened row-major. A first child's channels are
/// duplicated as a tiling of its old channels and a second child's by
/// repeating each old channel, so the flattened weights meet `u_b v_a` at
/// position `a l + b`.
pub fn diagonalize(net: &HtNetwork) -> Result<HtNetwork> {
    if net.form == Form::Diagonal {
        return Err(Error::InvalidParameter("network is already in diagonal form".into()));
    }
    let tree = &net.tree;
    let layers = tree.layer_count();
    let channels: Vec<usize> = net
        .channels
        .iter()
        .enumerate()
        .map(|(idx, &l)| if idx + 1 == layers { l } else { l * l })
        .collect();
    let size: u128 = (2..=layers)
        .map(|i| tree.layer_len(i) as u128 * channels[i - 1] as u128 * channels[i - 2] as u128)
        .sum();
    if size > DIAGONAL_PARAM_LIMIT as u128 {
        return Err(Error::InvalidParameter(format!(
            "diagonal form would hold {size} parameters, above the limit of {DIAGONAL_PARAM_LIMIT}"
        )));
    }

    let leaves = tree
        .layer(1)
        .iter()
        .zip(&net.leaves)
        .map(|(&node, map)| {
            let first = tree.is_first_child(node);
            (0..channels[0])
                .map(|c| map[source_channel(c, net.channels[0], first)])
                .collect()
        })
        .collect();

    let params = (2..=layers)
        .map(|i| {
            let old_out = net.channels[i - 1];
            let block = net.channels[i - 2] * net.channels[i - 2];
            tree.layer(i)
                .iter()
                .zip(&net.params[i - 2])
                .map(|(&node, p)| {
                    let first = i == layers || tree.is_first_child(node);
                    let width = if i == layers { 1 } else { old_out };
                    (0..channels[i - 1])
                        .flat_map(|c| {
                            let m = source_channel(c, width, first);
                            p[m * block..(m + 1) * block].iter().copied()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    Ok(HtNetwork {
        tree: tree.clone(),
        input_side: net.input_side,
        form: Form::Diagonal,
        channels,
        node_ranks: net.node_ranks.clone(),
        leaves,
        params,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerRow {
    pub layer: usize,
    pub channels: usize,
    pub min_node_rank: usize,
    pub max_node_rank: usize,
    /// `max_{j,k} rank F_{S_{i,j,k}}` by integer elimination.
    pub exact_max_rank: usize,
    pub support_height: usize,
    pub support_width: usize,
    /// `2 (height + width)`.
    pub boundary: usize,
}

/// Exact `max_{j,k} rank F_{S_{i,j,k}}` for every layer, independent of any
/// network.
pub fn layer_support_ranks(family: &ImageFamily) -> Result<Vec<usize>> {
    let n = family.side();
    let tree = tree_structure(n)?;
    (1..=tree.layer_count())
        .map(|i| {
            tree.layer(i)
                .iter()
                .map(|&node| {
                    let region = tree.support(node).to_region(n)?;
                    Ok(exact_rank(&unfold(family, &Bipartition::from_region(&region), None)?))
                })
                .try_fold(0, |acc, r: Result<usize>| Ok(acc.max(r?)))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Size {
    pub n: usize,
    pub padded_n: usize,
    pub members: usize,
    pub layers: Vec<LayerRow>,
    /// `log2 l_i` against `i`.
    pub fit: Option<Fit>,
    /// `l_i` equals the exact maximum support rank on every layer above the
    /// leaves (or is 1 where that rank is 0).
    pub channels_match_ranks: bool,
    pub structure: StructureReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Report {
    pub sizes: Vec<Theorem1Size>,
    pub scaling: ScalingReport,
}

pub fn theorem1_size(family: &ImageFamily, tol: f64) -> Result<Theorem1Size> {
    let net = ht_from_family(family, tol)?;
    let padded_n = net.side();
    let padded = if net.is_padded() {
        family.padded(padded_n)?
    } else {
        family.clone()
    };
    let exact = layer_support_ranks(&padded)?;
    let tree = net.tree();
    let layers: Vec<LayerRow> = (1..=tree.layer_count())
        .map(|i| {
            let ranks = &net.node_ranks()[i - 1];
            let (h, w) = tree.block(i);
            LayerRow {
                layer: i,
                channels: net.channels()[i - 1],
                min_node_rank: ranks.iter().copied().min().unwrap_or(0),
                max_node_rank: ranks.iter().copied().max().unwrap_or(0),
                exact_max_rank: exact[i - 1],
                support_height: h,
                support_width: w,
                boundary: 2 * (h + w),
            }
        })
        .collect();
    let channels_match_ranks = layers
        .iter()
        .all(|row| row.layer == 1 || row.channels == row.exact_max_rank.max(1));
    let points: Vec<(f64, f64)> = layers.iter().map(|r| (r.layer as f64, r.channels as f64)).collect();
    Ok(Theorem1Size {
        n: family.side(),
        padded_n,
        members: family.len(),
        fit: semilog_fit(&points),
        layers,
        channels_match_ranks,
        structure: tree.verify(),
    })
}

/// Per-layer channel table for each `n`, with `log2 l_i` fitted against `i`
/// and the layer maximum fitted against `n`.
pub fn verify_theorem1(generator: &Generator, ns: &[usize], tol: f64) -> Result<Theorem1Report> {
    check_sizes(ns)?;
    let sizes = ns
        .iter()
        .map(|&n| theorem1_size(&generator.generate(n)?, tol))
        .collect::<Result<Vec<_>>>()?;
    let series = sizes
        .iter()
        .map(|s| (s.n, s.layers.iter().map(|r| r.channels).max().unwrap_or(1)))
        .collect();
    let scaling = ScalingReport::from_series(
        generator.label(),
        Quantity::MaxLayerChannels,
        series,
        POLY_SLOPE_THRESHOLD,
    );
    Ok(Theorem1Report { sizes, scaling })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckReport {
    pub n: usize,
    pub members: usize,
    pub probes: usize,
    pub seed: u64,
    /// Largest `|tt − ht|` over members and probes.
    pub max_tt_ht: f64,
    /// Largest `|tt − f|` and `|ht − f|` over the same images.
    pub max_tt_f: f64,
    pub max_ht_f: f64,
    pub passed: bool,
}

fn max_deviation(tt: &TensorTrain, ht: &HtNetwork, family: &ImageFamily, images: &[BinaryImage]) -> Result<(f64, f64, f64)> {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for img in images {
        let (a, b, f) = (tt.eval(img)?, ht.eval(img)?, family.indicator(img));
        worst.0 = worst.0.max((a - b).abs());
        worst.1 = worst.1.max((a - f).abs());
        worst.2 = worst.2.max((b - f).abs());
    }
    Ok(worst)
}

/// Builds both networks and compares them on every member and `probes`
/// uniform random images.
pub fn tt_ht_cross_check(family: &ImageFamily, tol: f64, probes: usize, seed: u64) -> Result<CrossCheckReport> {
    let tt = tt_from_family(family, tol)?;
    let ht = ht_from_family(family, tol)?;
    let mut images = family.members().to_vec();
    images.extend(random_images(family.side(), probes, seed));
    let (max_tt_ht, max_tt_f, max_ht_f) = max_deviation(&tt, &ht, family, &images)?;
    Ok(CrossCheckReport {
        n: family.side(),
        members: family.len(),
        probes,
        seed,
        max_tt_ht,
        max_tt_f,
        max_ht_f,
        passed: max_tt_ht < crate::EVAL_TOL && max_tt_f < crate::EVAL_TOL && max_ht_f < crate::EVAL_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::images::{gen_rectangle_outlines, gen_vertical_bars, FamilyMeta};

    fn all_images(n: usize) -> Vec<BinaryImage> {
        let sites = n * n;
        (0u64..1 << sites)
            .map(|code| {
                let bits = (0..sites).map(|k| ((code >> (sites - 1 - k)) & 1) as u8).collect();
                BinaryImage::from_bits(n, bits).unwrap()
            })
            .collect()
    }

    #[test]
    fn exact_on_every_image_at_n2_and_n4_samples() {
        let f = ImageFamily::from_members(
            2,
            vec![BinaryImage::parse(2, "1001").unwrap(), BinaryImage::parse(2, "0111").unwrap()],
            FamilyMeta::new("pair", None),
        )
        .unwrap();
        let net = ht_from_family(&f, 1e-9).unwrap();
        for img in all_images(2) {
            assert!((net.eval(&img).unwrap() - f.indicator(&img)).abs() < 1e-9);
        }
        let g = gen_rectangle_outlines(4, 3).unwrap();
        let net = ht_from_family(&g, 1e-9).unwrap();
        for img in all_images(4).iter().step_by(7).chain(g.members()) {
            assert!((net.eval(img).unwrap() - g.indicator(img)).abs() < 1e-9);
        }
    }

    #[test]
    fn single_member_has_unit_channels() {
        let img = BinaryImage::parse(4, "1111100110011111").unwrap();
        let f = ImageFamily::from_members(4, vec![img.clone()], FamilyMeta::new("one", None)).unwrap();
        let net = ht_from_family(&f, 1e-9).unwrap();
        assert_eq!(net.channels(), &[2, 1, 1, 1, 1]);
        assert!((net.eval(&img).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_family_is_zero_network() {
        let f = ImageFamily::new(4, FamilyMeta::new("empty", None));
        let net = ht_from_family(&f, 1e-9).unwrap();
        assert_eq!(net.channels(), &[2, 1, 1, 1, 1]);
        assert!(net.params().iter().flatten().flatten().all(|&x| x == 0.0));
        assert_eq!(net.eval(&BinaryImage::blank(4)).unwrap(), 0.0);
    }

    #[test]
    fn channels_equal_exact_support_ranks() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        let row = theorem1_size(&f, 1e-9).unwrap();
        assert!(row.channels_match_ranks);
        assert!(row.structure.all_hold());
    }

    #[test]
    fn pads_odd_sides() {
        let f = gen_vertical_bars(3, 2).unwrap();
        let net = ht_from_family(&f, 1e-9).unwrap();
        assert_eq!((net.side(), net.input_side()), (4, 3));
        for img in all_images(3) {
            assert!((net.eval(&img).unwrap() - f.indicator(&img)).abs() < 1e-9);
        }
        assert!(net.eval(&BinaryImage::blank(5)).is_err());
    }

    #[test]
    fn two_channel_node_algebra() {
        let (u, v) = ([2.0, 3.0], [5.0, 7.0]);
        let m = [11.0, 13.0, 17.0, 19.0];
        let expected = 11.0 * 5.0 * 2.0 + 13.0 * 5.0 * 3.0 + 17.0 * 7.0 * 2.0 + 19.0 * 7.0 * 3.0;
        assert_eq!(node_generalized(&m, &u, &v), expected);
        assert_eq!(tile(&u, 2), vec![2.0, 3.0, 2.0, 3.0]);
        assert_eq!(repeat(&v, 2), vec![5.0, 5.0, 7.0, 7.0]);
        assert_eq!(node_diagonal(&m, &tile(&u, 2), &repeat(&v, 2)), expected);
    }

    #[test]
    fn diagonal_matrix_matches_vector_form() {
        let weights = [0.5, -1.25, 2.0];
        let mut m = vec![0.0; 9];
        for c in 0..3 {
            m[c * 3 + c] = weights[c];
        }
        let (u, v) = ([0.3, -0.7, 1.1], [2.0, 0.25, -0.5]);
        assert!((node_generalized(&m, &u, &v) - node_diagonal(&weights, &u, &v)).abs() < 1e-15);
    }

    #[test]
    fn diagonalization_squares_and_preserves() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        let net = ht_from_family(&f, 1e-9).unwrap();
        let diag = diagonalize(&net).unwrap();
        let layers = net.channels().len();
        for (idx, (&l, &d)) in net.channels().iter().zip(diag.channels()).enumerate() {
            assert_eq!(d, if idx + 1 == layers { l } else { l * l });
        }
        for img in random_images(4, 200, 3).iter().chain(f.members()) {
            assert!((net.eval(img).unwrap() - diag.eval(img).unwrap()).abs() < 1e-9);
        }
        assert!(diagonalize(&diag).is_err());
    }

    #[test]
    fn cross_check_agrees() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        let r = tt_ht_cross_check(&f, 1e-9, 500, 1).unwrap();
        assert!(r.passed, "{r:?}");
        let empty = ImageFamily::new(4, FamilyMeta::new("empty", None));
        let r = tt_ht_cross_check(&empty, 1e-9, 50, 1).unwrap();
        assert_eq!((r.max_tt_ht, r.max_tt_f), (0.0, 0.0));
    }

    #[test]
    fn from_parts_validates() {
        let ok = HtNetwork::from_parts(
            2,
            Form::Generalized,
            vec![2, 1, 1],
            vec![vec![BLACK, WHITE]; 4],
            vec![vec![vec![0.0; 4]; 2], vec![vec![0.0; 1]]],
        );
        assert!(ok.is_ok());
        let bad = HtNetwork::from_parts(
            2,
            Form::Generalized,
            vec![2, 1, 1],
            vec![vec![BLACK, WHITE]; 4],
            vec![vec![vec![0.0; 3]; 2], vec![vec![0.0; 1]]],
        );
        assert!(bad.is_err());
    }
}
