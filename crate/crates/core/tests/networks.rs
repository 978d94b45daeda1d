mod common;

use imgtn::ht::{diagonalize, ht_from_family};
use imgtn::images::{gen_rectangle_outlines, BinaryImage, FamilyMeta, ImageFamily};
use imgtn::tt::tt_from_family;
use proptest::prelude::*;

fn all_images(n: usize) -> Vec<BinaryImage> {
    (0u32..1 << (n * n))
        .map(|mask| BinaryImage::from_bits(n, (0..n * n).map(|p| ((mask >> p) & 1) as u8).collect()).unwrap())
        .collect()
}

fn family(n: usize, masks: &[u32]) -> ImageFamily {
    let distinct: std::collections::BTreeSet<u32> = masks.iter().copied().collect();
    let members = distinct
        .iter()
        .map(|m| BinaryImage::from_bits(n, (0..n * n).map(|p| ((m >> p) & 1) as u8).collect()).unwrap())
        .collect();
    ImageFamily::from_members(n, members, FamilyMeta::new("prop", None)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trains_are_exact_and_minimal(masks in prop::collection::vec(0u32..512, 1..40)) {
        let f = family(3, &masks);
        let tt = tt_from_family(&f, 1e-9).unwrap();
        for img in all_images(3) {
            prop_assert!((tt.eval(&img).unwrap() - f.indicator(&img)).abs() < 1e-9);
        }
        let bonds = tt.bond_dims();
        for k in 1..9 {
            prop_assert_eq!(bonds[k], common::prefix_rank(&f, k));
        }
    }

    #[test]
    fn padded_networks_are_exact(masks in prop::collection::vec(0u32..512, 1..40)) {
        let f = family(3, &masks);
        let net = ht_from_family(&f, 1e-9).unwrap();
        let diag = diagonalize(&net).unwrap();
        for img in all_images(3) {
            let want = f.indicator(&img);
            prop_assert!((net.eval(&img).unwrap() - want).abs() < 1e-9);
            prop_assert!((diag.eval(&img).unwrap() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn layer_widths_are_block_ranks(masks in prop::collection::vec(0u32..65536, 1..60)) {
        let f = family(4, &masks);
        let net = ht_from_family(&f, 1e-9).unwrap();
        let tree = net.tree();
        // leaves always emit the two-element pixel basis
        prop_assert_eq!(net.channels()[0], 2);
        for i in 2..=tree.layer_count() {
            let widest = tree
                .layer(i)
                .into_iter()
                .map(|node| {
                    let s = tree.support(node);
                    common::block_rank(&f, s.top - 1, s.left - 1, s.height, s.width)
                })
                .max()
                .unwrap();
            prop_assert_eq!(net.channels()[i - 1], widest);
        }
    }
}

#[test]
fn rounding_keeps_every_member_at_n8() {
    // wide unfoldings here once broke a QR-based sweep
    let f = gen_rectangle_outlines(8, 3).unwrap();
    let tt = tt_from_family(&f, 1e-9).unwrap();
    for m in f.members() {
        assert!((tt.eval(m).unwrap() - 1.0).abs() < 1e-9);
    }
    assert_eq!(tt.max_bond(), 44);
}
