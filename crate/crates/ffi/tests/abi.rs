use std::ffi::{CStr, CString};
use std::ptr;

use imgtn_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(imgtn_last_error()) }.to_string_lossy().into_owned()
}

fn generate(name: &str, n: usize, param: usize) -> *mut ImgtnFamily {
    let name = CString::new(name).unwrap();
    let mut fam = ptr::null_mut();
    let status = unsafe { imgtn_family_generate(name.as_ptr(), n, param, 7, &mut fam) };
    assert_eq!(status, ImgtnStatus::Ok, "{}", last_error());
    fam
}

/// Row-major bits of the outline of the whole `n x n` grid.
fn border(n: usize) -> Vec<u8> {
    (0..n * n)
        .map(|p| {
            let (r, c) = (p / n, p % n);
            u8::from(r == 0 || c == 0 || r == n - 1 || c == n - 1)
        })
        .collect()
}

#[test]
fn family_queries() {
    let fam = generate("rect", 4, 3);
    let mut len = 0;
    let mut side = 0;
    unsafe {
        assert_eq!(imgtn_family_len(fam, &mut len), ImgtnStatus::Ok);
        assert_eq!(imgtn_family_side(fam, &mut side), ImgtnStatus::Ok);
    }
    // (4-3+1)(4-3+1) positions for each of the four side pairs (3,3) (3,4) (4,3) (4,4)
    assert_eq!((len, side), (9, 4));

    let mut inside = false;
    let bits = border(4);
    unsafe {
        assert_eq!(imgtn_family_contains(fam, bits.as_ptr(), bits.len(), &mut inside), ImgtnStatus::Ok);
    }
    assert!(inside);
    let blank = [0u8; 16];
    unsafe {
        imgtn_family_contains(fam, blank.as_ptr(), blank.len(), &mut inside);
    }
    assert!(!inside);

    let mut rank = 0;
    unsafe {
        assert_eq!(imgtn_family_prefix_rank(fam, 4, &mut rank), ImgtnStatus::Ok);
    }
    // first row of a member is blank, the whole border, or a left/right part: 4 configs
    assert!((1..=4).contains(&rank));
    unsafe { imgtn_family_free(fam) };
}

#[test]
fn tensor_train_round_trip() {
    let fam = generate("bars", 3, 2);
    let mut tt = ptr::null_mut();
    unsafe {
        assert_eq!(imgtn_tt_build(fam, 1e-9, &mut tt), ImgtnStatus::Ok);
    }

    let mut len = 0;
    let status = unsafe { imgtn_tt_bonds(tt, ptr::null_mut(), 0, &mut len) };
    assert_eq!(status, ImgtnStatus::BufferTooSmall);
    assert_eq!(len, 10);
    let mut bonds = vec![0usize; len];
    unsafe {
        assert_eq!(imgtn_tt_bonds(tt, bonds.as_mut_ptr(), len, &mut len), ImgtnStatus::Ok);
    }
    assert_eq!((bonds[0], bonds[9]), (1, 1));

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("bars.tt").to_str().unwrap()).unwrap();
    let mut back = ptr::null_mut();
    unsafe {
        assert_eq!(imgtn_tt_save(tt, path.as_ptr()), ImgtnStatus::Ok);
        assert_eq!(imgtn_tt_load(path.as_ptr(), &mut back), ImgtnStatus::Ok);
    }

    // every 3x3 image: value is 1 exactly on members
    for mask in 0u32..512 {
        let bits: Vec<u8> = (0..9).map(|p| ((mask >> p) & 1) as u8).collect();
        let (mut a, mut b, mut member) = (0.0, 0.0, false);
        unsafe {
            imgtn_tt_eval(tt, bits.as_ptr(), 9, &mut a);
            imgtn_tt_eval(back, bits.as_ptr(), 9, &mut b);
            imgtn_family_contains(fam, bits.as_ptr(), 9, &mut member);
        }
        assert!((a - f64::from(u8::from(member))).abs() < 1e-9);
        assert_eq!(a, b);
    }
    unsafe {
        imgtn_tt_free(tt);
        imgtn_tt_free(back);
        imgtn_family_free(fam);
    }
}

#[test]
fn ht_and_diagonal_form() {
    let fam = generate("rect", 4, 3);
    let mut net = ptr::null_mut();
    let mut diag = ptr::null_mut();
    unsafe {
        assert_eq!(imgtn_ht_build(fam, 1e-9, &mut net), ImgtnStatus::Ok);
        assert_eq!(imgtn_ht_diagonalize(net, &mut diag), ImgtnStatus::Ok);
    }
    let mut flags = (true, false);
    unsafe {
        imgtn_ht_is_diagonal(net, &mut flags.0);
        imgtn_ht_is_diagonal(diag, &mut flags.1);
    }
    assert_eq!(flags, (false, true));

    let (mut a, mut b) = ([0usize; 8], [0usize; 8]);
    let (mut la, mut lb) = (0, 0);
    unsafe {
        assert_eq!(imgtn_ht_channels(net, a.as_mut_ptr(), 8, &mut la), ImgtnStatus::Ok);
        assert_eq!(imgtn_ht_channels(diag, b.as_mut_ptr(), 8, &mut lb), ImgtnStatus::Ok);
    }
    assert_eq!((la, lb), (5, 5));
    for i in 0..4 {
        assert_eq!(b[i], a[i] * a[i]);
    }
    assert_eq!((a[4], b[4]), (1, 1));

    let bits = border(4);
    let (mut x, mut y) = (0.0, 0.0);
    unsafe {
        imgtn_ht_eval(net, bits.as_ptr(), 16, &mut x);
        imgtn_ht_eval(diag, bits.as_ptr(), 16, &mut y);
    }
    assert!((x - 1.0).abs() < 1e-9 && (y - 1.0).abs() < 1e-9);

    // diagonalizing twice is refused
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { imgtn_ht_diagonalize(diag, &mut again) }, ImgtnStatus::InvalidArgument);
    assert!(again.is_null());
    unsafe {
        imgtn_ht_free(net);
        imgtn_ht_free(diag);
        imgtn_family_free(fam);
    }
}

#[test]
fn padded_network_takes_original_side() {
    let fam = generate("bars", 3, 2);
    let mut net = ptr::null_mut();
    unsafe { imgtn_ht_build(fam, 1e-9, &mut net) };
    let bits = [0u8, 1, 0, 0, 1, 0, 0, 0, 0];
    let mut v = 0.0;
    assert_eq!(unsafe { imgtn_ht_eval(net, bits.as_ptr(), 9, &mut v) }, ImgtnStatus::Ok);
    assert!((v - 1.0).abs() < 1e-9);
    assert_eq!(
        unsafe { imgtn_ht_eval(net, [0u8; 16].as_ptr(), 16, &mut v) },
        ImgtnStatus::DimensionMismatch
    );
    unsafe {
        imgtn_ht_free(net);
        imgtn_family_free(fam);
    }
}

#[test]
fn errors_are_reported() {
    let mut fam = ptr::null_mut();
    let name = CString::new("circles").unwrap();
    assert_eq!(
        unsafe { imgtn_family_generate(name.as_ptr(), 4, 3, 0, &mut fam) },
        ImgtnStatus::InvalidArgument
    );
    assert!(last_error().contains("circles"));
    assert!(fam.is_null());

    let mut len = 0;
    assert_eq!(unsafe { imgtn_family_len(ptr::null(), &mut len) }, ImgtnStatus::NullPointer);

    let missing = CString::new("/nonexistent/family.txt").unwrap();
    assert_eq!(unsafe { imgtn_family_load(missing.as_ptr(), &mut fam) }, ImgtnStatus::Io);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "not a family\n").unwrap();
    let bad = CString::new(bad.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { imgtn_family_load(bad.as_ptr(), &mut fam) }, ImgtnStatus::Parse);

    let ok = generate("rect", 4, 3);
    let bits = [2u8; 16];
    let mut inside = false;
    assert_eq!(
        unsafe { imgtn_family_contains(ok, bits.as_ptr(), 16, &mut inside) },
        ImgtnStatus::InvalidArgument
    );
    unsafe {
        imgtn_family_len(ok, &mut len);
        imgtn_family_free(ok);
        imgtn_family_free(ptr::null_mut());
    }
    assert_eq!(last_error(), "");
}

#[test]
fn family_file_round_trip() {
    let fam = generate("random", 4, 20);
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("r.txt").to_str().unwrap()).unwrap();
    let mut back = ptr::null_mut();
    unsafe {
        assert_eq!(imgtn_family_save(fam, path.as_ptr()), ImgtnStatus::Ok);
        assert_eq!(imgtn_family_load(path.as_ptr(), &mut back), ImgtnStatus::Ok);
    }
    let (mut a, mut b) = (0, 0);
    unsafe {
        imgtn_family_len(fam, &mut a);
        imgtn_family_len(back, &mut b);
        imgtn_family_free(fam);
        imgtn_family_free(back);
    }
    assert_eq!((a, b), (20, 20));
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(imgtn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
