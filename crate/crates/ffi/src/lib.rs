//! C ABI for `imgtn`.
//!
//! Families and networks are opaque heap handles released with the matching
//! `*_free`. Every fallible call returns an [`ImgtnStatus`]; on failure the
//! message is available from [`imgtn_last_error`] on the same thread.
//!
//! Images cross the boundary as `n * n` bytes in row-major order, `1` for a
//! black pixel and `0` for white.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use imgtn::error::Error;
use imgtn::ht::{diagonalize, ht_from_family, load_ht, save_ht, Form, HtNetwork};
use imgtn::images::{load_family, save_family, BinaryImage, Generator, ImageFamily, OutlineParams};
use imgtn::rankcore::{exact_rank, unfold, Bipartition};
use imgtn::tt::{load_tt, save_tt, tt_from_family, TensorTrain};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImgtnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    DimensionMismatch = 5,
    /// SVD failure or a numerical rank that disagrees with the exact one.
    Numerical = 6,
    /// The caller's buffer is too short; the required length was written.
    BufferTooSmall = 7,
    Panic = 8,
}

/// An image family.
pub struct ImgtnFamily(ImageFamily);

/// A tensor train.
pub struct ImgtnTensorTrain(TensorTrain);

/// A hierarchical Tucker network, generalized or diagonal.
pub struct ImgtnHtNetwork(HtNetwork);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> ImgtnStatus {
    match e {
        Error::Parse { .. } => ImgtnStatus::Parse,
        Error::Io(_) => ImgtnStatus::Io,
        Error::DimensionMismatch { .. } => ImgtnStatus::DimensionMismatch,
        Error::SvdFailed { .. } | Error::RankMismatch { .. } => ImgtnStatus::Numerical,
        _ => ImgtnStatus::InvalidArgument,
    }
}

struct Fail(ImgtnStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ImgtnStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> ImgtnStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            ImgtnStatus::Ok
        }
        Ok(Err(Fail(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ImgtnStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Fail(ImgtnStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn image(bits: *const u8, len: usize, side: usize) -> Result<BinaryImage, Fail> {
    if bits.is_null() {
        return Err(null("bits"));
    }
    if len != side * side {
        return Err(Fail(
            ImgtnStatus::DimensionMismatch,
            format!("expected {} pixels, got {len}", side * side),
        ));
    }
    Ok(BinaryImage::from_bits(side, std::slice::from_raw_parts(bits, len).to_vec())?)
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

/// Writes `values` into `buf[..cap]` and the full length into `len`.
unsafe fn put_slice(values: &[usize], buf: *mut usize, cap: usize, len: *mut usize) -> Result<(), Fail> {
    put(len, values.len())?;
    if cap < values.len() {
        return Err(Fail(
            ImgtnStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", values.len()),
        ));
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn imgtn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn imgtn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Generates a family. `name` is `rect`, `bars`, `stacked` or `random`;
/// `param` is the minimum side, minimum bar length or member count
/// respectively. `seed` is used by `random` only.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn imgtn_family_generate(
    name: *const c_char,
    n: usize,
    param: usize,
    seed: u64,
    out: *mut *mut ImgtnFamily,
) -> ImgtnStatus {
    guard(|| {
        let generator = match text(name, "name")? {
            "rect" => Generator::Rect(OutlineParams {
                min_side: param,
                linewidth: 1,
            }),
            "bars" => Generator::Bars { min_len: param },
            "stacked" => Generator::Stacked { min_side: param },
            "random" => Generator::Random { m: param, seed },
            other => {
                return Err(Fail(ImgtnStatus::InvalidArgument, format!("unknown family {other:?}")));
            }
        };
        let family = generator.generate(n)?;
        put(out, boxed(ImgtnFamily(family)))
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn imgtn_family_load(path: *const c_char, out: *mut *mut ImgtnFamily) -> ImgtnStatus {
    guard(|| {
        let family = load_family(PathBuf::from(text(path, "path")?))?;
        put(out, boxed(ImgtnFamily(family)))
    })
}

/// # Safety
/// `family` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn imgtn_family_save(family: *const ImgtnFamily, path: *const c_char) -> ImgtnStatus {
    guard(|| Ok(save_family(&borrow(family, "family")?.0, text(path, "path")?)?))
}

/// # Safety
/// `family` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn imgtn_family_free(family: *mut ImgtnFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// # Safety
/// `family` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_family_len(family: *const ImgtnFamily, out: *mut usize) -> ImgtnStatus {
    guard(|| put(out, borrow(family, "family")?.0.len()))
}

/// # Safety
/// `family` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_family_side(family: *const ImgtnFamily, out: *mut usize) -> ImgtnStatus {
    guard(|| put(out, borrow(family, "family")?.0.side()))
}

/// # Safety
/// `bits` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_family_contains(
    family: *const ImgtnFamily,
    bits: *const u8,
    len: usize,
    out: *mut bool,
) -> ImgtnStatus {
    guard(|| {
        let f = &borrow(family, "family")?.0;
        let img = image(bits, len, f.side())?;
        put(out, f.contains(&img))
    })
}

/// Exact rank of the unfolding that splits pixels `1..=k` from the rest.
///
/// # Safety
/// `family` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_family_prefix_rank(
    family: *const ImgtnFamily,
    k: usize,
    out: *mut usize,
) -> ImgtnStatus {
    guard(|| {
        let f = &borrow(family, "family")?.0;
        let cut = Bipartition::pixel_prefix(f.side(), k)?;
        put(out, exact_rank(&unfold(f, &cut, None)?))
    })
}

/// # Safety
/// `family` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_tt_build(
    family: *const ImgtnFamily,
    tol: f64,
    out: *mut *mut ImgtnTensorTrain,
) -> ImgtnStatus {
    guard(|| {
        let tt = tt_from_family(&borrow(family, "family")?.0, tol)?;
        put(out, boxed(ImgtnTensorTrain(tt)))
    })
}

/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_tt_load(path: *const c_char, out: *mut *mut ImgtnTensorTrain) -> ImgtnStatus {
    guard(|| {
        let tt = load_tt(&PathBuf::from(text(path, "path")?))?;
        put(out, boxed(ImgtnTensorTrain(tt)))
    })
}

/// # Safety
/// `tt` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn imgtn_tt_save(tt: *const ImgtnTensorTrain, path: *const c_char) -> ImgtnStatus {
    guard(|| Ok(save_tt(&borrow(tt, "tt")?.0, &PathBuf::from(text(path, "path")?))?))
}

/// # Safety
/// `bits` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_tt_eval(
    tt: *const ImgtnTensorTrain,
    bits: *const u8,
    len: usize,
    out: *mut f64,
) -> ImgtnStatus {
    guard(|| {
        let t = &borrow(tt, "tt")?.0;
        put(out, t.eval(&image(bits, len, t.side())?)?)
    })
}

/// Bond dimensions `l_0 ..= l_{n²}`. Call with `cap = 0` to learn the length.
///
/// # Safety
/// `buf` must hold `cap` values; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_tt_bonds(
    tt: *const ImgtnTensorTrain,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> ImgtnStatus {
    guard(|| put_slice(&borrow(tt, "tt")?.0.bond_dims(), buf, cap, len))
}

/// # Safety
/// `tt` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn imgtn_tt_free(tt: *mut ImgtnTensorTrain) {
    if !tt.is_null() {
        drop(Box::from_raw(tt));
    }
}

/// Builds the generalized network; a side that is not a power of two is
/// padded with white pixels.
///
/// # Safety
/// `family` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_ht_build(
    family: *const ImgtnFamily,
    tol: f64,
    out: *mut *mut ImgtnHtNetwork,
) -> ImgtnStatus {
    guard(|| {
        let net = ht_from_family(&borrow(family, "family")?.0, tol)?;
        put(out, boxed(ImgtnHtNetwork(net)))
    })
}

/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_ht_load(path: *const c_char, out: *mut *mut ImgtnHtNetwork) -> ImgtnStatus {
    guard(|| {
        let net = load_ht(&PathBuf::from(text(path, "path")?))?;
        put(out, boxed(ImgtnHtNetwork(net)))
    })
}

/// # Safety
/// `net` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn imgtn_ht_save(net: *const ImgtnHtNetwork, path: *const c_char) -> ImgtnStatus {
    guard(|| Ok(save_ht(&borrow(net, "net")?.0, &PathBuf::from(text(path, "path")?))?))
}

/// Evaluates on an image of the family's original side.
///
/// # Safety
/// `bits` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_ht_eval(
    net: *const ImgtnHtNetwork,
    bits: *const u8,
    len: usize,
    out: *mut f64,
) -> ImgtnStatus {
    guard(|| {
        let n = &borrow(net, "net")?.0;
        put(out, n.eval(&image(bits, len, n.input_side())?)?)
    })
}

/// Converts a generalized network to a new diagonal one; the input is kept.
///
/// # Safety
/// `net` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_ht_diagonalize(
    net: *const ImgtnHtNetwork,
    out: *mut *mut ImgtnHtNetwork,
) -> ImgtnStatus {
    guard(|| {
        let diag = diagonalize(&borrow(net, "net")?.0)?;
        put(out, boxed(ImgtnHtNetwork(diag)))
    })
}

/// Writes `true` for diagonal form.
///
/// # Safety
/// `net` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_ht_is_diagonal(net: *const ImgtnHtNetwork, out: *mut bool) -> ImgtnStatus {
    guard(|| put(out, borrow(net, "net")?.0.form() == Form::Diagonal))
}

/// Channel count per layer, leaves first. Call with `cap = 0` to learn the length.
///
/// # Safety
/// `buf` must hold `cap` values; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn imgtn_ht_channels(
    net: *const ImgtnHtNetwork,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> ImgtnStatus {
    guard(|| put_slice(borrow(net, "net")?.0.channels(), buf, cap, len))
}

/// # Safety
/// `net` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn imgtn_ht_free(net: *mut ImgtnHtNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}
