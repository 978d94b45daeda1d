//! Exact low-rank tensor-network representations of indicator functions on
//! binary images.
//!
//! An image family (the set of `n x n` images carrying a label) defines a 0/1
//! function `f`. This crate builds the unfoldings of `f` across pixel
//! bipartitions, computes their ranks exactly, and constructs two exact
//! representations whose sizes are governed by those ranks:
//!
//! * a tensor train over the row-major pixel order ([`tt`]),
//! * a binary-tree product-pooling network, equivalently a hierarchical
//!   Tucker tensor ([`ht`]), in both its generalized and diagonal forms.
//!
//! [`certify`] measures the structural quantities (row-configuration counts,
//! fixed-row ranks, region ranks) and fits scaling exponents.

pub mod certify;
pub mod error;
pub mod ht;
pub mod images;
pub mod rankcore;
pub mod report;
pub mod tt;

pub use error::{Error, Result};
pub use images::{BinaryImage, FamilyMeta, Generator, ImageFamily, Region, RegionKind};
pub use rankcore::{
    exact_rank, factorize, unfold, Bipartition, FixedRowConstraint, RankFactorization, Unfolding,
};

/// Default relative singular-value cutoff.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Absolute tolerance for "exact" evaluation of floating-point networks.
pub const EVAL_TOL: f64 = 1e-6;
