//! Dense TT-SVD, kept as a reference route for small images.

use nalgebra::DMatrix;

use super::TensorTrain;
use crate::error::{Error, Result};
use crate::images::ImageFamily;
use crate::rankcore::checked_svd;

/// Largest image (in pixels) the dense route will materialize.
pub const DENSE_PIXEL_LIMIT: usize = 16;

/// All `2^{n²}` values of `f`, indexed with pixel 1 as the most significant bit.
pub fn dense_values(family: &ImageFamily) -> Result<Vec<f64>> {
    let sites = family.side() * family.side();
    if sites > DENSE_PIXEL_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "dense tensor of 2^{sites} entries exceeds 2^{DENSE_PIXEL_LIMIT}"
        )));
    }
    let mut values = vec![0.0; 1 << sites];
    for m in family.members() {
        let idx = m.bits().iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        values[idx] = 1.0;
    }
    Ok(values)
}

/// Sequential truncated SVDs of the full tensor.
pub fn tt_svd(n: usize, values: &[f64], tol: f64) -> Result<TensorTrain> {
    let sites = n * n;
    if values.len() != 1 << sites {
        return Err(Error::DimensionMismatch {
            expected: 1 << sites,
            got: values.len(),
        });
    }
    let mut cores = Vec::with_capacity(sites);
    // rows = (bond, bit) with bit fastest, cols = remaining pixels
    let mut cols = 1usize << (sites - 1);
    let mut work = DMatrix::from_row_slice(2, cols, values);
    let mut bond = 1;
    for _ in 0..sites - 1 {
        let svd = checked_svd(&work)?;
        let (u, v_t) = (&svd.u, &svd.v_t);
        let sigma = &svd.singular_values;
        let sigma_max = sigma.max();
        let mut keep: Vec<usize> = (0..sigma.len()).filter(|&t| sigma[t] > tol * sigma_max).collect();
        if keep.is_empty() {
            keep.push(0);
        }
        let r = keep.len();
        let mut pair = [DMatrix::zeros(bond, r), DMatrix::zeros(bond, r)];
        for (q, &t) in keep.iter().enumerate() {
            for p in 0..bond {
                pair[0][(p, q)] = u[(2 * p, t)];
                pair[1][(p, q)] = u[(2 * p + 1, t)];
            }
        }
        cores.push(pair);
        // remainder S Vᵀ is r x cols; reshape to (2r) x (cols / 2)
        let half = cols / 2;
        let mut next = DMatrix::zeros(2 * r, half);
        for (q, &t) in keep.iter().enumerate() {
            for c in 0..cols {
                let (bit, rest) = (c / half, c % half);
                next[(2 * q + bit, rest)] = sigma[t] * v_t[(t, c)];
            }
        }
        bond = r;
        cols = half;
        work = next;
    }
    let mut last = [DMatrix::zeros(bond, 1), DMatrix::zeros(bond, 1)];
    for p in 0..bond {
        last[0][(p, 0)] = work[(2 * p, 0)];
        last[1][(p, 0)] = work[(2 * p + 1, 0)];
    }
    cores.push(last);
    TensorTrain::new(n, cores)
}
