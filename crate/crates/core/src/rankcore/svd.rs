//! Thin SVD with a reconstruction check.
//!
//! Both faer and nalgebra were seen to return factors off by ~4e-6 on
//! rank-deficient matrices with large clusters of equal singular values,
//! each on inputs the other handled. Attempts run in a fixed order and the
//! first one that reproduces the input is kept.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

impl Svd {
    fn transposed(self) -> Self {
        Self {
            u: self.v_t.transpose(),
            singular_values: self.singular_values,
            v_t: self.u.transpose(),
        }
    }

    fn sorted(self) -> Self {
        let s = &self.singular_values;
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
        Self {
            u: self.u.select_columns(&order),
            singular_values: DVector::from_fn(s.len(), |i, _| s[order[i]]),
            v_t: self.v_t.select_rows(&order),
        }
    }
}

fn residual(m: &DMatrix<f64>, s: &Svd) -> f64 {
    let mut scaled = s.u.clone();
    for (mut col, &sigma) in scaled.column_iter_mut().zip(s.singular_values.iter()) {
        col *= sigma;
    }
    (scaled * &s.v_t - m).abs().max()
}

fn with_faer(m: &DMatrix<f64>) -> Option<Svd> {
    let (rows, cols) = m.shape();
    let a = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = a.thin_svd().ok()?;
    let r = rows.min(cols);
    let (u, v, s) = (svd.U(), svd.V(), svd.S().column_vector());
    Some(Svd {
        u: DMatrix::from_fn(rows, r, |i, j| u[(i, j)]),
        singular_values: DVector::from_fn(r, |i, _| s[i]),
        v_t: DMatrix::from_fn(r, cols, |i, j| v[(j, i)]),
    })
}

fn with_nalgebra(m: &DMatrix<f64>, eps: f64) -> Option<Svd> {
    let svd = nalgebra::linalg::SVD::try_new(m.clone(), true, true, eps, 0)?;
    Some(Svd {
        u: svd.u?,
        singular_values: svd.singular_values,
        v_t: svd.v_t?,
    })
}

/// Thin SVD with singular values in nonincreasing order. Fails if no attempt
/// reproduces every entry of `m` to within `1e-10 σ_max`.
pub fn checked_svd(m: &DMatrix<f64>) -> Result<Svd> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::SvdFailed { rows, cols });
    }
    let t = m.transpose();
    let attempts: [&dyn Fn() -> Option<Svd>; 6] = [
        &|| with_faer(m),
        &|| with_nalgebra(m, f64::EPSILON),
        &|| with_nalgebra(&t, f64::EPSILON).map(Svd::transposed),
        &|| with_nalgebra(m, 1e-14),
        &|| with_nalgebra(&t, 1e-14).map(Svd::transposed),
        &|| with_faer(&t).map(Svd::transposed),
    ];
    for attempt in attempts {
        let Some(svd) = attempt() else { continue };
        let limit = 1e-10 * svd.singular_values.max();
        if residual(m, &svd) <= limit {
            return Ok(svd.sorted());
        }
    }
    Err(Error::SvdFailed { rows, cols })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_rank_deficient_input() {
        let m = DMatrix::from_fn(7, 11, |i, j| ((i * 3 + j) % 4 == 0) as u8 as f64);
        let s = checked_svd(&m).unwrap();
        assert!(residual(&m, &s) < 1e-12);
        assert_eq!(s.u.shape(), (7, 7));
        assert_eq!(s.v_t.shape(), (7, 11));
        assert!(s.singular_values.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn zero_matrix_is_fine() {
        let s = checked_svd(&DMatrix::zeros(3, 5)).unwrap();
        assert!(s.singular_values.iter().all(|&x| x == 0.0));
        assert!(checked_svd(&DMatrix::zeros(0, 5)).is_err());
    }
}
