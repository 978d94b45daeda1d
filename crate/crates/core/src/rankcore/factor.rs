use nalgebra::DMatrix;
use serde::Serialize;

use super::{exact_rank, Unfolding};
use crate::error::{Error, Result};

/// `B = Σ_t left_t ⊗ right_t` with `r` terms, where `r` is the exact rank.
///
/// `left_t = σ_t u_t` and `right_t = v_t` for the singular triplets of `B`.
/// Terms are ordered by descending singular value, then by the position of
/// the first nonzero left coordinate; each left factor's first nonzero
/// coordinate is positive.
#[derive(Clone, Debug, Serialize)]
pub struct RankFactorization {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub left: Vec<Vec<f64>>,
    pub right: Vec<Vec<f64>>,
}

impl RankFactorization {
    pub fn reconstruct(&self, rows: usize, cols: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(rows, cols);
        for (l, r) in self.left.iter().zip(&self.right) {
            for (p, &lp) in l.iter().enumerate() {
                for (q, &rq) in r.iter().enumerate() {
                    m[(p, q)] += lp * rq;
                }
            }
        }
        m
    }

    /// Max-entry deviation between the factorization and `B`.
    pub fn max_error(&self, unfolding: &Unfolding) -> f64 {
        let target = unfolding.to_dense();
        let approx = self.reconstruct(unfolding.rows(), unfolding.cols());
        (target - approx).abs().max()
    }
}

const ZERO_CUT: f64 = 1e-12;

fn first_nonzero(v: &[f64]) -> usize {
    v.iter().position(|x| x.abs() > ZERO_CUT).unwrap_or(v.len())
}

/// Truncated SVD of the biadjacency, keeping singular values above
/// `tol * σ_max`. Fails if the kept count differs from the exact rank.
pub fn factorize(unfolding: &Unfolding, tol: f64) -> Result<RankFactorization> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} outside (0, 1)")));
    }
    let exact = exact_rank(unfolding);
    if exact == 0 {
        return Ok(RankFactorization {
            rank: 0,
            singular_values: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
        });
    }
    let (rows, cols) = (unfolding.rows(), unfolding.cols());
    let svd = super::checked_svd(&unfolding.to_dense())?;
    let (u, v_t) = (&svd.u, &svd.v_t);
    let sigma_max = svd.singular_values.max();
    let mut terms: Vec<(f64, Vec<f64>, Vec<f64>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol * sigma_max)
        .map(|(t, &s)| {
            let mut left: Vec<f64> = u.column(t).iter().map(|x| x * s).collect();
            let mut right: Vec<f64> = v_t.row(t).iter().copied().collect();
            let lead = first_nonzero(&left);
            if lead < left.len() && left[lead] < 0.0 {
                left.iter_mut().for_each(|x| *x = -*x);
                right.iter_mut().for_each(|x| *x = -*x);
            }
            (s, left, right)
        })
        .collect();
    if terms.len() != exact {
        return Err(Error::RankMismatch {
            numerical: terms.len(),
            exact,
            rows,
            cols,
        });
    }
    terms.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| first_nonzero(&a.1).cmp(&first_nonzero(&b.1)))
    });
    let mut out = RankFactorization {
        rank: exact,
        singular_values: Vec::with_capacity(exact),
        left: Vec::with_capacity(exact),
        right: Vec::with_capacity(exact),
    };
    for (s, l, r) in terms {
        out.singular_values.push(s);
        out.left.push(l);
        out.right.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::images::gen_rectangle_outlines;
    use crate::rankcore::{unfold, Bipartition};

    #[test]
    fn zero_unfolding_has_no_factors() {
        let u = Unfolding {
            left_configs: vec![vec![0]],
            right_configs: vec![vec![1]],
            entries: vec![],
        };
        let f = factorize(&u, 1e-9).unwrap();
        assert_eq!(f.rank, 0);
        assert!(f.left.is_empty());
    }

    #[test]
    fn rejects_bad_tolerance() {
        let u = Unfolding {
            left_configs: vec![],
            right_configs: vec![],
            entries: vec![],
        };
        assert!(factorize(&u, 0.0).is_err());
        assert!(factorize(&u, 1.0).is_err());
    }

    #[test]
    fn reconstructs_row_cuts() {
        let f = gen_rectangle_outlines(6, 3).unwrap();
        for i in 1..6 {
            let u = unfold(&f, &Bipartition::row_prefix(6, i).unwrap(), None).unwrap();
            let fac = factorize(&u, 1e-9).unwrap();
            assert_eq!(fac.rank, exact_rank(&u));
            assert!(fac.max_error(&u) < 1e-9, "cut {i}");
            for w in fac.singular_values.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }
}
