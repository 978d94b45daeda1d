//! Structural certificates and scaling measurements.
//!
//! Every rank here is exact (integer elimination). "Polynomial" growth is
//! operationalized as a log-log slope bounded by a threshold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::images::{gen_random_family, Generator, ImageFamily, Region};
use crate::rankcore::{exact_rank, factorize, unfold, Bipartition, FixedRowConstraint, RankFactorization};

/// Default bound on the log-log slope of rank-like quantities.
pub const POLY_SLOPE_THRESHOLD: f64 = 3.0;

/// Least-squares line `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
}

/// Ordinary least squares; needs at least two distinct abscissae.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some(Fit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Fit of `log2 y` against `log2 x` over the points with positive `y`.
pub fn loglog_fit(points: &[(f64, f64)]) -> Option<Fit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.log2(), y.log2()))
        .unzip();
    fit_line(&xs, &ys)
}

/// Fit of `log2 y` against `x` over the points with positive `y`.
pub fn semilog_fit(points: &[(f64, f64)]) -> Option<Fit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(_, y)| *y > 0.0)
        .map(|(x, y)| (*x, y.log2()))
        .unzip();
    fit_line(&xs, &ys)
}

#[derive(Clone, Debug, Serialize)]
pub struct Assumption1Report {
    pub n: usize,
    /// `(i, c_i)` with `c_i` the number of distinct row-`i` configurations.
    pub counts: Vec<(usize, usize)>,
    pub max_count: usize,
}

/// Counts distinct row configurations per row by scanning members.
pub fn certify_assumption1(family: &ImageFamily) -> Assumption1Report {
    let n = family.side();
    let counts: Vec<(usize, usize)> = (1..=n).map(|i| (i, family.row_configs(i).len())).collect();
    let max_count = counts.iter().map(|c| c.1).max().unwrap_or(0);
    Assumption1Report {
        n,
        counts,
        max_count,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedRowRank {
    pub row: usize,
    pub config: Vec<u8>,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Assumption2Report {
    pub n: usize,
    /// One entry per row and occurring configuration, in row then
    /// configuration order.
    pub ranks: Vec<FixedRowRank>,
    pub max_rank: usize,
}

/// Exact rank of `F_{i,y}`.
pub fn fixed_row_rank(family: &ImageFamily, row: usize, config: &[u8]) -> Result<usize> {
    let n = family.side();
    let constraint = FixedRowConstraint::new(n, row, config.to_vec())?;
    let u = unfold(family, &Bipartition::around_row(n, row)?, Some(&constraint))?;
    Ok(exact_rank(&u))
}

fn fixed_row_table(family: &ImageFamily) -> Result<Vec<FixedRowRank>> {
    let n = family.side();
    let tasks: Vec<(usize, Vec<u8>)> = (1..=n)
        .flat_map(|i| family.row_configs(i).into_iter().map(move |y| (i, y)))
        .collect();
    tasks
        .into_par_iter()
        .map(|(row, config)| {
            let rank = fixed_row_rank(family, row, &config)?;
            Ok(FixedRowRank { row, config, rank })
        })
        .collect()
}

pub fn certify_assumption2(family: &ImageFamily) -> Result<Assumption2Report> {
    let ranks = fixed_row_table(family)?;
    let max_rank = ranks.iter().map(|r| r.rank).max().unwrap_or(0);
    Ok(Assumption2Report {
        n: family.side(),
        ranks,
        max_rank,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Row {
    pub row: usize,
    /// `rank F_i`.
    pub rank: usize,
    /// `Σ_y rank F_{i,y}` over occurring configurations of row `i`.
    pub bound: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Report {
    pub rows: Vec<Lemma1Row>,
    pub all_hold: bool,
}

/// Row-cut rank against the sum of fixed-row ranks, for `i = 1..n-1`.
pub fn verify_lemma1(family: &ImageFamily) -> Result<Lemma1Report> {
    let n = family.side();
    let table = fixed_row_table(family)?;
    let rows = (1..n)
        .into_par_iter()
        .map(|i| {
            let rank = exact_rank(&unfold(family, &Bipartition::row_prefix(n, i)?, None)?);
            let bound = table.iter().filter(|r| r.row == i).map(|r| r.rank).sum();
            Ok(Lemma1Row {
                row: i,
                rank,
                bound,
                holds: rank <= bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(Lemma1Report { rows, all_hold })
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionPoint {
    pub region: Region,
    pub size: usize,
    pub boundary: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionProfile {
    pub points: Vec<RegionPoint>,
    /// `log2 rank` against `|∂A|`.
    pub vs_boundary: Option<Fit>,
    /// `log2 rank` against `|A|`.
    pub vs_size: Option<Fit>,
}

/// Exact `rank F_A` for each region with both semi-log regressions.
pub fn region_rank_profile(family: &ImageFamily, regions: &[Region]) -> Result<RegionProfile> {
    let points = regions
        .par_iter()
        .map(|region| {
            if region.n != family.side() {
                return Err(Error::DimensionMismatch {
                    expected: family.side(),
                    got: region.n,
                });
            }
            let u = unfold(family, &Bipartition::from_region(region), None)?;
            Ok(RegionPoint {
                region: *region,
                size: region.size(),
                boundary: region.boundary(),
                rank: exact_rank(&u),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let by_boundary: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.boundary as f64, p.rank as f64))
        .collect();
    let by_size: Vec<(f64, f64)> = points.iter().map(|p| (p.size as f64, p.rank as f64)).collect();
    Ok(RegionProfile {
        vs_boundary: semilog_fit(&by_boundary),
        vs_size: semilog_fit(&by_size),
        points,
    })
}

/// Every axis-aligned square region of side `s` anchored at the top-left
/// corner, for `s = 1..=n`.
pub fn corner_squares(n: usize) -> Vec<Region> {
    (1..=n)
        .map(|s| Region::rectangle(n, 1, 1, s, s).expect("square fits"))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BaselineResult {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub rank: usize,
    /// `min(m, 2^|A|, 2^|Ā|)`, the largest rank the cut admits.
    pub cap: u128,
}

fn pow2_capped(bits: usize) -> u128 {
    if bits >= 127 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

pub fn rank_cap(m: usize, cut: &Region) -> u128 {
    let a = cut.size();
    let b = cut.n * cut.n - a;
    (m as u128).min(pow2_capped(a)).min(pow2_capped(b))
}

/// Exact rank of a random family at `cut`, reported with its cap.
pub fn random_baseline_profile(n: usize, m: usize, seed: u64, cut: &Region) -> Result<BaselineResult> {
    if m == 0 {
        return Err(Error::InvalidParameter("baseline needs m >= 1".into()));
    }
    if cut.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: cut.n,
        });
    }
    let family = gen_random_family(n, m, seed)?;
    let rank = exact_rank(&unfold(&family, &Bipartition::from_region(cut), None)?);
    Ok(BaselineResult {
        n,
        m,
        seed,
        rank,
        cap: rank_cap(m, cut),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FeatureDecomposition {
    pub factorization: RankFactorization,
    pub left_configs: Vec<Vec<u8>>,
    pub right_configs: Vec<Vec<u8>>,
    /// Nonzero count of each left factor.
    pub left_support: Vec<usize>,
    pub right_support: Vec<usize>,
    /// Whether a factor pair is not proportional to a 0/1 pattern.
    pub non_binary: Vec<bool>,
}

const SUPPORT_CUT: f64 = 1e-9;

fn support(v: &[f64]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| x.abs() > SUPPORT_CUT)
        .map(|(i, _)| i)
        .collect()
}

fn is_scaled_binary(v: &[f64]) -> bool {
    let nz: Vec<f64> = v.iter().copied().filter(|x| x.abs() > SUPPORT_CUT).collect();
    match nz.first() {
        None => true,
        Some(&first) => nz.iter().all(|x| (x - first).abs() <= 1e-9 * first.abs().max(1.0)),
    }
}

/// Local-feature decomposition `F_A = Σ g_A ⊗ g_Ā` for a region.
pub fn feature_decomposition(family: &ImageFamily, region: &Region, tol: f64) -> Result<FeatureDecomposition> {
    let u = unfold(family, &Bipartition::from_region(region), None)?;
    region_features(&u, tol)
}

/// As [`feature_decomposition`], for an already built unfolding.
pub fn region_features(u: &crate::rankcore::Unfolding, tol: f64) -> Result<FeatureDecomposition> {
    let factorization = factorize(u, tol)?;
    let left_support = factorization.left.iter().map(|v| support(v).len()).collect();
    let right_support = factorization.right.iter().map(|v| support(v).len()).collect();
    let non_binary = factorization
        .left
        .iter()
        .zip(&factorization.right)
        .map(|(l, r)| !(is_scaled_binary(l) && is_scaled_binary(r)))
        .collect();
    Ok(FeatureDecomposition {
        factorization,
        left_configs: u.left_configs.clone(),
        right_configs: u.right_configs.clone(),
        left_support,
        right_support,
        non_binary,
    })
}

impl FeatureDecomposition {
    /// Left configurations in the support of factor `t`.
    pub fn left_support_configs(&self, t: usize) -> Vec<Vec<u8>> {
        support(&self.factorization.left[t])
            .into_iter()
            .map(|i| self.left_configs[i].clone())
            .collect()
    }
}

/// A measured quantity for scaling experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// `|f⁻¹(1)|`.
    Members,
    /// `max_i |{x_i : f(x) = 1}|`.
    MaxRowConfigs,
    /// `max_{i,y} rank F_{i,y}`.
    MaxFixedRowRank,
    /// `max_i rank F_i`.
    MaxRowCutRank,
    /// `rank F_{B_k}` at `k = ⌊n²/2⌋`.
    MiddleCutRank,
    /// `max_k l_k` of the rounded tensor train.
    MaxBondDim,
    /// `max_i l_i` of the tree network.
    MaxLayerChannels,
}

impl Quantity {
    pub const ALL: [Quantity; 7] = [
        Quantity::Members,
        Quantity::MaxRowConfigs,
        Quantity::MaxFixedRowRank,
        Quantity::MaxRowCutRank,
        Quantity::MiddleCutRank,
        Quantity::MaxBondDim,
        Quantity::MaxLayerChannels,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Members => "members",
            Quantity::MaxRowConfigs => "max-row-configs",
            Quantity::MaxFixedRowRank => "max-fixed-row-rank",
            Quantity::MaxRowCutRank => "max-row-cut-rank",
            Quantity::MiddleCutRank => "middle-cut-rank",
            Quantity::MaxBondDim => "max-bond-dim",
            Quantity::MaxLayerChannels => "max-layer-channels",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.name() == s)
    }

    /// Evaluates the quantity on one family.
    pub fn measure(&self, family: &ImageFamily, tol: f64) -> Result<usize> {
        let n = family.side();
        Ok(match self {
            Quantity::Members => family.len(),
            Quantity::MaxRowConfigs => certify_assumption1(family).max_count,
            Quantity::MaxFixedRowRank => certify_assumption2(family)?.max_rank,
            Quantity::MaxRowCutRank => (1..n)
                .into_par_iter()
                .map(|i| Ok(exact_rank(&unfold(family, &Bipartition::row_prefix(n, i)?, None)?)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(0),
            Quantity::MiddleCutRank => {
                let k = n * n / 2;
                if k == 0 {
                    0
                } else {
                    exact_rank(&unfold(family, &Bipartition::pixel_prefix(n, k)?, None)?)
                }
            }
            Quantity::MaxBondDim => crate::tt::tt_from_family(family, tol)?.max_bond(),
            Quantity::MaxLayerChannels => crate::ht::ht_from_family(family, tol)?.max_channels(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub generator: String,
    pub quantity: Quantity,
    /// `(n, measured value)`.
    pub series: Vec<(usize, usize)>,
    /// `log2 value` against `log2 n`; `None` when fewer than two positive points.
    pub fit: Option<Fit>,
    pub threshold: f64,
    pub within_threshold: bool,
}

pub(crate) fn check_sizes(ns: &[usize]) -> Result<()> {
    if ns.len() < 2 {
        return Err(Error::InvalidParameter(
            "a slope needs at least two sizes".into(),
        ));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "sizes must be strictly ascending".into(),
        ));
    }
    Ok(())
}

impl ScalingReport {
    pub fn from_series(
        generator: String,
        quantity: Quantity,
        series: Vec<(usize, usize)>,
        threshold: f64,
    ) -> Self {
        let points: Vec<(f64, f64)> = series.iter().map(|&(n, v)| (n as f64, v as f64)).collect();
        let fit = loglog_fit(&points);
        let within_threshold = fit.is_none_or(|f| f.slope <= threshold);
        Self {
            generator,
            quantity,
            series,
            fit,
            threshold,
            within_threshold,
        }
    }
}

/// Measures `quantity` for each `n` and fits the log-log slope.
pub fn scaling_experiment(
    generator: &Generator,
    ns: &[usize],
    quantity: Quantity,
    tol: f64,
    threshold: f64,
) -> Result<ScalingReport> {
    check_sizes(ns)?;
    let series = ns
        .iter()
        .map(|&n| Ok((n, quantity.measure(&generator.generate(n)?, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScalingReport::from_series(
        generator.label(),
        quantity,
        series,
        threshold,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::images::{gen_rectangle_outlines, gen_stacked_outlines, gen_vertical_bars, FamilyMeta};

    #[test]
    fn line_fit_recovers_exact_slope() {
        let pts: Vec<(f64, f64)> = [4.0, 8.0, 16.0].iter().map(|&n: &f64| (n, n.powi(4))).collect();
        let fit = loglog_fit(&pts).unwrap();
        assert!((fit.slope - 4.0).abs() < 1e-12);
        let flat = loglog_fit(&[(4.0, 7.0), (8.0, 7.0)]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert!(fit_line(&[1.0, 1.0], &[2.0, 3.0]).is_none());
    }

    #[test]
    fn row_config_counts_by_enumeration() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        let r = certify_assumption1(&f);
        // white (rectangles starting at row 2), 1110, 1111, 0111
        let mut tops: Vec<String> = f
            .members()
            .iter()
            .map(|m| m.row(1).iter().map(|b| b.to_string()).collect())
            .collect();
        tops.sort();
        tops.dedup();
        assert_eq!(r.counts[0], (1, tops.len()));
        assert_eq!(tops.len(), 4);

        let bars = gen_vertical_bars(5, 2).unwrap();
        for (_, c) in certify_assumption1(&bars).counts {
            assert!(c <= 5 + 1);
        }
        let empty = ImageFamily::new(3, FamilyMeta::new("empty", None));
        let e = certify_assumption1(&empty);
        assert!(e.counts.iter().all(|&(_, c)| c == 0));
        assert_eq!(e.max_count, 0);
    }

    #[test]
    fn rectangle_rows_follow_three_cases() {
        for n in 3..=8 {
            let f = gen_rectangle_outlines(n, 3).unwrap();
            for m in f.members() {
                for i in 1..=n {
                    let row = m.row(i);
                    let mut runs = Vec::new();
                    let mut j = 0;
                    while j < n {
                        if row[j] == 1 {
                            let start = j;
                            while j < n && row[j] == 1 {
                                j += 1;
                            }
                            runs.push(j - start);
                        } else {
                            j += 1;
                        }
                    }
                    let ok = runs.is_empty() || runs.len() == 1 || runs == vec![1, 1];
                    assert!(ok, "row {i} of {m} has runs {runs:?}");
                }
            }
        }
    }

    #[test]
    fn case_three_row_is_rank_one() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        assert_eq!(fixed_row_rank(&f, 2, &[1, 0, 1, 0]).unwrap(), 1);
        assert_eq!(fixed_row_rank(&f, 2, &[0, 1, 1, 0]).unwrap(), 0);
    }

    #[test]
    fn stacked_family_has_rank_two_rows() {
        let f = gen_stacked_outlines(8, 3).unwrap();
        let report = certify_assumption2(&f).unwrap();
        let two_runs = report.ranks.iter().filter(|r| {
            let ones: Vec<usize> = r.config.iter().enumerate().filter(|(_, &b)| b == 1).map(|(j, _)| j).collect();
            ones.len() == 2 && ones[1] > ones[0] + 1
        });
        assert!(two_runs.clone().any(|r| r.rank == 2));
        assert!(report.max_rank <= 2);
    }

    #[test]
    fn row_cut_inequality_on_small_families() {
        let single = ImageFamily::from_members(
            3,
            vec![crate::images::BinaryImage::parse(3, "010010010").unwrap()],
            FamilyMeta::new("one", None),
        )
        .unwrap();
        let r = verify_lemma1(&single).unwrap();
        assert!(r.rows.iter().all(|row| row.rank == 1 && row.bound == 1));
        let f = gen_rectangle_outlines(4, 3).unwrap();
        let r = verify_lemma1(&f).unwrap();
        assert!(r.all_hold);
        let row2 = &r.rows[1];
        assert_eq!(row2.row, 2);
        // independent: Σ over the distinct row-2 configs of each F_{2,y}
        let expected: usize = f
            .row_configs(2)
            .iter()
            .map(|y| fixed_row_rank(&f, 2, y).unwrap())
            .sum();
        assert_eq!(row2.bound, expected);
        assert!(row2.rank <= row2.bound);
    }

    #[test]
    fn region_profile_edge_cases() {
        let f = gen_rectangle_outlines(4, 3).unwrap();
        let whole = Region::rectangle(4, 1, 1, 4, 4).unwrap();
        let pixel = Region::rectangle(4, 2, 2, 1, 1).unwrap();
        let p = region_rank_profile(&f, &[whole, pixel]).unwrap();
        assert_eq!(p.points[0].rank, 1);
        assert!(p.points[1].rank <= 2);
    }

    #[test]
    fn cut_rank_is_bounded_by_configs_times_fixed_rank() {
        let f = gen_rectangle_outlines(7, 3).unwrap();
        let a1 = certify_assumption1(&f);
        let a2 = certify_assumption2(&f).unwrap();
        for i in 1..7 {
            let rank = exact_rank(&unfold(&f, &Bipartition::row_prefix(7, i).unwrap(), None).unwrap());
            let max_fixed = a2.ranks.iter().filter(|r| r.row == i).map(|r| r.rank).max().unwrap();
            assert!(rank <= a1.counts[i - 1].1 * max_fixed);
        }
    }

    #[test]
    fn baseline_extremes() {
        let cut = Region::row_prefix(4, 2).unwrap();
        assert_eq!(random_baseline_profile(4, 1, 3, &cut).unwrap().rank, 1);
        let b = random_baseline_profile(4, 9, 7, &cut).unwrap();
        assert_eq!(b.cap, 9);
        assert!(b.rank <= 9);
        assert!(random_baseline_profile(4, 0, 7, &cut).is_err());
    }

    #[test]
    fn feature_support_matches_upper_parts() {
        let f = gen_rectangle_outlines(5, 3).unwrap();
        let y = vec![1, 0, 0, 1, 0];
        let c = FixedRowConstraint::new(5, 3, y.clone()).unwrap();
        let u = unfold(&f, &Bipartition::around_row(5, 3).unwrap(), Some(&c)).unwrap();
        let d = region_features(&u, 1e-9).unwrap();
        assert_eq!(d.factorization.rank, 1);
        // direct enumeration of the upper parts of members with this row
        let mut uppers: Vec<Vec<u8>> = f
            .members()
            .iter()
            .filter(|m| m.row(3) == y.as_slice())
            .map(|m| m.bits()[..10].to_vec())
            .collect();
        uppers.sort();
        uppers.dedup();
        assert_eq!(d.left_support_configs(0), uppers);
        assert!(!d.non_binary[0]);
    }

    #[test]
    fn scaling_rejects_single_size() {
        assert!(scaling_experiment(&Generator::rect(), &[4], Quantity::Members, 1e-9, 3.0).is_err());
        assert!(scaling_experiment(&Generator::rect(), &[8, 4], Quantity::Members, 1e-9, 3.0).is_err());
    }

    #[test]
    fn member_count_grows_quartically() {
        let r = scaling_experiment(&Generator::rect(), &[4, 8, 16], Quantity::Members, 1e-9, 5.0).unwrap();
        let slope = r.fit.unwrap().slope;
        // counts 9, 441, 11025: Θ(n⁴), steeper at small n because of the (n-2)² factor
        assert!(slope > 4.0 && slope < 6.0, "slope {slope}");
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(Quantity::parse(q.name()), Some(q));
        }
    }
}
