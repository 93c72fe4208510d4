use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::harness::{Cell, Family, MeasurementRecord};

/// Mean duration against input size for one algorithm in one component.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingSeries {
    label: String,
    points: Vec<(usize, f64)>,
}

impl TimingSeries {
    /// Points must be nonempty with strictly increasing sizes and finite,
    /// nonnegative means.
    pub fn new(label: impl Into<String>, points: Vec<(usize, f64)>) -> Result<Self> {
        let label = label.into();
        let invalid = |reason: &str| Error::InvalidSeries {
            label: label.clone(),
            reason: reason.to_string(),
        };
        if points.is_empty() {
            return Err(invalid("no points"));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(invalid("sizes are not strictly increasing"));
        }
        if points.iter().any(|&(_, y)| !y.is_finite() || y < 0.0) {
            return Err(invalid("means must be finite and nonnegative"));
        }
        Ok(Self { label, points })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[(usize, f64)] {
        &self.points
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn means(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn total(&self) -> f64 {
        self.means().sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            label: self.label.clone(),
            points: self.points.iter().map(|&(s, y)| (s, y * factor)).collect(),
        }
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.sizes().eq(other.sizes()) {
            Ok(())
        } else {
            Err(Error::MismatchedGrid {
                a: self.label.clone(),
                b: other.label.clone(),
            })
        }
    }
}

/// Identifies one series inside a result file.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeriesKey {
    pub family: Family,
    pub component: String,
    pub cell: Cell,
}

impl fmt::Display for SeriesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.component, self.cell)
    }
}

/// Groups records into series, in order of first appearance.
pub fn series_from_records(
    records: &[MeasurementRecord],
) -> Result<Vec<(SeriesKey, TimingSeries)>> {
    let mut order: Vec<SeriesKey> = Vec::new();
    let mut points: BTreeMap<SeriesKey, Vec<(usize, f64)>> = BTreeMap::new();
    for r in records {
        let key = SeriesKey {
            family: r.family,
            component: r.component.clone(),
            cell: r.cell,
        };
        let entry = points.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        entry.push((r.size, r.mean_ns.as_f64()));
    }
    order
        .into_iter()
        .map(|key| {
            let mut pts = points.remove(&key).expect("key recorded");
            pts.sort_by_key(|p| p.0);
            let series = TimingSeries::new(key.to_string(), pts)?;
            Ok((key, series))
        })
        .collect()
}

/// Grid intervals over which two series swap order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CrossingReport {
    pub crossings: Vec<(usize, usize)>,
}

impl CrossingReport {
    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }
}

impl fmt::Display for CrossingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.crossings.is_empty() {
            return f.write_str("no crossings");
        }
        let parts: Vec<String> = self
            .crossings
            .iter()
            .map(|(lo, hi)| format!("between {lo} and {hi}"))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Reports every adjacent grid pair where `sign(a - b)` flips.
///
/// An exact tie keeps the sign of the previous point. Ties before the first
/// strict difference take that difference's sign, so they never produce a
/// crossing and the result does not depend on argument order.
pub fn find_crossings(a: &TimingSeries, b: &TimingSeries) -> Result<CrossingReport> {
    a.same_grid(b)?;
    let diffs: Vec<f64> = a.means().zip(b.means()).map(|(x, y)| x - y).collect();
    let Some(first) = diffs.iter().copied().find(|d| *d != 0.0) else {
        return Ok(CrossingReport::default());
    };
    let mut sign = first > 0.0;
    let mut crossings = Vec::new();
    for (i, &d) in diffs.iter().enumerate() {
        let next = if d == 0.0 { sign } else { d > 0.0 };
        if next != sign {
            crossings.push((a.points[i - 1].0, a.points[i].0));
        }
        sign = next;
    }
    Ok(CrossingReport { crossings })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KScore {
    pub k: usize,
    pub total_ns: f64,
    /// Sizes at which this threshold had the lowest mean.
    pub wins: usize,
    /// Max over min of the series' ratio to the pointwise-best envelope;
    /// 1.0 means it tracks the envelope with a constant factor.
    pub max_spike_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestK {
    pub best: usize,
    /// Ordered from best to worst.
    pub ranking: Vec<KScore>,
}

/// Ranks thresholds by total mean across the grid, breaking ties toward
/// the smaller threshold.
pub fn select_best_k(series_by_k: &[(usize, TimingSeries)]) -> Result<BestK> {
    let (_, first) = series_by_k.first().ok_or(Error::NoSeries)?;
    for (_, s) in series_by_k {
        first.same_grid(s)?;
    }

    let n = first.points.len();
    let envelope: Vec<f64> = (0..n)
        .map(|i| {
            series_by_k
                .iter()
                .map(|(_, s)| s.points[i].1)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let mut wins = vec![0usize; series_by_k.len()];
    for i in 0..n {
        let winner = (0..series_by_k.len())
            .min_by(|&x, &y| {
                let (kx, sx) = &series_by_k[x];
                let (ky, sy) = &series_by_k[y];
                sx.points[i].1.total_cmp(&sy.points[i].1).then(kx.cmp(ky))
            })
            .expect("nonempty");
        wins[winner] += 1;
    }

    let mut ranking: Vec<KScore> = series_by_k
        .iter()
        .zip(wins)
        .map(|((k, s), wins)| {
            let ratios: Vec<f64> = s
                .means()
                .zip(&envelope)
                .filter(|(_, env)| **env > 0.0)
                .map(|(y, env)| y / env)
                .collect();
            let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let max_spike_ratio = if ratios.is_empty() { 1.0 } else { max / min };
            KScore {
                k: *k,
                total_ns: s.total(),
                wins,
                max_spike_ratio,
            }
        })
        .collect();
    ranking.sort_by(|x, y| x.total_ns.total_cmp(&y.total_ns).then(x.k.cmp(&y.k)));

    Ok(BestK {
        best: ranking[0].k,
        ranking,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    A,
    B,
    Tie,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub size: usize,
    pub a_ns: f64,
    pub b_ns: f64,
    /// `a / b`; `None` when `b` is zero.
    pub ratio: Option<f64>,
    pub winner: Winner,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub a_label: String,
    pub b_label: String,
    pub rows: Vec<RatioRow>,
    /// Fraction of sizes where `a` is faster, ties counting one half.
    pub a_win_fraction: f64,
    /// Geometric mean of the defined ratios.
    pub geomean_ratio: Option<f64>,
}

pub fn compare_series(a: &TimingSeries, b: &TimingSeries) -> Result<Comparison> {
    a.same_grid(b)?;
    let rows: Vec<RatioRow> = a
        .points
        .iter()
        .zip(&b.points)
        .map(|(&(size, a_ns), &(_, b_ns))| RatioRow {
            size,
            a_ns,
            b_ns,
            ratio: (b_ns > 0.0).then(|| a_ns / b_ns),
            winner: match a_ns.total_cmp(&b_ns) {
                std::cmp::Ordering::Less => Winner::A,
                std::cmp::Ordering::Greater => Winner::B,
                std::cmp::Ordering::Equal => Winner::Tie,
            },
        })
        .collect();

    let score: f64 = rows
        .iter()
        .map(|r| match r.winner {
            Winner::A => 1.0,
            Winner::Tie => 0.5,
            Winner::B => 0.0,
        })
        .sum();
    let logs: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.ratio)
        .filter(|r| *r > 0.0)
        .map(f64::ln)
        .collect();
    let geomean_ratio =
        (!logs.is_empty()).then(|| (logs.iter().sum::<f64>() / logs.len() as f64).exp());

    Ok(Comparison {
        a_label: a.label.clone(),
        b_label: b.label.clone(),
        a_win_fraction: score / rows.len() as f64,
        geomean_ratio,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(label: &str, sizes: &[usize], ys: &[f64]) -> TimingSeries {
        TimingSeries::new(
            label,
            sizes.iter().copied().zip(ys.iter().copied()).collect(),
        )
        .unwrap()
    }

    const GRID: [usize; 4] = [100, 200, 300, 400];

    #[test]
    fn series_validation() {
        assert!(TimingSeries::new("x", vec![]).is_err());
        assert!(TimingSeries::new("x", vec![(2, 1.0), (2, 1.0)]).is_err());
        assert!(TimingSeries::new("x", vec![(1, -1.0)]).is_err());
        assert!(TimingSeries::new("x", vec![(1, f64::NAN)]).is_err());
    }

    #[test]
    fn no_crossing_when_dominated() {
        let a = series("a", &GRID, &[1.0, 2.0, 3.0, 4.0]);
        let b = series("b", &GRID, &[2.0, 3.0, 4.0, 5.0]);
        assert!(find_crossings(&a, &b).unwrap().is_empty());
    }

    #[test]
    fn single_crossing() {
        let a = series("a", &GRID, &[5.0, 5.0, 1.0, 1.0]);
        let b = series("b", &GRID, &[1.0, 1.0, 5.0, 5.0]);
        let r = find_crossings(&a, &b).unwrap();
        assert_eq!(r.crossings, [(200, 300)]);
        assert_eq!(r.to_string(), "between 200 and 300");
    }

    #[test]
    fn double_crossing() {
        let a = series("a", &[400, 500, 600], &[2.0, 1.0, 2.0]);
        let b = series("b", &[400, 500, 600], &[1.5, 1.5, 1.5]);
        assert_eq!(
            find_crossings(&a, &b).unwrap().crossings,
            [(400, 500), (500, 600)]
        );
    }

    #[test]
    fn ties_hold_the_previous_sign() {
        // + 0 0 - : one crossing, at the step into the negative point.
        let a = series("a", &GRID, &[2.0, 1.0, 1.0, 0.0]);
        let b = series("b", &GRID, &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(find_crossings(&a, &b).unwrap().crossings, [(300, 400)]);
        // 0 - : leading tie follows the first strict sign.
        let a = series("a", &[1, 2], &[1.0, 0.0]);
        let b = series("b", &[1, 2], &[1.0, 1.0]);
        assert!(find_crossings(&a, &b).unwrap().is_empty());
        assert!(find_crossings(&a, &a).unwrap().is_empty());
    }

    #[test]
    fn crossing_requires_shared_grid() {
        let a = series("a", &[1, 2], &[1.0, 1.0]);
        let b = series("b", &[1, 3], &[1.0, 1.0]);
        assert!(matches!(
            find_crossings(&a, &b),
            Err(Error::MismatchedGrid { .. })
        ));
        assert!(compare_series(&a, &b).is_err());
        assert!(select_best_k(&[(1, a), (2, b)]).is_err());
    }

    #[test]
    fn best_k_trivial_cases() {
        assert!(matches!(select_best_k(&[]), Err(Error::NoSeries)));
        let only = series("k64", &GRID, &[3.0, 1.0, 4.0, 1.0]);
        let r = select_best_k(&[(64, only.clone())]).unwrap();
        assert_eq!(r.best, 64);
        assert_eq!(r.ranking[0].wins, 4);
        assert_eq!(r.ranking[0].max_spike_ratio, 1.0);

        let fast = series("k16", &GRID, &[1.0, 0.5, 2.0, 0.5]);
        assert_eq!(select_best_k(&[(64, only), (16, fast)]).unwrap().best, 16);
    }

    #[test]
    fn best_k_ties_go_to_smaller_threshold() {
        let s = series("s", &GRID, &[1.0; 4]);
        let r = select_best_k(&[(256, s.clone()), (32, s.clone()), (128, s)]).unwrap();
        assert_eq!(r.best, 32);
        let ks: Vec<usize> = r.ranking.iter().map(|x| x.k).collect();
        assert_eq!(ks, [32, 128, 256]);
        assert_eq!(r.ranking[0].wins, 4);
        assert_eq!(r.ranking[1].wins, 0);
    }

    #[test]
    fn best_k_ranking_matches_brute_force_sums() {
        // Six series with distinct, hand-checkable totals.
        let ks = [16, 32, 64, 128, 256, 512];
        let data: [[f64; 4]; 6] = [
            [10.0, 20.0, 30.0, 40.0], // 100
            [9.0, 21.0, 28.0, 37.0],  // 95
            [8.0, 18.0, 29.0, 35.0],  // 90
            [7.0, 19.0, 27.0, 36.0],  // 89
            [12.0, 17.0, 31.0, 39.0], // 99
            [6.0, 25.0, 33.0, 45.0],  // 109
        ];
        let input: Vec<(usize, TimingSeries)> = ks
            .iter()
            .zip(&data)
            .map(|(&k, ys)| (k, series(&format!("k{k}"), &GRID, ys)))
            .collect();

        // Oracle: sort by plain sums.
        let mut expected: Vec<(f64, usize)> = data
            .iter()
            .zip(ks)
            .map(|(ys, k)| (ys.iter().sum(), k))
            .collect();
        expected.sort_by(|a, b| a.0.total_cmp(&b.0));
        let expected: Vec<usize> = expected.into_iter().map(|(_, k)| k).collect();

        let r = select_best_k(&input).unwrap();
        let got: Vec<usize> = r.ranking.iter().map(|s| s.k).collect();
        assert_eq!(got, expected);
        assert_eq!(r.best, 128);

        let wins: BTreeMap<usize, usize> = r.ranking.iter().map(|s| (s.k, s.wins)).collect();
        // Column minima: 6.0 (512), 17.0 (256), 27.0 (128), 35.0 (64).
        assert_eq!(wins[&512], 1);
        assert_eq!(wins[&256], 1);
        assert_eq!(wins[&128], 1);
        assert_eq!(wins[&64], 1);
        assert_eq!(wins[&16], 0);

        let spike_512 = r
            .ranking
            .iter()
            .find(|s| s.k == 512)
            .unwrap()
            .max_spike_ratio;
        // Ratios to envelope: 1.0, 25/17, 33/27, 45/35.
        assert!((spike_512 - 25.0 / 17.0).abs() < 1e-12);
    }

    #[test]
    fn compare_equal_series() {
        let a = series("a", &GRID, &[1.0, 2.0, 3.0, 4.0]);
        let c = compare_series(&a, &a).unwrap();
        assert!(c
            .rows
            .iter()
            .all(|r| r.ratio == Some(1.0) && r.winner == Winner::Tie));
        assert_eq!(c.a_win_fraction, 0.5);
        assert_eq!(c.geomean_ratio, Some(1.0));
    }

    #[test]
    fn compare_double() {
        let b = series("b", &GRID, &[1.0, 2.0, 3.0, 4.0]);
        let a = b.scaled(2.0);
        let c = compare_series(&a, &b).unwrap();
        assert!((c.geomean_ratio.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(c.a_win_fraction, 0.0);
        assert_eq!(c.rows.len(), 4);
    }

    #[test]
    fn compare_zero_denominator_is_undefined() {
        let a = series("a", &[1, 2], &[1.0, 4.0]);
        let b = series("b", &[1, 2], &[0.0, 2.0]);
        let c = compare_series(&a, &b).unwrap();
        assert_eq!(c.rows[0].ratio, None);
        assert_eq!(c.geomean_ratio, Some(2.0));
    }

    fn arb_pair() -> impl Strategy<Value = (TimingSeries, TimingSeries)> {
        (1usize..12).prop_flat_map(|n| {
            (
                proptest::collection::vec(0u32..20, n),
                proptest::collection::vec(0u32..20, n),
            )
                .prop_map(move |(ya, yb)| {
                    let grid: Vec<usize> = (1..=n).map(|i| i * 25).collect();
                    let to_f = |v: Vec<u32>| v.into_iter().map(f64::from).collect::<Vec<_>>();
                    (series("a", &grid, &to_f(ya)), series("b", &grid, &to_f(yb)))
                })
        })
    }

    proptest! {
        #[test]
        fn crossings_are_symmetric((a, b) in arb_pair()) {
            prop_assert_eq!(find_crossings(&a, &b).unwrap(), find_crossings(&b, &a).unwrap());
        }

        #[test]
        fn crossing_intervals_are_ordered_grid_pairs((a, b) in arb_pair()) {
            let r = find_crossings(&a, &b).unwrap();
            let grid: Vec<usize> = a.sizes().collect();
            for w in r.crossings.windows(2) {
                prop_assert!(w[0].1 <= w[1].0);
            }
            for (lo, hi) in r.crossings {
                let i = grid.iter().position(|&s| s == lo).unwrap();
                prop_assert_eq!(grid[i + 1], hi);
            }
        }

        #[test]
        fn best_k_is_scale_invariant(
            ys in proptest::collection::vec(proptest::collection::vec(1u32..1000, 5), 1..7),
            exp in -20i32..20,
        ) {
            // Powers of two keep the scaled sums exact, so ties stay ties.
            let scale = 2f64.powi(exp);
            let grid = [250, 500, 750, 1000, 1250];
            let input: Vec<(usize, TimingSeries)> = ys
                .iter()
                .enumerate()
                .map(|(i, y)| {
                    let y: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
                    (16 << i, series("s", &grid, &y))
                })
                .collect();
            let scaled: Vec<(usize, TimingSeries)> =
                input.iter().map(|(k, s)| (*k, s.scaled(scale))).collect();
            let a = select_best_k(&input).unwrap();
            let b = select_best_k(&scaled).unwrap();
            let ka: Vec<usize> = a.ranking.iter().map(|s| s.k).collect();
            let kb: Vec<usize> = b.ranking.iter().map(|s| s.k).collect();
            prop_assert_eq!(ka, kb);
        }
    }
}
