//! Rank-based comparison of optimizers: pairwise rank-sum verdicts, average
//! rank scores over a testbed and the Holm step-down procedure against a
//! reference algorithm.

use std::fmt;

use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::error::{Error, Result};

pub const DEFAULT_SIGNIFICANCE: f64 = 0.05;

/// Final fitnesses of the runs of one algorithm on one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateSample("empty sample".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::DegenerateSample("sample contains NaN".into()));
        }
        Ok(SampleSet { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean_std(&self.values).0
    }

    pub fn std(&self) -> f64 {
        mean_std(&self.values).1
    }
}

/// Mean and sample standard deviation (`n - 1` denominator; zero for a
/// single value). The mean is accumulated incrementally so samples of
/// [`WORST`](crate::WORST) do not overflow.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mut mean = 0.0;
    for (i, v) in values.iter().enumerate() {
        mean += (v - mean) / (i + 1) as f64;
    }
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Outcome of comparing a reference sample against a challenger, from the
/// reference's point of view (minimization).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    /// Reference is significantly lower.
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "=")]
    Equals,
    /// Reference is significantly higher.
    #[serde(rename = "-")]
    Minus,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Plus => "+",
            Verdict::Equals => "=",
            Verdict::Minus => "-",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Midranks (1-based) of `values`; tied values share the mean of their
/// positions.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let shared = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = shared;
        }
        start = end;
    }
    ranks
}

/// Normal approximation of the two-sample rank-sum test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankSumTest {
    /// Rank sum of the first sample in the pooled ranking.
    pub rank_sum: f64,
    pub expected: f64,
    pub variance: f64,
    pub z: f64,
    pub p_two_sided: f64,
}

/// Rank-sum test with midranks, tie-corrected variance and a 0.5 continuity
/// correction.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<RankSumTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::DegenerateSample("rank-sum test needs two non-empty samples".into()));
    }
    let (m, n) = (a.len() as f64, b.len() as f64);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    if pooled.iter().any(|v| v.is_nan()) {
        return Err(Error::DegenerateSample("sample contains NaN".into()));
    }
    let ranks = midranks(&pooled);
    let rank_sum: f64 = ranks[..a.len()].iter().sum();
    let total = m + n;
    let expected = m * (total + 1.0) / 2.0;

    let mut sorted = pooled;
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    for group in sorted.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let variance = if total > 1.0 {
        m * n / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)))
    } else {
        0.0
    };

    let diff = rank_sum - expected;
    let (z, p_two_sided) = if variance <= 0.0 {
        (0.0, 1.0)
    } else {
        let corrected = (diff.abs() - 0.5).max(0.0).copysign(diff);
        let z = corrected / variance.sqrt();
        (z, erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0))
    };
    Ok(RankSumTest { rank_sum, expected, variance, z, p_two_sided })
}

/// Three-way verdict of `reference` against `challenger` at the given
/// two-sided significance level.
pub fn wilcoxon_verdict(reference: &SampleSet, challenger: &SampleSet, significance: f64) -> Result<Verdict> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::InvalidParameter(format!("significance must lie in (0, 1), got {significance}")));
    }
    let test = rank_sum_test(reference.values(), challenger.values())?;
    Ok(if test.p_two_sided >= significance {
        Verdict::Equals
    } else if test.rank_sum < test.expected {
        Verdict::Plus
    } else {
        Verdict::Minus
    })
}

/// Average rank score of each algorithm over a testbed.
///
/// `means[a][p]` is the mean fitness of algorithm `a` on problem `p`. On
/// every problem the lowest mean scores `N_A`, the highest scores 1, and tied
/// algorithms share the mean of their scores.
pub fn rank_scores(means: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n_a = means.len();
    if n_a == 0 {
        return Err(Error::InvalidParameter("no algorithms".into()));
    }
    let n_p = means[0].len();
    if n_p == 0 {
        return Err(Error::InvalidParameter("no problems".into()));
    }
    if let Some(row) = means.iter().find(|r| r.len() != n_p) {
        return Err(Error::DimensionMismatch { expected: n_p, actual: row.len() });
    }
    let mut scores = vec![0.0; n_a];
    let mut column = vec![0.0; n_a];
    for p in 0..n_p {
        for (a, row) in means.iter().enumerate() {
            if row[p].is_nan() {
                return Err(Error::DegenerateSample(format!("NaN mean for algorithm {a}, problem {p}")));
            }
            column[a] = row[p];
        }
        // Midrank 1 is the best, so the score is N_A + 1 - midrank.
        for (score, r) in scores.iter_mut().zip(midranks(&column)) {
            *score += (n_a + 1) as f64 - r;
        }
    }
    Ok(scores.into_iter().map(|s| s / n_p as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    Rejected,
    Accepted,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::Rejected => "Rejected",
            Hypothesis::Accepted => "Accepted",
        })
    }
}

/// One challenger's line in the Holm table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolmRow {
    /// `N_A - j` for the `j`-th smallest p-value.
    pub j_index: usize,
    pub algorithm: String,
    pub z: f64,
    pub p: f64,
    pub threshold: f64,
    pub hypothesis: Hypothesis,
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard error of a difference of average ranks.
pub fn holm_denominator(n_algorithms: usize, n_problems: usize) -> f64 {
    let n_a = n_algorithms as f64;
    (n_a * (n_a + 1.0) / (6.0 * n_problems as f64)).sqrt()
}

/// Holm step-down comparison of every algorithm against `reference`.
///
/// `z_j = (R_j - R_0) / sqrt(N_A (N_A + 1) / (6 N_TP))` and `p_j = Phi(z_j)`.
/// Rows come back sorted by ascending p. Row `j` (1-based) is tested against
/// `delta / (N_A - j)`; once one hypothesis is accepted, all later ones are.
pub fn holm_procedure<S: AsRef<str>>(
    ranks: &[f64],
    labels: &[S],
    reference: usize,
    n_problems: usize,
    delta: f64,
) -> Result<Vec<HolmRow>> {
    let n_a = ranks.len();
    if n_a < 2 {
        return Err(Error::InvalidParameter("Holm procedure needs at least two algorithms".into()));
    }
    if labels.len() != n_a {
        return Err(Error::DimensionMismatch { expected: n_a, actual: labels.len() });
    }
    if reference >= n_a {
        return Err(Error::InvalidParameter(format!("reference index {reference} out of range")));
    }
    if n_problems == 0 {
        return Err(Error::InvalidParameter("number of problems must be positive".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    let denom = holm_denominator(n_a, n_problems);
    let mut rows: Vec<HolmRow> = (0..n_a)
        .filter(|&j| j != reference)
        .map(|j| {
            let z = (ranks[j] - ranks[reference]) / denom;
            HolmRow {
                j_index: 0,
                algorithm: labels[j].as_ref().to_string(),
                z,
                p: normal_cdf(z),
                threshold: 0.0,
                hypothesis: Hypothesis::Accepted,
            }
        })
        .collect();
    rows.sort_by(|x, y| x.p.total_cmp(&y.p));
    let mut rejecting = true;
    for (j, row) in rows.iter_mut().enumerate() {
        row.j_index = n_a - 1 - j;
        row.threshold = delta / row.j_index as f64;
        rejecting &= row.p < row.threshold;
        row.hypothesis = if rejecting { Hypothesis::Rejected } else { Hypothesis::Accepted };
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[f64]) -> SampleSet {
        SampleSet::new(v.to_vec()).unwrap()
    }

    /// Exact two-sided p of the rank-sum statistic by enumerating every way
    /// of assigning the pooled midranks to the first sample.
    fn exact_p(a: &[f64], b: &[f64]) -> f64 {
        let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
        let ranks = midranks(&pooled);
        let m = a.len();
        let n_tot = pooled.len();
        let expected = m as f64 * (n_tot as f64 + 1.0) / 2.0;
        let observed = (ranks[..m].iter().sum::<f64>() - expected).abs();
        let (mut hits, mut total) = (0u64, 0u64);
        for mask in 0u32..(1 << n_tot) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let w: f64 = (0..n_tot).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
            total += 1;
            if (w - expected).abs() >= observed - 1e-9 {
                hits += 1;
            }
        }
        hits as f64 / total as f64
    }

    #[test]
    fn midranks_share_tied_positions() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(midranks(&[5.0; 3]), vec![2.0; 3]);
    }

    #[test]
    fn mean_std_sample_denominator() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[7.0]), (7.0, 0.0));
        assert_eq!(mean_std(&[crate::WORST; 30]).0, crate::WORST);
    }

    #[test]
    fn separated_samples() {
        let a: Vec<f64> = (0..30).map(|i| 1e-3 * i as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| 1.0 + 1e-3 * i as f64).collect();
        assert_eq!(wilcoxon_verdict(&set(&a), &set(&b), 0.05).unwrap(), Verdict::Plus);
        assert_eq!(wilcoxon_verdict(&set(&b), &set(&a), 0.05).unwrap(), Verdict::Minus);
        assert_eq!(wilcoxon_verdict(&set(&a), &set(&a), 0.05).unwrap(), Verdict::Equals);
    }

    #[test]
    fn two_by_two_cannot_reach_significance() {
        assert!((exact_p(&[1.0, 2.0], &[3.0, 4.0]) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(wilcoxon_verdict(&set(&[1.0, 2.0]), &set(&[3.0, 4.0]), 0.05).unwrap(), Verdict::Equals);
    }

    #[test]
    fn all_tied_is_equals() {
        let t = rank_sum_test(&[2.0; 5], &[2.0; 4]).unwrap();
        assert_eq!(t.p_two_sided, 1.0);
        assert_eq!(wilcoxon_verdict(&set(&[2.0; 5]), &set(&[2.0; 4]), 0.05).unwrap(), Verdict::Equals);
    }

    #[test]
    fn worst_sentinel_ranks_last() {
        let a = set(&[crate::WORST; 6]);
        let b = set(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(wilcoxon_verdict(&b, &a, 0.05).unwrap(), Verdict::Plus);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(SampleSet::new(vec![]).is_err());
        assert!(SampleSet::new(vec![f64::NAN]).is_err());
        assert!(rank_sum_test(&[], &[1.0]).is_err());
        assert!(wilcoxon_verdict(&set(&[1.0]), &set(&[2.0]), 0.0).is_err());
    }

    #[test]
    fn verdicts_match_exact_enumeration_without_ties() {
        // Every split of ranks 1..=m+n between the samples, for all m, n in 2..=8.
        for m in 2..=8usize {
            for n in 2..=8usize {
                let total = m + n;
                let splits: Vec<u32> = (0u32..(1 << total)).filter(|x| x.count_ones() as usize == m).collect();
                // Null distribution of the rank sum (ranks 1..=total).
                let sums: Vec<usize> = splits
                    .iter()
                    .map(|mask| (0..total).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).sum())
                    .collect();
                let expected = m as f64 * (total as f64 + 1.0) / 2.0;
                for (mask, &w) in splits.iter().zip(&sums) {
                    let dev = (w as f64 - expected).abs();
                    let hits = sums.iter().filter(|&&v| (v as f64 - expected).abs() >= dev).count();
                    let p = hits as f64 / sums.len() as f64;
                    if (p - 0.05).abs() <= 0.01 {
                        continue;
                    }
                    let (a, b): (Vec<f64>, Vec<f64>) = {
                        let (x, y): (Vec<usize>, Vec<usize>) = (0..total).partition(|i| mask & (1 << i) != 0);
                        (x.into_iter().map(|i| i as f64).collect(), y.into_iter().map(|i| i as f64).collect())
                    };
                    let t = rank_sum_test(&a, &b).unwrap();
                    assert_eq!(t.p_two_sided < 0.05, p < 0.05, "m={m} n={n} {a:?} exact {p}");
                }
            }
        }
    }

    #[test]
    fn heavy_ties_rarely_disagree_with_exact_enumeration() {
        // Midrank sums move in half steps, so the continuity correction is
        // slightly conservative here.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (mut checked, mut mismatches) = (0, 0);
        for _ in 0..3000 {
            let m = rng.random_range(2..=7);
            let n = rng.random_range(2..=7);
            let a: Vec<f64> = (0..m).map(|_| rng.random_range(0..5) as f64).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(0..5) as f64).collect();
            let p = exact_p(&a, &b);
            if (p - 0.05).abs() <= 0.01 {
                continue;
            }
            checked += 1;
            if (rank_sum_test(&a, &b).unwrap().p_two_sided < 0.05) != (p < 0.05) {
                mismatches += 1;
            }
        }
        assert!(checked > 2000);
        assert!(mismatches * 100 <= checked, "{mismatches}/{checked}");
    }

    #[test]
    fn rank_scores_simple_cases() {
        let r = rank_scores(&[vec![1.0, 0.5, 2.0], vec![3.0, 0.6, 9.0]]).unwrap();
        assert_eq!(r, vec![2.0, 1.0]);
        let r = rank_scores(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(r, vec![2.0; 3]);
        assert!(rank_scores(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn rank_scores_match_sorting_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (n_a, n_p) = (10, 30);
        // Few distinct values so ties occur.
        let means: Vec<Vec<f64>> =
            (0..n_a).map(|_| (0..n_p).map(|_| rng.random_range(0..6) as f64).collect()).collect();
        let got = rank_scores(&means).unwrap();
        let mut oracle = vec![0.0; n_a];
        for p in 0..n_p {
            for a in 0..n_a {
                // Score = N_A - (#strictly better) - (#tied others) / 2.
                let better = (0..n_a).filter(|&b| means[b][p] < means[a][p]).count();
                let tied = (0..n_a).filter(|&b| b != a && means[b][p] == means[a][p]).count();
                oracle[a] += n_a as f64 - better as f64 - tied as f64 / 2.0;
            }
        }
        for a in 0..n_a {
            assert!((got[a] - oracle[a] / n_p as f64).abs() < 1e-12);
        }
        let total: f64 = got.iter().sum();
        assert!((total - (n_a * (n_a + 1)) as f64 / 2.0).abs() < 1e-9);
    }

    #[test]
    fn holm_denominator_value() {
        assert!((holm_denominator(10, 30) - 0.781_735).abs() < 1e-6);
    }

    #[test]
    fn holm_equal_ranks() {
        let rows = holm_procedure(&[5.0, 5.0], &["ref", "other"], 0, 30, 0.05).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].z, 0.0);
        assert_eq!(rows[0].p, 0.5);
        assert_eq!(rows[0].hypothesis, Hypothesis::Accepted);
        assert_eq!(rows[0].j_index, 1);
        assert_eq!(rows[0].threshold, 0.05);
    }

    #[test]
    fn holm_step_down_stops_at_first_acceptance() {
        // p-values 0.001, 0.04 (fails 0.05/2), 0.045 (< 0.05 but after a failure).
        let zs = [-3.090_232_306, -1.750_686_071, -1.695_397_710];
        let d = holm_denominator(4, 30);
        let ranks = [5.0, 5.0 + zs[0] * d, 5.0 + zs[1] * d, 5.0 + zs[2] * d];
        let rows = holm_procedure(&ranks, &["r", "a", "b", "c"], 0, 30, 0.05).unwrap();
        assert_eq!(rows.iter().map(|r| r.j_index).collect::<Vec<_>>(), vec![3, 2, 1]);
        assert_eq!(rows[0].hypothesis, Hypothesis::Rejected);
        assert_eq!(rows[1].hypothesis, Hypothesis::Accepted);
        assert!(rows[2].p < rows[2].threshold);
        assert_eq!(rows[2].hypothesis, Hypothesis::Accepted);
    }

    #[test]
    fn holm_validation() {
        assert!(holm_procedure(&[1.0], &["a"], 0, 30, 0.05).is_err());
        assert!(holm_procedure(&[1.0, 2.0], &["a", "b"], 2, 30, 0.05).is_err());
        assert!(holm_procedure(&[1.0, 2.0], &["a", "b"], 0, 0, 0.05).is_err());
        assert!(holm_procedure(&[1.0, 2.0], &["a"], 0, 30, 0.05).is_err());
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        let v = normal_cdf(1.959_963_984_540_054);
        assert!((v - 0.975).abs() < 1e-12, "{v}");
        // Far tail is computed from erfc, not 1 - erf.
        assert!((normal_cdf(-8.0) / 6.220_960_574_271_785e-16 - 1.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn verdict_antisymmetry(
            a in prop::collection::vec(-1e3f64..1e3, 2..20),
            b in prop::collection::vec(-1e3f64..1e3, 2..20),
        ) {
            let ab = wilcoxon_verdict(&set(&a), &set(&b), 0.05).unwrap();
            let ba = wilcoxon_verdict(&set(&b), &set(&a), 0.05).unwrap();
            let flipped = match ab { Verdict::Plus => Verdict::Minus, Verdict::Minus => Verdict::Plus, v => v };
            prop_assert_eq!(ba, flipped);
        }

        #[test]
        fn verdict_invariant_under_monotone_transform(
            a in prop::collection::vec(-5f64..5.0, 2..15),
            b in prop::collection::vec(-5f64..5.0, 2..15),
        ) {
            let g = |v: &[f64]| v.iter().map(|x| x.exp() * 3.0 - 1.0).collect::<Vec<_>>();
            let before = wilcoxon_verdict(&set(&a), &set(&b), 0.05).unwrap();
            let after = wilcoxon_verdict(&set(&g(&a)), &set(&g(&b)), 0.05).unwrap();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn rank_scores_invariant_under_monotone_transform(
            means in prop::collection::vec(prop::collection::vec(-10f64..10.0, 6), 2..8),
        ) {
            let moved: Vec<Vec<f64>> = means.iter()
                .map(|r| r.iter().enumerate().map(|(p, v)| v.powi(3) * (p + 1) as f64 + p as f64).collect())
                .collect();
            prop_assert_eq!(rank_scores(&means).unwrap(), rank_scores(&moved).unwrap());
        }

        #[test]
        fn holm_thresholds_increase_and_step_down(
            ranks in prop::collection::vec(1f64..10.0, 2..12),
        ) {
            let labels: Vec<String> = (0..ranks.len()).map(|i| format!("a{i}")).collect();
            let rows = holm_procedure(&ranks, &labels, 0, 30, 0.05).unwrap();
            for w in rows.windows(2) {
                prop_assert!(w[0].threshold < w[1].threshold);
                prop_assert!(w[0].p <= w[1].p);
                if w[0].hypothesis == Hypothesis::Accepted {
                    prop_assert_eq!(w[1].hypothesis, Hypothesis::Accepted);
                }
            }
            for r in &rows {
                prop_assert!((0.0..=1.0).contains(&r.p));
                if r.hypothesis == Hypothesis::Rejected {
                    prop_assert!(r.p < r.threshold);
                }
            }
        }
    }
}
