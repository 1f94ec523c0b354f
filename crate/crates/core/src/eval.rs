//! Scoring discovered clusters against ground truth: optimal cluster-to-class
//! accuracy, mapped confusion matrix with per-class F-scores, and the
//! Kruskal-Wallis rank test for comparing repeated runs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square confusion grid over the ordered class list: rows are ground truth,
/// columns are mapped predictions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    /// CSV rendering with a header row and a leading truth-label column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("truth\\pred");
        for c in &self.classes {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (name, row) in self.classes.iter().zip(&self.counts) {
            out.push_str(name);
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Accuracy, per-class and macro F-scores, and the cluster-to-class mapping
/// behind them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub per_class_fscore: BTreeMap<String, f64>,
    pub macro_fscore: f64,
    pub mapping: BTreeMap<usize, String>,
}

/// Clustering accuracy under the optimal one-to-one cluster-to-class mapping,
/// found by a Hungarian assignment on the contingency table (padded square
/// with zeros when cluster and class counts differ).
pub fn clustering_accuracy(pred: &[usize], truth: &[String]) -> Result<(f64, BTreeMap<usize, String>)> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { pred: pred.len(), truth: truth.len() });
    }
    if pred.is_empty() {
        return Err(Error::EmptyInput("assignments"));
    }
    let (classes, table) = contingency(pred, truth);
    let n_clusters = table.len();
    let n_classes = classes.len();
    let side = n_clusters.max(n_classes);
    let max_w = table.iter().flatten().copied().max().unwrap_or(0) as i64;
    // Maximize matched counts == minimize (max - count).
    let mut cost = vec![vec![max_w; side]; side];
    for (r, row) in table.iter().enumerate() {
        for (c, &w) in row.iter().enumerate() {
            cost[r][c] = max_w - w as i64;
        }
    }
    let assignment = hungarian_min(&cost);
    let mut mapping = BTreeMap::new();
    let mut matched = 0usize;
    for (cluster, &class) in assignment.iter().enumerate().take(n_clusters) {
        if class < n_classes {
            mapping.insert(cluster, classes[class].clone());
            matched += table[cluster][class];
        }
    }
    Ok((matched as f64 / pred.len() as f64, mapping))
}

/// Contingency table: rows are cluster ids 0..=max(pred), columns are classes
/// in first-appearance order.
fn contingency(pred: &[usize], truth: &[String]) -> (Vec<String>, Vec<Vec<usize>>) {
    let mut classes: Vec<String> = Vec::new();
    let n_clusters = pred.iter().copied().max().unwrap_or(0) + 1;
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n_clusters];
    for (&p, t) in pred.iter().zip(truth) {
        let class = match classes.iter().position(|c| c == t) {
            Some(i) => i,
            None => {
                classes.push(t.clone());
                classes.len() - 1
            }
        };
        for row in &mut rows {
            if row.len() < classes.len() {
                row.resize(classes.len(), 0);
            }
        }
        rows[p][class] += 1;
    }
    for row in &mut rows {
        row.resize(classes.len(), 0);
    }
    (classes, rows)
}

/// Build the mapped confusion matrix and F-scores from a prediction, ground
/// truth, and a cluster-to-class mapping (as produced by
/// [`clustering_accuracy`]). Samples from unmapped clusters land in a
/// synthetic `(unassigned)` column so every sample is counted.
pub fn confusion_and_fscores(
    pred: &[usize],
    truth: &[String],
    mapping: &BTreeMap<usize, String>,
) -> Result<(ConfusionMatrix, MetricsReport)> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { pred: pred.len(), truth: truth.len() });
    }
    if pred.is_empty() {
        return Err(Error::EmptyInput("assignments"));
    }
    let mut classes: Vec<String> = Vec::new();
    for t in truth {
        if !classes.iter().any(|c| c == t) {
            classes.push(t.clone());
        }
    }
    for label in mapping.values() {
        if !classes.iter().any(|c| c == label) {
            classes.push(label.clone());
        }
    }
    let needs_unassigned = pred.iter().any(|p| !mapping.contains_key(p));
    let unassigned = "(unassigned)".to_string();
    if needs_unassigned {
        classes.push(unassigned.clone());
    }
    let real_classes = if needs_unassigned { classes.len() - 1 } else { classes.len() };
    let side = classes.len();
    let mut counts = vec![vec![0usize; side]; side];
    for (&p, t) in pred.iter().zip(truth) {
        let row = classes.iter().position(|c| c == t).expect("truth class present");
        let mapped = mapping.get(&p).unwrap_or(&unassigned);
        let col = classes.iter().position(|c| c == mapped).expect("mapped class present");
        counts[row][col] += 1;
    }

    let mut per_class_fscore = BTreeMap::new();
    let mut macro_sum = 0.0;
    for c in 0..real_classes {
        let tp = counts[c][c];
        let row_sum: usize = counts[c].iter().sum();
        let col_sum: usize = counts.iter().map(|r| r[c]).sum();
        let f = if tp == 0 {
            0.0
        } else {
            let p = tp as f64 / col_sum as f64;
            let r = tp as f64 / row_sum as f64;
            2.0 * p * r / (p + r)
        };
        per_class_fscore.insert(classes[c].clone(), f);
        macro_sum += f;
    }
    let macro_fscore = macro_sum / real_classes as f64;
    let tp_total: usize = (0..side).map(|c| counts[c][c]).sum();
    let accuracy = tp_total as f64 / pred.len() as f64;
    let matrix = ConfusionMatrix { classes, counts };
    let report = MetricsReport { accuracy, per_class_fscore, macro_fscore, mapping: mapping.clone() };
    Ok((matrix, report))
}

/// Hungarian algorithm (potentials formulation) on a square cost matrix;
/// returns the column assigned to each row, minimizing total cost. Exact on
/// integer costs.
pub(crate) fn hungarian_min(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    const INF: i64 = i64::MAX / 4;
    // 1-based potentials over rows (u) and columns (v); way[j] is the column
    // preceding j on the alternating path.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut assigned_row = vec![0usize; n + 1]; // row matched to each column
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        assigned_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = assigned_row[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[assigned_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if assigned_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            assigned_row[j0] = assigned_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0usize; n];
    for j in 1..=n {
        if assigned_row[j] > 0 {
            out[assigned_row[j] - 1] = j - 1;
        }
    }
    out
}

/// Kruskal-Wallis H test across independent groups, with average ranks for
/// ties and the standard tie correction; the p-value uses the chi-square
/// survival function with (groups - 1) degrees of freedom.
///
/// Groups whose values are all identical across the board return (0, 1).
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<(f64, f64)> {
    if groups.len() < 2 {
        return Err(Error::TooFewGroups(groups.len()));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::EmptyInput("group"));
    }
    let n_total: usize = groups.iter().map(|g| g.len()).sum();
    if n_total < 3 {
        return Err(Error::InvalidParams(format!(
            "need at least 3 values overall, got {n_total}"
        )));
    }
    // Joint ranking with average ranks for ties.
    let mut pooled: Vec<(f64, usize)> = Vec::with_capacity(n_total);
    for (g, values) in groups.iter().enumerate() {
        for &v in values {
            if !v.is_finite() {
                return Err(Error::InvalidParams("non-finite value in group".into()));
            }
            pooled.push((v, g));
        }
    }
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sums = vec![0.0; groups.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n_total {
        let mut j = i;
        while j + 1 < n_total && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let run = (j - i + 1) as f64;
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &(_, g) in &pooled[i..=j] {
            rank_sums[g] += avg_rank;
        }
        tie_term += run * run * run - run;
        i = j + 1;
    }
    let n = n_total as f64;
    let tie_denominator = 1.0 - tie_term / (n * n * n - n);
    if tie_denominator == 0.0 {
        // Every value identical: no evidence of any difference.
        return Ok((0.0, 1.0));
    }
    let mut h = -3.0 * (n + 1.0);
    for (g, values) in groups.iter().enumerate() {
        let ng = values.len() as f64;
        h += 12.0 / (n * (n + 1.0)) * rank_sums[g] * rank_sums[g] / ng;
    }
    let h = (h / tie_denominator).max(0.0);
    let df = (groups.len() - 1) as f64;
    let p = chi_square_survival(h, df);
    Ok((h, p))
}

/// Upper tail of the chi-square distribution: P(X > x) with `df` degrees of
/// freedom, via the regularized incomplete gamma function Q(df/2, x/2).
pub fn chi_square_survival(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    reg_gamma_upper(df / 2.0, x / 2.0)
}

/// Regularized upper incomplete gamma Q(a, x): series for x < a + 1,
/// continued fraction otherwise.
fn reg_gamma_upper(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_continued_fraction(a, x)
    }
}

/// Lower regularized incomplete gamma P(a, x) by series expansion.
fn gamma_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Upper regularized incomplete gamma Q(a, x) by Lentz's continued fraction.
fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Lanczos approximation of ln Γ(x) for x > 0.
fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn labels(ids: &[usize]) -> Vec<String> {
        ids.iter().map(|i| format!("c{i}")).collect()
    }

    /// Best matched count over every injective cluster-to-class mapping,
    /// by explicit permutation search.
    fn brute_force_best_match(table: &[Vec<usize>]) -> usize {
        let rows = table.len();
        let cols = table[0].len();
        let side = rows.max(cols);
        let mut perm: Vec<usize> = (0..side).collect();
        let mut best = 0;
        permute(&mut perm, 0, &mut |p| {
            let mut total = 0;
            for (r, &c) in p.iter().enumerate().take(rows) {
                if c < cols {
                    total += table[r][c];
                }
            }
            best = best.max(total);
        });
        best
    }

    fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
        if k == p.len() {
            visit(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, visit);
            p.swap(k, i);
        }
    }

    #[test]
    fn permutation_of_cluster_ids_scores_one() {
        let truth = labels(&[0, 0, 1, 1, 2, 2]);
        let pred = vec![2, 2, 0, 0, 1, 1];
        let (acc, mapping) = clustering_accuracy(&pred, &truth).unwrap();
        assert_eq!(acc, 1.0);
        assert_eq!(mapping[&2], "c0");
        assert_eq!(mapping[&0], "c1");
        assert_eq!(mapping[&1], "c2");
    }

    #[test]
    fn constant_prediction_on_balanced_classes_scores_half() {
        let truth = labels(&[0, 0, 1, 1]);
        let pred = vec![0, 0, 0, 0];
        let (acc, _) = clustering_accuracy(&pred, &truth).unwrap();
        assert_eq!(acc, 0.5);
    }

    #[test]
    fn three_by_three_matches_exhaustive_search() {
        // pred cluster ids and truth chosen to make an asymmetric table.
        let pred = vec![0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 2];
        let truth = labels(&[0, 0, 1, 1, 1, 2, 0, 2, 2, 2, 0, 1]);
        let (acc, _) = clustering_accuracy(&pred, &truth).unwrap();
        let (_, table) = super::contingency(&pred, &truth);
        let best = brute_force_best_match(&table);
        assert_eq!(acc, best as f64 / pred.len() as f64);
    }

    #[test]
    fn random_tables_match_exhaustive_search_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let k = rng.gen_range(1..=5);
            let classes = rng.gen_range(1..=5);
            let n = rng.gen_range(k.max(classes)..40);
            let pred: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let truth: Vec<String> =
                (0..n).map(|_| format!("c{}", rng.gen_range(0..classes))).collect();
            let (acc, mapping) = clustering_accuracy(&pred, &truth).unwrap();
            let (_, table) = super::contingency(&pred, &truth);
            let best = brute_force_best_match(&table);
            assert_eq!(
                acc,
                best as f64 / n as f64,
                "pred {pred:?} truth {truth:?}"
            );
            // Injectivity of the mapping.
            let mut seen: Vec<&String> = mapping.values().collect();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), mapping.len());
        }
    }

    #[test]
    fn accuracy_at_least_largest_class_share() {
        let truth = labels(&[0, 0, 0, 0, 0, 1, 1, 2]);
        let pred = vec![0; 8];
        let (acc, _) = clustering_accuracy(&pred, &truth).unwrap();
        assert!(acc >= 5.0 / 8.0);
    }

    #[test]
    fn perfect_prediction_gives_unit_fscores_and_diagonal_matrix() {
        let truth = labels(&[0, 1, 2, 0, 1, 2]);
        let pred = vec![0, 1, 2, 0, 1, 2];
        let (acc, mapping) = clustering_accuracy(&pred, &truth).unwrap();
        assert_eq!(acc, 1.0);
        let (matrix, report) = confusion_and_fscores(&pred, &truth, &mapping).unwrap();
        assert_eq!(matrix.total(), 6);
        for (r, row) in matrix.counts.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(v, if r == c { 2 } else { 0 });
            }
        }
        assert!(report.per_class_fscore.values().all(|&f| f == 1.0));
        assert_eq!(report.macro_fscore, 1.0);
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn never_predicted_class_scores_zero() {
        // Three classes, predictions collapse c2 into c0's cluster.
        let truth = labels(&[0, 0, 0, 1, 1, 2]);
        let pred = vec![0, 0, 0, 1, 1, 0];
        let (_, mapping) = clustering_accuracy(&pred, &truth).unwrap();
        let (_, report) = confusion_and_fscores(&pred, &truth, &mapping).unwrap();
        assert_eq!(report.per_class_fscore["c2"], 0.0);
    }

    #[test]
    fn fixture_matrix_matches_hand_computed_scores() {
        // Contingency after mapping:      pred c0  c1
        //                      truth c0        3   1
        //                      truth c1        1   2
        let truth = labels(&[0, 0, 0, 0, 1, 1, 1]);
        let pred = vec![0, 0, 0, 1, 0, 1, 1];
        let (acc, mapping) = clustering_accuracy(&pred, &truth).unwrap();
        assert!((acc - 5.0 / 7.0).abs() < 1e-12);
        let (matrix, report) = confusion_and_fscores(&pred, &truth, &mapping).unwrap();
        assert_eq!(matrix.counts, vec![vec![3, 1], vec![1, 2]]);
        // c0: P = 3/4, R = 3/4 -> F = 3/4. c1: P = 2/3, R = 2/3 -> F = 2/3.
        assert!((report.per_class_fscore["c0"] - 0.75).abs() < 1e-12);
        assert!((report.per_class_fscore["c1"] - 2.0 / 3.0).abs() < 1e-12);
        assert!((report.macro_fscore - (0.75 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
        // Row sums = class counts; column sums = mapped prediction counts.
        assert_eq!(matrix.counts[0].iter().sum::<usize>(), 4);
        assert_eq!(matrix.counts[1].iter().sum::<usize>(), 3);
        assert_eq!(matrix.counts.iter().map(|r| r[0]).sum::<usize>(), 4);
        assert_eq!(matrix.counts.iter().map(|r| r[1]).sum::<usize>(), 3);
    }

    #[test]
    fn surplus_clusters_land_in_the_unassigned_column() {
        let truth = labels(&[0, 0, 1, 1, 0]);
        let pred = vec![0, 0, 1, 1, 2];
        let (_, mapping) = clustering_accuracy(&pred, &truth).unwrap();
        assert_eq!(mapping.len(), 2);
        let (matrix, report) = confusion_and_fscores(&pred, &truth, &mapping).unwrap();
        assert_eq!(matrix.total(), 5);
        assert!(matrix.classes.iter().any(|c| c == "(unassigned)"));
        assert!(!report.per_class_fscore.contains_key("(unassigned)"));
    }

    #[test]
    fn hungarian_solves_reference_matrices() {
        // Classic fixtures with known assignments.
        let m = vec![
            vec![250, 400, 350],
            vec![400, 600, 350],
            vec![200, 400, 250],
        ];
        let a = hungarian_min(&m);
        let cost: i64 = a.iter().enumerate().map(|(r, &c)| m[r][c]).sum();
        assert_eq!(cost, 400 + 350 + 200);
        let m = vec![
            vec![10, 19, 8, 15, 19],
            vec![10, 18, 7, 17, 19],
            vec![13, 16, 9, 14, 19],
            vec![12, 19, 8, 18, 19],
            vec![14, 17, 10, 19, 19],
        ];
        let a = hungarian_min(&m);
        let cost: i64 = a.iter().enumerate().map(|(r, &c)| m[r][c]).sum();
        assert_eq!(cost, 10 + 7 + 14 + 19 + 17);
    }

    #[test]
    fn kruskal_wallis_reference_case() {
        // {1,2,3} vs {10,11,12}: ranks split cleanly, H = 27/7,
        // p = chi2_sf(27/7, 1) ~ 0.049535 (reference value from the
        // closed-form erfc identity checked below).
        let (h, p) = kruskal_wallis(&[vec![1.0, 2.0, 3.0], vec![10.0, 11.0, 12.0]]).unwrap();
        assert!((h - 27.0 / 7.0).abs() < 1e-12, "H = {h}");
        assert!((p - 0.0495346134).abs() < 1e-3, "p = {p}");
    }

    #[test]
    fn identical_groups_give_h_zero_p_one() {
        let g = vec![0.4, 0.6, 0.5, 0.7];
        let (h, p) = kruskal_wallis(&[g.clone(), g]).unwrap();
        assert_eq!(h, 0.0);
        assert_eq!(p, 1.0);
        // Fully constant data exercises the tie-degenerate path.
        let (h, p) = kruskal_wallis(&[vec![2.0; 5], vec![2.0; 4]]).unwrap();
        assert_eq!(h, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn chi_square_survival_matches_closed_forms() {
        // df = 2: P(X > x) = exp(-x/2) exactly.
        for x in [0.1, 0.5, 1.0, 3.0, 8.0, 20.0] {
            let want = (-x / 2.0f64).exp();
            let got = chi_square_survival(x, 2.0);
            assert!((got - want).abs() < 1e-12, "x = {x}: {got} vs {want}");
        }
        // df = 1: P(X > x) = erfc(sqrt(x/2)), with erfc evaluated by an
        // independent series/continued-fraction-free numerical integral.
        for x in [0.5, 1.0, 27.0 / 7.0, 6.0] {
            let z = (x / 2.0f64).sqrt();
            let want = erfc_by_quadrature(z);
            let got = chi_square_survival(x, 1.0);
            assert!((got - want).abs() < 1e-9, "x = {x}: {got} vs {want}");
        }
    }

    /// erfc(z) = 2/sqrt(pi) * integral_z^inf exp(-t^2) dt by Simpson's rule
    /// on a truncated interval; independent of the incomplete-gamma code.
    fn erfc_by_quadrature(z: f64) -> f64 {
        let upper = z + 12.0;
        let n = 20_000;
        let hstep = (upper - z) / n as f64;
        let f = |t: f64| (-t * t).exp();
        let mut sum = f(z) + f(upper);
        for i in 1..n {
            let t = z + i as f64 * hstep;
            sum += f(t) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = sum * hstep / 3.0;
        2.0 / std::f64::consts::PI.sqrt() * integral
    }

    #[test]
    fn null_distribution_rarely_rejects() {
        // Three groups from one distribution: over seeded trials the test
        // should stay above 0.05 about 95% of the time.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 200;
        let mut non_rejections = 0;
        for _ in 0..trials {
            let groups: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..10).map(|_| rng.gen_range(0.0..1.0)).collect())
                .collect();
            let (_, p) = kruskal_wallis(&groups).unwrap();
            if p > 0.05 {
                non_rejections += 1;
            }
        }
        assert!(
            (170..=200).contains(&non_rejections),
            "non-rejections: {non_rejections}/{trials}"
        );
    }

    #[test]
    fn argument_validation() {
        assert!(kruskal_wallis(&[vec![1.0]]).is_err());
        assert!(kruskal_wallis(&[vec![1.0], vec![]]).is_err());
        assert!(kruskal_wallis(&[vec![1.0], vec![2.0]]).is_err());
        assert!(clustering_accuracy(&[0], &labels(&[0, 1])).is_err());
        assert!(clustering_accuracy(&[], &[]).is_err());
    }

    proptest! {
        #[test]
        fn accuracy_invariant_under_relabeling(
            pred in proptest::collection::vec(0usize..4, 8..40),
            truth_ids in proptest::collection::vec(0usize..4, 8..40),
            shift in 1usize..4,
        ) {
            let n = pred.len().min(truth_ids.len());
            let pred = &pred[..n];
            let truth = labels(&truth_ids[..n]);
            let (acc, _) = clustering_accuracy(pred, &truth).unwrap();
            // Permute cluster ids cyclically.
            let permuted: Vec<usize> = pred.iter().map(|&p| (p + shift) % 4).collect();
            let (acc2, _) = clustering_accuracy(&permuted, &truth).unwrap();
            prop_assert!((acc - acc2).abs() < 1e-12);
            // Permute class identities too.
            let renamed: Vec<String> = truth_ids[..n]
                .iter()
                .map(|&t| format!("c{}", (t + shift) % 4))
                .collect();
            let (acc3, _) = clustering_accuracy(pred, &renamed).unwrap();
            prop_assert!((acc - acc3).abs() < 1e-12);
        }

        #[test]
        fn kruskal_wallis_invariant_under_monotone_transforms(
            a in proptest::collection::vec(0.0f64..10.0, 4..12),
            b in proptest::collection::vec(0.0f64..10.0, 4..12),
        ) {
            let (h0, p0) = kruskal_wallis(&[a.clone(), b.clone()]).unwrap();
            let fa: Vec<f64> = a.iter().map(|&x| (0.7 * x).exp() + 3.0).collect();
            let fb: Vec<f64> = b.iter().map(|&x| (0.7 * x).exp() + 3.0).collect();
            let (h1, p1) = kruskal_wallis(&[fa, fb]).unwrap();
            prop_assert!((h0 - h1).abs() < 1e-9);
            prop_assert!((p0 - p1).abs() < 1e-9);
        }
    }
}
