use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Exact null distribution is used when both samples have at most this many
/// observations.
const EXACT_MAX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumTest {
    /// Rank sum of the first sample in the pooled ranking.
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Null hypothesis accepted (`p >= alpha`).
    pub equivalent: bool,
    pub exact: bool,
}

/// Ranks `1..=n` of `values`, averaging over ties.
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
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) test.
///
/// Both samples of size at most 10: exact permutation distribution of the
/// rank sum (midranks on ties). Otherwise: normal approximation with tie
/// and continuity corrections.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<RankSumTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Stats("rank-sum test needs two non-empty samples".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::Stats("samples contain NaN".into()));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let statistic: f64 = ranks[..a.len()].iter().sum();
    let exact = a.len() <= EXACT_MAX && b.len() <= EXACT_MAX;
    let p_value = if exact {
        exact_p(&ranks, a.len(), statistic)
    } else {
        normal_p(&ranks, a.len(), b.len(), statistic)
    };
    Ok(RankSumTest {
        statistic,
        p_value,
        equivalent: p_value >= alpha,
        exact,
    })
}

/// Counts, for every achievable doubled rank sum, the size-`n` subsets of
/// the pooled ranks attaining it.
fn exact_p(ranks: &[f64], n: usize, statistic: f64) -> f64 {
    // Midranks are multiples of 1/2, so doubled ranks are integers.
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    let mut ways = vec![vec![0.0f64; max_sum + 1]; n + 1];
    ways[0][0] = 1.0;
    for &r in &doubled {
        for j in (1..=n).rev() {
            let (lower, upper) = ways.split_at_mut(j);
            for s in (r..=max_sum).rev() {
                upper[0][s] += lower[j - 1][s - r];
            }
        }
    }
    let observed = (2.0 * statistic).round() as usize;
    let dist = &ways[n];
    let total: f64 = dist.iter().sum();
    let below: f64 = dist[..=observed].iter().sum();
    let above: f64 = dist[observed..].iter().sum();
    (2.0 * below.min(above) / total).min(1.0)
}

fn normal_p(ranks: &[f64], n: usize, m: usize, statistic: f64) -> f64 {
    let big_n = (n + m) as f64;
    let mean = n as f64 * (big_n + 1.0) / 2.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n as f64 * m as f64 / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((statistic - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Pairwise equivalence decisions between labelled samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceMatrix {
    pub labels: Vec<String>,
    /// `p[i][j]`, symmetric; the diagonal is 1.
    pub p_values: Vec<Vec<f64>>,
    pub alpha: f64,
}

impl EquivalenceMatrix {
    pub fn equivalent(&self, i: usize, j: usize) -> bool {
        i != j && self.p_values[i][j] >= self.alpha
    }
}

pub fn wilcoxon_matrix(labels: &[String], samples: &[Vec<f64>], alpha: f64) -> Result<EquivalenceMatrix> {
    if labels.len() != samples.len() {
        return Err(Error::Stats("one label per sample required".into()));
    }
    let k = samples.len();
    let mut p_values = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let p = wilcoxon_rank_sum(&samples[i], &samples[j], alpha)?.p_value;
            p_values[i][j] = p;
            p_values[j][i] = p;
        }
    }
    Ok(EquivalenceMatrix {
        labels: labels.to_vec(),
        p_values,
        alpha,
    })
}

/// CSV table with a header row of labels; `=` marks accepted null
/// hypotheses, the diagonal and rejected pairs stay blank.
pub fn emit_matrix(m: &EquivalenceMatrix) -> String {
    let mut out = String::new();
    out.push_str(
        &std::iter::once("")
            .chain(m.labels.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for (i, label) in m.labels.iter().enumerate() {
        out.push_str(label);
        for j in 0..m.labels.len() {
            out.push(',');
            if m.equivalent(i, j) {
                out.push('=');
            }
        }
        out.push('\n');
    }
    out
}
