use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::problems::Direction;

use super::qtable::nemenyi_q;
use super::wilcoxon::midranks;

/// Final scores of `k` algorithms over `N` blocks (one score per run).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub algorithms: Vec<String>,
    pub samples: Vec<Vec<f64>>,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdResult {
    pub algorithms: Vec<String>,
    /// Average rank per algorithm; 1 is best.
    pub avg_ranks: Vec<f64>,
    pub cd: f64,
    pub alpha: f64,
    pub blocks: usize,
    pub friedman_chi2: f64,
    pub friedman_p: f64,
    /// Maximal runs of rank-sorted algorithms whose rank spread is within
    /// the critical difference; indices into `algorithms`, best first.
    pub groups: Vec<Vec<usize>>,
}

impl CdResult {
    pub fn equivalent(&self, i: usize, j: usize) -> bool {
        (self.avg_ranks[i] - self.avg_ranks[j]).abs() <= self.cd
    }

    /// Algorithm indices ordered by average rank, best first; ties by index.
    pub fn order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.avg_ranks.len()).collect();
        order.sort_by(|&a, &b| self.avg_ranks[a].total_cmp(&self.avg_ranks[b]).then(a.cmp(&b)));
        order
    }
}

pub fn friedman_nemenyi(m: &SampleMatrix, alpha: f64) -> Result<CdResult> {
    let k = m.samples.len();
    if k < 2 || m.algorithms.len() != k {
        return Err(Error::Stats(format!(
            "need at least 2 labelled algorithms, got {k} samples and {} labels",
            m.algorithms.len()
        )));
    }
    let n = m.samples[0].len();
    if m.samples.iter().any(|s| s.len() != n) {
        return Err(Error::Stats("all algorithms need the same number of runs".into()));
    }
    if n < 2 {
        return Err(Error::Stats(format!("need at least 2 blocks, got {n}")));
    }
    if m.samples.iter().flatten().any(|v| v.is_nan()) {
        return Err(Error::Stats("samples contain NaN".into()));
    }
    let q = nemenyi_q(alpha, k)?;

    let mut sums = vec![0.0; k];
    for block in 0..n {
        let scores: Vec<f64> = m
            .samples
            .iter()
            .map(|s| match m.direction {
                Direction::Minimize => s[block],
                Direction::Maximize => -s[block],
            })
            .collect();
        for (acc, r) in sums.iter_mut().zip(midranks(&scores)) {
            *acc += r;
        }
    }
    let avg_ranks: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
    let (kf, nf) = (k as f64, n as f64);
    let cd = q * (kf * (kf + 1.0) / (6.0 * nf)).sqrt();

    let friedman_chi2 = 12.0 * nf / (kf * (kf + 1.0))
        * (avg_ranks.iter().map(|r| r * r).sum::<f64>() - kf * (kf + 1.0) * (kf + 1.0) / 4.0);
    let friedman_p = ChiSquared::new(kf - 1.0)
        .map(|d| d.sf(friedman_chi2.max(0.0)))
        .map_err(|e| Error::Stats(e.to_string()))?;

    let mut result = CdResult {
        algorithms: m.algorithms.clone(),
        avg_ranks,
        cd,
        alpha,
        blocks: n,
        friedman_chi2,
        friedman_p,
        groups: Vec::new(),
    };
    result.groups = cd_groups(&result);
    Ok(result)
}

fn cd_groups(r: &CdResult) -> Vec<Vec<usize>> {
    let order = r.order();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last_end = 0;
    for start in 0..order.len() {
        let mut end = start;
        while end + 1 < order.len() && r.avg_ranks[order[end + 1]] - r.avg_ranks[order[start]] <= r.cd {
            end += 1;
        }
        // Skip singletons and runs nested in the previous one.
        if end > start && end > last_end {
            groups.push(order[start..=end].to_vec());
            last_end = end;
        }
    }
    groups
}

/// Plain-text description of a critical-difference diagram: one `rank` line
/// per algorithm in ascending rank order and one `group` line per thick bar.
pub fn emit_cd_plot_data(cd: &CdResult) -> String {
    let mut out = String::from("# critical difference diagram\n");
    out.push_str(&format!("alpha {}\n", cd.alpha));
    out.push_str(&format!("blocks {}\n", cd.blocks));
    out.push_str(&format!("algorithms {}\n", cd.algorithms.len()));
    out.push_str(&format!("cd {}\n", cd.cd));
    out.push_str(&format!("friedman_chi2 {}\n", cd.friedman_chi2));
    out.push_str(&format!("friedman_p {}\n", cd.friedman_p));
    for i in cd.order() {
        out.push_str(&format!("rank {} {}\n", cd.avg_ranks[i], cd.algorithms[i]));
    }
    for g in &cd.groups {
        let lo = cd.avg_ranks[g[0]];
        let hi = cd.avg_ranks[*g.last().expect("groups are non-empty")];
        let names: Vec<&str> = g.iter().map(|&i| cd.algorithms[i].as_str()).collect();
        out.push_str(&format!("group {lo} {hi} {}\n", names.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(samples: Vec<Vec<f64>>, direction: Direction) -> SampleMatrix {
        SampleMatrix {
            algorithms: (0..samples.len()).map(|i| format!("alg{i}")).collect(),
            samples,
            direction,
        }
    }

    #[test]
    fn dominating_algorithm_ranks_first() {
        let m = matrix(
            vec![
                vec![0.1, 0.2, 0.1, 0.3],
                vec![0.5, 0.6, 0.7, 0.5],
                vec![0.9, 0.4, 0.8, 0.6],
            ],
            Direction::Minimize,
        );
        let r = friedman_nemenyi(&m, 0.05).unwrap();
        assert_eq!(r.avg_ranks[0], 1.0);
        assert_eq!(r.order()[0], 0);

        let mut flipped = m.clone();
        flipped.direction = Direction::Maximize;
        let r = friedman_nemenyi(&flipped, 0.05).unwrap();
        assert_eq!(r.avg_ranks[0], 3.0);
    }

    #[test]
    fn identical_algorithms_form_one_group() {
        let m = matrix(vec![vec![0.3, 0.2, 0.5]; 4], Direction::Minimize);
        let r = friedman_nemenyi(&m, 0.05).unwrap();
        assert!(r.avg_ranks.iter().all(|&x| x == 2.5));
        assert_eq!(r.groups, vec![vec![0, 1, 2, 3]]);
        assert!(r.friedman_chi2.abs() < 1e-12);
    }

    #[test]
    fn two_algorithm_cd() {
        for n in [2usize, 5, 10] {
            let m = matrix(vec![vec![0.0; n], vec![1.0; n]], Direction::Minimize);
            let r = friedman_nemenyi(&m, 0.05).unwrap();
            let want = 1.959964 * (1.0 / n as f64).sqrt();
            assert!((r.cd - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_sums_per_block() {
        let m = matrix(
            vec![vec![1.0, 2.0], vec![1.0, 3.0], vec![2.0, 2.0], vec![0.0, 9.0]],
            Direction::Minimize,
        );
        let r = friedman_nemenyi(&m, 0.05).unwrap();
        let total: f64 = r.avg_ranks.iter().sum();
        assert!((total - 10.0).abs() < 1e-12);
        assert!(r.avg_ranks.iter().all(|&x| (1.0..=4.0).contains(&x)));
    }

    #[test]
    fn grouping_is_symmetric_and_reflexive() {
        let m = matrix(
            vec![
                vec![1.0, 1.0, 2.0, 1.0, 1.0],
                vec![2.0, 3.0, 1.0, 2.0, 2.0],
                vec![3.0, 2.0, 3.0, 3.0, 4.0],
                vec![4.0, 4.0, 4.0, 4.0, 3.0],
            ],
            Direction::Minimize,
        );
        let r = friedman_nemenyi(&m, 0.05).unwrap();
        for i in 0..4 {
            assert!(r.equivalent(i, i));
            for j in 0..4 {
                assert_eq!(r.equivalent(i, j), r.equivalent(j, i));
            }
        }
    }

    #[test]
    fn groups_empty_when_gaps_exceed_cd() {
        // 30 blocks, strict order every time: rank gaps of 1 vs CD ~ 0.6.
        let samples = (0..3).map(|a| vec![a as f64; 30]).collect();
        let r = friedman_nemenyi(&matrix(samples, Direction::Minimize), 0.05).unwrap();
        assert!(r.cd < 1.0);
        assert!(r.groups.is_empty());
        let text = emit_cd_plot_data(&r);
        assert!(!text.contains("group"));
        let ranks: Vec<&str> = text.lines().filter(|l| l.starts_with("rank")).collect();
        assert_eq!(ranks, ["rank 1 alg0", "rank 2 alg1", "rank 3 alg2"]);
    }

    #[test]
    fn single_group_when_cd_covers_everything() {
        // Two blocks: CD is large relative to the rank range k - 1.
        let samples = (0..3).map(|a| vec![a as f64, a as f64]).collect();
        let r = friedman_nemenyi(&matrix(samples, Direction::Minimize), 0.05).unwrap();
        assert!(r.cd >= 2.0);
        assert_eq!(r.groups, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn input_validation() {
        assert!(friedman_nemenyi(&matrix(vec![vec![1.0, 2.0]], Direction::Minimize), 0.05).is_err());
        assert!(friedman_nemenyi(&matrix(vec![vec![1.0, 2.0], vec![1.0]], Direction::Minimize), 0.05).is_err());
        assert!(friedman_nemenyi(&matrix(vec![vec![1.0], vec![2.0]], Direction::Minimize), 0.05).is_err());
        let wide = (0..31).map(|a| vec![a as f64, 1.0]).collect();
        assert!(friedman_nemenyi(&matrix(wide, Direction::Minimize), 0.05).is_err());
    }
}
