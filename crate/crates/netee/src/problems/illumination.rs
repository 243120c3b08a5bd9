use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::genome::Genotype;
use crate::topology::NodeId;

use super::{Direction, Problem};

pub const HOURS: usize = 24;

/// Range of the single illumination parameter; one full sine period.
pub const SINGLE_PARAM_RANGE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IlluminationMode {
    /// One phase parameter in `[0, 50]` per agent.
    SingleParam,
    /// One light level in `[0, 1]` per hour.
    Vector,
}

/// Desired light level at column `j` of an `n`-column grid and hour `t`,
/// scaled to `[0, 1]`.
pub fn illumination_truth(n: usize, j: usize, t: usize) -> f64 {
    let phase = 2.0 * PI * j as f64 / n as f64 + 2.0 * PI * t as f64 / HOURS as f64;
    (phase.sin() + 1.0) / 2.0
}

/// Light produced by a single-parameter agent at hour `t`, on the same
/// `[0, 1]` scale as the truth.
fn single_output(x: f64, t: usize) -> f64 {
    let phase = 2.0 * PI * x / SINGLE_PARAM_RANGE + 2.0 * PI * t as f64 / HOURS as f64;
    (phase.sin() + 1.0) / 2.0
}

pub fn illumination_single_fitness(g: &Genotype, j: usize, n: usize) -> Result<f64> {
    if g.len() != 1 {
        return Err(Error::LengthMismatch {
            expected: 1,
            actual: g.len(),
        });
    }
    let x = g.values()[0];
    let total: f64 = (0..HOURS)
        .map(|t| (illumination_truth(n, j, t) - single_output(x, t)).abs())
        .sum();
    Ok(total / HOURS as f64)
}

pub fn illumination_vector_fitness(g: &Genotype, j: usize, n: usize) -> Result<f64> {
    if g.len() != HOURS {
        return Err(Error::LengthMismatch {
            expected: HOURS,
            actual: g.len(),
        });
    }
    let total: f64 = g
        .values()
        .iter()
        .enumerate()
        .map(|(t, x)| (illumination_truth(n, j, t) - x).abs())
        .sum();
    Ok(total / HOURS as f64)
}

#[derive(Debug, Clone)]
pub struct IlluminationProblem {
    rows: usize,
    cols: usize,
    mode: IlluminationMode,
}

impl IlluminationProblem {
    pub fn new(rows: usize, cols: usize, mode: IlluminationMode) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidProblem("illumination grid must be non-empty".into()));
        }
        Ok(Self { rows, cols, mode })
    }

    pub fn mode(&self) -> IlluminationMode {
        self.mode
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Parameter value that reproduces the truth exactly in column `j`
    /// (single-parameter mode).
    pub fn optimal_param(&self, j: usize) -> f64 {
        SINGLE_PARAM_RANGE * j as f64 / self.cols as f64
    }

    fn column(&self, node: NodeId) -> Result<usize> {
        if node.index() >= self.rows * self.cols {
            return Err(Error::NodeOutOfRange {
                index: node.index(),
                count: self.rows * self.cols,
            });
        }
        Ok(node.index() % self.cols)
    }
}

impl Problem for IlluminationProblem {
    fn node_count(&self) -> usize {
        self.rows * self.cols
    }

    fn genome_len(&self) -> usize {
        match self.mode {
            IlluminationMode::SingleParam => 1,
            IlluminationMode::Vector => HOURS,
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match self.mode {
            IlluminationMode::SingleParam => (0.0, SINGLE_PARAM_RANGE),
            IlluminationMode::Vector => (0.0, 1.0),
        }
    }

    fn direction(&self) -> Direction {
        Direction::Minimize
    }

    fn evaluate(&self, node: NodeId, genotype: &Genotype) -> Result<f64> {
        let j = self.column(node)?;
        match self.mode {
            IlluminationMode::SingleParam => illumination_single_fitness(genotype, j, self.cols),
            IlluminationMode::Vector => illumination_vector_fitness(genotype, j, self.cols),
        }
    }

    fn phenotype_frame(&self, genotypes: &[Genotype], t: usize) -> Option<Result<Frame>> {
        Some((|| {
            if t >= HOURS {
                return Err(Error::InvalidProblem(format!("hour {t} out of range")));
            }
            if genotypes.len() != self.node_count() {
                return Err(Error::LengthMismatch {
                    expected: self.node_count(),
                    actual: genotypes.len(),
                });
            }
            let data = genotypes
                .iter()
                .map(|g| match self.mode {
                    IlluminationMode::SingleParam => single_output(g.values()[0], t),
                    IlluminationMode::Vector => g.values()[t],
                })
                .collect();
            Frame::new(self.rows, self.cols, data)
        })())
    }

    fn truth_frame(&self, t: usize) -> Option<Result<Frame>> {
        if t >= HOURS {
            return Some(Err(Error::InvalidProblem(format!("hour {t} out of range"))));
        }
        let data = (0..self.rows * self.cols)
            .map(|k| illumination_truth(self.cols, k % self.cols, t))
            .collect();
        Some(Frame::new(self.rows, self.cols, data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(x: f64) -> Genotype {
        Genotype::new(vec![x], 0.0, SINGLE_PARAM_RANGE).unwrap()
    }

    #[test]
    fn truth_landmarks() {
        assert!((illumination_truth(50, 0, 0) - 0.5).abs() < 1e-15);
        assert!((illumination_truth(50, 0, 6) - 1.0).abs() < 1e-15);
        assert!(illumination_truth(50, 0, 18).abs() < 1e-15);
    }

    #[test]
    fn single_param_optimum_and_period() {
        for j in 0..50 {
            assert_eq!(illumination_single_fitness(&single(j as f64), j, 50).unwrap(), 0.0);
        }
        // x = j + 50 lies outside the range except for j = 0, where it hits ub.
        assert!(illumination_single_fitness(&single(50.0), 0, 50).unwrap() < 1e-12);
    }

    #[test]
    fn single_param_antiphase_matches_direct_sum() {
        for j in [0usize, 3, 10, 25] {
            let x = j as f64 + 25.0;
            let mut oracle = 0.0;
            for t in 0..24 {
                let base = 2.0 * PI * t as f64 / 24.0;
                let truth = ((2.0 * PI * j as f64 / 50.0 + base).sin() + 1.0) / 2.0;
                let agent = ((2.0 * PI * x / 50.0 + base).sin() + 1.0) / 2.0;
                oracle += (truth - agent).abs();
            }
            oracle /= 24.0;
            let got = illumination_single_fitness(&single(x), j, 50).unwrap();
            assert!((got - oracle).abs() < 1e-12);
            // Antiphase: |sin - (-sin)| / 2 = |sin|, averaged over 24 hours.
            assert!(got > 0.6 && got < 0.65, "{got}");
        }
    }

    #[test]
    fn vector_fitness() {
        let truth: Vec<f64> = (0..24).map(|t| illumination_truth(20, 7, t)).collect();
        let g = Genotype::new(truth, 0.0, 1.0).unwrap();
        assert_eq!(illumination_vector_fitness(&g, 7, 20).unwrap(), 0.0);

        let half = Genotype::new(vec![0.5; 24], 0.0, 1.0).unwrap();
        let oracle: f64 = (0..24)
            .map(|t| (((2.0 * PI * t as f64 / 24.0).sin() + 1.0) / 2.0 - 0.5).abs())
            .sum::<f64>()
            / 24.0;
        assert!((illumination_vector_fitness(&half, 0, 20).unwrap() - oracle).abs() < 1e-12);

        let short = Genotype::new(vec![0.5; 23], 0.0, 1.0).unwrap();
        assert!(matches!(
            illumination_vector_fitness(&short, 0, 20),
            Err(Error::LengthMismatch {
                expected: 24,
                actual: 23
            })
        ));
    }

    #[test]
    fn optimal_param_scales_with_columns() {
        let p = IlluminationProblem::new(10, 20, IlluminationMode::SingleParam).unwrap();
        for j in 0..20 {
            let g = single(p.optimal_param(j));
            assert!(p.evaluate(NodeId(3 * 20 + j), &g).unwrap() < 1e-12);
        }
    }

    #[test]
    fn snapshot_at_optimum_equals_truth() {
        let p = IlluminationProblem::new(3, 50, IlluminationMode::SingleParam).unwrap();
        let gs: Vec<Genotype> = (0..150).map(|k| single((k % 50) as f64)).collect();
        for t in [0, 7, 15] {
            let got = p.phenotype_frame(&gs, t).unwrap().unwrap();
            let want = p.truth_frame(t).unwrap().unwrap();
            for (a, b) in got.data.iter().zip(&want.data) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
