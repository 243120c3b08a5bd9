use crate::data::IdxImageSet;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::genome::Genotype;
use crate::topology::NodeId;

use super::{Direction, Problem};

/// Agents on a grid reproduce a sequence of grayscale frames. With `tile = 1`
/// each agent owns one pixel; with larger tiles each agent owns a
/// `tile`×`tile` block.
///
/// Gene layout for an agent: index `t * tile² + local_row * tile + local_col`.
#[derive(Debug, Clone)]
pub struct ImitationProblem {
    images: Vec<Frame>,
    tile: usize,
    agent_rows: usize,
    agent_cols: usize,
    truth: Vec<Vec<f64>>,
}

impl ImitationProblem {
    pub fn new(images: Vec<Frame>, tile: usize) -> Result<Self> {
        let first = images
            .first()
            .ok_or_else(|| Error::InvalidProblem("imitation needs at least one image".into()))?;
        let (rows, cols) = (first.rows, first.cols);
        if images.iter().any(|f| f.rows != rows || f.cols != cols) {
            return Err(Error::InvalidProblem("images differ in size".into()));
        }
        if tile == 0 || rows % tile != 0 || cols % tile != 0 {
            return Err(Error::InvalidProblem(format!(
                "tile {tile} does not divide image size {rows}x{cols}"
            )));
        }
        if images.iter().flat_map(|f| &f.data).any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidProblem("pixel values must lie in [0, 1]".into()));
        }
        let (agent_rows, agent_cols) = (rows / tile, cols / tile);
        let mut truth = Vec::with_capacity(agent_rows * agent_cols);
        for ar in 0..agent_rows {
            for ac in 0..agent_cols {
                let mut genes = Vec::with_capacity(tile * tile * images.len());
                for img in &images {
                    for lr in 0..tile {
                        for lc in 0..tile {
                            genes.push(img.get(ar * tile + lr, ac * tile + lc));
                        }
                    }
                }
                truth.push(genes);
            }
        }
        Ok(Self {
            images,
            tile,
            agent_rows,
            agent_cols,
            truth,
        })
    }

    /// First `count` images of an IDX set, optionally average-pooled by
    /// `downsample` before tiling.
    pub fn from_idx(set: &IdxImageSet, count: usize, downsample: usize, tile: usize) -> Result<Self> {
        if count == 0 || count > set.count() {
            return Err(Error::InvalidProblem(format!(
                "requested {count} images from a set of {}",
                set.count()
            )));
        }
        let frames = (0..count)
            .map(|i| {
                let f = set.frame(i)?;
                if downsample > 1 {
                    f.downsample(downsample)
                } else {
                    Ok(f)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(frames, tile)
    }

    pub fn tile(&self) -> usize {
        self.tile
    }

    pub fn frames(&self) -> usize {
        self.images.len()
    }

    /// (rows, cols) of the agent grid.
    pub fn agent_grid(&self) -> (usize, usize) {
        (self.agent_rows, self.agent_cols)
    }

    /// Ground-truth genotype of every agent, row-major.
    pub fn optimal_genotypes(&self) -> &[Vec<f64>] {
        &self.truth
    }

    fn truth_of(&self, node: NodeId) -> Result<&[f64]> {
        self.truth
            .get(node.index())
            .map(Vec::as_slice)
            .ok_or(Error::NodeOutOfRange {
                index: node.index(),
                count: self.truth.len(),
            })
    }
}

/// Mean absolute error between an agent's genes and its pixels over all frames.
pub fn imitation_fitness(p: &ImitationProblem, node: NodeId, g: &Genotype) -> Result<f64> {
    let truth = p.truth_of(node)?;
    if g.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: g.len(),
        });
    }
    let total: f64 = truth.iter().zip(g.values()).map(|(a, b)| (a - b).abs()).sum();
    Ok(total / truth.len() as f64)
}

impl Problem for ImitationProblem {
    fn node_count(&self) -> usize {
        self.truth.len()
    }

    fn genome_len(&self) -> usize {
        self.tile * self.tile * self.images.len()
    }

    fn bounds(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn direction(&self) -> Direction {
        Direction::Minimize
    }

    fn evaluate(&self, node: NodeId, genotype: &Genotype) -> Result<f64> {
        imitation_fitness(self, node, genotype)
    }

    fn phenotype_frame(&self, genotypes: &[Genotype], t: usize) -> Option<Result<Frame>> {
        Some(self.render(genotypes, t))
    }

    fn truth_frame(&self, t: usize) -> Option<Result<Frame>> {
        Some(
            self.images
                .get(t)
                .cloned()
                .ok_or_else(|| Error::InvalidProblem(format!("time index {t} out of range"))),
        )
    }
}

impl ImitationProblem {
    fn render(&self, genotypes: &[Genotype], t: usize) -> Result<Frame> {
        if genotypes.len() != self.truth.len() {
            return Err(Error::LengthMismatch {
                expected: self.truth.len(),
                actual: genotypes.len(),
            });
        }
        if t >= self.images.len() {
            return Err(Error::InvalidProblem(format!("time index {t} out of range")));
        }
        let tile = self.tile;
        let cols = self.agent_cols * tile;
        let mut frame = Frame::zeros(self.agent_rows * tile, cols);
        for (k, g) in genotypes.iter().enumerate() {
            let (ar, ac) = (k / self.agent_cols, k % self.agent_cols);
            for lr in 0..tile {
                for lc in 0..tile {
                    let v = g.values()[t * tile * tile + lr * tile + lc];
                    frame.data[(ar * tile + lr) * cols + ac * tile + lc] = v;
                }
            }
        }
        Ok(frame)
    }
}
