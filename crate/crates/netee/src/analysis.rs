//! Diagnostics on problem structure: how far each agent's optimal genotype is
//! from its neighbors', and how many genes a crossover exchanges on average.

use crate::data::IdxImageSet;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::problems::ImitationProblem;
use crate::topology::{GridTopology, NodeId};

/// For each grid cell, the mean over Moore neighbors of the mean absolute
/// gene-wise difference between the two cells' optimal genotypes.
pub fn neighbor_distance_map(optimal: &[Vec<f64>], grid: &GridTopology) -> Result<Frame> {
    if optimal.len() != grid.node_count() {
        return Err(Error::LengthMismatch {
            expected: grid.node_count(),
            actual: optimal.len(),
        });
    }
    let len = optimal[0].len();
    if len == 0 || optimal.iter().any(|g| g.len() != len) {
        return Err(Error::InvalidProblem(
            "optimal genotypes must share a non-zero length".into(),
        ));
    }
    let data = (0..grid.node_count())
        .map(|k| {
            let neighbors = grid.moore_neighbors(NodeId(k))?;
            if neighbors.is_empty() {
                return Ok(0.0);
            }
            let total: f64 = neighbors
                .iter()
                .map(|m| {
                    optimal[k]
                        .iter()
                        .zip(&optimal[m.index()])
                        .map(|(a, b)| (a - b).abs())
                        .sum::<f64>()
                        / len as f64
                })
                .sum();
            Ok(total / neighbors.len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Frame::new(grid.rows(), grid.cols(), data)
}

/// Divides every map by the largest value across all of them. Returns that
/// maximum; all-zero inputs are left unchanged.
pub fn normalize_jointly(maps: &mut [Frame]) -> f64 {
    let max = maps.iter().map(Frame::max).fold(0.0, f64::max);
    if max > 0.0 {
        for m in maps.iter_mut() {
            for v in &mut m.data {
                *v /= max;
            }
        }
    }
    max
}

/// Distance map of an imitation problem's ground truth on its agent grid.
pub fn imitation_distance_map(p: &ImitationProblem) -> Result<Frame> {
    let (rows, cols) = p.agent_grid();
    neighbor_distance_map(p.optimal_genotypes(), &GridTopology::new(rows, cols)?)
}

/// Per-pixel and tiled distance maps for the same images, scaled by their
/// common maximum. Returns `(per_pixel, tiled, max)`.
pub fn pixel_vs_tiled_maps(
    set: &IdxImageSet,
    images: usize,
    downsample: usize,
    tile: usize,
) -> Result<(Frame, Frame, f64)> {
    let pixel = imitation_distance_map(&ImitationProblem::from_idx(set, images, downsample, 1)?)?;
    let tiled = imitation_distance_map(&ImitationProblem::from_idx(set, images, downsample, tile)?)?;
    let mut maps = [pixel, tiled];
    let max = normalize_jointly(&mut maps);
    let [pixel, tiled] = maps;
    Ok((pixel, tiled, max))
}

/// Expected number of genes taken from the focal agent per fired uniform
/// crossover.
pub fn expected_exchanged_genes(cr: f64, len: usize) -> f64 {
    cr * len as f64
}

/// Expected exchanged genes per generation, including the crossover gate.
pub fn expected_exchanged_per_generation(cp: f64, cr: f64, len: usize) -> f64 {
    cp * expected_exchanged_genes(cr, len)
}
