//! Benchmark problem families. Each implements [`Problem`], a per-agent
//! fitness evaluator over a fixed set of nodes.

mod ffnn;
mod illumination;
mod imitation;

pub use ffnn::{ffnn_accuracy, ffnn_forward, ffnn_outputs, FfnnArch, FfnnProblem, NodeWindows, Task, Window};
pub use illumination::{
    illumination_single_fitness, illumination_truth, illumination_vector_fitness, IlluminationMode,
    IlluminationProblem, HOURS, SINGLE_PARAM_RANGE,
};
pub use imitation::{imitation_fitness, ImitationProblem};

use crate::error::Result;
use crate::frame::Frame;
use crate::genome::Genotype;
use crate::topology::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// Whether `candidate` is strictly better than `incumbent`.
    pub fn improves(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Direction::Minimize => candidate < incumbent,
            Direction::Maximize => candidate > incumbent,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Minimize => "minimize",
            Direction::Maximize => "maximize",
        }
    }
}

pub trait Problem: Sync {
    fn node_count(&self) -> usize;

    fn genome_len(&self) -> usize;

    /// Gene range `[lb, ub]`.
    fn bounds(&self) -> (f64, f64);

    fn direction(&self) -> Direction;

    fn evaluate(&self, node: NodeId, genotype: &Genotype) -> Result<f64>;

    /// Held-out score for problems that have one (FFNN test accuracy).
    fn test_score(&self, _node: NodeId, _genotype: &Genotype) -> Option<Result<f64>> {
        None
    }

    /// Grid of per-agent phenotype values at time index `t`, for problems
    /// laid out on a grid.
    fn phenotype_frame(&self, _genotypes: &[Genotype], _t: usize) -> Option<Result<Frame>> {
        None
    }

    /// Ground-truth frame at time index `t`, for grid problems.
    fn truth_frame(&self, _t: usize) -> Option<Result<Frame>> {
        None
    }
}
