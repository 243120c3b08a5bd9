//! Per-node feed-forward classifiers whose flattened weights are the genotype.
//!
//! Weight layout: for each hidden unit `h`, its `inputs` incoming weights
//! followed by its bias; then, for each output unit, its `hidden` incoming
//! weights followed by its bias. Hidden units use the logistic sigmoid,
//! output units are linear, and the predicted class is the first index of
//! the maximum output.

use crate::error::{Error, Result};
use crate::genome::Genotype;
use crate::topology::NodeId;

use super::{Direction, Problem};

#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub features: Vec<f64>,
    pub label: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Presence,
    Activity,
}

impl Task {
    pub fn classes(self) -> usize {
        match self {
            Task::Presence => 2,
            Task::Activity => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FfnnArch {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
}

impl FfnnArch {
    pub const INPUTS: usize = 300;
    pub const HIDDEN: usize = 100;

    pub fn for_task(task: Task) -> Self {
        Self {
            inputs: Self::INPUTS,
            hidden: Self::HIDDEN,
            outputs: task.classes(),
        }
    }

    /// `(inputs + 1) * hidden + (hidden + 1) * outputs`.
    pub fn weight_count(&self) -> usize {
        (self.inputs + 1) * self.hidden + (self.hidden + 1) * self.outputs
    }

    fn check_weights(&self, weights: &[f64]) -> Result<()> {
        if weights.len() != self.weight_count() {
            return Err(Error::LengthMismatch {
                expected: self.weight_count(),
                actual: weights.len(),
            });
        }
        Ok(())
    }

    fn check_features(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.inputs {
            return Err(Error::LengthMismatch {
                expected: self.inputs,
                actual: features.len(),
            });
        }
        Ok(())
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// Output-layer activations for one input vector.
pub fn ffnn_outputs(arch: &FfnnArch, weights: &[f64], features: &[f64]) -> Result<Vec<f64>> {
    arch.check_weights(weights)?;
    arch.check_features(features)?;
    let stride = arch.inputs + 1;
    let hidden: Vec<f64> = weights[..arch.hidden * stride]
        .chunks_exact(stride)
        .map(|w| {
            let z: f64 = w[..arch.inputs].iter().zip(features).map(|(a, b)| a * b).sum();
            sigmoid(z + w[arch.inputs])
        })
        .collect();
    let out_stride = arch.hidden + 1;
    Ok(weights[arch.hidden * stride..]
        .chunks_exact(out_stride)
        .map(|w| {
            let z: f64 = w[..arch.hidden].iter().zip(&hidden).map(|(a, b)| a * b).sum();
            z + w[arch.hidden]
        })
        .collect())
}

pub fn ffnn_forward(arch: &FfnnArch, weights: &Genotype, window: &Window) -> Result<usize> {
    Ok(argmax(&ffnn_outputs(arch, weights.values(), &window.features)?))
}

pub fn ffnn_accuracy(arch: &FfnnArch, weights: &Genotype, windows: &[Window]) -> Result<f64> {
    if windows.is_empty() {
        return Err(Error::InvalidProblem("accuracy over an empty window list".into()));
    }
    let batch = WindowBatch::new(arch, windows)?;
    batch.accuracy(arch, weights.values())
}

/// Windows packed row-major into one matrix for batched forward passes.
#[derive(Debug, Clone, Default)]
pub(crate) struct WindowBatch {
    rows: usize,
    x: Vec<f64>,
    labels: Vec<usize>,
}

impl WindowBatch {
    fn new(arch: &FfnnArch, windows: &[Window]) -> Result<Self> {
        let mut x = Vec::with_capacity(windows.len() * arch.inputs);
        let mut labels = Vec::with_capacity(windows.len());
        for w in windows {
            arch.check_features(&w.features)?;
            if w.label >= arch.outputs {
                return Err(Error::InvalidProblem(format!(
                    "label {} outside 0..{}",
                    w.label, arch.outputs
                )));
            }
            x.extend_from_slice(&w.features);
            labels.push(w.label);
        }
        Ok(Self {
            rows: windows.len(),
            x,
            labels,
        })
    }

    fn is_empty(&self) -> bool {
        self.rows == 0
    }

    fn predictions(&self, arch: &FfnnArch, weights: &[f64]) -> Result<Vec<usize>> {
        arch.check_weights(weights)?;
        let (n, d, h, k) = (self.rows, arch.inputs, arch.hidden, arch.outputs);
        let w1 = &weights[..(d + 1) * h];
        let w2 = &weights[(d + 1) * h..];
        let mut hidden = vec![0.0; n * h];
        let mut out = vec![0.0; n * k];
        // SAFETY: every pointer/stride pair below addresses memory inside the
        // corresponding slice: x is n×d row-major, w1 read as d×h with row
        // stride 1 and column stride d+1, hidden is n×h row-major; likewise
        // for the second product.
        unsafe {
            matrixmultiply::dgemm(
                n,
                d,
                h,
                1.0,
                self.x.as_ptr(),
                d as isize,
                1,
                w1.as_ptr(),
                1,
                (d + 1) as isize,
                0.0,
                hidden.as_mut_ptr(),
                h as isize,
                1,
            );
        }
        for row in hidden.chunks_exact_mut(h) {
            for (j, v) in row.iter_mut().enumerate() {
                *v = sigmoid(*v + w1[j * (d + 1) + d]);
            }
        }
        unsafe {
            matrixmultiply::dgemm(
                n,
                h,
                k,
                1.0,
                hidden.as_ptr(),
                h as isize,
                1,
                w2.as_ptr(),
                1,
                (h + 1) as isize,
                0.0,
                out.as_mut_ptr(),
                k as isize,
                1,
            );
        }
        Ok(out
            .chunks_exact_mut(k)
            .map(|row| {
                for (o, v) in row.iter_mut().enumerate() {
                    *v += w2[o * (h + 1) + h];
                }
                argmax(row)
            })
            .collect())
    }

    fn accuracy(&self, arch: &FfnnArch, weights: &[f64]) -> Result<f64> {
        let preds = self.predictions(arch, weights)?;
        let hits = preds.iter().zip(&self.labels).filter(|(p, l)| p == l).count();
        Ok(hits as f64 / self.rows as f64)
    }
}

#[derive(Debug, Clone)]
pub struct NodeWindows {
    pub train: Vec<Window>,
    pub test: Vec<Window>,
}

/// One classifier per network node; fitness is training accuracy, the
/// held-out score is test accuracy.
#[derive(Debug, Clone)]
pub struct FfnnProblem {
    task: Task,
    arch: FfnnArch,
    train: Vec<WindowBatch>,
    test: Vec<WindowBatch>,
}

impl FfnnProblem {
    pub fn new(task: Task, nodes: Vec<NodeWindows>) -> Result<Self> {
        Self::with_arch(task, FfnnArch::for_task(task), nodes)
    }

    pub fn with_arch(task: Task, arch: FfnnArch, nodes: Vec<NodeWindows>) -> Result<Self> {
        if arch.outputs != task.classes() {
            return Err(Error::InvalidProblem(format!(
                "{task:?} needs {} outputs, architecture has {}",
                task.classes(),
                arch.outputs
            )));
        }
        if nodes.is_empty() {
            return Err(Error::InvalidProblem("no nodes".into()));
        }
        let mut train = Vec::with_capacity(nodes.len());
        let mut test = Vec::with_capacity(nodes.len());
        for (k, n) in nodes.iter().enumerate() {
            if n.train.is_empty() {
                return Err(Error::InvalidProblem(format!("node {k} has no training windows")));
            }
            train.push(WindowBatch::new(&arch, &n.train)?);
            test.push(WindowBatch::new(&arch, &n.test)?);
        }
        Ok(Self {
            task,
            arch,
            train,
            test,
        })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn arch(&self) -> &FfnnArch {
        &self.arch
    }

    pub fn test_windows(&self, node: NodeId) -> usize {
        self.test.get(node.index()).map_or(0, |b| b.rows)
    }

    fn node(&self, node: NodeId) -> Result<usize> {
        if node.index() >= self.train.len() {
            return Err(Error::NodeOutOfRange {
                index: node.index(),
                count: self.train.len(),
            });
        }
        Ok(node.index())
    }

    /// Test-set predictions paired with labels, for permutation baselines.
    pub fn test_predictions(&self, node: NodeId, weights: &Genotype) -> Result<(Vec<usize>, Vec<usize>)> {
        let k = self.node(node)?;
        let preds = self.test[k].predictions(&self.arch, weights.values())?;
        Ok((preds, self.test[k].labels.clone()))
    }
}

impl Problem for FfnnProblem {
    fn node_count(&self) -> usize {
        self.train.len()
    }

    fn genome_len(&self) -> usize {
        self.arch.weight_count()
    }

    fn bounds(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn evaluate(&self, node: NodeId, genotype: &Genotype) -> Result<f64> {
        let k = self.node(node)?;
        self.train[k].accuracy(&self.arch, genotype.values())
    }

    fn test_score(&self, node: NodeId, genotype: &Genotype) -> Option<Result<f64>> {
        let k = match self.node(node) {
            Ok(k) => k,
            Err(e) => return Some(Err(e)),
        };
        if self.test[k].is_empty() {
            return None;
        }
        Some(self.test[k].accuracy(&self.arch, genotype.values()))
    }
}
