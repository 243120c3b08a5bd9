//! TOML campaign configuration.
//!
//! ```toml
//! master_seed = 1
//! runs = 10
//! generations = 3000
//! collective = "mean"            # or "sum"
//! snapshot_generations = [100, 1000]
//! snapshot_time = 0
//!
//! [problem]
//! kind = "imitation"             # imitation | illumination | ffnn
//! idx_path = "data/mnist20-images-idx3-ubyte"
//! images = 20
//! downsample = 2
//! tile = 1
//!
//! [topology]                     # optional for grid problems
//! kind = "grid"                  # grid | file | room
//! rows = 14
//! cols = 14
//!
//! [[cells]]
//! variant = "XoverRand"
//! cp = 0.5
//! cr = 0.5
//! mr = 0.001
//!
//! [sweep]                        # optional; expands into further cells
//! variants = ["XoverBest", "XoverRand"]
//! cp = [0.2, 0.5, 1.0]
//! cr = [0.05, 0.2, 0.5]
//! mr = [0.001]
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::SplitSpec;
use crate::engine::{Collective, Recombination, Variant};
use crate::error::{Error, Result};
use crate::genome::OperatorParams;
use crate::problems::{IlluminationMode, Task};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub master_seed: u64,
    pub runs: usize,
    pub generations: usize,
    #[serde(default)]
    pub collective: Collective,
    #[serde(default)]
    pub snapshot_generations: Vec<usize>,
    /// Time index (frame or hour) rendered in snapshots.
    #[serde(default)]
    pub snapshot_time: usize,
    /// Write each run's final per-agent fitness.
    #[serde(default)]
    pub record_agent_fitness: bool,
    /// Worker threads for independent runs; results do not depend on it.
    #[serde(default = "one")]
    pub threads: usize,
    pub problem: ProblemSpec,
    #[serde(default)]
    pub topology: Option<TopologySpec>,
    #[serde(default)]
    pub cells: Vec<CellSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub stats: StatsSpec,
}

fn one() -> usize {
    1
}

fn default_images() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Imitation {
        idx_path: PathBuf,
        #[serde(default = "default_images")]
        images: usize,
        #[serde(default = "one")]
        tile: usize,
        /// Average-pooling factor applied to every image before tiling.
        #[serde(default = "one")]
        downsample: usize,
    },
    Illumination {
        rows: usize,
        cols: usize,
        mode: IlluminationMode,
    },
    Ffnn {
        task: Task,
        /// Sensor CSV; when absent the synthetic generator is used.
        #[serde(default)]
        sensor_csv: Option<PathBuf>,
        #[serde(default)]
        synthetic: SynthSpec,
        #[serde(default)]
        split: SplitSpec,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub samples: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self { seed: 0, samples: 3000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologySpec {
    Grid {
        rows: usize,
        cols: usize,
    },
    File {
        path: PathBuf,
    },
    /// One of the bundled room layouts: "a", "b" or "c".
    Room {
        name: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub variant: Variant,
    #[serde(default = "half")]
    pub cp: f64,
    #[serde(default = "half")]
    pub cr: f64,
    pub mr: f64,
    #[serde(default)]
    pub label: Option<String>,
}

fn half() -> f64 {
    0.5
}

impl CellSpec {
    pub fn new(variant: Variant, cp: f64, cr: f64, mr: f64) -> Self {
        Self {
            variant,
            cp,
            cr,
            mr,
            label: None,
        }
    }

    pub fn params(&self) -> Result<OperatorParams> {
        OperatorParams::new(self.cp, self.cr, self.mr)
    }

    /// File-name-safe label, e.g. `XoverRand_cp0.5_cr0.05_mr0.001`.
    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match self.variant.recombination() {
            Recombination::Crossover => {
                format!("{}_cp{}_cr{}_mr{}", self.variant, self.cp, self.cr, self.mr)
            }
            _ => format!("{}_mr{}", self.variant, self.mr),
        }
    }
}

/// Cartesian product of settings. Crossover variants range over
/// cp × cr × mr; the others only over mr.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variants: Vec<Variant>,
    #[serde(default = "halves")]
    pub cp: Vec<f64>,
    #[serde(default = "halves")]
    pub cr: Vec<f64>,
    pub mr: Vec<f64>,
}

fn halves() -> Vec<f64> {
    vec![0.5]
}

impl SweepSpec {
    pub fn expand(&self) -> Vec<CellSpec> {
        let mut cells = Vec::new();
        for &variant in &self.variants {
            for &mr in &self.mr {
                if variant.recombination() == Recombination::Crossover {
                    for &cp in &self.cp {
                        for &cr in &self.cr {
                            cells.push(CellSpec::new(variant, cp, cr, mr));
                        }
                    }
                } else {
                    cells.push(CellSpec::new(variant, 0.5, 0.5, mr));
                }
            }
        }
        cells
    }
}

/// What a Nemenyi block is. Only independent runs are supported for now.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Blocks {
    #[default]
    Runs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsSpec {
    pub alpha: f64,
    pub blocks: Blocks,
}

impl Default for StatsSpec {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            blocks: Blocks::Runs,
        }
    }
}

impl CampaignConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses a config file and resolves its relative paths.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self.problem {
            ProblemSpec::Imitation { idx_path, .. } => fix(idx_path),
            ProblemSpec::Ffnn {
                sensor_csv: Some(p), ..
            } => fix(p),
            _ => {}
        }
        if let Some(TopologySpec::File { path }) = &mut self.topology {
            fix(path);
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Explicit cells followed by the sweep expansion.
    pub fn all_cells(&self) -> Vec<CellSpec> {
        let mut cells = self.cells.clone();
        if let Some(s) = &self.sweep {
            cells.extend(s.expand());
        }
        cells
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        let cells = self.all_cells();
        if cells.is_empty() {
            return Err(Error::Config("no cells configured".into()));
        }
        let mut labels = HashSet::new();
        for c in &cells {
            c.params()
                .map_err(|e| Error::Config(format!("cell {}: {e}", c.label())))?;
            let label = c.label();
            if label.is_empty() || label.contains(['/', '\\', ' ', ',']) {
                return Err(Error::Config(format!("unusable cell label {label:?}")));
            }
            if !labels.insert(label.clone()) {
                return Err(Error::Config(format!("duplicate cell {label}")));
            }
        }
        if let Some(&g) = self.snapshot_generations.iter().find(|&&g| g > self.generations) {
            return Err(Error::Config(format!(
                "snapshot generation {g} beyond {} generations",
                self.generations
            )));
        }
        if !(self.stats.alpha > 0.0 && self.stats.alpha < 1.0) {
            return Err(Error::Config(format!("alpha {} not in (0, 1)", self.stats.alpha)));
        }
        Ok(())
    }
}
