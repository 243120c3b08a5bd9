use rayon::prelude::*;

use crate::data::{load_idx, load_sensor_csv, make_windows_all, synth_sensor_rooms};
use crate::engine::{collective_fitness, collective_test_score, init_agents, step_generation, AgentState, StepContext};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::genome::Genotype;
use crate::problems::{Direction, FfnnProblem, IlluminationProblem, ImitationProblem, Problem};
use crate::rng::RunKey;
use crate::topology::{load_topology, rooms, GraphTopology, GridTopology, Topology};

use super::config::{CampaignConfig, CellSpec, ProblemSpec, TopologySpec};

/// A constructed problem and the network it runs on.
pub struct Setup {
    pub problem: Box<dyn Problem>,
    pub topology: Topology,
    pub warnings: Vec<String>,
}

fn build_topology(spec: &TopologySpec) -> Result<Topology> {
    Ok(match spec {
        TopologySpec::Grid { rows, cols } => GridTopology::new(*rows, *cols)?.into(),
        TopologySpec::File { path } => load_topology(path)?.into(),
        TopologySpec::Room { name } => {
            let text = rooms::by_name(name).ok_or_else(|| Error::Config(format!("unknown room {name:?}")))?;
            GraphTopology::parse(text)?.into()
        }
    })
}

impl Setup {
    pub fn new(problem: Box<dyn Problem>, topology: Topology) -> Result<Self> {
        if problem.node_count() != topology.node_count() {
            return Err(Error::Config(format!(
                "topology has {} nodes but the problem has {}",
                topology.node_count(),
                problem.node_count()
            )));
        }
        let mut warnings = Vec::new();
        if let Topology::Graph(g) = &topology {
            if !g.is_connected() {
                warnings.push("topology is not connected".to_string());
            }
        }
        Ok(Self {
            problem,
            topology,
            warnings,
        })
    }

    pub fn direction(&self) -> Direction {
        self.problem.direction()
    }

    pub fn from_config(cfg: &CampaignConfig) -> Result<Self> {
        let explicit = cfg.topology.as_ref().map(build_topology).transpose()?;
        let (problem, default_grid): (Box<dyn Problem>, Option<(usize, usize)>) = match &cfg.problem {
            ProblemSpec::Imitation {
                idx_path,
                images,
                tile,
                downsample,
            } => {
                let set = load_idx(idx_path)?;
                let p = ImitationProblem::from_idx(&set, *images, *downsample, *tile)?;
                let grid = p.agent_grid();
                (Box::new(p), Some(grid))
            }
            ProblemSpec::Illumination { rows, cols, mode } => (
                Box::new(IlluminationProblem::new(*rows, *cols, *mode)?),
                Some((*rows, *cols)),
            ),
            ProblemSpec::Ffnn {
                task,
                sensor_csv,
                synthetic,
                split,
            } => {
                let topo = explicit
                    .as_ref()
                    .ok_or_else(|| Error::Config("ffnn problems need a topology".into()))?;
                let series = match sensor_csv {
                    Some(path) => load_sensor_csv(path)?,
                    None => synth_sensor_rooms(synthetic.seed, topo.node_count(), synthetic.samples, *task)?,
                };
                let windows = make_windows_all(&series, split)?;
                (Box::new(FfnnProblem::new(*task, windows)?), None)
            }
        };
        let topology = match (explicit, default_grid) {
            (Some(t), _) => t,
            (None, Some((r, c))) => GridTopology::new(r, c)?.into(),
            (None, None) => return Err(Error::Config("missing topology".into())),
        };
        Self::new(problem, topology)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run: usize,
    /// Collective fitness for generations `0..=generations`.
    pub collective: Vec<f64>,
    /// Mean held-out score per generation, for problems that define one.
    pub test_score: Option<Vec<f64>>,
    pub final_agent_fitness: Vec<f64>,
    pub final_genotypes: Vec<Genotype>,
    pub snapshots: Vec<(usize, Frame)>,
}

impl RunResult {
    pub fn final_fitness(&self) -> f64 {
        *self.collective.last().expect("trajectory includes generation 0")
    }

    pub fn final_test_score(&self) -> Option<f64> {
        self.test_score.as_ref().and_then(|t| t.last().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub spec: CellSpec,
    pub runs: Vec<RunResult>,
}

impl CellResult {
    pub fn label(&self) -> String {
        self.spec.label()
    }

    pub fn mean_final_fitness(&self) -> f64 {
        self.runs.iter().map(RunResult::final_fitness).sum::<f64>() / self.runs.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub direction: Direction,
    pub generations: usize,
    pub record_agent_fitness: bool,
    pub cells: Vec<CellResult>,
}

/// Grid of agent phenotypes at time index `t`.
pub fn snapshot_phenotype<P: Problem + ?Sized>(agents: &[AgentState], problem: &P, t: usize) -> Result<Frame> {
    let genotypes: Vec<Genotype> = agents.iter().map(|a| a.genotype.clone()).collect();
    problem
        .phenotype_frame(&genotypes, t)
        .ok_or_else(|| Error::InvalidProblem("problem has no grid phenotype to snapshot".into()))?
}

/// One seeded run of one cell.
pub fn run_single(
    setup: &Setup,
    cfg: &CampaignConfig,
    cell_index: usize,
    cell: &CellSpec,
    run: usize,
) -> Result<RunResult> {
    let problem = setup.problem.as_ref();
    let ctx = StepContext::new(&setup.topology, problem, cell.variant, cell.params()?)?;
    let key = RunKey::new(cfg.master_seed, cell_index as u64, run as u64);
    let mut agents = init_agents(problem, key)?;

    let mut collective = Vec::with_capacity(cfg.generations + 1);
    let mut test_score = collective_test_score(&agents).map(|s| {
        let mut v = Vec::with_capacity(cfg.generations + 1);
        v.push(s);
        v
    });
    collective.push(collective_fitness(&agents, cfg.collective));
    let mut snapshots = Vec::new();
    let mut snap = |g: usize, agents: &[AgentState]| -> Result<()> {
        if cfg.snapshot_generations.contains(&g) {
            snapshots.push((g, snapshot_phenotype(agents, problem, cfg.snapshot_time)?));
        }
        Ok(())
    };
    snap(0, &agents)?;

    for g in 1..=cfg.generations {
        agents = step_generation(&agents, &ctx)?;
        collective.push(collective_fitness(&agents, cfg.collective));
        if let Some(ts) = test_score.as_mut() {
            ts.push(collective_test_score(&agents).expect("held-out scores persist across generations"));
        }
        snap(g, &agents)?;
    }

    Ok(RunResult {
        run,
        collective,
        test_score,
        final_agent_fitness: agents.iter().map(|a| a.fitness).collect(),
        final_genotypes: agents.into_iter().map(|a| a.genotype).collect(),
        snapshots,
    })
}

/// Runs every (cell, run) pair. Pairs are independent and may be spread
/// over `cfg.threads` workers; results are identical for any thread count.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let setup = Setup::from_config(cfg)?;
    run_campaign_with(cfg, &setup)
}

/// Like [`run_campaign`] on an already constructed setup.
pub fn run_campaign_with(cfg: &CampaignConfig, setup: &Setup) -> Result<CampaignResult> {
    cfg.validate()?;
    let cells = cfg.all_cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.runs).map(move |r| (c, r)))
        .collect();
    let work = || -> Result<Vec<RunResult>> {
        jobs.par_iter()
            .map(|&(c, r)| run_single(setup, cfg, c, &cells[c], r))
            .collect()
    };
    let results = if cfg.threads == 1 {
        jobs.iter()
            .map(|&(c, r)| run_single(setup, cfg, c, &cells[c], r))
            .collect::<Result<Vec<_>>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)?
    };

    let mut results = results.into_iter();
    let cells = cells
        .into_iter()
        .map(|spec| CellResult {
            spec,
            runs: results.by_ref().take(cfg.runs).collect(),
        })
        .collect();
    Ok(CampaignResult {
        direction: setup.direction(),
        generations: cfg.generations,
        record_agent_fitness: cfg.record_agent_fitness,
        cells,
    })
}
