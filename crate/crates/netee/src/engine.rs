//! Synchronous embodied evolution over a network of agents.
//!
//! Every generation each agent builds one offspring from its own genotype
//! and, depending on the variant, a neighbor's genotype; mutates it;
//! evaluates it; and keeps it only on strict improvement. All agents read the
//! generation-`g` states and the generation-`g + 1` states are returned as a
//! new vector, so update order never matters.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{arithmetic_crossover, random_init, uniform_crossover, Genotype, OperatorParams};
use crate::problems::{Direction, Problem};
use crate::rng::{AgentRng, Purpose, Rng, RunKey};
use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartnerSelection {
    None,
    BestNeighbor,
    RandomNeighbor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recombination {
    NoneJustSelf,
    Copy,
    Crossover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    HillClimbing,
    CopyBest,
    CopyRand,
    XoverBest,
    XoverRand,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::HillClimbing,
        Variant::CopyBest,
        Variant::CopyRand,
        Variant::XoverBest,
        Variant::XoverRand,
    ];

    pub fn partner_selection(self) -> PartnerSelection {
        match self {
            Variant::HillClimbing => PartnerSelection::None,
            Variant::CopyBest | Variant::XoverBest => PartnerSelection::BestNeighbor,
            Variant::CopyRand | Variant::XoverRand => PartnerSelection::RandomNeighbor,
        }
    }

    pub fn recombination(self) -> Recombination {
        match self {
            Variant::HillClimbing => Recombination::NoneJustSelf,
            Variant::CopyBest | Variant::CopyRand => Recombination::Copy,
            Variant::XoverBest | Variant::XoverRand => Recombination::Crossover,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::HillClimbing => "HillClimbing",
            Variant::CopyBest => "CopyBest",
            Variant::CopyRand => "CopyRand",
            Variant::XoverBest => "XoverBest",
            Variant::XoverRand => "XoverRand",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))
    }
}

/// How per-agent fitness values are aggregated into the collective fitness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Collective {
    #[default]
    Mean,
    Sum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub genotype: Genotype,
    /// Always the problem's evaluation of `genotype`.
    pub fitness: f64,
    /// Held-out score of `genotype`, when the problem defines one.
    pub test_score: Option<f64>,
    pub rng: AgentRng,
}

/// Random initial genotypes, drawn from each agent's init stream, and their
/// evaluations.
pub fn init_agents<P: Problem + ?Sized>(problem: &P, key: RunKey) -> Result<Vec<AgentState>> {
    let (lb, ub) = problem.bounds();
    (0..problem.node_count())
        .map(|k| {
            let mut init = key.stream(k, Purpose::Init);
            let genotype = random_init(problem.genome_len(), lb, ub, &mut init)?;
            agent_from(problem, k, genotype, key.agent_streams(k))
        })
        .collect()
}

/// Agents seeded with given genotypes instead of random ones.
pub fn agents_from_genotypes<P: Problem + ?Sized>(
    problem: &P,
    key: RunKey,
    genotypes: Vec<Genotype>,
) -> Result<Vec<AgentState>> {
    if genotypes.len() != problem.node_count() {
        return Err(Error::LengthMismatch {
            expected: problem.node_count(),
            actual: genotypes.len(),
        });
    }
    genotypes
        .into_iter()
        .enumerate()
        .map(|(k, g)| agent_from(problem, k, g, key.agent_streams(k)))
        .collect()
}

fn agent_from<P: Problem + ?Sized>(problem: &P, k: usize, genotype: Genotype, rng: AgentRng) -> Result<AgentState> {
    let fitness = problem.evaluate(NodeId(k), &genotype)?;
    let test_score = problem.test_score(NodeId(k), &genotype).transpose()?;
    Ok(AgentState {
        genotype,
        fitness,
        test_score,
        rng,
    })
}

/// Neighbor with the best fitness; ties go to the lowest node id.
pub fn best_neighbor(agents: &[AgentState], topo: &Topology, n: NodeId, dir: Direction) -> Result<NodeId> {
    let neighbors = topo.neighbors(n)?;
    let mut best = *neighbors.first().ok_or(Error::EmptyNeighborhood(n.index()))?;
    for &m in &neighbors[1..] {
        if dir.improves(agents[m.index()].fitness, agents[best.index()].fitness) {
            best = m;
        }
    }
    Ok(best)
}

pub fn random_neighbor(topo: &Topology, n: NodeId, rng: &mut Rng) -> Result<NodeId> {
    let neighbors = topo.neighbors(n)?;
    if neighbors.is_empty() {
        return Err(Error::EmptyNeighborhood(n.index()));
    }
    Ok(neighbors[rng.random_range(0..neighbors.len())])
}

pub fn collective_fitness(agents: &[AgentState], how: Collective) -> f64 {
    let sum: f64 = agents.iter().map(|a| a.fitness).sum();
    match how {
        Collective::Sum => sum,
        Collective::Mean => sum / agents.len() as f64,
    }
}

/// Mean held-out score across agents, if every agent has one.
pub fn collective_test_score(agents: &[AgentState]) -> Option<f64> {
    let scores: Option<Vec<f64>> = agents.iter().map(|a| a.test_score).collect();
    scores.map(|s| s.iter().sum::<f64>() / s.len() as f64)
}

/// Everything an agent's update reads besides the agents themselves.
#[derive(Clone, Copy)]
pub struct StepContext<'a, P: Problem + ?Sized> {
    pub topology: &'a Topology,
    pub problem: &'a P,
    pub variant: Variant,
    pub params: OperatorParams,
}

impl<'a, P: Problem + ?Sized> StepContext<'a, P> {
    pub fn new(topology: &'a Topology, problem: &'a P, variant: Variant, params: OperatorParams) -> Result<Self> {
        params.validate()?;
        if topology.node_count() != problem.node_count() {
            return Err(Error::Config(format!(
                "topology has {} nodes but the problem has {}",
                topology.node_count(),
                problem.node_count()
            )));
        }
        Ok(Self {
            topology,
            problem,
            variant,
            params,
        })
    }

    fn update(&self, agents: &[AgentState], k: usize) -> Result<AgentState> {
        let n = NodeId(k);
        let me = &agents[k];
        let mut rng = me.rng.clone();
        let dir = self.problem.direction();
        let has_neighbors = !self.topology.neighbors(n)?.is_empty();

        let partner = match self.variant.partner_selection() {
            PartnerSelection::None => None,
            // Isolated agents fall back to hill climbing.
            _ if !has_neighbors => None,
            PartnerSelection::BestNeighbor => Some(best_neighbor(agents, self.topology, n, dir)?),
            PartnerSelection::RandomNeighbor => Some(random_neighbor(self.topology, n, &mut rng.select)?),
        };

        let mut offspring = match (self.variant.recombination(), partner) {
            (Recombination::NoneJustSelf, _) | (_, None) => me.genotype.clone(),
            (Recombination::Copy, Some(p)) => agents[p.index()].genotype.clone(),
            (Recombination::Crossover, Some(p)) => {
                let other = &agents[p.index()].genotype;
                if rng.crossover.random::<f64>() < self.params.cp {
                    if me.genotype.len() == 1 {
                        arithmetic_crossover(&me.genotype, other)?
                    } else {
                        uniform_crossover(&me.genotype, other, self.params.cr, &mut rng.crossover)?
                    }
                } else {
                    me.genotype.clone()
                }
            }
        };
        offspring.mutate(self.params.mr, &mut rng.mutate)?;

        let fitness = self.problem.evaluate(n, &offspring)?;
        if dir.improves(fitness, me.fitness) {
            let test_score = self.problem.test_score(n, &offspring).transpose()?;
            Ok(AgentState {
                genotype: offspring,
                fitness,
                test_score,
                rng,
            })
        } else {
            Ok(AgentState { rng, ..me.clone() })
        }
    }
}

/// One synchronous generation.
pub fn step_generation<P: Problem + ?Sized>(
    agents: &[AgentState],
    ctx: &StepContext<'_, P>,
) -> Result<Vec<AgentState>> {
    (0..agents.len()).map(|k| ctx.update(agents, k)).collect()
}

/// Same as [`step_generation`], with agents updated on the rayon pool.
pub fn step_generation_par<P: Problem + ?Sized>(
    agents: &[AgentState],
    ctx: &StepContext<'_, P>,
) -> Result<Vec<AgentState>> {
    (0..agents.len())
        .into_par_iter()
        .map(|k| ctx.update(agents, k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;
    use crate::problems::{IlluminationMode, IlluminationProblem, ImitationProblem};
    use crate::topology::{GraphTopology, GridTopology};

    /// Fitness equal to the single gene; lets tests pin fitness values.
    struct Identity {
        nodes: usize,
        direction: Direction,
    }

    impl Problem for Identity {
        fn node_count(&self) -> usize {
            self.nodes
        }
        fn genome_len(&self) -> usize {
            1
        }
        fn bounds(&self) -> (f64, f64) {
            (0.0, 1.0)
        }
        fn direction(&self) -> Direction {
            self.direction
        }
        fn evaluate(&self, _node: NodeId, g: &Genotype) -> Result<f64> {
            Ok(g.values()[0])
        }
    }

    fn agents_with(problem: &Identity, values: &[f64]) -> Vec<AgentState> {
        let gs = values
            .iter()
            .map(|&v| Genotype::new(vec![v], 0.0, 1.0).unwrap())
            .collect();
        agents_from_genotypes(problem, RunKey::new(0, 0, 0), gs).unwrap()
    }

    fn star(leaves: usize) -> Topology {
        GraphTopology::new(leaves + 1, (1..=leaves).map(|k| (0, k)))
            .unwrap()
            .into()
    }

    fn imitation(rows: usize, cols: usize, frames: usize) -> ImitationProblem {
        let imgs = (0..frames)
            .map(|t| {
                let data = (0..rows * cols).map(|k| ((k * 7 + t * 3) % 11) as f64 / 10.0).collect();
                Frame::new(rows, cols, data).unwrap()
            })
            .collect();
        ImitationProblem::new(imgs, 1).unwrap()
    }

    fn run(
        problem: &ImitationProblem,
        topo: &Topology,
        variant: Variant,
        params: OperatorParams,
        gens: usize,
    ) -> Vec<Vec<AgentState>> {
        let ctx = StepContext::new(topo, problem, variant, params).unwrap();
        let mut agents = init_agents(problem, RunKey::new(5, 0, 0)).unwrap();
        let mut history = vec![agents.clone()];
        for _ in 0..gens {
            agents = step_generation(&agents, &ctx).unwrap();
            history.push(agents.clone());
        }
        history
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("xoverrand".parse::<Variant>().is_ok());
        assert!("Xover".parse::<Variant>().is_err());
    }

    #[test]
    fn best_neighbor_selection() {
        let p = Identity {
            nodes: 4,
            direction: Direction::Minimize,
        };
        let agents = agents_with(&p, &[0.9, 0.3, 0.1, 0.5]);
        let topo = star(3);
        assert_eq!(
            best_neighbor(&agents, &topo, NodeId(0), Direction::Minimize).unwrap(),
            NodeId(2)
        );

        let tied = agents_with(&p, &[0.9, 0.4, 0.4, 0.4]);
        assert_eq!(
            best_neighbor(&tied, &topo, NodeId(0), Direction::Minimize).unwrap(),
            NodeId(1)
        );

        let q = Identity {
            nodes: 3,
            direction: Direction::Maximize,
        };
        let agents = agents_with(&q, &[0.0, 0.6, 0.9]);
        assert_eq!(
            best_neighbor(&agents, &star(2), NodeId(0), Direction::Maximize).unwrap(),
            NodeId(2)
        );

        let lonely: Topology = GraphTopology::new(4, []).unwrap().into();
        assert!(matches!(
            best_neighbor(&agents_with(&p, &[0.0; 4]), &lonely, NodeId(1), Direction::Minimize),
            Err(Error::EmptyNeighborhood(1))
        ));
    }

    #[test]
    fn random_neighbor_cases() {
        let path: Topology = GraphTopology::new(2, [(0, 1)]).unwrap().into();
        let mut rng = RunKey::new(1, 0, 0).stream(0, Purpose::Select);
        for _ in 0..10 {
            assert_eq!(random_neighbor(&path, NodeId(0), &mut rng).unwrap(), NodeId(1));
        }
        let lonely: Topology = GraphTopology::new(1, []).unwrap().into();
        assert!(random_neighbor(&lonely, NodeId(0), &mut rng).is_err());
    }

    #[test]
    fn random_neighbor_is_uniform() {
        let grid: Topology = GridTopology::new(3, 3).unwrap().into();
        let center = NodeId(4);
        let mut rng = RunKey::new(2, 0, 0).stream(0, Purpose::Select);
        let draws = 100_000;
        let mut counts = [0usize; 9];
        for _ in 0..draws {
            counts[random_neighbor(&grid, center, &mut rng).unwrap().index()] += 1;
        }
        assert_eq!(counts[4], 0);
        for (k, &c) in counts.iter().enumerate().filter(|(k, _)| *k != 4) {
            let freq = c as f64 / draws as f64;
            assert!((freq - 0.125).abs() < 0.01, "node {k}: {freq}");
        }
    }

    #[test]
    fn collective_mean_and_sum() {
        let p = Identity {
            nodes: 2,
            direction: Direction::Minimize,
        };
        let agents = agents_with(&p, &[0.2, 0.4]);
        assert!((collective_fitness(&agents, Collective::Mean) - 0.3).abs() < 1e-15);
        assert!((collective_fitness(&agents, Collective::Sum) - 0.6).abs() < 1e-15);
        let zeros = agents_with(&p, &[0.0, 0.0]);
        assert_eq!(collective_fitness(&zeros, Collective::Mean), 0.0);
    }

    #[test]
    fn perfect_imitation_has_zero_collective_fitness() {
        let p = imitation(3, 3, 4);
        let gs = p
            .optimal_genotypes()
            .iter()
            .map(|t| Genotype::new(t.clone(), 0.0, 1.0).unwrap())
            .collect();
        let agents = agents_from_genotypes(&p, RunKey::new(0, 0, 0), gs).unwrap();
        assert_eq!(collective_fitness(&agents, Collective::Mean), 0.0);
    }

    #[test]
    fn hill_climbing_rejects_worse_offspring() {
        // Already optimal under minimization: any mutation is rejected.
        let p = Identity {
            nodes: 3,
            direction: Direction::Minimize,
        };
        let agents = agents_with(&p, &[0.0, 0.0, 0.0]);
        let topo: Topology = GraphTopology::new(3, [(0, 1), (1, 2)]).unwrap().into();
        let params = OperatorParams::new(0.5, 0.5, 0.1).unwrap();
        let ctx = StepContext::new(&topo, &p, Variant::HillClimbing, params).unwrap();
        let next = step_generation(&agents, &ctx).unwrap();
        for (a, b) in agents.iter().zip(&next) {
            assert_eq!(a.genotype, b.genotype);
            assert_eq!(a.fitness, b.fitness);
        }
    }

    #[test]
    fn fitness_is_monotone_per_agent() {
        let p = imitation(4, 4, 6);
        let topo: Topology = GridTopology::new(4, 4).unwrap().into();
        let params = OperatorParams::new(0.5, 0.5, 0.05).unwrap();
        for v in Variant::ALL {
            let hist = run(&p, &topo, v, params, 60);
            for w in hist.windows(2) {
                for (a, b) in w[0].iter().zip(&w[1]) {
                    assert!(b.fitness <= a.fitness, "{v}");
                    assert_eq!(p.evaluate(NodeId(0), &w[1][0].genotype).unwrap(), w[1][0].fitness);
                }
            }
        }
    }

    #[test]
    fn xover_rand_without_crossover_is_hill_climbing() {
        let p = imitation(5, 5, 8);
        let topo: Topology = GridTopology::new(5, 5).unwrap().into();
        let params = OperatorParams::new(0.0, 0.5, 0.02).unwrap();
        let a = run(&p, &topo, Variant::XoverRand, params, 50);
        let b = run(&p, &topo, Variant::HillClimbing, params, 50);
        for (x, y) in a.iter().zip(&b) {
            let gx: Vec<_> = x.iter().map(|s| (&s.genotype, s.fitness)).collect();
            let gy: Vec<_> = y.iter().map(|s| (&s.genotype, s.fitness)).collect();
            assert_eq!(gx, gy);
        }
    }

    #[test]
    fn xover_rand_with_zero_rate_is_copy_rand() {
        let p = imitation(5, 5, 8);
        let topo: Topology = GridTopology::new(5, 5).unwrap().into();
        let params = OperatorParams::new(1.0, 0.0, 0.02).unwrap();
        let a = run(&p, &topo, Variant::XoverRand, params, 50);
        let b = run(&p, &topo, Variant::CopyRand, params, 50);
        for (x, y) in a.iter().zip(&b) {
            for (s, t) in x.iter().zip(y) {
                assert_eq!((&s.genotype, s.fitness), (&t.genotype, t.fitness));
            }
        }
    }

    #[test]
    fn isolated_agent_behaves_as_hill_climbing() {
        let p = imitation(1, 1, 5);
        let topo: Topology = GridTopology::new(1, 1).unwrap().into();
        let params = OperatorParams::new(1.0, 0.5, 0.05).unwrap();
        let hc = run(&p, &topo, Variant::HillClimbing, params, 40);
        for v in [
            Variant::CopyBest,
            Variant::CopyRand,
            Variant::XoverBest,
            Variant::XoverRand,
        ] {
            let other = run(&p, &topo, v, params, 40);
            for (x, y) in hc.iter().zip(&other) {
                assert_eq!(x[0].genotype, y[0].genotype, "{v}");
            }
        }
    }

    #[test]
    fn synchronous_update_reads_previous_generation() {
        // CopyBest on a path 0-1-2 where node 0 is best: after one step,
        // node 2 can only have copied from node 1's *old* genotype.
        let p = Identity {
            nodes: 3,
            direction: Direction::Minimize,
        };
        let agents = agents_with(&p, &[0.0, 0.5, 0.9]);
        let topo: Topology = GraphTopology::new(3, [(0, 1), (1, 2)]).unwrap().into();
        let params = OperatorParams::new(1.0, 0.5, 1e-9).unwrap();
        let ctx = StepContext::new(&topo, &p, Variant::CopyBest, params).unwrap();
        let next = step_generation(&agents, &ctx).unwrap();
        assert!(next[1].fitness < 1e-6);
        assert!((next[2].fitness - 0.5).abs() < 1e-6);
    }

    #[test]
    fn parallel_step_matches_sequential() {
        let p = IlluminationProblem::new(6, 10, IlluminationMode::SingleParam).unwrap();
        let topo: Topology = GridTopology::new(6, 10).unwrap().into();
        let params = OperatorParams::new(0.5, 0.5, 0.5).unwrap();
        let ctx = StepContext::new(&topo, &p, Variant::XoverRand, params).unwrap();
        let mut a = init_agents(&p, RunKey::new(3, 1, 4)).unwrap();
        let mut b = a.clone();
        for _ in 0..30 {
            a = step_generation(&a, &ctx).unwrap();
            b = step_generation_par(&b, &ctx).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn mismatched_topology_rejected() {
        let p = imitation(2, 2, 2);
        let topo: Topology = GridTopology::new(3, 3).unwrap().into();
        let params = OperatorParams::new(0.5, 0.5, 0.1).unwrap();
        assert!(StepContext::new(&topo, &p, Variant::HillClimbing, params).is_err());
    }
}
