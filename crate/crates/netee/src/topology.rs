//! Agent networks: rectangular grids with Moore neighborhoods and explicit
//! undirected graphs loaded from edge-list files.
//!
//! Every node is addressed by a flat [`NodeId`]; grid cells flatten row-major.
//! Neighbor lists are precomputed at construction and always sorted.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridTopology {
    rows: usize,
    cols: usize,
    neighbors: Vec<Vec<NodeId>>,
}

impl GridTopology {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Config(format!(
                "grid dimensions must be positive, got {rows}x{cols}"
            )));
        }
        let mut neighbors = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                neighbors.push(moore_cells(rows, cols, i, j));
            }
        }
        Ok(Self { rows, cols, neighbors })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn node_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn node_at(&self, row: usize, col: usize) -> Result<NodeId> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::NodeOutOfRange {
                index: row.saturating_mul(self.cols).saturating_add(col),
                count: self.node_count(),
            });
        }
        Ok(NodeId(row * self.cols + col))
    }

    /// (row, col) of a node.
    pub fn coords(&self, n: NodeId) -> Result<(usize, usize)> {
        self.check(n)?;
        Ok((n.0 / self.cols, n.0 % self.cols))
    }

    /// In-bounds horizontal, vertical and diagonal neighbors, row-major.
    pub fn moore_neighbors(&self, n: NodeId) -> Result<&[NodeId]> {
        self.check(n)?;
        Ok(&self.neighbors[n.0])
    }

    fn check(&self, n: NodeId) -> Result<()> {
        if n.0 >= self.node_count() {
            return Err(Error::NodeOutOfRange {
                index: n.0,
                count: self.node_count(),
            });
        }
        Ok(())
    }
}

fn moore_cells(rows: usize, cols: usize, i: usize, j: usize) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(8);
    for di in -1i64..=1 {
        for dj in -1i64..=1 {
            if di == 0 && dj == 0 {
                continue;
            }
            let (r, c) = (i as i64 + di, j as i64 + dj);
            if r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols {
                out.push(NodeId(r as usize * cols + c as usize));
            }
        }
    }
    out
}

/// Undirected graph over `node_count` nodes. Connectivity is not required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTopology {
    node_count: usize,
    edges: BTreeSet<(usize, usize)>,
    neighbors: Vec<Vec<NodeId>>,
}

impl GraphTopology {
    /// Builds a graph, rejecting self-loops, duplicate edges (in either
    /// orientation) and out-of-range endpoints.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(node_count)?;
        for (k, (a, b)) in edges.into_iter().enumerate() {
            g.add_edge(a, b)
                .map_err(|message| Error::TopologyParse { line: k + 1, message })?;
        }
        Ok(g)
    }

    fn empty(node_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::Config("graph must have at least one node".into()));
        }
        Ok(Self {
            node_count,
            edges: BTreeSet::new(),
            neighbors: vec![Vec::new(); node_count],
        })
    }

    fn add_edge(&mut self, a: usize, b: usize) -> std::result::Result<(), String> {
        if a == b {
            return Err(format!("self-loop on node {a}"));
        }
        if a >= self.node_count || b >= self.node_count {
            return Err(format!("edge {a} {b} has endpoint outside 0..{}", self.node_count));
        }
        let key = (a.min(b), a.max(b));
        if !self.edges.insert(key) {
            return Err(format!("duplicate edge {} {}", key.0, key.1));
        }
        for (from, to) in [(a, b), (b, a)] {
            let list = &mut self.neighbors[from];
            let pos = list.partition_point(|x| x.0 < to);
            list.insert(pos, NodeId(to));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// 1-hop neighbors, ascending.
    pub fn graph_neighbors(&self, n: NodeId) -> Result<&[NodeId]> {
        if n.0 >= self.node_count {
            return Err(Error::NodeOutOfRange {
                index: n.0,
                count: self.node_count,
            });
        }
        Ok(&self.neighbors[n.0])
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in &self.neighbors[v] {
                if !seen[w.0] {
                    seen[w.0] = true;
                    stack.push(w.0);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Parses the edge-list format: first non-comment line is the node count,
    /// every following line an `a b` pair. Lines starting with `#` and blank
    /// lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut graph: Option<Self> = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::TopologyParse { line: line_no, message };
            match graph.as_mut() {
                None => {
                    let n: usize = line
                        .parse()
                        .map_err(|_| err(format!("expected node count, found {line:?}")))?;
                    graph = Some(Self::empty(n).map_err(|e| err(e.to_string()))?);
                }
                Some(g) => {
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    if fields.len() != 2 {
                        return Err(err(format!("expected two node ids, found {line:?}")));
                    }
                    let a = fields[0]
                        .parse()
                        .map_err(|_| err(format!("bad node id {:?}", fields[0])))?;
                    let b = fields[1]
                        .parse()
                        .map_err(|_| err(format!("bad node id {:?}", fields[1])))?;
                    g.add_edge(a, b).map_err(err)?;
                }
            }
        }
        graph.ok_or(Error::TopologyParse {
            line: 0,
            message: "missing node count".into(),
        })
    }
}

pub fn load_topology(path: impl AsRef<Path>) -> Result<GraphTopology> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    GraphTopology::parse(&text)
}

/// Room layouts shipped with the crate. The edge lists are assumptions
/// (star, path, cycle with a chord); supply a topology file to override.
pub mod rooms {
    pub const ROOM_A: &str = include_str!("../topologies/room_a.txt");
    pub const ROOM_B: &str = include_str!("../topologies/room_b.txt");
    pub const ROOM_C: &str = include_str!("../topologies/room_c.txt");

    pub fn by_name(name: &str) -> Option<&'static str> {
        match name.to_ascii_lowercase().as_str() {
            "a" | "room_a" => Some(ROOM_A),
            "b" | "room_b" => Some(ROOM_B),
            "c" | "room_c" => Some(ROOM_C),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Topology {
    Grid(GridTopology),
    Graph(GraphTopology),
}

impl Topology {
    pub fn node_count(&self) -> usize {
        match self {
            Topology::Grid(g) => g.node_count(),
            Topology::Graph(g) => g.node_count(),
        }
    }

    pub fn neighbors(&self, n: NodeId) -> Result<&[NodeId]> {
        match self {
            Topology::Grid(g) => g.moore_neighbors(n),
            Topology::Graph(g) => g.graph_neighbors(n),
        }
    }

    pub fn as_grid(&self) -> Option<&GridTopology> {
        match self {
            Topology::Grid(g) => Some(g),
            Topology::Graph(_) => None,
        }
    }
}

impl From<GridTopology> for Topology {
    fn from(g: GridTopology) -> Self {
        Topology::Grid(g)
    }
}

impl From<GraphTopology> for Topology {
    fn from(g: GraphTopology) -> Self {
        Topology::Graph(g)
    }
}
