//! Node roster, radio connectivity and hop distances to the sink.
//!
//! The sink and reference nodes form the routing backbone. Mobile targets
//! attach to it as leaves: they originate and receive traffic but never relay
//! it, so backbone routes stay fixed while targets move.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::TopologyError;
use crate::geometry::Point;
use crate::rng::{self, Stream};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    /// Coordinator collecting every location report.
    Sink,
    /// Fixed node with a known position.
    Reference,
    /// Mobile node whose position is being tracked.
    Target,
}

impl NodeRole {
    /// Whether the node forwards traffic for others.
    pub const fn relays(self) -> bool {
        !matches!(self, NodeRole::Target)
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            NodeRole::Sink => "sink",
            NodeRole::Reference => "reference",
            NodeRole::Target => "target",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub role: NodeRole,
    pub position: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    nodes: Vec<Node>,
    radio_range_m: f64,
    sink: NodeId,
    adjacency: Vec<Vec<NodeId>>,
    hops: Vec<Option<u32>>,
}

impl NetworkTopology {
    /// Builds connectivity for an explicit roster. Node `i` must carry id `i`.
    pub fn from_nodes(nodes: Vec<Node>, radio_range_m: f64) -> Result<Self, TopologyError> {
        if !(radio_range_m > 0.0) {
            return Err(TopologyError::BadRange);
        }
        for (slot, node) in nodes.iter().enumerate() {
            if node.id.index() != slot {
                return Err(TopologyError::NodeIdMismatch {
                    slot,
                    found: node.id,
                });
            }
        }
        let sinks: Vec<NodeId> = nodes
            .iter()
            .filter(|n| n.role == NodeRole::Sink)
            .map(|n| n.id)
            .collect();
        if sinks.len() != 1 {
            return Err(TopologyError::SinkCount(sinks.len()));
        }
        let mut topo = Self {
            nodes,
            radio_range_m,
            sink: sinks[0],
            adjacency: Vec::new(),
            hops: Vec::new(),
        };
        topo.rebuild();
        Ok(topo)
    }

    fn rebuild(&mut self) {
        let n = self.nodes.len();
        let mut adjacency = alloc::vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if self.nodes[i].position.distance(self.nodes[j].position) <= self.radio_range_m {
                    adjacency[i].push(NodeId(j as u32));
                    adjacency[j].push(NodeId(i as u32));
                }
            }
        }
        for row in &mut adjacency {
            row.sort_unstable();
        }
        self.adjacency = adjacency;
        self.hops = hop_counts_to_sink(self);
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.index())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn radio_range_m(&self) -> f64 {
        self.radio_range_m
    }

    pub fn role(&self, id: NodeId) -> NodeRole {
        self.nodes[id.index()].role
    }

    pub fn position(&self, id: NodeId) -> Point {
        self.nodes[id.index()].position
    }

    /// Neighbors within radio range, sorted by id.
    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id.index()]
    }

    pub fn are_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency[a.index()].binary_search(&b).is_ok()
    }

    pub fn hops_to_sink(&self, id: NodeId) -> Option<u32> {
        self.hops[id.index()]
    }

    pub fn hop_table(&self) -> &[Option<u32>] {
        &self.hops
    }

    pub fn ids_with_role(&self, role: NodeRole) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(move |n| n.role == role)
            .map(|n| n.id)
    }

    pub fn references(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids_with_role(NodeRole::Reference)
    }

    pub fn targets(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids_with_role(NodeRole::Target)
    }

    /// Reference nodes within radio range of `id`, sorted by id.
    pub fn covering_references(&self, id: NodeId) -> Vec<NodeId> {
        self.neighbors(id)
            .iter()
            .copied()
            .filter(|&n| self.role(n) == NodeRole::Reference)
            .collect()
    }

    /// Reference nodes with no backbone path to the sink.
    pub fn unreachable_references(&self) -> usize {
        self.references()
            .filter(|&r| self.hops_to_sink(r).is_none())
            .count()
    }

    /// Moves targets and refreshes connectivity. Backbone hop counts are
    /// unaffected because targets never relay.
    pub fn move_targets(&mut self, moves: impl IntoIterator<Item = (NodeId, Point)>) {
        for (id, position) in moves {
            let node = &mut self.nodes[id.index()];
            debug_assert_eq!(node.role, NodeRole::Target, "only targets move");
            node.position = position;
        }
        self.rebuild();
    }
}

/// Breadth-first hop counts from the sink. Only the sink and reference nodes
/// extend paths; a target's count is one more than its best routed neighbor.
/// `None` marks nodes with no path.
pub fn hop_counts_to_sink(topology: &NetworkTopology) -> Vec<Option<u32>> {
    bfs_hops(topology, topology.sink)
}

/// Hop counts from `root` over paths whose interior nodes all relay.
pub fn bfs_hops(topology: &NetworkTopology, root: NodeId) -> Vec<Option<u32>> {
    let mut hops = alloc::vec![None; topology.nodes.len()];
    let mut queue = VecDeque::new();
    hops[root.index()] = Some(0);
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        if u != root && !topology.role(u).relays() {
            continue;
        }
        let next = hops[u.index()].map(|h| h + 1);
        for &v in topology.neighbors(u) {
            if hops[v.index()].is_none() {
                hops[v.index()] = next;
                queue.push_back(v);
            }
        }
    }
    hops
}

/// `(cols, rows)` with `cols * rows == count` whose aspect ratio is closest
/// to the field's.
pub fn lattice_shape(count: usize, width: f64, height: f64) -> (usize, usize) {
    let target = libm::log(width / height);
    (1..=count)
        .filter(|cols| count.is_multiple_of(*cols))
        .map(|cols| (cols, count / cols))
        .min_by(|a, b| {
            let da = libm::fabs(libm::log(a.0 as f64 / a.1 as f64) - target);
            let db = libm::fabs(libm::log(b.0 as f64 / b.1 as f64) - target);
            da.total_cmp(&db)
        })
        .unwrap_or((1, 1))
}

fn lattice_coords(count: usize, extent: f64) -> Option<Vec<f64>> {
    if count == 1 {
        return Some(alloc::vec![extent / 2.0]);
    }
    let spacing = extent / (count - 1) as f64;
    if !(spacing > 0.0 && spacing.is_finite()) {
        return None;
    }
    Some((0..count).map(|i| i as f64 * spacing).collect())
}

/// Sink at the configured corner, references on a regular lattice spanning the
/// field (row-major ids starting at 1), targets at seeded uniform positions.
pub fn build_grid_topology(config: &SimConfig) -> Result<NetworkTopology, TopologyError> {
    let (cols, rows) = lattice_shape(
        config.num_references,
        config.grid_width_m,
        config.grid_height_m,
    );
    let too_small = TopologyError::GridTooSmall {
        width: config.grid_width_m,
        height: config.grid_height_m,
        cols,
        rows,
    };
    let field_ok = config.grid_width_m > 0.0 && config.grid_height_m > 0.0;
    if config.num_references == 0 || !field_ok {
        return Err(too_small);
    }
    let xs = lattice_coords(cols, config.grid_width_m).ok_or_else(|| too_small.clone())?;
    let ys = lattice_coords(rows, config.grid_height_m).ok_or(too_small)?;

    let mut nodes = Vec::with_capacity(1 + config.num_references + config.num_targets);
    nodes.push(Node {
        id: NodeId(0),
        role: NodeRole::Sink,
        position: config.sink_position(),
    });
    for &y in &ys {
        for &x in &xs {
            nodes.push(Node {
                id: NodeId(nodes.len() as u32),
                role: NodeRole::Reference,
                position: Point::new(x, y),
            });
        }
    }
    let mut rng = rng::stream(config.seed, Stream::Topology);
    for _ in 0..config.num_targets {
        let position = Point::new(
            rng.random_range(0.0..=config.grid_width_m),
            rng.random_range(0.0..=config.grid_height_m),
        );
        nodes.push(Node {
            id: NodeId(nodes.len() as u32),
            role: NodeRole::Target,
            position,
        });
    }
    NetworkTopology::from_nodes(nodes, config.radio_range_m)
}
