//! Integral maximum flow on layered source → post → agent → sink networks.
//!
//! Augmenting paths are found breadth-first, scanning each node's arcs in
//! insertion order, so a network built the same way always yields the same
//! flow.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Source,
    Post(usize),
    Agent(usize),
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: Node,
    pub to: Node,
    pub capacity: u32,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("arc endpoint {0:?} is not a node of the network")]
    UnknownNode(Node),
    #[error("arc {from:?} -> {to:?} is not of the form source->post, post->agent or agent->sink")]
    BadShape { from: Node, to: Node },
    #[error("arc {from:?} -> {to:?} already exists")]
    DuplicateArc { from: Node, to: Node },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    num_posts: usize,
    num_agents: usize,
    arcs: Vec<Arc>,
    lookup: HashMap<(Node, Node), usize>,
}

impl FlowNetwork {
    pub fn new(num_posts: usize, num_agents: usize) -> Self {
        Self {
            num_posts,
            num_agents,
            arcs: Vec::new(),
            lookup: HashMap::new(),
        }
    }

    pub fn num_posts(&self) -> usize {
        self.num_posts
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn num_nodes(&self) -> usize {
        self.num_posts + self.num_agents + 2
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_index(&self, from: Node, to: Node) -> Option<usize> {
        self.lookup.get(&(from, to)).copied()
    }

    /// Dense node index: source, posts, agents, sink.
    pub fn node_index(&self, node: Node) -> usize {
        match node {
            Node::Source => 0,
            Node::Post(a) => 1 + a,
            Node::Agent(v) => 1 + self.num_posts + v,
            Node::Sink => 1 + self.num_posts + self.num_agents,
        }
    }

    fn contains(&self, node: Node) -> bool {
        match node {
            Node::Source | Node::Sink => true,
            Node::Post(a) => a < self.num_posts,
            Node::Agent(v) => v < self.num_agents,
        }
    }

    pub fn add_arc(&mut self, from: Node, to: Node, capacity: u32) -> Result<usize, FlowError> {
        for node in [from, to] {
            if !self.contains(node) {
                return Err(FlowError::UnknownNode(node));
            }
        }
        let shape_ok = matches!(
            (from, to),
            (Node::Source, Node::Post(_)) | (Node::Post(_), Node::Agent(_)) | (Node::Agent(_), Node::Sink)
        );
        if !shape_ok {
            return Err(FlowError::BadShape { from, to });
        }
        if self.lookup.contains_key(&(from, to)) {
            return Err(FlowError::DuplicateArc { from, to });
        }
        let id = self.arcs.len();
        self.arcs.push(Arc { from, to, capacity });
        self.lookup.insert((from, to), id);
        Ok(id)
    }

    /// Posts with an arc into `agent`, in arc order.
    pub fn posts_into(&self, agent: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().filter_map(move |arc| match (arc.from, arc.to) {
            (Node::Post(a), Node::Agent(v)) if v == agent => Some(a),
            _ => None,
        })
    }
}

/// An integral flow: one value per arc of the network it was computed on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    values: Vec<u32>,
    value: u32,
}

impl Flow {
    /// Wraps per-arc values; the total is the inflow into the sink.
    pub fn from_values(network: &FlowNetwork, values: Vec<u32>) -> Self {
        let value = network
            .arcs
            .iter()
            .zip(&values)
            .filter(|(arc, _)| arc.to == Node::Sink)
            .map(|(_, &x)| x)
            .sum();
        Self { values, value }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn on(&self, network: &FlowNetwork, from: Node, to: Node) -> u32 {
        network.arc_index(from, to).map_or(0, |i| self.values[i])
    }
}

struct Residual {
    // Edge 2i is arc i forward, 2i + 1 its reverse.
    head: Vec<usize>,
    cap: Vec<u32>,
    adjacency: Vec<Vec<usize>>,
}

impl Residual {
    fn new(network: &FlowNetwork, flow: Option<&[u32]>) -> Self {
        let mut head = Vec::with_capacity(2 * network.arcs.len());
        let mut cap = Vec::with_capacity(2 * network.arcs.len());
        let mut adjacency = vec![Vec::new(); network.num_nodes()];
        for (i, arc) in network.arcs.iter().enumerate() {
            let u = network.node_index(arc.from);
            let w = network.node_index(arc.to);
            let used = flow.map_or(0, |f| f[i].min(arc.capacity));
            adjacency[u].push(head.len());
            head.push(w);
            cap.push(arc.capacity - used);
            adjacency[w].push(head.len());
            head.push(u);
            cap.push(used);
        }
        Self {
            head,
            cap,
            adjacency,
        }
    }

    /// Breadth-first search for a source-sink path with positive residual
    /// capacity; returns the edge sequence.
    fn shortest_path(&self, source: usize, sink: usize) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.adjacency.len()];
        let mut seen = vec![false; self.adjacency.len()];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adjacency[u] {
                let w = self.head[e];
                if self.cap[e] == 0 || seen[w] {
                    continue;
                }
                seen[w] = true;
                parent[w] = Some(e);
                if w == sink {
                    let mut path = Vec::new();
                    let mut x = sink;
                    while let Some(e) = parent[x] {
                        path.push(e);
                        x = self.head[e ^ 1];
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(w);
            }
        }
        None
    }
}

/// Maximum flow by shortest augmenting paths.
pub fn max_flow(network: &FlowNetwork) -> Flow {
    let mut residual = Residual::new(network, None);
    let source = network.node_index(Node::Source);
    let sink = network.node_index(Node::Sink);
    while let Some(path) = residual.shortest_path(source, sink) {
        let bottleneck = path.iter().map(|&e| residual.cap[e]).min().unwrap_or(0);
        for &e in &path {
            residual.cap[e] -= bottleneck;
            residual.cap[e ^ 1] += bottleneck;
        }
    }
    let values = (0..network.arcs.len())
        .map(|i| residual.cap[2 * i + 1])
        .collect();
    Flow::from_values(network, values)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowIssue {
    ArcCountMismatch { expected: usize, found: usize },
    OverCapacity { arc: usize, value: u32, capacity: u32 },
    Conservation { node: Node, inflow: u32, outflow: u32 },
    ValueMismatch { claimed: u32, actual: u32 },
    /// Residual source-sink path proving the flow is not maximum.
    AugmentingPath { nodes: Vec<Node> },
}

/// Checks capacity and conservation, and with `require_maximum` also that no
/// augmenting path remains.
pub fn check_flow(network: &FlowNetwork, flow: &Flow, require_maximum: bool) -> Verdict<FlowIssue> {
    let mut issues = Vec::new();
    if flow.values.len() != network.arcs.len() {
        issues.push(FlowIssue::ArcCountMismatch {
            expected: network.arcs.len(),
            found: flow.values.len(),
        });
        return Verdict::from_witnesses(issues);
    }
    let mut inflow = vec![0u32; network.num_nodes()];
    let mut outflow = vec![0u32; network.num_nodes()];
    for (i, (arc, &x)) in network.arcs.iter().zip(&flow.values).enumerate() {
        if x > arc.capacity {
            issues.push(FlowIssue::OverCapacity {
                arc: i,
                value: x,
                capacity: arc.capacity,
            });
        }
        outflow[network.node_index(arc.from)] += x;
        inflow[network.node_index(arc.to)] += x;
    }
    let inner = (0..network.num_posts)
        .map(Node::Post)
        .chain((0..network.num_agents).map(Node::Agent));
    for node in inner {
        let i = network.node_index(node);
        if inflow[i] != outflow[i] {
            issues.push(FlowIssue::Conservation {
                node,
                inflow: inflow[i],
                outflow: outflow[i],
            });
        }
    }
    let actual = inflow[network.node_index(Node::Sink)];
    if actual != flow.value {
        issues.push(FlowIssue::ValueMismatch {
            claimed: flow.value,
            actual,
        });
    }
    if require_maximum && issues.is_empty() {
        let residual = Residual::new(network, Some(&flow.values));
        let source = network.node_index(Node::Source);
        let sink = network.node_index(Node::Sink);
        if let Some(path) = residual.shortest_path(source, sink) {
            let mut nodes = vec![Node::Source];
            for e in path {
                nodes.push(node_at(network, residual.head[e]));
            }
            issues.push(FlowIssue::AugmentingPath { nodes });
        }
    }
    Verdict::from_witnesses(issues)
}

fn node_at(network: &FlowNetwork, index: usize) -> Node {
    let m = network.num_posts;
    let n = network.num_agents;
    match index {
        0 => Node::Source,
        i if i <= m => Node::Post(i - 1),
        i if i <= m + n => Node::Agent(i - 1 - m),
        _ => Node::Sink,
    }
}
