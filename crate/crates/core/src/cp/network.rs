//! The per-iteration state of the no-empty-post search: the congestion table,
//! the valid/invalid status of tuples, the flow network built from them, and
//! obstructions extracted from non-perfect maximum flows.

use crate::maxflow::{Flow, FlowNetwork, Node};
use crate::model::{AgentId, Assignment, Instance, PostId, Tier, Tuple};
use crate::verdict::Verdict;

use super::SolverError;

/// Lower bounds on post congestions plus the tuples ruled out so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityState {
    table: Vec<usize>,
    // invalid[post][d - 1]
    invalid: Vec<Vec<bool>>,
}

impl ValidityState {
    /// Every table entry 1, every tuple valid.
    pub fn new(inst: &Instance) -> Self {
        Self {
            table: vec![1; inst.num_posts()],
            invalid: vec![vec![false; inst.num_agents()]; inst.num_posts()],
        }
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn table_sum(&self) -> usize {
        self.table.iter().sum()
    }

    pub fn is_valid(&self, t: Tuple) -> bool {
        !self
            .invalid
            .get(t.post.0)
            .and_then(|row| row.get(t.congestion.wrapping_sub(1)))
            .copied()
            .unwrap_or(false)
    }

    /// Invalidated congestions of `post`, ascending.
    pub fn invalid_congestions(&self, post: PostId) -> impl Iterator<Item = usize> + '_ {
        self.invalid[post.0]
            .iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .map(|(i, _)| i + 1)
    }

    /// For each post of the obstruction in index order: invalidate
    /// `(post, T[post])`, then raise `T[post]` by one. Returns the
    /// invalidated tuples.
    pub fn apply_obstruction(&mut self, obstruction: &Obstruction) -> Vec<Tuple> {
        let mut posts = obstruction.posts.clone();
        posts.sort();
        let mut out = Vec::with_capacity(posts.len());
        for a in posts {
            let d = self.table[a.0];
            let row = &mut self.invalid[a.0];
            if row.len() < d {
                row.resize(d, false);
            }
            row[d - 1] = true;
            self.table[a.0] += 1;
            out.push(Tuple::new(a, d));
        }
        out
    }
}

/// Valid tuples of the first tier of `agent`'s list that has any valid tuple.
pub fn top_valid_tier(inst: &Instance, state: &ValidityState, agent: AgentId) -> Option<Tier> {
    inst.preferences(agent).tiers().iter().find_map(|tier| {
        let valid: Tier = tier.iter().copied().filter(|&t| state.is_valid(t)).collect();
        (!valid.is_empty()).then_some(valid)
    })
}

/// Source arcs carry the table entries, agent-to-sink arcs capacity one, and
/// each agent is reachable from every post of its top valid tier.
pub fn build_network(inst: &Instance, state: &ValidityState) -> Result<FlowNetwork, SolverError> {
    let mut net = FlowNetwork::new(inst.num_posts(), inst.num_agents());
    for a in inst.posts() {
        net.add_arc(Node::Source, Node::Post(a.0), state.table[a.0] as u32)?;
    }
    for v in inst.agents() {
        let mut tier = top_valid_tier(inst, state, v).ok_or(SolverError::NoValidTuple { agent: v })?;
        tier.sort();
        for t in tier {
            net.add_arc(Node::Post(t.post.0), Node::Agent(v.0), 1)?;
        }
    }
    for v in inst.agents() {
        net.add_arc(Node::Agent(v.0), Node::Sink, 1)?;
    }
    Ok(net)
}

/// Reads the assignment off a perfect flow: each agent joins the post whose
/// arc carries its unit.
pub fn derive_assignment(network: &FlowNetwork, flow: &Flow) -> Result<Assignment, SolverError> {
    let n = network.num_agents();
    if flow.value() as usize != n {
        return Err(SolverError::NotPerfect {
            value: flow.value(),
            agents: n,
        });
    }
    let mut owner = vec![None; n];
    for (arc, &x) in network.arcs().iter().zip(flow.values()) {
        if let (Node::Post(a), Node::Agent(v), 1) = (arc.from, arc.to, x) {
            owner[v] = Some(PostId(a));
        }
    }
    let owner = owner
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or(SolverError::NotPerfect {
            value: flow.value(),
            agents: n,
        })?;
    Assignment::from_owner(network.num_posts(), owner).map_err(SolverError::Model)
}

/// A set of agents whose reachable posts lack the capacity to host them all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obstruction {
    /// Agent left unrouted by the maximum flow that seeded the search.
    pub seed: AgentId,
    /// Posts in the order they were added.
    pub posts: Vec<PostId>,
    /// Agents in the order they were added, seed first.
    pub agents: Vec<AgentId>,
}

/// Grows an obstruction from the lowest-index agent without flow: repeatedly
/// add the lowest-index post with an arc into the current agent set, together
/// with every agent that post sends flow to, until no such post is left.
pub fn find_obstruction(network: &FlowNetwork, flow: &Flow) -> Result<Obstruction, SolverError> {
    let n = network.num_agents();
    let m = network.num_posts();
    let seed = (0..n)
        .find(|&v| flow.on(network, Node::Agent(v), Node::Sink) == 0)
        .ok_or(SolverError::PerfectFlow)?;

    let mut posts_into: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut routed: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (arc, &x) in network.arcs().iter().zip(flow.values()) {
        if let (Node::Post(a), Node::Agent(v)) = (arc.from, arc.to) {
            posts_into[v].push(a);
            if x == 1 {
                routed[a].push(v);
            }
        }
    }

    let mut in_agents = vec![false; n];
    let mut in_posts = vec![false; m];
    let mut frontier = vec![false; m];
    let mut agents = Vec::new();
    let mut posts = Vec::new();

    let mut admit = |v: usize, agents: &mut Vec<AgentId>, frontier: &mut Vec<bool>| {
        if !in_agents[v] {
            in_agents[v] = true;
            agents.push(AgentId(v));
            for &a in &posts_into[v] {
                frontier[a] = true;
            }
        }
    };
    admit(seed, &mut agents, &mut frontier);
    while let Some(a) = (0..m).find(|&a| frontier[a] && !in_posts[a]) {
        in_posts[a] = true;
        posts.push(PostId(a));
        for &v in &routed[a] {
            admit(v, &mut agents, &mut frontier);
        }
    }
    Ok(Obstruction {
        seed: AgentId(seed),
        posts,
        agents,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObstructionIssue {
    EmptyAgentSet,
    /// The post set differs from the in-neighbourhood of the agent set.
    NotNeighbourhood { missing: Vec<PostId>, extra: Vec<PostId> },
    /// A post's capacity covers all of its neighbours in the agent set.
    PostNotDeficient { post: PostId, capacity: u32, neighbours: usize },
    /// Total capacity covers the agent set.
    NotDeficient { capacity: u32, agents: usize },
}

/// Checks the four defining properties of an obstruction against `network`.
pub fn check_obstruction(network: &FlowNetwork, obstruction: &Obstruction) -> Verdict<ObstructionIssue> {
    let mut issues = Vec::new();
    let m = network.num_posts();
    let mut in_agents = vec![false; network.num_agents()];
    for v in &obstruction.agents {
        in_agents[v.0] = true;
    }
    if obstruction.agents.is_empty() {
        issues.push(ObstructionIssue::EmptyAgentSet);
    }
    let mut neighbours = vec![0usize; m];
    for arc in network.arcs() {
        if let (Node::Post(a), Node::Agent(v)) = (arc.from, arc.to) {
            if in_agents[v] {
                neighbours[a] += 1;
            }
        }
    }
    let mut in_posts = vec![false; m];
    for a in &obstruction.posts {
        in_posts[a.0] = true;
    }
    let missing: Vec<PostId> = (0..m)
        .filter(|&a| neighbours[a] > 0 && !in_posts[a])
        .map(PostId)
        .collect();
    let extra: Vec<PostId> = (0..m)
        .filter(|&a| neighbours[a] == 0 && in_posts[a])
        .map(PostId)
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        issues.push(ObstructionIssue::NotNeighbourhood { missing, extra });
    }
    let capacity_of = |a: PostId| {
        network
            .arc_index(Node::Source, Node::Post(a.0))
            .map_or(0, |i| network.arcs()[i].capacity)
    };
    let mut total = 0;
    for &a in &obstruction.posts {
        let capacity = capacity_of(a);
        total += capacity;
        if capacity as usize >= neighbours[a.0] {
            issues.push(ObstructionIssue::PostNotDeficient {
                post: a,
                capacity,
                neighbours: neighbours[a.0],
            });
        }
    }
    if total as usize >= obstruction.agents.len() {
        issues.push(ObstructionIssue::NotDeficient {
            capacity: total,
            agents: obstruction.agents.len(),
        });
    }
    Verdict::from_witnesses(issues)
}
