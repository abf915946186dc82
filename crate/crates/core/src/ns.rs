//! Nash-stable assignments by insertion-order best-response dynamics.

use thiserror::Error;

use crate::model::{AgentId, Assignment, Instance, PostId, Tuple};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NsError {
    #[error("best-response dynamics exceeded the step budget of {budget}")]
    BudgetExceeded { budget: usize },
}

/// An assignment under construction; unplaced agents have no post.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAssignment {
    owner: Vec<Option<PostId>>,
    sizes: Vec<usize>,
}

impl PartialAssignment {
    pub fn empty(inst: &Instance) -> Self {
        Self {
            owner: vec![None; inst.num_agents()],
            sizes: vec![0; inst.num_posts()],
        }
    }

    pub fn owner(&self, agent: AgentId) -> Option<PostId> {
        self.owner[agent.0]
    }

    pub fn size(&self, post: PostId) -> usize {
        self.sizes[post.0]
    }

    /// Moves (or places) `agent` onto `post`.
    pub fn place(&mut self, agent: AgentId, post: PostId) {
        if let Some(old) = self.owner[agent.0] {
            self.sizes[old.0] -= 1;
        }
        self.owner[agent.0] = Some(post);
        self.sizes[post.0] += 1;
    }

    pub fn held(&self, agent: AgentId) -> Option<Tuple> {
        self.owner(agent).map(|a| Tuple::new(a, self.size(a)))
    }

    /// The complete assignment, once every agent is placed.
    pub fn to_assignment(&self) -> Option<Assignment> {
        let owner = self.owner.iter().copied().collect::<Option<Vec<_>>>()?;
        Assignment::from_owner(self.sizes.len(), owner).ok()
    }
}

/// The post `agent` would pick given everyone else's placement: the best
/// `(post, size + 1)` over other posts, lowest index on ties, or its current
/// post when nothing is strictly better.
pub fn best_response(inst: &Instance, partial: &PartialAssignment, agent: AgentId) -> PostId {
    let current = partial.owner(agent);
    let prefs = inst.preferences(agent);
    let mut best: Option<(Tuple, Option<usize>)> = None;
    for a in inst.posts() {
        if Some(a) == current {
            continue;
        }
        let t = Tuple::new(a, partial.size(a) + 1);
        let rank = prefs.rank(t);
        let better = match best {
            None => true,
            Some((_, best_rank)) => rank_lt(rank, best_rank),
        };
        if better {
            best = Some((t, rank));
        }
    }
    match (current, best) {
        (Some(a), Some((t, _))) => {
            let held = Tuple::new(a, partial.size(a));
            if inst.strictly_prefers(agent, t, held) {
                t.post
            } else {
                a
            }
        }
        (Some(a), None) => a,
        (None, Some((t, _))) => t.post,
        (None, None) => unreachable!("instances have at least one post"),
    }
}

fn rank_lt(a: Option<usize>, b: Option<usize>) -> bool {
    a.unwrap_or(usize::MAX) < b.unwrap_or(usize::MAX)
}

/// A strict-improvement move made during the dynamics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsMove {
    pub agent: AgentId,
    pub before: Tuple,
    pub after: Tuple,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NsOutcome {
    pub assignment: Assignment,
    pub moves: Vec<NsMove>,
}

/// Step budget for the improvement phase: `4 n^2 m`.
pub fn step_budget(inst: &Instance) -> usize {
    let n = inst.num_agents();
    4 * n * n * inst.num_posts()
}

/// Inserts agents in index order, each taking a best response, and after every
/// insertion lets the lowest-index agent with a strictly improving deviation
/// move until nobody wants to.
pub fn ns_solve(inst: &Instance) -> Result<NsOutcome, NsError> {
    let budget = step_budget(inst);
    let mut partial = PartialAssignment::empty(inst);
    let mut moves = Vec::new();
    for entering in inst.agents() {
        let post = best_response(inst, &partial, entering);
        partial.place(entering, post);
        loop {
            let mover = (0..=entering.0).map(AgentId).find_map(|v| {
                let target = best_response(inst, &partial, v);
                (Some(target) != partial.owner(v)).then_some((v, target))
            });
            let Some((v, target)) = mover else { break };
            if moves.len() >= budget {
                return Err(NsError::BudgetExceeded { budget });
            }
            let before = partial.held(v).expect("inserted agents are placed");
            partial.place(v, target);
            let after = partial.held(v).expect("just placed");
            moves.push(NsMove {
                agent: v,
                before,
                after,
            });
        }
    }
    let assignment = partial.to_assignment().expect("all agents inserted");
    Ok(NsOutcome { assignment, moves })
}
