//! Exact existence deciders for small instances.
//!
//! Whether an assignment is Nash stable, envy-free or competitive depends only
//! on each agent's post and on the congestion profile. For a fixed profile
//! this gives every agent a set of admissible posts, and filling each post
//! with exactly its profiled number of admissible agents is a bipartite
//! degree-constrained matching, solved here with a max-flow. Enumerating
//! profiles is exponential in the number of posts only.
//!
//! [`enumerate_all_assignments`] is the naive cross-check: it tries every
//! mapping of agents to posts.

use std::ops::ControlFlow;

use thiserror::Error;

use crate::maxflow::{max_flow, FlowNetwork, Node};
use crate::model::{check, AgentId, Assignment, Concept, CongestionProfile, Instance, PostId, Tuple};

pub const PROFILE_LIMIT: u128 = 1_000_000;
pub const ASSIGNMENT_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{count} congestion profiles exceed the limit of {limit}")]
    TooManyProfiles { count: u128, limit: u128 },
    #[error("{count} assignments exceed the limit of {limit}")]
    TooManyAssignments { count: u128, limit: u128 },
}

/// Per-post upper bound on congestion: the largest maximum congestion any
/// agent has for the post.
pub fn profile_caps(inst: &Instance) -> Vec<usize> {
    inst.posts()
        .map(|a| inst.agents().map(|v| inst.max_congestion(v, a)).max().unwrap_or(0))
        .collect()
}

/// Number of profiles [`enumerate_profiles`] would produce.
pub fn profile_count(inst: &Instance) -> u128 {
    let n = inst.num_agents();
    // ways[s] = number of ways the posts seen so far sum to s.
    let mut ways = vec![0u128; n + 1];
    ways[0] = 1;
    for cap in profile_caps(inst) {
        let mut next = vec![0u128; n + 1];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for x in 0..=cap.min(n - s) {
                next[s + x] = next[s + x].saturating_add(w);
            }
        }
        ways = next;
    }
    ways[n]
}

fn guard_profiles(inst: &Instance) -> Result<(), OracleError> {
    let count = profile_count(inst);
    if count > PROFILE_LIMIT {
        return Err(OracleError::TooManyProfiles {
            count,
            limit: PROFILE_LIMIT,
        });
    }
    Ok(())
}

/// Visits every profile summing to `n` within `caps`, in lexicographic order.
fn for_each_profile<F>(caps: &[usize], n: usize, mut visit: F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let mut suffix = vec![0usize; caps.len() + 1];
    for i in (0..caps.len()).rev() {
        suffix[i] = suffix[i + 1] + caps[i];
    }
    let mut sizes = vec![0usize; caps.len()];
    fn rec<F: FnMut(&[usize]) -> ControlFlow<()>>(
        i: usize,
        remaining: usize,
        caps: &[usize],
        suffix: &[usize],
        sizes: &mut Vec<usize>,
        visit: &mut F,
    ) -> ControlFlow<()> {
        if i == caps.len() {
            return if remaining == 0 {
                visit(sizes)
            } else {
                ControlFlow::Continue(())
            };
        }
        let lo = remaining.saturating_sub(suffix[i + 1]);
        let hi = caps[i].min(remaining);
        for x in lo..=hi {
            sizes[i] = x;
            rec(i + 1, remaining - x, caps, suffix, sizes, visit)?;
        }
        ControlFlow::Continue(())
    }
    let _ = rec(0, n, caps, &suffix, &mut sizes, &mut visit);
}

/// All congestion profiles that sum to `n` and respect [`profile_caps`],
/// lexicographically ordered.
pub fn enumerate_profiles(inst: &Instance) -> Result<Vec<CongestionProfile>, OracleError> {
    guard_profiles(inst)?;
    let mut out = Vec::new();
    for_each_profile(&profile_caps(inst), inst.num_agents(), |sizes| {
        out.push(CongestionProfile::new(sizes.to_vec()));
        ControlFlow::Continue(())
    });
    Ok(out)
}

fn rank(inst: &Instance, v: AgentId, t: Tuple) -> usize {
    inst.preferences(v).rank(t).unwrap_or(usize::MAX)
}

/// Posts `agent` may occupy under `sizes` without breaking `concept`.
pub fn allowed_posts(inst: &Instance, sizes: &[usize], concept: Concept, agent: AgentId) -> Vec<PostId> {
    // threat[b]: the rank agent must at least match to be content with b as an alternative.
    let threat: Vec<usize> = inst
        .posts()
        .map(|b| {
            let s = sizes[b.0];
            match concept {
                Concept::Ns => rank(inst, agent, Tuple::new(b, s + 1)),
                Concept::Ef if s == 0 => usize::MAX,
                Concept::Ef => rank(inst, agent, Tuple::new(b, s)),
                Concept::Cp => rank(inst, agent, Tuple::new(b, s.max(1))),
            }
        })
        .collect();
    // Best and second-best threats, so each post can exclude itself in O(1).
    let mut best = (usize::MAX, usize::MAX);
    let mut best_post = usize::MAX;
    for (b, &t) in threat.iter().enumerate() {
        if t < best.0 {
            best = (t, best.0);
            best_post = b;
        } else if t < best.1 {
            best.1 = t;
        }
    }
    inst.posts()
        .filter(|a| {
            let s = sizes[a.0];
            if s == 0 {
                return false;
            }
            let own = rank(inst, agent, Tuple::new(*a, s));
            if own == usize::MAX {
                return false;
            }
            let bound = if a.0 == best_post { best.1 } else { best.0 };
            own <= bound
        })
        .collect()
}

/// An assignment with congestion profile `sizes` satisfying `concept`, if any.
pub fn feasible_with_profile(inst: &Instance, sizes: &[usize], concept: Concept) -> Option<Assignment> {
    let n = inst.num_agents();
    let m = inst.num_posts();
    if sizes.len() != m || sizes.iter().sum::<usize>() != n {
        return None;
    }
    let allowed: Vec<Vec<PostId>> = inst
        .agents()
        .map(|v| allowed_posts(inst, sizes, concept, v))
        .collect();
    if allowed.iter().any(Vec::is_empty) {
        return None;
    }
    let mut supply = vec![0usize; m];
    for a in allowed.iter().flatten() {
        supply[a.0] += 1;
    }
    if supply.iter().zip(sizes).any(|(&have, &need)| have < need) {
        return None;
    }

    let mut net = FlowNetwork::new(m, n);
    for (a, &s) in sizes.iter().enumerate() {
        net.add_arc(Node::Source, Node::Post(a), s as u32)
            .expect("well-formed arc");
    }
    for (v, posts) in allowed.iter().enumerate() {
        for a in posts {
            net.add_arc(Node::Post(a.0), Node::Agent(v), 1)
                .expect("well-formed arc");
        }
    }
    for v in 0..n {
        net.add_arc(Node::Agent(v), Node::Sink, 1)
            .expect("well-formed arc");
    }
    let flow = max_flow(&net);
    if flow.value() as usize != n {
        return None;
    }
    let owner = (0..n)
        .map(|v| {
            allowed[v]
                .iter()
                .copied()
                .find(|a| flow.on(&net, Node::Post(a.0), Node::Agent(v)) == 1)
                .expect("perfect flow routes every agent")
        })
        .collect();
    Assignment::from_owner(m, owner).ok()
}

/// Witness for the lexicographically first feasible profile, or `None`.
pub fn solve_exact(inst: &Instance, concept: Concept) -> Result<Option<Assignment>, OracleError> {
    guard_profiles(inst)?;
    let mut found = None;
    for_each_profile(&profile_caps(inst), inst.num_agents(), |sizes| {
        match feasible_with_profile(inst, sizes, concept) {
            Some(pi) => {
                found = Some(pi);
                ControlFlow::Break(())
            }
            None => ControlFlow::Continue(()),
        }
    });
    Ok(found)
}

/// One witness per feasible profile, in profile order.
pub fn feasible_profiles(inst: &Instance, concept: Concept) -> Result<Vec<Assignment>, OracleError> {
    guard_profiles(inst)?;
    let mut out = Vec::new();
    for_each_profile(&profile_caps(inst), inst.num_agents(), |sizes| {
        if let Some(pi) = feasible_with_profile(inst, sizes, concept) {
            out.push(pi);
        }
        ControlFlow::Continue(())
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub count: u64,
    pub first: Option<Assignment>,
}

/// Brute force over all `m^n` agent-to-post mappings.
pub fn enumerate_all_assignments(inst: &Instance, concept: Concept) -> Result<Enumeration, OracleError> {
    let n = inst.num_agents();
    let m = inst.num_posts();
    let total = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > ASSIGNMENT_LIMIT {
        return Err(OracleError::TooManyAssignments {
            count: total,
            limit: ASSIGNMENT_LIMIT,
        });
    }
    let mut digits = vec![0usize; n];
    let mut count = 0;
    let mut first = None;
    loop {
        let owner = digits.iter().map(|&a| PostId(a)).collect();
        let pi = Assignment::from_owner(m, owner).expect("digits are in range");
        if check(inst, &pi, concept).holds() {
            count += 1;
            if first.is_none() {
                first = Some(pi);
            }
        }
        // Odometer, last agent fastest.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(Enumeration { count, first });
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < m {
                break;
            }
            digits[i] = 0;
        }
    }
}
