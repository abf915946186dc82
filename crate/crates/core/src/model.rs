//! Congested assignment instances, assignments, and the Nash-stability,
//! envy-freeness and competitiveness checkers.
//!
//! Every agent ranks `(post, congestion)` tuples by a weak order given as a
//! sequence of indifference tiers. A tuple that does not occur in an agent's
//! list sits in an implicit bottom tier: strictly worse than every listed
//! tuple and indifferent to every other unlisted tuple.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::verdict::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PostId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub usize);

impl PostId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl AgentId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A `(post, congestion)` pair; congestions start at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple {
    pub post: PostId,
    pub congestion: usize,
}

impl Tuple {
    pub fn new(post: PostId, congestion: usize) -> Self {
        Self { post, congestion }
    }
}

/// One indifference class of a preference list.
pub type Tier = Vec<Tuple>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("instance needs at least one post")]
    NoPosts,
    #[error("instance needs at least one agent")]
    NoAgents,
    #[error("duplicate post identifier `{0}`")]
    DuplicatePost(String),
    #[error("duplicate agent identifier `{0}`")]
    DuplicateAgent(String),
    #[error("expected {expected} preference lists, found {found}")]
    PreferenceCount { expected: usize, found: usize },
    #[error("agent `{agent}` refers to post index {post} but there are only {posts} posts")]
    UnknownPostIndex {
        agent: String,
        post: usize,
        posts: usize,
    },
    #[error("agent `{0}` lists a tuple with congestion 0")]
    ZeroCongestion(String),
    #[error("unknown post `{0}`")]
    UnknownPost(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent index {agent} is placed more than once")]
    AgentPlacedTwice { agent: usize },
    #[error("agent index {agent} is not placed on any post")]
    AgentUnplaced { agent: usize },
    #[error("post index {post} out of range for {posts} posts")]
    PostOutOfRange { post: usize, posts: usize },
    #[error("agent index {agent} out of range for {agents} agents")]
    AgentOutOfRange { agent: usize, agents: usize },
}

/// A weak order over `(post, congestion)` tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceList {
    tiers: Vec<Tier>,
    // ranks[post][d - 1] = tier index of (post, d); first occurrence wins.
    ranks: Vec<Vec<Option<usize>>>,
}

impl PreferenceList {
    fn new(mut tiers: Vec<Tier>, num_posts: usize) -> Self {
        // Order within a tier carries no meaning; keep it canonical.
        for tier in &mut tiers {
            tier.sort_unstable();
        }
        let mut ranks: Vec<Vec<Option<usize>>> = vec![Vec::new(); num_posts];
        for (rank, tier) in tiers.iter().enumerate() {
            for t in tier {
                let slots = &mut ranks[t.post.0];
                if slots.len() < t.congestion {
                    slots.resize(t.congestion, None);
                }
                let slot = &mut slots[t.congestion - 1];
                if slot.is_none() {
                    *slot = Some(rank);
                }
            }
        }
        Self { tiers, ranks }
    }

    pub fn tiers(&self) -> &[Tier] {
        &self.tiers
    }

    /// Tier index of `t`, or `None` when `t` is not listed.
    pub fn rank(&self, t: Tuple) -> Option<usize> {
        if t.congestion == 0 {
            return None;
        }
        self.ranks
            .get(t.post.0)
            .and_then(|slots| slots.get(t.congestion - 1))
            .copied()
            .flatten()
    }

    pub fn is_listed(&self, t: Tuple) -> bool {
        self.rank(t).is_some()
    }

    /// Largest congestion listed together with `post` (0 if the post never appears).
    pub fn max_congestion(&self, post: PostId) -> usize {
        self.ranks.get(post.0).map_or(0, Vec::len)
    }

    pub fn compare(&self, first: Tuple, second: Tuple) -> Comparison {
        // Lower rank is better; unlisted tuples share the bottom rank.
        let key = |t| self.rank(t).unwrap_or(usize::MAX);
        match key(first).cmp(&key(second)) {
            Ordering::Less => Comparison::PreferFirst,
            Ordering::Greater => Comparison::PreferSecond,
            Ordering::Equal => Comparison::Indifferent,
        }
    }

    pub fn len(&self) -> usize {
        self.tiers.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.tiers.iter().all(Vec::is_empty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    PreferFirst,
    PreferSecond,
    Indifferent,
}

/// A congested assignment instance: posts, agents, and one weak order per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    posts: Vec<String>,
    agents: Vec<String>,
    prefs: Vec<PreferenceList>,
    post_lookup: HashMap<String, PostId>,
    agent_lookup: HashMap<String, AgentId>,
}

impl Instance {
    /// Builds an instance from identifiers and per-agent tier lists.
    ///
    /// Only structural problems are rejected here. Whether the lists form
    /// proper congestion-decreasing weak orders of length `n` is reported by
    /// [`Instance::validate`].
    pub fn new(
        posts: Vec<String>,
        agents: Vec<String>,
        prefs: Vec<Vec<Tier>>,
    ) -> Result<Self, ModelError> {
        if posts.is_empty() {
            return Err(ModelError::NoPosts);
        }
        if agents.is_empty() {
            return Err(ModelError::NoAgents);
        }
        if prefs.len() != agents.len() {
            return Err(ModelError::PreferenceCount {
                expected: agents.len(),
                found: prefs.len(),
            });
        }
        let mut post_lookup = HashMap::with_capacity(posts.len());
        for (i, name) in posts.iter().enumerate() {
            if post_lookup.insert(name.clone(), PostId(i)).is_some() {
                return Err(ModelError::DuplicatePost(name.clone()));
            }
        }
        let mut agent_lookup = HashMap::with_capacity(agents.len());
        for (i, name) in agents.iter().enumerate() {
            if agent_lookup.insert(name.clone(), AgentId(i)).is_some() {
                return Err(ModelError::DuplicateAgent(name.clone()));
            }
        }
        let m = posts.len();
        let mut lists = Vec::with_capacity(prefs.len());
        for (agent, tiers) in agents.iter().zip(prefs) {
            for t in tiers.iter().flatten() {
                if t.post.0 >= m {
                    return Err(ModelError::UnknownPostIndex {
                        agent: agent.clone(),
                        post: t.post.0,
                        posts: m,
                    });
                }
                if t.congestion == 0 {
                    return Err(ModelError::ZeroCongestion(agent.clone()));
                }
            }
            lists.push(PreferenceList::new(tiers, m));
        }
        Ok(Self {
            posts,
            agents,
            prefs: lists,
            post_lookup,
            agent_lookup,
        })
    }

    pub fn num_posts(&self) -> usize {
        self.posts.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn posts(&self) -> impl Iterator<Item = PostId> + '_ {
        (0..self.posts.len()).map(PostId)
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.agents.len()).map(AgentId)
    }

    pub fn post_name(&self, post: PostId) -> &str {
        &self.posts[post.0]
    }

    pub fn agent_name(&self, agent: AgentId) -> &str {
        &self.agents[agent.0]
    }

    pub fn post_names(&self) -> &[String] {
        &self.posts
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agents
    }

    pub fn post_id(&self, name: &str) -> Result<PostId, ModelError> {
        self.post_lookup
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownPost(name.to_string()))
    }

    pub fn agent_id(&self, name: &str) -> Result<AgentId, ModelError> {
        self.agent_lookup
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownAgent(name.to_string()))
    }

    pub fn preferences(&self, agent: AgentId) -> &PreferenceList {
        &self.prefs[agent.0]
    }

    pub fn max_congestion(&self, agent: AgentId, post: PostId) -> usize {
        self.prefs[agent.0].max_congestion(post)
    }

    /// Name-based variant of [`Instance::max_congestion`].
    pub fn max_congestion_of(&self, agent: &str, post: &str) -> Result<usize, ModelError> {
        Ok(self.max_congestion(self.agent_id(agent)?, self.post_id(post)?))
    }

    pub fn compare(&self, agent: AgentId, first: Tuple, second: Tuple) -> Comparison {
        self.prefs[agent.0].compare(first, second)
    }

    pub fn strictly_prefers(&self, agent: AgentId, first: Tuple, second: Tuple) -> bool {
        self.compare(agent, first, second) == Comparison::PreferFirst
    }

    pub fn weakly_prefers(&self, agent: AgentId, first: Tuple, second: Tuple) -> bool {
        self.compare(agent, first, second) != Comparison::PreferSecond
    }

    /// Cuts every list after its first `n` tuples, `n` being the number of
    /// agents. Lists already of length `n` are kept. Returns `None` when a
    /// list is shorter than `n` or the cut would split a tier.
    ///
    /// Assignments in which every agent holds one of its first `n` tuples
    /// compare identically before and after the cut, so competitiveness is
    /// unaffected; envy-freeness in general is not.
    pub fn truncate_lists(&self) -> Option<Instance> {
        let n = self.num_agents();
        let mut prefs = Vec::with_capacity(n);
        for v in self.agents() {
            let mut kept = Vec::new();
            let mut count = 0;
            for tier in self.preferences(v).tiers() {
                if count == n {
                    break;
                }
                count += tier.len();
                kept.push(tier.clone());
            }
            if count != n {
                return None;
            }
            prefs.push(kept);
        }
        Instance::new(self.posts.clone(), self.agents.clone(), prefs).ok()
    }

    /// Checks every structural invariant of the preference lists.
    pub fn validate(&self) -> Verdict<InstanceIssue> {
        let n = self.num_agents();
        let mut issues = Vec::new();
        for v in self.agents() {
            let list = self.preferences(v);
            let mut seen = HashMap::new();
            for (ti, tier) in list.tiers().iter().enumerate() {
                if tier.is_empty() {
                    issues.push(InstanceIssue::EmptyTier { agent: v, tier: ti });
                }
                let mut posts_in_tier = Vec::new();
                for &t in tier {
                    if seen.insert(t, ti).is_some() {
                        issues.push(InstanceIssue::DuplicateTuple { agent: v, tuple: t });
                        continue;
                    }
                    if t.congestion > n {
                        issues.push(InstanceIssue::CongestionOutOfRange { agent: v, tuple: t });
                    }
                    if posts_in_tier.contains(&t.post) {
                        issues.push(InstanceIssue::PostRepeatedInTier {
                            agent: v,
                            tier: ti,
                            post: t.post,
                        });
                    } else {
                        posts_in_tier.push(t.post);
                    }
                }
            }
            let mut total = 0;
            for a in self.posts() {
                let max = list.max_congestion(a);
                total += max;
                for d in 1..=max {
                    let here = list.rank(Tuple::new(a, d));
                    if here.is_none() {
                        issues.push(InstanceIssue::MissingCongestion {
                            agent: v,
                            post: a,
                            congestion: d,
                        });
                        continue;
                    }
                    if d > 1 {
                        if let (Some(prev), Some(cur)) = (list.rank(Tuple::new(a, d - 1)), here) {
                            if prev >= cur {
                                issues.push(InstanceIssue::NotDecreasingInCongestion {
                                    agent: v,
                                    post: a,
                                    congestion: d,
                                });
                            }
                        }
                    }
                }
            }
            if total != n {
                issues.push(InstanceIssue::WrongLength {
                    agent: v,
                    total,
                    expected: n,
                });
            }
        }
        Verdict::from_witnesses(issues)
    }
}

/// One broken invariant found by [`Instance::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceIssue {
    EmptyTier { agent: AgentId, tier: usize },
    DuplicateTuple { agent: AgentId, tuple: Tuple },
    CongestionOutOfRange { agent: AgentId, tuple: Tuple },
    PostRepeatedInTier { agent: AgentId, tier: usize, post: PostId },
    /// `(post, congestion)` is absent although a larger congestion for the post is listed.
    MissingCongestion { agent: AgentId, post: PostId, congestion: usize },
    /// `(post, congestion)` is not strictly below `(post, congestion - 1)`.
    NotDecreasingInCongestion { agent: AgentId, post: PostId, congestion: usize },
    /// The maximum congestions of the agent do not sum to the number of agents.
    WrongLength { agent: AgentId, total: usize, expected: usize },
}

impl InstanceIssue {
    pub fn agent(&self) -> AgentId {
        match *self {
            InstanceIssue::EmptyTier { agent, .. }
            | InstanceIssue::DuplicateTuple { agent, .. }
            | InstanceIssue::CongestionOutOfRange { agent, .. }
            | InstanceIssue::PostRepeatedInTier { agent, .. }
            | InstanceIssue::MissingCongestion { agent, .. }
            | InstanceIssue::NotDecreasingInCongestion { agent, .. }
            | InstanceIssue::WrongLength { agent, .. } => agent,
        }
    }

    pub fn describe(&self, inst: &Instance) -> String {
        let v = inst.agent_name(self.agent());
        let tup = |t: &Tuple| format_tuple(inst, *t);
        match self {
            InstanceIssue::EmptyTier { tier, .. } => format!("{v}: tier {} is empty", tier + 1),
            InstanceIssue::DuplicateTuple { tuple, .. } => {
                format!("{v}: tuple {} listed more than once", tup(tuple))
            }
            InstanceIssue::CongestionOutOfRange { tuple, .. } => format!(
                "{v}: tuple {} exceeds the number of agents {}",
                tup(tuple),
                inst.num_agents()
            ),
            InstanceIssue::PostRepeatedInTier { tier, post, .. } => format!(
                "{v}: post {} appears twice in tier {}",
                inst.post_name(*post),
                tier + 1
            ),
            InstanceIssue::MissingCongestion {
                post, congestion, ..
            } => format!(
                "{v}: non-contiguous list, ({},{}) missing",
                inst.post_name(*post),
                congestion
            ),
            InstanceIssue::NotDecreasingInCongestion {
                post, congestion, ..
            } => format!(
                "{v}: ({p},{d}) is not strictly worse than ({p},{e})",
                p = inst.post_name(*post),
                d = congestion,
                e = congestion - 1
            ),
            InstanceIssue::WrongLength {
                total, expected, ..
            } => format!("{v}: short or long list, maximum congestions sum to {total}, expected {expected}"),
        }
    }
}

pub fn format_tuple(inst: &Instance, t: Tuple) -> String {
    format!("({},{})", inst.post_name(t.post), t.congestion)
}

/// Number of agents on each post.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CongestionProfile(Vec<usize>);

impl CongestionProfile {
    pub fn new(sizes: Vec<usize>) -> Self {
        Self(sizes)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, post: PostId) -> usize {
        self.0[post.0]
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn has_empty_post(&self) -> bool {
        self.0.contains(&0)
    }
}

/// A partition of the agents over the posts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    owner: Vec<PostId>,
    blocks: Vec<Vec<AgentId>>,
}

impl Assignment {
    /// Builds an assignment from the post of every agent.
    pub fn from_owner(num_posts: usize, owner: Vec<PostId>) -> Result<Self, ModelError> {
        let mut blocks = vec![Vec::new(); num_posts];
        for (v, a) in owner.iter().enumerate() {
            if a.0 >= num_posts {
                return Err(ModelError::PostOutOfRange {
                    post: a.0,
                    posts: num_posts,
                });
            }
            blocks[a.0].push(AgentId(v));
        }
        Ok(Self { owner, blocks })
    }

    /// Builds an assignment from per-post agent sets, which must partition `0..num_agents`.
    pub fn from_blocks(num_agents: usize, blocks: Vec<Vec<AgentId>>) -> Result<Self, ModelError> {
        let mut owner = vec![None; num_agents];
        for (a, block) in blocks.iter().enumerate() {
            for v in block {
                let slot = owner.get_mut(v.0).ok_or(ModelError::AgentOutOfRange {
                    agent: v.0,
                    agents: num_agents,
                })?;
                if slot.is_some() {
                    return Err(ModelError::AgentPlacedTwice { agent: v.0 });
                }
                *slot = Some(PostId(a));
            }
        }
        let owner = owner
            .into_iter()
            .enumerate()
            .map(|(v, a)| a.ok_or(ModelError::AgentUnplaced { agent: v }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_owner(blocks.len(), owner)
    }

    pub fn num_agents(&self) -> usize {
        self.owner.len()
    }

    pub fn num_posts(&self) -> usize {
        self.blocks.len()
    }

    pub fn owner(&self, agent: AgentId) -> PostId {
        self.owner[agent.0]
    }

    pub fn owners(&self) -> &[PostId] {
        &self.owner
    }

    /// Agents on `post`, in increasing index order.
    pub fn block(&self, post: PostId) -> &[AgentId] {
        &self.blocks[post.0]
    }

    pub fn congestion(&self, post: PostId) -> usize {
        self.blocks[post.0].len()
    }

    pub fn profile(&self) -> CongestionProfile {
        CongestionProfile(self.blocks.iter().map(Vec::len).collect())
    }

    /// The tuple agent `v` currently experiences.
    pub fn held(&self, agent: AgentId) -> Tuple {
        let a = self.owner(agent);
        Tuple::new(a, self.congestion(a))
    }
}

/// Stability notions an assignment can be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Concept {
    /// Nash stable.
    Ns,
    /// Envy-free.
    Ef,
    /// Competitive.
    Cp,
}

impl Concept {
    pub const ALL: [Concept; 3] = [Concept::Ns, Concept::Ef, Concept::Cp];
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Concept::Ns => "ns",
            Concept::Ef => "ef",
            Concept::Cp => "cp",
        })
    }
}

impl FromStr for Concept {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ns" => Ok(Concept::Ns),
            "ef" => Ok(Concept::Ef),
            "cp" => Ok(Concept::Cp),
            other => Err(format!("unknown concept `{other}` (expected ns, ef or cp)")),
        }
    }
}

/// A single reason an assignment fails a stability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The agent sits on its post beyond its maximum congestion there.
    OverCongested {
        agent: AgentId,
        held: Tuple,
        max_congestion: usize,
    },
    /// Moving to `target` (congestion counted with the mover) is strictly better.
    Deviation {
        agent: AgentId,
        held: Tuple,
        target: Tuple,
    },
    /// The agent strictly prefers the situation of `envied`.
    Envy {
        agent: AgentId,
        envied: AgentId,
        held: Tuple,
        target: Tuple,
    },
    /// The agent strictly prefers being alone on the empty post of `target`.
    EmptyPost {
        agent: AgentId,
        held: Tuple,
        target: Tuple,
    },
}

impl Violation {
    pub fn agent(&self) -> AgentId {
        match *self {
            Violation::OverCongested { agent, .. }
            | Violation::Deviation { agent, .. }
            | Violation::Envy { agent, .. }
            | Violation::EmptyPost { agent, .. } => agent,
        }
    }

    pub fn describe(&self, inst: &Instance) -> String {
        let name = |v: AgentId| inst.agent_name(v).to_string();
        let tup = |t: Tuple| format_tuple(inst, t);
        match *self {
            Violation::OverCongested {
                agent,
                held,
                max_congestion,
            } => format!(
                "{} sits at {} beyond its maximum congestion {}",
                name(agent),
                tup(held),
                max_congestion
            ),
            Violation::Deviation {
                agent,
                held,
                target,
            } => format!(
                "{} prefers {} to {} by deviating",
                name(agent),
                tup(target),
                tup(held)
            ),
            Violation::Envy {
                agent,
                envied,
                held,
                target,
            } => format!(
                "{} prefers {} to {}, envying {}",
                name(agent),
                tup(target),
                tup(held),
                name(envied)
            ),
            Violation::EmptyPost {
                agent,
                held,
                target,
            } => format!(
                "{} prefers {} to {}, moving to an empty post",
                name(agent),
                tup(target),
                tup(held)
            ),
        }
    }
}

/// Checks `assignment` against `concept`, reporting every violating
/// (agent, target) pair.
///
/// # Panics
///
/// Panics if the assignment's dimensions differ from the instance's.
pub fn check(inst: &Instance, assignment: &Assignment, concept: Concept) -> Verdict<Violation> {
    assert_eq!(assignment.num_agents(), inst.num_agents(), "agent count mismatch");
    assert_eq!(assignment.num_posts(), inst.num_posts(), "post count mismatch");
    let mut out = Vec::new();
    for v in inst.agents() {
        let held = assignment.held(v);
        let max = inst.max_congestion(v, held.post);
        if held.congestion > max {
            out.push(Violation::OverCongested {
                agent: v,
                held,
                max_congestion: max,
            });
        }
        for a in inst.posts() {
            if a == held.post {
                continue;
            }
            let size = assignment.congestion(a);
            match concept {
                Concept::Ns => {
                    let target = Tuple::new(a, size + 1);
                    if inst.strictly_prefers(v, target, held) {
                        out.push(Violation::Deviation {
                            agent: v,
                            held,
                            target,
                        });
                    }
                }
                Concept::Ef | Concept::Cp => {
                    if size == 0 {
                        let target = Tuple::new(a, 1);
                        if concept == Concept::Cp && inst.strictly_prefers(v, target, held) {
                            out.push(Violation::EmptyPost {
                                agent: v,
                                held,
                                target,
                            });
                        }
                        continue;
                    }
                    let target = Tuple::new(a, size);
                    if inst.strictly_prefers(v, target, held) {
                        out.extend(assignment.block(a).iter().map(|&envied| Violation::Envy {
                            agent: v,
                            envied,
                            held,
                            target,
                        }));
                    }
                }
            }
        }
    }
    Verdict::from_witnesses(out)
}
