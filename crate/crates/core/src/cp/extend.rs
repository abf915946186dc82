//! Extended instances: padding an instance with `k` post-filler agents and a
//! two-agent, two-post gadget so that competitive assignments with `k` empty
//! posts correspond to competitive assignments of the extension with no empty
//! post.

use std::collections::HashSet;
use std::ops::RangeInclusive;

use crate::model::{AgentId, Assignment, Instance, PostId, Tier, Tuple};
use crate::verdict::Verdict;

use super::SolverError;

/// An instance extended with `k` fillers `u_1..u_k`, gadget agents `p1, p2`
/// and gadget posts `b1, b2`.
///
/// Agents are laid out as originals, fillers, `p1`, `p2`; posts as
/// originals, `b1`, `b2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedInstance {
    instance: Instance,
    k: usize,
    original_agents: usize,
    original_posts: usize,
}

impl ExtendedInstance {
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn original_agents(&self) -> usize {
        self.original_agents
    }

    pub fn original_posts(&self) -> usize {
        self.original_posts
    }

    /// Filler `u_z` for `z` in `1..=k`.
    pub fn filler(&self, z: usize) -> AgentId {
        assert!((1..=self.k).contains(&z), "filler index {z} out of 1..={}", self.k);
        AgentId(self.original_agents + z - 1)
    }

    pub fn fillers(&self) -> impl Iterator<Item = AgentId> {
        let start = self.original_agents;
        (start..start + self.k).map(AgentId)
    }

    pub fn p1(&self) -> AgentId {
        AgentId(self.original_agents + self.k)
    }

    pub fn p2(&self) -> AgentId {
        AgentId(self.original_agents + self.k + 1)
    }

    pub fn b1(&self) -> PostId {
        PostId(self.original_posts)
    }

    pub fn b2(&self) -> PostId {
        PostId(self.original_posts + 1)
    }

    pub fn is_original_agent(&self, v: AgentId) -> bool {
        v.0 < self.original_agents
    }

    pub fn is_filler(&self, v: AgentId) -> bool {
        (self.original_agents..self.original_agents + self.k).contains(&v.0)
    }

    pub fn is_original_post(&self, a: PostId) -> bool {
        a.0 < self.original_posts
    }
}

/// Numbers of empty posts worth trying: `max(0, m - n) ..= m - 1`.
pub fn k_range(inst: &Instance) -> RangeInclusive<usize> {
    let m = inst.num_posts();
    let n = inst.num_agents();
    m.saturating_sub(n)..=m - 1
}

fn fresh_name(base: &str, taken: &mut HashSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

pub fn extend_instance(inst: &Instance, k: usize) -> Result<ExtendedInstance, SolverError> {
    let range = k_range(inst);
    if !range.contains(&k) {
        return Err(SolverError::KOutOfRange {
            k,
            min: *range.start(),
            max: *range.end(),
        });
    }
    let n = inst.num_agents();
    let m = inst.num_posts();
    let mut taken: HashSet<String> = inst
        .agent_names()
        .iter()
        .chain(inst.post_names())
        .cloned()
        .collect();

    let mut posts = inst.post_names().to_vec();
    posts.push(fresh_name("b1", &mut taken));
    posts.push(fresh_name("b2", &mut taken));
    let b1 = PostId(m);
    let b2 = PostId(m + 1);
    let chain = |post: PostId, len: usize| -> Vec<Tier> {
        (1..=len).map(|d| vec![Tuple::new(post, d)]).collect()
    };

    let mut agents = inst.agent_names().to_vec();
    let mut prefs: Vec<Vec<Tier>> = Vec::with_capacity(n + k + 2);
    for v in inst.agents() {
        let mut tiers = inst.preferences(v).tiers().to_vec();
        tiers.extend(chain(b1, k + 2));
        prefs.push(tiers);
    }
    for z in 1..=k {
        agents.push(fresh_name(&format!("u{z}"), &mut taken));
        let mut tiers = vec![(0..m).map(|j| Tuple::new(PostId(j), 1)).collect::<Tier>()];
        tiers.extend(chain(b1, k + n + 2 - m));
        prefs.push(tiers);
    }
    agents.push(fresh_name("p1", &mut taken));
    let mut p1 = vec![vec![Tuple::new(b1, 1)]];
    p1.extend(chain(b2, k + n + 1));
    prefs.push(p1);
    agents.push(fresh_name("p2", &mut taken));
    let mut p2 = vec![vec![Tuple::new(b2, 1)]];
    p2.extend(chain(b1, k + n + 1));
    prefs.push(p2);

    let instance = Instance::new(posts, agents, prefs).map_err(SolverError::Model)?;
    Ok(ExtendedInstance {
        instance,
        k,
        original_agents: n,
        original_posts: m,
    })
}

/// Placement properties every competitive assignment of an extension has.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlacementBreach {
    P1NotAloneOnB1,
    P2NotAloneOnB2,
    FillerOffOriginalPost { filler: AgentId, post: PostId },
    FillerNotAlone { filler: AgentId, post: PostId },
    OriginalOffOriginalPost { agent: AgentId, post: PostId },
    OriginalUnacceptable { agent: AgentId, post: PostId, congestion: usize },
}

/// Checks that `p1` is alone on `b1`, `p2` alone on `b2`, every filler alone
/// on an original post, and every original agent on an acceptable original post.
pub fn check_placement(ext: &ExtendedInstance, assignment: &Assignment) -> Verdict<PlacementBreach> {
    let mut out = Vec::new();
    if assignment.block(ext.b1()) != [ext.p1()] {
        out.push(PlacementBreach::P1NotAloneOnB1);
    }
    if assignment.block(ext.b2()) != [ext.p2()] {
        out.push(PlacementBreach::P2NotAloneOnB2);
    }
    for u in ext.fillers() {
        let post = assignment.owner(u);
        if !ext.is_original_post(post) {
            out.push(PlacementBreach::FillerOffOriginalPost { filler: u, post });
        } else if assignment.congestion(post) != 1 {
            out.push(PlacementBreach::FillerNotAlone { filler: u, post });
        }
    }
    for v in (0..ext.original_agents).map(AgentId) {
        let post = assignment.owner(v);
        if !ext.is_original_post(post) {
            out.push(PlacementBreach::OriginalOffOriginalPost { agent: v, post });
            continue;
        }
        let congestion = assignment.congestion(post);
        if congestion > ext.instance.max_congestion(v, post) {
            out.push(PlacementBreach::OriginalUnacceptable {
                agent: v,
                post,
                congestion,
            });
        }
    }
    Verdict::from_witnesses(out)
}

/// Projects an assignment of the extension back onto the original instance:
/// posts holding a filler become empty, all other original posts keep their agents.
pub fn restrict_assignment(
    ext: &ExtendedInstance,
    assignment: &Assignment,
) -> Result<Assignment, SolverError> {
    let verdict = check_placement(ext, assignment);
    if !verdict.holds() {
        return Err(SolverError::Placement(verdict.into_witnesses()));
    }
    let owner = (0..ext.original_agents)
        .map(|v| assignment.owner(AgentId(v)))
        .collect();
    Assignment::from_owner(ext.original_posts, owner).map_err(SolverError::Model)
}
