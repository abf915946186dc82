//! Exact cover by 3-sets, and its encoding as an envy-freeness question.
//!
//! An X3C instance has `3q` elements and a family of 3-element sets; it asks
//! whether some `q` of the sets partition the elements. [`reduce_x3c_to_ef`]
//! builds a congested assignment instance that admits an envy-free
//! assignment exactly when the X3C instance has an exact cover.
//!
//! Layout of the reduced instance, for `e` elements and `s` sets:
//! posts are the `s` set-posts (in set order) followed by two padding posts;
//! agents are the `e` element agents, then `2s` set-level agents, then `2s`
//! guard agents.

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{
    check, AgentId, Assignment, Concept, Instance, ModelError, PostId, Tier, Tuple, Violation,
};
use crate::verdict::Verdict;

/// Largest family [`exact_cover_exists`] will search.
pub const COVER_SET_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3cSet {
    pub id: String,
    /// 1-based element labels.
    pub elements: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3cInstance {
    pub element_count: usize,
    pub sets: Vec<X3cSet>,
}

impl X3cInstance {
    /// `q`: the number of sets in a cover.
    pub fn cover_size(&self) -> usize {
        self.element_count / 3
    }

    /// Indices of the sets containing `element`, ascending.
    pub fn sets_containing(&self, element: usize) -> Vec<usize> {
        (0..self.sets.len())
            .filter(|&j| self.sets[j].elements.contains(&element))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum X3cIssue {
    ElementCountNotMultipleOfThree { count: usize },
    WrongSetSize { set: usize, size: usize },
    ElementOutOfRange { set: usize, element: usize },
    RepeatedElement { set: usize, element: usize },
    /// Strict form only: every element must lie in exactly three sets.
    Occurrences { element: usize, count: usize },
    /// Strict form only: there must be as many sets as elements.
    SetCount { sets: usize, expected: usize },
}

impl X3cIssue {
    pub fn describe(&self, x: &X3cInstance) -> String {
        let id = |j: usize| x.sets.get(j).map_or("?", |s| s.id.as_str()).to_string();
        match *self {
            X3cIssue::ElementCountNotMultipleOfThree { count } => {
                format!("element count {count} is not a multiple of 3")
            }
            X3cIssue::WrongSetSize { set, size } => {
                format!("set {} has {size} elements, expected 3", id(set))
            }
            X3cIssue::ElementOutOfRange { set, element } => {
                format!("set {} names element {element}, outside 1..={}", id(set), x.element_count)
            }
            X3cIssue::RepeatedElement { set, element } => {
                format!("set {} repeats element {element}", id(set))
            }
            X3cIssue::Occurrences { element, count } => {
                format!("element {element} lies in {count} sets, expected 3")
            }
            X3cIssue::SetCount { sets, expected } => {
                format!("{sets} sets, expected {expected}")
            }
        }
    }
}

/// Structural checks; `strict` adds the occurrence and set-count requirements
/// the reduction relies on.
pub fn validate_x3c(x: &X3cInstance, strict: bool) -> Verdict<X3cIssue> {
    let mut out = Vec::new();
    if !x.element_count.is_multiple_of(3) {
        out.push(X3cIssue::ElementCountNotMultipleOfThree {
            count: x.element_count,
        });
    }
    for (j, set) in x.sets.iter().enumerate() {
        if set.elements.len() != 3 {
            out.push(X3cIssue::WrongSetSize {
                set: j,
                size: set.elements.len(),
            });
        }
        let mut seen = HashSet::new();
        for &e in &set.elements {
            if e == 0 || e > x.element_count {
                out.push(X3cIssue::ElementOutOfRange { set: j, element: e });
            } else if !seen.insert(e) {
                out.push(X3cIssue::RepeatedElement { set: j, element: e });
            }
        }
    }
    if strict {
        for e in 1..=x.element_count {
            let count = x.sets_containing(e).len();
            if count != 3 {
                out.push(X3cIssue::Occurrences { element: e, count });
            }
        }
        if x.sets.len() != x.element_count {
            out.push(X3cIssue::SetCount {
                sets: x.sets.len(),
                expected: x.element_count,
            });
        }
    }
    Verdict::from_witnesses(out)
}

/// Indices into [`X3cInstance::sets`], ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCover {
    pub sets: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("X3C instance is not in strict form ({} issue(s))", .0.len())]
    NotStrict(Vec<X3cIssue>),
    #[error("{sets} sets exceed the search limit of {limit}")]
    TooLarge { sets: usize, limit: usize },
    #[error("reduced instance does not match the X3C instance")]
    ShapeMismatch,
    #[error("assignment is not envy-free ({} violation(s))", .0.len())]
    NotEnvyFree(Vec<Violation>),
    #[error("sets {sets:?} do not form an exact cover")]
    NotExactCover { sets: Vec<usize> },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Index arithmetic for the reduced instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedLayout {
    pub elements: usize,
    pub sets: usize,
}

impl ReducedLayout {
    pub fn of(x: &X3cInstance) -> Self {
        Self {
            elements: x.element_count,
            sets: x.sets.len(),
        }
    }

    pub fn num_posts(&self) -> usize {
        self.sets + 2
    }

    pub fn num_agents(&self) -> usize {
        self.elements + 4 * self.sets
    }

    pub fn set_post(&self, j: usize) -> PostId {
        PostId(j)
    }

    pub fn is_set_post(&self, a: PostId) -> bool {
        a.0 < self.sets
    }

    /// The padding post the set-level agents fall back to.
    pub fn pad1(&self) -> PostId {
        PostId(self.sets)
    }

    /// The padding post the element agents fall back to.
    pub fn pad2(&self) -> PostId {
        PostId(self.sets + 1)
    }

    /// Agent for the 1-based `element`.
    pub fn element_agent(&self, element: usize) -> AgentId {
        AgentId(element - 1)
    }

    pub fn set_agent(&self, z: usize) -> AgentId {
        AgentId(self.elements + z)
    }

    pub fn guard_agent(&self, z: usize) -> AgentId {
        AgentId(self.elements + 2 * self.sets + z)
    }

    fn matches(&self, inst: &Instance) -> bool {
        inst.num_posts() == self.num_posts() && inst.num_agents() == self.num_agents()
    }
}

fn chain(post: PostId, len: usize) -> impl Iterator<Item = Tier> {
    (1..=len).map(move |d| vec![Tuple::new(post, d)])
}

fn fresh(base: &str, taken: &mut HashSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

/// Builds the envy-freeness instance for a strict X3C instance.
pub fn reduce_x3c_to_ef(x: &X3cInstance) -> Result<Instance, ReductionError> {
    let verdict = validate_x3c(x, true);
    if !verdict.holds() {
        return Err(ReductionError::NotStrict(verdict.into_witnesses()));
    }
    let layout = ReducedLayout::of(x);
    let e = layout.elements;
    let s = layout.sets;

    let mut taken: HashSet<String> = x.sets.iter().map(|set| set.id.clone()).collect();
    let mut posts: Vec<String> = x.sets.iter().map(|set| set.id.clone()).collect();
    posts.push(fresh("b1", &mut taken));
    posts.push(fresh("b2", &mut taken));

    let mut agents = Vec::with_capacity(layout.num_agents());
    let mut prefs: Vec<Vec<Tier>> = Vec::with_capacity(layout.num_agents());

    // Element agents: their three sets at congestion 1, 2, 3, then the second pad.
    for el in 1..=e {
        agents.push(format!("v{el}"));
        let containing = x.sets_containing(el);
        let mut tiers: Vec<Tier> = (1..=3)
            .map(|d| containing.iter().map(|&j| Tuple::new(layout.set_post(j), d)).collect())
            .collect();
        tiers.extend(chain(layout.pad2(), e + 4 * s - 9));
        prefs.push(tiers);
    }
    // Set-level agents: any set-post alone, any set-post shared, then the first pad.
    for z in 0..2 * s {
        agents.push(format!("p{}", z + 1));
        let mut tiers: Vec<Tier> = (1..=2)
            .map(|d| (0..s).map(|j| Tuple::new(layout.set_post(j), d)).collect())
            .collect();
        tiers.extend(chain(layout.pad1(), e + 2 * s));
        prefs.push(tiers);
    }
    // Guards: the second pad up to 2s, then the first pad.
    for z in 0..2 * s {
        agents.push(format!("q{}", z + 1));
        let tiers: Vec<Tier> = chain(layout.pad2(), 2 * s)
            .chain(chain(layout.pad1(), e + 2 * s))
            .collect();
        prefs.push(tiers);
    }
    Ok(Instance::new(posts, agents, prefs)?)
}

/// Searches for an exact cover, visiting subsets in lexicographic order of
/// their ascending index sequences; the first cover found is returned.
pub fn exact_cover_exists(x: &X3cInstance) -> Result<Option<ExactCover>, ReductionError> {
    if x.sets.len() > COVER_SET_LIMIT {
        return Err(ReductionError::TooLarge {
            sets: x.sets.len(),
            limit: COVER_SET_LIMIT,
        });
    }
    // Sets that could never take part in a partition are skipped outright.
    let usable: Vec<bool> = x
        .sets
        .iter()
        .map(|set| {
            let distinct: HashSet<_> = set.elements.iter().collect();
            distinct.len() == set.elements.len()
                && set.elements.iter().all(|&el| (1..=x.element_count).contains(&el))
        })
        .collect();

    fn dfs(
        x: &X3cInstance,
        usable: &[bool],
        start: usize,
        covered: &mut Vec<bool>,
        remaining: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if remaining == 0 {
            return true;
        }
        for j in start..x.sets.len() {
            let els = &x.sets[j].elements;
            if !usable[j] || els.is_empty() || els.iter().any(|&el| covered[el]) {
                continue;
            }
            for &el in els {
                covered[el] = true;
            }
            chosen.push(j);
            if dfs(x, usable, j + 1, covered, remaining - els.len(), chosen) {
                return true;
            }
            chosen.pop();
            for &el in els {
                covered[el] = false;
            }
        }
        false
    }

    let mut covered = vec![false; x.element_count + 1];
    let mut chosen = Vec::new();
    if dfs(x, &usable, 0, &mut covered, x.element_count, &mut chosen) {
        Ok(Some(ExactCover { sets: chosen }))
    } else {
        Ok(None)
    }
}

/// Whether `sets` partition the elements of `x`.
pub fn is_exact_cover(x: &X3cInstance, sets: &[usize]) -> bool {
    let mut count = vec![0usize; x.element_count + 1];
    for &j in sets {
        let Some(set) = x.sets.get(j) else {
            return false;
        };
        for &el in &set.elements {
            if el == 0 || el > x.element_count {
                return false;
            }
            count[el] += 1;
        }
    }
    count[1..].iter().all(|&c| c == 1)
}

/// Reads a cover off an envy-free assignment of the reduced instance: the
/// sets whose posts hold element agents.
pub fn cover_from_assignment(
    x: &X3cInstance,
    reduced: &Instance,
    pi: &Assignment,
) -> Result<ExactCover, ReductionError> {
    let layout = ReducedLayout::of(x);
    if !layout.matches(reduced) || pi.num_agents() != reduced.num_agents() || pi.num_posts() != reduced.num_posts() {
        return Err(ReductionError::ShapeMismatch);
    }
    let verdict = check(reduced, pi, Concept::Ef);
    if !verdict.holds() {
        return Err(ReductionError::NotEnvyFree(verdict.into_witnesses()));
    }
    let mut sets: Vec<usize> = (1..=layout.elements)
        .map(|el| pi.owner(layout.element_agent(el)))
        .filter(|&a| layout.is_set_post(a))
        .map(|a| a.0)
        .collect();
    sets.sort_unstable();
    sets.dedup();
    if is_exact_cover(x, &sets) {
        Ok(ExactCover { sets })
    } else {
        Err(ReductionError::NotExactCover { sets })
    }
}

/// The envy-free assignment built from an exact cover: each element agent on
/// its covering set, set-level agents on the first pad, guards on the second.
pub fn assignment_from_cover(
    x: &X3cInstance,
    reduced: &Instance,
    cover: &ExactCover,
) -> Result<Assignment, ReductionError> {
    let layout = ReducedLayout::of(x);
    if !layout.matches(reduced) {
        return Err(ReductionError::ShapeMismatch);
    }
    if !is_exact_cover(x, &cover.sets) {
        return Err(ReductionError::NotExactCover {
            sets: cover.sets.clone(),
        });
    }
    let mut owner = vec![PostId(0); layout.num_agents()];
    for &j in &cover.sets {
        for &el in &x.sets[j].elements {
            owner[layout.element_agent(el).0] = layout.set_post(j);
        }
    }
    for z in 0..2 * layout.sets {
        owner[layout.set_agent(z).0] = layout.pad1();
        owner[layout.guard_agent(z).0] = layout.pad2();
    }
    Ok(Assignment::from_owner(layout.num_posts(), owner)?)
}

/// Structural facts every envy-free assignment of a reduced instance has.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverShapeBreach {
    /// A set-post holds neither zero nor three agents.
    SetPostCongestion { post: PostId, congestion: usize },
    ElementOffSetPost { agent: AgentId, post: PostId },
}

pub fn check_cover_shape(x: &X3cInstance, pi: &Assignment) -> Verdict<CoverShapeBreach> {
    let layout = ReducedLayout::of(x);
    let mut out = Vec::new();
    for j in 0..layout.sets {
        let post = layout.set_post(j);
        let congestion = pi.congestion(post);
        if congestion != 0 && congestion != 3 {
            out.push(CoverShapeBreach::SetPostCongestion { post, congestion });
        }
    }
    for el in 1..=layout.elements {
        let agent = layout.element_agent(el);
        let post = pi.owner(agent);
        if !layout.is_set_post(post) {
            out.push(CoverShapeBreach::ElementOffSetPost { agent, post });
        }
    }
    Verdict::from_witnesses(out)
}
