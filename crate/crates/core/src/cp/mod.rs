//! Deciding and constructing competitive assignments.
//!
//! [`solve_cp_no_empty`] searches for a competitive assignment that leaves no
//! post empty. It keeps a table of per-post congestion lower bounds, builds a
//! flow network in which every agent points at the posts of its best tuples
//! that are still valid, and either reads an assignment off a perfect flow or
//! extracts an obstruction from the maximum flow and raises the table on the
//! obstructed posts. [`solve_cp`] handles empty posts by trying every
//! admissible number `k` of empty posts on an [`ExtendedInstance`].

mod extend;
mod network;

pub use extend::{
    check_placement, extend_instance, k_range, restrict_assignment, ExtendedInstance,
    PlacementBreach,
};
pub use network::{
    build_network, check_obstruction, derive_assignment, find_obstruction, top_valid_tier,
    Obstruction, ObstructionIssue, ValidityState,
};

use std::borrow::Cow;

use thiserror::Error;

use crate::maxflow::{max_flow, Flow, FlowError, FlowNetwork};
use crate::model::{AgentId, Assignment, Instance, InstanceIssue, ModelError, Tuple};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("instance fails validation ({} issue(s))", .0.len())]
    InvalidInstance(Vec<InstanceIssue>),
    #[error("k = {k} outside the admissible range {min}..={max}")]
    KOutOfRange { k: usize, min: usize, max: usize },
    #[error("assignment of the extended instance breaks the gadget placement: {0:?}")]
    Placement(Vec<PlacementBreach>),
    #[error("agent {agent:?} has no valid tuple left")]
    NoValidTuple { agent: AgentId },
    #[error("flow of value {value} is not perfect for {agents} agents")]
    NotPerfect { value: u32, agents: usize },
    #[error("flow is perfect; there is no obstruction")]
    PerfectFlow,
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Model(ModelError),
}

/// One pass of the table-raising loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceIteration {
    /// State at the start of the iteration.
    pub state: ValidityState,
    pub network: FlowNetwork,
    pub flow: Flow,
    pub obstruction: Option<Obstruction>,
    pub invalidated: Vec<Tuple>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveTrace {
    pub iterations: Vec<TraceIteration>,
}

/// Validates `inst`; lists longer than the number of agents are cut to that
/// length when the cut falls between tiers, which leaves the set of
/// competitive assignments unchanged.
pub fn prepare(inst: &Instance) -> Result<Cow<'_, Instance>, SolverError> {
    let verdict = inst.validate();
    if verdict.holds() {
        return Ok(Cow::Borrowed(inst));
    }
    let only_long = verdict.witnesses().iter().all(|issue| {
        matches!(issue, InstanceIssue::WrongLength { total, expected, .. } if total > expected)
    });
    if only_long {
        if let Some(cut) = inst.truncate_lists() {
            return Ok(Cow::Owned(cut));
        }
    }
    Err(SolverError::InvalidInstance(verdict.into_witnesses()))
}

fn no_empty_search(
    inst: &Instance,
    mut trace: Option<&mut SolveTrace>,
) -> Result<Option<Assignment>, SolverError> {
    let n = inst.num_agents();
    let mut state = ValidityState::new(inst);
    while state.table_sum() <= n {
        let network = build_network(inst, &state)?;
        let flow = max_flow(&network);
        if flow.value() as usize == n {
            let assignment = derive_assignment(&network, &flow)?;
            if let Some(trace) = trace.as_deref_mut() {
                trace.iterations.push(TraceIteration {
                    state: state.clone(),
                    network,
                    flow,
                    obstruction: None,
                    invalidated: Vec::new(),
                });
            }
            return Ok(Some(assignment));
        }
        let obstruction = find_obstruction(&network, &flow)?;
        let before = trace.is_some().then(|| state.clone());
        let invalidated = state.apply_obstruction(&obstruction);
        if let (Some(trace), Some(before)) = (trace.as_deref_mut(), before) {
            trace.iterations.push(TraceIteration {
                state: before,
                network,
                flow,
                obstruction: Some(obstruction),
                invalidated,
            });
        }
    }
    Ok(None)
}

/// Finds a competitive assignment with every post occupied, if one exists.
pub fn solve_cp_no_empty(inst: &Instance) -> Result<Option<Assignment>, SolverError> {
    no_empty_search(&*prepare(inst)?, None)
}

/// As [`solve_cp_no_empty`], also recording every iteration.
pub fn solve_cp_no_empty_traced(
    inst: &Instance,
) -> Result<(Option<Assignment>, SolveTrace), SolverError> {
    let inst = prepare(inst)?;
    let mut trace = SolveTrace::default();
    let result = no_empty_search(&inst, Some(&mut trace))?;
    Ok((result, trace))
}

/// One extension tried by [`solve_cp_traced`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attempt {
    pub extended: ExtendedInstance,
    /// Assignment of the extended instance, when found.
    pub found: Option<Assignment>,
    pub trace: SolveTrace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpRun {
    pub assignment: Option<Assignment>,
    pub attempts: Vec<Attempt>,
}

fn cp_search(inst: &Instance, traced: bool) -> Result<CpRun, SolverError> {
    let inst = prepare(inst)?;
    let mut attempts = Vec::new();
    for k in k_range(&inst) {
        let extended = extend_instance(&inst, k)?;
        let mut trace = SolveTrace::default();
        let found = no_empty_search(extended.instance(), traced.then_some(&mut trace))?;
        let assignment = found
            .as_ref()
            .map(|pik| restrict_assignment(&extended, pik))
            .transpose()?;
        if traced {
            attempts.push(Attempt {
                extended,
                found,
                trace,
            });
        }
        if assignment.is_some() {
            return Ok(CpRun {
                assignment,
                attempts,
            });
        }
    }
    Ok(CpRun {
        assignment: None,
        attempts,
    })
}

/// Finds a competitive assignment, trying `k` empty posts in increasing order.
pub fn solve_cp(inst: &Instance) -> Result<Option<Assignment>, SolverError> {
    Ok(cp_search(inst, false)?.assignment)
}

pub fn solve_cp_traced(inst: &Instance) -> Result<CpRun, SolverError> {
    cp_search(inst, true)
}
