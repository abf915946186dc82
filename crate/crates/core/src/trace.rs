//! One-line-per-iteration rendering of solver traces.

use std::fmt::Write;

use crate::cp::{SolveTrace, TraceIteration};
use crate::model::Instance;

pub fn format_iteration(inst: &Instance, z: usize, it: &TraceIteration) -> String {
    let table = inst
        .posts()
        .map(|a| format!("{}={}", inst.post_name(a), it.state.table()[a.0]))
        .collect::<Vec<_>>()
        .join(",");
    let mut line = format!("iter {z} | T: {table} | flow={} | ", it.flow.value());
    match &it.obstruction {
        Some(ob) => {
            let posts: Vec<&str> = ob.posts.iter().map(|&a| inst.post_name(a)).collect();
            let agents: Vec<&str> = ob.agents.iter().map(|&v| inst.agent_name(v)).collect();
            let _ = write!(line, "obstruction: A'={{{}}} V'={{{}}}", posts.join(","), agents.join(","));
        }
        None => line.push_str("obstruction: none"),
    }
    line.push_str(" | invalidated: ");
    if it.invalidated.is_empty() {
        line.push_str("none");
    } else {
        let tuples: Vec<String> = it
            .invalidated
            .iter()
            .map(|t| format!("{}@{}", inst.post_name(t.post), t.congestion))
            .collect();
        line.push_str(&tuples.join(","));
    }
    line
}

/// Iterations are numbered from 1.
pub fn format_trace(inst: &Instance, trace: &SolveTrace) -> String {
    let mut out = String::new();
    for (i, it) in trace.iterations.iter().enumerate() {
        out.push_str(&format_iteration(inst, i + 1, it));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::solve_cp_no_empty_traced;
    use crate::fixtures;

    #[test]
    fn example1_trace_lines() {
        let ex = fixtures::example1();
        let (_, trace) = solve_cp_no_empty_traced(&ex).unwrap();
        assert_eq!(
            format_trace(&ex, &trace),
            "iter 1 | T: a1=1,a2=1 | flow=2 | obstruction: A'={a1} V'={v3,v1} | invalidated: a1@1\n\
             iter 2 | T: a1=2,a2=1 | flow=3 | obstruction: none | invalidated: none\n"
        );
    }
}
