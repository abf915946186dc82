//! Congested assignment: agents choose posts, and each agent's preferences
//! depend on both the post and how many agents share it.

pub mod cp;
pub mod fixtures;
pub mod generate;
pub mod io;
pub mod maxflow;
pub mod model;
pub mod ns;
pub mod oracle;
pub mod reductions;
pub mod trace;
pub mod verdict;
