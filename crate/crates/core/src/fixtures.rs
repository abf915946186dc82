//! The two worked instances used throughout the tests and documentation.

use crate::io::{parse_assignment, parse_instance};
use crate::model::{Assignment, Instance};

/// Two posts, three agents; several NS assignments, one of them competitive.
pub const EXAMPLE1: &str = "\
# a1 has room for two, a2 for one
posts a1 a2
agent v1 : a1@1 > a2@1 = a1@2
agent v2 : a1@1 = a2@1 > a1@2
agent v3 : a1@1 > a1@2 > a2@1
";

/// Two identical agents; no competitive assignment, but an envy-free one.
pub const EXAMPLE2: &str = "\
posts a1 a2
agent v1 : a1@1 > a2@1 > a2@2
agent v2 : a1@1 > a2@1 > a2@2
";

pub const EXAMPLE1_PI1: &str = "assign a1 : v2 v3\nassign a2 : v1\n";
pub const EXAMPLE1_PI2: &str = "assign a1 : v1 v3\nassign a2 : v2\n";
pub const EXAMPLE2_EF: &str = "assign a1 :\nassign a2 : v1 v2\n";

pub fn example1() -> Instance {
    parse_instance(EXAMPLE1).expect("fixture parses")
}

pub fn example2() -> Instance {
    parse_instance(EXAMPLE2).expect("fixture parses")
}

pub fn example1_pi1(inst: &Instance) -> Assignment {
    parse_assignment(EXAMPLE1_PI1, inst).expect("fixture parses")
}

pub fn example1_pi2(inst: &Instance) -> Assignment {
    parse_assignment(EXAMPLE1_PI2, inst).expect("fixture parses")
}

pub fn example2_ef(inst: &Instance) -> Assignment {
    parse_assignment(EXAMPLE2_EF, inst).expect("fixture parses")
}
