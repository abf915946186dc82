use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn congest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_congest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_cp_example1() {
    let out = congest(&["solve", "--concept", "cp", &data("example1.ca")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "yes\nassign a1 : v1 v3\nassign a2 : v2\n");
}

#[test]
fn solve_cp_example2_says_no() {
    let out = congest(&["solve", "--concept", "cp", &data("example2.ca")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "no\n");
}

#[test]
fn exact_oracles_on_example2() {
    let out = congest(&["solve", "--concept", "ef-exact", &data("example2.ca")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "yes\nassign a1 :\nassign a2 : v1 v2\n");
    let out = congest(&["solve", "--concept", "cp-exact", &data("example2.ca")]);
    assert_eq!(out.status.code(), Some(1));
    let out = congest(&["solve", "--concept", "ns-exact", &data("example2.ca")]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn trace_lines() {
    let out = congest(&["solve", "--concept", "cp", "--trace", &data("example1.ca")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# k=0");
    assert_eq!(
        lines[1],
        "iter 1 | T: a1=1,a2=1,b1=1,b2=1 | flow=4 | obstruction: A'={a1} V'={v3,v1} | invalidated: a1@1"
    );
    assert_eq!(
        lines[2],
        "iter 2 | T: a1=2,a2=1,b1=1,b2=1 | flow=5 | obstruction: none | invalidated: none"
    );
    assert_eq!(lines[3], "yes");
}

#[test]
fn check_assignments() {
    let inst = data("example1.ca");
    let out = congest(&["check", &inst, "--assignment", &data("pi2.asg"), "--concept", "cp"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "holds\n");
    let out = congest(&["check", &inst, "--assignment", &data("pi1.asg"), "--concept", "cp"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "violated\nv2 prefers (a2,1) to (a1,2), envying v1\n");
    let out = congest(&["check", &inst, "--assignment", &data("pi1.asg"), "--concept", "ns"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn validate_reports_issues() {
    let out = congest(&["validate", &data("example1.ca")]);
    assert_eq!(out.status.code(), Some(0));
    let out = congest(&["validate", &data("example2.ca")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("v1: short or long list"));
}

#[test]
fn input_errors_exit_2() {
    let out = congest(&["validate", &data("missing.ca")]);
    assert_eq!(out.status.code(), Some(2));
    let out = congest(&["solve", "--concept", "cp", &data("pi1.asg")]);
    assert_eq!(out.status.code(), Some(2));
    let out = congest(&["reduce-x3c", &data("loose.x3c"), "--strict"]);
    assert_eq!(out.status.code(), Some(2));
    let out = congest(&["gen", "--agents", "0", "--posts", "2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_is_reproducible_and_parses() {
    let args = ["gen", "--agents", "7", "--posts", "3", "--seed", "11", "--tie-prob", "0.4"];
    let a = congest(&args);
    let b = congest(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let inst = congested_assignment::io::parse_instance(&stdout(&a)).unwrap();
    assert!(inst.validate().holds());
}

#[test]
fn reduction_and_cover() {
    let out = congest(&["reduce-x3c", &data("triple.x3c"), "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    let inst = congested_assignment::io::parse_instance(&stdout(&out)).unwrap();
    assert_eq!(inst.num_agents(), 15);
    assert_eq!(inst.num_posts(), 5);
    let out = congest(&["cover", &data("triple.x3c")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "yes\nA\n");
    let out = congest(&["cover", &data("no_cover.x3c")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), "no\n");
}

#[test]
fn cover_guard_exit_3() {
    let out = congest(&["cover", &data("too_many_sets.x3c")]);
    assert_eq!(out.status.code(), Some(3));
}
