use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use congested_assignment::cp::{self, SolverError};
use congested_assignment::generate::{gen_random, RandomSpec};
use congested_assignment::io::{parse_assignment, parse_instance, parse_x3c, write_assignment, write_instance};
use congested_assignment::model::{check, Concept, Instance, InstanceIssue};
use congested_assignment::ns::ns_solve;
use congested_assignment::oracle::solve_exact;
use congested_assignment::reductions::{exact_cover_exists, reduce_x3c_to_ef, validate_x3c, ReductionError};
use congested_assignment::trace::format_trace;

#[derive(Parser)]
#[command(name = "congest", version, about = "Stable assignments for congested assignment instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against the structural rules
    Validate { file: PathBuf },
    /// Find an assignment satisfying a stability notion
    Solve {
        #[arg(long, value_enum)]
        concept: SolveConcept,
        file: PathBuf,
        /// Print one line per iteration of the competitive solver
        #[arg(long)]
        trace: bool,
    },
    /// Check an assignment against a stability notion
    Check {
        file: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        #[arg(long)]
        concept: Concept,
    },
    /// Print a seeded random instance
    Gen {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        posts: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        tie_prob: f64,
    },
    /// Encode an X3C instance as an envy-freeness instance
    ReduceX3c {
        file: PathBuf,
        /// Require the strict form (always enforced)
        #[arg(long)]
        strict: bool,
    },
    /// Search an X3C instance for an exact cover
    Cover { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveConcept {
    Ns,
    Cp,
    EfExact,
    CpExact,
    NsExact,
}

const EXISTS: u8 = 0;
const ABSENT: u8 = 1;
const INPUT: u8 = 2;
const GUARD: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            code
        }
    };
    ExitCode::from(code)
}

struct Failure(u8, String);

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure(INPUT, e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(INPUT, format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure(INPUT, format!("{}: {e}", path.display())))
}

fn describe_issues(inst: &Instance, issues: &[InstanceIssue]) -> String {
    issues
        .iter()
        .map(|i| i.describe(inst))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Rejects instances with broken lists; a list length other than the number
/// of agents is tolerated here.
fn require_structure(inst: &Instance) -> Result<(), Failure> {
    let issues: Vec<InstanceIssue> = inst
        .validate()
        .into_witnesses()
        .into_iter()
        .filter(|i| !matches!(i, InstanceIssue::WrongLength { .. }))
        .collect();
    if issues.is_empty() {
        Ok(())
    } else {
        Err(Failure(INPUT, describe_issues(inst, &issues)))
    }
}

fn solver_failure(inst: &Instance, e: SolverError) -> Failure {
    match e {
        SolverError::InvalidInstance(issues) => Failure(INPUT, describe_issues(inst, &issues)),
        other => Failure(INPUT, other.to_string()),
    }
}

fn report(inst: &Instance, found: Option<congested_assignment::model::Assignment>) -> u8 {
    match found {
        Some(pi) => {
            println!("yes");
            print!("{}", write_assignment(inst, &pi));
            EXISTS
        }
        None => {
            println!("no");
            ABSENT
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Validate { file } => {
            let inst = load_instance(&file)?;
            let verdict = inst.validate();
            if verdict.holds() {
                println!("valid");
                return Ok(EXISTS);
            }
            for issue in verdict.witnesses() {
                println!("{}", issue.describe(&inst));
            }
            Ok(ABSENT)
        }
        Command::Solve {
            concept,
            file,
            trace,
        } => {
            let inst = load_instance(&file)?;
            match concept {
                SolveConcept::Cp if trace => {
                    let run = cp::solve_cp_traced(&inst).map_err(|e| solver_failure(&inst, e))?;
                    for attempt in &run.attempts {
                        println!("# k={}", attempt.extended.k());
                        print!("{}", format_trace(attempt.extended.instance(), &attempt.trace));
                    }
                    Ok(report(&inst, run.assignment))
                }
                SolveConcept::Cp => {
                    let found = cp::solve_cp(&inst).map_err(|e| solver_failure(&inst, e))?;
                    Ok(report(&inst, found))
                }
                SolveConcept::Ns => {
                    require_structure(&inst)?;
                    let out = ns_solve(&inst).map_err(|e| Failure(GUARD, e.to_string()))?;
                    Ok(report(&inst, Some(out.assignment)))
                }
                SolveConcept::EfExact | SolveConcept::CpExact | SolveConcept::NsExact => {
                    require_structure(&inst)?;
                    let c = match concept {
                        SolveConcept::EfExact => Concept::Ef,
                        SolveConcept::CpExact => Concept::Cp,
                        _ => Concept::Ns,
                    };
                    let found = solve_exact(&inst, c).map_err(|e| Failure(GUARD, e.to_string()))?;
                    Ok(report(&inst, found))
                }
            }
        }
        Command::Check {
            file,
            assignment,
            concept,
        } => {
            let inst = load_instance(&file)?;
            let pi = parse_assignment(&read(&assignment)?, &inst)
                .map_err(|e| Failure(INPUT, format!("{}: {e}", assignment.display())))?;
            let verdict = check(&inst, &pi, concept);
            if verdict.holds() {
                println!("holds");
                return Ok(EXISTS);
            }
            println!("violated");
            for w in verdict.witnesses() {
                println!("{}", w.describe(&inst));
            }
            Ok(ABSENT)
        }
        Command::Gen {
            agents,
            posts,
            seed,
            tie_prob,
        } => {
            if agents == 0 || posts == 0 {
                return Err(input("need at least one agent and one post"));
            }
            if !(0.0..=1.0).contains(&tie_prob) {
                return Err(input("--tie-prob must lie in [0, 1]"));
            }
            let inst = gen_random(RandomSpec {
                agents,
                posts,
                seed,
                tie_prob,
            });
            print!("{}", write_instance(&inst));
            Ok(EXISTS)
        }
        Command::ReduceX3c { file, strict: _ } => {
            let x = parse_x3c(&read(&file)?).map_err(input)?;
            match reduce_x3c_to_ef(&x) {
                Ok(inst) => {
                    print!("{}", write_instance(&inst));
                    Ok(EXISTS)
                }
                Err(ReductionError::NotStrict(issues)) => {
                    let text: Vec<String> = issues.iter().map(|i| i.describe(&x)).collect();
                    Err(input(format!("not a strict X3C instance: {}", text.join("; "))))
                }
                Err(e) => Err(input(e)),
            }
        }
        Command::Cover { file } => {
            let x = parse_x3c(&read(&file)?).map_err(input)?;
            let issues = validate_x3c(&x, false);
            if !issues.holds() {
                let text: Vec<String> = issues.witnesses().iter().map(|i| i.describe(&x)).collect();
                return Err(input(text.join("; ")));
            }
            match exact_cover_exists(&x) {
                Ok(Some(cover)) => {
                    println!("yes");
                    let ids: Vec<&str> = cover.sets.iter().map(|&j| x.sets[j].id.as_str()).collect();
                    println!("{}", ids.join(" "));
                    Ok(EXISTS)
                }
                Ok(None) => {
                    println!("no");
                    Ok(ABSENT)
                }
                Err(e @ ReductionError::TooLarge { .. }) => Err(Failure(GUARD, e.to_string())),
                Err(e) => Err(input(e)),
            }
        }
    }
}
