//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use congested_assignment::cp::{
    check_obstruction, check_placement, solve_cp, solve_cp_no_empty_traced, solve_cp_traced,
    top_valid_tier, CpRun, ExtendedInstance, SolveTrace, ValidityState,
};
use congested_assignment::fixtures;
use congested_assignment::generate::{gen_random, RandomSpec};
use congested_assignment::model::{check, Assignment, Concept, Instance, Tuple, Violation};
use congested_assignment::ns::ns_solve;
use congested_assignment::oracle::{enumerate_all_assignments, feasible_profiles, solve_exact};
use congested_assignment::reductions::{
    assignment_from_cover, check_cover_shape, cover_from_assignment, exact_cover_exists,
    reduce_x3c_to_ef, validate_x3c, X3cInstance, X3cSet,
};

const FIXTURE_LIMIT: Duration = Duration::from_secs(1);
const SWEEP_LIMIT: Duration = Duration::from_secs(5 * 60);
const SWEEP_SIZE: u64 = 600;
const X3C_LIMIT: Duration = Duration::from_secs(10 * 60);
const X3C_MIN_INSTANCES: usize = 20;
const X3C_MIN_NO: usize = 3;
const NS_LIMIT: Duration = Duration::from_secs(60);
const NS_INSTANCES: u64 = 1000;
const SCALE_LIMIT: Duration = Duration::from_secs(5);
const SCALE_INSTANCES: u64 = 5;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    ensure(elapsed < limit, || format!("{what} took {elapsed:.2?}, limit {limit:?}"))?;
    Ok(elapsed)
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_congest"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn example1() -> Check {
    let start = Instant::now();
    let ex = fixtures::example1();
    let v1 = ex.agent_id("v1").unwrap();
    let v2 = ex.agent_id("v2").unwrap();
    let a1 = ex.post_id("a1").unwrap();
    let a2 = ex.post_id("a2").unwrap();

    let pi = solve_cp(&ex).map_err(|e| e.to_string())?.ok_or("solve_cp found nothing")?;
    ensure(check(&ex, &pi, Concept::Cp).holds(), || "solver output is not CP".into())?;

    let pi1 = fixtures::example1_pi1(&ex);
    ensure(check(&ex, &pi1, Concept::Ns).holds(), || "Pi1 should be NS".into())?;
    let witnesses = check(&ex, &pi1, Concept::Cp).into_witnesses();
    let expected = vec![Violation::Envy {
        agent: v2,
        envied: v1,
        held: Tuple::new(a1, 2),
        target: Tuple::new(a2, 1),
    }];
    ensure(witnesses == expected, || format!("Pi1 CP witnesses {witnesses:?}"))?;
    let text = witnesses[0].describe(&ex);
    ensure(text.starts_with("v2 prefers (a2,1) to (a1,2)"), || format!("witness text `{text}`"))?;

    let pi2 = fixtures::example1_pi2(&ex);
    ensure(check(&ex, &pi2, Concept::Cp).holds(), || "Pi2 should be CP".into())?;

    let file = data("example1.ca");
    let file = file.to_str().unwrap();
    let (code, stdout) = cli(&["solve", "--concept", "cp", file]);
    ensure(code == 0 && stdout.starts_with("yes\n"), || format!("cli solve: {code} {stdout:?}"))?;
    let asg = data("pi2.asg");
    let (code, _) = cli(&["check", file, "--assignment", asg.to_str().unwrap(), "--concept", "cp"]);
    ensure(code == 0, || format!("cli check Pi2 exit {code}"))?;
    let asg = data("pi1.asg");
    let (code, stdout) = cli(&["check", file, "--assignment", asg.to_str().unwrap(), "--concept", "cp"]);
    ensure(code == 1 && stdout.contains("v2 prefers (a2,1) to (a1,2)"), || {
        format!("cli check Pi1: {code} {stdout:?}")
    })?;

    let t = within(start, FIXTURE_LIMIT, "example 1")?;
    Ok(format!("CP witness found, Pi1 NS but not CP, Pi2 CP ({t:.2?})"))
}

fn example2() -> Check {
    let start = Instant::now();
    let ex = fixtures::example2();
    let found = solve_cp(&ex).map_err(|e| e.to_string())?;
    ensure(found.is_none(), || format!("solve_cp returned {found:?}"))?;
    let ef = solve_exact(&ex, Concept::Ef)
        .map_err(|e| e.to_string())?
        .ok_or("no EF witness")?;
    ensure(ef.profile().sizes() == [0, 2], || format!("EF profile {:?}", ef.profile()))?;
    ensure(check(&ex, &ef, Concept::Ef).holds(), || "EF witness fails EF".into())?;

    let file = data("example2.ca");
    let file = file.to_str().unwrap();
    let (code, stdout) = cli(&["solve", "--concept", "cp", file]);
    ensure(code == 1 && stdout == "no\n", || format!("cli solve cp: {code} {stdout:?}"))?;
    let (code, stdout) = cli(&["solve", "--concept", "ef-exact", file]);
    ensure(code == 0 && stdout == "yes\nassign a1 :\nassign a2 : v1 v2\n", || {
        format!("cli ef-exact: {code} {stdout:?}")
    })?;

    let t = within(start, FIXTURE_LIMIT, "example 2")?;
    Ok(format!("no CP, EF witness with profile (0,2) ({t:.2?})"))
}

struct SweepCase {
    inst: Instance,
    run: CpRun,
}

fn sweep_spec(seed: u64) -> RandomSpec {
    RandomSpec {
        agents: 1 + (seed % 5) as usize,
        posts: 1 + ((seed / 5) % 3) as usize,
        seed,
        tie_prob: [0.0, 0.25, 0.5][((seed / 15) % 3) as usize],
    }
}

fn exists(found: Option<&Assignment>) -> bool {
    found.is_some()
}

fn oracle_sweep(cases: &mut Vec<SweepCase>) -> Check {
    let start = Instant::now();
    let mut tally = [0usize; 3];
    for seed in 0..SWEEP_SIZE {
        let inst = gen_random(sweep_spec(seed));
        let run = solve_cp_traced(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        if let Some(pi) = &run.assignment {
            ensure(check(&inst, pi, Concept::Cp).holds(), || format!("seed {seed}: solver output not CP"))?;
        }
        for (i, concept) in [Concept::Cp, Concept::Ef, Concept::Ns].into_iter().enumerate() {
            let exact = solve_exact(&inst, concept).map_err(|e| e.to_string())?;
            let brute = enumerate_all_assignments(&inst, concept).map_err(|e| e.to_string())?;
            if let Some(pi) = &exact {
                ensure(check(&inst, pi, concept).holds(), || format!("seed {seed}, {concept}: oracle witness fails"))?;
            }
            // Third leg: the polynomial solvers where they exist; for EF, the
            // exhaustive profile scan with every witness checked.
            let third = match concept {
                Concept::Cp => exists(run.assignment.as_ref()),
                Concept::Ef => {
                    let all = feasible_profiles(&inst, concept).map_err(|e| e.to_string())?;
                    ensure(all.iter().all(|pi| check(&inst, pi, concept).holds()), || {
                        format!("seed {seed}: EF profile witness fails")
                    })?;
                    ensure(run.assignment.is_none() || !all.is_empty(), || {
                        format!("seed {seed}: CP assignment found but no EF one")
                    })?;
                    !all.is_empty()
                }
                Concept::Ns => {
                    let out = ns_solve(&inst).map_err(|e| e.to_string())?;
                    check(&inst, &out.assignment, Concept::Ns).holds()
                }
            };
            let a = exact.is_some();
            let b = brute.count > 0;
            ensure(a == b && b == third, || {
                format!("seed {seed}, {concept}: profile oracle {a}, enumeration {b}, third leg {third}")
            })?;
            if a {
                tally[i] += 1;
            }
        }
        cases.push(SweepCase { inst, run });
    }
    let t = within(start, SWEEP_LIMIT, "sweep")?;
    Ok(format!(
        "{SWEEP_SIZE} instances agree; CP exists in {}, EF in {}, NS in {} ({t:.2?})",
        tally[0], tally[1], tally[2]
    ))
}

/// Checks one trace of the no-empty-post search against its instance.
fn trace_invariants(inst: &Instance, trace: &SolveTrace, found: Option<&Assignment>) -> Result<(), String> {
    let n = inst.num_agents();
    let iters = &trace.iterations;
    for (z, it) in iters.iter().enumerate() {
        let state = &it.state;
        let table = state.table();
        // Table only grows, and strictly in total after an obstruction.
        if let Some(next) = iters.get(z + 1) {
            let nt = next.state.table();
            ensure(nt.iter().zip(table).all(|(b, a)| b >= a), || format!("iter {z}: table shrank"))?;
            if it.obstruction.is_some() {
                ensure(next.state.table_sum() > state.table_sum(), || format!("iter {z}: sum did not grow"))?;
            }
        }
        ensure(state.table_sum() <= n, || format!("iter {z}: loop entered with sum {}", state.table_sum()))?;
        for a in inst.posts() {
            for d in 1..=n {
                let t = Tuple::new(a, d);
                if state.is_valid(t) {
                    ensure(table[a.0] <= d, || format!("iter {z}: valid {t:?} below table"))?;
                } else {
                    ensure(table[a.0] > d, || format!("iter {z}: invalid {t:?} not below table"))?;
                    ensure((1..d).all(|e| !state.is_valid(Tuple::new(a, e))), || {
                        format!("iter {z}: invalid {t:?} above a valid tuple")
                    })?;
                }
            }
        }
        for v in inst.agents() {
            let tier = top_valid_tier(inst, state, v).ok_or_else(|| format!("iter {z}: agent {v:?} has no valid tuple"))?;
            ensure(tier.iter().all(|t| table[t.post.0] == t.congestion), || {
                format!("iter {z}: top valid tier of {v:?} off the table")
            })?;
        }
        match &it.obstruction {
            Some(ob) => {
                let verdict = check_obstruction(&it.network, ob);
                ensure(verdict.holds(), || format!("iter {z}: obstruction {:?}", verdict.witnesses()))?;
            }
            None => {
                ensure(z + 1 == iters.len(), || format!("iter {z}: success before the last iteration"))?;
                let pi = found.ok_or("success iteration without assignment")?;
                ensure(inst.posts().all(|a| pi.congestion(a) == table[a.0]), || {
                    format!("success profile {:?} differs from table {table:?}", pi.profile())
                })?;
            }
        }
    }
    Ok(())
}

fn trace_sweep(cases: &[SweepCase]) -> Check {
    let mut traces = 0;
    let mut iterations = 0;
    for (seed, case) in cases.iter().enumerate() {
        for attempt in &case.run.attempts {
            trace_invariants(attempt.extended.instance(), &attempt.trace, attempt.found.as_ref())
                .map_err(|e| format!("seed {seed}, k={}: {e}", attempt.extended.k()))?;
            traces += 1;
            iterations += attempt.trace.iterations.len();
        }
        let (found, trace) = solve_cp_no_empty_traced(&case.inst).map_err(|e| e.to_string())?;
        trace_invariants(&case.inst, &trace, found.as_ref()).map_err(|e| format!("seed {seed}, original: {e}"))?;
        traces += 1;
        iterations += trace.iterations.len();
    }
    Ok(format!("{traces} traces, {iterations} iterations, zero violations"))
}

fn lower_bound_sweep(cases: &[SweepCase]) -> Check {
    let mut instances = 0;
    let mut pairs = 0;
    for (seed, case) in cases.iter().enumerate() {
        let inst = &case.inst;
        let witnesses: Vec<_> = feasible_profiles(inst, Concept::Cp)
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|pi| !pi.profile().has_empty_post())
            .collect();
        if witnesses.is_empty() {
            continue;
        }
        instances += 1;
        let (found, trace) = solve_cp_no_empty_traced(inst).map_err(|e| e.to_string())?;
        ensure(found.is_some(), || format!("seed {seed}: no-empty CP exists but the search failed"))?;
        for it in &trace.iterations {
            let mut after: ValidityState = it.state.clone();
            if let Some(ob) = &it.obstruction {
                after.apply_obstruction(ob);
            }
            for pi in &witnesses {
                pairs += 1;
                ensure(inst.posts().all(|a| pi.congestion(a) >= after.table()[a.0]), || {
                    format!("seed {seed}: profile {:?} below table {:?}", pi.profile(), after.table())
                })?;
            }
        }
    }
    ensure(instances > 0, || "no instance with a no-empty CP assignment".into())?;
    Ok(format!("{instances} instances, {pairs} (iteration, witness) pairs, zero violations"))
}

fn placement_sweep(cases: &[SweepCase]) -> Check {
    let mut extensions = 0;
    let mut witnesses = 0;
    for (seed, case) in cases.iter().enumerate() {
        for attempt in &case.run.attempts {
            let ext: &ExtendedInstance = &attempt.extended;
            let found: Vec<_> = feasible_profiles(ext.instance(), Concept::Cp)
                .map_err(|e| e.to_string())?
                .into_iter()
                .filter(|pi| !pi.profile().has_empty_post())
                .collect();
            if found.is_empty() {
                continue;
            }
            extensions += 1;
            for pi in &found {
                witnesses += 1;
                let verdict = check_placement(ext, pi);
                ensure(verdict.holds(), || {
                    format!("seed {seed}, k={}: {:?}", ext.k(), verdict.witnesses())
                })?;
            }
        }
    }
    ensure(extensions > 0, || "no extension with a no-empty CP assignment".into())?;
    Ok(format!("{extensions} extensions, {witnesses} witnesses, zero violations"))
}

/// Random strict instance with `3q` elements: each element placed in three
/// of `3q` triples, no triple repeating an element.
fn random_strict_x3c(rng: &mut ChaCha8Rng, q: usize) -> X3cInstance {
    let e = 3 * q;
    loop {
        let mut slots: Vec<usize> = (1..=e).flat_map(|el| [el; 3]).collect();
        slots.shuffle(rng);
        let sets: Vec<X3cSet> = slots
            .chunks(3)
            .enumerate()
            .map(|(j, c)| X3cSet {
                id: format!("S{}", j + 1),
                elements: c.to_vec(),
            })
            .collect();
        let x = X3cInstance {
            element_count: e,
            sets,
        };
        if validate_x3c(&x, true).holds() {
            return x;
        }
    }
}

fn x3c_round_trip() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut instances = vec![random_strict_x3c(&mut rng, 1), random_strict_x3c(&mut rng, 1)];
    let (mut yes, mut no) = (0, 0);
    while yes < 12 || no < 8 {
        let x = random_strict_x3c(&mut rng, 2);
        let has = exact_cover_exists(&x).map_err(|e| e.to_string())?.is_some();
        if has && yes < 12 {
            yes += 1;
            instances.push(x);
        } else if !has && no < 8 {
            no += 1;
            instances.push(x);
        }
    }
    ensure(instances.len() >= X3C_MIN_INSTANCES, || "too few instances".into())?;

    let mut no_found = 0;
    let mut witnesses = 0;
    for (i, x) in instances.iter().enumerate() {
        let cover = exact_cover_exists(x).map_err(|e| e.to_string())?;
        let reduced = reduce_x3c_to_ef(x).map_err(|e| e.to_string())?;
        let ef = solve_exact(&reduced, Concept::Ef).map_err(|e| e.to_string())?;
        ensure(cover.is_some() == ef.is_some(), || {
            format!("instance {i}: cover {:?}, EF witness {}", cover, ef.is_some())
        })?;
        if cover.is_none() {
            no_found += 1;
        }
        if let Some(cover) = &cover {
            let pi = assignment_from_cover(x, &reduced, cover).map_err(|e| e.to_string())?;
            ensure(check(&reduced, &pi, Concept::Ef).holds(), || format!("instance {i}: built assignment not EF"))?;
        }
        for pi in feasible_profiles(&reduced, Concept::Ef).map_err(|e| e.to_string())? {
            witnesses += 1;
            let shape = check_cover_shape(x, &pi);
            ensure(shape.holds(), || format!("instance {i}: {:?}", shape.witnesses()))?;
            cover_from_assignment(x, &reduced, &pi).map_err(|e| format!("instance {i}: {e}"))?;
        }
    }
    ensure(no_found >= X3C_MIN_NO, || format!("only {no_found} no-instances"))?;
    let t = within(start, X3C_LIMIT, "X3C round trip")?;
    Ok(format!(
        "{} instances ({no_found} without cover) agree; {witnesses} EF witnesses have cover shape ({t:.2?})",
        instances.len()
    ))
}

fn ns_sweep() -> Check {
    let start = Instant::now();
    let mut moves = 0;
    for seed in 0..NS_INSTANCES {
        let spec = RandomSpec {
            agents: 1 + ((seed * 7) % 50) as usize,
            posts: 1 + (seed % 10) as usize,
            seed,
            tie_prob: 0.3,
        };
        let inst = gen_random(spec);
        let out = ns_solve(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(check(&inst, &out.assignment, Concept::Ns).holds(), || format!("seed {seed}: not NS"))?;
        moves += out.moves.len();
    }
    let t = within(start, NS_LIMIT, "NS sweep")?;
    Ok(format!("{NS_INSTANCES} instances NS, {moves} improving moves, no budget abort ({t:.2?})"))
}

fn scale() -> Check {
    let mut slowest = Duration::ZERO;
    let mut found = 0;
    for seed in 0..SCALE_INSTANCES {
        let inst = gen_random(RandomSpec {
            agents: 200,
            posts: 20,
            seed: 9000 + seed,
            tie_prob: 0.3,
        });
        let start = Instant::now();
        let pi = solve_cp(&inst).map_err(|e| e.to_string())?;
        let t = within(start, SCALE_LIMIT, &format!("seed {}", 9000 + seed))?;
        slowest = slowest.max(t);
        if let Some(pi) = pi {
            found += 1;
            ensure(check(&inst, &pi, Concept::Cp).holds(), || "scale output not CP".into())?;
        }
    }
    Ok(format!("{SCALE_INSTANCES} instances n=200 m=20, {found} with CP, slowest {slowest:.2?}"))
}

fn main() {
    let mut cases = Vec::new();
    let results: Vec<(&str, Check)> = vec![
        ("1 example 1 fixture", example1()),
        ("2 example 2 fixture", example2()),
        ("3 oracle equivalence sweep", oracle_sweep(&mut cases)),
        ("4 search trace invariants", trace_sweep(&cases)),
        ("5 table lower bound", lower_bound_sweep(&cases)),
        ("6 extension placement", placement_sweep(&cases)),
        ("7 X3C round trip", x3c_round_trip()),
        ("8 NS dynamics", ns_sweep()),
        ("9 scale", scale()),
    ];
    let mut failed = 0;
    for (name, result) in &results {
        match result {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
