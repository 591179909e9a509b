//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single `criterion N ...: PASS|FAIL` line before asserting.
//!
//! The tests share one lock: the RRT sweeps run on wall-clock budgets and
//! must not compete for the CPU with other criteria.

use std::io::Write;
use std::process::Command;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use idan::andor::clutter;
use idan::bench::{self, stats, BenchConfig, BenchEpisode, LimitRule, RunRow};
use idan::motion::{path_validate, MotionPlannerHandle, MotionQuery};
use idan::network::{replay, solve, ActionTrace, Outcome, SolveConfig, TransitionReason};
use idan::oracle::{removal_oracle, target_reachable};
use idan::scenarios::{self, Corridor};
use idan::sim::{grasp_region, Configuration, GoalRegion, Holding, WorkspaceConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(n: u32, name: &str, pass: bool, detail: String) {
    let word = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {n} {name}: {word} ({detail})\n");
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {n} failed: {detail}");
}

/// Byte outputs of one criterion run, compared across runs by criterion 8.
type Artifacts = Vec<(String, String)>;

/// A replayable episode: the original scene and its trace.
type Replayable = (WorkspaceConfig, ActionTrace);

fn trace_artifacts(prefix: &str, eps: &[Replayable]) -> Artifacts {
    eps.iter()
        .enumerate()
        .map(|(i, (_, t))| (format!("{prefix}-trace-{i}.json"), t.to_json()))
        .collect()
}

// ---------------------------------------------------------------- criterion 1

struct StateSpaceRun {
    output: String,
    elapsed: Duration,
}

fn run_state_space() -> StateSpaceRun {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_idan"))
        .args(["bench", "state-space", "--objects", "6"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    StateSpaceRun {
        output: String::from_utf8(out.stdout).unwrap(),
        elapsed: start.elapsed(),
    }
}

fn state_space_artifacts(r: &StateSpaceRun) -> Artifacts {
    vec![("state-space.txt".into(), r.output.clone())]
}

#[test]
fn criterion_1_state_count_claim() {
    let _g = serial();
    let r = run_state_space();
    let lines: Vec<&str> = r.output.lines().collect();
    let pass = lines.contains(&"propositions: 13")
        && lines.contains(&"raw-states: 8192")
        && lines.contains(&"andor-reference: 5 nodes x 5 iterations = 25")
        && r.elapsed < Duration::from_secs(1);
    verdict(
        1,
        "state-space counts",
        pass,
        format!("13 propositions, 8192 states, 5x5 = 25 in {:.3}s", r.elapsed.as_secs_f64()),
    );
}

// ---------------------------------------------------------------- criterion 2

const SWEEP_FAILURE_RATES: [f64; 5] = [0.0, 0.3, 0.6, 0.8, 0.9];

/// Fifty grid-planner episodes: five object counts, two repeats, five
/// grasp-failure rates. Failure rates stretch the network depth beyond what
/// rearrangement alone gives.
fn linear_work_configs() -> Vec<BenchConfig> {
    SWEEP_FAILURE_RATES
        .iter()
        .map(|&p| BenchConfig {
            object_counts: vec![4, 15, 30, 49, 64],
            repeats: 2,
            seed_base: 0,
            planner: MotionPlannerHandle::grid(),
            grasp_failure_probability: p,
            depth_limit: LimitRule::PerObject(10),
            wall_clock: false,
            ..BenchConfig::default()
        })
        .collect()
}

struct SweepRun {
    rows: Vec<RunRow>,
    episodes: Vec<Replayable>,
    elapsed: Duration,
}

fn run_linear_work() -> SweepRun {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut episodes = Vec::new();
    for c in linear_work_configs() {
        for BenchEpisode { row, scene, trace } in bench::run_bench(&c).unwrap() {
            rows.push(row);
            episodes.push((scene, trace));
        }
    }
    SweepRun {
        rows,
        episodes,
        elapsed: start.elapsed(),
    }
}

fn linear_work() -> &'static SweepRun {
    static RUN: OnceLock<SweepRun> = OnceLock::new();
    RUN.get_or_init(run_linear_work)
}

fn sweep_artifacts(r: &SweepRun) -> Artifacts {
    let mut a = vec![("linear-work.csv".to_owned(), bench::runs_csv(&r.rows).unwrap())];
    a.extend(trace_artifacts("linear-work", &r.episodes));
    a
}

#[test]
fn criterion_2_linear_task_planning_work() {
    let _g = serial();
    let r = linear_work();
    let n = clutter::NODE_COUNT as u64;
    let bound_ok = r.rows.iter().all(|x| x.total_expansions <= n * x.depth as u64);
    let depth: Vec<f64> = r.rows.iter().map(|x| x.depth as f64).collect();
    let work: Vec<f64> = r.rows.iter().map(|x| x.task_planning_work as f64).collect();
    let pearson = stats::pearson(&depth, &work).unwrap_or(f64::NAN);
    let (dmin, dmax) = (
        r.rows.iter().map(|x| x.depth).min().unwrap(),
        r.rows.iter().map(|x| x.depth).max().unwrap(),
    );
    let pass = r.rows.len() == 50
        && bound_ok
        && pearson >= 0.95
        && dmin <= 1
        && dmax >= 30
        && r.elapsed < Duration::from_secs(120);
    verdict(
        2,
        "linear task-planning work",
        pass,
        format!(
            "{} episodes, depth {dmin}..{dmax}, expansions <= {n}d: {bound_ok}, pearson {pearson:.4}, {:.1}s",
            r.rows.len(),
            r.elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- criterion 3

struct OracleRun {
    table: String,
    scenes: usize,
    disagreements: Vec<String>,
    insufficient: Vec<String>,
    episodes: Vec<Replayable>,
    elapsed: Duration,
}

fn run_oracle_equivalence() -> OracleRun {
    let start = Instant::now();
    let grid = MotionPlannerHandle::grid();
    let config = SolveConfig {
        depth_limit: Some(10),
        ..SolveConfig::deterministic()
    };
    let mut table = String::from("scene,oracle_min_removals,outcome,depth,rearranged\n");
    let mut run = OracleRun {
        table: String::new(),
        scenes: 0,
        disagreements: Vec::new(),
        insufficient: Vec::new(),
        episodes: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for (name, scene) in scenarios::regression_set() {
        let movable = scene.movable_blockers().count();
        if movable > 3 {
            continue;
        }
        run.scenes += 1;
        let cert = removal_oracle(&scene, &grid, movable).unwrap();
        let ep = solve(&scene, &config, 0).unwrap();
        let solved = ep.log.outcome == Outcome::Solved;
        if solved != cert.retrievable() {
            run.disagreements.push(name.clone());
        }
        if solved && !target_reachable(&scene.without(&ep.log.rearranged), &grid).unwrap() {
            run.insufficient.push(name.clone());
        }
        let removals = cert.min_removals().map_or("none".to_owned(), |k| k.to_string());
        let rearranged: Vec<String> = ep.log.rearranged.iter().map(|o| o.to_string()).collect();
        table.push_str(&format!(
            "{name},{removals},{:?},{},{}\n",
            ep.log.outcome,
            ep.log.depth,
            rearranged.join(" ")
        ));
        run.episodes.push((scene, ep.trace));
    }
    run.table = table;
    run.elapsed = start.elapsed();
    run
}

fn oracle_equivalence() -> &'static OracleRun {
    static RUN: OnceLock<OracleRun> = OnceLock::new();
    RUN.get_or_init(run_oracle_equivalence)
}

fn oracle_artifacts(r: &OracleRun) -> Artifacts {
    let mut a = vec![("oracle.csv".to_owned(), r.table.clone())];
    a.extend(trace_artifacts("oracle", &r.episodes));
    a
}

#[test]
fn criterion_3_oracle_equivalence() {
    let _g = serial();
    let r = oracle_equivalence();
    let pass = r.scenes >= 30
        && r.disagreements.is_empty()
        && r.insufficient.is_empty()
        && r.elapsed < Duration::from_secs(120);
    verdict(
        3,
        "oracle equivalence",
        pass,
        format!(
            "{} scenes, disagreements {:?}, insufficient {:?}, {:.1}s",
            r.scenes,
            r.disagreements,
            r.insufficient,
            r.elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- criterion 4

#[test]
fn criterion_4_plan_validity_and_chaining() {
    let _g = serial();
    let all = linear_work().episodes.iter().chain(&oracle_equivalence().episodes);
    let (mut traces, mut plans, mut violations) = (0, 0, Vec::new());
    for (scene, trace) in all {
        traces += 1;
        match replay(trace, scene) {
            Ok(report) => plans += report.plans_checked,
            Err(e) => violations.push(e.to_string()),
        }
    }
    verdict(
        4,
        "plan validity and chaining",
        violations.is_empty(),
        format!("{traces} traces, {plans} plans, violations {violations:?}"),
    );
}

// ---------------------------------------------------------------- criterion 5

struct RobustnessRun {
    baseline_depth: usize,
    rows: Vec<RunRow>,
    retries: usize,
    changed_on_retry: usize,
    episodes: Vec<Replayable>,
    elapsed: Duration,
}

fn run_robustness() -> RobustnessRun {
    let start = Instant::now();
    let scene = scenarios::corridor(Corridor::default(), 0.03, 1);
    let clean = SolveConfig {
        depth_limit: Some(50),
        ..SolveConfig::deterministic()
    };
    let baseline_depth = solve(&scene, &clean, 0).unwrap().log.depth;
    let noisy = SolveConfig {
        grasp_failure_probability: 0.3,
        ..clean
    };
    let mut run = RobustnessRun {
        baseline_depth,
        rows: Vec::new(),
        retries: 0,
        changed_on_retry: 0,
        episodes: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for seed in 0..200 {
        let ep = solve(&scene, &noisy, seed).unwrap();
        let graphs = ep.network.graphs();
        for (i, t) in ep.network.transitions().iter().enumerate() {
            if t.reason == TransitionReason::ExecutionFailureRetry {
                run.retries += 1;
                let before = &graphs[i].snapshot().objects;
                let after = &graphs[i + 1].snapshot().objects;
                if t.delta.is_some() || before != after {
                    run.changed_on_retry += 1;
                }
            }
        }
        run.rows.push(RunRow {
            object_count: scene.objects.len(),
            repeat: seed as usize,
            seed,
            target: scene.target_id,
            outcome: ep.log.outcome,
            depth: ep.log.depth,
            depth_limit: ep.log.depth_limit,
            total_expansions: ep.log.total_expansions(),
            task_planning_work: ep.log.task_planning_work,
            task_planning_time: ep.log.task_planning_time,
            motion_planning_time: ep.log.motion_planning_time,
            motion_planning_attempts: ep.log.motion_planning_attempts,
            motion_executions: ep.log.motion_executions,
            objects_rearranged: ep.log.objects_rearranged,
            execution_time: ep.log.execution_time,
            grasp_failures: ep.log.grasp_failures,
            collision_checks: ep.log.collision_checks,
            planner_expansions: ep.log.planner_expansions,
        });
        run.episodes.push((scene.clone(), ep.trace));
    }
    run.elapsed = start.elapsed();
    run
}

fn robustness() -> &'static RobustnessRun {
    static RUN: OnceLock<RobustnessRun> = OnceLock::new();
    RUN.get_or_init(run_robustness)
}

fn robustness_artifacts(r: &RobustnessRun) -> Artifacts {
    let mut a = vec![("robustness.csv".to_owned(), bench::runs_csv(&r.rows).unwrap())];
    a.extend(trace_artifacts("robustness", &r.episodes));
    a
}

#[test]
fn criterion_5_failure_robustness() {
    let _g = serial();
    let r = robustness();
    let solved = r.rows.iter().filter(|x| x.solved()).count();
    let mean_depth = r.rows.iter().map(|x| x.depth as f64).sum::<f64>() / r.rows.len() as f64;
    let pass = r.baseline_depth == 2
        && solved == r.rows.len()
        && mean_depth > r.baseline_depth as f64
        && r.changed_on_retry == 0
        && r.elapsed < Duration::from_secs(120);
    verdict(
        5,
        "failure robustness",
        pass,
        format!(
            "{solved}/{} solved, mean depth {mean_depth:.3} vs {} without failures, \
             {} retries with {} changed snapshots, {:.1}s",
            r.rows.len(),
            r.baseline_depth,
            r.retries,
            r.changed_on_retry,
            r.elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- criterion 6

#[test]
fn criterion_6_scaling_trends() {
    let _g = serial();
    let start = Instant::now();
    let config = BenchConfig::default();
    let rows: Vec<RunRow> = bench::run_bench(&config)
        .unwrap()
        .into_iter()
        .map(|e| e.row)
        .collect();
    let elapsed = start.elapsed();
    let summary = bench::summarize(&rows);
    let counts: Vec<f64> = summary.iter().map(|s| s.object_count as f64).collect();
    let rho = |f: fn(&bench::SummaryRow) -> f64| {
        let ys: Vec<f64> = summary.iter().map(f).collect();
        stats::spearman(&counts, &ys).unwrap_or(f64::NAN)
    };
    let depth = rho(|s| s.mean_depth);
    let rearranged = rho(|s| s.mean_objects_rearranged);
    let attempts = rho(|s| s.mean_motion_planning_attempts);
    for s in &summary {
        println!(
            "  {} objects: depth {:.2}, rearranged {:.2}, attempts {:.2}, success {:.2}",
            s.object_count, s.mean_depth, s.mean_objects_rearranged, s.mean_motion_planning_attempts, s.success_rate
        );
    }
    let pass = summary.len() == 8
        && depth >= 0.6
        && rearranged >= 0.6
        && attempts >= 0.6
        && elapsed < Duration::from_secs(20 * 60);
    verdict(
        6,
        "scaling trends",
        pass,
        format!(
            "spearman depth {depth:.3}, rearranged {rearranged:.3}, attempts {attempts:.3}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- criterion 7

/// Approach queries to every movable object from the entry pose, and the
/// carry query that takes the target back out, on every regression scene.
fn regression_queries() -> Vec<MotionQuery> {
    let grid = MotionPlannerHandle::grid();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut out = Vec::new();
    for (_, scene) in scenarios::regression_set() {
        let snap = scene.snapshot();
        for o in scene.objects.iter().filter(|o| !o.fixed) {
            out.push(MotionQuery::new(scene.gripper, grasp_region(o, &scene), snap.clone()));
        }
        let target = scene.target();
        let approach = MotionQuery::new(scene.gripper, grasp_region(target, &scene), snap.clone());
        if let Some(plan) = grid.plan(&approach, &mut rng).unwrap().plan {
            let held = Configuration {
                position: plan.end(),
                gripper_radius: plan.gripper_radius,
                holding: Some(Holding {
                    object: target.id,
                    offset: target.center - plan.end(),
                }),
            };
            out.push(MotionQuery::new(held, GoalRegion::ball(scene.entry), snap.clone()));
        }
    }
    out
}

#[test]
fn criterion_7_rrt_sanity() {
    let _g = serial();
    let start = Instant::now();
    let grid = MotionPlannerHandle::grid();
    let rrt = MotionPlannerHandle::rrt().scaled(10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let feasible: Vec<MotionQuery> = regression_queries()
        .into_iter()
        .filter(|q| grid.plan(q, &mut rng).unwrap().plan.is_some())
        .collect();
    let (mut pairs, mut agree, mut returned, mut valid) = (0, 0, 0, 0);
    for q in &feasible {
        for seed in 0..5u64 {
            pairs += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if let Some(plan) = rrt.plan(q, &mut rng).unwrap().plan {
                agree += 1;
                returned += 1;
                let ok = plan.start() == q.start.position
                    && q.goal.contains(plan.end())
                    && path_validate(&plan, &q.scene, &rrt);
                valid += usize::from(ok);
            }
        }
    }
    let elapsed = start.elapsed();
    let rate = agree as f64 / pairs as f64;
    let pass = !feasible.is_empty()
        && rate >= 0.99
        && valid == returned
        && elapsed < Duration::from_secs(5 * 60);
    verdict(
        7,
        "rrt sanity",
        pass,
        format!(
            "{} feasible queries, {agree}/{pairs} agree ({:.2}%), {valid}/{returned} plans valid, {:.1}s",
            feasible.len(),
            100.0 * rate,
            elapsed.as_secs_f64()
        ),
    );
}

// ---------------------------------------------------------------- criterion 8

#[test]
fn criterion_8_determinism() {
    let _g = serial();
    let first: Artifacts = [
        state_space_artifacts(&run_state_space()),
        sweep_artifacts(linear_work()),
        oracle_artifacts(oracle_equivalence()),
        robustness_artifacts(robustness()),
    ]
    .concat();
    let second: Artifacts = [
        state_space_artifacts(&run_state_space()),
        sweep_artifacts(&run_linear_work()),
        oracle_artifacts(&run_oracle_equivalence()),
        robustness_artifacts(&run_robustness()),
    ]
    .concat();
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.as_str())
        .collect();
    let bytes: usize = first.iter().map(|(_, s)| s.len()).sum();
    let pass = first.len() == second.len() && differing.is_empty();
    verdict(
        8,
        "determinism",
        pass,
        format!("{} files, {bytes} bytes, differing {differing:?}", first.len()),
    );
}
