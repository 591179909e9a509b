//! Benchmark sweeps over random scenes.
//!
//! A sweep solves `repeats` random scenes for every object count and writes
//! three CSV files, all comma-separated with a header row:
//!
//! * `<out>`: one row per episode, columns of [`RunRow`] in order.
//! * `<stem>_summary.csv`: one row per object count, columns of [`SummaryRow`].
//! * `<stem>_depth.csv`: one row per reached network depth, columns of
//!   [`DepthRow`].
//!
//! Episode `(count, repeat)` uses seed `seed_base + 1000·count + repeat` for
//! both scene generation and solving.

pub mod stats;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::andor::clutter;
use crate::motion::MotionPlannerHandle;
use crate::network::{solve, ActionTrace, Episode, ObjectCostWeights, Outcome, SolveConfig, SolveError};
use crate::oracle::{enumerate_state_space, reachable_state_count, shortest_task_plan, PropositionalError};
use crate::sim::{generate_scene, GenParams, ObjectId, SceneError, WorkspaceConfig};

pub const DEFAULT_OBJECT_COUNTS: [usize; 8] = [4, 8, 15, 20, 30, 42, 49, 64];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitRule {
    /// `factor` graphs per object in the scene.
    PerObject(usize),
    Fixed(usize),
}

impl LimitRule {
    pub fn limit(&self, objects: usize) -> usize {
        match *self {
            LimitRule::PerObject(f) => f * objects.max(1),
            LimitRule::Fixed(l) => l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub object_counts: Vec<usize>,
    pub repeats: usize,
    pub seed_base: u64,
    pub planner: MotionPlannerHandle,
    pub grasp_failure_probability: f64,
    pub depth_limit: LimitRule,
    pub weights: ObjectCostWeights,
    /// Off gives byte-identical CSVs for deterministic planners.
    pub wall_clock: bool,
    pub generator: GenParams,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            object_counts: DEFAULT_OBJECT_COUNTS.to_vec(),
            repeats: 3,
            seed_base: 0,
            planner: MotionPlannerHandle::rrt(),
            grasp_failure_probability: 0.2,
            depth_limit: LimitRule::PerObject(10),
            weights: ObjectCostWeights::default(),
            wall_clock: true,
            generator: GenParams::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid bench configuration: {0}")]
    Config(String),
    #[error("{objects} objects, seed {seed}: {source}")]
    Scene {
        objects: usize,
        seed: u64,
        source: SceneError,
    },
    #[error("{objects} objects, seed {seed}: {source}")]
    Solve {
        objects: usize,
        seed: u64,
        source: SolveError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, std::io::Error),
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Config(m.to_owned()));
        if self.object_counts.is_empty() || self.object_counts.contains(&0) {
            return bad("object counts must be non-empty and at least 1");
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.grasp_failure_probability) {
            return bad("failure probability must lie in [0, 1]");
        }
        if matches!(self.depth_limit, LimitRule::PerObject(0) | LimitRule::Fixed(0)) {
            return bad("depth limit must be at least 1");
        }
        self.planner
            .validate()
            .map_err(|e| BenchError::Config(e.to_string()))?;
        self.weights
            .validate()
            .map_err(|e| BenchError::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        let c: Self = serde_json::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(path.to_owned(), e))?;
        Self::from_json(&text)
    }

    pub fn episode_seed(&self, objects: usize, repeat: usize) -> u64 {
        self.seed_base
            .wrapping_add(1000 * objects as u64)
            .wrapping_add(repeat as u64)
    }

    fn solve_config(&self, objects: usize) -> SolveConfig {
        SolveConfig {
            planner: self.planner,
            weights: self.weights,
            grasp_failure_probability: self.grasp_failure_probability,
            depth_limit: Some(self.depth_limit.limit(objects)),
            wall_clock: self.wall_clock,
        }
    }
}

/// One episode of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub object_count: usize,
    pub repeat: usize,
    pub seed: u64,
    pub target: ObjectId,
    pub outcome: Outcome,
    pub depth: usize,
    pub depth_limit: usize,
    pub total_expansions: u64,
    pub task_planning_work: u64,
    pub task_planning_time: f64,
    pub motion_planning_time: f64,
    pub motion_planning_attempts: u64,
    pub motion_executions: u64,
    pub objects_rearranged: u64,
    pub execution_time: f64,
    pub grasp_failures: u64,
    pub collision_checks: u64,
    pub planner_expansions: u64,
}

impl RunRow {
    fn new(objects: usize, repeat: usize, scene: &WorkspaceConfig, ep: &Episode) -> Self {
        let log = &ep.log;
        Self {
            object_count: objects,
            repeat,
            seed: log.seed,
            target: scene.target_id,
            outcome: log.outcome,
            depth: log.depth,
            depth_limit: log.depth_limit,
            total_expansions: log.total_expansions(),
            task_planning_work: log.task_planning_work,
            task_planning_time: log.task_planning_time,
            motion_planning_time: log.motion_planning_time,
            motion_planning_attempts: log.motion_planning_attempts,
            motion_executions: log.motion_executions,
            objects_rearranged: log.objects_rearranged,
            execution_time: log.execution_time,
            grasp_failures: log.grasp_failures,
            collision_checks: log.collision_checks,
            planner_expansions: log.planner_expansions,
        }
    }

    pub fn solved(&self) -> bool {
        self.outcome == Outcome::Solved
    }
}

/// A finished episode with everything needed to replay it.
#[derive(Debug, Clone)]
pub struct BenchEpisode {
    pub row: RunRow,
    pub scene: WorkspaceConfig,
    pub trace: ActionTrace,
}

/// Per-object-count means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub object_count: usize,
    pub runs: usize,
    pub success_rate: f64,
    pub mean_depth: f64,
    pub mean_task_planning_time: f64,
    pub mean_motion_planning_time: f64,
    pub mean_motion_planning_attempts: f64,
    pub mean_objects_rearranged: f64,
    pub mean_motion_executions: f64,
    pub mean_task_planning_work: f64,
    pub mean_total_expansions: f64,
}

/// Per-depth means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRow {
    pub depth: usize,
    pub runs: usize,
    pub mean_task_planning_time: f64,
    pub mean_task_planning_work: f64,
    pub mean_motion_planning_attempts: f64,
    pub mean_execution_time: f64,
}

fn mean<'a>(rows: &[&'a RunRow], f: impl Fn(&'a RunRow) -> f64) -> f64 {
    rows.iter().map(|r| f(r)).sum::<f64>() / rows.len() as f64
}

/// Groups rows by object count, in order of first appearance.
pub fn summarize(rows: &[RunRow]) -> Vec<SummaryRow> {
    let mut counts: Vec<usize> = Vec::new();
    for r in rows {
        if !counts.contains(&r.object_count) {
            counts.push(r.object_count);
        }
    }
    counts
        .into_iter()
        .map(|k| {
            let g: Vec<&RunRow> = rows.iter().filter(|r| r.object_count == k).collect();
            SummaryRow {
                object_count: k,
                runs: g.len(),
                success_rate: mean(&g, |r| f64::from(u8::from(r.solved()))),
                mean_depth: mean(&g, |r| r.depth as f64),
                mean_task_planning_time: mean(&g, |r| r.task_planning_time),
                mean_motion_planning_time: mean(&g, |r| r.motion_planning_time),
                mean_motion_planning_attempts: mean(&g, |r| r.motion_planning_attempts as f64),
                mean_objects_rearranged: mean(&g, |r| r.objects_rearranged as f64),
                mean_motion_executions: mean(&g, |r| r.motion_executions as f64),
                mean_task_planning_work: mean(&g, |r| r.task_planning_work as f64),
                mean_total_expansions: mean(&g, |r| r.total_expansions as f64),
            }
        })
        .collect()
}

/// Groups rows by network depth, ascending.
pub fn depth_series(rows: &[RunRow]) -> Vec<DepthRow> {
    let mut depths: Vec<usize> = rows.iter().map(|r| r.depth).collect();
    depths.sort_unstable();
    depths.dedup();
    depths
        .into_iter()
        .map(|d| {
            let g: Vec<&RunRow> = rows.iter().filter(|r| r.depth == d).collect();
            DepthRow {
                depth: d,
                runs: g.len(),
                mean_task_planning_time: mean(&g, |r| r.task_planning_time),
                mean_task_planning_work: mean(&g, |r| r.task_planning_work as f64),
                mean_motion_planning_attempts: mean(&g, |r| r.motion_planning_attempts as f64),
                mean_execution_time: mean(&g, |r| r.execution_time),
            }
        })
        .collect()
}

/// Runs every `(count, repeat)` episode. Episodes run on the rayon pool;
/// results come back in sweep order.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchEpisode>, BenchError> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .object_counts
        .iter()
        .flat_map(|&k| (0..config.repeats).map(move |r| (k, r)))
        .collect();
    jobs.into_par_iter()
        .map(|(k, r)| run_episode(config, k, r))
        .collect()
}

pub fn run_episode(config: &BenchConfig, objects: usize, repeat: usize) -> Result<BenchEpisode, BenchError> {
    let seed = config.episode_seed(objects, repeat);
    let scene = generate_scene(objects, seed, &config.generator)
        .map_err(|source| BenchError::Scene { objects, seed, source })?;
    let ep = solve(&scene, &config.solve_config(objects), seed)
        .map_err(|source| BenchError::Solve { objects, seed, source })?;
    Ok(BenchEpisode {
        row: RunRow::new(objects, repeat, &scene, &ep),
        scene,
        trace: ep.trace,
    })
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn runs_csv(rows: &[RunRow]) -> Result<String, BenchError> {
    to_csv(rows)
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<String, BenchError> {
    to_csv(rows)
}

pub fn depth_csv(rows: &[DepthRow]) -> Result<String, BenchError> {
    to_csv(rows)
}

/// Parses a runs CSV written by [`runs_csv`].
pub fn read_runs_csv(text: &str) -> Result<Vec<RunRow>, BenchError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(Into::into)
}

/// `dir/stem.csv` → `dir/stem_<suffix>.csv`.
pub fn companion_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("bench");
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

/// Writes the runs, summary and depth CSVs; returns their paths.
pub fn write_csvs(out: &Path, rows: &[RunRow]) -> Result<[PathBuf; 3], BenchError> {
    let files = [
        (out.to_owned(), runs_csv(rows)?),
        (companion_path(out, "summary"), summary_csv(&summarize(rows))?),
        (companion_path(out, "depth"), depth_csv(&depth_series(rows))?),
    ];
    for (path, text) in &files {
        std::fs::write(path, text).map_err(|e| BenchError::Io(path.clone(), e))?;
    }
    Ok(files.map(|(p, _)| p))
}

/// Nodes in the worst-case AND/OR accounting for the toy example.
pub const REFERENCE_GRAPH_NODES: u64 = 5;

/// Propositional versus AND/OR state counts for `objects` objects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateSpaceReport {
    pub objects: usize,
    pub propositions: u32,
    pub raw_states: u64,
    /// Reachable states and the uniform-cost plan with every other object
    /// blocking the target. Only computed up to the search cap.
    pub reachable_states: Option<u64>,
    pub plan_length: Option<usize>,
    pub plan_expanded: Option<u64>,
    /// Reference accounting: a 5-node graph per blocker removed.
    pub reference_nodes: u64,
    pub reference_iterations: u64,
    /// The same accounting with this crate's template: one graph per
    /// blocker plus the final one.
    pub template_nodes: u64,
    pub template_graphs: u64,
}

impl StateSpaceReport {
    pub fn new(objects: usize) -> Result<Self, PropositionalError> {
        let count = enumerate_state_space(objects)?;
        let blockers: Vec<usize> = (1..objects).collect();
        let (reachable, plan) = match shortest_task_plan(objects, &blockers) {
            Ok(p) => (Some(reachable_state_count(objects, &blockers)?), p),
            Err(PropositionalError::TooManyObjects(..)) => (None, None),
            Err(e) => return Err(e),
        };
        Ok(Self {
            objects,
            propositions: count.propositions,
            raw_states: count.states,
            reachable_states: reachable,
            plan_length: plan.as_ref().map(|p| p.length()),
            plan_expanded: plan.as_ref().map(|p| p.expanded),
            reference_nodes: REFERENCE_GRAPH_NODES,
            reference_iterations: (objects as u64 - 1).max(1),
            template_nodes: clutter::NODE_COUNT as u64,
            template_graphs: objects as u64,
        })
    }

    pub fn reference_states(&self) -> u64 {
        self.reference_nodes * self.reference_iterations
    }

    pub fn template_states(&self) -> u64 {
        self.template_nodes * self.template_graphs
    }

    /// One `key: value` line per figure.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "skipped".to_owned());
        format!(
            "objects: {}\npropositions: {}\nraw-states: {}\nreachable-states: {}\n\
             ucs-plan-length: {}\nucs-expanded: {}\n\
             andor-reference: {} nodes x {} iterations = {}\n\
             andor-template: {} nodes x {} graphs = {}\n",
            self.objects,
            self.propositions,
            self.raw_states,
            opt(self.reachable_states.map(|v| v.to_string())),
            opt(self.plan_length.map(|v| v.to_string())),
            opt(self.plan_expanded.map(|v| v.to_string())),
            self.reference_nodes,
            self.reference_iterations,
            self.reference_states(),
            self.template_nodes,
            self.template_graphs,
            self.template_states(),
        )
    }
}

#[cfg(test)]
mod tests;
