use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::andor::{clutter, ArcId, GraphError, GraphStatus, ObjectSelector, Verb};
use crate::motion::{MotionError, MotionPlannerHandle};
use crate::sim::{file, FailureModel, ObjectId, SceneError, SimError, Simulator, WorkspaceConfig};

use super::select::{rank_options, Candidate, ObjectCostWeights, SelectError};
use super::tmpi::{DispatchError, MotionOutcome, Tmpi};
use super::trace::{ActionTrace, TracedAction, TRACE_FORMAT};
use super::{GraphNetwork, NetworkError, NetworkStatus, TransitionReason};

/// Mixed into the episode seed to give grasp failures their own stream.
const FAILURE_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

pub(crate) fn failure_seed(seed: u64) -> u64 {
    seed ^ FAILURE_STREAM
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub planner: MotionPlannerHandle,
    pub weights: ObjectCostWeights,
    pub grasp_failure_probability: f64,
    /// Maximum network depth. `None` means ten per movable object.
    pub depth_limit: Option<usize>,
    /// Measure wall-clock times. When off, every time field except the
    /// simulated execution time is zero and logs are reproducible byte for
    /// byte.
    pub wall_clock: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            planner: MotionPlannerHandle::rrt(),
            weights: ObjectCostWeights::default(),
            grasp_failure_probability: 0.0,
            depth_limit: None,
            wall_clock: true,
        }
    }
}

impl SolveConfig {
    /// Grid planner, no failures, no wall-clock times.
    pub fn deterministic() -> Self {
        Self {
            planner: MotionPlannerHandle::grid(),
            wall_clock: false,
            ..Self::default()
        }
    }

    pub fn limit_for(&self, scene: &WorkspaceConfig) -> usize {
        self.depth_limit
            .unwrap_or_else(|| 10 * scene.objects.iter().filter(|o| !o.fixed).count().max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Solved,
    Exhausted,
}

/// Per-episode record. Times are seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub outcome: Outcome,
    pub depth: usize,
    pub depth_limit: usize,
    pub per_graph_expansions: Vec<u64>,
    pub task_planning_time: f64,
    pub motion_planning_time: f64,
    pub motion_planning_attempts: u64,
    pub motion_executions: u64,
    pub objects_rearranged: u64,
    /// Graph operations (growth, feasible-state queries, expansions) plus
    /// ranking calls.
    pub task_planning_work: u64,
    pub execution_time: f64,
    pub grasp_failures: u64,
    pub collision_checks: u64,
    pub planner_expansions: u64,
    pub transitions: Vec<TransitionReason>,
    /// Objects moved to storage, in order.
    pub rearranged: Vec<ObjectId>,
    pub seed: u64,
    pub config: SolveConfig,
}

impl EpisodeLog {
    pub fn total_expansions(&self) -> u64 {
        self.per_graph_expansions.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct Episode {
    pub log: EpisodeLog,
    pub trace: ActionTrace,
    pub network: GraphNetwork,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dispatch(#[from] DispatchError),
}

impl From<SimError> for SolveError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Scene(s) => SolveError::Scene(s),
            other => SolveError::Config(other.to_string()),
        }
    }
}

/// Accumulates task-planning time and logical work.
struct TaskClock {
    wall_clock: bool,
    seconds: f64,
    work: u64,
}

impl TaskClock {
    fn run<T>(&mut self, f: impl FnOnce() -> T) -> T {
        self.work += 1;
        if self.wall_clock {
            let t = Instant::now();
            let out = f();
            self.seconds += t.elapsed().as_secs_f64();
            out
        } else {
            f()
        }
    }
}

/// How a graph ended without retrieving the target.
enum GraphEnd {
    Solved,
    Regrow(TransitionReason),
}

/// Runs the planning loop on `scene` until the target is retrieved or the
/// network reaches its depth limit.
pub fn solve(scene: &WorkspaceConfig, config: &SolveConfig, seed: u64) -> Result<Episode, SolveError> {
    scene.validate()?;
    config
        .planner
        .validate()
        .map_err(|e: MotionError| SolveError::Config(e.to_string()))?;
    config
        .weights
        .validate()
        .map_err(|e: SelectError| SolveError::Config(e.to_string()))?;
    let failure = FailureModel::new(config.grasp_failure_probability)?;
    let limit = config.limit_for(scene);
    if limit == 0 {
        return Err(NetworkError::ZeroLimit.into());
    }
    let fingerprint = file::fingerprint(scene)?;

    let sim = Simulator::new(scene.clone(), failure, failure_seed(seed))?
        .with_validation_step(config.planner.validation_step());
    let mut tmpi = Tmpi::new(sim, config.planner, seed);
    if !config.wall_clock {
        tmpi = tmpi.without_timing();
    }
    let mut clock = TaskClock {
        wall_clock: config.wall_clock,
        seconds: 0.0,
        work: 0,
    };
    let snapshot = tmpi.scene().snapshot();
    let mut net = clock.run(|| GraphNetwork::new(limit, snapshot))?;

    loop {
        tmpi.set_graph_index(net.depth() - 1);
        match run_graph(&mut net, &mut tmpi, &mut clock, config)? {
            GraphEnd::Solved => {
                net.refresh();
                break;
            }
            GraphEnd::Regrow(reason) => {
                if !net.can_grow() {
                    net.exhaust();
                    break;
                }
                let snapshot = tmpi.scene().snapshot();
                clock.run(|| net.grow_next_graph(reason, snapshot).map(|_| ()))?;
            }
        }
    }

    let outcome = match net.status() {
        NetworkStatus::Solved => Outcome::Solved,
        _ => Outcome::Exhausted,
    };
    let stats = *tmpi.stats();
    let actions: Vec<TracedAction> = tmpi.into_trace();
    let rearranged = actions
        .iter()
        .filter(|a| a.verb == Verb::PlaceInStorage)
        .map(|a| a.object)
        .collect();
    let log = EpisodeLog {
        outcome,
        depth: net.depth(),
        depth_limit: limit,
        per_graph_expansions: net.graphs().iter().map(|g| g.expansions_count()).collect(),
        task_planning_time: clock.seconds,
        motion_planning_time: stats.planning_time,
        motion_planning_attempts: stats.attempts,
        motion_executions: stats.executions,
        objects_rearranged: stats.objects_rearranged,
        task_planning_work: clock.work,
        execution_time: stats.execution_time,
        grasp_failures: stats.grasp_failures,
        collision_checks: stats.collision_checks,
        planner_expansions: stats.planner_expansions,
        transitions: net.transitions().iter().map(|t| t.reason).collect(),
        rearranged,
        seed,
        config: *config,
    };
    let trace = ActionTrace {
        format: TRACE_FORMAT.to_owned(),
        scene_fingerprint: fingerprint,
        seed,
        config: *config,
        outcome,
        actions,
    };
    Ok(Episode {
        log,
        trace,
        network: net,
    })
}

/// Works the current graph until it is solved, fails, runs out of feasible
/// states or an execution fails. Each step ranks the feasible options once
/// and walks down the ranking while motion planning comes up empty.
fn run_graph(
    net: &mut GraphNetwork,
    tmpi: &mut Tmpi,
    clock: &mut TaskClock,
    config: &SolveConfig,
) -> Result<GraphEnd, SolveError> {
    let mut excluded_arcs: Vec<ArcId> = Vec::new();
    let mut excluded_blockers: Vec<ObjectId> = Vec::new();
    let mut chosen: Option<ObjectId> = None;
    let target = tmpi.scene().target_id;
    'step: loop {
        let graph = net.current();
        let candidates: Vec<Candidate> = clock.run(|| {
            graph.next_feasible_states().map(|fs| {
                fs.into_iter()
                    .filter(|f| !excluded_arcs.contains(&f.arc))
                    .map(|f| Candidate::from_graph(graph, f))
                    .collect()
            })
        })?;
        let scene = tmpi.scene();
        let ranking = clock
            .run(|| rank_options(&candidates, scene, &config.weights, &excluded_blockers))
            .map_err(|e| SolveError::Config(e.to_string()))?;
        for selection in ranking {
            let action = net.current().arc(selection.arc)?.action;
            let object = match action.object {
                Some(ObjectSelector::Target) | None => target,
                Some(ObjectSelector::ChosenBlocker) => selection
                    .object
                    .or(chosen)
                    .expect("blocker arcs follow a blocker choice"),
            };
            match tmpi.dispatch_action(action, object)? {
                MotionOutcome::Planned | MotionOutcome::Executed => {
                    if selection.arc == clutter::CHOOSE_BLOCKER {
                        chosen = Some(object);
                    }
                    let status = clock.run(|| {
                        net.current_mut()
                            .mark_achieved(selection.node, selection.arc)
                    })?;
                    match status {
                        GraphStatus::Active => continue 'step,
                        GraphStatus::Solved => return Ok(GraphEnd::Solved),
                        GraphStatus::Failed => {
                            return Ok(GraphEnd::Regrow(
                                TransitionReason::GraphFailedAfterRearrangement,
                            ))
                        }
                    }
                }
                MotionOutcome::PlanNotFound => {
                    if selection.arc == clutter::CHOOSE_BLOCKER {
                        excluded_blockers.push(object);
                    } else {
                        excluded_arcs.push(selection.arc);
                    }
                }
                MotionOutcome::ExecutionFailed => {
                    return Ok(GraphEnd::Regrow(TransitionReason::ExecutionFailureRetry))
                }
            }
        }
        return Ok(GraphEnd::Regrow(TransitionReason::NoFeasibleState));
    }
}
