use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::andor::{ActionTemplate, Verb};
use crate::motion::{MotionError, MotionPlannerHandle, MotionQuery};
use crate::sim::{
    grasp_region, next_storage_pose, Configuration, ExecutionResult, GoalRegion, Holding,
    Manipulation, MotionPlan, ObjectId, SimError, Simulator, WorkspaceConfig,
};

use super::trace::TracedAction;

/// Gripper speed used to turn executed path length into execution time, m/s.
pub const EXECUTION_SPEED: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MotionOutcome {
    /// Every motion the action needs was found; nothing moved yet.
    Planned,
    Executed,
    PlanNotFound,
    ExecutionFailed,
}

#[derive(Debug, Error, PartialEq)]
pub enum DispatchError {
    #[error("unknown object id {0}")]
    UnknownObject(ObjectId),
    #[error(transparent)]
    Motion(#[from] MotionError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Counters accumulated over an episode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MotionStats {
    pub attempts: u64,
    pub executions: u64,
    pub grasp_failures: u64,
    pub objects_rearranged: u64,
    pub collision_checks: u64,
    pub planner_expansions: u64,
    /// Wall-clock seconds spent in planner queries.
    pub planning_time: f64,
    /// Simulated seconds: executed path length over [`EXECUTION_SPEED`].
    pub execution_time: f64,
}

/// Both legs of a pick-and-carry, planned together at approach time.
#[derive(Debug, Clone)]
struct Pending {
    object: ObjectId,
    approach: MotionPlan,
    carry: MotionPlan,
}

/// The task-motion interface: turns an action on an object into motion
/// queries against the current snapshot and executes the resulting plans.
#[derive(Debug)]
pub struct Tmpi {
    sim: Simulator,
    planner: MotionPlannerHandle,
    rng: ChaCha8Rng,
    pending: Option<Pending>,
    stats: MotionStats,
    timed: bool,
    graph_index: usize,
    trace: Vec<TracedAction>,
}

impl Tmpi {
    pub fn new(sim: Simulator, planner: MotionPlannerHandle, seed: u64) -> Self {
        Self {
            sim,
            planner,
            rng: ChaCha8Rng::seed_from_u64(seed),
            pending: None,
            stats: MotionStats::default(),
            timed: true,
            graph_index: 0,
            trace: Vec::new(),
        }
    }

    /// Leaves `planning_time` at zero, so repeated runs give identical logs.
    pub fn without_timing(mut self) -> Self {
        self.timed = false;
        self
    }

    pub fn scene(&self) -> &WorkspaceConfig {
        self.sim.scene()
    }

    pub fn stats(&self) -> &MotionStats {
        &self.stats
    }

    pub fn trace(&self) -> &[TracedAction] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<TracedAction> {
        self.trace
    }

    /// Graph index stamped on executed actions.
    pub fn set_graph_index(&mut self, index: usize) {
        self.graph_index = index;
        self.pending = None;
    }

    fn query(&mut self, start: Configuration, goal: GoalRegion, scene: &std::sync::Arc<WorkspaceConfig>) -> Result<Option<MotionPlan>, DispatchError> {
        let query = MotionQuery::new(start, goal, scene.clone());
        let began = self.timed.then(Instant::now);
        let report = self.planner.plan(&query, &mut self.rng)?;
        if let Some(t) = began {
            self.stats.planning_time += t.elapsed().as_secs_f64();
        }
        self.stats.attempts += 1;
        self.stats.collision_checks += report.collision_checks;
        self.stats.planner_expansions += report.expansions;
        Ok(report.plan)
    }

    /// Where the carry leg for `object` ends: the entry pose for the target,
    /// the next free storage slot for anything else.
    fn carry_goal(scene: &WorkspaceConfig, held: &Configuration, object: ObjectId) -> Option<GoalRegion> {
        if object == scene.target_id {
            Some(GoalRegion::ball(scene.entry))
        } else {
            next_storage_pose(scene, held).map(GoalRegion::ball)
        }
    }

    fn plan_approach(&mut self, object: ObjectId) -> Result<Option<MotionPlan>, DispatchError> {
        let snapshot = self.sim.snapshot();
        let obj = snapshot
            .object(object)
            .ok_or(DispatchError::UnknownObject(object))?;
        let goal = grasp_region(obj, &snapshot);
        self.query(snapshot.gripper, goal, &snapshot)
    }

    fn plan_carry(&mut self, from: Configuration) -> Result<Option<MotionPlan>, DispatchError> {
        let snapshot = self.sim.snapshot();
        let object = from.holding.map(|h| h.object).ok_or(SimError::NothingHeld)?;
        match Self::carry_goal(&snapshot, &from, object) {
            Some(goal) => self.query(from, goal, &snapshot),
            None => Ok(None),
        }
    }

    pub fn dispatch_action(
        &mut self,
        action: ActionTemplate,
        object: ObjectId,
    ) -> Result<MotionOutcome, DispatchError> {
        if self.sim.scene().object(object).is_none() {
            return Err(DispatchError::UnknownObject(object));
        }
        match action.verb {
            Verb::Noop => Ok(MotionOutcome::Executed),
            Verb::Approach => {
                self.pending = None;
                let Some(approach) = self.plan_approach(object)? else {
                    return Ok(MotionOutcome::PlanNotFound);
                };
                let obj = self.sim.scene().object(object).unwrap();
                let held = Configuration {
                    position: approach.end(),
                    gripper_radius: approach.gripper_radius,
                    holding: Some(Holding {
                        object,
                        offset: obj.center - approach.end(),
                    }),
                };
                let Some(carry) = self.plan_carry(held)? else {
                    return Ok(MotionOutcome::PlanNotFound);
                };
                self.pending = Some(Pending {
                    object,
                    approach,
                    carry,
                });
                Ok(MotionOutcome::Planned)
            }
            Verb::Pick => {
                let plan = match self.pending.as_ref().filter(|p| p.object == object) {
                    Some(p) => p.approach.clone(),
                    None => match self.plan_approach(object)? {
                        Some(plan) => plan,
                        None => return Ok(MotionOutcome::PlanNotFound),
                    },
                };
                let result = self.execute(plan, action, object, Manipulation::Pick(object))?;
                if result == ExecutionResult::GraspFailed {
                    self.stats.grasp_failures += 1;
                    self.pending = None;
                    return Ok(MotionOutcome::ExecutionFailed);
                }
                Ok(MotionOutcome::Executed)
            }
            Verb::PlaceInStorage | Verb::PlaceTarget => {
                let gripper = self.sim.scene().gripper;
                if gripper.holding.map(|h| h.object) != Some(object) {
                    return Err(SimError::NothingHeld.into());
                }
                let cached = self
                    .pending
                    .take()
                    .filter(|p| p.object == object && p.carry.start() == gripper.position)
                    .map(|p| p.carry);
                let plan = match cached {
                    Some(plan) => plan,
                    None => match self.plan_carry(gripper)? {
                        Some(plan) => plan,
                        None => return Ok(MotionOutcome::PlanNotFound),
                    },
                };
                let what = if action.verb == Verb::PlaceTarget {
                    Manipulation::Retrieve
                } else {
                    Manipulation::PlaceInStorage
                };
                self.execute(plan, action, object, what)?;
                if what == Manipulation::PlaceInStorage {
                    self.stats.objects_rearranged += 1;
                }
                Ok(MotionOutcome::Executed)
            }
        }
    }

    fn execute(
        &mut self,
        plan: MotionPlan,
        action: ActionTemplate,
        object: ObjectId,
        what: Manipulation,
    ) -> Result<ExecutionResult, DispatchError> {
        let result = self.sim.execute_plan(&plan, what)?;
        self.stats.executions += 1;
        self.stats.execution_time += plan.length() / EXECUTION_SPEED;
        self.trace.push(TracedAction {
            graph: self.graph_index,
            verb: action.verb,
            object,
            result,
            plan,
        });
        Ok(result)
    }
}
