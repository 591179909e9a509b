//! Motion planners behind one contract.
//!
//! Two planners answer the same [`MotionQuery`]: a goal-biased RRT, which is
//! probabilistically complete and is what the task planner normally uses,
//! and a breadth-first lattice search, which is deterministic, exact on its
//! lattice and serves as the test oracle.

mod grid;
mod rrt;

use std::sync::Arc;
use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{
    collision_free, CollisionWorld, Configuration, Footprint, GoalRegion, MotionPlan,
    WorkspaceConfig,
};

pub const DEFAULT_GRID_RESOLUTION: f64 = 0.005;
pub const DEFAULT_TIME_BUDGET: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    Rrt,
    GridBfs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RrtParams {
    /// Steering distance η, meters.
    pub step: f64,
    /// Probability β of sampling from the goal region.
    pub goal_bias: f64,
    pub max_iterations: u64,
    pub shortcut_attempts: usize,
}

impl Default for RrtParams {
    fn default() -> Self {
        Self {
            step: 0.02,
            goal_bias: 0.1,
            max_iterations: 50_000,
            shortcut_attempts: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridParams {
    /// Lattice spacing h, meters.
    pub resolution: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_GRID_RESOLUTION,
        }
    }
}

/// Which planner to run and with what budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotionPlannerHandle {
    pub kind: PlannerKind,
    /// Wall-clock budget per query, seconds. Only the RRT consults it.
    pub time_budget: f64,
    pub rrt: RrtParams,
    pub grid: GridParams,
}

impl Default for MotionPlannerHandle {
    fn default() -> Self {
        Self::rrt()
    }
}

impl MotionPlannerHandle {
    pub fn rrt() -> Self {
        Self {
            kind: PlannerKind::Rrt,
            time_budget: DEFAULT_TIME_BUDGET,
            rrt: RrtParams::default(),
            grid: GridParams::default(),
        }
    }

    pub fn grid() -> Self {
        Self {
            kind: PlannerKind::GridBfs,
            ..Self::rrt()
        }
    }

    /// Multiplies both the time budget and the RRT iteration cap.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.time_budget *= factor;
        self.rrt.max_iterations = (self.rrt.max_iterations as f64 * factor).round() as u64;
        self
    }

    pub fn is_deterministic(&self) -> bool {
        self.kind == PlannerKind::GridBfs
    }

    /// Sampling interval used to re-validate plans: half the lattice spacing.
    pub fn validation_step(&self) -> f64 {
        self.grid.resolution / 2.0
    }

    pub fn validate(&self) -> Result<(), MotionError> {
        let ok = self.time_budget > 0.0
            && self.rrt.step > 0.0
            && (0.0..=1.0).contains(&self.rrt.goal_bias)
            && self.rrt.max_iterations > 0
            && self.grid.resolution > 0.0;
        if ok {
            Ok(())
        } else {
            Err(MotionError::BadParameters)
        }
    }

    pub fn plan<R: Rng + ?Sized>(
        &self,
        query: &MotionQuery,
        rng: &mut R,
    ) -> Result<PlanReport, MotionError> {
        self.validate()?;
        query.validate()?;
        let world = CollisionWorld::for_configuration(&query.scene, &query.start);
        let footprint = Footprint::of(&query.start, &query.scene);
        let start = query.start.position;
        let (waypoints, expansions) = match self.kind {
            PlannerKind::GridBfs => {
                let s = grid::search(&world, &footprint, start, &query.goal, self.grid.resolution);
                (s.waypoints, s.expanded)
            }
            PlannerKind::Rrt => {
                let s = rrt::search(
                    &world,
                    &footprint,
                    start,
                    &query.goal,
                    &self.rrt,
                    self.rrt.max_iterations,
                    Duration::from_secs_f64(self.time_budget),
                    rng,
                );
                (s.waypoints, s.iterations)
            }
        };
        Ok(PlanReport {
            plan: waypoints.map(|w| MotionPlan::new(&query.start, w)),
            collision_checks: world.checks(),
            expansions,
        })
    }
}

/// One motion-planning request against a frozen scene.
#[derive(Debug, Clone)]
pub struct MotionQuery {
    pub start: Configuration,
    pub goal: GoalRegion,
    pub scene: Arc<WorkspaceConfig>,
}

impl MotionQuery {
    pub fn new(start: Configuration, goal: GoalRegion, scene: Arc<WorkspaceConfig>) -> Self {
        Self { start, goal, scene }
    }

    pub fn validate(&self) -> Result<(), MotionError> {
        if let Some(h) = self.start.holding {
            if self.scene.object(h.object).is_none() {
                return Err(MotionError::UnknownHeldObject(h.object));
            }
        }
        if !collision_free(&self.start, &self.scene) {
            return Err(MotionError::StartInCollision);
        }
        Ok(())
    }
}

/// Outcome of a query. `plan` is `None` when nothing was found within budget.
#[derive(Debug, Clone)]
pub struct PlanReport {
    pub plan: Option<MotionPlan>,
    pub collision_checks: u64,
    /// Lattice points expanded (grid) or iterations run (RRT).
    pub expansions: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MotionError {
    #[error("the start configuration is in collision")]
    StartInCollision,
    #[error("the start configuration holds unknown object {0}")]
    UnknownHeldObject(u32),
    #[error("planner parameters out of range")]
    BadParameters,
}

/// Re-checks a plan against `scene` at half the handle's lattice spacing.
pub fn path_validate(plan: &MotionPlan, scene: &WorkspaceConfig, handle: &MotionPlannerHandle) -> bool {
    plan.is_valid_in(scene, handle.validation_step())
}

#[cfg(test)]
mod tests;
