//! Executed actions and their independent re-validation.
//!
//! A trace is JSON:
//!
//! ```text
//! {
//!   "format": "idan-trace/1",
//!   "scene_fingerprint": "<sha-256 of the canonical scene file>",
//!   "seed": 7,
//!   "config": { ...solve configuration... },
//!   "outcome": "solved",
//!   "actions": [
//!     { "graph": 0, "verb": "pick", "object": 1, "result": "ok",
//!       "plan": { "gripper_radius": 0.02, "holding": null,
//!                 "waypoints": [[0.5, 0.7], [0.5, 0.2725]] } }
//!   ]
//! }
//! ```
//!
//! Failed grasps stay in the trace, so consecutive plans always chain.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::andor::Verb;
use crate::motion::{path_validate, MotionPlannerHandle};
use crate::sim::{
    file, grasp_region, layout::CHAIN_TOLERANCE, ExecutionResult, FailureModel, Manipulation,
    MotionPlan, ObjectId, SimError, Simulator, WorkspaceConfig,
};

use super::solve::{failure_seed, Outcome, SolveConfig};

pub const TRACE_FORMAT: &str = "idan-trace/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracedAction {
    /// Index of the graph the action was taken in.
    pub graph: usize,
    pub verb: Verb,
    pub object: ObjectId,
    pub result: ExecutionResult,
    pub plan: MotionPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionTrace {
    pub format: String,
    pub scene_fingerprint: String,
    pub seed: u64,
    pub config: SolveConfig,
    pub outcome: Outcome,
    pub actions: Vec<TracedAction>,
}

impl ActionTrace {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("traces always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ReplayError> {
        let t: Self = serde_json::from_str(text).map_err(|e| ReplayError::Format(e.to_string()))?;
        if t.format != TRACE_FORMAT {
            return Err(ReplayError::Format(format!("unsupported format {:?}", t.format)));
        }
        Ok(t)
    }

    pub fn save(&self, path: &Path) -> Result<(), ReplayError> {
        std::fs::write(path, self.to_json()).map_err(|e| ReplayError::Io(path.to_owned(), e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ReplayError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ReplayError::Io(path.to_owned(), e.to_string()))?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ReplayError {
    #[error("trace was recorded on scene {expected}, got {actual}")]
    SceneMismatch { expected: String, actual: String },
    #[error("action {index}: {reason}")]
    Violation { index: usize, reason: String },
    #[error("malformed trace: {0}")]
    Format(String),
    #[error("{path}: {msg}", path = .0.display(), msg = .1)]
    Io(PathBuf, String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplayReport {
    pub actions: usize,
    pub plans_checked: usize,
    pub target_retrieved: bool,
}

fn violation(index: usize, reason: impl Into<String>) -> ReplayError {
    ReplayError::Violation {
        index,
        reason: reason.into(),
    }
}

/// Re-executes `trace` on a fresh simulator for `scene`, checking for every
/// plan that it is collision-free at half the lattice spacing, starts where
/// the previous one ended, starts in the current grasp state and ends in the
/// region its action requires, and that each grasp comes out as recorded.
pub fn replay(trace: &ActionTrace, scene: &WorkspaceConfig) -> Result<ReplayReport, ReplayError> {
    let actual = file::fingerprint(scene).map_err(|e| ReplayError::Format(e.to_string()))?;
    if actual != trace.scene_fingerprint {
        return Err(ReplayError::SceneMismatch {
            expected: trace.scene_fingerprint.clone(),
            actual,
        });
    }
    let failure = FailureModel::new(trace.config.grasp_failure_probability)
        .map_err(|e| ReplayError::Format(e.to_string()))?;
    let handle: MotionPlannerHandle = trace.config.planner;
    let mut sim = Simulator::new(scene.clone(), failure, failure_seed(trace.seed))
        .map_err(|e| ReplayError::Format(e.to_string()))?
        .with_validation_step(handle.validation_step());
    let mut previous_end = None;
    for (i, a) in trace.actions.iter().enumerate() {
        let plan = &a.plan;
        if plan.waypoints.is_empty() {
            return Err(violation(i, "plan has no waypoints"));
        }
        let here = sim.scene().gripper;
        let start_gap = plan.start().distance(here.position);
        if start_gap > CHAIN_TOLERANCE {
            return Err(violation(i, format!("plan starts {start_gap:e} m away from the gripper")));
        }
        if let Some(end) = previous_end {
            if plan.start().distance(end) > CHAIN_TOLERANCE {
                return Err(violation(i, "plan does not start where the previous one ended"));
            }
        }
        if plan.holding != here.holding {
            return Err(violation(i, "plan assumes a different grasp state"));
        }
        if !path_validate(plan, sim.scene(), &handle) {
            return Err(violation(i, "plan collides"));
        }
        let what = match a.verb {
            Verb::Pick => {
                let obj = sim
                    .scene()
                    .object(a.object)
                    .ok_or_else(|| violation(i, format!("unknown object {}", a.object)))?;
                if !grasp_region(obj, sim.scene()).contains(plan.end()) {
                    return Err(violation(i, "pick does not end in the grasp region"));
                }
                Manipulation::Pick(a.object)
            }
            Verb::PlaceInStorage => Manipulation::PlaceInStorage,
            Verb::PlaceTarget => Manipulation::Retrieve,
            v => return Err(violation(i, format!("{v:?} is never executed"))),
        };
        if matches!(what, Manipulation::PlaceInStorage | Manipulation::Retrieve)
            && here.holding.map(|h| h.object) != Some(a.object)
        {
            return Err(violation(i, "placing an object that is not held"));
        }
        let result = sim.execute_plan(plan, what).map_err(|e: SimError| violation(i, e.to_string()))?;
        if result != a.result {
            return Err(violation(i, format!("grasp came out {result:?}, trace says {:?}", a.result)));
        }
        previous_end = Some(plan.end());
    }
    let retrieved = sim.scene().target_retrieved();
    if (trace.outcome == Outcome::Solved) != retrieved {
        return Err(violation(
            trace.actions.len(),
            format!("trace outcome {:?} but target retrieved = {retrieved}", trace.outcome),
        ));
    }
    Ok(ReplayReport {
        actions: trace.actions.len(),
        plans_checked: trace.actions.len(),
        target_retrieved: retrieved,
    })
}
