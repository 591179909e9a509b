use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layout::{CHAIN_TOLERANCE, GRASP_TOLERANCE};
use super::plan::MotionPlan;
use super::region::grasp_region;
use super::scene::{Holding, ObjectId, WorkspaceConfig};
use super::SimError;

/// Grasp failures are Bernoulli draws, one per executed pick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureModel {
    pub grasp_failure_probability: f64,
}

impl FailureModel {
    pub const NONE: FailureModel = FailureModel {
        grasp_failure_probability: 0.0,
    };

    pub fn new(p: f64) -> Result<Self, SimError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(SimError::BadFailureProbability(p));
        }
        Ok(Self {
            grasp_failure_probability: p,
        })
    }
}

/// What a plan is executed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Manipulation {
    /// Move into the grasp region of the object and close the gripper.
    Pick(ObjectId),
    /// Carry the held object and release it inside storage.
    PlaceInStorage,
    /// Carry the held target back to the entry pose.
    Retrieve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecutionResult {
    Ok,
    GraspFailed,
}

/// Kinematic table-top simulator: owns the live scene and the failure RNG.
#[derive(Debug, Clone)]
pub struct Simulator {
    scene: WorkspaceConfig,
    failure: FailureModel,
    rng: ChaCha8Rng,
    validation_step: f64,
    distance_travelled: f64,
}

impl Simulator {
    pub fn new(scene: WorkspaceConfig, failure: FailureModel, seed: u64) -> Result<Self, SimError> {
        scene.validate()?;
        Ok(Self {
            scene,
            failure,
            rng: ChaCha8Rng::seed_from_u64(seed),
            validation_step: crate::motion::DEFAULT_GRID_RESOLUTION / 2.0,
            distance_travelled: 0.0,
        })
    }

    pub fn with_validation_step(mut self, step: f64) -> Self {
        self.validation_step = step;
        self
    }

    pub fn scene(&self) -> &WorkspaceConfig {
        &self.scene
    }

    /// Perception: a deep copy of the current ground-truth state.
    pub fn snapshot(&self) -> std::sync::Arc<WorkspaceConfig> {
        self.scene.snapshot()
    }

    /// Total gripper path length executed so far.
    pub fn distance_travelled(&self) -> f64 {
        self.distance_travelled
    }

    /// Executes `plan` for `what`. Errors leave the scene untouched and mean
    /// the plan was made against a different scene than the live one.
    pub fn execute_plan(
        &mut self,
        plan: &MotionPlan,
        what: Manipulation,
    ) -> Result<ExecutionResult, SimError> {
        self.check_plan(plan)?;
        let end = plan.end();
        let result = match what {
            Manipulation::Pick(id) => {
                if self.scene.gripper.holding.is_some() {
                    return Err(SimError::GripperBusy);
                }
                let obj = self.scene.object(id).ok_or(SimError::UnknownObject(id))?;
                if obj.fixed || !obj.on_table() {
                    return Err(SimError::NotPickable(id));
                }
                if !grasp_region(obj, &self.scene).contains(end) {
                    return Err(SimError::GoalMissed("pick does not end in the grasp region"));
                }
                let offset = obj.center - end;
                let failed = self.rng.gen::<f64>() < self.failure.grasp_failure_probability;
                self.scene.gripper.position = end;
                if failed {
                    ExecutionResult::GraspFailed
                } else {
                    self.scene.gripper.holding = Some(Holding { object: id, offset });
                    self.scene.object_mut(id).unwrap().held = true;
                    ExecutionResult::Ok
                }
            }
            Manipulation::PlaceInStorage => {
                let h = self.scene.gripper.holding.ok_or(SimError::NothingHeld)?;
                let center = end + h.offset;
                let radius = self.scene.object(h.object).unwrap().radius;
                if !self.scene.storage.contains_disc(center, radius) {
                    return Err(SimError::GoalMissed("object released outside storage"));
                }
                self.scene.gripper.position = end;
                self.scene.gripper.holding = None;
                let obj = self.scene.object_mut(h.object).unwrap();
                obj.center = center;
                obj.held = false;
                obj.in_storage = true;
                ExecutionResult::Ok
            }
            Manipulation::Retrieve => {
                let h = self.scene.gripper.holding.ok_or(SimError::NothingHeld)?;
                if h.object != self.scene.target_id {
                    return Err(SimError::GoalMissed("retrieving a non-target object"));
                }
                if end.distance(self.scene.entry) > GRASP_TOLERANCE {
                    return Err(SimError::GoalMissed("retrieval does not end at the entry pose"));
                }
                self.scene.gripper.position = end;
                ExecutionResult::Ok
            }
        };
        self.distance_travelled += plan.length();
        if let Some(h) = self.scene.gripper.holding {
            let p = self.scene.gripper.position + h.offset;
            self.scene.object_mut(h.object).unwrap().center = p;
        }
        debug_assert_eq!(self.scene.first_overlap(), None, "objects overlap after execution");
        Ok(result)
    }

    fn check_plan(&self, plan: &MotionPlan) -> Result<(), SimError> {
        let g = &self.scene.gripper;
        if plan.start().distance(g.position) > CHAIN_TOLERANCE {
            return Err(SimError::StalePlan("plan does not start at the gripper pose"));
        }
        if plan.holding != g.holding || plan.gripper_radius != g.gripper_radius {
            return Err(SimError::StalePlan("plan assumes a different grasp state"));
        }
        if !plan.is_valid_in(&self.scene, self.validation_step) {
            return Err(SimError::StalePlan("plan collides in the current scene"));
        }
        Ok(())
    }
}
