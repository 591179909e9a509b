//! Kinematic 2D table-top world: scene geometry, the collision predicate,
//! grasp regions, storage, plan execution with failure injection and random
//! scene generation.

mod collision;
mod execute;
pub mod file;
mod generate;
pub mod layout;
mod plan;
mod region;
mod scene;
mod storage;

use std::path::PathBuf;

use thiserror::Error;

pub use collision::{collision_free, CollisionWorld, Disc, Footprint, HeldDisc};
pub use execute::{ExecutionResult, FailureModel, Manipulation, Simulator};
pub use generate::{generate_scene, GenParams};
pub use layout::Layout;
pub use plan::MotionPlan;
pub use region::{free_grasp_fraction, grasp_region, GoalRegion};
pub use scene::{Configuration, Holding, ObjectId, ObjectState, WorkspaceConfig};
pub use storage::{next_storage_pose, StorageGrid};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid scene: {0}")]
    Invalid(String),
    #[error("object id {0} appears twice")]
    DuplicateObject(ObjectId),
    #[error("unknown object id {0}")]
    UnknownObject(ObjectId),
    #[error("objects {0} and {1} overlap")]
    Overlap(ObjectId, ObjectId),
    #[error("placed {placed} of {requested} objects after {attempts} attempts; the table is too dense")]
    PackingFailed {
        placed: usize,
        requested: usize,
        attempts: usize,
    },
    #[error("malformed scene file: {0}")]
    Format(#[source] serde_json::Error),
    #[error("{path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, #[source] std::io::Error),
}

impl PartialEq for SceneError {
    fn eq(&self, other: &Self) -> bool {
        use SceneError::*;
        match (self, other) {
            (Invalid(a), Invalid(b)) => a == b,
            (DuplicateObject(a), DuplicateObject(b)) | (UnknownObject(a), UnknownObject(b)) => {
                a == b
            }
            (Overlap(a, b), Overlap(c, d)) => (a, b) == (c, d),
            (
                PackingFailed {
                    placed: a,
                    requested: b,
                    attempts: c,
                },
                PackingFailed {
                    placed: d,
                    requested: e,
                    attempts: f,
                },
            ) => (a, b, c) == (d, e, f),
            _ => false,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("stale plan: {0}")]
    StalePlan(&'static str),
    #[error("plan misses its goal: {0}")]
    GoalMissed(&'static str),
    #[error("unknown object id {0}")]
    UnknownObject(ObjectId),
    #[error("object {0} cannot be picked")]
    NotPickable(ObjectId),
    #[error("the gripper is already holding an object")]
    GripperBusy,
    #[error("the gripper is not holding anything")]
    NothingHeld,
    #[error("failure probability {0} is outside [0, 1]")]
    BadFailureProbability(f64),
}
