use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::motion::{MotionError, MotionPlannerHandle, MotionQuery};
use crate::sim::{grasp_region, Configuration, GoalRegion, Holding, ObjectId, SceneError, WorkspaceConfig};

/// Most movable blockers the oracle will enumerate subsets over.
pub const MAX_ORACLE_OBJECTS: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{0} movable blockers is over the oracle cap of {MAX_ORACLE_OBJECTS}")]
    TooManyObjects(usize),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Motion(#[from] MotionError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemovalCertificate {
    /// Every inclusion-minimal set of blockers whose deletion makes the
    /// target retrievable, up to the size cap. Sorted by size, then ids.
    pub minimal_sets: Vec<Vec<ObjectId>>,
    pub subsets_checked: u64,
}

impl RemovalCertificate {
    /// Fewest deletions that free the target, if any set up to the cap does.
    pub fn min_removals(&self) -> Option<usize> {
        self.minimal_sets.first().map(Vec::len)
    }

    pub fn retrievable(&self) -> bool {
        !self.minimal_sets.is_empty()
    }
}

/// Whether the gripper can reach the target from where it is and carry it
/// back to the entry pose, with no object moved.
pub fn target_reachable(scene: &WorkspaceConfig, handle: &MotionPlannerHandle) -> Result<bool, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let snapshot = scene.snapshot();
    let target = scene.target();
    let approach = MotionQuery::new(scene.gripper, grasp_region(target, scene), snapshot.clone());
    let Some(plan) = handle.plan(&approach, &mut rng)?.plan else {
        return Ok(false);
    };
    let held = Configuration {
        position: plan.end(),
        gripper_radius: plan.gripper_radius,
        holding: Some(Holding {
            object: target.id,
            offset: target.center - plan.end(),
        }),
    };
    let carry = MotionQuery::new(held, GoalRegion::ball(scene.entry), snapshot);
    Ok(handle.plan(&carry, &mut rng)?.plan.is_some())
}

/// Deletes every subset of movable blockers of size at most `max_subset`,
/// smallest first, and records the minimal ones after which the target is
/// reachable. Supersets of a known minimal set are skipped, since deleting
/// more objects never blocks a path.
pub fn removal_oracle(
    scene: &WorkspaceConfig,
    handle: &MotionPlannerHandle,
    max_subset: usize,
) -> Result<RemovalCertificate, OracleError> {
    scene.validate()?;
    let mut ids: Vec<ObjectId> = scene.movable_blockers().map(|o| o.id).collect();
    ids.sort_unstable();
    if ids.len() > MAX_ORACLE_OBJECTS {
        return Err(OracleError::TooManyObjects(ids.len()));
    }
    let mut minimal: Vec<Vec<ObjectId>> = Vec::new();
    let mut checked = 0u64;
    for size in 0..=max_subset.min(ids.len()) {
        let mut found = Vec::new();
        for subset in subsets_of_size(&ids, size) {
            if minimal.iter().any(|m| m.iter().all(|x| subset.contains(x))) {
                continue;
            }
            checked += 1;
            if target_reachable(&scene.without(&subset), handle)? {
                found.push(subset);
            }
        }
        minimal.extend(found);
    }
    Ok(RemovalCertificate {
        minimal_sets: minimal,
        subsets_checked: checked,
    })
}

/// Subsets of `ids` with `size` elements, in lexicographic order.
fn subsets_of_size(ids: &[ObjectId], size: usize) -> Vec<Vec<ObjectId>> {
    let n = ids.len();
    let mut out: Vec<Vec<ObjectId>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| ids[i]).collect())
        .collect();
    out.sort();
    out
}
