use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{layout, SceneError};
use crate::geometry::{discs_overlap, Rect, Vec2};

pub type ObjectId = u32;

/// A disc-shaped object on the table or in storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub id: ObjectId,
    pub center: Vec2,
    pub radius: f64,
    pub held: bool,
    pub in_storage: bool,
    /// Fixtures (walls, posts) are obstacles that can never be picked.
    pub fixed: bool,
}

impl ObjectState {
    pub fn new(id: ObjectId, center: Vec2, radius: f64) -> Self {
        Self {
            id,
            center,
            radius,
            held: false,
            in_storage: false,
            fixed: false,
        }
    }

    pub fn fixture(id: ObjectId, center: Vec2, radius: f64) -> Self {
        Self {
            fixed: true,
            ..Self::new(id, center, radius)
        }
    }

    /// Still on the table and available for manipulation.
    pub fn on_table(&self) -> bool {
        !self.held && !self.in_storage
    }
}

/// Rigid attachment of an object to the gripper: the object's center sits at
/// `gripper + offset`, with the offset pointing along the approach direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Holding {
    pub object: ObjectId,
    pub offset: Vec2,
}

/// A gripper configuration. The configuration space is the set of gripper
/// disc centers; a held object rides along at a fixed offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub position: Vec2,
    pub gripper_radius: f64,
    pub holding: Option<Holding>,
}

impl Configuration {
    pub fn free(position: Vec2, gripper_radius: f64) -> Self {
        Self {
            position,
            gripper_radius,
            holding: None,
        }
    }

    pub fn at(self, position: Vec2) -> Self {
        Self { position, ..self }
    }
}

/// The full geometric state of the table-top world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceConfig {
    /// Region where clutter lives; objects start inside it.
    pub table: Rect,
    /// Everything the gripper may reach: table, approach lane and storage.
    pub workspace: Rect,
    /// Where removed objects are put. Disjoint from the table.
    pub storage: Rect,
    /// Gripper home pose. Retrieval means bringing the target here.
    pub entry: Vec2,
    pub objects: Vec<ObjectState>,
    pub gripper: Configuration,
    pub target_id: ObjectId,
    pub seed: Option<u64>,
}

impl WorkspaceConfig {
    /// Builds a scene on the default layout with the gripper at the entry pose.
    pub fn on_default_layout(objects: Vec<ObjectState>, target_id: ObjectId) -> Self {
        layout::Layout::default().scene(objects, target_id)
    }

    pub fn object(&self, id: ObjectId) -> Option<&ObjectState> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn object_mut(&mut self, id: ObjectId) -> Option<&mut ObjectState> {
        self.objects.iter_mut().find(|o| o.id == id)
    }

    pub fn target(&self) -> &ObjectState {
        self.object(self.target_id)
            .expect("validated scene always contains its target")
    }

    pub fn gripper_radius(&self) -> f64 {
        self.gripper.gripper_radius
    }

    /// Movable non-target objects still on the table.
    pub fn movable_blockers(&self) -> impl Iterator<Item = &ObjectState> {
        self.objects
            .iter()
            .filter(move |o| o.id != self.target_id && !o.fixed && o.on_table())
    }

    pub fn stored_count(&self) -> usize {
        self.objects.iter().filter(|o| o.in_storage).count()
    }

    /// Same scene with the given objects deleted.
    pub fn without(&self, removed: &[ObjectId]) -> WorkspaceConfig {
        let mut scene = self.clone();
        scene.objects.retain(|o| !removed.contains(&o.id));
        scene
    }

    /// Deep immutable copy of the current state, as seen by perception.
    pub fn snapshot(&self) -> Arc<WorkspaceConfig> {
        Arc::new(self.clone())
    }

    /// SHA-256 over the canonical JSON of the full state.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scene serializes");
        hex::encode(Sha256::digest(bytes))
    }

    /// Whether the target has been brought back to the entry pose.
    pub fn target_retrieved(&self) -> bool {
        self.target().held && self.gripper.position.distance(self.entry) <= layout::GRASP_TOLERANCE
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let r_g = self.gripper.gripper_radius;
        if !(r_g > 0.0) {
            return Err(SceneError::Invalid("gripper radius must be positive".into()));
        }
        if !self.workspace.contains_rect(&self.table) {
            return Err(SceneError::Invalid("table must lie inside the workspace".into()));
        }
        if !self.workspace.contains_rect(&self.storage) {
            return Err(SceneError::Invalid("storage must lie inside the workspace".into()));
        }
        if self.storage.intersects(&self.table) {
            return Err(SceneError::Invalid("storage overlaps the table".into()));
        }
        if !self.workspace.contains_disc(self.entry, r_g) {
            return Err(SceneError::Invalid("entry pose outside the workspace".into()));
        }
        for (i, o) in self.objects.iter().enumerate() {
            if !(o.radius > 0.0) || !o.center.x.is_finite() || !o.center.y.is_finite() {
                return Err(SceneError::Invalid(format!("object {} has a bad shape", o.id)));
            }
            if self.objects[..i].iter().any(|p| p.id == o.id) {
                return Err(SceneError::DuplicateObject(o.id));
            }
            let region = if o.in_storage { &self.storage } else { &self.workspace };
            if !o.held && !region.contains_disc(o.center, o.radius) {
                return Err(SceneError::Invalid(format!("object {} is out of bounds", o.id)));
            }
            if o.fixed && (o.held || o.in_storage) {
                return Err(SceneError::Invalid(format!("fixture {} cannot move", o.id)));
            }
        }
        let target = self
            .object(self.target_id)
            .ok_or(SceneError::UnknownObject(self.target_id))?;
        if target.fixed {
            return Err(SceneError::Invalid("the target cannot be a fixture".into()));
        }
        if let Some((a, b)) = self.first_overlap() {
            return Err(SceneError::Overlap(a, b));
        }
        let holding = self.gripper.holding.map(|h| h.object);
        for o in self.objects.iter().filter(|o| Some(o.id) != holding) {
            if o.held {
                return Err(SceneError::Invalid(format!("object {} held but not by the gripper", o.id)));
            }
            if discs_overlap(self.gripper.position, r_g, o.center, o.radius) {
                return Err(SceneError::Invalid(format!("gripper overlaps object {}", o.id)));
            }
        }
        Ok(())
    }

    /// First pair of objects (ids) whose discs overlap, in scan order.
    pub fn first_overlap(&self) -> Option<(ObjectId, ObjectId)> {
        for (i, a) in self.objects.iter().enumerate() {
            for b in &self.objects[i + 1..] {
                if discs_overlap(a.center, a.radius, b.center, b.radius) {
                    return Some((a.id, b.id));
                }
            }
        }
        None
    }
}
