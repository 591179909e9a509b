//! Scene files.
//!
//! A scene file is pretty-printed JSON describing an initial world: the
//! gripper rests at the entry pose and nothing is held or stored.
//!
//! ```json
//! {
//!   "table": { "width": 1.0, "height": 0.6 },
//!   "workspace": { "min": [0.0, 0.0], "max": [3.8, 0.8] },
//!   "storage": { "min": [1.2, 0.0], "max": [3.8, 0.6] },
//!   "entry": [0.5, 0.7],
//!   "gripper_radius": 0.02,
//!   "target_id": 1,
//!   "seed": 42,
//!   "objects": [
//!     { "id": 0, "x": 0.31, "y": 0.12, "radius": 0.035 },
//!     { "id": 1, "x": 0.52, "y": 0.40, "radius": 0.021 },
//!     { "id": 2, "x": 0.70, "y": 0.02, "radius": 0.02, "fixed": true }
//!   ]
//! }
//! ```
//!
//! The table's lower-left corner is the origin. `fixed` is omitted for
//! movable objects and `seed` is `null` for hand-built scenes. Writing uses
//! two-space indentation, this field order, shortest round-trip float
//! formatting and a trailing newline, so `load` followed by `save` reproduces
//! a canonical file byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::scene::{Configuration, ObjectId, ObjectState, WorkspaceConfig};
use super::SceneError;
use crate::geometry::{Rect, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub table: TableDims,
    pub workspace: Rect,
    pub storage: Rect,
    pub entry: Vec2,
    pub gripper_radius: f64,
    pub target_id: ObjectId,
    pub seed: Option<u64>,
    pub objects: Vec<ObjectRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDims {
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectRecord {
    pub id: ObjectId,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fixed: bool,
}

impl SceneFile {
    pub fn from_scene(scene: &WorkspaceConfig) -> Result<Self, SceneError> {
        if scene.gripper.holding.is_some()
            || scene.gripper.position != scene.entry
            || scene.objects.iter().any(|o| !o.on_table())
        {
            return Err(SceneError::Invalid(
                "only initial scenes (gripper home, nothing moved) can be saved".into(),
            ));
        }
        if scene.table.min != Vec2::ZERO {
            return Err(SceneError::Invalid("the table must start at the origin".into()));
        }
        Ok(Self {
            table: TableDims {
                width: scene.table.width(),
                height: scene.table.height(),
            },
            workspace: scene.workspace,
            storage: scene.storage,
            entry: scene.entry,
            gripper_radius: scene.gripper.gripper_radius,
            target_id: scene.target_id,
            seed: scene.seed,
            objects: scene
                .objects
                .iter()
                .map(|o| ObjectRecord {
                    id: o.id,
                    x: o.center.x,
                    y: o.center.y,
                    radius: o.radius,
                    fixed: o.fixed,
                })
                .collect(),
        })
    }

    pub fn into_scene(self) -> Result<WorkspaceConfig, SceneError> {
        let scene = WorkspaceConfig {
            table: Rect::from_size(self.table.width, self.table.height),
            workspace: self.workspace,
            storage: self.storage,
            entry: self.entry,
            objects: self
                .objects
                .iter()
                .map(|r| {
                    let mut o = ObjectState::new(r.id, Vec2::new(r.x, r.y), r.radius);
                    o.fixed = r.fixed;
                    o
                })
                .collect(),
            gripper: Configuration::free(self.entry, self.gripper_radius),
            target_id: self.target_id,
            seed: self.seed,
        };
        scene.validate()?;
        Ok(scene)
    }
}

/// Canonical text of a scene file.
pub fn to_string(scene: &WorkspaceConfig) -> Result<String, SceneError> {
    let file = SceneFile::from_scene(scene)?;
    let mut text = serde_json::to_string_pretty(&file).map_err(SceneError::Format)?;
    text.push('\n');
    Ok(text)
}

pub fn from_str(text: &str) -> Result<WorkspaceConfig, SceneError> {
    let file: SceneFile = serde_json::from_str(text).map_err(SceneError::Format)?;
    file.into_scene()
}

pub fn save(scene: &WorkspaceConfig, path: &Path) -> Result<(), SceneError> {
    std::fs::write(path, to_string(scene)?).map_err(|e| SceneError::Io(path.to_owned(), e))
}

pub fn load(path: &Path) -> Result<WorkspaceConfig, SceneError> {
    let text = std::fs::read_to_string(path).map_err(|e| SceneError::Io(path.to_owned(), e))?;
    from_str(&text)
}

/// Fingerprint of the canonical file text; traces record it to detect
/// replays against the wrong scene.
pub fn fingerprint(scene: &WorkspaceConfig) -> Result<String, SceneError> {
    use sha2::{Digest, Sha256};
    Ok(hex::encode(Sha256::digest(to_string(scene)?.as_bytes())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::generate::{generate_scene, GenParams};
    use proptest::prelude::*;

    #[test]
    fn fixed_flag_is_only_written_when_set() {
        let scene = WorkspaceConfig::on_default_layout(
            vec![
                ObjectState::new(0, Vec2::new(0.5, 0.3), 0.03),
                ObjectState::fixture(1, Vec2::new(0.7, 0.02), 0.02),
            ],
            0,
        );
        let text = to_string(&scene).unwrap();
        assert_eq!(text.matches("\"fixed\"").count(), 1);
        assert_eq!(from_str(&text).unwrap(), scene);
    }

    #[test]
    fn unknown_fields_and_bad_scenes_are_rejected() {
        let scene = generate_scene(3, 1, &GenParams::default()).unwrap();
        let text = to_string(&scene).unwrap();
        let extra = text.replacen("\"seed\"", "\"colour\": 1,\n  \"seed\"", 1);
        assert!(matches!(from_str(&extra), Err(SceneError::Format(_))));
        let bad_target = text.replace(
            &format!("\"target_id\": {}", scene.target_id),
            "\"target_id\": 99",
        );
        assert!(matches!(from_str(&bad_target), Err(SceneError::UnknownObject(99))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn canonical_text_round_trips_byte_for_byte(count in 1usize..20, seed in any::<u64>()) {
            let scene = generate_scene(count, seed, &GenParams::default()).unwrap();
            let text = to_string(&scene).unwrap();
            let loaded = from_str(&text).unwrap();
            prop_assert_eq!(&loaded, &scene);
            prop_assert_eq!(to_string(&loaded).unwrap(), text);
        }
    }
}
