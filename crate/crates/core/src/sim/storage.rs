//! Slot grid inside the storage rectangle.
//!
//! Slots sit on a square grid with pitch `2·r_max + 2·r_g + ε_grasp + 2·c`,
//! where `r_max` is the largest object radius in the scene and `c` is
//! [`SLOT_CLEARANCE`]. With that pitch a held object may be lowered into any
//! slot whatever its grasp direction, and the empty gripper can still slip
//! between stored neighbours with `c` to spare on each side. Slot
//! centers start `r_max` plus [`EDGE_INSET`] inside the lower-left corner; index `k` maps to
//! column `k % cols` and row `k / cols`, so the scan runs left-to-right and
//! then bottom-to-top. Rows above the last filled one stay empty, which keeps
//! every next slot reachable from the approach lane.

use super::collision::{CollisionWorld, Footprint};
use super::layout::GRASP_TOLERANCE;
use super::scene::{Configuration, WorkspaceConfig};
use crate::geometry::{discs_overlap, Vec2};

pub const SLOT_CLEARANCE: f64 = 0.01;
/// Keeps stored discs off the storage boundary under rounding of
/// `grip + offset`.
pub const EDGE_INSET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageGrid {
    pub origin: Vec2,
    pub pitch: f64,
    pub cols: usize,
    pub rows: usize,
}

impl StorageGrid {
    pub fn for_scene(scene: &WorkspaceConfig) -> Self {
        let r_max = scene
            .objects
            .iter()
            .filter(|o| !o.fixed)
            .map(|o| o.radius)
            .fold(0.0, f64::max);
        let pitch =
            2.0 * r_max + 2.0 * scene.gripper_radius() + GRASP_TOLERANCE + 2.0 * SLOT_CLEARANCE;
        let s = scene.storage;
        let margin = r_max + EDGE_INSET;
        let count = |extent: f64| {
            if extent < 2.0 * margin {
                0
            } else {
                ((extent - 2.0 * margin) / pitch).floor() as usize + 1
            }
        };
        Self {
            origin: s.min + Vec2::new(margin, margin),
            pitch,
            cols: count(s.width()),
            rows: count(s.height()),
        }
    }

    pub fn capacity(&self) -> usize {
        self.cols * self.rows
    }

    pub fn slot(&self, k: usize) -> Vec2 {
        let (col, row) = (k % self.cols, k / self.cols);
        self.origin + Vec2::new(col as f64 * self.pitch, row as f64 * self.pitch)
    }

    pub fn slots(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.capacity()).map(|k| self.slot(k))
    }
}

/// First slot in scan order where the object held by `q` can be set down:
/// the slot is inside storage, the object overlaps nothing there, and the
/// gripper pose that puts it there is collision-free.
///
/// Returns the gripper position for that placement.
pub fn next_storage_pose(scene: &WorkspaceConfig, q: &Configuration) -> Option<Vec2> {
    let holding = q.holding?;
    let held = scene.object(holding.object)?;
    let grid = StorageGrid::for_scene(scene);
    let world = CollisionWorld::for_configuration(scene, q);
    let footprint = Footprint::of(q, scene);
    let found = grid.slots().find_map(|slot| {
        let fits = scene.storage.contains_disc(slot, held.radius)
            && !scene
                .objects
                .iter()
                .filter(|o| o.id != held.id)
                .any(|o| discs_overlap(slot, held.radius, o.center, o.radius));
        let grip = slot - holding.offset;
        (fits && world.config_free(grip, &footprint)).then_some(grip)
    });
    found
}
