//! Default table-top layout.
//!
//! ```text
//!   y
//!  0.8 +-----------------------------------------------------------+
//!      |  approach lane (entry pose at the middle of the table)    |
//!  0.6 +----------------+------+-----------------------------------+
//!      |                |      |                                   |
//!      |     table      | gap  |   storage (slot grid, filled      |
//!      |   (clutter)    |      |   left-to-right, bottom-to-top)   |
//!  0.0 +----------------+------+-----------------------------------+
//!      0               1.0    1.2                                 3.8   x
//! ```
//!
//! The gripper is a free-flying disc that may go anywhere inside the outer
//! rectangle. Clutter is generated on the table only, and the approach lane
//! connects the entry pose with every column of the table and the storage.

use serde::{Deserialize, Serialize};

use super::scene::{Configuration, ObjectState, WorkspaceConfig};
use crate::geometry::{Rect, Vec2};

pub const TABLE_WIDTH: f64 = 1.0;
pub const TABLE_HEIGHT: f64 = 0.6;
pub const LANE_HEIGHT: f64 = 0.2;
pub const STORAGE_GAP: f64 = 0.2;
pub const STORAGE_WIDTH: f64 = 2.6;
pub const GRIPPER_RADIUS: f64 = 0.02;
pub const RADIUS_MIN: f64 = 0.02;
pub const RADIUS_MAX: f64 = 0.05;

/// Radial width of the grasp annulus around an object.
pub const GRASP_TOLERANCE: f64 = 0.005;

/// Allowed gap between the end of one motion plan and the start of the next.
pub const CHAIN_TOLERANCE: f64 = 1e-9;

/// Geometry of the world around the clutter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub table_width: f64,
    pub table_height: f64,
    pub lane_height: f64,
    pub storage_gap: f64,
    pub storage_width: f64,
    pub gripper_radius: f64,
}

impl Default for Layout {
    fn default() -> Self {
        Self {
            table_width: TABLE_WIDTH,
            table_height: TABLE_HEIGHT,
            lane_height: LANE_HEIGHT,
            storage_gap: STORAGE_GAP,
            storage_width: STORAGE_WIDTH,
            gripper_radius: GRIPPER_RADIUS,
        }
    }
}

impl Layout {
    pub fn table(&self) -> Rect {
        Rect::from_size(self.table_width, self.table_height)
    }

    pub fn storage(&self) -> Rect {
        let x0 = self.table_width + self.storage_gap;
        Rect::new(
            Vec2::new(x0, 0.0),
            Vec2::new(x0 + self.storage_width, self.table_height),
        )
    }

    pub fn workspace(&self) -> Rect {
        Rect::from_size(
            self.table_width + self.storage_gap + self.storage_width,
            self.table_height + self.lane_height,
        )
    }

    pub fn entry(&self) -> Vec2 {
        Vec2::new(
            self.table_width / 2.0,
            self.table_height + self.lane_height / 2.0,
        )
    }

    /// A scene on this layout with the gripper resting at the entry pose.
    pub fn scene(&self, objects: Vec<ObjectState>, target_id: u32) -> WorkspaceConfig {
        WorkspaceConfig {
            table: self.table(),
            workspace: self.workspace(),
            storage: self.storage(),
            entry: self.entry(),
            objects,
            gripper: Configuration::free(self.entry(), self.gripper_radius),
            target_id,
            seed: None,
        }
    }
}
