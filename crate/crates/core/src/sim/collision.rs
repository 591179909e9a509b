//! The collision predicate and the exact segment tests the planners build on.
//!
//! Contact is free: two discs collide only when the distance between their
//! centers is strictly smaller than the sum of their radii. A gripper resting
//! tangent to an object is therefore a legal grasp pose.

use std::cell::Cell;

use super::scene::{Configuration, ObjectId, WorkspaceConfig};
use crate::geometry::{discs_overlap, point_segment_distance, Rect, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: Vec2,
    pub radius: f64,
}

/// The moving shape: the gripper disc plus, when holding, the held object's
/// disc at a fixed offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub gripper_radius: f64,
    pub held: Option<HeldDisc>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeldDisc {
    pub offset: Vec2,
    pub radius: f64,
}

impl Footprint {
    pub fn gripper_only(gripper_radius: f64) -> Self {
        Self {
            gripper_radius,
            held: None,
        }
    }

    /// Footprint of `q` in `scene`. Panics if `q` holds an object the scene lacks.
    pub fn of(q: &Configuration, scene: &WorkspaceConfig) -> Self {
        let held = q.holding.map(|h| HeldDisc {
            offset: h.offset,
            radius: scene
                .object(h.object)
                .expect("held object must exist in the scene")
                .radius,
        });
        Self {
            gripper_radius: q.gripper_radius,
            held,
        }
    }

    /// Discs of the footprint placed with the gripper at `p`.
    pub fn discs(&self, p: Vec2) -> impl Iterator<Item = Disc> + '_ {
        std::iter::once(Disc {
            center: p,
            radius: self.gripper_radius,
        })
        .chain(self.held.map(|h| Disc {
            center: p + h.offset,
            radius: h.radius,
        }))
    }

    /// Largest distance from the gripper center to any point of the footprint.
    pub fn reach(&self) -> f64 {
        match self.held {
            None => self.gripper_radius,
            Some(h) => self.gripper_radius.max(h.offset.norm() + h.radius),
        }
    }
}

/// Static obstacles and bounds for one query, with a logical counter of the
/// collision checks performed against them.
#[derive(Debug, Clone)]
pub struct CollisionWorld {
    pub bounds: Rect,
    pub obstacles: Vec<Disc>,
    checks: Cell<u64>,
}

impl CollisionWorld {
    pub fn new(bounds: Rect, obstacles: Vec<Disc>) -> Self {
        Self {
            bounds,
            obstacles,
            checks: Cell::new(0),
        }
    }

    /// Every object except `ignore` (the held object, if any) is an obstacle.
    pub fn from_scene(scene: &WorkspaceConfig, ignore: Option<ObjectId>) -> Self {
        let obstacles = scene
            .objects
            .iter()
            .filter(|o| Some(o.id) != ignore)
            .map(|o| Disc {
                center: o.center,
                radius: o.radius,
            })
            .collect();
        Self::new(scene.workspace, obstacles)
    }

    pub fn for_configuration(scene: &WorkspaceConfig, q: &Configuration) -> Self {
        Self::from_scene(scene, q.holding.map(|h| h.object))
    }

    pub fn checks(&self) -> u64 {
        self.checks.get()
    }

    fn count(&self) {
        self.checks.set(self.checks.get() + 1);
    }

    pub fn config_free(&self, p: Vec2, footprint: &Footprint) -> bool {
        self.count();
        footprint.discs(p).all(|d| {
            self.bounds.contains_disc(d.center, d.radius)
                && !self
                    .obstacles
                    .iter()
                    .any(|o| discs_overlap(d.center, d.radius, o.center, o.radius))
        })
    }

    /// Exact test of the straight translation from `a` to `b`.
    pub fn segment_free(&self, a: Vec2, b: Vec2, footprint: &Footprint) -> bool {
        self.count();
        // The bounds are convex, so checking both endpoints covers the segment.
        footprint.discs(a).zip(footprint.discs(b)).all(|(da, db)| {
            self.bounds.contains_disc(da.center, da.radius)
                && self.bounds.contains_disc(db.center, db.radius)
                && self.obstacles.iter().all(|o| {
                    point_segment_distance(o.center, da.center, db.center) >= da.radius + o.radius
                })
        })
    }

    /// Sampled check of a polyline: every waypoint and every point at most
    /// `step` apart along each segment must be free.
    pub fn polyline_free(&self, waypoints: &[Vec2], footprint: &Footprint, step: f64) -> bool {
        assert!(step > 0.0, "sampling step must be positive");
        if let Some(&first) = waypoints.first() {
            if !self.config_free(first, footprint) {
                return false;
            }
        }
        waypoints.windows(2).all(|w| {
            let n = (w[0].distance(w[1]) / step).ceil().max(1.0) as usize;
            (1..=n).all(|i| self.config_free(w[0].lerp(w[1], i as f64 / n as f64), footprint))
        })
    }
}

/// The collision predicate f: `true` when the gripper (and whatever it holds)
/// stays inside the workspace and overlaps no other object.
pub fn collision_free(q: &Configuration, scene: &WorkspaceConfig) -> bool {
    let world = CollisionWorld::for_configuration(scene, q);
    world.config_free(q.position, &Footprint::of(q, scene))
}
