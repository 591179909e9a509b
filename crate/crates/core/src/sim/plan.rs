use serde::{Deserialize, Serialize};

use super::collision::{CollisionWorld, Footprint};
use super::scene::{Configuration, Holding, WorkspaceConfig};
use crate::geometry::Vec2;

/// A collision-free polyline through configuration space.
///
/// The plan is parameterized over `[0, 1]` by arc length: `at(0)` is the
/// first waypoint and `at(1)` the last. What the gripper holds does not
/// change along a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionPlan {
    pub gripper_radius: f64,
    pub holding: Option<Holding>,
    pub waypoints: Vec<Vec2>,
}

impl MotionPlan {
    pub fn new(start: &Configuration, waypoints: Vec<Vec2>) -> Self {
        assert!(!waypoints.is_empty(), "a motion plan has at least one waypoint");
        Self {
            gripper_radius: start.gripper_radius,
            holding: start.holding,
            waypoints,
        }
    }

    pub fn start(&self) -> Vec2 {
        self.waypoints[0]
    }

    pub fn end(&self) -> Vec2 {
        *self.waypoints.last().expect("non-empty plan")
    }

    pub fn configuration(&self, position: Vec2) -> Configuration {
        Configuration {
            position,
            gripper_radius: self.gripper_radius,
            holding: self.holding,
        }
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// τ(s) for `s ∈ [0, 1]`, interpolated by arc length.
    pub fn at(&self, s: f64) -> Vec2 {
        let total = self.length();
        if total == 0.0 {
            return self.start();
        }
        let mut remaining = s.clamp(0.0, 1.0) * total;
        for w in self.waypoints.windows(2) {
            let len = w[0].distance(w[1]);
            if remaining <= len {
                return w[0].lerp(w[1], if len == 0.0 { 0.0 } else { remaining / len });
            }
            remaining -= len;
        }
        self.end()
    }

    /// Re-checks every waypoint and every point at most `step` apart along
    /// each segment against the collision predicate in `scene`.
    pub fn is_valid_in(&self, scene: &WorkspaceConfig, step: f64) -> bool {
        let start = self.configuration(self.start());
        if let Some(h) = self.holding {
            if scene.object(h.object).is_none() {
                return false;
            }
        }
        let world = CollisionWorld::for_configuration(scene, &start);
        world.polyline_free(&self.waypoints, &Footprint::of(&start, scene), step)
    }

    /// Drops interior waypoints that lie on the straight line between their
    /// neighbours. Exact collinearity only, so the swept set is unchanged.
    pub fn compress(mut self) -> Self {
        if self.waypoints.len() < 3 {
            return self;
        }
        let mut out = Vec::with_capacity(self.waypoints.len());
        out.push(self.waypoints[0]);
        for i in 1..self.waypoints.len() - 1 {
            let prev = *out.last().unwrap();
            let (cur, next) = (self.waypoints[i], self.waypoints[i + 1]);
            let (a, b) = (cur - prev, next - cur);
            let collinear = a.x * b.y - a.y * b.x == 0.0 && a.dot(b) > 0.0;
            if !collinear {
                out.push(cur);
            }
        }
        out.push(self.end());
        self.waypoints = out;
        self
    }
}
