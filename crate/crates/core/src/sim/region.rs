//! Goal sets in configuration space.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::collision::{CollisionWorld, Footprint};
use super::layout::GRASP_TOLERANCE;
use super::scene::{ObjectState, WorkspaceConfig};
use crate::geometry::Vec2;

/// A set of gripper positions a motion plan must end in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GoalRegion {
    /// Gripper centers at distance `[inner, outer]` from `center`.
    Annulus { center: Vec2, inner: f64, outer: f64 },
    /// Gripper centers within `radius` of `center`.
    Ball { center: Vec2, radius: f64 },
}

// Absorbs rounding when a pose is constructed exactly on a region boundary.
const MEMBERSHIP_SLACK: f64 = 1e-12;

impl GoalRegion {
    pub fn ball(center: Vec2) -> Self {
        GoalRegion::Ball {
            center,
            radius: GRASP_TOLERANCE,
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        self.distance(p) <= MEMBERSHIP_SLACK
    }

    /// Euclidean distance from `p` to the region (zero inside).
    pub fn distance(&self, p: Vec2) -> f64 {
        match *self {
            GoalRegion::Annulus {
                center,
                inner,
                outer,
            } => {
                let d = p.distance(center);
                (inner - d).max(d - outer).max(0.0)
            }
            GoalRegion::Ball { center, radius } => (p.distance(center) - radius).max(0.0),
        }
    }

    /// The canonical goal point nearest to `p`: the mid-radius circle of an
    /// annulus, the center of a ball.
    pub fn project(&self, p: Vec2) -> Vec2 {
        match *self {
            GoalRegion::Annulus {
                center,
                inner,
                outer,
            } => {
                let dir = (p - center).normalized().unwrap_or(Vec2::new(0.0, 1.0));
                center + dir * (0.5 * (inner + outer))
            }
            GoalRegion::Ball { center, .. } => center,
        }
    }

    /// Uniform sample (by area) from the region.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec2 {
        match *self {
            GoalRegion::Annulus {
                center,
                inner,
                outer,
            } => {
                let theta = rng.gen::<f64>() * TAU;
                let u = rng.gen::<f64>();
                let r = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
                center + Vec2::from_angle(theta) * r
            }
            GoalRegion::Ball { center, radius } => {
                let theta = rng.gen::<f64>() * TAU;
                let r = radius * rng.gen::<f64>().sqrt();
                center + Vec2::from_angle(theta) * r
            }
        }
    }

    /// A point that stands for the region when checking plan endpoints.
    pub fn anchor(&self) -> Vec2 {
        match *self {
            GoalRegion::Annulus { center, .. } | GoalRegion::Ball { center, .. } => center,
        }
    }
}

/// Grasp region φ(picked) of `obj`: gripper poses touching the object up to
/// the grasp tolerance. Collision-freeness is checked separately through
/// [`free_grasp_fraction`] or by the planners.
pub fn grasp_region(obj: &ObjectState, scene: &WorkspaceConfig) -> GoalRegion {
    let inner = scene.gripper_radius() + obj.radius;
    GoalRegion::Annulus {
        center: obj.center,
        inner,
        outer: inner + GRASP_TOLERANCE,
    }
}

/// Fraction of a dense polar sample grid over the grasp annulus of `obj`
/// where the bare gripper is collision-free.
pub fn free_grasp_fraction(
    obj: &ObjectState,
    scene: &WorkspaceConfig,
    angular: usize,
    radial: usize,
) -> f64 {
    let GoalRegion::Annulus {
        center,
        inner,
        outer,
    } = grasp_region(obj, scene)
    else {
        unreachable!()
    };
    let world = CollisionWorld::from_scene(scene, None);
    let fp = Footprint::gripper_only(scene.gripper_radius());
    let mut free = 0usize;
    for a in 0..angular {
        let theta = (a as f64 + 0.5) / angular as f64 * TAU;
        for k in 0..radial {
            let r = inner + (k as f64 + 0.5) / radial as f64 * (outer - inner);
            if world.config_free(center + Vec2::from_angle(theta) * r, &fp) {
                free += 1;
            }
        }
    }
    free as f64 / (angular * radial) as f64
}
