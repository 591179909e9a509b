//! Hand-built scenes on the default layout.
//!
//! Walls are rows of fixed discs whose neighbours touch, so not even a point
//! can slip between them. Corridors and boxes stand on the table's bottom
//! edge, which closes them from below. Movable objects get ids from 0 with
//! the target first; fixtures get ids from 100.

use crate::geometry::Vec2;
use crate::sim::{generate_scene, GenParams, ObjectState, WorkspaceConfig};

pub const WALL_RADIUS: f64 = 0.02;
const FIXTURE_ID_BASE: u32 = 100;
// Just over tangency.
const WALL_PITCH: f64 = 2.0 * WALL_RADIUS + 1e-9;

/// Rows of fixture discs, numbered consecutively.
struct Fixtures {
    objects: Vec<ObjectState>,
}

impl Fixtures {
    fn new() -> Self {
        Self {
            objects: Vec::new(),
        }
    }

    fn push(&mut self, center: Vec2) {
        let id = FIXTURE_ID_BASE + self.objects.len() as u32;
        self.objects.push(ObjectState::fixture(id, center, WALL_RADIUS));
    }

    /// Vertical wall at `x` from the bottom edge up to (about) `top`.
    fn column(&mut self, x: f64, top: f64) {
        let mut y = WALL_RADIUS;
        while y <= top {
            self.push(Vec2::new(x, y));
            y += WALL_PITCH;
        }
    }

    /// Horizontal wall at height `y` strictly between `x0` and `x1`.
    fn row(&mut self, y: f64, x0: f64, x1: f64) {
        let mut x = x0 + WALL_PITCH;
        while x < x1 - WALL_PITCH / 2.0 {
            self.push(Vec2::new(x, y));
            x += WALL_PITCH;
        }
    }
}

/// A target alone on the table.
pub fn lone_target(center: Vec2, radius: f64) -> WorkspaceConfig {
    WorkspaceConfig::on_default_layout(vec![ObjectState::new(0, center, radius)], 0)
}

/// Geometry of a dead-end corridor standing on the bottom edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corridor {
    /// Corridor axis.
    pub x: f64,
    /// Clear distance from the axis to either wall surface.
    pub half_width: f64,
    /// Height of the wall tops.
    pub height: f64,
}

impl Default for Corridor {
    fn default() -> Self {
        Self {
            x: 0.5,
            half_width: 0.05,
            height: 0.3,
        }
    }
}

impl Corridor {
    fn walls(&self) -> Fixtures {
        let mut f = Fixtures::new();
        let offset = self.half_width + WALL_RADIUS;
        f.column(self.x - offset, self.height);
        f.column(self.x + offset, self.height);
        f
    }
}

/// Target at the dead end of a corridor with `blockers` discs of radius
/// 0.04 stacked above it. Each blocker leaves less than a gripper width on
/// either side, so the blockers must come out top-down.
pub fn corridor(c: Corridor, target_radius: f64, blockers: usize) -> WorkspaceConfig {
    assert!(target_radius <= c.half_width, "target must fit the corridor");
    let blocker_radius = 0.04;
    let mut objects = vec![ObjectState::new(
        0,
        Vec2::new(c.x, target_radius + 0.005),
        target_radius,
    )];
    let mut y = 2.0 * target_radius + 0.005 + 0.06 + blocker_radius;
    for i in 0..blockers {
        objects.push(ObjectState::new(i as u32 + 1, Vec2::new(c.x, y), blocker_radius));
        y += 2.0 * blocker_radius + 0.02;
    }
    assert!(y - blocker_radius < c.height + 0.1, "corridor too short for its blockers");
    objects.extend(c.walls().objects);
    WorkspaceConfig::on_default_layout(objects, 0)
}

/// The corridor closed by a lid of wall discs: the target can never be
/// reached. `inside` movable discs are stacked above the target inside the
/// box and `outside` movable discs stand next to it on the table.
pub fn walled(c: Corridor, inside: usize, outside: usize) -> WorkspaceConfig {
    let mut scene = corridor(c, 0.03, inside);
    let mut lid = Fixtures::new();
    let offset = c.half_width + WALL_RADIUS;
    let top_y = scene
        .objects
        .iter()
        .filter(|o| o.fixed)
        .map(|o| o.center.y)
        .fold(0.0, f64::max);
    lid.row(top_y, c.x - offset, c.x + offset);
    let next_fixture = scene.objects.iter().filter(|o| o.fixed).count() as u32;
    for (k, mut o) in lid.objects.into_iter().enumerate() {
        o.id = FIXTURE_ID_BASE + next_fixture + k as u32;
        scene.objects.push(o);
    }
    let first = inside as u32 + 1;
    for k in 0..outside {
        let side = if k % 2 == 0 { -1.0 } else { 1.0 };
        let x = c.x + side * (offset + 0.12 + 0.1 * (k / 2) as f64);
        scene
            .objects
            .push(ObjectState::new(first + k as u32, Vec2::new(x, 0.2), 0.035));
    }
    scene
}

/// Target enclosed by three movable discs whose pairwise gaps are just
/// under a gripper width. Removing any one of them opens the target.
pub fn ring(center: Vec2, rotation: f64) -> WorkspaceConfig {
    let (rt, rb) = (0.03, 0.05);
    let d = rt + rb + 0.0005;
    let mut objects = vec![ObjectState::new(0, center, rt)];
    for k in 0..3 {
        let theta = rotation + std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::TAU / 3.0;
        objects.push(ObjectState::new(k + 1, center + Vec2::from_angle(theta) * d, rb));
    }
    WorkspaceConfig::on_default_layout(objects, 0)
}

/// Target inside a closed ring of fixture discs, with movable clutter
/// outside that changes nothing.
pub fn fixed_ring(center: Vec2, movable_outside: usize) -> WorkspaceConfig {
    let rt = 0.03;
    // Twelve touching wall discs on a circle; the gripper cannot pass.
    let n = 12;
    let ring_r = WALL_PITCH / (2.0 * (std::f64::consts::PI / n as f64).sin());
    let mut objects = vec![ObjectState::new(0, center, rt)];
    for k in 0..n {
        let p = center + Vec2::from_angle(k as f64 * std::f64::consts::TAU / n as f64) * ring_r;
        objects.push(ObjectState::fixture(FIXTURE_ID_BASE + k as u32, p, WALL_RADIUS));
    }
    for k in 0..movable_outside {
        let p = center + Vec2::new(-0.2 + 0.4 * k as f64, 0.15);
        objects.push(ObjectState::new(k as u32 + 1, p, 0.04));
    }
    WorkspaceConfig::on_default_layout(objects, 0)
}

/// Named scenes with at most three movable non-target objects, used for
/// oracle-equivalence regression runs.
pub fn regression_set() -> Vec<(String, WorkspaceConfig)> {
    let mut set = Vec::new();
    for (i, (x, y)) in [(0.5, 0.3), (0.1, 0.05), (0.9, 0.55), (0.3, 0.5)].into_iter().enumerate() {
        set.push((format!("lone-{i}"), lone_target(Vec2::new(x, y), 0.03)));
    }
    for (i, (x, rt)) in [(0.2, 0.03), (0.35, 0.025), (0.5, 0.03), (0.65, 0.04), (0.8, 0.03), (0.5, 0.02)]
        .into_iter()
        .enumerate()
    {
        let c = Corridor {
            x,
            ..Corridor::default()
        };
        set.push((format!("corridor-1-{i}"), corridor(c, rt, 1)));
    }
    for (i, x) in [0.25, 0.45, 0.6, 0.8].into_iter().enumerate() {
        let c = Corridor {
            x,
            height: 0.4,
            ..Corridor::default()
        };
        set.push((format!("corridor-2-{i}"), corridor(c, 0.03, 2)));
    }
    for (i, x) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        let c = Corridor {
            x,
            height: 0.5,
            ..Corridor::default()
        };
        set.push((format!("corridor-3-{i}"), corridor(c, 0.03, 3)));
    }
    for (i, (x, y, rot)) in [
        (0.5, 0.3, 0.0),
        (0.2, 0.2, 0.3),
        (0.8, 0.4, 1.1),
        (0.35, 0.45, 2.0),
        (0.65, 0.15, 0.7),
        (0.5, 0.1, 0.0),
    ]
    .into_iter()
    .enumerate()
    {
        set.push((format!("ring-{i}"), ring(Vec2::new(x, y), rot)));
    }
    for (i, (inside, outside)) in [(0, 0), (1, 0), (0, 1), (1, 2), (2, 1)].into_iter().enumerate() {
        let c = Corridor {
            x: 0.3 + 0.1 * i as f64,
            height: 0.4,
            ..Corridor::default()
        };
        set.push((format!("walled-{i}"), walled(c, inside, outside)));
    }
    for (i, n) in [0, 1, 2].into_iter().enumerate() {
        set.push((format!("fixed-ring-{i}"), fixed_ring(Vec2::new(0.5, 0.25), n)));
    }
    for (i, (count, seed)) in [(2, 11), (3, 12), (4, 13), (3, 14), (4, 15), (2, 16)].into_iter().enumerate() {
        let scene = generate_scene(count, seed, &GenParams::default()).expect("small scenes pack");
        set.push((format!("random-{i}"), scene));
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_regression_scene_is_valid_and_small() {
        let set = regression_set();
        assert!(set.len() >= 30);
        for (name, scene) in &set {
            scene.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            let movable = scene.movable_blockers().count();
            assert!(movable <= 3, "{name} has {movable} movable blockers");
        }
    }
}
