//! Breadth-first search over a square lattice of gripper positions.
//!
//! Lattice points are `workspace.min + (i·h, j·h)`. A point is free when the
//! footprint placed there stays in bounds and keeps every obstacle at least
//! `R + m` away, where `R` is the sum of the two radii and the margin
//! `m = (√2·h)² / (8·R_min)` is the largest depth by which a diagonal lattice
//! step can dip into a disc whose boundary both endpoints clear. With that
//! margin, every 8-connected step between free points is a collision-free
//! segment, so the search never needs per-edge tests.
//!
//! The start pose and the goal are off-lattice; they are joined to lattice
//! points within `2h` by exactly checked straight segments. The goal point is
//! the region's projection of the lattice point being expanded, which for a
//! ball is its center and for a grasp annulus the mid-radius circle.
//!
//! A clearance of `√2·h` around a path is enough for the lattice to contain
//! a parallel path, so "no path" answers are definitive for passages at
//! least that wide.

use std::collections::VecDeque;

use crate::geometry::Vec2;
use crate::sim::{CollisionWorld, Footprint, GoalRegion};

const NEIGHBOURS: [(i64, i64); 8] = [
    (1, 0),
    (0, 1),
    (-1, 0),
    (0, -1),
    (1, 1),
    (-1, 1),
    (-1, -1),
    (1, -1),
];

const UNVISITED: u32 = u32::MAX;
const FROM_START: u32 = u32::MAX - 1;

pub(crate) struct GridSearch {
    pub waypoints: Option<Vec<Vec2>>,
    pub expanded: u64,
}

struct Lattice {
    origin: Vec2,
    h: f64,
    nx: usize,
    ny: usize,
}

impl Lattice {
    fn point(&self, i: usize, j: usize) -> Vec2 {
        self.origin + Vec2::new(i as f64 * self.h, j as f64 * self.h)
    }

    fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }
}

fn free_map(world: &CollisionWorld, footprint: &Footprint, lattice: &Lattice) -> Vec<bool> {
    let h = lattice.h;
    let discs: Vec<(Vec2, f64)> = footprint
        .discs(Vec2::ZERO)
        .map(|d| (d.center, d.radius))
        .collect();
    let r_min = world
        .obstacles
        .iter()
        .flat_map(|o| discs.iter().map(move |d| o.radius + d.1))
        .fold(f64::INFINITY, f64::min);
    let margin = if r_min.is_finite() {
        2.0 * h * h / (8.0 * r_min) + 1e-12
    } else {
        0.0
    };

    let mut free = vec![true; lattice.nx * lattice.ny];
    for j in 0..lattice.ny {
        for i in 0..lattice.nx {
            let p = lattice.point(i, j);
            if !discs
                .iter()
                .all(|&(o, r)| world.bounds.contains_disc(p + o, r))
            {
                free[lattice.index(i, j)] = false;
            }
        }
    }
    // Rasterize the forbidden disc of every (obstacle, footprint disc) pair.
    for obstacle in &world.obstacles {
        for &(offset, r) in &discs {
            let c = obstacle.center - offset;
            let reach = obstacle.radius + r + margin;
            let lo_i = ((c.x - reach - lattice.origin.x) / h).floor().max(0.0) as usize;
            let lo_j = ((c.y - reach - lattice.origin.y) / h).floor().max(0.0) as usize;
            let hi_i = (((c.x + reach - lattice.origin.x) / h).ceil().max(0.0) as usize)
                .min(lattice.nx - 1);
            let hi_j = (((c.y + reach - lattice.origin.y) / h).ceil().max(0.0) as usize)
                .min(lattice.ny - 1);
            for j in lo_j..=hi_j {
                for i in lo_i..=hi_i {
                    if (lattice.point(i, j) - c).norm_squared() < reach * reach {
                        free[lattice.index(i, j)] = false;
                    }
                }
            }
        }
    }
    free
}

pub(crate) fn search(
    world: &CollisionWorld,
    footprint: &Footprint,
    start: Vec2,
    goal: &GoalRegion,
    h: f64,
) -> GridSearch {
    if goal.contains(start) {
        return GridSearch {
            waypoints: Some(vec![start]),
            expanded: 0,
        };
    }
    let link = 2.0 * h;
    let try_goal = |p: Vec2| -> Option<Vec2> {
        if goal.distance(p) > link {
            return None;
        }
        let q = goal.project(p);
        (world.config_free(q, footprint) && world.segment_free(p, q, footprint)).then_some(q)
    };
    if let Some(q) = try_goal(start) {
        return GridSearch {
            waypoints: Some(vec![start, q]),
            expanded: 0,
        };
    }

    let b = world.bounds;
    let lattice = Lattice {
        origin: b.min,
        h,
        nx: (b.width() / h).floor() as usize + 1,
        ny: (b.height() / h).floor() as usize + 1,
    };
    let free = free_map(world, footprint, &lattice);
    let mut parent = vec![UNVISITED; free.len()];
    let mut queue = VecDeque::new();

    // Seed with lattice points near the start, nearest first.
    let si = ((start.x - lattice.origin.x) / h).round() as i64;
    let sj = ((start.y - lattice.origin.y) / h).round() as i64;
    let mut seeds = Vec::new();
    for dj in -3..=3i64 {
        for di in -3..=3i64 {
            let (i, j) = (si + di, sj + dj);
            if i < 0 || j < 0 || i >= lattice.nx as i64 || j >= lattice.ny as i64 {
                continue;
            }
            let (i, j) = (i as usize, j as usize);
            let p = lattice.point(i, j);
            let d = p.distance(start);
            if d <= link && free[lattice.index(i, j)] {
                seeds.push((d, lattice.index(i, j)));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (_, k) in seeds {
        let (i, j) = lattice.coords(k);
        if world.segment_free(start, lattice.point(i, j), footprint) {
            parent[k] = FROM_START;
            queue.push_back(k);
        }
    }

    let mut expanded = 0u64;
    while let Some(k) = queue.pop_front() {
        expanded += 1;
        let (i, j) = lattice.coords(k);
        let p = lattice.point(i, j);
        if let Some(q) = try_goal(p) {
            let mut cells = vec![k];
            let mut cur = k;
            while parent[cur] != FROM_START {
                cur = parent[cur] as usize;
                cells.push(cur);
            }
            cells.reverse();
            let mut waypoints = vec![start];
            for (n, &c) in cells.iter().enumerate() {
                // Keep only the cells where the lattice direction changes.
                let keep = n == 0 || n + 1 == cells.len() || {
                    let (a, b, c) = (
                        lattice.coords(cells[n - 1]),
                        lattice.coords(c),
                        lattice.coords(cells[n + 1]),
                    );
                    (b.0 as i64 - a.0 as i64, b.1 as i64 - a.1 as i64)
                        != (c.0 as i64 - b.0 as i64, c.1 as i64 - b.1 as i64)
                };
                if keep {
                    let (ci, cj) = lattice.coords(c);
                    waypoints.push(lattice.point(ci, cj));
                }
            }
            waypoints.push(q);
            return GridSearch {
                waypoints: Some(waypoints),
                expanded,
            };
        }
        for (di, dj) in NEIGHBOURS {
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            if ni < 0 || nj < 0 || ni >= lattice.nx as i64 || nj >= lattice.ny as i64 {
                continue;
            }
            let nk = lattice.index(ni as usize, nj as usize);
            if free[nk] && parent[nk] == UNVISITED {
                parent[nk] = k as u32;
                queue.push_back(nk);
            }
        }
    }
    GridSearch {
        waypoints: None,
        expanded,
    }
}
