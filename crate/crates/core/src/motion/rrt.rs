//! Goal-biased RRT with greedy random shortcutting.

use std::time::{Duration, Instant};

use rand::Rng;

use super::RrtParams;
use crate::geometry::{Rect, Vec2};
use crate::sim::{CollisionWorld, Footprint, GoalRegion};

pub(crate) struct RrtSearch {
    pub waypoints: Option<Vec<Vec2>>,
    pub iterations: u64,
}

/// Uniform bucket grid for nearest-neighbour queries over the tree.
struct Buckets {
    origin: Vec2,
    cell: f64,
    nx: i64,
    ny: i64,
    cells: Vec<Vec<u32>>,
}

impl Buckets {
    fn new(bounds: Rect, cell: f64) -> Self {
        let nx = (bounds.width() / cell).ceil().max(1.0) as i64;
        let ny = (bounds.height() / cell).ceil().max(1.0) as i64;
        Self {
            origin: bounds.min,
            cell,
            nx,
            ny,
            cells: vec![Vec::new(); (nx * ny) as usize],
        }
    }

    fn key(&self, p: Vec2) -> (i64, i64) {
        let i = ((p.x - self.origin.x) / self.cell).floor() as i64;
        let j = ((p.y - self.origin.y) / self.cell).floor() as i64;
        (i.clamp(0, self.nx - 1), j.clamp(0, self.ny - 1))
    }

    fn insert(&mut self, p: Vec2, id: u32) {
        let (i, j) = self.key(p);
        self.cells[(j * self.nx + i) as usize].push(id);
    }

    fn nearest(&self, p: Vec2, nodes: &[Vec2]) -> u32 {
        let (ci, cj) = self.key(p);
        let mut best = (f64::INFINITY, u32::MAX);
        for ring in 0..self.nx.max(self.ny) {
            // Anything in ring `ring` or beyond is at least (ring - 1)·cell away.
            if best.1 != u32::MAX && ((ring - 1) as f64) * self.cell > best.0.sqrt() {
                break;
            }
            for j in (cj - ring)..=(cj + ring) {
                for i in (ci - ring)..=(ci + ring) {
                    let on_ring = (i - ci).abs() == ring || (j - cj).abs() == ring;
                    if !on_ring || i < 0 || j < 0 || i >= self.nx || j >= self.ny {
                        continue;
                    }
                    for &id in &self.cells[(j * self.nx + i) as usize] {
                        let d = (nodes[id as usize] - p).norm_squared();
                        if d < best.0 || (d == best.0 && id < best.1) {
                            best = (d, id);
                        }
                    }
                }
            }
        }
        best.1
    }
}

pub(crate) fn search<R: Rng + ?Sized>(
    world: &CollisionWorld,
    footprint: &Footprint,
    start: Vec2,
    goal: &GoalRegion,
    params: &RrtParams,
    max_iterations: u64,
    budget: Duration,
    rng: &mut R,
) -> RrtSearch {
    if goal.contains(start) {
        return RrtSearch {
            waypoints: Some(vec![start]),
            iterations: 0,
        };
    }
    let began = Instant::now();
    let bounds = world.bounds;
    let mut nodes = vec![start];
    let mut parents = vec![u32::MAX];
    let mut buckets = Buckets::new(bounds, (4.0 * params.step).max(1e-3));
    buckets.insert(start, 0);

    let mut iterations = 0u64;
    let mut reached = None;
    while iterations < max_iterations {
        if iterations.is_multiple_of(64) && began.elapsed() >= budget {
            break;
        }
        iterations += 1;
        let sample = if rng.gen::<f64>() < params.goal_bias {
            goal.sample(rng)
        } else {
            Vec2::new(
                rng.gen_range(bounds.min.x..=bounds.max.x),
                rng.gen_range(bounds.min.y..=bounds.max.y),
            )
        };
        let near_id = buckets.nearest(sample, &nodes);
        let near = nodes[near_id as usize];
        let delta = sample - near;
        let dist = delta.norm();
        if dist == 0.0 {
            continue;
        }
        let new = if dist <= params.step {
            sample
        } else {
            near + delta * (params.step / dist)
        };
        if !world.segment_free(near, new, footprint) {
            continue;
        }
        let new_id = nodes.len() as u32;
        nodes.push(new);
        parents.push(near_id);
        buckets.insert(new, new_id);
        if goal.contains(new) {
            reached = Some(new_id);
            break;
        }
        if goal.distance(new) <= params.step {
            let q = goal.project(new);
            if world.config_free(q, footprint) && world.segment_free(new, q, footprint) {
                nodes.push(q);
                parents.push(new_id);
                reached = Some(new_id + 1);
                break;
            }
        }
    }

    let waypoints = reached.map(|mut id| {
        let mut path = vec![nodes[id as usize]];
        while parents[id as usize] != u32::MAX {
            id = parents[id as usize];
            path.push(nodes[id as usize]);
        }
        path.reverse();
        shortcut(world, footprint, path, params.shortcut_attempts, rng)
    });
    RrtSearch {
        waypoints,
        iterations,
    }
}

/// Greedy random shortcutting: repeatedly pick two non-adjacent waypoints
/// and splice out everything between them when the straight segment is free.
fn shortcut<R: Rng + ?Sized>(
    world: &CollisionWorld,
    footprint: &Footprint,
    mut path: Vec<Vec2>,
    attempts: usize,
    rng: &mut R,
) -> Vec<Vec2> {
    for _ in 0..attempts {
        if path.len() < 3 {
            break;
        }
        let i = rng.gen_range(0..path.len() - 2);
        let j = rng.gen_range(i + 2..path.len());
        if world.segment_free(path[i], path[j], footprint) {
            path.drain(i + 1..j);
        }
    }
    path
}
