use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layout::{self, Layout};
use super::scene::{ObjectState, WorkspaceConfig};
use super::SceneError;
use crate::geometry::Vec2;

pub const DEFAULT_CLUTTER_DENSITY: f64 = 0.45;

/// Parameters of random clutter generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub layout: Layout,
    pub radius_min: f64,
    pub radius_max: f64,
    /// Minimum free gap between neighbouring objects. Zero allows contact;
    /// larger gaps thin out the clutter.
    pub min_gap: f64,
    /// Target fraction of the clutter region covered by objects. Objects are
    /// sampled in a band along the far edge of the table, as wide as the
    /// table and deep enough that the expected object area covers this
    /// fraction of it, capped at the whole table.
    pub clutter_density: f64,
    /// Rejection-sampling budget, per requested object.
    pub attempts_per_object: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            layout: Layout::default(),
            radius_min: layout::RADIUS_MIN,
            radius_max: layout::RADIUS_MAX,
            min_gap: 0.0,
            clutter_density: DEFAULT_CLUTTER_DENSITY,
            attempts_per_object: 2_000,
        }
    }
}

impl GenParams {
    /// Width and height of the clutter region for `count` objects.
    pub fn clutter_region(&self, count: usize) -> (f64, f64) {
        let (w, h) = (self.layout.table_width, self.layout.table_height);
        let (a, b) = (self.radius_min, self.radius_max);
        // E[r²] for r uniform on [a, b].
        let mean_sq = if b > a { (b.powi(3) - a.powi(3)) / (3.0 * (b - a)) } else { a * a };
        let area = count as f64 * std::f64::consts::PI * mean_sq / self.clutter_density;
        // Never shallower than the largest disc.
        (w, (area / w).max(2.0 * b).min(h))
    }
}

/// Rejection-samples `count` non-overlapping discs on the table and picks a
/// target uniformly at random. Deterministic in `(count, seed, params)`.
pub fn generate_scene(
    count: usize,
    seed: u64,
    params: &GenParams,
) -> Result<WorkspaceConfig, SceneError> {
    if count == 0 {
        return Err(SceneError::Invalid("at least one object is required".into()));
    }
    let (w, h) = (params.layout.table_width, params.layout.table_height);
    if !(params.radius_min > 0.0 && params.radius_min <= params.radius_max)
        || 2.0 * params.radius_max > w.min(h)
    {
        return Err(SceneError::Invalid("radius range does not fit the table".into()));
    }
    if !(params.clutter_density > 0.0 && params.clutter_density <= 1.0) {
        return Err(SceneError::Invalid("clutter density must lie in (0, 1]".into()));
    }
    let (rw, rh) = params.clutter_region(count);
    let x0 = (w - rw) / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = params.attempts_per_object.saturating_mul(count);
    let mut objects: Vec<ObjectState> = Vec::with_capacity(count);
    let mut attempts = 0;
    while objects.len() < count {
        if attempts == budget {
            return Err(SceneError::PackingFailed {
                placed: objects.len(),
                requested: count,
                attempts,
            });
        }
        attempts += 1;
        let r = rng.gen_range(params.radius_min..=params.radius_max);
        let c = Vec2::new(rng.gen_range(x0 + r..=x0 + rw - r), rng.gen_range(r..=rh - r));
        let clear = objects.iter().all(|o| {
            let min = o.radius + r + params.min_gap;
            (o.center - c).norm_squared() >= min * min
        });
        if clear {
            objects.push(ObjectState::new(objects.len() as u32, c, r));
        }
    }
    let target = rng.gen_range(0..count) as u32;
    let mut scene = params.layout.scene(objects, target);
    scene.seed = Some(seed);
    scene.validate()?;
    Ok(scene)
}
