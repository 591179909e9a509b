use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::Vec2;
use crate::scenarios::{self, Corridor};
use crate::sim::{grasp_region, Holding, ObjectState};

fn free_query(scene: WorkspaceConfig, from: Vec2, to: Vec2) -> MotionQuery {
    let scene = scene.snapshot();
    MotionQuery::new(
        Configuration::free(from, scene.gripper_radius()),
        GoalRegion::ball(to),
        scene,
    )
}

#[test]
fn grid_path_in_open_space_is_near_straight() {
    let (a, b) = (Vec2::new(0.1, 0.1), Vec2::new(0.9, 0.5));
    let q = free_query(WorkspaceConfig::on_default_layout(vec![], 0), a, b);
    let report = MotionPlannerHandle::grid().plan(&q, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let plan = report.plan.expect("open space is solvable");
    assert!(plan.length() <= std::f64::consts::SQRT_2 * a.distance(b) + 1e-9);
    assert!(q.goal.contains(plan.end()));
    assert!(path_validate(&plan, &q.scene, &MotionPlannerHandle::grid()));
}

#[test]
fn grid_is_deterministic() {
    let scene = scenarios::ring(Vec2::new(0.5, 0.3), 0.0);
    let q = free_query(scene, Vec2::new(0.5, 0.7), Vec2::new(0.1, 0.1));
    let h = MotionPlannerHandle::grid();
    let a = h.plan(&q, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let b = h.plan(&q, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    assert_eq!(a.plan.unwrap().waypoints, b.plan.unwrap().waypoints);
    assert_eq!(a.expansions, b.expansions);
}

#[test]
fn sealed_box_has_no_path_for_either_planner() {
    let scene = scenarios::walled(Corridor::default(), 0, 0);
    let target = scene.target().clone();
    let scene = scene.snapshot();
    let q = MotionQuery::new(
        Configuration::free(scene.entry, scene.gripper_radius()),
        grasp_region(&target, &scene),
        scene,
    );
    let grid = MotionPlannerHandle::grid().plan(&q, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(grid.plan.is_none());
    let mut rrt = MotionPlannerHandle::rrt();
    rrt.rrt.max_iterations = 3_000;
    let r = rrt.plan(&q, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(r.plan.is_none());
}

#[test]
fn corridor_blocker_hides_target_until_removed() {
    let scene = scenarios::corridor(Corridor::default(), 0.03, 1);
    let target = scene.target().clone();
    let grid = MotionPlannerHandle::grid();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let query = |s: &WorkspaceConfig| {
        let s = s.snapshot();
        MotionQuery::new(
            Configuration::free(s.entry, s.gripper_radius()),
            grasp_region(&target, &s),
            s,
        )
    };
    assert!(grid.plan(&query(&scene), &mut rng).unwrap().plan.is_none());
    let cleared = scene.without(&[1]);
    let plan = grid.plan(&query(&cleared), &mut rng).unwrap().plan;
    assert!(plan.is_some());
}

#[test]
fn rrt_solves_a_free_corridor_for_every_seed() {
    let scene = scenarios::corridor(Corridor::default(), 0.03, 0);
    let target = scene.target().clone();
    let scene = scene.snapshot();
    let q = MotionQuery::new(
        Configuration::free(scene.entry, scene.gripper_radius()),
        grasp_region(&target, &scene),
        scene.clone(),
    );
    let h = MotionPlannerHandle::rrt();
    for seed in 0..100 {
        let r = h.plan(&q, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let plan = r.plan.unwrap_or_else(|| panic!("seed {seed} failed"));
        assert!(q.goal.contains(plan.end()));
        assert!(path_validate(&plan, &scene, &h), "seed {seed} produced an invalid path");
    }
}

#[test]
fn carried_object_widens_the_footprint() {
    // A 0.09-wide slot admits the bare gripper but not a held 0.05 disc.
    let c = Corridor {
        half_width: 0.045,
        height: 0.3,
        x: 0.5,
    };
    let mut scene = scenarios::corridor(c, 0.02, 0);
    let held = ObjectState::new(7, Vec2::new(0.2, 0.52), 0.05);
    scene.objects.push(held);
    let scene = scene.snapshot();
    let grid = MotionPlannerHandle::grid();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let bottom = Vec2::new(0.5, 0.1);
    let empty = MotionQuery::new(
        Configuration::free(Vec2::new(0.2, 0.45), scene.gripper_radius()),
        GoalRegion::ball(bottom),
        scene.clone(),
    );
    assert!(grid.plan(&empty, &mut rng).unwrap().plan.is_some());
    let carrying = MotionQuery::new(
        Configuration {
            holding: Some(Holding {
                object: 7,
                offset: Vec2::new(0.0, 0.07),
            }),
            ..Configuration::free(Vec2::new(0.2, 0.45), scene.gripper_radius())
        },
        GoalRegion::ball(bottom),
        scene,
    );
    assert!(grid.plan(&carrying, &mut rng).unwrap().plan.is_none());
}

#[test]
fn start_in_collision_is_an_error() {
    let scene = Arc::new(scenarios::lone_target(Vec2::new(0.5, 0.3), 0.04));
    let q = MotionQuery::new(
        Configuration::free(Vec2::new(0.5, 0.3), scene.gripper_radius()),
        GoalRegion::ball(Vec2::new(0.1, 0.1)),
        scene,
    );
    let err = MotionPlannerHandle::grid().plan(&q, &mut ChaCha8Rng::seed_from_u64(0));
    assert_eq!(err.unwrap_err(), MotionError::StartInCollision);
}

#[test]
fn path_validate_rejects_a_plan_through_an_object() {
    let scene = scenarios::lone_target(Vec2::new(0.5, 0.3), 0.04);
    let plan = MotionPlan::new(
        &Configuration::free(Vec2::new(0.3, 0.3), scene.gripper_radius()),
        vec![Vec2::new(0.3, 0.3), Vec2::new(0.7, 0.3)],
    );
    assert!(!path_validate(&plan, &scene, &MotionPlannerHandle::grid()));
    let around = MotionPlan::new(
        &Configuration::free(Vec2::new(0.3, 0.3), scene.gripper_radius()),
        vec![Vec2::new(0.3, 0.3), Vec2::new(0.3, 0.5), Vec2::new(0.7, 0.5), Vec2::new(0.7, 0.3)],
    );
    assert!(path_validate(&around, &scene, &MotionPlannerHandle::grid()));
}

#[test]
fn bad_parameters_are_rejected() {
    let mut h = MotionPlannerHandle::rrt();
    h.rrt.goal_bias = 1.5;
    assert_eq!(h.validate(), Err(MotionError::BadParameters));
    assert_eq!(MotionPlannerHandle::grid().scaled(2.0).time_budget, 2.0);
}
