use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::andor::GraphStatus;
use crate::geometry::Vec2;
use crate::motion::MotionPlannerHandle;
use crate::oracle::{removal_oracle, target_reachable};
use crate::scenarios::{self, Corridor};
use crate::sim::{generate_scene, GenParams, WorkspaceConfig};

fn config(limit: usize) -> SolveConfig {
    SolveConfig {
        depth_limit: Some(limit),
        ..SolveConfig::deterministic()
    }
}

fn check_episode(scene: &WorkspaceConfig, ep: &Episode) {
    let log = &ep.log;
    assert_eq!(log.depth, ep.network.depth());
    assert!(log.depth <= log.depth_limit);
    assert_eq!(log.transitions.len(), log.depth - 1);
    assert_eq!(log.per_graph_expansions.len(), log.depth);
    assert!(log.per_graph_expansions.iter().all(|&e| e <= 4));
    match log.outcome {
        Outcome::Solved => {
            assert_eq!(ep.network.status(), NetworkStatus::Solved);
            assert_eq!(ep.network.current().status(), GraphStatus::Solved);
            for g in &ep.network.graphs()[..log.depth - 1] {
                assert_ne!(g.status(), GraphStatus::Solved);
            }
        }
        Outcome::Exhausted => {
            assert_eq!(ep.network.status(), NetworkStatus::Exhausted);
            assert_eq!(log.depth, log.depth_limit);
        }
    }
    let mut seen = log.rearranged.clone();
    seen.sort_unstable();
    seen.dedup();
    assert_eq!(seen.len(), log.rearranged.len(), "an object was stored twice");
    let report = replay(&ep.trace, scene).expect("trace replays");
    assert_eq!(report.target_retrieved, log.outcome == Outcome::Solved);
    let mut prev = scene.gripper.position;
    for a in &ep.trace.actions {
        assert_eq!(a.plan.start(), prev);
        prev = a.plan.end();
    }
}

#[test]
fn lone_target_is_retrieved_in_one_graph() {
    let scene = scenarios::lone_target(Vec2::new(0.5, 0.3), 0.03);
    let ep = solve(&scene, &config(5), 1).unwrap();
    assert_eq!(ep.log.outcome, Outcome::Solved);
    assert_eq!(ep.log.depth, 1);
    assert_eq!(ep.log.objects_rearranged, 0);
    assert_eq!(ep.log.per_graph_expansions, [4]);
    check_episode(&scene, &ep);
}

#[test]
fn corridor_blocker_is_stored_first() {
    let scene = scenarios::corridor(Corridor::default(), 0.03, 1);
    let cert = removal_oracle(&scene, &MotionPlannerHandle::grid(), 1).unwrap();
    assert_eq!(cert.min_removals(), Some(1));
    let ep = solve(&scene, &config(5), 1).unwrap();
    assert_eq!(ep.log.outcome, Outcome::Solved);
    assert_eq!(ep.log.depth, 2);
    assert_eq!(ep.log.rearranged, [1]);
    assert_eq!(ep.log.transitions, [TransitionReason::GraphFailedAfterRearrangement]);
    let t = &ep.network.transitions()[0];
    assert_eq!(t.delta.map(|d| d.object), Some(1));
    assert_eq!(ep.network.graphs()[0].status(), GraphStatus::Failed);
    check_episode(&scene, &ep);
}

#[test]
fn walled_target_exhausts_at_the_limit() {
    let scene = scenarios::walled(Corridor::default(), 0, 2);
    let ep = solve(&scene, &config(3), 1).unwrap();
    assert_eq!(ep.log.outcome, Outcome::Exhausted);
    assert_eq!(ep.log.depth, 3);
    assert_eq!(ep.log.objects_rearranged, 2);
    assert_eq!(
        ep.log.transitions,
        [
            TransitionReason::GraphFailedAfterRearrangement,
            TransitionReason::GraphFailedAfterRearrangement
        ]
    );
    check_episode(&scene, &ep);
}

#[test]
fn certain_grasp_failure_retries_without_moving_anything() {
    let scene = scenarios::lone_target(Vec2::new(0.5, 0.3), 0.03);
    let cfg = SolveConfig {
        grasp_failure_probability: 1.0,
        ..config(4)
    };
    let ep = solve(&scene, &cfg, 9).unwrap();
    assert_eq!(ep.log.outcome, Outcome::Exhausted);
    assert_eq!(ep.log.depth, 4);
    assert_eq!(ep.log.grasp_failures, 4);
    for t in ep.network.transitions() {
        assert_eq!(t.reason, TransitionReason::ExecutionFailureRetry);
        assert_eq!(t.delta, None);
    }
    check_episode(&scene, &ep);
}

#[test]
fn deterministic_config_reproduces_logs_and_traces() {
    let scene = scenarios::corridor(
        Corridor {
            height: 0.4,
            ..Corridor::default()
        },
        0.03,
        2,
    );
    let cfg = SolveConfig {
        grasp_failure_probability: 0.3,
        ..config(12)
    };
    let a = solve(&scene, &cfg, 5).unwrap();
    let b = solve(&scene, &cfg, 5).unwrap();
    assert_eq!(a.log, b.log);
    assert_eq!(a.trace.to_json(), b.trace.to_json());
    assert_eq!(a.log.task_planning_time, 0.0);
    assert_eq!(a.log.motion_planning_time, 0.0);
    check_episode(&scene, &a);
}

#[test]
fn trace_json_round_trips() {
    let scene = scenarios::corridor(Corridor::default(), 0.03, 1);
    let ep = solve(&scene, &config(5), 2).unwrap();
    let text = ep.trace.to_json();
    let back = ActionTrace::from_json(&text).unwrap();
    assert_eq!(back, ep.trace);
    assert!(ActionTrace::from_json(&text.replace(TRACE_FORMAT, "other/9")).is_err());
}

#[test]
fn replay_rejects_tampering() {
    let scene = scenarios::corridor(Corridor::default(), 0.03, 1);
    let ep = solve(&scene, &config(5), 2).unwrap();

    let mut moved = ep.trace.clone();
    let last = moved.actions[0].plan.waypoints.len() - 1;
    moved.actions[0].plan.waypoints[last].x += 0.01;
    assert!(matches!(replay(&moved, &scene), Err(ReplayError::Violation { index: 0 | 1, .. })));

    let mut shifted = ep.trace.clone();
    shifted.actions[1].plan.waypoints[0].y += 1e-6;
    assert!(matches!(replay(&shifted, &scene), Err(ReplayError::Violation { index: 1, .. })));

    let other = scenarios::corridor(Corridor { x: 0.3, ..Corridor::default() }, 0.03, 1);
    assert!(matches!(replay(&ep.trace, &other), Err(ReplayError::SceneMismatch { .. })));

    let mut lying = ep.trace.clone();
    lying.outcome = Outcome::Exhausted;
    assert!(replay(&lying, &scene).is_err());
}

#[test]
fn network_refuses_growth_after_solving_or_past_the_limit() {
    let scene = scenarios::lone_target(Vec2::new(0.5, 0.3), 0.03);
    let ep = solve(&scene, &config(5), 1).unwrap();
    let mut net = ep.network;
    assert_eq!(
        net.grow_next_graph(TransitionReason::NoFeasibleState, scene.snapshot()).err(),
        Some(NetworkError::AfterSolved)
    );

    let mut net = GraphNetwork::new(2, scene.snapshot()).unwrap();
    net.grow_next_graph(TransitionReason::NoFeasibleState, scene.snapshot())
        .unwrap();
    assert!(!net.can_grow());
    assert_eq!(
        net.grow_next_graph(TransitionReason::NoFeasibleState, scene.snapshot()).err(),
        Some(NetworkError::DepthLimit(2))
    );
    assert_eq!(GraphNetwork::new(0, scene.snapshot()).err(), Some(NetworkError::ZeroLimit));
}

#[test]
fn transitions_must_match_the_snapshot_change() {
    let scene = scenarios::corridor(Corridor::default(), 0.03, 1);
    let mut net = GraphNetwork::new(5, scene.snapshot()).unwrap();
    assert!(matches!(
        net.grow_next_graph(TransitionReason::GraphFailedAfterRearrangement, scene.snapshot()),
        Err(NetworkError::InconsistentDelta(..))
    ));
    let mut moved = scene.clone();
    moved.object_mut(1).unwrap().center.x += 0.05;
    assert!(matches!(
        net.grow_next_graph(TransitionReason::ExecutionFailureRetry, Arc::new(moved.clone())),
        Err(NetworkError::InconsistentDelta(..))
    ));
    let g = net
        .grow_next_graph(TransitionReason::GraphFailedAfterRearrangement, Arc::new(moved))
        .unwrap();
    assert_eq!(g.status(), GraphStatus::Active);
    assert_eq!(net.transitions()[0].delta.map(|d| d.object), Some(1));
}

#[test]
fn bad_configuration_is_rejected() {
    let scene = scenarios::lone_target(Vec2::new(0.5, 0.3), 0.03);
    let bad_p = SolveConfig {
        grasp_failure_probability: 1.5,
        ..config(3)
    };
    assert!(matches!(solve(&scene, &bad_p, 0), Err(SolveError::Config(_))));
    let zero = config(0);
    assert!(matches!(solve(&scene, &zero, 0), Err(SolveError::Network(NetworkError::ZeroLimit))));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn solved_episodes_are_sound(count in 1usize..=5, seed in 0u64..1000, pfail in 0.0f64..0.4) {
        let scene = generate_scene(count, seed, &GenParams::default()).unwrap();
        let cfg = SolveConfig { grasp_failure_probability: pfail, ..SolveConfig::deterministic() };
        let ep = solve(&scene, &cfg, seed).unwrap();
        check_episode(&scene, &ep);
        if ep.log.outcome == Outcome::Solved {
            let cleared = scene.without(&ep.log.rearranged);
            prop_assert!(target_reachable(&cleared, &MotionPlannerHandle::grid()).unwrap());
            let cert = removal_oracle(&scene, &MotionPlannerHandle::grid(), ep.log.rearranged.len()).unwrap();
            prop_assert!(cert.min_removals().is_some_and(|k| k <= ep.log.rearranged.len()));
        }
    }
}
