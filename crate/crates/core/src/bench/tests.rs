use super::*;

fn small() -> BenchConfig {
    BenchConfig {
        object_counts: vec![3, 5],
        repeats: 2,
        seed_base: 40,
        planner: MotionPlannerHandle::grid(),
        grasp_failure_probability: 0.0,
        wall_clock: false,
        ..BenchConfig::default()
    }
}

fn row(k: usize, depth: usize, solved: bool, tp: f64, attempts: u64, rearranged: u64) -> RunRow {
    RunRow {
        object_count: k,
        repeat: 0,
        seed: 0,
        target: 0,
        outcome: if solved { Outcome::Solved } else { Outcome::Exhausted },
        depth,
        depth_limit: 10,
        total_expansions: 4 * depth as u64,
        task_planning_work: 10 * depth as u64,
        task_planning_time: tp,
        motion_planning_time: 0.5,
        motion_planning_attempts: attempts,
        motion_executions: 1,
        objects_rearranged: rearranged,
        execution_time: 2.0,
        grasp_failures: 0,
        collision_checks: 0,
        planner_expansions: 0,
    }
}

#[test]
fn state_space_report_for_six_objects() {
    let r = StateSpaceReport::new(6).unwrap();
    assert_eq!((r.propositions, r.raw_states), (13, 8192));
    assert_eq!(r.reference_states(), 25);
    assert_eq!(r.template_states(), 48);
    assert_eq!(r.plan_length, Some(11));
    assert!(r.reachable_states.unwrap() <= 8192);
    let text = r.to_text();
    assert!(text.contains("raw-states: 8192\n"));
    assert!(text.contains("andor-reference: 5 nodes x 5 iterations = 25\n"));
    assert!(text.contains("andor-template: 8 nodes x 6 graphs = 48\n"));
}

#[test]
fn state_space_report_past_the_search_cap() {
    let r = StateSpaceReport::new(20).unwrap();
    assert_eq!(r.raw_states, 1 << 41);
    assert_eq!(r.plan_length, None);
    assert!(r.to_text().contains("ucs-expanded: skipped\n"));
    assert!(StateSpaceReport::new(0).is_err());
}

#[test]
fn limit_rules() {
    assert_eq!(LimitRule::PerObject(10).limit(4), 40);
    assert_eq!(LimitRule::Fixed(7).limit(64), 7);
}

#[test]
fn config_json() {
    let c = BenchConfig::default();
    assert_eq!(c.object_counts, [4, 8, 15, 20, 30, 42, 49, 64]);
    assert_eq!(c.repeats, 3);
    let text = serde_json::to_string(&c).unwrap();
    assert_eq!(BenchConfig::from_json(&text).unwrap(), c);
    let partial = BenchConfig::from_json(r#"{"object_counts": [4], "depth_limit": {"fixed": 12}}"#).unwrap();
    assert_eq!(partial.repeats, 3);
    assert_eq!(partial.depth_limit, LimitRule::Fixed(12));
    assert!(BenchConfig::from_json(r#"{"repeat": 2}"#).is_err());
    assert!(BenchConfig::from_json(r#"{"object_counts": [0]}"#).is_err());
    assert!(BenchConfig::from_json(r#"{"repeats": 0}"#).is_err());
    assert!(BenchConfig::from_json(r#"{"grasp_failure_probability": 2.0}"#).is_err());
}

#[test]
fn summary_means_match_hand_arithmetic() {
    let rows = vec![
        row(4, 1, true, 0.1, 2, 0),
        row(4, 3, true, 0.3, 6, 2),
        row(4, 5, false, 0.5, 10, 4),
        row(8, 2, true, 0.2, 4, 1),
    ];
    let s = summarize(&rows);
    assert_eq!(s.len(), 2);
    assert_eq!(s[0].object_count, 4);
    assert_eq!(s[0].runs, 3);
    assert!((s[0].success_rate - 2.0 / 3.0).abs() < 1e-12);
    assert!((s[0].mean_depth - 3.0).abs() < 1e-12);
    assert!((s[0].mean_task_planning_time - 0.3).abs() < 1e-12);
    assert!((s[0].mean_motion_planning_attempts - 6.0).abs() < 1e-12);
    assert!((s[0].mean_objects_rearranged - 2.0).abs() < 1e-12);
    assert!((s[0].mean_total_expansions - 12.0).abs() < 1e-12);
    assert_eq!((s[1].runs, s[1].success_rate, s[1].mean_depth), (1, 1.0, 2.0));

    let d = depth_series(&rows);
    assert_eq!(d.iter().map(|r| r.depth).collect::<Vec<_>>(), [1, 2, 3, 5]);
    assert!(d.iter().all(|r| r.runs == 1));
    assert!((d[3].mean_task_planning_work - 50.0).abs() < 1e-12);
}

#[test]
fn csv_header_is_frozen() {
    let text = runs_csv(&[row(4, 1, true, 0.25, 2, 0)]).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "object_count,repeat,seed,target,outcome,depth,depth_limit,total_expansions,\
         task_planning_work,task_planning_time,motion_planning_time,motion_planning_attempts,\
         motion_executions,objects_rearranged,execution_time,grasp_failures,collision_checks,\
         planner_expansions"
    );
    assert_eq!(text.lines().nth(1).unwrap(), "4,0,0,0,solved,1,10,4,10,0.25,0.5,2,1,0,2.0,0,0,0");
    let summary = summary_csv(&summarize(&[row(4, 1, true, 0.25, 2, 0)])).unwrap();
    assert_eq!(
        summary.lines().next().unwrap(),
        "object_count,runs,success_rate,mean_depth,mean_task_planning_time,\
         mean_motion_planning_time,mean_motion_planning_attempts,mean_objects_rearranged,\
         mean_motion_executions,mean_task_planning_work,mean_total_expansions"
    );
    let depth = depth_csv(&depth_series(&[row(4, 1, true, 0.25, 2, 0)])).unwrap();
    assert_eq!(
        depth.lines().next().unwrap(),
        "depth,runs,mean_task_planning_time,mean_task_planning_work,\
         mean_motion_planning_attempts,mean_execution_time"
    );
}

#[test]
fn deterministic_sweep_is_reproducible_and_round_trips() {
    let c = small();
    let a = run_bench(&c).unwrap();
    let b = run_bench(&c).unwrap();
    let rows_a: Vec<RunRow> = a.iter().map(|e| e.row.clone()).collect();
    let rows_b: Vec<RunRow> = b.iter().map(|e| e.row.clone()).collect();
    let text = runs_csv(&rows_a).unwrap();
    assert_eq!(text, runs_csv(&rows_b).unwrap());
    assert_eq!(read_runs_csv(&text).unwrap(), rows_a);
    assert_eq!(rows_a.len(), 4);
    assert_eq!(
        rows_a.iter().map(|r| (r.object_count, r.repeat, r.seed)).collect::<Vec<_>>(),
        [(3, 0, 3040), (3, 1, 3041), (5, 0, 5040), (5, 1, 5041)]
    );
    for e in &a {
        crate::network::replay(&e.trace, &e.scene).unwrap();
        assert!(e.row.total_expansions <= clutter::NODE_COUNT as u64 * e.row.depth as u64);
    }
}

#[test]
fn writes_three_files_next_to_each_other() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let rows = vec![row(4, 1, true, 0.1, 2, 0), row(8, 2, true, 0.2, 4, 1)];
    let paths = write_csvs(&out, &rows).unwrap();
    assert_eq!(paths[1], dir.path().join("sweep_summary.csv"));
    assert_eq!(paths[2], dir.path().join("sweep_depth.csv"));
    let summary = std::fs::read_to_string(&paths[1]).unwrap();
    assert_eq!(summary.lines().count(), 3);
}
