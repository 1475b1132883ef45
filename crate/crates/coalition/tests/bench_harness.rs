use coalition::bench::{pooled, run_experiment, summarize, ExperimentConfig, OValueMode};
use coalition::plot::{plot_data, PlotKind};

#[test]
fn all_partitions_row_count() {
    // N=10, M=2 has five profiles; ten runs each.
    let config = ExperimentConfig::new(vec![10], vec![2]);
    let rows = run_experiment(&config).unwrap();
    assert_eq!(rows.len(), 50);
    let profiles: Vec<&str> = rows.iter().step_by(10).map(|r| r.required.as_str()).collect();
    assert_eq!(profiles, ["9-1", "8-2", "7-3", "6-4", "5-5"]);
    assert!(rows.iter().all(|r| r.error.is_none() && r.value_final == r.max_value));
    assert_eq!(summarize(&rows).len(), 6);
}

#[test]
fn oracle_columns_follow_gate() {
    let mut config = ExperimentConfig::new(vec![12, 20], vec![4]);
    config.runs_per_setting = 1;
    config.o_value_mode = OValueMode::Sampled { count: 2 };
    config.oracle.bruteforce = false;
    let rows = run_experiment(&config).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r.ratio_vs_oracle.is_some(), r.n == 12, "{r:?}");
        assert!(r.bruteforce_runtime_s.is_none());
    }
    let ratio = plot_data(&rows, PlotKind::Ratio).unwrap();
    let lines: Vec<&str> = ratio.lines().collect();
    assert_eq!(lines[0], "N,M,mean_ratio,bound_ratio");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("12,4,"));
    let runtime = plot_data(&rows, PlotKind::Runtime).unwrap();
    assert_eq!(runtime.lines().count(), 3);
    assert_eq!(pooled(&rows).len(), 2);
}

#[test]
fn failed_runs_are_recorded() {
    let mut config = ExperimentConfig::new(vec![10], vec![2]);
    config.runs_per_setting = 1;
    config.grid.length = 3;
    config.grid.width = 3;
    let rows = run_experiment(&config).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.error.as_deref().is_some_and(|e| e.contains("cells"))));
    let s = &summarize(&rows)[0];
    assert_eq!(s.failures, 1);
    assert!(s.mean_runtime_s.is_none());
}
