//! Timed pipeline runs and the metrics reported for them.

use std::time::Instant;

use coalition_core::graph::AffinityGraph;
use coalition_core::lp::{lp_coalitions_on, LpOptions, SolverStatus, DEFAULT_EPS_INT};
use coalition_core::model::{cost_dist, max_value, structure_value};
use coalition_core::oracle::{brute_force_allocation, optimal_allocation};
use coalition_core::repair::finish;
use coalition_core::{Allocation, CoalitionStructure, Scenario};
use serde::{Deserialize, Serialize};

use crate::backend::{AnyBackend, BackendKind};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub backend: BackendKind,
    pub lp: LpOptions,
    /// Run the size-feasible oracle under this enumeration cap.
    pub oracle_cap: Option<u64>,
    /// Also time the labelled-partition brute force (same cap).
    pub bruteforce: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            backend: BackendKind::Auto,
            lp: LpOptions::default(),
            oracle_cap: None,
            bruteforce: false,
        }
    }
}

/// Measurements for one pipeline run. Fields ending in `_s` are wall-clock
/// seconds; everything else is a deterministic function of the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub robots: usize,
    pub tasks: usize,
    pub required: Vec<u32>,
    pub backend: String,
    pub lp_status: String,
    pub lp_rounds: usize,
    pub lp_cuts: usize,
    pub lp_objective: f64,
    pub lp_integral: bool,
    pub lp_final: bool,
    pub lp_unassigned: usize,
    pub released: usize,
    pub repaired: bool,
    pub value_lp: i64,
    pub value_final: i64,
    pub max_value: i64,
    /// `100 · (value_final − value_lp) / max_value`.
    pub value_gain_pct: f64,
    /// Meters.
    pub total_distance: f64,
    /// Mean normalized robot-to-task cost.
    pub normalized_avg_cost: f64,
    /// Oracle distance over pipeline distance; at most 1.
    pub ratio_vs_oracle: Option<f64>,
    pub oracle_distance: Option<f64>,
    /// `1 / (max required + 1)`.
    pub bound_ratio: f64,
    pub runtime_lp_s: f64,
    pub runtime_repair_s: f64,
    pub runtime_total_s: f64,
    pub oracle_runtime_s: Option<f64>,
    pub bruteforce_runtime_s: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Solved {
    pub allocation: Allocation,
    pub metrics: RunMetrics,
}

pub fn status_name(status: SolverStatus) -> &'static str {
    match status {
        SolverStatus::Optimal => "optimal",
        SolverStatus::Infeasible => "infeasible",
        SolverStatus::IterationLimit => "iteration_limit",
    }
}

pub fn bound_ratio(required: &[u32]) -> f64 {
    1.0 / (f64::from(required.iter().copied().max().unwrap_or(0)) + 1.0)
}

pub fn normalized_avg_cost(cs: &CoalitionStructure, scenario: &Scenario) -> f64 {
    let env = scenario.environment();
    let total: f64 = cs
        .coalitions
        .iter()
        .flat_map(|c| {
            let task = scenario.tasks()[c.task_id].position;
            c.robot_ids
                .iter()
                .map(move |&r| cost_dist(scenario.robots()[r].position, task, env))
        })
        .sum();
    total / scenario.robot_count() as f64
}

/// Runs the pipeline with phase timing and, if requested, the oracles.
pub fn solve(scenario: &Scenario, options: &SolveOptions) -> Result<Solved> {
    let start = Instant::now();
    let graph = AffinityGraph::build(scenario)?;
    let mut backend = AnyBackend::for_vertices(options.backend, graph.vertex_count());
    let lp = lp_coalitions_on(scenario, &graph, &mut backend, &options.lp, DEFAULT_EPS_INT)?;
    let lp_done = Instant::now();
    let value_lp = structure_value(&lp.structure, scenario)?;
    let allocation = finish(scenario, lp)?;
    let end = Instant::now();

    let cs = &allocation.structure;
    let required = scenario.required_counts();
    let max = max_value(scenario);
    let value_final = structure_value(cs, scenario)?;
    let total_distance = cs.total_distance(scenario);

    let (mut oracle_distance, mut oracle_runtime_s, mut bruteforce_runtime_s) = (None, None, None);
    if let Some(cap) = options.oracle_cap {
        let t = Instant::now();
        let (_, d) = optimal_allocation(scenario, cap)?;
        oracle_runtime_s = Some(t.elapsed().as_secs_f64());
        oracle_distance = Some(d);
        if options.bruteforce {
            let t = Instant::now();
            brute_force_allocation(scenario, cap)?;
            bruteforce_runtime_s = Some(t.elapsed().as_secs_f64());
        }
    }

    let lp = &allocation.lp;
    let metrics = RunMetrics {
        robots: scenario.robot_count(),
        tasks: scenario.task_count(),
        backend: backend.name().into(),
        lp_status: status_name(lp.solution.status).into(),
        lp_rounds: lp.solution.rounds,
        lp_cuts: lp.solution.cuts,
        lp_objective: lp.solution.objective,
        lp_integral: lp.integral,
        lp_final: lp.is_final,
        lp_unassigned: lp.unassigned.len(),
        released: allocation.released,
        repaired: allocation.repaired,
        value_lp,
        value_final,
        max_value: max,
        value_gain_pct: 100.0 * (value_final - value_lp) as f64 / max as f64,
        total_distance,
        normalized_avg_cost: normalized_avg_cost(cs, scenario),
        ratio_vs_oracle: oracle_distance.map(|d| d / total_distance),
        oracle_distance,
        bound_ratio: bound_ratio(&required),
        required,
        runtime_lp_s: (lp_done - start).as_secs_f64(),
        runtime_repair_s: (end - lp_done).as_secs_f64(),
        runtime_total_s: (end - start).as_secs_f64(),
        oracle_runtime_s,
        bruteforce_runtime_s,
    };
    Ok(Solved {
        allocation,
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use coalition_core::generate::generate_scenario;
    use coalition_core::oracle::DEFAULT_ORACLE_CAP;
    use coalition_core::GridEnvironment;

    #[test]
    fn metrics_are_consistent() {
        let s = generate_scenario(8, 3, &[4, 3, 1], GridEnvironment::square(50).unwrap(), 11).unwrap();
        let opts = SolveOptions {
            oracle_cap: Some(DEFAULT_ORACLE_CAP),
            bruteforce: true,
            ..SolveOptions::default()
        };
        let m = solve(&s, &opts).unwrap().metrics;
        assert_eq!(m.value_final, m.max_value);
        assert_eq!(m.max_value, 16 + 9 + 1);
        assert_eq!(m.backend, "dense");
        assert_eq!(m.bound_ratio, 0.2);
        let r = m.ratio_vs_oracle.unwrap();
        assert!(r > 0.0 && r <= 1.0 + 1e-12);
        assert!(m.bruteforce_runtime_s.is_some());
        assert!(m.normalized_avg_cost > 0.0 && m.normalized_avg_cost < 1.0);
        assert!(m.runtime_total_s >= m.runtime_lp_s);
    }

    #[test]
    fn no_oracle_by_default() {
        let s = generate_scenario(5, 2, &[3, 2], GridEnvironment::square(20).unwrap(), 1).unwrap();
        let m = solve(&s, &SolveOptions::default()).unwrap().metrics;
        assert!(m.oracle_distance.is_none() && m.ratio_vs_oracle.is_none());
    }
}
