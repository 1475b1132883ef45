use alloc::format;
use alloc::vec::Vec;

use super::{build_lp, solve_lp, LpBackend, LpOptions, LpSolution, SolverStatus};
use crate::error::{Error, Result};
use crate::graph::{pair_index, AffinityGraph};
use crate::model::{max_value, structure_value, CoalitionStructure, Scenario};

/// Distance from 0 or 1 below which a separation variable counts as integral.
pub const DEFAULT_EPS_INT: f64 = 1e-6;

/// Whether every variable is within `eps_int` of 0 or 1.
pub fn is_integral(x: &[f64], eps_int: f64) -> bool {
    x.iter().all(|&v| v.abs() <= eps_int || (1.0 - v).abs() <= eps_int)
}

/// Reads a (partial) coalition structure off an LP solution.
///
/// A robot joins task `j` when its separation from `j` is at most `eps_int`
/// and from no other task. Robots with no near-zero task edge, whether
/// fractional or clustered only with other robots, are returned as
/// unassigned, in increasing id order.
pub fn extract_clusters(
    solution: &LpSolution,
    graph: &AffinityGraph,
    eps_int: f64,
) -> Result<(CoalitionStructure, Vec<usize>)> {
    let m = graph.task_count();
    let v = graph.vertex_count();
    let mut cs = CoalitionStructure::empty(m);
    let mut unassigned = Vec::new();
    for robot in 0..graph.robot_count() {
        let rv = m + robot;
        let mut attached: Option<usize> = None;
        for task in 0..m {
            if solution.x[pair_index(v, rv, task).0] <= eps_int {
                if let Some(first) = attached {
                    return Err(Error::SolverInconsistency {
                        robot,
                        first,
                        second: task,
                    });
                }
                attached = Some(task);
            }
        }
        match attached {
            Some(task) => {
                cs.coalitions[task].robot_ids.insert(robot);
            }
            None => unassigned.push(robot),
        }
    }
    Ok((cs, unassigned))
}

/// LP phase of the allocation pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct LpCoalitions {
    pub structure: CoalitionStructure,
    pub unassigned: Vec<usize>,
    pub solution: LpSolution,
    pub integral: bool,
    /// Integral and already at the maximum structure value; no repair needed.
    pub is_final: bool,
}

/// Builds the affinity graph, solves the relaxation and extracts clusters.
///
/// A solve that does not reach optimality leaves every robot unassigned so the
/// repair phase performs the whole allocation.
pub fn lp_coalitions<B: LpBackend>(
    scenario: &Scenario,
    backend: &mut B,
    options: &LpOptions,
) -> Result<LpCoalitions> {
    let graph = AffinityGraph::build(scenario)?;
    lp_coalitions_on(scenario, &graph, backend, options, DEFAULT_EPS_INT)
}

pub fn lp_coalitions_on<B: LpBackend>(
    scenario: &Scenario,
    graph: &AffinityGraph,
    backend: &mut B,
    options: &LpOptions,
    eps_int: f64,
) -> Result<LpCoalitions> {
    let problem = build_lp(graph);
    let solution = solve_lp(&problem, backend, options);
    if solution.status != SolverStatus::Optimal {
        return Ok(LpCoalitions {
            structure: CoalitionStructure::empty(scenario.task_count()),
            unassigned: (0..scenario.robot_count()).collect(),
            solution,
            integral: false,
            is_final: false,
        });
    }
    let (structure, unassigned) = extract_clusters(&solution, graph, eps_int)?;
    if structure.validate(scenario).is_err() {
        return Err(Error::Invariant(format!(
            "extracted structure is not disjoint: {structure:?}"
        )));
    }
    let integral = is_integral(&solution.x, eps_int);
    let is_final = integral && structure_value(&structure, scenario)? == max_value(scenario);
    Ok(LpCoalitions {
        structure,
        unassigned,
        solution,
        integral,
        is_final,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::pair_count;
    use crate::lp::DenseDualSimplex;
    use crate::model::{GridEnvironment, Position, Robot, Task};
    use alloc::vec;

    fn scenario(robots: &[(i64, i64)], tasks: &[(i64, i64, u32)]) -> Scenario {
        Scenario::new(
            GridEnvironment::square(100).unwrap(),
            robots
                .iter()
                .enumerate()
                .map(|(id, &(x, y))| Robot {
                    id,
                    position: Position::new(x, y),
                    orientation: 0.0,
                })
                .collect(),
            tasks
                .iter()
                .enumerate()
                .map(|(id, &(x, y, o))| Task {
                    id,
                    position: Position::new(x, y),
                    required_count: o,
                })
                .collect(),
        )
        .unwrap()
    }

    fn solution(x: Vec<f64>) -> LpSolution {
        LpSolution {
            x,
            objective: 0.0,
            status: SolverStatus::Optimal,
            rounds: 0,
            cuts: 0,
        }
    }

    #[test]
    fn integral_grouping() {
        // Vertices: t0, r0, r1.
        let s = scenario(&[(1, 1), (2, 2)], &[(3, 3, 2)]);
        let g = AffinityGraph::build(&s).unwrap();
        let (cs, un) = extract_clusters(&solution(vec![0.0; 3]), &g, DEFAULT_EPS_INT).unwrap();
        assert_eq!(cs.coalitions[0].robot_ids.iter().copied().collect::<Vec<_>>(), vec![0, 1]);
        assert!(un.is_empty());
    }

    #[test]
    fn fractional_robot_unassigned() {
        // Vertices: t0, t1, r0, r1, r2 (V = 5, 10 pairs).
        let s = scenario(&[(1, 1), (2, 2), (50, 50)], &[(3, 3, 2), (90, 90, 1)]);
        let g = AffinityGraph::build(&s).unwrap();
        let v = 5;
        let mut x = vec![1.0; pair_count(v)];
        let mut set = |i: usize, j: usize, val: f64| x[pair_index(v, i, j).0] = val;
        // r0, r1 with t0 integrally.
        set(0, 2, 0.0);
        set(0, 3, 0.0);
        set(2, 3, 0.0);
        // r2 halfway between both tasks.
        set(0, 4, 0.5);
        set(1, 4, 0.5);
        set(2, 4, 0.5);
        set(3, 4, 0.5);
        let sol = solution(x);
        let (cs, un) = extract_clusters(&sol, &g, DEFAULT_EPS_INT).unwrap();
        assert_eq!(cs.sizes(), vec![2, 0]);
        assert_eq!(un, vec![2]);
        assert!(!is_integral(&sol.x, DEFAULT_EPS_INT));

        // r2 fused with r0 but with no near-zero task edge stays unassigned.
        let mut x = sol.x.clone();
        x[pair_index(v, 2, 4).0] = 0.0;
        x[pair_index(v, 0, 4).0] = 1.0;
        x[pair_index(v, 1, 4).0] = 1.0;
        let (_, un) = extract_clusters(&solution(x), &g, DEFAULT_EPS_INT).unwrap();
        assert_eq!(un, vec![2]);
    }

    #[test]
    fn two_near_zero_tasks_is_inconsistent() {
        let s = scenario(&[(1, 1), (2, 2), (50, 50)], &[(3, 3, 2), (90, 90, 1)]);
        let g = AffinityGraph::build(&s).unwrap();
        let v = 5;
        let mut x = vec![1.0; pair_count(v)];
        x[pair_index(v, 0, 4).0] = 0.0;
        x[pair_index(v, 1, 4).0] = 1e-9;
        let err = extract_clusters(&solution(x), &g, DEFAULT_EPS_INT).unwrap_err();
        assert_eq!(
            err,
            Error::SolverInconsistency {
                robot: 2,
                first: 0,
                second: 1
            }
        );
    }

    #[test]
    fn two_robots_one_task_is_final() {
        let s = scenario(&[(1, 1), (2, 2)], &[(1, 2, 2)]);
        let out = lp_coalitions(&s, &mut DenseDualSimplex::new(), &LpOptions::default()).unwrap();
        assert!(out.is_final && out.integral);
        assert_eq!(out.structure.sizes(), vec![2]);
        assert_eq!(out.solution.x, vec![0.0; 3]);
        assert_eq!(out.solution.objective, 0.0);
    }

    #[test]
    fn matching_clusters_final_mismatched_flagged() {
        let robots = [(2, 3), (3, 2), (4, 4), (97, 98), (98, 97)];
        let matched = scenario(&robots, &[(3, 3, 3), (98, 98, 2)]);
        let out = lp_coalitions(&matched, &mut DenseDualSimplex::new(), &LpOptions::default()).unwrap();
        assert!(out.is_final, "{out:?}");
        assert_eq!(out.structure.sizes(), vec![3, 2]);

        let mismatched = scenario(&robots, &[(3, 3, 1), (98, 98, 4)]);
        let out = lp_coalitions(&mismatched, &mut DenseDualSimplex::new(), &LpOptions::default()).unwrap();
        assert!(!out.is_final);
        assert_eq!(out.structure.sizes(), vec![3, 2]);
    }

    #[test]
    fn failed_solve_leaves_everyone_unassigned() {
        let robots = [(2, 3), (3, 2), (50, 50), (97, 98), (98, 97)];
        let s = scenario(&robots, &[(3, 3, 3), (98, 98, 2)]);
        let mut lp = DenseDualSimplex::new().with_max_iterations(0);
        let out = lp_coalitions(&s, &mut lp, &LpOptions::default()).unwrap();
        assert_eq!(out.solution.status, SolverStatus::IterationLimit);
        assert_eq!(out.unassigned, vec![0, 1, 2, 3, 4]);
        assert_eq!(out.structure.assigned_count(), 0);
        assert!(!out.is_final);
    }
}
