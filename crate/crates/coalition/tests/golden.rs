//! Pinned small instance. Reference values were computed independently by
//! exhaustive enumeration in double precision.

use coalition::io::{parse_scenario, scenario_to_string};
use coalition::metrics::{solve, SolveOptions};
use coalition_core::generate::generate_scenario;
use coalition_core::oracle::{optimal_allocation, DEFAULT_ORACLE_CAP};
use coalition_core::GridEnvironment;

const FIXTURE: &str = include_str!("fixtures/scenario_n6_m2_seed7.json");

#[test]
fn generator_reproduces_fixture() {
    let s = generate_scenario(6, 2, &[4, 2], GridEnvironment::square(100).unwrap(), 7).unwrap();
    assert_eq!(scenario_to_string(&s), FIXTURE);
}

#[test]
fn fixture_solution() {
    let s = parse_scenario(FIXTURE).unwrap();
    let solved = solve(&s, &SolveOptions::default()).unwrap();
    let sizes = solved.allocation.structure.sizes();
    assert_eq!(sizes, vec![4, 2]);
    let ids: Vec<Vec<usize>> = solved
        .allocation
        .structure
        .coalitions
        .iter()
        .map(|c| c.robot_ids.iter().copied().collect())
        .collect();
    assert_eq!(ids, vec![vec![0, 1, 2, 5], vec![3, 4]]);
    let m = &solved.metrics;
    assert!((m.total_distance - 256.56286332179417).abs() < 1e-9);
    // Minimum penalty over all 64 complete structures.
    assert!((m.lp_objective - 4.613660060319833).abs() < 1e-9);
    let (_, best) = optimal_allocation(&s, DEFAULT_ORACLE_CAP).unwrap();
    assert!((best - 249.46105032346233).abs() < 1e-9);
}
