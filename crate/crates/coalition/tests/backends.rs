use coalition::backend::{AnyBackend, BackendKind, MicrolpBackend, AUTO_DENSE_MAX_VERTICES};
use coalition_core::generate::generate_scenario;
use coalition_core::lp::{build_lp, solve_lp, DenseDualSimplex, LpOptions, SolverStatus};
use coalition_core::partitions::random_partition;
use coalition_core::{AffinityGraph, GridEnvironment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn dense_and_microlp_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let grid = GridEnvironment::square(60).unwrap();
    for k in 0..30 {
        let n = rng.gen_range(3..=14);
        let m = rng.gen_range(1..n.min(5));
        let required = random_partition(n, m, &mut rng).unwrap();
        let s = generate_scenario(n, m, &required, grid, k).unwrap();
        let problem = build_lp(&AffinityGraph::build(&s).unwrap());
        let opts = LpOptions::default();
        let a = solve_lp(&problem, &mut DenseDualSimplex::new(), &opts);
        let b = solve_lp(&problem, &mut MicrolpBackend::new(), &opts);
        assert_eq!(a.status, SolverStatus::Optimal);
        assert_eq!(b.status, SolverStatus::Optimal);
        let scale = a.objective.abs().max(1.0);
        assert!(
            (a.objective - b.objective).abs() <= 1e-6 * scale,
            "instance {k}: dense {} microlp {}",
            a.objective,
            b.objective
        );
        assert!(problem.max_violation(&a.x) <= 1e-7);
        assert!(problem.max_violation(&b.x) <= 1e-7);
    }
}

#[test]
fn auto_switches_on_size() {
    assert_eq!(AnyBackend::for_vertices(BackendKind::Auto, AUTO_DENSE_MAX_VERTICES).name(), "dense");
    assert_eq!(AnyBackend::for_vertices(BackendKind::Auto, AUTO_DENSE_MAX_VERTICES + 1).name(), "microlp");
    assert_eq!(AnyBackend::for_vertices(BackendKind::Dense, 500).name(), "dense");
    assert_eq!(AnyBackend::for_vertices(BackendKind::Microlp, 3).name(), "microlp");
}
