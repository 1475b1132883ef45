//! LP backends available to the pipeline.

use coalition_core::lp::{DenseDualSimplex, LpBackend, SolverStatus, TriangleCut};
use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};

/// Sparse simplex from `microlp`.
///
/// `microlp` re-factorizes the whole constraint matrix for every row added
/// to a solved problem, so appending a round of cuts one by one costs more
/// than rebuilding. Each round instead rebuilds the problem with every cut so
/// far and solves it from scratch.
#[derive(Debug, Default)]
pub struct MicrolpBackend {
    costs: Vec<f64>,
    cuts: Vec<TriangleCut>,
    values: Vec<f64>,
}

impl MicrolpBackend {
    pub fn new() -> Self {
        Self::default()
    }

    fn solve(&mut self) -> SolverStatus {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<Variable> = self.costs.iter().map(|&c| problem.add_var(c, (0.0, 1.0))).collect();
        for cut in &self.cuts {
            problem.add_constraint(
                [
                    (vars[cut.plus[0]], 1.0),
                    (vars[cut.plus[1]], 1.0),
                    (vars[cut.minus], -1.0),
                ],
                ComparisonOp::Ge,
                0.0,
            );
        }
        match problem.solve().map(|o| o.into_solution()) {
            Ok(Ok(sol)) => {
                self.values.clear();
                self.values.extend(vars.iter().map(|&v| sol.var_value_raw(v)));
                SolverStatus::Optimal
            }
            Ok(Err(_)) => SolverStatus::IterationLimit,
            Err(microlp::Error::Infeasible) => SolverStatus::Infeasible,
            Err(_) => SolverStatus::IterationLimit,
        }
    }
}

impl LpBackend for MicrolpBackend {
    fn load(&mut self, costs: &[f64]) -> SolverStatus {
        self.costs = costs.to_vec();
        self.cuts.clear();
        self.solve()
    }

    fn add_cuts(&mut self, cuts: &[TriangleCut]) -> SolverStatus {
        self.cuts.extend_from_slice(cuts);
        self.solve()
    }

    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Which backend solves the relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    /// Dense tableau for small graphs, sparse solver above `AUTO_DENSE_MAX_VERTICES`.
    #[default]
    Auto,
    Dense,
    Microlp,
}

/// Largest vertex count `Auto` hands to the dense backend.
pub const AUTO_DENSE_MAX_VERTICES: usize = 16;

/// A backend chosen at run time.
pub enum AnyBackend {
    Dense(DenseDualSimplex),
    Microlp(MicrolpBackend),
}

impl AnyBackend {
    pub fn name(&self) -> &'static str {
        match self {
            AnyBackend::Dense(_) => "dense",
            AnyBackend::Microlp(_) => "microlp",
        }
    }

    pub fn for_vertices(kind: BackendKind, vertex_count: usize) -> Self {
        match kind {
            BackendKind::Dense => AnyBackend::Dense(DenseDualSimplex::new()),
            BackendKind::Microlp => AnyBackend::Microlp(MicrolpBackend::new()),
            BackendKind::Auto if vertex_count <= AUTO_DENSE_MAX_VERTICES => {
                AnyBackend::Dense(DenseDualSimplex::new())
            }
            BackendKind::Auto => AnyBackend::Microlp(MicrolpBackend::new()),
        }
    }
}

impl LpBackend for AnyBackend {
    fn load(&mut self, costs: &[f64]) -> SolverStatus {
        match self {
            AnyBackend::Dense(b) => b.load(costs),
            AnyBackend::Microlp(b) => b.load(costs),
        }
    }

    fn add_cuts(&mut self, cuts: &[TriangleCut]) -> SolverStatus {
        match self {
            AnyBackend::Dense(b) => b.add_cuts(cuts),
            AnyBackend::Microlp(b) => b.add_cuts(cuts),
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            AnyBackend::Dense(b) => b.values(),
            AnyBackend::Microlp(b) => b.values(),
        }
    }
}
