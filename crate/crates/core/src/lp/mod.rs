//! Relaxed correlation-clustering LP over the affinity graph.
//!
//! The objective is `min Σ p_e x_e + Σ m_e (1 − x_e)` with `x_e ∈ [0, 1]`
//! keyed by unordered vertex pair, so symmetry holds by construction. The
//! `3·C(V, 3)` triangle inequalities are never materialised up front: the
//! bounds-only problem is solved first, then the most violated triangles are
//! added in rounds until every triple holds within `eps_feas`.

mod dense;
mod extract;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;

pub use dense::DenseDualSimplex;
pub use extract::{
    extract_clusters, is_integral, lp_coalitions, lp_coalitions_on, LpCoalitions, DEFAULT_EPS_INT,
};

use crate::graph::{pair_count, pair_index, split_weight, AffinityGraph};

/// Default tolerance for bounds and triangle inequalities.
pub const DEFAULT_EPS_FEAS: f64 = 1e-7;

/// `x[plus[0]] + x[plus[1]] − x[minus] ≥ 0` over pair-indexed variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriangleCut {
    pub plus: [usize; 2],
    pub minus: usize,
}

impl TriangleCut {
    /// Amount by which `x` violates the cut (positive when violated).
    #[inline]
    pub fn violation(&self, x: &[f64]) -> f64 {
        x[self.minus] - x[self.plus[0]] - x[self.plus[1]]
    }
}

/// Outcome of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

/// A linear solver able to warm-start after cuts are appended.
///
/// Implementations minimise `costs · x` subject to `0 ≤ x ≤ 1` and every
/// triangle cut added so far.
pub trait LpBackend {
    /// Replaces any previous problem with the bounds-only one and solves it.
    fn load(&mut self, costs: &[f64]) -> SolverStatus;

    /// Appends rows and re-optimises.
    fn add_cuts(&mut self, cuts: &[TriangleCut]) -> SolverStatus;

    /// Current primal values, one per variable.
    fn values(&self) -> &[f64];
}

impl<B: LpBackend + ?Sized> LpBackend for &mut B {
    fn load(&mut self, costs: &[f64]) -> SolverStatus {
        (**self).load(costs)
    }

    fn add_cuts(&mut self, cuts: &[TriangleCut]) -> SolverStatus {
        (**self).add_cuts(cuts)
    }

    fn values(&self) -> &[f64] {
        (**self).values()
    }
}

/// The relaxed LP, one variable per vertex pair in [`pair_index`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    vertex_count: usize,
    task_count: usize,
    positive: Vec<f64>,
    negative: Vec<f64>,
}

impl LpProblem {
    pub fn from_graph(graph: &AffinityGraph) -> Self {
        let (positive, negative) = graph.weights().iter().map(|&w| split_weight(w)).unzip();
        LpProblem {
            vertex_count: graph.vertex_count(),
            task_count: graph.task_count(),
            positive,
            negative,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn task_count(&self) -> usize {
        self.task_count
    }

    pub fn variable_count(&self) -> usize {
        self.positive.len()
    }

    /// `p_e` per pair.
    pub fn positive(&self) -> &[f64] {
        &self.positive
    }

    /// `m_e` per pair.
    pub fn negative(&self) -> &[f64] {
        &self.negative
    }

    /// `Σ m_e`, the objective's constant term.
    pub fn constant(&self) -> f64 {
        self.negative.iter().sum()
    }

    /// Linear coefficients `p_e − m_e`.
    pub fn linear_costs(&self) -> Vec<f64> {
        self.positive
            .iter()
            .zip(&self.negative)
            .map(|(p, m)| p - m)
            .collect()
    }

    /// Number of triangle rows of the full formulation, `3·C(V, 3)`.
    pub fn potential_triangle_count(&self) -> usize {
        let v = self.vertex_count;
        if v < 3 {
            0
        } else {
            3 * (v * (v - 1) * (v - 2) / 6)
        }
    }

    /// Every triangle row of the full formulation, triple by triple.
    pub fn triangles(&self) -> impl Iterator<Item = TriangleCut> + '_ {
        let v = self.vertex_count;
        (0..v).flat_map(move |i| {
            (i + 1..v).flat_map(move |j| {
                (j + 1..v).flat_map(move |k| triple_cuts(v, i, j, k).into_iter())
            })
        })
    }

    /// `Σ p_e x_e + Σ m_e (1 − x_e)`, evaluated edge by edge.
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.positive
            .iter()
            .zip(&self.negative)
            .zip(x)
            .map(|((p, m), x)| p * x + m * (1.0 - x))
            .sum()
    }

    /// Largest violation of bounds or triangle inequalities, over all triples.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = x
            .iter()
            .map(|&v| (-v).max(v - 1.0))
            .fold(0.0_f64, f64::max);
        self.triangles()
            .map(|c| c.violation(x))
            .fold(bounds, f64::max)
    }

    /// Violated triangles (by more than `eps`), most violated first, ties in
    /// cut order.
    pub fn violated_triangles(&self, x: &[f64], eps: f64) -> Vec<(f64, TriangleCut)> {
        let mut out: Vec<(f64, TriangleCut)> = self
            .triangles()
            .filter_map(|c| {
                let v = c.violation(x);
                (v > eps).then_some((v, c))
            })
            .collect();
        out.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.1.cmp(&b.1))
        });
        out
    }
}

fn triple_cuts(v: usize, i: usize, j: usize, k: usize) -> [TriangleCut; 3] {
    let ij = pair_index(v, i, j).0;
    let jk = pair_index(v, j, k).0;
    let ik = pair_index(v, i, k).0;
    [
        TriangleCut {
            plus: [ij, jk],
            minus: ik,
        },
        TriangleCut {
            plus: [ij, ik],
            minus: jk,
        },
        TriangleCut {
            plus: [ik, jk],
            minus: ij,
        },
    ]
}

/// Assembles the relaxed LP for `graph`.
pub fn build_lp(graph: &AffinityGraph) -> LpProblem {
    LpProblem::from_graph(graph)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    pub eps_feas: f64,
    /// Cuts added per round; `None` means `10·V`.
    pub cuts_per_round: Option<usize>,
    pub max_rounds: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            eps_feas: DEFAULT_EPS_FEAS,
            cuts_per_round: None,
            max_rounds: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// Separation value per pair, in [`pair_index`] order.
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: SolverStatus,
    pub rounds: usize,
    pub cuts: usize,
}

impl LpSolution {
    pub fn value(&self, vertex_count: usize, i: usize, j: usize) -> f64 {
        self.x[pair_index(vertex_count, i, j).0]
    }
}

/// Cutting-plane solve of `problem` on `backend`.
pub fn solve_lp<B: LpBackend>(problem: &LpProblem, backend: &mut B, options: &LpOptions) -> LpSolution {
    let per_round = options
        .cuts_per_round
        .unwrap_or(10 * problem.vertex_count())
        .max(1);
    let mut status = backend.load(&problem.linear_costs());
    let mut added = BTreeSet::new();
    let mut rounds = 0;
    while status == SolverStatus::Optimal {
        let violated = problem.violated_triangles(backend.values(), options.eps_feas);
        if violated.is_empty() {
            break;
        }
        if rounds >= options.max_rounds {
            status = SolverStatus::IterationLimit;
            break;
        }
        let batch: Vec<TriangleCut> = violated
            .into_iter()
            .map(|(_, c)| c)
            .filter(|c| !added.contains(c))
            .take(per_round)
            .collect();
        if batch.is_empty() {
            // Only cuts already in the model are violated: numerical stall.
            status = SolverStatus::IterationLimit;
            break;
        }
        added.extend(batch.iter().copied());
        rounds += 1;
        status = backend.add_cuts(&batch);
    }
    let x = backend.values().to_vec();
    debug_assert_eq!(x.len(), pair_count(problem.vertex_count()));
    LpSolution {
        objective: problem.objective(&x),
        x,
        status,
        rounds,
        cuts: added.len(),
    }
}
