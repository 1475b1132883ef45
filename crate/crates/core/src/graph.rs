//! Complete affinity graph over tasks and robots.

use alloc::vec::Vec;

use crate::error::Result;
use crate::model::{similarity_weight, CoalitionStructure, Scenario, Vertex};

/// Index of an unordered vertex pair. Pairs are numbered row-major over
/// `i < j`, with tasks occupying the first vertex slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairIndex(pub usize);

/// Number of unordered pairs among `n` items.
pub const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Maps `(i, j)`, `i != j`, to its slot among `pair_count(vertex_count)` pairs.
#[inline]
pub fn pair_index(vertex_count: usize, i: usize, j: usize) -> PairIndex {
    debug_assert!(i != j && i < vertex_count && j < vertex_count);
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    PairIndex(a * (2 * vertex_count - a - 1) / 2 + (b - a - 1))
}

/// Weighted complete graph with vertices `tasks ++ robots`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    task_count: usize,
    robot_count: usize,
    weights: Vec<f64>,
}

impl AffinityGraph {
    pub fn build(scenario: &Scenario) -> Result<Self> {
        let task_count = scenario.task_count();
        let robot_count = scenario.robot_count();
        let v = task_count + robot_count;
        let mut weights = Vec::with_capacity(pair_count(v));
        for i in 0..v {
            for j in i + 1..v {
                weights.push(similarity_weight(
                    vertex_of(task_count, i),
                    vertex_of(task_count, j),
                    scenario,
                )?);
            }
        }
        Ok(AffinityGraph {
            task_count,
            robot_count,
            weights,
        })
    }

    pub fn task_count(&self) -> usize {
        self.task_count
    }

    pub fn robot_count(&self) -> usize {
        self.robot_count
    }

    pub fn vertex_count(&self) -> usize {
        self.task_count + self.robot_count
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        vertex_of(self.task_count, index)
    }

    pub fn index_of(&self, v: Vertex) -> usize {
        match v {
            Vertex::Task(j) => j,
            Vertex::Robot(r) => self.task_count + r,
        }
    }

    pub fn pair(&self, i: usize, j: usize) -> PairIndex {
        pair_index(self.vertex_count(), i, j)
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[self.pair(i, j).0]
    }

    /// Weights in pair order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterates `(i, j, w)` for `i < j` in pair order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let v = self.vertex_count();
        (0..v)
            .flat_map(move |i| (i + 1..v).map(move |j| (i, j)))
            .zip(self.weights.iter().copied())
            .map(|((i, j), w)| (i, j, w))
    }

    pub fn is_task_pair(&self, i: usize, j: usize) -> bool {
        i < self.task_count && j < self.task_count
    }

    /// Sum of positive weights, task–task edges excluded. Every complete
    /// structure satisfies `cohesion_quality + penalty` equal to this.
    pub fn positive_total(&self) -> f64 {
        self.edges()
            .filter(|&(i, j, w)| !self.is_task_pair(i, j) && w > 0.0)
            .map(|(_, _, w)| w)
            .sum()
    }

    /// Cluster label of every vertex: task `j` and its robots get `j`,
    /// unassigned robots get a singleton label of their own.
    pub fn cluster_labels(&self, cs: &CoalitionStructure) -> Vec<usize> {
        let v = self.vertex_count();
        let mut labels: Vec<usize> = (0..v).collect();
        for c in &cs.coalitions {
            for &r in &c.robot_ids {
                labels[self.task_count + r] = c.task_id;
            }
        }
        labels
    }

    /// Penalty of `cs` over robot–robot and robot–task edges: positive
    /// weights cut between coalitions plus absolute negative weights kept
    /// inside one. Unassigned robots count as singleton clusters.
    pub fn penalty(&self, cs: &CoalitionStructure) -> f64 {
        let labels = self.cluster_labels(cs);
        self.edges()
            .filter(|&(i, j, _)| !self.is_task_pair(i, j))
            .map(|(i, j, w)| {
                let separated = labels[i] != labels[j];
                let (p, m) = split_weight(w);
                if separated {
                    p
                } else {
                    m
                }
            })
            .sum()
    }

    /// Sum of weights over edges inside a coalition.
    pub fn cohesion_quality(&self, cs: &CoalitionStructure) -> f64 {
        let labels = self.cluster_labels(cs);
        self.edges()
            .filter(|&(i, j, _)| labels[i] == labels[j] && !self.is_task_pair(i, j))
            .map(|(_, _, w)| w)
            .sum()
    }
}

fn vertex_of(task_count: usize, index: usize) -> Vertex {
    if index < task_count {
        Vertex::Task(index)
    } else {
        Vertex::Robot(index - task_count)
    }
}

/// `(p_e, m_e)`: the positive and negated negative part of a weight.
#[inline]
pub fn split_weight(w: f64) -> (f64, f64) {
    if w > 0.0 {
        (w, 0.0)
    } else if w < 0.0 {
        (0.0, -w)
    } else {
        (0.0, 0.0)
    }
}

/// Convenience wrapper over [`AffinityGraph::penalty`].
pub fn penalty(cs: &CoalitionStructure, graph: &AffinityGraph) -> f64 {
    graph.penalty(cs)
}
