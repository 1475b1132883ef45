use alloc::vec;
use alloc::vec::Vec;

use super::{LpBackend, SolverStatus, TriangleCut};

const PRIMAL_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-9;

/// Dense-tableau bounded dual simplex.
///
/// Structural variables live in `[0, 1]`; each cut row carries a slack in
/// `[0, ∞)`. The bounds-only start (every variable at the bound its cost
/// favours) is dual feasible, and appending a cut keeps it so, which makes
/// dual simplex the natural warm start after every separation round. The
/// tableau is `rows × (structurals + rows)`, so this backend is meant for
/// instances up to a few hundred cuts.
#[derive(Debug, Clone)]
pub struct DenseDualSimplex {
    structurals: usize,
    /// Reduced cost per column.
    reduced: Vec<f64>,
    /// Value per column (structurals then slacks).
    values: Vec<f64>,
    at_upper: Vec<bool>,
    /// Row of every basic column.
    basic_row: Vec<Option<usize>>,
    basis: Vec<usize>,
    tableau: Vec<Vec<f64>>,
    max_iterations: usize,
    iterations: usize,
}

impl Default for DenseDualSimplex {
    fn default() -> Self {
        Self::new()
    }
}

impl DenseDualSimplex {
    pub fn new() -> Self {
        DenseDualSimplex {
            structurals: 0,
            reduced: Vec::new(),
            values: Vec::new(),
            at_upper: Vec::new(),
            basic_row: Vec::new(),
            basis: Vec::new(),
            tableau: Vec::new(),
            max_iterations: 1_000_000,
            iterations: 0,
        }
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    /// Pivots performed since the last `load`.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    fn upper(&self, col: usize) -> f64 {
        if col < self.structurals {
            1.0
        } else {
            f64::INFINITY
        }
    }

    fn push_row(&mut self, cut: &TriangleCut) {
        let width = self.values.len() + 1;
        for row in &mut self.tableau {
            row.push(0.0);
        }
        let mut row = vec![0.0; width];
        row[cut.plus[0]] -= 1.0;
        row[cut.plus[1]] -= 1.0;
        row[cut.minus] += 1.0;
        row[width - 1] = 1.0;
        for col in [cut.plus[0], cut.plus[1], cut.minus] {
            let coef = row[col];
            if coef == 0.0 {
                continue;
            }
            if let Some(r) = self.basic_row[col] {
                for (dst, src) in row.iter_mut().zip(&self.tableau[r]) {
                    *dst -= coef * src;
                }
                row[col] = 0.0;
            }
        }
        let slack = self.values[cut.plus[0]] + self.values[cut.plus[1]] - self.values[cut.minus];
        self.values.push(slack);
        self.reduced.push(0.0);
        self.at_upper.push(false);
        self.basic_row.push(Some(self.tableau.len()));
        self.basis.push(width - 1);
        self.tableau.push(row);
    }

    /// Most infeasible basic row, its target bound and whether it sits below it.
    fn leaving_row(&self) -> Option<(usize, f64, bool)> {
        let mut best: Option<(usize, f64, f64, bool)> = None;
        for (r, &col) in self.basis.iter().enumerate() {
            let x = self.values[col];
            let (infeasibility, target, below) = if x < -PRIMAL_TOL {
                (-x, 0.0, true)
            } else if x > self.upper(col) + PRIMAL_TOL {
                (x - self.upper(col), self.upper(col), false)
            } else {
                continue;
            };
            if best.is_none_or(|(_, b, _, _)| infeasibility > b) {
                best = Some((r, infeasibility, target, below));
            }
        }
        best.map(|(r, _, target, below)| (r, target, below))
    }

    fn entering_col(&self, r: usize, below: bool) -> Option<usize> {
        let row = &self.tableau[r];
        let mut best: Option<(usize, f64, f64)> = None;
        for (col, &alpha) in row.iter().enumerate() {
            if self.basic_row[col].is_some() || alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let upper = self.at_upper[col];
            // Leaving below its lower bound needs a nonbasic move that raises
            // the basic value: increase with alpha < 0 or decrease with alpha > 0.
            let eligible = if below {
                (!upper && alpha < 0.0) || (upper && alpha > 0.0)
            } else {
                (!upper && alpha > 0.0) || (upper && alpha < 0.0)
            };
            if !eligible {
                continue;
            }
            let ratio = (self.reduced[col] / alpha).abs();
            let better = match best {
                None => true,
                Some((_, r0, a0)) => ratio < r0 - 1e-12 || (ratio <= r0 + 1e-12 && alpha.abs() > a0),
            };
            if better {
                best = Some((col, ratio, alpha.abs()));
            }
        }
        best.map(|(col, _, _)| col)
    }

    fn pivot(&mut self, r: usize, q: usize, target: f64) {
        let leaving = self.basis[r];
        let alpha = self.tableau[r][q];
        let theta = self.reduced[q] / alpha;
        for (d, t) in self.reduced.iter_mut().zip(&self.tableau[r]) {
            *d -= theta * t;
        }
        self.reduced[q] = 0.0;

        let step = (self.values[leaving] - target) / alpha;
        for (i, &col) in self.basis.iter().enumerate() {
            self.values[col] -= self.tableau[i][q] * step;
        }
        self.values[q] += step;
        self.values[leaving] = target;
        self.at_upper[leaving] = target > 0.0;
        self.at_upper[q] = false;

        let inv = 1.0 / alpha;
        for v in &mut self.tableau[r] {
            *v *= inv;
        }
        let pivot_row = core::mem::take(&mut self.tableau[r]);
        for (i, row) in self.tableau.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f == 0.0 {
                continue;
            }
            for (dst, src) in row.iter_mut().zip(&pivot_row) {
                *dst -= f * src;
            }
            row[q] = 0.0;
        }
        self.tableau[r] = pivot_row;
        self.basic_row[leaving] = None;
        self.basic_row[q] = Some(r);
        self.basis[r] = q;
    }

    fn optimize(&mut self) -> SolverStatus {
        loop {
            let Some((r, target, below)) = self.leaving_row() else {
                return SolverStatus::Optimal;
            };
            if self.iterations >= self.max_iterations {
                return SolverStatus::IterationLimit;
            }
            let Some(q) = self.entering_col(r, below) else {
                return SolverStatus::Infeasible;
            };
            self.pivot(r, q, target);
            self.iterations += 1;
        }
    }
}

impl LpBackend for DenseDualSimplex {
    fn load(&mut self, costs: &[f64]) -> SolverStatus {
        self.structurals = costs.len();
        self.reduced = costs.to_vec();
        self.at_upper = costs.iter().map(|&c| c < 0.0).collect();
        self.values = self.at_upper.iter().map(|&u| if u { 1.0 } else { 0.0 }).collect();
        self.basic_row = vec![None; costs.len()];
        self.basis.clear();
        self.tableau.clear();
        self.iterations = 0;
        SolverStatus::Optimal
    }

    fn add_cuts(&mut self, cuts: &[TriangleCut]) -> SolverStatus {
        for cut in cuts {
            self.push_row(cut);
        }
        self.optimize()
    }

    fn values(&self) -> &[f64] {
        &self.values[..self.structurals]
    }
}
