//! Exact brute-force baselines and partition counting.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::AffinityGraph;
use crate::model::{coalition_value, max_value, CoalitionStructure, Scenario};

/// Default ceiling on the number of structures an oracle may enumerate.
pub const DEFAULT_ORACLE_CAP: u64 = 100_000_000;

/// Stirling number of the second kind, by the standard recurrence
/// `S(n, k) = k·S(n − 1, k) + S(n − 1, k − 1)`. Zero when `m > n`.
pub fn stirling2(n: usize, m: usize) -> BigUint {
    if m > n {
        return BigUint::zero();
    }
    let mut row = vec![BigUint::zero(); m + 1];
    row[0] = BigUint::one();
    for i in 1..=n {
        // Walk k downwards so row[k - 1] still holds S(i − 1, k − 1).
        for k in (1..=m.min(i)).rev() {
            let carried = core::mem::take(&mut row[k]) * BigUint::from(k);
            row[k] = carried + &row[k - 1];
        }
        row[0] = BigUint::zero();
    }
    core::mem::take(&mut row[m])
}

/// `(Σ k_i)! / Π k_i!`.
pub fn multinomial(counts: &[u32]) -> BigUint {
    let mut total = BigUint::one();
    let mut placed = 0u64;
    for &k in counts {
        // Product of C(placed + k, k) over the blocks in order.
        for i in 1..=u64::from(k) {
            total = total * BigUint::from(placed + i) / BigUint::from(i);
        }
        placed += u64::from(k);
    }
    total
}

/// What the labels emitted by a [`PartitionIterator`] mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockMode {
    /// Every block labelled and non-empty: `S(n, m)·m!` items.
    Labeled,
    /// Blocks unlabelled (restricted-growth strings), exactly `m` of them.
    Unlabeled,
    /// Every map of items into `m` labels, empty blocks allowed: `m^n` items.
    AllowEmpty,
}

/// Enumerates set partitions of `{0, …, n − 1}` as per-item block labels.
#[derive(Debug, Clone)]
pub struct PartitionIterator {
    n: usize,
    m: usize,
    mode: BlockMode,
    labels: Vec<usize>,
    started: bool,
    done: bool,
}

impl PartitionIterator {
    pub fn new(n: usize, m: usize, mode: BlockMode) -> Self {
        let impossible = match mode {
            BlockMode::AllowEmpty => m == 0 && n > 0,
            BlockMode::Labeled | BlockMode::Unlabeled => m > n || (m == 0 && n > 0),
        };
        PartitionIterator {
            n,
            m,
            mode,
            labels: vec![0; n],
            started: false,
            done: impossible,
        }
    }

    pub fn labeled(n: usize, m: usize) -> Self {
        Self::new(n, m, BlockMode::Labeled)
    }

    fn advance(&mut self) -> bool {
        match self.mode {
            BlockMode::Labeled | BlockMode::AllowEmpty => {
                for i in (0..self.n).rev() {
                    if self.labels[i] + 1 < self.m {
                        self.labels[i] += 1;
                        return true;
                    }
                    self.labels[i] = 0;
                }
                false
            }
            BlockMode::Unlabeled => {
                // Restricted growth: labels[i] <= 1 + max(labels[..i]).
                let mut running = 0;
                let prefix_max: Vec<usize> = self
                    .labels
                    .iter()
                    .map(|&l| {
                        let before = running;
                        running = running.max(l);
                        before
                    })
                    .collect();
                for i in (1..self.n).rev() {
                    let limit = (prefix_max[i] + 1).min(self.m.saturating_sub(1));
                    if self.labels[i] < limit {
                        self.labels[i] += 1;
                        for l in &mut self.labels[i + 1..] {
                            *l = 0;
                        }
                        return true;
                    }
                }
                false
            }
        }
    }

    fn accept(&self) -> bool {
        match self.mode {
            BlockMode::AllowEmpty => true,
            BlockMode::Unlabeled => self.labels.iter().max().map_or(0, |&l| l + 1) == self.m,
            BlockMode::Labeled => {
                let mut hit = vec![false; self.m];
                for &l in &self.labels {
                    hit[l] = true;
                }
                hit.iter().all(|&h| h)
            }
        }
    }
}

impl Iterator for PartitionIterator {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        while !self.done {
            if self.started {
                if !self.advance() {
                    self.done = true;
                    return None;
                }
            } else {
                self.started = true;
            }
            if self.n == 0 {
                self.done = true;
            }
            if self.accept() {
                return Some(self.labels.clone());
            }
        }
        None
    }
}

/// Label vectors with exactly `counts[j]` entries equal to `j`, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct SizeFeasibleLabels {
    labels: Vec<usize>,
    first: bool,
    done: bool,
}

impl SizeFeasibleLabels {
    pub fn new(counts: &[u32]) -> Self {
        let labels: Vec<usize> = counts
            .iter()
            .enumerate()
            .flat_map(|(j, &k)| core::iter::repeat_n(j, k as usize))
            .collect();
        SizeFeasibleLabels {
            labels,
            first: true,
            done: false,
        }
    }

    /// Steps to the next permutation in place; `false` after the last one.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if self.first {
            self.first = false;
            return true;
        }
        let l = &mut self.labels;
        let Some(i) = (1..l.len()).rev().find(|&i| l[i - 1] < l[i]) else {
            self.done = true;
            return false;
        };
        let pivot = i - 1;
        let j = (i..l.len()).rev().find(|&j| l[j] > l[pivot]).unwrap_or(i);
        l.swap(pivot, j);
        l[i..].reverse();
        true
    }

    pub fn current(&self) -> &[usize] {
        &self.labels
    }
}

impl Iterator for SizeFeasibleLabels {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().then(|| self.labels.clone())
    }
}

fn check_cap(count: &BigUint, cap: u64) -> Result<()> {
    if count > &BigUint::from(cap) {
        return Err(Error::SizeLimit {
            count: count.to_string(),
            cap,
        });
    }
    Ok(())
}

/// Number of structures with `|c_i| = O_i` for every task.
pub fn size_feasible_count(scenario: &Scenario) -> BigUint {
    multinomial(&scenario.required_counts())
}

/// Every structure with exactly the required coalition sizes, i.e. exactly
/// the maximum-value structures.
pub fn enumerate_size_feasible(
    scenario: &Scenario,
    cap: u64,
) -> Result<impl Iterator<Item = CoalitionStructure>> {
    check_cap(&size_feasible_count(scenario), cap)?;
    let m = scenario.task_count();
    Ok(SizeFeasibleLabels::new(&scenario.required_counts())
        .map(move |labels| CoalitionStructure::from_labels(&labels, m)))
}

/// The size-feasible structure with the least total robot-to-task distance.
/// Ties keep the lexicographically smallest label vector.
pub fn optimal_allocation(scenario: &Scenario, cap: u64) -> Result<(CoalitionStructure, f64)> {
    check_cap(&size_feasible_count(scenario), cap)?;
    let m = scenario.task_count();
    let n = scenario.robot_count();
    let dist: Vec<f64> = (0..n)
        .flat_map(|r| (0..m).map(move |t| (r, t)))
        .map(|(r, t)| scenario.robot_task_distance(r, t))
        .collect();
    let mut perms = SizeFeasibleLabels::new(&scenario.required_counts());
    let mut best: Option<(Vec<usize>, f64)> = None;
    while perms.advance() {
        let labels = perms.current();
        let total: f64 = labels
            .iter()
            .enumerate()
            .map(|(r, &t)| dist[r * m + t])
            .sum();
        let improves = match &best {
            None => true,
            Some((_, b)) => total < b - 1e-9 * b.abs().max(1.0),
        };
        if improves {
            best = Some((labels.to_vec(), total));
        }
    }
    let (labels, total) =
        best.ok_or_else(|| Error::Invariant("no size-feasible structure".to_string()))?;
    Ok((CoalitionStructure::from_labels(&labels, m), total))
}

/// Baseline brute force over every set partition of the robots into `M`
/// labelled non-empty blocks (`S(N, M)·M!` of them). Structures below the
/// maximum value are skipped; among the rest the least total distance wins,
/// ties keeping the first visited. Agrees with [`optimal_allocation`], which
/// visits only the size-feasible structures.
pub fn brute_force_allocation(scenario: &Scenario, cap: u64) -> Result<(CoalitionStructure, f64)> {
    let n = scenario.robot_count();
    let m = scenario.task_count();
    check_cap(&(stirling2(n, m) * factorial(m)), cap)?;
    let required: Vec<usize> = scenario.required_counts().iter().map(|&o| o as usize).collect();
    let target = max_value(scenario);
    let dist: Vec<f64> = (0..n)
        .flat_map(|r| (0..m).map(move |t| (r, t)))
        .map(|(r, t)| scenario.robot_task_distance(r, t))
        .collect();
    let mut labels = vec![0usize; n];
    let mut sizes = vec![0usize; m];
    sizes[0] = n;
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        if sizes.iter().all(|&s| s > 0) {
            let value: i64 = sizes
                .iter()
                .zip(&required)
                .map(|(&s, &o)| coalition_value(s, o as u32))
                .sum();
            if value == target {
                let total: f64 = labels.iter().enumerate().map(|(r, &t)| dist[r * m + t]).sum();
                if best.as_ref().is_none_or(|(_, b)| total < b - 1e-9 * b.abs().max(1.0)) {
                    best = Some((labels.clone(), total));
                }
            }
        }
        // Odometer step, least significant digit last.
        let mut i = n;
        loop {
            if i == 0 {
                let (labels, total) = best
                    .ok_or_else(|| Error::Invariant("no maximum-value structure".to_string()))?;
                return Ok((CoalitionStructure::from_labels(&labels, m), total));
            }
            i -= 1;
            sizes[labels[i]] -= 1;
            if labels[i] + 1 < m {
                labels[i] += 1;
                sizes[labels[i]] += 1;
                break;
            }
            labels[i] = 0;
            sizes[0] += 1;
        }
    }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

fn complete_count(scenario: &Scenario) -> BigUint {
    BigUint::from(scenario.task_count()).pow(scenario.robot_count() as u32)
}

/// Complete structure (every robot on some task, sizes unconstrained) that
/// maximises cohesion quality. Ties keep the first in label order.
pub fn optimal_cq(scenario: &Scenario, cap: u64) -> Result<CoalitionStructure> {
    let graph = AffinityGraph::build(scenario)?;
    best_complete(scenario, &graph, cap, |cs| graph.cohesion_quality(cs))
}

/// Complete structure minimising penalty. Ties keep the first in label order.
pub fn min_penalty_structure(scenario: &Scenario, cap: u64) -> Result<(CoalitionStructure, f64)> {
    let graph = AffinityGraph::build(scenario)?;
    let cs = best_complete(scenario, &graph, cap, |cs| -graph.penalty(cs))?;
    let p = graph.penalty(&cs);
    Ok((cs, p))
}

fn best_complete(
    scenario: &Scenario,
    graph: &AffinityGraph,
    cap: u64,
    score: impl Fn(&CoalitionStructure) -> f64,
) -> Result<CoalitionStructure> {
    check_cap(&complete_count(scenario), cap)?;
    let m = graph.task_count();
    let mut best: Option<(CoalitionStructure, f64)> = None;
    for labels in PartitionIterator::new(scenario.robot_count(), m, BlockMode::AllowEmpty) {
        let cs = CoalitionStructure::from_labels(&labels, m);
        let s = score(&cs);
        if best.as_ref().is_none_or(|(_, b)| s > *b + 1e-9 * b.abs().max(1.0)) {
            best = Some((cs, s));
        }
    }
    best.map(|(cs, _)| cs)
        .ok_or_else(|| Error::Invariant(format!("no complete structure for {m} tasks")))
}

/// `f64` view of a big count, saturating at infinity.
pub fn approx_f64(value: &BigUint) -> f64 {
    value.to_f64().unwrap_or(f64::INFINITY)
}
