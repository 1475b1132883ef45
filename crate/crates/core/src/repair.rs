//! Region-growing repair that brings every coalition to its required size.
//!
//! Repair runs in two phases. First every overfull coalition keeps its
//! nearest robots and releases the rest. Then tasks, largest coalition first,
//! grow a ball one cell at a time around their position and absorb unassigned
//! robots, nearest first, until full. Stripping before growing guarantees the
//! unassigned pool always covers the remaining deficit.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::lp::{lp_coalitions, LpBackend, LpCoalitions, LpOptions};
use crate::model::{max_value, structure_value, CoalitionStructure, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct RepairState {
    pub structure: CoalitionStructure,
    pub unassigned: BTreeSet<usize>,
    /// Ball growth per step, one cell length.
    pub radius_step: f64,
}

impl RepairState {
    pub fn new(structure: CoalitionStructure, unassigned: impl IntoIterator<Item = usize>, scenario: &Scenario) -> Self {
        RepairState {
            structure,
            unassigned: unassigned.into_iter().collect(),
            radius_step: scenario.environment().cell_size(),
        }
    }

    pub fn from_lp(lp: &LpCoalitions, scenario: &Scenario) -> Self {
        Self::new(lp.structure.clone(), lp.unassigned.iter().copied(), scenario)
    }

    /// Releases the farthest robots of every coalition larger than its task
    /// requires. Returns how many robots were released.
    pub fn strip_overfull(&mut self, scenario: &Scenario) -> usize {
        let mut released = 0;
        for c in &mut self.structure.coalitions {
            let required = scenario.tasks()[c.task_id].required_count as usize;
            if c.len() <= required {
                continue;
            }
            let mut by_distance: Vec<(f64, usize)> = c
                .robot_ids
                .iter()
                .map(|&r| (scenario.robot_task_distance(r, c.task_id), r))
                .collect();
            by_distance.sort_by(nearest_first);
            for &(_, r) in &by_distance[required..] {
                c.robot_ids.remove(&r);
                self.unassigned.insert(r);
                released += 1;
            }
        }
        released
    }

    /// Fills every underfull coalition from the unassigned pool.
    pub fn grow_regions(mut self, scenario: &Scenario) -> Result<CoalitionStructure> {
        let required = scenario.required_counts();
        let mut deficit = 0usize;
        for c in &self.structure.coalitions {
            let o = required[c.task_id] as usize;
            if c.len() > o {
                return Err(Error::Invariant(format!(
                    "task {} holds {} robots but requires {o} before growing",
                    c.task_id,
                    c.len()
                )));
            }
            deficit += o - c.len();
        }
        if deficit != self.unassigned.len() {
            return Err(Error::Invariant(format!(
                "deficit {deficit} differs from {} unassigned robots",
                self.unassigned.len()
            )));
        }

        let mut order: Vec<usize> = (0..self.structure.task_count()).collect();
        order.sort_by(|&a, &b| {
            self.structure.coalitions[b]
                .len()
                .cmp(&self.structure.coalitions[a].len())
                .then(a.cmp(&b))
        });

        let cap = scenario.environment().diagonal() + self.radius_step;
        for task in order {
            let o = required[task] as usize;
            let mut radius = self.radius_step;
            while self.structure.coalitions[task].len() < o {
                if radius > cap {
                    return Err(Error::Invariant(format!(
                        "ball around task {task} exceeded the grid diagonal"
                    )));
                }
                let mut inside: Vec<(f64, usize)> = self
                    .unassigned
                    .iter()
                    .map(|&r| (scenario.robot_task_distance(r, task), r))
                    .filter(|&(d, _)| d <= radius * (1.0 + 1e-12))
                    .collect();
                inside.sort_by(nearest_first);
                let room = o - self.structure.coalitions[task].len();
                for &(_, r) in inside.iter().take(room) {
                    self.unassigned.remove(&r);
                    self.structure.coalitions[task].robot_ids.insert(r);
                }
                radius += self.radius_step;
            }
        }
        if !self.unassigned.is_empty() {
            return Err(Error::Invariant(format!(
                "{} robots left unassigned after growing",
                self.unassigned.len()
            )));
        }
        Ok(self.structure)
    }
}

fn nearest_first(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
}

/// Repairs the LP phase output into a size-exact structure.
pub fn repair(lp: &LpCoalitions, scenario: &Scenario) -> Result<(CoalitionStructure, usize)> {
    let mut state = RepairState::from_lp(lp, scenario);
    let released = state.strip_overfull(scenario);
    Ok((state.grow_regions(scenario)?, released))
}

/// Full pipeline result.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub structure: CoalitionStructure,
    pub lp: LpCoalitions,
    /// Whether region growing ran.
    pub repaired: bool,
    /// Robots released from overfull coalitions.
    pub released: usize,
}

/// LP clustering followed, when needed, by region-growing repair. The result
/// always has every coalition at its required size.
pub fn allocate<B: LpBackend>(scenario: &Scenario, backend: &mut B, options: &LpOptions) -> Result<Allocation> {
    let lp = lp_coalitions(scenario, backend, options)?;
    finish(scenario, lp)
}

/// Completes an allocation from an LP phase result.
pub fn finish(scenario: &Scenario, lp: LpCoalitions) -> Result<Allocation> {
    let (structure, repaired, released) = if lp.is_final {
        (lp.structure.clone(), false, 0)
    } else {
        let (s, released) = repair(&lp, scenario)?;
        (s, true, released)
    };
    check_final(&structure, scenario)?;
    Ok(Allocation {
        structure,
        lp,
        repaired,
        released,
    })
}

fn check_final(cs: &CoalitionStructure, scenario: &Scenario) -> Result<()> {
    cs.validate(scenario)?;
    if structure_value(cs, scenario)? != max_value(scenario) || !cs.is_complete(scenario) {
        return Err(Error::Invariant(format!(
            "final structure sizes {:?} do not match required {:?}",
            cs.sizes(),
            scenario.required_counts()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_scenario;
    use crate::lp::DenseDualSimplex;
    use crate::model::{GridEnvironment, Position, Robot, Task};
    use crate::partitions::integer_partitions;
    use alloc::vec;
    use proptest::prelude::*;

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

    fn ids(cs: &CoalitionStructure, task: usize) -> Vec<usize> {
        cs.coalitions[task].robot_ids.iter().copied().collect()
    }

    #[test]
    fn strip_releases_farthest() {
        let s = scenario(&[(11, 10), (13, 10), (10, 15), (10, 20), (30, 30)], &[(10, 10, 3), (90, 90, 2)]);
        let mut state = RepairState::new(CoalitionStructure::from_labels(&[0, 0, 0, 0, 0], 2), [], &s);
        assert_eq!(state.strip_overfull(&s), 2);
        assert_eq!(ids(&state.structure, 0), vec![0, 1, 2]);
        assert_eq!(state.unassigned.iter().copied().collect::<Vec<_>>(), vec![3, 4]);
    }

    #[test]
    fn strip_tie_keeps_lower_id() {
        // Robots 0 and 1 both at distance 2 from the task.
        let s = scenario(&[(12, 10), (10, 12), (11, 10)], &[(10, 10, 2), (90, 90, 1)]);
        let mut state = RepairState::new(CoalitionStructure::from_labels(&[0, 0, 0], 2), [], &s);
        state.strip_overfull(&s);
        assert_eq!(ids(&state.structure, 0), vec![0, 2]);
        assert_eq!(state.unassigned.iter().copied().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn strip_noop_when_sized() {
        let s = scenario(&[(12, 10), (10, 12), (11, 10)], &[(10, 10, 2), (90, 90, 1)]);
        let cs = CoalitionStructure::from_labels(&[0, 1, 0], 2);
        let mut state = RepairState::new(cs.clone(), [], &s);
        assert_eq!(state.strip_overfull(&s), 0);
        assert_eq!(state.structure, cs);
        assert_eq!(state.grow_regions(&s).unwrap(), cs);
    }

    #[test]
    fn grow_absorbs_adjacent_robot() {
        let s = scenario(&[(12, 10), (10, 11), (89, 90)], &[(10, 10, 2), (90, 90, 1)]);
        let mut cs = CoalitionStructure::from_labels(&[0, 0, 1], 2);
        cs.coalitions[0].robot_ids.remove(&1);
        let state = RepairState::new(cs, [1], &s);
        let out = state.grow_regions(&s).unwrap();
        assert_eq!(ids(&out, 0), vec![0, 1]);
    }

    #[test]
    fn grow_rejects_bad_preconditions() {
        let s = scenario(&[(12, 10), (10, 11), (89, 90)], &[(10, 10, 2), (90, 90, 1)]);
        let over = RepairState::new(CoalitionStructure::from_labels(&[0, 0, 0], 2), [], &s);
        assert!(matches!(over.grow_regions(&s), Err(Error::Invariant(_))));
        let short = RepairState::new(CoalitionStructure::empty(2), [0], &s);
        assert!(matches!(short.grow_regions(&s), Err(Error::Invariant(_))));
    }

    #[test]
    fn three_one_split_repaired_to_two_two() {
        // LP-style split {r0, r1, r2} at t0 and {r3} at t1 with O = {2, 2}.
        // r2 is the farthest from t0 and the only one that moves.
        let s = scenario(&[(10, 11), (11, 10), (14, 14), (40, 41)], &[(10, 10, 2), (40, 40, 2)]);
        let mut state = RepairState::new(CoalitionStructure::from_labels(&[0, 0, 0, 1], 2), [], &s);
        assert_eq!(state.strip_overfull(&s), 1);
        let out = state.grow_regions(&s).unwrap();
        assert_eq!(ids(&out, 0), vec![0, 1]);
        assert_eq!(ids(&out, 1), vec![2, 3]);
        // Among the size-feasible structures this one has the least travel.
        let best = (0..4)
            .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
            .map(|(a, b)| {
                let labels: Vec<usize> = (0..4).map(|r| usize::from(r != a && r != b)).collect();
                CoalitionStructure::from_labels(&labels, 2).total_distance(&s)
            })
            .fold(f64::INFINITY, f64::min);
        assert!((out.total_distance(&s) - best).abs() < 1e-12);
    }

    #[test]
    fn allocate_reaches_max_value_on_small_partitions() {
        let env = GridEnvironment::square(100).unwrap();
        for n in 4..=9 {
            for m in 2..=n / 2 {
                for (k, o) in integer_partitions(n, m).into_iter().enumerate() {
                    let s = generate_scenario(n, m, &o, env, 1000 + k as u64).unwrap();
                    let a = allocate(&s, &mut DenseDualSimplex::new(), &LpOptions::default()).unwrap();
                    let sizes: Vec<u32> = a.structure.sizes().iter().map(|&x| x as u32).collect();
                    assert_eq!(sizes, s.required_counts());
                    assert_eq!(structure_value(&a.structure, &s).unwrap(), max_value(&s));
                }
            }
        }
    }

    #[test]
    fn allocate_is_deterministic() {
        let env = GridEnvironment::square(100).unwrap();
        let s = generate_scenario(9, 3, &[4, 3, 2], env, 5).unwrap();
        let a = allocate(&s, &mut DenseDualSimplex::new(), &LpOptions::default()).unwrap();
        let b = allocate(&s, &mut DenseDualSimplex::new(), &LpOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Lemma-2 style invariant exercised on the repair phase alone, from an
        // arbitrary partial structure that may be badly oversized.
        #[test]
        fn repair_from_any_partial_structure(
            seed in 0u64..10_000,
            n in 4usize..30,
            m_raw in 2usize..8,
            labels in proptest::collection::vec(0usize..9, 30),
        ) {
            let m = m_raw.min(n / 2);
            let parts = integer_partitions(n, m);
            let o = &parts[(seed as usize) % parts.len()];
            let s = generate_scenario(n, m, o, GridEnvironment::square(100).unwrap(), seed).unwrap();
            let mut cs = CoalitionStructure::empty(m);
            let mut unassigned = vec![];
            for (r, &label) in labels.iter().enumerate().take(n) {
                // Label m.. means unassigned.
                match label {
                    l if l < m => { cs.coalitions[l].robot_ids.insert(r); }
                    _ => unassigned.push(r),
                }
            }
            let mut state = RepairState::new(cs, unassigned, &s);
            state.strip_overfull(&s);
            let before: Vec<BTreeSet<usize>> =
                state.structure.coalitions.iter().map(|c| c.robot_ids.clone()).collect();
            let out = state.grow_regions(&s).unwrap();
            prop_assert!(out.is_complete(&s));
            prop_assert_eq!(structure_value(&out, &s).unwrap(), max_value(&s));
            for (c, b) in out.coalitions.iter().zip(&before) {
                prop_assert!(b.is_subset(&c.robot_ids));
            }
        }
    }
}
