//! Seeded random scenarios on a grid.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{GridEnvironment, Position, Robot, Scenario, Task};

/// Places `n` robots and `m` tasks on distinct uniform-random cells of `grid`
/// and gives task `j` the requirement `required[j]`. Robots are drawn first.
/// The same arguments always produce the same scenario.
pub fn generate_scenario(
    n: usize,
    m: usize,
    required: &[u32],
    grid: GridEnvironment,
    seed: u64,
) -> Result<Scenario> {
    if required.len() != m {
        return Err(Error::InvalidScenario(format!(
            "{} required counts given for {m} tasks",
            required.len()
        )));
    }
    let sum: u64 = required.iter().map(|&o| u64::from(o)).sum();
    if sum != n as u64 {
        return Err(Error::RequiredCountMismatch { sum, robots: n });
    }
    let requested = (n + m) as u64;
    if requested > grid.cell_count() {
        return Err(Error::InsufficientCells {
            cells: grid.cell_count(),
            requested,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = distinct_cells(&grid, n + m, &mut rng);
    let robots = cells[..n]
        .iter()
        .enumerate()
        .map(|(id, &position)| Robot {
            id,
            position,
            orientation: rng.gen_range(0.0..TAU),
        })
        .collect();
    let tasks = cells[n..]
        .iter()
        .zip(required)
        .enumerate()
        .map(|(id, (&position, &required_count))| Task {
            id,
            position,
            required_count,
        })
        .collect();
    Scenario::new(grid, robots, tasks)
}

fn distinct_cells<R: Rng>(grid: &GridEnvironment, count: usize, rng: &mut R) -> Vec<Position> {
    let (l, w) = (i64::from(grid.length()), i64::from(grid.width()));
    let dense = (count as u64) * 2 > grid.cell_count();
    if dense {
        let mut all: Vec<Position> = (1..=l)
            .flat_map(|x| (1..=w).map(move |y| Position::new(x, y)))
            .collect();
        let (picked, _) = all.partial_shuffle(rng, count);
        return picked.to_vec();
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Position::new(rng.gen_range(1..=l), rng.gen_range(1..=w));
        if seen.insert(p) {
            out.push(p);
        }
    }
    out
}
