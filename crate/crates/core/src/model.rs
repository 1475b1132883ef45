//! Domain types, the coalition value function and the distance-based
//! similarity and cohesion measures.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Similarity assigned to every task–task pair so that no two tasks ever share
/// a coalition. Its magnitude exceeds any achievable sum of positive weights
/// for the instance sizes this crate targets.
pub const TASK_TASK_WEIGHT: f64 = -1.0e6;

/// Rectangular environment of `length x width` square cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEnvironment {
    length: u32,
    width: u32,
    cell_size: f64,
}

impl GridEnvironment {
    pub fn new(length: u32, width: u32, cell_size: f64) -> Result<Self> {
        if length == 0 || width == 0 {
            return Err(Error::InvalidEnvironment(format!(
                "grid must be at least 1x1, got {length}x{width}"
            )));
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(Error::InvalidEnvironment(format!(
                "cell size must be positive and finite, got {cell_size}"
            )));
        }
        let env = GridEnvironment {
            length,
            width,
            cell_size,
        };
        if !(env.diagonal().is_finite() && env.diagonal() > 0.0) {
            return Err(Error::InvalidEnvironment("degenerate diagonal".into()));
        }
        Ok(env)
    }

    /// Unit cells of one meter.
    pub fn square(side: u32) -> Result<Self> {
        Self::new(side, side, 1.0)
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cell_count(&self) -> u64 {
        u64::from(self.length) * u64::from(self.width)
    }

    /// Physical diagonal of the rectangle.
    pub fn diagonal(&self) -> f64 {
        libm::hypot(
            f64::from(self.length) * self.cell_size,
            f64::from(self.width) * self.cell_size,
        )
    }

    /// Normaliser of `cost_dist`: `sqrt(length² + width² + 1)` in physical units.
    pub fn cost_scale(&self) -> f64 {
        let l = f64::from(self.length) * self.cell_size;
        let w = f64::from(self.width) * self.cell_size;
        libm::sqrt(l * l + w * w + 1.0)
    }

    pub fn contains(&self, p: Position) -> bool {
        (1..=i64::from(self.length)).contains(&p.x) && (1..=i64::from(self.width)).contains(&p.y)
    }

    /// Euclidean distance between two cells, in physical units.
    pub fn distance(&self, p: Position, q: Position) -> f64 {
        let dx = (p.x - q.x) as f64;
        let dy = (p.y - q.y) as f64;
        libm::hypot(dx, dy) * self.cell_size
    }
}

/// 1-based cell coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub x: i64,
    pub y: i64,
}

impl Position {
    pub const fn new(x: i64, y: i64) -> Self {
        Position { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Robot {
    pub id: usize,
    pub position: Position,
    /// Carried for completeness; no allocation step reads it.
    pub orientation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Task {
    pub id: usize,
    pub position: Position,
    pub required_count: u32,
}

/// A validated allocation instance.
///
/// Robot and task ids equal their index in the respective roster, every
/// entity occupies its own in-bounds cell and the required counts sum to the
/// number of robots.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    environment: GridEnvironment,
    robots: Vec<Robot>,
    tasks: Vec<Task>,
}

impl Scenario {
    pub fn new(environment: GridEnvironment, robots: Vec<Robot>, tasks: Vec<Task>) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::InvalidScenario("at least one task is required".into()));
        }
        if robots.len() <= tasks.len() {
            return Err(Error::InvalidScenario(format!(
                "need more robots than tasks, got {} robots and {} tasks",
                robots.len(),
                tasks.len()
            )));
        }
        for (i, r) in robots.iter().enumerate() {
            if r.id != i {
                return Err(Error::InvalidScenario(format!(
                    "robot ids must be 0..N in order, found id {} at index {i}",
                    r.id
                )));
            }
            if !r.orientation.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "robot {i} has non-finite orientation"
                )));
            }
        }
        for (j, t) in tasks.iter().enumerate() {
            if t.id != j {
                return Err(Error::InvalidScenario(format!(
                    "task ids must be 0..M in order, found id {} at index {j}",
                    t.id
                )));
            }
            if t.required_count == 0 {
                return Err(Error::InvalidScenario(format!(
                    "task {j} must require at least one robot"
                )));
            }
        }
        let sum: u64 = tasks.iter().map(|t| u64::from(t.required_count)).sum();
        if sum != robots.len() as u64 {
            return Err(Error::RequiredCountMismatch {
                sum,
                robots: robots.len(),
            });
        }
        let mut occupied = BTreeSet::new();
        let positions = robots
            .iter()
            .map(|r| r.position)
            .chain(tasks.iter().map(|t| t.position));
        for p in positions {
            if !environment.contains(p) {
                return Err(Error::OutOfBounds {
                    x: p.x,
                    y: p.y,
                    length: environment.length,
                    width: environment.width,
                });
            }
            if !occupied.insert(p) {
                return Err(Error::CoincidentPositions { x: p.x, y: p.y });
            }
        }
        Ok(Scenario {
            environment,
            robots,
            tasks,
        })
    }

    pub fn environment(&self) -> &GridEnvironment {
        &self.environment
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn robot_count(&self) -> usize {
        self.robots.len()
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn required_counts(&self) -> Vec<u32> {
        self.tasks.iter().map(|t| t.required_count).collect()
    }

    pub fn position(&self, v: Vertex) -> Position {
        match v {
            Vertex::Task(j) => self.tasks[j].position,
            Vertex::Robot(i) => self.robots[i].position,
        }
    }

    /// Physical distance from robot `robot` to task `task`.
    pub fn robot_task_distance(&self, robot: usize, task: usize) -> f64 {
        self.environment
            .distance(self.robots[robot].position, self.tasks[task].position)
    }
}

/// A vertex of the affinity graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Task(usize),
    Robot(usize),
}

/// Robots assigned to one task.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coalition {
    pub task_id: usize,
    pub robot_ids: BTreeSet<usize>,
}

impl Coalition {
    pub fn new(task_id: usize) -> Self {
        Coalition {
            task_id,
            robot_ids: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.robot_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robot_ids.is_empty()
    }
}

/// One coalition per task, indexed by task id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoalitionStructure {
    pub coalitions: Vec<Coalition>,
}

impl CoalitionStructure {
    /// `task_count` empty coalitions.
    pub fn empty(task_count: usize) -> Self {
        CoalitionStructure {
            coalitions: (0..task_count).map(Coalition::new).collect(),
        }
    }

    /// Builds a structure from a per-robot task label.
    pub fn from_labels(labels: &[usize], task_count: usize) -> Self {
        let mut cs = Self::empty(task_count);
        for (robot, &task) in labels.iter().enumerate() {
            cs.coalitions[task].robot_ids.insert(robot);
        }
        cs
    }

    pub fn task_count(&self) -> usize {
        self.coalitions.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.coalitions.iter().map(Coalition::len).collect()
    }

    pub fn assigned_count(&self) -> usize {
        self.coalitions.iter().map(Coalition::len).sum()
    }

    /// Task of every robot in `0..robot_count`, `None` when unassigned.
    pub fn assignment(&self, robot_count: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; robot_count];
        for c in &self.coalitions {
            for &r in &c.robot_ids {
                if r < robot_count {
                    out[r] = Some(c.task_id);
                }
            }
        }
        out
    }

    /// Checks task indexing and disjointness against `scenario`.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let mut seen = vec![false; scenario.robot_count()];
        for (j, c) in self.coalitions.iter().enumerate() {
            if c.task_id != j || c.task_id >= scenario.task_count() {
                return Err(Error::UnknownTask(c.task_id));
            }
            for &r in &c.robot_ids {
                match seen.get_mut(r) {
                    None => return Err(Error::UnknownRobot(r)),
                    Some(true) => return Err(Error::DuplicateRobot(r)),
                    Some(s) => *s = true,
                }
            }
        }
        Ok(())
    }

    /// Covers every robot of `scenario`.
    pub fn is_complete(&self, scenario: &Scenario) -> bool {
        self.validate(scenario).is_ok() && self.assigned_count() == scenario.robot_count()
    }

    /// Total physical distance from each assigned robot to its task.
    pub fn total_distance(&self, scenario: &Scenario) -> f64 {
        self.coalitions
            .iter()
            .flat_map(|c| c.robot_ids.iter().map(move |&r| (r, c.task_id)))
            .map(|(r, t)| scenario.robot_task_distance(r, t))
            .sum()
    }
}

/// `required² − (required − size)²`.
pub fn coalition_value(coalition_size: usize, required: u32) -> i64 {
    let o = i64::from(required);
    let diff = o - coalition_size as i64;
    o * o - diff * diff
}

pub fn structure_value(cs: &CoalitionStructure, scenario: &Scenario) -> Result<i64> {
    let mut total = 0;
    for c in &cs.coalitions {
        let task = scenario
            .tasks()
            .get(c.task_id)
            .ok_or(Error::UnknownTask(c.task_id))?;
        total += coalition_value(c.len(), task.required_count);
    }
    Ok(total)
}

/// Largest attainable structure value, `Σ O_j²`.
pub fn max_value(scenario: &Scenario) -> i64 {
    max_value_of(&scenario.required_counts())
}

pub fn max_value_of(required: &[u32]) -> i64 {
    required.iter().map(|&o| i64::from(o).pow(2)).sum()
}

/// Distance normalised by `sqrt(length² + width² + 1)`; in `[0, 1)` for cells
/// inside `env`.
pub fn cost_dist(p: Position, q: Position, env: &GridEnvironment) -> f64 {
    env.distance(p, q) / env.cost_scale()
}

/// Log-odds similarity `ln(f / (1 − f))` with `f = 1 − cost_dist(p, q)`.
pub fn similarity_from_positions(p: Position, q: Position, env: &GridEnvironment) -> Result<f64> {
    if p == q {
        return Err(Error::CoincidentPositions { x: p.x, y: p.y });
    }
    let cost = cost_dist(p, q, env);
    let f = 1.0 - cost;
    Ok(libm::log(f / cost))
}

/// Similarity of two graph vertices. Task–task pairs get [`TASK_TASK_WEIGHT`].
pub fn similarity_weight(a: Vertex, b: Vertex, scenario: &Scenario) -> Result<f64> {
    if let (Vertex::Task(_), Vertex::Task(_)) = (a, b) {
        return Ok(TASK_TASK_WEIGHT);
    }
    let env = scenario.environment();
    similarity_from_positions(scenario.position(a), scenario.position(b), env)
}

/// Robot–task weights to the coalition's task plus every unordered
/// robot–robot weight inside the coalition.
pub fn cohesion(c: &Coalition, scenario: &Scenario) -> Result<f64> {
    if c.task_id >= scenario.task_count() {
        return Err(Error::UnknownTask(c.task_id));
    }
    let robots: Vec<usize> = c.robot_ids.iter().copied().collect();
    let mut total = 0.0;
    for (k, &r) in robots.iter().enumerate() {
        if r >= scenario.robot_count() {
            return Err(Error::UnknownRobot(r));
        }
        total += similarity_weight(Vertex::Robot(r), Vertex::Task(c.task_id), scenario)?;
        for &l in &robots[k + 1..] {
            total += similarity_weight(Vertex::Robot(r), Vertex::Robot(l), scenario)?;
        }
    }
    Ok(total)
}

pub fn cohesion_quality(cs: &CoalitionStructure, scenario: &Scenario) -> Result<f64> {
    cs.coalitions.iter().map(|c| cohesion(c, scenario)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn env100() -> GridEnvironment {
        GridEnvironment::square(100).unwrap()
    }

    fn robot(id: usize, x: i64, y: i64) -> Robot {
        Robot {
            id,
            position: Position::new(x, y),
            orientation: 0.0,
        }
    }

    fn task(id: usize, x: i64, y: i64, required_count: u32) -> Task {
        Task {
            id,
            position: Position::new(x, y),
            required_count,
        }
    }

    #[test]
    fn coalition_value_examples() {
        assert_eq!(coalition_value(4, 4), 16);
        assert_eq!(coalition_value(0, 3), 0);
        assert_eq!(coalition_value(7, 3), -7);
    }

    #[test]
    fn max_value_examples() {
        assert_eq!(max_value_of(&[1, 1, 1, 1]), 4);
        let cases: [(&[u32], i64); 3] = [(&[2, 3], 13), (&[2, 1, 1, 1], 7), (&[9, 1], 82)];
        for (required, expected) in cases {
            let n: u32 = required.iter().sum();
            let robots = (0..n as usize).map(|i| robot(i, i as i64 + 1, 1)).collect();
            let tasks = required
                .iter()
                .enumerate()
                .map(|(j, &o)| task(j, j as i64 + 1, 2, o))
                .collect();
            let s = Scenario::new(env100(), robots, tasks).unwrap();
            assert_eq!(max_value(&s), expected);
        }
    }

    #[test]
    fn structure_value_examples() {
        let robots = (0..4).map(|i| robot(i, i as i64 + 1, 1)).collect();
        let tasks = vec![task(0, 1, 5, 2), task(1, 2, 5, 2)];
        let s = Scenario::new(env100(), robots, tasks).unwrap();
        let exact = CoalitionStructure::from_labels(&[0, 0, 1, 1], 2);
        assert_eq!(structure_value(&exact, &s).unwrap(), max_value(&s));
        assert_eq!(structure_value(&CoalitionStructure::empty(2), &s).unwrap(), 0);
        let lopsided = CoalitionStructure::from_labels(&[0, 0, 0, 0], 2);
        assert_eq!(structure_value(&lopsided, &s).unwrap(), 0);

        let mut bad = CoalitionStructure::empty(3);
        bad.coalitions[2].robot_ids.insert(0);
        assert_eq!(structure_value(&bad, &s), Err(Error::UnknownTask(2)));
    }

    #[test]
    fn cost_dist_examples() {
        let env = env100();
        let p = Position::new(1, 1);
        assert_eq!(cost_dist(p, p, &env), 0.0);
        // Reference values evaluated independently at 30 significant digits.
        let corner = cost_dist(p, Position::new(100, 100), &env);
        assert!((corner - 0.989_975_250_928_086_3).abs() < 1e-12, "{corner}");
        let adjacent = cost_dist(p, Position::new(2, 1), &env);
        assert!((adjacent - 0.007_070_891_041_799_028).abs() < 1e-15, "{adjacent}");
    }

    #[test]
    fn similarity_examples() {
        let env = env100();
        let w = similarity_from_positions(Position::new(1, 1), Position::new(2, 1), &env).unwrap();
        assert!((w - 4.944_672_767_380_438).abs() < 1e-9, "{w}");
        assert!(similarity_from_positions(Position::new(3, 3), Position::new(3, 3), &env).is_err());

        // cost_dist = 0.5 exactly on a 3x4 grid with cell size 1: scale is sqrt(26).
        let env = GridEnvironment::new(3, 4, 1.0).unwrap();
        let scale = env.cost_scale();
        assert!((scale - libm::sqrt(26.0)).abs() < 1e-15);

        let robots = vec![robot(0, 1, 1), robot(1, 2, 1), robot(2, 1, 2)];
        let tasks = vec![task(0, 3, 3, 2), task(1, 3, 4, 1)];
        let s = Scenario::new(env, robots, tasks).unwrap();
        assert_eq!(
            similarity_weight(Vertex::Task(0), Vertex::Task(1), &s).unwrap(),
            TASK_TASK_WEIGHT
        );
    }

    #[test]
    fn similarity_zero_at_half_cost() {
        // Unit-free check: f = 1 - c, ln(f / c) at c = 0.5.
        let c = 0.5_f64;
        assert_eq!(libm::log((1.0 - c) / c), 0.0);
    }

    #[test]
    fn cohesion_matches_edge_sum() {
        let robots = vec![robot(0, 10, 10), robot(1, 20, 15), robot(2, 12, 40), robot(3, 90, 90)];
        let tasks = vec![task(0, 15, 20, 3), task(1, 80, 80, 1)];
        let s = Scenario::new(env100(), robots, tasks).unwrap();
        let mut c = Coalition::new(0);
        assert_eq!(cohesion(&c, &s).unwrap(), 0.0);
        c.robot_ids.extend([0, 1, 2]);

        let w = |p: (f64, f64), q: (f64, f64)| {
            let d = ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt() / 20001f64.sqrt();
            ((1.0 - d) / d).ln()
        };
        let (r0, r1, r2, t0) = ((10.0, 10.0), (20.0, 15.0), (12.0, 40.0), (15.0, 20.0));
        let expected = w(r0, t0) + w(r1, t0) + w(r2, t0) + w(r0, r1) + w(r0, r2) + w(r1, r2);
        let got = cohesion(&c, &s).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");

        let cs = CoalitionStructure::from_labels(&[0, 0, 0, 1], 2);
        let cq = cohesion_quality(&cs, &s).unwrap();
        let tail = w((90.0, 90.0), (80.0, 80.0));
        assert!((cq - expected - tail).abs() < 1e-12);
        assert_eq!(cohesion_quality(&CoalitionStructure::empty(2), &s).unwrap(), 0.0);
    }

    #[test]
    fn scenario_rejects_invalid_input() {
        let env = env100();
        let ok_tasks = || vec![task(0, 50, 50, 2)];
        let coincident = Scenario::new(env, vec![robot(0, 1, 1), robot(1, 1, 1)], ok_tasks());
        assert_eq!(coincident, Err(Error::CoincidentPositions { x: 1, y: 1 }));
        let on_task = Scenario::new(env, vec![robot(0, 50, 50), robot(1, 1, 1)], ok_tasks());
        assert!(matches!(on_task, Err(Error::CoincidentPositions { .. })));
        let outside = Scenario::new(env, vec![robot(0, 0, 1), robot(1, 1, 1)], ok_tasks());
        assert!(matches!(outside, Err(Error::OutOfBounds { .. })));
        let mismatch = Scenario::new(
            env,
            vec![robot(0, 1, 1), robot(1, 2, 1), robot(2, 3, 1)],
            ok_tasks(),
        );
        assert!(matches!(mismatch, Err(Error::RequiredCountMismatch { sum: 2, robots: 3 })));
        let ids = Scenario::new(env, vec![robot(1, 1, 1), robot(0, 2, 1)], ok_tasks());
        assert!(matches!(ids, Err(Error::InvalidScenario(_))));
        assert!(GridEnvironment::new(0, 3, 1.0).is_err());
        assert!(GridEnvironment::new(3, 3, 0.0).is_err());
        assert!(GridEnvironment::new(3, 3, f64::NAN).is_err());
    }

    #[test]
    fn structure_validation() {
        let robots = (0..3).map(|i| robot(i, i as i64 + 1, 1)).collect();
        let s = Scenario::new(env100(), robots, vec![task(0, 9, 9, 2), task(1, 8, 8, 1)]).unwrap();
        let cs = CoalitionStructure::from_labels(&[0, 1, 0], 2);
        assert!(cs.is_complete(&s));
        assert_eq!(cs.assignment(3), vec![Some(0), Some(1), Some(0)]);
        let mut dup = cs.clone();
        dup.coalitions[1].robot_ids.insert(0);
        assert_eq!(dup.validate(&s), Err(Error::DuplicateRobot(0)));
        let mut partial = cs;
        partial.coalitions[0].robot_ids.remove(&2);
        assert!(partial.validate(&s).is_ok());
        assert!(!partial.is_complete(&s));
    }

    proptest! {
        #[test]
        fn value_peaks_at_required(o in 1u32..=20, s in 0usize..=60) {
            let v = coalition_value(s, o);
            prop_assert!(v <= i64::from(o * o));
            prop_assert_eq!(v == i64::from(o * o), s == o as usize);
            if s <= 3 * o as usize {
                prop_assert_eq!(v < 0, s > 2 * o as usize);
            }
        }

        #[test]
        fn cost_dist_symmetric_and_bounded(
            l in 1u32..200, w in 1u32..200,
            a in (0u32..200, 0u32..200), b in (0u32..200, 0u32..200),
        ) {
            let env = GridEnvironment::new(l, w, 1.0).unwrap();
            let p = Position::new(i64::from(a.0 % l) + 1, i64::from(a.1 % w) + 1);
            let q = Position::new(i64::from(b.0 % l) + 1, i64::from(b.1 % w) + 1);
            let c = cost_dist(p, q, &env);
            prop_assert_eq!(c, cost_dist(q, p, &env));
            prop_assert!((0.0..1.0).contains(&c));
        }

        #[test]
        fn similarity_decreases_with_distance(d1 in 1i64..99, d2 in 1i64..99) {
            prop_assume!(d1 != d2);
            let env = env100();
            let origin = Position::new(1, 1);
            let w1 = similarity_from_positions(origin, Position::new(1 + d1, 1), &env).unwrap();
            let w2 = similarity_from_positions(origin, Position::new(1 + d2, 1), &env).unwrap();
            let back = similarity_from_positions(Position::new(1 + d1, 1), origin, &env).unwrap();
            prop_assert_eq!(w1, back);
            prop_assert_eq!(d1 < d2, w1 > w2);
        }
    }
}
