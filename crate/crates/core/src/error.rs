use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("position ({x}, {y}) lies outside the {length}x{width} grid")]
    OutOfBounds {
        x: i64,
        y: i64,
        length: u32,
        width: u32,
    },
    #[error("cell ({x}, {y}) is occupied twice")]
    CoincidentPositions { x: i64, y: i64 },
    #[error("required counts sum to {sum}, expected {robots}")]
    RequiredCountMismatch { sum: u64, robots: usize },
    #[error("unknown task id {0}")]
    UnknownTask(usize),
    #[error("unknown robot id {0}")]
    UnknownRobot(usize),
    #[error("robot {0} appears in more than one coalition")]
    DuplicateRobot(usize),
    #[error("grid has {cells} cells, cannot place {requested} entities")]
    InsufficientCells { cells: u64, requested: u64 },
    #[error("enumeration of {count} structures exceeds cap {cap}")]
    SizeLimit { count: String, cap: u64 },
    #[error("solver inconsistency: robot {robot} is near-zero to tasks {first} and {second}")]
    SolverInconsistency {
        robot: usize,
        first: usize,
        second: usize,
    },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
