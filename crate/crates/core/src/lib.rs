//! Coalition formation for multi-robot task allocation.
//!
//! `N` homogeneous robots are split into `M` task-assigned coalitions. Robots
//! and tasks are vertices of a complete affinity graph whose edge weights are
//! the log-odds of a distance-derived affinity. A relaxed correlation
//! clustering LP (triangle inequalities, generated lazily) groups robots
//! around tasks, and a region-growing repair pass then forces every coalition
//! to the exact size its task requires.
//!
//! The crate is `no_std` and only needs `alloc`. The LP is solved through the
//! [`lp::LpBackend`] trait; [`lp::DenseDualSimplex`] is a self-contained
//! backend suitable for small and medium instances.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod generate;
pub mod graph;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod partitions;
pub mod repair;

pub use error::{Error, Result};
pub use graph::AffinityGraph;
pub use model::{
    Coalition, CoalitionStructure, GridEnvironment, Position, Robot, Scenario, Task, Vertex,
    TASK_TASK_WEIGHT,
};
pub use repair::{allocate, Allocation};
