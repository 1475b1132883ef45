//! JSON file formats for scenarios and solved structures.
//!
//! A scenario file looks like
//!
//! ```json
//! {
//!   "format": "coalition-scenario",
//!   "version": 1,
//!   "env": { "length": 100, "width": 100, "cell_size": 1.0 },
//!   "robots": [ { "id": 0, "x": 12, "y": 40, "theta": 1.57 } ],
//!   "tasks": [ { "id": 0, "x": 80, "y": 3, "required": 1 } ]
//! }
//! ```
//!
//! Coordinates are 1-based cell indices, `cell_size` is meters per cell and
//! defaults to 1, `theta` defaults to 0. Ids must cover `0..N` and `0..M`;
//! entries may appear in any order. A structure file maps task ids (as JSON
//! object keys) to sorted robot id lists and carries a metrics block.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use coalition_core::{CoalitionStructure, GridEnvironment, Position, Robot, Scenario, Task};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::RunMetrics;

pub const SCENARIO_FORMAT: &str = "coalition-scenario";
pub const STRUCTURE_FORMAT: &str = "coalition-structure";
pub const FORMAT_VERSION: u32 = 1;

fn default_cell_size() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvFile {
    pub length: u32,
    pub width: u32,
    #[serde(default = "default_cell_size")]
    pub cell_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotFile {
    pub id: usize,
    pub x: i64,
    pub y: i64,
    #[serde(default)]
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskFile {
    pub id: usize,
    pub x: i64,
    pub y: i64,
    pub required: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub format: String,
    pub version: u32,
    pub env: EnvFile,
    pub robots: Vec<RobotFile>,
    pub tasks: Vec<TaskFile>,
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        let env = s.environment();
        ScenarioFile {
            format: SCENARIO_FORMAT.into(),
            version: FORMAT_VERSION,
            env: EnvFile {
                length: env.length(),
                width: env.width(),
                cell_size: env.cell_size(),
            },
            robots: s
                .robots()
                .iter()
                .map(|r| RobotFile {
                    id: r.id,
                    x: r.position.x,
                    y: r.position.y,
                    theta: r.orientation,
                })
                .collect(),
            tasks: s
                .tasks()
                .iter()
                .map(|t| TaskFile {
                    id: t.id,
                    x: t.position.x,
                    y: t.position.y,
                    required: t.required_count,
                })
                .collect(),
        }
    }
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = Error;

    fn try_from(f: ScenarioFile) -> Result<Self> {
        check_header(&f.format, f.version, SCENARIO_FORMAT)?;
        let env = GridEnvironment::new(f.env.length, f.env.width, f.env.cell_size)?;
        let mut robots: Vec<Robot> = f
            .robots
            .into_iter()
            .map(|r| Robot {
                id: r.id,
                position: Position::new(r.x, r.y),
                orientation: r.theta,
            })
            .collect();
        robots.sort_by_key(|r| r.id);
        let mut tasks: Vec<Task> = f
            .tasks
            .into_iter()
            .map(|t| Task {
                id: t.id,
                position: Position::new(t.x, t.y),
                required_count: t.required,
            })
            .collect();
        tasks.sort_by_key(|t| t.id);
        Ok(Scenario::new(env, robots, tasks)?)
    }
}

fn check_header(found: &str, version: u32, expected: &'static str) -> Result<()> {
    if found != expected {
        return Err(Error::Format {
            expected,
            found: found.into(),
        });
    }
    if version != FORMAT_VERSION {
        return Err(Error::Version {
            format: expected,
            version,
        });
    }
    Ok(())
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    file.try_into()
}

pub fn scenario_to_string(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(&ScenarioFile::from(s)).expect("scenario serializes");
    out.push('\n');
    out
}

pub fn read_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text)
}

/// Solved structure plus its metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureFile {
    pub format: String,
    pub version: u32,
    pub coalitions: BTreeMap<usize, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<RunMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
}

/// Result block written by the `oracle` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub method: String,
    pub total_distance: f64,
    pub runtime_s: f64,
}

impl StructureFile {
    pub fn new(cs: &CoalitionStructure, metrics: Option<RunMetrics>) -> Self {
        StructureFile {
            format: STRUCTURE_FORMAT.into(),
            version: FORMAT_VERSION,
            coalitions: cs
                .coalitions
                .iter()
                .map(|c| (c.task_id, c.robot_ids.iter().copied().collect()))
                .collect(),
            metrics,
            oracle: None,
        }
    }

    pub fn structure(&self, task_count: usize) -> Result<CoalitionStructure> {
        check_header(&self.format, self.version, STRUCTURE_FORMAT)?;
        let mut cs = CoalitionStructure::empty(task_count);
        for (&task, robots) in &self.coalitions {
            let c = cs
                .coalitions
                .get_mut(task)
                .ok_or(coalition_core::Error::UnknownTask(task))?;
            c.robot_ids.extend(robots.iter().copied());
        }
        Ok(cs)
    }
}

pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}
