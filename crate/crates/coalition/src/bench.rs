//! Experiment sweeps over robot counts, task counts and requirement profiles.
//!
//! A config is JSON:
//!
//! ```json
//! {
//!   "robot_counts": [10, 20, 30],
//!   "task_counts": [2, 4],
//!   "grid": { "length": 100, "width": 100, "cell_size": 1.0 },
//!   "runs_per_setting": 10,
//!   "seed": 7,
//!   "o_value_mode": "all_partitions",
//!   "oracle": { "max_robots": 12, "max_tasks": 4, "cap": 100000000, "bruteforce": true },
//!   "backend": "auto",
//!   "jobs": 1
//! }
//! ```
//!
//! `o_value_mode` is `"all_partitions"`, `{"sampled": {"count": k}}` or
//! `{"explicit": {"profiles": [[5, 5], [9, 1]]}}`; explicit profiles apply to
//! the settings whose robot and task counts they fit. Settings with more
//! than `N/2` tasks are skipped. Every run draws its scenario from a seed
//! mixed from the config seed and the run's coordinates, so results do not
//! depend on `jobs`.

use std::collections::BTreeMap;

use coalition_core::generate::generate_scenario;
use coalition_core::lp::LpOptions;
use coalition_core::oracle::{size_feasible_count, stirling2, DEFAULT_ORACLE_CAP};
use coalition_core::partitions::{integer_partitions, sample_partitions};
use coalition_core::GridEnvironment;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::BackendKind;
use crate::error::{Error, Result};
use crate::io::EnvFile;
use crate::metrics::{solve, RunMetrics, SolveOptions};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OValueMode {
    #[default]
    AllPartitions,
    Sampled { count: usize },
    Explicit { profiles: Vec<Vec<u32>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub max_robots: usize,
    pub max_tasks: usize,
    pub cap: u64,
    pub bruteforce: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_robots: 12,
            max_tasks: 4,
            cap: DEFAULT_ORACLE_CAP,
            bruteforce: true,
        }
    }
}

fn default_grid() -> EnvFile {
    EnvFile {
        length: 100,
        width: 100,
        cell_size: 1.0,
    }
}

fn default_runs() -> usize {
    10
}

fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub robot_counts: Vec<usize>,
    pub task_counts: Vec<usize>,
    #[serde(default = "default_grid")]
    pub grid: EnvFile,
    #[serde(default = "default_runs")]
    pub runs_per_setting: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub o_value_mode: OValueMode,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub backend: BackendKind,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(robot_counts: Vec<usize>, task_counts: Vec<usize>) -> Self {
        ExperimentConfig {
            robot_counts,
            task_counts,
            grid: default_grid(),
            runs_per_setting: default_runs(),
            seed: 0,
            o_value_mode: OValueMode::default(),
            oracle: OracleConfig::default(),
            backend: BackendKind::default(),
            jobs: default_jobs(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// SplitMix64 finalizer folded over `parts`.
pub fn mix_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut z = seed;
    for &p in parts {
        z = z.wrapping_add(p).wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

pub fn profile_label(required: &[u32]) -> String {
    required
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join("-")
}

/// One bench run. Fields ending in `_s` are timings; optional fields are empty
/// in CSV when the measurement was not taken or the run failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub required: String,
    pub partition_index: usize,
    pub run: usize,
    pub seed: u64,
    pub error: Option<String>,
    pub backend: Option<String>,
    pub lp_status: Option<String>,
    pub lp_rounds: Option<usize>,
    pub lp_cuts: Option<usize>,
    pub lp_objective: Option<f64>,
    pub lp_integral: Option<bool>,
    pub lp_final: Option<bool>,
    pub lp_unassigned: Option<usize>,
    pub released: Option<usize>,
    pub value_lp: Option<i64>,
    pub value_final: Option<i64>,
    pub max_value: Option<i64>,
    pub value_gain_pct: Option<f64>,
    pub total_distance: Option<f64>,
    pub normalized_avg_cost: Option<f64>,
    pub oracle_distance: Option<f64>,
    pub ratio_vs_oracle: Option<f64>,
    pub bound_ratio: f64,
    pub runtime_lp_s: Option<f64>,
    pub runtime_repair_s: Option<f64>,
    pub runtime_total_s: Option<f64>,
    pub oracle_runtime_s: Option<f64>,
    pub bruteforce_runtime_s: Option<f64>,
}

impl BenchRow {
    fn new(id: &RunId, outcome: Result<RunMetrics>) -> Self {
        let mut row = BenchRow {
            n: id.n,
            m: id.m,
            required: profile_label(&id.required),
            partition_index: id.partition_index,
            run: id.run,
            seed: id.seed,
            error: None,
            backend: None,
            lp_status: None,
            lp_rounds: None,
            lp_cuts: None,
            lp_objective: None,
            lp_integral: None,
            lp_final: None,
            lp_unassigned: None,
            released: None,
            value_lp: None,
            value_final: None,
            max_value: None,
            value_gain_pct: None,
            total_distance: None,
            normalized_avg_cost: None,
            oracle_distance: None,
            ratio_vs_oracle: None,
            bound_ratio: crate::metrics::bound_ratio(&id.required),
            runtime_lp_s: None,
            runtime_repair_s: None,
            runtime_total_s: None,
            oracle_runtime_s: None,
            bruteforce_runtime_s: None,
        };
        match outcome {
            Err(e) => row.error = Some(e.to_string()),
            Ok(m) => {
                row.backend = Some(m.backend);
                row.lp_status = Some(m.lp_status);
                row.lp_rounds = Some(m.lp_rounds);
                row.lp_cuts = Some(m.lp_cuts);
                row.lp_objective = Some(m.lp_objective);
                row.lp_integral = Some(m.lp_integral);
                row.lp_final = Some(m.lp_final);
                row.lp_unassigned = Some(m.lp_unassigned);
                row.released = Some(m.released);
                row.value_lp = Some(m.value_lp);
                row.value_final = Some(m.value_final);
                row.max_value = Some(m.max_value);
                row.value_gain_pct = Some(m.value_gain_pct);
                row.total_distance = Some(m.total_distance);
                row.normalized_avg_cost = Some(m.normalized_avg_cost);
                row.oracle_distance = m.oracle_distance;
                row.ratio_vs_oracle = m.ratio_vs_oracle;
                row.runtime_lp_s = Some(m.runtime_lp_s);
                row.runtime_repair_s = Some(m.runtime_repair_s);
                row.runtime_total_s = Some(m.runtime_total_s);
                row.oracle_runtime_s = m.oracle_runtime_s;
                row.bruteforce_runtime_s = m.bruteforce_runtime_s;
            }
        }
        row
    }
}

#[derive(Debug, Clone)]
struct RunId {
    n: usize,
    m: usize,
    required: Vec<u32>,
    partition_index: usize,
    run: usize,
    seed: u64,
}

/// Averages over a group of runs. `required` is a profile label, or `all`
/// for the pooled row of an `(N, M)` setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: usize,
    pub m: usize,
    pub required: String,
    pub runs: usize,
    pub failures: usize,
    pub lp_final_fraction: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
    pub bound_ratio: f64,
    pub fraction_above_bound: Option<f64>,
    pub mean_normalized_cost: Option<f64>,
    pub mean_total_distance: Option<f64>,
    pub mean_value_gain_pct: Option<f64>,
    pub mean_runtime_s: Option<f64>,
    pub mean_lp_runtime_s: Option<f64>,
    pub mean_repair_runtime_s: Option<f64>,
    pub mean_oracle_runtime_s: Option<f64>,
    pub mean_bruteforce_runtime_s: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

impl SummaryRow {
    pub fn from_rows(n: usize, m: usize, required: String, rows: &[&BenchRow]) -> Self {
        let ok: Vec<&BenchRow> = rows.iter().copied().filter(|r| r.error.is_none()).collect();
        let col = |f: fn(&BenchRow) -> Option<f64>| mean(ok.iter().filter_map(|r| f(r)));
        let ratios: Vec<(f64, f64)> = ok
            .iter()
            .filter_map(|r| r.ratio_vs_oracle.map(|q| (q, r.bound_ratio)))
            .collect();
        SummaryRow {
            n,
            m,
            required,
            runs: rows.len(),
            failures: rows.len() - ok.len(),
            lp_final_fraction: mean(ok.iter().map(|r| f64::from(u8::from(r.lp_final == Some(true))))),
            mean_ratio: mean(ratios.iter().map(|r| r.0)),
            min_ratio: ratios.iter().map(|r| r.0).reduce(f64::min),
            bound_ratio: mean(rows.iter().map(|r| r.bound_ratio)).unwrap_or(0.0),
            fraction_above_bound: mean(ratios.iter().map(|&(q, b)| f64::from(u8::from(q >= b)))),
            mean_normalized_cost: col(|r| r.normalized_avg_cost),
            mean_total_distance: col(|r| r.total_distance),
            mean_value_gain_pct: col(|r| r.value_gain_pct),
            mean_runtime_s: col(|r| r.runtime_total_s),
            mean_lp_runtime_s: col(|r| r.runtime_lp_s),
            mean_repair_runtime_s: col(|r| r.runtime_repair_s),
            mean_oracle_runtime_s: col(|r| r.oracle_runtime_s),
            mean_bruteforce_runtime_s: col(|r| r.bruteforce_runtime_s),
        }
    }
}

/// Per-profile rows of each setting followed by its pooled row.
pub fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut settings: BTreeMap<(usize, usize), BTreeMap<usize, Vec<&BenchRow>>> = BTreeMap::new();
    for r in rows {
        settings
            .entry((r.n, r.m))
            .or_default()
            .entry(r.partition_index)
            .or_default()
            .push(r);
    }
    let mut out = Vec::new();
    for ((n, m), profiles) in settings {
        for group in profiles.values() {
            out.push(SummaryRow::from_rows(n, m, group[0].required.clone(), group));
        }
        let all: Vec<&BenchRow> = profiles.values().flatten().copied().collect();
        out.push(SummaryRow::from_rows(n, m, "all".into(), &all));
    }
    out
}

/// Pooled rows only, one per `(N, M)` setting.
pub fn pooled(rows: &[BenchRow]) -> Vec<SummaryRow> {
    summarize(rows)
        .into_iter()
        .filter(|r| r.required == "all")
        .collect()
}

fn profiles_for(config: &ExperimentConfig, n: usize, m: usize) -> Vec<Vec<u32>> {
    match &config.o_value_mode {
        OValueMode::AllPartitions => integer_partitions(n, m),
        OValueMode::Sampled { count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, &[u64::MAX, n as u64, m as u64]));
            sample_partitions(n, m, *count, &mut rng)
        }
        OValueMode::Explicit { profiles } => profiles
            .iter()
            .filter(|p| p.len() == m && p.iter().map(|&o| o as usize).sum::<usize>() == n)
            .cloned()
            .collect(),
    }
}

fn runs(config: &ExperimentConfig) -> Vec<RunId> {
    let mut ids = Vec::new();
    for &n in &config.robot_counts {
        for &m in &config.task_counts {
            if m == 0 || 2 * m > n {
                continue;
            }
            for (partition_index, required) in profiles_for(config, n, m).into_iter().enumerate() {
                for run in 0..config.runs_per_setting {
                    let coords = [n as u64, m as u64, partition_index as u64, run as u64];
                    ids.push(RunId {
                        n,
                        m,
                        required: required.clone(),
                        partition_index,
                        run,
                        seed: mix_seed(config.seed, &coords),
                    });
                }
            }
        }
    }
    ids
}

fn execute(config: &ExperimentConfig, grid: GridEnvironment, id: &RunId) -> BenchRow {
    let outcome = (|| {
        let scenario = generate_scenario(id.n, id.m, &id.required, grid, id.seed)?;
        let gated = id.n <= config.oracle.max_robots
            && id.m <= config.oracle.max_tasks
            && size_feasible_count(&scenario)
                .to_u64()
                .is_some_and(|c| c <= config.oracle.cap);
        // Brute force enumerates every labelled partition, a larger count.
        let labelled = stirling2(id.n, id.m) * (1..=id.m as u64).product::<u64>();
        let options = SolveOptions {
            backend: config.backend,
            lp: LpOptions::default(),
            oracle_cap: gated.then_some(config.oracle.cap),
            bruteforce: config.oracle.bruteforce
                && labelled.to_u64().is_some_and(|c| c <= config.oracle.cap),
        };
        Ok::<_, Error>(solve(&scenario, &options)?.metrics)
    })();
    BenchRow::new(id, outcome)
}

/// Runs every configured scenario. Row order is fixed by the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    if config.runs_per_setting == 0 {
        return Err(Error::Invalid("runs_per_setting must be at least 1".into()));
    }
    let grid = GridEnvironment::new(config.grid.length, config.grid.width, config.grid.cell_size)?;
    let ids = runs(config);
    if config.jobs <= 1 {
        return Ok(ids.iter().map(|id| execute(config, grid, id)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(|| ids.par_iter().map(|id| execute(config, grid, id)).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResults {
    pub config: ExperimentConfig,
    pub runs: Vec<BenchRow>,
    pub summary: Vec<SummaryRow>,
}

pub fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub const BENCH_COLUMNS: &[&str] = &[
    "n", "m", "required", "partition_index", "run", "seed", "error", "backend", "lp_status",
    "lp_rounds", "lp_cuts", "lp_objective", "lp_integral", "lp_final", "lp_unassigned", "released",
    "value_lp", "value_final", "max_value", "value_gain_pct", "total_distance",
    "normalized_avg_cost", "oracle_distance", "ratio_vs_oracle", "bound_ratio", "runtime_lp_s",
    "runtime_repair_s", "runtime_total_s", "oracle_runtime_s", "bruteforce_runtime_s",
];

pub const SUMMARY_COLUMNS: &[&str] = &[
    "n", "m", "required", "runs", "failures", "lp_final_fraction", "mean_ratio", "min_ratio",
    "bound_ratio", "fraction_above_bound", "mean_normalized_cost", "mean_total_distance",
    "mean_value_gain_pct", "mean_runtime_s", "mean_lp_runtime_s", "mean_repair_runtime_s",
    "mean_oracle_runtime_s", "mean_bruteforce_runtime_s",
];

pub fn read_rows_csv(text: &str) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Parses a profile label such as `5-3-2`.
pub fn profile_from_label(label: &str) -> Result<Vec<u32>> {
    label
        .split('-')
        .map(|p| p.parse().ok())
        .collect::<Option<Vec<u32>>>()
        .ok_or_else(|| Error::Invalid(format!("bad requirement profile `{label}`")))
}
