use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use coalition::backend::BackendKind;
use coalition::bench::{run_experiment, summarize, to_csv, BenchResults, ExperimentConfig, BENCH_COLUMNS, SUMMARY_COLUMNS};
use coalition::io::{read_scenario, scenario_to_string, write_text, OracleSummary, StructureFile};
use coalition::lpdump::write_lp;
use coalition::metrics::{solve, SolveOptions};
use coalition::plot::{plot_data, read_runs, PlotKind};
use coalition::{Error, Result};
use coalition_core::generate::generate_scenario;
use coalition_core::lp::build_lp;
use coalition_core::oracle::{brute_force_allocation, optimal_allocation, DEFAULT_ORACLE_CAP};
use coalition_core::partitions::random_partition;
use coalition_core::{AffinityGraph, CoalitionStructure, GridEnvironment, Scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "coalition", version, about = "Multi-robot coalition formation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMethod {
    /// Enumerate only structures with every coalition at its required size.
    SizeFeasible,
    /// Enumerate every labelled partition and keep the maximum-value ones.
    BruteForce,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario.
    Generate {
        #[arg(short = 'n', long)]
        robots: usize,
        #[arg(short = 'm', long)]
        tasks: usize,
        /// Comma-separated required counts; drawn at random when omitted.
        #[arg(long, value_delimiter = ',')]
        required: Option<Vec<u32>>,
        #[arg(long, default_value_t = 100)]
        length: u32,
        #[arg(long, default_value_t = 100)]
        width: u32,
        #[arg(long, default_value_t = 1.0)]
        cell_size: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Allocate robots to tasks.
    Solve {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendKind,
        /// Write the full relaxed LP in CPLEX LP format.
        #[arg(long)]
        lp_dump: Option<PathBuf>,
        /// Also compute the exact optimum and the ratio to it.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: u64,
    },
    /// Exact minimum-distance allocation by enumeration.
    Oracle {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "size-feasible")]
        method: OracleMethod,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run an experiment sweep from a JSON config.
    Bench {
        config: PathBuf,
        /// Output directory for runs and summary tables.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        oracle_cap: Option<u64>,
        #[arg(long, value_enum)]
        backend: Option<BackendKind>,
    },
    /// Aggregate bench runs into a plot-ready CSV table.
    Plotdata {
        /// `runs.csv` or `results.json` written by `bench`.
        metrics: PathBuf,
        #[arg(long, value_enum)]
        kind: PlotKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn assignment_csv(cs: &CoalitionStructure, scenario: &Scenario) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["robot_id", "task_id", "distance"])?;
    for (robot, task) in cs.assignment(scenario.robot_count()).iter().enumerate() {
        let (task, dist) = match task {
            Some(t) => (t.to_string(), scenario.robot_task_distance(robot, *t).to_string()),
            None => (String::new(), String::new()),
        };
        w.write_record([robot.to_string(), task, dist])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn dump_lp(path: &Path, scenario: &Scenario) -> Result<()> {
    let problem = build_lp(&AffinityGraph::build(scenario)?);
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_lp(&mut w, &problem, problem.triangles())
        .and_then(|()| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate {
            robots,
            tasks,
            required,
            length,
            width,
            cell_size,
            seed,
            out,
        } => {
            let grid = GridEnvironment::new(length, width, cell_size)?;
            let required = match required {
                Some(r) => r,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    random_partition(robots, tasks, &mut rng).ok_or_else(|| {
                        Error::Invalid(format!("{robots} robots cannot fill {tasks} tasks"))
                    })?
                }
            };
            let scenario = generate_scenario(robots, tasks, &required, grid, seed)?;
            write_text(out.as_deref(), &scenario_to_string(&scenario))
        }
        Command::Solve {
            scenario,
            out,
            format,
            backend,
            lp_dump,
            oracle,
            oracle_cap,
        } => {
            let scenario = read_scenario(&scenario)?;
            if let Some(path) = lp_dump {
                dump_lp(&path, &scenario)?;
            }
            let options = SolveOptions {
                backend,
                oracle_cap: oracle.then_some(oracle_cap),
                ..SolveOptions::default()
            };
            let solved = solve(&scenario, &options)?;
            let text = match format {
                Format::Json => json_line(&StructureFile::new(
                    &solved.allocation.structure,
                    Some(solved.metrics),
                )),
                Format::Csv => assignment_csv(&solved.allocation.structure, &scenario)?,
            };
            write_text(out.as_deref(), &text)
        }
        Command::Oracle {
            scenario,
            method,
            oracle_cap,
            out,
            format,
        } => {
            let scenario = read_scenario(&scenario)?;
            let start = Instant::now();
            let (cs, total_distance) = match method {
                OracleMethod::SizeFeasible => optimal_allocation(&scenario, oracle_cap)?,
                OracleMethod::BruteForce => brute_force_allocation(&scenario, oracle_cap)?,
            };
            let runtime_s = start.elapsed().as_secs_f64();
            let text = match format {
                Format::Json => {
                    let mut file = StructureFile::new(&cs, None);
                    file.oracle = Some(OracleSummary {
                        method: match method {
                            OracleMethod::SizeFeasible => "size-feasible",
                            OracleMethod::BruteForce => "brute-force",
                        }
                        .into(),
                        total_distance,
                        runtime_s,
                    });
                    json_line(&file)
                }
                Format::Csv => assignment_csv(&cs, &scenario)?,
            };
            write_text(out.as_deref(), &text)
        }
        Command::Bench {
            config,
            out,
            format,
            seed,
            runs,
            jobs,
            oracle_cap,
            backend,
        } => {
            let text = fs::read_to_string(&config).map_err(|e| Error::io(&config, e))?;
            let mut config = ExperimentConfig::parse(&text)?;
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(r) = runs {
                config.runs_per_setting = r;
            }
            if let Some(j) = jobs {
                config.jobs = j;
            }
            if let Some(c) = oracle_cap {
                config.oracle.cap = c;
            }
            if let Some(b) = backend {
                config.backend = b;
            }
            let rows = run_experiment(&config)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("warning: {failed} of {} runs failed; see the error column", rows.len());
            }
            let summary = summarize(&rows);
            fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            match format {
                Format::Csv => {
                    write_file(&out, "runs.csv", &to_csv(&rows, BENCH_COLUMNS)?)?;
                    write_file(&out, "summary.csv", &to_csv(&summary, SUMMARY_COLUMNS)?)?;
                }
                Format::Json => {
                    let results = BenchResults {
                        config,
                        runs: rows,
                        summary,
                    };
                    write_file(&out, "results.json", &json_line(&results))?;
                }
            }
            Ok(())
        }
        Command::Plotdata { metrics, kind, out } => {
            let rows = read_runs(&metrics)?;
            write_text(out.as_deref(), &plot_data(&rows, kind)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
