//! Command-line front end: solve problem files, run the oracle and the
//! benchmark suites, validate inputs.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use sldp::bench::{
    caroe_grid_table, run_caroe_row, run_control_suite, write_grid_csv, CaroeSchultzSpec,
    ControlProblemSpec, Oracle, OracleTable,
};
use sldp::cuts::{CutFamily, RhoSchedule};
use sldp::engine::{run, Mode, RhoRule};
use sldp::io::{write_run_artifacts, ProblemFile};
use sldp::milp::SolverOptions;
use sldp::{Error, Result};

#[derive(Parser)]
#[command(name = "sldp", version, about = "Lipschitz cutting-plane solver for multistage stochastic MILPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the cutting-plane method on a problem file.
    Solve(SolveArgs),
    /// Exact optimum by exhaustive backward recursion.
    Oracle(OracleArgs),
    /// Run a benchmark suite and print its table.
    Bench(BenchArgs),
    /// Check a problem file without solving it.
    Validate {
        #[arg(long)]
        problem: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Caroe,
    Control,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum CutsArg {
    Rn,
    Sb,
    Sab,
}

impl From<CutsArg> for CutFamily {
    fn from(c: CutsArg) -> Self {
        match c {
            CutsArg::Rn => CutFamily::ReverseNorm,
            CutsArg::Sb => CutFamily::StrengthenedBenders,
            CutsArg::Sab => CutFamily::StrengthenedAugBenders,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    cuts: Option<CutsArg>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    rho0: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "rho-max")]
    rho_max: Option<f64>,
    /// Iterations between opening increases.
    #[arg(long = "rho-period")]
    rho_period: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "sim-samples")]
    sim_samples: Option<usize>,
    #[arg(long, default_value = "sldp-out")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, conflicts_with = "suite", required_unless_present = "suite")]
    problem: Option<PathBuf>,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Grid spacing of the first-stage value table.
    #[arg(long, default_value_t = 1.0)]
    spacing: f64,
    #[arg(long, default_value = "sldp-out")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long)]
    iters: Option<usize>,
    /// Also run the continuous first-stage variants.
    #[arg(long)]
    continuous: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "sim-samples", default_value_t = 200)]
    sim_samples: usize,
    #[arg(long, default_value = "sldp-out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SLDP_LOG", "warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Bench(a) => bench(a),
        Command::Validate { problem } => validate(&problem),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::MalformedProblem(_) | Error::InvalidConfig(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn validate(path: &Path) -> Result<()> {
    let file = ProblemFile::read(path)?;
    let model = file.to_model()?;
    println!(
        "ok: {} stages, {} scenario paths",
        model.horizon(),
        model.scenarios.tree_size()
    );
    Ok(())
}

fn solve(a: SolveArgs) -> Result<()> {
    let file = ProblemFile::read(&a.problem)?;
    let model = file.to_model()?;
    let mut cfg = file.config.clone().unwrap_or_default();
    if let Some(m) = a.mode {
        cfg.mode = match m {
            ModeArg::Full => Mode::Full,
            ModeArg::Sampled => Mode::Sampled,
        };
    }
    if let Some(c) = a.cuts {
        cfg.cuts = c.into();
    }
    if let Some(n) = a.iters {
        cfg.max_iterations = n;
    }
    if a.rho0.is_some() || a.gamma.is_some() || a.rho_max.is_some() || a.rho_period.is_some() {
        let mut s = match cfg.rho {
            RhoRule::Schedule(s) => s,
            _ => RhoSchedule::default(),
        };
        s.rho0 = a.rho0.unwrap_or(s.rho0);
        s.gamma = a.gamma.unwrap_or(s.gamma);
        s.rho_max = a.rho_max.unwrap_or(s.rho_max);
        s.period = a.rho_period.unwrap_or(s.period);
        cfg.rho = RhoRule::Schedule(s);
    }
    if let Some(d) = a.delta {
        cfg.delta = d;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = a.sim_samples {
        cfg.sim_samples = n;
    }
    cfg.validate(&model)?;
    info!("solving {} with {:?} cuts", a.problem.display(), cfg.cuts);
    let result = run(&model, &cfg)?;
    write_run_artifacts(&a.out, &result).map_err(io_error)?;
    print!("lower bound {:.6} after {} iterations", result.lower_bound, result.iterations.len());
    if let Some(p) = result.policy {
        print!(", simulated cost {:.6} +- {:.6}", p.mean, p.std_error);
    }
    println!();
    Ok(())
}

fn write_table(dir: &Path, name: &str, table: &OracleTable) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_error)?;
    let f = File::create(dir.join(name)).map_err(io_error)?;
    write_grid_csv(f, table).map_err(io_error)
}

fn oracle(a: OracleArgs) -> Result<()> {
    if !(a.spacing > 0.0) {
        return Err(Error::InvalidConfig("grid spacing must be positive".into()));
    }
    match (a.suite, &a.problem) {
        (Some(Suite::Caroe), _) => {
            println!("{:>3} {:>10}", "N", "objective");
            for n in [2, 3, 6] {
                let spec = CaroeSchultzSpec {
                    n,
                    discrete_first_stage: true,
                };
                let (objective, table) = caroe_grid_table(&spec, a.spacing)?;
                write_table(&a.out, &format!("oracle_caroe_n{n}.csv"), &table)?;
                println!("{n:>3} {objective:>10.3}");
            }
            Ok(())
        }
        (Some(Suite::Control), _) => Err(Error::InvalidConfig(
            "the control problem is too large for exhaustive recursion".into(),
        )),
        (None, Some(path)) => {
            let model = ProblemFile::read(path)?.to_model()?;
            let mut oracle = Oracle::new(&model, SolverOptions::default(), 1_000_000);
            let value = oracle.root_value()?;
            if model.horizon() > 1 {
                let t = model.template(1);
                let points = sldp::bench::grid_points(&t.state_lower, &t.state_upper, a.spacing);
                let mut rows = Vec::with_capacity(points.len());
                for x in points {
                    let v = oracle.expected_ctg(1, &x)?;
                    rows.push((x, v));
                }
                let table = OracleTable {
                    stage: 1,
                    exact: true,
                    points: rows,
                };
                write_table(&a.out, "oracle_stage1.csv", &table)?;
            }
            println!("objective {value:.6}");
            Ok(())
        }
        (None, None) => Err(Error::InvalidConfig("need --problem or --suite".into())),
    }
}

fn bench(a: BenchArgs) -> Result<()> {
    std::fs::create_dir_all(&a.out).map_err(io_error)?;
    match a.suite {
        Suite::Caroe => {
            let iters = a.iters.unwrap_or(200);
            let mut w = csv::Writer::from_path(a.out.join("bench_caroe.csv")).map_err(|e| io_error(e.into()))?;
            println!(
                "{:>3} {:>10} {:>10} {:>10} {:>10} {:>13} {:>9} {:>9}",
                "N", "first", "objective", "SB lb", "SAB lb", "remaining %", "SB s", "SAB s"
            );
            let kinds: &[bool] = if a.continuous { &[true, false] } else { &[true] };
            for &discrete in kinds {
                for n in [2, 3, 6] {
                    let spec = CaroeSchultzSpec {
                        n,
                        discrete_first_stage: discrete,
                    };
                    let row = run_caroe_row(&spec, iters)?;
                    println!(
                        "{:>3} {:>10} {:>10.3} {:>10.3} {:>10.3} {:>13.2} {:>9.2} {:>9.2}",
                        n,
                        if discrete { "discrete" } else { "continuous" },
                        row.objective,
                        row.sb_lb,
                        row.sab_lb,
                        row.remaining_percent(),
                        row.sb_secs,
                        row.sab_secs
                    );
                    w.serialize(&row).map_err(|e| io_error(e.into()))?;
                    if discrete {
                        let (_, table) = caroe_grid_table(&spec, 1.0)?;
                        write_table(&a.out, &format!("oracle_caroe_n{n}.csv"), &table)?;
                    }
                }
            }
            w.flush().map_err(io_error)
        }
        Suite::Control => {
            let spec = ControlProblemSpec::default();
            let rows = run_control_suite(&spec, a.iters.unwrap_or(100), a.sim_samples, a.seed)?;
            let mut w = csv::Writer::from_path(a.out.join("bench_control.csv")).map_err(|e| io_error(e.into()))?;
            println!("{:>6} {:>10} {:>10} {:>10} {:>9}", "cuts", "lb", "ub", "ub se", "secs");
            for row in &rows {
                println!(
                    "{:>6} {:>10.3} {:>10.3} {:>10.3} {:>9.1}",
                    row.method.as_str(),
                    row.lb,
                    row.ub_mean,
                    row.ub_std_error,
                    row.secs
                );
                w.serialize(row).map_err(|e| io_error(e.into()))?;
            }
            w.flush().map_err(io_error)
        }
    }
}
