use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ellsum::generate::GeneratorConfig;
use ellsum::{Init, MmConfig};
use ellsum_cli::bench::write_csv;
use ellsum_cli::{
    generate_file, read_problem, run_benchmark, solve_problem, verify_solution, BenchConfig,
    CliError, CliResult, Method, SolveOptions, SolveOutput,
};

#[derive(Parser)]
#[command(
    name = "ellsum",
    version,
    about = "Bounding ellipsoids for sums of matrix ellipsoids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Trace,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutArg {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long, value_enum, default_value_t = InitArg::Trace)]
    init: InitArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn config(&self) -> MmConfig {
        MmConfig {
            epsilon: self.eps,
            max_iters: self.max_iters,
            init: match self.init {
                InitArg::Trace => Init::TraceOptimal,
                InitArg::Random => Init::Random(self.seed),
            },
            ..MmConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a random problem file (F_k = I, Q_k = N N^T + floor I) to stdout.
    Generate {
        #[arg(long, default_value_t = 5)]
        q: usize,
        /// 1 gives R_k = G_k = 1; larger values draw R_k like Q_k.
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long = "K", default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        noise_floor: f64,
    },
    /// Compute a bounding ellipsoid for a problem file; JSON on stdout.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Mm)]
        method: Method,
        #[command(flatten)]
        solver: SolverArgs,
        /// Boundary sum-samples to spot-check against the result.
        #[arg(long, default_value_t = 0)]
        check_containment: usize,
    },
    /// Check a `solve` result against its problem file.
    Verify {
        problem: PathBuf,
        solution: PathBuf,
        #[arg(long, default_value_t = 1000)]
        check_containment: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Timing sweep over K on generated problems.
    Bench {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "mm,projgrad")]
        method: Vec<Method>,
        #[arg(long = "K", value_delimiter = ',', default_value = "10,20,30,40,50")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 0.1)]
        noise_floor: f64,
        /// csv: one row per trial; json: per-(method, K) summary.
        #[arg(long, value_enum, default_value_t = OutArg::Csv)]
        out: OutArg,
    },
}

fn print_json<T: serde::Serialize>(value: &T) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value).map_err(std::io::Error::other)?;
    writeln!(stdout)?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate {
            q,
            r,
            k,
            seed,
            noise_floor,
        } => {
            let file = generate_file(&GeneratorConfig {
                q,
                r,
                terms: k,
                seed,
                noise_floor,
            })?;
            print_json(&file)
        }
        Command::Solve {
            file,
            method,
            solver,
            check_containment,
        } => {
            let problem = read_problem(&file)?.to_problem()?;
            let opts = SolveOptions {
                method,
                config: solver.config(),
                check_containment,
                seed: solver.seed,
            };
            let out = solve_problem(&problem, &opts)?;
            print_json(&out)?;
            if out.is_degenerate() {
                return Err(CliError::Degenerate(
                    "solver stopped at a degenerate point".into(),
                ));
            }
            if let Some(c) = out.containment.as_ref().filter(|c| c.violations > 0) {
                return Err(CliError::Verification(format!(
                    "{} of {} samples outside the bound",
                    c.violations, c.samples
                )));
            }
            Ok(())
        }
        Command::Verify {
            problem,
            solution,
            check_containment,
            seed,
        } => {
            let problem = read_problem(&problem)?.to_problem()?;
            let text = std::fs::read_to_string(&solution)
                .map_err(|e| CliError::Input(format!("{}: {e}", solution.display())))?;
            let de = &mut serde_json::Deserializer::from_str(&text);
            let sol: SolveOutput = serde_path_to_error::deserialize(de)
                .map_err(|e| CliError::Input(format!("at `{}`: {}", e.path(), e.inner())))?;
            let out = verify_solution(&problem, &sol, check_containment, seed)?;
            print_json(&out)?;
            if out.passed {
                Ok(())
            } else {
                Err(CliError::Verification(
                    "stored bound does not cover the sum".into(),
                ))
            }
        }
        Command::Bench {
            method,
            k,
            q,
            r,
            trials,
            seed,
            eps,
            max_iters,
            noise_floor,
            out,
        } => {
            let config = BenchConfig {
                methods: method,
                ks: k,
                q,
                r,
                trials,
                seed,
                noise_floor,
                epsilon: eps,
                max_iters,
            };
            let (records, results) = run_benchmark(&config)?;
            match out {
                OutArg::Csv => write_csv(&records, std::io::stdout().lock()),
                OutArg::Json => print_json(&results),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ellsum: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
