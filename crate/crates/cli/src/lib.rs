//! Library side of the `ellsum` command: problem files, solving, verification
//! and benchmark sweeps. The binary in `main.rs` is a thin clap wrapper.

pub mod bench;
pub mod error;
pub mod io;
pub mod solve;

pub use bench::{run_benchmark, BenchConfig, BenchResult, TrialRecord};
pub use error::{CliError, CliResult};
pub use io::ProblemFile;
pub use solve::{solve_problem, verify_solution, Method, SolveOptions, SolveOutput, VerifyOutput};

use ellsum::generate::{generate_problem, GeneratorConfig};

/// Generated problem as a file, with `F`, `C`, `G` written out explicitly.
pub fn generate_file(config: &GeneratorConfig) -> CliResult<ProblemFile> {
    Ok(ProblemFile::from_problem(&generate_problem(config)?))
}

pub fn read_problem(path: &std::path::Path) -> CliResult<ProblemFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    ProblemFile::parse(&text)
}
