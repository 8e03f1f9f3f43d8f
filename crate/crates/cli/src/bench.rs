//! Timing sweeps over K for each method on generated problems.

use std::io::Write;
use std::time::Instant;

use ellsum::generate::{derive_seed, generate_problem, GeneratorConfig};
use ellsum::{objective_logdet, Init, MmConfig, Termination};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::solve::{run_method, Method};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    pub ks: Vec<usize>,
    pub q: usize,
    pub r: usize,
    pub trials: usize,
    pub seed: u64,
    pub noise_floor: f64,
    pub epsilon: f64,
    pub max_iters: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            methods: vec![Method::Mm, Method::Projgrad],
            ks: vec![10, 20, 30, 40, 50],
            q: 5,
            r: 1,
            trials: 20,
            seed: 0,
            noise_floor: 0.1,
            epsilon: 1e-8,
            max_iters: 10_000,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: &str| Err(CliError::Input(m.to_string()));
        if self.methods.is_empty() {
            return bad("--method: at least one method required");
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return bad("--K: need a non-empty list of positive sizes");
        }
        if self.q == 0 || self.r == 0 {
            return bad("--q/--r: dimensions must be positive");
        }
        if self.trials == 0 {
            return bad("--trials: must be at least 1");
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad("--eps: must be positive");
        }
        if self.max_iters == 0 {
            return bad("--max-iters: must be at least 1");
        }
        Ok(())
    }

    /// Seed of the problem and initial weights for one `(K, trial)` cell.
    /// Methods share it so they are compared on identical instances.
    pub fn trial_seed(&self, k: usize, trial: usize) -> u64 {
        derive_seed(self.seed, &[k as u64, trial as u64])
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub method: Method,
    #[serde(rename = "K")]
    pub k: usize,
    pub q: usize,
    pub r: usize,
    pub trial: usize,
    pub time_s: f64,
    pub iters: usize,
    /// Log-det objective at the final weights, whatever the method minimized.
    pub f_final: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub method: Method,
    #[serde(rename = "K")]
    pub k: usize,
    pub q: usize,
    pub r: usize,
    pub trials: usize,
    /// Time statistics over non-degenerate trials; `None` if all degenerated.
    pub mean_time_s: Option<f64>,
    pub min_time_s: Option<f64>,
    pub max_time_s: Option<f64>,
    pub f_final: Vec<Option<f64>>,
    pub iterations: Vec<usize>,
    pub degenerate_trials: Vec<usize>,
    pub seed: u64,
}

pub fn run_trial(
    config: &BenchConfig,
    method: Method,
    k: usize,
    trial: usize,
) -> CliResult<TrialRecord> {
    let seed = config.trial_seed(k, trial);
    let problem = generate_problem(&GeneratorConfig {
        q: config.q,
        r: config.r,
        terms: k,
        seed,
        noise_floor: config.noise_floor,
    })?;
    let mm = MmConfig {
        epsilon: config.epsilon,
        max_iters: config.max_iters,
        init: Init::Random(seed),
        ..MmConfig::default()
    };
    let start = Instant::now();
    let run = run_method(&problem, method, &mm);
    let time_s = start.elapsed().as_secs_f64();

    let (iters, f_final, status) = match run {
        Ok(run) if run.termination != Termination::Degenerate => {
            let f = objective_logdet(&problem, &run.alpha).ok();
            let status = if f.is_some() {
                run.termination.as_str()
            } else {
                "degenerate"
            };
            (run.iterations, f, status)
        }
        Ok(run) => (run.iterations, None, "degenerate"),
        Err(CliError::Degenerate(msg)) => {
            log::warn!("{} K={k} trial {trial}: {msg}", method.as_str());
            (0, None, "degenerate")
        }
        Err(e) => return Err(e),
    };
    Ok(TrialRecord {
        method,
        k,
        q: config.q,
        r: config.r,
        trial,
        time_s,
        iters,
        f_final,
        status: status.to_string(),
    })
}

/// Runs the sweep sequentially in `(method, K, trial)` order.
pub fn run_benchmark(config: &BenchConfig) -> CliResult<(Vec<TrialRecord>, Vec<BenchResult>)> {
    config.validate()?;
    let mut records = Vec::new();
    let mut results = Vec::new();
    for &method in &config.methods {
        for &k in &config.ks {
            let cell: Vec<TrialRecord> = (0..config.trials)
                .map(|t| run_trial(config, method, k, t))
                .collect::<CliResult<_>>()?;
            results.push(summarize(config, method, k, &cell));
            records.extend(cell);
        }
    }
    Ok((records, results))
}

fn summarize(config: &BenchConfig, method: Method, k: usize, cell: &[TrialRecord]) -> BenchResult {
    let ok: Vec<f64> = cell
        .iter()
        .filter(|r| r.status != "degenerate")
        .map(|r| r.time_s)
        .collect();
    let degenerate_trials: Vec<usize> = cell
        .iter()
        .filter(|r| r.status == "degenerate")
        .map(|r| r.trial)
        .collect();
    if !degenerate_trials.is_empty() {
        log::warn!(
            "{} K={k}: {} degenerate trial(s) excluded from timing",
            method.as_str(),
            degenerate_trials.len()
        );
    }
    let (mean, min, max) = if ok.is_empty() {
        (None, None, None)
    } else {
        (
            Some(ok.iter().sum::<f64>() / ok.len() as f64),
            ok.iter().copied().reduce(f64::min),
            ok.iter().copied().reduce(f64::max),
        )
    };
    BenchResult {
        method,
        k,
        q: config.q,
        r: config.r,
        trials: cell.len(),
        mean_time_s: mean,
        min_time_s: min,
        max_time_s: max,
        f_final: cell.iter().map(|r| r.f_final).collect(),
        iterations: cell.iter().map(|r| r.iters).collect(),
        degenerate_trials,
        seed: config.seed,
    }
}

pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)
            .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}
