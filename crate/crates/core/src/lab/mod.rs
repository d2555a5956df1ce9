//! Trial sweeps: sample `d` unitaries per trial, compute `s₂`, and persist one record per
//! trial.
//!
//! Unitary `s` of trial `t` comes from RNG stream `(seed, t, s)` and the spectral start
//! vectors from `(seed, t, SPECTRAL_SLOT)`, so the records do not depend on the number of
//! worker threads or on the order in which trials finish.

mod format;
mod records;

use std::fmt;
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

pub use format::sig12;
pub use records::{
    csv_header_line, csv_row, parse_csv, parse_json, read_records, render_csv, render_json, write_csv, write_json,
    CSV_HEADER,
};

use crate::channels::MixedUnitaryChannel;
use crate::designs::{load_measure, Sampler, SamplerKind};
use crate::error::{LabError, Result};
use crate::rng::{stream, SPECTRAL_SLOT};
use crate::spectral::{optimal_reference, pisier_lower_bound, second_singular_value_with, Solver, SpectralOptions};

/// Default optimality slack: a trial passes when `s₂ ≤ (1 + 0.3)·2/√d`.
pub const DEFAULT_SLACK: f64 = 0.3;

/// Sampler as named on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SamplerSpec {
    Haar,
    /// Uniform Clifford on `log₂ n` qubits.
    Clifford,
    Pauli,
    File(PathBuf),
}

impl FromStr for SamplerSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(SamplerSpec::Haar),
            "clifford" => Ok(SamplerSpec::Clifford),
            "pauli" => Ok(SamplerSpec::Pauli),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(SamplerSpec::File(PathBuf::from(p))),
                _ => Err(LabError::InvalidConfig(format!("unknown sampler {s:?} (expected haar, clifford, pauli or file:PATH)"))),
            },
        }
    }
}

impl fmt::Display for SamplerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerSpec::Haar => write!(f, "haar"),
            SamplerSpec::Clifford => write!(f, "clifford"),
            SamplerSpec::Pauli => write!(f, "pauli"),
            SamplerSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl SamplerSpec {
    pub fn resolve(&self, n: usize) -> Result<SamplerKind> {
        let kind = match self {
            SamplerSpec::Haar => SamplerKind::Haar(n),
            SamplerSpec::Clifford => {
                if !n.is_power_of_two() || n < 2 {
                    return Err(LabError::InvalidConfig(format!("clifford sampler needs n = 2^N, got {n}")));
                }
                SamplerKind::CliffordQubits(n.trailing_zeros() as usize)
            }
            SamplerSpec::Pauli => SamplerKind::GeneralizedPauli(n),
            SamplerSpec::File(path) => {
                let mu = load_measure(path)?;
                if mu.n() != n {
                    return Err(LabError::InvalidConfig(format!("measure in {} has n = {}, not {n}", path.display(), mu.n())));
                }
                SamplerKind::Finite(Arc::new(mu))
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialConfig {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub sampler: SamplerSpec,
    pub trials: usize,
    pub seed: u64,
    pub slack: f64,
    /// Regime exponent ε in `d ≥ (log n)^{4+ε}` (expectation) and `(log n)^{8+ε}`
    /// (high probability); only reported.
    pub epsilon: f64,
    pub solver: Solver,
    pub dense_limit: usize,
    /// Store measured wall time instead of 0 (makes reruns differ in `wall_ms`).
    pub record_timing: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl TrialConfig {
    pub fn new(n: usize, d: usize, k: usize, sampler: SamplerSpec, trials: usize, seed: u64) -> Self {
        Self {
            n,
            d,
            k,
            sampler,
            trials,
            seed,
            slack: DEFAULT_SLACK,
            epsilon: 1.0,
            solver: Solver::default(),
            dense_limit: SpectralOptions::default().dense_limit,
            record_timing: false,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(LabError::InvalidConfig(format!("need 1 <= k <= n, got n = {}, k = {}", self.n, self.k)));
        }
        if self.trials == 0 || self.d == 0 {
            return Err(LabError::InvalidConfig("trials and d must be >= 1".into()));
        }
        if !(self.slack >= 0.0) {
            return Err(LabError::InvalidConfig("slack must be nonnegative".into()));
        }
        if self.trials > u32::MAX as usize || self.d >= u32::MAX as usize {
            return Err(LabError::InvalidConfig("trial or unitary count exceeds the RNG stream range".into()));
        }
        Ok(())
    }

    /// `(log n)^{base+ε}`; `base` is 4 for the expectation bound and 8 for the tail bound.
    pub fn regime_threshold(&self, base: f64) -> f64 {
        (self.n as f64).ln().powf(base + self.epsilon)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub sampler: String,
    pub seed: u64,
    pub s2: f64,
    pub pisier_lb: f64,
    pub two_over_sqrt_d: f64,
    /// `s₂ ≤ (1 + slack)·2/√d` and the solver converged.
    pub passes: bool,
    pub slack: f64,
    pub iterations: usize,
    /// Relative residual of the iterative solve; NaN when it did not converge.
    pub residual: f64,
    pub wall_ms: u64,
}

/// Runs one trial. A solver that fails to converge yields a failing record carrying the
/// last estimate.
pub fn run_trial(cfg: &TrialConfig, kind: &SamplerKind, trial: usize) -> Result<TrialRecord> {
    let mut sampler = Sampler::for_trial(kind.clone(), cfg.seed, trial as u32)?;
    let channel = MixedUnitaryChannel::new(sampler.sample_many(cfg.d), cfg.k)?;
    let opts = SpectralOptions { dense_limit: cfg.dense_limit, solver: cfg.solver, ..SpectralOptions::default() };
    let mut rng = stream(cfg.seed, trial as u32, SPECTRAL_SLOT);
    let reference = optimal_reference(cfg.d);
    let (s2, iterations, residual, wall, converged) = match second_singular_value_with(&channel, &opts, &mut rng) {
        Ok(r) => (r.s2_estimate, r.iterations, r.residual, r.wall_time_ms, true),
        Err(LabError::NotConverged { iterations, last_estimate }) => {
            log::warn!("trial {trial}: solver did not converge after {iterations} iterations");
            (last_estimate, iterations, f64::NAN, 0, false)
        }
        Err(e) => return Err(e),
    };
    Ok(TrialRecord {
        trial,
        n: cfg.n,
        d: cfg.d,
        k: cfg.k,
        sampler: cfg.sampler.to_string(),
        seed: cfg.seed,
        s2,
        pisier_lb: pisier_lower_bound(cfg.d),
        two_over_sqrt_d: reference,
        passes: converged && s2 <= reference * (1.0 + cfg.slack),
        slack: cfg.slack,
        iterations,
        residual,
        wall_ms: if cfg.record_timing { wall } else { 0 },
    })
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| LabError::InvalidConfig(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
        None => Ok(job()),
    }
}

fn run_indices(cfg: &TrialConfig, kind: &SamplerKind, todo: &[usize], sink: Option<&Mutex<(std::fs::File, PathBuf)>>) -> Result<Vec<TrialRecord>> {
    with_pool(cfg.threads, || {
        todo.par_iter()
            .map(|&t| {
                let rec = run_trial(cfg, kind, t)?;
                log::info!("trial {t}: s2 = {} (reference {})", sig12(rec.s2), sig12(rec.two_over_sqrt_d));
                if let Some(sink) = sink {
                    let mut guard = sink.lock().expect("checkpoint lock");
                    let (file, path) = &mut *guard;
                    records::append_line(file, path, &csv_row(&rec))?;
                }
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()
    })?
}

fn log_regime(cfg: &TrialConfig) {
    for base in [4.0, 8.0] {
        let threshold = cfg.regime_threshold(base);
        log::info!(
            "n = {}, d = {}, k = {}: d {} (log n)^({base}+{}) = {}",
            cfg.n,
            cfg.d,
            cfg.k,
            if cfg.d as f64 >= threshold { ">=" } else { "<" },
            cfg.epsilon,
            sig12(threshold)
        );
    }
}

/// All trials of `cfg`, sorted by trial index.
pub fn run_trials(cfg: &TrialConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let kind = cfg.sampler.resolve(cfg.n)?;
    log_regime(cfg);
    let todo: Vec<usize> = (0..cfg.trials).collect();
    let mut out = run_indices(cfg, &kind, &todo, None)?;
    out.sort_by_key(|r| r.trial);
    Ok(out)
}

/// Like [`run_trials`], appending each finished record to the CSV at `checkpoint`. Records
/// already in that file (from an interrupted run with the same configuration) are reused.
pub fn run_trials_checkpointed(cfg: &TrialConfig, checkpoint: &Path) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let kind = cfg.sampler.resolve(cfg.n)?;
    log_regime(cfg);
    let mut done: Vec<TrialRecord> = if checkpoint.exists() {
        let text = std::fs::read_to_string(checkpoint).map_err(|e| LabError::io(checkpoint, e))?;
        if text.trim().is_empty() {
            Vec::new()
        } else {
            parse_csv(&text)?
        }
    } else {
        Vec::new()
    };
    let label = cfg.sampler.to_string();
    for r in &done {
        if (r.n, r.d, r.k, r.seed) != (cfg.n, cfg.d, cfg.k, cfg.seed) || r.sampler != label || r.trial >= cfg.trials {
            return Err(LabError::InvalidConfig(format!(
                "checkpoint {} holds trial {} from a different configuration",
                checkpoint.display(),
                r.trial
            )));
        }
    }
    done.sort_by_key(|r| r.trial);
    done.dedup_by_key(|r| r.trial);
    let fresh = !checkpoint.exists() || std::fs::metadata(checkpoint).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = OpenOptions::new().create(true).append(true).open(checkpoint).map_err(|e| LabError::io(checkpoint, e))?;
    if fresh {
        records::append_line(&mut file, checkpoint, &csv_header_line())?;
    }
    let todo: Vec<usize> = (0..cfg.trials).filter(|t| done.binary_search_by_key(t, |r| r.trial).is_err()).collect();
    log::info!("{} trials cached, {} to run", done.len(), todo.len());
    let sink = Mutex::new((file, checkpoint.to_path_buf()));
    let mut out = run_indices(cfg, &kind, &todo, Some(&sink))?;
    out.extend(done);
    out.sort_by_key(|r| r.trial);
    Ok(out)
}
