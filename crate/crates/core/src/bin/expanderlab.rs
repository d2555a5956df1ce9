use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use expanderlab::designs::{design_defect, enumerate_clifford_1qubit, enumerate_pauli, load_measure, DesignMeasure};
use expanderlab::lab::{
    render_csv, render_json, run_trials, run_trials_checkpointed, sig12, write_csv, write_json, SamplerSpec,
    TrialConfig, DEFAULT_SLACK,
};
use expanderlab::spectral::{Solver, DEFAULT_DENSE_LIMIT};
use expanderlab::verify::{run_jobs, LemmaId, VerifyJob};
use expanderlab::weingarten::wg_exact;
use expanderlab::{LabError, Result};

#[derive(Parser)]
#[command(name = "expanderlab", version, about = "Spectral gaps of random mixed-unitary channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sample channels and record s2 per trial.
    Run {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// haar, clifford, pauli or file:PATH
        #[arg(long, default_value = "haar")]
        sampler: SamplerSpec,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SLACK)]
        slack: f64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, env = "EXPANDERLAB_THREADS")]
        threads: Option<usize>,
        /// lanczos or power
        #[arg(long, default_value = "lanczos")]
        solver: Solver,
        #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
        dense_limit: usize,
        /// Store measured wall times (records then differ between reruns).
        #[arg(long)]
        record_timing: bool,
        /// Append-mode CSV of finished trials; an existing file is resumed.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Check lemma identities; prints one JSON report per line.
    Verify {
        #[arg(long = "lemma", required = true, num_args = 1..)]
        lemmas: Vec<LemmaId>,
        /// clifford1q, pauli<N>, haar<N> or file:PATH
        #[arg(long, default_value = "clifford1q")]
        design: String,
        /// Copy number for the *_k lemmas, the projector and the moment oracle.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Support size used by the rp check.
        #[arg(long, default_value_t = 16)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the exact Weingarten table, one cycle type per line.
    Weingarten {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Print the k-design defect of a measure file.
    Defect {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        k: usize,
        /// Exit status is 0 iff the defect is at most this.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

enum Design {
    Finite(DesignMeasure),
    Haar(usize),
}

fn parse_design(s: &str) -> Result<Design> {
    if s == "clifford1q" {
        return Ok(Design::Finite(enumerate_clifford_1qubit()));
    }
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(Design::Finite(load_measure(path)?));
    }
    let bad = || LabError::InvalidConfig(format!("unknown design {s:?} (expected clifford1q, pauliN, haarN or file:PATH)"));
    if let Some(n) = s.strip_prefix("pauli") {
        return Ok(Design::Finite(enumerate_pauli(n.parse().map_err(|_| bad())?)?));
    }
    if let Some(n) = s.strip_prefix("haar") {
        return Ok(Design::Haar(if n.is_empty() { 2 } else { n.parse().map_err(|_| bad())? }));
    }
    Err(bad())
}

fn verify_job(lemma: LemmaId, design: &Design, k: usize, d: usize, p: usize, samples: usize) -> VerifyJob {
    let n = match design {
        Design::Finite(mu) => mu.n(),
        Design::Haar(n) => *n,
    };
    match (lemma, design) {
        (LemmaId::Sigma, Design::Finite(mu)) => VerifyJob::Sigma(mu.clone(), 1),
        (LemmaId::SigmaK, Design::Finite(mu)) => VerifyJob::Sigma(mu.clone(), k),
        (LemmaId::Upsilon, Design::Finite(mu)) => VerifyJob::Upsilon(mu.clone()),
        (LemmaId::Upsilon, Design::Haar(n)) => VerifyJob::UpsilonMonteCarlo { n: *n, samples },
        (LemmaId::UpsilonK, Design::Finite(mu)) => VerifyJob::UpsilonK(mu.clone(), k),
        (LemmaId::UpsilonK, Design::Haar(n)) => VerifyJob::UpsilonKMonteCarlo { n: *n, k, samples },
        (LemmaId::Rp, _) => VerifyJob::Rp { n, k: 1, d, p },
        (LemmaId::RpK, _) => VerifyJob::Rp { n, k, d, p },
        (LemmaId::Projector, _) => VerifyJob::Projector { n, k },
        (LemmaId::MomentOracle, Design::Finite(mu)) => VerifyJob::MomentEnumerated(mu.clone(), k),
        (LemmaId::MomentOracle, Design::Haar(n)) => VerifyJob::MomentOracle { n: *n, k, samples },
        // sigma identities are pointwise, so a Haar sample stands in for the law
        (LemmaId::Sigma | LemmaId::SigmaK, Design::Haar(n)) => {
            let u = expanderlab::designs::sample_haar(*n, &mut expanderlab::rng::seeded(0));
            let mu = DesignMeasure::uniform(vec![u], 0).expect("Haar sample is unitary");
            VerifyJob::Sigma(mu, if lemma == LemmaId::Sigma { 1 } else { k })
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            n,
            d,
            k,
            sampler,
            trials,
            seed,
            slack,
            epsilon,
            out,
            format,
            threads,
            solver,
            dense_limit,
            record_timing,
            checkpoint,
        } => {
            let mut cfg = TrialConfig::new(n, d, k, sampler, trials, seed);
            cfg.slack = slack;
            cfg.epsilon = epsilon;
            cfg.threads = threads;
            cfg.solver = solver;
            cfg.dense_limit = dense_limit;
            cfg.record_timing = record_timing;
            let records = match &checkpoint {
                Some(path) => run_trials_checkpointed(&cfg, path)?,
                None => run_trials(&cfg)?,
            };
            match (out, format) {
                (Some(path), Format::Csv) => write_csv(&records, path)?,
                (Some(path), Format::Json) => write_json(&records, path)?,
                (None, Format::Csv) => print!("{}", render_csv(&records)),
                (None, Format::Json) => print!("{}", render_json(&records)),
            }
            Ok(true)
        }
        Command::Verify { lemmas, design, k, d, p, samples, seed } => {
            let design = parse_design(&design)?;
            let jobs: Vec<VerifyJob> = lemmas.iter().map(|&l| verify_job(l, &design, k, d, p, samples)).collect();
            let mut all = true;
            for (lemma, result) in lemmas.iter().zip(run_jobs(&jobs, seed)) {
                match result {
                    Ok(report) => {
                        all &= report.pass;
                        println!("{}", report.to_json());
                    }
                    Err(e) => {
                        all = false;
                        eprintln!("{lemma:?}: {e}");
                    }
                }
            }
            Ok(all)
        }
        Command::Weingarten { n, k } => {
            print!("{}", wg_exact(n, k)?);
            Ok(true)
        }
        Command::Defect { measure, k, tol } => {
            let value = design_defect(&load_measure(&measure)?, k)?;
            println!("{}", sig12(value));
            Ok(value <= tol)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
