//! The moment identities behind the bound, by enumeration and by Monte Carlo.

use expanderlab::designs::{enumerate_clifford_1qubit, enumerate_pauli};
use expanderlab::verify::{run_jobs, VerifyJob};

fn main() {
    let cliff = enumerate_clifford_1qubit();
    let pauli = enumerate_pauli(2).expect("n = 2 is supported");
    let jobs = vec![
        VerifyJob::Sigma(pauli.clone(), 1),
        VerifyJob::Sigma(cliff.clone(), 2),
        VerifyJob::Upsilon(cliff.clone()),
        // the covariance identity needs a 2-design; on Pauli(2) it fails
        VerifyJob::UpsilonProbe(pauli),
        VerifyJob::UpsilonMonteCarlo { n: 2, samples: 20_000 },
        VerifyJob::UpsilonKMonteCarlo { n: 2, k: 2, samples: 20_000 },
        VerifyJob::Rp { n: 3, k: 2, d: 8, p: 2 },
        VerifyJob::Projector { n: 3, k: 2 },
        VerifyJob::MomentEnumerated(cliff, 2),
        VerifyJob::MomentOracle { n: 2, k: 2, samples: 5_000 },
    ];
    for result in run_jobs(&jobs, 2024) {
        match result {
            Ok(r) => println!(
                "{:<14} n={} k={} dev {:.2e} tol {:.1e} {}",
                format!("{:?}", r.lemma_id),
                r.n,
                r.k,
                r.max_abs_deviation,
                r.tolerance,
                if r.pass { "pass" } else { "FAIL" }
            ),
            Err(e) => println!("error: {e}"),
        }
    }
}
