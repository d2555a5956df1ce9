//! Haar unitaries from QR of a complex Ginibre matrix, reproducible per (seed, trial, slot),
//! checked against the exact second moment.

use expanderlab::designs::{sample_haar, Sampler, SamplerKind};
use expanderlab::linalg::unitarity_residual;
use expanderlab::rng::{seeded, stream};
use expanderlab::verify::moment_oracle;

fn main() -> expanderlab::Result<()> {
    let u = sample_haar(6, &mut seeded(7));
    println!("6x6 Haar sample, |U*U − I|_F = {:.1e}", unitarity_residual(&u.view()));

    // unitary s of trial t always comes from stream (seed, t, s)
    let mut sampler = Sampler::for_trial(SamplerKind::Haar(4), 11, 3)?;
    let batch = sampler.sample_many(5);
    let direct = sample_haar(4, &mut stream(11, 3, 2));
    println!("third unitary of trial 3 reproduced from its own stream: {}", batch[2] == direct);

    // |U_00|² is Beta(1, n−1) for Haar, mean 1/n
    let n = 5;
    let mut rng = seeded(1);
    let m = 4000;
    let mean = (0..m).map(|_| sample_haar(n, &mut rng)[[0, 0]].norm_sqr()).sum::<f64>() / m as f64;
    println!("E|U_00|² over {m} samples = {mean:.4} (exact {:.4})", 1.0 / n as f64);

    for k in [1, 2] {
        let r = moment_oracle(2, k, 4000, &mut seeded(k as u64))?;
        println!("k={k}: |mean(U⊗Ū)^k − P^(k)|_F = {:.4} ≤ {:.4}: {}", r.max_abs_deviation, r.tolerance, r.pass);
    }
    Ok(())
}
