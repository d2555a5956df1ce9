//! The concentration bound with lemma parameters, along n = 2^10..2^20 and d = ⌈(log n)^9⌉.

use expanderlab::designs::SamplerKind;
use expanderlab::rng::seeded;
use expanderlab::spectral::{exact_bound_parameters, measure_bound_parameters, theorem_bound, BoundOptions};

fn main() -> expanderlab::Result<()> {
    let opts = BoundOptions::default();
    println!(" log2 n         d    mean/(2/√d)   tail/(2/√d)");
    for e in 10..=20 {
        let n = 1usize << e;
        let d = (n as f64).ln().powi(9).ceil() as usize;
        let b = theorem_bound(&exact_bound_parameters(n, d, &opts)?);
        let r = 2.0 / (d as f64).sqrt();
        println!("{e:>7} {d:>9} {:>14.6} {:>13.6}", b.mean_bound / r, b.tail_bound / r);
    }

    // k = 2 needs the covariance norm numerically; n = 2 Haar by Monte Carlo
    let opts = BoundOptions { samples: 20_000, ..BoundOptions::default() };
    let p = measure_bound_parameters(&SamplerKind::Haar(2), 64, 2, &opts, &mut seeded(1))?;
    println!("\nn=2 k=2 d=64: sigma {:.4}, upsilon {:.4} ({:?}), R_p {:.4}, p {}", p.sigma, p.upsilon, p.upsilon_source, p.r_p, p.p);
    println!("mean bound {:.4}", theorem_bound(&p).mean_bound);
    Ok(())
}
