//! s₂ of a random mixed-unitary channel: dense SVD against matrix-free Lanczos and power
//! iteration, with |λ₂| and the reference values.

use expanderlab::channels::MixedUnitaryChannel;
use expanderlab::designs::{Sampler, SamplerKind};
use expanderlab::rng::{stream, SPECTRAL_SLOT};
use expanderlab::spectral::{
    optimal_reference, pisier_lower_bound, second_eigenvalue_modulus, second_singular_value, second_singular_value_with,
    Solver, SpectralOptions,
};

fn main() -> expanderlab::Result<()> {
    let (n, d) = (16, 8);
    let mut sampler = Sampler::for_trial(SamplerKind::Haar(n), 5, 0)?;
    let phi = MixedUnitaryChannel::new(sampler.sample_many(d), 1)?;

    let dense = second_singular_value(&phi)?;
    println!("dense SVD        s2 = {:.12}", dense.s2_estimate);
    for solver in [Solver::Lanczos, Solver::Power] {
        let opts = SpectralOptions { solver, ..SpectralOptions::matrix_free() };
        let r = second_singular_value_with(&phi, &opts, &mut stream(5, 0, SPECTRAL_SLOT))?;
        println!("{solver:<16?} s2 = {:.12} ({} products, residual {:.1e})", r.s2_estimate, r.iterations, r.residual);
    }
    println!("|lambda2|          = {:.12}", second_eigenvalue_modulus(&phi)?);
    println!("2√(d−1)/d          = {:.12}", pisier_lower_bound(d));
    println!("2/√d               = {:.12}", optimal_reference(d));

    // larger case, matrix-free only: n = 64 acts on 4096-dimensional vectors
    let mut sampler = Sampler::for_trial(SamplerKind::Haar(64), 5, 1)?;
    let big = MixedUnitaryChannel::new(sampler.sample_many(16), 1)?;
    let r = second_singular_value_with(&big, &SpectralOptions::matrix_free(), &mut stream(5, 1, SPECTRAL_SLOT))?;
    println!("n=64 d=16: s2 = {:.6}, s2·√d/2 = {:.4}", r.s2_estimate, r.s2_estimate / optimal_reference(16));
    Ok(())
}
