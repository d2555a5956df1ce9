//! k-copy channel U^{⊗k} (·) U^{*⊗k}: s₂ relative to P^(k) for Haar, Clifford and Pauli draws.

use expanderlab::channels::MixedUnitaryChannel;
use expanderlab::designs::{Sampler, SamplerKind};
use expanderlab::spectral::{optimal_reference, second_singular_value_with, SpectralOptions};
use expanderlab::rng::{stream, SPECTRAL_SLOT};

fn main() -> expanderlab::Result<()> {
    let d = 16;
    for kind in [SamplerKind::Haar(4), SamplerKind::CliffordQubits(2), SamplerKind::GeneralizedPauli(4)] {
        for k in [1, 2, 3] {
            let mut sampler = Sampler::for_trial(kind.clone(), 3, 0)?;
            let phi = MixedUnitaryChannel::new(sampler.sample_many(d), k)?;
            let r = second_singular_value_with(&phi, &SpectralOptions::default(), &mut stream(3, 0, SPECTRAL_SLOT))?;
            println!("{kind:<18} k={k}: s2 = {:.6}  (2/√d = {:.6}, {:?})", r.s2_estimate, optimal_reference(d), r.method);
        }
    }
    // Pauli draws reach s2 = 1 at k = 2: the group is only a 1-design
    Ok(())
}
