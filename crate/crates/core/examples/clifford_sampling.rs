//! Uniform random Clifford unitaries through symplectic tableaux.

use expanderlab::designs::{enumerate_clifford_1qubit, random_symplectic, sample_clifford, Sampler, SamplerKind};
use expanderlab::linalg::unitarity_residual;
use expanderlab::rng::seeded;

fn main() -> expanderlab::Result<()> {
    let mut rng = seeded(2);
    let rows = random_symplectic(3, &mut rng);
    println!("random symplectic matrix on 3 qubits (rows as x|z bit masks):");
    for r in &rows {
        println!("  {r:06b}");
    }

    for q in [1, 2, 5] {
        let u = sample_clifford(q, &mut rng)?;
        println!("{q}-qubit Clifford: {}x{}, unitarity residual {:.1e}", u.nrows(), u.ncols(), unitarity_residual(&u.view()));
    }

    let group = enumerate_clifford_1qubit();
    println!("single-qubit Clifford group modulo phases: {} elements", group.len());

    // sampler view: 2 qubits is n = 4, an exact 3-design
    let kind = SamplerKind::CliffordQubits(2);
    let mut sampler = Sampler::new(kind.clone(), 9)?;
    let draws = sampler.sample_many(3);
    println!("{kind}: drew {} unitaries of dimension {}, design order {}", draws.len(), kind.dim(), kind.design_order());
    Ok(())
}
