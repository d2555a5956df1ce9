//! Index gymnastics: realignment, factor swaps, the flip operator and vec/unvec.

use expanderlab::designs::sample_haar;
use expanderlab::linalg::{conj, kron, max_abs};
use expanderlab::rng::seeded;
use expanderlab::symm::Permutation;
use expanderlab::tensor_ops::{flip, realign, swap_factors, unvec, vec, IndexedMatrix, MaxEntangledState};
use expanderlab::Result;

fn main() -> Result<()> {
    let n = 3;
    let mut rng = seeded(4);
    let a = sample_haar(n, &mut rng);
    let b = sample_haar(n, &mut rng);
    let y = sample_haar(n, &mut rng);

    // vec(A Y B*) = (A ⊗ B̄) vec(Y)
    let lhs = vec(&a.dot(&y).dot(&expanderlab::linalg::adjoint(&b.view())).view());
    let rhs = kron(&a.view(), &conj(&b.view()).view()).dot(&vec(&y.view()));
    println!("vec identity residual {:.1e}", (&lhs - &rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
    assert_eq!(unvec(&lhs.view())?.dim(), (n, n));

    // F (A ⊗ B) F = B ⊗ A
    let f = flip(n).into_matrix();
    let ab = kron(&a.view(), &b.view());
    let ba = kron(&b.view(), &a.view());
    println!("flip conjugation residual {:.1e}", max_abs(&(f.dot(&ab).dot(&f) - ba).view()));

    let swapped = swap_factors(&IndexedMatrix::uniform(ab, n, 2)?, &Permutation::transposition(2, 0, 1))?;
    println!("factor swap agrees with flip conjugation: {:.1e}", max_abs(&(swapped.matrix() - f.dot(&kron(&a.view(), &b.view())).dot(&f)).view()));

    // realigning the maximally entangled projector gives I/n
    let psi = IndexedMatrix::uniform(MaxEntangledState::new(n).projector(), n, 2)?;
    let r = realign(&psi)?;
    println!("realign(Ψ) = I/{n}: entry (0,0) = {:.6}, max off-diagonal {:.1e}", r.matrix()[[0, 0]].re, {
        let mut m = r.matrix().clone();
        m.diag_mut().fill(0.0.into());
        max_abs(&m.view())
    });
    Ok(())
}
