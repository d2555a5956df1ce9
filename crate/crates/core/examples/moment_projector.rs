//! The Haar moment projector P^(k): dense for small n^{2k}, matrix-free otherwise.

use expanderlab::designs::sample_haar;
use expanderlab::linalg::{adjoint, max_abs, norm, trace};
use expanderlab::rng::seeded;
use expanderlab::tensor_ops::{u_pi_vector, MaxEntangledState};
use expanderlab::weingarten::{projector_dense, MomentProjector};
use expanderlab::{Result, C64};
use ndarray::Array1;
use rand::Rng;

fn main() -> Result<()> {
    for (n, k) in [(2, 1), (3, 2), (3, 3)] {
        let p = projector_dense(n, k)?;
        println!(
            "n={n} k={k}: dim {:>4}, |P²−P| = {:.1e}, |P−P*| = {:.1e}, tr P = {:.6}",
            p.nrows(),
            max_abs(&(p.dot(&p) - &p).view()),
            max_abs(&(adjoint(&p.view()) - &p).view()),
            trace(&p.view()).re
        );
    }

    let psi = MaxEntangledState::new(4).projector();
    println!("P^(1) at n=4 equals the maximally entangled projector: {:.1e}", max_abs(&(projector_dense(4, 1)? - psi).view()));

    // n = 16, k = 2 acts on 65536-dimensional vectors; only the 2 permutation vectors are kept
    let proj = MomentProjector::new(16, 2)?;
    let mut rng = seeded(1);
    let v: Array1<C64> = (0..proj.dim()).map(|_| C64::new(rng.random::<f64>() - 0.5, 0.0)).collect();
    let pv = proj.apply(&v.view())?;
    let again = proj.apply(&pv.view())?;
    println!("matrix-free n=16 k=2: rank {}, |P(Pv) − Pv| = {:.1e}", proj.rank(), norm(&(&again - &pv).view()));
    for p in proj.permutations() {
        let u = u_pi_vector(16, p)?;
        let fixed = proj.apply(&u.view())?;
        println!("  u_{p} is fixed: {:.1e}", norm(&(&fixed - &u).view()));
    }
    let u = sample_haar(16, &mut rng);
    println!("  sampled a 16x16 Haar unitary with |U_00| = {:.4}", u[[0, 0]].norm());
    Ok(())
}
