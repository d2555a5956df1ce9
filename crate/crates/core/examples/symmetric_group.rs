//! Permutations, cycle types and the combinatorics feeding the Weingarten expansion.

use expanderlab::symm::{catalan, cycle_types, enumerate_permutations, moebius, Permutation};

fn main() -> expanderlab::Result<()> {
    let k = 4;
    let perms = enumerate_permutations(k)?;
    println!("S_{k} has {} elements", perms.len());
    for t in cycle_types(k) {
        let count = perms.iter().filter(|p| p.cycle_type() == t).count();
        println!("  type {t:<10} size {count:>2}  |p| = {}  Mb = {}", t.length(), moebius(&t.representative())?);
    }

    let p = Permutation::cycle(k, &[0, 2, 3])?;
    let q = Permutation::transposition(k, 1, 3);
    let pq = p.compose(&q)?;
    println!("{p} ∘ {q} = {pq}, cycles {:?}, inverse {}", pq.cycles(), pq.inverse());

    let cat: Vec<u64> = (0..10).map(catalan).collect::<Result<_, _>>()?;
    println!("Catalan numbers: {cat:?}");
    Ok(())
}
