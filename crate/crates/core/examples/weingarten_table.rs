//! Exact Weingarten values from the inverse Gram matrix of the permutation vectors, next to
//! the leading Moebius term of their large-n expansion.
//!
//!     cargo run --example weingarten_table -- 3 2

use expanderlab::symm::{cycle_types, moebius_of_type};
use expanderlab::weingarten::{gram_matrix, wg_asymptotic, wg_exact};
use num_traits::{Signed, ToPrimitive};

fn main() -> expanderlab::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(3);
    let k = args.next().unwrap_or(2);

    let gram = gram_matrix(n, k)?;
    println!("Gram matrix of the {} permutation vectors (n = {n}, k = {k}) has entries n^#cycles", gram.size());

    let table = wg_exact(n, k)?;
    print!("{table}");

    println!("\ncycle type   exact            Mb/n^(k+|p|)     n^(k+|p|+2)·gap");
    for t in cycle_types(k) {
        let p = t.representative();
        let exact = table.value(&p);
        let approx = wg_asymptotic(n, &p, k)?;
        let scaled = (exact - &approx).abs().to_f64().unwrap() * (n as f64).powi((k + p.length() + 2) as i32);
        println!(
            "{:<12} {:<16.9e} {:<16.9e} {:.4}  (Mb = {})",
            t.to_string(),
            exact.to_f64().unwrap(),
            approx.to_f64().unwrap(),
            scaled,
            moebius_of_type(&t)?
        );
    }
    Ok(())
}
