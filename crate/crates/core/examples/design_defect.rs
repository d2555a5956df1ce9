//! k-design defects |P_μ^(k) − P^(k)| of finite measures, and the JSON measure format.
//!
//!     cargo run --example design_defect -- /tmp/pauli2.json

use expanderlab::designs::{design_defect, enumerate_clifford_1qubit, enumerate_pauli, load_measure, save_measure};

fn main() -> expanderlab::Result<()> {
    for n in [2, 3, 4] {
        let mu = enumerate_pauli(n)?;
        println!("Pauli({n}), {} elements: defect k=1 {:.2e}, k=2 {:.4}", mu.len(), design_defect(&mu, 1)?, design_defect(&mu, 2)?);
    }
    let cliff = enumerate_clifford_1qubit();
    println!("1-qubit Clifford: defect k=1 {:.2e}, k=2 {:.2e}", design_defect(&cliff, 1)?, design_defect(&cliff, 2)?);

    let path = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("pauli2.json"));
    save_measure(&enumerate_pauli(2)?, &path)?;
    let back = load_measure(&path)?;
    println!("wrote {} ({} unitaries, claimed order {}); try `expanderlab defect --measure {} --k 1`", path.display(), back.len(), back.claimed_order(), path.display());
    Ok(())
}
