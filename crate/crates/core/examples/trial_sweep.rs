//! A reproducible sweep of trials written as CSV and JSON, with resumable checkpoints.

use expanderlab::lab::{read_records, render_csv, run_trials, run_trials_checkpointed, write_csv, write_json, SamplerSpec, TrialConfig};

fn main() -> expanderlab::Result<()> {
    let dir = std::env::temp_dir().join("expanderlab-sweep");
    std::fs::create_dir_all(&dir).map_err(|e| expanderlab::LabError::Io { path: dir.clone(), source: e })?;

    let cfg = TrialConfig::new(32, 12, 1, SamplerSpec::Haar, 4, 42);
    let records = run_trials(&cfg)?;
    for r in &records {
        println!("trial {}: s2 {:.6}, 2/√d {:.6}, passes {}", r.trial, r.s2, r.two_over_sqrt_d, r.passes);
    }
    write_csv(&records, dir.join("haar.csv"))?;
    write_json(&records, dir.join("haar.json"))?;
    assert_eq!(read_records(dir.join("haar.json"))?, read_records(dir.join("haar.csv"))?);

    // a checkpointed rerun skips trials already on disk
    let ckpt = dir.join("haar.partial.csv");
    let _ = std::fs::remove_file(&ckpt);
    let first = run_trials_checkpointed(&TrialConfig { trials: 2, ..cfg.clone() }, &ckpt)?;
    let resumed = run_trials_checkpointed(&cfg, &ckpt)?;
    // rows read back from disk carry 12 significant digits, so compare the rendered text
    let same = render_csv(&resumed) == render_csv(&records);
    println!("checkpoint: {} trials, then resumed to {}; same CSV as the fresh run: {same}", first.len(), resumed.len());

    let clifford = run_trials(&TrialConfig::new(4, 32, 1, SamplerSpec::Clifford, 3, 7))?;
    println!("2-qubit Clifford, d=32: s2 = {:?}", clifford.iter().map(|r| (r.s2 * 1e4).round() / 1e4).collect::<Vec<_>>());
    println!("outputs in {}", dir.display());
    Ok(())
}
