//! Measure files: `{"n", "claimed_order", "weights", "unitaries"}` with each unitary a
//! row-major nesting of `[re, im]` pairs.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::DesignMeasure;
use crate::error::{LabError, Result};
use crate::C64;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    n: usize,
    claimed_order: usize,
    weights: Vec<f64>,
    unitaries: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn load_measure(path: impl AsRef<Path>) -> Result<DesignMeasure> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_measure(&text)
}

pub(crate) fn parse_measure(text: &str) -> Result<DesignMeasure> {
    let file: MeasureFile = serde_json::from_str(text)
        .map_err(|e| LabError::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let n = file.n;
    if let Some(i) = file.weights.iter().position(|w| !w.is_finite()) {
        return Err(LabError::parse(format!("weights[{i}]"), "not a finite number"));
    }
    let mut support = Vec::with_capacity(file.unitaries.len());
    for (idx, rows) in file.unitaries.iter().enumerate() {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(LabError::parse(format!("unitaries[{idx}]"), format!("expected a {n}x{n} matrix")));
        }
        let mut u = Array2::<C64>::zeros((n, n));
        for (i, row) in rows.iter().enumerate() {
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(LabError::parse(format!("unitaries[{idx}][{i}][{j}]"), "not a finite number"));
                }
                u[[i, j]] = C64::new(re, im);
            }
        }
        support.push(u);
    }
    DesignMeasure::new(support, file.weights, file.claimed_order)
}

pub(crate) fn render_measure(mu: &DesignMeasure) -> String {
    let file = MeasureFile {
        n: mu.n(),
        claimed_order: mu.claimed_order(),
        weights: mu.weights().to_vec(),
        unitaries: mu
            .support()
            .iter()
            .map(|u| u.rows().into_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect())
            .collect(),
    };
    serde_json::to_string(&file).expect("finite floats serialize")
}

pub fn save_measure(mu: &DesignMeasure, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_measure(mu) + "\n").map_err(|e| LabError::io(path, e))
}
