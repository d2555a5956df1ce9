//! Spectral quantities of a mixed-unitary channel.
//!
//! `s₂(Φ) = ‖M_Φ − P^(k)‖∞` is computed by a full SVD when `n^{2k}` is at most
//! [`SpectralOptions::dense_limit`], and otherwise from the top eigenvalue of `A*A` with
//! `A` the matrix-free centered operator.

mod bounds;
mod iterative;

use std::time::Instant;

use rand::Rng;
use serde::Serialize;

pub use bounds::{
    exact_bound_parameters, measure_bound_parameters, theorem_bound, BoundOptions, BoundParameters, BoundValues,
    UpsilonSource,
};
pub use iterative::{lanczos, power_iteration, EigenEstimate, IterationControl};
pub(crate) use iterative::lanczos_with_vector;

use crate::channels::{CenteredChannelOperator, MixedUnitaryChannel};
use crate::error::{LabError, Result};
use crate::linalg::{eigenvalues, singular_values};
use crate::rng::{stream, SPECTRAL_SLOT};
use crate::weingarten::projector_dense;
use crate::DENSE_THRESHOLD;

/// Largest `n^{2k}` handled by the dense path unless overridden. A dense SVD at the shared
/// threshold of 4096 takes minutes, while 1024 takes about a second.
pub const DEFAULT_DENSE_LIMIT: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    MatrixFree,
}

/// Iterative solver used on the matrix-free path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    Lanczos,
    Power,
}

impl std::str::FromStr for Solver {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lanczos" => Ok(Solver::Lanczos),
            "power" => Ok(Solver::Power),
            other => Err(LabError::InvalidConfig(format!("unknown solver {other:?} (expected lanczos or power)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralOptions {
    /// Dimensions `n^{2k}` up to this value use the dense SVD (capped at the shared
    /// [`DENSE_THRESHOLD`]); `0` forces the matrix-free path.
    pub dense_limit: usize,
    pub solver: Solver,
    pub control: IterationControl,
    /// Also compute `|λ₂|` on the dense path.
    pub lambda2: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { dense_limit: DEFAULT_DENSE_LIMIT, solver: Solver::default(), control: IterationControl::default(), lambda2: false }
    }
}

impl SpectralOptions {
    pub fn matrix_free() -> Self {
        Self { dense_limit: 0, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub s2_estimate: f64,
    /// Relative eigen-residual of the iterative solve; 0 on the dense path.
    pub residual: f64,
    pub iterations: usize,
    pub restarts_used: usize,
    pub method: Method,
    pub lambda2_modulus: Option<f64>,
    pub wall_time_ms: u64,
}

/// `s₂` with default options and a fixed start-vector stream.
pub fn second_singular_value(phi: &MixedUnitaryChannel) -> Result<SpectralReport> {
    second_singular_value_with(phi, &SpectralOptions::default(), &mut stream(0, 0, SPECTRAL_SLOT))
}

pub fn second_singular_value_with<R: Rng + ?Sized>(
    phi: &MixedUnitaryChannel,
    opts: &SpectralOptions,
    rng: &mut R,
) -> Result<SpectralReport> {
    if phi.k() > phi.n() {
        return Err(LabError::KExceedsN { n: phi.n(), k: phi.k() });
    }
    let start = Instant::now();
    let dim = phi.dim();
    let mut report = if dim <= opts.dense_limit.min(DENSE_THRESHOLD) {
        let centered = phi.matrix_form()? - projector_dense(phi.n(), phi.k())?;
        let sv = singular_values(&centered.view())?;
        let lambda2_modulus = if opts.lambda2 { Some(second_eigenvalue_modulus(phi)?) } else { None };
        SpectralReport {
            s2_estimate: sv.first().copied().unwrap_or(0.0),
            residual: 0.0,
            iterations: 0,
            restarts_used: 0,
            method: Method::Dense,
            lambda2_modulus,
            wall_time_ms: 0,
        }
    } else {
        let op = CenteredChannelOperator::new(phi)?;
        let est = match opts.solver {
            Solver::Lanczos => lanczos(&op, &opts.control, rng)?,
            Solver::Power => power_iteration(&op, &opts.control, rng)?,
        };
        SpectralReport {
            s2_estimate: est.theta.max(0.0).sqrt(),
            residual: est.residual,
            iterations: est.iterations,
            restarts_used: est.restarts_used,
            method: Method::MatrixFree,
            lambda2_modulus: None,
            wall_time_ms: 0,
        }
    };
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// `|λ_{k!+1}(M_Φ)|` with eigenvalues sorted by decreasing modulus.
pub fn second_eigenvalue_modulus(phi: &MixedUnitaryChannel) -> Result<f64> {
    let m = phi.matrix_form()?;
    let mut moduli: Vec<f64> = eigenvalues(&m.view())?.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let r: usize = (1..=phi.k()).product();
    Ok(moduli.get(r).copied().unwrap_or(0.0))
}

/// The bound `2√(d−1)/d` on `s₂` for a mixture of `d` unitaries. It is a large-`n`
/// statement: at small `n` it can fail, e.g. the `n²` Weyl operators give `s₂ = 0`, and
/// Haar mixtures typically land slightly below it.
pub fn pisier_lower_bound(d: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    2.0 * ((d - 1) as f64).sqrt() / d as f64
}

/// The optimal-expander reference `2/√d`.
pub fn optimal_reference(d: usize) -> f64 {
    2.0 / (d as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::sample_haar;
    use crate::rng::seeded;

    fn haar_unitaries(n: usize, d: usize, seed: u64) -> Vec<crate::linalg::CMatrix> {
        let mut rng = seeded(seed);
        (0..d).map(|_| sample_haar(n, &mut rng)).collect()
    }

    #[test]
    fn single_unitary_has_unit_s2() {
        for opts in [SpectralOptions::default(), SpectralOptions::matrix_free()] {
            let phi = MixedUnitaryChannel::new(haar_unitaries(3, 1, 1), 1).unwrap();
            let r = second_singular_value_with(&phi, &opts, &mut seeded(0)).unwrap();
            assert!((r.s2_estimate - 1.0).abs() < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn repeated_unitary_has_unit_s2() {
        let u = haar_unitaries(4, 1, 2).remove(0);
        let phi = MixedUnitaryChannel::new(vec![u; 6], 1).unwrap();
        assert!((second_singular_value(&phi).unwrap().s2_estimate - 1.0).abs() < 1e-10);
    }

    #[test]
    fn dense_report_fields() {
        let phi = MixedUnitaryChannel::new(haar_unitaries(3, 4, 3), 1).unwrap();
        let opts = SpectralOptions { lambda2: true, ..SpectralOptions::default() };
        let r = second_singular_value_with(&phi, &opts, &mut seeded(0)).unwrap();
        assert_eq!(r.method, Method::Dense);
        assert_eq!(r.residual, 0.0);
        assert!(r.lambda2_modulus.unwrap() <= r.s2_estimate + 1e-8);
        // rank bound s₂² ≥ (n²/d − 1)/(n² − 1); the asymptotic 2√(d−1)/d need not hold at n = 3
        assert!(r.s2_estimate >= ((9.0 / 4.0 - 1.0) / 8.0f64).sqrt() - 1e-12);
    }

    #[test]
    fn matrix_free_matches_dense() {
        for (n, d, k, seed) in [(3, 4, 1, 4), (2, 5, 2, 5), (5, 3, 1, 6)] {
            let phi = MixedUnitaryChannel::new(haar_unitaries(n, d, seed), k).unwrap();
            let dense = second_singular_value(&phi).unwrap();
            for solver in [Solver::Lanczos, Solver::Power] {
                let opts = SpectralOptions { solver, ..SpectralOptions::matrix_free() };
                let mf = second_singular_value_with(&phi, &opts, &mut seeded(seed)).unwrap();
                assert_eq!(mf.method, Method::MatrixFree);
                assert!((mf.s2_estimate - dense.s2_estimate).abs() < 1e-8, "{solver:?} {mf:?} vs {dense:?}");
            }
        }
    }

    #[test]
    fn eigenvalue_modulus_examples() {
        let phi = MixedUnitaryChannel::new(vec![crate::linalg::identity(2)], 1).unwrap();
        assert!((second_eigenvalue_modulus(&phi).unwrap() - 1.0).abs() < 1e-12);
        let phi = MixedUnitaryChannel::new(haar_unitaries(3, 8, 7), 1).unwrap();
        let s2 = second_singular_value(&phi).unwrap().s2_estimate;
        assert!(second_eigenvalue_modulus(&phi).unwrap() <= s2 + 1e-8);
        let sym = MixedUnitaryChannel::symmetrized(haar_unitaries(3, 4, 8), 1).unwrap();
        let s2 = second_singular_value(&sym).unwrap().s2_estimate;
        assert!((second_eigenvalue_modulus(&sym).unwrap() - s2).abs() < 1e-8);
    }

    #[test]
    fn pisier_values() {
        assert_eq!(pisier_lower_bound(1), 0.0);
        assert!((pisier_lower_bound(2) - 1.0).abs() < 1e-15);
        assert!((pisier_lower_bound(4) - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let d = 1_000_000;
        assert!((pisier_lower_bound(d) / optimal_reference(d) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pisier_bound_fails_for_the_pauli_group() {
        let mu = crate::designs::enumerate_pauli(3).unwrap();
        let s2 = second_singular_value(&mu.moment_channel(1).unwrap()).unwrap().s2_estimate;
        assert!(s2 < 1e-12 && pisier_lower_bound(9) > 0.6);
    }

    #[test]
    fn rejects_k_above_n() {
        let phi = MixedUnitaryChannel::new(haar_unitaries(2, 2, 9), 3).unwrap();
        assert!(matches!(second_singular_value(&phi), Err(LabError::KExceedsN { .. })));
    }
}
