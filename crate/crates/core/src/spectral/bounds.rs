//! Parameters `σ, υ, R_p` of the centered sum `X = (1/d) Σ_s (U_s^{⊗k} ⊗ Ū_s^{⊗k} − P^(k))`
//! and the resulting operator-norm bounds.
//!
//! `log` is the natural logarithm throughout. The absolute constants `C` and `C′` are
//! inputs; `p` defaults to `⌈C′ log N⌉`.

use rand::Rng;
use serde::Serialize;

use crate::designs::SamplerKind;
use crate::error::{LabError, Result};
use crate::linalg::op_norm;
use crate::verify::{covariance_enumerated, covariance_norm_monte_carlo};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundOptions {
    pub p: Option<usize>,
    pub t: f64,
    pub c: f64,
    pub c_prime: f64,
    /// Fail with `OrderTooLow` instead of computing `υ` numerically.
    pub require_exact: bool,
    /// Monte Carlo sample count for `υ` when the law has no enumerated support.
    pub samples: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { p: None, t: 1.0, c: 1.0, c_prime: 1.0, require_exact: false, samples: 20_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpsilonSource {
    /// Closed form `√(1/(d(n²−1)))`, valid for 2-designs at `k = 1`.
    Exact,
    Enumerated,
    /// Estimate from this many Haar samples.
    MonteCarlo(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundParameters {
    pub sigma: f64,
    pub upsilon: f64,
    pub r_p: f64,
    pub p: usize,
    pub t: f64,
    /// Matrix size `N = n^{2k}`.
    pub big_n: u64,
    pub c: f64,
    pub c_prime: f64,
    pub upsilon_source: UpsilonSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundValues {
    pub mean_bound: f64,
    /// Holds with probability at least `1 − N e^{−t}`.
    pub tail_bound: f64,
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

fn big_n(n: usize, k: usize) -> Result<u64> {
    (n as u64).checked_pow(2 * k as u32).ok_or(LabError::DimensionTooLarge { dim: usize::MAX, limit: usize::MAX })
}

fn base_parameters(n: usize, d: usize, k: usize, opts: &BoundOptions) -> Result<BoundParameters> {
    if d == 0 {
        return Err(LabError::InvalidConfig("d must be >= 1".into()));
    }
    if k > n {
        return Err(LabError::KExceedsN { n, k });
    }
    if opts.t <= 0.0 {
        return Err(LabError::InvalidConfig("tail parameter t must be positive".into()));
    }
    let nn = big_n(n, k)?;
    let log_n = (nn as f64).ln();
    let p = opts.p.unwrap_or_else(|| (opts.c_prime * log_n).ceil() as usize).max(1);
    let df = d as f64;
    // Σ_s E tr|Z_s|^{2p} = d · tr(I − P^(k)) / d^{2p}
    let trace = (nn - factorial(k)) as f64;
    let r_p = (df * trace).powf(1.0 / (2.0 * p as f64)) / df;
    Ok(BoundParameters {
        sigma: 1.0 / df.sqrt(),
        upsilon: f64::NAN,
        r_p,
        p,
        t: opts.t,
        big_n: nn,
        c: opts.c,
        c_prime: opts.c_prime,
        upsilon_source: UpsilonSource::Exact,
    })
}

/// Lemma values for `k = 1` and any 2-design: `σ = 1/√d`, `υ = √(1/(d(n²−1)))`,
/// `R_p = (1/d)(d(n²−1))^{1/2p}`.
pub fn exact_bound_parameters(n: usize, d: usize, opts: &BoundOptions) -> Result<BoundParameters> {
    let mut params = base_parameters(n, d, 1, opts)?;
    params.upsilon = (1.0 / (d as f64 * (n as f64 * n as f64 - 1.0))).sqrt();
    Ok(params)
}

/// Parameters for `d` independent draws from `kind` with `k` copies. `υ` uses the closed
/// form when `k = 1` and the law is a 2-design; otherwise it is computed as
/// `√(‖Cov(Z)‖∞ / d)`, by enumeration of a finite support or by Monte Carlo.
pub fn measure_bound_parameters<R: Rng + ?Sized>(
    kind: &SamplerKind,
    d: usize,
    k: usize,
    opts: &BoundOptions,
    rng: &mut R,
) -> Result<BoundParameters> {
    let n = kind.dim();
    let order = kind.design_order();
    if k == 1 && order >= 2 {
        return exact_bound_parameters(n, d, opts);
    }
    if opts.require_exact && order < 2 * k {
        return Err(LabError::OrderTooLow { claimed: order, required: 2 * k });
    }
    let mut params = base_parameters(n, d, k, opts)?;
    let (cov_norm, source) = match kind.finite_measure() {
        Ok(mu) => (op_norm(&covariance_enumerated(&mu, k)?.view())?, UpsilonSource::Enumerated),
        Err(LabError::NotFiniteSupport(_)) => {
            if !matches!(kind, SamplerKind::Haar(_)) {
                return Err(LabError::NotFiniteSupport(kind.to_string()));
            }
            let (norm, _) = covariance_norm_monte_carlo(n, k, opts.samples, rng)?;
            (norm, UpsilonSource::MonteCarlo(opts.samples))
        }
        Err(e) => return Err(e),
    };
    params.upsilon = (cov_norm / d as f64).sqrt();
    params.upsilon_source = source;
    Ok(params)
}

/// Both right-hand sides of the concentration theorem, evaluated literally.
pub fn theorem_bound(params: &BoundParameters) -> BoundValues {
    let l = (params.big_n as f64).ln();
    let (s, u, r, t) = (params.sigma, params.upsilon, params.r_p, params.t);
    let common = l.powf(0.75) * s.sqrt() * u.sqrt();
    let mean = 2.0 * s + params.c * (common + l.powf(2.0 / 3.0) * s.powf(2.0 / 3.0) * r.cbrt() + l * r);
    let tail = 2.0 * s
        + params.c
            * (common + l.powf(2.0 / 3.0) * s.powf(2.0 / 3.0) * r.cbrt() * t.powf(2.0 / 3.0) + l * r * t + u * t.sqrt());
    BoundValues { mean_bound: mean, tail_bound: tail }
}
