//! Numerical checks of the moment identities behind the spectral bounds.
//!
//! Every check returns a [`LemmaCheckReport`] whose `pass` flag is exactly
//! `max_abs_deviation <= tolerance`. Exact-enumeration checks use tolerance `1e-10`
//! (`1e-9` for the projector axioms, `1e-8` relative for traces of matrix powers);
//! Monte Carlo checks derive their tolerance from the sample count and record it.

use ndarray::{s, Array2, ArrayView1};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::LinearOperator;
use crate::designs::{sample_haar, DesignMeasure};
use crate::error::{LabError, Result};
use crate::linalg::{adjoint, conj, frobenius, identity, kron, max_abs, op_norm, tensor_power, trace, CMatrix, CVector};
use crate::rng::stream;
use crate::spectral::{lanczos_with_vector, IterationControl};
use crate::tensor_ops::MaxEntangledState;
use crate::weingarten::projector_dense;
use crate::{C64, DENSE_THRESHOLD};

/// Tolerance of the exact enumeration checks.
pub const EXACT_TOL: f64 = 1e-10;
/// Tolerance of the projector axioms.
pub const PROJECTOR_TOL: f64 = 1e-9;
/// Relative tolerance on `tr|Z|^{2p}`.
pub const TRACE_TOL: f64 = 1e-8;
/// Calibration constant in `d·‖Cov(X)‖∞ ≤ κ/n` for `k = 2`. Haar estimates of
/// `n·d·‖Cov(X)‖∞` are about 2.02 at `n = 2` (2·10⁵ samples) and 1.58 at `n = 3` (10⁵
/// samples); κ = 3 leaves roughly a factor 1.5.
pub const UPSILON_K_KAPPA: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    Sigma,
    Upsilon,
    Rp,
    SigmaK,
    UpsilonK,
    RpK,
    Projector,
    MomentOracle,
}

impl std::str::FromStr for LemmaId {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sigma" => LemmaId::Sigma,
            "upsilon" => LemmaId::Upsilon,
            "rp" => LemmaId::Rp,
            "sigma_k" => LemmaId::SigmaK,
            "upsilon_k" => LemmaId::UpsilonK,
            "rp_k" => LemmaId::RpK,
            "projector" => LemmaId::Projector,
            "moment_oracle" => LemmaId::MomentOracle,
            other => return Err(LabError::InvalidConfig(format!("unknown lemma id {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    ExactEnumeration,
    MonteCarlo(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheckReport {
    pub lemma_id: LemmaId,
    pub n: usize,
    pub k: usize,
    /// Support size `d` for measure checks, the exponent `p` for `rp`.
    pub d_or_p: usize,
    pub max_abs_deviation: f64,
    pub mode: CheckMode,
    pub tolerance: f64,
    pub pass: bool,
    /// The quantity the lemma is about (`‖E(XX*)‖∞`, `d·‖Cov(X)‖∞`, `R_p`, …).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_stderr: Option<f64>,
}

impl LemmaCheckReport {
    #[allow(clippy::too_many_arguments)]
    fn new(lemma_id: LemmaId, n: usize, k: usize, d_or_p: usize, deviation: f64, mode: CheckMode, tolerance: f64) -> Self {
        Self {
            lemma_id,
            n,
            k,
            d_or_p,
            max_abs_deviation: deviation,
            mode,
            tolerance,
            pass: deviation <= tolerance,
            measured: None,
            measured_stderr: None,
        }
    }

    fn with_measured(mut self, value: f64) -> Self {
        self.measured = Some(value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn dense_budget(dim: usize) -> Result<()> {
    if dim > DENSE_THRESHOLD {
        return Err(LabError::DimensionTooLargeForDense { dim, limit: DENSE_THRESHOLD });
    }
    Ok(())
}

fn moment_term(u: &CMatrix, k: usize) -> CMatrix {
    let t = tensor_power(&u.view(), k);
    kron(&t.view(), &conj(&t.view()).view())
}

/// `Σ_μ w vec(Z) vec(Z)*` with `Z = U^{⊗k} ⊗ Ū^{⊗k} − P^(k)`, which is the realigned
/// `E[Z ⊗ Z̄]`. `Cov(X) = Cov(Z)/d` for the average of `d` independent copies.
pub fn covariance_enumerated(mu: &DesignMeasure, k: usize) -> Result<CMatrix> {
    let n = mu.n();
    let dim = n.pow(2 * k as u32);
    dense_budget(dim * dim)?;
    let p = projector_dense(n, k)?;
    let mut cov = Array2::<C64>::zeros((dim * dim, dim * dim));
    for (u, &w) in mu.support().iter().zip(mu.weights()) {
        let z = moment_term(u, k) - &p;
        let v = z.into_shape_with_order((dim * dim, 1)).expect("contiguous");
        cov.scaled_add(C64::new(w, 0.0), &v.dot(&adjoint(&v.view())));
    }
    Ok(cov)
}

/// Monte Carlo Haar estimate of `Cov(Z)`, with the standard error of `‖Cov(Z)‖∞` from ten
/// batch means.
pub fn covariance_monte_carlo<R: Rng + ?Sized>(n: usize, k: usize, samples: usize, rng: &mut R) -> Result<(CMatrix, f64)> {
    if k > n {
        return Err(LabError::KExceedsN { n, k });
    }
    let dim = n.pow(2 * k as u32);
    let side = dim * dim;
    dense_budget(side)?;
    let p = projector_dense(n, k)?;
    let batches = 10;
    let per = samples.div_ceil(batches).max(1);
    let chunk = 256;
    let mut total = Array2::<C64>::zeros((side, side));
    let mut norms = Vec::with_capacity(batches);
    for _ in 0..batches {
        let mut acc = Array2::<C64>::zeros((side, side));
        let mut done = 0;
        while done < per {
            let m = chunk.min(per - done);
            let mut cols = Array2::<C64>::zeros((side, m));
            for j in 0..m {
                let z = moment_term(&sample_haar(n, rng), k) - &p;
                cols.slice_mut(s![.., j]).assign(&z.into_shape_with_order(side).expect("contiguous"));
            }
            acc += &cols.dot(&adjoint(&cols.view()));
            done += m;
        }
        acc /= C64::new(per as f64, 0.0);
        norms.push(op_norm(&acc.view())?);
        total += &acc;
    }
    total /= C64::new(batches as f64, 0.0);
    let mean = norms.iter().sum::<f64>() / batches as f64;
    let var = norms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Ok((total, (var / batches as f64).sqrt()))
}

/// `Cov(Z) = (1/S) Σ_s vec(Z_s) vec(Z_s)*` as `A*A` with `A = R/√S`, where row `s` of `R`
/// is `vec(Z_s)*`. With `T = U^{⊗k}` (side `m`), `vec(T ⊗ T̄)` at `(i,j,k,l)` is
/// `T_ik T̄_jl`, so both products reduce to gemms against the stacked `vec T` rows once `v`
/// is regrouped as the `m² × m²` matrix over `((i,k),(j,l))`.
struct SampledCovariance {
    /// Row `s` is `vec(U_s^{⊗k})`.
    t: CMatrix,
    m: usize,
    vec_p: CVector,
}

impl SampledCovariance {
    fn samples(&self) -> usize {
        self.t.nrows()
    }

    fn scale(&self) -> C64 {
        C64::new(1.0 / (self.samples() as f64).sqrt(), 0.0)
    }

    // (i,j,k,l) <-> (i,k,j,l), an involution on vectors of length m⁴
    fn regroup(&self, v: &ArrayView1<C64>) -> CMatrix {
        let m = self.m;
        let t = v.to_shape((m, m, m, m)).expect("length m^4").permuted_axes([0, 2, 1, 3]);
        t.as_standard_layout().into_owned().into_shape_with_order((m * m, m * m)).expect("contiguous")
    }
}

impl LinearOperator for SampledCovariance {
    // input dimension; outputs of `apply` have one entry per sample
    fn dim(&self) -> usize {
        self.m.pow(4)
    }

    fn apply(&self, v: &ArrayView1<C64>) -> CVector {
        // (R v)_s = Σ conj(T_ik) T_jl v_ijkl − ⟨vec P, v⟩, P being real
        let g = self.regroup(v);
        let tg = self.t.dot(&g.t());
        let shift = self.vec_p.iter().zip(v.iter()).map(|(p, x)| p * x).sum::<C64>();
        let scale = self.scale();
        tg.outer_iter()
            .zip(self.t.outer_iter())
            .map(|(a, b)| (a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum::<C64>() - shift) * scale)
            .collect()
    }

    fn apply_adjoint(&self, w: &ArrayView1<C64>) -> CVector {
        // Σ_s w_s vec(Z_s): the (i,k),(j,l) block is Σ_s w_s T_ik T̄_jl
        let mut weighted = self.t.clone();
        for (mut row, &ws) in weighted.outer_iter_mut().zip(w.iter()) {
            row *= ws;
        }
        let g = weighted.t().dot(&conj(&self.t.view()));
        let flat = g.into_shape_with_order(self.dim()).expect("contiguous");
        let back = self.regroup(&flat.view()).into_shape_with_order(self.dim()).expect("contiguous");
        (back - &self.vec_p * w.sum()) * self.scale()
    }
}

/// Monte Carlo Haar estimate of `‖Cov(Z)‖∞` and its standard error. Small cases form the
/// matrix; otherwise Lanczos runs over the samples and the error comes from the spread of
/// `|⟨vec Z_s, x⟩|²` along the top eigenvector `x`.
pub fn covariance_norm_monte_carlo<R: Rng + ?Sized>(n: usize, k: usize, samples: usize, rng: &mut R) -> Result<(f64, f64)> {
    if k > n {
        return Err(LabError::KExceedsN { n, k });
    }
    let side = n.pow(4 * k as u32);
    if side <= DENSE_THRESHOLD {
        let (cov, se) = covariance_monte_carlo(n, k, samples, rng)?;
        return Ok((op_norm(&cov.view())?, se));
    }
    if samples < 2 {
        return Err(LabError::InvalidConfig("covariance estimate needs at least 2 samples".into()));
    }
    let p = projector_dense(n, k)?;
    let m = n.pow(k as u32);
    let mut t = Array2::<C64>::zeros((samples, m * m));
    for mut row in t.outer_iter_mut() {
        let u = tensor_power(&sample_haar(n, rng).view(), k);
        row.assign(&u.into_shape_with_order(m * m).expect("contiguous"));
    }
    let op = SampledCovariance { t, m, vec_p: p.into_shape_with_order(side).expect("contiguous") };
    let ctl = IterationControl { tol: 1e-6, max_basis: 120, ..IterationControl::default() };
    let (est, x) = lanczos_with_vector(&op, &ctl, rng)?;
    let per: Vec<f64> = op.apply(&x.view()).iter().map(|a| a.norm_sqr() * samples as f64).collect();
    let mean = per.iter().sum::<f64>() / samples as f64;
    let var = per.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    Ok((est.theta, (var / samples as f64).sqrt()))
}

/// `(1/(n²−1)) (I−Ψ) ⊗ (I−Ψ)`.
pub fn upsilon_target(n: usize) -> CMatrix {
    let q = identity(n * n) - MaxEntangledState::new(n).projector();
    kron(&q.view(), &q.view()) / C64::new((n * n) as f64 - 1.0, 0.0)
}

/// `E_μ[Z Z*]` and `E_μ[Z* Z]` against `I − P^(k)`. The identity holds pointwise for every
/// unitary, so no design order is required.
pub fn check_lemma_sigma(mu: &DesignMeasure, k: usize) -> Result<LemmaCheckReport> {
    let n = mu.n();
    if k > n {
        return Err(LabError::KExceedsN { n, k });
    }
    let dim = n.pow(2 * k as u32);
    dense_budget(dim)?;
    let p = projector_dense(n, k)?;
    let mut left = Array2::<C64>::zeros((dim, dim));
    let mut right = Array2::<C64>::zeros((dim, dim));
    for (u, &w) in mu.support().iter().zip(mu.weights()) {
        let z = moment_term(u, k) - &p;
        let zd = adjoint(&z.view());
        left.scaled_add(C64::new(w, 0.0), &z.dot(&zd));
        right.scaled_add(C64::new(w, 0.0), &zd.dot(&z));
    }
    let target = identity(dim) - &p;
    let dev = max_abs(&(&left - &target).view()).max(max_abs(&(&right - &target).view()));
    let d = mu.len();
    let id = if k == 1 { LemmaId::Sigma } else { LemmaId::SigmaK };
    let measured = op_norm(&left.view())? / d as f64;
    Ok(LemmaCheckReport::new(id, n, k, d, dev, CheckMode::ExactEnumeration, EXACT_TOL).with_measured(measured))
}

/// Covariance identity for `k = 1` on a measure of order at least 2.
pub fn check_lemma_upsilon(mu: &DesignMeasure) -> Result<LemmaCheckReport> {
    if mu.claimed_order() < 2 {
        return Err(LabError::OrderTooLow { claimed: mu.claimed_order(), required: 2 });
    }
    probe_lemma_upsilon(mu)
}

/// The covariance comparison without the order guard, used to exhibit its failure on
/// 1-designs.
pub fn probe_lemma_upsilon(mu: &DesignMeasure) -> Result<LemmaCheckReport> {
    let n = mu.n();
    let cov = covariance_enumerated(mu, 1)?;
    let dev = max_abs(&(&cov - upsilon_target(n)).view());
    let measured = op_norm(&cov.view())?;
    Ok(LemmaCheckReport::new(LemmaId::Upsilon, n, 1, mu.len(), dev, CheckMode::ExactEnumeration, EXACT_TOL)
        .with_measured(measured))
}

/// Monte Carlo Haar version of the covariance identity; tolerance `3/√samples`.
pub fn check_lemma_upsilon_monte_carlo<R: Rng + ?Sized>(n: usize, samples: usize, rng: &mut R) -> Result<LemmaCheckReport> {
    let (cov, se) = covariance_monte_carlo(n, 1, samples, rng)?;
    let dev = max_abs(&(&cov - upsilon_target(n)).view());
    let tol = 3.0 / (samples as f64).sqrt();
    let mut r = LemmaCheckReport::new(LemmaId::Upsilon, n, 1, samples, dev, CheckMode::MonteCarlo(samples), tol)
        .with_measured(op_norm(&cov.view())?);
    r.measured_stderr = Some(se);
    Ok(r)
}

/// `d·‖Cov(X)‖∞ = ‖Cov(Z)‖∞ ≤ κ/n` by enumeration. For `k = 1` this is the exact
/// identity of [`check_lemma_upsilon`].
pub fn check_lemma_upsilon_k(mu: &DesignMeasure, k: usize) -> Result<LemmaCheckReport> {
    if k == 1 {
        let mut r = check_lemma_upsilon(mu)?;
        r.lemma_id = LemmaId::UpsilonK;
        return Ok(r);
    }
    if mu.claimed_order() < 2 * k {
        return Err(LabError::OrderTooLow { claimed: mu.claimed_order(), required: 2 * k });
    }
    let n = mu.n();
    let measured = op_norm(&covariance_enumerated(mu, k)?.view())?;
    let tol = UPSILON_K_KAPPA / n as f64;
    Ok(LemmaCheckReport::new(LemmaId::UpsilonK, n, k, mu.len(), measured, CheckMode::ExactEnumeration, tol)
        .with_measured(measured))
}

/// Monte Carlo Haar version of [`check_lemma_upsilon_k`].
pub fn check_lemma_upsilon_k_monte_carlo<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    samples: usize,
    rng: &mut R,
) -> Result<LemmaCheckReport> {
    let (measured, se) = covariance_norm_monte_carlo(n, k, samples, rng)?;
    let tol = UPSILON_K_KAPPA / n as f64;
    let mut r = LemmaCheckReport::new(LemmaId::UpsilonK, n, k, samples, measured, CheckMode::MonteCarlo(samples), tol)
        .with_measured(measured);
    r.measured_stderr = Some(se);
    Ok(r)
}

fn matrix_power(h: &CMatrix, mut p: usize) -> CMatrix {
    let mut base = h.clone();
    let mut acc = identity(h.nrows());
    while p > 0 {
        if p & 1 == 1 {
            acc = acc.dot(&base);
        }
        p >>= 1;
        if p > 0 {
            base = base.dot(&base);
        }
    }
    acc
}

/// `tr|U^{⊗k} ⊗ Ū^{⊗k} − P^(k)|^{2p} = n^{2k} − k!` for a random unitary, and the assembled
/// `R_p = (1/d)(d·(n^{2k} − k!))^{1/2p}`.
pub fn check_lemma_rp<R: Rng + ?Sized>(n: usize, k: usize, d: usize, p: usize, rng: &mut R) -> Result<LemmaCheckReport> {
    if k > n {
        return Err(LabError::KExceedsN { n, k });
    }
    if p == 0 || d == 0 {
        return Err(LabError::InvalidConfig("rp check needs p >= 1 and d >= 1".into()));
    }
    let dim = n.pow(2 * k as u32);
    dense_budget(dim)?;
    let proj = projector_dense(n, k)?;
    let z = moment_term(&sample_haar(n, rng), k) - &proj;
    let h = adjoint(&z.view()).dot(&z);
    let tr = trace(&matrix_power(&h, p).view()).re;
    let fact: usize = (1..=k).product();
    let want = (dim - fact) as f64;
    let df = d as f64;
    let e = 1.0 / (2.0 * p as f64);
    // Σ_s E tr|Z_s/d|^{2p} = d · tr / d^{2p}
    let r_p = (df * tr / df.powi(2 * p as i32)).powf(e);
    let closed = (df * want).powf(e) / df;
    let dev = ((tr - want) / want).abs().max(((r_p - closed) / closed).abs());
    let id = if k == 1 { LemmaId::Rp } else { LemmaId::RpK };
    Ok(LemmaCheckReport::new(id, n, k, p, dev, CheckMode::ExactEnumeration, TRACE_TOL).with_measured(r_p))
}

/// `P² = P`, `P = P*`, `tr P = k!` and `(V^{⊗k} ⊗ V̄^{⊗k}) P = P` for 10 Haar `V`.
pub fn check_projector<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<LemmaCheckReport> {
    let p = projector_dense(n, k)?;
    let fact: usize = (1..=k).product();
    let mut dev = max_abs(&(p.dot(&p) - &p).view())
        .max(max_abs(&(adjoint(&p.view()) - &p).view()))
        .max((trace(&p.view()) - C64::new(fact as f64, 0.0)).norm());
    for _ in 0..10 {
        let w = moment_term(&sample_haar(n, rng), k);
        dev = dev.max(max_abs(&(w.dot(&p) - &p).view())).max(max_abs(&(p.dot(&w) - &p).view()));
    }
    Ok(LemmaCheckReport::new(LemmaId::Projector, n, k, 10, dev, CheckMode::ExactEnumeration, PROJECTOR_TOL))
}

/// Monte Carlo Haar average of `U^{⊗k} ⊗ Ū^{⊗k}` against `P^(k)` in Frobenius norm; passes
/// iff the error is within three empirical standard errors.
pub fn moment_oracle<R: Rng + ?Sized>(n: usize, k: usize, samples: usize, rng: &mut R) -> Result<LemmaCheckReport> {
    if samples < 1000 {
        return Err(LabError::InvalidConfig(format!("moment oracle needs at least 1000 samples, got {samples}")));
    }
    let p = projector_dense(n, k)?;
    let dim = p.nrows();
    let mut acc = Array2::<C64>::zeros((dim, dim));
    for _ in 0..samples {
        acc += &moment_term(&sample_haar(n, rng), k);
    }
    acc /= C64::new(samples as f64, 0.0);
    let err = frobenius(&(&acc - &p).view());
    // ‖W‖_F² = n^{2k} for every sample, so the sample variance needs only the mean
    let mean_sq = frobenius(&acc.view()).powi(2);
    let se = ((dim as f64 - mean_sq).max(0.0) / (samples as f64 - 1.0)).sqrt();
    let mut r = LemmaCheckReport::new(LemmaId::MomentOracle, n, k, samples, err, CheckMode::MonteCarlo(samples), 3.0 * se)
        .with_measured(err);
    r.measured_stderr = Some(se);
    Ok(r)
}

/// Exact moment operator of a finite measure against `P^(k)` in Frobenius norm.
pub fn moment_oracle_enumerated(mu: &DesignMeasure, k: usize) -> Result<LemmaCheckReport> {
    let n = mu.n();
    let p = projector_dense(n, k)?;
    let m = mu.moment_channel(k)?.matrix_form()?;
    let err = frobenius(&(m - &p).view());
    Ok(LemmaCheckReport::new(LemmaId::MomentOracle, n, k, mu.len(), err, CheckMode::ExactEnumeration, EXACT_TOL)
        .with_measured(err))
}

/// One unit of verification work.
#[derive(Clone, Debug)]
pub enum VerifyJob {
    Sigma(DesignMeasure, usize),
    Upsilon(DesignMeasure),
    UpsilonProbe(DesignMeasure),
    UpsilonMonteCarlo { n: usize, samples: usize },
    UpsilonK(DesignMeasure, usize),
    UpsilonKMonteCarlo { n: usize, k: usize, samples: usize },
    Rp { n: usize, k: usize, d: usize, p: usize },
    Projector { n: usize, k: usize },
    MomentOracle { n: usize, k: usize, samples: usize },
    MomentEnumerated(DesignMeasure, usize),
}

impl VerifyJob {
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LemmaCheckReport> {
        match self {
            VerifyJob::Sigma(mu, k) => check_lemma_sigma(mu, *k),
            VerifyJob::Upsilon(mu) => check_lemma_upsilon(mu),
            VerifyJob::UpsilonProbe(mu) => probe_lemma_upsilon(mu),
            VerifyJob::UpsilonMonteCarlo { n, samples } => check_lemma_upsilon_monte_carlo(*n, *samples, rng),
            VerifyJob::UpsilonK(mu, k) => check_lemma_upsilon_k(mu, *k),
            VerifyJob::UpsilonKMonteCarlo { n, k, samples } => check_lemma_upsilon_k_monte_carlo(*n, *k, *samples, rng),
            VerifyJob::Rp { n, k, d, p } => check_lemma_rp(*n, *k, *d, *p, rng),
            VerifyJob::Projector { n, k } => check_projector(*n, *k, rng),
            VerifyJob::MomentOracle { n, k, samples } => moment_oracle(*n, *k, *samples, rng),
            VerifyJob::MomentEnumerated(mu, k) => moment_oracle_enumerated(mu, *k),
        }
    }
}

/// Runs jobs in parallel; job `i` draws from stream `(seed, i, 0)`, so results do not
/// depend on scheduling.
pub fn run_jobs(jobs: &[VerifyJob], seed: u64) -> Vec<Result<LemmaCheckReport>> {
    jobs.par_iter()
        .enumerate()
        .map(|(i, job)| job.run(&mut stream(seed, i as u32, 0)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{enumerate_clifford_1qubit, enumerate_pauli};
    use crate::rng::seeded;

    #[test]
    fn sigma_identity_holds_pointwise() {
        let r = check_lemma_sigma(&enumerate_pauli(2).unwrap(), 1).unwrap();
        assert!(r.pass && r.max_abs_deviation <= 1e-12);
        assert!((r.measured.unwrap() - 0.25).abs() < 1e-12);
        let r = check_lemma_sigma(&enumerate_clifford_1qubit(), 2).unwrap();
        assert!(r.pass && r.lemma_id == LemmaId::SigmaK);
        let single = DesignMeasure::uniform(vec![sample_haar(3, &mut seeded(1))], 0).unwrap();
        assert!(check_lemma_sigma(&single, 1).unwrap().max_abs_deviation <= 1e-12);
        assert!(check_lemma_sigma(&single, 2).unwrap().pass);
    }

    #[test]
    fn upsilon_identity_on_clifford() {
        let r = check_lemma_upsilon(&enumerate_clifford_1qubit()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.measured.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let again = check_lemma_upsilon_k(&enumerate_clifford_1qubit(), 1).unwrap();
        assert_eq!(again.max_abs_deviation, r.max_abs_deviation);
        assert_eq!(again.measured, r.measured);
    }

    #[test]
    fn upsilon_fails_below_order_two() {
        let pauli = enumerate_pauli(2).unwrap();
        assert!(matches!(check_lemma_upsilon(&pauli), Err(LabError::OrderTooLow { claimed: 1, required: 2 })));
        let r = probe_lemma_upsilon(&pauli).unwrap();
        assert!(!r.pass);
        assert!(r.max_abs_deviation > 0.1);
    }

    #[test]
    fn upsilon_monte_carlo() {
        let r = check_lemma_upsilon_monte_carlo(2, 20_000, &mut seeded(2)).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.max_abs_deviation <= 0.05);
    }

    #[test]
    fn upsilon_k_requires_order_and_reports_value() {
        assert!(matches!(
            check_lemma_upsilon_k(&enumerate_clifford_1qubit(), 2),
            Err(LabError::OrderTooLow { claimed: 2, required: 4 })
        ));
        let r = check_lemma_upsilon_k_monte_carlo(2, 2, 20_000, &mut seeded(3)).unwrap();
        assert!(r.measured.unwrap().is_finite() && r.measured.unwrap() > 0.0);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn rp_traces() {
        for p in [1, 2, 5] {
            let r = check_lemma_rp(2, 1, 10, p, &mut seeded(4)).unwrap();
            assert!(r.pass, "{r:?}");
            let closed = (10.0f64 * 3.0).powf(1.0 / (2.0 * p as f64)) / 10.0;
            assert!((r.measured.unwrap() - closed).abs() < 1e-9);
        }
        let r = check_lemma_rp(3, 2, 4, 2, &mut seeded(5)).unwrap();
        assert!(r.pass && r.lemma_id == LemmaId::RpK);
        // large p drives (d(n²−1))^{1/2p} to 1
        let r = check_lemma_rp(2, 1, 10, 60, &mut seeded(6)).unwrap();
        assert!((r.measured.unwrap() * 10.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn projector_axioms() {
        for (n, k) in [(2, 1), (3, 2)] {
            assert!(check_projector(n, k, &mut seeded(7)).unwrap().pass);
        }
    }

    #[test]
    fn moment_oracles() {
        let r = moment_oracle(2, 1, 10_000, &mut seeded(8)).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.max_abs_deviation <= 0.1);
        let r = moment_oracle_enumerated(&enumerate_clifford_1qubit(), 2).unwrap();
        assert!(r.pass && r.max_abs_deviation <= 1e-10);
        assert!(moment_oracle(2, 1, 10, &mut seeded(0)).is_err());
    }

    #[test]
    fn parallel_jobs_are_deterministic() {
        let jobs = vec![VerifyJob::Rp { n: 2, k: 1, d: 3, p: 2 }, VerifyJob::Projector { n: 2, k: 2 }];
        let a: Vec<_> = run_jobs(&jobs, 9).into_iter().map(|r| r.unwrap()).collect();
        let b: Vec<_> = run_jobs(&jobs, 9).into_iter().map(|r| r.unwrap()).collect();
        assert_eq!(a, b);
        assert!(a[0].to_json().contains("\"lemma_id\":\"rp\""));
    }
}
