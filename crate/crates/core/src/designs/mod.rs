//! Unitary samplers and finitely supported design measures.
//!
//! A [`Sampler`] draws unitaries from a counter-based stream: the `s`-th unitary of trial
//! `t` under seed `seed` always comes from [`crate::rng::stream`]`(seed, t, s)`, so trials
//! and their unitaries can be generated in any order, serially or in parallel.

mod clifford;
mod io;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use ndarray_linalg::QR;
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;
use rand_distr::StandardNormal;

pub use clifford::{enumerate_clifford_1qubit, random_symplectic, sample_clifford, Tableau, MAX_CLIFFORD_QUBITS};
pub use io::{load_measure, save_measure};

use crate::channels::MixedUnitaryChannel;
use crate::error::{LabError, Result};
use crate::linalg::{unitarity_residual, CMatrix};
use crate::rng::{stream, SPECTRAL_SLOT};
use crate::spectral::{second_singular_value_with, SpectralOptions};
use crate::{C64, DENSE_THRESHOLD};

/// Frobenius tolerance for `‖U*U − I‖`.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Tolerance on `|Σ w − 1|`.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Design order reported for the Haar measure.
pub const HAAR_ORDER: usize = usize::MAX;

/// Haar-distributed unitary: QR of a standard complex Ginibre matrix with the phases of
/// `diag R` moved back into `Q`.
pub fn sample_haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = Array2::from_shape_fn((n, n), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * FRAC_1_SQRT_2
    });
    let (mut q, r) = g.qr().expect("QR of a square Ginibre matrix");
    for j in 0..n {
        let d = r[[j, j]];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).mapv_inplace(|x| x * phase);
    }
    q
}

/// `X^a Z^b` with `X|j⟩ = |j+1⟩` and `Z|j⟩ = ω^j|j⟩`, `ω = e^{2πi/n}`.
pub fn weyl_operator(n: usize, a: usize, b: usize) -> CMatrix {
    let mut u = Array2::<C64>::zeros((n, n));
    for j in 0..n {
        u[[(j + a) % n, j]] = C64::from_polar(1.0, 2.0 * PI * ((b * j) % n) as f64 / n as f64);
    }
    u
}

/// A probability measure on `U(n)` with finite support.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMeasure {
    n: usize,
    support: Vec<CMatrix>,
    weights: Vec<f64>,
    claimed_order: usize,
}

impl DesignMeasure {
    pub fn new(support: Vec<CMatrix>, weights: Vec<f64>, claimed_order: usize) -> Result<Self> {
        let n = support.first().map(|u| u.nrows()).ok_or_else(|| LabError::parse("unitaries", "empty support"))?;
        if n == 0 {
            return Err(LabError::parse("unitaries", "zero-dimensional matrices"));
        }
        for (i, u) in support.iter().enumerate() {
            if u.dim() != (n, n) {
                return Err(LabError::Shape(format!("unitary {i} has shape {:?}, expected ({n}, {n})", u.dim())));
            }
            let residual = unitarity_residual(&u.view());
            if residual.is_nan() || residual > UNITARITY_TOL {
                return Err(LabError::UnitarityViolation { index: i, residual });
            }
        }
        if weights.len() != support.len() {
            return Err(LabError::parse(
                "weights",
                format!("{} weights for {} unitaries", weights.len(), support.len()),
            ));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(LabError::parse(format!("weights[{i}]"), "weights must be finite and nonnegative"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(LabError::parse("weights", format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { n, support, weights, claimed_order })
    }

    pub fn uniform(support: Vec<CMatrix>, claimed_order: usize) -> Result<Self> {
        let w = 1.0 / support.len().max(1) as f64;
        let weights = vec![w; support.len()];
        Self::new(support, weights, claimed_order)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[CMatrix] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn claimed_order(&self) -> usize {
        self.claimed_order
    }

    /// `|supp μ|`.
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// The mixed-unitary channel `Y ↦ Σ w_s U_s^{⊗k} Y U_s^{*⊗k}`, whose matrix form is the
    /// moment operator `P_μ^(k)`.
    pub fn moment_channel(&self, k: usize) -> Result<MixedUnitaryChannel> {
        MixedUnitaryChannel::weighted(self.support.clone(), self.weights.clone(), k)
    }
}

/// Uniform measure on the `n²` Weyl operators, ordered `X^a Z^b` with `a` fastest.
pub fn enumerate_pauli(n: usize) -> Result<DesignMeasure> {
    if !(2..=16).contains(&n) {
        return Err(LabError::InvalidConfig(format!("generalized Pauli group needs 2 <= n <= 16, got {n}")));
    }
    let support = (0..n).flat_map(|b| (0..n).map(move |a| weyl_operator(n, a, b))).collect();
    DesignMeasure::uniform(support, 1)
}

/// `‖P_μ^(k) − P^(k)‖∞`, dense up to the shared threshold and through the spectral engine
/// otherwise.
pub fn design_defect(mu: &DesignMeasure, k: usize) -> Result<f64> {
    if k > mu.n() {
        return Err(LabError::KExceedsN { n: mu.n(), k });
    }
    let channel = mu.moment_channel(k)?;
    let opts = SpectralOptions { dense_limit: DENSE_THRESHOLD, ..SpectralOptions::default() };
    let mut rng = stream(0, 0, SPECTRAL_SLOT);
    Ok(second_singular_value_with(&channel, &opts, &mut rng)?.s2_estimate)
}

/// Defect of a sampler, defined only when its law has an enumerated finite support.
pub fn sampler_defect(kind: &SamplerKind, k: usize) -> Result<f64> {
    design_defect(&kind.finite_measure()?, k)
}

/// The laws a [`Sampler`] can draw from.
#[derive(Clone, Debug)]
pub enum SamplerKind {
    Haar(usize),
    /// Uniform over the Clifford group on this many qubits.
    CliffordQubits(usize),
    GeneralizedPauli(usize),
    Finite(Arc<DesignMeasure>),
}

impl SamplerKind {
    /// Matrix dimension of the samples.
    pub fn dim(&self) -> usize {
        match self {
            SamplerKind::Haar(n) | SamplerKind::GeneralizedPauli(n) => *n,
            SamplerKind::CliffordQubits(q) => 1 << q,
            SamplerKind::Finite(mu) => mu.n(),
        }
    }

    /// Largest `k` for which the law is an exact `k`-design.
    pub fn design_order(&self) -> usize {
        match self {
            SamplerKind::Haar(_) => HAAR_ORDER,
            SamplerKind::CliffordQubits(_) => 3,
            SamplerKind::GeneralizedPauli(_) => 1,
            SamplerKind::Finite(mu) => mu.claimed_order(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SamplerKind::Haar(0) => Err(LabError::InvalidConfig("Haar sampler needs n >= 1".into())),
            SamplerKind::CliffordQubits(q) if *q > MAX_CLIFFORD_QUBITS => {
                Err(LabError::TooManyQubits(*q, MAX_CLIFFORD_QUBITS))
            }
            SamplerKind::CliffordQubits(0) => Err(LabError::InvalidConfig("Clifford sampler needs >= 1 qubit".into())),
            SamplerKind::GeneralizedPauli(n) if !(2..=16).contains(n) => {
                Err(LabError::InvalidConfig(format!("generalized Pauli group needs 2 <= n <= 16, got {n}")))
            }
            _ => Ok(()),
        }
    }

    /// The law as an explicit measure, when one is enumerated.
    pub fn finite_measure(&self) -> Result<DesignMeasure> {
        match self {
            SamplerKind::GeneralizedPauli(n) => enumerate_pauli(*n),
            SamplerKind::CliffordQubits(1) => Ok(enumerate_clifford_1qubit()),
            SamplerKind::Finite(mu) => Ok((**mu).clone()),
            other => Err(LabError::NotFiniteSupport(other.to_string())),
        }
    }

    fn draw(&self, rng: &mut crate::rng::LabRng) -> CMatrix {
        match self {
            SamplerKind::Haar(n) => sample_haar(*n, rng),
            SamplerKind::CliffordQubits(q) => sample_clifford(*q, rng).expect("qubit count validated"),
            SamplerKind::GeneralizedPauli(n) => weyl_operator(*n, rng.random_range(0..*n), rng.random_range(0..*n)),
            SamplerKind::Finite(mu) => {
                let idx = WeightedIndex::new(mu.weights()).expect("weights validated").sample(rng);
                mu.support()[idx].clone()
            }
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerKind::Haar(n) => write!(f, "haar({n})"),
            SamplerKind::CliffordQubits(q) => write!(f, "clifford({q} qubits)"),
            SamplerKind::GeneralizedPauli(n) => write!(f, "pauli({n})"),
            SamplerKind::Finite(mu) => write!(f, "finite({} elements, n={})", mu.len(), mu.n()),
        }
    }
}

/// A reproducible stream of unitaries.
#[derive(Debug)]
pub struct Sampler {
    kind: SamplerKind,
    seed: u64,
    trial: u32,
    slot: u32,
    forks: u64,
}

impl Sampler {
    pub fn new(kind: SamplerKind, seed: u64) -> Result<Self> {
        Self::for_trial(kind, seed, 0)
    }

    /// Stream of trial `trial`: its `s`-th sample uses slot `s`.
    pub fn for_trial(kind: SamplerKind, seed: u64, trial: u32) -> Result<Self> {
        kind.validate()?;
        Ok(Self { kind, seed, trial, slot: 0, forks: 0 })
    }

    pub fn kind(&self) -> &SamplerKind {
        &self.kind
    }

    pub fn sample(&mut self) -> CMatrix {
        let mut rng = stream(self.seed, self.trial, self.slot);
        self.slot += 1;
        self.kind.draw(&mut rng)
    }

    pub fn sample_many(&mut self, d: usize) -> Vec<CMatrix> {
        (0..d).map(|_| self.sample()).collect()
    }

    /// Child sampler on an independent stream. Successive forks get distinct streams, and
    /// the parent's own sequence is unaffected.
    pub fn fork(&mut self) -> Sampler {
        self.forks += 1;
        let seed = splitmix64(self.seed ^ splitmix64(self.forks ^ ((self.trial as u64) << 32)));
        Sampler { kind: self.kind.clone(), seed, trial: self.trial, slot: 0, forks: 0 }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{conj, frobenius, kron, max_abs, tensor_power};
    use crate::rng::seeded;
    use crate::tensor_ops::MaxEntangledState;
    use crate::weingarten::projector_dense;
    use ndarray_linalg::Determinant;

    #[test]
    fn haar_samples_are_unitary_with_unit_determinant() {
        let mut rng = seeded(1);
        for n in [1, 2, 3, 7, 16] {
            for _ in 0..5 {
                let u = sample_haar(n, &mut rng);
                assert!(unitarity_residual(&u.view()) <= UNITARITY_TOL);
                assert!((u.det().unwrap().norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn haar_phase_mean_vanishes() {
        let mut rng = seeded(2);
        let samples = 100_000;
        let mut mean = C64::new(0.0, 0.0);
        for _ in 0..samples {
            mean += sample_haar(1, &mut rng)[[0, 0]];
        }
        assert!((mean / samples as f64).norm() <= 0.02);
    }

    #[test]
    fn haar_first_moment_is_max_entangled_projector() {
        let mut rng = seeded(3);
        let samples = 10_000;
        let mut acc = Array2::<C64>::zeros((4, 4));
        for _ in 0..samples {
            let u = sample_haar(2, &mut rng);
            acc += &kron(&u.view(), &conj(&u.view()).view());
        }
        acc /= C64::new(samples as f64, 0.0);
        let psi = MaxEntangledState::new(2).projector();
        assert!(frobenius(&(acc - psi).view()) < 0.1);
    }

    #[test]
    fn pauli_enumeration() {
        let mu = enumerate_pauli(2).unwrap();
        assert_eq!(mu.len(), 4);
        assert_eq!(mu.claimed_order(), 1);
        assert!(mu.weights().iter().all(|&w| w == 0.25));
        let x = Array2::from_shape_vec((2, 2), vec![0., 1., 1., 0.]).unwrap().mapv(|v| C64::new(v, 0.0));
        let z = Array2::from_shape_vec((2, 2), vec![1., 0., 0., -1.]).unwrap().mapv(|v| C64::new(v, 0.0));
        let want = [crate::linalg::identity(2), x.clone(), z.clone(), x.dot(&z)];
        for (got, want) in mu.support().iter().zip(&want) {
            assert!(max_abs(&(got - want).view()) < 1e-15);
        }
        for n in [3, 5, 16] {
            assert_eq!(enumerate_pauli(n).unwrap().len(), n * n);
        }
        assert!(enumerate_pauli(1).is_err());
        assert!(enumerate_pauli(17).is_err());
    }

    #[test]
    fn pauli_defects() {
        for n in [2, 3, 4] {
            let mu = enumerate_pauli(n).unwrap();
            assert!(design_defect(&mu, 1).unwrap() <= 1e-12);
            assert!(design_defect(&mu, 2).unwrap() >= 0.9);
        }
    }

    #[test]
    fn pauli_defect_matches_brute_force_oracle() {
        // P_μ^(2) built entry by entry from Kronecker products
        let n = 2;
        let mu = enumerate_pauli(n).unwrap();
        let mut pm = Array2::<C64>::zeros((16, 16));
        for (u, w) in mu.support().iter().zip(mu.weights()) {
            let t = tensor_power(&u.view(), 2);
            pm += &(kron(&t.view(), &conj(&t.view()).view()) * C64::new(*w, 0.0));
        }
        let diff = pm - projector_dense(n, 2).unwrap();
        let oracle = crate::linalg::op_norm(&diff.view()).unwrap();
        assert!((oracle - design_defect(&mu, 2).unwrap()).abs() < 1e-12);
        assert!(oracle >= 0.9);
    }

    #[test]
    fn identity_measure_defect_is_one() {
        let mu = DesignMeasure::uniform(vec![crate::linalg::identity(2)], 0).unwrap();
        assert!((design_defect(&mu, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(design_defect(&mu, 3), Err(LabError::KExceedsN { .. })));
    }

    #[test]
    fn measure_validation() {
        let id = crate::linalg::identity(2);
        let bad = DesignMeasure::new(vec![id.clone(), id.clone()], vec![0.5, 0.4], 0).unwrap_err();
        assert!(matches!(&bad, LabError::Parse { location, .. } if location == "weights"));
        let mut nonunitary = id.clone();
        nonunitary[[0, 0]] = C64::new(2.0, 0.0);
        let err = DesignMeasure::uniform(vec![id, nonunitary], 0).unwrap_err();
        assert!(matches!(err, LabError::UnitarityViolation { index: 1, .. }));
    }

    #[test]
    fn samplers_reproduce_and_fork() {
        for kind in [SamplerKind::Haar(3), SamplerKind::CliffordQubits(2), SamplerKind::GeneralizedPauli(5)] {
            let a = Sampler::for_trial(kind.clone(), 11, 4).unwrap().sample_many(3);
            let b = Sampler::for_trial(kind.clone(), 11, 4).unwrap().sample_many(3);
            assert_eq!(a, b);
            for u in &a {
                assert!(unitarity_residual(&u.view()) <= UNITARITY_TOL);
            }
            let mut parent = Sampler::for_trial(kind.clone(), 11, 4).unwrap();
            let f1 = parent.fork().sample_many(2);
            let f2 = parent.fork().sample_many(2);
            assert_eq!(parent.sample_many(3), a);
            if !matches!(kind, SamplerKind::GeneralizedPauli(_)) {
                assert_ne!(f1, f2);
                assert_ne!(f1[..], a[..2]);
            }
        }
        let haar = Sampler::for_trial(SamplerKind::Haar(3), 11, 5).unwrap().sample();
        assert_ne!(haar, Sampler::for_trial(SamplerKind::Haar(3), 11, 4).unwrap().sample());
        assert!(matches!(Sampler::new(SamplerKind::CliffordQubits(11), 0), Err(LabError::TooManyQubits(11, 10))));
    }

    #[test]
    fn finite_sampler_respects_weights() {
        let id = crate::linalg::identity(2);
        let x = weyl_operator(2, 1, 0);
        let mu = Arc::new(DesignMeasure::new(vec![id.clone(), x], vec![0.75, 0.25], 0).unwrap());
        let mut s = Sampler::new(SamplerKind::Finite(mu), 3).unwrap();
        let hits = (0..4000).filter(|_| s.sample() == id).count();
        assert!((hits as f64 / 4000.0 - 0.75).abs() < 0.03);
    }

    #[test]
    fn continuous_samplers_have_no_defect() {
        assert!(matches!(sampler_defect(&SamplerKind::Haar(2), 1), Err(LabError::NotFiniteSupport(_))));
        assert!(sampler_defect(&SamplerKind::GeneralizedPauli(3), 1).unwrap() <= 1e-12);
    }

    #[test]
    fn exact_design_implies_lower_orders() {
        let mu = enumerate_clifford_1qubit();
        assert!(design_defect(&mu, 2).unwrap() <= 1e-10);
        assert!(design_defect(&mu, 1).unwrap() <= 1e-9);
    }
}
