//! Exact Weingarten function and the Haar moment projector
//! `P^(k) = E_{U∼Haar}[U^{⊗k} ⊗ Ū^{⊗k}]`.
//!
//! `P^(k)` is the orthogonal projector onto `span{u_π : π ∈ S_k}`. With the Gram matrix
//! `G_{πσ} = ⟨u_π|u_σ⟩ = n^{#cycles(πσ⁻¹)}`, `P^(k) = Σ_{π,σ} (G⁻¹)_{πσ} |u_π⟩⟨u_σ|`, and
//! `(G⁻¹)_{πσ} = Wg(n, πσ⁻¹)` depends only on the cycle type of `πσ⁻¹`. The inverse is
//! computed exactly in rationals by solving the class-reduced system (one unknown per
//! cycle type) and only converted to `f64` when the projector is assembled.

use std::collections::BTreeMap;
use std::fmt;

use ndarray::{Array1, Array2, ArrayView1};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::error::{LabError, Result};
use crate::linalg::{CMatrix, CVector};
use crate::symm::{cycle_types, enumerate_permutations, moebius, CycleType, Permutation};
use crate::tensor_ops::u_pi_support;
use crate::{C64, DENSE_THRESHOLD};

/// Largest order with exact Weingarten support.
pub const MAX_ORDER: usize = 6;

fn check_order(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > MAX_ORDER {
        return Err(LabError::OrderUnsupported(k, MAX_ORDER));
    }
    if k > n {
        return Err(LabError::KExceedsN { n, k });
    }
    Ok(())
}

fn big_pow(n: usize, e: usize) -> BigInt {
    Pow::pow(BigInt::from(n), e)
}

/// `⟨u_π|u_σ⟩` over `S_k × S_k`, rows and columns in [`enumerate_permutations`] order.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub n: usize,
    pub k: usize,
    pub perms: Vec<Permutation>,
    entries: Vec<BigInt>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.perms.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.size() + j]
    }
}

pub fn gram_matrix(n: usize, k: usize) -> Result<GramMatrix> {
    check_order(n, k)?;
    let perms = enumerate_permutations(k)?;
    let mut entries = Vec::with_capacity(perms.len() * perms.len());
    for p in &perms {
        for q in &perms {
            let c = p.compose(&q.inverse())?.num_cycles();
            entries.push(big_pow(n, c));
        }
    }
    Ok(GramMatrix { n, k, perms, entries })
}

/// Exact values `Wg(n, ·)` keyed by cycle type.
#[derive(Clone, Debug, PartialEq)]
pub struct WeingartenTable {
    pub n: usize,
    pub k: usize,
    values: BTreeMap<CycleType, BigRational>,
}

impl WeingartenTable {
    pub fn get(&self, t: &CycleType) -> Option<&BigRational> {
        self.values.get(t)
    }

    pub fn value(&self, p: &Permutation) -> &BigRational {
        &self.values[&p.cycle_type()]
    }

    pub fn value_f64(&self, p: &Permutation) -> f64 {
        self.value(p).to_f64().unwrap_or(f64::NAN)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CycleType, &BigRational)> {
        self.values.iter()
    }
}

impl fmt::Display for WeingartenTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, v) in &self.values {
            writeln!(f, "{t} -> {v}")?;
        }
        Ok(())
    }
}

pub fn wg_exact(n: usize, k: usize) -> Result<WeingartenTable> {
    check_order(n, k)?;
    let types = cycle_types(k);
    let perms = enumerate_permutations(k)?;
    let class_of: Vec<usize> = perms
        .iter()
        .map(|p| {
            let t = p.cycle_type();
            types.iter().position(|x| *x == t).expect("partition list is complete")
        })
        .collect();
    // Row A: Σ_C Wg(C) Σ_{σ∈C} n^{#cycles(ρ_A σ⁻¹)} = [A is the identity class]
    let m = types.len();
    let mut a = vec![vec![BigRational::zero(); m + 1]; m];
    for (row, t) in types.iter().enumerate() {
        let rho = t.representative();
        for (sigma, &class) in perms.iter().zip(&class_of) {
            let c = rho.compose(&sigma.inverse())?.num_cycles();
            a[row][class] += BigRational::from_integer(big_pow(n, c));
        }
        if t.length() == 0 {
            a[row][m] = BigRational::one();
        }
    }
    let sol = solve_exact(a).ok_or(LabError::SingularGram { n, k })?;
    Ok(WeingartenTable { n, k, values: types.into_iter().zip(sol).collect() })
}

// Gauss-Jordan on an augmented m×(m+1) rational system.
fn solve_exact(mut a: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..=m {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[m].clone()).collect())
}

/// Leading term of the large-`n` expansion: `Mb(π) / n^{k+|π|}`.
pub fn wg_asymptotic(n: usize, p: &Permutation, k: usize) -> Result<BigRational> {
    if p.degree() != k {
        return Err(LabError::DegreeMismatch(p.degree(), k));
    }
    if k > n {
        return Err(LabError::KExceedsN { n, k });
    }
    let mb = moebius(p)?;
    Ok(BigRational::new(BigInt::from(mb), big_pow(n, k + p.length())))
}

/// The moment projector `P^(k)` in factored form: permutation vectors and the Weingarten
/// coefficient matrix. Applying it never materializes an `n^{2k} × n^{2k}` matrix.
#[derive(Clone, Debug)]
pub struct MomentProjector {
    n: usize,
    k: usize,
    perms: Vec<Permutation>,
    supports: Vec<Vec<usize>>,
    coeffs: Array2<f64>,
    table: WeingartenTable,
}

impl MomentProjector {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let table = wg_exact(n, k)?;
        let perms = enumerate_permutations(k)?;
        n.checked_pow(2 * k as u32).ok_or(LabError::DimensionTooLarge { dim: usize::MAX, limit: usize::MAX })?;
        let supports = perms.iter().map(|p| u_pi_support(n, p)).collect();
        let r = perms.len();
        let mut coeffs = Array2::<f64>::zeros((r, r));
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                coeffs[[i, j]] = table.value_f64(&p.compose(&q.inverse())?);
            }
        }
        Ok(Self { n, k, perms, supports, coeffs, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `n^{2k}`.
    pub fn dim(&self) -> usize {
        self.n.pow(2 * self.k as u32)
    }

    /// `r(n,k) = k!` since `k ≤ n`.
    pub fn rank(&self) -> usize {
        self.perms.len()
    }

    pub fn permutations(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn table(&self) -> &WeingartenTable {
        &self.table
    }

    /// Overlaps `⟨u_σ|v⟩` for every `σ`.
    pub fn overlaps(&self, v: &ArrayView1<C64>) -> Vec<C64> {
        self.supports.iter().map(|s| s.iter().map(|&i| v[i]).sum()).collect()
    }

    /// `P^(k) v = Σ_{π,σ} Wg(πσ⁻¹) u_π ⟨u_σ|v⟩`.
    pub fn apply(&self, v: &ArrayView1<C64>) -> Result<CVector> {
        if v.len() != self.dim() {
            return Err(LabError::LengthMismatch { expected: self.dim(), got: v.len() });
        }
        let mut out = Array1::<C64>::zeros(self.dim());
        self.apply_add(v, C64::new(1.0, 0.0), &mut out);
        Ok(out)
    }

    /// `out += alpha · P^(k) v`, without a length check.
    pub(crate) fn apply_add(&self, v: &ArrayView1<C64>, alpha: C64, out: &mut CVector) {
        let ov = self.overlaps(v);
        for (i, support) in self.supports.iter().enumerate() {
            let c: C64 = self.coeffs.row(i).iter().zip(&ov).map(|(w, o)| o * *w).sum::<C64>() * alpha;
            for &idx in support {
                out[idx] += c;
            }
        }
    }

    pub fn dense(&self) -> Result<CMatrix> {
        let dim = self.dim();
        if dim > DENSE_THRESHOLD {
            return Err(LabError::DimensionTooLargeForDense { dim, limit: DENSE_THRESHOLD });
        }
        let mut p = Array2::<C64>::zeros((dim, dim));
        for (i, si) in self.supports.iter().enumerate() {
            for (j, sj) in self.supports.iter().enumerate() {
                let w = C64::new(self.coeffs[[i, j]], 0.0);
                for &a in si {
                    for &b in sj {
                        p[[a, b]] += w;
                    }
                }
            }
        }
        Ok(p)
    }
}

pub fn projector_dense(n: usize, k: usize) -> Result<CMatrix> {
    MomentProjector::new(n, k)?.dense()
}

pub fn projector_apply(n: usize, k: usize, v: &ArrayView1<C64>) -> Result<CVector> {
    MomentProjector::new(n, k)?.apply(v)
}
