//! Clifford group: single-qubit enumeration and uniform N-qubit sampling.
//!
//! Sampling draws a uniformly random symplectic tableau through the canonical form
//! `F₂ · (H·Π) · F₁` (Hadamard layer and qubit permutation from the quantum Mallows
//! distribution, `F_i` random Borel elements), attaches random signs and then synthesizes
//! the dense unitary from the tableau. Rows `0..N` of a tableau are the images of `X_j`,
//! rows `N..2N` the images of `Z_j`; in a row, bit `j` is the `x` part on qubit `j` and
//! bit `N + j` the `z` part. Qubit 0 is the most significant tensor factor.

use std::collections::HashMap;

use ndarray::{Array1, Array2};
use rand::Rng;

use super::DesignMeasure;
use crate::error::{LabError, Result};
use crate::linalg::CMatrix;
use crate::C64;

/// Dense `2^N × 2^N` budget.
pub const MAX_CLIFFORD_QUBITS: usize = 10;

/// Binary symplectic matrix plus sign bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    qubits: usize,
    rows: Vec<u32>,
    signs: Vec<bool>,
}

impl Tableau {
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn signs(&self) -> &[bool] {
        &self.signs
    }

    /// `Σ_i (x_i · z'_i + z_i · x'_i) = 0` for every pair of distinct rows except the
    /// conjugate pairs `(j, N+j)`, where it is 1.
    pub fn is_symplectic(&self) -> bool {
        let n = self.qubits;
        let form = |a: u32, b: u32| {
            let (ax, az) = (a & low_mask(n), a >> n);
            let (bx, bz) = (b & low_mask(n), b >> n);
            ((ax & bz).count_ones() + (az & bx).count_ones()) % 2
        };
        (0..2 * n).all(|i| {
            (0..2 * n).all(|j| {
                let want = u32::from(i.abs_diff(j) == n);
                form(self.rows[i], self.rows[j]) == want
            })
        })
    }

    /// Applies the signed Pauli of `row` to a state vector.
    fn apply_row(&self, row: usize, v: &Array1<C64>) -> Array1<C64> {
        let n = self.qubits;
        let bits = self.rows[row];
        let (mut xmask, mut zmask) = (0usize, 0usize);
        for q in 0..n {
            let pos = n - 1 - q;
            if bits >> q & 1 == 1 {
                xmask |= 1 << pos;
            }
            if bits >> (n + q) & 1 == 1 {
                zmask |= 1 << pos;
            }
        }
        let ys = (xmask & zmask).count_ones();
        let mut phase = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)]
            [(ys % 4) as usize];
        if self.signs[row] {
            phase = -phase;
        }
        let mut out = Array1::<C64>::zeros(v.len());
        for (i, &x) in v.iter().enumerate() {
            let s = if (i & zmask).count_ones() % 2 == 1 { -phase } else { phase };
            out[i ^ xmask] = s * x;
        }
        out
    }

    /// Dense unitary `U` with `U X_j U* = row j` and `U Z_j U* = row N+j`, up to a global
    /// phase.
    pub fn to_unitary(&self) -> CMatrix {
        let n = self.qubits;
        let dim = 1usize << n;
        // U|0⟩ is the joint +1 eigenvector of the stabilizer rows
        let mut psi0 = None;
        for b in 0..dim {
            let mut v = Array1::<C64>::zeros(dim);
            v[b] = C64::new(1.0, 0.0);
            for j in 0..n {
                v = (&v + &self.apply_row(n + j, &v)) * C64::new(0.5, 0.0);
            }
            let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm * nrm > 0.5 / dim as f64 {
                psi0 = Some(v / C64::new(nrm, 0.0));
                break;
            }
        }
        let psi0 = psi0.expect("stabilizer rows of a symplectic tableau fix a state");
        let mut cols: Vec<Array1<C64>> = Vec::with_capacity(dim);
        cols.push(psi0);
        for x in 1..dim {
            let p = x.trailing_zeros() as usize;
            let qubit = n - 1 - p;
            let prev = &cols[x ^ (1 << p)];
            let c = self.apply_row(qubit, prev);
            cols.push(c);
        }
        let mut u = Array2::<C64>::zeros((dim, dim));
        for (x, c) in cols.iter().enumerate() {
            u.column_mut(x).assign(c);
        }
        u
    }
}

fn low_mask(n: usize) -> u32 {
    (1u32 << n) - 1
}

// GF(2) product of two square bit-row matrices.
fn gf2_mul(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter()
        .map(|&row| {
            let mut acc = 0u32;
            for (c, &br) in b.iter().enumerate() {
                if row >> c & 1 == 1 {
                    acc ^= br;
                }
            }
            acc
        })
        .collect()
}

fn gf2_transpose(a: &[u32], n: usize) -> Vec<u32> {
    (0..n)
        .map(|c| (0..n).fold(0u32, |acc, r| acc | ((a[r] >> c & 1) << r)))
        .collect()
}

// Inverse of an invertible GF(2) matrix by Gauss-Jordan.
fn gf2_inverse(a: &[u32], n: usize) -> Vec<u32> {
    let mut m = a.to_vec();
    let mut inv: Vec<u32> = (0..n).map(|i| 1 << i).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| m[r] >> c & 1 == 1).expect("invertible over GF(2)");
        m.swap(c, p);
        inv.swap(c, p);
        for r in 0..n {
            if r != c && m[r] >> c & 1 == 1 {
                m[r] ^= m[c];
                inv[r] ^= inv[c];
            }
        }
    }
    inv
}

fn sample_mallows<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<bool>, Vec<usize>) {
    let mut had = vec![false; n];
    let mut perm = vec![0; n];
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let m = n - i;
        let eps = 4f64.powi(-(m as i32));
        let r: f64 = rng.random();
        let j = (-(r + (1.0 - r) * eps).log2().ceil()) as usize;
        let j = j.min(2 * m - 1);
        had[i] = j < m;
        let k = if j < m { j } else { 2 * m - j - 1 };
        perm[i] = pool.remove(k);
    }
    (had, perm)
}

// [[δ, 0], [γδ, δ^{-T}]] with γ symmetric and δ unit lower triangular.
fn random_borel<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<u32> {
    let mut gamma = vec![0u32; n];
    let mut delta: Vec<u32> = (0..n).map(|i| 1 << i).collect();
    for i in 0..n {
        if rng.random::<bool>() {
            gamma[i] |= 1 << i;
        }
        for j in 0..i {
            if rng.random::<bool>() {
                gamma[i] |= 1 << j;
                gamma[j] |= 1 << i;
            }
            if rng.random::<bool>() {
                delta[i] |= 1 << j;
            }
        }
    }
    let gd = gf2_mul(&gamma, &delta);
    let dinv_t = gf2_transpose(&gf2_inverse(&delta, n), n);
    let mut rows = Vec::with_capacity(2 * n);
    rows.extend_from_slice(&delta);
    rows.extend(gd.iter().zip(&dinv_t).map(|(&l, &r)| l | (r << n)));
    rows
}

/// Uniformly random element of `Sp(2N, F₂)` as bit rows.
pub fn random_symplectic<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Vec<u32> {
    let n = qubits;
    let (had, perm) = sample_mallows(n, rng);
    let f1 = random_borel(n, rng);
    let f2 = random_borel(n, rng);
    let mut mid: Vec<u32> = (0..2 * n).map(|r| if r < n { f1[perm[r]] } else { f1[n + perm[r - n]] }).collect();
    for (i, &h) in had.iter().enumerate() {
        if h {
            mid.swap(i, n + i);
        }
    }
    gf2_mul(&f2, &mid)
}

/// Uniformly random signed tableau.
pub fn random_tableau<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Tableau {
    let rows = random_symplectic(qubits, rng);
    let signs = (0..2 * qubits).map(|_| rng.random::<bool>()).collect();
    Tableau { qubits, rows, signs }
}

/// Uniform Clifford unitary on `qubits` qubits as a dense matrix.
pub fn sample_clifford<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<CMatrix> {
    if qubits > MAX_CLIFFORD_QUBITS {
        return Err(LabError::TooManyQubits(qubits, MAX_CLIFFORD_QUBITS));
    }
    if qubits == 0 {
        return Err(LabError::InvalidConfig("Clifford sampling needs at least one qubit".into()));
    }
    Ok(random_tableau(qubits, rng).to_unitary())
}

// Phase-normalized, rounded entries used to compare group elements modulo U(1).
fn phase_key(u: &CMatrix) -> Vec<(i64, i64)> {
    let pivot = u.iter().find(|z| z.norm() > 1e-9).copied().unwrap_or(C64::new(1.0, 0.0));
    let fix = pivot.conj() / pivot.norm();
    u.iter().map(|z| {
        let w = z * fix;
        ((w.re * 1e8).round() as i64, (w.im * 1e8).round() as i64)
    })
    .collect()
}

/// The 24 single-qubit Cliffords modulo global phase, generated from `H` and `S` by
/// breadth-first closure, with uniform weights.
pub fn enumerate_clifford_1qubit() -> DesignMeasure {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = Array2::from_shape_vec((2, 2), vec![r, r, r, -r]).unwrap().mapv(|x| C64::new(x, 0.0));
    let s = Array2::from_shape_vec((2, 2), vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0)])
        .unwrap();
    let mut seen = HashMap::new();
    let mut group: Vec<CMatrix> = vec![crate::linalg::identity(2)];
    seen.insert(phase_key(&group[0]), 0usize);
    let mut head = 0;
    while head < group.len() {
        let g = group[head].clone();
        head += 1;
        for gen in [&h, &s] {
            let next = gen.dot(&g);
            let key = phase_key(&next);
            if !seen.contains_key(&key) {
                seen.insert(key, group.len());
                group.push(next);
            }
        }
    }
    DesignMeasure::uniform(group, 2).expect("Clifford products are unitary")
}
