//! Index gymnastics on matrices over tensor-product spaces.
//!
//! All functions use the row-major multi-index convention documented at the crate root.
//! Factor labels in doc comments count from 1, matching the usual `Ψ₁₃ ⊗ Ψ₂₄` notation,
//! while code indices count from 0.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{LabError, Result};
use crate::linalg::{CMatrix, CVector};
use crate::symm::Permutation;
use crate::C64;

/// Largest vector length built by [`u_pi_vector`].
pub const VECTOR_BUDGET: usize = 1 << 26;

/// A square matrix together with the tensor factor structure of its row (and column) space.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedMatrix {
    matrix: CMatrix,
    factor_dims: Vec<usize>,
}

impl IndexedMatrix {
    pub fn new(matrix: CMatrix, factor_dims: Vec<usize>) -> Result<Self> {
        let total: usize = factor_dims.iter().product();
        if matrix.nrows() != total || matrix.ncols() != total || factor_dims.is_empty() {
            return Err(LabError::Shape(format!(
                "{}x{} matrix does not match factor dims {:?}",
                matrix.nrows(),
                matrix.ncols(),
                factor_dims
            )));
        }
        Ok(Self { matrix, factor_dims })
    }

    /// `m` factors of dimension `n`.
    pub fn uniform(matrix: CMatrix, n: usize, m: usize) -> Result<Self> {
        Self::new(matrix, vec![n; m])
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn kron(&self, other: &IndexedMatrix) -> IndexedMatrix {
        let mut dims = self.factor_dims.clone();
        dims.extend_from_slice(&other.factor_dims);
        IndexedMatrix { matrix: crate::linalg::kron(&self.matrix.view(), &other.matrix.view()), factor_dims: dims }
    }
}

/// Realignment with respect to the bipartition {first half of the factors} | {second half}:
/// `M^R_{(i,k),(j,l)} = M_{(i,j),(k,l)}`, where `i, k` index the first half and `j, l` the
/// second. The two halves must have equal total dimension.
pub fn realign(m: &IndexedMatrix) -> Result<IndexedMatrix> {
    let f = m.factor_dims();
    if f.len() % 2 != 0 {
        return Err(LabError::Shape(format!("realignment needs an even number of factors, got {f:?}")));
    }
    let half = f.len() / 2;
    let na: usize = f[..half].iter().product();
    let nb: usize = f[half..].iter().product();
    if na != nb {
        return Err(LabError::Shape(format!("realignment halves differ in dimension: {na} vs {nb}")));
    }
    let big = na;
    let src = m.matrix();
    let mut out = Array2::<C64>::zeros((big * big, big * big));
    for i in 0..big {
        for j in 0..big {
            let row = i * big + j;
            for k in 0..big {
                for l in 0..big {
                    out[[i * big + k, j * big + l]] = src[[row, k * big + l]];
                }
            }
        }
    }
    IndexedMatrix::new(out, f.to_vec())
}

/// Swaps the two halves of each factor pair: `M^S_{(j,i),(l,k)} = M_{(i,j),(k,l)}`.
pub fn swap_halves(m: &IndexedMatrix) -> Result<IndexedMatrix> {
    let f = m.factor_dims().len();
    if f % 2 != 0 {
        return Err(LabError::Shape("swap needs an even number of factors".into()));
    }
    let half = f / 2;
    let perm: Vec<usize> = (half..f).chain(0..half).collect();
    swap_factors(m, &Permutation::new(perm)?)
}

/// Relabels tensor factors of rows and columns simultaneously: output factor `t` is input
/// factor `perm(t)`. For `A ⊗ B` and the transposition this gives `B ⊗ A`.
pub fn swap_factors(m: &IndexedMatrix, perm: &Permutation) -> Result<IndexedMatrix> {
    let dims = m.factor_dims();
    if perm.degree() != dims.len() {
        return Err(LabError::Shape(format!(
            "permutation of degree {} applied to {} factors",
            perm.degree(),
            dims.len()
        )));
    }
    let map = factor_permutation_map(dims, perm);
    let src = m.matrix();
    let n = src.nrows();
    let mut out = Array2::<C64>::zeros((n, n));
    for (r_new, &r_old) in map.iter().enumerate() {
        for (c_new, &c_old) in map.iter().enumerate() {
            out[[r_new, c_new]] = src[[r_old, c_old]];
        }
    }
    let new_dims = (0..dims.len()).map(|t| dims[perm.apply(t)]).collect();
    IndexedMatrix::new(out, new_dims)
}

/// Same relabeling for a vector over the factor structure `dims`.
pub fn permute_vector_factors(v: &ArrayView1<C64>, dims: &[usize], perm: &Permutation) -> Result<CVector> {
    let total: usize = dims.iter().product();
    if v.len() != total {
        return Err(LabError::LengthMismatch { expected: total, got: v.len() });
    }
    let map = factor_permutation_map(dims, perm);
    Ok(map.iter().map(|&old| v[old]).collect())
}

// map[new_index] = old_index, for output factor t = input factor perm(t).
fn factor_permutation_map(dims: &[usize], perm: &Permutation) -> Vec<usize> {
    let m = dims.len();
    let new_dims: Vec<usize> = (0..m).map(|t| dims[perm.apply(t)]).collect();
    let mut old_strides = vec![1usize; m];
    for t in (0..m.saturating_sub(1)).rev() {
        old_strides[t] = old_strides[t + 1] * dims[t + 1];
    }
    let total: usize = dims.iter().product();
    let mut map = Vec::with_capacity(total);
    let mut digits = vec![0usize; m];
    for _ in 0..total {
        let old: usize = (0..m).map(|t| digits[t] * old_strides[perm.apply(t)]).sum();
        map.push(old);
        for t in (0..m).rev() {
            digits[t] += 1;
            if digits[t] < new_dims[t] {
                break;
            }
            digits[t] = 0;
        }
    }
    map
}

/// Indices `a·n^k + b` of the nonzero entries of `u_π`, where `a` encodes `(i₁,…,i_k)` and
/// `b` encodes `(i_{π(1)},…,i_{π(k)})`; enumerated in increasing `a`.
pub fn u_pi_support(n: usize, p: &Permutation) -> Vec<usize> {
    let k = p.degree();
    let nk = n.pow(k as u32);
    let mut strides = vec![1usize; k];
    for t in (0..k.saturating_sub(1)).rev() {
        strides[t] = strides[t + 1] * n;
    }
    let mut out = Vec::with_capacity(nk);
    let mut digits = vec![0usize; k];
    for a in 0..nk {
        let b: usize = (0..k).map(|t| digits[p.apply(t)] * strides[t]).sum();
        out.push(a * nk + b);
        for t in (0..k).rev() {
            digits[t] += 1;
            if digits[t] < n {
                break;
            }
            digits[t] = 0;
        }
    }
    out
}

/// `|u_π⟩ = Σ |i₁⋯i_k i_{π(1)}⋯i_{π(k)}⟩ ∈ C^{n^{2k}}`.
pub fn u_pi_vector(n: usize, p: &Permutation) -> Result<CVector> {
    let k = p.degree();
    if k > 6 {
        return Err(LabError::OrderUnsupported(k, 6));
    }
    let dim = n
        .checked_pow(2 * k as u32)
        .filter(|&d| d <= VECTOR_BUDGET)
        .ok_or(LabError::DimensionTooLarge { dim: usize::MAX, limit: VECTOR_BUDGET })?;
    let mut v = Array1::<C64>::zeros(dim);
    for idx in u_pi_support(n, p) {
        v[idx] = C64::new(1.0, 0.0);
    }
    Ok(v)
}

/// The maximally entangled state `ψ = Σ_i |ii⟩/√n` on `Cⁿ ⊗ Cⁿ`.
#[derive(Clone, Debug)]
pub struct MaxEntangledState {
    n: usize,
    vector: CVector,
}

impl MaxEntangledState {
    pub fn new(n: usize) -> Self {
        let mut vector = Array1::<C64>::zeros(n * n);
        let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        for i in 0..n {
            vector[i * n + i] = amp;
        }
        Self { n, vector }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    /// `Ψ = |ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix {
        outer(&self.vector.view(), &self.vector.view())
    }
}

/// `|a⟩⟨b|`.
pub fn outer(a: &ArrayView1<C64>, b: &ArrayView1<C64>) -> CMatrix {
    Array2::from_shape_fn((a.len(), b.len()), |(i, j)| a[i] * b[j].conj())
}

/// Product of maximally entangled states on `m` factors of dimension `n`, with one `ψ` on
/// each listed factor pair (0-based). Pairs must cover every factor exactly once.
pub fn entangled_pairs_vector(n: usize, m: usize, pairs: &[(usize, usize)]) -> Result<CVector> {
    let mut covered = vec![false; m];
    for &(a, b) in pairs {
        for x in [a, b] {
            if x >= m || covered[x] {
                return Err(LabError::Shape(format!("pairs {pairs:?} do not partition {m} factors")));
            }
            covered[x] = true;
        }
    }
    if covered.iter().any(|c| !c) {
        return Err(LabError::Shape(format!("pairs {pairs:?} do not partition {m} factors")));
    }
    let dim = n.pow(m as u32);
    let amp = (n as f64).powf(-(pairs.len() as f64) / 2.0);
    let mut v = Array1::<C64>::zeros(dim);
    let mut digits = vec![0usize; m];
    for (idx, slot) in v.iter_mut().enumerate() {
        let mut rest = idx;
        for t in (0..m).rev() {
            digits[t] = rest % n;
            rest /= n;
        }
        if pairs.iter().all(|&(a, b)| digits[a] == digits[b]) {
            *slot = C64::new(amp, 0.0);
        }
    }
    Ok(v)
}

/// Flip operator `F = Σ |ij⟩⟨ji|` on `Cⁿ ⊗ Cⁿ`.
pub fn flip(n: usize) -> IndexedMatrix {
    let mut f = Array2::<C64>::zeros((n * n, n * n));
    for i in 0..n {
        for j in 0..n {
            f[[i * n + j, j * n + i]] = C64::new(1.0, 0.0);
        }
    }
    IndexedMatrix { matrix: f, factor_dims: vec![n, n] }
}

/// `I/n` on `Cⁿ`.
pub fn maximally_mixed(n: usize) -> IndexedMatrix {
    IndexedMatrix { matrix: Array2::eye(n) / C64::new(n as f64, 0.0), factor_dims: vec![n] }
}

/// Row-major vectorization: `vec(Y)[a·cols + b] = Y[a, b]`.
pub fn vec(y: &ArrayView2<C64>) -> CVector {
    y.iter().copied().collect()
}

/// Inverse of [`vec`] for a square matrix.
pub fn unvec(v: &ArrayView1<C64>) -> Result<CMatrix> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() {
        return Err(LabError::Shape(format!("length {} is not a perfect square", v.len())));
    }
    Ok(Array2::from_shape_vec((n, n), v.to_vec()).expect("square shape"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::sample_haar;
    use crate::linalg::{conj, frobenius, kron, max_abs, op_norm};
    use crate::rng::seeded;
    use proptest::prelude::*;

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        use rand::Rng;
        let mut rng = seeded(seed);
        Array2::from_shape_fn((n, n), |_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn psi_pairs(n: usize, pairs: &[(usize, usize)]) -> CVector {
        entangled_pairs_vector(n, 4, pairs).unwrap()
    }

    #[test]
    fn realignment_identities_on_entangled_pairs() {
        for n in [2, 3] {
            let p12_34 = psi_pairs(n, &[(0, 1), (2, 3)]);
            let p13_24 = psi_pairs(n, &[(0, 2), (1, 3)]);
            let a = IndexedMatrix::uniform(outer(&p12_34.view(), &p12_34.view()), n, 4).unwrap();
            assert!(max_abs(&(realign(&a).unwrap().matrix() - a.matrix()).view()) < 1e-14);

            let b = IndexedMatrix::uniform(outer(&p13_24.view(), &p13_24.view()), n, 4).unwrap();
            let want = Array2::<C64>::eye(n.pow(4)) / C64::new((n * n) as f64, 0.0);
            assert!(max_abs(&(realign(&b).unwrap().matrix() - &want).view()) < 1e-14);

            let c = IndexedMatrix::uniform(outer(&p13_24.view(), &p12_34.view()), n, 4).unwrap();
            let psi = MaxEntangledState::new(n).projector();
            let want = kron(&Array2::<C64>::eye(n * n).view(), &psi.view()) / C64::new(n as f64, 0.0);
            assert!(max_abs(&(realign(&c).unwrap().matrix() - &want).view()) < 1e-14);
        }
    }

    #[test]
    fn realign_rejects_unbalanced_structures() {
        let m = IndexedMatrix::new(Array2::eye(6), vec![2, 3]).unwrap();
        assert!(matches!(realign(&m), Err(LabError::Shape(_))));
        let m = IndexedMatrix::new(Array2::eye(8), vec![2, 2, 2]).unwrap();
        assert!(matches!(realign(&m), Err(LabError::Shape(_))));
        assert!(IndexedMatrix::new(Array2::eye(5), vec![2, 2]).is_err());
    }

    #[test]
    fn swap_factors_exchanges_kron_factors() {
        let a = IndexedMatrix::new(random_matrix(2, 1), vec![2]).unwrap();
        let b = IndexedMatrix::new(random_matrix(3, 2), vec![3]).unwrap();
        let ab = a.kron(&b);
        let t = Permutation::transposition(2, 0, 1);
        let swapped = swap_factors(&ab, &t).unwrap();
        assert_eq!(swapped.factor_dims(), &[3, 2]);
        assert!(max_abs(&(swapped.matrix() - b.kron(&a).matrix()).view()) < 1e-15);

        let f = flip(2);
        let sf = swap_factors(&f, &t).unwrap();
        assert!(max_abs(&(sf.matrix() - f.matrix()).view()) < 1e-15);
        assert!(swap_factors(&f, &Permutation::identity(3)).is_err());
    }

    #[test]
    fn swap_preserves_operator_norm() {
        let m = IndexedMatrix::uniform(random_matrix(8, 3), 2, 3).unwrap();
        let p = Permutation::cycle(3, &[0, 2, 1]).unwrap();
        let s = swap_factors(&m, &p).unwrap();
        let d = op_norm(&m.matrix().view()).unwrap() - op_norm(&s.matrix().view()).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn u_pi_vectors() {
        let v = u_pi_vector(2, &Permutation::identity(1)).unwrap();
        let want: Vec<C64> = [1.0, 0.0, 0.0, 1.0].iter().map(|&x| C64::new(x, 0.0)).collect();
        assert_eq!(v.to_vec(), want);
        for (n, k) in [(2, 1), (3, 2), (2, 3)] {
            let u = u_pi_vector(n, &Permutation::identity(k)).unwrap();
            assert_eq!(crate::linalg::inner(&u.view(), &u.view()).re, n.pow(k as u32) as f64);
        }
        let id = u_pi_vector(3, &Permutation::identity(2)).unwrap();
        let tau = u_pi_vector(3, &Permutation::transposition(2, 0, 1)).unwrap();
        // brute-force count of index tuples with (i1,i2,i1,i2) = (j1,j2,j2,j1)
        let mut count = 0;
        for i1 in 0..3 {
            for i2 in 0..3 {
                for j1 in 0..3 {
                    for j2 in 0..3 {
                        if (i1, i2, i1, i2) == (j1, j2, j2, j1) {
                            count += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(count, 3);
        assert_eq!(crate::linalg::inner(&id.view(), &tau.view()).re, count as f64);
        assert!(matches!(
            u_pi_vector(64, &Permutation::identity(6)),
            Err(LabError::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn flip_vec_and_entangled_state() {
        let f = flip(2);
        let mut e01 = Array1::<C64>::zeros(4);
        e01[1] = C64::new(1.0, 0.0);
        let out = f.matrix().dot(&e01);
        assert_eq!(out[2], C64::new(1.0, 0.0));
        assert!(max_abs(&(f.matrix().dot(f.matrix()) - Array2::<C64>::eye(4)).view()) < 1e-15);

        for n in [2, 3, 5] {
            let psi = MaxEntangledState::new(n);
            let y = unvec(&psi.vector().view()).unwrap();
            let want = Array2::<C64>::eye(n) / C64::new((n as f64).sqrt(), 0.0);
            assert!(max_abs(&(y - want).view()) < 1e-15);
            let p = psi.projector();
            assert!((crate::linalg::trace(&p.view()).re - 1.0).abs() < 1e-14);
            assert!(max_abs(&(p.dot(&p) - &p).view()) < 1e-14);
            assert!((crate::linalg::norm(&psi.vector().view()) - 1.0).abs() < 1e-14);
            assert!(max_abs(&(maximally_mixed(n).matrix() * C64::new(n as f64, 0.0) - Array2::<C64>::eye(n)).view()) < 1e-15);
        }
    }

    #[test]
    fn entangled_state_is_invariant_under_u_ubar() {
        let mut rng = seeded(11);
        for n in [2, 3, 4] {
            let psi = MaxEntangledState::new(n);
            for _ in 0..5 {
                let u = sample_haar(n, &mut rng);
                let uu = kron(&u.view(), &conj(&u.view()).view());
                let out = uu.dot(psi.vector());
                assert!(crate::linalg::norm(&(&out - psi.vector()).view()) < 1e-12);
            }
        }
    }

    #[test]
    fn vec_identity_for_random_matrices() {
        let (a, b, y) = (random_matrix(3, 4), random_matrix(3, 5), random_matrix(3, 6));
        let lhs = kron(&a.view(), &conj(&b.view()).view()).dot(&vec(&y.view()));
        let rhs = vec(&a.dot(&y).dot(&crate::linalg::adjoint(&b.view())).view());
        assert!(crate::linalg::norm(&(&lhs - &rhs).view()) < 1e-12);
        assert_eq!(unvec(&vec(&y.view()).view()).unwrap(), y);
    }

    #[test]
    fn covariance_is_realigned_second_moment() {
        // samples Y of size 2×2; E(Y ⊗ Ȳ)^R against E(Y_ij conj(Y_kl)) arranged as ((ij),(kl))
        let samples: Vec<CMatrix> = (0..7).map(|s| random_matrix(2, 100 + s)).collect();
        let mut second = Array2::<C64>::zeros((4, 4));
        let mut cov = Array2::<C64>::zeros((4, 4));
        for y in &samples {
            second = second + kron(&y.view(), &conj(&y.view()).view());
            let v = vec(&y.view());
            cov = cov + outer(&v.view(), &v.view());
        }
        let r = realign(&IndexedMatrix::new(second, vec![2, 2]).unwrap()).unwrap();
        assert!(max_abs(&(r.matrix() - &cov).view()) < 1e-13);
    }

    proptest! {
        #[test]
        fn realign_is_an_isometric_involution(seed in 0u64..10_000) {
            let m = IndexedMatrix::uniform(random_matrix(9, seed), 3, 2).unwrap();
            let r = realign(&m).unwrap();
            prop_assert!((frobenius(&r.matrix().view()) - frobenius(&m.matrix().view())).abs() < 1e-12);
            let rr = realign(&r).unwrap();
            prop_assert_eq!(rr.matrix(), m.matrix());
        }
    }
}
