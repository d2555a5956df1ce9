//! Mixed-unitary channels `Φ(Y) = Σ_s w_s U_s^{⊗k} Y U_s^{*⊗k}` (uniform `w_s = 1/d` by
//! default) and the centered operator `X = M_Φ − P^(k)`.
//!
//! Under the row-major `vec`, `M_Φ = Σ_s w_s U_s^{⊗k} ⊗ Ū_s^{⊗k}`. The action on a vector
//! never forms a Kronecker power: for `k = 1` the `d` conjugations are batched into two
//! large matrix products, for `k ≥ 2` each of the `2k` tensor legs is multiplied in turn.

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

use crate::designs::UNITARITY_TOL;
use crate::error::{LabError, Result};
use crate::linalg::{adjoint, apply_to_leg, conj, kron, tensor_power, unitarity_residual, CMatrix, CVector};
use crate::tensor_ops::{unvec, vec, VECTOR_BUDGET};
use crate::weingarten::MomentProjector;
use crate::{C64, DENSE_THRESHOLD};

/// A square operator accessible only through products with vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `A v`; `v.len()` must equal [`LinearOperator::dim`].
    fn apply(&self, v: &ArrayView1<C64>) -> CVector;
    /// `A* v`.
    fn apply_adjoint(&self, v: &ArrayView1<C64>) -> CVector;
}

/// Dense matrix as a [`LinearOperator`].
pub struct DenseOperator(pub CMatrix);

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, v: &ArrayView1<C64>) -> CVector {
        self.0.dot(v)
    }

    fn apply_adjoint(&self, v: &ArrayView1<C64>) -> CVector {
        self.0.t().mapv(|z| z.conj()).dot(v)
    }
}

// Stacked factors for the batched k = 1 action `Σ_s w_s A_s Y A_s*`.
#[derive(Clone, Debug)]
struct Batched {
    // [A_1; …; A_d], dn × n
    left: CMatrix,
    // [w_1 A_1*; …; w_d A_d*], dn × n
    right: CMatrix,
}

impl Batched {
    fn new(mats: &[CMatrix], weights: &[f64]) -> Self {
        let n = mats[0].nrows();
        let d = mats.len();
        let mut left = Array2::<C64>::zeros((d * n, n));
        let mut right = Array2::<C64>::zeros((d * n, n));
        for (s, (a, &w)) in mats.iter().zip(weights).enumerate() {
            left.slice_mut(s![s * n..(s + 1) * n, ..]).assign(a);
            right.slice_mut(s![s * n..(s + 1) * n, ..]).assign(&(adjoint(&a.view()) * C64::new(w, 0.0)));
        }
        Self { left, right }
    }

    fn conjugate(&self, y: &ArrayView2<C64>) -> CMatrix {
        let n = y.nrows();
        let d = self.left.nrows() / n;
        let stacked = self.left.dot(y);
        let mut wide = Array2::<C64>::zeros((n, d * n));
        for s in 0..d {
            wide.slice_mut(s![.., s * n..(s + 1) * n]).assign(&stacked.slice(s![s * n..(s + 1) * n, ..]));
        }
        wide.dot(&self.right)
    }
}

#[derive(Clone, Debug)]
pub struct MixedUnitaryChannel {
    n: usize,
    k: usize,
    unitaries: Vec<CMatrix>,
    conjugates: Vec<CMatrix>,
    adjoints: Vec<CMatrix>,
    weights: Vec<f64>,
    forward: Option<Batched>,
    backward: Option<Batched>,
}

impl MixedUnitaryChannel {
    /// Uniform mixture of the given unitaries with `k` copies.
    pub fn new(unitaries: Vec<CMatrix>, k: usize) -> Result<Self> {
        let d = unitaries.len().max(1);
        Self::weighted(unitaries, vec![1.0 / d as f64; d], k)
    }

    pub fn weighted(unitaries: Vec<CMatrix>, weights: Vec<f64>, k: usize) -> Result<Self> {
        let n = unitaries.first().map(|u| u.nrows()).ok_or_else(|| LabError::InvalidConfig("a channel needs d >= 1".into()))?;
        if k == 0 {
            return Err(LabError::InvalidConfig("copy count k must be >= 1".into()));
        }
        for (i, u) in unitaries.iter().enumerate() {
            if u.dim() != (n, n) {
                return Err(LabError::Shape(format!("unitary {i} has shape {:?}, expected ({n}, {n})", u.dim())));
            }
            let residual = unitarity_residual(&u.view());
            if residual.is_nan() || residual > UNITARITY_TOL {
                return Err(LabError::UnitarityViolation { index: i, residual });
            }
        }
        if weights.len() != unitaries.len() {
            return Err(LabError::LengthMismatch { expected: unitaries.len(), got: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(LabError::InvalidConfig("channel weights must be nonnegative and sum to 1".into()));
        }
        n.checked_pow(2 * k as u32)
            .filter(|&dim| dim <= VECTOR_BUDGET)
            .ok_or(LabError::DimensionTooLarge { dim: usize::MAX, limit: VECTOR_BUDGET })?;
        let adjoints: Vec<CMatrix> = unitaries.iter().map(|u| adjoint(&u.view())).collect();
        let conjugates = unitaries.iter().map(|u| conj(&u.view())).collect();
        let (forward, backward) = if k == 1 {
            (Some(Batched::new(&unitaries, &weights)), Some(Batched::new(&adjoints, &weights)))
        } else {
            (None, None)
        };
        Ok(Self { n, k, unitaries, conjugates, adjoints, weights, forward, backward })
    }

    /// Channel whose Kraus list contains each `U_s` together with `U_s*`, so that `M_Φ` is
    /// self-adjoint.
    pub fn symmetrized(unitaries: Vec<CMatrix>, k: usize) -> Result<Self> {
        let mut all = Vec::with_capacity(2 * unitaries.len());
        for u in unitaries {
            all.push(adjoint(&u.view()));
            all.push(u);
        }
        Self::new(all, k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of Kraus operators.
    pub fn d(&self) -> usize {
        self.unitaries.len()
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `n^k`, the side of the matrices the channel acts on.
    pub fn space_dim(&self) -> usize {
        self.n.pow(self.k as u32)
    }

    /// `n^{2k}`, the side of `M_Φ`.
    pub fn dim(&self) -> usize {
        self.n.pow(2 * self.k as u32)
    }

    /// `M_Φ v` for `v = vec(Y)`.
    pub(crate) fn matvec(&self, v: &ArrayView1<C64>, adjoint: bool) -> CVector {
        let batched = if adjoint { &self.backward } else { &self.forward };
        if let Some(b) = batched {
            let y = v.to_shape((self.n, self.n)).expect("length n^2");
            return vec(&b.conjugate(&y.view()).view());
        }
        let legs = 2 * self.k;
        let mut out = Array1::<C64>::zeros(v.len());
        for (s, &w) in self.weights.iter().enumerate() {
            // row legs get U (or U*), column legs Ū (or its adjoint Uᵀ)
            let (a, b) = if adjoint {
                (self.adjoints[s].view(), self.unitaries[s].t())
            } else {
                (self.unitaries[s].view(), self.conjugates[s].view())
            };
            let mut x = apply_to_leg(&a, v, self.n, legs, 0);
            for leg in 1..self.k {
                x = apply_to_leg(&a, &x.view(), self.n, legs, leg);
            }
            for leg in self.k..legs {
                x = apply_to_leg(&b, &x.view(), self.n, legs, leg);
            }
            out.scaled_add(C64::new(w, 0.0), &x);
        }
        out
    }

    fn check_square(&self, y: &ArrayView2<C64>) -> Result<()> {
        let m = self.space_dim();
        if y.dim() != (m, m) {
            return Err(LabError::Shape(format!("input is {:?}, channel acts on {m}x{m} matrices", y.dim())));
        }
        Ok(())
    }

    /// `Φ(Y)`.
    pub fn apply(&self, y: &ArrayView2<C64>) -> Result<CMatrix> {
        self.check_square(y)?;
        unvec(&self.matvec(&vec(y).view(), false).view())
    }

    /// `Φ*(Y) = Σ w_s U_s^{*⊗k} Y U_s^{⊗k}`.
    pub fn apply_adjoint(&self, y: &ArrayView2<C64>) -> Result<CMatrix> {
        self.check_square(y)?;
        unvec(&self.matvec(&vec(y).view(), true).view())
    }

    /// Dense `M_Φ`.
    pub fn matrix_form(&self) -> Result<CMatrix> {
        let dim = self.dim();
        if dim > DENSE_THRESHOLD {
            return Err(LabError::DimensionTooLargeForDense { dim, limit: DENSE_THRESHOLD });
        }
        let mut m = Array2::<C64>::zeros((dim, dim));
        for (u, &w) in self.unitaries.iter().zip(&self.weights) {
            let t = tensor_power(&u.view(), self.k);
            m.scaled_add(C64::new(w, 0.0), &kron(&t.view(), &conj(&t.view()).view()));
        }
        Ok(m)
    }
}

/// `X = M_Φ − P^(k)`, applied matrix-free.
#[derive(Clone, Debug)]
pub struct CenteredChannelOperator<'a> {
    channel: &'a MixedUnitaryChannel,
    projector: MomentProjector,
}

impl<'a> CenteredChannelOperator<'a> {
    pub fn new(channel: &'a MixedUnitaryChannel) -> Result<Self> {
        let projector = MomentProjector::new(channel.n(), channel.k())?;
        Ok(Self { channel, projector })
    }

    pub fn channel(&self) -> &MixedUnitaryChannel {
        self.channel
    }

    pub fn projector(&self) -> &MomentProjector {
        &self.projector
    }

    fn check(&self, v: &ArrayView1<C64>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(LabError::LengthMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    pub fn centered_apply(&self, v: &ArrayView1<C64>) -> Result<CVector> {
        self.check(v)?;
        Ok(LinearOperator::apply(self, v))
    }

    pub fn centered_apply_adjoint(&self, v: &ArrayView1<C64>) -> Result<CVector> {
        self.check(v)?;
        Ok(LinearOperator::apply_adjoint(self, v))
    }
}

impl LinearOperator for CenteredChannelOperator<'_> {
    fn dim(&self) -> usize {
        self.channel.dim()
    }

    fn apply(&self, v: &ArrayView1<C64>) -> CVector {
        let mut out = self.channel.matvec(v, false);
        self.projector.apply_add(v, C64::new(-1.0, 0.0), &mut out);
        out
    }

    fn apply_adjoint(&self, v: &ArrayView1<C64>) -> CVector {
        let mut out = self.channel.matvec(v, true);
        self.projector.apply_add(v, C64::new(-1.0, 0.0), &mut out);
        out
    }
}
