//! Dense complex linear-algebra helpers shared by the modules.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use ndarray_linalg::{EigVals, SVD};

use crate::error::Result;
use crate::C64;

pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

pub fn identity(n: usize) -> CMatrix {
    Array2::eye(n)
}

/// Conjugate transpose.
pub fn adjoint(a: &ArrayView2<C64>) -> CMatrix {
    a.t().mapv(|x| x.conj())
}

pub fn conj(a: &ArrayView2<C64>) -> CMatrix {
    a.mapv(|x| x.conj())
}

/// Kronecker product `a ⊗ b` in the row-major multi-index convention.
pub fn kron(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> CMatrix {
    ndarray::linalg::kron(a, b)
}

/// `a^{⊗k}`; `k = 0` gives the 1×1 identity.
pub fn tensor_power(a: &ArrayView2<C64>, k: usize) -> CMatrix {
    let mut out = identity(1);
    for _ in 0..k {
        out = kron(&out.view(), a);
    }
    out
}

pub fn frobenius(a: &ArrayView2<C64>) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &ArrayView2<C64>) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `‖U*U − I‖_F`.
pub fn unitarity_residual(u: &ArrayView2<C64>) -> f64 {
    let n = u.nrows();
    if u.ncols() != n {
        return f64::INFINITY;
    }
    let mut g = adjoint(u).dot(u);
    for i in 0..n {
        g[[i, i]] -= C64::new(1.0, 0.0);
    }
    frobenius(&g.view())
}

/// Singular values in non-increasing order.
pub fn singular_values(a: &ArrayView2<C64>) -> Result<Vec<f64>> {
    let (_, s, _) = a.to_owned().svd(false, false)?;
    Ok(s.to_vec())
}

/// Spectral norm `‖a‖∞` (largest singular value).
pub fn op_norm(a: &ArrayView2<C64>) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

pub fn eigenvalues(a: &ArrayView2<C64>) -> Result<Vec<C64>> {
    Ok(a.to_owned().eigvals()?.to_vec())
}

pub fn trace(a: &ArrayView2<C64>) -> C64 {
    a.diag().sum()
}

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn inner(a: &ArrayView1<C64>, b: &ArrayView1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &ArrayView1<C64>) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha * x`.
pub fn axpy(alpha: C64, x: &ArrayView1<C64>, y: &mut CVector) {
    y.zip_mut_with(x, |yi, xi| *yi += alpha * xi);
}

/// Applies `a` to tensor leg `leg` of a vector viewed as a tensor with `legs` factors of
/// dimension `n` each (row-major).
pub fn apply_to_leg(a: &ArrayView2<C64>, x: &ArrayView1<C64>, n: usize, legs: usize, leg: usize) -> CVector {
    let outer = n.pow(leg as u32);
    let inner = n.pow((legs - leg - 1) as u32);
    let x3 = x
        .to_shape((outer, n, inner))
        .expect("vector length matches n^legs");
    let mut out = Array1::<C64>::zeros(outer * n * inner);
    {
        let mut out3 = out.view_mut().into_shape_with_order((outer, n, inner)).unwrap();
        if inner == 1 {
            // (outer × n) · aᵀ
            let x2 = x3.index_axis(Axis(2), 0);
            let mut o2 = out3.index_axis_mut(Axis(2), 0);
            ndarray::linalg::general_mat_mul(C64::new(1.0, 0.0), &x2, &a.t(), C64::new(0.0, 0.0), &mut o2);
        } else {
            for l in 0..outer {
                let xb = x3.index_axis(Axis(0), l);
                let mut ob = out3.index_axis_mut(Axis(0), l);
                ndarray::linalg::general_mat_mul(C64::new(1.0, 0.0), a, &xb, C64::new(0.0, 0.0), &mut ob);
            }
        }
    }
    out
}
