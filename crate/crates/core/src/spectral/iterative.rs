//! Largest eigenvalue of `A*A` for an operator known only through products.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2};
use ndarray_linalg::{Eigh, UPLO};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::LinearOperator;
use crate::error::{LabError, Result};
use crate::linalg::{inner, norm, CVector};
use crate::C64;

/// Outcome of an iterative solve on `B = A*A`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenEstimate {
    /// Top eigenvalue of `B`, i.e. `s₁(A)²`.
    pub theta: f64,
    /// `‖Bv − θv‖ / θ` for the returned vector.
    pub residual: f64,
    /// Applications of `B`.
    pub iterations: usize,
    pub restarts_used: usize,
}

/// Stopping rules shared by both solvers.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationControl {
    /// Relative tolerance (Rayleigh change for power iteration, residual for Lanczos).
    pub tol: f64,
    /// Consecutive power steps below `tol` needed to stop.
    pub stall: usize,
    /// Random starts for power iteration. Lanczos restarts as often as `max_iterations` allows.
    pub restarts: usize,
    /// Cap on `B` applications per start (power) or in total (Lanczos).
    pub max_iterations: usize,
    /// Krylov basis size before Lanczos restarts from its best Ritz vector.
    pub max_basis: usize,
}

impl Default for IterationControl {
    fn default() -> Self {
        Self { tol: 1e-8, stall: 10, restarts: 3, max_iterations: 5000, max_basis: 300 }
    }
}

fn random_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v: CVector = (0..dim)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        })
        .collect();
    let nv = norm(&v.view());
    v / C64::new(nv, 0.0)
}

fn gram_op(op: &dyn LinearOperator, v: &CVector) -> CVector {
    op.apply_adjoint(&op.apply(&v.view()).view())
}

fn relative_residual(op: &dyn LinearOperator, v: &CVector) -> (f64, f64) {
    let w = gram_op(op, v);
    let theta = inner(&v.view(), &w.view()).re;
    if theta <= 0.0 {
        return (0.0, 0.0);
    }
    let r = &w - &(v * C64::new(theta, 0.0));
    (theta, norm(&r.view()) / theta)
}

/// Power iteration on `A*A`: a start converges once the relative Rayleigh change stays
/// below `tol` for `stall` consecutive steps; the largest estimate over all converged
/// starts wins.
pub fn power_iteration<R: Rng + ?Sized>(op: &dyn LinearOperator, ctl: &IterationControl, rng: &mut R) -> Result<EigenEstimate> {
    let mut best: Option<(f64, CVector)> = None;
    let mut total = 0;
    let mut last = 0.0;
    for _ in 0..ctl.restarts.max(1) {
        let mut v = random_unit(op.dim(), rng);
        let mut prev = f64::NAN;
        let mut streak = 0;
        for _ in 0..ctl.max_iterations {
            let w = gram_op(op, &v);
            total += 1;
            let theta = inner(&v.view(), &w.view()).re;
            let nw = norm(&w.view());
            last = theta;
            if nw == 0.0 || theta <= 0.0 {
                // v lies in the kernel of A
                if best.as_ref().is_none_or(|(b, _)| *b < 0.0) {
                    best = Some((0.0, v.clone()));
                }
                break;
            }
            if ((theta - prev) / theta).abs() < ctl.tol {
                streak += 1;
            } else {
                streak = 0;
            }
            prev = theta;
            v = w / C64::new(nw, 0.0);
            if streak >= ctl.stall {
                if best.as_ref().is_none_or(|(b, _)| *b < theta) {
                    best = Some((theta, v.clone()));
                }
                break;
            }
        }
    }
    let (_, v) = best.ok_or(LabError::NotConverged { iterations: total, last_estimate: last.max(0.0).sqrt() })?;
    let (theta, residual) = relative_residual(op, &v);
    Ok(EigenEstimate { theta, residual, iterations: total + 1, restarts_used: ctl.restarts.max(1) })
}

/// Lanczos on `A*A` with full (twice classical Gram-Schmidt) reorthogonalization. Converges
/// when the Ritz residual `β |y_last|` falls below `tol · θ`. When the basis fills up it
/// thick-restarts: the top half of the Ritz vectors and the residual direction are kept, and
/// the projected matrix becomes diagonal plus one coupling row.
pub fn lanczos<R: Rng + ?Sized>(op: &dyn LinearOperator, ctl: &IterationControl, rng: &mut R) -> Result<EigenEstimate> {
    lanczos_with_vector(op, ctl, rng).map(|(e, _)| e)
}

/// [`lanczos`] together with the unit Ritz vector it converged to.
pub(crate) fn lanczos_with_vector<R: Rng + ?Sized>(
    op: &dyn LinearOperator,
    ctl: &IterationControl,
    rng: &mut R,
) -> Result<(EigenEstimate, CVector)> {
    let dim = op.dim();
    let max_basis = ctl.max_basis.clamp(3, dim.max(3));
    let keep = max_basis / 2;
    // Krylov vectors are the first `len` rows, so reorthogonalization is two gemv calls
    let mut basis = Array2::<C64>::zeros((max_basis, dim));
    basis.row_mut(0).assign(&random_unit(dim, rng));
    // projection of A*A onto the basis
    let mut h = Array2::<f64>::zeros((max_basis, max_basis));
    let mut len = 1;
    let mut total = 0;
    let mut restarts = 0;
    let mut steps = 0;
    let mut last;
    loop {
        let j = len - 1;
        let mut w = gram_op(op, &basis.row(j).to_owned());
        total += 1;
        steps += 1;
        let q = basis.slice(s![..len, ..]);
        let column = project_out(&q, &mut w);
        for (i, &v) in column.iter().enumerate() {
            h[[i, j]] = v;
            h[[j, i]] = v;
        }
        let beta = norm(&w.view());
        let exhausted = len == dim || total >= ctl.max_iterations;
        let full = len == max_basis;
        let scale0 = h[[0, 0]].abs().max(1.0);
        if steps <= 10 || steps % 4 == 0 || exhausted || full || beta <= 1e-13 * scale0 {
            let (vals, vecs) = Array2::from_shape_fn((len, len), |ij| h[ij]).eigh(UPLO::Lower)?;
            let theta = vals[len - 1];
            let y = vecs.column(len - 1).to_owned();
            last = theta;
            let scale = theta.abs().max(f64::MIN_POSITIVE);
            if theta <= 1e-300 && beta <= 1e-13 {
                let e = EigenEstimate { theta: 0.0, residual: 0.0, iterations: total, restarts_used: restarts };
                return Ok((e, basis.row(0).to_owned()));
            }
            if beta * y[len - 1].abs() <= ctl.tol * scale || beta <= 1e-13 * scale {
                let x = combine(&q, &y);
                let (theta, residual) = relative_residual(op, &x);
                let e = EigenEstimate { theta, residual, iterations: total + 1, restarts_used: restarts };
                return Ok((e, x));
            }
            if exhausted {
                break;
            }
            if full {
                let top = vecs.slice(s![.., len - keep..]).mapv(|c| C64::new(c, 0.0));
                let kept = top.t().dot(&q);
                basis.slice_mut(s![..keep, ..]).assign(&kept);
                basis.row_mut(keep).assign(&(w / C64::new(beta, 0.0)));
                h.fill(0.0);
                for i in 0..keep {
                    h[[i, i]] = vals[len - keep + i];
                    let coupling = beta * vecs[[len - 1, len - keep + i]];
                    h[[i, keep]] = coupling;
                    h[[keep, i]] = coupling;
                }
                len = keep + 1;
                restarts += 1;
                steps = 0;
                continue;
            }
        }
        basis.row_mut(len).assign(&(w / C64::new(beta, 0.0)));
        len += 1;
    }
    Err(LabError::NotConverged { iterations: total, last_estimate: last.max(0.0).sqrt() })
}

// Removes the span of the rows of `q` from `w` and returns the real parts of the
// coefficients. The last two rows go first, which takes out the Lanczos recurrence terms;
// then full passes follow, a second one only when the first removes a lot (DGKS test).
fn project_out(q: &ArrayView2<C64>, w: &mut CVector) -> Array1<f64> {
    let len = q.nrows();
    let mut total = Array1::<f64>::zeros(len);
    let tail = len.saturating_sub(2);
    if tail > 0 {
        let c = subtract_projection(&q.slice(s![tail.., ..]), w);
        total.slice_mut(s![tail..]).zip_mut_with(&c, |t, x| *t += x.re);
    }
    for pass in 0..2 {
        let before = norm(&w.view());
        let c = subtract_projection(q, w);
        total.zip_mut_with(&c, |t, x| *t += x.re);
        if pass == 0 && norm(&w.view()) > 0.7 * before {
            break;
        }
    }
    total
}

// One classical Gram-Schmidt pass; returns the coefficients `⟨q_i, w⟩`. Complex
// matrix-vector products are written as gemm because ndarray only hands real ones to BLAS.
fn subtract_projection(q: &ArrayView2<C64>, w: &mut CVector) -> Array1<C64> {
    let (len, dim) = q.dim();
    let one = C64::new(1.0, 0.0);
    let wc = w.mapv(|x| x.conj()).into_shape_with_order((dim, 1)).expect("contiguous");
    let mut c = Array2::<C64>::zeros((len, 1));
    general_mat_mul(one, q, &wc, C64::new(0.0, 0.0), &mut c);
    c.mapv_inplace(|x| x.conj());
    let mut row = w.view_mut().into_shape_with_order((1, dim)).expect("contiguous");
    general_mat_mul(-one, &c.t(), q, one, &mut row);
    c.into_shape_with_order(len).expect("column")
}

// Unit vector `Σ_i y_i q_i` over the rows of `q`.
fn combine(q: &ArrayView2<C64>, y: &Array1<f64>) -> CVector {
    let x = q.t().dot(&y.mapv(|c| C64::new(c, 0.0)));
    let nx = norm(&x.view());
    x / C64::new(nx, 0.0)
}
