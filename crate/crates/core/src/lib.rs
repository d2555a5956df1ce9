//! Numerical laboratory for quantum expanders built from unitary designs.
//!
//! A mixed-unitary channel `Φ(Y) = (1/d) Σ U_s^{⊗k} Y U_s^{*⊗k}` is constructed from
//! unitaries drawn from a design (Haar, Clifford, generalized Pauli or a finite measure
//! loaded from disk). Its matrix form `M_Φ` always fixes the span of the permutation
//! vectors `u_π`, and the quantity of interest is the second singular value
//! `s₂ = ‖M_Φ − P^(k)‖∞`, compared against the deterministic lower bound
//! `2√(d−1)/d` and the optimal-expander reference `2/√d`.
//!
//! Module map:
//! - [`symm`]: permutations, cycle types, Catalan numbers, Moebius function.
//! - [`weingarten`]: exact Weingarten tables and the moment projector `P^(k)`.
//! - [`tensor_ops`]: realignment, factor swaps, `u_π` vectors, flip, vec/unvec.
//! - [`designs`]: samplers and finitely supported design measures.
//! - [`channels`]: the channel, its matrix form and matrix-free centered action.
//! - [`spectral`]: dense and matrix-free `s₂`, eigenvalue modulus, bound evaluation.
//! - [`verify`]: lemma identity checks by enumeration or Monte Carlo.
//! - [`lab`]: trial sweeps and CSV/JSON persistence.
//!
//! Index convention (project wide): a multi-index `(i₁,…,i_m)` over factor dimensions
//! `(d₁,…,d_m)` maps to `Σ_t i_t ∏_{s>t} d_s` (row-major). `vec` is row-major, so that
//! `vec(A Y B*) = (A ⊗ B̄) vec(Y)`.

extern crate blas_src;

pub mod channels;
pub mod designs;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod rng;
pub mod spectral;
pub mod symm;
pub mod tensor_ops;
pub mod verify;
pub mod weingarten;

pub use error::{LabError, Result};
pub use num_complex::Complex64 as C64;

/// Largest `n^{2k}` for which dense matrices (projector, matrix form, defect) are built.
pub const DENSE_THRESHOLD: usize = 4096;
