//! # qig
//!
//! Quantum information geometry: monotone metrics and metric adjusted
//! skew information for finite-dimensional density matrices.
//!
//! A monotone metric on the state manifold is generated by an operator
//! monotone function `f` with `f(t) = t·f(1/t)` and `f(1) = 1` through the
//! Morozova-Chentsov kernel `c(x,y) = 1/(y·f(x/y))`. The associated skew
//! information of a state `ρ` and observable `A` is
//!
//! ```text
//! I_ρ(A) = (f(0)/2) · Tr A ĉ(L_ρ, R_ρ) A,      ĉ(x,y) = (x−y)²·c(x,y)
//! ```
//!
//! when `f(0) > 0` (regular metrics), and the unbounded variant
//! `I_ρ(A) = K_ρ(i[ρ,A], i[ρ,A])` when `f(0) = 0`.
//!
//! ## Modules
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigendecomposition
//!   (cyclic Jacobi), Kronecker products, partial traces, matrix functions.
//! - [`metric`]: the catalog of generating functions (`wyd:<p>`, `kubo`,
//!   `harmonic`, `bures`) and numerically stable kernel evaluation.
//! - [`skew`]: metric inner products, skew information for both the
//!   regular and the unbounded branch, and the direct-trace oracle
//!   `−(1/2)·Tr [ρ^p,A]·[ρ^{1−p},A]`.
//! - [`bipartite`]: aggregate observables, semi-quantum states, local
//!   measurements, superadditivity gaps, cross terms, parallelogram law.
//! - [`checker`]: seeded random generators and the property suite that
//!   exercises every implemented inequality and identity.
//! - [`search`]: derivative-free minimization of the superadditivity gap
//!   over bipartite states and observables.
//!
//! All values are immutable and all operations are pure functions, so
//! everything can be called from concurrent contexts.

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod bipartite;
pub mod checker;
pub mod linalg;
pub mod metric;
pub mod search;
pub mod skew;

pub use num_complex::Complex64;

/// Errors for state validation and metric evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("singular metric: {0}")]
    SingularMetric(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
