//! Numerics for the Stieltjes-Wigert q-difference operator
//!
//! `Lf(x) = f(xq) - f(x)/x + f(x/q)/x` on `(0, inf)`, together with its
//! eigenfunctions, the lattice and absolutely continuous orthogonality
//! measures, the doubly infinite Jacobi operator it becomes on `l2(Z)`, and
//! the spectral decompositions in the discrete and continuous settings.
//!
//! Everything is `no_std` (with `alloc`) and parameterized by a [`QContext`].
#![no_std]
// `!(x > 0.0)` is deliberate: NaN must fail parameter checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod quadrature;
mod scalar;
mod tridiag;

pub mod eigenfunctions;
pub mod jacobi;
pub mod measures;
pub mod qcore;
pub mod spectral_continuous;
pub mod spectral_discrete;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use qcore::{QContext, Window};
pub use quadrature::GaussLegendre;
pub use scalar::Scalar;
pub use tridiag::{symmetric_tridiagonal_eigen, TridiagEigen};
