//! Nonnegative exponential sums with cubic-residue spectrum over `ℤ_q`.
//!
//! * [`arith`]: factorization, CRT, cubic residues and their symmetry classes.
//! * [`witness`]: witness functions and every construction of them.
//! * [`lambda_lp`]: the optimal constant term by linear programming.
//! * [`extremal`]: largest sets whose difference set avoids the cubic residues.

pub mod arith;
pub mod error;
pub mod extremal;
pub mod fourier;
pub mod lambda_lp;
pub mod witness;

pub use error::{Error, Result};
