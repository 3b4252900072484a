//! Barrier functions, model-manifold solvers and estimate audits for
//! isotropic quasilinear elliptic equations.
//!
//! The crate is organised as a pipeline:
//!
//! - [`profiles`]: equation coefficients `(alpha, beta, q)` and the
//!   variational profile algebra `Phi, Q, K, Lambda, c_u`.
//! - [`barriers`]: one-dimensional comparison functions `phi` and their
//!   inverses `psi`.
//! - [`geometry`]: model manifolds, warps, distances and Minkowski duals.
//! - [`pde`]: solution fields by symmetric reduction or periodic relaxation.
//! - [`verify`]: two-point, gradient, Modica, rigidity and boundary audits.

pub mod barriers;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod pde;
pub mod profiles;
pub mod verify;

pub use error::{Error, Result};
