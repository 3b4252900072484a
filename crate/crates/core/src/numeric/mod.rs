//! Numerical building blocks shared by the barrier, field and audit modules.

pub mod diff;
pub mod interp;
pub mod krylov;
pub mod ode;
pub mod quad;
pub mod roots;
