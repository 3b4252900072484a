//! Solution fields: symmetric ODE reductions, periodic relaxation and
//! manufactured solutions.

mod field;
mod manufactured;
mod relax;
mod spectral;
mod symmetric;

pub use field::{field_gradient_norms, Grid, Provenance, ScalarField};
pub use manufactured::{
    discrete_forcing, manufactured_field, manufactured_forcing, AnalyticFunction, ForcingTable,
};
pub use relax::{
    consistency_residual, discrete_divergence, relax_to_steady, relax_to_steady_with, seed_field,
    RelaxOptions, Seed,
};
pub use symmetric::{solve_symmetric, solve_symmetric_with, BoundaryCondition, SymmetricOptions};
