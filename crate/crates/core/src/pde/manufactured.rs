use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{ModelManifold, TorusNorm};
use crate::profiles::{IsotropicCoefficients, VariationalProfile};

use super::field::{Grid, Provenance, ScalarField};
use super::relax::discrete_divergence;

pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type HessianFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

/// A smooth function with its first and second derivatives.
#[derive(Clone)]
pub struct AnalyticFunction {
    pub value: PointFn,
    pub gradient: GradientFn,
    pub hessian: HessianFn,
}

impl AnalyticFunction {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        hessian: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            hessian: Arc::new(hessian),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(
            move |_| c,
            |x| vec![0.0; x.len()],
            |x| vec![vec![0.0; x.len()]; x.len()],
        )
    }
}

/// Pointwise forcing, with a mask of samples where `|Du| < 1e-12` and the
/// isotropic limit `alpha Delta u` was used.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingTable {
    pub q: Vec<f64>,
    pub degenerate: Vec<bool>,
}

fn flat(model: &ModelManifold) -> Result<()> {
    match model {
        ModelManifold::Circle { .. }
        | ModelManifold::Interval { .. }
        | ModelManifold::FlatTorus {
            norm: TorusNorm::Euclidean,
            ..
        } => Ok(()),
        _ => Err(Error::Parameter(format!(
            "manufactured forcing is available on flat Euclidean models, not {model:?}"
        ))),
    }
}

/// `q = -[alpha u_nn + beta (Delta u - u_nn)]` at every grid point, so that
/// `u` solves the equation with these coefficients exactly. The forcing
/// entry of `coeffs` is ignored.
pub fn manufactured_forcing(
    model: &ModelManifold,
    grid: &Grid,
    u: &AnalyticFunction,
    coeffs: &IsotropicCoefficients,
) -> Result<ForcingTable> {
    flat(model)?;
    let mut q = Vec::with_capacity(grid.len());
    let mut degenerate = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let x = grid.point(i);
        let v = (u.value)(&x);
        let g = (u.gradient)(&x);
        let h = (u.hessian)(&x);
        let t = g.iter().map(|c| c * c).sum::<f64>().sqrt();
        let lap: f64 = (0..g.len()).map(|k| h[k][k]).sum();
        let alpha = coeffs.alpha(v, t);
        let (value, deg) = if t < 1e-12 {
            (-alpha * lap, true)
        } else {
            let mut unn = 0.0;
            for a in 0..g.len() {
                for b in 0..g.len() {
                    unn += g[a] * h[a][b] * g[b];
                }
            }
            unn /= t * t;
            (-(alpha * unn + coeffs.beta(v, t) * (lap - unn)), false)
        };
        if !value.is_finite() {
            return Err(Error::Domain(format!("forcing is not finite at {x:?}")));
        }
        q.push(value);
        degenerate.push(deg);
    }
    Ok(ForcingTable { q, degenerate })
}

/// Forcing that makes the samples of `values` an exact steady state of the
/// discrete relaxation operator.
pub fn discrete_forcing(
    model: &ModelManifold,
    profile: &VariationalProfile,
    grid: &Grid,
    values: &[f64],
    regularization: f64,
) -> Result<Vec<f64>> {
    Ok(
        discrete_divergence(model, profile, grid, values, regularization)?
            .into_iter()
            .map(|d| -d)
            .collect(),
    )
}

/// Samples of `u` with exact gradient norms; the residual is zero by
/// construction of the manufactured forcing.
pub fn manufactured_field(
    model: &ModelManifold,
    grid: &Grid,
    u: &AnalyticFunction,
    tolerance: f64,
) -> Result<ScalarField> {
    flat(model)?;
    let pts: Vec<Vec<f64>> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let values = pts.iter().map(|x| (u.value)(x)).collect();
    let grads = pts
        .iter()
        .map(|x| (u.gradient)(x).iter().map(|c| c * c).sum::<f64>().sqrt())
        .collect();
    let mut f = ScalarField::analytic(model.clone(), grid.clone(), values, grads, 0.0, tolerance)?;
    f.provenance = Provenance::Manufactured;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_on_the_unit_circle() {
        let model = ModelManifold::Circle { radius: 0.5 / PI };
        let grid = Grid::periodic(&[1.0], &[64]).unwrap();
        let k = 2.0 * PI;
        let u = AnalyticFunction::new(
            move |x| (k * x[0]).sin(),
            move |x| vec![k * (k * x[0]).cos()],
            move |x| vec![vec![-k * k * (k * x[0]).sin()]],
        );
        let c = IsotropicCoefficients::semilinear("none", |_| 0.0);
        let t = manufactured_forcing(&model, &grid, &u, &c).unwrap();
        for (i, q) in t.q.iter().enumerate() {
            let x = grid.point(i)[0];
            assert!((q - k * k * (k * x).sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_has_zero_forcing() {
        let model = ModelManifold::FlatTorus {
            periods: vec![1.0, 1.0],
            norm: TorusNorm::Euclidean,
        };
        let grid = Grid::periodic(&[1.0, 1.0], &[8, 8]).unwrap();
        let c = IsotropicCoefficients::semilinear("none", |_| 0.0);
        let t = manufactured_forcing(&model, &grid, &AnalyticFunction::constant(2.0), &c).unwrap();
        assert!(t.q.iter().all(|q| *q == 0.0));
        assert!(t.degenerate.iter().all(|d| *d));
    }
}
