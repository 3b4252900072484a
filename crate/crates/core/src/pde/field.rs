use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ModelManifold, TorusNorm};
use crate::numeric::diff;

/// A tensor-product grid, `x` fastest.
///
/// Periodic grids sample `lower + i h` with `h = (upper - lower) / n`;
/// closed grids include both endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub dims: Vec<usize>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: bool,
}

impl Grid {
    pub fn interval(a: f64, b: f64, points: usize) -> Result<Self> {
        if points < 2 || !(b > a) {
            return Err(Error::Parameter(format!(
                "grid [{a}, {b}] with {points} points"
            )));
        }
        Ok(Self {
            dims: vec![points],
            lower: vec![a],
            upper: vec![b],
            periodic: false,
        })
    }

    pub fn periodic(lengths: &[f64], dims: &[usize]) -> Result<Self> {
        if lengths.len() != dims.len()
            || lengths.is_empty()
            || lengths.iter().any(|l| !(*l > 0.0))
            || dims.contains(&0)
        {
            return Err(Error::Parameter(format!(
                "periodic grid with lengths {lengths:?} and dims {dims:?}"
            )));
        }
        Ok(Self {
            dims: dims.to_vec(),
            lower: vec![0.0; dims.len()],
            upper: lengths.to_vec(),
            periodic: true,
        })
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let n = self.dims[axis] as f64;
        let span = self.upper[axis] - self.lower[axis];
        if self.periodic {
            span / n
        } else {
            span / (n - 1.0)
        }
    }

    /// Smallest spacing over axes with more than one sample.
    pub fn min_spacing(&self) -> f64 {
        (0..self.dims.len())
            .filter(|&a| self.dims[a] > 1)
            .map(|a| self.spacing(a))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn coordinates(&self, index: usize) -> Vec<usize> {
        let mut rest = index;
        self.dims
            .iter()
            .map(|n| {
                let c = rest % n;
                rest /= n;
                c
            })
            .collect()
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        self.coordinates(index)
            .iter()
            .enumerate()
            .map(|(a, &c)| self.lower[a] + c as f64 * self.spacing(a))
            .collect()
    }

    /// Samples along one axis.
    pub fn axis(&self, axis: usize) -> Vec<f64> {
        (0..self.dims[axis])
            .map(|c| self.lower[axis] + c as f64 * self.spacing(axis))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    SymmetricOde,
    Relaxed,
    Manufactured,
    Analytic,
}

/// Samples of a solution together with its certification data.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub model: ModelManifold,
    pub grid: Grid,
    pub values: Vec<f64>,
    /// `|Du|`, or `H(du)` on Minkowski tori.
    pub gradient_norm: Vec<f64>,
    /// Sup-norm of the residual of the equation the field was produced for.
    pub residual_norm: f64,
    pub tolerance: f64,
    pub provenance: Provenance,
    /// Signed derivative along the single coordinate of a 1-D field, when known
    /// exactly (ODE fields).
    pub slope: Option<Vec<f64>>,
    /// Residual without gradient regularization (relaxed fields).
    pub unregularized_residual: Option<f64>,
    /// Continuous residual evaluated on the samples with fourth-order
    /// differences (relaxed fields).
    pub consistency_residual: Option<f64>,
    /// Residual history of the iterative solver.
    pub history: Vec<f64>,
}

impl ScalarField {
    /// A field with externally computed gradient norms and residual.
    pub fn analytic(
        model: ModelManifold,
        grid: Grid,
        values: Vec<f64>,
        gradient_norm: Vec<f64>,
        residual_norm: f64,
        tolerance: f64,
    ) -> Result<Self> {
        if values.len() != grid.len() || gradient_norm.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "{} values and {} gradient norms on a grid of {}",
                values.len(),
                gradient_norm.len(),
                grid.len()
            )));
        }
        if values.iter().chain(&gradient_norm).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite field samples".into()));
        }
        Ok(Self {
            model,
            grid,
            values,
            gradient_norm,
            residual_norm,
            tolerance,
            provenance: Provenance::Analytic,
            slope: None,
            unregularized_residual: None,
            consistency_residual: None,
            history: Vec::new(),
        })
    }

    /// Sample values only; gradient norms come from [`field_gradient_norms`].
    pub fn from_values(
        model: ModelManifold,
        grid: Grid,
        values: Vec<f64>,
        residual_norm: f64,
        tolerance: f64,
    ) -> Result<Self> {
        let zeros = vec![0.0; values.len()];
        let f = Self::analytic(model, grid, values, zeros, residual_norm, tolerance)?;
        Ok(field_gradient_norms(f))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        self.grid.point(index)
    }

    pub fn is_certified(&self) -> bool {
        self.residual_norm <= self.tolerance
    }

    pub fn require_certified(&self) -> Result<()> {
        if self.is_certified() {
            Ok(())
        } else {
            Err(Error::Uncertified {
                residual: self.residual_norm,
                tolerance: self.tolerance,
            })
        }
    }

    pub fn range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            })
    }

    /// Spread at most `1e-12 max(1, |u|)`.
    pub fn is_constant(&self) -> bool {
        let (lo, hi) = self.range();
        hi - lo <= 1e-12 * lo.abs().max(hi.abs()).max(1.0)
    }

    pub fn argmin(&self) -> usize {
        argext(&self.values, |a, b| a < b)
    }

    pub fn argmax(&self) -> usize {
        argext(&self.values, |a, b| a > b)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Columns: coordinates, `u`, gradient norm.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = (0..self.grid.dims.len()).map(|a| format!("x{a}")).collect();
        header.push("u".into());
        header.push("grad_norm".into());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut row: Vec<String> = self.point(i).iter().map(|x| format!("{x:.17e}")).collect();
            row.push(format!("{:.17e}", self.values[i]));
            row.push(format!("{:.17e}", self.gradient_norm[i]));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn metadata_json(&self) -> serde_json::Value {
        let (lo, hi) = self.range();
        serde_json::json!({
            "provenance": self.provenance,
            "model": format!("{:?}", self.model),
            "grid": self.grid,
            "range": [lo, hi],
            "residual_norm": self.residual_norm,
            "tolerance": self.tolerance,
            "certified": self.is_certified(),
            "unregularized_residual": self.unregularized_residual,
            "consistency_residual": self.consistency_residual,
            "solver_iterations": self.history.len(),
        })
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.metadata_json())?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn argext(v: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if better(*x, v[best]) {
            best = i;
        }
    }
    best
}

/// Partial derivative along `axis` of row-major samples, fourth-order
/// central (periodic) or with second-order one-sided ends.
pub(crate) fn partial(grid: &Grid, values: &[f64], axis: usize) -> Vec<f64> {
    let dims = &grid.dims;
    let n = dims[axis];
    let mut out = vec![0.0; values.len()];
    if n == 1 {
        return out;
    }
    let stride: usize = dims[..axis].iter().product();
    let h = grid.spacing(axis);
    let mut line = vec![0.0; n];
    for base in 0..values.len() {
        if !(base / stride).is_multiple_of(n) {
            continue;
        }
        for (k, slot) in line.iter_mut().enumerate() {
            *slot = values[base + k * stride];
        }
        let d = diff::gradient_samples(&line, h, grid.periodic);
        for (k, dk) in d.into_iter().enumerate() {
            out[base + k * stride] = dk;
        }
    }
    out
}

/// Fill `gradient_norm` from the samples. Sphere-radial grids use polar
/// angle, so derivatives are divided by the radius; Minkowski tori report
/// `H(du)`.
pub fn field_gradient_norms(mut field: ScalarField) -> ScalarField {
    let axes = field.grid.dims.len();
    let partials: Vec<Vec<f64>> = (0..axes)
        .map(|a| partial(&field.grid, &field.values, a))
        .collect();
    let scale = match &field.model {
        ModelManifold::SphereRadial { radius, .. } => 1.0 / radius,
        _ => 1.0,
    };
    let norm = match &field.model {
        ModelManifold::FlatTorus {
            norm: TorusNorm::Minkowski(h),
            ..
        } => Some(h.clone()),
        _ => None,
    };
    field.gradient_norm = (0..field.len())
        .map(|i| {
            let du: Vec<f64> = partials.iter().map(|p| p[i] * scale).collect();
            match &norm {
                Some(h) => h.eval(&du),
                None => du.iter().map(|v| v * v).sum::<f64>().sqrt(),
            }
        })
        .collect();
    field
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle() -> ModelManifold {
        ModelManifold::Circle { radius: 0.5 / PI }
    }

    #[test]
    fn sine_gradient_is_fourth_order_accurate() {
        let grid = Grid::periodic(&[1.0], &[256]).unwrap();
        let values: Vec<f64> = grid.axis(0).iter().map(|x| (2.0 * PI * x).sin()).collect();
        let f = ScalarField::from_values(circle(), grid.clone(), values, 0.0, 1e-9).unwrap();
        let err = grid
            .axis(0)
            .iter()
            .zip(&f.gradient_norm)
            .map(|(x, g)| (g - 2.0 * PI * (2.0 * PI * x).cos().abs()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "{err}");
    }

    #[test]
    fn constant_field_has_zero_gradient() {
        let grid = Grid::periodic(&[1.0, 1.0], &[16, 8]).unwrap();
        let model = ModelManifold::FlatTorus {
            periods: vec![1.0, 1.0],
            norm: TorusNorm::Euclidean,
        };
        let f = ScalarField::from_values(model, grid, vec![0.3; 128], 0.0, 1e-9).unwrap();
        assert!(f.gradient_norm.iter().all(|g| *g < 1e-14));
        assert!(f.is_constant());
    }

    #[test]
    fn unit_speed_warped_coordinate() {
        let warp = crate::geometry::warp_factor(-1.0, 0.3).unwrap();
        let model = ModelManifold::WarpedProduct {
            n: 2,
            interval: (0.0, 2.0),
            warp,
        };
        let grid = Grid::interval(0.0, 2.0, 101).unwrap();
        let values = grid.axis(0);
        let f = ScalarField::from_values(model, grid, values, 0.0, 1e-9).unwrap();
        assert!(f.gradient_norm.iter().all(|g| (g - 1.0).abs() < 1e-12));
    }

    #[test]
    fn grid_indexing_is_x_fastest() {
        let g = Grid::periodic(&[2.0, 4.0], &[4, 8]).unwrap();
        assert_eq!(g.coordinates(5), vec![1, 1]);
        assert_eq!(g.point(5), vec![0.5, 0.5]);
        assert_eq!(g.len(), 32);
    }

    #[test]
    fn uncertified_field_is_refused() {
        let grid = Grid::interval(0.0, 1.0, 3).unwrap();
        let f =
            ScalarField::analytic(circle(), grid, vec![0.0; 3], vec![0.0; 3], 1e-3, 1e-8).unwrap();
        assert!(matches!(
            f.require_certified(),
            Err(Error::Uncertified { .. })
        ));
    }
}
