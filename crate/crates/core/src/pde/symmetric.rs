//! One-variable reductions `alpha u'' + q + D(s) beta u' = 0` solved by
//! shooting.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::ModelManifold;
use crate::numeric::diff;
use crate::numeric::ode::{Dopri5, Termination};
use crate::numeric::roots;
use crate::profiles::IsotropicCoefficients;

use super::field::{Grid, Provenance, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// Endpoint values. `left` must be absent on models with a regular
    /// center (ball, sphere pole) and present on warped intervals.
    Dirichlet { left: Option<f64>, right: f64 },
    /// Zero slope at both ends; `bracket` encloses the left (or center) value.
    Neumann { bracket: (f64, f64) },
    /// Value and slope at the left end. At a regular center the slope must
    /// be zero.
    Initial { value: f64, slope: f64 },
    /// A solution with period equal to the domain length, through `center` at
    /// `s = 0` with initial slope inside `slope_bracket` (positive).
    Periodic {
        center: f64,
        slope_bracket: (f64, f64),
    },
}

#[derive(Debug, Clone, Copy)]
pub struct SymmetricOptions {
    pub points: usize,
    pub ode: Dopri5,
    /// Certification tolerance for the residual and boundary data.
    pub tolerance: f64,
    /// Polar extent of sphere-radial domains.
    pub polar_extent: f64,
}

impl Default for SymmetricOptions {
    fn default() -> Self {
        Self {
            points: 1025,
            ode: Dopri5::with_tolerances(1e-12, 1e-12),
            tolerance: 1e-8,
            polar_extent: 0.5 * PI,
        }
    }
}

type Drift = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

struct Reduction {
    a: f64,
    b: f64,
    /// `n - 1` for a regular center, else `None`.
    center: Option<f64>,
    periodic: bool,
    drift: Drift,
    /// Grid coordinate = arclength / scale.
    scale: f64,
}

fn reduce(model: &ModelManifold, opts: &SymmetricOptions) -> Result<Reduction> {
    model.validate()?;
    Ok(match model {
        ModelManifold::WarpedProduct { n, interval, warp } => {
            let (w, m) = (*warp, (*n - 1) as f64);
            Reduction {
                a: interval.0,
                b: interval.1,
                center: None,
                periodic: false,
                drift: Arc::new(move |s| m * w.log_derivative(s)),
                scale: 1.0,
            }
        }
        ModelManifold::SphereRadial { n, radius } => {
            let (r, m) = (*radius, (*n - 1) as f64);
            if !(opts.polar_extent > 0.0 && opts.polar_extent < PI) {
                return Err(Error::Parameter(format!(
                    "polar extent {} outside (0, pi)",
                    opts.polar_extent
                )));
            }
            Reduction {
                a: 0.0,
                b: r * opts.polar_extent,
                center: Some(m),
                periodic: false,
                drift: Arc::new(move |s| m / (r * (s / r).tan())),
                scale: r,
            }
        }
        ModelManifold::RadialBall { n, radius } => {
            let m = (*n - 1) as f64;
            Reduction {
                a: 0.0,
                b: *radius,
                center: Some(m),
                periodic: false,
                drift: Arc::new(move |s| m / s),
                scale: 1.0,
            }
        }
        ModelManifold::Interval { a, b } => Reduction {
            a: *a,
            b: *b,
            center: None,
            periodic: false,
            drift: Arc::new(|_| 0.0),
            scale: 1.0,
        },
        ModelManifold::Circle { radius } => Reduction {
            a: 0.0,
            b: 2.0 * PI * radius,
            center: None,
            periodic: true,
            drift: Arc::new(|_| 0.0),
            scale: 1.0,
        },
        ModelManifold::FlatTorus { periods, .. } if periods.len() == 1 => Reduction {
            a: 0.0,
            b: periods[0],
            center: None,
            periodic: true,
            drift: Arc::new(|_| 0.0),
            scale: 1.0,
        },
        ModelManifold::FlatTorus { .. } => {
            return Err(Error::Parameter(
                "symmetric reduction needs a one-dimensional torus".into(),
            ))
        }
    })
}

struct Shooter<'a> {
    red: &'a Reduction,
    coeffs: &'a IsotropicCoefficients,
    ode: Dopri5,
}

impl Shooter<'_> {
    fn rhs(&self, s: f64, y: &[f64; 2]) -> [f64; 2] {
        let (u, v) = (y[0], y[1]);
        let t = v.abs();
        let alpha = self.coeffs.alpha(u, t);
        if !(alpha > 0.0) {
            return [v, f64::NAN];
        }
        let drift = (self.red.drift)(s) * self.coeffs.beta(u, t) * v;
        [v, -(self.coeffs.q(u, t) + drift) / alpha]
    }

    /// Start state for the left end given the free datum.
    fn start(&self, value: f64, slope: f64) -> Result<(f64, [f64; 2])> {
        match self.red.center {
            None => Ok((self.red.a, [value, slope])),
            Some(m) => {
                let denom =
                    2.0 * (self.coeffs.alpha(value, 0.0) + m * self.coeffs.beta(value, 0.0));
                let u2 = -self.coeffs.q(value, 0.0) / denom;
                if !u2.is_finite() {
                    return Err(Error::Domain(format!(
                        "series start at the center fails for u0 = {value}"
                    )));
                }
                let r0 = 1e-4 * (self.red.b - self.red.a);
                Ok((r0, [value + u2 * r0 * r0, 2.0 * u2 * r0]))
            }
        }
    }

    fn end_state(&self, value: f64, slope: f64) -> Result<[f64; 2]> {
        let (t0, y0) = self.start(value, slope)?;
        let traj = self
            .ode
            .integrate(|s, y| self.rhs(s, y), t0, y0, self.red.b, |_, _| false)
            .map_err(|e| match self.red.center {
                Some(_) => Error::Construction(format!("integration from r = {t0:e} failed: {e}")),
                None => e,
            })?;
        Ok(traj.y_end)
    }

    /// Period of the orbit through `(center, slope)`: the first return to
    /// `center` with positive slope after a full oscillation.
    fn period(&self, center: f64, slope: f64, horizon: f64) -> f64 {
        let mut phase = 0;
        let stop = |_: f64, y: &[f64; 2]| {
            match phase {
                0 if y[1] < 0.0 => phase = 1,
                1 if y[1] > 0.0 => phase = 2,
                2 if y[0] >= center => return true,
                _ => {}
            }
            false
        };
        let traj =
            match self
                .ode
                .integrate(|s, y| self.rhs(s, y), 0.0, [center, slope], horizon, stop)
            {
                Ok(t) => t,
                Err(_) => return f64::INFINITY,
            };
        if traj.termination != Termination::Stopped {
            return f64::INFINITY;
        }
        let (t_last, h_last) = match traj.steps.last() {
            Some(s) => (s.t, s.h),
            None => return f64::INFINITY,
        };
        let g = |t: f64| traj.eval(t).map_or(f64::NAN, |y| y[0] - center);
        roots::bisect(g, t_last, t_last + h_last, 1e-15 * horizon).unwrap_or(f64::INFINITY)
    }
}

fn finite_or_inf(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Find a sign change of `g` by expanding symmetrically around `guess`.
fn expand_bracket(g: &mut impl FnMut(f64) -> f64, guess: f64, unit: f64) -> Result<(f64, f64)> {
    let g0 = g(guess);
    if g0 == 0.0 {
        return Ok((guess, guess));
    }
    let mut w = 0.25 * unit;
    for _ in 0..48 {
        for x in [guess + w, guess - w] {
            let gx = g(x);
            if gx.is_finite() && g0.is_finite() && gx.signum() != g0.signum() {
                return Ok(if x < guess { (x, guess) } else { (guess, x) });
            }
        }
        w *= 2.0;
    }
    Err(Error::Range(format!(
        "shooting found no bracket around {guess} (g = {g0:e})"
    )))
}

fn shoot(mut g: impl FnMut(f64) -> f64, bracket: (f64, f64)) -> Result<f64> {
    if bracket.0 == bracket.1 {
        return Ok(bracket.0);
    }
    let xtol = 1e-15 * bracket.0.abs().max(bracket.1.abs()).max(1.0);
    roots::bisect(|x| finite_or_inf(g(x)), bracket.0, bracket.1, xtol)
}

pub fn solve_symmetric(
    model: &ModelManifold,
    coeffs: &IsotropicCoefficients,
    bc: BoundaryCondition,
) -> Result<ScalarField> {
    solve_symmetric_with(model, coeffs, bc, &SymmetricOptions::default())
}

/// Solve the reduced equation on a warped interval, sphere-radial cap,
/// radial ball or one-dimensional torus and lift the result to a field.
pub fn solve_symmetric_with(
    model: &ModelManifold,
    coeffs: &IsotropicCoefficients,
    bc: BoundaryCondition,
    opts: &SymmetricOptions,
) -> Result<ScalarField> {
    let red = reduce(model, opts)?;
    let sh = Shooter {
        red: &red,
        coeffs,
        ode: opts.ode,
    };
    let tol = opts.tolerance;
    let (value, slope) = match (bc, red.center, red.periodic) {
        (BoundaryCondition::Periodic { .. }, _, false)
        | (BoundaryCondition::Dirichlet { .. } | BoundaryCondition::Neumann { .. }, _, true) => {
            return Err(Error::Parameter(format!(
                "boundary condition {bc:?} does not fit {model:?}"
            )))
        }
        (BoundaryCondition::Dirichlet { left: Some(_), .. }, Some(_), _) => {
            return Err(Error::Parameter(
                "a regular center takes no Dirichlet value".into(),
            ))
        }
        (BoundaryCondition::Dirichlet { left: None, right }, Some(_), _) => {
            let mut g = |u0: f64| sh.end_state(u0, 0.0).map_or(f64::NAN, |y| y[0] - right);
            let br = expand_bracket(&mut g, right, right.abs().max(1.0))?;
            (shoot(g, br)?, 0.0)
        }
        (BoundaryCondition::Dirichlet { left: None, .. }, None, _) => {
            return Err(Error::Parameter(
                "interval Dirichlet data needs both ends".into(),
            ))
        }
        (
            BoundaryCondition::Dirichlet {
                left: Some(m),
                right,
            },
            None,
            _,
        ) => {
            let nominal = (right - m) / (red.b - red.a);
            let mut g = |s: f64| sh.end_state(m, s).map_or(f64::NAN, |y| y[0] - right);
            let br = expand_bracket(&mut g, nominal, nominal.abs().max(1.0))?;
            (m, shoot(g, br)?)
        }
        (BoundaryCondition::Neumann { bracket }, _, _) => {
            let g = |v: f64| sh.end_state(v, 0.0).map_or(f64::NAN, |y| y[1]);
            (shoot(g, bracket)?, 0.0)
        }
        (BoundaryCondition::Initial { value, slope }, center, _) => {
            if center.is_some() && slope != 0.0 {
                return Err(Error::Parameter(
                    "a regular center needs zero initial slope".into(),
                ));
            }
            (value, slope)
        }
        (
            BoundaryCondition::Periodic {
                center,
                slope_bracket,
            },
            _,
            true,
        ) => {
            let length = red.b - red.a;
            let g = |s: f64| sh.period(center, s, 20.0 * length) - length;
            (center, shoot(g, slope_bracket)?)
        }
    };

    let n = opts.points;
    let grid = if red.periodic {
        Grid::periodic(&[red.b - red.a], &[n])?
    } else {
        Grid::interval(red.a / red.scale, red.b / red.scale, n)?
    };
    let s: Vec<f64> = grid.axis(0).iter().map(|x| x * red.scale).collect();
    let (t0, y0) = sh.start(value, slope)?;
    let first = if red.center.is_some() { 1 } else { 0 };
    let mut states = if red.center.is_some() {
        vec![[value, 0.0]]
    } else {
        Vec::new()
    };
    states.extend(opts.ode.sample(|t, y| sh.rhs(t, y), t0, y0, &s[first..])?);

    let h = s[1] - s[0];
    let u: Vec<f64> = states.iter().map(|y| y[0]).collect();
    let du: Vec<f64> = states.iter().map(|y| y[1]).collect();
    if u.iter().chain(&du).any(|v| !v.is_finite()) {
        return Err(Error::Construction("reduced solution is not finite".into()));
    }

    // boundary data
    let scale = u.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    match bc {
        BoundaryCondition::Dirichlet { right, .. } => {
            let miss = (u[n - 1] - right).abs();
            if miss > tol * scale {
                return Err(Error::Construction(format!(
                    "boundary value missed by {miss:e}"
                )));
            }
        }
        BoundaryCondition::Neumann { .. } => {
            if du[n - 1].abs() > tol * scale {
                return Err(Error::Construction(format!(
                    "end slope {:e} is not zero",
                    du[n - 1]
                )));
            }
        }
        BoundaryCondition::Periodic { center, .. } => {
            let end = sh.end_state(value, slope)?;
            let miss = (end[0] - center).abs().max((end[1] - slope).abs());
            if miss > tol * scale {
                return Err(Error::Construction(format!(
                    "orbit fails to close by {miss:e}"
                )));
            }
        }
        BoundaryCondition::Initial { .. } => {}
    }

    // residual with an independent fourth-order second derivative
    let d2u = diff::derivative_4th(&du, h, red.periodic);
    let mut residual = 0.0f64;
    for i in 0..n {
        let t = du[i].abs();
        let c = coeffs.evaluate(u[i], t)?;
        let drift = if i == 0 && red.center.is_some() {
            red.center.unwrap_or(0.0) * c.beta * d2u[0]
        } else {
            (red.drift)(s[i]) * c.beta * du[i]
        };
        residual = residual.max((c.alpha * d2u[i] + c.q + drift).abs());
    }

    let mut field = ScalarField::analytic(
        model.clone(),
        grid,
        u,
        du.iter().map(|v| v.abs()).collect(),
        residual,
        tol,
    )?;
    field.provenance = Provenance::SymmetricOde;
    field.slope = Some(du);
    field.require_certified()?;
    Ok(field)
}
