//! Model manifolds, warp factors, distances and Minkowski duals.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::roots;

/// A warp `rho(z) = cosh(k (z0 + z))` (`kappa = -k^2 < 0`) or
/// `rho(z) = cos(k (z0 + z))` (`kappa = k^2 > 0`), so `rho'' + kappa rho = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Warp {
    pub kappa: f64,
    pub z0: f64,
}

impl Warp {
    fn k(&self) -> f64 {
        self.kappa.abs().sqrt()
    }

    fn arg(&self, z: f64) -> f64 {
        self.k() * (self.z0 + z)
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.kappa < 0.0
    }

    pub fn rho(&self, z: f64) -> f64 {
        if self.is_hyperbolic() {
            self.arg(z).cosh()
        } else {
            self.arg(z).cos()
        }
    }

    pub fn drho(&self, z: f64) -> f64 {
        if self.is_hyperbolic() {
            self.k() * self.arg(z).sinh()
        } else {
            -self.k() * self.arg(z).sin()
        }
    }

    pub fn d2rho(&self, z: f64) -> f64 {
        -self.kappa * self.rho(z)
    }

    /// `rho'/rho`.
    pub fn log_derivative(&self, z: f64) -> f64 {
        if self.is_hyperbolic() {
            self.k() * self.arg(z).tanh()
        } else {
            -self.k() * self.arg(z).tan()
        }
    }

    /// `(rho'/rho)' = -kappa / cosh^2` or `-kappa / cos^2`.
    pub fn log_derivative_slope(&self, z: f64) -> f64 {
        if self.is_hyperbolic() {
            -self.kappa / self.arg(z).cosh().powi(2)
        } else {
            -self.kappa / self.arg(z).cos().powi(2)
        }
    }

    /// Check `rho > 0` and `(rho'/rho)' > 0` at 1001 samples of `[a, b]`.
    pub fn validate_on(&self, a: f64, b: f64) -> Result<()> {
        for i in 0..=1000 {
            let z = a + (b - a) * i as f64 / 1000.0;
            let r = self.rho(z);
            if !(r > 0.0) {
                return Err(Error::InvalidWarp { z, value: r });
            }
            let slope = self.log_derivative_slope(z);
            if !(slope > 0.0) {
                return Err(Error::InvalidWarp { z, value: slope });
            }
        }
        Ok(())
    }
}

/// Hyperbolic warp `cosh(sqrt(-kappa)(z0 + z))`; requires `kappa < 0`.
pub fn warp_factor(kappa: f64, z0: f64) -> Result<Warp> {
    if !(kappa < 0.0) || !z0.is_finite() {
        return Err(Error::Parameter(format!(
            "warp needs kappa < 0 (got {kappa}); only then can rho'' + kappa rho = 0 \
             hold with (rho'/rho)' > 0"
        )));
    }
    Ok(Warp { kappa, z0 })
}

/// Spherical warp `cos(sqrt(kappa)(z0 + z))` for `kappa > 0`.
pub fn spherical_warp(kappa: f64, z0: f64) -> Result<Warp> {
    if !(kappa > 0.0) {
        return Err(Error::Parameter(format!(
            "spherical warp needs kappa > 0, got {kappa}"
        )));
    }
    Ok(Warp { kappa, z0 })
}

pub type NormFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A reversible, positively homogeneous norm `H` on covectors; its dual
/// `H*` measures displacements.
#[derive(Clone)]
pub enum MinkowskiNorm {
    Euclidean,
    /// `H(xi) = (sum |xi_i|^p)^(1/p)`, dual exponent `p/(p-1)`.
    Lp {
        p: f64,
    },
    Custom(NormFn),
}

impl fmt::Debug for MinkowskiNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinkowskiNorm::Euclidean => write!(f, "Euclidean"),
            MinkowskiNorm::Lp { p } => write!(f, "Lp(p = {p})"),
            MinkowskiNorm::Custom(_) => write!(f, "Custom"),
        }
    }
}

fn lp(v: &[f64], p: f64) -> f64 {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * v
        .iter()
        .map(|x| (x.abs() / m).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

impl MinkowskiNorm {
    pub fn lp(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Parameter(format!(
                "l^p norm needs 1 < p < inf, got {p}"
            )));
        }
        Ok(MinkowskiNorm::Lp { p })
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        match self {
            MinkowskiNorm::Euclidean => xi.iter().map(|x| x * x).sum::<f64>().sqrt(),
            MinkowskiNorm::Lp { p } => lp(xi, *p),
            MinkowskiNorm::Custom(h) => h(xi),
        }
    }

    /// Closed-form dual when one exists.
    pub fn analytic_dual(&self, v: &[f64]) -> Option<f64> {
        match self {
            MinkowskiNorm::Euclidean => Some(self.eval(v)),
            MinkowskiNorm::Lp { p } => Some(lp(v, p / (p - 1.0))),
            MinkowskiNorm::Custom(_) => None,
        }
    }

    /// The dual norm as a Minkowski norm on displacements.
    pub fn dual(&self) -> Option<MinkowskiNorm> {
        match self {
            MinkowskiNorm::Euclidean => Some(MinkowskiNorm::Euclidean),
            MinkowskiNorm::Lp { p } => Some(MinkowskiNorm::Lp { p: p / (p - 1.0) }),
            MinkowskiNorm::Custom(_) => None,
        }
    }

    /// Gradient of `H^2 / 2`.
    pub fn half_square_gradient(&self, xi: &[f64]) -> Vec<f64> {
        match self {
            MinkowskiNorm::Euclidean => xi.to_vec(),
            MinkowskiNorm::Lp { p } => {
                let n = lp(xi, *p);
                if n == 0.0 {
                    return vec![0.0; xi.len()];
                }
                xi.iter().map(|x| (x.abs() / n).powf(p - 2.0) * x).collect()
            }
            MinkowskiNorm::Custom(h) => {
                let f = |y: &[f64]| 0.5 * h(y).powi(2);
                let scale = xi.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300);
                let step = f64::EPSILON.cbrt() * scale;
                (0..xi.len())
                    .map(|i| {
                        let mut a = xi.to_vec();
                        let mut b = xi.to_vec();
                        a[i] += step;
                        b[i] -= step;
                        (f(&a) - f(&b)) / (2.0 * step)
                    })
                    .collect()
            }
        }
    }

    /// Hessian of `H^2 / 2` in two dimensions by central differences of the
    /// gradient.
    pub fn half_square_hessian_2d(&self, xi: [f64; 2]) -> [[f64; 2]; 2] {
        let scale = xi[0].abs().max(xi[1].abs()).max(1e-300);
        let step = 1e-5 * scale;
        let mut hess = [[0.0; 2]; 2];
        for j in 0..2 {
            let mut a = xi;
            let mut b = xi;
            a[j] += step;
            b[j] -= step;
            let ga = self.half_square_gradient(&a);
            let gb = self.half_square_gradient(&b);
            for i in 0..2 {
                hess[i][j] = (ga[i] - gb[i]) / (2.0 * step);
            }
        }
        hess
    }

    /// Positivity, reversibility and strong convexity of `H^2 / 2` at 64
    /// directions offset half a step from the coordinate axes.
    pub fn check_convexity_2d(&self) -> Result<()> {
        for k in 0..64 {
            let th = 2.0 * PI * (k as f64 + 0.5) / 64.0;
            let y = [th.cos(), th.sin()];
            let h = self.eval(&y);
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Convexity(format!("H({y:?}) = {h}")));
            }
            let back = self.eval(&[-y[0], -y[1]]);
            if (back - h).abs() > 1e-12 * h {
                return Err(Error::Convexity(format!("H is not reversible at {y:?}")));
            }
            let m = self.half_square_hessian_2d(y);
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if !(m[0][0] > 0.0 && det > 0.0) {
                return Err(Error::Convexity(format!(
                    "Hessian of H^2/2 not positive definite at {y:?}: {m:?}"
                )));
            }
        }
        Ok(())
    }

    /// Check positive 1-homogeneity at the given sample pairs.
    pub fn is_homogeneous(&self, samples: &[(f64, Vec<f64>)], rtol: f64) -> bool {
        samples.iter().all(|(c, v)| {
            let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
            let (a, b) = (self.eval(&scaled), c * self.eval(v));
            (a - b).abs() <= rtol * b.abs().max(1e-300)
        })
    }
}

/// `H*(v) = sup_{H(Y) = 1} <v, Y>`.
///
/// In two dimensions the supremum is located numerically (64 angular
/// starts, golden-section polish); in one dimension it is `|v| / H(1)`;
/// higher dimensions use the closed form where one exists.
pub fn dual_norm(h: &MinkowskiNorm, v: &[f64]) -> Result<f64> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("dual norm of non-finite {v:?}")));
    }
    if v.iter().all(|x| *x == 0.0) {
        return Ok(0.0);
    }
    match v.len() {
        1 => {
            let h1 = h.eval(&[1.0]);
            if !(h1 > 0.0) {
                return Err(Error::Convexity(format!("H(1) = {h1}")));
            }
            Ok(v[0].abs() / h1)
        }
        2 => {
            h.check_convexity_2d()?;
            let ratio = |th: f64| {
                let y = [th.cos(), th.sin()];
                (v[0] * y[0] + v[1] * y[1]) / h.eval(&y)
            };
            let step = 2.0 * PI / 64.0;
            let mut best = (0, f64::NEG_INFINITY);
            for k in 0..64 {
                let r = ratio(k as f64 * step);
                if r > best.1 {
                    best = (k, r);
                }
            }
            let th = best.0 as f64 * step;
            let (_, val) = roots::golden_max(ratio, th - step, th + step, 1e-13);
            Ok(val.max(best.1))
        }
        _ => h.analytic_dual(v).ok_or_else(|| {
            Error::Parameter("numeric dual norm is only available in dimension <= 2".into())
        }),
    }
}

/// Norm on a flat torus: Euclidean or a Minkowski `H` on covectors.
#[derive(Debug, Clone)]
pub enum TorusNorm {
    Euclidean,
    Minkowski(MinkowskiNorm),
}

#[derive(Debug, Clone)]
pub enum ModelManifold {
    /// Points are arclength coordinates.
    Circle { radius: f64 },
    /// The segment `[a, b]` of the line.
    Interval { a: f64, b: f64 },
    /// Points are coordinates in `[0, L_i)`.
    FlatTorus { periods: Vec<f64>, norm: TorusNorm },
    /// Points are polar angles (radial fields), or `(polar, azimuth)` on the
    /// 2-sphere.
    SphereRadial { n: usize, radius: f64 },
    /// Points are the interval coordinate `s` of `N x [a, b]`.
    WarpedProduct {
        n: usize,
        interval: (f64, f64),
        warp: Warp,
    },
    /// Points are a radius `r` or Cartesian coordinates in `R^n`; the
    /// boundary carries Dirichlet data.
    RadialBall { n: usize, radius: f64 },
}

/// Comparison settings a model qualifies for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Nonnegative Ricci curvature, flat barrier.
    FlatBarrier,
    /// Warped product with `rho'' + kappa rho = 0`, `(rho'/rho)' > 0`.
    WarpedBarrier,
    /// Positive curvature; sphere barrier family.
    SphereFamily,
    /// Convex domain with constant Dirichlet data.
    DirichletBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicciBound {
    /// Lower bound for `Ric` (along the radial direction for warped models).
    pub bound: f64,
    pub kappa: f64,
    pub regimes: Vec<Regime>,
}

impl ModelManifold {
    pub fn dimension(&self) -> usize {
        match self {
            ModelManifold::Circle { .. } | ModelManifold::Interval { .. } => 1,
            ModelManifold::FlatTorus { periods, .. } => periods.len(),
            ModelManifold::SphereRadial { n, .. }
            | ModelManifold::WarpedProduct { n, .. }
            | ModelManifold::RadialBall { n, .. } => *n,
        }
    }

    pub fn has_boundary(&self) -> bool {
        matches!(
            self,
            ModelManifold::Interval { .. }
                | ModelManifold::WarpedProduct { .. }
                | ModelManifold::RadialBall { .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        match self {
            ModelManifold::Circle { radius } if !(*radius > 0.0) => {
                bad(format!("circle radius {radius}"))
            }
            ModelManifold::Interval { a, b } if !(b > a) => bad(format!("interval [{a}, {b}]")),
            ModelManifold::FlatTorus { periods, norm } => {
                if periods.is_empty() || periods.iter().any(|l| !(*l > 0.0)) {
                    return bad(format!("torus periods {periods:?}"));
                }
                if let TorusNorm::Minkowski(h) = norm {
                    if periods.len() == 2 {
                        h.check_convexity_2d()?;
                    }
                }
                Ok(())
            }
            ModelManifold::SphereRadial { n, radius } if *n < 1 || !(*radius > 0.0) => {
                bad(format!("sphere n = {n}, radius = {radius}"))
            }
            ModelManifold::WarpedProduct { n, interval, warp } => {
                if *n < 2 || !(interval.1 > interval.0) {
                    return bad(format!("warped product n = {n}, interval {interval:?}"));
                }
                for i in 0..=1000 {
                    let z = interval.0 + (interval.1 - interval.0) * i as f64 / 1000.0;
                    if !(warp.rho(z) > 0.0) {
                        return Err(Error::InvalidWarp {
                            z,
                            value: warp.rho(z),
                        });
                    }
                }
                Ok(())
            }
            ModelManifold::RadialBall { n, radius } if *n < 1 || !(*radius > 0.0) => {
                bad(format!("ball n = {n}, radius = {radius}"))
            }
            _ => Ok(()),
        }
    }
}

fn off_model(x: &[f64]) -> Error {
    Error::Domain(format!("point {x:?} is not on the model"))
}

/// Distance between two points of a model (see [`ModelManifold`] for the
/// point conventions).
pub fn distance(model: &ModelManifold, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "points {x:?} and {y:?} are incompatible"
        )));
    }
    match model {
        ModelManifold::Circle { radius } => {
            if x.len() != 1 {
                return Err(off_model(x));
            }
            let c = 2.0 * PI * radius;
            let d = (y[0] - x[0]).rem_euclid(c);
            Ok(d.min(c - d))
        }
        ModelManifold::Interval { a, b } => {
            let eps = 1e-12 * (b - a);
            let on = |s: f64| s >= a - eps && s <= b + eps;
            if x.len() != 1 || !on(x[0]) || !on(y[0]) {
                return Err(off_model(x));
            }
            Ok((y[0] - x[0]).abs())
        }
        ModelManifold::FlatTorus { periods, norm } => {
            if x.len() != periods.len() {
                return Err(off_model(x));
            }
            // every norm used here is monotone in |v_i|, so the nearest
            // translate can be picked per axis
            let disp: Vec<f64> = x
                .iter()
                .zip(y)
                .zip(periods)
                .map(|((a, b), l)| {
                    let d = (b - a).rem_euclid(*l);
                    d.min(l - d)
                })
                .collect();
            match norm {
                TorusNorm::Euclidean => Ok(MinkowskiNorm::Euclidean.eval(&disp)),
                TorusNorm::Minkowski(h) => match h.analytic_dual(&disp) {
                    Some(v) => Ok(v),
                    None => torus_translate_min(h, x, y, periods),
                },
            }
        }
        ModelManifold::SphereRadial { n, radius } => match x.len() {
            1 => {
                let on = |t: f64| (0.0..=PI).contains(&t);
                if !on(x[0]) || !on(y[0]) {
                    return Err(off_model(x));
                }
                Ok(radius * (y[0] - x[0]).abs())
            }
            2 if *n == 2 => {
                let unit =
                    |p: &[f64]| [p[0].sin() * p[1].cos(), p[0].sin() * p[1].sin(), p[0].cos()];
                let (a, b) = (unit(x), unit(y));
                let cross = [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                let sin = cross.iter().map(|c| c * c).sum::<f64>().sqrt();
                let cos: f64 = a.iter().zip(&b).map(|(p, q)| p * q).sum();
                Ok(radius * sin.atan2(cos))
            }
            _ => Err(off_model(x)),
        },
        ModelManifold::WarpedProduct { interval, .. } => {
            let eps = 1e-12 * (interval.1 - interval.0);
            let on = |s: f64| s >= interval.0 - eps && s <= interval.1 + eps;
            if x.len() != 1 || !on(x[0]) || !on(y[0]) {
                return Err(off_model(x));
            }
            Ok((y[0] - x[0]).abs())
        }
        ModelManifold::RadialBall { n, radius } => {
            let tol = 1e-12 * radius;
            if x.len() == 1 {
                if x[0] < -tol || x[0] > radius + tol || y[0] < -tol || y[0] > radius + tol {
                    return Err(off_model(x));
                }
                Ok((y[0] - x[0]).abs())
            } else if x.len() == *n {
                let norm = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm(x) > radius + tol || norm(y) > radius + tol {
                    return Err(off_model(x));
                }
                let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - a).collect();
                Ok(norm(&d))
            } else {
                Err(off_model(x))
            }
        }
    }
}

fn torus_translate_min(h: &MinkowskiNorm, x: &[f64], y: &[f64], periods: &[f64]) -> Result<f64> {
    let n = periods.len();
    let mut best = f64::INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let k = (c % 3) as f64 - 1.0;
            c /= 3;
            v.push(y[i] - x[i] + k * periods[i]);
        }
        best = best.min(dual_norm(h, &v)?);
    }
    Ok(best)
}

/// Certified Ricci lower bound and the comparison settings it supports.
pub fn ricci_lower_bound(model: &ModelManifold) -> RicciBound {
    match model {
        ModelManifold::Circle { .. }
        | ModelManifold::Interval { .. }
        | ModelManifold::FlatTorus { .. } => RicciBound {
            bound: 0.0,
            kappa: 0.0,
            regimes: vec![Regime::FlatBarrier],
        },
        ModelManifold::SphereRadial { n, radius } => RicciBound {
            bound: (*n as f64 - 1.0) / (radius * radius),
            kappa: 1.0 / (radius * radius),
            regimes: vec![Regime::FlatBarrier, Regime::SphereFamily],
        },
        ModelManifold::WarpedProduct { n, interval, warp } => {
            let z = 0.5 * (interval.0 + interval.1);
            let kappa = -warp.d2rho(z) / warp.rho(z);
            let mut regimes = Vec::new();
            if kappa >= 0.0 {
                regimes.push(Regime::FlatBarrier);
            }
            if warp.validate_on(interval.0, interval.1).is_ok() {
                regimes.push(Regime::WarpedBarrier);
            }
            RicciBound {
                bound: (*n as f64 - 1.0) * kappa,
                kappa,
                regimes,
            }
        }
        ModelManifold::RadialBall { .. } => RicciBound {
            bound: 0.0,
            kappa: 0.0,
            regimes: vec![Regime::FlatBarrier, Regime::DirichletBoundary],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warp_at_origin_and_ode_residual() {
        let w = warp_factor(-1.0, 0.0).unwrap();
        assert_eq!(
            (w.rho(0.0), w.drho(0.0), w.log_derivative_slope(0.0)),
            (1.0, 0.0, 1.0)
        );
        for i in 0..100 {
            let z = -2.0 + 0.04 * i as f64;
            assert!((w.d2rho(z) - w.rho(z)).abs() <= 1e-14 * w.rho(z));
        }
        let w4 = warp_factor(-4.0, 0.3).unwrap();
        assert!(w4.validate_on(-1.0, 1.0).is_ok());
        assert!(warp_factor(0.0, 0.0).is_err());
    }

    #[test]
    fn spherical_warp_fails_validation() {
        let w = spherical_warp(1.0, 0.0).unwrap();
        assert!(matches!(
            w.validate_on(0.0, 1.0),
            Err(Error::InvalidWarp { .. })
        ));
    }

    #[test]
    fn basic_distances() {
        let torus = ModelManifold::FlatTorus {
            periods: vec![1.0, 1.0],
            norm: TorusNorm::Euclidean,
        };
        assert!((distance(&torus, &[0.0, 0.0], &[0.6, 0.0]).unwrap() - 0.4).abs() < 1e-15);
        let circle = ModelManifold::Circle { radius: 1.0 };
        assert!((distance(&circle, &[0.0], &[PI]).unwrap() - PI).abs() < 1e-15);
        let s2 = ModelManifold::SphereRadial { n: 2, radius: 1.0 };
        let d = distance(&s2, &[0.3, 0.0], &[0.3, PI]).unwrap();
        assert!((d - 0.6).abs() < 1e-14);
        assert!(distance(&circle, &[0.0, 1.0], &[0.0, 1.0]).is_err());
        let line = ModelManifold::Interval { a: -2.0, b: 2.0 };
        assert_eq!(distance(&line, &[-1.5], &[1.5]).unwrap(), 3.0);
        assert!(distance(&line, &[-2.5], &[0.0]).is_err());
    }

    #[test]
    fn l4_dual_matches_holder() {
        let h = MinkowskiNorm::lp(4.0).unwrap();
        let num = dual_norm(&h, &[1.0, 1.0]).unwrap();
        assert!((num - 2f64.powf(0.75)).abs() < 1e-8 * num);
        assert!((dual_norm(&h, &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-8);
        let e = dual_norm(&MinkowskiNorm::Euclidean, &[3.0, 4.0]).unwrap();
        assert!((e - 5.0).abs() < 1e-9);
        assert_eq!(dual_norm(&h, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn half_square_gradient_matches_differences() {
        let h = MinkowskiNorm::lp(4.0).unwrap();
        let xi = [0.7, -0.3];
        let g = h.half_square_gradient(&xi);
        for i in 0..2 {
            let mut a = xi;
            let mut b = xi;
            a[i] += 1e-6;
            b[i] -= 1e-6;
            let fd = (0.5 * h.eval(&a).powi(2) - 0.5 * h.eval(&b).powi(2)) / 2e-6;
            assert!((g[i] - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn degenerate_norm_is_rejected() {
        let h = MinkowskiNorm::Custom(Arc::new(|v: &[f64]| v[0].abs()));
        assert!(matches!(
            dual_norm(&h, &[1.0, 1.0]),
            Err(Error::Convexity(_))
        ));
    }

    #[test]
    fn ricci_regimes() {
        let t = ModelManifold::FlatTorus {
            periods: vec![1.0],
            norm: TorusNorm::Euclidean,
        };
        assert_eq!(ricci_lower_bound(&t).bound, 0.0);
        let w = ModelManifold::WarpedProduct {
            n: 3,
            interval: (0.0, 1.0),
            warp: warp_factor(-1.0, 0.2).unwrap(),
        };
        let r = ricci_lower_bound(&w);
        assert!((r.bound + 2.0).abs() < 1e-12);
        assert_eq!(r.regimes, vec![Regime::WarpedBarrier]);
        let s = ricci_lower_bound(&ModelManifold::SphereRadial { n: 2, radius: 1.0 });
        assert_eq!(s.bound, 1.0);
        assert!(s.regimes.contains(&Regime::SphereFamily));
    }
}
