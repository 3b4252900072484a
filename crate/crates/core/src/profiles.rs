//! Equation coefficients and the variational profile algebra.
//!
//! A variational equation `div(Phi'(|Du|^2) Du) + q(u) = 0` with `q = Q'`
//! expands to the isotropic form with `alpha = Lambda(|Du|^2)` along the
//! gradient and `beta = Phi'(|Du|^2)` across it, where
//! `Lambda(s) = 2 Phi''(s) s + Phi'(s)`. The first-integral quantity is
//! `K(s) = Phi'(s) s - Phi(s)/2`, and `K' = Lambda / 2`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{diff, roots};

pub type CoefficientFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The triple `(alpha, beta, q)`, each a function of `(u, |Du|)`.
#[derive(Clone)]
pub struct IsotropicCoefficients {
    alpha: CoefficientFn,
    beta: CoefficientFn,
    q: CoefficientFn,
    label: String,
}

/// Coefficient values at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientValues {
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
}

impl fmt::Debug for IsotropicCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IsotropicCoefficients")
            .field("label", &self.label)
            .finish()
    }
}

impl IsotropicCoefficients {
    pub fn new(
        label: impl Into<String>,
        alpha: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        beta: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        q: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            q: Arc::new(q),
            label: label.into(),
        }
    }

    /// `alpha = beta = 1` with a forcing depending on `u` only.
    pub fn semilinear(
        label: impl Into<String>,
        q: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(label, |_, _| 1.0, |_, _| 1.0, move |u, _| q(u))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn alpha(&self, u: f64, t: f64) -> f64 {
        (self.alpha)(u, t)
    }

    pub fn beta(&self, u: f64, t: f64) -> f64 {
        (self.beta)(u, t)
    }

    pub fn q(&self, u: f64, t: f64) -> f64 {
        (self.q)(u, t)
    }

    /// Evaluate all three coefficients, rejecting non-finite values and
    /// loss of ellipticity (`beta <= 0` at `t > 0`, or `alpha < 0`).
    pub fn evaluate(&self, u: f64, t: f64) -> Result<CoefficientValues> {
        if t < 0.0 || !t.is_finite() || !u.is_finite() {
            return Err(Error::Domain(format!(
                "coefficients evaluated at u = {u}, t = {t}"
            )));
        }
        let v = CoefficientValues {
            alpha: self.alpha(u, t),
            beta: self.beta(u, t),
            q: self.q(u, t),
        };
        if !(v.alpha.is_finite() && v.beta.is_finite() && v.q.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite coefficients at u = {u}, t = {t}: {v:?}"
            )));
        }
        if v.alpha < 0.0 || (t > 0.0 && v.beta <= 0.0) {
            return Err(Error::Ellipticity(format!(
                "alpha = {}, beta = {} at u = {u}, t = {t}",
                v.alpha, v.beta
            )));
        }
        Ok(v)
    }
}

/// The gradient part `Phi` of the energy density.
#[derive(Clone)]
pub enum Flux {
    /// `Phi(s) = s`.
    Linear,
    /// `Phi(s) = (2/p) s^(p/2)`.
    PLaplace { p: f64 },
    /// `Phi(s) = sum_k a[k] s^k` with `a[0] = 0`.
    Polynomial(Vec<f64>),
    /// User-supplied `Phi` with optional analytic derivatives.
    Custom {
        phi: RealFn,
        dphi: Option<RealFn>,
        d2phi: Option<RealFn>,
    },
}

impl fmt::Debug for Flux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flux::Linear => write!(f, "Linear"),
            Flux::PLaplace { p } => write!(f, "PLaplace(p = {p})"),
            Flux::Polynomial(a) => write!(f, "Polynomial({a:?})"),
            Flux::Custom { .. } => write!(f, "Custom"),
        }
    }
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

/// One-sided near zero so that `Phi` is never sampled at negative `s`.
fn fd_first(f: &(dyn Fn(f64) -> f64 + Send + Sync), s: f64) -> f64 {
    let h = f64::EPSILON.cbrt() * s.abs().max(1.0);
    if s - h < 0.0 {
        (-3.0 * f(s) + 4.0 * f(s + h) - f(s + 2.0 * h)) / (2.0 * h)
    } else {
        diff::central_first(f, s)
    }
}

fn fd_second(f: &(dyn Fn(f64) -> f64 + Send + Sync), s: f64) -> f64 {
    let h = f64::EPSILON.powf(0.25) * s.abs().max(1.0);
    if s - h < 0.0 {
        (2.0 * f(s) - 5.0 * f(s + h) + 4.0 * f(s + 2.0 * h) - f(s + 3.0 * h)) / (h * h)
    } else {
        diff::central_second(f, s)
    }
}

impl Flux {
    pub fn phi(&self, s: f64) -> f64 {
        match self {
            Flux::Linear => s,
            Flux::PLaplace { p } => 2.0 / p * s.powf(p / 2.0),
            Flux::Polynomial(a) => poly(a, s),
            Flux::Custom { phi, .. } => phi(s),
        }
    }

    pub fn dphi(&self, s: f64) -> f64 {
        match self {
            Flux::Linear => 1.0,
            Flux::PLaplace { p } => s.powf(p / 2.0 - 1.0),
            Flux::Polynomial(a) => poly(&poly_derivative(a), s),
            Flux::Custom { dphi: Some(d), .. } => d(s),
            Flux::Custom { phi, .. } => fd_first(phi.as_ref(), s),
        }
    }

    pub fn d2phi(&self, s: f64) -> f64 {
        match self {
            Flux::Linear => 0.0,
            Flux::PLaplace { p } => (p / 2.0 - 1.0) * s.powf(p / 2.0 - 2.0),
            Flux::Polynomial(a) => poly(&poly_derivative(&poly_derivative(a)), s),
            Flux::Custom { d2phi: Some(d), .. } => d(s),
            Flux::Custom { dphi: Some(d), .. } => fd_first(d.as_ref(), s),
            Flux::Custom { phi, .. } => fd_second(phi.as_ref(), s),
        }
    }

    /// `Lambda(s) = 2 Phi''(s) s + Phi'(s)`.
    pub fn lambda(&self, s: f64) -> f64 {
        match self {
            Flux::Linear => 1.0,
            Flux::PLaplace { p } => (p - 1.0) * s.powf(p / 2.0 - 1.0),
            _ => 2.0 * self.d2phi(s) * s + self.dphi(s),
        }
    }

    /// `K(s) = Phi'(s) s - Phi(s)/2` (finite at `s = 0` for every model).
    pub fn k(&self, s: f64) -> f64 {
        match self {
            Flux::Linear => 0.5 * s,
            Flux::PLaplace { p } => (1.0 - 1.0 / p) * s.powf(p / 2.0),
            _ if s == 0.0 => -0.5 * self.phi(0.0),
            _ => self.dphi(s) * s - 0.5 * self.phi(s),
        }
    }
}

/// The potential `Q`; the forcing is `q = Q'`.
#[derive(Clone)]
pub enum Potential {
    /// `Q(u) = sum_k b[k] u^k`.
    Polynomial(Vec<f64>),
    Custom {
        big_q: RealFn,
        q: Option<RealFn>,
    },
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Polynomial(b) => write!(f, "Polynomial({b:?})"),
            Potential::Custom { .. } => write!(f, "Custom"),
        }
    }
}

impl Potential {
    /// Bistable potential `Q = -scale (1 - u^2)^2 / 4`, forcing
    /// `q = scale (u - u^3)`.
    pub fn allen_cahn(scale: f64) -> Self {
        Potential::Polynomial(vec![-0.25 * scale, 0.0, 0.5 * scale, 0.0, -0.25 * scale])
    }

    /// The double well with the opposite sign, `Q = scale (1 - u^2)^2 / 4`,
    /// whose interior maximum sits at `u = 0`.
    pub fn allen_cahn_well(scale: f64) -> Self {
        Potential::Polynomial(vec![0.25 * scale, 0.0, -0.5 * scale, 0.0, 0.25 * scale])
    }

    pub fn constant(value: f64) -> Self {
        Potential::Polynomial(vec![value])
    }

    /// `Q(u) = slope * u`, constant forcing.
    pub fn linear(slope: f64) -> Self {
        Potential::Polynomial(vec![0.0, slope])
    }

    pub fn value(&self, u: f64) -> f64 {
        match self {
            Potential::Polynomial(b) => poly(b, u),
            Potential::Custom { big_q, .. } => big_q(u),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            Potential::Polynomial(b) => poly(&poly_derivative(b), u),
            Potential::Custom { q: Some(q), .. } => q(u),
            Potential::Custom { big_q, .. } => diff::central_first(big_q.as_ref(), u),
        }
    }

    /// `q'`, used by Newton linearizations.
    pub fn second_derivative(&self, u: f64) -> f64 {
        match self {
            Potential::Polynomial(b) => poly(&poly_derivative(&poly_derivative(b)), u),
            Potential::Custom { q: Some(q), .. } => diff::central_first(q.as_ref(), u),
            Potential::Custom { big_q, .. } => diff::central_second(big_q.as_ref(), u),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Potential::Polynomial(b) if b.iter().skip(1).all(|c| *c == 0.0))
    }
}

/// `Phi`, `Q` and the structure-condition data `(p, tau, c1, c2)`.
#[derive(Debug, Clone)]
pub struct VariationalProfile {
    pub flux: Flux,
    pub potential: Potential,
    pub p: f64,
    pub tau: f64,
    pub c1: f64,
    pub c2: f64,
    /// The u-interval `[m, M]` the profile is used on.
    pub range: (f64, f64),
}

/// Supremum of `Q` over an interval together with a maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CSup {
    pub value: f64,
    pub argmax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureSample {
    pub t: f64,
    pub phi_prime: f64,
    pub lambda: f64,
    pub lower: f64,
    pub upper: f64,
    /// `min(Phi'(t^2) - lower, upper - Phi'(t^2))`.
    pub margin_flux: f64,
    /// Same margins for `Lambda(t^2)`.
    pub margin_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub samples: Vec<StructureSample>,
    /// Gradient norms at which either condition fails.
    pub violations: Vec<f64>,
}

impl StructureReport {
    pub fn satisfied(&self) -> bool {
        self.violations.is_empty()
    }
}

impl VariationalProfile {
    pub fn new(flux: Flux, potential: Potential, range: (f64, f64)) -> Result<Self> {
        let (p, c1, c2) = match &flux {
            Flux::PLaplace { p } => (*p, (p - 1.0).min(1.0), (p - 1.0).max(1.0)),
            _ => (2.0, 1.0, 1.0),
        };
        let me = Self {
            flux,
            potential,
            p,
            tau: 0.0,
            c1,
            c2,
            range,
        };
        me.validate()?;
        Ok(me)
    }

    pub fn linear(potential: Potential, range: (f64, f64)) -> Result<Self> {
        Self::new(Flux::Linear, potential, range)
    }

    pub fn p_laplace(p: f64, potential: Potential, range: (f64, f64)) -> Result<Self> {
        Self::new(Flux::PLaplace { p }, potential, range)
    }

    pub fn with_structure(mut self, p: f64, tau: f64, c1: f64, c2: f64) -> Result<Self> {
        self.p = p;
        self.tau = tau;
        self.c1 = c1;
        self.c2 = c2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_range(mut self, range: (f64, f64)) -> Result<Self> {
        self.range = range;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(Error::Parameter(format!(
                "exponent p = {} must exceed 1",
                self.p
            )));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::Parameter(format!("tau = {} must be >= 0", self.tau)));
        }
        if !(self.c1 > 0.0 && self.c2 >= self.c1) {
            return Err(Error::Parameter(format!(
                "structure constants need 0 < c1 <= c2 (got {}, {})",
                self.c1, self.c2
            )));
        }
        let (m, big_m) = self.range;
        if !(m.is_finite() && big_m.is_finite() && m <= big_m) {
            return Err(Error::Parameter(format!("invalid range [{m}, {big_m}]")));
        }
        if let Flux::PLaplace { p } = self.flux {
            if !(p > 1.0) {
                return Err(Error::Parameter(format!(
                    "p-Laplace exponent {p} must exceed 1"
                )));
            }
        }
        if let Flux::Polynomial(a) = &self.flux {
            if a.first().copied().unwrap_or(0.0) != 0.0 {
                return Err(Error::Parameter("flux polynomial must vanish at 0".into()));
            }
        }
        Ok(())
    }

    pub fn phi(&self, s: f64) -> f64 {
        self.flux.phi(s)
    }

    pub fn dphi(&self, s: f64) -> f64 {
        self.flux.dphi(s)
    }

    pub fn lambda(&self, s: f64) -> f64 {
        self.flux.lambda(s)
    }

    pub fn big_q(&self, u: f64) -> f64 {
        self.potential.value(u)
    }

    pub fn q(&self, u: f64) -> f64 {
        self.potential.derivative(u)
    }

    /// `K(s)`; negative `s` is a domain error.
    pub fn eval_k(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("K evaluated at s = {s} < 0")));
        }
        let k = self.flux.k(s);
        if !k.is_finite() {
            return Err(Error::Domain(format!("K({s}) is not finite")));
        }
        Ok(k)
    }

    /// Solve `K(s) = t` on `s >= 0`.
    pub fn invert_k(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Range(format!("K^-1 requested at t = {t}")));
        }
        let k0 = self.flux.k(0.0);
        if t == k0 {
            return Ok(0.0);
        }
        if t < k0 {
            return Err(Error::Range(format!("t = {t} below K(0) = {k0}")));
        }
        match self.flux {
            Flux::Linear => return Ok(2.0 * t),
            Flux::PLaplace { p } => return Ok((t / (1.0 - 1.0 / p)).powf(2.0 / p)),
            _ => {}
        }
        self.invert_k_numeric(t)
    }

    /// Root-finding inverse of `K`, used for every flux without a closed form.
    pub fn invert_k_numeric(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Range(format!("K^-1 requested at t = {t}")));
        }
        if t == self.flux.k(0.0) {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        while self.flux.k(hi) < t {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Range(format!("t = {t} beyond the range of K")));
            }
        }
        let s = roots::solve_increasing(|s| self.flux.k(s), t, 0.0, hi)?;
        let resid = (self.flux.k(s) - t).abs();
        if resid > 1e-12 * t.abs().max(1.0) {
            return Err(Error::Range(format!(
                "K^-1({t}) residual {resid:e} exceeds 1e-12"
            )));
        }
        Ok(s)
    }

    /// `sup Q` over the profile range.
    pub fn c_sup(&self) -> CSup {
        self.c_sup_on(self.range.0, self.range.1)
    }

    /// `sup Q` over `[m, M]`: 4097-point scan with golden-section
    /// refinement around the five best samples.
    pub fn c_sup_on(&self, m: f64, big_m: f64) -> CSup {
        let qf = |u: f64| self.big_q(u);
        if m == big_m {
            return CSup {
                value: qf(m),
                argmax: m,
            };
        }
        const N: usize = 4097;
        let h = (big_m - m) / (N - 1) as f64;
        let xs: Vec<f64> = (0..N)
            .map(|i| if i == N - 1 { big_m } else { m + i as f64 * h })
            .collect();
        let vals: Vec<f64> = xs.iter().map(|&x| qf(x)).collect();
        let mut order: Vec<usize> = (0..N).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
        let mut best = CSup {
            value: vals[order[0]],
            argmax: xs[order[0]],
        };
        for &i in order.iter().take(5) {
            let lo = xs[i.saturating_sub(1)];
            let hi = xs[(i + 1).min(N - 1)];
            let (x, v) = roots::golden_max(qf, lo, hi, 1e-12);
            if v > best.value {
                best = CSup {
                    value: v,
                    argmax: x,
                };
            }
        }
        for x in [m, big_m] {
            let v = qf(x);
            if v > best.value {
                best = CSup {
                    value: v,
                    argmax: x,
                };
            }
        }
        best
    }

    /// Scalar structure conditions at the given gradient norms.
    pub fn check_structure(&self, t_samples: &[f64]) -> StructureReport {
        let mut samples = Vec::with_capacity(t_samples.len());
        let mut violations = Vec::new();
        for &t in t_samples {
            let w = (self.tau + t).powf(self.p - 2.0);
            let (lower, upper) = (self.c1 * w, self.c2 * w);
            let s = t * t;
            let phi_prime = self.dphi(s);
            let lambda = self.lambda(s);
            let margin = |v: f64| {
                let m = (v - lower).min(upper - v);
                // relative slack for rounding in the power evaluations
                if m.abs() <= 1e-12 * upper.abs().max(1e-300) {
                    0.0
                } else {
                    m
                }
            };
            let sample = StructureSample {
                t,
                phi_prime,
                lambda,
                lower,
                upper,
                margin_flux: margin(phi_prime),
                margin_lambda: margin(lambda),
            };
            let bad = |m: f64| !(m >= 0.0);
            if bad(sample.margin_flux) || bad(sample.margin_lambda) {
                violations.push(t);
            }
            samples.push(sample);
        }
        StructureReport {
            samples,
            violations,
        }
    }

    pub fn description(&self) -> String {
        format!("{:?} / {:?}", self.flux, self.potential)
    }
}

/// `alpha(u, t) = Lambda(t^2)`, `beta(u, t) = Phi'(t^2)`, `q(u, t) = Q'(u)`.
pub fn coefficients_from_profile(profile: &VariationalProfile) -> IsotropicCoefficients {
    let (fa, fb) = (profile.flux.clone(), profile.flux.clone());
    let pot = profile.potential.clone();
    IsotropicCoefficients::new(
        format!("variational {}", profile.description()),
        move |_, t| fa.lambda(t * t),
        move |_, t| fb.dphi(t * t),
        move |u, _| pot.derivative(u),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ac(range: (f64, f64)) -> VariationalProfile {
        VariationalProfile::linear(Potential::allen_cahn_well(1.0), range).unwrap()
    }

    #[test]
    fn laplacian_and_p_laplace_coefficients() {
        let lin = VariationalProfile::linear(Potential::constant(0.0), (0.0, 1.0)).unwrap();
        let c = coefficients_from_profile(&lin).evaluate(0.3, 3.0).unwrap();
        assert_eq!((c.alpha, c.beta), (1.0, 1.0));

        let p4 = VariationalProfile::p_laplace(4.0, Potential::constant(0.0), (0.0, 1.0)).unwrap();
        let c = coefficients_from_profile(&p4).evaluate(0.0, 1.0).unwrap();
        assert!((c.alpha - 3.0).abs() < 1e-15 && (c.beta - 1.0).abs() < 1e-15);
    }

    #[test]
    fn well_forcing_vanishes_at_center() {
        let c = coefficients_from_profile(&ac((-1.0, 1.0)));
        assert_eq!(c.q(0.0, 0.4), 0.0);
    }

    #[test]
    fn singular_flux_is_a_domain_error() {
        let p = VariationalProfile::p_laplace(1.5, Potential::constant(0.0), (0.0, 1.0)).unwrap();
        let c = coefficients_from_profile(&p);
        assert!(matches!(c.evaluate(0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn k_values() {
        let lin = VariationalProfile::linear(Potential::constant(0.0), (0.0, 1.0)).unwrap();
        assert_eq!(lin.eval_k(4.0).unwrap(), 2.0);
        assert_eq!(lin.eval_k(0.0).unwrap(), 0.0);
        assert!(matches!(lin.eval_k(-1.0), Err(Error::Domain(_))));
        let p3 = VariationalProfile::p_laplace(3.0, Potential::constant(0.0), (0.0, 1.0)).unwrap();
        assert!((p3.eval_k(1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn k_inverse_values() {
        let lin = VariationalProfile::linear(Potential::constant(0.0), (0.0, 1.0)).unwrap();
        assert_eq!(lin.invert_k(3.0).unwrap(), 6.0);
        assert_eq!(lin.invert_k(0.0).unwrap(), 0.0);
        let p4 = VariationalProfile::p_laplace(4.0, Potential::constant(0.0), (0.0, 1.0)).unwrap();
        assert!((p4.invert_k(0.75).unwrap() - 1.0).abs() < 1e-14);
        assert!((p4.invert_k_numeric(0.75).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(p4.invert_k(-1.0), Err(Error::Range(_))));
    }

    #[test]
    fn custom_flux_uses_finite_differences() {
        let custom = Flux::Custom {
            phi: Arc::new(|s: f64| s + 0.1 * s * s),
            dphi: None,
            d2phi: None,
        };
        let poly = Flux::Polynomial(vec![0.0, 1.0, 0.1]);
        for s in [0.0, 0.3, 2.0, 50.0] {
            assert!((custom.dphi(s) - poly.dphi(s)).abs() < 1e-8 * s.max(1.0));
            assert!((custom.lambda(s) - poly.lambda(s)).abs() < 1e-5 * s.max(1.0));
        }
    }

    #[test]
    fn c_sup_examples() {
        let c = ac((-0.9, 0.9)).c_sup();
        assert!((c.value - 0.25).abs() < 1e-15);
        assert!(c.argmax.abs() < 1e-6);
        let k = VariationalProfile::linear(Potential::constant(7.0), (0.0, 1.0)).unwrap();
        assert_eq!(k.c_sup().value, 7.0);
        let l = VariationalProfile::linear(Potential::linear(1.0), (0.0, 1.0)).unwrap();
        assert_eq!(
            l.c_sup(),
            CSup {
                value: 1.0,
                argmax: 1.0
            }
        );
    }

    #[test]
    fn structure_checks() {
        let ts: Vec<f64> = (1..50).map(|i| 0.1 * i as f64).collect();
        for p in [1.5, 2.0, 3.0, 4.0] {
            let prof =
                VariationalProfile::p_laplace(p, Potential::constant(0.0), (0.0, 1.0)).unwrap();
            assert_eq!((prof.c1, prof.c2), (1f64.min(p - 1.0), 1f64.max(p - 1.0)));
            assert!(prof.check_structure(&ts).satisfied(), "p = {p}");
        }
        let lin = VariationalProfile::linear(Potential::constant(0.0), (0.0, 1.0)).unwrap();
        let r = lin.check_structure(&ts);
        assert!(r
            .samples
            .iter()
            .all(|s| s.margin_flux == 0.0 && s.margin_lambda == 0.0));

        let quad = VariationalProfile::new(
            Flux::Polynomial(vec![0.0, 0.0, 1.0]),
            Potential::constant(0.0),
            (0.0, 1.0),
        )
        .unwrap();
        let r = quad.check_structure(&[10.0]);
        assert_eq!(r.violations, vec![10.0]);
    }

    #[test]
    fn invalid_profiles_rejected() {
        assert!(VariationalProfile::p_laplace(1.0, Potential::constant(0.0), (0.0, 1.0)).is_err());
        assert!(VariationalProfile::linear(Potential::constant(0.0), (1.0, 0.0)).is_err());
        assert!(VariationalProfile::new(
            Flux::Polynomial(vec![1.0, 1.0]),
            Potential::constant(0.0),
            (0.0, 1.0)
        )
        .is_err());
    }
}
