//! One-dimensional barrier curves `phi` and their inverses `psi`.
//!
//! Flat and warped barriers are boundary-value problems solved by shooting
//! on the initial slope; the sphere family is an initial-value problem
//! integrated outward from `z = 0`; Modica barriers come from quadrature of
//! the first integral `K(phi'^2) = c - Q(phi)` followed by inversion.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Warp;
use crate::numeric::diff::derivative_4th;
use crate::numeric::interp::MonotoneHermite;
use crate::numeric::ode::{Dopri5, Termination};
use crate::numeric::{quad, roots};
use crate::profiles::{IsotropicCoefficients, VariationalProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BarrierKind {
    Flat,
    Warped,
    SphereFamily,
    Modica,
    /// Zero-length range; every audit against it is trivially satisfied.
    Constant,
}

/// Residual diagnostics attached to a curve. Entries that do not apply to
/// the curve's kind are `None`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct BarrierResiduals {
    /// Max ODE residual at interior samples, with `phi''` taken from a
    /// fourth-order difference of the `phi'` samples.
    pub ode: f64,
    /// Max `|K(phi'^2) + Q(phi) - c|` (Modica curves).
    pub first_integral: Option<f64>,
    /// Max defect of the sphere-family integral identity.
    pub identity: Option<f64>,
    /// Sup-norm gap to an independent ODE integration (Modica curves).
    pub cross_check: Option<f64>,
    /// Whether the monotone quantity `(q + phi'' alpha)/(phi' beta)` was
    /// observed strictly decreasing (perturbed flat and warped curves).
    pub quantity_decreasing: Option<bool>,
    /// `min phi' - sqrt(K^-1(c - c_u))` (sphere family).
    pub slope_margin: Option<f64>,
}

/// Whether a sphere-family curve reached the requested range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coverage {
    pub low: bool,
    pub high: bool,
}

impl Coverage {
    pub fn complete(&self) -> bool {
        self.low && self.high
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BarrierCurve {
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub d2phi: Vec<f64>,
    pub interval: (f64, f64),
    pub range: (f64, f64),
    pub kind: BarrierKind,
    pub delta: f64,
    pub c: Option<f64>,
    pub coverage: Option<Coverage>,
    pub residuals: BarrierResiduals,
}

/// Shooting and sampling settings.
#[derive(Debug, Clone, Copy)]
pub struct BarrierOptions {
    /// Bracket for the initial slope; chosen automatically when `None`.
    pub bracket: Option<(f64, f64)>,
    pub grid_points: usize,
    pub max_bisections: usize,
    pub ode: Dopri5,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            bracket: None,
            grid_points: 1025,
            max_bisections: 80,
            ode: Dopri5::default(),
        }
    }
}

fn uniform(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn check_range(range: (f64, f64)) -> Result<()> {
    if !(range.0.is_finite() && range.1.is_finite() && range.0 <= range.1) {
        return Err(Error::Parameter(format!("invalid target range {range:?}")));
    }
    Ok(())
}

impl BarrierCurve {
    /// Wrap externally computed samples (for instance a closed-form curve).
    pub fn from_samples(
        kind: BarrierKind,
        grid: Vec<f64>,
        phi: Vec<f64>,
        dphi: Vec<f64>,
        d2phi: Vec<f64>,
    ) -> Result<Self> {
        let n = grid.len();
        if n < 2 || phi.len() != n || dphi.len() != n || d2phi.len() != n {
            return Err(Error::Domain(
                "barrier samples must have matching lengths >= 2".into(),
            ));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(
                "barrier grid must be strictly increasing".into(),
            ));
        }
        let curve = Self {
            interval: (grid[0], grid[n - 1]),
            range: (phi[0], phi[n - 1]),
            grid,
            phi,
            dphi,
            d2phi,
            kind,
            delta: 0.0,
            c: None,
            coverage: None,
            residuals: BarrierResiduals::default(),
        };
        curve.check_monotone()?;
        Ok(curve)
    }

    /// Designated curve for a zero-length range.
    pub fn constant(value: f64, a: f64, b: f64) -> Self {
        Self {
            grid: vec![a, b],
            phi: vec![value, value],
            dphi: vec![0.0, 0.0],
            d2phi: vec![0.0, 0.0],
            interval: (a, b),
            range: (value, value),
            kind: BarrierKind::Constant,
            delta: 0.0,
            c: None,
            coverage: None,
            residuals: BarrierResiduals::default(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.kind == BarrierKind::Constant
    }

    pub fn min_slope(&self) -> f64 {
        self.dphi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn length(&self) -> f64 {
        self.interval.1 - self.interval.0
    }

    /// Spread of `K(phi'^2) + Q(phi)` over the samples.
    pub fn first_integral_spread(&self, profile: &VariationalProfile) -> f64 {
        let vals: Vec<f64> = self
            .phi
            .iter()
            .zip(&self.dphi)
            .map(|(p, d)| profile.flux.k(d * d) + profile.big_q(*p))
            .collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    fn check_monotone(&self) -> Result<()> {
        for (i, d) in self.dphi.iter().enumerate() {
            if !(*d > 0.0) {
                return Err(Error::Monotonicity {
                    z: self.grid[i],
                    slope: *d,
                });
            }
        }
        if let Some(i) = self.phi.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Monotonicity {
                z: self.grid[i + 1],
                slope: self.dphi[i + 1],
            });
        }
        Ok(())
    }

    fn fd_second(&self) -> Vec<f64> {
        let h = (self.interval.1 - self.interval.0) / (self.grid.len() - 1) as f64;
        derivative_4th(&self.dphi, h, false)
    }

    /// Write `z, phi, dphi` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["z", "phi", "dphi"])?;
        for i in 0..self.grid.len() {
            w.write_record(&[
                format!("{:.17e}", self.grid[i]),
                format!("{:.17e}", self.phi[i]),
                format!("{:.17e}", self.dphi[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Metadata sidecar: kind, delta, c, interval, range and residuals.
    pub fn metadata_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "delta": self.delta,
            "c": self.c,
            "interval": [self.interval.0, self.interval.1],
            "range": [self.range.0, self.range.1],
            "samples": self.grid.len(),
            "min_dphi": self.min_slope(),
            "coverage": self.coverage,
            "residuals": self.residuals,
        })
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut f, &self.metadata_json())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shot {
    /// Fell short of the target (or lost monotonicity at `z`).
    Low(f64, Option<f64>),
    /// Reached past the target.
    High(f64),
}

/// Integrate `phi'' = rhs(z, phi, phi')` from `(a, m, s)` and classify the
/// endpoint against `big_m`.
fn fire<F>(rhs: &F, a: f64, b: f64, m: f64, big_m: f64, s: f64, ode: &Dopri5) -> Shot
where
    F: Fn(f64, f64, f64) -> f64,
{
    let ceiling = big_m + (big_m - m).max(1e-12);
    let res = ode.integrate(
        |z, y: &[f64; 2]| [y[1], rhs(z, y[0], y[1])],
        a,
        [m, s],
        b,
        |_, y| y[1] <= 0.0 || y[0] > ceiling,
    );
    match res {
        Err(_) => Shot::High(f64::INFINITY),
        Ok(traj) => {
            let y = traj.y_end;
            if traj.termination == Termination::Stopped {
                if y[1] <= 0.0 {
                    let z = traj.first_crossing(1, 0.0).unwrap_or(traj.t_end);
                    Shot::Low(f64::NEG_INFINITY, Some(z))
                } else {
                    Shot::High(f64::INFINITY)
                }
            } else if y[0] >= big_m {
                Shot::High(y[0] - big_m)
            } else {
                Shot::Low(y[0] - big_m, None)
            }
        }
    }
}

/// Shooting on the initial slope so that `phi(b) = M`.
fn shoot<F>(rhs: &F, a: f64, b: f64, m: f64, big_m: f64, opts: &BarrierOptions) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let ode = &opts.ode;
    let nominal = (big_m - m) / (b - a);
    let (mut lo, mut hi) = match opts.bracket {
        Some((lo, hi)) => {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::Parameter(format!("slope bracket [{lo}, {hi}]")));
            }
            (lo, hi)
        }
        None => (nominal * 1e-6, nominal),
    };
    let mut shot_lo = fire(rhs, a, b, m, big_m, lo, ode);
    if opts.bracket.is_none() {
        let mut tries = 0;
        while matches!(shot_lo, Shot::High(_)) && tries < 6 {
            lo *= 1e-2;
            shot_lo = fire(rhs, a, b, m, big_m, lo, ode);
            tries += 1;
        }
    }
    if matches!(shot_lo, Shot::High(_)) {
        return Err(Error::Construction(format!(
            "shooting bracket: slope {lo:e} already overshoots phi(b) = {big_m}"
        )));
    }
    let mut shot_hi = fire(rhs, a, b, m, big_m, hi, ode);
    if opts.bracket.is_none() {
        let mut tries = 0;
        while matches!(shot_hi, Shot::Low(..)) && tries < 64 {
            lo = hi;
            shot_lo = shot_hi;
            hi *= 2.0;
            shot_hi = fire(rhs, a, b, m, big_m, hi, ode);
            tries += 1;
        }
    }
    if let Shot::Low(..) = shot_hi {
        return Err(Error::Construction(format!(
            "shooting bracket: slope {hi:e} does not reach phi(b) = {big_m}; no admissible initial slope"
        )));
    }
    for _ in 0..opts.max_bisections {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match fire(rhs, a, b, m, big_m, mid, ode) {
            s @ Shot::Low(..) => {
                lo = mid;
                shot_lo = s;
            }
            s @ Shot::High(_) => {
                hi = mid;
                shot_hi = s;
            }
        }
    }
    let (s, shot) = match (shot_lo, shot_hi) {
        (Shot::Low(gl, None), Shot::High(gh)) if gl.abs() <= gh.abs() => (lo, shot_lo),
        (_, Shot::High(gh)) if gh.is_finite() => (hi, shot_hi),
        _ => (lo, shot_lo),
    };
    let gap = match shot {
        Shot::Low(_, Some(z)) => {
            return Err(Error::Monotonicity { z, slope: 0.0 });
        }
        Shot::Low(g, None) | Shot::High(g) => g.abs(),
    };
    if !(gap <= 1e-8 * (big_m - m).max(1.0)) {
        return Err(Error::Construction(format!(
            "shooting converged to slope {s:e} but |phi(b) - M| = {gap:e}"
        )));
    }
    Ok(s)
}

/// Sample the solution of `phi'' = rhs` from `(a, m, s0)` on `grid`.
fn sample_curve<F>(
    rhs: &F,
    grid: &[f64],
    m: f64,
    s0: f64,
    ode: &Dopri5,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let states = ode.sample(
        |z, y: &[f64; 2]| [y[1], rhs(z, y[0], y[1])],
        grid[0],
        [m, s0],
        grid,
    )?;
    let phi: Vec<f64> = states.iter().map(|y| y[0]).collect();
    let dphi: Vec<f64> = states.iter().map(|y| y[1]).collect();
    let d2phi: Vec<f64> = grid
        .iter()
        .zip(&states)
        .map(|(z, y)| rhs(*z, y[0], y[1]))
        .collect();
    Ok((phi, dphi, d2phi))
}

/// `alpha phi'' + q = -delta z phi' beta` with `phi(a) = m`, `phi(b) = M`.
pub fn solve_flat_barrier(
    coeffs: &IsotropicCoefficients,
    a: f64,
    b: f64,
    target_range: (f64, f64),
    delta: f64,
) -> Result<BarrierCurve> {
    solve_flat_barrier_with(
        coeffs,
        a,
        b,
        target_range,
        delta,
        &BarrierOptions::default(),
    )
}

pub fn solve_flat_barrier_with(
    coeffs: &IsotropicCoefficients,
    a: f64,
    b: f64,
    target_range: (f64, f64),
    delta: f64,
    opts: &BarrierOptions,
) -> Result<BarrierCurve> {
    check_range(target_range)?;
    if !(b > a) || !(delta >= 0.0) {
        return Err(Error::Parameter(format!(
            "flat barrier needs a < b and delta >= 0 (a = {a}, b = {b}, delta = {delta})"
        )));
    }
    let (m, big_m) = target_range;
    if m == big_m {
        return Ok(BarrierCurve::constant(m, a, b));
    }
    let rhs = |z: f64, p: f64, dp: f64| {
        let t = dp.abs();
        -(coeffs.q(p, t) + delta * z * dp * coeffs.beta(p, t)) / coeffs.alpha(p, t)
    };
    let s0 = shoot(&rhs, a, b, m, big_m, opts)?;
    let grid = uniform(a, b, opts.grid_points);
    let (phi, dphi, d2phi) = sample_curve(&rhs, &grid, m, s0, &opts.ode)?;
    let mut curve = BarrierCurve {
        range: (phi[0], *phi.last().expect("grid")),
        grid,
        phi,
        dphi,
        d2phi,
        interval: (a, b),
        kind: BarrierKind::Flat,
        delta,
        c: None,
        coverage: None,
        residuals: BarrierResiduals::default(),
    };
    curve.check_monotone()?;
    let fd = curve.fd_second();
    let n = curve.grid.len();
    let mut ode_res: f64 = 0.0;
    let mut quantity = Vec::with_capacity(n);
    for i in 0..n {
        let (z, p, dp) = (curve.grid[i], curve.phi[i], curve.dphi[i]);
        let c = coeffs.evaluate(p, dp)?;
        if i > 0 && i + 1 < n {
            ode_res = ode_res.max((c.alpha * fd[i] + c.q + delta * z * dp * c.beta).abs());
        }
        quantity.push((c.q + fd[i] * c.alpha) / (dp * c.beta));
    }
    curve.residuals.ode = ode_res;
    if delta > 0.0 {
        curve.residuals.quantity_decreasing =
            Some(slopes_below(&curve.grid, &quantity, -0.5 * delta));
    }
    Ok(curve)
}

/// Finite-difference slopes of `values` at interior samples all `<= bound`.
fn slopes_below(grid: &[f64], values: &[f64], bound: f64) -> bool {
    let h = grid[1] - grid[0];
    let d = derivative_4th(values, h, false);
    d[1..d.len() - 1].iter().all(|s| *s <= bound)
}

/// Barrier on a warped model:
/// `(q + phi'' alpha)/(phi' beta) + (n - 1) rho'/rho = 0`.
pub fn solve_warped_barrier(
    coeffs: &IsotropicCoefficients,
    warp: &Warp,
    n: usize,
    a: f64,
    b: f64,
    target_range: (f64, f64),
) -> Result<BarrierCurve> {
    solve_warped_barrier_with(
        coeffs,
        warp,
        n,
        a,
        b,
        target_range,
        &BarrierOptions::default(),
    )
}

pub fn solve_warped_barrier_with(
    coeffs: &IsotropicCoefficients,
    warp: &Warp,
    n: usize,
    a: f64,
    b: f64,
    target_range: (f64, f64),
    opts: &BarrierOptions,
) -> Result<BarrierCurve> {
    check_range(target_range)?;
    if !(b > a) || n < 2 {
        return Err(Error::Parameter(format!(
            "warped barrier needs a < b and n >= 2 (a = {a}, b = {b}, n = {n})"
        )));
    }
    if !warp.is_hyperbolic() {
        return Err(Error::Parameter(format!(
            "warped barrier needs kappa < 0, got {}",
            warp.kappa
        )));
    }
    warp.validate_on(a, b)?;
    let (m, big_m) = target_range;
    if m == big_m {
        return Ok(BarrierCurve::constant(m, a, b));
    }
    let drift = (n - 1) as f64;
    let rhs = |z: f64, p: f64, dp: f64| {
        let t = dp.abs();
        -(coeffs.q(p, t) + drift * dp * coeffs.beta(p, t) * warp.log_derivative(z))
            / coeffs.alpha(p, t)
    };
    let s0 = shoot(&rhs, a, b, m, big_m, opts)?;
    let grid = uniform(a, b, opts.grid_points);
    let (phi, dphi, d2phi) = sample_curve(&rhs, &grid, m, s0, &opts.ode)?;
    let mut curve = BarrierCurve {
        range: (phi[0], *phi.last().expect("grid")),
        grid,
        phi,
        dphi,
        d2phi,
        interval: (a, b),
        kind: BarrierKind::Warped,
        delta: 0.0,
        c: None,
        coverage: None,
        residuals: BarrierResiduals::default(),
    };
    curve.check_monotone()?;
    let fd = curve.fd_second();
    let len = curve.grid.len();
    let mut res: f64 = 0.0;
    let mut quantity = Vec::with_capacity(len);
    for i in 0..len {
        let (z, p, dp) = (curve.grid[i], curve.phi[i], curve.dphi[i]);
        let c = coeffs.evaluate(p, dp)?;
        let qty = (c.q + fd[i] * c.alpha) / (dp * c.beta);
        if i > 0 && i + 1 < len {
            res = res.max((qty + drift * warp.log_derivative(z)).abs());
        }
        quantity.push(qty);
    }
    curve.residuals.ode = res;
    let drift_values: Vec<f64> = curve
        .grid
        .iter()
        .map(|z| -drift * warp.log_derivative(*z))
        .collect();
    curve.residuals.quantity_decreasing = Some(drift_values.windows(2).all(|w| w[1] < w[0]));
    Ok(curve)
}

/// The family `Lambda(phi'^2) phi'' + q(phi) = (n-1) tan(z) Phi'(phi'^2) phi'`
/// with `phi(0) = u0`, `phi'(0) = sqrt(K^-1(c - c_u))`, grown inside
/// `(-pi/2, pi/2)` until it covers the profile range.
pub fn solve_sphere_family(
    profile: &VariationalProfile,
    c: f64,
    u0: f64,
    n: usize,
) -> Result<BarrierCurve> {
    solve_sphere_family_with(profile, c, u0, n, &BarrierOptions::default())
}

pub fn solve_sphere_family_with(
    profile: &VariationalProfile,
    c: f64,
    u0: f64,
    n: usize,
    opts: &BarrierOptions,
) -> Result<BarrierCurve> {
    let (m, big_m) = profile.range;
    let cu = profile.c_sup();
    if !(c > cu.value) {
        return Err(Error::Parameter(format!(
            "sphere family needs c > c_u (c = {c}, c_u = {})",
            cu.value
        )));
    }
    if !(u0 >= m && u0 <= big_m) {
        return Err(Error::Parameter(format!(
            "u0 = {u0} outside range [{m}, {big_m}]"
        )));
    }
    let qu0 = profile.big_q(u0);
    if (qu0 - cu.value).abs() > 1e-9 * cu.value.abs().max(1.0) {
        return Err(Error::Parameter(format!(
            "u0 = {u0} must maximize Q on the range (Q(u0) = {qu0}, c_u = {})",
            cu.value
        )));
    }
    if n < 1 {
        return Err(Error::Parameter("dimension must be >= 1".into()));
    }
    let slope0 = profile.invert_k(c - cu.value)?.sqrt();
    let drift = (n - 1) as f64;
    let rhs = |z: f64, y: &[f64; 3]| {
        let s = y[1] * y[1];
        let tension = drift * z.tan() * profile.dphi(s);
        [
            y[1],
            (tension * y[1] - profile.q(y[0])) / profile.lambda(s),
            tension * s,
        ]
    };
    let edge = FRAC_PI_2 - 1e-6;
    let y0 = [u0, slope0, 0.0];
    let ode = opts.ode;
    let fwd = ode.integrate(rhs, 0.0, y0, edge, |_, y| y[0] >= big_m || y[1] <= 0.0)?;
    let bwd = ode.integrate(rhs, 0.0, y0, -edge, |_, y| y[0] <= m || y[1] <= 0.0)?;
    let high = fwd.y_end[0] >= big_m;
    let low = bwd.y_end[0] <= m;
    for traj in [&fwd, &bwd] {
        if traj.y_end[1] <= 0.0 {
            let z = traj.first_crossing(1, 0.0).unwrap_or(traj.t_end);
            return Err(Error::Monotonicity { z, slope: 0.0 });
        }
    }
    let b = if high {
        fwd.first_crossing(0, big_m).unwrap_or(fwd.t_end)
    } else {
        fwd.t_end
    };
    let a = if low {
        bwd.first_crossing(0, m).unwrap_or(bwd.t_end)
    } else {
        bwd.t_end
    };
    let grid = uniform(a, b, opts.grid_points);
    let split = grid.partition_point(|z| *z < 0.0);
    let neg: Vec<f64> = grid[..split].iter().rev().copied().collect();
    let pos: Vec<f64> = grid[split..].to_vec();
    let mut states: Vec<[f64; 3]> = ode.sample(rhs, 0.0, y0, &neg)?.into_iter().rev().collect();
    states.extend(ode.sample(rhs, 0.0, y0, &pos)?);

    let phi: Vec<f64> = states.iter().map(|y| y[0]).collect();
    let dphi: Vec<f64> = states.iter().map(|y| y[1]).collect();
    let d2phi: Vec<f64> = grid
        .iter()
        .zip(&states)
        .map(|(z, y)| rhs(*z, y)[1])
        .collect();
    let mut curve = BarrierCurve {
        range: (phi[0], *phi.last().expect("grid")),
        grid,
        phi,
        dphi,
        d2phi,
        interval: (a, b),
        kind: BarrierKind::SphereFamily,
        delta: 0.0,
        c: Some(c),
        coverage: Some(Coverage { low, high }),
        residuals: BarrierResiduals::default(),
    };
    curve.check_monotone()?;
    let fd = curve.fd_second();
    let len = curve.grid.len();
    let (mut ode_res, mut ident): (f64, f64) = (0.0, 0.0);
    let mut margin = f64::INFINITY;
    for i in 0..len {
        let (z, p, dp) = (curve.grid[i], curve.phi[i], curve.dphi[i]);
        let s = dp * dp;
        if i > 0 && i + 1 < len {
            let r =
                profile.lambda(s) * fd[i] + profile.q(p) - drift * z.tan() * profile.dphi(s) * dp;
            ode_res = ode_res.max(r.abs());
        }
        let lhs = profile.flux.k(s) + profile.big_q(p);
        ident = ident.max((lhs - c - states[i][2]).abs());
        margin = margin.min(dp - slope0);
    }
    curve.residuals.ode = ode_res;
    curve.residuals.identity = Some(ident);
    curve.residuals.slope_margin = Some(margin);
    Ok(curve)
}

/// Slope `sqrt(K^-1(c - Q(phi)))` of a Modica curve.
fn modica_slope(profile: &VariationalProfile, c: f64, phi: f64) -> Result<f64> {
    Ok(profile.invert_k(c - profile.big_q(phi))?.sqrt())
}

/// Modica barrier over the profile range: `K(phi'^2) = c - Q(phi)`,
/// `s = s0 + int_m^phi dv / sqrt(K^-1(c - Q(v)))`.
pub fn modica_barrier(profile: &VariationalProfile, c: f64, s0: f64) -> Result<BarrierCurve> {
    modica_barrier_with(profile, c, s0, &BarrierOptions::default())
}

pub fn modica_barrier_with(
    profile: &VariationalProfile,
    c: f64,
    s0: f64,
    opts: &BarrierOptions,
) -> Result<BarrierCurve> {
    let (m, big_m) = profile.range;
    let cu = profile.c_sup();
    if !(c > cu.value) {
        return Err(Error::Parameter(format!(
            "Modica barrier needs c > c_u (c = {c}, c_u = {}); the integrand is singular inside the range otherwise",
            cu.value
        )));
    }
    if m == big_m {
        let mut k = BarrierCurve::constant(m, s0, s0);
        k.c = Some(c);
        return Ok(k);
    }
    let integrand = |v: f64| -> f64 {
        match modica_slope(profile, c, v) {
            Ok(s) => 1.0 / s,
            Err(_) => f64::NAN,
        }
    };
    let nodes = uniform(m, big_m, opts.grid_points);
    let mut cum = vec![s0; nodes.len()];
    for k in 1..nodes.len() {
        let q = quad::integrate(integrand, nodes[k - 1], nodes[k], 1e-15, 1e-13)?;
        cum[k] = cum[k - 1] + q.value;
    }
    let b = *cum.last().expect("nodes");
    let grid = uniform(s0, b, opts.grid_points);
    let mut phi = Vec::with_capacity(grid.len());
    for (j, &z) in grid.iter().enumerate() {
        if j == 0 {
            phi.push(m);
            continue;
        }
        if j == grid.len() - 1 {
            phi.push(big_m);
            continue;
        }
        let k = (cum.partition_point(|s| *s <= z)).clamp(1, nodes.len() - 1) - 1;
        let (lo, hi) = (nodes[k], nodes[k + 1]);
        let arc = |v: f64| -> f64 {
            cum[k]
                + quad::integrate(integrand, lo, v, 1e-15, 1e-13)
                    .map(|q| q.value)
                    .unwrap_or(f64::NAN)
        };
        // safeguarded Newton: the derivative of arc length is 1/phi'
        let mut v = lo + (hi - lo) * ((z - cum[k]) / (cum[k + 1] - cum[k])).clamp(0.0, 1.0);
        let mut ok = false;
        for _ in 0..30 {
            let g = arc(v) - z;
            if g.abs() <= 1e-14 * z.abs().max(1.0) {
                ok = true;
                break;
            }
            let next = v - g / integrand(v);
            if !(next > lo && next < hi) || !next.is_finite() {
                break;
            }
            v = next;
        }
        if !ok {
            v = roots::solve_increasing(arc, z, lo, hi)?;
        }
        phi.push(v);
    }
    let dphi = phi
        .iter()
        .map(|p| modica_slope(profile, c, *p))
        .collect::<Result<Vec<_>>>()?;
    let d2phi: Vec<f64> = phi
        .iter()
        .zip(&dphi)
        .map(|(p, d)| -profile.q(*p) / profile.lambda(d * d))
        .collect();
    let mut curve = BarrierCurve {
        range: (m, big_m),
        grid,
        phi,
        dphi,
        d2phi,
        interval: (s0, b),
        kind: BarrierKind::Modica,
        delta: 0.0,
        c: Some(c),
        coverage: None,
        residuals: BarrierResiduals::default(),
    };
    curve.check_monotone()?;
    let fd = curve.fd_second();
    let len = curve.grid.len();
    let (mut ode_res, mut fi): (f64, f64) = (0.0, 0.0);
    for i in 0..len {
        let (p, dp) = (curve.phi[i], curve.dphi[i]);
        let s = dp * dp;
        if i > 0 && i + 1 < len {
            ode_res = ode_res.max((profile.lambda(s) * fd[i] + profile.q(p)).abs());
        }
        fi = fi.max((profile.flux.k(s) + profile.big_q(p) - c).abs());
    }
    curve.residuals.ode = ode_res;
    curve.residuals.first_integral = Some(fi);
    let ode_phi = modica_ode_curve(profile, c, &curve.grid, &opts.ode)?;
    let gap = ode_phi
        .iter()
        .zip(&curve.phi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    curve.residuals.cross_check = Some(gap);
    Ok(curve)
}

/// Direct integration of `Lambda(phi'^2) phi'' + q(phi) = 0` from
/// `phi(grid[0]) = m`, `phi' = sqrt(K^-1(c - Q(m)))`, sampled on `grid`.
pub fn modica_ode_curve(
    profile: &VariationalProfile,
    c: f64,
    grid: &[f64],
    ode: &Dopri5,
) -> Result<Vec<f64>> {
    let m = profile.range.0;
    let slope = modica_slope(profile, c, m)?;
    let states = ode.sample(
        |_, y: &[f64; 2]| [y[1], -profile.q(y[0]) / profile.lambda(y[1] * y[1])],
        grid[0],
        [m, slope],
        grid,
    )?;
    Ok(states.iter().map(|y| y[0]).collect())
}

/// `psi = phi^-1` as a monotone Hermite interpolant with slopes `1/phi'`.
#[derive(Debug, Clone, Serialize)]
pub struct InverseBarrier {
    pub domain: (f64, f64),
    interp: Option<MonotoneHermite>,
    /// `z` value of a constant barrier.
    anchor: f64,
}

/// Values within this distance of the domain are clamped onto it.
pub const DOMAIN_MARGIN: f64 = 1e-12;

impl InverseBarrier {
    pub fn is_constant(&self) -> bool {
        self.interp.is_none()
    }

    fn clamp(&self, v: f64) -> Result<f64> {
        let (lo, hi) = self.domain;
        let slack = DOMAIN_MARGIN * (hi - lo).abs().max(1.0);
        if v < lo - slack || v > hi + slack || !v.is_finite() {
            return Err(Error::Domain(format!(
                "value {v} outside the barrier range [{lo}, {hi}]"
            )));
        }
        Ok(v.clamp(lo, hi))
    }

    /// `psi(v)`; values outside the domain (beyond the margin) are an error.
    pub fn psi(&self, v: f64) -> Result<f64> {
        let v = self.clamp(v)?;
        match &self.interp {
            None => Ok(self.anchor),
            Some(h) => Ok(h.eval(v).expect("clamped into domain")),
        }
    }

    /// `psi'(v) = 1 / phi'(psi(v))`.
    pub fn dpsi(&self, v: f64) -> Result<f64> {
        let v = self.clamp(v)?;
        match &self.interp {
            None => Ok(f64::INFINITY),
            Some(h) => Ok(h.derivative(v).expect("clamped into domain")),
        }
    }

    /// `phi'(psi(v))`.
    pub fn slope_at(&self, v: f64) -> Result<f64> {
        Ok(1.0 / self.dpsi(v)?)
    }

    pub fn cubic_fallbacks(&self) -> usize {
        self.interp.as_ref().map_or(0, |h| h.cubic_fallbacks())
    }
}

pub fn invert_barrier(curve: &BarrierCurve) -> InverseBarrier {
    if curve.is_constant() {
        return InverseBarrier {
            domain: curve.range,
            interp: None,
            anchor: curve.interval.0,
        };
    }
    let slopes: Vec<f64> = curve.dphi.iter().map(|d| 1.0 / d).collect();
    let curv: Vec<f64> = curve
        .dphi
        .iter()
        .zip(&curve.d2phi)
        .map(|(d, s)| -s / d.powi(3))
        .collect();
    let interp = MonotoneHermite::new(curve.phi.clone(), curve.grid.clone(), slopes, Some(curv))
        .expect("barrier curves are strictly increasing");
    InverseBarrier {
        domain: curve.range,
        interp: Some(interp),
        anchor: curve.interval.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::warp_factor;
    use crate::profiles::Potential;

    fn bistable() -> IsotropicCoefficients {
        IsotropicCoefficients::semilinear("bistable", |u| u - u * u * u)
    }

    #[test]
    fn linear_barrier_is_identity() {
        let c = IsotropicCoefficients::semilinear("zero", |_| 0.0);
        let curve = solve_flat_barrier(&c, 0.0, 1.0, (0.0, 1.0), 0.0).unwrap();
        for (z, p) in curve.grid.iter().zip(&curve.phi) {
            assert!((z - p).abs() < 1e-12);
        }
        assert!(curve.dphi.iter().all(|d| (d - 1.0).abs() < 1e-10));
        let inv = invert_barrier(&curve);
        assert!((inv.psi(0.37).unwrap() - 0.37).abs() < 1e-12);
    }

    #[test]
    fn kink_barrier_first_integral() {
        let prof = VariationalProfile::linear(Potential::allen_cahn(1.0), (-0.96, 0.96)).unwrap();
        let curve = solve_flat_barrier(&bistable(), 0.0, 5.0, (-0.96, 0.96), 0.0).unwrap();
        assert!(curve.first_integral_spread(&prof) < 1e-8);
        assert!(curve.residuals.ode < 1e-8, "{}", curve.residuals.ode);
        assert!((curve.range.1 - 0.96).abs() < 1e-8);
    }

    #[test]
    fn perturbed_quantity_decreases() {
        let curve = solve_flat_barrier(&bistable(), 0.0, 5.0, (-0.96, 0.96), 1e-3).unwrap();
        assert_eq!(curve.residuals.quantity_decreasing, Some(true));
    }

    #[test]
    fn shooting_failure_is_reported() {
        // phi'' = -50 cannot climb [0, 1] monotonically over [0, 10]
        let c = IsotropicCoefficients::semilinear("push", |_| 50.0);
        let err = solve_flat_barrier(&c, 0.0, 10.0, (0.0, 1.0), 0.0).unwrap_err();
        assert!(
            matches!(err, Error::Construction(_) | Error::Monotonicity { .. }),
            "{err:?}"
        );
    }

    #[test]
    fn gudermannian_warped_barrier() {
        let c = IsotropicCoefficients::semilinear("zero", |_| 0.0);
        let warp = warp_factor(-1.0, 0.0).unwrap();
        let gd = |z: f64| 2.0 * (z / 2.0).tanh().atan();
        let curve = solve_warped_barrier(&c, &warp, 2, 0.0, 2.0, (0.0, gd(2.0))).unwrap();
        for (z, p) in curve.grid.iter().zip(&curve.phi) {
            assert!((p - gd(*z)).abs() < 1e-8);
        }
        assert!(curve.residuals.ode < 1e-8);
    }

    #[test]
    fn cos_warp_is_rejected() {
        let c = IsotropicCoefficients::semilinear("zero", |_| 0.0);
        let warp = Warp {
            kappa: 1.0,
            z0: 0.0,
        };
        assert!(solve_warped_barrier(&c, &warp, 2, 0.0, 1.0, (0.0, 1.0)).is_err());
        let bad = Warp {
            kappa: -1.0,
            z0: 0.0,
        };
        // rho = cosh stays valid; a positive curvature warp is not
        assert!(bad.validate_on(0.0, 1.0).is_ok());
    }

    #[test]
    fn sphere_family_flat_potential() {
        let prof = VariationalProfile::linear(Potential::constant(0.0), (-1.0, 1.0)).unwrap();
        let curve = solve_sphere_family(&prof, 0.5, 0.0, 2).unwrap();
        let i0 = curve.grid.iter().position(|z| z.abs() < 1e-3).unwrap();
        assert!(curve.dphi[i0] >= 1.0 - 1e-10);
        assert!(curve.residuals.identity.unwrap() < 1e-6);
        assert!(curve.residuals.slope_margin.unwrap() >= -1e-10);
        assert!(curve.coverage.unwrap().complete());
    }

    #[test]
    fn sphere_family_rejects_c_below_cu() {
        let prof =
            VariationalProfile::linear(Potential::allen_cahn_well(1.0), (-0.9, 0.9)).unwrap();
        assert!(matches!(
            solve_sphere_family(&prof, 0.2, 0.0, 2),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn modica_flat_potential_is_linear() {
        let prof = VariationalProfile::linear(Potential::constant(0.0), (0.0, 2.0)).unwrap();
        let curve = modica_barrier(&prof, 0.5, 1.0).unwrap();
        for (z, p) in curve.grid.iter().zip(&curve.phi) {
            assert!((p - (z - 1.0)).abs() < 1e-12);
        }
        assert!(curve.residuals.cross_check.unwrap() < 1e-9);
    }

    #[test]
    fn modica_at_zero_level_is_the_kink() {
        // Q = -(1-u^2)^2/4 has c_u = Q(0.9) < 0 on [-0.9, 0.9]; the level
        // c = 0 is the heteroclinic kink tanh(z / sqrt 2)
        let prof = VariationalProfile::linear(Potential::allen_cahn(1.0), (-0.9, 0.9)).unwrap();
        assert!(prof.c_sup().value < 0.0);
        let z0 = -2f64.sqrt() * 0.9f64.atanh();
        let curve = modica_barrier(&prof, 0.0, z0).unwrap();
        let gap = curve
            .grid
            .iter()
            .zip(&curve.phi)
            .map(|(z, p)| (p - (z / 2f64.sqrt()).tanh()).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-9, "{gap}");
        assert!(curve.residuals.first_integral.unwrap() < 1e-8);
        assert!(curve.residuals.cross_check.unwrap() < 1e-6);
    }

    #[test]
    fn modica_length_grows_as_c_decreases() {
        let prof = VariationalProfile::linear(Potential::allen_cahn(1.0), (-0.9, 0.9)).unwrap();
        let cu = prof.c_sup().value;
        let lengths: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|e| modica_barrier(&prof, cu + e, 0.0).unwrap().length())
            .collect();
        assert!(lengths.windows(2).all(|w| w[1] > w[0]), "{lengths:?}");
    }

    #[test]
    fn inverse_of_kink() {
        let zmax = 2f64.sqrt() * 0.96f64.atanh();
        let grid = uniform(-zmax, zmax, 1025);
        let r2 = 2f64.sqrt();
        let phi: Vec<f64> = grid.iter().map(|z| (z / r2).tanh()).collect();
        let dphi: Vec<f64> = phi.iter().map(|v| (1.0 - v * v) / r2).collect();
        let d2phi: Vec<f64> = phi.iter().map(|v| -v * (1.0 - v * v)).collect();
        let curve = BarrierCurve::from_samples(BarrierKind::Flat, grid, phi, dphi, d2phi).unwrap();
        let inv = invert_barrier(&curve);
        let psi = inv.psi(0.5).unwrap();
        assert!((psi - 2f64.sqrt() * 0.5f64.atanh()).abs() < 1e-9, "{psi}");
        for i in 0..curve.grid.len() - 1 {
            let zm = 0.5 * (curve.grid[i] + curve.grid[i + 1]);
            let v = (zm / 2f64.sqrt()).tanh();
            let d = (1.0 - v * v) / 2f64.sqrt();
            assert!((inv.dpsi(v).unwrap() * d - 1.0).abs() < 1e-8);
        }
    }
}
