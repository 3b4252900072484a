//! Steady states of `div(Phi'(F^2(Du)) grad(F^2/2)(du)) + q(u) = 0` on flat
//! tori by pseudo-time relaxation followed by Newton--MINRES.
//!
//! The discrete operator is the gradient of a discrete energy, so the
//! Jacobian is symmetric. Euclidean tori average the density `Phi(F^2)/2`
//! over the four one-sided gradients at each node (the five-point Laplacian
//! in the linear case); other Minkowski norms place it on grid edges.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{MinkowskiNorm, ModelManifold, TorusNorm};
use crate::numeric::krylov;
use crate::profiles::VariationalProfile;

use super::field::{field_gradient_norms, partial, Grid, Provenance, ScalarField};
use super::spectral::ShiftedLaplacian;

/// Initial data for relaxation.
#[derive(Debug, Clone, PartialEq)]
pub enum Seed {
    /// `amplitude sin(2 pi k x / L)` along `axis`.
    Stripe {
        amplitude: f64,
        wavenumber: usize,
        axis: usize,
    },
    /// `amplitude sin(2 pi k (i + j) / N)` on a square grid.
    Diagonal {
        amplitude: f64,
        wavenumber: usize,
    },
    /// Product of sines along both axes.
    Checkerboard {
        amplitude: f64,
        wavenumber: usize,
    },
    /// Uniform noise in `[-amplitude, amplitude]`.
    Random {
        amplitude: f64,
        seed: u64,
    },
    Values(Vec<f64>),
}

/// `sin(2 pi m / n)` for `m = 0..n`, built from the first quarter so that
/// oddness and half-period antisymmetry hold exactly.
fn sine_table(n: usize) -> Vec<f64> {
    let base = |m: usize| (2.0 * std::f64::consts::PI * m as f64 / n as f64).sin();
    if !n.is_multiple_of(4) {
        return (0..n).map(base).collect();
    }
    let q = n / 4;
    (0..n)
        .map(|m| {
            let (half, r) = (m / (2 * q), m % (2 * q));
            let v = if r <= q { base(r) } else { base(2 * q - r) };
            if half == 0 {
                v
            } else {
                -v
            }
        })
        .collect()
}

fn is_power_of_two(n: usize) -> bool {
    n > 0 && n & (n - 1) == 0
}

fn torus_parts(model: &ModelManifold) -> Result<(&[f64], &TorusNorm)> {
    match model {
        ModelManifold::FlatTorus { periods, norm } if periods.len() <= 2 => Ok((periods, norm)),
        _ => Err(Error::Parameter(format!(
            "relaxation runs on flat tori of dimension 1 or 2, not {model:?}"
        ))),
    }
}

/// Seed values on a periodic grid over `model`.
pub fn seed_field(model: &ModelManifold, dims: &[usize], seed: &Seed) -> Result<ScalarField> {
    let (periods, _) = torus_parts(model)?;
    let grid = Grid::periodic(periods, dims)?;
    let nx = dims[0];
    let ny = dims.get(1).copied().unwrap_or(1);
    let n = grid.len();
    let values: Vec<f64> = match seed {
        Seed::Stripe {
            amplitude,
            wavenumber,
            axis,
        } => {
            let m = *dims
                .get(*axis)
                .ok_or_else(|| Error::Parameter(format!("stripe axis {axis}")))?;
            let table = sine_table(m);
            (0..n)
                .map(|p| {
                    let c = if *axis == 0 { p % nx } else { p / nx };
                    amplitude * table[(wavenumber * c) % m]
                })
                .collect()
        }
        Seed::Diagonal {
            amplitude,
            wavenumber,
        } => {
            if nx != ny {
                return Err(Error::Parameter("diagonal seeds need a square grid".into()));
            }
            let table = sine_table(nx);
            (0..n)
                .map(|p| amplitude * table[(wavenumber * (p % nx + p / nx)) % nx])
                .collect()
        }
        Seed::Checkerboard {
            amplitude,
            wavenumber,
        } => {
            let (tx, ty) = (sine_table(nx), sine_table(ny));
            (0..n)
                .map(|p| {
                    amplitude * tx[(wavenumber * (p % nx)) % nx] * ty[(wavenumber * (p / nx)) % ny]
                })
                .collect()
        }
        Seed::Random { amplitude, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..n)
                .map(|_| rng.gen_range(-amplitude..=*amplitude))
                .collect()
        }
        Seed::Values(v) => v.clone(),
    };
    let mut f = ScalarField::from_values(model.clone(), grid, values, f64::INFINITY, 0.0)?;
    f.residual_norm = f64::INFINITY;
    Ok(f)
}

#[derive(Debug, Clone)]
pub struct RelaxOptions {
    /// Pseudo-time steps before switching to Newton.
    pub pseudo_steps: usize,
    /// Switch early when the residual has not improved for this many steps.
    pub stall_window: usize,
    pub newton_iterations: usize,
    pub krylov_iterations: usize,
    pub krylov_rtol: f64,
    /// `Phi'(s) -> Phi'(s + eps)`.
    pub regularization: f64,
    pub dt_factor: f64,
    /// Pointwise forcing replacing `q(u)`.
    pub forcing: Option<Vec<f64>>,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            pseudo_steps: 400,
            stall_window: 500,
            newton_iterations: 60,
            krylov_iterations: 400,
            krylov_rtol: 1e-9,
            regularization: 1e-10,
            dt_factor: 0.2,
            forcing: None,
        }
    }
}

#[derive(Clone)]
enum FluxNorm {
    Euclidean,
    Lp(f64),
    General(MinkowskiNorm),
}

impl FluxNorm {
    fn from_torus(norm: &TorusNorm) -> Self {
        match norm {
            TorusNorm::Euclidean | TorusNorm::Minkowski(MinkowskiNorm::Euclidean) => {
                FluxNorm::Euclidean
            }
            TorusNorm::Minkowski(MinkowskiNorm::Lp { p }) => FluxNorm::Lp(*p),
            TorusNorm::Minkowski(h) => FluxNorm::General(h.clone()),
        }
    }

    /// `(F^2, grad(F^2/2))` at the covector `(gx, gy)`.
    #[inline]
    fn split(&self, gx: f64, gy: f64) -> (f64, f64, f64) {
        match self {
            FluxNorm::Euclidean => (gx * gx + gy * gy, gx, gy),
            FluxNorm::Lp(p) => {
                let m = gx.abs().max(gy.abs());
                if m == 0.0 {
                    return (0.0, 0.0, 0.0);
                }
                let (ax, ay) = (gx.abs() / m, gy.abs() / m);
                let n = m * (ax.powf(*p) + ay.powf(*p)).powf(1.0 / p);
                let (rx, ry) = (gx.abs() / n, gy.abs() / n);
                (n * n, rx.powf(p - 2.0) * gx, ry.powf(p - 2.0) * gy)
            }
            FluxNorm::General(h) => {
                let g = h.half_square_gradient(&[gx, gy]);
                (h.eval(&[gx, gy]).powi(2), g[0], g[1])
            }
        }
    }

    /// Largest eigenvalue of the Hessian of `F^2/2` over sampled directions.
    fn hessian_bound(&self) -> f64 {
        match self {
            FluxNorm::Euclidean => 1.0,
            FluxNorm::Lp(_) | FluxNorm::General(_) => {
                let h = match self {
                    FluxNorm::Lp(p) => MinkowskiNorm::Lp { p: *p },
                    FluxNorm::General(h) => h.clone(),
                    FluxNorm::Euclidean => MinkowskiNorm::Euclidean,
                };
                (0..256)
                    .map(|k| {
                        let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 256.0;
                        let m = h.half_square_hessian_2d([th.cos(), th.sin()]);
                        let (a, b, d) = (m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1]);
                        0.5 * (a + d) + (0.25 * (a - d).powi(2) + b * b).sqrt()
                    })
                    .fold(1e-12, f64::max)
            }
        }
    }
}

const SIGNS: [(isize, isize); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

struct Operator<'a> {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    norm: FluxNorm,
    profile: &'a VariationalProfile,
    eps: f64,
    forcing: Option<&'a [f64]>,
}

impl Operator<'_> {
    #[inline]
    fn wrap(i: usize, s: isize, n: usize) -> usize {
        ((i as isize + s).rem_euclid(n as isize)) as usize
    }

    #[inline]
    fn one_sided(&self, u: &[f64], p: usize, sx: isize, sy: isize) -> (f64, f64) {
        let (i, j) = (p % self.nx, p / self.nx);
        let px = Self::wrap(i, sx, self.nx) + self.nx * j;
        let py = i + self.nx * Self::wrap(j, sy, self.ny);
        (
            sx as f64 * (u[px] - u[p]) / self.hx,
            sy as f64 * (u[py] - u[p]) / self.hy,
        )
    }

    fn divergence(&self, u: &[f64]) -> Vec<f64> {
        match self.norm {
            FluxNorm::Euclidean => self.divergence_one_sided(u),
            _ => self.divergence_edges(u),
        }
    }

    #[inline]
    fn flux(&self, gx: f64, gy: f64) -> (f64, f64) {
        let (s, vx, vy) = self.norm.split(gx, gy);
        let d = self.profile.dphi(s + self.eps);
        (d * vx, d * vy)
    }

    #[inline]
    fn at(&self, u: &[f64], i: usize, j: usize, di: isize, dj: isize) -> f64 {
        u[Self::wrap(i, di, self.nx) + self.nx * Self::wrap(j, dj, self.ny)]
    }

    /// Edge energies: on each edge the normal difference is paired with
    /// the tangential central difference averaged over the edge's two
    /// nodes, which stays consistent for non-quadratic norms.
    fn divergence_edges(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let (hx, hy) = (self.hx, self.hy);
        // x-edges indexed by their left node, y-edges by their lower node
        let edges: Vec<[(f64, f64); 2]> = (0..n)
            .into_par_iter()
            .map(|p| {
                let (i, j) = (p % self.nx, p / self.nx);
                let a = |di, dj| self.at(u, i, j, di, dj);
                let ex = self.flux(
                    (a(1, 0) - a(0, 0)) / hx,
                    (a(0, 1) - a(0, -1) + a(1, 1) - a(1, -1)) / (4.0 * hy),
                );
                let ey = self.flux(
                    (a(1, 0) - a(-1, 0) + a(1, 1) - a(-1, 1)) / (4.0 * hx),
                    (a(0, 1) - a(0, 0)) / hy,
                );
                [ex, ey]
            })
            .collect();
        (0..n)
            .into_par_iter()
            .map(|p| {
                let (i, j) = (p % self.nx, p / self.nx);
                let e = |di: isize, dj: isize, k: usize| {
                    edges[Self::wrap(i, di, self.nx) + self.nx * Self::wrap(j, dj, self.ny)][k]
                };
                let normal =
                    (e(0, 0, 0).0 - e(-1, 0, 0).0) / hx + (e(0, 0, 1).1 - e(0, -1, 1).1) / hy;
                let tangential = (e(0, 1, 0).1 - e(0, -1, 0).1 + e(-1, 1, 0).1 - e(-1, -1, 0).1)
                    / (4.0 * hy)
                    + (e(1, 0, 1).0 - e(-1, 0, 1).0 + e(1, -1, 1).0 - e(-1, -1, 1).0) / (4.0 * hx);
                0.5 * (normal + tangential)
            })
            .collect()
    }

    /// Four one-sided gradients per node; the five-point Laplacian in the
    /// linear isotropic case.
    fn divergence_one_sided(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let fluxes: Vec<[(f64, f64); 4]> = (0..n)
            .into_par_iter()
            .map(|p| {
                let mut out = [(0.0, 0.0); 4];
                for (k, &(sx, sy)) in SIGNS.iter().enumerate() {
                    let (gx, gy) = self.one_sided(u, p, sx, sy);
                    let (s, vx, vy) = self.norm.split(gx, gy);
                    let d = self.profile.dphi(s + self.eps);
                    out[k] = (d * vx, d * vy);
                }
                out
            })
            .collect();
        (0..n)
            .into_par_iter()
            .map(|p| {
                let (i, j) = (p % self.nx, p / self.nx);
                let mut acc = 0.0;
                for (k, &(sx, sy)) in SIGNS.iter().enumerate() {
                    let pxm = Self::wrap(i, -sx, self.nx) + self.nx * j;
                    let pym = i + self.nx * Self::wrap(j, -sy, self.ny);
                    acc += (fluxes[p][k].0 - fluxes[pxm][k].0) * sx as f64 / self.hx
                        + (fluxes[p][k].1 - fluxes[pym][k].1) * sy as f64 / self.hy;
                }
                0.25 * acc
            })
            .collect()
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let mut r = self.divergence(u);
        r.par_iter_mut().enumerate().for_each(|(p, v)| {
            *v += match self.forcing {
                Some(f) => f[p],
                None => self.profile.q(u[p]),
            };
        });
        r
    }

    /// `(min Lambda, max max(Lambda, Phi'), mean Phi')` over one-sided
    /// gradients.
    fn coefficient_range(&self, u: &[f64]) -> (f64, f64, f64) {
        let n = u.len();
        let (lo, hi, sum) = (0..n)
            .into_par_iter()
            .map(|p| {
                let mut acc = (f64::INFINITY, 0.0f64, 0.0);
                for &(sx, sy) in &SIGNS {
                    let (gx, gy) = self.one_sided(u, p, sx, sy);
                    let (s, _, _) = self.norm.split(gx, gy);
                    let s = s + self.eps;
                    let (lam, d) = (self.profile.lambda(s), self.profile.dphi(s));
                    acc.0 = acc.0.min(lam);
                    acc.1 = acc.1.max(lam.max(d));
                    acc.2 += 0.25 * d;
                }
                acc
            })
            .collect::<Vec<_>>()
            .into_iter()
            // sequential so that the sum does not depend on scheduling
            .fold((f64::INFINITY, 0.0f64, 0.0), |a, b| {
                (a.0.min(b.0), a.1.max(b.1), a.2 + b.2)
            });
        (lo, hi, sum / n as f64)
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(
        0.0f64,
        |a, x| {
            if x.is_nan() {
                f64::NAN
            } else {
                a.max(x.abs())
            }
        },
    )
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn build_operator<'a>(
    model: &ModelManifold,
    profile: &'a VariationalProfile,
    grid: &Grid,
    eps: f64,
    forcing: Option<&'a [f64]>,
) -> Result<Operator<'a>> {
    let (periods, norm) = torus_parts(model)?;
    if !grid.periodic || grid.dims.len() != periods.len() {
        return Err(Error::Parameter(
            "relaxation needs a periodic grid on the torus".into(),
        ));
    }
    if let Some(f) = forcing {
        if f.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "forcing table has {} entries for {} nodes",
                f.len(),
                grid.len()
            )));
        }
    }
    let two_d = grid.dims.len() == 2;
    Ok(Operator {
        nx: grid.dims[0],
        ny: if two_d { grid.dims[1] } else { 1 },
        hx: grid.spacing(0),
        hy: if two_d { grid.spacing(1) } else { 1.0 },
        norm: FluxNorm::from_torus(norm),
        profile,
        eps,
        forcing,
    })
}

/// Discrete `div(flux(u))` of the relaxation scheme.
pub fn discrete_divergence(
    model: &ModelManifold,
    profile: &VariationalProfile,
    grid: &Grid,
    values: &[f64],
    regularization: f64,
) -> Result<Vec<f64>> {
    if values.len() != grid.len() {
        return Err(Error::Parameter("values do not match the grid".into()));
    }
    Ok(build_operator(model, profile, grid, regularization, None)?.divergence(values))
}

/// Continuous residual of the samples with fourth-order differences.
pub fn consistency_residual(
    field: &ScalarField,
    profile: &VariationalProfile,
    forcing: Option<&[f64]>,
    regularization: f64,
) -> Result<f64> {
    let (_, norm) = torus_parts(&field.model)?;
    let norm = FluxNorm::from_torus(norm);
    let grid = &field.grid;
    let gx = partial(grid, &field.values, 0);
    let gy = if grid.dims.len() == 2 {
        partial(grid, &field.values, 1)
    } else {
        vec![0.0; field.len()]
    };
    let mut fx = vec![0.0; field.len()];
    let mut fy = vec![0.0; field.len()];
    for p in 0..field.len() {
        let (s, vx, vy) = norm.split(gx[p], gy[p]);
        let d = profile.dphi(s + regularization);
        fx[p] = d * vx;
        fy[p] = d * vy;
    }
    let mut div = partial(grid, &fx, 0);
    if grid.dims.len() == 2 {
        for (a, b) in div.iter_mut().zip(partial(grid, &fy, 1)) {
            *a += b;
        }
    }
    let r: Vec<f64> = (0..field.len())
        .map(|p| div[p] + forcing.map_or_else(|| profile.q(field.values[p]), |f| f[p]))
        .collect();
    Ok(sup(&r))
}

pub fn relax_to_steady(
    model: &ModelManifold,
    profile: &VariationalProfile,
    seed: &ScalarField,
    tol: f64,
) -> Result<ScalarField> {
    relax_to_steady_with(model, profile, seed, tol, &RelaxOptions::default())
}

/// Relax `seed` to a steady state with sup-residual at most `tol`.
///
/// Explicit steps `dt = dt_factor h^2 / max(Lambda, Phi')` (times the largest
/// Hessian eigenvalue of `F^2/2` on Minkowski tori) run until the residual
/// stalls or the step budget is spent; Newton with a finite-difference
/// Jacobian, FFT-preconditioned MINRES and backtracking finishes.
pub fn relax_to_steady_with(
    model: &ModelManifold,
    profile: &VariationalProfile,
    seed: &ScalarField,
    tol: f64,
    opts: &RelaxOptions,
) -> Result<ScalarField> {
    let grid = seed.grid.clone();
    if !grid.dims.iter().all(|n| is_power_of_two(*n)) {
        return Err(Error::Parameter(format!(
            "resolution {:?} is not a power of two per axis",
            grid.dims
        )));
    }
    let forcing = opts.forcing.as_deref();
    let op = build_operator(model, profile, &grid, opts.regularization, forcing)?;
    let kappa_h = op.norm.hessian_bound();
    let h_min = grid.min_spacing();
    let mut u = seed.values.clone();
    let mut history = Vec::new();

    let stepsize = |u: &[f64]| -> Result<f64> {
        let (lam_min, top, _) = op.coefficient_range(u);
        if !(lam_min > 0.0) {
            return Err(Error::Ellipticity(format!(
                "Lambda = {lam_min:e} on the current gradients"
            )));
        }
        Ok(opts.dt_factor * h_min * h_min / (top * kappa_h))
    };

    let mut r = op.residual(&u);
    let mut rn = sup(&r);
    let mut best = rn;
    let mut best_step = 0;
    let mut dt = stepsize(&u)?;
    for step in 0..opts.pseudo_steps {
        if !(rn > tol) || step - best_step >= opts.stall_window {
            break;
        }
        if !rn.is_finite() {
            return Err(Error::Convergence {
                iterations: step,
                last_residual: rn,
                history,
            });
        }
        if step % 20 == 0 {
            dt = stepsize(&u)?;
        }
        u.par_iter_mut().zip(&r).for_each(|(v, rv)| *v += dt * rv);
        r = op.residual(&u);
        rn = sup(&r);
        history.push(rn);
        if rn < best * (1.0 - 1e-3) {
            best = rn;
            best_step = step;
        }
    }

    let mut newton_steps = 0;
    while rn > tol && newton_steps < opts.newton_iterations {
        newton_steps += 1;
        let (lam_min, _, mean_dphi) = op.coefficient_range(&u);
        if !(lam_min > 0.0) {
            return Err(Error::Ellipticity(format!(
                "Lambda = {lam_min:e} on the current gradients"
            )));
        }
        let curvature = u
            .iter()
            .map(|v| profile.potential.second_derivative(*v).abs())
            .fold(0.0, f64::max);
        let lmax = model_length(model);
        let floor = 1e-2 * mean_dphi.max(1e-12) * (2.0 * std::f64::consts::PI / lmax).powi(2);
        let pre = ShiftedLaplacian::new(
            op.nx,
            op.ny,
            op.hx,
            op.hy,
            mean_dphi.max(1e-12) * kappa_h,
            curvature.max(floor),
        );
        let unorm = sup(&u).max(1.0);
        // A = -J, so that A d = r gives the Newton step J d = -r
        let apply = |v: &[f64]| -> Vec<f64> {
            let vn = sup(v);
            if vn == 0.0 {
                return vec![0.0; v.len()];
            }
            let e = 1e-7 * unorm / vn;
            let up: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + e * b).collect();
            let um: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - e * b).collect();
            let (rp, rm) = (op.residual(&up), op.residual(&um));
            rp.iter()
                .zip(&rm)
                .map(|(a, b)| -(a - b) / (2.0 * e))
                .collect()
        };
        let (d, _) = krylov::minres_preconditioned(
            apply,
            |v: &[f64]| pre.apply(v),
            &r,
            opts.krylov_rtol,
            opts.krylov_iterations,
        );
        let f0 = l2(&r);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..16 {
            let trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + lambda * b).collect();
            let rt = op.residual(&trial);
            let ft = l2(&rt);
            if ft.is_finite() && ft < (1.0 - 1e-4 * lambda) * f0 {
                u = trial;
                r = rt;
                rn = sup(&r);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        history.push(rn);
        if !accepted {
            break;
        }
    }
    if !(rn <= tol) {
        return Err(Error::Convergence {
            iterations: history.len(),
            last_residual: rn,
            history,
        });
    }

    let unregularized = if opts.regularization == 0.0 {
        rn
    } else {
        let raw = Operator { eps: 0.0, ..op };
        sup(&raw.residual(&u))
    };
    let mut field = ScalarField::from_values(model.clone(), grid, u, rn, tol)?;
    field.provenance = Provenance::Relaxed;
    field.unregularized_residual = Some(unregularized);
    field.consistency_residual = Some(consistency_residual(
        &field,
        profile,
        forcing,
        opts.regularization,
    )?);
    field.history = history;
    Ok(field_gradient_norms(field))
}

fn model_length(model: &ModelManifold) -> f64 {
    match model {
        ModelManifold::FlatTorus { periods, .. } => periods.iter().fold(0.0, |a, b| a.max(*b)),
        _ => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Potential;

    fn torus(l: f64) -> ModelManifold {
        ModelManifold::FlatTorus {
            periods: vec![l, l],
            norm: TorusNorm::Euclidean,
        }
    }

    proptest::proptest! {
        #[test]
        fn sine_table_symmetries_are_exact(k in 2u32..12, m in 0usize..4096) {
            let n = 1usize << k;
            let t = sine_table(n);
            let m = m % n;
            proptest::prop_assert_eq!(t[(n - m) % n], -t[m]);
            proptest::prop_assert_eq!(t[(m + n / 2) % n], -t[m]);
            proptest::prop_assert_eq!(t[n / 4], 1.0);
        }
    }

    #[test]
    fn harmonic_relaxation_reaches_a_constant() {
        let model = torus(1.0);
        let prof = VariationalProfile::linear(Potential::constant(0.0), (-1.0, 1.0)).unwrap();
        let seed = seed_field(
            &model,
            &[16, 16],
            &Seed::Random {
                amplitude: 0.5,
                seed: 42,
            },
        )
        .unwrap();
        let f = relax_to_steady(&model, &prof, &seed, 1e-10).unwrap();
        assert!(f.residual_norm <= 1e-10);
        let (lo, hi) = f.range();
        assert!(hi - lo < 1e-9, "{lo} {hi}");
    }

    #[test]
    fn allen_cahn_stripe_steady_state() {
        let model = torus(7.0);
        let prof = VariationalProfile::linear(Potential::allen_cahn(1.0), (-1.0, 1.0)).unwrap();
        let seed = seed_field(
            &model,
            &[32, 32],
            &Seed::Stripe {
                amplitude: 0.5,
                wavenumber: 1,
                axis: 0,
            },
        )
        .unwrap();
        let f = relax_to_steady(&model, &prof, &seed, 1e-9).unwrap();
        let (lo, hi) = f.range();
        assert!(hi > 0.3 && lo < -0.3, "{lo} {hi}");
    }

    #[test]
    fn divergence_of_linear_flux_is_the_five_point_laplacian() {
        let model = torus(1.0);
        let prof = VariationalProfile::linear(Potential::constant(0.0), (-1.0, 1.0)).unwrap();
        let grid = Grid::periodic(&[1.0, 1.0], &[8, 8]).unwrap();
        let u: Vec<f64> = (0..64).map(|p| ((p * 13) % 7) as f64).collect();
        let div = discrete_divergence(&model, &prof, &grid, &u, 0.0).unwrap();
        let h = 1.0 / 8.0;
        for p in 0..64 {
            let (i, j) = (p % 8, p / 8);
            let at = |i: usize, j: usize| u[i % 8 + 8 * (j % 8)];
            let lap = (at(i + 1, j) + at(i + 7, j) + at(i, j + 1) + at(i, j + 7) - 4.0 * at(i, j))
                / (h * h);
            assert!((div[p] - lap).abs() < 1e-10);
        }
    }

    #[test]
    fn non_power_of_two_is_rejected() {
        let model = torus(1.0);
        let prof = VariationalProfile::linear(Potential::constant(0.0), (-1.0, 1.0)).unwrap();
        let seed = seed_field(
            &model,
            &[12, 16],
            &Seed::Random {
                amplitude: 0.1,
                seed: 1,
            },
        )
        .unwrap();
        assert!(matches!(
            relax_to_steady(&model, &prof, &seed, 1e-9),
            Err(Error::Parameter(_))
        ));
    }
}
