//! Dormand-Prince 5(4) integrator with Hairer's continuous extension.
//!
//! Steps are accepted under a mixed absolute/relative error norm; every
//! accepted step keeps its dense-output coefficients so callers can locate
//! events and resample the solution after the fact.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The requested end point was reached.
    Reached,
    /// The caller's stop predicate fired after an accepted step.
    Stopped,
}

/// One accepted step with its continuous-extension coefficients.
#[derive(Debug, Clone)]
pub struct Step<const N: usize> {
    pub t: f64,
    pub h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Step<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t) / self.h;
        let theta1 = 1.0 - theta;
        let mut out = [0.0; N];
        for i in 0..N {
            let r = &self.rcont;
            out[i] = r[0][i]
                + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        out
    }

    fn end(&self) -> f64 {
        self.t + self.h
    }

    fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h > 0.0 {
            (self.t, self.end())
        } else {
            (self.end(), self.t)
        };
        t >= lo && t <= hi
    }
}

/// Accepted steps of one integration, evaluable anywhere on the covered span.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub t0: f64,
    pub y0: [f64; N],
    pub t_end: f64,
    pub y_end: [f64; N],
    pub steps: Vec<Step<N>>,
    pub termination: Termination,
}

impl<const N: usize> Trajectory<N> {
    /// Dense-output evaluation; `t` must lie in the covered span.
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        if t == self.t0 {
            return Some(self.y0);
        }
        if t == self.t_end {
            return Some(self.y_end);
        }
        let idx = self
            .steps
            .partition_point(|s| if s.h > 0.0 { s.end() < t } else { s.end() > t });
        let step = self.steps.get(idx)?;
        step.contains(t).then(|| step.eval(t))
    }

    /// First `t` (in integration order) where component `k` crosses `level`.
    pub fn first_crossing(&self, k: usize, level: f64) -> Option<f64> {
        let mut prev_t = self.t0;
        let mut prev = self.y0[k] - level;
        if prev == 0.0 {
            return Some(self.t0);
        }
        for step in &self.steps {
            let t1 = step.end();
            let cur = step.eval(t1)[k] - level;
            if cur == 0.0 {
                return Some(t1);
            }
            if prev.signum() != cur.signum() {
                let g = |t: f64| step.eval(t)[k] - level;
                return crate::numeric::roots::bisect(g, prev_t, t1, 1e-15).ok();
            }
            prev_t = t1;
            prev = cur;
        }
        None
    }
}

/// Adaptive Dormand-Prince 5(4) settings.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_max: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 200_000,
            h_max: f64::INFINITY,
        }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

fn all_finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

impl Dopri5 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Integrate `y' = f(t, y)` from `t0` to `t_end` (either direction).
    ///
    /// `stop` is evaluated after each accepted step; returning `true` ends the
    /// integration with [`Termination::Stopped`].
    pub fn integrate<const N: usize, F, S>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        mut stop: S,
    ) -> Result<Trajectory<N>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        S: FnMut(f64, &[f64; N]) -> bool,
    {
        if !all_finite(&y0) || !t0.is_finite() || !t_end.is_finite() {
            return Err(Error::Domain("non-finite initial data".into()));
        }
        let mut traj = Trajectory {
            t0,
            y0,
            t_end: t0,
            y_end: y0,
            steps: Vec::new(),
            termination: Termination::Reached,
        };
        if t_end == t0 {
            return Ok(traj);
        }
        let dir = (t_end - t0).signum();
        let span = (t_end - t0).abs();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        if !all_finite(&k1) {
            return Err(Error::Domain(format!("non-finite derivative at t = {t}")));
        }
        let mut h = self.initial_step(&mut f, t, &y, &k1, dir).min(span);
        h = h.min(self.h_max);
        let mut rejected_last = false;

        for _ in 0..self.max_steps {
            let remaining = (t_end - t).abs();
            if remaining <= 1e-14 * span.max(1.0) {
                break;
            }
            let mut last = false;
            if h >= remaining {
                h = remaining;
                last = true;
            }
            let hs = dir * h;
            let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
            let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * hs,
                &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * hs,
                &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let y6 = axpy(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            let k6 = f(t + hs, &y6);
            let y1 = axpy(
                &y,
                hs,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(t + hs, &y1);

            let finite =
                [&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| all_finite(k)) && all_finite(&y1);
            let err = if finite {
                let mut acc = 0.0;
                for i in 0..N {
                    let e = hs
                        * (E1 * k1[i]
                            + E3 * k3[i]
                            + E4 * k4[i]
                            + E5 * k5[i]
                            + E6 * k6[i]
                            + E7 * k7[i]);
                    let sc = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
                    acc += (e / sc).powi(2);
                }
                (acc / N as f64).sqrt()
            } else {
                f64::INFINITY
            };

            if err <= 1.0 {
                let mut rcont = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y1[i] - y[i];
                    let bspl = hs * k1[i] - ydiff;
                    rcont[0][i] = y[i];
                    rcont[1][i] = ydiff;
                    rcont[2][i] = bspl;
                    rcont[3][i] = ydiff - hs * k7[i] - bspl;
                    rcont[4][i] = hs
                        * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]);
                }
                traj.steps.push(Step { t, h: hs, rcont });
                t = if last { t_end } else { t + hs };
                y = y1;
                k1 = k7;
                traj.t_end = t;
                traj.y_end = y;
                if stop(t, &y) {
                    traj.termination = Termination::Stopped;
                    return Ok(traj);
                }
                if last {
                    return Ok(traj);
                }
                let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
                fac = fac.clamp(0.2, 10.0);
                if rejected_last {
                    fac = fac.min(1.0);
                }
                h = (h * fac).min(self.h_max);
                rejected_last = false;
            } else {
                let fac = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.25
                };
                h *= fac;
                rejected_last = true;
                if h < 1e-14 * t.abs().max(1.0) {
                    return Err(Error::Construction(format!(
                        "step size underflow at t = {t} (solution leaves its domain)"
                    )));
                }
            }
        }
        if (t_end - t).abs() <= 1e-14 * span.max(1.0) {
            traj.t_end = t_end;
            return Ok(traj);
        }
        Err(Error::Construction(format!(
            "integrator exceeded {} steps at t = {t}",
            self.max_steps
        )))
    }

    /// Integrate from `(t0, y0)` and report the state exactly at each of
    /// `points`, which must be monotone in one direction away from `t0`.
    pub fn sample<const N: usize, F>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        points: &[f64],
    ) -> Result<Vec<[f64; N]>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let mut out = Vec::with_capacity(points.len());
        let mut t = t0;
        let mut y = y0;
        for &p in points {
            if p != t {
                let traj = self.integrate(&mut f, t, y, p, |_, _| false)?;
                t = p;
                y = traj.y_end;
            }
            out.push(y);
        }
        Ok(out)
    }

    fn initial_step<const N: usize, F>(
        &self,
        f: &mut F,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        dir: f64,
    ) -> f64
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for i in 0..N {
            let sk = self.atol + self.rtol * y[i].abs();
            dnf += (k1[i] / sk).powi(2);
            dny += (y[i] / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(self.h_max);
        let y1 = axpy(y, dir * h, &[(1.0, k1)]);
        let k2 = f(t + dir * h, &y1);
        if !all_finite(&k2) {
            return h * 1e-3;
        }
        let mut der2 = 0.0;
        for i in 0..N {
            let sk = self.atol + self.rtol * y[i].abs();
            der2 += ((k2[i] - k1[i]) / sk).powi(2);
        }
        let der2 = der2.sqrt() / h;
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(0.2)
        };
        (100.0 * h).min(h1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_matches_closed_form() {
        let ode = Dopri5::default();
        let traj = ode
            .integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0, |_, _| false)
            .unwrap();
        assert!((traj.y_end[0] - 2f64.exp()).abs() < 1e-9);
        // dense output between steps
        let mid = traj.eval(1.234).unwrap();
        assert!((mid[0] - 1.234f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn backward_integration_of_harmonic_oscillator() {
        let ode = Dopri5::default();
        let traj = ode
            .integrate(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                0.0,
                [0.0, 1.0],
                -3.0,
                |_, _| false,
            )
            .unwrap();
        assert!((traj.y_end[0] - (-3f64).sin()).abs() < 1e-9);
        assert!((traj.y_end[1] - (-3f64).cos()).abs() < 1e-9);
        let z = traj.first_crossing(0, -0.5).unwrap();
        assert!((z - (-0.5f64).asin()).abs() < 1e-9);
    }

    #[test]
    fn sampling_lands_on_requested_points() {
        let ode = Dopri5::default();
        let pts: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let ys = ode
            .sample(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], &pts)
            .unwrap();
        for (p, y) in pts.iter().zip(&ys) {
            assert!((y[0] - p.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn stop_predicate_ends_early() {
        let ode = Dopri5 {
            h_max: 0.5,
            ..Dopri5::default()
        };
        let traj = ode
            .integrate(|_, _: &[f64; 1]| [1.0], 0.0, [0.0], 10.0, |_, y| y[0] > 2.0)
            .unwrap();
        assert_eq!(traj.termination, Termination::Stopped);
        assert!(traj.t_end < 10.0);
    }
}
