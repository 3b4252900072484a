//! MINRES for symmetric (possibly indefinite) operators.

#[derive(Debug, Clone, Copy)]
pub struct MinresOutcome {
    pub iterations: usize,
    /// Estimated residual, measured in the inverse-preconditioner norm.
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve `A x = b` from `x = 0`, stopping at `||r|| <= rtol ||b||` or after
/// `max_iter` Lanczos steps.
pub fn minres<A>(apply: A, b: &[f64], rtol: f64, max_iter: usize) -> (Vec<f64>, MinresOutcome)
where
    A: FnMut(&[f64]) -> Vec<f64>,
{
    minres_preconditioned(apply, |r: &[f64]| r.to_vec(), b, rtol, max_iter)
}

/// MINRES with a symmetric positive definite preconditioner `precond ~ A^-1`.
pub fn minres_preconditioned<A, M>(
    mut apply: A,
    mut precond: M,
    b: &[f64],
    rtol: f64,
    max_iter: usize,
) -> (Vec<f64>, MinresOutcome)
where
    A: FnMut(&[f64]) -> Vec<f64>,
    M: FnMut(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r1 = b.to_vec();
    let mut y = precond(&r1);
    let beta1_sq = dot(&r1, &y);
    if !(beta1_sq > 0.0) {
        let zero = beta1_sq == 0.0;
        return (
            x,
            MinresOutcome {
                iterations: 0,
                residual: if zero { 0.0 } else { f64::NAN },
                converged: zero,
            },
        );
    }
    let beta1 = beta1_sq.sqrt();
    let mut r2 = r1.clone();
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln) = (0.0, 0.0);
    let mut phibar = beta1;
    let (mut cs, mut sn) = (-1.0, 0.0);
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let s = 1.0 / beta;
        let v: Vec<f64> = y.iter().map(|t| s * t).collect();
        y = apply(&v);
        if it >= 2 {
            let f = beta / oldb;
            for i in 0..n {
                y[i] -= f * r1[i];
            }
        }
        let alfa = dot(&v, &y);
        let f = alfa / beta;
        for i in 0..n {
            y[i] -= f * r2[i];
        }
        r1 = std::mem::replace(&mut r2, y);
        y = precond(&r2);
        oldb = beta;
        let bsq = dot(&r2, &y);
        if bsq < 0.0 {
            // preconditioner is not positive definite
            break;
        }
        beta = bsq.sqrt();
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;
        let w1 = std::mem::replace(&mut w2, std::mem::take(&mut w));
        w = (0..n)
            .map(|i| (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma)
            .collect();
        for i in 0..n {
            x[i] += phi * w[i];
        }
        if phibar <= rtol * beta1 || beta == 0.0 {
            return (
                x,
                MinresOutcome {
                    iterations: it,
                    residual: phibar,
                    converged: true,
                },
            );
        }
    }
    (
        x,
        MinresOutcome {
            iterations: it,
            residual: phibar,
            converged: phibar <= rtol * beta1,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiagonal(n: usize) -> impl Fn(&[f64]) -> Vec<f64> + Copy {
        // diag alternates sign, off-diagonals 1: symmetric indefinite
        move |v: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let d = if i % 2 == 0 { 3.0 } else { -2.5 };
                    let mut s = d * v[i];
                    if i > 0 {
                        s += v[i - 1];
                    }
                    if i + 1 < n {
                        s += v[i + 1];
                    }
                    s
                })
                .collect()
        }
    }

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn solves_indefinite_tridiagonal_system() {
        let n = 50;
        let apply = tridiagonal(n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let (x, out) = minres(apply, &b, 1e-12, 500);
        assert!(out.converged);
        let err = max_err(&apply(&x), &b);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn diagonal_preconditioner_gives_same_solution() {
        let n = 60;
        let apply = tridiagonal(n);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.11).cos()).collect();
        let precond = |r: &[f64]| -> Vec<f64> {
            r.iter()
                .enumerate()
                .map(|(i, v)| v / if i % 2 == 0 { 3.0 } else { 2.5 })
                .collect()
        };
        let (x, out) = minres_preconditioned(apply, precond, &b, 1e-13, 500);
        assert!(out.converged);
        assert!(max_err(&apply(&x), &b) < 1e-10);
    }
}
