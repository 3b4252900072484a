//! Finite-difference helpers.

/// Central first difference with step `eps^(1/3) * max(1, |x|)`.
pub fn central_first<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = f64::EPSILON.cbrt() * x.abs().max(1.0);
    let (xp, xm) = (x + h, x - h);
    (f(xp) - f(xm)) / (xp - xm)
}

/// Central second difference with step `eps^(1/4) * max(1, |x|)`.
pub fn central_second<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = f64::EPSILON.powf(0.25) * x.abs().max(1.0);
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Fourth-order derivative of uniformly spaced samples.
///
/// Periodic data wraps; otherwise the two outermost samples on each side
/// use fourth-order one-sided stencils.
pub fn derivative_4th(values: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 5 {
        for i in 0..n {
            out[i] = match (i, n) {
                (_, 0 | 1) => 0.0,
                (0, _) => (values[1] - values[0]) / h,
                (i, n) if i == n - 1 => (values[n - 1] - values[n - 2]) / h,
                (i, _) => (values[i + 1] - values[i - 1]) / (2.0 * h),
            };
        }
        return out;
    }
    let at = |i: isize| -> f64 {
        let m = n as isize;
        values[(((i % m) + m) % m) as usize]
    };
    for i in 0..n {
        let ii = i as isize;
        let interior = i >= 2 && i + 2 < n;
        out[i] = if interior || periodic {
            (at(ii - 2) - 8.0 * at(ii - 1) + 8.0 * at(ii + 1) - at(ii + 2)) / (12.0 * h)
        } else if i < 2 {
            let f = &values[i..i + 5];
            if i == 0 {
                (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
            } else {
                let f = &values[0..5];
                (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h)
            }
        } else {
            let f = &values[n - 5..n];
            if i == n - 1 {
                (25.0 * f[4] - 48.0 * f[3] + 36.0 * f[2] - 16.0 * f[1] + 3.0 * f[0]) / (12.0 * h)
            } else {
                (3.0 * f[4] + 10.0 * f[3] - 18.0 * f[2] + 6.0 * f[1] - f[0]) / (12.0 * h)
            }
        };
    }
    out
}

/// Fourth-order central derivative in the interior with second-order
/// one-sided stencils at the two ends (periodic data wraps).
pub fn gradient_samples(values: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let n = values.len();
    if periodic || n < 5 {
        return derivative_4th(values, h, periodic);
    }
    let mut out = derivative_4th(values, h, false);
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    out[1] = (values[2] - values[0]) / (2.0 * h);
    out[n - 2] = (values[n - 1] - values[n - 3]) / (2.0 * h);
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    out
}
