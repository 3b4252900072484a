//! Piecewise Hermite interpolation of strictly increasing data.
//!
//! Quintic pieces are used when second derivatives are available; any piece
//! whose derivative is not positive at the probe points is replaced by a
//! Fritsch-Carlson limited cubic so the interpolant stays strictly increasing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
enum Piece {
    Quintic,
    Cubic { d0: f64, d1: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotoneHermite {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
    s: Vec<f64>,
    pieces: Vec<Piece>,
}

const PROBES: [f64; 7] = [0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875];

impl MonotoneHermite {
    /// Build from nodes, values, positive slopes and (optional) curvatures.
    pub fn new(x: Vec<f64>, y: Vec<f64>, d: Vec<f64>, s: Option<Vec<f64>>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || d.len() != n {
            return Err(Error::Domain(
                "interpolant needs >= 2 matching samples".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || y.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(
                "interpolation data must be strictly increasing".into(),
            ));
        }
        let (s, quintic) = match s {
            Some(s) if s.len() == n && s.iter().all(|v| v.is_finite()) => (s, true),
            _ => (vec![0.0; n], false),
        };
        let mut me = Self {
            x,
            y,
            d,
            s,
            pieces: Vec::with_capacity(n - 1),
        };
        for i in 0..n - 1 {
            let mut piece = Piece::Quintic;
            if !quintic || !me.piece_is_increasing(i, piece) {
                piece = me.limited_cubic(i);
            }
            me.pieces.push(piece);
        }
        Ok(me)
    }

    fn limited_cubic(&self, i: usize) -> Piece {
        let h = self.x[i + 1] - self.x[i];
        let secant = (self.y[i + 1] - self.y[i]) / h;
        let mut d0 = self.d[i].max(0.0);
        let mut d1 = self.d[i + 1].max(0.0);
        let a = d0 / secant;
        let b = d1 / secant;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            d0 = tau * a * secant;
            d1 = tau * b * secant;
        }
        Piece::Cubic { d0, d1 }
    }

    fn piece_is_increasing(&self, i: usize, piece: Piece) -> bool {
        PROBES
            .iter()
            .all(|&t| self.piece_derivative(i, piece, t) > 0.0)
    }

    fn piece_value(&self, i: usize, t: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        match self.pieces[i] {
            Piece::Quintic => {
                let (t2, t3) = (t * t, t * t * t);
                let (t4, t5) = (t3 * t, t3 * t2);
                let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
                let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
                let h2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
                let h3 = 0.5 * t3 - t4 + 0.5 * t5;
                let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
                let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
                y0 * h0
                    + h * self.d[i] * h1
                    + h * h * self.s[i] * h2
                    + h * h * self.s[i + 1] * h3
                    + h * self.d[i + 1] * h4
                    + y1 * h5
            }
            Piece::Cubic { d0, d1 } => {
                let (t2, t3) = (t * t, t * t * t);
                y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
                    + h * d0 * (t3 - 2.0 * t2 + t)
                    + y1 * (-2.0 * t3 + 3.0 * t2)
                    + h * d1 * (t3 - t2)
            }
        }
    }

    fn piece_derivative(&self, i: usize, piece: Piece, t: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        match piece {
            Piece::Quintic => {
                let (t2, t3, t4) = (t * t, t * t * t, t * t * t * t);
                let g0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
                let g1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
                let g2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
                let g3 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
                let g4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
                let g5 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
                (y0 * g0
                    + h * self.d[i] * g1
                    + h * h * self.s[i] * g2
                    + h * h * self.s[i + 1] * g3
                    + h * self.d[i + 1] * g4
                    + y1 * g5)
                    / h
            }
            Piece::Cubic { d0, d1 } => {
                let t2 = t * t;
                (y0 * (6.0 * t2 - 6.0 * t)
                    + h * d0 * (3.0 * t2 - 4.0 * t + 1.0)
                    + y1 * (-6.0 * t2 + 6.0 * t)
                    + h * d1 * (3.0 * t2 - 2.0 * t))
                    / h
            }
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().expect("nonempty"))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn node_values(&self) -> &[f64] {
        &self.y
    }

    /// Number of pieces that fell back to the limited cubic.
    pub fn cubic_fallbacks(&self) -> usize {
        self.pieces
            .iter()
            .filter(|p| matches!(p, Piece::Cubic { .. }))
            .count()
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let n = self.x.len();
        let i = match self.x.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => (i - 1).min(n - 2),
        };
        let t = (x - self.x[i]) / (self.x[i + 1] - self.x[i]);
        Some((i, t))
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        let (i, t) = self.locate(x)?;
        if t == 0.0 {
            return Some(self.y[i]);
        }
        if t == 1.0 {
            return Some(self.y[i + 1]);
        }
        Some(self.piece_value(i, t))
    }

    pub fn derivative(&self, x: f64) -> Option<f64> {
        let (i, t) = self.locate(x)?;
        if t == 0.0 && self.pieces[i] == Piece::Quintic {
            return Some(self.d[i]);
        }
        Some(self.piece_derivative(i, self.pieces[i], t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes_exactly() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let h = MonotoneHermite::new(x.clone(), y.clone(), y.clone(), Some(y.clone())).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert_eq!(h.eval(*a).unwrap(), *b);
        }
        assert_eq!(h.cubic_fallbacks(), 0);
        let mid = h.eval(0.55).unwrap();
        assert!((mid - 0.55f64.exp()).abs() < 1e-9);
        assert!((h.derivative(0.55).unwrap() - 0.55f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn bad_slopes_fall_back_to_increasing_cubic() {
        let x = vec![0.0, 1.0, 2.0];
        let y = vec![0.0, 1.0, 2.0];
        let d = vec![40.0, 40.0, 40.0];
        let s = vec![0.0, 0.0, 0.0];
        let h = MonotoneHermite::new(x, y, d, Some(s)).unwrap();
        assert_eq!(h.cubic_fallbacks(), 2);
        let mut prev = h.eval(0.0).unwrap();
        for k in 1..=200 {
            let v = h.eval(k as f64 * 0.01).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn outside_domain_is_none() {
        let h = MonotoneHermite::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 1.0], None).unwrap();
        assert!(h.eval(1.5).is_none());
        assert!(h.eval(-0.1).is_none());
    }
}
