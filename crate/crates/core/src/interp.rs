//! Monotone piecewise-cubic Hermite interpolation on a non-uniform grid.

use crate::error::{Error, Result};

/// Cubic Hermite interpolant with three-point slopes, limited by the Hyman
/// filter where the data is locally monotone. Knots adjacent to a sign change
/// of the secants get the looser bound so smooth extrema keep third order.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` must be strictly increasing with at least two points.
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Domain(format!(
                "interpolation needs matching lengths, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: x.len(),
            });
        }
        if let Some(i) = x.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(format!(
                "interpolation knots must increase strictly (x[{i}] = {}, x[{}] = {})",
                x[i],
                i + 1,
                x[i + 1]
            )));
        }
        let d = slopes(x, y);
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn eval(&self, xq: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(xq >= lo && xq <= hi) {
            return Err(Error::OutOfRange { x: xq, lo, hi });
        }
        let k = self.x.partition_point(|v| *v <= xq);
        if k == self.x.len() {
            return Ok(self.y[k - 1]);
        }
        let i = k - 1;
        if xq == self.x[i] {
            return Ok(self.y[i]);
        }
        let h = self.x[i + 1] - self.x[i];
        let s = (xq - self.x[i]) / h;
        let secant = (self.y[i + 1] - self.y[i]) / h;
        let (d0, d1) = (self.d[i], self.d[i + 1]);
        let c2 = 3.0 * secant - 2.0 * d0 - d1;
        let c3 = d0 + d1 - 2.0 * secant;
        Ok(self.y[i] + h * s * (d0 + s * (c2 + s * c3)))
    }
}

fn slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
    }
    d[0] = ((2.0 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1]);
    let m = n - 1;
    d[m] = ((2.0 * h[m - 1] + h[m - 2]) * delta[m - 1] - h[m - 1] * delta[m - 2]) / (h[m - 1] + h[m - 2]);

    for i in 0..n {
        let left = if i > 0 { Some(delta[i - 1]) } else { None };
        let right = if i < n - 1 { Some(delta[i]) } else { None };
        let (a, b) = match (left, right) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, a),
            (None, Some(b)) => (b, b),
            (None, None) => unreachable!(),
        };
        if a * b > 0.0 {
            // next to a smooth extremum the strict bound clips the slope
            let near_extremum = (i >= 2 && delta[i - 2] * a < 0.0) || (i + 1 < n - 1 && delta[i + 1] * b < 0.0);
            let bound = if near_extremum {
                3.0 * a.abs().max(b.abs())
            } else {
                3.0 * a.abs().min(b.abs())
            };
            d[i] = if a > 0.0 {
                d[i].clamp(0.0, bound)
            } else {
                d[i].clamp(-bound, 0.0)
            };
        } else if a == 0.0 || b == 0.0 {
            d[i] = 0.0;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knots(n: usize) -> Vec<f64> {
        // mildly non-uniform
        (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                s + 0.05 * (std::f64::consts::PI * s).sin() / std::f64::consts::PI
            })
            .collect()
    }

    #[test]
    fn reproduces_knots_and_constants() {
        let x = knots(10);
        let y: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let f = MonotoneCubic::new(&x, &y).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert_eq!(f.eval(*a).unwrap(), *b);
        }
        let c = MonotoneCubic::new(&x, &vec![2.5; x.len()]).unwrap();
        for i in 0..50 {
            assert_eq!(c.eval(i as f64 / 49.0 * x[10]).unwrap(), 2.5);
        }
    }

    #[test]
    fn out_of_range_is_an_error() {
        let f = MonotoneCubic::new(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(f.eval(2.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(f.eval(-0.1), Err(Error::OutOfRange { .. })));
        assert!(MonotoneCubic::new(&[0.0, 0.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn no_overshoot_on_a_step() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| if *v < 10.0 { 0.0 } else { 1.0 }).collect();
        let f = MonotoneCubic::new(&x, &y).unwrap();
        for i in 0..=1900 {
            let v = f.eval(i as f64 / 100.0).unwrap();
            assert!((0.0..=1.0).contains(&v), "{v}");
        }
    }

    fn max_error(n: usize) -> f64 {
        let x = knots(n);
        let y: Vec<f64> = x.iter().map(|v| (2.0 * v).sin()).collect();
        let f = MonotoneCubic::new(&x, &y).unwrap();
        (0..997)
            .map(|i| {
                let xq = 0.1 + 0.8 * i as f64 / 996.0;
                (f.eval(xq).unwrap() - (2.0 * xq).sin()).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn interior_error_is_third_order() {
        let order = (max_error(40) / max_error(80)).log2();
        assert!(order >= 2.7, "{order}");
    }

    fn max_error_extremum(n: usize) -> f64 {
        let x = knots(n);
        let y: Vec<f64> = x.iter().map(|v| (2.0 * std::f64::consts::PI * v).sin()).collect();
        let f = MonotoneCubic::new(&x, &y).unwrap();
        (0..997)
            .map(|i| {
                let xq = 0.05 + 0.9 * i as f64 / 996.0;
                (f.eval(xq).unwrap() - (2.0 * std::f64::consts::PI * xq).sin()).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn smooth_extrema_keep_third_order() {
        let order = (max_error_extremum(80) / max_error_extremum(160)).log2();
        assert!(order >= 2.7, "{order}");
    }
}
