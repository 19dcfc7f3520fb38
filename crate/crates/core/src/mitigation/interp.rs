use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fritsch–Carlson monotone piecewise-cubic Hermite interpolant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `xs` must be strictly increasing with at least two knots.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Config(format!("need matching knots, got {} x and {} y", xs.len(), ys.len())));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::Config("knots must be strictly increasing and finite".into()));
        }
        let n = xs.len();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            m[i] = if delta[i - 1] * delta[i] <= 0.0 { 0.0 } else { 0.5 * (delta[i - 1] + delta[i]) };
        }
        for i in 0..n - 1 {
            if delta[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
                continue;
            }
            let (a, b) = (m[i] / delta[i], m[i + 1] / delta[i]);
            let s = a * a + b * b;
            if s > 9.0 {
                let t = 3.0 / s.sqrt();
                m[i] = t * a * delta[i];
                m[i + 1] = t * b * delta[i];
            }
        }
        Ok(Self { xs, ys, slopes: m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().expect("non-empty"))
    }

    /// Value at `x`, clamped to the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        let x = x.clamp(lo, hi);
        let i = match self.xs.partition_point(|&k| k <= x) {
            0 => 0,
            k => (k - 1).min(self.xs.len() - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.ys[i]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.ys[i + 1]
            + (t3 - t2) * h * self.slopes[i + 1]
    }

    /// Smallest `x` with `eval(x) = target`, located by bisection inside the
    /// first knot interval that brackets it.
    pub fn solve(&self, target: f64) -> Result<f64> {
        let (lo_v, hi_v) = self.ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
        for i in 0..self.xs.len() - 1 {
            let (fa, fb) = (self.ys[i] - target, self.ys[i + 1] - target);
            if fa == 0.0 {
                return Ok(self.xs[i]);
            }
            if fa.signum() == fb.signum() && fb != 0.0 {
                continue;
            }
            let (mut a, mut b, mut sa) = (self.xs[i], self.xs[i + 1], fa.signum());
            while b - a > 1e-14 * (1.0 + b.abs()) {
                let mid = 0.5 * (a + b);
                let fm = self.eval(mid) - target;
                if fm == 0.0 {
                    return Ok(mid);
                }
                if fm.signum() == sa {
                    a = mid;
                    sa = fm.signum();
                } else {
                    b = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        Err(Error::OutOfRange { target, lo: lo_v, hi: hi_v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_lines() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.2).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 0.5 * x).collect();
        let mc = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((mc.eval(*x) - y).abs() < 1e-15);
        }
        assert!((mc.eval(0.33) - (1.0 - 0.165)).abs() < 1e-14);
        assert!((mc.solve(0.8).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn preserves_monotonicity() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.0, 1.0, 1.0, 5.0];
        let mc = MonotoneCubic::new(xs, ys).unwrap();
        let mut prev = mc.eval(0.0);
        for i in 1..=400 {
            let v = mc.eval(i as f64 / 100.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn rejects_bad_knots_and_targets() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        let mc = MonotoneCubic::new(vec![0.0, 1.0], vec![1.0, 0.5]).unwrap();
        assert!(matches!(mc.solve(0.2), Err(Error::OutOfRange { .. })));
    }
}
