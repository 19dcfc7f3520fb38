use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One observation for the exponential fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub alpha: f64,
    pub value: f64,
    pub weight: f64,
}

impl FitPoint {
    pub fn new(alpha: f64, value: f64) -> Self {
        Self { alpha, value, weight: 1.0 }
    }
}

/// Least-squares fit of `E(α) = a·e^{−bα} + c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Weighted sum of squared residuals.
    pub residual: f64,
    /// Covariance of `(a, b, c)`; zero when the fit has no spare degrees of freedom.
    pub covariance: [[f64; 3]; 3],
    /// Set when the data carry no decay and `a = 0` was returned.
    pub degenerate: bool,
}

impl ExpFit {
    pub fn eval(&self, alpha: f64) -> f64 {
        self.a * (-self.b * alpha).exp() + self.c
    }

    pub fn stderr(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.covariance[i][i].max(0.0).sqrt())
    }
}

pub const DEFAULT_B_MAX: f64 = 10.0;

/// Variable projection: for fixed `b` the model is linear in `(a, c)` and
/// solved in closed form; `b` is located by a grid scan and golden-section
/// refinement on `[0, b_max]`, then all three parameters are polished by
/// Gauss–Newton.
pub fn exp_fit(points: &[FitPoint]) -> Result<ExpFit> {
    exp_fit_bounded(points, DEFAULT_B_MAX)
}

pub fn exp_fit_bounded(points: &[FitPoint], b_max: f64) -> Result<ExpFit> {
    for p in points {
        if !p.alpha.is_finite() || !p.value.is_finite() || !(p.weight > 0.0) {
            return Err(Error::Fit(format!("invalid point {p:?}")));
        }
    }
    let mut alphas: Vec<f64> = points.iter().map(|p| p.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    if alphas.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 distinct scale factors, got {}", alphas.len())));
    }
    let wsum: f64 = points.iter().map(|p| p.weight).sum();
    let mean = points.iter().map(|p| p.weight * p.value).sum::<f64>() / wsum;
    let spread = points.iter().map(|p| (p.value - mean).abs()).fold(0.0, f64::max);
    if spread <= 1e-14 * mean.abs().max(1.0) {
        let var_c = if points.len() > 1 { 0.0 } else { f64::NAN };
        let mut covariance = [[0.0; 3]; 3];
        covariance[2][2] = var_c.max(0.0);
        return Ok(ExpFit { a: 0.0, b: 0.0, c: mean, residual: 0.0, covariance, degenerate: true });
    }

    const GRID: usize = 400;
    let objective = |b: f64| linear_part(points, b).2;
    let step = b_max / GRID as f64;
    let (best, _) = (0..=GRID)
        .map(|i| (i, objective(i as f64 * step)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("non-empty grid");
    let lo = best.saturating_sub(1) as f64 * step;
    let hi = ((best + 1).min(GRID)) as f64 * step;
    let b = golden_section(objective, lo, hi, 1e-12);
    let (a, c, _) = linear_part(points, b);
    let (a, b, c) = gauss_newton(points, a, b, c, b_max);
    let residual = sse(points, a, b, c);
    let covariance = covariance(points, a, b, residual);
    Ok(ExpFit { a, b, c, residual, covariance, degenerate: false })
}

/// Best `(a, c)` for fixed `b` and the resulting residual.
fn linear_part(points: &[FitPoint], b: f64) -> (f64, f64, f64) {
    let (mut sw, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in points {
        let x = (-b * p.alpha).exp();
        sw += p.weight;
        sx += p.weight * x;
        sxx += p.weight * x * x;
        sy += p.weight * p.value;
        sxy += p.weight * x * p.value;
    }
    let det = sw * sxx - sx * sx;
    let (a, c) = if det.abs() <= 1e-300 || det.abs() < 1e-14 * sw * sxx {
        (0.0, sy / sw)
    } else {
        ((sw * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det)
    };
    (a, c, sse(points, a, b, c))
}

fn sse(points: &[FitPoint], a: f64, b: f64, c: f64) -> f64 {
    points
        .iter()
        .map(|p| {
            let r = p.value - (a * (-b * p.alpha).exp() + c);
            p.weight * r * r
        })
        .sum()
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Jacobian rows of the model with respect to `(a, b, c)`.
fn jacobian_row(alpha: f64, a: f64, b: f64) -> [f64; 3] {
    let e = (-b * alpha).exp();
    [e, -a * alpha * e, 1.0]
}

/// Weighted normal matrix `JᵀWJ`.
fn normal_matrix(points: &[FitPoint], a: f64, b: f64) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for p in points {
        let j = jacobian_row(p.alpha, a, b);
        for r in 0..3 {
            for c in 0..3 {
                m[r][c] += p.weight * j[r] * j[c];
            }
        }
    }
    m
}

fn gauss_newton(points: &[FitPoint], mut a: f64, mut b: f64, mut c: f64, b_max: f64) -> (f64, f64, f64) {
    let mut cost = sse(points, a, b, c);
    for _ in 0..50 {
        let m = normal_matrix(points, a, b);
        let mut g = [0.0; 3];
        for p in points {
            let j = jacobian_row(p.alpha, a, b);
            let r = p.value - (a * (-b * p.alpha).exp() + c);
            for k in 0..3 {
                g[k] += p.weight * j[k] * r;
            }
        }
        let Some(inv) = invert3(&m) else { break };
        let d: [f64; 3] = [0, 1, 2].map(|r| (0..3).map(|k| inv[r][k] * g[k]).sum());
        let (na, nb, nc) = (a + d[0], (b + d[1]).clamp(0.0, b_max), c + d[2]);
        let next = sse(points, na, nb, nc);
        if !(next < cost) {
            break;
        }
        let done = (cost - next) <= 1e-30 + 1e-15 * cost;
        (a, b, c, cost) = (na, nb, nc, next);
        if done {
            break;
        }
    }
    (a, b, c)
}

fn covariance(points: &[FitPoint], a: f64, b: f64, residual: f64) -> [[f64; 3]; 3] {
    let dof = points.len().saturating_sub(3);
    if dof == 0 {
        return [[0.0; 3]; 3];
    }
    let sigma2 = residual / dof as f64;
    match invert3(&normal_matrix(points, a, b)) {
        Some(inv) => inv.map(|row| row.map(|v| v * sigma2)),
        None => [[f64::INFINITY; 3]; 3],
    }
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let scale = m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if det.abs() <= 1e-300 || det.abs() < 1e-15 * scale.powi(3) {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
            let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
            inv[r][c] = (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) / det;
        }
    }
    Some(inv)
}

/// `E(0) = a + c` and its standard error from the fit covariance.
pub fn zne_extrapolate(fit: &ExpFit) -> (f64, f64) {
    let cov = &fit.covariance;
    let var = cov[0][0] + cov[2][2] + 2.0 * cov[0][2];
    (fit.a + fit.c, var.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(a: f64, b: f64, c: f64, alphas: &[f64]) -> Vec<FitPoint> {
        alphas.iter().map(|&x| FitPoint::new(x, a * (-b * x).exp() + c)).collect()
    }

    #[test]
    fn recovers_noiseless_parameters() {
        let pts = synthetic(0.5, 1.2, 0.45, &[1.0, 1.5, 2.0, 3.0]);
        let fit = exp_fit(&pts).unwrap();
        assert!((fit.a - 0.5).abs() < 1e-6 && (fit.b - 1.2).abs() < 1e-6 && (fit.c - 0.45).abs() < 1e-6, "{fit:?}");
        assert!(fit.residual < 1e-12);
        let (e0, _) = zne_extrapolate(&fit);
        assert!((e0 - 0.95).abs() < 1e-6);
    }

    #[test]
    fn constant_data_is_degenerate() {
        let pts: Vec<_> = [1.0, 3.0, 5.0].iter().map(|&x| FitPoint::new(x, 0.9)).collect();
        let fit = exp_fit(&pts).unwrap();
        assert!(fit.degenerate && fit.a == 0.0 && (fit.c - 0.9).abs() < 1e-15);
        assert!((zne_extrapolate(&fit).0 - 0.9).abs() < 1e-15);
    }

    #[test]
    fn needs_three_distinct_scales() {
        let pts = vec![FitPoint::new(1.0, 0.9), FitPoint::new(1.0, 0.8), FitPoint::new(3.0, 0.7)];
        assert!(matches!(exp_fit(&pts), Err(Error::Fit(_))));
    }

    #[test]
    fn noisy_data_gives_finite_errors() {
        let mut pts = synthetic(0.2, 0.4, 0.7, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        for (i, p) in pts.iter_mut().enumerate() {
            p.value += if i % 2 == 0 { 1e-4 } else { -1e-4 };
        }
        let fit = exp_fit(&pts).unwrap();
        let err = fit.stderr();
        assert!(err.iter().all(|e| e.is_finite() && *e > 0.0), "{err:?}");
        assert!((zne_extrapolate(&fit).0 - 0.9).abs() < 0.05);
    }
}
