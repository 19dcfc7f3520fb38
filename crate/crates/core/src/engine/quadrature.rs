use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Product rule on the sphere: Gauss–Legendre in `cos θ`, trapezoid in `φ`.
///
/// Exact for polynomials in the Bloch vector of degree below
/// `min(2 n_theta, n_phi)`; the transfer integrands are quadratic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadrature {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { n_theta: 16, n_phi: 16 }
    }
}

impl Quadrature {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::Config(format!("quadrature needs positive node counts, got {n_theta}x{n_phi}")));
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn doubled(self) -> Self {
        Self { n_theta: 2 * self.n_theta, n_phi: 2 * self.n_phi }
    }

    /// `(θ, φ, weight)` triples; weights sum to 1.
    pub fn nodes(&self) -> Vec<(f64, f64, f64)> {
        let (x, w) = gauss_legendre(self.n_theta);
        let mut out = Vec::with_capacity(self.n_theta * self.n_phi);
        for (xi, wi) in x.iter().zip(&w) {
            let theta = xi.clamp(-1.0, 1.0).acos();
            for j in 0..self.n_phi {
                let phi = 2.0 * PI * j as f64 / self.n_phi as f64;
                out.push((theta, phi, wi / (2.0 * self.n_phi as f64)));
            }
        }
        out
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `P_n(z)` and its derivative.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// `(1/4π) ∫ f(θ, φ) sin θ dθ dφ`.
pub fn bloch_average<F: FnMut(f64, f64) -> f64>(mut f: F, quad: Quadrature) -> f64 {
    let mut acc = 0.0;
    let mut comp = 0.0;
    for (theta, phi, w) in quad.nodes() {
        let y = w * f(theta, phi) - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    acc
}

/// Fallible variant that stops at the first error.
pub fn try_bloch_average<F: FnMut(f64, f64) -> Result<f64>>(mut f: F, quad: Quadrature) -> Result<f64> {
    let mut err = None;
    let v = bloch_average(
        |t, p| match f(t, p) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        quad,
    );
    err.map_or(Ok(v), Err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫ x^8 = 2/9, exact for 5 points (degree ≤ 9)
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn known_nodes() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15 && (w[0] - 1.0).abs() < 1e-15);
        let (x, _) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-15 && (x[2] - 0.6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sphere_averages() {
        let q = Quadrature::default();
        assert!((bloch_average(|_, _| 1.0, q) - 1.0).abs() < 1e-14);
        assert!((bloch_average(|t, _| (t / 2.0).cos().powi(2), q) - 0.5).abs() < 1e-14);
        let v = bloch_average(|t, p| t.sin().powi(2) * p.cos().powi(2), q);
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(Quadrature::new(0, 4).is_err());
    }
}
