use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// `(Σᵢ √(pᵢ qᵢ))²` after normalizing both inputs, which may be raw counts.
pub fn hellinger_fidelity(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.is_empty() || p.len() != q.len() {
        return Err(Error::Dimension(format!("distributions of length {} and {}", p.len(), q.len())));
    }
    let norm = |v: &[f64]| -> Result<f64> {
        if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::Dimension("distribution has a negative or non-finite entry".into()));
        }
        let s: f64 = v.iter().sum();
        if s <= 0.0 {
            return Err(Error::Dimension("distribution sums to zero".into()));
        }
        Ok(s)
    };
    let (sp, sq) = (norm(p)?, norm(q)?);
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum::<f64>() / (sp * sq).sqrt();
    Ok((bc * bc).min(1.0))
}

/// `count` Bloch angles `(θ, φ)` uniform on the sphere: `cos θ` uniform on
/// `[−1, 1]`, `φ` uniform on `[0, 2π)`.
pub fn haar_sample(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c: f64 = rng.gen_range(-1.0..=1.0);
            let phi = rng.gen_range(0.0..2.0 * PI);
            (c.acos(), phi)
        })
        .collect()
}

/// Independent stream seed for grid point `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mean and standard error of the mean; the error is `None` below two samples.
pub fn mean_stderr(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hellinger_identities() {
        assert_eq!(hellinger_fidelity(&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]).unwrap(), 1.0);
        assert_eq!(hellinger_fidelity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((hellinger_fidelity(&[1.0, 0.0], &[0.5, 0.5]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(hellinger_fidelity(&[10.0, 0.0], &[4.0, 0.0]).unwrap(), 1.0);
        assert!(hellinger_fidelity(&[], &[]).is_err());
        assert!(hellinger_fidelity(&[0.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn haar_is_uniform_and_seeded() {
        let s = haar_sample(11, 100_000);
        let mean_cos = s.iter().map(|(t, _)| t.cos()).sum::<f64>() / s.len() as f64;
        assert!(mean_cos.abs() < 0.01);
        assert!(s.iter().all(|&(t, f)| (0.0..=PI).contains(&t) && (0.0..2.0 * PI).contains(&f)));
        assert_eq!(haar_sample(11, 10), haar_sample(11, 10));
        assert_ne!(haar_sample(11, 10), haar_sample(12, 10));
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
