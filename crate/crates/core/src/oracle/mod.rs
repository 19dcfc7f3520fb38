//! Closed-form three-qubit success and fidelity series, their exact rational
//! evaluation, and the inverse solve for the readout parameter.

mod calibrate;
mod tables;

pub use calibrate::{calibrate, CalibrationEntry, CalibrationReport};
pub use tables::{CoefficientTable, PUBLISHED};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::channels::ReadoutModel;
use crate::circuit::Scheme;
use crate::error::{Error, Result};

/// Which published series to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    /// True probability of reading 0 after the disentangler, `m̄₀`.
    Success,
    /// Average state fidelity of the last qubit.
    Fidelity,
}

/// Full coefficient matrix `A[n][k]` of `(1/6) Σ A[n][k] uⁿ vᵏ`, constant term included.
pub fn series(scheme: Scheme, quantity: Quantity) -> Result<Vec<[i64; 3]>> {
    let t = CoefficientTable::published();
    let with_constant = |tail: &[i64]| {
        std::iter::once([6, 0, 0]).chain(tail.iter().map(|&a| [a, 0, 0])).collect()
    };
    Ok(match (scheme, quantity) {
        (Scheme::Swap, Quantity::Success) => with_constant(&t.a_swap),
        (Scheme::Swap, Quantity::Fidelity) => with_constant(&t.b_swap),
        (Scheme::Teleport | Scheme::Ghz, Quantity::Success) => t.a_teleport.to_vec(),
        (Scheme::Teleport | Scheme::Ghz, Quantity::Fidelity) => t.b_teleport.to_vec(),
        (Scheme::Cluster, Quantity::Success) => t.a_cluster.to_vec(),
        (Scheme::Cluster, Quantity::Fidelity) => t.b_cluster.to_vec(),
        (Scheme::Custom, _) => return Err(Error::Config("no closed form for custom circuits".into())),
    })
}

/// Neumaier-compensated `(1/6) Σ A[n][k] uⁿ vᵏ`.
fn eval_series(coeffs: &[[i64; 3]], u: f64, v: f64) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut un = 1.0;
    for row in coeffs {
        let mut vk = 1.0;
        for &a in row {
            let term = a as f64 * un * vk;
            let t = sum + term;
            comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
            sum = t;
            vk *= v;
        }
        un *= u;
    }
    (sum + comp) / 6.0
}

fn eval_series_exact(coeffs: &[[i64; 3]], u: &BigRational, v: &BigRational) -> BigRational {
    let mut sum = BigRational::zero();
    let mut un = BigRational::one();
    for row in coeffs {
        let mut vk = BigRational::one();
        for &a in row {
            sum += BigRational::from_integer(BigInt::from(a)) * &un * &vk;
            vk *= v;
        }
        un *= u;
    }
    sum / BigRational::from_integer(BigInt::from(6))
}

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::Probability { name, value: v });
    }
    Ok(())
}

/// The published series were derived at `κ = 1/2`; the mid-circuit
/// readout enters them only through `v = −(1 + κ) q`.
fn readout_variable(q: f64, kappa: f64) -> f64 {
    -(1.0 + kappa) * q
}

/// Bloch-averaged true success `m̄₀(p)` of the three-qubit swap chain.
pub fn m0_swap(p: f64) -> f64 {
    let s = series(Scheme::Swap, Quantity::Success).expect("swap has a series");
    eval_series(&s, -4.0 * p / 3.0, 0.0)
}

/// `q + m̄₀ (1 − (κ+1) q)`: probability of recording 0 given true probability `m̄₀`.
pub fn nominal_success(m0bar: f64, q: f64, kappa: f64) -> f64 {
    q + m0bar * (1.0 - (kappa + 1.0) * q)
}

/// True success `m̄₀(q, p)` including mid-circuit readout effects, before final readout.
pub fn m0bar(scheme: Scheme, q: f64, p: f64, kappa: f64) -> Result<f64> {
    check_unit("q", q)?;
    check_unit("p", p)?;
    let v = if scheme == Scheme::Swap { 0.0 } else { readout_variable(q, kappa) };
    Ok(eval_series(&series(scheme, Quantity::Success)?, -4.0 * p / 3.0, v))
}

/// Nominal (recorded) success probability at `κ = 1/2`.
pub fn m_tilde(scheme: Scheme, q: f64, p: f64) -> Result<f64> {
    m_tilde_kappa(scheme, q, p, ReadoutModel::DEFAULT_KAPPA)
}

pub fn m_tilde_kappa(scheme: Scheme, q: f64, p: f64, kappa: f64) -> Result<f64> {
    Ok(nominal_success(m0bar(scheme, q, p, kappa)?, q, kappa))
}

/// Average fidelity; `q` is ignored for swap.
pub fn fidelity(scheme: Scheme, q: f64, p: f64) -> Result<f64> {
    fidelity_kappa(scheme, q, p, ReadoutModel::DEFAULT_KAPPA)
}

pub fn fidelity_kappa(scheme: Scheme, q: f64, p: f64, kappa: f64) -> Result<f64> {
    check_unit("q", q)?;
    check_unit("p", p)?;
    let v = if scheme == Scheme::Swap { 0.0 } else { readout_variable(q, kappa) };
    Ok(eval_series(&series(scheme, Quantity::Fidelity)?, -4.0 * p / 3.0, v))
}

/// Closed-form value in exact rational arithmetic at `κ = 1/2`.
///
/// For [`Quantity::Success`] this is the recorded probability `m̃₀`.
pub fn evaluate_exact(scheme: Scheme, quantity: Quantity, q: &BigRational, p: &BigRational) -> Result<BigRational> {
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let u = -int(4) * p / int(3);
    let v = if scheme == Scheme::Swap { BigRational::zero() } else { -int(3) * q / int(2) };
    let inner = eval_series_exact(&series(scheme, quantity)?, &u, &v);
    Ok(match quantity {
        Quantity::Fidelity => inner,
        Quantity::Success => q + inner * (BigRational::one() - int(3) * q / int(2)),
    })
}

/// Converts a float to the exact rational it represents.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// Readout parameter `q` at which the `p = 0` success curve equals `target`.
///
/// Swap has the closed form `q = (1 − target)/κ`. The measurement-based
/// schemes scan `[0, 1]` for the first bracket and bisect to `1e-12`.
pub fn solve_q(scheme: Scheme, target: f64, kappa: f64) -> Result<f64> {
    if scheme == Scheme::Swap {
        let q = (1.0 - target) / kappa;
        let lo = 1.0 - kappa;
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::OutOfRange { target, lo, hi: 1.0 });
        }
        return Ok(q);
    }
    let f = |q: f64| m_tilde_kappa(scheme, q, 0.0, kappa);
    solve_on_unit_interval(f, target)
}

/// Smallest root of `f(q) = target` on `[0, 1]` for a continuous curve.
pub(crate) fn solve_on_unit_interval<F: Fn(f64) -> Result<f64>>(f: F, target: f64) -> Result<f64> {
    const SCAN: usize = 1000;
    let mut prev_q = 0.0;
    let mut prev = f(0.0)? - target;
    if prev == 0.0 {
        return Ok(0.0);
    }
    let (mut lo_val, mut hi_val) = (prev + target, prev + target);
    for i in 1..=SCAN {
        let q = i as f64 / SCAN as f64;
        let cur = f(q)? - target;
        lo_val = lo_val.min(cur + target);
        hi_val = hi_val.max(cur + target);
        if cur == 0.0 {
            return Ok(q);
        }
        if prev.signum() != cur.signum() {
            let (mut a, mut b, mut fa) = (prev_q, q, prev);
            while b - a > 1e-13 {
                let m = 0.5 * (a + b);
                let fm = f(m)? - target;
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        prev = cur;
        prev_q = q;
    }
    Err(Error::OutOfRange { target, lo: lo_val, hi: hi_val })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn zero_noise_values() {
        assert_eq!(m0_swap(0.0), 1.0);
        for s in [Scheme::Teleport, Scheme::Cluster, Scheme::Ghz] {
            assert!((m_tilde(s, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
            assert!((fidelity(s, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        }
        assert_eq!(fidelity(Scheme::Swap, 0.3, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn completely_depolarizing_limit_is_exactly_half() {
        let half = r(1, 2);
        for s in [Scheme::Swap, Scheme::Teleport, Scheme::Cluster] {
            for qty in [Quantity::Success, Quantity::Fidelity] {
                assert_eq!(evaluate_exact(s, qty, &r(0, 1), &r(3, 4)).unwrap(), half, "{s} {qty:?}");
            }
        }
    }

    #[test]
    fn nominal_success_cases() {
        assert!((nominal_success(1.0, 0.2, 0.5) - 0.9).abs() < 1e-15);
        assert!((nominal_success(0.5, 0.2, 0.5) - 0.55).abs() < 1e-15);
        for q in [0.0, 0.3, 0.9] {
            assert!((nominal_success(2.0 / 3.0, q, 0.5) - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn float_matches_rational() {
        for s in [Scheme::Swap, Scheme::Teleport, Scheme::Cluster] {
            for i in 0..=10 {
                for j in 0..=10 {
                    let (p, q) = (i as f64 / 10.0, j as f64 / 10.0);
                    let want = evaluate_exact(s, Quantity::Success, &exact(q), &exact(p)).unwrap();
                    let got = m_tilde(s, q, p).unwrap();
                    assert!((got - num_traits::ToPrimitive::to_f64(&want).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn solve_q_cases() {
        let q = solve_q(Scheme::Swap, 0.95583, 0.5).unwrap();
        assert!((q - 0.08834).abs() < 1e-12);
        for s in [Scheme::Swap, Scheme::Teleport, Scheme::Cluster] {
            assert!(solve_q(s, 1.0, 0.5).unwrap().abs() < 1e-12);
        }
        assert!(matches!(solve_q(Scheme::Swap, 0.4, 0.5), Err(Error::OutOfRange { .. })));
        let q = solve_q(Scheme::Teleport, 0.95, 0.5).unwrap();
        assert!((m_tilde(Scheme::Teleport, q, 0.0).unwrap() - 0.95).abs() < 1e-10);
    }

    #[test]
    fn ghz_uses_teleport_series() {
        assert_eq!(m_tilde(Scheme::Ghz, 0.2, 0.1).unwrap(), m_tilde(Scheme::Teleport, 0.2, 0.1).unwrap());
        assert!(series(Scheme::Custom, Quantity::Success).is_err());
    }
}
