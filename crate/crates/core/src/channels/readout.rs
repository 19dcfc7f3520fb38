use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classical single-bit readout error.
///
/// `q0 = P(read 1 | true 0)` and `q1 = P(read 0 | true 1)`. With the decay-biased
/// single-parameter model, `q1 = q` and `q0 = κ q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub q0: f64,
    pub q1: f64,
}

impl ReadoutModel {
    pub const DEFAULT_KAPPA: f64 = 0.5;

    pub fn new(q0: f64, q1: f64) -> Result<Self> {
        for (name, v) in [("q0", q0), ("q1", q1)] {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::Probability { name, value: v });
            }
        }
        Ok(Self { q0, q1 })
    }

    /// `q0 = κ q`, `q1 = q`.
    pub fn biased(q: f64, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(Error::Noise(format!("kappa must be non-negative, got {kappa}")));
        }
        Self::new(kappa * q, q)
    }

    pub fn ideal() -> Self {
        Self { q0: 0.0, q1: 0.0 }
    }

    /// Column-stochastic response matrix `Λ`, row-major.
    pub fn response_matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.q0, self.q1], [self.q0, 1.0 - self.q1]]
    }

    /// `1 − q0 − q1`, the determinant of `Λ`.
    pub fn determinant(&self) -> f64 {
        1.0 - self.q0 - self.q1
    }

    /// Probability of recording `recorded` given true outcome `truth`.
    pub fn transition(&self, truth: u8, recorded: u8) -> f64 {
        match (truth, recorded) {
            (0, 0) => 1.0 - self.q0,
            (0, _) => self.q0,
            (_, 0) => self.q1,
            _ => 1.0 - self.q1,
        }
    }

    /// Unclipped `Λ⁻¹ v`.
    pub fn apply_inverse(&self, recorded: [f64; 2]) -> Result<[f64; 2]> {
        let det = self.determinant();
        if det.abs() < 1e-12 {
            return Err(Error::SingularReadout(det));
        }
        let [r0, r1] = recorded;
        Ok([
            ((1.0 - self.q1) * r0 - self.q1 * r1) / det,
            (-self.q0 * r0 + (1.0 - self.q0) * r1) / det,
        ])
    }
}

/// `Λ · [m0, m1]`.
pub fn apply_readout(true_probs: [f64; 2], model: &ReadoutModel) -> Result<[f64; 2]> {
    let [m0, m1] = true_probs;
    if m0 < 0.0 || m1 < 0.0 || (m0 + m1 - 1.0).abs() > 1e-9 {
        return Err(Error::Dimension(format!("[{m0}, {m1}] is not a probability vector")));
    }
    let l = model.response_matrix();
    Ok([l[0][0] * m0 + l[0][1] * m1, l[1][0] * m0 + l[1][1] * m1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ideal_readout_is_identity() {
        assert_eq!(apply_readout([0.3, 0.7], &ReadoutModel::ideal()).unwrap(), [0.3, 0.7]);
    }

    #[test]
    fn first_column_of_response() {
        let m = ReadoutModel::new(0.05, 0.1).unwrap();
        let out = apply_readout([1.0, 0.0], &m).unwrap();
        assert!((out[0] - 0.95).abs() < 1e-15 && (out[1] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn biased_model_gives_nominal_success_formula() {
        // m̃0 = q + m̄0 (1 − (κ+1) q)
        for &(m0, q, kappa) in &[(0.8, 0.1, 0.5), (0.55, 0.4, 0.5), (1.0, 0.3, 0.25)] {
            let model = ReadoutModel::biased(q, kappa).unwrap();
            let out = apply_readout([m0, 1.0 - m0], &model).unwrap();
            let want = q + m0 * (1.0 - (kappa + 1.0) * q);
            assert!((out[0] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(apply_readout([0.6, 0.6], &ReadoutModel::ideal()).is_err());
        assert!(apply_readout([-0.1, 1.1], &ReadoutModel::ideal()).is_err());
        assert!(ReadoutModel::new(1.5, 0.0).is_err());
        assert!(ReadoutModel::biased(0.8, 2.0).is_err());
    }

    #[test]
    fn singular_inverse_is_rejected() {
        let m = ReadoutModel::new(0.5, 0.5).unwrap();
        assert!(matches!(m.apply_inverse([0.5, 0.5]), Err(Error::SingularReadout(_))));
    }
}
