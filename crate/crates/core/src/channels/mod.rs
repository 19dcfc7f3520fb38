//! Gates, Kraus noise channels and the classical readout response model.
//!
//! Flip channels take the probability of the *flip* event. A bit flip with
//! `flip_prob = f` is `{√(1−f) I, √f X}`; the no-flip weight `1 − f` is the
//! complement, not the argument.

pub mod gates;
mod readout;

pub use readout::{apply_readout, ReadoutModel};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, C64};

const COMPLETENESS_TOL: f64 = 1e-12;

/// Operator-sum channel `ρ → Σ Eᵢ ρ Eᵢ†` on a fixed number of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    arity: usize,
}

impl KrausChannel {
    /// Validates shapes and completeness `Σ Eᵢ†Eᵢ = I`.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators.first().ok_or_else(|| Error::Dimension("channel needs at least one operator".into()))?;
        let arity = first
            .qubit_count()
            .ok_or_else(|| Error::Dimension(format!("{}x{} Kraus operator", first.rows(), first.cols())))?;
        if operators.iter().any(|e| e.qubit_count() != Some(arity)) {
            return Err(Error::Dimension("Kraus operators differ in size".into()));
        }
        let dev = completeness_deviation(&operators);
        if dev > COMPLETENESS_TOL {
            return Err(Error::Incomplete(dev));
        }
        Ok(Self { operators, arity })
    }

    pub fn identity(arity: usize) -> Self {
        Self { operators: vec![ComplexMatrix::identity(1 << arity)], arity }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn completeness_deviation(&self) -> f64 {
        completeness_deviation(&self.operators)
    }

    /// Tensor product of two channels acting on disjoint qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut ops = Vec::with_capacity(self.operators.len() * other.operators.len());
        for a in &self.operators {
            for b in &other.operators {
                ops.push(a.kron(b)?);
            }
        }
        Self::new(ops)
    }

    /// Whether every operator is a scaled unitary, so the Born weight of each
    /// operator is state independent. Returns those weights.
    pub fn mixed_unitary_weights(&self) -> Option<Vec<f64>> {
        self.operators
            .iter()
            .map(|e| {
                let g = e.adjoint().matmul(e).ok()?;
                let w = g[(0, 0)].re;
                let dim = g.rows();
                (g.max_abs_diff(&ComplexMatrix::identity(dim).scale(C64::new(w, 0.0))) < 1e-12).then_some(w)
            })
            .collect()
    }
}

fn completeness_deviation(ops: &[ComplexMatrix]) -> f64 {
    let dim = ops[0].rows();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for e in ops {
        match e.adjoint().matmul(e).and_then(|g| sum.add(&g)) {
            Ok(s) => sum = s,
            Err(_) => return f64::INFINITY,
        }
    }
    sum.max_abs_diff(&ComplexMatrix::identity(dim))
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || value.is_nan() {
        return Err(Error::Probability { name, value });
    }
    Ok(())
}

/// Single-qubit depolarizing channel: `√(1−p) I` plus `√(p/3)` times each Pauli.
///
/// Equivalent to `ρ → (1 − 4p/3) ρ + (4p/3) I/2`; `p = 3/4` is fully depolarizing.
pub fn depolarizing_1q(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let w = (p / 3.0).sqrt();
    KrausChannel::new(vec![
        gates::identity().scale(C64::new((1.0 - p).sqrt(), 0.0)),
        gates::pauli_x().scale(C64::new(w, 0.0)),
        gates::pauli_y().scale(C64::new(w, 0.0)),
        gates::pauli_z().scale(C64::new(w, 0.0)),
    ])
}

/// Two independent single-qubit depolarizers, one per qubit (16 operators).
pub fn depolarizing_2q(p: f64) -> Result<KrausChannel> {
    let one = depolarizing_1q(p)?;
    one.tensor(&one)
}

pub fn bit_flip(flip_prob: f64) -> Result<KrausChannel> {
    flip_channel("flip_prob", flip_prob, gates::pauli_x())
}

pub fn phase_flip(flip_prob: f64) -> Result<KrausChannel> {
    flip_channel("flip_prob", flip_prob, gates::pauli_z())
}

fn flip_channel(name: &'static str, f: f64, pauli: ComplexMatrix) -> Result<KrausChannel> {
    check_probability(name, f)?;
    KrausChannel::new(vec![
        gates::identity().scale(C64::new((1.0 - f).sqrt(), 0.0)),
        pauli.scale(C64::new(f.sqrt(), 0.0)),
    ])
}

/// Applies `ch` on `sites`, returning the new state.
pub fn apply_channel(rho: &DensityMatrix, ch: &KrausChannel, sites: &[usize]) -> Result<DensityMatrix> {
    if ch.arity() != sites.len() {
        return Err(Error::Arity { arity: ch.arity(), sites: sites.len() });
    }
    let dev = ch.completeness_deviation();
    if dev > COMPLETENESS_TOL {
        return Err(Error::Incomplete(dev));
    }
    let mut out = rho.clone();
    out.apply_kraus(ch.operators(), sites)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::StateVector;

    fn ket(n: usize, idx: usize) -> DensityMatrix {
        DensityMatrix::from_pure(&StateVector::basis(n, idx).unwrap()).unwrap()
    }

    fn plus() -> DensityMatrix {
        let psi = StateVector::zero(1).unwrap().with_local(&gates::hadamard(), &[0]).unwrap();
        DensityMatrix::from_pure(&psi).unwrap()
    }

    fn diag(rho: &DensityMatrix) -> Vec<f64> {
        (0..rho.dim()).map(|i| rho.get(i, i).re).collect()
    }

    #[test]
    fn depolarizing_zero_is_identity() {
        let rho = plus();
        let out = apply_channel(&rho, &depolarizing_1q(0.0).unwrap(), &[0]).unwrap();
        assert!(out.to_matrix().max_abs_diff(&rho.to_matrix()) < 1e-15);
    }

    #[test]
    fn depolarizing_three_quarters_is_fully_mixing() {
        let mixed = DensityMatrix::maximally_mixed(1).unwrap().to_matrix();
        for rho in [plus(), ket(1, 0), ket(1, 1)] {
            let out = apply_channel(&rho, &depolarizing_1q(0.75).unwrap(), &[0]).unwrap();
            assert!(out.to_matrix().max_abs_diff(&mixed) < 1e-15);
        }
    }

    #[test]
    fn depolarizing_point_three_on_zero() {
        let out = apply_channel(&ket(1, 0), &depolarizing_1q(0.3).unwrap(), &[0]).unwrap();
        let d = diag(&out);
        assert!((d[0] - 0.8).abs() < 1e-15 && (d[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn two_qubit_depolarizer_matches_independent_application() {
        let mut rho = ket(2, 0b01);
        rho.apply_local(&gates::hadamard(), &[0]).unwrap();
        rho.apply_local(&gates::cnot(), &[0, 1]).unwrap();
        let joint = apply_channel(&rho, &depolarizing_2q(0.2).unwrap(), &[0, 1]).unwrap();
        let one = depolarizing_1q(0.2).unwrap();
        let split = apply_channel(&apply_channel(&rho, &one, &[0]).unwrap(), &one, &[1]).unwrap();
        assert_eq!(depolarizing_2q(0.2).unwrap().operators().len(), 16);
        assert!(joint.to_matrix().max_abs_diff(&split.to_matrix()) < 1e-15);
    }

    #[test]
    fn two_qubit_depolarizer_fully_mixes() {
        let out = apply_channel(&ket(2, 0b10), &depolarizing_2q(0.75).unwrap(), &[0, 1]).unwrap();
        assert!(out.to_matrix().max_abs_diff(&DensityMatrix::maximally_mixed(2).unwrap().to_matrix()) < 1e-15);
    }

    #[test]
    fn bit_flip_cases() {
        let out = apply_channel(&ket(1, 0), &bit_flip(1.0).unwrap(), &[0]).unwrap();
        assert_eq!(diag(&out), vec![0.0, 1.0]);
        let out = apply_channel(&ket(1, 0), &bit_flip(0.1).unwrap(), &[0]).unwrap();
        let d = diag(&out);
        assert!((d[0] - 0.9).abs() < 1e-15 && (d[1] - 0.1).abs() < 1e-15);
        let out = apply_channel(&ket(1, 0), &bit_flip(0.0).unwrap(), &[0]).unwrap();
        assert_eq!(out, ket(1, 0));
    }

    #[test]
    fn phase_flip_cases() {
        let out = apply_channel(&plus(), &phase_flip(0.5).unwrap(), &[0]).unwrap();
        assert!(out.to_matrix().max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap().to_matrix()) < 1e-15);
        let out = apply_channel(&plus(), &phase_flip(0.1).unwrap(), &[0]).unwrap();
        assert!((out.get(0, 1).re - 0.5 * 0.8).abs() < 1e-15);
        assert!((out.get(1, 0).re - 0.5 * 0.8).abs() < 1e-15);
        let out = apply_channel(&plus(), &phase_flip(0.0).unwrap(), &[0]).unwrap();
        assert!(out.to_matrix().max_abs_diff(&plus().to_matrix()) < 1e-15);
    }

    #[test]
    fn full_depolarizer_on_one_qubit_of_two() {
        let mut rho = ket(2, 0);
        rho.apply_local(&gates::hadamard(), &[0]).unwrap();
        rho.apply_local(&gates::cnot(), &[0, 1]).unwrap();
        let out = apply_channel(&rho, &depolarizing_1q(0.75).unwrap(), &[0]).unwrap();
        let reduced = out.partial_trace(&[0]).unwrap();
        assert!(reduced.to_matrix().max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap().to_matrix()) < 1e-15);
    }

    #[test]
    fn incomplete_channel_is_rejected() {
        let bad = vec![gates::identity(), gates::pauli_x()];
        assert!(matches!(KrausChannel::new(bad), Err(Error::Incomplete(_))));
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let r = apply_channel(&ket(2, 0), &depolarizing_1q(0.1).unwrap(), &[0, 1]);
        assert!(matches!(r, Err(Error::Arity { .. })));
    }

    #[test]
    fn out_of_range_probabilities() {
        assert!(depolarizing_1q(1.2).is_err());
        assert!(depolarizing_2q(-0.1).is_err());
        assert!(bit_flip(f64::NAN).is_err());
        assert!(phase_flip(2.0).is_err());
    }

    #[test]
    fn identity_channel_leaves_state() {
        let rho = plus();
        assert_eq!(apply_channel(&rho, &KrausChannel::identity(1), &[0]).unwrap(), rho);
    }

    #[test]
    fn depolarizer_is_mixed_unitary() {
        let w = depolarizing_1q(0.3).unwrap().mixed_unitary_weights().unwrap();
        assert!((w[0] - 0.7).abs() < 1e-15 && (w[1] - 0.1).abs() < 1e-15);
    }
}
