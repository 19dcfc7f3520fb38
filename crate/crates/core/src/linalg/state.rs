use crate::error::{Error, Result};

use super::layout::LocalLayout;
use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use super::{check_op_dim, MAX_QUBITS};

/// Pure state of an n-qubit register, qubit 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::QubitCap { requested: n, limit: MAX_QUBITS });
        }
        if index >= 1 << n {
            return Err(Error::Dimension(format!("basis index {index} for {n} qubits")));
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(Self { n_qubits: n, amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::Dimension(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let n = amps.len().trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::QubitCap { requested: n, limit: MAX_QUBITS });
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::Invariant("cannot normalize the zero vector".into()));
        }
        let inv = 1.0 / norm;
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// Applies `op` to the ordered `sites` in place.
    pub fn apply_local(&mut self, op: &ComplexMatrix, sites: &[usize]) -> Result<()> {
        check_op_dim(op, sites)?;
        let layout = LocalLayout::new(self.n_qubits, sites)?;
        self.apply_with_layout(op, &layout);
        Ok(())
    }

    pub(crate) fn apply_with_layout(&mut self, op: &ComplexMatrix, layout: &LocalLayout) {
        let d = layout.offsets.len();
        let m = op.as_slice();
        let mut buf = vec![ZERO; d];
        for &base in &layout.bases {
            for (b, &off) in buf.iter_mut().zip(&layout.offsets) {
                *b = self.amps[base + off];
            }
            for (i, &off) in layout.offsets.iter().enumerate() {
                let row = &m[i * d..(i + 1) * d];
                self.amps[base + off] = row.iter().zip(&buf).map(|(a, b)| a * b).sum();
            }
        }
    }

    /// Same as [`apply_local`](Self::apply_local) but consumes and returns the state.
    pub fn with_local(mut self, op: &ComplexMatrix, sites: &[usize]) -> Result<Self> {
        self.apply_local(op, sites)?;
        Ok(self)
    }

    /// Probability of reading `outcome` on `site`.
    pub fn outcome_probability(&self, site: usize, outcome: u8) -> Result<f64> {
        super::layout::validate_sites(self.n_qubits, &[site])?;
        let mask = 1usize << (self.n_qubits - 1 - site);
        let want = if outcome == 0 { 0 } else { mask };
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects `site` onto `outcome` and renormalizes.
    pub fn collapse(&mut self, site: usize, outcome: u8) -> Result<()> {
        super::layout::validate_sites(self.n_qubits, &[site])?;
        let mask = 1usize << (self.n_qubits - 1 - site);
        let want = if outcome == 0 { 0 } else { mask };
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask != want {
                *a = ZERO;
            }
        }
        self.normalize()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::gates;

    #[test]
    fn cnot_on_adjacent_sites() {
        // |100> -> |110>
        let mut s = StateVector::basis(3, 0b100).unwrap();
        s.apply_local(&gates::cnot(), &[0, 1]).unwrap();
        assert_eq!(s, StateVector::basis(3, 0b110).unwrap());
    }

    #[test]
    fn cnot_with_reversed_sites() {
        // control 2, target 0: |001> -> |101>
        let mut s = StateVector::basis(3, 0b001).unwrap();
        s.apply_local(&gates::cnot(), &[2, 0]).unwrap();
        assert_eq!(s, StateVector::basis(3, 0b101).unwrap());
    }

    #[test]
    fn collapse_renormalizes() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_local(&gates::hadamard(), &[0]).unwrap();
        assert!((s.outcome_probability(0, 1).unwrap() - 0.5).abs() < 1e-15);
        s.collapse(0, 1).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(s.outcome_probability(0, 1).unwrap(), 1.0);
    }

    #[test]
    fn rejects_wrong_operator_size() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(s.apply_local(&gates::cnot(), &[0]).is_err());
    }

    #[test]
    fn caps_qubit_count() {
        assert!(matches!(StateVector::zero(14), Err(Error::QubitCap { .. })));
    }
}
