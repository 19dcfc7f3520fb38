use crate::error::{Error, Result};

use super::eigen::hermitian_eigenvalues;
use super::layout::{validate_sites, LocalLayout};
use super::matrix::{ComplexMatrix, C64, ZERO};
use super::state::StateVector;
use super::{check_op_dim, MAX_DENSITY_QUBITS};

/// Density matrix of an n-qubit register.
///
/// A *branch* density is sub-normalized: its trace is the probability of the
/// measurement record that produced it. Summing the branches of a complete
/// record set gives back a normalized state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<C64>,
    branch: bool,
}

impl DensityMatrix {
    pub fn zero(n: usize) -> Result<Self> {
        check_cap(n)?;
        Self::from_pure(&StateVector::zero(n)?)
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let n = psi.n_qubits();
        check_cap(n)?;
        let a = psi.amplitudes();
        let dim = a.len();
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = a[r] * a[c].conj();
            }
        }
        Ok(Self { n_qubits: n, data, branch: false })
    }

    /// Wraps a square matrix, checking Hermiticity and unit trace.
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        let n = m
            .qubit_count()
            .ok_or_else(|| Error::Dimension(format!("{}x{} is not a qubit register", m.rows(), m.cols())))?;
        check_cap(n)?;
        let dev = m.hermitian_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Invariant(format!("trace {tr} is not 1")));
        }
        Ok(Self { n_qubits: n, data: m.into_vec(), branch: false })
    }

    /// Like [`from_matrix`](Self::from_matrix) but allows any trace in `[0, 1]`.
    pub fn branch_from_matrix(m: ComplexMatrix) -> Result<Self> {
        let n = m
            .qubit_count()
            .ok_or_else(|| Error::Dimension(format!("{}x{} is not a qubit register", m.rows(), m.cols())))?;
        check_cap(n)?;
        let dev = m.hermitian_deviation();
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { n_qubits: n, data: m.into_vec(), branch: true })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_cap(n)?;
        let dim = 1usize << n;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n_qubits: n, data, branch: false })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn is_branch(&self) -> bool {
        self.branch
    }

    /// Marks the state as a normalized (non-branch) density. Fails unless the trace is 1.
    pub fn into_normalized(mut self) -> Result<Self> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::Invariant(format!("trace {tr} is not 1")));
        }
        self.branch = false;
        Ok(self)
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let d = self.dim();
        self.data[r * d + c]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::new(d, d, self.data.clone()).expect("square by construction")
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).sum()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.to_matrix().hermitian_deviation()
    }

    /// `ρ → U ρ U†` with `U` embedded on `sites`.
    pub fn apply_local(&mut self, op: &ComplexMatrix, sites: &[usize]) -> Result<()> {
        check_op_dim(op, sites)?;
        let layout = LocalLayout::new(self.n_qubits, sites)?;
        self.apply_kraus_with_layout(std::slice::from_ref(op), &layout);
        Ok(())
    }

    /// `ρ → Σ Eᵢ ρ Eᵢ†` with every operator embedded on `sites`.
    pub fn apply_kraus(&mut self, ops: &[ComplexMatrix], sites: &[usize]) -> Result<()> {
        for op in ops {
            check_op_dim(op, sites)?;
        }
        let layout = LocalLayout::new(self.n_qubits, sites)?;
        self.apply_kraus_with_layout(ops, &layout);
        Ok(())
    }

    /// Works block by block: for every pair of spectator indices the 2^k x 2^k
    /// block is replaced by `Σ E B E†`.
    pub(crate) fn apply_kraus_with_layout(&mut self, ops: &[ComplexMatrix], layout: &LocalLayout) {
        let dim = self.dim();
        let d = layout.offsets.len();
        let mut block = vec![ZERO; d * d];
        let mut tmp = vec![ZERO; d * d];
        let mut acc = vec![ZERO; d * d];
        for &r0 in &layout.bases {
            for &c0 in &layout.bases {
                for (i, &ro) in layout.offsets.iter().enumerate() {
                    let row = (r0 + ro) * dim + c0;
                    for (j, &co) in layout.offsets.iter().enumerate() {
                        block[i * d + j] = self.data[row + co];
                    }
                }
                acc.iter_mut().for_each(|x| *x = ZERO);
                for op in ops {
                    let e = op.as_slice();
                    // tmp = E B
                    for i in 0..d {
                        for j in 0..d {
                            tmp[i * d + j] = (0..d).map(|l| e[i * d + l] * block[l * d + j]).sum();
                        }
                    }
                    // acc += tmp E†
                    for i in 0..d {
                        for j in 0..d {
                            acc[i * d + j] += (0..d).map(|l| tmp[i * d + l] * e[j * d + l].conj()).sum::<C64>();
                        }
                    }
                }
                for (i, &ro) in layout.offsets.iter().enumerate() {
                    let row = (r0 + ro) * dim + c0;
                    for (j, &co) in layout.offsets.iter().enumerate() {
                        self.data[row + co] = acc[i * d + j];
                    }
                }
            }
        }
    }

    /// Reduced density on `keep`, ordered by ascending qubit index.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Dimension("partial trace needs at least one kept qubit".into()));
        }
        validate_sites(self.n_qubits, keep)?;
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        let keep_layout = LocalLayout::new(self.n_qubits, &kept)?;
        let k = kept.len();
        let d_out = 1usize << k;
        let dim = self.dim();
        // the layout's bases enumerate the traced-out configurations
        let mut out = vec![ZERO; d_out * d_out];
        for i in 0..d_out {
            for j in 0..d_out {
                let (oi, oj) = (keep_layout.offsets[i], keep_layout.offsets[j]);
                out[i * d_out + j] = keep_layout.bases.iter().map(|&t| self.data[(t + oi) * dim + t + oj]).sum();
            }
        }
        Ok(Self { n_qubits: k, data: out, branch: self.branch })
    }

    pub fn outcome_probability(&self, site: usize, outcome: u8) -> Result<f64> {
        validate_sites(self.n_qubits, &[site])?;
        let mask = 1usize << (self.n_qubits - 1 - site);
        let want = if outcome == 0 { 0 } else { mask };
        let d = self.dim();
        Ok((0..d).filter(|i| i & mask == want).map(|i| self.data[i * d + i].re).sum())
    }

    /// Unnormalized projection `P ρ P` onto `outcome` at `site`; the result is a branch.
    pub fn project(&self, site: usize, outcome: u8) -> Result<Self> {
        validate_sites(self.n_qubits, &[site])?;
        let mask = 1usize << (self.n_qubits - 1 - site);
        let want = if outcome == 0 { 0 } else { mask };
        let d = self.dim();
        let mut data = self.data.clone();
        for r in 0..d {
            for c in 0..d {
                if r & mask != want || c & mask != want {
                    data[r * d + c] = ZERO;
                }
            }
        }
        Ok(Self { n_qubits: self.n_qubits, data, branch: true })
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
        self.branch = true;
    }

    /// Accumulates another branch of the same register.
    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Dimension(format!("{} vs {} qubits", self.n_qubits, other.n_qubits)));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!("{} vs {} qubits", psi.n_qubits(), self.n_qubits)));
        }
        let a = psi.amplitudes();
        let d = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..d {
            if a[r] == ZERO {
                continue;
            }
            let row: C64 = (0..d).map(|c| self.data[r * d + c] * a[c]).sum();
            acc += a[r].conj() * row;
        }
        Ok(acc.re)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        min_eigenvalue(&self.to_matrix())
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eigenvalues(m)?;
    Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
}

fn check_cap(n: usize) -> Result<()> {
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::QubitCap { requested: n, limit: MAX_DENSITY_QUBITS });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::gates;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn bell() -> DensityMatrix {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let psi = StateVector::from_amplitudes(vec![s, ZERO, ZERO, s]).unwrap();
        DensityMatrix::from_pure(&psi).unwrap()
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let r = bell().partial_trace(&[0]).unwrap();
        assert!(r.to_matrix().max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap().to_matrix()) < 1e-15);
    }

    #[test]
    fn keeping_everything_is_identity() {
        let b = bell();
        assert_eq!(b.partial_trace(&[0, 1]).unwrap(), b);
    }

    #[test]
    fn trace_out_first_qubit_of_10() {
        let rho = DensityMatrix::from_pure(&StateVector::basis(2, 0b10).unwrap()).unwrap();
        let r = rho.partial_trace(&[1]).unwrap();
        let zero = DensityMatrix::from_pure(&StateVector::zero(1).unwrap()).unwrap();
        assert_eq!(r, zero);
    }

    #[test]
    fn empty_keep_is_rejected() {
        assert!(bell().partial_trace(&[]).is_err());
    }

    #[test]
    fn u_gate_at_pi_flips_zero() {
        let mut rho = DensityMatrix::zero(1).unwrap();
        rho.apply_local(&gates::u_gate(PI, 0.0, 0.0), &[0]).unwrap();
        assert!((rho.get(1, 1).re - 1.0).abs() < 1e-15);
        assert!(rho.get(0, 0).norm() < 1e-15);
    }

    #[test]
    fn min_eigenvalues_of_simple_states() {
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((mixed.min_eigenvalue().unwrap() - 0.5).abs() < 1e-12);
        let pure = DensityMatrix::zero(1).unwrap();
        assert!(pure.min_eigenvalue().unwrap().abs() < 1e-12);
        let d = ComplexMatrix::diagonal(&[C64::new(0.9, 0.0), C64::new(0.1, 0.0)]);
        assert!((min_eigenvalue(&d).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn projection_is_a_branch() {
        let p = bell().project(0, 1).unwrap();
        assert!(p.is_branch());
        assert!((p.trace() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn from_matrix_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows([[0.5, 0.3], [0.0, 0.5]]);
        assert!(matches!(DensityMatrix::from_matrix(m), Err(Error::NotHermitian(_))));
    }
}
