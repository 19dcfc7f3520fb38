//! Dense complex linear algebra for small qubit registers.
//!
//! Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of a
//! basis index. Every embedding in the crate follows this convention.

mod density;
mod eigen;
mod layout;
mod matrix;
mod state;

pub use density::{min_eigenvalue, DensityMatrix};
pub use eigen::hermitian_eigenvalues;
pub use matrix::{kron, ComplexMatrix, C64};
pub use state::StateVector;

pub(crate) use layout::LocalLayout;

use crate::error::{Error, Result};

/// Largest register a state vector may hold.
pub const MAX_QUBITS: usize = 13;

/// Largest register evolved as a dense density matrix.
pub const MAX_DENSITY_QUBITS: usize = 8;

pub(crate) fn check_op_dim(op: &ComplexMatrix, sites: &[usize]) -> Result<()> {
    let want = 1usize << sites.len();
    if !op.is_square() || op.rows() != want {
        return Err(Error::Dimension(format!(
            "{}x{} operator on {} sites (needs {want}x{want})",
            op.rows(),
            op.cols(),
            sites.len()
        )));
    }
    Ok(())
}
