//! Standard gate matrices.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::linalg::{ComplexMatrix, C64};

pub fn identity() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows([
        [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        [C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    ])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]])
}

pub fn hadamard() -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows([[s, s], [s, -s]])
}

/// Controlled-NOT with the first site as control.
pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn cz() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ])
}

/// General single-qubit rotation
///
/// ```text
/// U(θ, φ, λ) = [ cos(θ/2)            -e^{iλ} sin(θ/2)      ]
///              [ e^{iφ} sin(θ/2)      e^{i(φ+λ)} cos(θ/2)  ]
/// ```
///
/// so that `U(θ, φ, 0)|0⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`. Its adjoint undoes
/// the preparation and serves as the disentangler.
pub fn u_gate(theta: f64, phi: f64, lam: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let ephi = C64::from_polar(1.0, phi);
    let elam = C64::from_polar(1.0, lam);
    ComplexMatrix::from_rows([
        [C64::new(c, 0.0), -elam * s],
        [ephi * s, ephi * elam * c],
    ])
}
