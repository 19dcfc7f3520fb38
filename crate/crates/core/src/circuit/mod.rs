//! Circuit representation with mid-circuit measurement and classically
//! conditioned gates, plus builders for the four transfer schemes.

mod builders;
mod placement;
mod text;

pub use builders::{build, build_cluster, build_ghz, build_swap, build_teleport, wrap_fidelity, wrap_protocol};
pub use placement::{NoisePlacement, OpClassMask};
pub use text::{parse_circuit, write_circuit};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::gates;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Swap,
    Teleport,
    Ghz,
    Cluster,
    Custom,
}

impl Scheme {
    pub const TRANSFER: [Scheme; 4] = [Scheme::Swap, Scheme::Teleport, Scheme::Ghz, Scheme::Cluster];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Swap => "swap",
            Scheme::Teleport => "teleport",
            Scheme::Ghz => "ghz",
            Scheme::Cluster => "cluster",
            Scheme::Custom => "custom",
        }
    }

    /// Whether the builder accepts a chain of `n` qubits.
    pub fn supports(self, n: usize) -> bool {
        match self {
            Scheme::Swap | Scheme::Cluster => n >= 2,
            Scheme::Teleport => n >= 3 && n % 2 == 1,
            Scheme::Ghz => n >= 3,
            Scheme::Custom => n >= 1,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "swap" => Ok(Scheme::Swap),
            "teleport" | "teleportation" => Ok(Scheme::Teleport),
            "ghz" => Ok(Scheme::Ghz),
            "cluster" => Ok(Scheme::Cluster),
            "custom" => Ok(Scheme::Custom),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Gate identifiers. `U` is the general rotation and `Udg` its adjoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
    Cnot,
    Cz,
    U { theta: f64, phi: f64, lam: f64 },
    Udg { theta: f64, phi: f64, lam: f64 },
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot | Gate::Cz => 2,
            _ => 1,
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        match *self {
            Gate::X => gates::pauli_x(),
            Gate::Y => gates::pauli_y(),
            Gate::Z => gates::pauli_z(),
            Gate::H => gates::hadamard(),
            Gate::Cnot => gates::cnot(),
            Gate::Cz => gates::cz(),
            Gate::U { theta, phi, lam } => gates::u_gate(theta, phi, lam),
            Gate::Udg { theta, phi, lam } => gates::u_gate(theta, phi, lam).adjoint(),
        }
    }

    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::U { theta, phi, lam } => Gate::Udg { theta, phi, lam },
            Gate::Udg { theta, phi, lam } => Gate::U { theta, phi, lam },
            g => g,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::H => "H",
            Gate::Cnot => "CNOT",
            Gate::Cz => "CZ",
            Gate::U { .. } => "U",
            Gate::Udg { .. } => "UDG",
        }
    }
}

/// Where a unitary sits in the transfer protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpRole {
    Body,
    Init,
    Disentangler,
}

/// Operation classes noise placement policies select from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpClass {
    Init,
    Disentangler,
    Cnot,
    SingleQubit,
    Conditional,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitOp {
    Unitary { gate: Gate, sites: Vec<usize>, role: OpRole },
    Measure { site: usize, cbit: usize },
    Conditional { gate: Gate, site: usize, cbit: usize, trigger: u8 },
}

impl CircuitOp {
    pub fn gate(gate: Gate, sites: &[usize]) -> Self {
        CircuitOp::Unitary { gate, sites: sites.to_vec(), role: OpRole::Body }
    }

    pub fn class(&self) -> Option<OpClass> {
        match self {
            CircuitOp::Unitary { role: OpRole::Init, .. } => Some(OpClass::Init),
            CircuitOp::Unitary { role: OpRole::Disentangler, .. } => Some(OpClass::Disentangler),
            CircuitOp::Unitary { gate, .. } if gate.arity() == 2 => Some(OpClass::Cnot),
            CircuitOp::Unitary { .. } => Some(OpClass::SingleQubit),
            CircuitOp::Conditional { .. } => Some(OpClass::Conditional),
            CircuitOp::Measure { .. } => None,
        }
    }

    /// Qubits the op touches.
    pub fn sites(&self) -> Vec<usize> {
        match self {
            CircuitOp::Unitary { sites, .. } => sites.clone(),
            CircuitOp::Measure { site, .. } | CircuitOp::Conditional { site, .. } => vec![*site],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_cbits: usize,
    ops: Vec<CircuitOp>,
    scheme: Scheme,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_cbits: usize, scheme: Scheme) -> Self {
        Self { n_qubits, n_cbits, ops: Vec::new(), scheme }
    }

    /// Builds a circuit from parts and checks every structural invariant.
    pub fn from_ops(n_qubits: usize, n_cbits: usize, scheme: Scheme, ops: Vec<CircuitOp>) -> Result<Self> {
        let c = Self { n_qubits, n_cbits, ops, scheme };
        c.validate()?;
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_cbits(&self) -> usize {
        self.n_cbits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub(crate) fn push(&mut self, op: CircuitOp) {
        self.ops.push(op);
    }

    pub(crate) fn ops_mut(&mut self) -> &mut Vec<CircuitOp> {
        &mut self.ops
    }

    pub fn count_gate(&self, name: &str) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, CircuitOp::Unitary { gate, .. } if gate.name() == name))
            .count()
    }

    pub fn cnot_count(&self) -> usize {
        self.count_gate("CNOT")
    }

    pub fn measure_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, CircuitOp::Measure { .. })).count()
    }

    pub fn conditional_count(&self, name: &str) -> usize {
        self.ops
            .iter()
            .filter(|op| matches!(op, CircuitOp::Conditional { gate, .. } if gate.name() == name))
            .count()
    }

    /// The trailing measurement of a wrapped protocol, if present.
    pub fn final_measurement(&self) -> Option<(usize, usize)> {
        match self.ops.last() {
            Some(&CircuitOp::Measure { site, cbit }) => Some((site, cbit)),
            _ => None,
        }
    }

    /// Checks site ranges, nearest-neighbour coupling and classical bit flow:
    /// every conditional reads a bit that was written earlier, and no bit is
    /// overwritten before it has been read.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        let mut written = vec![false; self.n_cbits];
        let mut unread = vec![false; self.n_cbits];
        for (i, op) in self.ops.iter().enumerate() {
            let sites = op.sites();
            crate::linalg::LocalLayout::new(n, &sites)
                .map_err(|e| Error::Circuit(format!("op {i}: {e}")))?;
            match op {
                CircuitOp::Unitary { gate, sites, .. } => {
                    if gate.arity() != sites.len() {
                        return Err(Error::Circuit(format!("op {i}: {} on {} sites", gate.name(), sites.len())));
                    }
                    if sites.len() == 2 && sites[0].abs_diff(sites[1]) != 1 {
                        return Err(Error::Circuit(format!(
                            "op {i}: {} on ({}, {}) is not nearest-neighbour",
                            gate.name(),
                            sites[0],
                            sites[1]
                        )));
                    }
                }
                CircuitOp::Measure { cbit, .. } => {
                    let b = *cbit;
                    if b >= self.n_cbits {
                        return Err(Error::Circuit(format!("op {i}: classical bit {b} not declared")));
                    }
                    if unread[b] {
                        return Err(Error::Circuit(format!("op {i}: bit c{b} overwritten before being read")));
                    }
                    written[b] = true;
                    unread[b] = true;
                }
                CircuitOp::Conditional { gate, cbit, trigger, .. } => {
                    let b = *cbit;
                    if gate.arity() != 1 {
                        return Err(Error::Circuit(format!("op {i}: conditional {} must be single-qubit", gate.name())));
                    }
                    if b >= self.n_cbits || !written[b] {
                        return Err(Error::Circuit(format!("op {i}: reads c{b} before it is written")));
                    }
                    if *trigger > 1 {
                        return Err(Error::Circuit(format!("op {i}: trigger value {trigger}")));
                    }
                    unread[b] = false;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_round_trips_through_strings() {
        for s in Scheme::TRANSFER {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        assert!("ring".parse::<Scheme>().is_err());
    }

    #[test]
    fn validate_rejects_long_range_cnot() {
        let ops = vec![CircuitOp::gate(Gate::Cnot, &[0, 2])];
        assert!(Circuit::from_ops(3, 0, Scheme::Custom, ops).is_err());
    }

    #[test]
    fn validate_rejects_read_before_write() {
        let ops = vec![CircuitOp::Conditional { gate: Gate::X, site: 1, cbit: 0, trigger: 1 }];
        assert!(Circuit::from_ops(2, 1, Scheme::Custom, ops).is_err());
    }

    #[test]
    fn validate_rejects_double_write() {
        let ops = vec![CircuitOp::Measure { site: 0, cbit: 0 }, CircuitOp::Measure { site: 1, cbit: 0 }];
        assert!(Circuit::from_ops(2, 1, Scheme::Custom, ops).is_err());
    }

    #[test]
    fn classes() {
        assert_eq!(CircuitOp::gate(Gate::Cnot, &[0, 1]).class(), Some(OpClass::Cnot));
        assert_eq!(CircuitOp::gate(Gate::H, &[0]).class(), Some(OpClass::SingleQubit));
        assert_eq!(CircuitOp::Measure { site: 0, cbit: 0 }.class(), None);
    }
}
