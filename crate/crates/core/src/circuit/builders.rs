use crate::error::{Error, Result};

use super::{Circuit, CircuitOp, Gate, OpRole, Scheme};

fn cond(gate: Gate, site: usize, cbit: usize) -> CircuitOp {
    CircuitOp::Conditional { gate, site, cbit, trigger: 1 }
}

fn measure(site: usize) -> CircuitOp {
    CircuitOp::Measure { site, cbit: site }
}

/// Successive nearest-neighbour swaps, each kept as three alternating CNOTs.
pub fn build_swap(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Circuit(format!("swap chain needs at least 2 qubits, got {n}")));
    }
    let mut c = Circuit::new(n, n, Scheme::Swap);
    for k in 0..n - 1 {
        c.push(CircuitOp::gate(Gate::Cnot, &[k, k + 1]));
        c.push(CircuitOp::gate(Gate::Cnot, &[k + 1, k]));
        c.push(CircuitOp::gate(Gate::Cnot, &[k, k + 1]));
    }
    Ok(c)
}

/// Hop-by-hop teleportation. Each hop uses the next two qubits as Bell pair,
/// so the chain length must be odd.
pub fn build_teleport(n: usize) -> Result<Circuit> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Circuit(format!(
            "teleport needs an odd chain of at least 3 qubits (each hop consumes a Bell pair), got {n}"
        )));
    }
    let mut c = Circuit::new(n, n, Scheme::Teleport);
    for source in (0..n - 1).step_by(2) {
        let (ancilla, target) = (source + 1, source + 2);
        c.push(CircuitOp::gate(Gate::H, &[ancilla]));
        c.push(CircuitOp::gate(Gate::Cnot, &[ancilla, target]));
        c.push(CircuitOp::gate(Gate::Cnot, &[source, ancilla]));
        c.push(CircuitOp::gate(Gate::H, &[source]));
        c.push(measure(ancilla));
        c.push(measure(source));
        c.push(cond(Gate::X, target, ancilla));
        c.push(cond(Gate::Z, target, source));
    }
    Ok(c)
}

/// GHZ channel on qubits `1..n`, a Bell measurement of qubits 0 and 1, then
/// X-basis measurements down the chain.
///
/// The X correction fans out from qubit 1's bit to every remaining GHZ qubit;
/// Z corrections chain from each measured qubit to its right neighbour. For
/// `n = 3` the op list is exactly the single-hop teleport.
pub fn build_ghz(n: usize) -> Result<Circuit> {
    if n < 3 {
        return Err(Error::Circuit(format!("ghz chain needs at least 3 qubits, got {n}")));
    }
    let mut c = Circuit::new(n, n, Scheme::Ghz);
    c.push(CircuitOp::gate(Gate::H, &[1]));
    c.push(CircuitOp::gate(Gate::Cnot, &[1, 2]));
    c.push(CircuitOp::gate(Gate::Cnot, &[0, 1]));
    for k in 2..n - 1 {
        c.push(CircuitOp::gate(Gate::Cnot, &[k, k + 1]));
    }
    c.push(CircuitOp::gate(Gate::H, &[0]));
    c.push(measure(1));
    c.push(measure(0));
    for target in 2..n {
        c.push(cond(Gate::X, target, 1));
    }
    c.push(cond(Gate::Z, 2, 0));
    for k in 2..n - 1 {
        c.push(CircuitOp::gate(Gate::H, &[k]));
        c.push(measure(k));
        c.push(cond(Gate::Z, k + 1, k));
    }
    Ok(c)
}

/// One-bit teleportation repeated along the chain (CNOT form of the cluster protocol).
pub fn build_cluster(n: usize) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Circuit(format!("cluster chain needs at least 2 qubits, got {n}")));
    }
    let mut c = Circuit::new(n, n, Scheme::Cluster);
    for k in 0..n - 1 {
        c.push(CircuitOp::gate(Gate::Cnot, &[k, k + 1]));
        c.push(CircuitOp::gate(Gate::H, &[k]));
        c.push(measure(k));
        c.push(cond(Gate::Z, k + 1, k));
    }
    Ok(c)
}

pub fn build(scheme: Scheme, n: usize) -> Result<Circuit> {
    match scheme {
        Scheme::Swap => build_swap(n),
        Scheme::Teleport => build_teleport(n),
        Scheme::Ghz => build_ghz(n),
        Scheme::Cluster => build_cluster(n),
        Scheme::Custom => Err(Error::Circuit("custom circuits have no builder".into())),
    }
}

/// Prepends the initializer `U(θ, φ, 0)` on qubit 0 and appends its inverse
/// plus a final measurement on the last qubit.
pub fn wrap_protocol(c: &Circuit, theta: f64, phi: f64) -> Circuit {
    let mut out = wrap_fidelity(c, theta, phi);
    let last = c.n_qubits() - 1;
    out.push(CircuitOp::Unitary {
        gate: Gate::Udg { theta, phi, lam: 0.0 },
        sites: vec![last],
        role: OpRole::Disentangler,
    });
    out.push(CircuitOp::Measure { site: last, cbit: last });
    out
}

/// Initializer only: the transferred state is left on the last qubit.
pub fn wrap_fidelity(c: &Circuit, theta: f64, phi: f64) -> Circuit {
    let mut out = Circuit::new(c.n_qubits(), c.n_cbits().max(c.n_qubits()), c.scheme());
    out.push(CircuitOp::Unitary { gate: Gate::U { theta, phi, lam: 0.0 }, sites: vec![0], role: OpRole::Init });
    out.ops_mut().extend(c.ops().iter().cloned());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_ok(c: &Circuit) {
        c.validate().unwrap();
        for op in c.ops() {
            if let CircuitOp::Unitary { sites, .. } = op {
                if sites.len() == 2 {
                    assert_eq!(sites[0].abs_diff(sites[1]), 1);
                }
            }
        }
    }

    #[test]
    fn swap_counts() {
        for (n, cnots) in [(2, 3), (3, 6), (5, 12)] {
            let c = build_swap(n).unwrap();
            assert_eq!(c.cnot_count(), cnots);
            assert_eq!(c.measure_count(), 0);
            chain_ok(&c);
        }
        assert!(build_swap(1).is_err());
    }

    #[test]
    fn teleport_counts() {
        let c = build_teleport(3).unwrap();
        assert_eq!((c.cnot_count(), c.measure_count()), (2, 2));
        assert_eq!((c.conditional_count("X"), c.conditional_count("Z")), (1, 1));
        let c = build_teleport(5).unwrap();
        assert_eq!((c.cnot_count(), c.measure_count()), (4, 4));
        chain_ok(&c);
        let err = build_teleport(4).unwrap_err().to_string();
        assert!(err.contains("odd"), "{err}");
    }

    #[test]
    fn ghz_counts() {
        let c = build_ghz(5).unwrap();
        assert_eq!((c.cnot_count(), c.measure_count(), c.conditional_count("X")), (4, 4, 3));
        assert_eq!(c.conditional_count("Z"), 3);
        chain_ok(&c);
        assert!(build_ghz(2).is_err());
    }

    #[test]
    fn ghz3_matches_teleport3() {
        assert_eq!(build_ghz(3).unwrap().ops(), build_teleport(3).unwrap().ops());
    }

    #[test]
    fn cluster_counts() {
        let c = build_cluster(5).unwrap();
        assert_eq!((c.cnot_count(), c.measure_count(), c.conditional_count("Z")), (4, 4, 4));
        let c = build_cluster(3).unwrap();
        assert_eq!((c.cnot_count(), c.measure_count()), (2, 2));
        assert_eq!(build_cluster(2).unwrap().ops().len(), 4);
        chain_ok(&c);
    }

    #[test]
    fn measurement_schemes_use_fewer_cnots_than_swap() {
        for n in [3usize, 5, 7, 9] {
            let swap = build_swap(n).unwrap().cnot_count();
            assert_eq!(swap, 3 * (n - 1));
            for s in [Scheme::Teleport, Scheme::Ghz, Scheme::Cluster] {
                let k = build(s, n).unwrap().cnot_count();
                assert_eq!(k, n - 1);
                assert!(k < swap);
            }
        }
    }

    #[test]
    fn wrap_adds_boundary_ops() {
        let c = build_swap(3).unwrap();
        let w = wrap_protocol(&c, 0.3, 0.4);
        assert_eq!(w.ops().len(), c.ops().len() + 3);
        assert_eq!(w.final_measurement(), Some((2, 2)));
        w.validate().unwrap();
        let f = wrap_fidelity(&c, 0.3, 0.4);
        assert_eq!(f.ops().len(), c.ops().len() + 1);
        assert_eq!(f.final_measurement(), None);
    }
}
