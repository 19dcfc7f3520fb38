use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitOp, OpRole};
use crate::error::{Error, Result};

/// Unitary folding `G → G (G† G)^k` over a subset of gate names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldSpec {
    /// Noise scale factor, at least 1.
    pub alpha: f64,
    /// Gate names eligible for folding, as in [`Gate::name`](crate::circuit::Gate::name).
    pub foldable: Vec<String>,
}

impl FoldSpec {
    /// Folds CNOT and H.
    pub fn new(alpha: f64) -> Self {
        Self { alpha, foldable: vec!["CNOT".into(), "H".into()] }
    }

    /// Fold count for each of `count` foldable gates in program order.
    ///
    /// The folded gate count is `round(α · count)` rounded down to the
    /// parity of `count`; the leftover folds beyond a uniform `k` go to the
    /// earliest gates.
    pub fn fold_counts(&self, count: usize) -> Result<Vec<usize>> {
        if !(self.alpha >= 1.0) || !self.alpha.is_finite() {
            return Err(Error::Config(format!("fold scale factor must be >= 1, got {}", self.alpha)));
        }
        if count == 0 {
            return Ok(Vec::new());
        }
        let target = (self.alpha * count as f64).round() as usize;
        let folds = (target - count) / 2;
        let (base, extra) = (folds / count, folds % count);
        Ok((0..count).map(|i| base + usize::from(i < extra)).collect())
    }
}

/// Returns a copy of `c` with every foldable body gate folded per `spec`.
/// Measurements, conditionals and the initializer/disentangler are untouched.
pub fn fold_circuit(c: &Circuit, spec: &FoldSpec) -> Result<Circuit> {
    let is_foldable = |op: &CircuitOp| {
        matches!(op, CircuitOp::Unitary { gate, role: OpRole::Body, .. } if spec.foldable.iter().any(|n| n == gate.name()))
    };
    let count = c.ops().iter().filter(|op| is_foldable(op)).count();
    let counts = spec.fold_counts(count)?;
    let mut next = counts.iter();
    let mut ops = Vec::with_capacity(c.ops().len());
    for op in c.ops() {
        ops.push(op.clone());
        if !is_foldable(op) {
            continue;
        }
        let CircuitOp::Unitary { gate, sites, role } = op else { unreachable!() };
        for _ in 0..*next.next().expect("one count per foldable gate") {
            ops.push(CircuitOp::Unitary { gate: gate.adjoint(), sites: sites.clone(), role: *role });
            ops.push(op.clone());
        }
    }
    Circuit::from_ops(c.n_qubits(), c.n_cbits(), c.scheme(), ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build, build_swap, Scheme};

    #[test]
    fn unit_scale_is_identity() {
        let c = build(Scheme::Teleport, 5).unwrap();
        assert_eq!(fold_circuit(&c, &FoldSpec::new(1.0)).unwrap(), c);
    }

    #[test]
    fn triple_scale_folds_every_gate_once() {
        let f = fold_circuit(&build_swap(3).unwrap(), &FoldSpec::new(3.0)).unwrap();
        assert_eq!(f.cnot_count(), 18);
    }

    #[test]
    fn fractional_scale_targets_earliest_gates() {
        let spec = FoldSpec::new(1.5);
        assert_eq!(spec.fold_counts(6).unwrap(), vec![1, 0, 0, 0, 0, 0]);
        assert_eq!(FoldSpec::new(2.0).fold_counts(6).unwrap(), vec![1, 1, 1, 0, 0, 0]);
        assert_eq!(FoldSpec::new(5.0).fold_counts(4).unwrap(), vec![2; 4]);
    }

    #[test]
    fn scale_below_one_rejected() {
        assert!(FoldSpec::new(0.5).fold_counts(3).is_err());
        assert!(FoldSpec::new(f64::NAN).fold_counts(3).is_err());
    }

    #[test]
    fn only_listed_gates_fold() {
        let c = build(Scheme::Cluster, 3).unwrap();
        let spec = FoldSpec { alpha: 3.0, foldable: vec!["H".into()] };
        let f = fold_circuit(&c, &spec).unwrap();
        assert_eq!((f.cnot_count(), f.count_gate("H")), (2, 6));
        assert_eq!(f.measure_count(), 2);
    }
}
