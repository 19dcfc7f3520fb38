use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channels::gates;
use crate::circuit::{Circuit, CircuitOp, OpClass, OpRole};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, StateVector, C64, MAX_DENSITY_QUBITS};

use super::exact::{recorded, run, Program};
use super::quadrature::try_bloch_average;
use super::{exact_eval, exact_fidelity, BranchWeighting, EvalResult, NoiseSpec, Quadrature, ReadoutMode};

/// The noisy body of a transfer protocol as a linear map from the input
/// qubit to the last qubit.
///
/// With Born-weighted branches the whole body is one CPTP map, so four runs
/// on a tomographically complete set of inputs determine the output for any
/// initial state. The initializer and disentangler, together with their
/// depolarizing channels, act on a single qubit and are applied analytically.
#[derive(Clone, Debug)]
pub struct TransferMap {
    /// Images of `I, X, Y, Z` (on qubit 0, rest `|0⟩`) reduced to the last qubit.
    images: [ComplexMatrix; 4],
    init_shrink: f64,
    disentangler_shrink: f64,
    spec: NoiseSpec,
    branch_count: usize,
}

/// Images of `I, X, Y, Z` on qubit 0 reduced to the last qubit, one set per
/// tracked register value, plus the peak branch count.
type Images = (BTreeMap<u64, [ComplexMatrix; 4]>, usize);

fn basis_images(body: &Circuit, spec: &NoiseSpec, n_cbits: usize, track: bool) -> Result<Images> {
    spec.validate()?;
    if spec.branch_weighting != BranchWeighting::Probability {
        return Err(Error::Noise("uniform branch weighting is not linear in the input state".into()));
    }
    let n = body.n_qubits();
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::QubitCap { requested: n, limit: MAX_DENSITY_QUBITS });
    }
    if body.final_measurement().is_some()
        || body.ops().iter().any(|op| matches!(op, CircuitOp::Unitary { role, .. } if *role != OpRole::Body))
    {
        return Err(Error::Circuit("transfer map expects an unwrapped scheme body".into()));
    }
    let program = Program::compile(n, n_cbits, body.ops(), spec)?;
    let h = gates::hadamard();
    let s = ComplexMatrix::diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
    let inputs = [
        StateVector::zero(n)?,
        StateVector::zero(n)?.with_local(&gates::pauli_x(), &[0])?,
        StateVector::zero(n)?.with_local(&h, &[0])?,
        StateVector::zero(n)?.with_local(&h, &[0])?.with_local(&s, &[0])?,
    ];
    let zero2 = || ComplexMatrix::diagonal(&[C64::new(0.0, 0.0); 2]);
    let mut outs: BTreeMap<u64, [ComplexMatrix; 4]> = BTreeMap::new();
    let mut branch_count = 0;
    for (k, psi) in inputs.iter().enumerate() {
        let set = run(&program, DensityMatrix::from_pure(psi)?, spec, track)?;
        branch_count = branch_count.max(set.peak);
        for (&(_, reg), rho) in &set.branches {
            let slot = outs.entry(reg).or_insert_with(|| [zero2(), zero2(), zero2(), zero2()]);
            slot[k] = slot[k].add(&rho.partial_trace(&[n - 1])?.to_matrix())?;
        }
    }
    let minus = C64::new(-1.0, 0.0);
    let images = outs
        .into_iter()
        .map(|(reg, [zero, one, plus, plus_i])| {
            let id = zero.add(&one)?;
            let minus_id = id.scale(minus);
            let two = C64::new(2.0, 0.0);
            let x = plus.scale(two).add(&minus_id)?;
            let y = plus_i.scale(two).add(&minus_id)?;
            let z = zero.add(&one.scale(minus))?;
            Ok((reg, [id, x, y, z]))
        })
        .collect::<Result<_>>()?;
    Ok((images, branch_count))
}

/// Combines images for the Bloch vector of `U(θ, φ, 0)|0⟩` shrunk by `shrink`.
fn combine(images: &[ComplexMatrix; 4], theta: f64, phi: f64, shrink: f64) -> ComplexMatrix {
    let r = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let mut out = images[0].scale(C64::new(0.5, 0.0));
    for (img, ri) in images[1..].iter().zip(r) {
        out = out.add(&img.scale(C64::new(0.5 * shrink * ri, 0.0))).expect("2x2");
    }
    out
}

/// `⟨0| U† ρ U |0⟩` for a possibly sub-normalized `ρ`.
fn overlap(rho: &ComplexMatrix, theta: f64, phi: f64) -> f64 {
    let u = gates::u_gate(theta, phi, 0.0);
    u.adjoint().matmul(rho).and_then(|m| m.matmul(&u)).expect("2x2")[(0, 0)].re
}

fn boundary_shrinks(spec: &NoiseSpec) -> (f64, f64) {
    let shrink = |class| if spec.placement.applies_to(class) { spec.shrink() } else { 1.0 };
    (shrink(OpClass::Init), shrink(OpClass::Disentangler))
}

impl TransferMap {
    pub fn new(body: &Circuit, spec: &NoiseSpec) -> Result<Self> {
        let (mut images, branch_count) = basis_images(body, spec, body.n_cbits(), false)?;
        let images = images.remove(&0).ok_or_else(|| Error::Invariant("no branch survived".into()))?;
        let (init_shrink, disentangler_shrink) = boundary_shrinks(spec);
        Ok(Self { images, init_shrink, disentangler_shrink, spec: *spec, branch_count })
    }

    /// State of the last qubit when qubit 0 starts in `U(θ, φ, 0)|0⟩`.
    pub fn output_state(&self, theta: f64, phi: f64) -> ComplexMatrix {
        combine(&self.images, theta, phi, self.init_shrink)
    }

    pub fn m0_true(&self, theta: f64, phi: f64) -> f64 {
        let m0 = overlap(&self.output_state(theta, phi), theta, phi);
        let l = self.disentangler_shrink;
        (l * m0 + (1.0 - l) * 0.5).clamp(0.0, 1.0)
    }

    pub fn fidelity(&self, theta: f64, phi: f64) -> f64 {
        let u = gates::u_gate(theta, phi, 0.0);
        let rho = self.output_state(theta, phi);
        let (a, b) = (u[(0, 0)], u[(1, 0)]);
        (a.conj() * (rho[(0, 0)] * a + rho[(0, 1)] * b) + b.conj() * (rho[(1, 0)] * a + rho[(1, 1)] * b)).re
    }

    pub fn eval(&self, theta: f64, phi: f64) -> EvalResult {
        let m0_true = self.m0_true(theta, phi);
        EvalResult {
            m0_true,
            m0_recorded: recorded(m0_true, &self.spec.readout()),
            fidelity: Some(self.fidelity(theta, phi)),
            stderr: None,
            shots: None,
            branch_count: self.branch_count,
        }
    }
}

/// Distribution of the full recorded register as a function of the initial
/// state, built from per-register-value transfer maps.
///
/// Agrees with [`register_distribution`](super::register_distribution) on the
/// wrapped circuit, at the cost of four branch enumerations in total.
#[derive(Clone, Debug)]
pub struct RegisterMap {
    images: BTreeMap<u64, [ComplexMatrix; 4]>,
    init_shrink: f64,
    disentangler_shrink: f64,
    spec: NoiseSpec,
    n_cbits: usize,
    final_cbit: usize,
    measured: u64,
}

impl RegisterMap {
    pub fn new(body: &Circuit, spec: &NoiseSpec) -> Result<Self> {
        let n = body.n_qubits();
        let n_cbits = body.n_cbits().max(n);
        if n_cbits > 20 {
            return Err(Error::Circuit(format!("{n_cbits} classical bits is too many for a dense distribution")));
        }
        let (images, _) = basis_images(body, spec, n_cbits, true)?;
        let measured = body
            .ops()
            .iter()
            .filter_map(|op| match op {
                CircuitOp::Measure { cbit, .. } => Some(1u64 << cbit),
                _ => None,
            })
            .fold(0, |a, b| a | b);
        let (init_shrink, disentangler_shrink) = boundary_shrinks(spec);
        Ok(Self { images, init_shrink, disentangler_shrink, spec: *spec, n_cbits, final_cbit: n - 1, measured })
    }

    pub fn distribution(&self, theta: f64, phi: f64) -> Vec<f64> {
        let readout = self.spec.readout();
        let l = self.disentangler_shrink;
        let fb = self.final_cbit;
        let mut dist = vec![0.0; 1 << self.n_cbits];
        for (&reg, images) in &self.images {
            let rho = combine(images, theta, phi, self.init_shrink);
            let tr = (rho[(0, 0)] + rho[(1, 1)]).re;
            let p0 = (l * overlap(&rho, theta, phi) + (1.0 - l) * 0.5 * tr).max(0.0);
            let p1 = (tr - p0).max(0.0);
            for (truth, w) in [(0u8, p0), (1u8, p1)] {
                for rec in 0..2u8 {
                    let idx = (reg & !(1 << fb)) | (u64::from(rec) << fb);
                    dist[idx as usize] += w * readout.transition(truth, rec);
                }
            }
        }
        if self.spec.readout_mode == ReadoutMode::FlipChannelApprox {
            for b in (0..self.n_cbits).filter(|&b| self.measured >> b & 1 == 1 && b != fb) {
                let mut out = vec![0.0; dist.len()];
                for (idx, &w) in dist.iter().enumerate() {
                    let truth = (idx >> b & 1) as u8;
                    for rec in 0..2u8 {
                        out[(idx & !(1 << b)) | (usize::from(rec) << b)] += w * readout.transition(truth, rec);
                    }
                }
                dist = out;
            }
        }
        dist
    }
}

/// Bloch-sphere averages of one (scheme body, noise) configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragedResult {
    pub m0_true: f64,
    pub m0_recorded: f64,
    pub fidelity: f64,
}

/// Averages success and fidelity over the Bloch sphere.
///
/// Uses a [`TransferMap`] when possible and falls back to evaluating every
/// quadrature node directly under uniform branch weighting.
pub fn averaged_eval(body: &Circuit, spec: &NoiseSpec, quad: Quadrature) -> Result<AveragedResult> {
    let (m0_true, fidelity) = if spec.branch_weighting == BranchWeighting::Probability {
        let map = TransferMap::new(body, spec)?;
        (
            try_bloch_average(|t, p| Ok(map.m0_true(t, p)), quad)?,
            try_bloch_average(|t, p| Ok(map.fidelity(t, p)), quad)?,
        )
    } else {
        (
            try_bloch_average(|t, p| exact_eval(body, spec, t, p).map(|r| r.m0_true), quad)?,
            try_bloch_average(|t, p| exact_fidelity(body, spec, t, p), quad)?,
        )
    };
    Ok(AveragedResult { m0_true, m0_recorded: recorded(m0_true, &spec.readout()), fidelity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build, NoisePlacement, Scheme};
    use crate::engine::{ConditionalNoise, ReadoutMode};

    #[test]
    fn map_matches_direct_evaluation() {
        let specs = [
            NoiseSpec::oracle_matched(0.08, 0.12),
            NoiseSpec::new(0.05, 0.2).with_readout_mode(ReadoutMode::ExactRecord),
            NoiseSpec { placement: NoisePlacement::CnotOnly, ..NoiseSpec::new(0.1, 0.05) },
            NoiseSpec { conditional_noise: ConditionalNoise::Always, ..NoiseSpec::new(0.3, 0.4) },
        ];
        for s in Scheme::TRANSFER {
            let c = build(s, 3).unwrap();
            for spec in &specs {
                let map = TransferMap::new(&c, spec).unwrap();
                for (t, f) in [(0.4, 1.9), (2.5, -0.7), (0.0, 0.0)] {
                    let direct = exact_eval(&c, spec, t, f).unwrap();
                    let fast = map.eval(t, f);
                    assert!((direct.m0_true - fast.m0_true).abs() < 1e-12, "{s} {spec:?}");
                    let fid = exact_fidelity(&c, spec, t, f).unwrap();
                    assert!((fid - fast.fidelity.unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn register_map_matches_branch_enumeration() {
        let specs = [
            NoiseSpec::oracle_matched(0.08, 0.12),
            NoiseSpec::new(0.05, 0.2).with_readout_mode(ReadoutMode::ExactRecord),
        ];
        for s in Scheme::TRANSFER {
            for n in [3, 5].into_iter().filter(|&n| s.supports(n)) {
                let c = build(s, n).unwrap();
                for spec in &specs {
                    let map = RegisterMap::new(&c, spec).unwrap();
                    for (t, f) in [(2.5, -0.7)] {
                        let want = crate::engine::register_distribution(&crate::circuit::wrap_protocol(&c, t, f), spec).unwrap();
                        let got = map.distribution(t, f);
                        let d = want.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                        assert!(d < 1e-12, "{s} n={n} {spec:?}: {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn uniform_weighting_falls_back() {
        let c = build(Scheme::Cluster, 3).unwrap();
        let spec = NoiseSpec { branch_weighting: BranchWeighting::Uniform, ..NoiseSpec::new(0.05, 0.05) };
        assert!(TransferMap::new(&c, &spec).is_err());
        let r = averaged_eval(&c, &spec, Quadrature::new(2, 3).unwrap()).unwrap();
        assert!(r.m0_true > 0.5 && r.m0_true < 1.0);
    }

    #[test]
    fn wrapped_circuit_is_rejected() {
        let c = crate::circuit::wrap_protocol(&build(Scheme::Swap, 2).unwrap(), 0.1, 0.1);
        assert!(TransferMap::new(&c, &NoiseSpec::noiseless()).is_err());
    }
}
