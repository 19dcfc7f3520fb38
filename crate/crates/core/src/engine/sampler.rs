use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{depolarizing_1q, gates};
use crate::circuit::{wrap_protocol, Circuit, CircuitOp};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, LocalLayout, StateVector, MAX_QUBITS};

use super::{ConditionalNoise, EvalResult, NoiseSpec, ReadoutMode};

enum Step {
    Unitary { op: ComplexMatrix, layout: LocalLayout, noisy: Vec<LocalLayout> },
    Measure { site: usize, cbit: usize },
    Conditional { op: ComplexMatrix, layout: LocalLayout, cbit: usize, trigger: u8, noisy: bool },
}

/// Unit-norm Kraus unitaries and their selection probabilities.
struct PauliMixture {
    ops: Vec<ComplexMatrix>,
    cumulative: Vec<f64>,
}

impl PauliMixture {
    fn depolarizing(p: f64) -> Result<Self> {
        let ch = depolarizing_1q(p)?;
        let weights = ch.mixed_unitary_weights().ok_or_else(|| Error::Noise("depolarizer is not mixed-unitary".into()))?;
        let ops = [gates::identity(), gates::pauli_x(), gates::pauli_y(), gates::pauli_z()].to_vec();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(Self { ops, cumulative })
    }

    fn apply(&self, psi: &mut StateVector, layout: &LocalLayout, rng: &mut ChaCha8Rng) {
        let u: f64 = rng.gen::<f64>() * self.cumulative.last().copied().unwrap_or(1.0);
        let k = self.cumulative.iter().position(|&c| u < c).unwrap_or(self.ops.len() - 1);
        if k != 0 {
            psi.apply_with_layout(&self.ops[k], layout);
        }
    }
}

/// Wraps `body` for the state `U(θ, φ, 0)|0⟩` and samples `shots` trajectories.
pub fn sample_shots(body: &Circuit, spec: &NoiseSpec, theta: f64, phi: f64, shots: u64, seed: u64) -> Result<EvalResult> {
    sample_wrapped(&wrap_protocol(body, theta, phi), spec, shots, seed)
}

/// Single-shot simulation: one statevector per shot, one Pauli drawn per
/// noise insertion, measurement outcomes drawn with Born probabilities and
/// recorded through the readout response. In exact-record mode conditionals
/// follow the recorded bit; in flip-channel mode they follow the true bit and
/// misfire independently with probability `q0` or `q1`.
pub fn sample_wrapped(wrapped: &Circuit, spec: &NoiseSpec, shots: u64, seed: u64) -> Result<EvalResult> {
    spec.validate()?;
    if shots == 0 {
        return Err(Error::Config("shots must be positive".into()));
    }
    let n = wrapped.n_qubits();
    if n > MAX_QUBITS {
        return Err(Error::QubitCap { requested: n, limit: MAX_QUBITS });
    }
    let (_, final_cbit) = wrapped
        .final_measurement()
        .ok_or_else(|| Error::Circuit("circuit has no final measurement to sample".into()))?;
    if wrapped.n_cbits() > 64 {
        return Err(Error::Circuit("at most 64 classical bits supported".into()));
    }
    let mut steps = Vec::with_capacity(wrapped.ops().len());
    for op in wrapped.ops() {
        let noisy = op.class().is_some_and(|c| spec.placement.applies_to(c)) && spec.p > 0.0;
        steps.push(match op {
            CircuitOp::Unitary { gate, sites, .. } => Step::Unitary {
                op: gate.matrix(),
                layout: LocalLayout::new(n, sites)?,
                noisy: if noisy {
                    sites.iter().map(|&s| LocalLayout::new(n, &[s])).collect::<Result<_>>()?
                } else {
                    Vec::new()
                },
            },
            CircuitOp::Measure { site, cbit } => Step::Measure { site: *site, cbit: *cbit },
            CircuitOp::Conditional { gate, site, cbit, trigger } => Step::Conditional {
                op: gate.matrix(),
                layout: LocalLayout::new(n, &[*site])?,
                cbit: *cbit,
                trigger: *trigger,
                noisy,
            },
        });
    }
    let noise = PauliMixture::depolarizing(spec.p)?;
    let readout = spec.readout();
    let flip = |bit: u8| if bit == 0 { readout.q0 } else { readout.q1 };
    let initial = StateVector::zero(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut zeros_recorded, mut zeros_true) = (0u64, 0u64);
    for _ in 0..shots {
        let mut psi = initial.clone();
        let (mut truth, mut record) = (0u64, 0u64);
        for step in &steps {
            match step {
                Step::Unitary { op, layout, noisy } => {
                    psi.apply_with_layout(op, layout);
                    for l in noisy {
                        noise.apply(&mut psi, l, &mut rng);
                    }
                }
                Step::Measure { site, cbit } => {
                    let p1 = psi.outcome_probability(*site, 1)?;
                    let o = u8::from(rng.gen::<f64>() < p1);
                    psi.collapse(*site, o)?;
                    let r = o ^ u8::from(rng.gen::<f64>() < flip(o));
                    truth = (truth & !(1 << cbit)) | (u64::from(o) << cbit);
                    record = (record & !(1 << cbit)) | (u64::from(r) << cbit);
                }
                Step::Conditional { op, layout, cbit, trigger, noisy } => {
                    let fires = match spec.readout_mode {
                        ReadoutMode::ExactRecord => (record >> cbit & 1) as u8 == *trigger,
                        ReadoutMode::FlipChannelApprox => {
                            let t = (truth >> cbit & 1) as u8;
                            (t == *trigger) ^ (rng.gen::<f64>() < flip(t))
                        }
                    };
                    if fires {
                        psi.apply_with_layout(op, layout);
                    }
                    if *noisy && (fires || spec.conditional_noise == ConditionalNoise::Always) {
                        noise.apply(&mut psi, layout, &mut rng);
                    }
                }
            }
        }
        zeros_recorded += u64::from(record >> final_cbit & 1 == 0);
        zeros_true += u64::from(truth >> final_cbit & 1 == 0);
    }
    let m0_recorded = zeros_recorded as f64 / shots as f64;
    let stderr = (m0_recorded * (1.0 - m0_recorded) / shots as f64).sqrt();
    Ok(EvalResult {
        m0_true: zeros_true as f64 / shots as f64,
        m0_recorded,
        fidelity: None,
        stderr: Some(stderr),
        shots: Some(shots),
        branch_count: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build, Scheme};

    #[test]
    fn noiseless_shots_always_succeed() {
        for s in Scheme::TRANSFER {
            let r = sample_shots(&build(s, 5).unwrap(), &NoiseSpec::noiseless(), 1.3, 0.2, 200, 7).unwrap();
            assert_eq!(r.m0_recorded, 1.0);
            assert_eq!(r.stderr, Some(0.0));
        }
    }

    #[test]
    fn same_seed_same_estimate() {
        let c = build(Scheme::Teleport, 3).unwrap();
        let spec = NoiseSpec::new(0.1, 0.1);
        let a = sample_shots(&c, &spec, 0.5, 0.5, 500, 42).unwrap();
        let b = sample_shots(&c, &spec, 0.5, 0.5, 500, 42).unwrap();
        assert_eq!(a, b);
        let c2 = sample_shots(&c, &spec, 0.5, 0.5, 500, 43).unwrap();
        assert_ne!(a.m0_recorded, c2.m0_recorded);
    }

    #[test]
    fn zero_shots_rejected() {
        let c = build(Scheme::Swap, 2).unwrap();
        assert!(sample_shots(&c, &NoiseSpec::noiseless(), 0.0, 0.0, 0, 1).is_err());
    }
}
