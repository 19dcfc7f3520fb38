use std::collections::BTreeMap;

use crate::channels::{depolarizing_1q, ReadoutModel};
use crate::circuit::{wrap_fidelity, wrap_protocol, Circuit, CircuitOp, Gate};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, LocalLayout, StateVector, MAX_DENSITY_QUBITS};

use super::{BranchWeighting, ConditionalNoise, EvalResult, NoiseSpec, ReadoutMode};

const BRANCH_SUM_TOL: f64 = 1e-12;

/// Outcomes with less probability than this are dropped from the branch set.
const NEGLIGIBLE: f64 = 1e-300;

/// A compiled op with its layouts resolved once.
enum Step {
    Unitary { op: ComplexMatrix, layout: LocalLayout, noisy: Vec<LocalLayout> },
    Measure { site: usize, cbit: usize },
    Conditional { op: ComplexMatrix, layout: LocalLayout, cbit: usize, trigger: u8, noisy: bool },
}

pub(crate) struct Program {
    steps: Vec<Step>,
    /// Bits some later conditional still reads, after each step.
    live_after: Vec<u64>,
}

impl Program {
    pub fn compile(n_qubits: usize, n_cbits: usize, ops: &[CircuitOp], spec: &NoiseSpec) -> Result<Self> {
        if n_cbits > 64 {
            return Err(Error::Circuit(format!("{n_cbits} classical bits, at most 64 supported")));
        }
        let mut steps = Vec::with_capacity(ops.len());
        for op in ops {
            let noisy = op.class().is_some_and(|c| spec.placement.applies_to(c)) && spec.p > 0.0;
            steps.push(match op {
                CircuitOp::Unitary { gate, sites, .. } => Step::Unitary {
                    op: gate.matrix(),
                    layout: LocalLayout::new(n_qubits, sites)?,
                    noisy: if noisy {
                        sites.iter().map(|&s| LocalLayout::new(n_qubits, &[s])).collect::<Result<_>>()?
                    } else {
                        Vec::new()
                    },
                },
                CircuitOp::Measure { site, cbit } => Step::Measure { site: *site, cbit: *cbit },
                CircuitOp::Conditional { gate, site, cbit, trigger } => Step::Conditional {
                    op: gate.matrix(),
                    layout: LocalLayout::new(n_qubits, &[*site])?,
                    cbit: *cbit,
                    trigger: *trigger,
                    noisy,
                },
            });
        }
        let mut live_after = vec![0u64; ops.len()];
        let mut live = 0u64;
        for (i, op) in ops.iter().enumerate().rev() {
            live_after[i] = live;
            match op {
                CircuitOp::Conditional { cbit, .. } => live |= 1 << cbit,
                CircuitOp::Measure { cbit, .. } => live &= !(1 << cbit),
                CircuitOp::Unitary { .. } => {}
            }
        }
        Ok(Self { steps, live_after })
    }
}

fn bit(word: u64, b: usize) -> u8 {
    (word >> b & 1) as u8
}

fn set_bit(word: u64, b: usize, v: u8) -> u64 {
    (word & !(1 << b)) | (u64::from(v) << b)
}

/// Sub-normalized branch states keyed by (decision bits, register bits).
pub(crate) struct BranchSet {
    pub branches: BTreeMap<(u64, u64), DensityMatrix>,
    pub peak: usize,
}

impl BranchSet {
    pub fn total(&self) -> Result<DensityMatrix> {
        let mut it = self.branches.values();
        let mut acc = it.next().ok_or_else(|| Error::Invariant("no branches left".into()))?.clone();
        for b in it {
            acc.add_assign(b)?;
        }
        Ok(acc)
    }

    pub fn check_sum(&self) -> Result<()> {
        let sum: f64 = self.branches.values().map(DensityMatrix::trace).sum();
        if (sum - 1.0).abs() > BRANCH_SUM_TOL {
            return Err(Error::Invariant(format!("branch probabilities sum to {sum}")));
        }
        Ok(())
    }
}

/// Runs `program` from `initial`, tracking register bits when `track` is set.
pub(crate) fn run(program: &Program, initial: DensityMatrix, spec: &NoiseSpec, track: bool) -> Result<BranchSet> {
    spec.validate()?;
    let depol = depolarizing_1q(spec.p)?;
    let kraus = depol.operators();
    let readout = spec.readout();
    let mut branches: BTreeMap<(u64, u64), DensityMatrix> = BTreeMap::new();
    branches.insert((0, 0), initial);
    let mut peak = 1;
    for (step, &live) in program.steps.iter().zip(&program.live_after) {
        let mut next: BTreeMap<(u64, u64), DensityMatrix> = BTreeMap::new();
        let mut emit = |key: u64, reg: u64, rho: DensityMatrix| -> Result<()> {
            let k = (key & live, if track { reg } else { 0 });
            match next.get_mut(&k) {
                Some(acc) => acc.add_assign(&rho),
                None => {
                    next.insert(k, rho);
                    Ok(())
                }
            }
        };
        for ((key, reg), mut rho) in branches {
            match step {
                Step::Unitary { op, layout, noisy } => {
                    rho.apply_kraus_with_layout(std::slice::from_ref(op), layout);
                    for l in noisy {
                        rho.apply_kraus_with_layout(kraus, l);
                    }
                    emit(key, reg, rho)?;
                }
                Step::Measure { site, cbit } => {
                    let parent = rho.trace();
                    let probs = [rho.outcome_probability(*site, 0)?, rho.outcome_probability(*site, 1)?];
                    let support = probs.iter().filter(|&&p| p > NEGLIGIBLE).count();
                    for o in 0..2u8 {
                        let pr = probs[o as usize];
                        if pr <= NEGLIGIBLE {
                            continue;
                        }
                        let mut child = rho.project(*site, o)?;
                        if spec.branch_weighting == BranchWeighting::Uniform {
                            child.scale(parent / (support as f64 * pr));
                        }
                        match spec.readout_mode {
                            ReadoutMode::FlipChannelApprox => {
                                emit(set_bit(key, *cbit, o), set_bit(reg, *cbit, o), child)?;
                            }
                            ReadoutMode::ExactRecord => {
                                for r in 0..2u8 {
                                    let w = readout.transition(o, r);
                                    if w <= 0.0 {
                                        continue;
                                    }
                                    let mut rec = child.clone();
                                    rec.scale(w);
                                    emit(set_bit(key, *cbit, r), set_bit(reg, *cbit, r), rec)?;
                                }
                            }
                        }
                    }
                }
                Step::Conditional { op, layout, cbit, trigger, noisy } => {
                    let v = bit(key, *cbit);
                    let fires = v == *trigger;
                    let path = |fire: bool| {
                        let mut r = rho.clone();
                        if fire {
                            r.apply_kraus_with_layout(std::slice::from_ref(op), layout);
                        }
                        if *noisy && (fire || spec.conditional_noise == ConditionalNoise::Always) {
                            r.apply_kraus_with_layout(kraus, layout);
                        }
                        r
                    };
                    let misfire = match spec.readout_mode {
                        ReadoutMode::FlipChannelApprox => {
                            if v == 0 {
                                readout.q0
                            } else {
                                readout.q1
                            }
                        }
                        ReadoutMode::ExactRecord => 0.0,
                    };
                    let mut out = path(fires);
                    if misfire > 0.0 {
                        let mut wrong = path(!fires);
                        out.scale(1.0 - misfire);
                        wrong.scale(misfire);
                        out.add_assign(&wrong)?;
                    }
                    emit(key, reg, out)?;
                }
            }
        }
        branches = next;
        peak = peak.max(branches.len());
    }
    let set = BranchSet { branches, peak };
    set.check_sum()?;
    Ok(set)
}

fn check_density_cap(c: &Circuit) -> Result<()> {
    if c.n_qubits() > MAX_DENSITY_QUBITS {
        return Err(Error::QubitCap { requested: c.n_qubits(), limit: MAX_DENSITY_QUBITS });
    }
    Ok(())
}

/// Splits off a trailing measurement.
fn split_final(c: &Circuit) -> Result<(&[CircuitOp], usize)> {
    let (site, _) = c
        .final_measurement()
        .ok_or_else(|| Error::Circuit("circuit has no final measurement to evaluate".into()))?;
    Ok((&c.ops()[..c.ops().len() - 1], site))
}

/// Exact success probability of a wrapped circuit ending in a measurement.
pub fn evaluate(wrapped: &Circuit, spec: &NoiseSpec) -> Result<EvalResult> {
    check_density_cap(wrapped)?;
    let (body, site) = split_final(wrapped)?;
    let program = Program::compile(wrapped.n_qubits(), wrapped.n_cbits(), body, spec)?;
    let set = run(&program, DensityMatrix::zero(wrapped.n_qubits())?, spec, false)?;
    let m0_true = set.total()?.outcome_probability(site, 0)?.clamp(0.0, 1.0);
    let m0_recorded = recorded(m0_true, &spec.readout());
    Ok(EvalResult { m0_true, m0_recorded, fidelity: None, stderr: None, shots: None, branch_count: set.peak })
}

pub(crate) fn recorded(m0_true: f64, readout: &ReadoutModel) -> f64 {
    (1.0 - readout.q0) * m0_true + readout.q1 * (1.0 - m0_true)
}

/// Wraps `body` with initializer, disentangler and final measurement, then
/// evaluates it exactly.
pub fn exact_eval(body: &Circuit, spec: &NoiseSpec, theta: f64, phi: f64) -> Result<EvalResult> {
    evaluate(&wrap_protocol(body, theta, phi), spec)
}

/// `⟨τ|ρ_last|τ⟩` for the state left on the last qubit when the disentangler
/// and final measurement are omitted.
pub fn exact_fidelity(body: &Circuit, spec: &NoiseSpec, theta: f64, phi: f64) -> Result<f64> {
    check_density_cap(body)?;
    let wrapped = wrap_fidelity(body, theta, phi);
    let program = Program::compile(wrapped.n_qubits(), wrapped.n_cbits(), wrapped.ops(), spec)?;
    let set = run(&program, DensityMatrix::zero(wrapped.n_qubits())?, spec, false)?;
    let last = set.total()?.partial_trace(&[body.n_qubits() - 1])?;
    let tau = StateVector::zero(1)?.with_local(&Gate::U { theta, phi, lam: 0.0 }.matrix(), &[0])?;
    last.expectation(&tau)
}

/// Distribution of the full recorded classical register of a wrapped circuit,
/// indexed so that classical bit `k` is bit `k` of the index.
///
/// Every measured bit passes through the readout response: mid-circuit bits
/// as recorded (exact-record) or via `Λ` on the true bit (flip-channel mode),
/// and the final bit via `Λ` in both modes.
pub fn register_distribution(wrapped: &Circuit, spec: &NoiseSpec) -> Result<Vec<f64>> {
    check_density_cap(wrapped)?;
    let (body, site) = split_final(wrapped)?;
    let (_, final_cbit) = wrapped.final_measurement().expect("checked by split_final");
    let n_cbits = wrapped.n_cbits();
    if n_cbits > 20 {
        return Err(Error::Circuit(format!("{n_cbits} classical bits is too many for a dense distribution")));
    }
    let mut measured = 0u64;
    for op in body {
        if let CircuitOp::Measure { cbit, .. } = op {
            measured |= 1 << cbit;
        }
    }
    let program = Program::compile(wrapped.n_qubits(), n_cbits, body, spec)?;
    let set = run(&program, DensityMatrix::zero(wrapped.n_qubits())?, spec, true)?;
    let readout = spec.readout();
    let mut dist = vec![0.0; 1 << n_cbits];
    for (&(_, reg), rho) in &set.branches {
        let p0 = rho.outcome_probability(site, 0)?.max(0.0);
        let p1 = (rho.trace() - p0).max(0.0);
        for (truth, w) in [(0u8, p0), (1u8, p1)] {
            for rec in 0..2u8 {
                let idx = set_bit(reg, final_cbit, rec) as usize;
                dist[idx] += w * readout.transition(truth, rec);
            }
        }
    }
    if spec.readout_mode == ReadoutMode::FlipChannelApprox {
        for b in (0..n_cbits).filter(|&b| measured >> b & 1 == 1 && b != final_cbit) {
            let mut out = vec![0.0; dist.len()];
            for (idx, &w) in dist.iter().enumerate() {
                let truth = bit(idx as u64, b);
                for rec in 0..2u8 {
                    out[set_bit(idx as u64, b, rec) as usize] += w * readout.transition(truth, rec);
                }
            }
            dist = out;
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build, build_swap, NoisePlacement, Scheme};

    #[test]
    fn noiseless_transfer_succeeds_for_every_scheme() {
        for s in Scheme::TRANSFER {
            for n in [3, 5] {
                let c = build(s, n).unwrap();
                for (t, f) in [(0.0, 0.0), (std::f64::consts::PI, 0.0), (1.1, 2.3)] {
                    let r = exact_eval(&c, &NoiseSpec::noiseless(), t, f).unwrap();
                    assert!((r.m0_recorded - 1.0).abs() < 1e-12, "{s} n={n}: {}", r.m0_recorded);
                    let fid = exact_fidelity(&c, &NoiseSpec::noiseless(), t, f).unwrap();
                    assert!((fid - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn full_depolarizing_gives_a_coin() {
        let c = build_swap(3).unwrap();
        let spec = NoiseSpec::new(0.75, 0.0);
        let r = exact_eval(&c, &spec, 0.7, 0.2).unwrap();
        assert!((r.m0_true - 0.5).abs() < 1e-12);
    }

    #[test]
    fn record_modes_agree_without_readout_error() {
        for s in Scheme::TRANSFER {
            let c = build(s, 3).unwrap();
            let a = NoiseSpec::oracle_matched(0.07, 0.0);
            let b = a.with_readout_mode(ReadoutMode::ExactRecord);
            let ra = exact_eval(&c, &a, 0.9, 0.4).unwrap();
            let rb = exact_eval(&c, &b, 0.9, 0.4).unwrap();
            assert!((ra.m0_true - rb.m0_true).abs() < 1e-12);
        }
    }

    #[test]
    fn register_distribution_is_normalized() {
        let c = wrap_protocol(&build(Scheme::Teleport, 3).unwrap(), 0.5, 0.5);
        for mode in [ReadoutMode::FlipChannelApprox, ReadoutMode::ExactRecord] {
            let spec = NoiseSpec::new(0.05, 0.1).with_readout_mode(mode);
            let d = register_distribution(&c, &spec).unwrap();
            assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let m0: f64 = d.iter().enumerate().filter(|(i, _)| i >> 2 & 1 == 0).map(|(_, w)| w).sum();
            assert!((m0 - evaluate(&c, &spec).unwrap().m0_recorded).abs() < 1e-12);
        }
    }

    #[test]
    fn branches_merge_once_bits_are_consumed() {
        let c = build(Scheme::Cluster, 5).unwrap();
        let r = exact_eval(&c, &NoiseSpec::new(0.01, 0.02), 0.3, 0.3).unwrap();
        assert!(r.branch_count <= 2, "{}", r.branch_count);
    }

    #[test]
    fn density_cap_is_enforced() {
        let c = build_swap(9).unwrap();
        assert!(matches!(exact_eval(&c, &NoiseSpec::noiseless(), 0.0, 0.0), Err(Error::QubitCap { .. })));
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let c = build_swap(2).unwrap();
        assert!(exact_eval(&c, &NoiseSpec::new(1.5, 0.0), 0.0, 0.0).is_err());
        let spec = NoiseSpec { kappa: 3.0, ..NoiseSpec::new(0.0, 0.5) };
        assert!(exact_eval(&c, &spec, 0.0, 0.0).is_err());
    }

    #[test]
    fn uniform_weighting_preserves_total_probability() {
        let c = build(Scheme::Teleport, 3).unwrap();
        let spec = NoiseSpec { branch_weighting: BranchWeighting::Uniform, ..NoiseSpec::new(0.1, 0.1) };
        let r = exact_eval(&c, &spec, 1.0, 0.0).unwrap();
        assert!((0.0..=1.0).contains(&r.m0_recorded));
    }

    #[test]
    fn cnot_only_placement_ignores_single_qubit_gates() {
        let c = build(Scheme::Cluster, 3).unwrap();
        let spec = NoiseSpec { placement: NoisePlacement::CnotOnly, ..NoiseSpec::new(0.2, 0.0) };
        let a = exact_eval(&c, &spec, 0.0, 0.0).unwrap();
        let b = exact_eval(&c, &NoiseSpec::new(0.2, 0.0), 0.0, 0.0).unwrap();
        assert!(a.m0_true > b.m0_true);
    }
}
