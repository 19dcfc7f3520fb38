use chainxfer::circuit::{build, Scheme};
use chainxfer::engine::{averaged_eval, NoiseSpec, Quadrature};
use chainxfer::mitigation::invert_readout;
use chainxfer::oracle::{self, nominal_success};

/// Readout-only teleportation: each mid-circuit bit is a fair coin misread
/// with mean probability `f = (1+κ)q/2`, giving Bloch shrinks
/// `(1−2f, (1−2f)², 1−2f)` on the transferred qubit.
fn teleport_readout_only(q: f64, kappa: f64) -> f64 {
    let s = 1.0 - (1.0 + kappa) * q;
    let m0bar = 0.5 + (2.0 * s + s * s) / 6.0;
    nominal_success(m0bar, q, kappa)
}

#[test]
fn teleport_readout_only_matches_independent_form() {
    let body = build(Scheme::Teleport, 3).unwrap();
    for q in [0.0, 0.05, 0.2, 0.6, 1.0] {
        for kappa in [0.0, 0.5, 1.0] {
            let spec = NoiseSpec { kappa, ..NoiseSpec::oracle_matched(0.0, q) };
            let engine = averaged_eval(&body, &spec, Quadrature::default()).unwrap().m0_recorded;
            let want = teleport_readout_only(q, kappa);
            assert!((engine - want).abs() < 1e-12, "q={q} kappa={kappa}: {engine} vs {want}");
            assert!((oracle::m_tilde_kappa(Scheme::Teleport, q, 0.0, kappa).unwrap() - want).abs() < 1e-12);
        }
    }
}

#[test]
fn frozen_derived_values() {
    assert!((teleport_readout_only(0.05, 0.5) - 0.929_617_187_5).abs() < 1e-12);
    assert!((oracle::m_tilde(Scheme::Swap, 0.05, 0.0).unwrap() - 0.975).abs() < 1e-15);
}

#[test]
fn published_swap_mitigation_row() {
    let (unmitigated, zne) = (0.95583, 0.99952);
    let q = oracle::solve_q(Scheme::Swap, unmitigated, 0.5).unwrap();
    assert!((q - 0.08834).abs() < 1e-12);
    let inv = invert_readout([zne, 1.0 - zne], 0.5 * q, q).unwrap();
    assert!((inv.probs[0] - 1.0).abs() < 1e-15);
    assert!(inv.overshoot);
}
