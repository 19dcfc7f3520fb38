//! Unitary folding at fractional scale factors and exponential extrapolation
//! back to zero noise.

use chainxfer::circuit::{build, Scheme};
use chainxfer::engine::{NoiseSpec, Quadrature};
use chainxfer::mitigation::{exp_fit, fold_circuit, zne_extrapolate, zne_points, FoldSpec, ZneTarget, DEFAULT_ALPHAS};

fn main() -> chainxfer::Result<()> {
    let body = build(Scheme::Cluster, 3)?;
    for alpha in DEFAULT_ALPHAS {
        let folded = fold_circuit(&body, &FoldSpec::new(alpha))?;
        println!("alpha {alpha}: {} ops, {} CNOT/CZ-class gates", folded.ops().len(), folded.cnot_count() + folded.count_gate("cz"));
    }
    let spec = NoiseSpec::oracle_matched(0.02, 0.0);
    let points = zne_points(&body, &spec, &DEFAULT_ALPHAS, ZneTarget::Averaged(Quadrature::default()))?;
    for pt in &points {
        println!("  E({}) = {:.6}", pt.alpha, pt.value);
    }
    let fit = exp_fit(&points)?;
    let (value, err) = zne_extrapolate(&fit);
    println!("fit a={:.5} b={:.5} c={:.5}  ->  E(0) = {value:.6} ± {err:.2e}", fit.a, fit.b, fit.c);
    Ok(())
}
