//! The noisy chain as a single-qubit channel: four runs give the map, then
//! any input state is cheap.

use chainxfer::circuit::{build, Scheme};
use chainxfer::engine::{exact_eval, NoiseSpec, RegisterMap, TransferMap};

fn main() -> chainxfer::Result<()> {
    let body = build(Scheme::Ghz, 5)?;
    let spec = NoiseSpec::oracle_matched(0.03, 0.08);
    let map = TransferMap::new(&body, &spec)?;
    for (theta, phi) in [(0.0, 0.0), (1.2, 0.3), (std::f64::consts::PI, 0.0)] {
        let direct = exact_eval(&body, &spec, theta, phi)?;
        println!(
            "theta={theta:.3} phi={phi:.3}: map m0 {:.12}  direct m0 {:.12}  fidelity {:.6}",
            map.m0_true(theta, phi),
            direct.m0_true,
            map.fidelity(theta, phi)
        );
    }
    let reg = RegisterMap::new(&body, &spec)?;
    let dist = reg.distribution(1.2, 0.3);
    println!("recorded register distribution ({} outcomes):", dist.len());
    for (i, p) in dist.iter().enumerate().filter(|(_, p)| **p > 1e-3) {
        println!("  {i:0width$b}  {p:.4}", width = body.n_cbits());
    }
    Ok(())
}
