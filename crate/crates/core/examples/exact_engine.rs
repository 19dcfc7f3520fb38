//! Density-matrix evaluation of every scheme for one initial state, and the
//! Bloch-sphere average.

use chainxfer::circuit::{build, Scheme};
use chainxfer::engine::{averaged_eval, exact_eval, exact_fidelity, NoiseSpec, Quadrature};

fn main() -> chainxfer::Result<()> {
    let spec = NoiseSpec::oracle_matched(0.02, 0.05);
    let (theta, phi) = (1.0, 0.4);
    for scheme in Scheme::TRANSFER {
        for n in [3, 5] {
            let body = build(scheme, n)?;
            let r = exact_eval(&body, &spec, theta, phi)?;
            let fid = exact_fidelity(&body, &spec, theta, phi)?;
            let avg = averaged_eval(&body, &spec, Quadrature::default())?;
            println!(
                "{scheme:<9} n={n}  state: true {:.6} recorded {:.6} fidelity {:.6} ({} branches)  averaged: recorded {:.6} fidelity {:.6}",
                r.m0_true,
                r.m0_recorded,
                fid,
                r.branch_count,
                avg.m0_recorded,
                avg.fidelity
            );
        }
    }
    Ok(())
}
