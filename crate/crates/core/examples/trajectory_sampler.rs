//! Shot sampling against the exact value, with shot-noise error bars.

use chainxfer::circuit::{build, Scheme};
use chainxfer::engine::{exact_eval, sample_shots, NoiseSpec};

fn main() -> chainxfer::Result<()> {
    let spec = NoiseSpec::oracle_matched(0.05, 0.05);
    let (theta, phi) = (0.9, 2.0);
    for scheme in Scheme::TRANSFER {
        let body = build(scheme, 5)?;
        let exact = exact_eval(&body, &spec, theta, phi)?.m0_recorded;
        for shots in [256, 4096] {
            let est = sample_shots(&body, &spec, theta, phi, shots, 11)?;
            let err = est.stderr.unwrap_or(0.0);
            println!(
                "{scheme:<9} shots={shots:<5} estimate {:.4} ± {err:.4}  exact {exact:.4}  z={:+.2}",
                est.m0_recorded,
                (est.m0_recorded - exact) / err.max(f64::MIN_POSITIVE)
            );
        }
    }
    Ok(())
}
