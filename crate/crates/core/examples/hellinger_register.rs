//! Hellinger fidelity of the full recorded register against the noiseless
//! distribution, averaged over the Bloch sphere.

use chainxfer::circuit::{build, Scheme};
use chainxfer::engine::{NoiseSpec, Quadrature};
use chainxfer::sweep::{averaged_hellinger, hellinger_fidelity, Averaging};

fn main() -> chainxfer::Result<()> {
    println!("identical {}", hellinger_fidelity(&[0.3, 0.7], &[0.3, 0.7])?);
    println!("disjoint  {}", hellinger_fidelity(&[1.0, 0.0], &[0.0, 1.0])?);
    println!("half      {}", hellinger_fidelity(&[1.0, 0.0], &[0.5, 0.5])?);
    let av = Averaging::Quadrature(Quadrature::default());
    for scheme in Scheme::TRANSFER {
        let body = build(scheme, 3)?;
        let row: Vec<String> = [(0.0, 0.0), (0.05, 0.0), (0.0, 0.05), (0.05, 0.05), (0.75, 0.0)]
            .iter()
            .map(|&(p, q)| averaged_hellinger(&body, &NoiseSpec::oracle_matched(p, q), av).map(|h| format!("{h:.5}")))
            .collect::<Result<_, _>>()?;
        println!("{scheme:<9} {}", row.join("  "));
    }
    Ok(())
}
