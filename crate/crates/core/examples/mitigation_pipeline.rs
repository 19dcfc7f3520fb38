//! Full mitigation: infer the readout error from the unmitigated value, fold
//! and extrapolate, then invert the readout response.

use chainxfer::circuit::{build, Scheme};
use chainxfer::engine::{NoiseSpec, Quadrature};
use chainxfer::mitigation::{mitigate_pipeline, parse_points, zne_points, MitigationReport, QContour, ZneTarget, DEFAULT_ALPHAS};

fn main() -> chainxfer::Result<()> {
    let spec = NoiseSpec::oracle_matched(0.02, 0.05);
    let quad = Quadrature::default();
    println!("{}", MitigationReport::HEADER);
    for scheme in Scheme::TRANSFER {
        let points = zne_points(&build(scheme, 3)?, &spec, &DEFAULT_ALPHAS, ZneTarget::Averaged(quad))?;
        let r = mitigate_pipeline(scheme, 3, points[0].value, &points, spec.kappa, None)?;
        println!("{}", r.row());
    }

    let contour = QContour::from_engine(Scheme::Teleport, 5, &spec, quad, 41)?;
    let points = zne_points(&build(Scheme::Teleport, 5)?, &spec, &DEFAULT_ALPHAS, ZneTarget::Averaged(quad))?;
    let r = mitigate_pipeline(Scheme::Teleport, 5, points[0].value, &points, spec.kappa, Some(&contour))?;
    println!("{}   (q from engine contour: {:.4})", r.row(), r.q_hat);

    let measured = parse_points("1:0.9, 1.5:0.87, 2:0.845, 2.5:0.822, 3:0.80")?;
    let r = mitigate_pipeline(Scheme::Swap, 3, 0.9, &measured, spec.kappa, None)?;
    println!("{}   (hand-entered points)", r.row());
    Ok(())
}
