use chainxfer::circuit::Scheme;
use chainxfer::engine::Quadrature;
use chainxfer::oracle::calibrate;

fn main() -> chainxfer::Result<()> {
    let grid = [0.0, 0.1, 0.35, 0.7];
    let report = calibrate(&[Scheme::Swap, Scheme::Teleport, Scheme::Cluster], &grid, Quadrature::new(3, 4)?, 1e-10)?;
    for e in &report.entries {
        println!(
            "{:9} {:30} {:13} {:12} success {:9.2e} fidelity {:9.2e}{}",
            e.scheme.to_string(),
            e.placement.to_string(),
            e.conditional_noise.to_string(),
            e.branch_weighting.to_string(),
            e.max_success_diff,
            e.max_fidelity_diff,
            if e.matches(report.tolerance) { "  MATCH" } else { "" }
        );
    }
    Ok(())
}
