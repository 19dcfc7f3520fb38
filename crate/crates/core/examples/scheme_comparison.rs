//! Side-by-side success of all schemes for gate-only and readout-only noise.

use chainxfer::sweep::{compare_schemes, SweepConfig};

fn main() -> chainxfer::Result<()> {
    let cfg = SweepConfig {
        n_list: vec![3, 5, 7],
        p_grid: vec![0.0, 0.01],
        q_grid: vec![0.0, 0.05],
        ..SweepConfig::default()
    };
    print!("{}", compare_schemes(&cfg)?);
    Ok(())
}
