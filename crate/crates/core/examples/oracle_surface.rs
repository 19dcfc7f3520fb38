//! Closed-form three-qubit success and fidelity on a small (p, q) grid,
//! plus an exact rational evaluation.

use chainxfer::circuit::Scheme;
use chainxfer::oracle::{self, Quantity};

fn main() -> chainxfer::Result<()> {
    let grid = [0.0, 0.05, 0.1, 0.2];
    for scheme in [Scheme::Swap, Scheme::Teleport, Scheme::Cluster] {
        println!("{scheme}: success m(q, p)");
        for &q in &grid {
            let row: Vec<String> = grid.iter().map(|&p| oracle::m_tilde(scheme, q, p).map(|m| format!("{m:.6}"))).collect::<Result<_, _>>()?;
            println!("  q={q:<4} {}", row.join("  "));
        }
        println!("  fidelity at p=0.1, q=0.05: {:.6}", oracle::fidelity(scheme, 0.05, 0.1)?);
    }
    let exact = oracle::evaluate_exact(Scheme::Teleport, Quantity::Success, &oracle::exact(0.25), &oracle::exact(0.5))?;
    println!("teleport success at q=1/4, p=1/2 = {exact} (exact rational)");
    Ok(())
}
