//! Biased readout response, its inverse, and clipping of unphysical results.

use chainxfer::channels::{apply_readout, ReadoutModel};
use chainxfer::mitigation::invert_readout;

fn main() -> chainxfer::Result<()> {
    let model = ReadoutModel::biased(0.08, 0.5)?;
    let truth = [0.93, 0.07];
    let recorded = apply_readout(truth, &model)?;
    println!("response {:?}  det {:.3}", model.response_matrix(), model.determinant());
    println!("true {truth:?} -> recorded [{:.4}, {:.4}]", recorded[0], recorded[1]);
    let back = invert_readout(recorded, model.q0, model.q1)?;
    println!("inverted [{:.4}, {:.4}] overshoot {}", back.probs[0], back.probs[1], back.overshoot);
    let clipped = invert_readout([0.99, 0.01], model.q0, model.q1)?;
    println!("inverting [0.99, 0.01] -> [{:.4}, {:.4}] overshoot {}", clipped.probs[0], clipped.probs[1], clipped.overshoot);
    Ok(())
}
