//! Parameter accounting, outcome probabilities and gauge freedom of the
//! bundled targets.

use gst_design::model::{apply_gauge_transform, circuit_probabilities, non_gauge_count};
use gst_design::stdsets::{xycphase, xyi};
use gst_design::Circuit;
use nalgebra::DMatrix;

fn main() -> gst_design::Result<()> {
    for (name, gs) in [("XYI", xyi()), ("XYCPHASE", xycphase())] {
        println!("{name}: {} parameters, {} non-gauge", gs.n_params(), non_gauge_count(&gs));
    }

    let gs = xyi();
    for s in ["{}", "Gx", "Gx.Gx", "Gx.Gy.Gy"] {
        let c = Circuit::parse(s)?;
        let p = circuit_probabilities(&gs, &c)?;
        println!("p({s:>9}) = [{:.4}, {:.4}]", p[0], p[1]);
    }

    // A TP gauge transform changes every matrix but no probability.
    let mut m = DMatrix::identity(4, 4);
    m[(1, 0)] = 0.1;
    m[(2, 3)] = -0.2;
    m[(3, 3)] = 1.1;
    let moved = apply_gauge_transform(&gs, &m)?;
    let c = Circuit::parse("Gx.Gy.Gi.Gx")?;
    let diff = circuit_probabilities(&gs, &c)? - circuit_probabilities(&moved, &c)?;
    println!("after gauge transform: max |Δp| = {:.1e}", diff.abs().max());
    Ok(())
}
