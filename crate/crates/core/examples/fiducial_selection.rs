//! Greedy fiducial selection from the default candidate pools.

use gst_design::fiducials::{fiducial_candidates, fiducial_score, select_fiducials, FiducialKind};
use gst_design::stdsets::{xycphase, xyi, xyi_fiducials};

fn main() -> gst_design::Result<()> {
    let gs = xyi();
    let pool = fiducial_candidates(&gs);
    println!("XYI pool: {} candidates", pool.len());
    for kind in [FiducialKind::Prep, FiducialKind::Meas] {
        let sel = select_fiducials(&gs, &pool, kind, None)?;
        let names: Vec<String> = sel.fiducials.iter().map(|c| c.to_string()).collect();
        println!("{kind:?}: {} (rank {}/{}, score {:.3})", names.join(" "), sel.score.rank, sel.score.required, sel.score.score);
    }
    let std = fiducial_score(&gs, &xyi_fiducials(), FiducialKind::Prep)?;
    println!("standard six: prep spectrum {:?}", std.spectrum.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>());

    let two = xycphase();
    let pool = fiducial_candidates(&two);
    let prep = select_fiducials(&two, &pool, FiducialKind::Prep, None)?;
    let meas = select_fiducials(&two, &pool, FiducialKind::Meas, None)?;
    println!("XYCPHASE: {} prep, {} meas fiducials from {} candidates", prep.fiducials.len(), meas.fiducials.len(), pool.len());
    Ok(())
}
