//! Random fiducial pair reduction at several retention fractions.

use gst_design::design::{build_design, DepthSchedule, FprPolicy};
use gst_design::fpr::{keep_count, KeepRounding};
use gst_design::stdsets::{bare_germs, xyi, xyi_fiducials};

fn main() -> gst_design::Result<()> {
    let gs = xyi();
    let f = xyi_fiducials();
    let germs = bare_germs(&gs);
    let sched = DepthSchedule::powers_of_two(128)?;
    for gamma in [1.0, 0.5, 0.125, 0.03] {
        let policy = FprPolicy::Random { gamma, seed: 2024, rounding: KeepRounding::Floor };
        let d = build_design(&gs, &f, &f, &germs, &sched, &policy)?;
        let k = keep_count(gamma, 36, KeepRounding::Floor)?;
        println!("γ = {gamma:<5} keeps {k:>2} of 36 pairs → {} circuits", d.circuit_count());
    }
    let policy = FprPolicy::Random { gamma: 0.125, seed: 2024, rounding: KeepRounding::Floor };
    let d = build_design(&gs, &f, &f, &germs, &sched, &policy)?;
    println!("pairs kept for {} at L = 128: {:?}", d.germs[1], d.plaquettes.iter().rev().find(|p| p.germ == 1).unwrap().pairs);
    Ok(())
}
