//! Per-germ fiducial pair reduction and the design it produces.

use gst_design::design::{build_design, DepthSchedule, FprPolicy};
use gst_design::fpr::{per_germ_fpr, PerGermFprConfig, EPS_ONE_QUBIT};
use gst_design::stdsets::{xyi, xyi_fiducials};
use gst_design::Circuit;

fn main() -> gst_design::Result<()> {
    let gs = xyi();
    let f = xyi_fiducials();
    let germs: Vec<Circuit> = ["Gi", "Gx", "Gy", "Gx.Gy", "Gx.Gy.Gi", "Gx.Gx.Gy"]
        .iter()
        .map(|s| Circuit::parse(s))
        .collect::<gst_design::Result<_>>()?;
    let res = per_germ_fpr(&gs, &f, &f, &germs, &PerGermFprConfig::new(EPS_ONE_QUBIT, 1))?;
    for g in &res.germs {
        println!("{:>10}: {:>2} pairs, kite rank {:>2}, λ ratio {:.3}", g.germ.to_string(), g.pairs.len(), g.baseline_rank, g.ratio);
    }
    let sched = DepthSchedule::powers_of_two(256)?;
    let full = build_design(&gs, &f, &f, &germs, &sched, &FprPolicy::Full)?;
    let reduced = build_design(&gs, &f, &f, &germs, &sched, &res.policy())?;
    println!("circuits: full {}, per-germ {}", full.circuit_count(), reduced.circuit_count());
    Ok(())
}
