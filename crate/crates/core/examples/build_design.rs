//! Build a full-fiducial design and write it out.

use gst_design::design::{build_design, DepthSchedule, FprPolicy};
use gst_design::stdsets::{xyi, xyi_fiducials};
use gst_design::Circuit;

fn main() -> gst_design::Result<()> {
    let gs = xyi();
    let f = xyi_fiducials();
    let germs: Vec<Circuit> = ["Gi", "Gx", "Gy", "Gx.Gy", "Gx.Gy.Gi", "Gx.Gx.Gy"]
        .iter()
        .map(|s| Circuit::parse(s))
        .collect::<gst_design::Result<_>>()?;
    let design = build_design(&gs, &f, &f, &germs, &DepthSchedule::powers_of_two(64)?, &FprPolicy::Full)?;

    println!("{:>4} {:>9}", "L", "circuits");
    for (l, n) in design.count_by_depth() {
        println!("{l:>4} {n:>9}");
    }
    println!("{} plaquettes, first few circuits:", design.plaquettes.len());
    for c in design.circuit_list().iter().take(5) {
        println!("  {c}");
    }
    let path = std::env::temp_dir().join("xyi_design.json");
    design.save(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}
