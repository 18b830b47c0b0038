//! Fisher-information certification at a perturbed point: bare germs versus
//! a robust germ set.

use gst_design::design::{build_design, DepthSchedule, FprPolicy};
use gst_design::fisher::{certify_design, perturbed_evaluation_point, CertifyThresholds};
use gst_design::germs::{germs_for_mode, GermMode, GermSelectConfig};
use gst_design::stdsets::{bare_germs, xyi, xyi_fiducials};

fn main() -> gst_design::Result<()> {
    let gs = xyi();
    let f = xyi_fiducials();
    let eval = perturbed_evaluation_point(&gs, 7)?;
    let robust = germs_for_mode(&gs, GermMode::Robust, 6, 100, &GermSelectConfig::default())?.germs;
    let sched = DepthSchedule::powers_of_two(256)?;
    for (name, germs) in [("bare", bare_germs(&gs)), ("robust", robust)] {
        let d = build_design(&gs, &f, &f, &germs, &sched, &FprPolicy::Full)?;
        let r = certify_design(&eval, &d, &CertifyThresholds::default())?;
        println!(
            "{name:>6}: {} circuits, {} growing, {} plateaued (expected {}), well constructed: {}",
            d.circuit_count(),
            r.growing,
            r.plateaued,
            r.expected_spam,
            r.well_constructed
        );
        let slopes: Vec<String> = r.directions.iter().map(|d| format!("{:.2}", d.slope)).collect();
        println!("        slopes {}", slopes.join(" "));
    }
    Ok(())
}
