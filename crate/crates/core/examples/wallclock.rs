//! Wall-clock estimates on the bundled devices, plus the upload-time numbers
//! quoted for the two-qubit designs.

use gst_design::design::{build_design, DepthSchedule, FprPolicy};
use gst_design::fpr::KeepRounding;
use gst_design::stdsets::{bare_germs, xyi, xyi_fiducials};
use gst_design::wallclock::{estimate_exact, format_table, upload_time, DeviceParams};

fn main() -> gst_design::Result<()> {
    let gs = xyi();
    let f = xyi_fiducials();
    let sched = DepthSchedule::powers_of_two(1024)?;
    let full = build_design(&gs, &f, &f, &bare_germs(&gs), &sched, &FprPolicy::Full)?;
    let random = FprPolicy::Random { gamma: 0.125, seed: 1, rounding: KeepRounding::Floor };
    let reduced = build_design(&gs, &f, &f, &bare_germs(&gs), &sched, &random)?;

    let names = vec![format!("full ({})", full.circuit_count()), format!("random ({})", reduced.circuit_count())];
    let mut rows = Vec::new();
    for dev in DeviceParams::builtin() {
        let ests = vec![
            estimate_exact(&gs, &full.circuit_list(), 100, &dev)?,
            estimate_exact(&gs, &reduced.circuit_list(), 100, &dev)?,
        ];
        rows.push((dev.name.clone(), ests));
    }
    print!("{}", format_table(&names, &rows));

    let tr = DeviceParams::transmon();
    println!("transmon upload, 104002 circuits: {} s", upload_time(104_002, 100, &tr));
    println!("SiMOS upload, 10725 circuits: {} s", upload_time(10_725, 100, &DeviceParams::simos()));
    Ok(())
}
