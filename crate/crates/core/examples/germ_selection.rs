//! Standard, robust and bare germ sets for XYI.

use gst_design::germs::{amplifiable_count, germs_for_mode, GermMode, GermSelectConfig};
use gst_design::stdsets::xyi;

fn main() -> gst_design::Result<()> {
    let gs = xyi();
    println!("amplifiable gate parameters: {}", amplifiable_count(&gs));
    let cfg = GermSelectConfig::default();
    for (mode, seed) in [(GermMode::Bare, 0), (GermMode::Standard, 0), (GermMode::Robust, 100)] {
        let sel = germs_for_mode(&gs, mode, 6, seed, &cfg)?;
        let germs: Vec<String> = sel.germs.iter().map(|g| g.to_string()).collect();
        println!("{mode:?}: {}", germs.join(" "));
        println!("  amplified per model {:?} of {:?}", sel.per_model_amplified, sel.targets);
    }
    Ok(())
}
