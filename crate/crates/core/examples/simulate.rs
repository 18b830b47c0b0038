//! Sample a noisy model, simulate counts and compare likelihoods.

use gst_design::design::{build_design, DepthSchedule, FprPolicy};
use gst_design::noise::{log_likelihood, sample_noisy_gateset, simulate_dataset, NoiseSpec};
use gst_design::stdsets::{bare_germs, xyi, xyi_fiducials};

fn main() -> gst_design::Result<()> {
    let gs = xyi();
    let f = xyi_fiducials();
    let d = build_design(&gs, &f, &f, &bare_germs(&gs), &DepthSchedule::powers_of_two(16)?, &FprPolicy::Full)?;
    let truth = sample_noisy_gateset(&gs, &NoiseSpec::coherent_depolarizing(0.01, 0.001, 5))?;
    let data = simulate_dataset(&truth, &d.circuit_list(), 1000, 5)?;
    for row in data.rows.iter().skip(40).take(4) {
        println!("{:>24} {:?}", row.circuit.to_string(), row.counts);
    }
    println!("log-likelihood: truth {:.1}, target {:.1}", log_likelihood(&truth, &data)?, log_likelihood(&gs, &data)?);
    Ok(())
}
