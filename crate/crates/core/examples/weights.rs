//! Amplitude beamformers for one allocation and their null residuals.
//!
//! ```bash
//! cargo run --example weights
//! ```

use precise_jamming::array::steering_vector;
use precise_jamming::beamform::{build_beamformer, PowerSplit, Scheme};
use precise_jamming::config::Config;
use precise_jamming::linalg::inner;
use precise_jamming::AllocationSource;

fn main() -> precise_jamming::Result<()> {
    let config = Config::builtin();
    let scenario = &config.scenario;
    let split = PowerSplit::from_snr_db(config.beta, config.noise_power_w, scenario, 14.0)?;
    let alloc = AllocationSource::Seeded(1).allocation(scenario.geometry(), 0);
    let h_bob = steering_vector(scenario.geometry(), &alloc, scenario.bob());
    let h_eve = steering_vector(scenario.geometry(), &alloc, scenario.eve());

    println!("P_s = {:.3e} W for 14 dB", split.total_power());
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "scheme", "|a| min", "|a| max", "|hE^H vCM|", "|hB^H vAN|");
    for scheme in Scheme::ALL {
        let bf = build_beamformer(scheme, scenario, &alloc, &split)?;
        let mags: Vec<f64> = bf.cm_amplitudes().entries().iter().map(|z| z.norm()).collect();
        let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = mags.iter().cloned().fold(0.0, f64::max);
        println!(
            "{:>8} {lo:>12.4e} {hi:>12.4e} {:>12.4e} {:>12.4e}",
            scheme.as_str(),
            inner(h_eve.entries(), bf.v_cm().entries()).norm(),
            inner(h_bob.entries(), bf.v_an().entries()).norm(),
        );
    }

    let bf = build_beamformer(Scheme::MaxRp, scenario, &alloc, &split)?;
    let mut csv = Vec::new();
    bf.write_csv(&mut csv).expect("write to memory");
    let text = String::from_utf8(csv).expect("ascii");
    for line in text.lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
