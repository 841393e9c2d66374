//! SINR surfaces of the confidential message and the artificial noise.
//!
//! Prints a coarse text map of the CM surface around the two users and the
//! peak locations for each scheme.
//!
//! ```bash
//! cargo run --release --example beampattern
//! ```

use precise_jamming::beamform::{PowerSplit, Scheme};
use precise_jamming::config::Config;
use precise_jamming::metrics::{beampattern, to_db, AxisSpec, GridSpec};
use precise_jamming::AllocationSource;

fn main() -> precise_jamming::Result<()> {
    let config = Config::builtin();
    let scenario = &config.scenario;
    let split = PowerSplit::from_snr_db(config.beta, config.noise_power_w, scenario, 14.0)?;
    let grid = GridSpec {
        theta_deg: AxisSpec::new(0.0, 180.0, 1.0)?,
        range_m: AxisSpec::new(400.0, 800.0, 5.0)?,
    };
    let source = AllocationSource::Seeded(3);

    for scheme in Scheme::ALL {
        let surface = beampattern(scenario, &split, scheme, &grid, 10, &source)?;
        let (ci, cj) = surface.argmax_cm();
        let (ai, aj) = surface.argmax_an();
        let cm = surface.sample(ci, cj);
        let an = surface.sample(ai, aj);
        println!(
            "{:>8}: CM peak {:.1} dB at ({}°, {} m), AN peak {:.1} dB at ({}°, {} m)",
            scheme.as_str(),
            to_db(cm.sinr_cm),
            cm.theta_deg,
            cm.range_m,
            to_db(an.sinr_an),
            an.theta_deg,
            an.range_m
        );
    }

    // Coarse CM map for leakage: rows every 10°, columns every 25 m.
    let surface = beampattern(scenario, &split, Scheme::Leakage, &grid, 10, &source)?;
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    println!("\nleakage CM SINR, 400..800 m across, 0..180° down");
    for i in (0..surface.shape().0).step_by(10) {
        let row: String = (0..surface.shape().1)
            .step_by(5)
            .map(|j| {
                let db = to_db(surface.sample(i, j).sinr_cm).clamp(-30.0, 15.0);
                shades[(((db + 30.0) / 45.0) * 9.0).round() as usize]
            })
            .collect();
        println!("{:>4}° |{row}|", i);
    }
    Ok(())
}
