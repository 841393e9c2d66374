//! Secrecy rate versus SNR, averaged over random allocations, written as CSV
//! to stdout.
//!
//! ```bash
//! cargo run --release --example secrecy_rate > sr.csv
//! ```

use precise_jamming::beamform::Scheme;
use precise_jamming::config::Config;
use precise_jamming::montecarlo::{sr_curve, TrialConfig};

fn main() -> precise_jamming::Result<()> {
    let config = Config::builtin();
    let cfg = TrialConfig::new(1, 200, 2024);
    let snr: Vec<f64> = (0..=20).map(|k| -10.0 + 2.0 * k as f64).collect();
    let report = sr_curve(
        &Scheme::ALL,
        &config.scenario,
        config.beta,
        config.noise_power_w,
        &cfg,
        &snr,
    )?;
    report.write_csv(std::io::stdout().lock()).expect("stdout");

    let eab = report.curve(Scheme::Eab).expect("eab curve");
    for scheme in [Scheme::Leakage, Scheme::MaxRp] {
        let c = report.curve(scheme).expect("curve");
        let first = c.points[0].mean - eab.points[0].mean;
        let last = c.points[snr.len() - 1].mean - eab.points[snr.len() - 1].mean;
        eprintln!("{scheme} - eab: {first:+.3} at {} dB, {last:+.3} at {} dB", snr[0], snr[snr.len() - 1]);
    }
    Ok(())
}
