//! Monte-Carlo QPSK BER at Bob versus SNR for the three schemes, plus the
//! no-AN sanity check against the closed-form AWGN curve.
//!
//! ```bash
//! cargo run --release --example ber_curve
//! ```

use precise_jamming::beamform::Scheme;
use precise_jamming::config::Config;
use precise_jamming::montecarlo::{ber_curve, TrialConfig};
use statrs::distribution::{ContinuousCDF, Normal};

fn main() -> precise_jamming::Result<()> {
    let config = Config::builtin();
    let scenario = &config.scenario;
    let mut cfg = TrialConfig::new(200_000, 50, 42);
    cfg.count_eve = true;
    let snr: Vec<f64> = (0..=8).map(|k| 2.0 * k as f64).collect();

    let report = ber_curve(&Scheme::ALL, scenario, config.beta, config.noise_power_w, &cfg, &snr)?;
    print!("{:>6}", "snr");
    for c in &report.curves {
        print!(" {:>10} {:>10}", c.scheme.as_str(), "eve");
    }
    println!();
    for (k, s) in snr.iter().enumerate() {
        print!("{s:>6}");
        for c in &report.curves {
            let p = &c.points[k];
            print!(" {:>10.3e} {:>10.3e}", p.ber, p.eve_ber().unwrap_or(f64::NAN));
        }
        println!();
    }

    // Without AN the whole chain reduces to QPSK over AWGN.
    let awgn = ber_curve(&[Scheme::Eab], scenario, 1.0, config.noise_power_w, &cfg, &snr)?;
    let gauss = Normal::standard();
    println!("\nno AN, eab vs Q(sqrt(SNR))");
    for p in &awgn.curves[0].points {
        let theory = gauss.sf(10f64.powf(p.snr_db / 10.0).sqrt());
        println!("{:>6} {:>10.3e} {:>10.3e}  [{:.3e}, {:.3e}]", p.snr_db, p.ber, theory, p.ci_low, p.ci_high);
    }
    Ok(())
}
