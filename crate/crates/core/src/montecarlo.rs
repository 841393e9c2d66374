//! QPSK Monte-Carlo link simulation: BER and secrecy-rate curves versus SNR.
//!
//! SNR throughout is `g_d · P_s / σ²`, the total transmit power received at
//! Bob's range over the receiver noise power.
//!
//! Randomness is split into independent substreams keyed by
//! `(master seed, tag, scheme, SNR point, unit)` so the counts come out the
//! same whatever the worker count. Allocations are keyed by the master seed
//! and allocation index only, so every scheme and every SNR point sees the
//! same set of subcarrier draws.

use std::io::{self, Write};
use std::ops::{Add, AddAssign};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{steering_vector, Scenario};
use crate::beamform::{build_beamformer, Beamformer, PowerSplit, Scheme};
use crate::error::{Error, Result};
use crate::linalg::inner;
use crate::metrics::secrecy_rate;
use crate::seeding::{substream, AllocationSource, TAG_SYMBOLS};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;
/// Symbols per work unit when the allocation changes every symbol.
const SYMBOL_CHUNK: usize = 256;

/// Gray-mapped QPSK: the first bit picks the in-phase sign, the second the
/// quadrature sign, `0 → +`.
pub fn qpsk_modulate(bits: (bool, bool)) -> Complex64 {
    let i = if bits.0 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    let q = if bits.1 { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
    Complex64::new(i, q)
}

/// Minimum-distance decision, which for QPSK is a sign test per quadrature.
pub fn qpsk_demodulate(y: Complex64) -> (bool, bool) {
    (y.re < 0.0, y.im < 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub symbols_per_point: u64,
    pub allocations_per_point: u64,
    pub reallocate_per_symbol: bool,
    pub master_seed: u64,
    /// Also demodulate the CM at Eve.
    pub count_eve: bool,
    /// Thread count; 0 uses the global pool. Does not affect results.
    #[serde(skip)]
    pub workers: usize,
}

impl TrialConfig {
    pub fn new(symbols_per_point: u64, allocations_per_point: u64, master_seed: u64) -> Self {
        Self {
            symbols_per_point,
            allocations_per_point,
            reallocate_per_symbol: false,
            master_seed,
            count_eve: false,
            workers: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.symbols_per_point == 0 {
            return Err(Error::invalid("symbols", "must be at least 1"));
        }
        if self.allocations_per_point == 0 {
            return Err(Error::invalid("allocations", "must be at least 1"));
        }
        Ok(())
    }

    fn allocations(&self) -> AllocationSource {
        AllocationSource::Seeded(self.master_seed)
    }

    fn install<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        if self.workers == 0 {
            return Ok(job());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?;
        Ok(pool.install(job))
    }
}

/// Bit and error tallies for one SNR point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCounts {
    pub bits: u64,
    pub errors: u64,
    pub eve_bits: u64,
    pub eve_errors: u64,
}

impl Add for PointCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            bits: self.bits + o.bits,
            errors: self.errors + o.errors,
            eve_bits: self.eve_bits + o.eve_bits,
            eve_errors: self.eve_errors + o.eve_errors,
        }
    }
}

impl AddAssign for PointCounts {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// 95% Wilson score interval for `errors` successes in `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Scalar link seen by one receiver: `y = cm·x + an·z + n`.
#[derive(Debug, Clone, Copy)]
struct ScalarLink {
    cm: Complex64,
    an: Complex64,
    noise_std: f64,
}

impl ScalarLink {
    fn new(bf: &Beamformer, scenario: &Scenario, split: &PowerSplit, at_bob: bool) -> Self {
        let (pos, gain) = if at_bob {
            (scenario.bob(), scenario.bob_gain())
        } else {
            (scenario.eve(), scenario.eve_gain())
        };
        let h = steering_vector(scenario.geometry(), bf.allocation(), pos).into_entries();
        Self {
            cm: (gain * split.cm_power()).sqrt() * inner(&h, bf.v_cm().entries()),
            an: (gain * split.an_power()).sqrt() * inner(&h, bf.v_an().entries()),
            noise_std: split.noise_power().sqrt(),
        }
    }

    fn bit_errors<R: Rng>(&self, x: Complex64, z: Complex64, bits: (bool, bool), rng: &mut R) -> u64 {
        let y = self.cm * x + self.an * z + complex_gaussian(rng) * self.noise_std;
        // Genie-aided coherent equalization by the composite CM coefficient.
        let (b0, b1) = qpsk_demodulate(y / self.cm);
        u64::from(b0 != bits.0) + u64::from(b1 != bits.1)
    }
}

/// Circular complex Gaussian with unit variance.
fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Baseband transmit vector `√(βP_s) v_CM x + √((1-β)P_s) v_AN z`.
pub fn transmit_signal(bf: &Beamformer, split: &PowerSplit, x: Complex64, z: Complex64) -> Vec<Complex64> {
    let cm = split.cm_power().sqrt() * x;
    let an = split.an_power().sqrt() * z;
    bf.v_cm()
        .entries()
        .iter()
        .zip(bf.v_an().entries())
        .map(|(vc, va)| vc * cm + va * an)
        .collect()
}

/// One unit of work: a run of symbols sharing an allocation, or a chunk of
/// symbols that each get their own allocation.
#[derive(Debug, Clone, Copy)]
struct WorkUnit {
    index: u64,
    first_symbol: u64,
    symbols: u64,
}

fn work_units(cfg: &TrialConfig) -> Vec<WorkUnit> {
    if cfg.reallocate_per_symbol {
        let chunk = SYMBOL_CHUNK as u64;
        (0..cfg.symbols_per_point.div_ceil(chunk))
            .map(|u| WorkUnit {
                index: u,
                first_symbol: u * chunk,
                symbols: chunk.min(cfg.symbols_per_point - u * chunk),
            })
            .collect()
    } else {
        let blocks = cfg.allocations_per_point;
        let base = cfg.symbols_per_point / blocks;
        let extra = cfg.symbols_per_point % blocks;
        let mut first = 0;
        (0..blocks)
            .map(|k| {
                let symbols = base + u64::from(k < extra);
                let unit = WorkUnit {
                    index: k,
                    first_symbol: first,
                    symbols,
                };
                first += symbols;
                unit
            })
            .filter(|u| u.symbols > 0)
            .collect()
    }
}

/// Bit errors at Bob (and Eve if `cfg.count_eve`) for one scheme at one SNR.
pub fn simulate_ber_point(
    scheme: Scheme,
    scenario: &Scenario,
    split: &PowerSplit,
    cfg: &TrialConfig,
    point_index: u64,
) -> Result<PointCounts> {
    cfg.validate()?;
    let units = work_units(cfg);
    let source = cfg.allocations();
    let geom = scenario.geometry();

    let links = |alloc_index: u64| -> Result<(ScalarLink, ScalarLink)> {
        let alloc = source.allocation(geom, alloc_index);
        let bf = build_beamformer(scheme, scenario, &alloc, split)?;
        Ok((
            ScalarLink::new(&bf, scenario, split, true),
            ScalarLink::new(&bf, scenario, split, false),
        ))
    };

    let run_unit = |unit: &WorkUnit| -> Result<PointCounts> {
        let mut rng = substream(
            cfg.master_seed,
            &[TAG_SYMBOLS, scheme.id(), point_index, unit.index],
        );
        let mut counts = PointCounts::default();
        let fixed = if cfg.reallocate_per_symbol {
            None
        } else {
            Some(links(unit.index)?)
        };
        for s in unit.first_symbol..unit.first_symbol + unit.symbols {
            let (bob, eve) = match fixed {
                Some(pair) => pair,
                None => links(s)?,
            };
            let bits = (rng.random::<bool>(), rng.random::<bool>());
            let x = qpsk_modulate(bits);
            let z = complex_gaussian(&mut rng);
            counts.bits += 2;
            counts.errors += bob.bit_errors(x, z, bits, &mut rng);
            if cfg.count_eve {
                counts.eve_bits += 2;
                counts.eve_errors += eve.bit_errors(x, z, bits, &mut rng);
            }
        }
        Ok(counts)
    };

    let per_unit = cfg.install(|| units.par_iter().map(run_unit).collect::<Vec<_>>())?;
    per_unit
        .into_iter()
        .try_fold(PointCounts::default(), |acc, c| Ok(acc + c?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub counts: PointCounts,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BerPoint {
    fn new(snr_db: f64, counts: PointCounts) -> Self {
        let (ci_low, ci_high) = wilson_interval(counts.errors, counts.bits);
        Self {
            snr_db,
            counts,
            ber: counts.errors as f64 / counts.bits as f64,
            ci_low,
            ci_high,
        }
    }

    pub fn eve_ber(&self) -> Option<f64> {
        (self.counts.eve_bits > 0).then(|| self.counts.eve_errors as f64 / self.counts.eve_bits as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerCurve {
    pub scheme: Scheme,
    pub points: Vec<BerPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerReport {
    pub snr_db_points: Vec<f64>,
    pub curves: Vec<BerCurve>,
}

impl BerReport {
    pub fn curve(&self, scheme: Scheme) -> Option<&BerCurve> {
        self.curves.iter().find(|c| c.scheme == scheme)
    }

    /// `snr_db,scheme,ber,bits,errors,ci_low,ci_high`, one block per scheme.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "snr_db,scheme,ber,bits,errors,ci_low,ci_high")?;
        for curve in &self.curves {
            for p in &curve.points {
                writeln!(
                    out,
                    "{},{},{:.16e},{},{},{:.16e},{:.16e}",
                    p.snr_db, curve.scheme, p.ber, p.counts.bits, p.counts.errors, p.ci_low, p.ci_high
                )?;
            }
        }
        Ok(())
    }
}

fn check_grid(snr_grid_db: &[f64]) -> Result<()> {
    if snr_grid_db.is_empty() {
        return Err(Error::invalid("snr", "empty SNR grid"));
    }
    if snr_grid_db.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("snr", "non-finite SNR"));
    }
    Ok(())
}

/// BER at Bob for each scheme and SNR. `beta = 1` runs without AN.
pub fn ber_curve(
    schemes: &[Scheme],
    scenario: &Scenario,
    beta: f64,
    noise_power: f64,
    cfg: &TrialConfig,
    snr_grid_db: &[f64],
) -> Result<BerReport> {
    check_grid(snr_grid_db)?;
    let mut curves = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let points = snr_grid_db
            .iter()
            .enumerate()
            .map(|(i, &snr)| {
                let split = PowerSplit::from_snr_db(beta, noise_power, scenario, snr)?;
                let counts = simulate_ber_point(scheme, scenario, &split, cfg, i as u64)?;
                Ok(BerPoint::new(snr, counts))
            })
            .collect::<Result<Vec<_>>>()?;
        curves.push(BerCurve { scheme, points });
    }
    Ok(BerReport {
        snr_db_points: snr_grid_db.to_vec(),
        curves,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrPoint {
    pub snr_db: f64,
    pub mean: f64,
    pub stderr: f64,
    pub n_allocations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrCurve {
    pub scheme: Scheme,
    pub points: Vec<SrPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrReport {
    pub snr_db_points: Vec<f64>,
    pub curves: Vec<SrCurve>,
}

impl SrReport {
    pub fn curve(&self, scheme: Scheme) -> Option<&SrCurve> {
        self.curves.iter().find(|c| c.scheme == scheme)
    }

    /// `snr_db,scheme,sr_mean,sr_stderr`, one block per scheme.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "snr_db,scheme,sr_mean,sr_stderr")?;
        for curve in &self.curves {
            for p in &curve.points {
                writeln!(out, "{},{},{:.16e},{:.16e}", p.snr_db, curve.scheme, p.mean, p.stderr)?;
            }
        }
        Ok(())
    }
}

/// Secrecy rate averaged over `cfg.allocations_per_point` allocations.
pub fn sr_curve(
    schemes: &[Scheme],
    scenario: &Scenario,
    beta: f64,
    noise_power: f64,
    cfg: &TrialConfig,
    snr_grid_db: &[f64],
) -> Result<SrReport> {
    check_grid(snr_grid_db)?;
    cfg.validate()?;
    let source = cfg.allocations();
    let geom = scenario.geometry();
    let n = cfg.allocations_per_point;
    let allocs: Vec<_> = (0..n).map(|k| source.allocation(geom, k)).collect();

    let mut curves = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let mut points = Vec::with_capacity(snr_grid_db.len());
        for &snr in snr_grid_db {
            let split = PowerSplit::from_snr_db(beta, noise_power, scenario, snr)?;
            let rates = cfg.install(|| {
                allocs
                    .par_iter()
                    .map(|a| Ok(secrecy_rate(&build_beamformer(scheme, scenario, a, &split)?, &split, scenario)))
                    .collect::<Result<Vec<f64>>>()
            })??;
            let mean = rates.iter().sum::<f64>() / n as f64;
            let stderr = if n > 1 {
                let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            points.push(SrPoint {
                snr_db: snr,
                mean,
                stderr,
                n_allocations: n,
            });
        }
        curves.push(SrCurve { scheme, points });
    }
    Ok(SrReport {
        snr_db_points: snr_grid_db.to_vec(),
        curves,
    })
}
