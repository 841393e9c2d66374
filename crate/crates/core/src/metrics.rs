//! Pointwise SINR of the confidential message and the artificial noise,
//! secrecy rate, and SINR surfaces over an angle × range grid.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{path_loss, phase_at, ArrayGeometry, FrequencyAllocation, PolarPosition, Scenario};
use crate::beamform::{build_beamformer, Beamformer, PowerSplit, Scheme};
use crate::error::{Error, Result};
use crate::seeding::AllocationSource;

/// Linear values below this floor are written as -300 dB.
pub const DB_FLOOR_LINEAR: f64 = 1e-30;

pub fn to_db(linear: f64) -> f64 {
    if linear < DB_FLOOR_LINEAR {
        -300.0
    } else {
        10.0 * linear.log10()
    }
}

/// `(|hᴴ v_CM|², |hᴴ v_AN|²)` at an arbitrary `(θ, R)`.
pub(crate) fn pattern_gains(
    geom: &ArrayGeometry,
    alloc: &FrequencyAllocation,
    bf: &Beamformer,
    theta: f64,
    range: f64,
) -> (f64, f64) {
    let scale = 1.0 / (geom.n_antennas() as f64).sqrt();
    let mut cm = Complex64::new(0.0, 0.0);
    let mut an = Complex64::new(0.0, 0.0);
    for (n, (vc, va)) in bf.v_cm().entries().iter().zip(bf.v_an().entries()).enumerate() {
        // conj(h_n) = scale * e^{-jΨ_n}
        let h_conj = Complex64::from_polar(scale, -phase_at(geom, alloc, n, theta, range));
        cm += h_conj * vc;
        an += h_conj * va;
    }
    (cm.norm_sqr(), an.norm_sqr())
}

fn sinr_pair(cm_gain: f64, an_gain: f64, g: f64, split: &PowerSplit) -> (f64, f64) {
    let cm = g * split.cm_power() * cm_gain;
    let an = g * split.an_power() * an_gain;
    let noise = split.noise_power();
    (cm / (an + noise), an / (cm + noise))
}

fn sinrs_at(
    theta: f64,
    range: f64,
    bf: &Beamformer,
    split: &PowerSplit,
    scenario: &Scenario,
) -> (f64, f64) {
    let (cm, an) = pattern_gains(scenario.geometry(), bf.allocation(), bf, theta, range);
    sinr_pair(cm, an, path_loss(range, scenario.reference_range()), split)
}

/// SINR of the confidential message at `pos`, with AN as interference.
pub fn sinr_cm_at(pos: PolarPosition, bf: &Beamformer, split: &PowerSplit, scenario: &Scenario) -> f64 {
    sinrs_at(pos.theta(), pos.range(), bf, split, scenario).0
}

/// SINR of the artificial noise at `pos`, with the CM as interference.
pub fn sinr_an_at(pos: PolarPosition, bf: &Beamformer, split: &PowerSplit, scenario: &Scenario) -> f64 {
    sinrs_at(pos.theta(), pos.range(), bf, split, scenario).1
}

/// `max(0, log2(1 + SINR_Bob) - log2(1 + SINR_Eve))` in bits/s/Hz, both on the CM.
pub fn secrecy_rate(bf: &Beamformer, split: &PowerSplit, scenario: &Scenario) -> f64 {
    let bob = sinr_cm_at(scenario.bob(), bf, split, scenario);
    let eve = sinr_cm_at(scenario.eve(), bf, split, scenario);
    secrecy_rate_from_sinr(bob, eve)
}

pub fn secrecy_rate_from_sinr(sinr_bob: f64, sinr_eve: f64) -> f64 {
    ((1.0 + sinr_bob).log2() - (1.0 + sinr_eve).log2()).max(0.0)
}

/// Evenly spaced axis `start, start + step, ...` up to and including `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AxisSpec {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid("axis", format!("step {step} must be positive")));
        }
        if !(start.is_finite() && stop.is_finite() && stop >= start) {
            return Err(Error::invalid("axis", format!("empty axis {start}:{stop}")));
        }
        Ok(Self { start, stop, step })
    }

    /// Parses `START:STOP:STEP`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::invalid("axis", format!("{text:?}: {e}")))?;
        match parts[..] {
            [start, stop, step] => Self::new(start, stop, step),
            _ => Err(Error::invalid("axis", format!("{text:?} is not START:STOP:STEP"))),
        }
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.value(i))
    }

    /// Index of the sample nearest `x`, if `x` lies on the axis span.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        if x < self.start - self.step / 2.0 || x > self.value(self.len() - 1) + self.step / 2.0 {
            return None;
        }
        Some((((x - self.start) / self.step).round().max(0.0) as usize).min(self.len() - 1))
    }
}

/// Angle axis in degrees and range axis in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub theta_deg: AxisSpec,
    pub range_m: AxisSpec,
}

impl Default for GridSpec {
    /// 0..=180° in 1° steps by 10..=1200 m in 5 m steps.
    fn default() -> Self {
        Self {
            theta_deg: AxisSpec {
                start: 0.0,
                stop: 180.0,
                step: 1.0,
            },
            range_m: AxisSpec {
                start: 10.0,
                stop: 1200.0,
                step: 5.0,
            },
        }
    }
}

impl GridSpec {
    fn covers(&self, pos: PolarPosition) -> bool {
        self.theta_deg.nearest(pos.theta_deg()).is_some() && self.range_m.nearest(pos.range()).is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSample {
    pub theta_deg: f64,
    pub range_m: f64,
    pub sinr_cm: f64,
    pub sinr_an: f64,
}

/// Linear SINR surfaces, averaged over allocations. Row `i` is angle
/// sample `i`; column `j` is range sample `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeampatternGrid {
    spec: GridSpec,
    sinr_cm: Vec<f64>,
    sinr_an: Vec<f64>,
    n_allocations_averaged: usize,
}

impl BeampatternGrid {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.spec.theta_deg.len(), self.spec.range_m.len())
    }

    pub fn n_allocations_averaged(&self) -> usize {
        self.n_allocations_averaged
    }

    pub fn sinr_cm(&self) -> &[f64] {
        &self.sinr_cm
    }

    pub fn sinr_an(&self) -> &[f64] {
        &self.sinr_an
    }

    pub fn sample(&self, i: usize, j: usize) -> SinrSample {
        let k = i * self.shape().1 + j;
        SinrSample {
            theta_deg: self.spec.theta_deg.value(i),
            range_m: self.spec.range_m.value(j),
            sinr_cm: self.sinr_cm[k],
            sinr_an: self.sinr_an[k],
        }
    }

    /// Grid cell `(i, j)` nearest a position.
    pub fn cell_of(&self, pos: PolarPosition) -> Option<(usize, usize)> {
        Some((
            self.spec.theta_deg.nearest(pos.theta_deg())?,
            self.spec.range_m.nearest(pos.range())?,
        ))
    }

    fn argmax(&self, field: &[f64]) -> (usize, usize) {
        let cols = self.shape().1;
        let k = field
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        (k / cols, k % cols)
    }

    pub fn argmax_cm(&self) -> (usize, usize) {
        self.argmax(&self.sinr_cm)
    }

    pub fn argmax_an(&self) -> (usize, usize) {
        self.argmax(&self.sinr_an)
    }

    /// CSV with header `theta_deg,range_m,sinr_cm_db,sinr_an_db`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "theta_deg,range_m,sinr_cm_db,sinr_an_db")?;
        let (rows, cols) = self.shape();
        for i in 0..rows {
            for j in 0..cols {
                let s = self.sample(i, j);
                writeln!(
                    out,
                    "{},{},{:.12},{:.12}",
                    s.theta_deg,
                    s.range_m,
                    to_db(s.sinr_cm),
                    to_db(s.sinr_an)
                )?;
            }
        }
        Ok(())
    }
}

/// SINR surfaces averaged (linearly) over `n_allocations` allocations drawn
/// from `source`. Each cell is accumulated in allocation order on its own,
/// so the result does not depend on the thread schedule.
pub fn beampattern(
    scenario: &Scenario,
    split: &PowerSplit,
    scheme: Scheme,
    grid: &GridSpec,
    n_allocations: usize,
    source: &AllocationSource,
) -> Result<BeampatternGrid> {
    if n_allocations == 0 {
        return Err(Error::invalid("n_allocations", "must be at least 1"));
    }
    if !grid.covers(scenario.bob()) || !grid.covers(scenario.eve()) {
        return Err(Error::invalid("grid", "grid must cover Bob and Eve"));
    }
    let geom = scenario.geometry();
    let beamformers = (0..n_allocations as u64)
        .map(|k| build_beamformer(scheme, scenario, &source.allocation(geom, k), split))
        .collect::<Result<Vec<_>>>()?;

    let cols = grid.range_m.len();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..grid.theta_deg.len())
        .into_par_iter()
        .map(|i| {
            let theta = grid.theta_deg.value(i).to_radians();
            let mut cm_row = vec![0.0; cols];
            let mut an_row = vec![0.0; cols];
            for j in 0..cols {
                let range = grid.range_m.value(j);
                for bf in &beamformers {
                    let (cm, an) = sinrs_at(theta, range, bf, split, scenario);
                    cm_row[j] += cm;
                    an_row[j] += an;
                }
                cm_row[j] /= n_allocations as f64;
                an_row[j] /= n_allocations as f64;
            }
            (cm_row, an_row)
        })
        .collect();

    let (sinr_cm, sinr_an) = rows.into_iter().fold(
        (Vec::with_capacity(rows_len(grid)), Vec::with_capacity(rows_len(grid))),
        |(mut cm, mut an), (c, a)| {
            cm.extend(c);
            an.extend(a);
            (cm, an)
        },
    );
    Ok(BeampatternGrid {
        spec: *grid,
        sinr_cm,
        sinr_an,
        n_allocations_averaged: n_allocations,
    })
}

fn rows_len(grid: &GridSpec) -> usize {
    grid.theta_deg.len() * grid.range_m.len()
}
