//! Physical model of the transmit array: geometry, per-antenna subcarrier
//! allocation, frequency-diverse steering vectors, alignment phasors and
//! free-space path loss.
//!
//! Antennas are indexed from 0. Antenna `n` radiates on subcarrier
//! `f_n = f_c + m_n * Δf`, and its steering phase toward `(θ, R)` is
//!
//! ```text
//! Ψ_n(θ, R) = 2π f_n (R - n d cosθ) / c - 2π f_c R / c
//! ```

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const LIGHT_SPEED: f64 = 299_792_458.0;

/// Upper bound on `N_S * Δf / f_c` accepted as narrowband.
pub const NARROWBAND_LIMIT: f64 = 0.01;

const POSITION_TOLERANCE: f64 = 1e-9;

/// Uniform linear array fed from an OFDM subcarrier set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    n_antennas: usize,
    spacing: f64,
    carrier_hz: f64,
    subcarrier_spacing_hz: f64,
    n_subcarriers: usize,
}

impl ArrayGeometry {
    pub fn new(
        n_antennas: usize,
        spacing: f64,
        carrier_hz: f64,
        subcarrier_spacing_hz: f64,
        n_subcarriers: usize,
    ) -> Result<Self> {
        if n_antennas < 2 {
            return Err(Error::invalid("n_antennas", "need at least 2 antennas"));
        }
        if n_antennas > n_subcarriers {
            return Err(Error::invalid(
                "n_antennas",
                format!("{n_antennas} antennas exceed {n_subcarriers} subcarriers"),
            ));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid("element_spacing_m", "must be positive"));
        }
        if !(carrier_hz > 0.0 && carrier_hz.is_finite()) {
            return Err(Error::invalid("carrier_hz", "must be positive"));
        }
        if !(subcarrier_spacing_hz > 0.0 && subcarrier_spacing_hz.is_finite()) {
            return Err(Error::invalid("subcarrier_spacing_hz", "must be positive"));
        }
        let fraction = n_subcarriers as f64 * subcarrier_spacing_hz / carrier_hz;
        if fraction >= NARROWBAND_LIMIT {
            return Err(Error::invalid(
                "bandwidth_hz",
                format!("occupied bandwidth is {fraction:.3e} of the carrier, narrowband needs < {NARROWBAND_LIMIT}"),
            ));
        }
        Ok(Self {
            n_antennas,
            spacing,
            carrier_hz,
            subcarrier_spacing_hz,
            n_subcarriers,
        })
    }

    /// Half-wavelength array whose `n_subcarriers` subcarriers evenly share `bandwidth_hz`.
    pub fn half_wavelength(
        n_antennas: usize,
        carrier_hz: f64,
        bandwidth_hz: f64,
        n_subcarriers: usize,
    ) -> Result<Self> {
        if n_subcarriers == 0 {
            return Err(Error::invalid("n_subcarriers", "must be positive"));
        }
        let spacing = LIGHT_SPEED / carrier_hz / 2.0;
        Self::new(
            n_antennas,
            spacing,
            carrier_hz,
            bandwidth_hz / n_subcarriers as f64,
            n_subcarriers,
        )
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn subcarrier_spacing_hz(&self) -> f64 {
        self.subcarrier_spacing_hz
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers
    }

    pub fn wavelength(&self) -> f64 {
        LIGHT_SPEED / self.carrier_hz
    }
}

/// Receiver location relative to the array: angle from the array axis and distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPosition {
    theta: f64,
    range: f64,
}

impl PolarPosition {
    /// `theta` in radians, strictly inside (0, π); `range` in meters.
    pub fn new(theta: f64, range: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::invalid("theta", format!("{theta} rad is outside (0, π)")));
        }
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::invalid("range", format!("{range} m must be positive")));
        }
        Ok(Self { theta, range })
    }

    pub fn from_degrees(theta_deg: f64, range: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), range)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta.to_degrees()
    }

    pub fn range(&self) -> f64 {
        self.range
    }
}

/// Subcarrier index `m_n` assigned to each antenna.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrequencyAllocation {
    indices: Vec<usize>,
}

impl FrequencyAllocation {
    pub fn new(indices: Vec<usize>, geom: &ArrayGeometry) -> Result<Self> {
        if indices.len() != geom.n_antennas() {
            return Err(Error::invalid(
                "allocation",
                format!("{} indices for {} antennas", indices.len(), geom.n_antennas()),
            ));
        }
        let mut seen = vec![false; geom.n_subcarriers()];
        for &m in &indices {
            if m >= geom.n_subcarriers() {
                return Err(Error::invalid(
                    "allocation",
                    format!("subcarrier {m} outside [0, {})", geom.n_subcarriers()),
                ));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::invalid("allocation", format!("subcarrier {m} repeated")));
            }
        }
        Ok(Self { indices })
    }

    /// Parses a comma-separated index list such as `"3,17,901"`.
    pub fn parse(text: &str, geom: &ArrayGeometry) -> Result<Self> {
        let indices = text
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::AllocationParse(format!("{tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices, geom)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Absolute radiated frequency of antenna `n`.
    pub fn frequency(&self, geom: &ArrayGeometry, n: usize) -> f64 {
        geom.carrier_hz() + self.offset_hz(geom, n)
    }

    fn offset_hz(&self, geom: &ArrayGeometry, n: usize) -> f64 {
        self.indices[n] as f64 * geom.subcarrier_spacing_hz()
    }
}

impl fmt::Display for FrequencyAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.indices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Normalized steering vector `h(θ, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
    position: PolarPosition,
    allocation: FrequencyAllocation,
}

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn position(&self) -> PolarPosition {
        self.position
    }

    pub fn allocation(&self) -> &FrequencyAllocation {
        &self.allocation
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }
}

/// Transmitter geometry plus the intended receiver (Bob) and the eavesdropper (Eve).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    geometry: ArrayGeometry,
    bob: PolarPosition,
    eve: PolarPosition,
    reference_range: f64,
}

impl Scenario {
    pub fn new(
        geometry: ArrayGeometry,
        bob: PolarPosition,
        eve: PolarPosition,
        reference_range: f64,
    ) -> Result<Self> {
        if !(reference_range > 0.0 && reference_range.is_finite()) {
            return Err(Error::invalid("reference_range_m", "must be positive"));
        }
        let same_angle = (bob.theta() - eve.theta()).abs() <= POSITION_TOLERANCE;
        let same_range = (bob.range() - eve.range()).abs() <= POSITION_TOLERANCE * bob.range();
        if same_angle && same_range {
            return Err(Error::invalid("eve", "Bob and Eve occupy the same position"));
        }
        Ok(Self {
            geometry,
            bob,
            eve,
            reference_range,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn bob(&self) -> PolarPosition {
        self.bob
    }

    pub fn eve(&self) -> PolarPosition {
        self.eve
    }

    pub fn reference_range(&self) -> f64 {
        self.reference_range
    }

    /// Path gain `g_d` toward Bob.
    pub fn bob_gain(&self) -> f64 {
        path_loss(self.bob.range(), self.reference_range)
    }

    /// Path gain `g_e` toward Eve.
    pub fn eve_gain(&self) -> f64 {
        path_loss(self.eve.range(), self.reference_range)
    }

    /// The same array with Bob and Eve exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            bob: self.eve,
            eve: self.bob,
            ..*self
        }
    }
}

/// Ψ_n(θ, R) for antenna `n`.
pub fn steering_phase(
    geom: &ArrayGeometry,
    alloc: &FrequencyAllocation,
    n: usize,
    pos: PolarPosition,
) -> f64 {
    phase_at(geom, alloc, n, pos.theta(), pos.range())
}

// f_n R - f_c R is folded to (m_n Δf) R so the large carrier term never gets subtracted.
#[inline]
pub(crate) fn phase_at(
    geom: &ArrayGeometry,
    alloc: &FrequencyAllocation,
    n: usize,
    theta: f64,
    range: f64,
) -> f64 {
    let offset = alloc.offset_hz(geom, n);
    let freq = geom.carrier_hz() + offset;
    TAU * (offset * range - freq * n as f64 * geom.spacing() * theta.cos()) / LIGHT_SPEED
}

/// Steering entries at an arbitrary `(θ, R)`, including the array endfire
/// directions which [`PolarPosition`] excludes.
pub(crate) fn steering_entries_at(
    geom: &ArrayGeometry,
    alloc: &FrequencyAllocation,
    theta: f64,
    range: f64,
) -> Vec<Complex64> {
    let scale = 1.0 / (geom.n_antennas() as f64).sqrt();
    (0..geom.n_antennas())
        .map(|n| Complex64::from_polar(scale, phase_at(geom, alloc, n, theta, range)))
        .collect()
}

pub fn steering_vector(
    geom: &ArrayGeometry,
    alloc: &FrequencyAllocation,
    pos: PolarPosition,
) -> SteeringVector {
    SteeringVector {
        entries: steering_entries_at(geom, alloc, pos.theta(), pos.range()),
        position: pos,
        allocation: alloc.clone(),
    }
}

/// Draws `N` distinct subcarriers uniformly without replacement.
pub fn draw_allocation<R: Rng + ?Sized>(geom: &ArrayGeometry, rng: &mut R) -> FrequencyAllocation {
    let indices = rand::seq::index::sample(rng, geom.n_subcarriers(), geom.n_antennas()).into_vec();
    FrequencyAllocation { indices }
}

/// Unit phasors `e^{jΨ_n}`; the diagonal of P (toward Bob) or Q (toward Eve).
pub fn alignment_phases(
    geom: &ArrayGeometry,
    alloc: &FrequencyAllocation,
    pos: PolarPosition,
) -> Vec<Complex64> {
    (0..geom.n_antennas())
        .map(|n| Complex64::from_polar(1.0, steering_phase(geom, alloc, n, pos)))
        .collect()
}

/// Free-space gain `R_0 / R²`.
pub fn path_loss(range: f64, reference_range: f64) -> f64 {
    reference_range / (range * range)
}
