//! Phase-aligned beamformers for the confidential message (CM) and the
//! artificial noise (AN).
//!
//! Every beamformer has the form `v_CM = P·|a|`, `v_AN = Q·|b|` where `P`
//! and `Q` are the diagonal alignment phasors toward Bob and Eve. Only the
//! amplitude vectors differ between schemes:
//!
//! * [`Scheme::Eab`]: equal amplitudes `1/√N`.
//! * [`Scheme::Leakage`]: Max-SLNR. The matrix to diagonalize is
//!   (positive definite)⁻¹ · (rank one), so the dominant eigenvector is the
//!   positive definite solve applied to the rank-one direction, which the
//!   Sherman–Morrison identity gives in closed form.
//! * [`Scheme::MaxRp`]: maximum receive power at the target with a hard
//!   null toward the other user, solved in a Householder null basis.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{alignment_phases, steering_vector, FrequencyAllocation, Scenario};
use crate::error::{Error, Result};
use crate::linalg::{self, derotate, fix_global_phase, inner, normalized, NullBasis};

pub use crate::linalg::dominant_eigenvector;

const UNIT_NORM_TOL: f64 = 1e-12;
/// Below this `‖Fᴴ p‖` the target channel has no component outside the null constraint.
pub const MAXRP_DEGENERACY_TOL: f64 = 1e-10;

/// Transmit power budget and its split between CM and AN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    beta: f64,
    total_power: f64,
    noise_power: f64,
}

impl PowerSplit {
    /// `beta` is the CM share of `total_power` (watts) and must lie in (0, 1).
    pub fn new(beta: f64, total_power: f64, noise_power: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::invalid("beta", format!("beta out of (0,1): {beta}")));
        }
        Self::checked(beta, total_power, noise_power)
    }

    /// All power on the confidential message, no artificial noise (`β = 1`).
    pub fn message_only(total_power: f64, noise_power: f64) -> Result<Self> {
        Self::checked(1.0, total_power, noise_power)
    }

    /// Solves `P_s` from `SNR = g_d · P_s / σ²`, the total transmit power
    /// received at Bob's range over the noise power.
    pub fn from_snr_db(beta: f64, noise_power: f64, scenario: &Scenario, snr_db: f64) -> Result<Self> {
        let total = total_power_for_snr(noise_power, scenario, snr_db);
        if beta == 1.0 {
            Self::message_only(total, noise_power)
        } else {
            Self::new(beta, total, noise_power)
        }
    }

    fn checked(beta: f64, total_power: f64, noise_power: f64) -> Result<Self> {
        if !(total_power > 0.0 && total_power.is_finite()) {
            return Err(Error::invalid("total_power", "must be positive"));
        }
        if !(noise_power > 0.0 && noise_power.is_finite()) {
            return Err(Error::invalid("sigma2", "noise power must be positive"));
        }
        Ok(Self {
            beta,
            total_power,
            noise_power,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn cm_power(&self) -> f64 {
        self.beta * self.total_power
    }

    pub fn an_power(&self) -> f64 {
        (1.0 - self.beta) * self.total_power
    }

    /// Same budget with the CM and AN shares exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            beta: 1.0 - self.beta,
            ..*self
        }
    }
}

pub fn total_power_for_snr(noise_power: f64, scenario: &Scenario, snr_db: f64) -> f64 {
    10f64.powf(snr_db / 10.0) * noise_power / scenario.bob_gain()
}

/// Unit-norm complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexWeightVector(Vec<Complex64>);

impl ComplexWeightVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        let n = linalg::norm(&entries);
        if (n - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::invalid("weights", format!("norm {n} is not 1")));
        }
        Ok(Self(entries))
    }

    fn from_direction(v: &[Complex64], tol: f64) -> Option<Self> {
        let mut unit = normalized(v, tol)?;
        fix_global_phase(&mut unit);
        Some(Self(unit))
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.0)
    }
}

/// Amplitude-beamforming rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Eab,
    Leakage,
    MaxRp,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Eab, Scheme::Leakage, Scheme::MaxRp];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Eab => "eab",
            Scheme::Leakage => "leakage",
            Scheme::MaxRp => "maxrp",
        }
    }

    /// Stable numeric tag used when deriving random substreams.
    pub fn id(&self) -> u64 {
        match self {
            Scheme::Eab => 1,
            Scheme::Leakage => 2,
            Scheme::MaxRp => 3,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eab" => Ok(Scheme::Eab),
            "leakage" | "slnr" => Ok(Scheme::Leakage),
            "maxrp" | "max-rp" => Ok(Scheme::MaxRp),
            other => Err(Error::invalid("scheme", format!("unknown scheme {other:?}"))),
        }
    }
}

/// Steering vectors of both users seen through each alignment diagonal.
///
/// `p_x = Pᴴ h_x` (Bob-aligned) and `q_x = Qᴴ h_x` (Eve-aligned).
#[derive(Debug, Clone)]
pub struct AlignedChannels {
    pub bob_phases: Vec<Complex64>,
    pub eve_phases: Vec<Complex64>,
    pub p_bob: Vec<Complex64>,
    pub p_eve: Vec<Complex64>,
    pub q_bob: Vec<Complex64>,
    pub q_eve: Vec<Complex64>,
}

impl AlignedChannels {
    pub fn new(scenario: &Scenario, alloc: &FrequencyAllocation) -> Self {
        let geom = scenario.geometry();
        let bob_phases = alignment_phases(geom, alloc, scenario.bob());
        let eve_phases = alignment_phases(geom, alloc, scenario.eve());
        let h_bob = steering_vector(geom, alloc, scenario.bob()).into_entries();
        let h_eve = steering_vector(geom, alloc, scenario.eve()).into_entries();
        Self {
            p_bob: derotate(&bob_phases, &h_bob),
            p_eve: derotate(&bob_phases, &h_eve),
            q_bob: derotate(&eve_phases, &h_bob),
            q_eve: derotate(&eve_phases, &h_eve),
            bob_phases,
            eve_phases,
        }
    }
}

/// Equal amplitude profile `1/√N`.
pub fn eab_amplitudes(n_antennas: usize) -> Result<ComplexWeightVector> {
    if n_antennas < 2 {
        return Err(Error::invalid("n_antennas", "need at least 2 antennas"));
    }
    let a = Complex64::new(1.0 / (n_antennas as f64).sqrt(), 0.0);
    Ok(ComplexWeightVector(vec![a; n_antennas]))
}

/// Dominant eigenvector of `(leak_gain · l lᴴ + noise_ratio · I)⁻¹ · s sᴴ`,
/// i.e. the normalized `(leak_gain · l lᴴ + noise_ratio · I)⁻¹ s`.
///
/// The signal gain only scales the eigenvalue, so it does not appear.
/// An infinite `noise_ratio` is the limit where leakage stops mattering and
/// returns `s` normalized.
pub fn leakage_direction(
    signal: &[Complex64],
    leak: &[Complex64],
    leak_gain: f64,
    noise_ratio: f64,
) -> ComplexWeightVector {
    let dir: Vec<Complex64> = if noise_ratio.is_infinite() {
        signal.to_vec()
    } else {
        // Sherman-Morrison; the overall 1/noise_ratio factor is dropped.
        let k = leak_gain * inner(leak, signal) / (noise_ratio + leak_gain * inner(leak, leak).re);
        signal.iter().zip(leak).map(|(s, l)| s - l * k).collect()
    };
    ComplexWeightVector::from_direction(&dir, 0.0)
        .expect("positive definite solve of a nonzero signal is nonzero")
}

/// Max-SLNR amplitude vector `a` for the confidential message.
pub fn leakage_cm(scenario: &Scenario, alloc: &FrequencyAllocation, split: &PowerSplit) -> ComplexWeightVector {
    let ch = AlignedChannels::new(scenario, alloc);
    leakage_cm_from(&ch, scenario, split)
}

fn leakage_cm_from(ch: &AlignedChannels, scenario: &Scenario, split: &PowerSplit) -> ComplexWeightVector {
    let noise_ratio = split.noise_power() / split.cm_power();
    leakage_direction(&ch.p_bob, &ch.p_eve, scenario.eve_gain(), noise_ratio)
}

/// Max-SLNR amplitude vector `b` for the artificial noise, treating AN as
/// Eve's useful signal and its power at Bob as leakage.
pub fn leakage_an(scenario: &Scenario, alloc: &FrequencyAllocation, split: &PowerSplit) -> ComplexWeightVector {
    let ch = AlignedChannels::new(scenario, alloc);
    leakage_an_from(&ch, scenario, split)
}

fn leakage_an_from(ch: &AlignedChannels, scenario: &Scenario, split: &PowerSplit) -> ComplexWeightVector {
    let an = split.an_power();
    let noise_ratio = if an > 0.0 {
        split.noise_power() / an
    } else {
        f64::INFINITY
    };
    leakage_direction(&ch.q_eve, &ch.q_bob, scenario.bob_gain(), noise_ratio)
}

/// Orthonormal `N × (N-1)` basis of the vectors orthogonal to `c`.
pub fn null_basis_of_vector(c: &[Complex64]) -> Result<NullBasis> {
    NullBasis::of(c)
}

/// Maximizes `|targetᴴ x|²` over unit `x` with `nullᴴ x = 0`.
fn constrained_max_power(target: &[Complex64], null: &[Complex64]) -> Result<Option<ComplexWeightVector>> {
    let basis = NullBasis::of(null)?;
    // The reduced objective is rank one, so its top eigenvector is Fᴴ target itself.
    let reduced = basis.project(target);
    let Some(u) = normalized(&reduced, MAXRP_DEGENERACY_TOL) else {
        return Ok(None);
    };
    Ok(ComplexWeightVector::from_direction(&basis.lift(&u), 0.0))
}

/// Max-RP amplitude vector `a`: full CM power at Bob, exact null toward Eve.
pub fn maxrp_cm(scenario: &Scenario, alloc: &FrequencyAllocation, _split: &PowerSplit) -> Result<ComplexWeightVector> {
    let ch = AlignedChannels::new(scenario, alloc);
    maxrp_cm_from(&ch)
}

fn maxrp_cm_from(ch: &AlignedChannels) -> Result<ComplexWeightVector> {
    constrained_max_power(&ch.p_bob, &ch.p_eve)?.ok_or(Error::BobInEveConstraint)
}

/// Max-RP amplitude vector `b`: full AN power at Eve, exact null toward Bob.
pub fn maxrp_an(scenario: &Scenario, alloc: &FrequencyAllocation, _split: &PowerSplit) -> Result<ComplexWeightVector> {
    let ch = AlignedChannels::new(scenario, alloc);
    maxrp_an_from(&ch)
}

fn maxrp_an_from(ch: &AlignedChannels) -> Result<ComplexWeightVector> {
    constrained_max_power(&ch.q_eve, &ch.q_bob)?.ok_or(Error::EveInBobConstraint)
}

/// `|amplitudes(n)| · phases(n)`. Taking moduli keeps the norm, so the result
/// stays unit norm.
pub fn compose(amplitudes: &ComplexWeightVector, phases: &[Complex64]) -> ComplexWeightVector {
    assert_eq!(amplitudes.len(), phases.len(), "amplitude and phase lengths differ");
    let out: Vec<Complex64> = amplitudes
        .entries()
        .iter()
        .zip(phases)
        .map(|(a, p)| p * a.norm())
        .collect();
    debug_assert!((linalg::norm(&out) - amplitudes.norm()).abs() < 1e-12);
    ComplexWeightVector(out)
}

/// Final CM and AN weights together with the complex amplitude vectors they
/// were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    v_cm: ComplexWeightVector,
    v_an: ComplexWeightVector,
    cm_amplitudes: ComplexWeightVector,
    an_amplitudes: ComplexWeightVector,
    scheme: Scheme,
    allocation: FrequencyAllocation,
}

impl Beamformer {
    pub fn v_cm(&self) -> &ComplexWeightVector {
        &self.v_cm
    }

    pub fn v_an(&self) -> &ComplexWeightVector {
        &self.v_an
    }

    /// Complex `a` before the modulus step.
    pub fn cm_amplitudes(&self) -> &ComplexWeightVector {
        &self.cm_amplitudes
    }

    /// Complex `b` before the modulus step.
    pub fn an_amplitudes(&self) -> &ComplexWeightVector {
        &self.an_amplitudes
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn allocation(&self) -> &FrequencyAllocation {
        &self.allocation
    }

    /// Writes one row per antenna:
    /// `antenna_index,subcarrier_index,re_v_cm,im_v_cm,re_v_an,im_v_an`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "antenna_index,subcarrier_index,re_v_cm,im_v_cm,re_v_an,im_v_an")?;
        for (n, ((cm, an), m)) in self
            .v_cm
            .entries()
            .iter()
            .zip(self.v_an.entries())
            .zip(self.allocation.indices())
            .enumerate()
        {
            writeln!(
                out,
                "{n},{m},{:.16e},{:.16e},{:.16e},{:.16e}",
                cm.re, cm.im, an.re, an.im
            )?;
        }
        Ok(())
    }
}

pub fn build_beamformer(
    scheme: Scheme,
    scenario: &Scenario,
    alloc: &FrequencyAllocation,
    split: &PowerSplit,
) -> Result<Beamformer> {
    let ch = AlignedChannels::new(scenario, alloc);
    let (a, b) = match scheme {
        Scheme::Eab => {
            let eq = eab_amplitudes(scenario.geometry().n_antennas())?;
            (eq.clone(), eq)
        }
        Scheme::Leakage => (
            leakage_cm_from(&ch, scenario, split),
            leakage_an_from(&ch, scenario, split),
        ),
        Scheme::MaxRp => (maxrp_cm_from(&ch)?, maxrp_an_from(&ch)?),
    };
    Ok(Beamformer {
        v_cm: compose(&a, &ch.bob_phases),
        v_an: compose(&b, &ch.eve_phases),
        cm_amplitudes: a,
        an_amplitudes: b,
        scheme,
        allocation: alloc.clone(),
    })
}
