//! Independent re-implementations used as oracles. Nothing here calls the
//! closed-form solvers under test.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use precise_jamming::array::{ArrayGeometry, FrequencyAllocation, PolarPosition, Scenario};
use precise_jamming::beamform::PowerSplit;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

pub const C: f64 = 299_792_458.0;

pub fn default_geometry() -> ArrayGeometry {
    ArrayGeometry::half_wavelength(32, 3e9, 5e6, 1024).unwrap()
}

pub fn default_scenario() -> Scenario {
    Scenario::new(
        default_geometry(),
        PolarPosition::from_degrees(30.0, 650.0).unwrap(),
        PolarPosition::from_degrees(100.0, 550.0).unwrap(),
        1.0,
    )
    .unwrap()
}

pub fn default_split(snr_db: f64) -> PowerSplit {
    PowerSplit::from_snr_db(0.5, 1e-9, &default_scenario(), snr_db).unwrap()
}

/// Ψ_n evaluated term by term as written, each product reduced to a
/// fraction of a cycle in double-double arithmetic before subtracting.
pub fn direct_phase(geom: &ArrayGeometry, alloc: &FrequencyAllocation, n: usize, pos: PolarPosition) -> f64 {
    let f_n = geom.carrier_hz() + alloc.indices()[n] as f64 * geom.subcarrier_spacing_hz();
    let path = pos.range() - n as f64 * geom.spacing() * pos.theta().cos();
    let first = cycles(f_n, path);
    let second = cycles(geom.carrier_hz(), pos.range());
    2.0 * std::f64::consts::PI * (first - second)
}

// x * y / c as cycles, keeping the rounding error of the product.
fn cycles(x: f64, y: f64) -> f64 {
    let p = x * y;
    let err = x.mul_add(y, -p);
    let whole = (p / C).floor();
    // p - whole*C exactly enough: whole*C < 2^53 here.
    let rem = whole.mul_add(-C, p) + err;
    whole.rem_euclid(1.0) + rem / C
}

pub fn direct_steering(geom: &ArrayGeometry, alloc: &FrequencyAllocation, pos: PolarPosition) -> Vec<Complex64> {
    let n = geom.n_antennas();
    (0..n)
        .map(|k| Complex64::from_polar(1.0 / (n as f64).sqrt(), direct_phase(geom, alloc, k, pos)))
        .collect()
}

pub fn dvec(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}

pub fn outer(v: &[Complex64]) -> DMatrix<Complex64> {
    let x = dvec(v);
    &x * x.adjoint()
}

/// Channels through the alignment diagonals, built from the oracle steering.
pub struct OracleChannels {
    pub p_bob: Vec<Complex64>,
    pub p_eve: Vec<Complex64>,
    pub q_bob: Vec<Complex64>,
    pub q_eve: Vec<Complex64>,
}

pub fn oracle_channels(s: &Scenario, alloc: &FrequencyAllocation) -> OracleChannels {
    let g = s.geometry();
    let h_b = direct_steering(g, alloc, s.bob());
    let h_e = direct_steering(g, alloc, s.eve());
    let n = (g.n_antennas() as f64).sqrt();
    // P = diag(√N h_B), Q = diag(√N h_E) as unit phasors.
    let pb: Vec<Complex64> = h_b.iter().map(|z| z * n).collect();
    let pe: Vec<Complex64> = h_e.iter().map(|z| z * n).collect();
    let rot = |ph: &[Complex64], v: &[Complex64]| -> Vec<Complex64> {
        ph.iter().zip(v).map(|(a, b)| a.conj() * b).collect()
    };
    OracleChannels {
        p_bob: rot(&pb, &h_b),
        p_eve: rot(&pb, &h_e),
        q_bob: rot(&pe, &h_b),
        q_eve: rot(&pe, &h_e),
    }
}

/// `[g_e p_E p_Eᴴ + σ²/(βP_s) I]⁻¹ g_d p_B p_Bᴴ` by explicit inversion.
pub fn leakage_cm_matrix(s: &Scenario, ch: &OracleChannels, split: &PowerSplit, g_d: f64) -> DMatrix<Complex64> {
    let n = ch.p_bob.len();
    let denom = outer(&ch.p_eve) * Complex64::from(s.eve_gain())
        + DMatrix::identity(n, n) * Complex64::from(split.noise_power() / split.cm_power());
    denom.try_inverse().unwrap() * outer(&ch.p_bob) * Complex64::from(g_d)
}

/// `[g_d q_B q_Bᴴ + σ²/((1-β)P_s) I]⁻¹ g_e q_E q_Eᴴ` by explicit inversion.
pub fn leakage_an_matrix(s: &Scenario, ch: &OracleChannels, split: &PowerSplit) -> DMatrix<Complex64> {
    let n = ch.q_bob.len();
    let denom = outer(&ch.q_bob) * Complex64::from(s.bob_gain())
        + DMatrix::identity(n, n) * Complex64::from(split.noise_power() / split.an_power());
    denom.try_inverse().unwrap() * outer(&ch.q_eve) * Complex64::from(s.eve_gain())
}

/// Generalized Rayleigh quotient `xᴴ A x / xᴴ B x` with `A = g_s s sᴴ`,
/// `B = g_l l lᴴ + k I`.
pub fn slnr(x: &[Complex64], sig: &[Complex64], g_s: f64, leak: &[Complex64], g_l: f64, k: f64) -> f64 {
    let dot = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(p, q)| p.conj() * q).sum::<Complex64>();
    let xx = dot(x, x).re;
    g_s * dot(sig, x).norm_sqr() / (g_l * dot(leak, x).norm_sqr() + k * xx)
}

pub fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random unit vector with `cᴴ x = 0` by Gram-Schmidt against `c`.
pub fn random_unit_orthogonal<R: Rng>(rng: &mut R, c: &[Complex64]) -> Vec<Complex64> {
    let x = random_unit(rng, c.len());
    let cc: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let k: Complex64 = c.iter().zip(&x).map(|(a, b)| a.conj() * b).sum::<Complex64>() / cc;
    let y: Vec<Complex64> = x.iter().zip(c).map(|(a, b)| a - b * k).collect();
    let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    y.into_iter().map(|z| z / norm).collect()
}

pub fn cosine(a: &[Complex64], b: &[Complex64]) -> f64 {
    let d: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    d.norm() / (na * nb)
}

/// Gaussian tail `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    Normal::standard().sf(x)
}

pub fn q_inverse(p: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - p)
}

/// Random scenario: N from `sizes`, both users anywhere in (5°, 175°) × (50 m, 2 km).
pub fn random_scenario<R: Rng>(rng: &mut R, sizes: &[usize]) -> Scenario {
    let n = sizes[rng.random_range(0..sizes.len())];
    let g = ArrayGeometry::half_wavelength(n, 3e9, 5e6, 1024).unwrap();
    let mut pos = || PolarPosition::from_degrees(rng.random_range(5.0..175.0), rng.random_range(50.0..2000.0)).unwrap();
    let bob = pos();
    let eve = pos();
    Scenario::new(g, bob, eve, 1.0).unwrap()
}
