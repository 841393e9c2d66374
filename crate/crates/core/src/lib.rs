//! Simulator for secure precise wireless transmission with precise jamming.
//!
//! A uniform linear array assigns each antenna a randomly selected OFDM
//! subcarrier, which makes the array pattern depend on range as well as angle.
//! The confidential message is phase-aligned toward Bob and the artificial
//! noise toward Eve; only the per-antenna amplitudes differ between the
//! equal-amplitude, leakage (Max-SLNR) and maximum-receive-power schemes.
//!
//! * [`array`]: geometry, subcarrier allocation, steering vectors, path loss.
//! * [`beamform`]: amplitude schemes and phase-aligned beamformers.
//! * [`metrics`]: SINR, secrecy rate, angle × range SINR surfaces.
//! * [`montecarlo`]: QPSK BER and secrecy-rate curves versus SNR.
//! * [`config`] and [`cli`]: scenario files and the `pjsim` command line.

pub mod array;
pub mod beamform;
pub mod cli;
pub mod config;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod montecarlo;
pub mod seeding;

pub use array::{ArrayGeometry, FrequencyAllocation, PolarPosition, Scenario, SteeringVector};
pub use beamform::{Beamformer, ComplexWeightVector, PowerSplit, Scheme};
pub use error::{Error, Result};
pub use metrics::{BeampatternGrid, GridSpec};
pub use montecarlo::{BerReport, SrReport, TrialConfig};
pub use seeding::AllocationSource;
