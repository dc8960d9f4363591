//! Core library for comparing massive-MIMO links across carrier bands.
//!
//! The crate models a single point-to-point link between two uniform linear
//! arrays and provides everything needed to compare a sub-6 GHz deployment
//! against a mm-wave one under matched assumptions:
//!
//! - [`array_geometry`] — half-wavelength ULA steering vectors and the
//!   coherence between beams pointed at different angles;
//! - [`propagation`] — large-scale link budgets: a COST-Hata-based
//!   three-slope path loss for the sub-6 GHz band, a parametric urban /
//!   indoor attenuation table for mm-wave carriers, and a
//!   distance-dependent line-of-sight model;
//! - [`channel_models`] — small-scale fading: i.i.d. Rayleigh matrices for
//!   rich scattering and a clustered, sparse multipath model for mm-wave,
//!   with per-path bookkeeping for steering-based transceivers;
//! - [`beamforming`] — channel-matched (SVD) and angle-steered rank-`m`
//!   transceivers plus the resulting spectral efficiency;
//! - [`estimation`] — orthogonal pilot training and a linear MMSE channel
//!   estimator, with the perfect-vs-estimated CSI comparison;
//! - [`metrics`] — channel diagnostics: energy concentration, numerical
//!   rank, and best-antenna selection.
//!
//! All randomness flows through caller-supplied [`rand::Rng`] values, so
//! every simulation in the companion crates is reproducible from a seed.

pub mod array_geometry;
pub mod beamforming;
pub mod channel_models;
pub mod error;
pub mod estimation;
pub mod metrics;
pub mod propagation;

pub use error::{Error, Result};
