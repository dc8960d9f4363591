//! Training-based channel estimation: orthogonal pilot construction, the
//! noisy training observation, a linear MMSE estimator for the
//! rich-scattering branch, and the perfect-versus-estimated-CSI spectral
//! efficiency comparison.
//!
//! Estimators are pluggable behind [`ChannelEstimator`], so alternative
//! algorithms (e.g. sparse mm-wave estimators) can reuse the same training
//! and evaluation pipeline.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::beamforming::{cm_fd_beamformers, spectral_efficiency, BeamformingMethod};
use crate::channel_models::{Band, ChannelMatrix};
use crate::error::{Error, Result};

/// A known training matrix: one row per transmit antenna, one column per
/// training symbol, with mutually orthogonal rows of per-symbol power
/// `pilot_power`.
#[derive(Clone, Debug)]
pub struct PilotBlock {
    /// N_T x tau_p pilot symbols X.
    pub pilots: DMatrix<Complex64>,
    /// Training length in symbols.
    pub tau_p: usize,
    /// Per-symbol transmit power.
    pub pilot_power: f64,
}

impl PilotBlock {
    /// Number of transmit antennas covered by this block.
    pub fn n_tx(&self) -> usize {
        self.pilots.nrows()
    }

    /// Largest deviation of the row Gram matrix `X X^H` from
    /// `tau_p * pilot_power * I`, relative to that diagonal scale.
    pub fn gram_deviation(&self) -> f64 {
        let gram = &self.pilots * self.pilots.adjoint();
        let scale = self.tau_p as f64 * self.pilot_power;
        let mut worst = 0.0f64;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j {
                    Complex64::new(scale, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                worst = worst.max((gram[(i, j)] - target).norm());
            }
        }
        worst / scale
    }
}

/// Builds the minimal orthogonal pilot block: row `k` carries the `k`-th
/// discrete-Fourier sequence over `tau_p` symbols, scaled to `pilot_power`
/// per symbol. Requires `tau_p >= n_t`, the shortest training that admits
/// orthogonal rows.
pub fn make_orthogonal_pilots(n_t: usize, tau_p: usize, pilot_power: f64) -> Result<PilotBlock> {
    if n_t == 0 {
        return Err(Error::invalid("n_t", "must be at least 1"));
    }
    if tau_p < n_t {
        return Err(Error::PilotsTooShort { n_tx: n_t, tau_p });
    }
    if !(pilot_power.is_finite() && pilot_power > 0.0) {
        return Err(Error::invalid(
            "pilot_power",
            format!("must be positive, got {pilot_power}"),
        ));
    }
    let amplitude = pilot_power.sqrt();
    let step = std::f64::consts::TAU / tau_p as f64;
    let pilots = DMatrix::from_fn(n_t, tau_p, |k, s| {
        // Reduce k*s modulo tau_p before scaling to keep phases small and
        // the row Gram orthogonal to near machine precision.
        let phase = -step * ((k * s) % tau_p) as f64;
        Complex64::from_polar(amplitude, phase)
    });
    Ok(PilotBlock {
        pilots,
        tau_p,
        pilot_power,
    })
}

/// Simulates the training phase: `Y = H X + N` with i.i.d. complex-Gaussian
/// noise of per-entry variance `noise_var`. Panics on inconsistent
/// dimensions or negative noise variance (caller contract).
pub fn observe_training<R: Rng + ?Sized>(
    h_true: &ChannelMatrix,
    pilots: &PilotBlock,
    noise_var: f64,
    rng: &mut R,
) -> DMatrix<Complex64> {
    assert_eq!(
        h_true.n_tx(),
        pilots.n_tx(),
        "pilot block must cover every transmit antenna"
    );
    assert!(
        noise_var.is_finite() && noise_var >= 0.0,
        "noise variance must be non-negative, got {noise_var}"
    );
    let mut y = &h_true.entries * &pilots.pilots;
    if noise_var > 0.0 {
        let scale = (noise_var / 2.0).sqrt();
        for z in y.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z += Complex64::new(scale * re, scale * im);
        }
    }
    y
}

/// An estimated channel, with the per-entry mean squared error filled in
/// once a ground-truth matrix is available to compare against.
#[derive(Clone, Debug)]
pub struct EstimationResult {
    pub h_hat: ChannelMatrix,
    pub mse: Option<f64>,
}

impl EstimationResult {
    /// Records the realized per-entry squared error against the true
    /// channel.
    pub fn measured_against(mut self, truth: &ChannelMatrix) -> Result<Self> {
        if truth.n_rx() != self.h_hat.n_rx() || truth.n_tx() != self.h_hat.n_tx() {
            return Err(Error::invalid(
                "truth",
                format!(
                    "true channel is {}x{} but the estimate is {}x{}",
                    truth.n_rx(),
                    truth.n_tx(),
                    self.h_hat.n_rx(),
                    self.h_hat.n_tx()
                ),
            ));
        }
        let dims = (truth.n_rx() * truth.n_tx()) as f64;
        let err = (&self.h_hat.entries - &truth.entries).norm_squared();
        self.mse = Some(err / dims);
        Ok(self)
    }
}

/// Linear MMSE channel estimate from the training observation:
///
/// `H_hat = beta tau_p P / (beta tau_p P + noise_var) * Y X^H / (tau_p P)`
///
/// where `beta` is the prior per-entry channel variance (assumed known).
/// The shrinkage factor tends to 1 as noise vanishes (plain least squares)
/// and to 0 as the prior concentrates at zero. Requires orthogonal pilot
/// rows — the closed form relies on `X X^H` being a scaled identity.
pub fn lmmse_estimate(
    y: &DMatrix<Complex64>,
    pilots: &PilotBlock,
    beta: f64,
    noise_var: f64,
) -> Result<EstimationResult> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(
            "beta",
            format!("must be positive, got {beta}"),
        ));
    }
    if !(noise_var.is_finite() && noise_var >= 0.0) {
        return Err(Error::invalid(
            "noise_var",
            format!("must be non-negative, got {noise_var}"),
        ));
    }
    if y.ncols() != pilots.tau_p {
        return Err(Error::invalid(
            "y",
            format!(
                "observation has {} columns but the pilot block spans {} symbols",
                y.ncols(),
                pilots.tau_p
            ),
        ));
    }
    let deviation = pilots.gram_deviation();
    if deviation > 1e-10 {
        return Err(Error::NonOrthogonalPilots {
            max_off_diagonal: deviation,
        });
    }
    let energy = pilots.tau_p as f64 * pilots.pilot_power;
    let shrink = beta * energy / (beta * energy + noise_var);
    let h_hat = (y * pilots.pilots.adjoint()).scale(shrink / energy);
    Ok(EstimationResult {
        h_hat: ChannelMatrix::new(h_hat, Band::MuWave),
        mse: None,
    })
}

/// Analytic per-entry mean squared error of the LMMSE estimate under the
/// Gaussian prior/noise model: `beta * noise_var / (beta tau_p P + noise_var)`.
pub fn lmmse_analytic_mse(beta: f64, tau_p: usize, pilot_power: f64, noise_var: f64) -> f64 {
    let energy = tau_p as f64 * pilot_power;
    beta * noise_var / (beta * energy + noise_var)
}

/// A pluggable channel estimator consuming the training observation.
pub trait ChannelEstimator {
    fn estimate(&self, y: &DMatrix<Complex64>, pilots: &PilotBlock) -> Result<EstimationResult>;
}

/// The built-in LMMSE estimator with known prior variance and noise level.
#[derive(Clone, Copy, Debug)]
pub struct LmmseEstimator {
    pub beta: f64,
    pub noise_var: f64,
}

impl ChannelEstimator for LmmseEstimator {
    fn estimate(&self, y: &DMatrix<Complex64>, pilots: &PilotBlock) -> Result<EstimationResult> {
        lmmse_estimate(y, pilots, self.beta, self.noise_var)
    }
}

/// Spectral efficiency when the transceiver is designed from an estimate but
/// the signal passes through the true channel: beamformers are built from
/// `h_hat` and evaluated against `h_true`. Only the channel-matched method
/// applies — steering beams need path angles, which an entry-wise estimate
/// does not carry.
pub fn se_with_estimated_csi(
    h_true: &ChannelMatrix,
    h_hat: &ChannelMatrix,
    method: BeamformingMethod,
    m: usize,
    snr_linear: f64,
) -> Result<f64> {
    match method {
        BeamformingMethod::CmFd => {
            let bf = cm_fd_beamformers(h_hat, m)?;
            spectral_efficiency(h_true, &bf, snr_linear)
        }
        BeamformingMethod::AnSteering => Err(Error::SteeringNeedsPaths),
    }
}
