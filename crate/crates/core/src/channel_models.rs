//! Random channel generation for the two bands: an i.i.d. Rayleigh model for
//! the sub-6 GHz carrier and a clustered sparse-path model (with an optional
//! direct ray) for mm-wave carriers.
//!
//! The clustered matrix is assembled as
//!
//! `H = gamma * sum_p alpha_p * sqrt(L_p) * a_r(aoa_p) a_t(aod_p)^H`
//!
//! with `gamma = sqrt(N_T N_R / (n_cl n_ray))` chosen so the mean received
//! power scales with the antenna product. Every term — including the direct
//! ray — is kept in that shared form; see [`PathComponent::gain`] for how the
//! direct ray's scaling is folded in.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::array_geometry::{ula_response, Angle};
use crate::error::{Error, Result};
use crate::propagation::{draw_los, mm_wave_attenuation_linear, LosModel, MmWaveScenario};

/// Which carrier band a channel realization belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Band {
    MuWave,
    MmWave,
}

/// One realization of the channel matrix, receive antennas along rows.
#[derive(Clone, Debug)]
pub struct ChannelMatrix {
    pub entries: DMatrix<Complex64>,
    pub band: Band,
}

impl ChannelMatrix {
    pub fn new(entries: DMatrix<Complex64>, band: Band) -> Self {
        ChannelMatrix { entries, band }
    }

    /// Number of receive antennas (rows).
    pub fn n_rx(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of transmit antennas (columns).
    pub fn n_tx(&self) -> usize {
        self.entries.ncols()
    }

    /// Total power `sum |h_ij|^2` (squared Frobenius norm).
    pub fn frobenius_power(&self) -> f64 {
        self.entries.norm_squared()
    }
}

/// Draws an i.i.d. Rayleigh-fading matrix: each entry is complex Gaussian
/// with zero mean and variance `beta` (the linear large-scale gain).
pub fn gen_mu_wave<R: Rng + ?Sized>(
    n_r: usize,
    n_t: usize,
    beta: f64,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    if n_r == 0 {
        return Err(Error::invalid("n_r", "must be at least 1"));
    }
    if n_t == 0 {
        return Err(Error::invalid("n_t", "must be at least 1"));
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(
            "beta",
            format!("must be positive, got {beta}"),
        ));
    }
    // Column-major fill order; the scale puts beta/2 in each of the real and
    // imaginary parts.
    let scale = (beta / 2.0).sqrt();
    let entries = DMatrix::from_fn(n_r, n_t, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(scale * re, scale * im)
    });
    Ok(ChannelMatrix::new(entries, Band::MuWave))
}

/// One propagation ray of the clustered model.
///
/// For a scattered ray, `gain` is the small-scale fading coefficient
/// (complex Gaussian, unit variance). For the direct ray (`is_los`), `gain`
/// is `sqrt(n_cl * n_ray) * exp(j theta)` with a uniform random phase: the
/// `sqrt(n_cl * n_ray)` factor cancels the shared `gamma` normalization so
/// the direct ray keeps its full `sqrt(N_T N_R L(d))` amplitude while every
/// path flows through the same assembly formula.
#[derive(Clone, Copy, Debug)]
pub struct PathComponent {
    /// Small-scale complex gain (see above for the direct-ray convention).
    pub gain: Complex64,
    /// Large-scale attenuation as a linear power ratio, strictly positive.
    pub attenuation_linear: f64,
    /// Angle of departure at the transmit array.
    pub aod: Angle,
    /// Angle of arrival at the receive array.
    pub aoa: Angle,
    /// Marks the direct (line-of-sight) ray.
    pub is_los: bool,
}

impl PathComponent {
    /// Received-power contribution of this path, the sort key for
    /// strongest-first ordering.
    pub fn received_power(&self) -> f64 {
        self.gain.norm_sqr() * self.attenuation_linear
    }

    /// Gain with the attenuation folded in: the coefficient multiplying the
    /// steering-vector outer product (before `gamma`).
    pub fn flattened_gain(&self) -> Complex64 {
        self.gain * self.attenuation_linear.sqrt()
    }
}

/// How the length of a scattered path relates to the direct link distance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum PathLengthModel {
    /// Every scattered path has the direct link length.
    #[default]
    LinkDistance,
    /// Path length is the link distance times a uniform factor in
    /// `[1, max_factor]`, modelling single-bounce excess length.
    UniformExcess { max_factor: f64 },
}

impl PathLengthModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PathLengthModel::LinkDistance => Ok(()),
            PathLengthModel::UniformExcess { max_factor } => {
                if max_factor.is_finite() && max_factor >= 1.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(
                        "path_excess_max",
                        format!("must be at least 1, got {max_factor}"),
                    ))
                }
            }
        }
    }

    fn draw<R: Rng + ?Sized>(&self, link_distance_m: f64, rng: &mut R) -> f64 {
        match *self {
            PathLengthModel::LinkDistance => link_distance_m,
            PathLengthModel::UniformExcess { max_factor } => {
                if max_factor == 1.0 {
                    link_distance_m
                } else {
                    link_distance_m * rng.random_range(1.0..max_factor)
                }
            }
        }
    }
}

/// Parameters of the clustered mm-wave channel generator.
#[derive(Clone, Debug)]
pub struct ClusterConfig {
    /// Number of scattering clusters.
    pub n_cl: usize,
    /// Rays contributed by each cluster.
    pub n_ray: usize,
    /// Standard deviation of the Laplacian ray-angle offset around the
    /// cluster center, in radians.
    pub ray_angle_spread_rad: f64,
    /// Attenuation scenario applied to scattered paths.
    pub scenario: MmWaveScenario,
    /// Attenuation scenario for the direct ray. `None` selects the `-los`
    /// sibling of an `-nlos` scenario from the registry (same carrier), or
    /// falls back to `scenario` itself.
    pub los_scenario: Option<MmWaveScenario>,
    /// Whether/when the direct ray exists.
    pub los_model: LosModel,
    /// Direct transmitter-receiver distance in metres.
    pub link_distance_m: f64,
    /// How scattered-path lengths are drawn.
    pub path_length_model: PathLengthModel,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            n_cl: 5,
            n_ray: 10,
            ray_angle_spread_rad: 5f64.to_radians(),
            scenario: MmWaveScenario::by_name(
                "umi-street-canyon-nlos",
                crate::propagation::DEFAULT_CARRIER_GHZ,
            )
            .expect("built-in scenario"),
            los_scenario: None,
            los_model: LosModel::default(),
            link_distance_m: 100.0,
            path_length_model: PathLengthModel::default(),
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cl == 0 {
            return Err(Error::invalid("n_cl", "must be at least 1"));
        }
        if self.n_ray == 0 {
            return Err(Error::invalid("n_ray", "must be at least 1"));
        }
        if !(self.ray_angle_spread_rad.is_finite() && self.ray_angle_spread_rad > 0.0) {
            return Err(Error::invalid(
                "ray_angle_spread_rad",
                format!("must be positive, got {}", self.ray_angle_spread_rad),
            ));
        }
        if !(self.link_distance_m.is_finite() && self.link_distance_m > 0.0) {
            return Err(Error::invalid(
                "link_distance_m",
                format!("must be positive, got {}", self.link_distance_m),
            ));
        }
        self.scenario.validate()?;
        if let Some(los) = &self.los_scenario {
            los.validate()?;
        }
        self.los_model.validate()?;
        self.path_length_model.validate()?;
        Ok(())
    }

    /// The attenuation scenario used for the direct ray (see `los_scenario`).
    pub fn los_attenuation_scenario(&self) -> MmWaveScenario {
        if let Some(los) = &self.los_scenario {
            return los.clone();
        }
        if let Some(base) = self.scenario.name.strip_suffix("-nlos") {
            let sibling = format!("{base}-los");
            if let Some(s) = MmWaveScenario::by_name(&sibling, self.scenario.carrier_ghz) {
                return s;
            }
        }
        self.scenario.clone()
    }

    /// Total number of scattered rays, `n_cl * n_ray`.
    pub fn n_scattered(&self) -> usize {
        self.n_cl * self.n_ray
    }
}

/// A flattened path: the per-path coefficient with `sqrt(attenuation)`
/// absorbed, plus its angle pair. `gamma * sum alpha * a_r a_t^H` rebuilds
/// the channel matrix.
#[derive(Clone, Copy, Debug)]
pub struct FlattenedPath {
    pub alpha: Complex64,
    pub aoa: Angle,
    pub aod: Angle,
}

/// A clustered-channel realization: the assembled matrix plus the path list
/// it was built from, sorted strongest-first by received power.
#[derive(Clone, Debug)]
pub struct MmWaveChannelDraw {
    pub matrix: ChannelMatrix,
    pub paths: Vec<PathComponent>,
    /// Normalization `sqrt(N_T N_R / (n_cl n_ray))` shared by all paths.
    pub gamma: f64,
}

impl MmWaveChannelDraw {
    /// Assembles a draw from an explicit path list. `n_cl` and `n_ray` fix
    /// the `gamma` normalization; the list may additionally contain a direct
    /// ray. Paths are sorted strongest-first before assembly.
    pub fn from_paths(
        n_r: usize,
        n_t: usize,
        n_cl: usize,
        n_ray: usize,
        mut paths: Vec<PathComponent>,
    ) -> Result<Self> {
        if n_r == 0 {
            return Err(Error::invalid("n_r", "must be at least 1"));
        }
        if n_t == 0 {
            return Err(Error::invalid("n_t", "must be at least 1"));
        }
        if n_cl == 0 || n_ray == 0 {
            return Err(Error::invalid(
                "n_cl",
                "cluster and ray counts must be at least 1",
            ));
        }
        for p in &paths {
            if !(p.attenuation_linear.is_finite() && p.attenuation_linear > 0.0) {
                return Err(Error::invalid(
                    "attenuation_linear",
                    format!("must be positive, got {}", p.attenuation_linear),
                ));
            }
        }
        paths.sort_by(|a, b| b.received_power().total_cmp(&a.received_power()));
        let gamma = ((n_t * n_r) as f64 / (n_cl * n_ray) as f64).sqrt();
        let mut entries = DMatrix::<Complex64>::zeros(n_r, n_t);
        for p in &paths {
            let a_r = ula_response(p.aoa, n_r).into_vector();
            let a_t = ula_response(p.aod, n_t).into_vector();
            accumulate_outer(&mut entries, gamma * p.flattened_gain(), &a_r, &a_t);
        }
        Ok(MmWaveChannelDraw {
            matrix: ChannelMatrix::new(entries, Band::MmWave),
            paths,
            gamma,
        })
    }

    /// The per-path coefficients with attenuation absorbed, in the same
    /// strongest-first order as `paths`.
    pub fn flatten_paths(&self) -> Vec<FlattenedPath> {
        self.paths
            .iter()
            .map(|p| FlattenedPath {
                alpha: p.flattened_gain(),
                aoa: p.aoa,
                aod: p.aod,
            })
            .collect()
    }

    /// Expected per-entry channel power given this draw's large-scale state
    /// (attenuations and direct-ray presence), averaging only over the
    /// small-scale fading: `gamma^2/(N_T N_R) * sum_p w_p` with `w_p` the
    /// attenuation for scattered rays (unit mean-square gain) and
    /// `|gain|^2 * attenuation` for the deterministic-magnitude direct ray.
    pub fn large_scale_power(&self) -> f64 {
        let dims = (self.matrix.n_rx() * self.matrix.n_tx()) as f64;
        let weight: f64 = self
            .paths
            .iter()
            .map(|p| {
                if p.is_los {
                    p.gain.norm_sqr() * p.attenuation_linear
                } else {
                    p.attenuation_linear
                }
            })
            .sum();
        self.gamma * self.gamma * weight / dims
    }

    /// The matrix rescaled to unit expected per-entry power, so that a
    /// signal-to-noise ratio applied to it reads as the received (post
    /// path-loss) SNR.
    pub fn normalized_matrix(&self) -> Result<ChannelMatrix> {
        let power = self.large_scale_power();
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::ZeroMatrix);
        }
        let entries = self.matrix.entries.scale(1.0 / power.sqrt());
        Ok(ChannelMatrix::new(entries, Band::MmWave))
    }
}

/// `m += coeff * x * y^H` accumulated column by column.
fn accumulate_outer(
    m: &mut DMatrix<Complex64>,
    coeff: Complex64,
    x: &DVector<Complex64>,
    y: &DVector<Complex64>,
) {
    for j in 0..m.ncols() {
        let w = coeff * y[j].conj();
        let mut col = m.column_mut(j);
        col.axpy(w, x, Complex64::new(1.0, 0.0));
    }
}

/// Draws one clustered-channel realization.
///
/// Per cluster, a central departure/arrival angle pair is drawn uniformly on
/// [-pi/2, pi/2]; each ray offsets both angles by independent truncated
/// Laplacian deviations of standard deviation `ray_angle_spread_rad`. Ray
/// gains are unit-variance complex Gaussians; per-ray attenuations come from
/// the scenario at the drawn path length with independent shadowing. If the
/// line-of-sight model fires, a direct ray at the link distance is appended.
pub fn gen_mm_wave<R: Rng + ?Sized>(
    n_r: usize,
    n_t: usize,
    cfg: &ClusterConfig,
    rng: &mut R,
) -> Result<MmWaveChannelDraw> {
    cfg.validate()?;
    let mut paths = Vec::with_capacity(cfg.n_scattered() + 1);
    for _ in 0..cfg.n_cl {
        let center_aod =
            rng.random_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2);
        let center_aoa =
            rng.random_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2);
        for _ in 0..cfg.n_ray {
            let aod = offset_angle(center_aod, cfg.ray_angle_spread_rad, rng);
            let aoa = offset_angle(center_aoa, cfg.ray_angle_spread_rad, rng);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let gain = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
            let r = cfg.path_length_model.draw(cfg.link_distance_m, rng);
            let attenuation_linear = mm_wave_attenuation_linear(r, &cfg.scenario, rng)?;
            paths.push(PathComponent {
                gain,
                attenuation_linear,
                aod: Angle::from_radians(aod),
                aoa: Angle::from_radians(aoa),
                is_los: false,
            });
        }
    }
    if draw_los(cfg.link_distance_m, &cfg.los_model, rng)? {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let aoa = rng.random_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2);
        let aod = rng.random_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2);
        let los_scenario = cfg.los_attenuation_scenario();
        let attenuation_linear =
            mm_wave_attenuation_linear(cfg.link_distance_m, &los_scenario, rng)?;
        // The sqrt(n_cl * n_ray) factor cancels gamma's denominator, giving
        // the direct ray its full sqrt(N_T N_R L) amplitude.
        let magnitude = (cfg.n_scattered() as f64).sqrt();
        paths.push(PathComponent {
            gain: Complex64::from_polar(magnitude, theta),
            attenuation_linear,
            aod: Angle::from_radians(aod),
            aoa: Angle::from_radians(aoa),
            is_los: true,
        });
    }
    MmWaveChannelDraw::from_paths(n_r, n_t, cfg.n_cl, cfg.n_ray, paths)
}

/// Draws `center + offset` with a Laplacian offset of standard deviation
/// `spread_rad`, re-drawing until the result lies in [-pi/2, pi/2] (the
/// truncation preserves continuous, atom-free angle distributions).
fn offset_angle<R: Rng + ?Sized>(center: f64, spread_rad: f64, rng: &mut R) -> f64 {
    // Laplacian scale parameter: std dev = sqrt(2) * scale.
    let scale = spread_rad * std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..1000 {
        let u: f64 = rng.random::<f64>() - 0.5;
        let tail = 1.0 - 2.0 * u.abs();
        if tail <= 0.0 {
            continue;
        }
        let offset = -scale * u.signum() * tail.ln();
        let angle = center + offset;
        if angle.abs() <= std::f64::consts::FRAC_PI_2 {
            return angle;
        }
    }
    // Unreachable in practice for spreads far below pi; keep the math total.
    center.clamp(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2)
}
