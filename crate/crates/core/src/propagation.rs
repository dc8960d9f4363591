//! Large-scale propagation: an urban-cellular path-loss model with shadowing
//! for sub-6 GHz carriers, a family of measurement-fit attenuation scenarios
//! for mm-wave carriers, and a distance-dependent line-of-sight model.
//!
//! All "attenuation" and "path gain" quantities in dB are negative for a
//! lossy link; linear factors are power ratios in (0, 1] for passive links.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Propagation speed used to convert carrier frequency to wavelength, m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Default mm-wave carrier frequency in GHz.
pub const DEFAULT_CARRIER_GHZ: f64 = 73.0;

/// Converts a dB power quantity to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

// ---------------------------------------------------------------------------
// Sub-6 GHz ("micro-wave") band
// ---------------------------------------------------------------------------

/// Link-budget parameters for the sub-6 GHz band.
///
/// The path-loss law is a three-slope curve anchored on an urban macro-cell
/// offset: flat inside `d0_m`, 20 dB/decade between `d0_m` and `d1_m`, and
/// 35 dB/decade beyond `d1_m`, with log-normal shadowing of standard
/// deviation `sigma_sh_db` applied on top.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuWaveLinkParams {
    /// Carrier frequency in MHz.
    pub f_mhz: f64,
    /// Base-station antenna height in metres.
    pub h_tx_m: f64,
    /// Terminal antenna height in metres.
    pub h_rx_m: f64,
    /// Inner breakpoint distance in metres; the loss is flat below it.
    pub d0_m: f64,
    /// Outer breakpoint distance in metres; the slope steepens beyond it.
    pub d1_m: f64,
    /// Shadow-fading standard deviation in dB.
    pub sigma_sh_db: f64,
}

impl Default for MuWaveLinkParams {
    fn default() -> Self {
        MuWaveLinkParams {
            f_mhz: 1900.0,
            h_tx_m: 15.0,
            h_rx_m: 1.65,
            d0_m: 50.0,
            d1_m: 100.0,
            sigma_sh_db: 8.0,
        }
    }
}

impl MuWaveLinkParams {
    /// Checks that every field is physically meaningful.
    pub fn validate(&self) -> Result<()> {
        if !(self.f_mhz.is_finite() && self.f_mhz > 0.0) {
            return Err(Error::invalid(
                "f_mhz",
                format!("must be positive, got {}", self.f_mhz),
            ));
        }
        if !(self.h_tx_m.is_finite() && self.h_tx_m > 0.0) {
            return Err(Error::invalid(
                "h_tx_m",
                format!("must be positive, got {}", self.h_tx_m),
            ));
        }
        if !(self.h_rx_m.is_finite() && self.h_rx_m > 0.0) {
            return Err(Error::invalid(
                "h_rx_m",
                format!("must be positive, got {}", self.h_rx_m),
            ));
        }
        if !(self.d0_m.is_finite() && self.d0_m > 0.0) {
            return Err(Error::invalid(
                "d0_m",
                format!("must be positive, got {}", self.d0_m),
            ));
        }
        if !(self.d1_m.is_finite() && self.d1_m > self.d0_m) {
            return Err(Error::invalid(
                "d0_m",
                format!(
                    "breakpoints must satisfy d0_m < d1_m, got d0_m = {} and d1_m = {}",
                    self.d0_m, self.d1_m
                ),
            ));
        }
        if !(self.sigma_sh_db.is_finite() && self.sigma_sh_db >= 0.0) {
            return Err(Error::invalid(
                "sigma_sh_db",
                format!("must be non-negative, got {}", self.sigma_sh_db),
            ));
        }
        Ok(())
    }
}

/// Urban macro-cell loss offset in dB (positive), from the classic empirical
/// fit in carrier frequency and antenna heights:
///
/// `46.3 + 33.9 log10(f) - 13.82 log10(h_tx) - (1.1 log10(f) - 0.7) h_rx
///  + 1.56 log10(f) - 0.8` with `f` in MHz and heights in metres.
pub fn cost_hata_offset(params: &MuWaveLinkParams) -> f64 {
    let lf = params.f_mhz.log10();
    46.3 + 33.9 * lf - 13.82 * params.h_tx_m.log10() - (1.1 * lf - 0.7) * params.h_rx_m + 1.56 * lf
        - 0.8
}

/// Median path gain in dB (negative) at link distance `d_m` under the
/// three-slope law. No shadowing is applied here.
pub fn mu_wave_pathloss_db(d_m: f64, params: &MuWaveLinkParams) -> Result<f64> {
    if !(d_m.is_finite() && d_m > 0.0) {
        return Err(Error::NonPositiveDistance(d_m));
    }
    let offset = cost_hata_offset(params);
    let gain = if d_m > params.d1_m {
        -offset - 35.0 * d_m.log10()
    } else if d_m > params.d0_m {
        -offset - 15.0 * params.d1_m.log10() - 20.0 * d_m.log10()
    } else {
        -offset - 15.0 * params.d1_m.log10() - 20.0 * params.d0_m.log10()
    };
    Ok(gain)
}

/// Draws the linear large-scale channel gain at distance `d_m`: the median
/// path gain plus log-normal shadowing of `sigma_sh_db` dB, converted to a
/// linear power ratio.
pub fn mu_wave_beta<R: Rng + ?Sized>(
    d_m: f64,
    params: &MuWaveLinkParams,
    rng: &mut R,
) -> Result<f64> {
    let gain_db = mu_wave_pathloss_db(d_m, params)?;
    let z: f64 = rng.sample(StandardNormal);
    Ok(db_to_linear(gain_db + params.sigma_sh_db * z))
}

// ---------------------------------------------------------------------------
// mm-wave band
// ---------------------------------------------------------------------------

/// A measurement-fit mm-wave attenuation scenario.
///
/// The attenuation at path length `r` (metres) is
///
/// `-20 log10(4 pi / lambda) - 10 n (1 - b + b f/f0) log10(r) - sigma z`
///
/// in dB, with `n = path_loss_exponent`, `sigma = shadow_sigma_db`,
/// `b = freq_scaling_b`, carrier `f = carrier_ghz`, reference frequency
/// `f0 = ref_freq_f0_ghz`, and `z` a standard-normal shadowing draw.
#[derive(Clone, Debug, PartialEq)]
pub struct MmWaveScenario {
    /// Registry key, e.g. `"umi-street-canyon-los"`.
    pub name: String,
    /// Carrier frequency in GHz.
    pub carrier_ghz: f64,
    /// Distance exponent `n` of the power law.
    pub path_loss_exponent: f64,
    /// Shadow-fading standard deviation `sigma` in dB.
    pub shadow_sigma_db: f64,
    /// Frequency-scaling weight `b`; zero disables frequency scaling.
    pub freq_scaling_b: f64,
    /// Reference frequency `f0` in GHz; required whenever `b` is nonzero.
    pub ref_freq_f0_ghz: Option<f64>,
}

/// One row of the built-in scenario table.
struct ScenarioRow {
    name: &'static str,
    n: f64,
    sigma: f64,
    b: f64,
    f0: Option<f64>,
}

/// Built-in fits: urban-microcell street canyon and open square, indoor
/// office and shopping mall, each with a line-of-sight and a non-LOS row.
const SCENARIO_TABLE: [ScenarioRow; 8] = [
    ScenarioRow {
        name: "umi-street-canyon-los",
        n: 1.98,
        sigma: 3.1,
        b: 0.0,
        f0: None,
    },
    ScenarioRow {
        name: "umi-street-canyon-nlos",
        n: 3.19,
        sigma: 8.2,
        b: 0.0,
        f0: None,
    },
    ScenarioRow {
        name: "umi-open-square-los",
        n: 1.85,
        sigma: 4.2,
        b: 0.0,
        f0: None,
    },
    ScenarioRow {
        name: "umi-open-square-nlos",
        n: 2.89,
        sigma: 7.1,
        b: 0.0,
        f0: None,
    },
    ScenarioRow {
        name: "inh-indoor-office-los",
        n: 1.73,
        sigma: 3.02,
        b: 0.0,
        f0: None,
    },
    ScenarioRow {
        name: "inh-indoor-office-nlos",
        n: 3.19,
        sigma: 8.29,
        b: 0.06,
        f0: Some(24.2),
    },
    ScenarioRow {
        name: "inh-shopping-mall-los",
        n: 1.73,
        sigma: 2.01,
        b: 0.0,
        f0: None,
    },
    ScenarioRow {
        name: "inh-shopping-mall-nlos",
        n: 2.59,
        sigma: 7.40,
        b: 0.01,
        f0: Some(39.5),
    },
];

impl MmWaveScenario {
    /// All built-in scenarios at the given carrier frequency, in table order.
    pub fn registry(carrier_ghz: f64) -> Vec<MmWaveScenario> {
        SCENARIO_TABLE
            .iter()
            .map(|row| MmWaveScenario {
                name: row.name.to_owned(),
                carrier_ghz,
                path_loss_exponent: row.n,
                shadow_sigma_db: row.sigma,
                freq_scaling_b: row.b,
                ref_freq_f0_ghz: row.f0,
            })
            .collect()
    }

    /// Names of the built-in scenarios, in table order.
    pub fn names() -> Vec<&'static str> {
        SCENARIO_TABLE.iter().map(|row| row.name).collect()
    }

    /// Looks up a built-in scenario by its registry key.
    pub fn by_name(name: &str, carrier_ghz: f64) -> Option<MmWaveScenario> {
        MmWaveScenario::registry(carrier_ghz)
            .into_iter()
            .find(|s| s.name == name)
    }

    /// Checks that every field is physically meaningful.
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_ghz.is_finite() && self.carrier_ghz > 0.0) {
            return Err(Error::invalid(
                "carrier_ghz",
                format!("must be positive, got {}", self.carrier_ghz),
            ));
        }
        if !(self.path_loss_exponent.is_finite() && self.path_loss_exponent > 0.0) {
            return Err(Error::invalid(
                "path_loss_exponent",
                format!("must be positive, got {}", self.path_loss_exponent),
            ));
        }
        if !(self.shadow_sigma_db.is_finite() && self.shadow_sigma_db >= 0.0) {
            return Err(Error::invalid(
                "shadow_sigma_db",
                format!("must be non-negative, got {}", self.shadow_sigma_db),
            ));
        }
        if !(self.freq_scaling_b.is_finite() && (0.0..1.0).contains(&self.freq_scaling_b)) {
            return Err(Error::invalid(
                "freq_scaling_b",
                format!("must lie in [0, 1), got {}", self.freq_scaling_b),
            ));
        }
        if self.freq_scaling_b != 0.0 {
            match self.ref_freq_f0_ghz {
                Some(f0) if f0.is_finite() && f0 > 0.0 => {}
                _ => {
                    return Err(Error::invalid(
                        "ref_freq_f0_ghz",
                        "a positive reference frequency is required when freq_scaling_b is nonzero",
                    ))
                }
            }
        }
        Ok(())
    }

    /// Carrier wavelength in metres.
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT_M_S / (self.carrier_ghz * 1e9)
    }

    /// Effective distance exponent including the frequency-scaling factor.
    fn effective_exponent(&self) -> Result<f64> {
        let b = self.freq_scaling_b;
        if b == 0.0 {
            return Ok(self.path_loss_exponent);
        }
        let f0 = self.ref_freq_f0_ghz.ok_or_else(|| {
            Error::invalid(
                "ref_freq_f0_ghz",
                "a positive reference frequency is required when freq_scaling_b is nonzero",
            )
        })?;
        Ok(self.path_loss_exponent * (1.0 - b + b * self.carrier_ghz / f0))
    }
}

/// Path attenuation in dB (negative) over a path of length `r_m` under the
/// given scenario, with a pre-drawn standard-normal shadowing value
/// `shadow_z`. Pass `shadow_z = 0.0` for the median attenuation.
pub fn mm_wave_attenuation_db(r_m: f64, scenario: &MmWaveScenario, shadow_z: f64) -> Result<f64> {
    if !(r_m.is_finite() && r_m > 0.0) {
        return Err(Error::NonPositiveDistance(r_m));
    }
    let free_space_ref = 20.0 * (4.0 * std::f64::consts::PI / scenario.wavelength_m()).log10();
    let exponent = scenario.effective_exponent()?;
    Ok(-free_space_ref - 10.0 * exponent * r_m.log10() - scenario.shadow_sigma_db * shadow_z)
}

/// Same as [`mm_wave_attenuation_db`] but returned as a linear power ratio,
/// with the shadowing draw taken from `rng`.
pub fn mm_wave_attenuation_linear<R: Rng + ?Sized>(
    r_m: f64,
    scenario: &MmWaveScenario,
    rng: &mut R,
) -> Result<f64> {
    let z: f64 = rng.sample(StandardNormal);
    Ok(db_to_linear(mm_wave_attenuation_db(r_m, scenario, z)?))
}

// ---------------------------------------------------------------------------
// Line-of-sight model
// ---------------------------------------------------------------------------

/// Whether a link has a line-of-sight component, and with what probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LosModel {
    /// Every link has a LOS component.
    Always,
    /// No link has a LOS component.
    Never,
    /// LOS with a fixed probability independent of distance.
    FixedProbability(f64),
    /// Urban-microcell blockage curve
    /// `min(1, near_m/d) (1 - exp(-d/decay_m)) + exp(-d/decay_m)`:
    /// certain LOS inside `near_m`, decaying towards zero at long range.
    UrbanMicroCurve { near_m: f64, decay_m: f64 },
}

impl Default for LosModel {
    fn default() -> Self {
        LosModel::UrbanMicroCurve {
            near_m: 20.0,
            decay_m: 39.0,
        }
    }
}

impl LosModel {
    /// Checks the model parameters.
    pub fn validate(&self) -> Result<()> {
        match *self {
            LosModel::Always | LosModel::Never => Ok(()),
            LosModel::FixedProbability(p) => {
                if p.is_finite() && (0.0..=1.0).contains(&p) {
                    Ok(())
                } else {
                    Err(Error::invalid(
                        "los_probability",
                        format!("must lie in [0, 1], got {p}"),
                    ))
                }
            }
            LosModel::UrbanMicroCurve { near_m, decay_m } => {
                if !(near_m.is_finite() && near_m > 0.0) {
                    return Err(Error::invalid(
                        "los_near_m",
                        format!("must be positive, got {near_m}"),
                    ));
                }
                if !(decay_m.is_finite() && decay_m > 0.0) {
                    return Err(Error::invalid(
                        "los_decay_m",
                        format!("must be positive, got {decay_m}"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// LOS probability at link distance `d_m`; always lies in [0, 1].
    pub fn probability(&self, d_m: f64) -> Result<f64> {
        if !(d_m.is_finite() && d_m > 0.0) {
            return Err(Error::NonPositiveDistance(d_m));
        }
        Ok(match *self {
            LosModel::Always => 1.0,
            LosModel::Never => 0.0,
            LosModel::FixedProbability(p) => p,
            LosModel::UrbanMicroCurve { near_m, decay_m } => {
                let blocked = (-d_m / decay_m).exp();
                (near_m / d_m).min(1.0) * (1.0 - blocked) + blocked
            }
        })
    }
}

/// Draws whether a link at distance `d_m` is line-of-sight.
pub fn draw_los<R: Rng + ?Sized>(d_m: f64, model: &LosModel, rng: &mut R) -> Result<bool> {
    let p = model.probability(d_m)?;
    Ok(rng.random::<f64>() < p)
}
