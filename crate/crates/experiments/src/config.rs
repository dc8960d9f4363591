//! Declarative experiment configuration: a flat, comment-capable key-value
//! file describing one study, plus `key=value` overrides applied on top.

use std::path::Path;

use mimo_bands_core::channel_models::{ClusterConfig, PathLengthModel};
use mimo_bands_core::propagation::{LosModel, MmWaveScenario, MuWaveLinkParams};

use crate::error::{Error, Result};

/// Which figure-style study to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyKind {
    /// mm-wave spectral efficiency: channel-matched vs beam-steering.
    Fig2CmVsAn,
    /// Multiplexing-order sweep: μ-wave vs mm-wave spectral efficiency.
    Fig3Multiplexing,
    /// μ-wave spectral efficiency: perfect vs LMMSE-estimated CSI.
    Fig4MuwaveCsi,
    /// Entry-imbalance ratio η by band and array size.
    Fig6Eta,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Fig2CmVsAn => "fig2_cm_vs_an",
            StudyKind::Fig3Multiplexing => "fig3_multiplexing",
            StudyKind::Fig4MuwaveCsi => "fig4_muwave_csi",
            StudyKind::Fig6Eta => "fig6_eta",
        }
    }

    /// Stable identifier mixed into every trial's random seed, so different
    /// studies never share random streams even under one master seed.
    pub fn seed_id(self) -> u64 {
        match self {
            StudyKind::Fig2CmVsAn => 2,
            StudyKind::Fig3Multiplexing => 3,
            StudyKind::Fig4MuwaveCsi => 4,
            StudyKind::Fig6Eta => 6,
        }
    }

    pub fn parse(s: &str) -> Option<StudyKind> {
        match s {
            "fig2_cm_vs_an" => Some(StudyKind::Fig2CmVsAn),
            "fig3_multiplexing" => Some(StudyKind::Fig3Multiplexing),
            "fig4_muwave_csi" => Some(StudyKind::Fig4MuwaveCsi),
            "fig6_eta" => Some(StudyKind::Fig6Eta),
            _ => None,
        }
    }
}

/// How the line-of-sight component is drawn, as configured.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LosSetting {
    Always,
    Never,
    Curve,
    Fixed(f64),
}

/// Full description of one study: sweep grids, seeding, and the physical
/// parameters of both bands. Unused parameters (e.g. mm-wave settings in a
/// μ-wave-only study) are carried along but ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub study: StudyKind,
    /// Antenna pairs (N_R, N_T) to sweep.
    pub antennas: Vec<(usize, usize)>,
    /// Multiplexing orders to sweep.
    pub m_values: Vec<usize>,
    pub snr_grid_db: Vec<f64>,
    pub n_trials: usize,
    pub master_seed: u64,

    // μ-wave large-scale parameters.
    pub mu: MuWaveLinkParams,

    // mm-wave clustered-channel parameters.
    pub carrier_ghz: f64,
    pub scenario: String,
    pub los_scenario: Option<String>,
    /// Optional overrides of the named scenario's fitted parameters, applied
    /// on top of the registry row.
    pub scenario_exponent: Option<f64>,
    pub scenario_sigma_db: Option<f64>,
    pub scenario_b: Option<f64>,
    pub scenario_f0_ghz: Option<f64>,
    pub n_cl: usize,
    pub n_ray: usize,
    pub ray_angle_spread_deg: f64,
    pub link_distance_m: f64,
    pub los: LosSetting,
    pub los_near_m: f64,
    pub los_decay_m: f64,
    /// Upper factor of the uniform excess path length, if enabled.
    pub path_excess_max: Option<f64>,

    // Channel-estimation parameters (fig4).
    /// Training length; defaults to N_T of each antenna pair when absent.
    pub tau_p: Option<usize>,
    pub pilot_power: f64,
    /// Fixed training SNR in dB; when absent, training reuses each grid
    /// point's data SNR.
    pub training_snr_db: Option<f64>,
}

impl ExperimentConfig {
    /// A runnable starting point for the given study; every field can be
    /// overridden by config keys.
    pub fn new(study: StudyKind) -> Self {
        ExperimentConfig {
            study,
            antennas: vec![(16, 64)],
            m_values: vec![1],
            snr_grid_db: vec![0.0],
            n_trials: 100,
            master_seed: 1,
            mu: MuWaveLinkParams::default(),
            carrier_ghz: 73.0,
            scenario: "umi-street-canyon-nlos".into(),
            los_scenario: None,
            scenario_exponent: None,
            scenario_sigma_db: None,
            scenario_b: None,
            scenario_f0_ghz: None,
            n_cl: 5,
            n_ray: 10,
            ray_angle_spread_deg: 5.0,
            link_distance_m: 100.0,
            los: LosSetting::Curve,
            los_near_m: 20.0,
            los_decay_m: 39.0,
            path_excess_max: None,
            tau_p: None,
            pilot_power: 1.0,
            training_snr_db: None,
        }
    }

    /// Reads and parses a config file from disk.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    /// Applies one `key=value` override on top of the parsed file.
    pub fn apply_override(&mut self, pair: &str) -> Result<()> {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            Error::invalid("override", format!("expected `key=value`, got `{pair}`"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key == "study" {
            return Err(Error::invalid(
                "override",
                "the study kind cannot be overridden; it selects the config's meaning",
            ));
        }
        self.set(key, value)
            .map_err(|message| Error::invalid(key, message))
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(value: &str, what: &str) -> std::result::Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("could not parse `{value}` as {what}"))
        }
        match key {
            "antennas" => self.antennas = parse_antennas(value)?,
            "m_values" => self.m_values = parse_list(value, "a positive integer")?,
            "snr_grid_db" => self.snr_grid_db = parse_list(value, "a number")?,
            "n_trials" => self.n_trials = num(value, "a positive integer")?,
            "master_seed" => self.master_seed = num(value, "an unsigned 64-bit integer")?,
            "f_mhz" => self.mu.f_mhz = num(value, "a number")?,
            "h_tx_m" => self.mu.h_tx_m = num(value, "a number")?,
            "h_rx_m" => self.mu.h_rx_m = num(value, "a number")?,
            "d0_m" => self.mu.d0_m = num(value, "a number")?,
            "d1_m" => self.mu.d1_m = num(value, "a number")?,
            "sigma_sh_db" => self.mu.sigma_sh_db = num(value, "a number")?,
            "carrier_ghz" => self.carrier_ghz = num(value, "a number")?,
            "scenario" => self.scenario = value.to_string(),
            "los_scenario" => {
                self.los_scenario = if value.is_empty() {
                    None
                } else {
                    Some(value.to_string())
                }
            }
            "scenario_exponent" => self.scenario_exponent = Some(num(value, "a number")?),
            "scenario_sigma_db" => self.scenario_sigma_db = Some(num(value, "a number")?),
            "scenario_b" => self.scenario_b = Some(num(value, "a number")?),
            "scenario_f0_ghz" => self.scenario_f0_ghz = Some(num(value, "a number")?),
            "n_cl" => self.n_cl = num(value, "a positive integer")?,
            "n_ray" => self.n_ray = num(value, "a positive integer")?,
            "ray_angle_spread_deg" => self.ray_angle_spread_deg = num(value, "a number")?,
            "link_distance_m" => self.link_distance_m = num(value, "a number")?,
            "los" => {
                self.los = match value {
                    "always" => LosSetting::Always,
                    "never" => LosSetting::Never,
                    "curve" => LosSetting::Curve,
                    p => LosSetting::Fixed(num(p, "a probability (or always/never/curve)")?),
                }
            }
            "los_near_m" => self.los_near_m = num(value, "a number")?,
            "los_decay_m" => self.los_decay_m = num(value, "a number")?,
            "path_excess_max" => self.path_excess_max = Some(num(value, "a number")?),
            "tau_p" => self.tau_p = Some(num(value, "a positive integer")?),
            "pilot_power" => self.pilot_power = num(value, "a number")?,
            "training_snr_db" => self.training_snr_db = Some(num(value, "a number")?),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Builds the clustered-channel configuration these settings describe.
    pub fn cluster_config(&self) -> Result<ClusterConfig> {
        let mut scenario =
            MmWaveScenario::by_name(&self.scenario, self.carrier_ghz).ok_or_else(|| {
                Error::invalid(
                    "scenario",
                    format!(
                        "unknown scenario `{}` (see `list-scenarios` for the registry)",
                        self.scenario
                    ),
                )
            })?;
        if let Some(n) = self.scenario_exponent {
            scenario.path_loss_exponent = n;
        }
        if let Some(sigma) = self.scenario_sigma_db {
            scenario.shadow_sigma_db = sigma;
        }
        if let Some(b) = self.scenario_b {
            scenario.freq_scaling_b = b;
        }
        if let Some(f0) = self.scenario_f0_ghz {
            scenario.ref_freq_f0_ghz = Some(f0);
        }
        let los_scenario = match &self.los_scenario {
            None => None,
            Some(name) => Some(MmWaveScenario::by_name(name, self.carrier_ghz).ok_or_else(
                || Error::invalid("los_scenario", format!("unknown scenario `{name}`")),
            )?),
        };
        let los_model = match self.los {
            LosSetting::Always => LosModel::Always,
            LosSetting::Never => LosModel::Never,
            LosSetting::Fixed(p) => LosModel::FixedProbability(p),
            LosSetting::Curve => LosModel::UrbanMicroCurve {
                near_m: self.los_near_m,
                decay_m: self.los_decay_m,
            },
        };
        let path_length_model = match self.path_excess_max {
            None => PathLengthModel::LinkDistance,
            Some(max_factor) => PathLengthModel::UniformExcess { max_factor },
        };
        let cfg = ClusterConfig {
            n_cl: self.n_cl,
            n_ray: self.n_ray,
            ray_angle_spread_rad: self.ray_angle_spread_deg.to_radians(),
            scenario,
            los_scenario,
            los_model,
            link_distance_m: self.link_distance_m,
            path_length_model,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every grid and parameter, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.antennas.is_empty() {
            return Err(Error::invalid(
                "antennas",
                "at least one N_RxN_T pair is required",
            ));
        }
        if self.m_values.is_empty() {
            return Err(Error::invalid(
                "m_values",
                "at least one multiplexing order is required",
            ));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::invalid(
                "snr_grid_db",
                "at least one SNR point is required",
            ));
        }
        if self.n_trials == 0 {
            return Err(Error::invalid("n_trials", "must be at least 1"));
        }
        for &(n_r, n_t) in &self.antennas {
            if n_r == 0 || n_t == 0 {
                return Err(Error::invalid(
                    "antennas",
                    "antenna counts must be at least 1",
                ));
            }
            for &m in &self.m_values {
                if m == 0 {
                    return Err(Error::invalid(
                        "m_values",
                        "multiplexing orders must be at least 1",
                    ));
                }
                if self.uses_spectral_efficiency() && m > n_r.min(n_t) {
                    return Err(Error::invalid(
                        "m_values",
                        format!(
                            "m = {m} exceeds min(N_R, N_T) = {} for {n_r}x{n_t}",
                            n_r.min(n_t)
                        ),
                    ));
                }
            }
        }
        if !self.snr_grid_db.iter().all(|s| s.is_finite()) {
            return Err(Error::invalid("snr_grid_db", "SNR points must be finite"));
        }
        self.mu.validate()?;
        if self.uses_mm_wave() {
            let cluster = self.cluster_config()?;
            let path_budget = cluster.n_scattered()
                + if matches!(self.los, LosSetting::Always) {
                    1
                } else {
                    0
                };
            for &m in &self.m_values {
                if self.uses_spectral_efficiency() && m > path_budget {
                    return Err(Error::invalid(
                        "m_values",
                        format!(
                            "m = {m} exceeds the clustered channel's path budget \
                             n_cl*n_ray = {path_budget}; no draw can carry that many streams"
                        ),
                    ));
                }
            }
        }
        if let Some(tau_p) = self.tau_p {
            let max_nt = self.antennas.iter().map(|&(_, t)| t).max().unwrap_or(1);
            if tau_p < max_nt {
                return Err(Error::invalid(
                    "tau_p",
                    format!("training length {tau_p} is shorter than the largest N_T = {max_nt}"),
                ));
            }
        }
        if !(self.pilot_power.is_finite() && self.pilot_power > 0.0) {
            return Err(Error::invalid("pilot_power", "must be positive"));
        }
        if let Some(t) = self.training_snr_db {
            if !t.is_finite() {
                return Err(Error::invalid("training_snr_db", "must be finite"));
            }
        }
        Ok(())
    }

    fn uses_mm_wave(&self) -> bool {
        matches!(
            self.study,
            StudyKind::Fig2CmVsAn | StudyKind::Fig3Multiplexing | StudyKind::Fig6Eta
        )
    }

    fn uses_spectral_efficiency(&self) -> bool {
        !matches!(self.study, StudyKind::Fig6Eta)
    }

    /// The effective configuration as re-parsable `key = value` lines, in a
    /// fixed order — the exact text echoed atop output files.
    pub fn to_key_value_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("study = {}", self.study.name()),
            format!(
                "antennas = {}",
                self.antennas
                    .iter()
                    .map(|&(r, t)| format!("{r}x{t}"))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            format!("m_values = {}", join(&self.m_values)),
            format!("snr_grid_db = {}", join(&self.snr_grid_db)),
            format!("n_trials = {}", self.n_trials),
            format!("master_seed = {}", self.master_seed),
            format!("f_mhz = {}", self.mu.f_mhz),
            format!("h_tx_m = {}", self.mu.h_tx_m),
            format!("h_rx_m = {}", self.mu.h_rx_m),
            format!("d0_m = {}", self.mu.d0_m),
            format!("d1_m = {}", self.mu.d1_m),
            format!("sigma_sh_db = {}", self.mu.sigma_sh_db),
            format!("carrier_ghz = {}", self.carrier_ghz),
            format!("scenario = {}", self.scenario),
        ];
        if let Some(name) = &self.los_scenario {
            lines.push(format!("los_scenario = {name}"));
        }
        if let Some(n) = self.scenario_exponent {
            lines.push(format!("scenario_exponent = {n}"));
        }
        if let Some(sigma) = self.scenario_sigma_db {
            lines.push(format!("scenario_sigma_db = {sigma}"));
        }
        if let Some(b) = self.scenario_b {
            lines.push(format!("scenario_b = {b}"));
        }
        if let Some(f0) = self.scenario_f0_ghz {
            lines.push(format!("scenario_f0_ghz = {f0}"));
        }
        lines.extend([
            format!("n_cl = {}", self.n_cl),
            format!("n_ray = {}", self.n_ray),
            format!("ray_angle_spread_deg = {}", self.ray_angle_spread_deg),
            format!("link_distance_m = {}", self.link_distance_m),
            match self.los {
                LosSetting::Always => "los = always".to_string(),
                LosSetting::Never => "los = never".to_string(),
                LosSetting::Curve => "los = curve".to_string(),
                LosSetting::Fixed(p) => format!("los = {p}"),
            },
            format!("los_near_m = {}", self.los_near_m),
            format!("los_decay_m = {}", self.los_decay_m),
        ]);
        if let Some(f) = self.path_excess_max {
            lines.push(format!("path_excess_max = {f}"));
        }
        if let Some(t) = self.tau_p {
            lines.push(format!("tau_p = {t}"));
        }
        lines.push(format!("pilot_power = {}", self.pilot_power));
        if let Some(t) = self.training_snr_db {
            lines.push(format!("training_snr_db = {t}"));
        }
        lines
    }
}

impl std::str::FromStr for ExperimentConfig {
    type Err = Error;

    /// Parses a config file: `key = value` lines, `#` comments, blank lines
    /// ignored. Later assignments win, which is also how overrides work.
    fn from_str(text: &str) -> Result<Self> {
        let mut study = None;
        let mut pending: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(line_no, format!("expected `key = value`, got `{line}`"))
            })?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if key == "study" {
                study = Some(StudyKind::parse(&value).ok_or_else(|| {
                    Error::config(
                        line_no,
                        format!(
                            "unknown study `{value}` (expected fig2_cm_vs_an, \
                             fig3_multiplexing, fig4_muwave_csi, or fig6_eta)"
                        ),
                    )
                })?);
            } else {
                pending.push((line_no, key, value));
            }
        }
        let study =
            study.ok_or_else(|| Error::config(0, "missing required key `study`".to_string()))?;
        let mut cfg = ExperimentConfig::new(study);
        for (line_no, key, value) in pending {
            cfg.set(&key, &value)
                .map_err(|message| Error::config(line_no, message))?;
        }
        Ok(cfg)
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_list<T: std::str::FromStr>(
    value: &str,
    what: &str,
) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| format!("could not parse `{s}` as {what}"))
        })
        .collect()
}

fn parse_antennas(value: &str) -> std::result::Result<Vec<(usize, usize)>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (r, t) = pair
                .split_once(['x', 'X'])
                .ok_or_else(|| format!("expected `N_RxN_T`, got `{pair}`"))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("could not parse `{s}` as an antenna count"))
            };
            Ok((parse(r)?, parse(t)?))
        })
        .collect()
}
