//! Monte-Carlo study runner.
//!
//! Each study sweeps a grid of antenna sizes; within one antenna "cell"
//! every trial draws its channels once and evaluates all curves (methods,
//! multiplexing orders, SNR points) on the same draw, giving paired
//! comparisons with far less Monte-Carlo noise than independent draws.
//!
//! Trials run in parallel, but each one owns a counter-derived random
//! stream and results are reduced in trial order, so the output is
//! bit-identical for any worker count.

use mimo_bands_core::beamforming::{
    an_beamformers, cm_fd_beamformers, spectral_efficiency, BeamformingMethod,
};
use mimo_bands_core::channel_models::{gen_mm_wave, gen_mu_wave, ChannelMatrix, ClusterConfig};
use mimo_bands_core::estimation::{
    lmmse_estimate, make_orthogonal_pilots, observe_training, se_with_estimated_csi,
};
use mimo_bands_core::metrics::eta_metric;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, StudyKind};
use crate::error::{Error, Result};
use crate::seeding::trial_rng;

/// One aggregated point of one study curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub study: String,
    pub n_r: usize,
    pub n_t: usize,
    /// Multiplexing order; 0 where the metric has no stream count (η study).
    pub m: usize,
    pub method: String,
    pub snr_db: f64,
    pub se_mean: f64,
    pub se_std_err: f64,
    pub n_trials: usize,
}

/// The (m, method, SNR) layout of one cell's rows, fixed per study.
struct RowSpec {
    m: usize,
    method: &'static str,
    snr_db: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Runs the configured study and returns its curves, ordered by antenna
/// pair, then multiplexing order, then method, then SNR.
pub fn run_study(cfg: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    cfg.validate()?;
    let cluster = cfg.cluster_config()?;
    let mut points = Vec::new();
    for (cell_index, &(n_r, n_t)) in cfg.antennas.iter().enumerate() {
        let rows = cell_rows(cfg);
        let describe = |trial: usize| {
            format!(
                "study={} antennas={}x{} trial={}",
                cfg.study.name(),
                n_r,
                n_t,
                trial
            )
        };
        // Parallel trials, each with its own counter-derived stream; the
        // ordered collect keeps the later reduction schedule-independent.
        let per_trial: Vec<Vec<f64>> = (0..cfg.n_trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(
                    cfg.master_seed,
                    cfg.study.seed_id(),
                    cell_index as u64,
                    trial as u64,
                );
                simulate_trial(cfg, &cluster, n_r, n_t, &rows, &mut rng)
                    .map_err(|e| Error::at_grid_point(describe(trial), e))
            })
            .collect::<Result<_>>()?;

        for (row_idx, row) in rows.iter().enumerate() {
            let values = per_trial.iter().map(|trial| trial[row_idx]);
            let (mean, std_err) = mean_and_std_err(values, cfg.n_trials);
            points.push(CurvePoint {
                study: cfg.study.name().to_string(),
                n_r,
                n_t,
                m: row.m,
                method: row.method.to_string(),
                snr_db: row.snr_db,
                se_mean: mean,
                se_std_err: std_err,
                n_trials: cfg.n_trials,
            });
        }
    }
    Ok(points)
}

/// Mean and standard error of the mean, reduced in iteration order with
/// plain sum / sum-of-squares accumulators.
fn mean_and_std_err(values: impl Iterator<Item = f64>, n: usize) -> (f64, f64) {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for v in values {
        sum += v;
        sum_sq += v * v;
    }
    let n_f = n as f64;
    let mean = sum / n_f;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - n_f * mean * mean) / (n_f - 1.0)).max(0.0);
    (mean, (var / n_f).sqrt())
}

/// Enumerates a cell's rows in the exact order `simulate_trial` emits
/// values; the two functions must mirror each other's loop nests.
fn cell_rows(cfg: &ExperimentConfig) -> Vec<RowSpec> {
    let mut rows = Vec::new();
    match cfg.study {
        StudyKind::Fig2CmVsAn => {
            for &m in &cfg.m_values {
                for method in ["cm_fd", "an_steering"] {
                    for &snr_db in &cfg.snr_grid_db {
                        rows.push(RowSpec { m, method, snr_db });
                    }
                }
            }
        }
        StudyKind::Fig3Multiplexing => {
            for &m in &cfg.m_values {
                for method in ["mu_cm_fd", "mm_cm_fd"] {
                    for &snr_db in &cfg.snr_grid_db {
                        rows.push(RowSpec { m, method, snr_db });
                    }
                }
            }
        }
        StudyKind::Fig4MuwaveCsi => {
            for &m in &cfg.m_values {
                for method in ["perfect_csi", "lmmse_csi"] {
                    for &snr_db in &cfg.snr_grid_db {
                        rows.push(RowSpec { m, method, snr_db });
                    }
                }
            }
        }
        StudyKind::Fig6Eta => {
            for method in ["mu_eta", "mm_eta"] {
                rows.push(RowSpec {
                    m: 0,
                    method,
                    snr_db: 0.0,
                });
            }
        }
    }
    rows
}

fn simulate_trial(
    cfg: &ExperimentConfig,
    cluster: &ClusterConfig,
    n_r: usize,
    n_t: usize,
    rows: &[RowSpec],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(rows.len());
    match cfg.study {
        StudyKind::Fig2CmVsAn => {
            let draw = gen_mm_wave(n_r, n_t, cluster, rng)?;
            let h = draw.normalized_matrix()?;
            let paths = draw.flatten_paths();
            for &m in &cfg.m_values {
                let cm = cm_fd_beamformers(&h, m)?;
                let an = an_beamformers(&paths, m, n_t, n_r)?;
                for bf in [&cm, &an] {
                    for &snr_db in &cfg.snr_grid_db {
                        values.push(spectral_efficiency(&h, bf, db_to_linear(snr_db))?);
                    }
                }
            }
        }
        StudyKind::Fig3Multiplexing => {
            let h_mu = gen_mu_wave(n_r, n_t, 1.0, rng)?;
            let draw = gen_mm_wave(n_r, n_t, cluster, rng)?;
            let h_mm = draw.normalized_matrix()?;
            for &m in &cfg.m_values {
                for h in [&h_mu, &h_mm] {
                    let bf = cm_fd_beamformers(h, m)?;
                    for &snr_db in &cfg.snr_grid_db {
                        values.push(spectral_efficiency(h, &bf, db_to_linear(snr_db))?);
                    }
                }
            }
        }
        StudyKind::Fig4MuwaveCsi => {
            let h = gen_mu_wave(n_r, n_t, 1.0, rng)?;
            let tau_p = cfg.tau_p.unwrap_or(n_t);
            let pilots = make_orthogonal_pilots(n_t, tau_p, cfg.pilot_power)?;
            // With a fixed training SNR one observation serves every grid
            // point; otherwise training reuses each point's data SNR.
            let noise_for = |snr_db: f64| {
                cfg.pilot_power * db_to_linear(-cfg.training_snr_db.unwrap_or(snr_db))
            };
            let estimates: Vec<ChannelMatrix> = cfg
                .snr_grid_db
                .iter()
                .map(|&snr_db| {
                    let noise_var = noise_for(snr_db);
                    let y = observe_training(&h, &pilots, noise_var, rng);
                    Ok(lmmse_estimate(&y, &pilots, 1.0, noise_var)?.h_hat)
                })
                .collect::<Result<_>>()?;
            for &m in &cfg.m_values {
                let perfect = cm_fd_beamformers(&h, m)?;
                for &snr_db in &cfg.snr_grid_db {
                    values.push(spectral_efficiency(&h, &perfect, db_to_linear(snr_db))?);
                }
                for (&snr_db, h_hat) in cfg.snr_grid_db.iter().zip(&estimates) {
                    values.push(se_with_estimated_csi(
                        &h,
                        h_hat,
                        BeamformingMethod::CmFd,
                        m,
                        db_to_linear(snr_db),
                    )?);
                }
            }
        }
        StudyKind::Fig6Eta => {
            let h_mu = gen_mu_wave(n_r, n_t, 1.0, rng)?;
            values.push(eta_metric(&h_mu)?);
            let draw = gen_mm_wave(n_r, n_t, cluster, rng)?;
            values.push(eta_metric(&draw.matrix)?);
        }
    }
    debug_assert_eq!(values.len(), rows.len());
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::LosSetting;

    fn smoke_config(study: StudyKind) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(study);
        cfg.antennas = vec![(4, 8)];
        cfg.m_values = vec![1, 2];
        cfg.snr_grid_db = vec![-5.0, 5.0];
        cfg.n_trials = 20;
        cfg.n_cl = 2;
        cfg.n_ray = 3;
        cfg
    }

    #[test]
    fn reruns_are_identical() {
        for study in [
            StudyKind::Fig2CmVsAn,
            StudyKind::Fig3Multiplexing,
            StudyKind::Fig4MuwaveCsi,
            StudyKind::Fig6Eta,
        ] {
            let cfg = smoke_config(study);
            let a = run_study(&cfg).unwrap();
            let b = run_study(&cfg).unwrap();
            assert_eq!(a, b, "{} is not deterministic", study.name());
            assert!(!a.is_empty());
        }
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let cfg = smoke_config(StudyKind::Fig2CmVsAn);
        let run_with = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_study(&cfg).unwrap())
        };
        assert_eq!(run_with(1), run_with(4));
    }

    #[test]
    fn point_layout_matches_the_declared_grid() {
        let cfg = smoke_config(StudyKind::Fig3Multiplexing);
        let points = run_study(&cfg).unwrap();
        // 1 antenna pair x 2 m x 2 methods x 2 snr points.
        assert_eq!(points.len(), 8);
        assert!(points.iter().all(|p| p.study == "fig3_multiplexing"));
        assert!(points.iter().all(|p| p.n_trials == 20));
        assert_eq!(points.iter().filter(|p| p.method == "mu_cm_fd").count(), 4);
        assert!(points
            .iter()
            .all(|p| p.se_mean >= 0.0 && p.se_std_err >= 0.0));
    }

    #[test]
    fn single_trial_points_have_zero_std_err() {
        let mut cfg = smoke_config(StudyKind::Fig6Eta);
        cfg.n_trials = 1;
        let points = run_study(&cfg).unwrap();
        assert!(points.iter().all(|p| p.se_std_err == 0.0));
    }

    #[test]
    fn std_err_shrinks_roughly_as_root_n() {
        let mut cfg = smoke_config(StudyKind::Fig6Eta);
        cfg.antennas = vec![(4, 4)];
        cfg.n_trials = 200;
        let coarse = run_study(&cfg).unwrap();
        cfg.n_trials = 800;
        let fine = run_study(&cfg).unwrap();
        // Quadrupling the trials should halve the standard error +- 25%.
        for (c, f) in coarse.iter().zip(&fine) {
            let ratio = f.se_std_err / c.se_std_err;
            assert!(
                (0.25..=0.75).contains(&ratio),
                "{}: se ratio {ratio} out of range",
                c.method
            );
        }
    }

    #[test]
    fn forced_rank_one_channel_makes_cm_and_an_agree() {
        let mut cfg = smoke_config(StudyKind::Fig2CmVsAn);
        cfg.n_cl = 1;
        cfg.n_ray = 1;
        cfg.los = LosSetting::Never;
        cfg.m_values = vec![1];
        cfg.n_trials = 10;
        let points = run_study(&cfg).unwrap();
        let cm: Vec<_> = points.iter().filter(|p| p.method == "cm_fd").collect();
        let an: Vec<_> = points
            .iter()
            .filter(|p| p.method == "an_steering")
            .collect();
        assert_eq!(cm.len(), an.len());
        for (c, a) in cm.iter().zip(&an) {
            assert_eq!(c.snr_db, a.snr_db);
            assert!(
                (c.se_mean - a.se_mean).abs() < 1e-9,
                "curves split at {} dB: {} vs {}",
                c.snr_db,
                c.se_mean,
                a.se_mean
            );
        }
    }

    #[test]
    fn eta_study_grows_with_array_size_for_mu_wave() {
        let mut cfg = smoke_config(StudyKind::Fig6Eta);
        cfg.antennas = vec![(2, 2), (8, 8)];
        cfg.n_trials = 300;
        let points = run_study(&cfg).unwrap();
        let mu: Vec<_> = points.iter().filter(|p| p.method == "mu_eta").collect();
        assert_eq!(mu.len(), 2);
        assert!(
            mu[1].se_mean > mu[0].se_mean,
            "mean eta should grow with size: {} vs {}",
            mu[0].se_mean,
            mu[1].se_mean
        );
    }

    #[test]
    fn estimated_csi_curve_sits_below_perfect_csi() {
        let mut cfg = smoke_config(StudyKind::Fig4MuwaveCsi);
        cfg.n_trials = 50;
        let points = run_study(&cfg).unwrap();
        let perfect: Vec<_> = points
            .iter()
            .filter(|p| p.method == "perfect_csi")
            .collect();
        let lmmse: Vec<_> = points.iter().filter(|p| p.method == "lmmse_csi").collect();
        for (p, e) in perfect.iter().zip(&lmmse) {
            assert_eq!((p.m, p.snr_db), (e.m, e.snr_db));
            assert!(
                e.se_mean <= p.se_mean + 1e-9,
                "estimated CSI beat perfect CSI at m={} {} dB",
                p.m,
                p.snr_db
            );
        }
    }

    #[test]
    fn impossible_stream_counts_fail_validation_before_running() {
        let mut cfg = smoke_config(StudyKind::Fig2CmVsAn);
        cfg.m_values = vec![50];
        assert!(matches!(run_study(&cfg), Err(Error::Invalid { .. })));
    }
}
