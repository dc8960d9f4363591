//! Scalar channel diagnostics: the entry-imbalance ratio eta, numerical
//! rank, best-antenna selection, and a bundle computing all of them at once.

use crate::channel_models::ChannelMatrix;
use crate::error::{Error, Result};

/// Default relative tolerance for counting singular values as nonzero.
/// Separates the exact-zero singular values of low-rank clustered channels
/// (which sit at machine-epsilon relative size) from genuine content.
pub const DEFAULT_RANK_REL_TOL: f64 = 1e-9;

/// Entry-imbalance ratio: the largest squared entry magnitude divided by the
/// average squared entry magnitude. Always lies in [1, N_T*N_R]; it is large
/// when the channel's energy concentrates in few entries, which is what
/// makes simple antenna selection effective.
pub fn eta_metric(h: &ChannelMatrix) -> Result<f64> {
    let total = h.frobenius_power();
    if total <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let max_sq = h
        .entries
        .iter()
        .map(|z| z.norm_sqr())
        .fold(0.0f64, f64::max);
    let dims = (h.n_rx() * h.n_tx()) as f64;
    Ok(max_sq / (total / dims))
}

/// Counts singular values exceeding `rel_tol` times the largest one.
///
/// Values come from the plain bidiagonalization SVD: its noise floor sits at
/// machine epsilon relative to the largest value, far below the tolerance.
/// (Deriving them from a Gram eigendecomposition would square the dynamic
/// range and push rounding noise above a 1e-9 threshold.)
pub fn numerical_rank(h: &ChannelMatrix, rel_tol: f64) -> usize {
    rank_from_singular_values(h.entries.clone().singular_values().as_slice(), rel_tol)
}

/// Rank count from an already-computed singular-value list.
pub fn rank_from_singular_values(values: &[f64], rel_tol: f64) -> usize {
    let largest = values.iter().copied().fold(0.0f64, f64::max);
    if largest <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > rel_tol * largest).count()
}

/// Picks the receive/transmit antenna pair carrying the most power: the
/// indices of the entry with the largest squared magnitude, ties broken by
/// the lexicographically smallest (row, column). Returns that squared
/// magnitude as the selection gain.
pub fn select_best_antenna(h: &ChannelMatrix) -> (usize, usize, f64) {
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for i in 0..h.n_rx() {
        for j in 0..h.n_tx() {
            let p = h.entries[(i, j)].norm_sqr();
            if p > best.2 {
                best = (i, j, p);
            }
        }
    }
    (best.0, best.1, best.2.max(0.0))
}

/// All scalar diagnostics of one channel realization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelDiagnostics {
    pub eta: f64,
    pub numerical_rank: usize,
    pub frob_power: f64,
    pub best_antenna: (usize, usize),
}

impl ChannelDiagnostics {
    pub fn compute(h: &ChannelMatrix, rank_rel_tol: f64) -> Result<Self> {
        let eta = eta_metric(h)?;
        let (i, j, _) = select_best_antenna(h);
        Ok(ChannelDiagnostics {
            eta,
            numerical_rank: numerical_rank(h, rank_rel_tol),
            frob_power: h.frobenius_power(),
            best_antenna: (i, j),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_models::{gen_mm_wave, gen_mu_wave, Band, ClusterConfig};
    use crate::propagation::LosModel;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn matrix(band: Band, entries: DMatrix<Complex64>) -> ChannelMatrix {
        ChannelMatrix::new(entries, band)
    }

    #[test]
    fn eta_of_uniform_matrix_is_one() {
        let h = matrix(
            Band::MuWave,
            DMatrix::from_element(8, 8, Complex64::new(1.0, 0.0)),
        );
        assert_relative_eq!(eta_metric(&h).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn eta_of_single_entry_matrix_is_the_dimension_product() {
        let mut e = DMatrix::zeros(2, 2);
        e[(1, 0)] = Complex64::new(0.0, -2.5);
        let h = matrix(Band::MmWave, e);
        assert_relative_eq!(eta_metric(&h).unwrap(), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn eta_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = gen_mu_wave(6, 9, 1.0, &mut rng).unwrap();
        let eta = eta_metric(&h).unwrap();
        for &c in &[1e-6, 0.5, 3.0, 1e6] {
            let scaled = matrix(Band::MuWave, h.entries.scale(c));
            assert_relative_eq!(eta_metric(&scaled).unwrap(), eta, max_relative = 1e-10);
        }
        // Complex scaling too.
        let rotated = matrix(
            Band::MuWave,
            h.entries.map(|z| z * Complex64::new(0.6, -0.8)),
        );
        assert_relative_eq!(eta_metric(&rotated).unwrap(), eta, max_relative = 1e-10);
    }

    #[test]
    fn eta_stays_within_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let h = gen_mu_wave(4, 7, 1.0, &mut rng).unwrap();
            let eta = eta_metric(&h).unwrap();
            assert!((1.0..=28.0 + 1e-9).contains(&eta), "eta = {eta}");
        }
    }

    #[test]
    fn eta_rejects_zero_matrix() {
        let h = matrix(Band::MuWave, DMatrix::zeros(3, 3));
        assert!(matches!(eta_metric(&h), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn mean_eta_grows_with_array_size() {
        // More i.i.d. entries push the maximum further above the mean; for
        // n entries the expected ratio tracks the n-th harmonic number.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut means = Vec::new();
        for &(n_r, n_t) in &[(2usize, 2usize), (8, 8), (16, 64)] {
            let trials = 400;
            let mut sum = 0.0;
            for _ in 0..trials {
                let h = gen_mu_wave(n_r, n_t, 1.0, &mut rng).unwrap();
                sum += eta_metric(&h).unwrap();
            }
            means.push(sum / trials as f64);
        }
        assert!(
            means[0] < means[1] && means[1] < means[2],
            "means = {means:?}"
        );
        // Harmonic-number oracle for the largest size: H_1024 ~ 7.51.
        let h_1024: f64 = (1..=1024).map(|k| 1.0 / k as f64).sum();
        assert_abs_diff_eq!(means[2], h_1024, epsilon = 0.4);
    }

    #[test]
    fn mu_wave_eta_exceeds_mm_wave_eta() {
        // Sparse channels spread each path's energy evenly across entries
        // (steering vectors have constant modulus), so their eta stays low.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = ClusterConfig {
            n_cl: 2,
            n_ray: 3,
            los_model: LosModel::Never,
            ..ClusterConfig::default()
        };
        let trials = 300;
        let mut mu_sum = 0.0;
        let mut mm_sum = 0.0;
        for _ in 0..trials {
            mu_sum += eta_metric(&gen_mu_wave(16, 64, 1.0, &mut rng).unwrap()).unwrap();
            mm_sum += eta_metric(&gen_mm_wave(16, 64, &cfg, &mut rng).unwrap().matrix).unwrap();
        }
        let (mu_mean, mm_mean) = (mu_sum / trials as f64, mm_sum / trials as f64);
        assert!(
            mu_mean > mm_mean,
            "expected mu-wave eta ({mu_mean:.2}) above mm-wave eta ({mm_mean:.2})"
        );
    }

    #[test]
    fn rank_of_identity_and_outer_product() {
        let h = matrix(Band::MuWave, DMatrix::identity(4, 4));
        assert_eq!(numerical_rank(&h, DEFAULT_RANK_REL_TOL), 4);

        let u = nalgebra::DVector::from_fn(6, |k, _| Complex64::new(1.0 + k as f64, -0.3));
        let v = nalgebra::DVector::from_fn(5, |k, _| Complex64::new(0.2, k as f64));
        let outer = DMatrix::from_fn(6, 5, |i, j| u[i] * v[j].conj());
        assert_eq!(
            numerical_rank(&matrix(Band::MmWave, outer), DEFAULT_RANK_REL_TOL),
            1
        );
    }

    #[test]
    fn rank_of_zero_matrix_is_zero() {
        let h = matrix(Band::MuWave, DMatrix::zeros(3, 5));
        assert_eq!(numerical_rank(&h, DEFAULT_RANK_REL_TOL), 0);
    }

    #[test]
    fn rank_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cfg = ClusterConfig {
            n_cl: 1,
            n_ray: 3,
            los_model: LosModel::Never,
            ..ClusterConfig::default()
        };
        let draw = gen_mm_wave(8, 8, &cfg, &mut rng).unwrap();
        let rank = numerical_rank(&draw.matrix, DEFAULT_RANK_REL_TOL);

        // Random unitaries from the QR of a Gaussian matrix.
        let q_left = gen_mu_wave(8, 8, 1.0, &mut rng).unwrap().entries.qr().q();
        let q_right = gen_mu_wave(8, 8, 1.0, &mut rng).unwrap().entries.qr().q();
        let rotated = &q_left * &draw.matrix.entries * q_right.adjoint();
        assert_eq!(
            numerical_rank(&matrix(Band::MmWave, rotated), DEFAULT_RANK_REL_TOL),
            rank
        );
    }

    #[test]
    fn best_antenna_finds_the_single_nonzero_entry() {
        let mut e = DMatrix::zeros(4, 5);
        e[(2, 3)] = Complex64::new(0.0, 1.5);
        let (i, j, gain) = select_best_antenna(&matrix(Band::MuWave, e));
        assert_eq!((i, j), (2, 3));
        assert_relative_eq!(gain, 2.25, max_relative = 1e-12);
    }

    #[test]
    fn best_antenna_is_scale_invariant_and_breaks_ties_low() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = gen_mu_wave(5, 5, 1.0, &mut rng).unwrap();
        let (i, j, _) = select_best_antenna(&h);
        let scaled = matrix(Band::MuWave, h.entries.scale(7.3));
        let (si, sj, _) = select_best_antenna(&scaled);
        assert_eq!((i, j), (si, sj));

        // Exact tie: every entry equal — the first (row-major) wins.
        let ties = matrix(
            Band::MuWave,
            DMatrix::from_element(3, 3, Complex64::new(2.0, 1.0)),
        );
        assert_eq!(select_best_antenna(&ties).0, 0);
        assert_eq!(select_best_antenna(&ties).1, 0);
    }

    #[test]
    fn selection_gain_identity_with_eta() {
        // max |h_ij|^2 = eta * frob_power / (N_T N_R) by definition.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = gen_mu_wave(6, 11, 1.0, &mut rng).unwrap();
        let (_, _, gain) = select_best_antenna(&h);
        let eta = eta_metric(&h).unwrap();
        let reconstructed = eta * h.frobenius_power() / 66.0;
        assert_relative_eq!(gain, reconstructed, max_relative = 1e-10);
    }

    #[test]
    fn diagnostics_bundle_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = gen_mu_wave(4, 6, 1.0, &mut rng).unwrap();
        let d = ChannelDiagnostics::compute(&h, DEFAULT_RANK_REL_TOL).unwrap();
        assert_relative_eq!(d.eta, eta_metric(&h).unwrap(), max_relative = 1e-12);
        assert_eq!(d.numerical_rank, 4);
        assert_relative_eq!(d.frob_power, h.frobenius_power(), max_relative = 1e-12);
        let (i, j, _) = select_best_antenna(&h);
        assert_eq!(d.best_antenna, (i, j));

        let zero = matrix(Band::MuWave, DMatrix::zeros(2, 2));
        assert!(ChannelDiagnostics::compute(&zero, DEFAULT_RANK_REL_TOL).is_err());
    }
}
