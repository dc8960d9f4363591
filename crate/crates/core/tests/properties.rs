//! Property tests for the invariants the library promises over their whole
//! input domains, not just at hand-picked points.

use mimo_bands_core::array_geometry::{coherence, ula_response, Angle};
use mimo_bands_core::channel_models::gen_mu_wave;
use mimo_bands_core::metrics::eta_metric;
use mimo_bands_core::propagation::{
    mm_wave_attenuation_db, mu_wave_pathloss_db, LosModel, MmWaveScenario, MuWaveLinkParams,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Open bound for endfire-exclusive angle ranges, just inside +-pi/2.
const NEAR_RIGHT_ANGLE: f64 = std::f64::consts::FRAC_PI_2 - 1e-4;

proptest! {
    #[test]
    fn steering_vectors_have_unit_norm(
        angle_rad in -NEAR_RIGHT_ANGLE..NEAR_RIGHT_ANGLE,
        n in 1usize..300,
    ) {
        let a = ula_response(Angle::from_radians(angle_rad), n);
        let norm = a.elements().norm();
        prop_assert!((norm - 1.0).abs() < 1e-12, "norm = {norm}");
    }

    #[test]
    fn coherence_is_symmetric_and_bounded(
        a in -NEAR_RIGHT_ANGLE..NEAR_RIGHT_ANGLE,
        b in -NEAR_RIGHT_ANGLE..NEAR_RIGHT_ANGLE,
        n in 1usize..200,
    ) {
        let x = Angle::from_radians(a);
        let y = Angle::from_radians(b);
        let fwd = coherence(x, y, n);
        let rev = coherence(y, x, n);
        prop_assert!((fwd - rev).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&fwd), "coherence = {fwd}");
    }

    #[test]
    fn eta_respects_its_bounds_and_scale_invariance(
        seed in 0u64..1_000_000,
        n_r in 1usize..12,
        n_t in 1usize..12,
        scale in 1e-6f64..1e6,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = gen_mu_wave(n_r, n_t, 1.0, &mut rng).unwrap();
        let eta = eta_metric(&h).unwrap();
        let dims = (n_r * n_t) as f64;
        prop_assert!(eta >= 1.0 - 1e-9 && eta <= dims + 1e-9, "eta = {eta}");

        let scaled = mimo_bands_core::channel_models::ChannelMatrix::new(
            h.entries.scale(scale),
            h.band,
        );
        let eta_scaled = eta_metric(&scaled).unwrap();
        prop_assert!((eta - eta_scaled).abs() <= 1e-9 * eta.max(1.0));
    }

    #[test]
    fn eta_is_exactly_dims_on_one_hot_matrices(
        n_r in 1usize..10,
        n_t in 1usize..10,
        i in 0usize..10,
        j in 0usize..10,
    ) {
        let (i, j) = (i % n_r, j % n_t);
        let mut e = DMatrix::zeros(n_r, n_t);
        e[(i, j)] = Complex64::new(0.0, 3.0);
        let h = mimo_bands_core::channel_models::ChannelMatrix::new(
            e,
            mimo_bands_core::channel_models::Band::MuWave,
        );
        let eta = eta_metric(&h).unwrap();
        prop_assert!((eta - (n_r * n_t) as f64).abs() < 1e-9);
    }

    #[test]
    fn pathloss_never_increases_with_distance(
        d_low in 1.0f64..5_000.0,
        step in 0.001f64..5_000.0,
    ) {
        let params = MuWaveLinkParams::default();
        let near = mu_wave_pathloss_db(d_low, &params).unwrap();
        let far = mu_wave_pathloss_db(d_low + step, &params).unwrap();
        prop_assert!(far <= near + 1e-12, "gain rose with distance: {near} -> {far}");
    }

    #[test]
    fn pathloss_is_continuous_at_the_breakpoints(
        d0 in 10.0f64..200.0,
        extra in 1.0f64..200.0,
    ) {
        let params = MuWaveLinkParams {
            d0_m: d0,
            d1_m: d0 + extra,
            ..MuWaveLinkParams::default()
        };
        for bp in [params.d0_m, params.d1_m] {
            let below = mu_wave_pathloss_db(bp * (1.0 - 1e-9), &params).unwrap();
            let above = mu_wave_pathloss_db(bp * (1.0 + 1e-9), &params).unwrap();
            prop_assert!((below - above).abs() < 1e-6, "jump at {bp}: {below} vs {above}");
        }
    }

    #[test]
    fn attenuation_never_increases_with_range_in_any_scenario(
        r_low in 1.0f64..500.0,
        step in 0.01f64..500.0,
        which in 0usize..8,
    ) {
        let names = MmWaveScenario::names();
        let scenario = MmWaveScenario::by_name(names[which], 73.0).unwrap();
        let near = mm_wave_attenuation_db(r_low, &scenario, 0.0).unwrap();
        let far = mm_wave_attenuation_db(r_low + step, &scenario, 0.0).unwrap();
        prop_assert!(far <= near + 1e-12, "{}: gain rose with range", scenario.name);
    }

    #[test]
    fn los_probability_stays_in_the_unit_interval(
        d in 0.1f64..50_000.0,
        near in 1.0f64..100.0,
        decay in 1.0f64..200.0,
        p_fixed in 0.0f64..1.0,
    ) {
        for model in [
            LosModel::Always,
            LosModel::Never,
            LosModel::FixedProbability(p_fixed),
            LosModel::UrbanMicroCurve { near_m: near, decay_m: decay },
        ] {
            let p = model.probability(d).unwrap();
            prop_assert!((0.0..=1.0).contains(&p), "{model:?} gave p = {p}");
        }
    }

    #[test]
    fn curve_los_probability_decays_with_distance(
        d in 21.0f64..10_000.0,
        step in 1.0f64..10_000.0,
    ) {
        let model = LosModel::default();
        let near = model.probability(d).unwrap();
        let far = model.probability(d + step).unwrap();
        prop_assert!(far <= near + 1e-12);
    }
}
