//! Property tests over randomized configurations and signals.

use dawc_core::frontend::{validate_params, Architecture, FrontendConfig};
use dawc_core::localization::support_blocks;
use dawc_core::signal::{make_random_spec, oracle_support, MultibandSpec, Subband};
use dawc_core::SupportSet;
use proptest::prelude::*;

/// Strategy for a valid DAWC grid: pick `n`, `L`, `f_c`, and a segment width
/// `f_s` inside the disjointness region, with roughly half the draws exactly
/// tiled.
fn dawc_grid() -> impl Strategy<Value = FrontendConfig<f64>> {
    (
        2usize..=8,
        2usize..=24,
        1e6f64..50e6,
        0.05f64..0.95,
        proptest::bool::ANY,
        any::<u64>(),
    )
        .prop_map(|(n, l, f_c, s_frac, tiled, seed)| {
            let (f_s, f_p) = if tiled {
                // choose f_s first, then close the interval exactly
                let f_s = f_c * s_frac;
                (f_s, f_s + (n - 1) as f64 * f_c)
            } else {
                let f_s = f_c * s_frac;
                (f_s, f_s + (n - 1) as f64 * f_c * 1.01)
            };
            FrontendConfig {
                architecture: Architecture::Dawc,
                f_p_hz: f_p,
                f_c_hz: f_c,
                f_s_hz: f_s,
                segments_per_interval: n,
                channels: 8,
                intervals: l,
                snapshots: 2,
                samples_per_snapshot: 4,
                seed,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valid_grids_have_disjoint_segments(cfg in dawc_grid()) {
        let report = validate_params(&cfg, None);
        prop_assert!(report.ordering);
        prop_assert!(report.disjoint);
        let tol = 1e-9 * cfg.f_s_hz;
        let segs: Vec<(f64, f64)> = (0..cfg.rows()).map(|xi| cfg.segment_interval(xi)).collect();
        for i in 0..segs.len() {
            for j in (i + 1)..segs.len() {
                let overlap = segs[i].1.min(segs[j].1) - segs[i].0.max(segs[j].0);
                prop_assert!(overlap <= tol, "rows {} and {} overlap by {}", i, j, overlap);
            }
        }
        // the map is strictly increasing row to row
        for xi in 1..cfg.rows() {
            prop_assert!(cfg.dawc_freq_map(xi) > cfg.dawc_freq_map(xi - 1));
        }
    }

    #[test]
    fn spectrum_and_time_are_additive(seed in 0u64..5000) {
        let spec = make_random_spec(3, &[40e6, 80e6], 2e9, 50e-6, seed).unwrap();
        let singles: Vec<MultibandSpec<f64>> = spec
            .subbands
            .iter()
            .map(|sb| MultibandSpec::new(vec![*sb], 2e9, 50e-6).unwrap())
            .collect();
        for k in 0..8 {
            let f = -2e9 + 4e9 * (k as f64 + 0.37) / 8.0;
            let t = 50e-6 * (k as f64 + 0.5) / 8.0;
            let sum_f = singles.iter().fold(num_complex::Complex::new(0.0, 0.0), |acc, s| {
                acc + s.spectrum_at(f)
            });
            let sum_t = singles.iter().fold(num_complex::Complex::new(0.0, 0.0), |acc, s| {
                acc + s.time_signal_at(t)
            });
            prop_assert_eq!(spec.spectrum_at(f), sum_f);
            prop_assert_eq!(spec.time_signal_at(t), sum_t);
        }
    }

    #[test]
    fn spec_json_round_trip_is_exact(seed in 0u64..5000) {
        let spec = make_random_spec(4, &[30e6, 50e6, 90e6], 4e9, 30e-6, seed).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: MultibandSpec<f64> = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(spec, back);
    }

    #[test]
    fn support_blocks_partition_the_set(raw in proptest::collection::btree_set(0usize..200, 0..40)) {
        let set: SupportSet = raw;
        let blocks = support_blocks(&set);
        // blocks reassemble the set exactly
        let mut rebuilt = SupportSet::new();
        for &(a, b) in &blocks {
            prop_assert!(a <= b);
            rebuilt.extend(a..=b);
        }
        prop_assert_eq!(&rebuilt, &set);
        // gaps of at least one index between consecutive blocks
        for w in blocks.windows(2) {
            prop_assert!(w[1].0 > w[0].1 + 1);
        }
    }

    #[test]
    fn oracle_support_grows_with_bandwidth(seed in 0u64..2000) {
        let cfg = FrontendConfig::<f64> {
            architecture: Architecture::Dawc,
            f_p_hz: 100e6,
            f_c_hz: 19.8e6,
            f_s_hz: 1e6,
            segments_per_interval: 6,
            channels: 8,
            intervals: 100,
            snapshots: 2,
            samples_per_snapshot: 4,
            seed,
        };
        let spec = make_random_spec(2, &[50e6], 5e9, 24e-6, seed).unwrap();
        let base = oracle_support(&spec, &cfg);
        let mut wider = spec.clone();
        for sb in &mut wider.subbands {
            sb.bandwidth_hz *= 1.25;
        }
        if wider.validate().is_ok() {
            prop_assert!(base.is_subset(&oracle_support(&wider, &cfg)));
        }
    }

    #[test]
    fn subband_validation_is_total(carrier in -1e9f64..1e9, bw in 1e3f64..1e8, delay in 0.0f64..1e-3) {
        let sb = Subband { amplitude: 1.0, bandwidth_hz: bw, carrier_hz: carrier, delay_s: delay };
        // either the spec constructs (and then respects its own invariants)
        // or it reports an error; it must not panic
        if let Ok(spec) = MultibandSpec::new(vec![sb], 1e9, 1e-3) {
            prop_assert!(spec.validate().is_ok());
        }
    }
}
