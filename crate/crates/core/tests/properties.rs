use proptest::prelude::*;
use smma::corpus::{parse_distribution, render_distribution};
use smma::fitting::{fit_ma, fit_smma_with_omega, FitConfig};
use smma::model::{log_disorder, OccupationVector};
use smma::thermo::{entropy, free_energy, mean_length, EntropyBasis, LMax};
use smma::{distill, ma_eval, ma_to_smma, smma_to_ma, AlphabetSpec, LengthDistribution, MaParams, SmmaParams};

fn states() -> impl Strategy<Value = Vec<(u32, u64)>> {
    prop::collection::btree_map(1u32..60, 0u64..100_000, 1..25).prop_map(|m| m.into_iter().collect())
}

fn ma_params() -> impl Strategy<Value = MaParams> {
    (0.01f64..100.0, -2.0f64..12.0, -0.5f64..3.0).prop_map(|(a, b, c)| MaParams::new(a, b, c))
}

/// Rounded counts of an MA curve shaped like the reference corpora.
fn corpus_like() -> impl Strategy<Value = (MaParams, LengthDistribution)> {
    (4.0f64..10.0, 0.8f64..1.4, 1_000.0f64..50_000.0).prop_map(|(b, c, peak)| {
        let shape = |l: f64| b * l.ln() - c * l;
        let a = peak / shape(b / c).exp();
        let p = MaParams::new(a, b, c);
        let pairs: Vec<(u32, u64)> = (1..=22).map(|l| (l, ma_eval(&p, l).round() as u64)).collect();
        (p, LengthDistribution::from_pairs(&pairs).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distill_ignores_repeats(words in prop::collection::vec("[a-z]{1,12}", 0..200)) {
        let once = distill(&words);
        let twice = distill(words.iter().chain(&words));
        prop_assert_eq!(&once, &twice);
        let lens: u64 = once.states().iter().map(|s| s.length as u64 * s.count).sum();
        prop_assert_eq!(lens, once.total_letters());
    }

    #[test]
    fn distribution_text_round_trip(pairs in states(), label in "[a-z_]{0,8}", preset in 0usize..3) {
        let mut d = LengthDistribution::from_pairs(&pairs).unwrap().with_label(label);
        if preset < 2 {
            d = d.with_alphabet(AlphabetSpec::preset(AlphabetSpec::preset_names()[preset]).unwrap());
        }
        prop_assert_eq!(parse_distribution(&render_distribution(&d)).unwrap(), d);
    }

    #[test]
    fn transform_round_trips(m in ma_params(), omega in 1u32..60) {
        let back = smma_to_ma(&ma_to_smma(&m, omega));
        for (x, y) in m.to_array().iter().zip(back.to_array()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
        let s = ma_to_smma(&m, omega);
        let again = ma_to_smma(&smma_to_ma(&s), omega);
        for (x, y) in s.free().iter().zip(again.free()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn normalizable_flag_matches_tail(m in ma_params(), omega in 2u32..40) {
        let s = ma_to_smma(&m, omega);
        prop_assume!((s.theta - s.ln_omega()).abs() > 1e-3);
        // log of y(l+1)/y(l) far out in the tail
        let l = 1e7f64;
        let ln_ratio = s.ln_omega() - s.theta + s.alpha * ((l + 1.0) / l).ln();
        prop_assert_eq!(s.is_normalizable(), ln_ratio < 0.0);
        prop_assert_eq!(m.is_normalizable(), s.is_normalizable());
    }

    #[test]
    fn disorder_is_permutation_invariant(
        occ in prop::collection::vec(0u64..500, 3),
        lens in prop::sample::subsequence((1u32..20).collect::<Vec<_>>(), 3),
        omega in 1u32..30,
        alpha in 0.0f64..5.0,
    ) {
        let states: Vec<(u32, u64)> = lens.iter().copied().zip(occ).collect();
        let base = OccupationVector { states: states.clone(), omega, alpha };
        let mut rev = states;
        rev.reverse();
        let rotated = OccupationVector { states: vec![rev[1], rev[2], rev[0]], omega, alpha };
        let reversed = OccupationVector { states: rev, omega, alpha };
        let v = log_disorder(&base);
        prop_assert!((v - log_disorder(&reversed)).abs() <= 1e-9 * v.abs().max(1.0));
        prop_assert!((v - log_disorder(&rotated)).abs() <= 1e-9 * v.abs().max(1.0));
    }

    #[test]
    fn free_energy_falls_as_range_grows(phi in -3.0f64..3.0, alpha in 0.0f64..10.0, excess in 0.05f64..3.0, omega in 2u32..40, l in 1u32..80) {
        let p = SmmaParams::new(phi, alpha, (omega as f64).ln() + excess, omega);
        let f1 = free_energy(&p, LMax::Fixed(l)).unwrap();
        let f2 = free_energy(&p, LMax::Fixed(l + 1)).unwrap();
        prop_assert!(f2 <= f1);
    }

    #[test]
    fn mean_length_within_observed_range(pairs in states()) {
        let d = LengthDistribution::from_pairs(&pairs).unwrap();
        prop_assume!(d.total_distinct() > 0);
        let m = mean_length(&d).unwrap();
        prop_assert!(m >= d.min_length().unwrap() as f64 && m <= d.max_length().unwrap() as f64);
    }

    #[test]
    fn entropy_non_negative(pairs in states(), phi in -3.0f64..3.0, alpha in 0.0f64..10.0, omega in 1u32..40) {
        let d = LengthDistribution::from_pairs(&pairs).unwrap();
        prop_assume!(d.total_distinct() > 0);
        let p = SmmaParams::new(phi, alpha, 4.0, omega);
        prop_assert!(entropy(&d, &p, EntropyBasis::ObservedCounts).unwrap() >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_counts_scales_amplitude_only((_, d) in corpus_like(), k in 2u64..50) {
        let cfg = FitConfig::default();
        let base = fit_ma(&d, &cfg, None).unwrap();
        let scaled = fit_ma(&d.scaled(k), &cfg, None).unwrap();
        let (p, q) = (base.params.as_ma().unwrap(), scaled.params.as_ma().unwrap());
        prop_assert!((q.a / (k as f64) - p.a).abs() <= 1e-6 * p.a);
        prop_assert!((q.b - p.b).abs() <= 1e-6 * p.b.abs().max(1.0));
        prop_assert!((q.c - p.c).abs() <= 1e-6 * p.c.abs().max(1.0));

        let bs = fit_smma_with_omega(&d, 26, &cfg, None).unwrap();
        let ss = fit_smma_with_omega(&d.scaled(k), 26, &cfg, None).unwrap();
        let (p, q) = (bs.params.as_smma().unwrap(), ss.params.as_smma().unwrap());
        prop_assert!((q.phi - p.phi - (k as f64).ln()).abs() <= 1e-6 * p.phi.abs().max(1.0));
        prop_assert!((q.alpha - p.alpha).abs() <= 1e-6 * p.alpha.abs().max(1.0));
        prop_assert!((q.theta - p.theta).abs() <= 1e-6 * p.theta.abs().max(1.0));
    }

    #[test]
    fn both_models_fit_alike((_, d) in corpus_like(), omega in 2u32..40) {
        let cfg = FitConfig::default();
        let ma = fit_ma(&d, &cfg, None).unwrap();
        let sm = fit_smma_with_omega(&d, omega, &cfg, None).unwrap();
        let peak = d.counts().iter().cloned().fold(0.0, f64::max);
        for (a, b) in ma.predicted.iter().zip(&sm.predicted) {
            // relative to the value, or to the peak for near-empty tail states
            prop_assert!((a.1 - b.1).abs() <= 0.005 * a.1.abs().max(1e-3 * peak), "{:?} vs {:?}", a, b);
        }
        prop_assert!((ma.r - sm.r).abs() <= 1e-3);

        let (m, s) = (ma.params.as_ma().unwrap(), sm.params.as_smma().unwrap());
        let tol = |i: usize| 2.0 * ma.std_errors[i].hypot(sm.std_errors[i]);
        prop_assert!((s.theta - s.ln_omega() - m.c).abs() <= tol(2));
        prop_assert!((s.alpha - m.b).abs() <= tol(1));
        prop_assert!((s.phi.exp() - m.a).abs() <= 2.0 * ma.std_errors[0].hypot(s.phi.exp() * sm.std_errors[0]));
    }
}
