//! Property tests for the structural invariants the modules promise.

mod common;

use proptest::prelude::*;
use randfb::bounds::{cantelli_alpha, cantelli_prob, chernoff_prob};
use randfb::filterbank::{frame_bounds, response_energy, EnergyEstimator, Filterbank};
use randfb::signals::Signal;
use randfb::spectrum::{quadratic_energy, ShiftGram};

fn arb_signal() -> impl Strategy<Value = Signal> {
    prop::collection::vec(-10.0f64..10.0, 2..48)
        .prop_filter("needs some energy", |v| {
            v.iter().map(|x| x * x).sum::<f64>() > 1e-6
        })
        .prop_map(|v| Signal::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn autocorrelation_is_dominated_by_lag_zero(x in arb_signal()) {
        let r = x.autocorrelation(x.len()).unwrap();
        let r0 = r.energy();
        prop_assert!((r0 - x.energy()).abs() <= 1e-9 * r0.max(1.0));
        for &v in r.values() {
            prop_assert!(v.abs() <= r0 * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn quadratic_form_equals_convolution_energy(
        x in arb_signal(),
        w in prop::collection::vec(-5.0f64..5.0, 1..8),
    ) {
        prop_assume!(w.len() <= x.len());
        let quad = quadratic_energy(&x, &w).unwrap();
        let direct = randfb::circular_convolve(&x, &w).unwrap().energy();
        prop_assert!((quad - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn gram_trace_is_dim_times_energy(x in arb_signal(), t in 1usize..16) {
        prop_assume!(t <= x.len());
        let gram = ShiftGram::new(&x, t).unwrap();
        let want = t as f64 * x.energy();
        prop_assert!((gram.trace() - want).abs() <= 1e-10 * want.max(1.0));
    }

    #[test]
    fn frame_bounds_scale_quadratically(seed in any::<u64>(), c in 0.1f64..4.0) {
        let fb = Filterbank::sample(3, 4, 1.0, seed).unwrap();
        let scaled = Filterbank::from_filters(
            fb.filters().iter().map(|w| w.iter().map(|v| c * v).collect()).collect(),
            fb.sigma_sq(),
        ).unwrap();
        let b0 = frame_bounds(&fb, 16).unwrap();
        let b1 = frame_bounds(&scaled, 16).unwrap();
        prop_assert!((b1.upper - c * c * b0.upper).abs() <= 1e-9 * b1.upper.max(1e-12));
        prop_assert!((b1.lower - c * c * b0.lower).abs() <= 1e-9 * b1.upper.max(1e-12));
        if !b0.singular {
            prop_assert!(
                (b1.condition_number() - b0.condition_number()).abs()
                    <= 1e-8 * b0.condition_number()
            );
        }
    }

    #[test]
    fn frame_inequality_holds_for_random_probes(seed in any::<u64>()) {
        let n = 24;
        let fb = Filterbank::sample(3, 6, 0.5, seed).unwrap();
        let bounds = frame_bounds(&fb, n).unwrap();
        for probe in 0..32u64 {
            let v = common::random_unit_vector(seed, &[900, probe], n);
            let x = Signal::new(v).unwrap();
            let e = response_energy(&fb, &x).unwrap();
            let slack = 1e-8 * bounds.upper;
            prop_assert!(e >= bounds.lower - slack, "{} < {}", e, bounds.lower);
            prop_assert!(e <= bounds.upper + slack, "{} > {}", e, bounds.upper);
        }
    }

    #[test]
    fn estimator_agrees_with_direct_energy(x in arb_signal(), seed in any::<u64>()) {
        prop_assume!(x.len() >= 4);
        let fb = Filterbank::sample(2, 4, 0.5, seed).unwrap();
        let est = EnergyEstimator::new(&x);
        let fast = est.response_energy(&fb).unwrap();
        let direct = response_energy(&fb, &x).unwrap();
        prop_assert!((fast - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn tail_bounds_are_monotone_and_clamped(
        x in arb_signal(),
        lambda_inf in 1e-6f64..100.0,
        excess in 1.0f64..8.0,
        a1 in 0.0f64..4.0,
        a2 in 0.0f64..4.0,
    ) {
        // the bound functions are pure in the spectral statistics, so any
        // positive spectrum exercises them
        let t = x.len().min(6);
        let stats = randfb::SpectralStats {
            lambda_inf,
            lambda_2_sq: lambda_inf * lambda_inf * excess,
            trace: lambda_inf * excess * t as f64,
        };
        let r = x.autocorrelation(x.len()).unwrap();
        let v = randfb::bounds::energy_variance(5, 1.0 / (5.0 * t as f64), t, &r).unwrap();
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let c_lo = cantelli_prob(lo, v, x.energy());
        let c_hi = cantelli_prob(hi, v, x.energy());
        prop_assert!((0.0..=1.0).contains(&c_lo) && (0.0..=1.0).contains(&c_hi));
        prop_assert!(c_hi <= c_lo + 1e-12);
        let h_lo = chernoff_prob(lo, 5, t, &stats, x.energy());
        let h_hi = chernoff_prob(hi, 5, t, &stats, x.energy());
        prop_assert!((0.0..=1.0).contains(&h_lo) && (0.0..=1.0).contains(&h_hi));
        prop_assert!(h_hi <= h_lo + 1e-12);
    }

    #[test]
    fn cantelli_roundtrip(p in 0.001f64..0.999, v in 1e-6f64..10.0, e in 0.1f64..10.0) {
        let alpha = cantelli_alpha(p, v, e).unwrap();
        let back = cantelli_prob(alpha, v, e);
        prop_assert!((back - p).abs() <= 1e-9);
    }
}
