use proptest::prelude::*;
use rabi_core::model::{c_bar, dho_raw_coeffs, growth_condition_onset, rabi_monic_family, rabi_raw_coeffs};
use rabi_core::{ModelParams, MonicCoefficients, Parity};

fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Plus), Just(Parity::Minus)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lambdas_positive(kappa in 0.05f64..5.0, delta in 0.0f64..5.0, par in parity(), n in 1usize..5000) {
        let p = ModelParams::new(kappa, delta, 1.0).unwrap();
        for alpha in [0, 1] {
            let r = rabi_monic_family(&p, par, alpha).unwrap();
            prop_assert!(r.lambda(n) > 0.0);
            prop_assert_eq!(r.lambda(n), (n as i32 + alpha) as f64);
            prop_assert_eq!(r.c(n), c_bar(&p, par, (n as i32 + alpha) as usize));
        }
        let r = rabi_monic_family(&p, par, -1).unwrap();
        prop_assert_eq!(r.lambda(1), 1.0);
        if n >= 2 {
            prop_assert_eq!(r.lambda(n), (n - 1) as f64);
        }
    }

    #[test]
    fn dho_is_the_zero_splitting_limit(kappa in 1e-3f64..=5.0, x in -10.0f64..10.0, par in parity()) {
        let p = ModelParams::dho(kappa).unwrap();
        for n in 0..=1000 {
            let (a, b) = rabi_raw_coeffs(&p, par, x, n);
            let (ad, bd) = dho_raw_coeffs(kappa, x, n);
            // same value, different rounding: bound by the operands, not the (cancelling) result
            let scale = (n as f64 + (kappa * x).abs()) / ((n + 1) as f64 * kappa);
            prop_assert!((a - ad).abs() <= 8.0 * f64::EPSILON * scale, "n={}: {} vs {}", n, a, ad);
            prop_assert_eq!(b, bd);
        }
    }

    #[test]
    fn growth_condition_eventually_holds(kappa in 0.05f64..5.0, delta in 0.0f64..5.0, par in parity()) {
        let p = ModelParams::new(kappa, delta, 1.0).unwrap();
        let onset = growth_condition_onset(&p, par, 100_000);
        prop_assert!(onset.is_some());
        let n0 = onset.unwrap();
        for n in n0..n0 + 200 {
            let (c0, c1) = (c_bar(&p, par, n), c_bar(&p, par, n + 1));
            prop_assert!((n + 1) as f64 / (c0 * c1) < 0.25);
        }
    }
}
