use proptest::prelude::*;
use rabi_core::model::rabi_monic_family;
use rabi_core::ops::{
    convergent, eval_monic, eval_monic_with_derivative, gauss_rule, pfd_eval, poly_zeros, sturm_count,
};
use rabi_core::{ModelParams, MonicCoefficients, Parity};

const TOL: f64 = 1e-13;

fn parity() -> impl Strategy<Value = Parity> {
    prop_oneof![Just(Parity::Plus), Just(Parity::Minus)]
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.1f64..3.0, 0.0f64..3.0).prop_map(|(k, d)| ModelParams::new(k, d, 1.0).unwrap())
}

// zeros found to TOL may touch but must not cross
fn slack(x: f64) -> f64 {
    4.0 * TOL * x.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn zeros_are_real_and_simple(p in params(), par in parity(), alpha in -1i32..=1, n in 1usize..=200) {
        let r = rabi_monic_family(&p, par, alpha).unwrap();
        let z = poly_zeros(&r, n, 1, n, TOL).unwrap();
        prop_assert_eq!(z.len(), n);
        prop_assert_eq!(sturm_count(&r, z[0] - 1.0, n), 0);
        prop_assert_eq!(sturm_count(&r, z[n - 1] + 1.0, n), n);
        for k in 1..n {
            prop_assert!(z[k] > z[k - 1]);
            prop_assert_eq!(sturm_count(&r, 0.5 * (z[k - 1] + z[k]), n), k);
        }
    }

    #[test]
    fn interlacing_and_separation(p in params(), par in parity(), n in 2usize..=200) {
        let r0 = rabi_monic_family(&p, par, 0).unwrap();
        let r1 = rabi_monic_family(&p, par, 1).unwrap();
        let zn = poly_zeros(&r0, n, 1, n, TOL).unwrap();
        let zm = poly_zeros(&r0, n - 1, 1, n - 1, TOL).unwrap();
        let zs = poly_zeros(&r1, n - 1, 1, n - 1, TOL).unwrap();
        let zp = poly_zeros(&r0, n + 1, 1, n + 1, TOL).unwrap();
        for k in 0..n - 1 {
            prop_assert!(zm[k] >= zn[k] - slack(zn[k]) && zm[k] <= zn[k + 1] + slack(zn[k + 1]), "k={}", k + 1);
            prop_assert!(zs[k] >= zn[k] - slack(zn[k]) && zs[k] <= zn[k + 1] + slack(zn[k + 1]), "k={}", k + 1);
        }
        // fixed k: zeros move down as n grows
        for k in 0..n {
            prop_assert!(zp[k] <= zn[k] + slack(zn[k]));
        }
    }

    #[test]
    fn christoffel_darboux_sign(p in params(), par in parity(), n in 2usize..=150) {
        let r = rabi_monic_family(&p, par, 0).unwrap();
        let zm = poly_zeros(&r, n - 1, 1, n - 1, TOL).unwrap();
        let mut checked = 0;
        for x in poly_zeros(&r, n, 1, n, TOL).unwrap() {
            // for weak coupling neighbouring degrees share zeros to below an ulp
            let gap = zm.iter().map(|z| (x - z).abs()).fold(f64::INFINITY, f64::min);
            if gap <= slack(x) {
                continue;
            }
            checked += 1;
            let (next, _) = eval_monic(&r, x, n + 1);
            let (_, dp) = eval_monic_with_derivative(&r, x, n);
            let (prev, _) = eval_monic(&r, x, n - 1);
            // at a zero p_{n+1} = −λ_n p_{n−1}
            prop_assert!((prev * dp).signum() > 0.0, "x={}", x);
            // p_{n+1} form only where λ_n p_{n−1} beats a 4-ulp error in x
            let noise = (x - r.c(n)).abs() * dp.to_f64().abs() * 4.0 * f64::EPSILON * x.abs().max(1.0);
            if r.lambda(n) * prev.to_f64().abs() > noise {
                prop_assert!((next * dp).signum() < 0.0, "x={}", x);
            }
        }
        prop_assert!(checked >= 1);
    }

    #[test]
    fn weights_positive_normalized_consistent(p in params(), par in parity(), alpha in -1i32..=1, n in 1usize..=100) {
        let r = rabi_monic_family(&p, par, alpha).unwrap();
        // the two weight formulas are compared inside gauss_rule at 1e-8 relative
        let q = gauss_rule(&r, n, TOL).unwrap();
        for (w, wcd) in q.weights.iter().zip(&q.weights_cd) {
            prop_assert!(w.signum() > 0.0 && wcd.signum() > 0.0);
            prop_assert!(((*w - *wcd) / *w).to_f64().abs() < 1e-8);
        }
        prop_assert!((q.weight_sum() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partial_fractions_equal_convergent(p in params(), par in parity(), n in 1usize..=60, xs in prop::collection::vec(-5.0f64..10.0, 25)) {
        let r0 = rabi_monic_family(&p, par, 0).unwrap();
        let r1 = rabi_monic_family(&p, par, 1).unwrap();
        let q = gauss_rule(&r0, n, TOL).unwrap();
        let a0 = -1.3;
        for x in xs {
            if q.nodes.iter().any(|z| (x - z).abs() < 1e-6) {
                continue;
            }
            let c = convergent(&r0, &r1, a0, x, n).unwrap();
            let f = pfd_eval(&q, a0, x).unwrap();
            prop_assert!((c - f).abs() <= 1e-10 * c.abs().max(1.0), "x={}: {} vs {}", x, c, f);
        }
    }

    #[test]
    fn scaling_is_exact_below_overflow(p in params(), par in parity(), alpha in -1i32..=1, x in -20.0f64..20.0) {
        let r = rabi_monic_family(&p, par, alpha).unwrap();
        let (mut pm, mut pc) = (0.0f64, 1.0f64);
        for n in 1..=50 {
            let next = (x - r.c(n)) * pc - if n >= 2 { r.lambda(n) * pm } else { 0.0 };
            pm = pc;
            pc = next;
            let (s, _) = eval_monic(&r, x, n);
            prop_assert!((s.to_f64() - pc).abs() <= 1e-12 * pc.abs(), "n={}", n);
        }
    }
}
