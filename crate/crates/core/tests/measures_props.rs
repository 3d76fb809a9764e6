mod common;

use common::*;
use igk_core::measures::{lk_norm, PowerMeasure, SignedMeasure};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn power_norm_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=8);
        let sp = coord_space(&mut r, n);
        let e = r.random_range(0.1..=1.0);
        let nu = power_measure(&mut r, &sp, e);
        let k = r.random_range(0.05..=1.0 / e);
        let want = nu.norm().powf(k);
        for p in [nu.pow_abs(k).unwrap(), nu.pow_signed(k).unwrap()] {
            prop_assert!((p.norm() - want).abs() <= 1e-12 * (1.0 + want));
            prop_assert!((p.exponent() - e * k).abs() <= 1e-12);
        }
    }

    #[test]
    fn holder_bound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=8);
        let sp = coord_space(&mut r, n);
        let e = r.random_range(0.05..=0.95);
        let s = r.random_range(0.01..=1.0 - e);
        let (nu, rho) = (power_measure(&mut r, &sp, e), power_measure(&mut r, &sp, s));
        prop_assert!(nu.multiply(&rho).unwrap().norm() <= nu.norm() * rho.norm() + 1e-12);
    }

    #[test]
    fn recombination(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=8);
        let sp = coord_space(&mut r, n);
        let mu = measure(&mut r, &sp, true);
        let e = r.random_range(0.05..=0.95);
        let back = mu.power(e).unwrap().multiply(&mu.power(1.0 - e).unwrap()).unwrap().to_signed_measure().unwrap();
        for (a, b) in back.masses().iter().zip(mu.masses()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn power_derivative_matches_finite_differences(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=8);
        let sp = coord_space(&mut r, n);
        let e = r.random_range(0.1..=0.9);
        let nu = power_measure(&mut r, &sp, e);
        let k = r.random_range(1.001..=1.0 / e);
        let rho = PowerMeasure::new(sp.clone(), e, vector(&mut r, n, 1.0)).unwrap();
        let h = 1e-5 * rho.norm().max(1.0);
        let at = |t: f64| {
            let c = nu.coeff().iter().zip(rho.coeff()).map(|(a, b)| a + t * b).collect();
            PowerMeasure::new(sp.clone(), e, c).unwrap().pow_signed(k).unwrap()
        };
        let (p, m) = (at(h), at(-h));
        let exact = nu.d_pow_signed(&rho, k).unwrap();
        let scale = exact.coeff().iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
        for i in 0..n {
            let fd = (p.coeff()[i] - m.coeff()[i]) / (2.0 * h);
            prop_assert!((fd - exact.coeff()[i]).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn jordan_decomposition_is_singular_and_exact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=8);
        let sp = space(n);
        let nu = SignedMeasure::new(sp, vector(&mut r, n, 3.0)).unwrap();
        let (pos, neg) = nu.jordan_decompose();
        for i in 0..n {
            prop_assert_eq!(pos.masses()[i] - neg.masses()[i], nu.masses()[i]);
            prop_assert!(pos.masses()[i] == 0.0 || neg.masses()[i] == 0.0);
        }
        prop_assert!((pos.total() + neg.total() - nu.tv_norm()).abs() <= 1e-12);
    }

    #[test]
    fn lk_norms_increase_in_k_on_probabilities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=8);
        let sp = coord_space(&mut r, n);
        let p = measure(&mut r, &sp, true);
        prop_assume!(p.total() > 0.0);
        let p = p.normalize().unwrap();
        let phi = vector(&mut r, n, 2.0);
        let norms: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 4.0].iter().map(|k| lk_norm(&phi, p.as_measure(), *k)).collect();
        for w in norms.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12);
        }
    }
}
