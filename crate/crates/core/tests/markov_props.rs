mod common;

use common::*;
use igk_core::markov::{compose, congruent_kernel_from_embedding, is_congruent, transverse_measures, CONGRUENCE_TOL};
use igk_core::measures::{lk_norm, lk_norm_pow, Measure, PowerMeasure, SignedMeasure};
use proptest::prelude::*;
use rand::Rng;

const ORDERS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn pushforward_preserves_mass(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=6));
        let k = any_kernel(&mut r, &space(n), &space(m));
        let mu = measure(&mut r, k.source(), true);
        let pushed = k.pushforward_measure(&mu).unwrap();
        prop_assert!((pushed.as_signed().tv_norm() - mu.as_signed().tv_norm()).abs() <= 1e-12);
    }

    #[test]
    fn pushforward_contracts_signed_measures(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=6));
        let k = any_kernel(&mut r, &space(n), &space(m));
        let nu = SignedMeasure::new(k.source().clone(), vector(&mut r, n, 2.0)).unwrap();
        prop_assert!(k.pushforward(&nu).unwrap().tv_norm() <= nu.tv_norm() + 1e-12);
    }

    #[test]
    fn composition_is_functorial(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (space(r.random_range(1..=6)), space(r.random_range(1..=6)), space(r.random_range(1..=6)));
        let (k1, k2) = (any_kernel(&mut r, &a, &b), any_kernel(&mut r, &b, &c));
        let mu = measure(&mut r, &a, true);
        let direct = compose(&k2, &k1).unwrap().pushforward_measure(&mu).unwrap();
        let stepwise = k2.pushforward_measure(&k1.pushforward_measure(&mu).unwrap()).unwrap();
        for (x, y) in direct.masses().iter().zip(stepwise.masses()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn conditional_expectation_contracts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=6));
        let k = any_kernel(&mut r, &space(n), &space(m));
        let mu = measure(&mut r, k.source(), true);
        let phi = vector(&mut r, n, 2.0);
        let pushed = k.pushforward_measure(&mu).unwrap();
        let cond = k.conditional_expectation(&mu, &phi).unwrap();
        for p in ORDERS {
            prop_assert!(lk_norm(&cond, &pushed, p) <= lk_norm(&phi, &mu, p) + 1e-10, "k = {}", p);
        }
    }

    #[test]
    fn congruent_kernels_are_isometries(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=4);
        let size = r.random_range(n..=7);
        let fine = coord_space(&mut r, size);
        let coarse = space(n);
        let kappa = surjection(&mut r, &fine, &coarse);
        let nu = measure(&mut r, &fine, true);
        let k = congruent_kernel_from_embedding(&kappa, &nu).unwrap();
        prop_assert!(is_congruent(&k, &kappa, CONGRUENCE_TOL).unwrap());
        let mu = measure(&mut r, &coarse, true);
        let phi = vector(&mut r, n, 2.0);
        let pushed = k.pushforward_measure(&mu).unwrap();
        let cond = k.conditional_expectation(&mu, &phi).unwrap();
        for p in ORDERS {
            prop_assert!((lk_norm(&cond, &pushed, p) - lk_norm(&phi, &mu, p)).abs() <= 1e-10, "k = {}", p);
        }
    }

    #[test]
    fn statistic_equality_condition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=4));
        let kappa = statistic(&mut r, &space(n), &space(m));
        let mu = measure(&mut r, kappa.source(), true);
        // half of the time φ is already a pullback
        let phi = if r.random_bool(0.5) {
            kappa.pullback(&vector(&mut r, m, 2.0))
        } else {
            vector(&mut r, n, 2.0)
        };
        let k = kappa.kernel();
        let pushed = k.pushforward_measure(&mu).unwrap();
        let cond = k.conditional_expectation(&mu, &phi).unwrap();
        let pulled = kappa.pullback(&cond);
        let gap = phi
            .iter()
            .zip(&pulled)
            .zip(mu.masses())
            .filter(|(_, w)| **w > 0.0)
            .fold(0.0_f64, |a, ((x, y), _)| a.max((x - y).abs()));
        for p in [1.5, 2.0, 3.0] {
            let equal = (lk_norm(&cond, &pushed, p) - lk_norm(&phi, &mu, p)).abs() <= 1e-10;
            prop_assert_eq!(equal, gap <= 1e-8, "k = {}, gap = {}", p, gap);
        }
    }

    #[test]
    fn disintegration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=5));
        let kappa = statistic(&mut r, &space(n), &space(m));
        let mu = measure(&mut r, kappa.source(), true);
        let family = transverse_measures(&kappa, &mu).unwrap();
        let pushed = kappa.pushforward_measure(&mu).unwrap();
        // μ = Σ_j (κ_*μ)_j μ_j, atom by atom
        let mut rebuilt = vec![0.0; n];
        for j in 0..m {
            match family.fiber(j) {
                Some(f) => {
                    for (r, fi) in rebuilt.iter_mut().zip(f.masses()) {
                        *r += pushed.masses()[j] * fi;
                    }
                }
                None => prop_assert!(kappa.fiber(j).is_empty()),
            }
        }
        for (a, b) in rebuilt.iter().zip(mu.masses()) {
            prop_assert!((a - b).abs() <= 1e-15 * b.max(1.0));
        }
        let phi = vector(&mut r, n, 2.0);
        let total: f64 = phi.iter().zip(mu.masses()).map(|(a, b)| a * b).sum();
        let fibered: f64 = family.fiber_integrals(&phi).iter().zip(pushed.masses()).map(|(a, b)| a * b).sum();
        prop_assert!((total - fibered).abs() <= 1e-12 * total.abs().max(1.0));
    }

    #[test]
    fn formal_power_derivative_is_bounded(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m) = (r.random_range(1..=8), r.random_range(1..=6));
        let k = any_kernel(&mut r, &space(n), &space(m));
        let mu = measure(&mut r, k.source(), true);
        let e = r.random_range(0.1..=1.0);
        let phi = vector(&mut r, n, 2.0);
        let root = mu.power(e).unwrap();
        let coeff = phi.iter().zip(root.coeff()).map(|(a, b)| a * b).collect();
        let rho = PowerMeasure::new(k.source().clone(), e, coeff).unwrap();
        let d = k.formal_power_derivative(&mu, &rho).unwrap();
        prop_assert!(d.norm() <= rho.norm() + 1e-10);
        // the norm of φμ^r is the L^{1/r}(μ) norm of φ
        prop_assert!((rho.norm() - lk_norm(&phi, &mu, 1.0 / e)).abs() <= 1e-12 * rho.norm().max(1.0));
    }
}

#[test]
fn lk_norm_pow_is_the_kth_power() {
    let mut r = rng(7);
    let sp = space(5);
    let mu: Measure = measure(&mut r, &sp, true);
    let phi = vector(&mut r, 5, 2.0);
    for k in [1.0, 1.5, 2.0, 3.0] {
        let (a, b) = (lk_norm_pow(&phi, &mu, k), lk_norm(&phi, &mu, k).powf(k));
        assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }
}
