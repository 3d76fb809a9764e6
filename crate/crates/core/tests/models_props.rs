mod common;

use common::*;
use igk_core::measures::{lk_norm, PowerMeasure};
use igk_core::models::{canonical_tensor, induced_model, normalize_model};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pullback_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = positive_model(&mut r, 8);
        let xi = parameter(&mut r, model.dim());
        for n in 1..=4 {
            let dirs: Vec<Vec<f64>> = (0..n).map(|_| vector(&mut r, model.dim(), 1.0)).collect();
            let tau = model.tau_n(&xi, &dirs).unwrap();
            let paths: Vec<PowerMeasure> = dirs.iter().map(|v| model.power_path(&xi, v, n as f64).unwrap().1).collect();
            let canon = canonical_tensor(&paths).unwrap();
            prop_assert!((tau - canon).abs() <= 1e-10 * tau.abs().max(canon.abs()), "n = {}: {} vs {}", n, tau, canon);
        }
    }

    #[test]
    fn fisher_metric_is_positive_semidefinite(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = positive_model(&mut r, 8);
        let xi = parameter(&mut r, model.dim());
        let g = model.fisher_metric(&xi).unwrap();
        let d = model.dim();
        let m = DMatrix::from_fn(d, d, |i, j| g.get(&[i, j]));
        prop_assert!(m.symmetric_eigenvalues().min() >= -1e-10);
    }

    #[test]
    fn amari_chentsov_is_fully_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = positive_model(&mut r, 8);
        let xi = parameter(&mut r, model.dim());
        let t = model.amari_chentsov(&xi).unwrap();
        let d = model.dim();
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let v = t.get(&[a, b, c]);
                    for p in [[a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                        prop_assert!((t.get(&p) - v).abs() <= 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn mass_derivative_consistency(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = positive_model(&mut r, 8);
        let xi = parameter(&mut r, model.dim());
        let v = vector(&mut r, model.dim(), 1.0);
        let tau1 = model.tau_n(&xi, std::slice::from_ref(&v)).unwrap();
        let h = 1e-6;
        let total = |t: f64| {
            let p: Vec<f64> = xi.iter().zip(&v).map(|(a, b)| a + t * b).collect();
            model.evaluate(&p).unwrap().total()
        };
        let central = |h: f64| (total(h) - total(-h)) / (2.0 * h);
        // Richardson extrapolation; plain central differences are too coarse
        // for strongly oscillating densities
        let fd = (4.0 * central(h / 2.0) - central(h)) / 3.0;
        let mass = total(0.0);
        prop_assert!((tau1 - fd).abs() <= 1e-6 * tau1.abs().max(mass), "{} vs {}", tau1, fd);
        let stat = normalize_model(&model);
        prop_assert!(stat.tau_n(&xi, &[v]).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn log_derivative_norms_increase_in_k(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = normalize_model(&positive_model(&mut r, 8));
        let xi = parameter(&mut r, model.dim());
        let v = vector(&mut r, model.dim(), 1.0);
        let p = model.evaluate(&xi).unwrap();
        let l = model.log_derivative(&xi, &v).unwrap();
        let norms: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 4.0].iter().map(|k| lk_norm(&l, &p, *k)).collect();
        for w in norms.windows(2) {
            prop_assert!(w[0] <= w[1] * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn induced_derivative_is_the_pushforward(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = positive_model(&mut r, 8);
        let target = space(r.random_range(1..=6));
        let k = any_kernel(&mut r, model.space(), &target);
        let induced = induced_model(&model, &k).unwrap();
        let xi = parameter(&mut r, model.dim());
        let v = vector(&mut r, model.dim(), 1.0);
        let pushed = k.pushforward(&model.mass_derivative(&xi, &v).unwrap()).unwrap();
        let direct = induced.mass_derivative(&xi, &v).unwrap();
        for (a, b) in pushed.masses().iter().zip(direct.masses()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
