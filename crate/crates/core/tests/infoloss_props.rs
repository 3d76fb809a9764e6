mod common;

use common::*;
use igk_core::infoloss::{
    equality_direction_check, fisher_neyman_check, information_loss, is_sufficient, FactorizationStatus,
};
use igk_core::markov::{congruent_kernel_from_embedding, is_congruent, MarkovKernel, Statistic, CONGRUENCE_TOL};
use igk_core::models::{ex_suff, induced_model, ParametrizedMeasureModel};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Half of the instances are sufficient by construction, half are random.
fn statistic_instance(r: &mut ChaCha8Rng) -> (ParametrizedMeasureModel, Statistic) {
    if r.random_bool(0.5) {
        factorized_model(r, 8)
    } else {
        let model = positive_model(r, 8);
        let target = space(r.random_range(1..=4));
        let kappa = statistic(r, model.space(), &target);
        (model, kappa)
    }
}

/// Loss as a fraction of the source k-norm, so that zero loss can be judged
/// independently of the size of the score.
fn relative_loss(model: &ParametrizedMeasureModel, k: &MarkovKernel, xi: &[f64], v: &[f64], order: f64) -> f64 {
    let loss = information_loss(model, k, xi, v, order).unwrap();
    let source = model.k_norm_pow(xi, v, order).unwrap();
    if source == 0.0 {
        loss.abs()
    } else {
        loss / source
    }
}

fn basis(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|j| (0..d).map(|i| f64::from(u8::from(i == j))).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn loss_is_nonnegative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = positive_model(&mut r, 8);
        let target = space(r.random_range(1..=6));
        let k = any_kernel(&mut r, model.space(), &target);
        let xi = parameter(&mut r, model.dim());
        let v = vector(&mut r, model.dim(), 1.0);
        for order in [1.0, 1.5, 2.0, 3.0, 4.0] {
            // the loss is a difference of two norms of this size
            let scale = model.k_norm_pow(&xi, &v, order).unwrap().max(1.0);
            prop_assert!(information_loss(&model, &k, &xi, &v, order).unwrap() >= -1e-10 * scale);
        }
    }

    #[test]
    fn congruent_kernels_lose_nothing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = positive_model(&mut r, 4);
        let n = model.space().len();
        let size = r.random_range(n..=8);
        let fine = coord_space(&mut r, size);
        let kappa = surjection(&mut r, &fine, model.space());
        let nu = measure(&mut r, &fine, true);
        let k = congruent_kernel_from_embedding(&kappa, &nu).unwrap();
        prop_assert!(is_congruent(&k, &kappa, CONGRUENCE_TOL).unwrap());
        let xi = parameter(&mut r, model.dim());
        let v = vector(&mut r, model.dim(), 1.0);
        for order in [1.0, 1.5, 2.0, 3.0, 4.0] {
            let scale = model.k_norm_pow(&xi, &v, order).unwrap().max(1.0);
            prop_assert!(information_loss(&model, &k, &xi, &v, order).unwrap().abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn zero_loss_does_not_depend_on_k(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (model, kappa) = statistic_instance(&mut r);
        let k = kappa.kernel();
        let xi = parameter(&mut r, model.dim());
        let v = vector(&mut r, model.dim(), 1.0);
        let l2 = relative_loss(&model, &k, &xi, &v, 2.0);
        let l3 = relative_loss(&model, &k, &xi, &v, 3.0);
        if l2 <= 1e-10 {
            prop_assert!(l3 <= 1e-8, "{} then {}", l2, l3);
        }
        if l3 <= 1e-10 {
            prop_assert!(l2 <= 1e-8, "{} then {}", l3, l2);
        }
    }

    #[test]
    fn sufficiency_matches_the_equality_condition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let built = r.random_bool(0.5);
        let (model, kappa) = if built { factorized_model(&mut r, 8) } else { statistic_instance(&mut r) };
        let k = kappa.kernel();
        let induced = induced_model(&model, &k).unwrap();
        for _ in 0..3 {
            let xi = parameter(&mut r, model.dim());
            let mass = model.evaluate(&xi).unwrap();
            let mut equality = true;
            for v in basis(model.dim()) {
                equality &= equality_direction_check(&model, &kappa, &xi, &v).unwrap();
                // for a statistic the k = 2 loss is the squared distance of the
                // score from its pulled-back conditional mean
                let l = model.log_derivative(&xi, &v).unwrap();
                let pulled = kappa.pullback(&induced.log_derivative(&xi, &v).unwrap());
                let distance: f64 = mass.masses().iter().zip(l.iter().zip(&pulled)).map(|(m, (a, b))| m * (a - b).powi(2)).sum();
                let loss = information_loss(&model, &k, &xi, &v, 2.0).unwrap();
                let scale = model.k_norm_pow(&xi, &v, 2.0).unwrap();
                prop_assert!((loss - distance).abs() <= 1e-9 * scale + 1e-300, "{} vs {}", loss, distance);
            }
            // an absolute tolerance would call tiny scores sufficient
            let scale = basis(model.dim())
                .iter()
                .map(|v| model.k_norm_pow(&xi, v, 2.0).unwrap())
                .fold(0.0, f64::max);
            let tol = 1e-10 * scale.min(1.0);
            let verdict = is_sufficient(&model, &k, std::slice::from_ref(&xi), 2.0, tol).unwrap().sufficient;
            if built {
                prop_assert!(verdict && equality, "ξ = {:?}", xi);
            }
            if equality {
                prop_assert!(verdict, "ξ = {:?}", xi);
            }
        }
    }

    #[test]
    fn factorizable_implies_sufficient(seed in any::<u64>()) {
        let mut r = rng(seed);
        let built = r.random_bool(0.5);
        let (model, kappa) = if built { factorized_model(&mut r, 8) } else { statistic_instance(&mut r) };
        let grid: Vec<Vec<f64>> = (0..5).map(|_| parameter(&mut r, model.dim())).collect();
        let fact = fisher_neyman_check(&model, &kappa, &grid).unwrap();
        if built {
            prop_assert_eq!(fact.status, FactorizationStatus::Factorizable);
        }
        if fact.status == FactorizationStatus::Factorizable {
            prop_assert!(is_sufficient(&model, &kappa.kernel(), &grid, 2.0, 1e-10).unwrap().sufficient);
        }
    }
}

#[test]
fn sufficiency_without_factorization() {
    let (model, kappa) = ex_suff(20, 10).unwrap();
    let grid: Vec<Vec<f64>> = (-10..=10).map(|i| vec![i as f64 / 10.0]).collect();
    assert!(
        is_sufficient(&model, &kappa.kernel(), &grid, 2.0, 1e-10)
            .unwrap()
            .sufficient
    );
    let fact = fisher_neyman_check(&model, &kappa, &grid).unwrap();
    assert_eq!(fact.status, FactorizationStatus::NotFactorizable);
}
