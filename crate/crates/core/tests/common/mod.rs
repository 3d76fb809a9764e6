//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use igk_core::markov::{MarkovKernel, Statistic};
use igk_core::measures::{Measure, PowerMeasure, SampleSpace, Space};
use igk_core::models::{DslDensity, ParameterDomain, ParametrizedMeasureModel};
use igk_dsl::random::random_smooth_expr;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(n: usize) -> Space {
    SampleSpace::indexed(n).unwrap().into_shared()
}

/// A space of `n` atoms with one coordinate in `[-1, 1]` and, half of the
/// time, non-unit weights.
pub fn coord_space(rng: &mut ChaCha8Rng, n: usize) -> Space {
    let coords = (0..n).map(|_| vec![rng.random_range(-1.0..=1.0)]).collect();
    let weights = rng
        .random_bool(0.5)
        .then(|| (0..n).map(|_| rng.random_range(0.5..2.0)).collect());
    SampleSpace::with_parts((0..n).map(|i| format!("w{i}")).collect(), Some(coords), weights)
        .unwrap()
        .into_shared()
}

/// Nonnegative masses; with `zeros`, about a quarter of the atoms are null.
pub fn measure(rng: &mut ChaCha8Rng, space: &Space, zeros: bool) -> Measure {
    let mass = (0..space.len())
        .map(|_| {
            if zeros && rng.random_bool(0.25) {
                0.0
            } else {
                rng.random_range(0.05..2.0)
            }
        })
        .collect();
    Measure::new(space.clone(), mass).unwrap()
}

pub fn vector(rng: &mut ChaCha8Rng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-half_width..=half_width)).collect()
}

/// A random row-stochastic matrix; with `sparse`, entries vanish with
/// probability 0.4 (each row keeps at least one).
pub fn kernel(rng: &mut ChaCha8Rng, source: &Space, target: &Space, sparse: bool) -> MarkovKernel {
    let m = target.len();
    let rows = (0..source.len())
        .map(|_| {
            let mut row: Vec<f64> = (0..m)
                .map(|_| {
                    if sparse && rng.random_bool(0.4) {
                        0.0
                    } else {
                        rng.random_range(0.0..1.0)
                    }
                })
                .collect();
            if row.iter().all(|v| *v == 0.0) {
                row[rng.random_range(0..m)] = 1.0;
            }
            let s: f64 = row.iter().sum();
            row.iter().map(|v| v / s).collect()
        })
        .collect();
    MarkovKernel::new(source.clone(), target.clone(), rows).unwrap()
}

pub fn statistic(rng: &mut ChaCha8Rng, source: &Space, target: &Space) -> Statistic {
    let map = (0..source.len()).map(|_| rng.random_range(0..target.len())).collect();
    Statistic::new(source.clone(), target.clone(), map).unwrap()
}

/// A statistic hitting every target atom; needs `source.len() >= target.len()`.
pub fn surjection(rng: &mut ChaCha8Rng, source: &Space, target: &Space) -> Statistic {
    let (n, m) = (source.len(), target.len());
    assert!(n >= m);
    let mut map: Vec<usize> = (0..n).map(|i| if i < m { i } else { rng.random_range(0..m) }).collect();
    for i in (1..n).rev() {
        map.swap(i, rng.random_range(0..=i));
    }
    Statistic::new(source.clone(), target.clone(), map).unwrap()
}

/// Either a dense kernel, a sparse kernel or a statistic.
pub fn any_kernel(rng: &mut ChaCha8Rng, source: &Space, target: &Space) -> MarkovKernel {
    match rng.random_range(0..3) {
        0 => kernel(rng, source, target, false),
        1 => kernel(rng, source, target, true),
        _ => statistic(rng, source, target).kernel(),
    }
}

/// An element of `S^r` with exponent in `[0.1, 0.9]` and coefficients of
/// modulus in `[0.5, 2]` and random sign.
pub fn power_measure(rng: &mut ChaCha8Rng, space: &Space, r: f64) -> PowerMeasure {
    let coeff = (0..space.len())
        .map(|_| {
            let m = rng.random_range(0.5..2.0);
            if rng.random_bool(0.5) {
                m
            } else {
                -m
            }
        })
        .collect();
    PowerMeasure::new(space.clone(), r, coeff).unwrap()
}

/// A model with strictly positive density `exp(sin(E))` or `2 + cos(E)`,
/// `E` a random smooth expression, on at most `max_atoms` atoms with
/// coordinates in `[-1, 1]` and parameters in `(-1, 1)^d`, `d ≤ 3`.
pub fn positive_model(rng: &mut ChaCha8Rng, max_atoms: usize) -> ParametrizedMeasureModel {
    let n = rng.random_range(1..=max_atoms);
    let d = rng.random_range(1..=3);
    let sp = coord_space(rng, n);
    let e = random_smooth_expr(rng, 3, 1, d);
    let text = if rng.random_bool(0.5) {
        format!("exp(sin({e}))")
    } else {
        format!("2 + cos({e})")
    };
    let domain = ParameterDomain::new(vec![(-1.0, 1.0); d]).unwrap();
    let density = DslDensity::new(&sp, d, &text, None).unwrap();
    ParametrizedMeasureModel::new(domain, sp, Arc::new(density), false)
}

/// A point strictly inside `(-1, 1)^d`.
pub fn parameter(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    vector(rng, d, 0.95)
}

/// A random statistic `κ` onto at most 4 atoms together with a positive model
/// of the form `p(ξ) = p′(κ(·); ξ) μ₀`, so that `κ` is sufficient.
pub fn factorized_model(rng: &mut ChaCha8Rng, max_atoms: usize) -> (ParametrizedMeasureModel, Statistic) {
    let n = rng.random_range(1..=max_atoms);
    let m = rng.random_range(1..=n.min(4));
    let d = rng.random_range(1..=3);
    let map: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
    // the coordinate encodes κ, the weights carry μ₀
    let coords = map
        .iter()
        .map(|j| vec![2.0 * (*j as f64 + 0.5) / m as f64 - 1.0])
        .collect();
    let weights = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
    let sp = SampleSpace::with_parts((0..n).map(|i| format!("w{i}")).collect(), Some(coords), Some(weights))
        .unwrap()
        .into_shared();
    let kappa = Statistic::new(sp.clone(), space(m), map).unwrap();
    let e = random_smooth_expr(rng, 3, 1, d);
    let domain = ParameterDomain::new(vec![(-1.0, 1.0); d]).unwrap();
    let density = DslDensity::new(&sp, d, &format!("exp(sin({e}))"), None).unwrap();
    (
        ParametrizedMeasureModel::new(domain, sp, Arc::new(density), false),
        kappa,
    )
}
