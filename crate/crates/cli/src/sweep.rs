//! Seeded random information-loss sweeps.

use std::sync::Arc;

use igk_core::infoloss::information_loss;
use igk_core::markov::{MarkovKernel, Statistic};
use igk_core::measures::SampleSpace;
use igk_core::models::{DslDensity, ParameterDomain, ParametrizedMeasureModel};
use igk_dsl::random::random_smooth_expr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map};

use crate::commands::{csv_table, Outcome, NONNEGATIVITY_TOL};
use crate::error::CliResult;

const MAX_ATOMS: usize = 8;
const MAX_TARGET_ATOMS: usize = 6;
const MAX_DIM: usize = 3;

#[derive(Debug, Serialize)]
struct OrderLoss {
    k: f64,
    loss: f64,
}

#[derive(Debug, Serialize)]
struct Instance {
    index: usize,
    seed: u64,
    atoms: usize,
    target_atoms: usize,
    kernel_kind: &'static str,
    density: String,
    xi: Vec<f64>,
    direction: Vec<f64>,
    losses: Vec<OrderLoss>,
}

fn model(rng: &mut ChaCha8Rng) -> CliResult<ParametrizedMeasureModel> {
    let n = rng.random_range(1..=MAX_ATOMS);
    let d = rng.random_range(1..=MAX_DIM);
    let coords = (0..n).map(|_| vec![rng.random_range(-1.0..=1.0)]).collect();
    let space = SampleSpace::with_parts((0..n).map(|i| i.to_string()).collect(), Some(coords), None)?;
    // exp∘sin keeps the density positive and bounded
    let text = format!("exp(sin({}))", random_smooth_expr(rng, 3, 1, d));
    let density = DslDensity::new(&space, d, &text, None)?;
    let domain = ParameterDomain::new(vec![(-1.0, 1.0); d])?;
    Ok(ParametrizedMeasureModel::new(
        domain,
        space.into_shared(),
        Arc::new(density),
        false,
    ))
}

fn kernel(rng: &mut ChaCha8Rng, model: &ParametrizedMeasureModel) -> CliResult<(MarkovKernel, &'static str)> {
    let m = rng.random_range(1..=MAX_TARGET_ATOMS);
    let target = SampleSpace::indexed(m)?.into_shared();
    let source = model.space().clone();
    if rng.random_bool(0.5) {
        let map = (0..source.len()).map(|_| rng.random_range(0..m)).collect();
        return Ok((Statistic::new(source, target, map)?.kernel(), "statistic"));
    }
    let rows = (0..source.len())
        .map(|_| {
            let row: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
            let s: f64 = row.iter().sum();
            row.iter().map(|v| v / s).collect()
        })
        .collect();
    Ok((MarkovKernel::new(source, target, rows)?, "kernel"))
}

fn instance(index: usize, seed: u64, ks: &[f64]) -> CliResult<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = model(&mut rng)?;
    let (kernel, kernel_kind) = kernel(&mut rng, &model)?;
    let d = model.dim();
    let xi: Vec<f64> = (0..d).map(|_| rng.random_range(-0.95..=0.95)).collect();
    let direction: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let losses = ks
        .iter()
        .map(|k| {
            Ok(OrderLoss {
                k: *k,
                loss: information_loss(&model, &kernel, &xi, &direction, *k)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Instance {
        index,
        seed,
        atoms: model.space().len(),
        target_atoms: kernel.target().len(),
        kernel_kind,
        density: model.describe(),
        xi,
        direction,
        losses,
    })
}

/// `n` instances; instance seeds are drawn from the master seed so the
/// output does not depend on the evaluation order.
pub fn run(n: usize, seed: u64, ks: &[f64]) -> CliResult<Outcome> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..n).map(|_| master.random()).collect();
    let instances = seeds
        .par_iter()
        .enumerate()
        .map(|(i, s)| instance(i, *s, ks))
        .collect::<CliResult<Vec<_>>>()?;
    let all = || instances.iter().flat_map(|inst| inst.losses.iter().map(|l| l.loss));
    let min_loss = all().fold(f64::INFINITY, f64::min);
    let violations = all().filter(|l| *l < -NONNEGATIVITY_TOL).count();
    let rows: Vec<Vec<String>> = instances
        .iter()
        .flat_map(|inst| {
            inst.losses.iter().map(move |l| {
                vec![
                    inst.index.to_string(),
                    inst.atoms.to_string(),
                    inst.target_atoms.to_string(),
                    inst.kernel_kind.to_string(),
                    format!("{:?}", l.k),
                    format!("{:?}", l.loss),
                ]
            })
        })
        .collect();
    let header: Vec<String> = ["index", "atoms", "target_atoms", "kernel_kind", "k", "loss"]
        .map(String::from)
        .to_vec();
    let mut out = Map::new();
    out.insert("instances".into(), json!(instances));
    out.insert("min_loss".into(), json!(if n == 0 { None } else { Some(min_loss) }));
    out.insert("violations".into(), json!(violations));
    out.insert("nonnegative".into(), json!(violations == 0));
    Ok(Outcome {
        fields: out,
        csv: Some(csv_table(&header, &rows)?),
    })
}
