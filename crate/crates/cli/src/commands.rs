use std::f64::consts::PI;

use igk_core::infoloss::{fisher_neyman_check, is_sufficient, loss_report, FactorizationStatus, LossReport};
use igk_core::markov::{compose, decompose_kernel, is_congruent, CONGRUENCE_TOL};
use igk_core::measures::{Measure, SignedMeasure};
use igk_core::models::{bernoulli, ex41, ex_suff, l1_difference_quotient};
use igk_core::Error;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{
    DecomposeArgs, Example, ExampleArgs, FactorizeArgs, InfolossArgs, IntegrabilityArgs, PushforwardArgs,
    SufficientArgs, TensorArgs,
};
use crate::error::{invalid, CliError, CliResult};
use crate::input::{
    directions, load_kernel, load_model, load_statistic, orders, parse_grid, parse_list, parse_point, points, read_json,
};
use crate::sweep;

/// A subcommand's findings: JSON fields merged into the report, and the
/// CSV table when the command has one.
pub struct Outcome {
    pub fields: Map<String, Value>,
    pub csv: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn fields(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("reports are JSON objects"),
    }
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn csv_table(header: &[String], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn strings(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Loss tables for several orders share one header.
fn merged_loss_csv(reports: &[LossReport]) -> CliResult<String> {
    let mut out = String::new();
    for (i, r) in reports.iter().enumerate() {
        let table = r.to_csv()?;
        if i == 0 {
            out.push_str(&table);
        } else {
            out.extend(table.lines().skip(1).map(|l| format!("{l}\n")));
        }
    }
    Ok(out)
}

pub fn tensor(a: &TensorArgs) -> CliResult<Outcome> {
    let model = load_model(&a.model)?;
    let d = model.dim();
    let xi = parse_point(&a.xi, d, "--xi")?;
    if a.order == 0 {
        return Err(invalid("tensor order must be at least 1"));
    }
    let mut out = Map::new();
    out.insert("model".into(), json!(model.describe()));
    out.insert("xi".into(), json!(xi));
    if !a.directions.direction.is_empty() {
        let dirs = directions(&a.directions, d)?;
        if dirs.len() != a.order {
            return Err(invalid(format!(
                "an order-{} tensor takes {} directions, got {}",
                a.order,
                a.order,
                dirs.len()
            )));
        }
        let value = model.tau_n(&xi, &dirs)?;
        out.insert("directions".into(), json!(dirs));
        out.insert("tau".into(), json!(value));
        let csv = csv_table(&strings(&["order", "tau"]), &[vec![a.order.to_string(), num(value)]])?;
        return Ok(Outcome {
            fields: out,
            csv: Some(csv),
        });
    }
    let t = model.tensor(&xi, a.order)?;
    let key = match a.order {
        2 => "fisher",
        3 => "amari_chentsov",
        _ => "tensor",
    };
    out.insert("order".into(), json!(a.order));
    out.insert(key.into(), to_value(&t));
    let mut header: Vec<String> = (1..=a.order).map(|i| format!("i{i}")).collect();
    header.push("value".into());
    let rows: Vec<Vec<String>> = t
        .values()
        .iter()
        .enumerate()
        .map(|(flat, v)| {
            let mut idx = vec![0; a.order];
            let mut rest = flat;
            for slot in idx.iter_mut().rev() {
                *slot = rest % d;
                rest /= d;
            }
            let mut row: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            row.push(num(*v));
            row
        })
        .collect();
    Ok(Outcome {
        fields: out,
        csv: Some(csv_table(&header, &rows)?),
    })
}

pub fn pushforward(a: &PushforwardArgs) -> CliResult<Outcome> {
    let mu: Measure = match (&a.measure, &a.model) {
        (Some(path), None) => read_json(path, "measure")?,
        (None, Some(arg)) => {
            let model = load_model(arg)?;
            let xi = parse_point(a.xi.as_deref().unwrap_or_default(), model.dim(), "--xi")?;
            model.evaluate(&xi)?
        }
        _ => return Err(invalid("give exactly one of --measure and --model")),
    };
    let kernel = load_kernel(&a.kernel, Some(mu.space()))?;
    let pushed = kernel.pushforward_measure(&mu)?;
    let mut out = Map::new();
    out.insert("measure".into(), to_value(&pushed));
    let labels = pushed.space().labels().to_vec();
    let mut header = strings(&["atom", "mass"]);
    let mut columns = vec![pushed.masses().to_vec()];
    if let Some(path) = &a.signed {
        let nu: SignedMeasure = read_json(path, "signed measure")?;
        let image = kernel.pushforward(&nu)?;
        let bound = a.common.dom_tol * image.tv_norm();
        let mut cleaned = image.masses().to_vec();
        for (i, (m, v)) in pushed.masses().iter().zip(image.masses()).enumerate() {
            if *m == 0.0 {
                if v.abs() > bound {
                    return Err(Error::Domination { atom: i, mass: *v }.into());
                }
                cleaned[i] = 0.0;
            }
        }
        let density = pushed.radon_nikodym(&SignedMeasure::new(image.space().clone(), cleaned)?)?;
        out.insert("signed".into(), to_value(&image));
        out.insert("density".into(), json!(density));
        header.extend(strings(&["signed", "density"]));
        columns.push(image.masses().to_vec());
        columns.push(density);
    }
    let rows: Vec<Vec<String>> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            std::iter::once(l.clone())
                .chain(columns.iter().map(|c| num(c[i])))
                .collect()
        })
        .collect();
    Ok(Outcome {
        fields: out,
        csv: Some(csv_table(&header, &rows)?),
    })
}

/// Losses within this bound below zero count as rounding.
pub const NONNEGATIVITY_TOL: f64 = 1e-10;

pub fn infoloss(a: &InfolossArgs) -> CliResult<Outcome> {
    let ks = orders(&a.k)?;
    if let Some(n) = a.random {
        return sweep::run(n, a.seed, &ks);
    }
    let (Some(m), Some(k)) = (&a.model, &a.kernel) else {
        return Err(invalid("give --model and --kernel, or --random N"));
    };
    let model = load_model(m)?;
    let kernel = load_kernel(k, Some(model.space()))?;
    let grid = points(&a.points, model.dim())?;
    let dirs = directions(&a.directions, model.dim())?;
    let reports = ks
        .par_iter()
        .map(|k| loss_report(&model, &kernel, &grid, &dirs, *k))
        .collect::<Result<Vec<_>, _>>()?;
    let max_loss = reports.iter().map(|r| r.max_loss).fold(f64::NEG_INFINITY, f64::max);
    let min_loss = reports
        .iter()
        .flat_map(|r| r.entries.iter().map(|e| e.loss))
        .fold(f64::INFINITY, f64::min);
    let mut out = Map::new();
    out.insert("model".into(), json!(model.describe()));
    out.insert("reports".into(), to_value(&reports));
    out.insert("max_loss".into(), json!(max_loss));
    out.insert("min_loss".into(), json!(min_loss));
    out.insert("nonnegative".into(), json!(min_loss >= -NONNEGATIVITY_TOL));
    Ok(Outcome {
        fields: out,
        csv: Some(merged_loss_csv(&reports)?),
    })
}

pub fn sufficient(a: &SufficientArgs) -> CliResult<Outcome> {
    let model = load_model(&a.model)?;
    let kernel = load_kernel(&a.kernel, Some(model.space()))?;
    let grid = points(&a.points, model.dim())?;
    let rep = is_sufficient(&model, &kernel, &grid, a.k, a.tol)?;
    let csv = rep.report.to_csv()?;
    let mut out = Map::new();
    out.insert("model".into(), json!(model.describe()));
    out.insert(
        "verdict".into(),
        json!(if rep.sufficient { "sufficient" } else { "not-sufficient" }),
    );
    out.insert("sufficiency".into(), to_value(&rep));
    Ok(Outcome {
        fields: out,
        csv: Some(csv),
    })
}

pub fn factorize(a: &FactorizeArgs) -> CliResult<Outcome> {
    let model = load_model(&a.model)?;
    let kappa = load_statistic(&a.statistic, model.space())?;
    let grid = points(&a.points, model.dim())?;
    let res = fisher_neyman_check(&model, &kappa, &grid)?;
    let rows: Vec<Vec<String>> = res
        .runs
        .iter()
        .enumerate()
        .flat_map(|(r, run)| {
            run.measure
                .iter()
                .enumerate()
                .map(move |(i, m)| vec![r.to_string(), i.to_string(), m.map(num).unwrap_or_default()])
        })
        .collect();
    let mut out = Map::new();
    out.insert("model".into(), json!(model.describe()));
    out.insert("factorization".into(), to_value(&res));
    Ok(Outcome {
        fields: out,
        csv: Some(csv_table(&strings(&["run", "atom", "measure"]), &rows)?),
    })
}

pub fn decompose(a: &DecomposeArgs) -> CliResult<Outcome> {
    let k = load_kernel(&a.kernel, None)?;
    let (cong, k1, k2) = decompose_kernel(&k)?;
    let back = compose(&k2.kernel(), &cong)?;
    let err = back
        .rows()
        .iter()
        .flatten()
        .zip(k.rows().iter().flatten())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
    let mut out = Map::new();
    out.insert("congruent_kernel".into(), to_value(&cong));
    out.insert("kappa1".into(), to_value(&k1));
    out.insert("kappa2".into(), to_value(&k2));
    out.insert("is_congruent".into(), json!(is_congruent(&cong, &k1, CONGRUENCE_TOL)?));
    out.insert("max_reconstruction_error".into(), json!(err));
    Ok(Outcome {
        fields: out,
        csv: Some(cong.to_csv()?),
    })
}

pub fn integrability(a: &IntegrabilityArgs) -> CliResult<Outcome> {
    let model = load_model(&a.model)?;
    let grid = points(&a.points, model.dim())?;
    let dirs = directions(&a.directions, model.dim())?;
    let rep = model.check_k_integrability(&grid, &dirs, a.k, a.tol)?;
    let d = model.dim();
    let mut header: Vec<String> = (1..=d).map(|j| format!("xi{j}")).collect();
    header.extend(strings(&["direction", "norm"]));
    let rows: Vec<Vec<String>> = rep
        .grid
        .iter()
        .zip(&rep.norms)
        .flat_map(|(xi, norms)| {
            norms.iter().enumerate().map(move |(v, n)| {
                let mut row: Vec<String> = xi.iter().map(|x| num(*x)).collect();
                row.push(v.to_string());
                row.push(num(*n));
                row
            })
        })
        .collect();
    let mut out = Map::new();
    out.insert("model".into(), json!(model.describe()));
    out.insert("integrability".into(), to_value(&rep));
    Ok(Outcome {
        fields: out,
        csv: Some(csv_table(&header, &rows)?),
    })
}

/// The quotient in closed form, `π C(2a, a) / 4^a`, when `a = 1/ξ²` is an integer.
fn ex41_closed_form(xi: f64) -> Option<f64> {
    let a = 1.0 / (xi * xi);
    let n = a.round();
    if (a - n).abs() > 1e-9 || n < 1.0 {
        return None;
    }
    let n = n as u64;
    Some(PI * (0..n).fold(1.0, |acc, i| acc * (2 * n - i) as f64 / ((n - i) as f64 * 4.0)))
}

pub fn example(a: &ExampleArgs) -> CliResult<Outcome> {
    match a.example {
        Example::Ex41 => {
            let xis = parse_list(a.xi.as_deref().unwrap_or("1,0.5,0.3,0.2"), "--xi")?;
            let model = ex41(a.grid_points)?;
            let q = xis
                .par_iter()
                .map(|x| l1_difference_quotient(&model, 0.0, *x))
                .collect::<Result<Vec<_>, _>>()?;
            let decreasing = q.windows(2).all(|w| w[1] < w[0]);
            let rows: Vec<Value> = xis
                .iter()
                .zip(&q)
                .map(|(x, v)| json!({"xi": x, "quotient": v, "closed_form": ex41_closed_form(*x)}))
                .collect();
            let csv_rows: Vec<Vec<String>> = xis
                .iter()
                .zip(&q)
                .map(|(x, v)| vec![num(*x), num(*v), ex41_closed_form(*x).map(num).unwrap_or_default()])
                .collect();
            let mut out = Map::new();
            out.insert("rows".into(), Value::Array(rows));
            out.insert("decreasing".into(), json!(decreasing));
            out.insert("value_at_one".into(), json!(PI / 2.0));
            Ok(Outcome {
                fields: out,
                csv: Some(csv_table(&strings(&["xi", "quotient", "closed_form"]), &csv_rows)?),
            })
        }
        Example::ExSuff => {
            let grid: Vec<Vec<f64>> = parse_grid(a.xi_grid.as_deref().unwrap_or("-1:1:5"))?
                .into_iter()
                .map(|x| vec![x])
                .collect();
            let ks = orders(&a.k)?;
            let (model, kappa) = ex_suff(a.s_cells, a.t_cells)?;
            let kernel = kappa.kernel();
            let reports = ks
                .par_iter()
                .map(|k| loss_report(&model, &kernel, &grid, &[vec![1.0]], *k))
                .collect::<Result<Vec<_>, _>>()?;
            let sufficient = reports.iter().all(|r| r.max_loss <= a.tol);
            let fact = fisher_neyman_check(&model, &kappa, &grid)?;
            let mut out = Map::new();
            out.insert("reports".into(), to_value(&reports));
            out.insert(
                "verdict".into(),
                json!(if sufficient { "sufficient" } else { "not-sufficient" }),
            );
            out.insert(
                "factorizable".into(),
                json!(fact.status == FactorizationStatus::Factorizable),
            );
            out.insert("factorization".into(), to_value(&fact));
            Ok(Outcome {
                fields: out,
                csv: Some(merged_loss_csv(&reports)?),
            })
        }
        Example::Bernoulli => {
            let xis = parse_list(a.xi.as_deref().unwrap_or("0.1,0.25,0.5"), "--xi")?;
            let model = bernoulli()?;
            let mut rows = Vec::new();
            let mut csv_rows = Vec::new();
            for x in &xis {
                let g = model.fisher_metric(&[*x])?.get(&[0, 0]);
                let exact = 1.0 / (x * (1.0 - x));
                rows.push(json!({"xi": x, "fisher": g, "closed_form": exact, "abs_error": (g - exact).abs()}));
                csv_rows.push(vec![num(*x), num(g), num(exact)]);
            }
            let mut out = Map::new();
            out.insert("rows".into(), Value::Array(rows));
            Ok(Outcome {
                fields: out,
                csv: Some(csv_table(&strings(&["xi", "fisher", "closed_form"]), &csv_rows)?),
            })
        }
    }
}

pub fn config_of<T: Serialize>(args: &T) -> Map<String, Value> {
    fields(to_value(args))
}
