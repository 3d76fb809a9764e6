use std::fs;

use igk_core::markov::{MarkovKernel, Statistic};
use igk_core::measures::{SampleSpace, Space};
use igk_core::models::{builtin, ModelSpec, ParametrizedMeasureModel};
use serde::de::DeserializeOwned;

use crate::args::{Directions, Points};
use crate::error::{invalid, CliError, CliResult};

const BUILTIN_PREFIX: &str = "builtin:";

pub fn read_text(path: &str) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read `{path}`: {e}")))
}

pub fn read_json<T: DeserializeOwned>(path: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| invalid(format!("{what} file `{path}`: {e}")))
}

pub fn load_model(arg: &str) -> CliResult<ParametrizedMeasureModel> {
    match arg.strip_prefix(BUILTIN_PREFIX) {
        Some(name) => Ok(builtin(name)?),
        None => Ok(ModelSpec::from_json(&read_text(arg)?)?.build()?),
    }
}

/// Groups atoms by their first coordinate; targets are sorted by value.
fn project_first(source: &Space) -> CliResult<Statistic> {
    let coords = source
        .coords()
        .ok_or_else(|| invalid("builtin:project-first needs a sample space with coordinates"))?;
    let mut values: Vec<f64> = coords.iter().map(|c| c[0]).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let target = SampleSpace::with_parts(
        values.iter().map(|v| format!("{v:?}")).collect(),
        Some(values.iter().map(|v| vec![*v]).collect()),
        None,
    )?;
    let map = coords
        .iter()
        .map(|c| values.binary_search_by(|v| v.total_cmp(&c[0])).unwrap_or_default())
        .collect();
    Ok(Statistic::new(source.clone(), target.into_shared(), map)?)
}

fn builtin_statistic(name: &str, source: &Space) -> CliResult<Statistic> {
    match name {
        "identity" => Ok(Statistic::identity(source.clone())),
        "collapse" => {
            let target = SampleSpace::new(vec!["*".into()])?.into_shared();
            Ok(Statistic::new(source.clone(), target, vec![0; source.len()])?)
        }
        "project-first" => project_first(source),
        other => Err(invalid(format!(
            "unknown builtin kernel `{other}`; available: identity, collapse, project-first"
        ))),
    }
}

/// A statistic from a builtin name or a statistic JSON file.
pub fn load_statistic(arg: &str, source: &Space) -> CliResult<Statistic> {
    match arg.strip_prefix(BUILTIN_PREFIX) {
        Some(name) => builtin_statistic(name, source),
        None => read_json(arg, "statistic"),
    }
}

/// A kernel from a builtin name, or a JSON file holding either a kernel
/// (`rows`) or a statistic (`map`).
pub fn load_kernel(arg: &str, source: Option<&Space>) -> CliResult<MarkovKernel> {
    if let Some(name) = arg.strip_prefix(BUILTIN_PREFIX) {
        let source = source.ok_or_else(|| invalid("builtin kernels need a model or measure to act on"))?;
        return Ok(builtin_statistic(name, source)?.kernel());
    }
    let value: serde_json::Value = read_json(arg, "kernel")?;
    let parsed = if value.get("map").is_some() {
        serde_json::from_value::<Statistic>(value).map(|s| s.kernel())
    } else {
        serde_json::from_value::<MarkovKernel>(value)
    };
    parsed.map_err(|e| invalid(format!("kernel file `{arg}`: {e}")))
}

pub fn parse_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| invalid(format!("{what}: `{t}` is not a finite number")))
        })
        .collect()
}

pub fn parse_point(text: &str, dim: usize, what: &str) -> CliResult<Vec<f64>> {
    let p = parse_list(text, what)?;
    if p.len() != dim {
        return Err(invalid(format!(
            "{what} `{text}` has {} components, expected {dim}",
            p.len()
        )));
    }
    Ok(p)
}

/// `a:b:n`, n evenly spaced values from `a` to `b` inclusive.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || invalid(format!("grid `{text}` is not of the form a:b:n with n >= 1"));
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let (a, b): (f64, f64) = (
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    );
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// The listed points followed by the grid points (a Cartesian product over
/// the `dim` coordinates).
pub fn points(p: &Points, dim: usize) -> CliResult<Vec<Vec<f64>>> {
    let mut out =
        p.xi.iter()
            .map(|t| parse_point(t, dim, "--xi"))
            .collect::<CliResult<Vec<_>>>()?;
    if let Some(g) = &p.xi_grid {
        let axis = parse_grid(g)?;
        let mut grid: Vec<Vec<f64>> = vec![vec![]];
        for _ in 0..dim {
            grid = grid
                .into_iter()
                .flat_map(|head| {
                    axis.iter().map(move |v| {
                        let mut p = head.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect();
        }
        out.extend(grid);
    }
    if out.is_empty() {
        return Err(invalid("give at least one parameter point with --xi or --xi-grid"));
    }
    Ok(out)
}

pub fn directions(d: &Directions, dim: usize) -> CliResult<Vec<Vec<f64>>> {
    if d.direction.is_empty() {
        return Ok((0..dim)
            .map(|j| (0..dim).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect());
    }
    d.direction.iter().map(|t| parse_point(t, dim, "--direction")).collect()
}

pub fn orders(text: &str) -> CliResult<Vec<f64>> {
    let ks = parse_list(text, "--k")?;
    if let Some(k) = ks.iter().find(|k| **k < 1.0) {
        return Err(invalid(format!("order k = {k} is below 1")));
    }
    Ok(ks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("-1:1:5").unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.3:7:1").unwrap(), vec![0.3]);
        for bad in ["1:2", "1:2:0", "a:2:3", "1:2:3:4", "1:inf:2"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn point_sets() {
        let p = Points {
            xi: vec!["0.5,0.25".into()],
            xi_grid: Some("0:1:2".into()),
        };
        let got = points(&p, 2).unwrap();
        assert_eq!(
            got,
            vec![
                vec![0.5, 0.25],
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0]
            ]
        );
        assert!(points(
            &Points {
                xi: vec![],
                xi_grid: None
            },
            1
        )
        .is_err());
        assert!(points(
            &Points {
                xi: vec!["1".into()],
                xi_grid: None
            },
            2
        )
        .is_err());
        assert!(orders("1,2.5").is_ok());
        assert!(orders("0.5").is_err());
    }

    #[test]
    fn project_first_groups_by_first_coordinate() {
        let space = SampleSpace::with_parts(
            vec!["a".into(), "b".into(), "c".into()],
            Some(vec![vec![0.5, 1.0], vec![-1.0, 2.0], vec![0.5, 3.0]]),
            None,
        )
        .unwrap()
        .into_shared();
        let s = project_first(&space).unwrap();
        assert_eq!(s.map(), &[1, 0, 1]);
        assert_eq!(s.target().labels(), &["-1.0".to_string(), "0.5".to_string()]);
        assert!(project_first(&SampleSpace::indexed(2).unwrap().into_shared()).is_err());
    }
}
