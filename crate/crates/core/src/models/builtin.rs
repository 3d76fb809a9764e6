use std::f64::consts::PI;
use std::sync::Arc;

use super::{Density, ParameterDomain, ParametrizedMeasureModel};
use crate::error::{Error, Result};
use crate::markov::Statistic;
use crate::measures::{SampleSpace, Space};

/// Names accepted by [`builtin`]; arguments in parentheses are optional
/// except for `categorical`.
pub const BUILTIN_NAMES: &[&str] = &[
    "bernoulli",
    "categorical(n)",
    "gaussian-grid(L,N)",
    "ex4.1(N)",
    "ex-suff(NS,NT)",
];

const EX41_POINTS: usize = 20_000;
const GAUSS_HALF_WIDTH: f64 = 8.0;
const GAUSS_POINTS: usize = 400;
const SUFF_S_CELLS: usize = 200;
const SUFF_T_CELLS: usize = 100;

fn split_call(name: &str) -> Result<(&str, Vec<&str>)> {
    let name = name.trim();
    match name.find('(') {
        None => Ok((name, vec![])),
        Some(open) => {
            let inner = name[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidInput(format!("unbalanced parentheses in `{name}`")))?;
            Ok((&name[..open], inner.split(',').map(str::trim).collect()))
        }
    }
}

fn arg<T: std::str::FromStr>(name: &str, args: &[&str], i: usize, default: Option<T>) -> Result<T> {
    match args.get(i) {
        Some(a) => a
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad argument `{a}` for builtin `{name}`"))),
        None => default.ok_or_else(|| Error::InvalidInput(format!("builtin `{name}` needs an argument"))),
    }
}

/// Looks up a built-in model by name, e.g. `categorical(4)` or `ex4.1(2000)`.
pub fn builtin(name: &str) -> Result<ParametrizedMeasureModel> {
    let (base, args) = split_call(name)?;
    let max_args = match base {
        "bernoulli" => 0,
        "categorical" | "ex4.1" => 1,
        "gaussian-grid" | "ex-suff" => 2,
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown builtin model `{name}`; available: {}",
                BUILTIN_NAMES.join(", ")
            )))
        }
    };
    if args.len() > max_args {
        return Err(Error::InvalidInput(format!("too many arguments for builtin `{base}`")));
    }
    match base {
        "bernoulli" => bernoulli(),
        "categorical" => categorical(arg(base, &args, 0, None)?),
        "gaussian-grid" => gaussian_grid(
            arg(base, &args, 0, Some(GAUSS_HALF_WIDTH))?,
            arg(base, &args, 1, Some(GAUSS_POINTS))?,
        ),
        "ex4.1" => ex41(arg(base, &args, 0, Some(EX41_POINTS))?),
        _ => ex_suff(
            arg(base, &args, 0, Some(SUFF_S_CELLS))?,
            arg(base, &args, 1, Some(SUFF_T_CELLS))?,
        )
        .map(|(m, _)| m),
    }
}

#[derive(Debug)]
struct Bernoulli;

impl Density for Bernoulli {
    fn values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![xi[0], 1.0 - xi[0]])
    }

    fn partial(&self, _xi: &[f64], _j: usize) -> Option<Result<Vec<f64>>> {
        Some(Ok(vec![1.0, -1.0]))
    }

    fn describe(&self) -> String {
        "bernoulli".into()
    }
}

/// `p = (ξ, 1 - ξ)` on the atoms `"1"`, `"0"`, for `ξ ∈ (0, 1)`.
pub fn bernoulli() -> Result<ParametrizedMeasureModel> {
    let space = SampleSpace::new(vec!["1".into(), "0".into()])?.into_shared();
    Ok(ParametrizedMeasureModel::new(
        ParameterDomain::interval(0.0, 1.0)?,
        space,
        Arc::new(Bernoulli),
        true,
    ))
}

#[derive(Debug)]
struct Categorical {
    n: usize,
}

impl Categorical {
    fn probs(&self, theta: &[f64]) -> Vec<f64> {
        let top = theta.iter().fold(0.0_f64, |a, b| a.max(*b));
        let mut e: Vec<f64> = theta.iter().map(|t| (t - top).exp()).collect();
        e.push((-top).exp());
        let z: f64 = e.iter().sum();
        e.iter().map(|v| v / z).collect()
    }
}

impl Density for Categorical {
    fn values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        Ok(self.probs(xi))
    }

    fn partial(&self, xi: &[f64], j: usize) -> Option<Result<Vec<f64>>> {
        let p = self.probs(xi);
        Some(Ok((0..self.n)
            .map(|i| p[i] * (if i == j { 1.0 } else { 0.0 } - p[j]))
            .collect()))
    }

    fn describe(&self) -> String {
        format!("categorical({})", self.n)
    }
}

/// Categorical distribution on `n` atoms in softmax coordinates:
/// `p_i ∝ exp(θ_i)` for `i < n - 1` and `p_{n-1} ∝ 1`, `θ ∈ R^{n-1}`.
pub fn categorical(n: usize) -> Result<ParametrizedMeasureModel> {
    if n < 2 {
        return Err(Error::InvalidInput("categorical needs at least 2 atoms".into()));
    }
    Ok(ParametrizedMeasureModel::new(
        ParameterDomain::unbounded(n - 1)?,
        SampleSpace::indexed(n)?.into_shared(),
        Arc::new(Categorical { n }),
        true,
    ))
}

#[derive(Debug)]
struct GaussianGrid {
    x: Vec<f64>,
}

impl GaussianGrid {
    fn pdf(x: f64, m: f64, s: f64) -> f64 {
        let z = (x - m) / s;
        (-0.5 * z * z).exp() / (s * (2.0 * PI).sqrt())
    }
}

impl Density for GaussianGrid {
    fn values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        Ok(self.x.iter().map(|x| Self::pdf(*x, xi[0], xi[1])).collect())
    }

    fn partial(&self, xi: &[f64], j: usize) -> Option<Result<Vec<f64>>> {
        let (m, s) = (xi[0], xi[1]);
        Some(Ok(self
            .x
            .iter()
            .map(|x| {
                let p = Self::pdf(*x, m, s);
                let d = x - m;
                if j == 0 {
                    p * d / (s * s)
                } else {
                    p * (d * d / (s * s * s) - 1.0 / s)
                }
            })
            .collect()))
    }

    fn describe(&self) -> String {
        format!("gaussian-grid({} points)", self.x.len())
    }
}

/// Normal densities with parameters `(mean, sd)`, `sd > 0`, on a midpoint
/// grid of `n` cells over `[-half_width, half_width]`. Truncation makes the
/// total mass slightly below 1, so the model is not flagged statistical.
pub fn gaussian_grid(half_width: f64, n: usize) -> Result<ParametrizedMeasureModel> {
    let space = SampleSpace::midpoint_grid(-half_width, half_width, n)?;
    let x = space
        .coords()
        .map(|c| c.iter().map(|r| r[0]).collect())
        .unwrap_or_default();
    Ok(ParametrizedMeasureModel::new(
        ParameterDomain::new(vec![(f64::NEG_INFINITY, f64::INFINITY), (0.0, f64::INFINITY)])?,
        space.into_shared(),
        Arc::new(GaussianGrid { x }),
        false,
    ))
}

#[derive(Debug)]
struct Ex41 {
    t: Vec<f64>,
}

impl Density for Ex41 {
    fn values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let x = xi[0];
        if x == 0.0 {
            return Ok(vec![1.0; self.t.len()]);
        }
        Ok(self
            .t
            .iter()
            .map(|t| 1.0 + x * (t - 1.0 / x).sin().powi(2).powf(1.0 / (x * x)))
            .collect())
    }

    /// Pointwise `∂p/∂ξ` for `ξ ≠ 0`. At `ξ = 0` the pointwise derivative
    /// does not exist; the model is still differentiable as a measure-valued
    /// map there with derivative 0, which is what is returned.
    fn partial(&self, xi: &[f64], _j: usize) -> Option<Result<Vec<f64>>> {
        let x = xi[0];
        if x == 0.0 {
            return Some(Ok(vec![0.0; self.t.len()]));
        }
        Some(Ok(self
            .t
            .iter()
            .map(|t| {
                let u = t - 1.0 / x;
                let s = u.sin().powi(2);
                let f = s.powf(1.0 / (x * x));
                if s == 0.0 || f == 0.0 {
                    return 0.0;
                }
                let dlog = -2.0 * s.ln() / x.powi(3) + (2.0 * u).sin() / (x.powi(4) * s);
                f + x * f * dlog
            })
            .collect()))
    }

    fn describe(&self) -> String {
        format!("ex4.1({} points)", self.t.len())
    }
}

/// `p(t; ξ) = 1 + ξ (sin²(t - 1/ξ))^{1/ξ²}`, `p(t; 0) = 1`, on a midpoint grid
/// of `n` cells over `(0, π)`, for `ξ ∈ (-1, ∞)`. A measure model whose
/// density is not differentiable in `ξ` at 0 for fixed `t`.
pub fn ex41(n: usize) -> Result<ParametrizedMeasureModel> {
    let space = SampleSpace::midpoint_grid(0.0, PI, n)?;
    let t = space
        .coords()
        .map(|c| c.iter().map(|r| r[0]).collect())
        .unwrap_or_default();
    Ok(ParametrizedMeasureModel::new(
        ParameterDomain::interval(-1.0, f64::INFINITY)?,
        space.into_shared(),
        Arc::new(Ex41 { t }),
        false,
    ))
}

/// `‖p(ξ) - p(ξ₀)‖_TV / |ξ - ξ₀|` for a one-parameter model.
pub fn l1_difference_quotient(model: &ParametrizedMeasureModel, xi0: f64, xi: f64) -> Result<f64> {
    if xi == xi0 {
        return Err(Error::InvalidInput("difference quotient needs xi != xi0".into()));
    }
    let a = model.evaluate(&[xi])?;
    let b = model.evaluate(&[xi0])?;
    Ok(a.sub(&b)?.tv_norm() / (xi - xi0).abs())
}

fn h(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (-1.0 / x.abs()).exp()
    }
}

fn dh(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * h(x) / (x * x)
    }
}

#[derive(Debug)]
struct ExSuff {
    /// `(s, t)` per atom.
    points: Vec<(f64, f64)>,
}

impl ExSuff {
    fn eval(&self, value: f64, weight_t: impl Fn(f64) -> f64, neg: f64) -> Vec<f64> {
        self.points
            .iter()
            .map(|(s, t)| if *s < 0.0 { neg } else { value * weight_t(*t) })
            .collect()
    }

    fn shape(x: f64) -> impl Fn(f64) -> f64 {
        move |t| if x >= 0.0 { 1.0 } else { 2.0 * t }
    }
}

impl Density for ExSuff {
    fn values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let x = xi[0];
        Ok(self.eval(h(x), Self::shape(x), 1.0 - h(x)))
    }

    fn partial(&self, xi: &[f64], _j: usize) -> Option<Result<Vec<f64>>> {
        let x = xi[0];
        Some(Ok(self.eval(dh(x), Self::shape(x), -dh(x))))
    }

    fn describe(&self) -> String {
        "ex-suff".into()
    }
}

/// The statistical model on `(-1, 1) × (0, 1)` with density `1 - h(ξ)` for
/// `s < 0`, `h(ξ)` for `s ≥ 0, ξ ≥ 0` and `2 h(ξ) t` for `s ≥ 0, ξ < 0`,
/// where `h(ξ) = exp(-1/|ξ|)` and `h(0) = 0`; discretized by `ns × nt`
/// midpoint cells. Also returns the projection onto the `s`-grid.
pub fn ex_suff(ns: usize, nt: usize) -> Result<(ParametrizedMeasureModel, Statistic)> {
    if ns == 0 || !ns.is_multiple_of(2) || nt == 0 {
        return Err(Error::InvalidInput(
            "ex-suff needs an even positive number of s-cells and a positive number of t-cells".into(),
        ));
    }
    let s_grid: Space = SampleSpace::midpoint_grid(-1.0, 1.0, ns)?.into_shared();
    let t_grid = SampleSpace::midpoint_grid(0.0, 1.0, nt)?;
    let space: Space = s_grid.product(&t_grid)?.into_shared();
    let points = space
        .coords()
        .map(|c| c.iter().map(|r| (r[0], r[1])).collect())
        .unwrap_or_default();
    let projection = Statistic::new(space.clone(), s_grid, (0..ns * nt).map(|p| p / nt).collect())?;
    let model = ParametrizedMeasureModel::new(ParameterDomain::unbounded(1)?, space, Arc::new(ExSuff { points }), true);
    Ok((model, projection))
}
