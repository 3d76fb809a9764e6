//! Parametrized measure models `ξ ↦ p(ξ)` on finite sample spaces.
//!
//! A model pairs an open parameter box with a [`Density`]: per-atom values
//! `p_i(ξ)` against the base weights of the space, so that the model measure
//! has masses `p_i(ξ) w_i`. Derivatives come from the density when it knows
//! them and from finite differences otherwise.

mod builtin;
mod definition;
mod dsl_density;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::MarkovKernel;
use crate::measures::{ensure_same, lk_norm, lk_norm_pow, Measure, PowerMeasure, SignedMeasure, Space};

pub use builtin::{
    bernoulli, builtin, categorical, ex41, ex_suff, gaussian_grid, l1_difference_quotient, BUILTIN_NAMES,
};
pub use definition::{DensitySpec, DomainSpec, GridSpec, ModelSpec, SpaceSpec};
pub use dsl_density::DslDensity;

/// Tolerance on the total mass of a statistical model.
pub const STATISTICAL_TOL: f64 = 1e-10;

/// Relative tolerance for a nonzero derivative on an atom of zero density.
pub const DOMINATION_TOL: f64 = 1e-10;

/// Per-atom density values and, optionally, their exact partial derivatives.
pub trait Density: Send + Sync + fmt::Debug {
    /// Densities `p_i(ξ)` against the base weights, one per atom.
    fn values(&self, xi: &[f64]) -> Result<Vec<f64>>;

    /// `∂p_i/∂ξ_j` for every atom, or `None` to request finite differences.
    fn partial(&self, _xi: &[f64], _j: usize) -> Option<Result<Vec<f64>>> {
        None
    }

    /// Short human-readable description.
    fn describe(&self) -> String;
}

/// An open box `Π (lo_j, hi_j)` in `R^d`; bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterDomain {
    bounds: Vec<(f64, f64)>,
}

impl ParameterDomain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidInput("parameter domain needs dimension >= 1".into()));
        }
        for (j, (lo, hi)) in bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::InvalidInput(format!(
                    "parameter {} has empty interval ({lo}, {hi})",
                    j + 1
                )));
            }
        }
        Ok(ParameterDomain { bounds })
    }

    pub fn unbounded(dim: usize) -> Result<Self> {
        Self::new(vec![(f64::NEG_INFINITY, f64::INFINITY); dim])
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, xi: &[f64]) -> bool {
        xi.len() == self.dim()
            && xi
                .iter()
                .zip(&self.bounds)
                .all(|(x, (lo, hi))| x.is_finite() && lo < x && x < hi)
    }

    pub fn check(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.dim() {
            return Err(Error::ParameterDomain {
                xi: xi.to_vec(),
                reason: format!("expected {} parameters", self.dim()),
            });
        }
        if !self.contains(xi) {
            return Err(Error::ParameterDomain {
                xi: xi.to_vec(),
                reason: format!("outside {}", self),
            });
        }
        Ok(())
    }
}

impl fmt::Display for ParameterDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.bounds.iter().map(|(lo, hi)| format!("({lo}, {hi})")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl Serialize for ParameterDomain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DomainSpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ParameterDomain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        DomainSpec::deserialize(d)?.build().map_err(serde::de::Error::custom)
    }
}

/// A direction `V` at a base point `ξ` strictly inside the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentVector {
    pub xi: Vec<f64>,
    pub v: Vec<f64>,
}

impl TangentVector {
    pub fn new(domain: &ParameterDomain, xi: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        domain.check(&xi)?;
        if v.len() != xi.len() || v.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "direction must have {} finite components",
                xi.len()
            )));
        }
        Ok(TangentVector { xi, v })
    }
}

/// A dense symmetric tensor of order `n` over `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    order: usize,
    dim: usize,
    values: Vec<f64>,
}

impl TensorValue {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.order, "index length must equal the tensor order");
        self.values[self.offset(idx)]
    }

    /// Rows of an order-2 tensor.
    pub fn matrix(&self) -> Option<Vec<Vec<f64>>> {
        (self.order == 2).then(|| self.values.chunks(self.dim).map(<[f64]>::to_vec).collect())
    }

    /// Whether every entry equals its images under index permutations,
    /// within `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        multi_indices(self.dim, self.order).iter().all(|idx| {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            (self.get(idx) - self.get(&sorted)).abs() <= tol
        })
    }

    fn nested(&self, level: usize, offset: usize) -> serde_json::Value {
        if level == self.order {
            return serde_json::json!(self.values[offset]);
        }
        let stride = self.dim.pow((self.order - level - 1) as u32);
        serde_json::Value::Array(
            (0..self.dim)
                .map(|i| self.nested(level + 1, offset + i * stride))
                .collect(),
        )
    }
}

impl Serialize for TensorValue {
    /// Nested arrays, `order` levels deep.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.order == 0 {
            return self.values[0].serialize(s);
        }
        self.nested(0, 0).serialize(s)
    }
}

fn multi_indices(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..order {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..dim).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// Sampled continuity check of `ξ ↦ ‖∂_V log p(ξ)‖_k` along a parameter grid.
#[derive(Debug, Clone, Serialize)]
pub struct IntegrabilityReport {
    pub k: f64,
    pub grid: Vec<Vec<f64>>,
    pub directions: Vec<Vec<f64>>,
    /// `norms[g][v]`: the k-norm at grid point `g` in direction `v`.
    pub norms: Vec<Vec<f64>>,
    /// Largest relative jump `|a - b| / max(1, |a|, |b|)` between adjacent grid points.
    pub max_jump: f64,
    /// Grid index `g` of the jump between `g` and `g + 1`, and its direction.
    pub max_jump_at: Option<(usize, usize)>,
    pub tolerance: f64,
    pub continuous: bool,
}

/// A parametrized measure model over a finite sample space.
#[derive(Debug, Clone)]
pub struct ParametrizedMeasureModel {
    domain: ParameterDomain,
    space: Space,
    density: Arc<dyn Density>,
    statistical: bool,
}

impl ParametrizedMeasureModel {
    pub fn new(domain: ParameterDomain, space: Space, density: Arc<dyn Density>, statistical: bool) -> Self {
        ParametrizedMeasureModel {
            domain,
            space,
            density,
            statistical,
        }
    }

    pub fn domain(&self) -> &ParameterDomain {
        &self.domain
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn is_statistical(&self) -> bool {
        self.statistical
    }

    pub fn density(&self) -> &Arc<dyn Density> {
        &self.density
    }

    pub fn describe(&self) -> String {
        self.density.describe()
    }

    fn raw_values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let p = self.density.values(xi)?;
        if p.len() != self.space.len() {
            return Err(Error::InvalidInput(format!(
                "density returned {} values for {} atoms",
                p.len(),
                self.space.len()
            )));
        }
        if let Some(bad) = p.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite density {bad} at {xi:?}")));
        }
        Ok(p)
    }

    /// Densities at `ξ`, checked for domain membership, nonnegativity and,
    /// for statistical models, unit total mass.
    pub fn densities(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.domain.check(xi)?;
        let p = self.raw_values(xi)?;
        if let Some((atom, value)) = p.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeDensity {
                atom,
                xi: xi.to_vec(),
                value: *value,
            });
        }
        if self.statistical {
            let total: f64 = p.iter().enumerate().map(|(i, v)| v * self.space.weight(i)).sum();
            if (total - 1.0).abs() > STATISTICAL_TOL {
                return Err(Error::NotStatistical { xi: xi.to_vec(), total });
            }
        }
        Ok(p)
    }

    /// The model measure `p(ξ)`.
    pub fn evaluate(&self, xi: &[f64]) -> Result<Measure> {
        let p = self.densities(xi)?;
        Measure::from_density(self.space.clone(), &p)
    }

    /// `∂p_i/∂ξ_j` per atom: exact when the density supplies it, otherwise a
    /// finite difference with step `1e-6 max(1, |ξ_j|)`, central when both
    /// neighbours lie in the domain and second-order one-sided otherwise.
    pub fn density_partial(&self, xi: &[f64], j: usize) -> Result<Vec<f64>> {
        self.domain.check(xi)?;
        if j >= self.dim() {
            return Err(Error::InvalidInput(format!("no parameter {}", j + 1)));
        }
        if let Some(exact) = self.density.partial(xi, j) {
            return exact;
        }
        let h = 1e-6 * xi[j].abs().max(1.0);
        let at = |s: f64| {
            let mut x = xi.to_vec();
            x[j] += s * h;
            if self.domain.contains(&x) {
                Some(x)
            } else {
                None
            }
        };
        let combine = |terms: &[(f64, Vec<f64>)], denom: f64| -> Result<Vec<f64>> {
            let vals = terms
                .iter()
                .map(|(c, x)| self.raw_values(x).map(|v| (*c, v)))
                .collect::<Result<Vec<_>>>()?;
            Ok((0..self.space.len())
                .map(|i| vals.iter().map(|(c, v)| c * v[i]).sum::<f64>() / (denom * h))
                .collect())
        };
        match (at(-1.0), at(1.0), at(2.0), at(-2.0)) {
            (Some(m), Some(p), _, _) => combine(&[(1.0, p), (-1.0, m)], 2.0),
            (_, Some(p1), Some(p2), _) => combine(&[(-3.0, xi.to_vec()), (4.0, p1), (-1.0, p2)], 2.0),
            (Some(m1), _, _, Some(m2)) => combine(&[(3.0, xi.to_vec()), (-4.0, m1), (1.0, m2)], 2.0),
            _ => Err(Error::ParameterDomain {
                xi: xi.to_vec(),
                reason: "too close to the boundary for a finite difference".into(),
            }),
        }
    }

    /// Directional derivative of the densities, `Σ_j V_j ∂p/∂ξ_j`.
    pub fn density_derivative(&self, xi: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "direction has {} components, model has {} parameters",
                v.len(),
                self.dim()
            )));
        }
        let mut out = vec![0.0; self.space.len()];
        for (j, c) in v.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            for (o, d) in out.iter_mut().zip(self.density_partial(xi, j)?) {
                *o += c * d;
            }
        }
        Ok(out)
    }

    /// `d_ξ p(V)` as a signed measure.
    pub fn mass_derivative(&self, xi: &[f64], v: &[f64]) -> Result<SignedMeasure> {
        let dp = self.density_derivative(xi, v)?;
        let mass = dp.iter().enumerate().map(|(i, d)| d * self.space.weight(i)).collect();
        SignedMeasure::new(self.space.clone(), mass)
    }

    /// `∂_V log p(ξ)` per atom, 0 on atoms of zero mass.
    ///
    /// A derivative above `1e-10 · max(1, max_i |∂_V p_i|)` on an atom of zero
    /// density means `d_ξ p(V)` is not dominated by `p(ξ)`, and is an error.
    pub fn log_derivative(&self, xi: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let p = self.densities(xi)?;
        let dp = self.density_derivative(xi, v)?;
        log_ratio(&p, &dp)
    }

    fn basis_log_derivatives(&self, xi: &[f64]) -> Result<(Measure, Vec<Vec<f64>>)> {
        let p = self.densities(xi)?;
        let logs = (0..self.dim())
            .map(|j| log_ratio(&p, &self.density_partial(xi, j)?))
            .collect::<Result<Vec<_>>>()?;
        Ok((Measure::from_density(self.space.clone(), &p)?, logs))
    }

    /// `‖∂_V log p(ξ)‖_{L^k(p(ξ))}`; `k` may be infinite.
    pub fn k_norm(&self, xi: &[f64], v: &[f64], k: f64) -> Result<f64> {
        check_order(k)?;
        let l = self.log_derivative(xi, v)?;
        Ok(lk_norm(&l, &self.evaluate(xi)?, k))
    }

    /// `‖∂_V log p(ξ)‖_k^k`, the quantity compared by information loss.
    pub fn k_norm_pow(&self, xi: &[f64], v: &[f64], k: f64) -> Result<f64> {
        check_order(k)?;
        if k.is_infinite() {
            return Err(Error::InvalidInput("k-th power needs a finite k".into()));
        }
        let l = self.log_derivative(xi, v)?;
        Ok(lk_norm_pow(&l, &self.evaluate(xi)?, k))
    }

    /// `(p(ξ)^{1/k}, d_ξ p^{1/k}(V))` with the derivative
    /// `(1/k) ∂_V log p(ξ) · p(ξ)^{1/k}`.
    pub fn power_path(&self, xi: &[f64], v: &[f64], k: f64) -> Result<(PowerMeasure, PowerMeasure)> {
        check_order(k)?;
        if k.is_infinite() {
            return Err(Error::InvalidInput("power path needs a finite k".into()));
        }
        let l = self.log_derivative(xi, v)?;
        let base = self.evaluate(xi)?.power(1.0 / k)?;
        let coeff = l.iter().zip(base.coeff()).map(|(a, b)| a * b / k).collect();
        let deriv = PowerMeasure::new(self.space.clone(), 1.0 / k, coeff)?;
        Ok((base, deriv))
    }

    /// `τ^n(V_1, …, V_n) = Σ_i Π_k (∂_{V_k} log p)_i · p_i`.
    pub fn tau_n(&self, xi: &[f64], directions: &[Vec<f64>]) -> Result<f64> {
        if directions.is_empty() {
            return Err(Error::InvalidInput("tau_n needs at least one direction".into()));
        }
        let m = self.evaluate(xi)?;
        let logs = directions
            .iter()
            .map(|v| self.log_derivative(xi, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(weighted_product_sum(&logs.iter().collect::<Vec<_>>(), m.masses()))
    }

    /// The full order-`n` tensor `τ^n` on the coordinate basis.
    pub fn tensor(&self, xi: &[f64], n: usize) -> Result<TensorValue> {
        if n == 0 {
            return Err(Error::InvalidInput("tensor order must be at least 1".into()));
        }
        let (m, logs) = self.basis_log_derivatives(xi)?;
        let d = self.dim();
        let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
        let values = multi_indices(d, n)
            .into_iter()
            .map(|mut idx| {
                idx.sort_unstable();
                *cache.entry(idx.clone()).or_insert_with(|| {
                    let factors: Vec<&Vec<f64>> = idx.iter().map(|j| &logs[*j]).collect();
                    weighted_product_sum(&factors, m.masses())
                })
            })
            .collect();
        Ok(TensorValue {
            order: n,
            dim: d,
            values,
        })
    }

    /// Fisher metric `g = τ^2`.
    pub fn fisher_metric(&self, xi: &[f64]) -> Result<TensorValue> {
        self.tensor(xi, 2)
    }

    /// Amari–Chentsov tensor `T = τ^3`.
    pub fn amari_chentsov(&self, xi: &[f64]) -> Result<TensorValue> {
        self.tensor(xi, 3)
    }

    /// Samples `‖∂_V log p‖_k` over `grid × directions` and flags a relative
    /// jump above `tolerance` between adjacent grid points.
    pub fn check_k_integrability(
        &self,
        grid: &[Vec<f64>],
        directions: &[Vec<f64>],
        k: f64,
        tolerance: f64,
    ) -> Result<IntegrabilityReport> {
        check_order(k)?;
        if grid.is_empty() || directions.is_empty() {
            return Err(Error::InvalidInput("grid and direction set must be non-empty".into()));
        }
        let norms = grid
            .iter()
            .map(|xi| {
                directions
                    .iter()
                    .map(|v| self.k_norm(xi, v, k))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut max_jump = 0.0;
        let mut max_jump_at = None;
        for g in 1..norms.len() {
            for (v, (&a, &b)) in norms[g - 1].iter().zip(&norms[g]).enumerate() {
                let jump = (a - b).abs() / 1f64.max(a.abs()).max(b.abs());
                if jump > max_jump || max_jump_at.is_none() {
                    max_jump = jump;
                    max_jump_at = Some((g - 1, v));
                }
            }
        }
        Ok(IntegrabilityReport {
            k,
            grid: grid.to_vec(),
            directions: directions.to_vec(),
            norms,
            max_jump,
            max_jump_at,
            tolerance,
            continuous: max_jump <= tolerance,
        })
    }
}

fn check_order(k: f64) -> Result<()> {
    if k >= 1.0 {
        Ok(())
    } else {
        Err(Error::Exponent {
            exponent: k,
            reason: "integrability order must be at least 1".into(),
        })
    }
}

fn log_ratio(p: &[f64], dp: &[f64]) -> Result<Vec<f64>> {
    let scale = dp.iter().fold(1.0_f64, |a, d| a.max(d.abs()));
    p.iter()
        .zip(dp)
        .enumerate()
        .map(|(i, (v, d))| {
            if *v > 0.0 {
                Ok(d / v)
            } else if d.abs() > DOMINATION_TOL * scale {
                Err(Error::Domination { atom: i, mass: *d })
            } else {
                Ok(0.0)
            }
        })
        .collect()
}

fn weighted_product_sum(factors: &[&Vec<f64>], mass: &[f64]) -> f64 {
    mass.iter()
        .enumerate()
        .filter(|(_, m)| **m > 0.0)
        .map(|(i, m)| factors.iter().map(|f| f[i]).product::<f64>() * m)
        .sum()
}

/// The canonical `n`-tensor `n^n Σ_i Π_k coeff^{(k)}_i` on `S^{1/n}`.
pub fn canonical_tensor(args: &[PowerMeasure]) -> Result<f64> {
    let n = args.len();
    if n == 0 {
        return Err(Error::InvalidInput(
            "canonical tensor needs at least one argument".into(),
        ));
    }
    let r = 1.0 / n as f64;
    for a in args {
        ensure_same(args[0].space(), a.space(), "canonical tensor")?;
        if (a.exponent() - r).abs() > 1e-12 {
            return Err(Error::Exponent {
                exponent: a.exponent(),
                reason: format!("arguments of the canonical {n}-tensor must lie in S^(1/{n})"),
            });
        }
    }
    let sum: f64 = (0..args[0].coeff().len())
        .map(|i| args.iter().map(|a| a.coeff()[i]).product::<f64>())
        .sum();
    Ok((n as f64).powi(n as i32) * sum)
}

#[derive(Debug)]
struct Normalized {
    inner: ParametrizedMeasureModel,
}

impl Normalized {
    fn total(&self, p: &[f64]) -> Result<f64> {
        let z: f64 = p.iter().enumerate().map(|(i, v)| v * self.inner.space.weight(i)).sum();
        if z > 0.0 {
            Ok(z)
        } else {
            Err(Error::ZeroMass)
        }
    }
}

impl Density for Normalized {
    fn values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        let p = self.inner.densities(xi)?;
        let z = self.total(&p)?;
        Ok(p.iter().map(|v| v / z).collect())
    }

    fn partial(&self, xi: &[f64], j: usize) -> Option<Result<Vec<f64>>> {
        Some((|| {
            let p = self.inner.densities(xi)?;
            let dp = self.inner.density_partial(xi, j)?;
            let z = self.total(&p)?;
            let dz: f64 = dp.iter().enumerate().map(|(i, v)| v * self.inner.space.weight(i)).sum();
            Ok(p.iter().zip(&dp).map(|(v, d)| d / z - v * dz / (z * z)).collect())
        })())
    }

    fn describe(&self) -> String {
        format!("normalized({})", self.inner.describe())
    }
}

/// The statistical model `p(ξ) / |p(ξ)|`.
pub fn normalize_model(model: &ParametrizedMeasureModel) -> ParametrizedMeasureModel {
    ParametrizedMeasureModel {
        domain: model.domain.clone(),
        space: model.space.clone(),
        density: Arc::new(Normalized { inner: model.clone() }),
        statistical: true,
    }
}

#[derive(Debug)]
struct Induced {
    inner: ParametrizedMeasureModel,
    kernel: MarkovKernel,
}

impl Induced {
    fn push(&self, density: &[f64]) -> Result<Vec<f64>> {
        let space = &self.inner.space;
        let mass = density.iter().enumerate().map(|(i, v)| v * space.weight(i)).collect();
        let pushed = self.kernel.pushforward(&SignedMeasure::new(space.clone(), mass)?)?;
        let target = self.kernel.target();
        Ok(pushed
            .masses()
            .iter()
            .enumerate()
            .map(|(j, m)| m / target.weight(j))
            .collect())
    }
}

impl Density for Induced {
    fn values(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.push(&self.inner.densities(xi)?)
    }

    fn partial(&self, xi: &[f64], j: usize) -> Option<Result<Vec<f64>>> {
        Some(self.inner.density_partial(xi, j).and_then(|d| self.push(&d)))
    }

    fn describe(&self) -> String {
        format!("pushforward({})", self.inner.describe())
    }
}

/// The model `ξ ↦ K_* p(ξ)` on the target of `K`, with `d_ξ p′(V) = K_* d_ξ p(V)`.
pub fn induced_model(model: &ParametrizedMeasureModel, kernel: &MarkovKernel) -> Result<ParametrizedMeasureModel> {
    ensure_same(model.space(), kernel.source(), "induced model")?;
    Ok(ParametrizedMeasureModel {
        domain: model.domain.clone(),
        space: kernel.target().clone(),
        density: Arc::new(Induced {
            inner: model.clone(),
            kernel: kernel.clone(),
        }),
        statistical: model.statistical,
    })
}
