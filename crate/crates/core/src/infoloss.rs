//! Information loss of a model under a Markov kernel or statistic.
//!
//! For a model `p` and kernel `K` the induced model is `p′ = K_* p`. Its
//! log-derivatives are never larger in `L^k` than those of `p`; the
//! difference of `k`-th powers is the information loss. Statistics with zero
//! loss are sufficient.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::{MarkovKernel, Statistic};
use crate::models::{induced_model, ParametrizedMeasureModel};

/// Slack allowed for rounding in `g ≥ g′`.
pub const MONOTONICITY_TOL: f64 = 1e-10;

/// Tolerance of [`equality_direction_check`], relative to the largest score.
pub const EQUALITY_TOL: f64 = 1e-8;

/// Relative spread `max/min - 1` of the factorization ratio still counted as
/// constant.
pub const RATIO_SPREAD_TOL: f64 = 1e-9;

/// Losses below this fraction of the source norm are rounding noise: the
/// loss is a difference of two norms of that size.
pub const LOSS_ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossEntry {
    pub xi: Vec<f64>,
    pub direction: Vec<f64>,
    pub source_norm_pow: f64,
    pub induced_norm_pow: f64,
    pub loss: f64,
}

/// Losses `‖∂_V log p‖_k^k - ‖∂_V log p′‖_k^k` over a set of `(ξ, V)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossReport {
    pub k: f64,
    pub entries: Vec<LossEntry>,
    pub max_loss: f64,
    /// Index into `entries` of the largest loss.
    pub argmax: Option<usize>,
}

impl LossReport {
    fn from_entries(k: f64, entries: Vec<LossEntry>) -> Self {
        let argmax = entries
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.loss.total_cmp(&b.1.loss))
            .map(|(i, _)| i);
        let max_loss = argmax.map_or(0.0, |i| entries[i].loss);
        LossReport {
            k,
            entries,
            max_loss,
            argmax,
        }
    }

    /// One row per entry; `ξ` and `V` are spread over `xi1.., v1..` columns.
    pub fn to_csv(&self) -> Result<String> {
        let d = self.entries.first().map_or(0, |e| e.xi.len());
        let mut header: Vec<String> = (1..=d).map(|j| format!("xi{j}")).collect();
        header.extend((1..=d).map(|j| format!("v{j}")));
        header.extend(["k", "source_norm_pow", "induced_norm_pow", "loss"].map(String::from));
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidInput(e.to_string());
        w.write_record(&header).map_err(io)?;
        for e in &self.entries {
            let mut row: Vec<String> = e.xi.iter().chain(&e.direction).map(|v| format!("{v:?}")).collect();
            row.extend([self.k, e.source_norm_pow, e.induced_norm_pow, e.loss].map(|v| format!("{v:?}")));
            w.write_record(&row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

fn entry(
    source: &ParametrizedMeasureModel,
    induced: &ParametrizedMeasureModel,
    xi: &[f64],
    v: &[f64],
    k: f64,
) -> Result<LossEntry> {
    let a = source.k_norm_pow(xi, v, k)?;
    let b = induced.k_norm_pow(xi, v, k)?;
    Ok(LossEntry {
        xi: xi.to_vec(),
        direction: v.to_vec(),
        source_norm_pow: a,
        induced_norm_pow: b,
        loss: a - b,
    })
}

/// Order-`k` information loss of `model` under `kernel` at `(ξ, V)`.
pub fn information_loss(
    model: &ParametrizedMeasureModel,
    kernel: &MarkovKernel,
    xi: &[f64],
    v: &[f64],
    k: f64,
) -> Result<f64> {
    let induced = induced_model(model, kernel)?;
    Ok(entry(model, &induced, xi, v, k)?.loss)
}

fn basis(d: usize) -> Vec<Vec<f64>> {
    (0..d)
        .map(|j| (0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Losses over `grid × directions`; an empty direction set means the
/// coordinate basis.
pub fn loss_report(
    model: &ParametrizedMeasureModel,
    kernel: &MarkovKernel,
    grid: &[Vec<f64>],
    directions: &[Vec<f64>],
    k: f64,
) -> Result<LossReport> {
    let induced = induced_model(model, kernel)?;
    let dirs = if directions.is_empty() {
        basis(model.dim())
    } else {
        directions.to_vec()
    };
    let mut entries = Vec::with_capacity(grid.len() * dirs.len());
    for xi in grid {
        for v in &dirs {
            entries.push(entry(model, &induced, xi, v, k)?);
        }
    }
    Ok(LossReport::from_entries(k, entries))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionCheck {
    pub direction: Vec<f64>,
    pub g: f64,
    pub g_induced: f64,
    pub violated: bool,
}

/// Comparison of the Fisher metrics `g` of a model and `g′` of its image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub xi: Vec<f64>,
    pub fisher: Vec<Vec<f64>>,
    pub induced_fisher: Vec<Vec<f64>>,
    /// Smallest eigenvalue of `g - g′`.
    pub min_eigenvalue: f64,
    pub checks: Vec<DirectionCheck>,
    pub violations: usize,
    pub holds: bool,
}

/// Checks `g(V, V) ≥ g′(V, V) - 1e-10` over the coordinate basis and the
/// given extra directions, and the spectrum of `g - g′`.
pub fn check_monotonicity(
    model: &ParametrizedMeasureModel,
    kernel: &MarkovKernel,
    xi: &[f64],
    extra_directions: &[Vec<f64>],
) -> Result<MonotonicityReport> {
    let induced = induced_model(model, kernel)?;
    let g = model.fisher_metric(xi)?;
    let gi = induced.fisher_metric(xi)?;
    let d = model.dim();
    let diff = DMatrix::from_fn(d, d, |i, j| g.get(&[i, j]) - gi.get(&[i, j]));
    let min_eigenvalue = diff.symmetric_eigenvalues().min();
    let mut checks = Vec::new();
    for v in basis(d).iter().chain(extra_directions) {
        let a = model.k_norm_pow(xi, v, 2.0)?;
        let b = induced.k_norm_pow(xi, v, 2.0)?;
        checks.push(DirectionCheck {
            direction: v.clone(),
            g: a,
            g_induced: b,
            violated: a < b - MONOTONICITY_TOL,
        });
    }
    let violations = checks.iter().filter(|c| c.violated).count();
    Ok(MonotonicityReport {
        xi: xi.to_vec(),
        fisher: g.matrix().unwrap_or_default(),
        induced_fisher: gi.matrix().unwrap_or_default(),
        min_eigenvalue,
        checks,
        violations,
        holds: violations == 0 && min_eigenvalue >= -MONOTONICITY_TOL,
    })
}

/// Verdict of [`is_sufficient`] with the evidence for it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficiencyReport {
    pub sufficient: bool,
    pub tolerance: f64,
    pub report: LossReport,
    /// The same grid at a second order; zero loss should not depend on `k`.
    pub cross_check: LossReport,
    pub cross_sufficient: bool,
    /// The two orders disagree: a numerical warning, not a verdict.
    pub disagreement: bool,
}

/// Whether the loss stays below `tol` over the grid and the coordinate basis.
/// A loss within [`LOSS_ROUNDOFF`] of its source norm also counts as zero.
/// The grid is re-run at a second order (3 when `k = 2`, else 2) and any
/// disagreement is flagged.
pub fn is_sufficient(
    model: &ParametrizedMeasureModel,
    kernel: &MarkovKernel,
    grid: &[Vec<f64>],
    k: f64,
    tol: f64,
) -> Result<SufficiencyReport> {
    if !(k > 1.0 && k.is_finite()) {
        return Err(Error::Exponent {
            exponent: k,
            reason: "sufficiency is tested at a finite order k > 1".into(),
        });
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("sufficiency needs a non-empty grid".into()));
    }
    let cross_k = if k == 2.0 { 3.0 } else { 2.0 };
    let report = loss_report(model, kernel, grid, &[], k)?;
    let cross_check = loss_report(model, kernel, grid, &[], cross_k)?;
    let resolved = |r: &LossReport| {
        r.entries
            .iter()
            .all(|e| e.loss <= tol.max(LOSS_ROUNDOFF * e.source_norm_pow))
    };
    let sufficient = resolved(&report);
    let cross_sufficient = resolved(&cross_check);
    Ok(SufficiencyReport {
        sufficient,
        tolerance: tol,
        report,
        cross_check,
        cross_sufficient,
        disagreement: sufficient != cross_sufficient,
    })
}

/// Whether `∂_V log p(ξ) = κ*(∂_V log p′(ξ))` on atoms of positive mass,
/// within `1e-8` times the largest score there: the equality case of the
/// loss inequality. Measuring against the score keeps the verdict
/// independent of how fast the model moves along `V`.
pub fn equality_direction_check(
    model: &ParametrizedMeasureModel,
    kappa: &Statistic,
    xi: &[f64],
    v: &[f64],
) -> Result<bool> {
    let induced = induced_model(model, &kappa.kernel())?;
    let mass = model.evaluate(xi)?;
    let l = model.log_derivative(xi, v)?;
    let pulled = kappa.pullback(&induced.log_derivative(xi, v)?);
    let pairs: Vec<(f64, f64)> = mass
        .masses()
        .iter()
        .zip(l.iter().zip(&pulled))
        .filter(|(m, _)| **m > 0.0)
        .map(|(_, (a, b))| (*a, *b))
        .collect();
    let scale = pairs.iter().fold(0.0_f64, |s, (a, b)| s.max(a.abs()).max(b.abs()));
    Ok(pairs.iter().all(|(a, b)| (a - b).abs() <= EQUALITY_TOL * scale))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorizationStatus {
    Factorizable,
    NotFactorizable,
    /// Some grid point has a model measure of zero total mass.
    Inapplicable,
}

/// A maximal run of consecutive grid points sharing one support pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportRun {
    pub first_xi: Vec<f64>,
    pub last_xi: Vec<f64>,
    pub points: usize,
    /// Atoms of positive density.
    pub support: usize,
    /// Largest per-atom spread `max/min - 1` of the ratio `p / (p′∘κ)`.
    pub max_ratio_spread: f64,
    /// `μ_run = (p / p′∘κ) · base weights`, undefined off `κ⁻¹(supp p′)`.
    pub measure: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FactorizationWitness {
    /// The ratio at `atom` changes along one run.
    RatioVariation {
        xi_a: Vec<f64>,
        xi_b: Vec<f64>,
        atom: usize,
        ratio_a: f64,
        ratio_b: f64,
    },
    /// Two runs factorize with different measures (`μ₊ ≠ μ₋`).
    SubdomainMismatch {
        run_a: usize,
        run_b: usize,
        atom: usize,
        measure_a: f64,
        measure_b: f64,
        /// Total variation distance of the two run measures on their common domain.
        distance: f64,
    },
    ZeroMass {
        xi: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationResult {
    pub status: FactorizationStatus,
    /// The common measure `μ₀` with `p(ξ) = p′(κ(·); ξ) μ₀`, when factorizable.
    pub mu0: Option<Vec<f64>>,
    /// Largest `|p_i(ξ) w_i - p′_{κ(i)}(ξ) μ₀_i|` over the grid.
    pub residual: Option<f64>,
    pub runs: Vec<SupportRun>,
    pub witness: Option<FactorizationWitness>,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Tests whether `p(ξ) = p′(κ(·); ξ) μ₀` for one `ξ`-independent `μ₀`.
///
/// The grid is split into maximal runs of common support. Inside a run the
/// ratio `p / (p′∘κ)` must be constant per atom; across runs the resulting
/// measures must agree where both are defined.
pub fn fisher_neyman_check(
    model: &ParametrizedMeasureModel,
    kappa: &Statistic,
    grid: &[Vec<f64>],
) -> Result<FactorizationResult> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("factorization check needs a non-empty grid".into()));
    }
    let induced = induced_model(model, &kappa.kernel())?;
    let space = model.space().clone();
    let n = space.len();
    let mut samples = Vec::with_capacity(grid.len());
    for xi in grid {
        let p = model.densities(xi)?;
        let total: f64 = p.iter().enumerate().map(|(i, v)| v * space.weight(i)).sum();
        if total <= 0.0 {
            return Ok(FactorizationResult {
                status: FactorizationStatus::Inapplicable,
                mu0: None,
                residual: None,
                runs: vec![],
                witness: Some(FactorizationWitness::ZeroMass { xi: xi.clone() }),
            });
        }
        let q = induced.densities(xi)?;
        let ratio: Vec<Option<f64>> = (0..n)
            .map(|i| {
                let d = q[kappa.apply(i)];
                (d > 0.0).then(|| p[i] / d)
            })
            .collect();
        samples.push((p, q, ratio));
    }

    // maximal runs of equal support pattern
    let pattern = |p: &[f64]| p.iter().map(|v| *v > 0.0).collect::<Vec<bool>>();
    let mut bounds = vec![0];
    for g in 1..grid.len() {
        if pattern(&samples[g].0) != pattern(&samples[g - 1].0) {
            bounds.push(g);
        }
    }
    bounds.push(grid.len());

    let mut runs = Vec::new();
    let mut worst: Option<(f64, FactorizationWitness)> = None;
    for w in bounds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mut max_spread = 0.0_f64;
        for i in 0..n {
            let vals: Vec<(usize, f64)> = (lo..hi).filter_map(|g| samples[g].2[i].map(|r| (g, r))).collect();
            let Some(&(gmin, rmin)) = vals.iter().min_by(|a, b| a.1.total_cmp(&b.1)) else {
                continue;
            };
            let &(gmax, rmax) = vals.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap_or(&(gmin, rmin));
            let spread = if rmax == 0.0 {
                0.0
            } else if rmin == 0.0 {
                f64::INFINITY
            } else {
                rmax / rmin - 1.0
            };
            max_spread = max_spread.max(spread);
            if spread > RATIO_SPREAD_TOL && worst.as_ref().is_none_or(|(s, _)| spread > *s) {
                worst = Some((
                    spread,
                    FactorizationWitness::RatioVariation {
                        xi_a: grid[gmin].clone(),
                        xi_b: grid[gmax].clone(),
                        atom: i,
                        ratio_a: rmin,
                        ratio_b: rmax,
                    },
                ));
            }
        }
        let measure = samples[lo]
            .2
            .iter()
            .enumerate()
            .map(|(i, r)| r.map(|v| v * space.weight(i)))
            .collect();
        runs.push(SupportRun {
            first_xi: grid[lo].clone(),
            last_xi: grid[hi - 1].clone(),
            points: hi - lo,
            support: samples[lo].0.iter().filter(|v| **v > 0.0).count(),
            max_ratio_spread: max_spread,
            measure,
        });
    }
    if let Some((_, witness)) = worst {
        return Ok(FactorizationResult {
            status: FactorizationStatus::NotFactorizable,
            mu0: None,
            residual: None,
            runs,
            witness: Some(witness),
        });
    }

    // runs must agree wherever two of them define the measure
    let mut mismatch: Option<(f64, FactorizationWitness)> = None;
    for a in 0..runs.len() {
        for b in a + 1..runs.len() {
            let mut distance = 0.0;
            let mut top: Option<(f64, usize, f64, f64)> = None;
            for i in 0..n {
                if let (Some(x), Some(y)) = (runs[a].measure[i], runs[b].measure[i]) {
                    distance += (x - y).abs();
                    let gap = relative_gap(x, y);
                    if gap > RATIO_SPREAD_TOL && top.is_none_or(|t| gap > t.0) {
                        top = Some((gap, i, x, y));
                    }
                }
            }
            if let Some((_, atom, x, y)) = top {
                if mismatch.as_ref().is_none_or(|(d, _)| distance > *d) {
                    mismatch = Some((
                        distance,
                        FactorizationWitness::SubdomainMismatch {
                            run_a: a,
                            run_b: b,
                            atom,
                            measure_a: x,
                            measure_b: y,
                            distance,
                        },
                    ));
                }
            }
        }
    }
    if let Some((_, witness)) = mismatch {
        return Ok(FactorizationResult {
            status: FactorizationStatus::NotFactorizable,
            mu0: None,
            residual: None,
            runs,
            witness: Some(witness),
        });
    }

    let mu0: Vec<f64> = (0..n)
        .map(|i| runs.iter().find_map(|r| r.measure[i]).unwrap_or(0.0))
        .collect();
    let mut residual = 0.0_f64;
    for (p, q, _) in &samples {
        for i in 0..n {
            residual = residual.max((p[i] * space.weight(i) - q[kappa.apply(i)] * mu0[i]).abs());
        }
    }
    Ok(FactorizationResult {
        status: FactorizationStatus::Factorizable,
        mu0: Some(mu0),
        residual: Some(residual),
        runs,
        witness: None,
    })
}
