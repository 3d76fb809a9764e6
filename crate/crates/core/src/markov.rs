//! Statistics and Markov kernels between finite sample spaces.
//!
//! A kernel `K: Ω → Ω′` is a row-stochastic matrix; its pushforward
//! `K_*` acts linearly on signed measures. A statistic `κ: Ω → Ω′` is the
//! special case of 0/1 rows. Everything here is exact up to floating-point
//! rounding: on finite spaces no measurability or a.e. questions arise.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{ensure_same, Measure, PowerMeasure, ProbabilityMeasure, SampleSpace, SignedMeasure, Space};

/// Tolerance on row sums of a kernel.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Default tolerance for [`is_congruent`].
pub const CONGRUENCE_TOL: f64 = 1e-12;

/// A map between the atoms of two spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Statistic {
    source: Space,
    target: Space,
    map: Vec<usize>,
}

impl Statistic {
    pub fn new(source: Space, target: Space, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::InvalidKernel(format!(
                "statistic maps {} atoms but the source has {}",
                map.len(),
                source.len()
            )));
        }
        if let Some(bad) = map.iter().find(|j| **j >= target.len()) {
            return Err(Error::InvalidKernel(format!(
                "statistic target index {bad} out of range for {} atoms",
                target.len()
            )));
        }
        Ok(Statistic { source, target, map })
    }

    pub fn identity(space: Space) -> Self {
        let map = (0..space.len()).collect();
        Statistic {
            source: space.clone(),
            target: space,
            map,
        }
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    /// Source atoms mapped to target atom `j`.
    pub fn fiber(&self, j: usize) -> Vec<usize> {
        (0..self.map.len()).filter(|i| self.map[*i] == j).collect()
    }

    /// `κ_* ν`: mass of each target atom is the total over its fiber.
    pub fn pushforward(&self, nu: &SignedMeasure) -> Result<SignedMeasure> {
        ensure_same(&self.source, nu.space(), "statistic pushforward")?;
        let mut mass = vec![0.0; self.target.len()];
        for (i, m) in nu.masses().iter().enumerate() {
            mass[self.map[i]] += m;
        }
        SignedMeasure::new(self.target.clone(), mass)
    }

    pub fn pushforward_measure(&self, mu: &Measure) -> Result<Measure> {
        Measure::try_from(self.pushforward(mu)?)
    }

    /// `κ* ψ = ψ ∘ κ`.
    pub fn pullback(&self, psi: &[f64]) -> Vec<f64> {
        self.map.iter().map(|j| psi[*j]).collect()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Statistic) -> Result<Statistic> {
        ensure_same(&self.target, &next.source, "statistic composition")?;
        Ok(Statistic {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.iter().map(|j| next.map[*j]).collect(),
        })
    }

    /// The kernel `ω ↦ δ^{κ(ω)}`.
    pub fn kernel(&self) -> MarkovKernel {
        let rows = self
            .map
            .iter()
            .map(|j| {
                let mut row = vec![0.0; self.target.len()];
                row[*j] = 1.0;
                row
            })
            .collect();
        MarkovKernel {
            source: self.source.clone(),
            target: self.target.clone(),
            rows,
        }
    }
}

/// A kernel from `source` to `target`: one probability vector per source atom.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovKernel {
    source: Space,
    target: Space,
    rows: Vec<Vec<f64>>,
}

impl MarkovKernel {
    pub fn new(source: Space, target: Space, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != source.len() {
            return Err(Error::InvalidKernel(format!(
                "{} rows for {} source atoms",
                rows.len(),
                source.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != target.len() {
                return Err(Error::InvalidKernel(format!(
                    "row {i} has {} entries for {} target atoms",
                    row.len(),
                    target.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidKernel(format!("row {i} has entry {bad}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidKernel(format!("row {i} sums to {sum}")));
            }
        }
        Ok(MarkovKernel { source, target, rows })
    }

    pub fn identity(space: Space) -> Self {
        Statistic::identity(space).kernel()
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// `K_* ν`: `mass'_j = Σ_i K_ij mass_i`.
    pub fn pushforward(&self, nu: &SignedMeasure) -> Result<SignedMeasure> {
        ensure_same(&self.source, nu.space(), "kernel pushforward")?;
        SignedMeasure::new(self.target.clone(), self.push_vec(nu.masses()))
    }

    pub fn pushforward_measure(&self, mu: &Measure) -> Result<Measure> {
        Measure::try_from(self.pushforward(mu)?)
    }

    fn push_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.target.len()];
        for (row, x) in self.rows.iter().zip(v) {
            for (o, k) in out.iter_mut().zip(row) {
                *o += k * x;
            }
        }
        out
    }

    /// The density `φ′` of `K_*(φμ)` with respect to `K_*μ`, taken to be 0
    /// on null atoms of `K_*μ`.
    pub fn conditional_expectation(&self, mu: &Measure, phi: &[f64]) -> Result<Vec<f64>> {
        ensure_same(&self.source, mu.space(), "conditional expectation")?;
        if phi.len() != mu.space().len() {
            return Err(Error::InvalidInput(format!(
                "function has {} values for {} atoms",
                phi.len(),
                mu.space().len()
            )));
        }
        let weighted: Vec<f64> = phi.iter().zip(mu.masses()).map(|(f, m)| f * m).collect();
        let num = self.push_vec(&weighted);
        let den = self.push_vec(mu.masses());
        Ok(num
            .iter()
            .zip(&den)
            .map(|(a, b)| if *b > 0.0 { a / b } else { 0.0 })
            .collect())
    }

    /// `K_*^r ν = π̃^r K_* π̃^{1/r} ν` on `S^r`.
    pub fn power_pushforward(&self, nu: &PowerMeasure) -> Result<PowerMeasure> {
        let r = nu.exponent();
        let linear = nu.pow_signed(1.0 / r)?.to_signed_measure()?;
        self.pushforward(&linear)?.to_power().pow_signed(r)
    }

    /// Formal derivative of `K_*^r` at `μ^r` in direction `ρ = φ μ^r`:
    /// the element `φ′ (K_*μ)^r` with `φ′` the conditional expectation of `φ`.
    pub fn formal_power_derivative(&self, mu: &Measure, rho: &PowerMeasure) -> Result<PowerMeasure> {
        ensure_same(&self.source, mu.space(), "formal power derivative")?;
        ensure_same(mu.space(), rho.space(), "formal power derivative")?;
        let r = rho.exponent();
        let mut phi = Vec::with_capacity(mu.space().len());
        for (i, (m, c)) in mu.masses().iter().zip(rho.coeff()).enumerate() {
            if *m > 0.0 {
                phi.push(c / m.powf(r));
            } else if *c != 0.0 {
                return Err(Error::Domination { atom: i, mass: *c });
            } else {
                phi.push(0.0);
            }
        }
        let phi_prime = self.conditional_expectation(mu, &phi)?;
        let base = self.pushforward_measure(mu)?.power(r)?;
        let coeff = phi_prime.iter().zip(base.coeff()).map(|(f, b)| f * b).collect();
        PowerMeasure::new(self.target.clone(), r, coeff)
    }

    /// The matrix as CSV: a header of target labels, then one row per source atom.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidInput(e.to_string());
        w.write_record(self.target.labels()).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

/// `K2 ∘ K1`, the matrix product of the row-stochastic matrices.
pub fn compose(k2: &MarkovKernel, k1: &MarkovKernel) -> Result<MarkovKernel> {
    ensure_same(&k1.target, &k2.source, "kernel composition")?;
    let rows = k1.rows.iter().map(|row| k2.push_vec(row)).collect();
    Ok(MarkovKernel {
        source: k1.source.clone(),
        target: k2.target.clone(),
        rows,
    })
}

/// Whether `K: Ω′ → Ω` is congruent for `κ: Ω → Ω′`, i.e. `κ_* K(ω′) = δ^{ω′}`
/// for every `ω′`, entrywise within `tol`.
pub fn is_congruent(k: &MarkovKernel, kappa: &Statistic, tol: f64) -> Result<bool> {
    ensure_same(&k.source, &kappa.target, "congruence check")?;
    ensure_same(&k.target, &kappa.source, "congruence check")?;
    let n = kappa.target.len();
    Ok(k.rows.iter().enumerate().all(|(w, row)| {
        let mut pushed = vec![0.0; n];
        for (i, v) in row.iter().enumerate() {
            pushed[kappa.map[i]] += v;
        }
        pushed
            .iter()
            .enumerate()
            .all(|(j, v)| (v - if j == w { 1.0 } else { 0.0 }).abs() <= tol)
    }))
}

/// `(κ* φ′) μ` with `φ′ = dν′ / dκ_*μ`; pushing it forward through `κ`
/// recovers `ν′`.
pub fn congruent_embedding(kappa: &Statistic, mu: &Measure, nu: &SignedMeasure) -> Result<SignedMeasure> {
    let pushed = kappa.pushforward_measure(mu)?;
    let phi = pushed.radon_nikodym(nu)?;
    let mass = kappa
        .pullback(&phi)
        .iter()
        .zip(mu.masses())
        .map(|(f, m)| f * m)
        .collect();
    SignedMeasure::new(kappa.source.clone(), mass)
}

/// The conditional measures of `μ` on the fibers of a statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseFamily {
    statistic: Statistic,
    fibers: Vec<Option<ProbabilityMeasure>>,
}

impl TransverseFamily {
    pub fn statistic(&self) -> &Statistic {
        &self.statistic
    }

    /// Fiber measure over target atom `j` (a measure on the source space);
    /// `None` for an empty fiber.
    pub fn fiber(&self, j: usize) -> Option<&ProbabilityMeasure> {
        self.fibers[j].as_ref()
    }

    pub fn fibers(&self) -> &[Option<ProbabilityMeasure>] {
        &self.fibers
    }

    /// Per target atom, the integral of `phi` against its fiber measure.
    pub fn fiber_integrals(&self, phi: &[f64]) -> Vec<f64> {
        self.fibers
            .iter()
            .map(|f| {
                f.as_ref()
                    .map_or(0.0, |m| m.masses().iter().zip(phi).map(|(a, b)| a * b).sum())
            })
            .collect()
    }
}

/// Restrict `μ` to each fiber of `κ` and normalize. Null fibers get the
/// uniform probability on the fiber; empty fibers are recorded as absent.
pub fn transverse_measures(kappa: &Statistic, mu: &Measure) -> Result<TransverseFamily> {
    let pushed = kappa.pushforward_measure(mu)?;
    let mut fibers = Vec::with_capacity(kappa.target.len());
    for j in 0..kappa.target.len() {
        let members = kappa.fiber(j);
        if members.is_empty() {
            if pushed.masses()[j] > 0.0 {
                return Err(Error::EmptyFiber(j));
            }
            fibers.push(None);
            continue;
        }
        let restricted = mu.restrict(|i| kappa.map[i] == j);
        let fiber = if pushed.masses()[j] > 0.0 {
            restricted.normalize()?
        } else {
            let mut mass = vec![0.0; kappa.source.len()];
            for i in &members {
                mass[*i] = 1.0 / members.len() as f64;
            }
            Measure::new(kappa.source.clone(), mass)?.normalize()?
        };
        fibers.push(Some(fiber));
    }
    Ok(TransverseFamily {
        statistic: kappa.clone(),
        fibers,
    })
}

/// The `κ`-congruent kernel `Ω′ → Ω` whose row `ω′` is the fiber measure of
/// `μ` over `ω′`.
pub fn congruent_kernel_from_embedding(kappa: &Statistic, mu: &Measure) -> Result<MarkovKernel> {
    let family = transverse_measures(kappa, mu)?;
    let rows = family
        .fibers
        .iter()
        .enumerate()
        .map(|(j, f)| f.as_ref().map(|m| m.masses().to_vec()).ok_or(Error::EmptyFiber(j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MarkovKernel {
        source: kappa.target.clone(),
        target: kappa.source.clone(),
        rows,
    })
}

/// Factor `K: Ω → Ω′` as `κ2 ∘ K_cong` through the product `Ω × Ω′`, where
/// `K_cong(ω) = δ^ω × K(ω)` is congruent for the first projection `κ1`.
pub fn decompose_kernel(k: &MarkovKernel) -> Result<(MarkovKernel, Statistic, Statistic)> {
    let (n, m) = (k.source.len(), k.target.len());
    let product = Arc::new(k.source.product(&k.target)?);
    let rows = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n * m];
            row[i * m..(i + 1) * m].copy_from_slice(&k.rows[i]);
            row
        })
        .collect();
    let cong = MarkovKernel {
        source: k.source.clone(),
        target: product.clone(),
        rows,
    };
    let k1 = Statistic {
        source: product.clone(),
        target: k.source.clone(),
        map: (0..n * m).map(|p| p / m).collect(),
    };
    let k2 = Statistic {
        source: product,
        target: k.target.clone(),
        map: (0..n * m).map(|p| p % m).collect(),
    };
    Ok((cong, k1, k2))
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    source: SampleSpace,
    target: SampleSpace,
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct StatisticRepr {
    source: SampleSpace,
    target: SampleSpace,
    map: Vec<usize>,
}

impl Serialize for MarkovKernel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KernelRepr {
            source: (*self.source).clone(),
            target: (*self.target).clone(),
            rows: self.rows.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkovKernel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = KernelRepr::deserialize(d)?;
        MarkovKernel::new(Arc::new(r.source), Arc::new(r.target), r.rows).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Statistic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StatisticRepr {
            source: (*self.source).clone(),
            target: (*self.target).clone(),
            map: self.map.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Statistic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = StatisticRepr::deserialize(d)?;
        Statistic::new(Arc::new(r.source), Arc::new(r.target), r.map).map_err(serde::de::Error::custom)
    }
}
