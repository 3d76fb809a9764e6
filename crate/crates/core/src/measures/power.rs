use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ensure_same, MeasureRepr, SignedMeasure, Space};
use crate::error::{Error, Result};

/// Slack when comparing exponents against 1, so that e.g. `1/3 + 2/3`
/// is accepted.
const EXPONENT_SLACK: f64 = 1e-12;

pub(super) fn check_exponent(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 && r <= 1.0 + EXPONENT_SLACK {
        Ok(())
    } else {
        Err(Error::Exponent {
            exponent: r,
            reason: "must lie in (0, 1]".into(),
        })
    }
}

fn snap(r: f64) -> f64 {
    if (r - 1.0).abs() <= EXPONENT_SLACK {
        1.0
    } else {
        r
    }
}

fn signed_pow(a: f64, k: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a.signum() * a.abs().powf(k)
    }
}

/// An element of `S^r(Ω)` written as `Σ_i a_i (δ^{ω_i})^r`.
///
/// Every element has exactly one such form, so equality of power measures is
/// equality of coefficient vectors. A measure `μ` has `μ^r` with coefficients
/// `μ_i^r`; for `r = 1` the coefficients are the masses.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMeasure {
    space: Space,
    r: f64,
    coeff: Vec<f64>,
}

impl PowerMeasure {
    pub fn new(space: Space, r: f64, coeff: Vec<f64>) -> Result<Self> {
        check_exponent(r)?;
        if coeff.len() != space.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} coefficients for {} atoms",
                coeff.len(),
                space.len()
            )));
        }
        if let Some(bad) = coeff.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidMeasure(format!("non-finite coefficient {bad}")));
        }
        Ok(PowerMeasure {
            space,
            r: snap(r),
            coeff,
        })
    }

    pub(crate) fn from_parts_unchecked(space: Space, r: f64, coeff: Vec<f64>) -> Self {
        PowerMeasure { space, r, coeff }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn exponent(&self) -> f64 {
        self.r
    }

    pub fn coeff(&self) -> &[f64] {
        &self.coeff
    }

    /// The norm `‖·‖_{1/r}`: `(Σ |a_i|^{1/r})^r`.
    pub fn norm(&self) -> f64 {
        if self.r == 1.0 {
            return self.coeff.iter().map(|a| a.abs()).sum();
        }
        let p = 1.0 / self.r;
        self.coeff.iter().map(|a| a.abs().powf(p)).sum::<f64>().powf(self.r)
    }

    /// Back to an ordinary signed measure; only defined for `r = 1`.
    pub fn to_signed_measure(&self) -> Result<SignedMeasure> {
        if self.r != 1.0 {
            return Err(Error::Exponent {
                exponent: self.r,
                reason: "only elements of S^1 are signed measures".into(),
            });
        }
        SignedMeasure::new(self.space.clone(), self.coeff.clone())
    }

    pub fn scale(&self, c: f64) -> PowerMeasure {
        PowerMeasure {
            space: self.space.clone(),
            r: self.r,
            coeff: self.coeff.iter().map(|a| c * a).collect(),
        }
    }

    /// Product `S^r × S^s → S^{r+s}`; requires `r + s ≤ 1`.
    pub fn multiply(&self, other: &PowerMeasure) -> Result<PowerMeasure> {
        ensure_same(&self.space, &other.space, "power-measure product")?;
        let r = self.r + other.r;
        if r > 1.0 + EXPONENT_SLACK {
            return Err(Error::Exponent {
                exponent: r,
                reason: "product exponent r + s exceeds 1".into(),
            });
        }
        Ok(PowerMeasure {
            space: self.space.clone(),
            r: snap(r),
            coeff: self.coeff.iter().zip(&other.coeff).map(|(a, b)| a * b).collect(),
        })
    }

    fn check_power(&self, k: f64) -> Result<f64> {
        let rk = self.r * k;
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Exponent {
                exponent: k,
                reason: "power must be positive".into(),
            });
        }
        if rk > 1.0 + EXPONENT_SLACK {
            return Err(Error::Exponent {
                exponent: k,
                reason: format!("power exceeds 1/r = {}", 1.0 / self.r),
            });
        }
        Ok(snap(rk))
    }

    fn map_to(&self, r: f64, f: impl Fn(f64) -> f64) -> PowerMeasure {
        PowerMeasure {
            space: self.space.clone(),
            r,
            coeff: self.coeff.iter().map(|a| f(*a)).collect(),
        }
    }

    /// `π^k`: coefficients `|a_i|^k`, in `S^{rk}`.
    pub fn pow_abs(&self, k: f64) -> Result<PowerMeasure> {
        let rk = self.check_power(k)?;
        Ok(self.map_to(rk, |a| a.abs().powf(k)))
    }

    /// `π̃^k`: coefficients `sign(a_i) |a_i|^k`, in `S^{rk}`.
    pub fn pow_signed(&self, k: f64) -> Result<PowerMeasure> {
        let rk = self.check_power(k)?;
        Ok(self.map_to(rk, |a| signed_pow(a, k)))
    }

    fn check_derivative(&self, rho: &PowerMeasure, k: f64) -> Result<()> {
        ensure_same(&self.space, &rho.space, "power-map derivative")?;
        if rho.r != self.r {
            return Err(Error::Exponent {
                exponent: rho.r,
                reason: format!("direction must lie in S^{}", self.r),
            });
        }
        if k <= 1.0 {
            return Err(Error::Exponent {
                exponent: k,
                reason: "power maps are differentiable only for k > 1".into(),
            });
        }
        self.check_power(k).map(|_| ())
    }

    /// Derivative of `π̃^k` at `self` in direction `rho`: `k |ν|^{k-1} · ρ`.
    pub fn d_pow_signed(&self, rho: &PowerMeasure, k: f64) -> Result<PowerMeasure> {
        self.check_derivative(rho, k)?;
        Ok(PowerMeasure {
            space: self.space.clone(),
            r: snap(self.r * k),
            coeff: self
                .coeff
                .iter()
                .zip(&rho.coeff)
                .map(|(a, b)| k * a.abs().powf(k - 1.0) * b)
                .collect(),
        })
    }

    /// Derivative of `π^k` at `self` in direction `rho`: `k ν̃^{k-1} · ρ`.
    pub fn d_pow_abs(&self, rho: &PowerMeasure, k: f64) -> Result<PowerMeasure> {
        self.check_derivative(rho, k)?;
        Ok(PowerMeasure {
            space: self.space.clone(),
            r: snap(self.r * k),
            coeff: self
                .coeff
                .iter()
                .zip(&rho.coeff)
                .map(|(a, b)| k * signed_pow(*a, k - 1.0) * b)
                .collect(),
        })
    }
}

impl Serialize for PowerMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            space: (*self.space).clone(),
            r: Some(self.r),
            coeff: self.coeff.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PowerMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(d)?;
        PowerMeasure::new(Arc::new(repr.space), repr.r.unwrap_or(1.0), repr.coeff).map_err(serde::de::Error::custom)
    }
}
