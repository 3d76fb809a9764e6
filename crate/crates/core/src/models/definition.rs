use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{builtin, DslDensity, ParameterDomain, ParametrizedMeasureModel};
use crate::error::{Error, Result};
use crate::measures::SampleSpace;

/// JSON form of a parameter box; a `null` bound is infinite, and omitted
/// bounds mean all of `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<[Option<f64>; 2]>>,
}

impl DomainSpec {
    pub fn build(&self) -> Result<ParameterDomain> {
        match &self.bounds {
            None => ParameterDomain::unbounded(self.dim),
            Some(b) => {
                if b.len() != self.dim {
                    return Err(Error::InvalidInput(format!(
                        "domain of dimension {} lists {} bounds",
                        self.dim,
                        b.len()
                    )));
                }
                ParameterDomain::new(
                    b.iter()
                        .map(|[lo, hi]| (lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY)))
                        .collect(),
                )
            }
        }
    }
}

impl From<&ParameterDomain> for DomainSpec {
    fn from(d: &ParameterDomain) -> Self {
        let finite = |v: f64| v.is_finite().then_some(v);
        DomainSpec {
            dim: d.dim(),
            bounds: Some(d.bounds().iter().map(|(lo, hi)| [finite(*lo), finite(*hi)]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub interval: [f64; 2],
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceSpec {
    Grid { grid: GridSpec },
    Explicit(SampleSpace),
}

impl SpaceSpec {
    pub fn build(&self) -> Result<SampleSpace> {
        match self {
            SpaceSpec::Grid { grid } => SampleSpace::midpoint_grid(grid.interval[0], grid.interval[1], grid.points),
            SpaceSpec::Explicit(s) => Ok(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DensitySpec {
    Expr(String),
    Builtin { builtin: String },
}

/// The model file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    pub density: DensitySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_grad: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistical: Option<bool>,
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("model JSON: {e}")))
    }

    pub fn build(&self) -> Result<ParametrizedMeasureModel> {
        match &self.density {
            DensitySpec::Builtin { builtin: name } => {
                if self.domain.is_some() || self.space.is_some() || self.density_grad.is_some() {
                    return Err(Error::InvalidInput(
                        "builtin models fix their own domain, space and derivatives".into(),
                    ));
                }
                let model = builtin(name)?;
                if self.statistical.is_some_and(|s| s != model.is_statistical()) {
                    return Err(Error::InvalidInput(format!(
                        "builtin `{name}` has statistical = {}",
                        model.is_statistical()
                    )));
                }
                Ok(model)
            }
            DensitySpec::Expr(text) => {
                let domain = self
                    .domain
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("model needs a `domain`".into()))?
                    .build()?;
                let space = self
                    .space
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("model needs a `space`".into()))?
                    .build()?;
                let density = DslDensity::new(&space, domain.dim(), text, self.density_grad.as_deref())?;
                Ok(ParametrizedMeasureModel::new(
                    domain,
                    space.into_shared(),
                    Arc::new(density),
                    self.statistical.unwrap_or(false),
                ))
            }
        }
    }
}
