use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite sample space: an ordered list of labeled atoms, optionally with
/// per-atom coordinates and quadrature weights.
///
/// Weights are the base mass of each atom. A space without weights has unit
/// atom masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct SampleSpace {
    atoms: Vec<String>,
    coords: Option<Vec<Vec<f64>>>,
    weights: Option<Vec<f64>>,
}

/// Shared handle; measures, kernels and models refer to spaces through it.
pub type Space = Arc<SampleSpace>;

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    atoms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

impl TryFrom<SpaceRepr> for SampleSpace {
    type Error = Error;

    fn try_from(r: SpaceRepr) -> Result<Self> {
        SampleSpace::with_parts(r.atoms, r.coords, r.weights)
    }
}

impl From<SampleSpace> for SpaceRepr {
    fn from(s: SampleSpace) -> Self {
        SpaceRepr {
            atoms: s.atoms,
            coords: s.coords,
            weights: s.weights,
        }
    }
}

impl SampleSpace {
    pub fn new(atoms: Vec<String>) -> Result<Self> {
        Self::with_parts(atoms, None, None)
    }

    /// Atoms labeled `"0"`, `"1"`, ... with unit mass.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()).collect())
    }

    pub fn with_parts(atoms: Vec<String>, coords: Option<Vec<Vec<f64>>>, weights: Option<Vec<f64>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidSpace("a sample space needs at least one atom".into()));
        }
        let mut seen = HashSet::with_capacity(atoms.len());
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate atom label `{a}`")));
            }
        }
        if let Some(c) = &coords {
            if c.len() != atoms.len() {
                return Err(Error::InvalidSpace(format!(
                    "{} coordinate rows for {} atoms",
                    c.len(),
                    atoms.len()
                )));
            }
            let dim = c[0].len();
            if c.iter().any(|row| row.len() != dim) {
                return Err(Error::InvalidSpace("coordinate rows differ in length".into()));
            }
            if c.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSpace("non-finite coordinate".into()));
            }
        }
        if let Some(w) = &weights {
            if w.len() != atoms.len() {
                return Err(Error::InvalidSpace(format!(
                    "{} weights for {} atoms",
                    w.len(),
                    atoms.len()
                )));
            }
            if let Some(bad) = w.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::InvalidSpace(format!(
                    "weights must be finite and positive, got {bad}"
                )));
            }
        }
        Ok(SampleSpace { atoms, coords, weights })
    }

    /// Midpoint grid of `n` cells on `(a, b)`; each atom carries the cell
    /// midpoint as coordinate and the cell width as weight.
    pub fn midpoint_grid(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) || n == 0 {
            return Err(Error::InvalidSpace(format!(
                "grid needs a finite interval a < b and n >= 1, got ({a}, {b}), n = {n}"
            )));
        }
        let h = (b - a) / n as f64;
        let coords = (0..n).map(|i| vec![a + (i as f64 + 0.5) * h]).collect();
        Self::with_parts((0..n).map(|i| i.to_string()).collect(), Some(coords), Some(vec![h; n]))
    }

    /// Cartesian product with row-major ordering (`self` outer, `other`
    /// inner). Labels are `"a|b"`; coordinates concatenate and weights
    /// multiply when both factors carry them.
    pub fn product(&self, other: &SampleSpace) -> Result<Self> {
        let mut atoms = Vec::with_capacity(self.len() * other.len());
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(format!("{a}|{b}"));
            }
        }
        let coords = match (&self.coords, &other.coords) {
            (Some(ca), Some(cb)) => Some(
                ca.iter()
                    .flat_map(|x| cb.iter().map(move |y| [x.as_slice(), y.as_slice()].concat()))
                    .collect(),
            ),
            _ => None,
        };
        let weights = match (&self.weights, &other.weights) {
            (Some(wa), Some(wb)) => Some(wa.iter().flat_map(|x| wb.iter().map(move |y| x * y)).collect()),
            _ => None,
        };
        Self::with_parts(atoms, coords, weights)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.atoms
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == label)
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Coordinate dimension, zero without coordinates.
    pub fn coord_dim(&self) -> usize {
        self.coords.as_ref().map_or(0, |c| c[0].len())
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Base mass of atom `i`.
    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    pub fn base_weights(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| vec![1.0; self.len()])
    }

    pub fn into_shared(self) -> Space {
        Arc::new(self)
    }
}

pub(crate) fn same_space(a: &Space, b: &Space) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn ensure_same(a: &Space, b: &Space, context: &'static str) -> Result<()> {
    if same_space(a, b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(context))
    }
}
