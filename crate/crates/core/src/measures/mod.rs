//! Finite signed measures and the algebra of their `r`-th powers.
//!
//! A [`SignedMeasure`] is a real mass per atom of a [`SampleSpace`];
//! [`Measure`] and [`ProbabilityMeasure`] add nonnegativity and unit total
//! mass. Powers of measures live in [`PowerMeasure`].

mod power;
mod space;

use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use power::PowerMeasure;
pub(crate) use space::ensure_same;
pub use space::{SampleSpace, Space};

/// Tolerance on the total mass of a [`ProbabilityMeasure`].
pub const PROBABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SignedMeasure {
    space: Space,
    mass: Vec<f64>,
}

impl SignedMeasure {
    pub fn new(space: Space, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != space.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} masses for {} atoms",
                mass.len(),
                space.len()
            )));
        }
        if let Some(bad) = mass.iter().find(|m| !m.is_finite()) {
            return Err(Error::InvalidMeasure(format!("non-finite mass {bad}")));
        }
        Ok(SignedMeasure { space, mass })
    }

    pub fn zero(space: Space) -> Self {
        let n = space.len();
        SignedMeasure {
            space,
            mass: vec![0.0; n],
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Total variation norm: the sum of absolute atom masses.
    pub fn tv_norm(&self) -> f64 {
        self.mass.iter().map(|m| m.abs()).sum()
    }

    /// The unique split `self = plus - minus` into nonnegative parts with
    /// disjoint support.
    pub fn jordan_decompose(&self) -> (Measure, Measure) {
        let plus = self.mass.iter().map(|m| m.max(0.0)).collect();
        let minus = self.mass.iter().map(|m| (-m).max(0.0)).collect();
        (
            Measure(SignedMeasure {
                space: self.space.clone(),
                mass: plus,
            }),
            Measure(SignedMeasure {
                space: self.space.clone(),
                mass: minus,
            }),
        )
    }

    pub fn scale(&self, c: f64) -> Result<SignedMeasure> {
        SignedMeasure::new(self.space.clone(), self.mass.iter().map(|m| c * m).collect())
    }

    pub fn sub(&self, other: &SignedMeasure) -> Result<SignedMeasure> {
        ensure_same(&self.space, &other.space, "measure difference")?;
        SignedMeasure::new(
            self.space.clone(),
            self.mass.iter().zip(&other.mass).map(|(a, b)| a - b).collect(),
        )
    }

    /// The measure as an element of `S^1`.
    pub fn to_power(&self) -> PowerMeasure {
        PowerMeasure::from_parts_unchecked(self.space.clone(), 1.0, self.mass.clone())
    }
}

/// A nonnegative finite measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure(SignedMeasure);

impl Deref for Measure {
    type Target = SignedMeasure;

    fn deref(&self) -> &SignedMeasure {
        &self.0
    }
}

impl Measure {
    pub fn new(space: Space, mass: Vec<f64>) -> Result<Self> {
        Self::try_from(SignedMeasure::new(space, mass)?)
    }

    /// Measure with mass `density_i * weight_i` on each atom.
    pub fn from_density(space: Space, density: &[f64]) -> Result<Self> {
        let mass = density.iter().enumerate().map(|(i, d)| d * space.weight(i)).collect();
        Self::new(space, mass)
    }

    /// The base measure of a space (its quadrature weights).
    pub fn base(space: Space) -> Self {
        let mass = space.base_weights();
        Measure(SignedMeasure { space, mass })
    }

    pub fn as_signed(&self) -> &SignedMeasure {
        &self.0
    }

    /// Whether every atom that is null for `self` carries (relatively) no
    /// mass of `nu`: `|nu_i| <= tol * |nu|_TV` wherever `self_i = 0`.
    pub fn dominates(&self, nu: &SignedMeasure, tol: f64) -> Result<bool> {
        ensure_same(&self.space, &nu.space, "domination check")?;
        Ok(self.first_undominated(nu, tol).is_none())
    }

    fn first_undominated(&self, nu: &SignedMeasure, tol: f64) -> Option<usize> {
        let bound = tol * nu.tv_norm();
        self.mass
            .iter()
            .zip(&nu.mass)
            .position(|(m, v)| *m == 0.0 && v.abs() > bound)
    }

    /// Radon–Nikodym density `d nu / d self`, set to 0 on null atoms.
    pub fn radon_nikodym(&self, nu: &SignedMeasure) -> Result<Vec<f64>> {
        ensure_same(&self.space, &nu.space, "Radon-Nikodym derivative")?;
        if let Some(atom) = self.first_undominated(nu, 0.0) {
            return Err(Error::Domination {
                atom,
                mass: nu.mass[atom],
            });
        }
        Ok(self
            .mass
            .iter()
            .zip(&nu.mass)
            .map(|(m, v)| if *m > 0.0 { v / m } else { 0.0 })
            .collect())
    }

    pub fn normalize(&self) -> Result<ProbabilityMeasure> {
        let total = self.tv_norm();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(ProbabilityMeasure(Measure(SignedMeasure {
            space: self.space.clone(),
            mass: self.mass.iter().map(|m| m / total).collect(),
        })))
    }

    /// `mu^r` in canonical atomic form: coefficients `mass_i^r`.
    pub fn power(&self, r: f64) -> Result<PowerMeasure> {
        power::check_exponent(r)?;
        let coeff = if r == 1.0 {
            self.mass.clone()
        } else {
            self.mass.iter().map(|m| m.powf(r)).collect()
        };
        Ok(PowerMeasure::from_parts_unchecked(self.space.clone(), r, coeff))
    }

    /// Masses restricted to the given atoms, zero elsewhere.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Measure {
        let mass = self
            .mass
            .iter()
            .enumerate()
            .map(|(i, m)| if keep(i) { *m } else { 0.0 })
            .collect();
        Measure(SignedMeasure {
            space: self.space.clone(),
            mass,
        })
    }
}

impl TryFrom<SignedMeasure> for Measure {
    type Error = Error;

    fn try_from(nu: SignedMeasure) -> Result<Self> {
        if let Some(bad) = nu.mass.iter().find(|m| **m < 0.0) {
            return Err(Error::InvalidMeasure(format!("negative mass {bad}")));
        }
        Ok(Measure(nu))
    }
}

/// A nonnegative measure of total mass 1 (within [`PROBABILITY_TOL`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure(Measure);

impl Deref for ProbabilityMeasure {
    type Target = Measure;

    fn deref(&self) -> &Measure {
        &self.0
    }
}

impl ProbabilityMeasure {
    pub fn new(space: Space, mass: Vec<f64>) -> Result<Self> {
        Self::try_from(Measure::new(space, mass)?)
    }

    pub fn dirac(space: Space, atom: usize) -> Self {
        let mut mass = vec![0.0; space.len()];
        mass[atom] = 1.0;
        ProbabilityMeasure(Measure(SignedMeasure { space, mass }))
    }

    pub fn uniform(space: Space) -> Self {
        let n = space.len();
        ProbabilityMeasure(Measure(SignedMeasure {
            space,
            mass: vec![1.0 / n as f64; n],
        }))
    }

    pub fn as_measure(&self) -> &Measure {
        &self.0
    }
}

impl TryFrom<Measure> for ProbabilityMeasure {
    type Error = Error;

    fn try_from(mu: Measure) -> Result<Self> {
        let total = mu.total();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not 1")));
        }
        Ok(ProbabilityMeasure(mu))
    }
}

/// `L^k(mu)` norm of a per-atom function; `k = f64::INFINITY` gives the
/// essential supremum over atoms of positive mass.
pub fn lk_norm(phi: &[f64], mu: &Measure, k: f64) -> f64 {
    if k.is_infinite() {
        return phi
            .iter()
            .zip(mu.masses())
            .filter(|(_, m)| **m > 0.0)
            .map(|(f, _)| f.abs())
            .fold(0.0, f64::max);
    }
    lk_norm_pow(phi, mu, k).powf(1.0 / k)
}

/// `k`-th power of the `L^k(mu)` norm, `sum |phi_i|^k mu_i`.
pub fn lk_norm_pow(phi: &[f64], mu: &Measure, k: f64) -> f64 {
    phi.iter()
        .zip(mu.masses())
        .filter(|(_, m)| **m > 0.0)
        .map(|(f, m)| f.abs().powf(k) * m)
        .sum()
}

/// JSON form shared by measures and power measures. An omitted `r` means 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureRepr {
    pub space: SampleSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    pub coeff: Vec<f64>,
}

impl Serialize for SignedMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            space: (*self.space).clone(),
            r: None,
            coeff: self.mass.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SignedMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(d)?;
        if repr.r.is_some_and(|r| r != 1.0) {
            return Err(serde::de::Error::custom("a measure must have exponent r = 1"));
        }
        SignedMeasure::new(Arc::new(repr.space), repr.coeff).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Measure::try_from(SignedMeasure::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Serialize for ProbabilityMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(n: usize) -> Space {
        SampleSpace::indexed(n).unwrap().into_shared()
    }

    fn signed(m: &[f64]) -> SignedMeasure {
        SignedMeasure::new(space(m.len()), m.to_vec()).unwrap()
    }

    fn measure(m: &[f64]) -> Measure {
        Measure::new(space(m.len()), m.to_vec()).unwrap()
    }

    #[test]
    fn tv_norm_examples() {
        assert!((signed(&[0.3, -0.2, 0.5]).tv_norm() - 1.0).abs() < 1e-15);
        assert_eq!(SignedMeasure::zero(space(3)).tv_norm(), 0.0);
        let p = ProbabilityMeasure::new(space(3), vec![0.2, 0.3, 0.5]).unwrap();
        assert!((p.tv_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jordan_examples() {
        let (p, m) = signed(&[0.3, -0.2, 0.5]).jordan_decompose();
        assert_eq!(p.masses(), &[0.3, 0.0, 0.5]);
        assert_eq!(m.masses(), &[0.0, 0.2, 0.0]);
        let (p, m) = signed(&[1.0, 2.0]).jordan_decompose();
        assert_eq!(p.masses(), &[1.0, 2.0]);
        assert_eq!(m.masses(), &[0.0, 0.0]);
        let (p, m) = signed(&[-1.0, -1.0]).jordan_decompose();
        assert_eq!(p.masses(), &[0.0, 0.0]);
        assert_eq!(m.masses(), &[1.0, 1.0]);
    }

    #[test]
    fn domination_examples() {
        assert!(measure(&[1.0, 0.0]).dominates(&signed(&[2.0, 0.0]), 0.0).unwrap());
        assert!(!measure(&[1.0, 0.0]).dominates(&signed(&[0.0, 1.0]), 0.0).unwrap());
        assert!(measure(&[1.0, 1.0]).dominates(&signed(&[-3.0, 7.0]), 0.0).unwrap());
        // relative tolerance
        assert!(measure(&[1.0, 0.0]).dominates(&signed(&[1.0, 1e-9]), 1e-8).unwrap());
        assert!(matches!(
            measure(&[1.0]).dominates(&signed(&[1.0, 1.0]), 0.0),
            Err(Error::SpaceMismatch(_))
        ));
    }

    #[test]
    fn radon_nikodym_examples() {
        assert_eq!(
            measure(&[1.0, 1.0]).radon_nikodym(&signed(&[2.0, 3.0])).unwrap(),
            vec![2.0, 3.0]
        );
        let mu = measure(&[0.0, 1.0]);
        let nu = SignedMeasure::new(mu.space().clone(), vec![0.0, 3.0]).unwrap();
        assert_eq!(mu.radon_nikodym(&nu).unwrap(), vec![0.0, 3.0]);
        let mu = measure(&[0.5, 2.0, 0.0]);
        assert_eq!(mu.radon_nikodym(mu.as_signed()).unwrap(), vec![1.0, 1.0, 0.0]);
        let nu = SignedMeasure::new(mu.space().clone(), vec![0.0, 1.0, 0.5]).unwrap();
        assert!(matches!(mu.radon_nikodym(&nu), Err(Error::Domination { atom: 2, .. })));
    }

    #[test]
    fn normalize_examples() {
        let p = measure(&[1.0, 3.0]).normalize().unwrap();
        assert_eq!(p.masses(), &[0.25, 0.75]);
        let q = p.normalize().unwrap();
        assert_eq!(q.masses(), p.masses());
        assert_eq!(measure(&[0.0, 0.0]).normalize(), Err(Error::ZeroMass));
    }

    #[test]
    fn constructors_reject_bad_masses() {
        assert!(Measure::new(space(2), vec![1.0, -0.1]).is_err());
        assert!(SignedMeasure::new(space(2), vec![1.0, f64::INFINITY]).is_err());
        assert!(SignedMeasure::new(space(2), vec![1.0]).is_err());
        assert!(ProbabilityMeasure::new(space(2), vec![0.5, 0.6]).is_err());
        assert!(ProbabilityMeasure::new(space(2), vec![0.5, 0.5 + 1e-13]).is_ok());
    }

    #[test]
    fn lk_norms() {
        let mu = measure(&[0.5, 0.5, 0.0]);
        let phi = [1.0, -3.0, 100.0];
        assert!((lk_norm(&phi, &mu, 1.0) - 2.0).abs() < 1e-15);
        assert!((lk_norm(&phi, &mu, 2.0) - 5.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(lk_norm(&phi, &mu, f64::INFINITY), 3.0);
    }

    #[test]
    fn json_form() {
        let nu = signed(&[0.5, -1.0]);
        let text = serde_json::to_string(&nu).unwrap();
        assert_eq!(text, r#"{"space":{"atoms":["0","1"]},"coeff":[0.5,-1.0]}"#);
        let back: SignedMeasure = serde_json::from_str(&text).unwrap();
        assert_eq!(back, nu);
        assert!(serde_json::from_str::<Measure>(&text).is_err());
        let with_r = r#"{"space":{"atoms":["0"]},"r":0.5,"coeff":[1.0]}"#;
        assert!(serde_json::from_str::<SignedMeasure>(with_r).is_err());
    }

    proptest! {
        #[test]
        fn jordan_parts_are_disjoint_and_split_the_norm(m in prop::collection::vec(-10.0..10.0f64, 1..12)) {
            let nu = signed(&m);
            let (p, q) = nu.jordan_decompose();
            prop_assert!((nu.tv_norm() - p.tv_norm() - q.tv_norm()).abs() <= 1e-12 * (1.0 + nu.tv_norm()));
            for ((a, b), v) in p.masses().iter().zip(q.masses()).zip(&m) {
                prop_assert!(*a == 0.0 || *b == 0.0);
                prop_assert_eq!(a - b, *v);
            }
        }
    }
}
