//! Finitely atomic measures on the nonnegative reals.
//!
//! Atoms are keyed by their *squared* location: the locations that occur in
//! practice are vertex norms (square roots of rational squared norms), so the
//! squared key is the representation that stays exact in rational mode.
//! Masses may be float even when keys are exact (amplitudes are complex).
//!
//! The two shift-derived measures, for a vector `f` and the spectral
//! projections of the modulus:
//! * modulus measure: mass `‖Se_u‖²·|f(u)|²` at location `‖Se_u‖^α`,
//! * image measure:  mass `λ_v²·|f(u)|²` at location `‖Se_v‖`, summed over
//!   children `v` of each `u` in the support.
//!
//! Both use the *raw* finite-tree norms: they describe the literal operator
//! and are cross-checked against the matrix oracle.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::scalar::{Extended, Scalar, DEFAULT_EPS};
use crate::shift::{FiniteVector, WeightedShift};

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("negative mass {0} at squared location {1}")]
    NegativeMass(String, String),
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(String),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(String),
}

/// A finite nonnegative measure with finitely many atoms.
/// Zero-mass atoms are dropped on construction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomicMeasure {
    atoms: BTreeMap<Scalar, Scalar>, // squared location → mass
}

impl AtomicMeasure {
    pub fn zero() -> Self {
        AtomicMeasure::default()
    }

    /// Builds a measure from `(squared location, mass)` pairs, accumulating
    /// duplicate keys and dropping zero masses.
    pub fn from_atoms<I>(pairs: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (Scalar, Scalar)>,
    {
        let mut atoms: BTreeMap<Scalar, Scalar> = BTreeMap::new();
        for (loc_sq, mass) in pairs {
            if mass.is_negative() {
                return Err(MeasureError::NegativeMass(
                    mass.to_string(),
                    loc_sq.to_string(),
                ));
            }
            let slot = atoms.entry(loc_sq).or_insert_with(Scalar::zero);
            *slot = &*slot + &mass;
        }
        atoms.retain(|_, m| m.is_positive());
        Ok(AtomicMeasure { atoms })
    }

    /// Merges atoms whose squared locations lie within `eps` of each other
    /// (single linkage, ascending walk). Exact keys that collide under the
    /// tolerance merge too; the smallest key of a cluster represents it.
    pub fn clustered(&self, eps: f64) -> AtomicMeasure {
        let mut out: BTreeMap<Scalar, Scalar> = BTreeMap::new();
        let mut rep: Option<Scalar> = None;
        let mut last: Option<f64> = None;
        for (k, m) in &self.atoms {
            let kf = k.to_f64();
            let fresh = match last {
                Some(prev) => kf - prev > eps,
                None => true,
            };
            if fresh {
                rep = Some(k.clone());
            }
            let slot = out
                .entry(rep.clone().expect("set above"))
                .or_insert_with(Scalar::zero);
            *slot = &*slot + m;
            last = Some(kf);
        }
        AtomicMeasure { atoms: out }
    }

    /// Atoms as `(squared location, mass)` in ascending key order.
    pub fn atoms(&self) -> impl Iterator<Item = (&Scalar, &Scalar)> {
        self.atoms.iter()
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> Scalar {
        self.atoms
            .values()
            .fold(Scalar::zero(), |acc, m| acc + m.clone())
    }

    /// Mass at the atom whose squared location matches within `eps`.
    pub fn mass_near(&self, loc_sq: &Scalar, eps: f64) -> Scalar {
        for (k, m) in &self.atoms {
            if k.eq_within(loc_sq, eps) {
                return m.clone();
            }
        }
        Scalar::zero()
    }

    /// Support inclusion: every atom of `self` sits on an atom of `nu`
    /// (exact keys compare exactly, float keys within `eps`).
    pub fn absolutely_continuous_within(&self, nu: &AtomicMeasure, eps: f64) -> bool {
        self.atoms
            .keys()
            .all(|k| nu.atoms.keys().any(|l| l.eq_within(k, eps)))
    }

    pub fn absolutely_continuous(&self, nu: &AtomicMeasure) -> bool {
        self.absolutely_continuous_within(nu, DEFAULT_EPS)
    }

    /// Supremum of the atom-wise density `self({t})/nu({t})`; infinite when
    /// `self` charges a point outside the support of `nu`.
    pub fn density_sup_within(&self, nu: &AtomicMeasure, eps: f64) -> Extended {
        let mut sup = Extended::zero();
        for (k, m) in &self.atoms {
            let denom = nu.mass_near(k, eps);
            let ratio = if denom.is_zero() {
                Extended::Infinite
            } else {
                Extended::Finite(m / &denom)
            };
            if ratio > sup {
                sup = ratio;
            }
        }
        sup
    }

    pub fn density_sup(&self, nu: &AtomicMeasure) -> Extended {
        self.density_sup_within(nu, DEFAULT_EPS)
    }

    /// Pushforward under a map of locations: each atom moves, masses follow.
    pub fn pushforward(&self, map: &AtomMap) -> AtomicMeasure {
        AtomicMeasure::from_atoms(
            self.atoms
                .iter()
                .map(|(k, m)| (map.apply_sq(k), m.clone())),
        )
        .expect("masses unchanged")
    }

    pub fn scaled(&self, c: &Scalar) -> Result<AtomicMeasure, MeasureError> {
        if !c.is_positive() {
            return Err(MeasureError::NonPositiveScale(c.to_string()));
        }
        Ok(AtomicMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|(k, m)| (k.clone(), m * c))
                .collect(),
        })
    }
}

/// A Borel function on the nonnegative half-line, evaluated only at atom
/// locations. Represented by its action on squared locations so rational
/// data stays rational.
#[derive(Clone, Debug, PartialEq)]
pub enum AtomMap {
    /// `x ↦ x`
    Identity,
    /// `x ↦ √q · x` for a fixed `q > 0`; multiplies squared locations by `q`.
    SqrtScale(Scalar),
    /// `x ↦ c` for every `x` (collapses all atoms onto one point).
    Constant(Scalar),
}

impl AtomMap {
    pub fn identity() -> Self {
        AtomMap::Identity
    }

    /// The map `x ↦ √q·x`. Requires `q > 0`.
    pub fn sqrt_scale(q: Scalar) -> Result<Self, MeasureError> {
        if !q.is_positive() {
            return Err(MeasureError::NonPositiveScale(q.to_string()));
        }
        Ok(AtomMap::SqrtScale(q))
    }

    pub fn constant(c: Scalar) -> Result<Self, MeasureError> {
        if c.is_negative() {
            return Err(MeasureError::NonPositiveScale(c.to_string()));
        }
        Ok(AtomMap::Constant(c))
    }

    /// Action on a squared location.
    pub fn apply_sq(&self, loc_sq: &Scalar) -> Scalar {
        match self {
            AtomMap::Identity => loc_sq.clone(),
            AtomMap::SqrtScale(q) => q * loc_sq,
            AtomMap::Constant(c) => c * c,
        }
    }

    /// Action on a plain (un-squared) location, in floats.
    pub fn apply_loc(&self, x: f64) -> f64 {
        match self {
            AtomMap::Identity => x,
            AtomMap::SqrtScale(q) => q.to_f64().sqrt() * x,
            AtomMap::Constant(c) => c.to_f64(),
        }
    }
}

/// Spectral measure of `|S|^α` integrated against `|S|f`: the atom at
/// location `‖Se_u‖^α` (squared key `(‖Se_u‖²)^α`) carries mass
/// `‖Se_u‖²·|f(u)|²`. Requires `α > 0`.
pub fn modulus_measure(
    s: &WeightedShift,
    f: &FiniteVector,
    alpha: &Scalar,
) -> Result<AtomicMeasure, MeasureError> {
    if !alpha.is_positive() {
        return Err(MeasureError::NonPositiveExponent(alpha.to_string()));
    }
    AtomicMeasure::from_atoms(f.entries().iter().map(|(&u, amp)| {
        let nsq = s.raw_norm_sq(u);
        let mass = nsq * &Scalar::float(amp.norm_sqr());
        (nsq.powr(alpha), mass)
    }))
}

/// Spectral measure integrated against `Sf`: for each `u` in the support and
/// each child `v`, the atom at location `‖Se_v‖` gains mass `λ_v²·|f(u)|²`.
pub fn image_measure(s: &WeightedShift, f: &FiniteVector) -> AtomicMeasure {
    let mut pairs = Vec::new();
    for (&u, amp) in f.entries() {
        let fu2 = Scalar::float(amp.norm_sqr());
        for &v in s.tree().children(u) {
            let wsq = s.weight_sq(v).expect("children are non-root");
            pairs.push((s.raw_norm_sq(v).clone(), wsq * &fu2));
        }
    }
    AtomicMeasure::from_atoms(pairs).expect("masses are nonnegative")
}
