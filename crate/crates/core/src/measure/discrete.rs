use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point mass `mass·δ_location` on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom<F> {
    pub location: F,
    pub mass: F,
}

impl<F: Real> Atom<F> {
    pub fn new(location: F, mass: F) -> Result<Self> {
        if !(location >= F::zero() && location <= F::one()) {
            return Err(Error::InvalidAtom(format!(
                "location {location} outside [0, 1]"
            )));
        }
        if !(mass > F::zero() && mass.is_finite()) {
            return Err(Error::InvalidAtom(format!(
                "mass {mass} is not positive and finite"
            )));
        }
        Ok(Self { location, mass })
    }
}

/// Which cone a discrete measure lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// Unit masses only: a point configuration.
    Configuration,
    /// Arbitrary positive masses with finite total.
    FiniteMeasure,
    /// Total mass one.
    ProbabilityMeasure,
}

/// A finite discrete measure `Σ mass_i δ_{location_i}` with pairwise distinct
/// locations, kept sorted by location.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawMeasure<F>",
    bound(deserialize = "F: Real + Deserialize<'de>")
)]
pub struct DiscreteMeasure<F> {
    kind: MeasureKind,
    atoms: Vec<Atom<F>>,
}

#[derive(Deserialize)]
struct RawMeasure<F> {
    kind: MeasureKind,
    atoms: Vec<Atom<F>>,
}

impl<F: Real> TryFrom<RawMeasure<F>> for DiscreteMeasure<F> {
    type Error = Error;

    fn try_from(raw: RawMeasure<F>) -> Result<Self> {
        Self::new(raw.kind, raw.atoms)
    }
}

impl<F: Real> DiscreteMeasure<F> {
    /// Builds a measure from atoms in any order. Duplicate locations are an
    /// error; see [`from_atoms_merging`](Self::from_atoms_merging).
    pub fn new(kind: MeasureKind, mut atoms: Vec<Atom<F>>) -> Result<Self> {
        for a in &atoms {
            Atom::new(a.location, a.mass)?;
        }
        sort_atoms(&mut atoms);
        if let Some(w) = atoms.windows(2).find(|w| w[0].location == w[1].location) {
            return Err(Error::InvalidMeasure(format!(
                "duplicate atom location {}",
                w[0].location
            )));
        }
        let measure = Self { kind, atoms };
        measure.check_kind()?;
        Ok(measure)
    }

    /// Like [`new`](Self::new) but atoms sharing a location are merged into
    /// one atom carrying the summed mass.
    pub fn from_atoms_merging(kind: MeasureKind, mut atoms: Vec<Atom<F>>) -> Result<Self> {
        for a in &atoms {
            Atom::new(a.location, a.mass)?;
        }
        sort_atoms(&mut atoms);
        let mut merged: Vec<Atom<F>> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.location == a.location => last.mass = last.mass + a.mass,
                _ => merged.push(a),
            }
        }
        let measure = Self {
            kind,
            atoms: merged,
        };
        measure.check_kind()?;
        Ok(measure)
    }

    /// The configuration `Σ δ_{x_i}`.
    pub fn configuration(locations: impl IntoIterator<Item = F>) -> Result<Self> {
        let atoms = locations
            .into_iter()
            .map(|x| Atom::new(x, F::one()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(MeasureKind::Configuration, atoms)
    }

    /// The zero measure. Not a probability measure.
    pub fn zero(kind: MeasureKind) -> Result<Self> {
        Self::new(kind, Vec::new())
    }

    /// The Dirac probability measure `δ_x`.
    pub fn dirac(x: F) -> Result<Self> {
        Self::new(
            MeasureKind::ProbabilityMeasure,
            vec![Atom::new(x, F::one())?],
        )
    }

    fn check_kind(&self) -> Result<()> {
        match self.kind {
            MeasureKind::Configuration => {
                if let Some(a) = self.atoms.iter().find(|a| a.mass != F::one()) {
                    return Err(Error::InvalidMeasure(format!(
                        "configuration atom at {} has mass {}",
                        a.location, a.mass
                    )));
                }
            }
            MeasureKind::ProbabilityMeasure => {
                let total = self.total_mass();
                if (total - F::one()).abs() > F::MASS_TOLERANCE {
                    return Err(Error::InvalidMeasure(format!(
                        "probability measure has total mass {total}"
                    )));
                }
            }
            MeasureKind::FiniteMeasure => {
                if !self.total_mass().is_finite() {
                    return Err(Error::InvalidMeasure("total mass is not finite".into()));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn atoms(&self) -> &[Atom<F>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `η(X)`, summed with compensation.
    pub fn total_mass(&self) -> F {
        compensated_sum(self.atoms.iter().map(|a| a.mass))
    }

    /// `η({x})`: the mass of the atom stored exactly at `x`, or zero.
    pub fn atom_mass_at(&self, x: F) -> F {
        match self.position(x) {
            Ok(i) => self.atoms[i].mass,
            Err(_) => F::zero(),
        }
    }

    fn position(&self, x: F) -> std::result::Result<usize, usize> {
        self.atoms
            .binary_search_by(|a| a.location.partial_cmp(&x).expect("locations are not NaN"))
    }

    /// `(1 − t)η + tδ_x`. An existing atom at `x` absorbs the new mass.
    pub fn convex_step(&self, x: F, t: F) -> Result<Self> {
        if self.kind != MeasureKind::ProbabilityMeasure {
            return Err(Error::InvalidMeasure(
                "convex step requires a probability measure".into(),
            ));
        }
        if !(t >= F::zero() && t <= F::one()) {
            return Err(Error::InvalidParameter(format!("t = {t} outside [0, 1]")));
        }
        Atom::new(x, F::one())?;
        let mut out = self.clone();
        out.convex_step_in_place(x, t);
        Ok(out)
    }

    /// Unchecked in-place [`convex_step`](Self::convex_step); the caller
    /// guarantees a probability measure, `x ∈ [0, 1]` and `t ∈ [0, 1]`.
    pub(crate) fn convex_step_in_place(&mut self, x: F, t: F) {
        if t == F::zero() {
            return;
        }
        if t == F::one() {
            self.atoms.clear();
            self.atoms.push(Atom {
                location: x,
                mass: F::one(),
            });
            return;
        }
        let keep = F::one() - t;
        for a in &mut self.atoms {
            a.mass = a.mass * keep;
        }
        // Masses that underflow to zero are no longer atoms.
        self.atoms.retain(|a| a.mass > F::zero());
        self.insert_mass(x, t);
    }

    fn insert_mass(&mut self, x: F, mass: F) {
        match self.position(x) {
            Ok(i) => self.atoms[i].mass = self.atoms[i].mass + mass,
            Err(i) => self.atoms.insert(i, Atom { location: x, mass }),
        }
    }

    /// `η + mass·δ_x`. A configuration stays a configuration when a unit atom
    /// lands on a fresh location; otherwise the result is a finite measure.
    /// Probability measures become finite measures.
    pub fn with_atom_added(&self, x: F, mass: F) -> Result<Self> {
        Atom::new(x, mass)?;
        let collides = self.position(x).is_ok();
        let kind = match self.kind {
            MeasureKind::Configuration if mass == F::one() && !collides => {
                MeasureKind::Configuration
            }
            _ => MeasureKind::FiniteMeasure,
        };
        let mut out = Self {
            kind,
            atoms: self.atoms.clone(),
        };
        out.insert_mass(x, mass);
        Ok(out)
    }

    /// `r·η` as a finite measure.
    pub fn scaled(&self, r: F) -> Result<Self> {
        if !(r > F::zero() && r.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale {r} is not positive"
            )));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                location: a.location,
                mass: a.mass * r,
            })
            .filter(|a| a.mass > F::zero())
            .collect();
        Ok(Self {
            kind: MeasureKind::FiniteMeasure,
            atoms,
        })
    }

    /// `η / η(X)`.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total_mass();
        if !(total > F::zero()) {
            return Err(Error::InvalidMeasure(
                "cannot normalize the zero measure".into(),
            ));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                location: a.location,
                mass: a.mass / total,
            })
            .filter(|a| a.mass > F::zero())
            .collect();
        let out = Self {
            kind: MeasureKind::ProbabilityMeasure,
            atoms,
        };
        out.check_kind()?;
        Ok(out)
    }

    /// Wraps atoms already known to be sorted, distinct and valid.
    pub(crate) fn from_sorted_unchecked(kind: MeasureKind, atoms: Vec<Atom<F>>) -> Self {
        debug_assert!(atoms.windows(2).all(|w| w[0].location < w[1].location));
        Self { kind, atoms }
    }
}

fn sort_atoms<F: Real>(atoms: &mut [Atom<F>]) {
    atoms.sort_by(|a, b| {
        a.location
            .partial_cmp(&b.location)
            .expect("validated locations")
    });
}

/// Neumaier-compensated summation.
pub fn compensated_sum<F: Real>(values: impl IntoIterator<Item = F>) -> F {
    let mut sum = F::zero();
    let mut c = F::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c = c + ((sum - t) + v);
        } else {
            c = c + ((v - t) + sum);
        }
        sum = t;
    }
    sum + c
}
