//! Finitely supported signed measures and their images under linear projections.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A point of `ℝᵈ` with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(Vec<Rational>);

impl Point {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("coordinate"));
        }
        Ok(Point(coords))
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| rational::int(c)).collect())
    }

    /// Rationalizes each coordinate by its exact binary expansion.
    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        Point::new(coords.iter().map(|&c| rational::from_f64(c)).collect::<Result<_>>()?)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational::to_f64).collect()
    }

    pub fn translate(&self, shift: &[Rational]) -> Result<Point> {
        check_dim(self.dim(), shift.len())?;
        Ok(Point(self.0.iter().zip(shift).map(|(a, b)| a + b).collect()))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A nonzero vector `a` defining the projection `x ↦ a·x`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction(Vec<Rational>);

impl Direction {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("coordinate"));
        }
        if coords.iter().all(Zero::is_zero) {
            return Err(Error::ZeroDirection { index: 0 });
        }
        Ok(Direction(coords))
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Direction::new(coords.iter().map(|&c| rational::int(c)).collect())
    }

    /// The `i`-th coordinate direction of `ℝᵈ`.
    pub fn axis(d: usize, i: usize) -> Self {
        Direction((0..d).map(|j| rational::int((i == j) as i64)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    /// `a·x`, exact.
    pub fn project(&self, x: &Point) -> Result<Rational> {
        check_dim(self.dim(), x.dim())?;
        Ok(dot(&self.0, &x.0))
    }

    pub fn scaled(&self, s: &Rational) -> Result<Direction> {
        if s.is_zero() {
            return Err(Error::InvalidParameter("direction scale must be nonzero".into()));
        }
        Ok(Direction(self.0.iter().map(|c| c * s).collect()))
    }

    /// True when `self` and `other` span the same line.
    pub fn is_parallel_to(&self, other: &Direction) -> bool {
        let (a, b) = (&self.0, &other.0);
        if a.len() != b.len() {
            return false;
        }
        (0..a.len()).all(|i| (i + 1..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Point(self.0.clone()))
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `Σ λⱼ δ_{xʲ}` in canonical form: support sorted lexicographically, pairwise
/// distinct, no zero weights. The zero measure has empty support.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiscreteMeasure {
    atoms: Vec<(Point, Rational)>,
}

impl DiscreteMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac(p: Point) -> Self {
        DiscreteMeasure { atoms: vec![(p, rational::int(1))] }
    }

    /// Builds the canonical form; weights on repeated points are summed.
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Point, Rational)>,
    {
        let mut merged: BTreeMap<Point, Rational> = BTreeMap::new();
        let mut dim = None;
        for (p, w) in atoms {
            match dim {
                None => dim = Some(p.dim()),
                Some(d) => check_dim(d, p.dim())?,
            }
            *merged.entry(p).or_insert_with(Rational::zero) += w;
        }
        Ok(DiscreteMeasure {
            atoms: merged.into_iter().filter(|(_, w)| !w.is_zero()).collect(),
        })
    }

    pub fn atoms(&self) -> &[(Point, Rational)] {
        &self.atoms
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> {
        self.atoms.iter().map(|(p, _)| p)
    }

    pub fn weights(&self) -> impl Iterator<Item = &Rational> {
        self.atoms.iter().map(|(_, w)| w)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.atoms.first().map(|(p, _)| p.dim())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        DiscreteMeasure {
            atoms: self.atoms.iter().map(|(p, w)| (p.clone(), w * s)).collect(),
        }
    }

    /// The image measure `πₐ ∘ μ` on the real line, `πₐ(x) = a·x`.
    pub fn pushforward(&self, a: &Direction) -> Result<Projected1DMeasure> {
        if let Some(d) = self.dim() {
            check_dim(a.dim(), d)?;
        }
        Projected1DMeasure::from_atoms(self.atoms.iter().map(|(p, w)| (dot(&a.0, &p.0), w.clone())))
    }

    /// `‖μ‖ = Σ |λⱼ|`.
    pub fn total_variation(&self) -> Rational {
        self.atoms.iter().fold(Rational::zero(), |acc, (_, w)| acc + w.abs())
    }

    /// `∫ f dμ = Σ λⱼ f(xʲ)`, exact.
    pub fn integrate<F>(&self, f: F) -> Rational
    where
        F: Fn(&Point) -> Rational,
    {
        self.atoms.iter().fold(Rational::zero(), |acc, (p, w)| acc + w * f(p))
    }

    /// Integral of a real-valued function; weights are rounded to `f64`.
    pub fn integrate_real<F>(&self, f: F) -> f64
    where
        F: Fn(&Point) -> f64,
    {
        self.atoms.iter().map(|(p, w)| rational::to_f64(w) * f(p)).sum()
    }

    /// Like [`integrate`](Self::integrate) for fallible integrands; the first
    /// failure is returned unchanged.
    pub fn try_integrate<F, E>(&self, f: F) -> Result<Rational, E>
    where
        F: Fn(&Point) -> Result<Rational, E>,
    {
        let mut acc = Rational::zero();
        for (p, w) in &self.atoms {
            acc += w * f(p)?;
        }
        Ok(acc)
    }

    /// True iff every projection `πₐ ∘ μ`, `a ∈ dirs`, is the zero measure.
    pub fn is_annihilating(&self, dirs: &[Direction]) -> Result<bool> {
        if dirs.is_empty() {
            return Err(Error::Empty("direction"));
        }
        for a in dirs {
            if !self.pushforward(a)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    points: Vec<PointRepr>,
    #[serde(with = "rational::serde_vec")]
    weights: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct PointRepr(#[serde(with = "rational::serde_vec")] Vec<Rational>);

impl Serialize for DiscreteMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            points: self.atoms.iter().map(|(p, _)| PointRepr(p.0.clone())).collect(),
            weights: self.atoms.iter().map(|(_, w)| w.clone()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MeasureRepr::deserialize(d)?;
        if repr.points.len() != repr.weights.len() {
            return Err(D::Error::custom("points and weights differ in length"));
        }
        let atoms = repr
            .points
            .into_iter()
            .map(|p| Point::new(p.0))
            .zip(repr.weights)
            .map(|(p, w)| p.map(|p| (p, w)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        DiscreteMeasure::from_atoms(atoms).map_err(D::Error::custom)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational::serde_vec::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = rational::serde_vec::deserialize(d)?;
        Point::new(v).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational::serde_vec::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = rational::serde_vec::deserialize(d)?;
        Direction::new(v).map_err(serde::de::Error::custom)
    }
}

/// A signed measure on the real line with finitely many atoms; levels are
/// strictly increasing and weights nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Projected1DMeasure {
    atoms: Vec<(Rational, Rational)>,
}

impl Projected1DMeasure {
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (level, w) in atoms {
            *merged.entry(level).or_insert_with(Rational::zero) += w;
        }
        Ok(Projected1DMeasure {
            atoms: merged.into_iter().filter(|(_, w)| !w.is_zero()).collect(),
        })
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn levels(&self) -> impl Iterator<Item = &Rational> {
        self.atoms.iter().map(|(l, _)| l)
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_variation(&self) -> Rational {
        self.atoms.iter().fold(Rational::zero(), |acc, (_, w)| acc + w.abs())
    }

    pub fn integrate<G>(&self, g: G) -> Rational
    where
        G: Fn(&Rational) -> Rational,
    {
        self.atoms.iter().fold(Rational::zero(), |acc, (l, w)| acc + w * g(l))
    }

    /// Image under `t ↦ t`; used to check that repeated projection factors
    /// through the identity on the line.
    pub fn as_measure(&self) -> DiscreteMeasure {
        DiscreteMeasure {
            atoms: self.atoms.iter().map(|(l, w)| (Point(vec![l.clone()]), w.clone())).collect(),
        }
    }
}
