//! Level/point incidence of a finite configuration, closed paths, and exact
//! ridge-sum interpolation.
//!
//! For each direction `aⁱ` the points are grouped by their projection level
//! `aⁱ·xʲ`. Stacking one row per (direction, level) gives a 0/1 matrix `M`
//! with one column per point. A weight vector `λ` with `M λ = 0` is a signed
//! measure on the points whose every projection vanishes, so it annihilates
//! all ridge sums `Σ gᵢ(aⁱ·x)`. Conversely `Mᵀ u = f` is solvable for every
//! `f` exactly when no such `λ` exists.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix};
use crate::measure::{dot, Direction, DiscreteMeasure, Point};
use crate::rational::{self, Rational};

/// Distinct points and `k ≥ 1` nonzero directions of a common dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfig {
    points: Vec<Point>,
    dirs: Vec<Direction>,
}

impl PointConfig {
    pub fn new(points: Vec<Point>, dirs: Vec<Direction>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Empty("point"));
        };
        if dirs.is_empty() {
            return Err(Error::Empty("direction"));
        }
        let d = first.dim();
        for p in &points {
            if p.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
            }
        }
        for a in &dirs {
            if a.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: a.dim() });
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&i, &j| points[i].cmp(&points[j]));
        for w in order.windows(2) {
            if points[w[0]] == points[w[1]] {
                let (first, second) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(Error::DuplicatePoint { first, second });
            }
        }
        Ok(PointConfig { points, dirs })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn dirs(&self) -> &[Direction] {
        &self.dirs
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Configuration restricted to the given point indices.
    pub fn restrict(&self, indices: &[usize]) -> Result<PointConfig> {
        PointConfig::new(indices.iter().map(|&i| self.points[i].clone()).collect(), self.dirs.clone())
    }
}

/// Points sharing one projection level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelGroup {
    pub level: Rational,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct IncidenceStructure {
    groups: Vec<Vec<LevelGroup>>,
    membership: Vec<Vec<usize>>,
    n: usize,
}

impl IncidenceStructure {
    /// Level groups of direction `i`, sorted by level.
    pub fn groups(&self, i: usize) -> &[LevelGroup] {
        &self.groups[i]
    }

    pub fn directions(&self) -> usize {
        self.groups.len()
    }

    /// `sᵢ`, the number of distinct levels of direction `i`.
    pub fn level_count(&self, i: usize) -> usize {
        self.groups[i].len()
    }

    /// Index of the level group of direction `i` containing point `j`.
    pub fn group_of(&self, i: usize, j: usize) -> usize {
        self.membership[i][j]
    }

    /// `Σᵢ sᵢ`, the row count of the incidence matrix.
    pub fn row_count(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn column_count(&self) -> usize {
        self.n
    }

    /// Rows in (direction, level) order.
    pub fn rows(&self) -> impl Iterator<Item = &LevelGroup> {
        self.groups.iter().flatten()
    }

    /// The stacked 0/1 matrix, `Σᵢ sᵢ × n`.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        self.rows()
            .map(|g| {
                let mut row = vec![0u8; self.n];
                for &j in &g.members {
                    row[j] = 1;
                }
                row
            })
            .collect()
    }
}

pub fn build_incidence(cfg: &PointConfig) -> IncidenceStructure {
    let n = cfg.points.len();
    let mut groups = Vec::with_capacity(cfg.dirs.len());
    let mut membership = Vec::with_capacity(cfg.dirs.len());
    for a in &cfg.dirs {
        let mut projected: Vec<(Rational, usize)> =
            cfg.points.iter().enumerate().map(|(j, p)| (dot(a.coords(), p.coords()), j)).collect();
        projected.sort();
        let mut dir_groups: Vec<LevelGroup> = Vec::new();
        let mut member_of = vec![0; n];
        for (level, j) in projected {
            match dir_groups.last_mut() {
                Some(g) if g.level == level => g.members.push(j),
                _ => dir_groups.push(LevelGroup { level, members: vec![j] }),
            }
            member_of[j] = dir_groups.len() - 1;
        }
        groups.push(dir_groups);
        membership.push(member_of);
    }
    IncidenceStructure { groups, membership, n }
}

/// A nonzero measure on configuration points annihilating every direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedPathCertificate {
    pub measure: DiscreteMeasure,
    /// Indices of the support points in the originating configuration.
    pub indices: Vec<usize>,
}

impl ClosedPathCertificate {
    /// Exact re-validation against a direction set.
    pub fn validate(&self, dirs: &[Direction]) -> Result<bool> {
        Ok(self.measure.len() >= 2 && self.measure.is_annihilating(dirs)?)
    }
}

/// Finds a closed path, i.e. a nonzero integer solution of system `M λ = 0`,
/// restricted to its nonzero coordinates.
///
/// The null vector is the dependency of the first dependent column when the
/// point columns are scanned from last to first, reduced to coprime integers
/// with a positive weight on the lexicographically smallest support point.
pub fn find_closed_path(cfg: &PointConfig) -> Option<ClosedPathCertificate> {
    let inc = build_incidence(cfg);
    let rows: Vec<Vec<BigInt>> =
        inc.matrix().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
    let v = linalg::first_null_vector(&rows, inc.column_count())?;
    let indices: Vec<usize> = (0..v.len()).filter(|&j| !v[j].is_zero()).collect();
    let atoms = indices.iter().map(|&j| (cfg.points[j].clone(), Rational::from_integer(v[j].clone())));
    let mut measure = DiscreteMeasure::from_atoms(atoms).expect("configuration points share a dimension");
    if measure.weights().next().is_some_and(Signed::is_negative) {
        measure = measure.scale(&rational::int(-1));
    }
    Some(ClosedPathCertificate { measure, indices })
}

/// Outcome of the finite density test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DensityVerdict {
    Dense,
    NotDense(ClosedPathCertificate),
}

impl DensityVerdict {
    pub fn is_dense(&self) -> bool {
        matches!(self, DensityVerdict::Dense)
    }
}

/// Ridge sums (and networks with weights on the directions) are dense on the
/// configuration iff it contains no closed path.
pub fn density_verdict(cfg: &PointConfig) -> DensityVerdict {
    match find_closed_path(cfg) {
        None => DensityVerdict::Dense,
        Some(cert) => DensityVerdict::NotDense(cert),
    }
}

/// `Σᵢ gᵢ(aⁱ·x)` with each `gᵢ` known on the levels of direction `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RidgeSum {
    dirs: Vec<Direction>,
    tables: Vec<Vec<(Rational, Rational)>>,
}

impl RidgeSum {
    pub fn dirs(&self) -> &[Direction] {
        &self.dirs
    }

    /// `(level, gᵢ(level))` pairs of direction `i`, sorted by level.
    pub fn table(&self, i: usize) -> &[(Rational, Rational)] {
        &self.tables[i]
    }

    /// Evaluates the sum; fails when some projection of `x` is not a tabulated level.
    pub fn eval(&self, x: &Point) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (a, table) in self.dirs.iter().zip(&self.tables) {
            let t = a.project(x)?;
            let idx = table
                .binary_search_by(|(l, _)| l.cmp(&t))
                .map_err(|_| Error::InvalidParameter(format!("level {t} is not tabulated")))?;
            acc += &table[idx].1;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug)]
pub struct RidgeFit {
    pub sum: RidgeSum,
    /// `max_j |f(xʲ) − Σᵢ gᵢ(aⁱ·xʲ)|`, exact.
    pub residual: Rational,
}

/// Exact minimum-norm least-squares solver for `Mᵀ u = f` on one configuration.
///
/// The pseudo-inverse is computed once, so fitting many value vectors costs a
/// matrix-vector product each.
pub struct RidgeSolver {
    cfg: PointConfig,
    incidence: IncidenceStructure,
    design: RatMatrix,
    pinv: RatMatrix,
}

impl RidgeSolver {
    pub fn new(cfg: &PointConfig) -> Self {
        let incidence = build_incidence(cfg);
        let m = incidence.matrix();
        let n = incidence.column_count();
        let design = RatMatrix::from_rows(
            (0..n).map(|j| m.iter().map(|row| rational::int(row[j] as i64)).collect()).collect(),
        );
        let pinv = design.pseudo_inverse();
        RidgeSolver { cfg: cfg.clone(), incidence, design, pinv }
    }

    pub fn incidence(&self) -> &IncidenceStructure {
        &self.incidence
    }

    pub fn fit(&self, values: &[Rational]) -> Result<RidgeFit> {
        let n = self.cfg.len();
        if values.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: values.len() });
        }
        let u = self.pinv.mul_vec(values);
        let fitted = self.design.mul_vec(&u);
        let residual = fitted
            .iter()
            .zip(values)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero);
        let mut tables = Vec::with_capacity(self.incidence.directions());
        let mut u = u.into_iter();
        for i in 0..self.incidence.directions() {
            tables.push(self.incidence.groups(i).iter().map(|g| (g.level.clone(), u.next().unwrap())).collect());
        }
        Ok(RidgeFit { sum: RidgeSum { dirs: self.cfg.dirs.clone(), tables }, residual })
    }
}

/// Least-squares ridge interpolation of `values` on the configuration points.
/// The residual is zero for every `values` iff the configuration has no closed path.
pub fn interpolate_ridge(cfg: &PointConfig, values: &[Rational]) -> Result<RidgeFit> {
    if values.len() != cfg.len() {
        return Err(Error::LengthMismatch { expected: cfg.len(), found: values.len() });
    }
    RidgeSolver::new(cfg).fit(values)
}
