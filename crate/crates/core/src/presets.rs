//! Named fixture configurations.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::bolts::{BoltGenerator, LineShuttle, Link};
use crate::error::{Error, Result};
use crate::incidence::PointConfig;
use crate::measure::{Direction, Point};
use crate::rational::{int, ratio, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Five points in ℝ³ with the coordinate directions; contains a closed path.
    Paper5pt,
    /// The infinite bolt shuttling between the lines `x = 0` and `x = 3y`.
    PaperOrbit,
    /// Two parallel segments with directions `(1,1)`, `(1,−1)`; dense.
    ParallelSegments,
    /// Samples of the moment curve `(t, t², t³)` with the coordinate directions; dense.
    MonotoneCurve,
    /// The 3×3 integer grid with the coordinate directions; not dense.
    Grid3x3,
}

impl Preset {
    pub const ALL: [Preset; 5] =
        [Preset::Paper5pt, Preset::PaperOrbit, Preset::ParallelSegments, Preset::MonotoneCurve, Preset::Grid3x3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Paper5pt => "paper-5pt",
            Preset::PaperOrbit => "paper-orbit",
            Preset::ParallelSegments => "parallel-segments",
            Preset::MonotoneCurve => "monotone-curve",
            Preset::Grid3x3 => "grid-3x3",
        }
    }

    /// The preset as a finite configuration; the orbit is truncated to `orbit_len` points.
    pub fn config(self, orbit_len: usize) -> Result<PointConfig> {
        match self {
            Preset::Paper5pt => Ok(paper_5pt()),
            Preset::PaperOrbit => {
                let gen = paper_orbit();
                let bolt = gen.generate(orbit_len)?;
                PointConfig::new(bolt.points, vec![gen.a1, gen.a2])
            }
            Preset::ParallelSegments => Ok(parallel_segments()),
            Preset::MonotoneCurve => Ok(monotone_curve()),
            Preset::Grid3x3 => Ok(grid_3x3()),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown preset {s:?}")))
    }
}

fn axes(d: usize) -> Vec<Direction> {
    (0..d).map(|i| Direction::axis(d, i)).collect()
}

pub fn paper_5pt() -> PointConfig {
    let pts = [[0, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 1]].iter().map(|p| Point::from_ints(p)).collect();
    PointConfig::new(pts, axes(3)).expect("valid preset")
}

/// Seeds `(0,0)`, `(1,−1)` with directions `(1,1)`, `(1,−1)`; each further
/// point is where the level line of the previous point meets `x = 0` or
/// `x = 3y`, whichever the previous point is not on.
pub fn paper_orbit() -> BoltGenerator {
    BoltGenerator {
        a1: Direction::from_ints(&[1, 1]).expect("nonzero"),
        a2: Direction::from_ints(&[1, -1]).expect("nonzero"),
        seed: vec![Point::from_ints(&[0, 0]), Point::from_ints(&[1, -1])],
        first_link: Link::First,
        rule: Arc::new(LineShuttle {
            line_a: (vec![int(1), int(0)], int(0)),
            line_b: (vec![int(1), int(-3)], int(0)),
        }),
    }
}

/// `{(j/10, 0)} ∪ {(j/10, 1/2)}` for `j = 0…10`.
pub fn parallel_segments() -> PointConfig {
    let mut pts = Vec::new();
    for y in [int(0), ratio(1, 2)] {
        for j in 0..=10 {
            pts.push(Point::new(vec![ratio(j, 10), y.clone()]).expect("two coordinates"));
        }
    }
    let dirs = vec![Direction::from_ints(&[1, 1]).expect("nonzero"), Direction::from_ints(&[1, -1]).expect("nonzero")];
    PointConfig::new(pts, dirs).expect("valid preset")
}

/// `(t, t², t³)` for `t = j/16`, `j = 0…16`.
pub fn monotone_curve() -> PointConfig {
    let pts = (0..=16)
        .map(|j| {
            let t: Rational = ratio(j, 16);
            Point::new(vec![t.clone(), &t * &t, &t * &t * &t]).expect("three coordinates")
        })
        .collect();
    PointConfig::new(pts, axes(3)).expect("valid preset")
}

pub fn grid_3x3() -> PointConfig {
    let pts = (0..3).flat_map(|i| (0..3).map(move |j| Point::from_ints(&[i, j]))).collect();
    PointConfig::new(pts, axes(2)).expect("valid preset")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::find_closed_path;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("nope".parse::<Preset>().is_err());
    }

    #[test]
    fn density_of_presets() {
        assert!(find_closed_path(&paper_5pt()).is_some());
        assert!(find_closed_path(&grid_3x3()).is_some());
        assert!(find_closed_path(&parallel_segments()).is_none());
        assert!(find_closed_path(&monotone_curve()).is_none());
        assert!(find_closed_path(&Preset::PaperOrbit.config(40).unwrap()).is_none());
    }

    #[test]
    fn sizes() {
        assert_eq!(parallel_segments().len(), 22);
        assert_eq!(monotone_curve().len(), 17);
        assert_eq!(grid_3x3().len(), 9);
    }
}
