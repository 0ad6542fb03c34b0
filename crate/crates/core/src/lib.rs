//! Density analysis and constructive approximation for single hidden layer
//! networks whose weights are restricted to finitely many directions.
//!
//! For a finite point configuration `X` and directions `a¹,…,aᵏ` the crate
//! decides whether sums of ridge functions `Σ gᵢ(aⁱ·x)` (and hence networks
//! `Σ c σ(t aⁱ·x − θ)`) can reproduce every function on `X`. The obstruction is
//! a nonzero signed measure on `X` whose projection onto every direction
//! vanishes; on a finite set such measures are exactly the null vectors of the
//! level/point incidence matrix ("closed paths").
//!
//! Modules:
//! - [`measure`]: finitely supported signed measures, pushforwards, total variation.
//! - [`incidence`]: incidence structure, closed-path certificates, exact ridge interpolation.
//! - [`bolts`]: two-direction lightning bolts, orbits, alternating bolt measures.
//! - [`activation`]: the smooth activation that enumerates all rational polynomials,
//!   and the exactly-`k`-neuron network builder.
//! - [`netapprox`]: approximation with an arbitrary nonpolynomial activation and
//!   thresholds restricted to an open interval.
//! - [`network`]: the shared network representation and its JSON form.
//! - [`presets`]: named fixture configurations.

pub mod activation;
pub mod bolts;
pub mod error;
pub mod incidence;
pub mod linalg;
pub mod measure;
pub mod netapprox;
pub mod network;
pub mod presets;
pub mod rational;

pub use error::{Error, Result};
pub use measure::{Direction, DiscreteMeasure, Point, Projected1DMeasure};
pub use rational::Rational;
