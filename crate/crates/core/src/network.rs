//! Single hidden layer networks `Σ cᵢ σ(wⁱ·x − θᵢ)` and their JSON form.
//!
//! Parameters are exact rationals and serialize as `"p/q"` strings; only the
//! reported error fields are decimal floats.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::activation::{ActivationSpec, RationalPoly, SigmaEvaluator, SigmaValue};
use crate::error::{Error, Result};
use crate::measure::{dot, Point};
use crate::netapprox::SigmaDescriptor;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "rational::serde_str")]
    pub c: Rational,
    #[serde(with = "rational::serde_vec")]
    pub w: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub theta: Rational,
}

impl Term {
    /// `w·x − θ`, exactly.
    pub fn argument(&self, x: &Point) -> Result<Rational> {
        if x.dim() != self.w.len() {
            return Err(Error::DimensionMismatch { expected: self.w.len(), found: x.dim() });
        }
        Ok(rational::fast_sub(&dot(&self.w, x.coords()), &self.theta))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Activation {
    /// The polynomial-enumerating activation.
    Superexpressive(ActivationSpec),
    /// A fixed real activation.
    Oracle { sigma: SigmaDescriptor },
}

/// Errors recorded when the network was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub ridge_residual: f64,
    /// Per-direction approximation errors of the ridge profiles.
    pub component_errors: Vec<f64>,
    /// Replayed max error over the configuration.
    pub max_error: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Network {
    pub activation: Activation,
    pub terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ErrorReport>,
    #[serde(skip)]
    evaluator: OnceLock<SigmaEvaluator>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.activation == other.activation && self.terms == other.terms && self.report == other.report
    }
}

impl Network {
    pub fn new(activation: Activation, terms: Vec<Term>) -> Self {
        Network { activation, terms, report: None, evaluator: OnceLock::new() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn evaluator(&self, spec: &ActivationSpec) -> &SigmaEvaluator {
        self.evaluator.get_or_init(|| SigmaEvaluator::new(spec.clone()))
    }

    /// Registers a known `pₘ` so evaluation skips decoding it.
    pub fn remember_poly(&self, m: BigUint, p: &RationalPoly) {
        if let Activation::Superexpressive(spec) = &self.activation {
            self.evaluator(spec).insert(m, p);
        }
    }

    /// The exact network value, when every term lands where σ is exact.
    pub fn eval_exact(&self, x: &Point) -> Result<Option<Rational>> {
        let Activation::Superexpressive(spec) = &self.activation else {
            return Ok(None);
        };
        let ev = self.evaluator(spec);
        let mut sum = Rational::zero();
        for term in &self.terms {
            match ev.eval(&term.argument(x)?) {
                SigmaValue::Exact(v) => sum += &term.c * v,
                SigmaValue::Real(_) => return Ok(None),
            }
        }
        Ok(Some(sum))
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        match &self.activation {
            Activation::Superexpressive(spec) => {
                if let Some(v) = self.eval_exact(x)? {
                    return Ok(rational::to_f64(&v));
                }
                let ev = self.evaluator(spec);
                let mut acc = Neumaier::default();
                for term in &self.terms {
                    acc.add(rational::to_f64(&term.c) * ev.eval(&term.argument(x)?).to_f64());
                }
                Ok(acc.total())
            }
            Activation::Oracle { sigma } => {
                let f = sigma.oracle()?;
                let mut acc = Neumaier::default();
                for term in &self.terms {
                    let u = rational::to_f64(&term.argument(x)?);
                    acc.add(rational::to_f64(&term.c) * (f.eval)(u));
                }
                Ok(acc.total())
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Compensated summation.
#[derive(Default)]
pub(crate) struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.c
    }
}
