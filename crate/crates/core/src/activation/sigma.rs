use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::enumeration::decode_poly;
use super::poly::{IntegerPoly, RationalPoly};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Parameters of the activation: segment length `α`, domain half-width `l`
/// and the sharpness `κ` of the flat step `e^{−κ/s}` used on the gaps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationSpec {
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    #[serde(with = "rational::serde_str")]
    pub l: Rational,
    #[serde(with = "rational::serde_str")]
    pub sharpness: Rational,
}

impl ActivationSpec {
    pub fn new(alpha: Rational, l: Rational) -> Result<Self> {
        Self::with_sharpness(alpha, l, rational::int(1))
    }

    pub fn with_sharpness(alpha: Rational, l: Rational, sharpness: Rational) -> Result<Self> {
        for (name, v) in [("alpha", &alpha), ("l", &l), ("sharpness", &sharpness)] {
            if !v.is_positive() {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        Ok(ActivationSpec { alpha, l, sharpness })
    }

    /// `λ = α/(2l)`.
    pub fn lambda(&self) -> Rational {
        &self.alpha / (rational::int(2) * &self.l)
    }

    /// `r = α/2 − 2mα`, so that `σ(λt − r) = pₘ(t)` for `t ∈ [−l, l]`.
    pub fn shift(&self, m: &BigUint) -> Rational {
        // α(1 − 4m)/2
        let k = Rational::new_raw(BigInt::from(1) - big(m) * 4, BigInt::from(2));
        rational::fast_mul(&k, &self.alpha)
    }

    /// Start of segment `m`, `(2m − 1)α`.
    pub fn segment_start(&self, m: &BigUint) -> Rational {
        rational::fast_mul(&Rational::from_integer(big(m) * 2 - 1), &self.alpha)
    }

    /// `P̃ₘ`'s inner argument `(2l/α)t − 4ml + l`, i.e. `(2l/α)(t − (2m − 1)α) − l`.
    pub fn inner_argument(&self, m: &BigUint, t: &Rational) -> Rational {
        let offset = rational::fast_sub(t, &self.segment_start(m));
        let scale = rational::int(2) * &self.l / &self.alpha;
        rational::fast_mul(&scale, &offset) - &self.l
    }

    /// `(t − 2mα)/α`, the position inside gap `m`.
    pub fn gap_position(&self, m: &BigUint, t: &Rational) -> Rational {
        let start = rational::fast_mul(&Rational::from_integer(big(m) * 2), &self.alpha);
        rational::fast_div(&rational::fast_sub(t, &start), &self.alpha)
    }

    pub fn classify(&self, t: &Rational) -> Region {
        let q = rational::fast_div(t, &self.alpha);
        if q < rational::int(1) {
            return Region::Left;
        }
        let k = q.floor().to_integer().to_biguint().expect("q ≥ 1");
        if k.is_odd() {
            Region::Segment((k + 1u32) / 2u32)
        } else if q.is_integer() {
            Region::Segment(k / 2u32)
        } else {
            Region::Gap(k / 2u32)
        }
    }
}

fn big(m: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, m.clone())
}

/// Where `t` falls relative to the segments `[(2m−1)α, 2mα]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    /// `t < α`.
    Left,
    Segment(BigUint),
    /// Open gap `(2mα, (2m+1)α)` between segments `m` and `m+1`.
    Gap(BigUint),
}

/// A value of σ: exact on segments (and on the zero tail), real elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaValue {
    Exact(Rational),
    Real(f64),
}

impl SigmaValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            SigmaValue::Exact(q) => rational::to_f64(q),
            SigmaValue::Real(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            SigmaValue::Exact(q) => Some(q),
            SigmaValue::Real(_) => None,
        }
    }
}

/// `ψ(s) = e^{−κ/s}` for `s > 0`, else 0.
fn psi(s: f64, kappa: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-kappa / s).exp()
    }
}

/// Flat C∞ step: 0 for `s ≤ 0`, 1 for `s ≥ 1`, all derivatives vanish at both ends.
pub fn flat_step(s: f64, kappa: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let (a, b) = (psi(s, kappa), psi(1.0 - s, kappa));
    a / (a + b)
}

/// Evaluator for σ that caches decoded polynomials by index.
#[derive(Debug)]
pub struct SigmaEvaluator {
    spec: ActivationSpec,
    kappa: f64,
    cache: Mutex<HashMap<BigUint, Arc<IntegerPoly>>>,
}

impl Clone for SigmaEvaluator {
    fn clone(&self) -> Self {
        SigmaEvaluator::new(self.spec.clone())
    }
}

impl SigmaEvaluator {
    pub fn new(spec: ActivationSpec) -> Self {
        let kappa = rational::to_f64(&spec.sharpness);
        SigmaEvaluator { spec, kappa, cache: Mutex::new(HashMap::new()) }
    }

    pub fn spec(&self) -> &ActivationSpec {
        &self.spec
    }

    /// Seeds the cache with a known `pₘ`.
    pub fn insert(&self, m: BigUint, p: &RationalPoly) {
        self.cache.lock().expect("cache lock").insert(m, Arc::new(p.integer_form()));
    }

    fn poly(&self, m: &BigUint) -> Arc<IntegerPoly> {
        if let Some(p) = self.cache.lock().expect("cache lock").get(m) {
            return p.clone();
        }
        let p = Arc::new(decode_poly(m).integer_form());
        self.cache.lock().expect("cache lock").insert(m.clone(), p.clone());
        p
    }

    /// `P̃ₘ(t) = pₘ((2l/α)t − 4ml + l)`, exactly.
    pub fn composed(&self, m: &BigUint, t: &Rational) -> Rational {
        self.poly(m).eval(&self.spec.inner_argument(m, t))
    }

    fn composed_f64(&self, m: &BigUint, t: &Rational) -> f64 {
        self.poly(m).eval_to_f64(&self.spec.inner_argument(m, t))
    }

    pub fn eval(&self, t: &Rational) -> SigmaValue {
        let spec = &self.spec;
        match spec.classify(t) {
            Region::Segment(m) => SigmaValue::Exact(self.composed(&m, t)),
            Region::Gap(m) => {
                let s = spec.gap_position(&m, t);
                let w = flat_step(rational::to_f64(&s), self.kappa);
                let lo = self.composed_f64(&m, t);
                let hi = self.composed_f64(&(&m + 1u32), t);
                SigmaValue::Real(w * hi + (1.0 - w) * lo)
            }
            Region::Left => {
                let s = t - &spec.alpha + rational::int(1);
                if !s.is_positive() {
                    return SigmaValue::Exact(Rational::zero());
                }
                let w = flat_step(rational::to_f64(&s), self.kappa);
                let one = BigUint::from(1u32);
                SigmaValue::Real(self.composed_f64(&one, t) * w)
            }
        }
    }

    pub fn eval_f64(&self, t: f64) -> Result<f64> {
        Ok(self.eval(&rational::from_f64(t)?).to_f64())
    }
}

/// One-shot evaluation of σ at `t`.
pub fn sigma_eval(spec: &ActivationSpec, t: &Rational) -> SigmaValue {
    SigmaEvaluator::new(spec.clone()).eval(t)
}

/// Segment index as `u64` when it fits (for reporting).
pub fn region_index(r: &Region) -> Option<u64> {
    match r {
        Region::Left => None,
        Region::Segment(m) | Region::Gap(m) => m.to_u64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn spec() -> ActivationSpec {
        ActivationSpec::new(int(1), int(1)).unwrap()
    }

    #[test]
    fn classification() {
        let s = ActivationSpec::new(ratio(1, 2), int(1)).unwrap();
        assert_eq!(s.classify(&ratio(1, 4)), Region::Left);
        assert_eq!(s.classify(&ratio(1, 2)), Region::Segment(1u32.into()));
        assert_eq!(s.classify(&int(1)), Region::Segment(1u32.into()));
        assert_eq!(s.classify(&ratio(5, 4)), Region::Gap(1u32.into()));
        assert_eq!(s.classify(&ratio(3, 2)), Region::Segment(2u32.into()));
        assert_eq!(s.classify(&int(2)), Region::Segment(2u32.into()));
    }

    #[test]
    fn segment_endpoints() {
        let s = spec();
        let ev = SigmaEvaluator::new(s.clone());
        for m in 1u32..=100 {
            let p = decode_poly(&BigUint::from(m));
            let mm = BigUint::from(m);
            let start = s.segment_start(&mm);
            let end = &start + &s.alpha;
            assert_eq!(ev.eval(&start), SigmaValue::Exact(p.eval(&-s.l.clone())));
            assert_eq!(ev.eval(&end), SigmaValue::Exact(p.eval(&s.l)));
        }
    }

    #[test]
    fn zero_below_left_cutoff() {
        let s = spec();
        assert_eq!(sigma_eval(&s, &(&s.alpha - int(2))), SigmaValue::Exact(int(0)));
    }

    #[test]
    fn mid_gap_is_the_half_blend() {
        let s = spec();
        let ev = SigmaEvaluator::new(s.clone());
        for m in 1u32..=30 {
            let mm = BigUint::from(m);
            let t = (int(2) * int(m as i64) + ratio(1, 2)) * &s.alpha;
            let lo = rational::to_f64(&ev.composed(&mm, &t));
            let hi = rational::to_f64(&ev.composed(&(&mm + 1u32), &t));
            let v = ev.eval(&t).to_f64();
            assert!((v - 0.5 * (lo + hi)).abs() <= 1e-12 * (1.0 + lo.abs() + hi.abs()));
            assert!(v >= lo.min(hi) - 1e-12 && v <= lo.max(hi) + 1e-12);
        }
    }

    #[test]
    fn flat_step_shape() {
        assert_eq!(flat_step(0.0, 1.0), 0.0);
        assert_eq!(flat_step(1.0, 1.0), 1.0);
        assert!((flat_step(0.5, 1.0) - 0.5).abs() < 1e-15);
        assert!(flat_step(0.01, 1.0) < 1e-40);
        for i in 1..100 {
            let s = i as f64 / 100.0;
            assert!((flat_step(s, 1.0) + flat_step(1.0 - s, 1.0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(ActivationSpec::new(int(0), int(1)).is_err());
        assert!(ActivationSpec::new(int(1), int(-1)).is_err());
    }
}
