//! Exact rational scalars and the conversions used at the crate boundary.
//!
//! Every geometric quantity in the crate (coordinates, directions, levels,
//! measure weights, thresholds) is a [`Rational`]. Floating point values enter
//! only through [`from_f64`], which uses the exact binary expansion of the
//! `f64`: `0.1` becomes `3602879701896397/36028797018963968`, never `1/10`.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact binary expansion of a finite `f64`.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite number {x}")))
}

/// Nearest `f64` (round-to-even); saturates to ±inf for huge magnitudes.
pub fn to_f64(q: &Rational) -> f64 {
    ratio_to_f64(q.numer(), q.denom())
}

/// Converts an unreduced fraction without computing a gcd.
pub fn ratio_to_f64(numer: &BigInt, denom: &BigInt) -> f64 {
    if numer.is_zero() {
        return 0.0;
    }
    Rational::new_raw(numer.clone(), denom.clone())
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, `"p"` or a plain decimal literal such as `"-1.25"`.
///
/// Decimal literals are read exactly in base ten, so `"0.1"` is `1/10`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(fast_new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut n: BigInt = if digits.is_empty() {
            return Err(bad());
        } else {
            digits.parse().map_err(|_| bad())?
        };
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(fast_new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical textual form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format(q: &Rational) -> String {
    q.to_string()
}

/// Best rational approximation of `x` whose denominator does not exceed
/// `max_denom`, taken from the convergents and semiconvergents of the
/// continued fraction of `x`. Returns `x` itself when its denominator is
/// already within the bound.
pub fn best_approximation(x: &Rational, max_denom: &BigInt) -> Rational {
    assert!(max_denom.is_positive(), "denominator bound must be positive");
    if x.denom() <= max_denom {
        return x.clone();
    }
    // Convergents h/k with the usual recurrences.
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    loop {
        let (a, r) = num.div_mod_floor(&den);
        let k_next = &a * &k + &k_prev;
        if &k_next > max_denom {
            // Largest admissible semiconvergent, compared against the last convergent.
            let t = (max_denom - &k_prev) / &k;
            let semi = Rational::new(&t * &h + &h_prev, &t * &k + &k_prev);
            let conv = Rational::new(h.clone(), k.clone());
            let semi_err = (&semi - x).abs();
            let conv_err = (&conv - x).abs();
            return if t.is_positive() && semi_err < conv_err { semi } else { conv };
        }
        let h_next = &a * &h + &h_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        if r.is_zero() {
            return Rational::new(h, k);
        }
        num = std::mem::replace(&mut den, r);
    }
}

/// `n/d` in lowest terms. The gcd starts with one division of the larger
/// operand by the smaller, which keeps normalization cheap when a huge value
/// meets a small denominator (the generic gcd is quadratic in the big size).
pub fn fast_new(n: BigInt, d: BigInt) -> Rational {
    assert!(!d.is_zero(), "zero denominator");
    let (n, d) = if d.is_negative() { (-n, -d) } else { (n, d) };
    if n.is_zero() {
        return Rational::zero();
    }
    let (big, small) = if n.bits() >= d.bits() { (&n, &d) } else { (&d, &n) };
    let r = big.mod_floor(small);
    let g = if r.is_zero() { small.abs() } else { small.gcd(&r) };
    if g.is_one() {
        Rational::new_raw(n, d)
    } else {
        Rational::new_raw(n / &g, d / &g)
    }
}

pub fn fast_add(a: &Rational, b: &Rational) -> Rational {
    if a.denom() == b.denom() {
        return fast_new(a.numer() + b.numer(), a.denom().clone());
    }
    fast_new(a.numer() * b.denom() + b.numer() * a.denom(), a.denom() * b.denom())
}

pub fn fast_sub(a: &Rational, b: &Rational) -> Rational {
    if a.denom() == b.denom() {
        return fast_new(a.numer() - b.numer(), a.denom().clone());
    }
    fast_new(a.numer() * b.denom() - b.numer() * a.denom(), a.denom() * b.denom())
}

pub fn fast_mul(a: &Rational, b: &Rational) -> Rational {
    fast_new(a.numer() * b.numer(), a.denom() * b.denom())
}

pub fn fast_div(a: &Rational, b: &Rational) -> Rational {
    fast_new(a.numer() * b.denom(), a.denom() * b.numer())
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

pub fn is_negative(q: &Rational) -> bool {
    q.numer().sign() == Sign::Minus
}

/// Serde adapter storing a rational as its canonical string.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as a list of strings.
pub mod serde_vec {
    use super::Rational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&super::format(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| super::parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
