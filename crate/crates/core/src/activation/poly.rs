use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// Polynomial with rational coefficients, constant term first. Trailing zero
/// coefficients are stripped, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Integer form `(Σ nᵢ tⁱ) / D` with a common denominator `D`.
    pub fn integer_form(&self) -> IntegerPoly {
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self.coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        IntegerPoly { nums, den }
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.integer_form().eval(t)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + rational::to_f64(c))
    }

    /// The interpolating polynomial of least degree through `(tⱼ, yⱼ)`.
    /// Nodes must be distinct.
    pub fn interpolate(nodes: &[(Rational, Rational)]) -> Self {
        let n = nodes.len();
        // Newton divided differences, then expand the nested form.
        let mut dd: Vec<Rational> = nodes.iter().map(|(_, y)| y.clone()).collect();
        for k in 1..n {
            for j in (k..n).rev() {
                dd[j] = (&dd[j] - &dd[j - 1]) / (&nodes[j].0 - &nodes[j - k].0);
            }
        }
        let mut coeffs: Vec<Rational> = Vec::with_capacity(n);
        for j in (0..n).rev() {
            // coeffs ← coeffs·(t − tⱼ) + dd[j]
            let mut next = vec![Rational::zero(); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * &nodes[j].0;
            }
            next[0] += &dd[j];
            coeffs = next;
        }
        Self::new(coeffs)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{}", rational::format(&a))?,
                _ if a.is_one() => {}
                _ => write!(f, "{}*", rational::format(&a))?,
            }
            match i {
                0 => {}
                1 => f.write_str("t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

impl From<RationalPoly> for Vec<String> {
    fn from(p: RationalPoly) -> Self {
        p.coeffs.iter().map(rational::format).collect()
    }
}

impl TryFrom<Vec<String>> for RationalPoly {
    type Error = crate::Error;
    fn try_from(v: Vec<String>) -> crate::Result<Self> {
        Ok(Self::new(v.iter().map(|s| rational::parse(s)).collect::<crate::Result<_>>()?))
    }
}

/// A polynomial scaled to integer coefficients; evaluation avoids gcds until
/// the end.
#[derive(Clone, Debug)]
pub struct IntegerPoly {
    pub nums: Vec<BigInt>,
    pub den: BigInt,
}

impl IntegerPoly {
    /// Unreduced `(numerator, denominator)` of the value at `t`.
    pub fn eval_parts(&self, t: &Rational) -> (BigInt, BigInt) {
        let Some(d) = self.nums.len().checked_sub(1) else {
            return (BigInt::zero(), BigInt::one());
        };
        let (a, b) = (t.numer(), t.denom());
        // Σ nᵢ aⁱ b^{d−i} by Horner, tracking b^{d−i}.
        let mut acc = self.nums[d].clone();
        let mut bp = BigInt::one();
        for i in (0..d).rev() {
            bp *= b;
            acc *= a;
            if !self.nums[i].is_zero() {
                acc += &self.nums[i] * &bp;
            }
        }
        (acc, bp * &self.den)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let (n, d) = self.eval_parts(t);
        Rational::new(n, d)
    }

    pub fn eval_to_f64(&self, t: &Rational) -> f64 {
        let (n, d) = self.eval_parts(t);
        rational::ratio_to_f64(&n, &d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn canonical_form_strips_trailing_zeros() {
        let p = RationalPoly::new(vec![int(1), int(0), int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(RationalPoly::new(vec![int(0)]).is_zero());
        assert_eq!(RationalPoly::zero().degree(), None);
    }

    #[test]
    fn exact_evaluation() {
        // 1/2 − t + (2/3) t²
        let p = RationalPoly::new(vec![ratio(1, 2), int(-1), ratio(2, 3)]);
        let t = ratio(3, 4);
        let naive = ratio(1, 2) - &t + ratio(2, 3) * &t * &t;
        assert_eq!(p.eval(&t), naive);
        assert_eq!(p.integer_form().eval_to_f64(&t), rational::to_f64(&naive));
        assert_eq!(RationalPoly::zero().eval(&t), int(0));
    }

    #[test]
    fn interpolation_hits_every_node() {
        let nodes = vec![(int(-2), int(3)), (ratio(1, 3), int(0)), (int(1), ratio(-5, 2)), (int(4), int(7))];
        let p = RationalPoly::interpolate(&nodes);
        assert!(p.degree().unwrap() <= 3);
        for (t, y) in &nodes {
            assert_eq!(&p.eval(t), y);
        }
        let line = RationalPoly::interpolate(&[(int(0), int(1)), (int(1), int(3)), (int(2), int(5))]);
        assert_eq!(line, RationalPoly::from_ints(&[1, 2]));
    }

    #[test]
    fn display() {
        let p = RationalPoly::new(vec![ratio(1, 2), int(-1), ratio(2, 3)]);
        assert_eq!(p.to_string(), "1/2 - t + 2/3*t^2");
        assert_eq!(RationalPoly::zero().to_string(), "0");
    }

    #[test]
    fn serde_round_trip() {
        let p = RationalPoly::new(vec![ratio(-7, 3), int(0), int(5)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"["-7/3","0","5"]"#);
        assert_eq!(serde_json::from_str::<RationalPoly>(&s).unwrap(), p);
    }
}
