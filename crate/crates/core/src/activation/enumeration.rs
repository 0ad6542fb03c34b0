//! A bijection between the positive integers and the rational polynomials.
//!
//! The tower, bottom up (ℕ includes 0):
//!
//! 1. ℕ ↔ binary strings: `n` is written as the binary expansion of `n + 1`
//!    with its leading `1` removed (bijective base 2; `0 ↔ ""`).
//! 2. nonempty sequences over ℕ ↔ strings over `{0, 1, #}`: each entry becomes
//!    its binary string and the strings are joined with `#`.
//! 3. strings over `{0, 1, #}` ↔ ℕ: bijective base 3 with digit values
//!    `0 → 1`, `1 → 2`, `# → 3`, most significant symbol first (`"" ↔ 0`).
//! 4. positive rationals ↔ ℕ: `q = [a₀; a₁, …, a_{n−1}, 1]` is the continued
//!    fraction of `q` ending in 1 (unique), mapped to the sequence
//!    `(a₀, a₁ − 1, …, a_{n−1} − 1)` and then through steps 2–3.
//! 5. ℚ ↔ ℕ: `0 ↦ 0`, `q > 0 ↦ 2R(q) + 1`, `q < 0 ↦ 2R(−q) + 2`.
//! 6. polynomials ↔ positive integers: the zero polynomial is `1`; a nonzero
//!    `c₀ + … + c_d t^d` becomes the sequence
//!    `(Q(c₀), …, Q(c_{d−1}), Q(c_d) − 1)` and its index is `2 + N(sequence)`.
//!
//! Every step is a bijection, index sizes grow additively with the bit sizes
//! of the coefficients, and all steps are exact big-integer arithmetic.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::RationalPoly;
use crate::rational::Rational;

const HASH: u8 = 2;

/// Index of a polynomial; always `≥ 1`.
pub fn encode_poly(p: &RationalPoly) -> BigUint {
    if p.is_zero() {
        return BigUint::one();
    }
    let d = p.coeffs().len() - 1;
    let seq: Vec<BigUint> = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let q = rational_to_nat(c);
            if i == d {
                q - 1u32
            } else {
                q
            }
        })
        .collect();
    seq_to_nat(&seq) + 2u32
}

/// Inverse of [`encode_poly`]. Panics on `m = 0`.
pub fn decode_poly(m: &BigUint) -> RationalPoly {
    assert!(!m.is_zero(), "polynomial indices start at 1");
    if m.is_one() {
        return RationalPoly::zero();
    }
    let mut seq = nat_to_seq(&(m - 2u32));
    let last = seq.len() - 1;
    seq[last] += 1u32;
    RationalPoly::new(seq.iter().map(nat_to_rational).collect())
}

pub fn rational_to_nat(q: &Rational) -> BigUint {
    if q.is_zero() {
        return BigUint::zero();
    }
    let r = positive_rational_to_nat(&q.abs());
    if q.is_positive() {
        r * 2u32 + 1u32
    } else {
        r * 2u32 + 2u32
    }
}

pub fn nat_to_rational(n: &BigUint) -> Rational {
    if n.is_zero() {
        return Rational::zero();
    }
    let r = (n - 1u32) >> 1;
    let q = nat_to_positive_rational(&r);
    if n.is_odd() {
        q
    } else {
        -q
    }
}

pub fn positive_rational_to_nat(q: &Rational) -> BigUint {
    assert!(q.is_positive(), "positive rational expected");
    let mut cf = continued_fraction(q);
    // Canonical expansion ends in a term ≥ 2 (or is the single term a₀ ≥ 1);
    // rewrite it to end in 1.
    let last = cf.pop().expect("nonempty expansion");
    cf.push(last - 1u32);
    cf.push(BigUint::one());
    let n = cf.len() - 1;
    let seq: Vec<BigUint> =
        cf[..n].iter().enumerate().map(|(i, a)| if i == 0 { a.clone() } else { a - 1u32 }).collect();
    seq_to_nat(&seq)
}

pub fn nat_to_positive_rational(n: &BigUint) -> Rational {
    let seq = nat_to_seq(n);
    let mut cf: Vec<BigUint> =
        seq.iter().enumerate().map(|(i, s)| if i == 0 { s.clone() } else { s + 1u32 }).collect();
    cf.push(BigUint::one());
    // Convergent recursion h_k = a_k h_{k−1} + h_{k−2}.
    let (mut h0, mut h1) = (BigUint::zero(), BigUint::one());
    let (mut k0, mut k1) = (BigUint::one(), BigUint::zero());
    for a in &cf {
        let h = a * &h1 + &h0;
        let k = a * &k1 + &k0;
        (h0, h1) = (h1, h);
        (k0, k1) = (k1, k);
    }
    Rational::new(BigInt::from_biguint(Sign::Plus, h1), BigInt::from_biguint(Sign::Plus, k1))
}

fn continued_fraction(q: &Rational) -> Vec<BigUint> {
    let mut a = q.numer().magnitude().clone();
    let mut b = q.denom().magnitude().clone();
    let mut out = Vec::new();
    while !b.is_zero() {
        let (quot, rem) = a.div_rem(&b);
        out.push(quot);
        a = b;
        b = rem;
    }
    out
}

/// Nonempty sequence of naturals to a natural.
pub fn seq_to_nat(seq: &[BigUint]) -> BigUint {
    assert!(!seq.is_empty(), "nonempty sequence expected");
    let mut symbols: Vec<u8> = Vec::new();
    for (i, n) in seq.iter().enumerate() {
        if i > 0 {
            symbols.push(HASH);
        }
        symbols.extend(nat_to_bits(n));
    }
    ternary_to_nat(&symbols)
}

pub fn nat_to_seq(n: &BigUint) -> Vec<BigUint> {
    ternary_from_nat(n).split(|&s| s == HASH).map(bits_to_nat).collect()
}

/// Bijective base 2: binary expansion of `n + 1` without its leading 1.
fn nat_to_bits(n: &BigUint) -> Vec<u8> {
    let mut bits = (n + 1u32).to_radix_be(2);
    bits.remove(0);
    bits
}

fn bits_to_nat(bits: &[u8]) -> BigUint {
    let mut with_lead = Vec::with_capacity(bits.len() + 1);
    with_lead.push(1);
    with_lead.extend_from_slice(bits);
    BigUint::from_radix_be(&with_lead, 2).expect("binary digits") - 1u32
}

/// `(3^len − 1)/2`, the number of ternary strings shorter than `len`.
fn shorter_count(len: usize) -> BigUint {
    (BigUint::from(3u32).pow(len as u32) - 1u32) / 2u32
}

/// Bijective base 3 with digit values `symbol + 1`.
fn ternary_to_nat(symbols: &[u8]) -> BigUint {
    if symbols.is_empty() {
        return BigUint::zero();
    }
    // Σ (sᵢ + 1) 3ⁱ = Σ sᵢ 3ⁱ + (3^L − 1)/2
    BigUint::from_radix_be(symbols, 3).expect("ternary digits") + shorter_count(symbols.len())
}

fn ternary_from_nat(n: &BigUint) -> Vec<u8> {
    if n.is_zero() {
        return Vec::new();
    }
    // Largest L with (3^L − 1)/2 ≤ n; start from a logarithm estimate.
    let bits = n.bits() as f64;
    let mut len = ((bits + 1.0) / 3f64.log2()).floor().max(0.0) as usize;
    while len > 0 && shorter_count(len) > *n {
        len -= 1;
    }
    while shorter_count(len + 1) <= *n {
        len += 1;
    }
    let rest = n - shorter_count(len);
    let mut digits = if rest.is_zero() { Vec::new() } else { rest.to_radix_be(3) };
    let mut out = vec![0u8; len - digits.len()];
    out.append(&mut digits);
    out
}

/// Small-index convenience used by tests and the CLI.
pub fn decode_poly_u64(m: u64) -> RationalPoly {
    decode_poly(&BigUint::from(m))
}
