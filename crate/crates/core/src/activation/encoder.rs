use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use super::enumeration::encode_poly;
use super::poly::RationalPoly;
use super::sigma::ActivationSpec;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A univariate function to encode. Targets that can be evaluated exactly
/// are validated exactly.
pub trait UnivariateTarget {
    fn eval_f64(&self, t: f64) -> f64;

    fn eval_exact(&self, _t: &Rational) -> Option<Rational> {
        None
    }
}

impl<F: Fn(f64) -> f64> UnivariateTarget for F {
    fn eval_f64(&self, t: f64) -> f64 {
        self(t)
    }
}

impl UnivariateTarget for RationalPoly {
    fn eval_f64(&self, t: f64) -> f64 {
        match rational::from_f64(t) {
            Ok(q) => rational::to_f64(&self.eval(&q)),
            Err(_) => f64::NAN,
        }
    }

    fn eval_exact(&self, t: &Rational) -> Option<Rational> {
        Some(self.eval(t))
    }
}

/// Piecewise-linear interpolant through sorted nodes, constant beyond the
/// extreme nodes.
#[derive(Clone, Debug)]
pub struct PiecewiseLinear {
    xs: Vec<Rational>,
    ys: Vec<Rational>,
    xf: Vec<f64>,
    yf: Vec<f64>,
}

impl PiecewiseLinear {
    /// `nodes` must be nonempty with strictly increasing abscissae.
    pub fn new(nodes: &[(Rational, Rational)]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Empty("interpolation node"));
        }
        if nodes.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidParameter("interpolation nodes must increase strictly".into()));
        }
        let xs: Vec<Rational> = nodes.iter().map(|n| n.0.clone()).collect();
        let ys: Vec<Rational> = nodes.iter().map(|n| n.1.clone()).collect();
        let xf = xs.iter().map(rational::to_f64).collect();
        let yf = ys.iter().map(rational::to_f64).collect();
        Ok(PiecewiseLinear { xs, ys, xf, yf })
    }

    pub fn is_zero(&self) -> bool {
        self.ys.iter().all(Zero::is_zero)
    }
}

impl UnivariateTarget for PiecewiseLinear {
    fn eval_f64(&self, t: f64) -> f64 {
        let n = self.xf.len();
        if t <= self.xf[0] {
            return self.yf[0];
        }
        if t >= self.xf[n - 1] {
            return self.yf[n - 1];
        }
        let j = self.xf.partition_point(|&x| x <= t);
        let (x0, x1, y0, y1) = (self.xf[j - 1], self.xf[j], self.yf[j - 1], self.yf[j]);
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }

    fn eval_exact(&self, t: &Rational) -> Option<Rational> {
        let n = self.xs.len();
        if *t <= self.xs[0] {
            return Some(self.ys[0].clone());
        }
        if *t >= self.xs[n - 1] {
            return Some(self.ys[n - 1].clone());
        }
        let j = self.xs.partition_point(|x| x <= t);
        let (x0, x1, y0, y1) = (&self.xs[j - 1], &self.xs[j], &self.ys[j - 1], &self.ys[j]);
        Some(y0 + (y1 - y0) * (t - x0) / (x1 - x0))
    }
}

#[derive(Clone, Debug)]
pub struct EncoderOptions {
    /// Chebyshev fitting nodes.
    pub fit_nodes: usize,
    /// Uniform and Chebyshev validation points (each).
    pub validation_points: usize,
    pub max_degree: usize,
    /// Largest coefficient denominator tried is `2^max_denominator_bits`.
    pub max_denominator_bits: u32,
}

impl Default for EncoderOptions {
    fn default() -> Self {
        EncoderOptions { fit_nodes: 1024, validation_points: 4097, max_degree: 400, max_denominator_bits: 256 }
    }
}

/// Result of encoding `g` into a single σ unit: `σ(λt − r) = pₘ(t)` on `[−l, l]`.
#[derive(Clone, Debug)]
pub struct EncodedUnivariate {
    pub m: BigUint,
    pub poly: RationalPoly,
    pub lambda: Rational,
    pub r: Rational,
    /// Max of `|g − pₘ|` over the validation grid (exact when `g` is exact).
    pub achieved_error: f64,
}

struct ValidationGrid {
    nodes: Vec<Rational>,
    nodes_f64: Vec<f64>,
    target_f64: Vec<f64>,
    target_exact: Option<Vec<Rational>>,
}

impl ValidationGrid {
    fn new(g: &dyn UnivariateTarget, l: &Rational, count: usize, extra: &[Rational]) -> Result<Self> {
        let lf = rational::to_f64(l);
        let mut nodes: Vec<Rational> = Vec::with_capacity(2 * count + extra.len());
        let span = (count.max(2) - 1) as i64;
        for j in 0..=span {
            nodes.push(l * rational::ratio(2 * j - span, span));
        }
        for j in 0..=span {
            let x = (PI * j as f64 / span as f64).cos() * lf;
            let q = rational::from_f64(x)?;
            nodes.push(if q > *l { l.clone() } else if q < -l.clone() { -l.clone() } else { q });
        }
        nodes.extend(extra.iter().filter(|t| t.abs() <= *l).cloned());
        nodes.sort();
        nodes.dedup();
        let nodes_f64: Vec<f64> = nodes.iter().map(rational::to_f64).collect();
        let target_f64 = nodes_f64.iter().map(|&t| g.eval_f64(t)).collect();
        let target_exact = nodes.iter().map(|t| g.eval_exact(t)).collect();
        Ok(ValidationGrid { nodes, nodes_f64, target_f64, target_exact })
    }

    fn float_error(&self, cheb: &[f64], lf: f64) -> f64 {
        self.nodes_f64
            .iter()
            .zip(&self.target_f64)
            .map(|(&t, &g)| (clenshaw(cheb, t / lf) - g).abs())
            .fold(0.0, f64::max)
    }

    /// Exact (or correctly rounded) sup of `|p − g|` over the grid; stops early
    /// once the error exceeds `cap`.
    fn exact_error(&self, p: &RationalPoly, cap: f64) -> f64 {
        let ip = p.integer_form();
        let mut worst = 0.0f64;
        for (k, t) in self.nodes.iter().enumerate() {
            let e = match &self.target_exact {
                Some(exact) => {
                    let (n, d) = ip.eval_parts(t);
                    let g = &exact[k];
                    let num = n * g.denom() - &d * g.numer();
                    rational::ratio_to_f64(&num.abs(), &(d * g.denom()).abs())
                }
                None => (ip.eval_to_f64(t) - self.target_f64[k]).abs(),
            };
            worst = worst.max(e);
            if worst > cap || worst.is_nan() {
                return f64::INFINITY;
            }
        }
        worst
    }
}

fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// Chebyshev coefficients of the discrete least-squares fit on the
/// first-kind nodes; for degree `< n` they are the truncations of one table.
fn chebyshev_coefficients(g: &dyn UnivariateTarget, lf: f64, n: usize, max_degree: usize) -> Vec<f64> {
    let theta: Vec<f64> = (0..n).map(|k| PI * (k as f64 + 0.5) / n as f64).collect();
    let values: Vec<f64> = theta.iter().map(|th| g.eval_f64(lf * th.cos())).collect();
    (0..=max_degree.min(n - 1))
        .map(|j| {
            let s: f64 = theta.iter().zip(&values).map(|(th, v)| v * (j as f64 * th).cos()).sum();
            let c = 2.0 * s / n as f64;
            if j == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect()
}

/// Exact monomial coefficients in `x` of `Σ cⱼ Tⱼ(x)`.
fn chebyshev_to_monomial(cheb: &[f64]) -> Result<Vec<Rational>> {
    let d = cheb.len();
    let mut in_x = vec![Rational::zero(); d];
    let mut t_prev: Vec<BigInt> = vec![BigInt::one()];
    let mut t_cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    for (j, &c) in cheb.iter().enumerate() {
        let cj = rational::from_f64(c)?;
        let tj: &[BigInt] = match j {
            0 => &t_prev,
            _ => &t_cur,
        };
        if !cj.is_zero() {
            for (i, coeff) in tj.iter().enumerate() {
                if !coeff.is_zero() {
                    in_x[i] += &cj * Rational::from_integer(coeff.clone());
                }
            }
        }
        if j >= 1 {
            let mut next = vec![BigInt::zero(); t_cur.len() + 1];
            for (i, v) in t_cur.iter().enumerate() {
                next[i + 1] += v * 2;
            }
            for (i, v) in t_prev.iter().enumerate() {
                next[i] -= v;
            }
            t_prev = std::mem::replace(&mut t_cur, next);
        }
    }
    Ok(in_x)
}

/// `Σ bᵢ (t/l)ⁱ` as a polynomial in `t`.
fn unscale(b: Vec<Rational>, l: &Rational) -> RationalPoly {
    let mut lp = Rational::one();
    let mut out = Vec::with_capacity(b.len());
    for v in b {
        out.push(v / &lp);
        lp *= l;
    }
    RationalPoly::new(out)
}

/// Part of the budget the floating fit may use; the rest absorbs coefficient rounding.
const FLOAT_SHARE: f64 = 0.9;

fn degree_schedule(max_degree: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 0;
    while d <= max_degree {
        out.push(d);
        d += if d < 12 { 1 } else { (d / 8).max(1) };
    }
    out
}

/// Encodes `g` on `[−l, l]` as a single polynomial `pₘ` with
/// `sup |g − pₘ| ≤ eps` on the validation grid, and returns the index `m`
/// with the scaling `λ = α/(2l)` and shift `r = α/2 − 2mα`.
///
/// `extra_nodes` (typically the levels where `g` is prescribed) are added to
/// the validation grid.
pub fn encode_univariate(
    g: &dyn UnivariateTarget,
    eps: f64,
    spec: &ActivationSpec,
    extra_nodes: &[Rational],
    opts: &EncoderOptions,
) -> Result<EncodedUnivariate> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    if opts.fit_nodes < 2 || opts.validation_points < 2 {
        return Err(Error::InvalidParameter("encoder needs at least two nodes".into()));
    }
    let l = &spec.l;
    let lf = rational::to_f64(l);
    let grid = ValidationGrid::new(g, l, opts.validation_points, extra_nodes)?;
    let cheb = chebyshev_coefficients(g, lf, opts.fit_nodes, opts.max_degree);
    let mut best = f64::INFINITY;
    for d in degree_schedule(cheb.len() - 1) {
        let coeffs = &cheb[..=d];
        let float_err = grid.float_error(coeffs, lf);
        best = best.min(float_err);
        if !(float_err <= FLOAT_SHARE * eps) {
            continue;
        }
        if let Some((poly, err)) = rationalize(coeffs, float_err, eps, l, &grid, opts)? {
            let m = encode_poly(&poly);
            return Ok(EncodedUnivariate { lambda: spec.lambda(), r: spec.shift(&m), m, poly, achieved_error: err });
        }
    }
    Err(Error::EncoderBudget { best_error: best })
}

/// Rounds the monomial coefficients in `u = t/l` (where `|u| ≤ 1`) with a
/// common denominator bound `2^e`, increasing `e` until the a-priori bound
/// `float_err + Σ|δᵢ| ≤ eps` and then the grid validation pass.
fn rationalize(
    cheb: &[f64],
    float_err: f64,
    eps: f64,
    l: &Rational,
    grid: &ValidationGrid,
    opts: &EncoderOptions,
) -> Result<Option<(RationalPoly, f64)>> {
    let mono = chebyshev_to_monomial(cheb)?;
    let slack = eps - float_err;
    // |δᵢ| ≤ 1/D always suffices; convergents usually give about 1/D².
    let worst_bits = (mono.len() as f64 / slack).log2().ceil().max(4.0);
    let start = ((worst_bits / 2.0) as u32).saturating_sub(4).max(4);
    for e in start..=opts.max_denominator_bits {
        let bound = BigInt::one() << e;
        let rounded: Vec<Rational> = mono.iter().map(|a| rational::best_approximation(a, &bound)).collect();
        let delta: f64 = rounded.iter().zip(&mono).map(|(r, a)| rational::to_f64(&(r - a).abs())).sum();
        if float_err + delta > eps {
            continue;
        }
        let poly = unscale(rounded, l);
        let err = grid.exact_error(&poly, eps);
        if err <= eps {
            return Ok(Some((poly, err)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::enumeration::decode_poly;
    use crate::activation::sigma::sigma_eval;
    use crate::rational::{int, ratio};

    fn spec(l: i64) -> ActivationSpec {
        ActivationSpec::new(int(1), int(l)).unwrap()
    }

    #[test]
    fn clenshaw_matches_cosine_definition() {
        let c = [0.3, -1.2, 0.5, 2.0];
        for &x in &[-0.9, -0.2, 0.0, 0.4, 1.0] {
            let th: f64 = f64::acos(x);
            let direct: f64 = c.iter().enumerate().map(|(j, cj)| cj * (j as f64 * th).cos()).sum();
            assert!((clenshaw(&c, x) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn monomial_conversion_is_exact() {
        // T₂(x) = 2x² − 1, and with x = t/2 it is t²/2 − 1.
        let m = chebyshev_to_monomial(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(m, vec![int(-1), int(0), int(2)]);
        assert_eq!(unscale(m, &int(2)), RationalPoly::new(vec![int(-1), int(0), ratio(1, 2)]));
    }

    #[test]
    fn known_polynomial_is_a_fixed_point() {
        let p = RationalPoly::new(vec![ratio(1, 3), int(-2), ratio(3, 4)]);
        let m = encode_poly(&p);
        let enc = encode_univariate(&p, 1e-6, &spec(1), &[], &EncoderOptions::default()).unwrap();
        assert_eq!(enc.poly, p);
        assert_eq!(enc.m, m);
        assert_eq!(enc.achieved_error, 0.0);
    }

    #[test]
    fn identity_encodes_within_budget() {
        let s = spec(1);
        let enc = encode_univariate(&|t: f64| t, 0.05, &s, &[], &EncoderOptions::default()).unwrap();
        assert!(enc.achieved_error <= 0.05);
        // σ(λt − r) reproduces pₘ(t) exactly.
        let p = decode_poly(&enc.m);
        for t in [ratio(-1, 1), ratio(-1, 3), int(0), ratio(5, 7), int(1)] {
            let u = &enc.lambda * &t - &enc.r;
            assert_eq!(sigma_eval(&s, &u).exact().cloned(), Some(p.eval(&t)));
        }
    }

    #[test]
    fn sine_encodes_within_budget() {
        let enc = encode_univariate(&|t: f64| t.sin(), 1e-2, &spec(1), &[], &EncoderOptions::default()).unwrap();
        assert!(enc.achieved_error <= 1e-2);
        // Independent dense check.
        for k in 0..=2000 {
            let t = -1.0 + k as f64 / 1000.0;
            assert!((enc.poly.eval_f64(t) - t.sin()).abs() <= 1e-2 + 1e-12);
        }
    }

    #[test]
    fn kinked_target_with_levels() {
        let nodes: Vec<(Rational, Rational)> = [(-2, 1), (0, -1), (1, 2), (2, 0)]
            .iter()
            .map(|&(x, y)| (int(x), int(y)))
            .collect();
        let g = PiecewiseLinear::new(&nodes).unwrap();
        let levels: Vec<Rational> = nodes.iter().map(|n| n.0.clone()).collect();
        let enc = encode_univariate(&g, 0.05, &spec(2), &levels, &EncoderOptions::default()).unwrap();
        for (x, y) in &nodes {
            assert!(rational::to_f64(&(enc.poly.eval(x) - y).abs()) <= 0.05);
        }
    }

    #[test]
    fn budget_failure_reports_best_error() {
        let opts = EncoderOptions { max_degree: 3, ..EncoderOptions::default() };
        let err = encode_univariate(&|t: f64| t.abs(), 1e-6, &spec(1), &[], &opts).unwrap_err();
        assert!(matches!(err, Error::EncoderBudget { best_error } if best_error > 1e-6));
    }

    #[test]
    fn piecewise_linear_float_and_exact_agree() {
        let g = PiecewiseLinear::new(&[(int(0), int(0)), (int(1), int(3))]).unwrap();
        assert_eq!(g.eval_exact(&ratio(1, 3)), Some(int(1)));
        assert_eq!(g.eval_f64(-4.0), 0.0);
        assert_eq!(g.eval_f64(9.0), 3.0);
        assert!((g.eval_f64(0.5) - 1.5).abs() < 1e-15);
    }
}
