//! Approximation with a fixed continuous nonpolynomial activation and
//! thresholds restricted to an open interval Θ.
//!
//! The target is first split exactly into ridge profiles on the projected
//! levels; each profile is then fitted by a 1-D network `Σ cⱼ σ(tⱼ y − θⱼ)`
//! chosen greedily from a dictionary (orthogonal matching pursuit with a
//! least-squares refit after every selection).

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incidence::{find_closed_path, interpolate_ridge, PointConfig};
use crate::network::{Activation, ErrorReport, Network, Term};
use crate::rational::{self, Rational};

/// Names a σ so that a serialized network can be evaluated again.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum SigmaDescriptor {
    /// `1/(1 + e^{−t})`.
    Logistic,
    /// `(1 + tanh t)/2`.
    TanhRamp,
    /// Piecewise-linear through `(t, y)` nodes, constant outside.
    Table { t: Vec<f64>, y: Vec<f64> },
    /// A caller-supplied function; not reconstructible from JSON.
    Custom { label: String },
}

impl SigmaDescriptor {
    pub fn oracle(&self) -> Result<SigmaOracle> {
        let eval: Arc<dyn Fn(f64) -> f64 + Send + Sync> = match self {
            SigmaDescriptor::Logistic => Arc::new(|t: f64| 1.0 / (1.0 + (-t).exp())),
            SigmaDescriptor::TanhRamp => Arc::new(|t: f64| 0.5 * (1.0 + t.tanh())),
            SigmaDescriptor::Table { t, y } => {
                if t.is_empty() || t.len() != y.len() || t.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::InvalidParameter("sigma table needs increasing t and matching y".into()));
                }
                let (t, y) = (t.clone(), y.clone());
                Arc::new(move |u: f64| table_eval(&t, &y, u))
            }
            SigmaDescriptor::Custom { label } => {
                return Err(Error::InvalidParameter(format!("custom sigma {label:?} has no built-in evaluator")))
            }
        };
        Ok(SigmaOracle { descriptor: self.clone(), eval })
    }

    /// Parses `t,y` lines (an optional header is skipped).
    pub fn table_from_csv(text: &str) -> Result<Self> {
        let (mut t, mut y) = (Vec::new(), Vec::new());
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let (a, b) = (parts.next().unwrap_or(""), parts.next().unwrap_or(""));
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(a), Ok(b)) => {
                    t.push(a);
                    y.push(b);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::Parse(format!("sigma table line {}: {line:?}", i + 1))),
            }
        }
        let d = SigmaDescriptor::Table { t, y };
        d.oracle()?;
        Ok(d)
    }
}

fn table_eval(t: &[f64], y: &[f64], u: f64) -> f64 {
    let n = t.len();
    if u <= t[0] {
        return y[0];
    }
    if u >= t[n - 1] {
        return y[n - 1];
    }
    let j = t.partition_point(|&x| x <= u);
    y[j - 1] + (y[j] - y[j - 1]) * (u - t[j - 1]) / (t[j] - t[j - 1])
}

/// A real activation with its descriptor.
#[derive(Clone)]
pub struct SigmaOracle {
    pub descriptor: SigmaDescriptor,
    pub eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for SigmaOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigmaOracle").field("descriptor", &self.descriptor).finish_non_exhaustive()
    }
}

impl SigmaOracle {
    pub fn logistic() -> Self {
        SigmaDescriptor::Logistic.oracle().expect("built-in")
    }

    pub fn tanh_ramp() -> Self {
        SigmaDescriptor::TanhRamp.oracle().expect("built-in")
    }

    pub fn custom(label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SigmaOracle { descriptor: SigmaDescriptor::Custom { label: label.into() }, eval: Arc::new(f) }
    }
}

/// Finite-difference degree probe: `Some(d)` when the `(d+1)`-th differences
/// of σ on a uniform grid vanish (relative to the sample scale) for some
/// `d ≤ max_degree`, i.e. σ looks like a polynomial of degree `d`.
pub fn polynomial_degree_probe(sigma: &SigmaOracle, max_degree: usize) -> Option<usize> {
    let samples: Vec<f64> = (0..=64).map(|j| (sigma.eval)(-4.0 + j as f64 / 8.0)).collect();
    let scale = samples.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut diffs = samples;
    for d in 0..=max_degree {
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        // Roundoff in a (d+1)-th difference grows like 2^{d+1}.
        let tol = 1e-9 * scale * f64::powi(2.0, d as i32 + 1);
        if diffs.iter().all(|v| v.abs() <= tol) {
            return Some(d);
        }
    }
    None
}

/// Open interval `(lo, hi)`; `None` stands for an infinite end.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaInterval {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl ThetaInterval {
    pub fn new(lo: Option<f64>, hi: Option<f64>) -> Result<Self> {
        if lo.is_some_and(|v| !v.is_finite()) || hi.is_some_and(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("use None for infinite threshold bounds".into()));
        }
        if let (Some(a), Some(b)) = (lo, hi) {
            if !(a < b) {
                return Err(Error::InvalidParameter("threshold interval is empty".into()));
            }
        }
        Ok(ThetaInterval { lo, hi })
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.lo.is_none_or(|a| theta > a) && self.hi.is_none_or(|b| theta < b)
    }

    /// Exact containment test for a serialized threshold.
    pub fn contains_exact(&self, theta: &Rational) -> bool {
        let inside = |bound: Option<f64>, below: bool| match bound.map(rational::from_f64) {
            None => true,
            Some(Ok(b)) => {
                if below {
                    *theta > b
                } else {
                    *theta < b
                }
            }
            Some(Err(_)) => false,
        };
        inside(self.lo, true) && inside(self.hi, false)
    }

    /// `count` uniform interior nodes; an infinite end is replaced by ±32, or
    /// by the finite end ∓ 64 when that lies further out.
    fn nodes(&self, count: usize) -> Vec<f64> {
        let (lo, hi) = match (self.lo, self.hi) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) => (a, (a + 64.0).max(32.0)),
            (None, Some(b)) => ((b - 64.0).min(-32.0), b),
            (None, None) => (-32.0, 32.0),
        };
        let parts = (count + 1) as f64;
        (1..=count).map(|j| lo + (hi - lo) * j as f64 / parts).filter(|&t| self.contains(t)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct FitOptions {
    pub max_terms: usize,
    /// Base grid: `t = ±2^{e/2^r}` for `e ∈ [−8, 8]` and θ on `theta_nodes` nodes.
    pub theta_nodes: usize,
    /// Refinement rounds, each doubling both grids.
    pub max_rounds: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_terms: 64, theta_nodes: 257, max_rounds: 6 }
    }
}

/// One term `c σ(t y − θ)` of a 1-D network.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnivariateTerm {
    pub c: f64,
    pub t: f64,
    pub theta: f64,
}

#[derive(Clone, Debug)]
pub struct UnivariateFit {
    pub terms: Vec<UnivariateTerm>,
    /// Max over the levels of `|g − Σ c σ(t y − θ)|`.
    pub error: f64,
}

impl UnivariateFit {
    pub fn eval(&self, sigma: &SigmaOracle, y: f64) -> f64 {
        self.terms.iter().map(|u| u.c * (sigma.eval)(u.t * y - u.theta)).sum()
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Least squares via SVD; `None` if the solve fails.
fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let tol = 1e-13 * svd.singular_values.max().max(1e-300);
    svd.solve(b, tol).ok()
}

/// Fits `g` on the levels `(y, g(y))` with at most `opts.max_terms` σ atoms.
pub fn approx_univariate(
    samples: &[(f64, f64)],
    sigma: &SigmaOracle,
    theta: &ThetaInterval,
    eps: f64,
    opts: &FitOptions,
) -> Result<UnivariateFit> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    let g = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    if max_abs(&g) < eps {
        return Ok(UnivariateFit { terms: Vec::new(), error: max_abs(&g) });
    }
    let ys: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut best_error = max_abs(&g);
    for round in 0..=opts.max_rounds {
        let dict = dictionary(theta, opts.theta_nodes, round);
        if round > 0 && dict.len() * ys.len() > MAX_DICTIONARY_ENTRIES {
            break;
        }
        if let Some(fit) = omp(&ys, &g, sigma, &dict, eps, opts.max_terms, &mut best_error) {
            return Ok(fit);
        }
    }
    Err(Error::FitBudget { best_error })
}

/// Refinement stops before the tabulated dictionary exceeds this many values.
const MAX_DICTIONARY_ENTRIES: usize = 1 << 24;

fn dictionary(theta: &ThetaInterval, theta_nodes: usize, round: usize) -> Vec<(f64, f64)> {
    let per_octave = 1usize << round;
    let mut ts = Vec::new();
    for e in -(8 * per_octave as i64)..=(8 * per_octave as i64) {
        let t = f64::powf(2.0, e as f64 / per_octave as f64);
        ts.push(t);
        ts.push(-t);
    }
    let thetas = theta.nodes((theta_nodes - 1) * per_octave + 1);
    ts.iter().flat_map(|&t| thetas.iter().map(move |&th| (t, th))).collect()
}

fn omp(
    ys: &[f64],
    g: &DVector<f64>,
    sigma: &SigmaOracle,
    dict: &[(f64, f64)],
    eps: f64,
    max_terms: usize,
    best_error: &mut f64,
) -> Option<UnivariateFit> {
    let n = ys.len();
    let atoms: Vec<DVector<f64>> =
        dict.iter().map(|&(t, th)| DVector::from_iterator(n, ys.iter().map(|&y| (sigma.eval)(t * y - th)))).collect();
    let norms: Vec<f64> = atoms.iter().map(|a| a.norm()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut residual = g.clone();
    while chosen.len() < max_terms {
        let pick = (0..atoms.len())
            .filter(|j| norms[*j] > 1e-12 && !chosen.contains(j))
            .map(|j| (j, atoms[j].dot(&residual).abs() / norms[j]))
            .fold(None, |acc: Option<(usize, f64)>, (j, s)| match acc {
                Some((_, best)) if best >= s => acc,
                _ => Some((j, s)),
            });
        let Some((j, score)) = pick else { break };
        if score <= 1e-15 {
            break;
        }
        chosen.push(j);
        let a = DMatrix::from_columns(&chosen.iter().map(|&k| atoms[k].clone()).collect::<Vec<_>>());
        let coeffs = least_squares(&a, g)?;
        residual = g - &a * &coeffs;
        let err = max_abs(&residual);
        *best_error = best_error.min(err);
        if err < eps {
            let terms = chosen
                .iter()
                .zip(coeffs.iter())
                .map(|(&k, &c)| UnivariateTerm { c, t: dict[k].0, theta: dict[k].1 })
                .collect();
            return Some(UnivariateFit { terms, error: err });
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct NetApproxBuild {
    pub network: Network,
    pub ridge_residual: f64,
    pub component_errors: Vec<f64>,
    /// Replayed max over the configuration of `|f − network|`.
    pub max_error: f64,
}

/// Approximates `f` on the configuration by `Σᵢ Σⱼ cᵢⱼ σ(tᵢⱼ aⁱ·x − θᵢⱼ)`
/// with every `θᵢⱼ ∈ Θ`, within `eps`.
pub fn approx_network(
    cfg: &PointConfig,
    values: &[Rational],
    sigma: &SigmaOracle,
    theta: &ThetaInterval,
    eps: f64,
    opts: &FitOptions,
) -> Result<NetApproxBuild> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    if let Some(degree) = polynomial_degree_probe(sigma, 5) {
        return Err(Error::PolynomialActivation { degree });
    }
    if let Some(cert) = find_closed_path(cfg) {
        return Err(Error::ClosedPath(Box::new(cert)));
    }
    let fit = interpolate_ridge(cfg, values)?;
    let k = cfg.dirs().len();
    let budget = eps / (k as f64 + 1.0);
    let fits: Vec<Result<UnivariateFit>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..k)
            .map(|i| {
                let samples: Vec<(f64, f64)> =
                    fit.sum.table(i).iter().map(|(y, v)| (rational::to_f64(y), rational::to_f64(v))).collect();
                s.spawn(move || approx_univariate(&samples, sigma, theta, budget, opts))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("fitter thread")).collect()
    });
    let fits = fits.into_iter().collect::<Result<Vec<_>>>()?;

    let mut terms = Vec::new();
    for (a, f) in cfg.dirs().iter().zip(&fits) {
        for u in &f.terms {
            let t = rational::from_f64(u.t)?;
            let th = rational::from_f64(u.theta)?;
            debug_assert!(theta.contains_exact(&th));
            terms.push(Term { c: rational::from_f64(u.c)?, w: a.coords().iter().map(|v| v * &t).collect(), theta: th });
        }
    }
    let mut network = Network::new(Activation::Oracle { sigma: sigma.descriptor.clone() }, terms);
    let ridge_residual = rational::to_f64(&fit.residual);
    let component_errors: Vec<f64> = fits.iter().map(|f| f.error).collect();
    let max_error = replay(&network, cfg, values, sigma)?;
    // Triangle inequality; the slack covers floating evaluation of the terms.
    let composed = ridge_residual + component_errors.iter().sum::<f64>();
    assert!(max_error <= composed + 1e-9 * (1.0 + composed), "error composition violated: {max_error} > {composed}");
    if !(max_error < eps) {
        return Err(Error::FitBudget { best_error: max_error });
    }
    network.report = Some(ErrorReport { ridge_residual, component_errors: component_errors.clone(), max_error });
    Ok(NetApproxBuild { network, ridge_residual, component_errors, max_error })
}

/// Max over configuration points of `|f − network|`, evaluated with `sigma`.
fn replay(net: &Network, cfg: &PointConfig, values: &[Rational], sigma: &SigmaOracle) -> Result<f64> {
    let mut worst = 0.0f64;
    for (x, f) in cfg.points().iter().zip(values) {
        let mut acc = crate::network::Neumaier::default();
        for term in &net.terms {
            let u = rational::to_f64(&term.argument(x)?);
            acc.add(rational::to_f64(&term.c) * (sigma.eval)(u));
        }
        worst = worst.max((acc.total() - rational::to_f64(f)).abs());
    }
    Ok(worst)
}
