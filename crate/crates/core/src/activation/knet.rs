use num_bigint::BigUint;
use num_traits::{Signed, Zero};

use super::encoder::{encode_univariate, EncodedUnivariate, EncoderOptions, PiecewiseLinear};
use super::enumeration::encode_poly;
use super::poly::RationalPoly;
use super::sigma::ActivationSpec;
use crate::error::{Error, Result};
use crate::incidence::{find_closed_path, interpolate_ridge, PointConfig};
use crate::measure::dot;
use crate::network::{Activation, ErrorReport, Network, Term};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, Default)]
pub struct KNetworkOptions {
    /// Segment length; defaults to 1.
    pub alpha: Option<Rational>,
    /// Domain half-width; defaults to `max |aⁱ·x|` over the configuration.
    pub l: Option<Rational>,
    pub sharpness: Option<Rational>,
    pub encoder: EncoderOptions,
}

#[derive(Clone, Debug)]
pub struct KNetworkBuild {
    pub network: Network,
    pub ridge_residual: Rational,
    /// Polynomial index and polynomial per direction.
    pub indices: Vec<BigUint>,
    pub polys: Vec<RationalPoly>,
    pub encoder_errors: Vec<f64>,
    pub extensions: Vec<ProfileExtension>,
    /// Exact max over the configuration of `|f − network|`.
    pub max_error: Rational,
}

/// How a ridge profile known on its levels was extended to `[−l, l]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileExtension {
    /// Piecewise linear in level order, constant beyond the extreme levels.
    PiecewiseLinear,
    /// The interpolating polynomial through the levels, used when the
    /// piecewise-linear profile cannot be encoded within budget.
    Interpolating,
}

/// `max |aⁱ·x|` over points and directions (1 when everything projects to 0).
pub fn default_half_width(cfg: &PointConfig) -> Rational {
    let l = cfg
        .dirs()
        .iter()
        .flat_map(|a| cfg.points().iter().map(move |x| dot(a.coords(), x.coords()).abs()))
        .max()
        .unwrap_or_else(Rational::zero);
    if l.is_zero() {
        rational::int(1)
    } else {
        l
    }
}

/// Builds a network with exactly `k` units `σ(λ aⁱ·x − rᵢ)`, all outer
/// coefficients 1, approximating `f` on the configuration within `eps`.
///
/// The ridge profiles from the exact interpolation are extended
/// piecewise-linearly and each is encoded with budget `eps/(k+1)`. A profile
/// whose kinks defeat the encoder falls back to its interpolating polynomial,
/// which is encoded exactly.
pub fn build_k_network(
    cfg: &PointConfig,
    values: &[Rational],
    eps: f64,
    opts: &KNetworkOptions,
) -> Result<KNetworkBuild> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    if let Some(cert) = find_closed_path(cfg) {
        return Err(Error::ClosedPath(Box::new(cert)));
    }
    let fit = interpolate_ridge(cfg, values)?;
    let l_min = default_half_width(cfg);
    let l = match &opts.l {
        Some(l) if *l < l_min => {
            return Err(Error::InvalidParameter(format!(
                "l = {} does not cover the projected levels (need ≥ {})",
                rational::format(l),
                rational::format(&l_min)
            )))
        }
        Some(l) => l.clone(),
        None => l_min,
    };
    let spec = ActivationSpec::with_sharpness(
        opts.alpha.clone().unwrap_or_else(|| rational::int(1)),
        l,
        opts.sharpness.clone().unwrap_or_else(|| rational::int(1)),
    )?;
    let k = cfg.dirs().len();
    let budget = eps / (k as f64 + 1.0);

    let encode = |i: usize| -> Result<(EncodedUnivariate, ProfileExtension)> {
        let mut table: Vec<(Rational, Rational)> = fit.sum.table(i).to_vec();
        table.sort_by(|a, b| a.0.cmp(&b.0));
        let levels: Vec<Rational> = table.iter().map(|(y, _)| y.clone()).collect();
        let g = PiecewiseLinear::new(&table)?;
        match encode_univariate(&g, budget, &spec, &levels, &opts.encoder) {
            Err(Error::EncoderBudget { .. }) => {
                let poly = RationalPoly::interpolate(&table);
                let m = encode_poly(&poly);
                let e = EncodedUnivariate { r: spec.shift(&m), m, poly, lambda: spec.lambda(), achieved_error: 0.0 };
                Ok((e, ProfileExtension::Interpolating))
            }
            other => Ok((other?, ProfileExtension::PiecewiseLinear)),
        }
    };
    let encoded: Vec<Result<_>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..k).map(|i| s.spawn(move || encode(i))).collect();
        handles.into_iter().map(|h| h.join().expect("encoder thread")).collect()
    });
    let (encoded, extensions): (Vec<EncodedUnivariate>, Vec<ProfileExtension>) =
        encoded.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();

    let terms = cfg
        .dirs()
        .iter()
        .zip(&encoded)
        .map(|(a, e)| Term {
            c: rational::int(1),
            w: a.coords().iter().map(|v| v * &e.lambda).collect(),
            theta: e.r.clone(),
        })
        .collect();
    let mut network = Network::new(Activation::Superexpressive(spec), terms);
    for e in &encoded {
        network.remember_poly(e.m.clone(), &e.poly);
    }

    let mut max_error = Rational::zero();
    for (x, f) in cfg.points().iter().zip(values) {
        let v = network.eval_exact(x)?.expect("configuration points land on exact segments");
        max_error = max_error.max((f - v).abs());
    }
    let encoder_errors: Vec<f64> = encoded.iter().map(|e| e.achieved_error).collect();
    let residual = rational::to_f64(&fit.residual);
    let max_f = rational::to_f64(&max_error);
    let composed = residual + encoder_errors.iter().sum::<f64>();
    assert!(
        max_f <= composed * (1.0 + 1e-12) + f64::MIN_POSITIVE,
        "error composition violated: {max_f} > {composed}"
    );
    if !(max_f < eps) {
        return Err(Error::FitBudget { best_error: max_f });
    }
    network.report = Some(ErrorReport { ridge_residual: residual, component_errors: encoder_errors.clone(), max_error: max_f });
    Ok(KNetworkBuild {
        network,
        ridge_residual: fit.residual,
        indices: encoded.iter().map(|e| e.m.clone()).collect(),
        polys: encoded.into_iter().map(|e| e.poly).collect(),
        encoder_errors,
        extensions,
        max_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Direction, Point};
    use crate::rational::int;

    fn line_cfg() -> PointConfig {
        let pts = (0..5).map(|j| Point::from_ints(&[j, 2 * j + 1])).collect();
        PointConfig::new(pts, vec![Direction::axis(2, 0), Direction::axis(2, 1)]).unwrap()
    }

    #[test]
    fn zero_target_gives_zero_polynomials() {
        let cfg = line_cfg();
        let build = build_k_network(&cfg, &vec![int(0); 5], 1e-3, &KNetworkOptions::default()).unwrap();
        assert_eq!(build.network.len(), 2);
        assert!(build.indices.iter().all(|m| *m == BigUint::from(1u32)));
        assert!(build.max_error.is_zero());
    }

    #[test]
    fn exactly_k_unit_terms() {
        let cfg = line_cfg();
        let values: Vec<Rational> = (0..5).map(|j| int(j * j - 2)).collect();
        let build = build_k_network(&cfg, &values, 0.5, &KNetworkOptions::default()).unwrap();
        assert_eq!(build.network.len(), 2);
        assert!(build.network.terms.iter().all(|t| t.c == int(1)));
        assert!(rational::to_f64(&build.max_error) < 0.5);
        for (x, f) in cfg.points().iter().zip(&values) {
            let v = build.network.eval(x).unwrap();
            assert!((v - rational::to_f64(f)).abs() < 0.5);
        }
    }

    #[test]
    fn kinked_profiles_fall_back_to_interpolation() {
        let cfg = line_cfg();
        let values: Vec<Rational> = [3, -3, 3, -3, 3].iter().map(|&v| int(v)).collect();
        let tight = KNetworkOptions {
            encoder: EncoderOptions { max_degree: 24, ..EncoderOptions::default() },
            ..KNetworkOptions::default()
        };
        let build = build_k_network(&cfg, &values, 1e-3, &tight).unwrap();
        assert!(build.extensions.contains(&ProfileExtension::Interpolating));
        assert!(build.max_error.is_zero());
    }

    #[test]
    fn closed_path_is_refused() {
        let pts = [[0, 0], [0, 1], [1, 0], [1, 1]].iter().map(|p| Point::from_ints(p)).collect();
        let cfg = PointConfig::new(pts, vec![Direction::axis(2, 0), Direction::axis(2, 1)]).unwrap();
        let err = build_k_network(&cfg, &vec![int(0); 4], 0.1, &KNetworkOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ClosedPath(_)));
    }

    #[test]
    fn default_half_width_covers_levels() {
        assert_eq!(default_half_width(&line_cfg()), int(9));
    }
}
