//! The polynomial-enumerating activation and the exactly-`k`-unit networks.
//!
//! σ walks through an enumeration `p₁, p₂, …` of all rational polynomials:
//! on the segment `[(2m−1)α, 2mα]` it is exactly `pₘ((2l/α)t − 4ml + l)`, so
//! a single unit `σ(λt − r)` can reproduce any `pₘ` on `[−l, l]`. Between
//! segments σ blends neighbouring pieces with a flat C∞ step.

mod encoder;
mod enumeration;
mod knet;
mod poly;
mod sigma;

pub use encoder::{encode_univariate, EncodedUnivariate, EncoderOptions, PiecewiseLinear, UnivariateTarget};
pub use enumeration::{
    decode_poly, decode_poly_u64, encode_poly, nat_to_positive_rational, nat_to_rational, nat_to_seq,
    positive_rational_to_nat, rational_to_nat, seq_to_nat,
};
pub use knet::{build_k_network, default_half_width, KNetworkBuild, KNetworkOptions, ProfileExtension};
pub use poly::{IntegerPoly, RationalPoly};
pub use sigma::{flat_step, region_index, sigma_eval, ActivationSpec, Region, SigmaEvaluator, SigmaValue};
