//! Ring primitives: monomials, polynomials in the `v`/`l` generators and
//! truncated power series over them.

mod json;
mod monomial;
mod poly;
mod series;
mod text;

pub use json::{CoefJson, SeriesJson, TermJson};
pub use monomial::{generator_weight, Monomial};
pub(crate) use poly::PolyAccumulator;
pub use poly::{Basis, GradedPolynomial};
pub use series::{Exponent, TruncatedSeries, EXACT};
pub use text::{parse_polynomial, parse_series};

/// Exact rational numbers.
pub type Rational = num_rational::BigRational;
