//! The total power operation on the orientation class and its coefficient
//! series `a_i(ξ)`.
//!
//! With `f_i = [i]ξ +_F x`, the power operation is `P(x) = x ∏_{i=1}^{p-1} f_i`
//! and `a_i` is the coefficient of `x^{i+1}` in `P`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::fgl::{require_integral, FglContext};
use crate::reduction::{ReducedSeries, Reducer};
use crate::ring::{Basis, GradedPolynomial, Rational, TruncatedSeries};

#[derive(Clone, Debug)]
pub struct PowerOpData {
    prime: u32,
    /// `P(x)` in the `l`-basis.
    pub product_series: TruncatedSeries,
    /// `a_0, a_1, ...` in the `l`-basis.
    pub a: Vec<TruncatedSeries>,
}

/// `[i]ξ +_F x = exp(i log ξ + log x)`, known modulo `x^(x_cap + 1)`.
pub fn factor(ctx: &FglContext, i: i64, x_cap: u32) -> Result<TruncatedSeries> {
    let x = TruncatedSeries::monomial(ctx.prime(), Basis::L, (0, 1))
        .with_weight(-1)
        .with_x_limit(x_cap + 1);
    let inner = ctx
        .log_series()
        .scale_int(i)
        .checked_add(&ctx.log_of(&x)?)?;
    ctx.exp_of(&inner)
}

/// `∏_{i=1}^{p-1} ([i]ξ +_F x)`, multiplied left to right.
pub fn factor_product(ctx: &FglContext, x_cap: u32) -> Result<TruncatedSeries> {
    let p = ctx.prime() as i64;
    let mut q = factor(ctx, 1, x_cap)?;
    for i in 2..p {
        q = q.checked_mul(&factor(ctx, i, x_cap)?)?;
    }
    Ok(q)
}

/// `P(x) = ∏_{i=0}^{p-1} ([i]ξ +_F x)` in `(ξ, x)`, known modulo
/// `x^(x_cap + 2)`.
pub fn power_op_series(ctx: &FglContext, x_cap: u32) -> Result<TruncatedSeries> {
    Ok(factor_product(ctx, x_cap)?.shift(0, 1))
}

fn factorial(n: u32) -> Rational {
    (1..=n).fold(Rational::one(), |acc, i| {
        acc * Rational::from_integer(i.into())
    })
}

/// Checks `a_0 ≡ (p-1)! ξ^(p-1) mod ξ^p` on the orders `a_0` determines.
pub fn check_euler_class(a0: &TruncatedSeries) -> Result<()> {
    let p = a0.prime();
    for j in 0..p.min(a0.validity()) {
        let got = a0.coefficient_of((j, 0))?;
        let want = if j == p - 1 {
            GradedPolynomial::constant(a0.basis(), factorial(p - 1))
        } else {
            GradedPolynomial::zero(a0.basis())
        };
        if got != want {
            return Err(Error::EulerClass(format!(
                "coefficient of ξ^{} is {}, expected {}",
                j, got, want
            )));
        }
    }
    Ok(())
}

impl PowerOpData {
    /// Computes `P(x)` and `a_0, ..., a_m` with `m = min(max_index, k - 1)`.
    pub fn compute(ctx: &FglContext, max_index: u32) -> Result<Self> {
        let last = max_index.min(ctx.truncation().saturating_sub(1));
        let q = factor_product(ctx, last)?;
        let a = (0..=last)
            .map(|i| q.x_slice(i))
            .collect::<Result<Vec<_>>>()?;
        check_euler_class(&a[0])?;
        Ok(Self {
            prime: ctx.prime(),
            product_series: q.shift(0, 1),
            a,
        })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// `a_i` in the `l`-basis.
    pub fn a_l(&self, i: usize) -> Result<&TruncatedSeries> {
        self.a.get(i).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "a_{} was not computed (have a_0..a_{})",
                i,
                self.a.len() - 1
            ))
        })
    }

    /// `a_i` in the `v`-basis.
    pub fn a_v(&self, ctx: &FglContext, i: usize) -> Result<TruncatedSeries> {
        let s = ctx.series_to_v(self.a_l(i)?)?;
        require_integral(&s)?;
        Ok(s)
    }
}

/// All computed `a_i` in the `v`-basis.
pub fn extract_a(ctx: &FglContext, data: &PowerOpData) -> Result<Vec<TruncatedSeries>> {
    (0..data.a.len()).map(|i| data.a_v(ctx, i)).collect()
}

/// Canonical representatives of the `a_i` modulo `⟨p⟩ξ`.
pub fn reduce_a_mod_p_series(
    ctx: &FglContext,
    data: &PowerOpData,
    reducer: &Reducer,
) -> Result<Vec<ReducedSeries>> {
    extract_a(ctx, data)?
        .iter()
        .map(|a| reducer.canonical_rep(a))
        .collect()
}
