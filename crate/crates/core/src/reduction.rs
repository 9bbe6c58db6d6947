//! Division with remainder by the reduced p-series and canonical
//! representatives in `BP^*[[ξ]] / ⟨p⟩ξ`.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::fgl::FglContext;
use crate::ring::{Basis, GradedPolynomial, TruncatedSeries, EXACT};

/// A `v`-basis series with integer coefficients; `normal` when every
/// coefficient lies in `{0, ..., p-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSeries {
    pub series: TruncatedSeries,
    pub normal: bool,
}

impl ReducedSeries {
    pub fn validity(&self) -> u32 {
        self.series.validity()
    }

    pub fn is_zero(&self) -> bool {
        self.series.is_zero()
    }
}

impl std::fmt::Display for ReducedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.series)
    }
}

fn check_input(g: &TruncatedSeries, pser: &TruncatedSeries) -> Result<()> {
    if g.basis() != Basis::V {
        return Err(Error::WrongBasis { expected: Basis::V });
    }
    if pser.basis() != Basis::V {
        return Err(Error::WrongBasis { expected: Basis::V });
    }
    if g.prime() != pser.prime() {
        return Err(Error::PrimeMismatch(g.prime(), pser.prime()));
    }
    if !g.is_univariate() {
        return Err(Error::NotUnivariate);
    }
    let p = GradedPolynomial::integer(Basis::V, pser.prime() as i64);
    if pser.get((0, 0)) != Some(&p) {
        return Err(Error::InvalidArgument(
            "divisor must have constant term p".into(),
        ));
    }
    if let Some((e, c)) = g.terms().find(|(_, c)| !c.is_integral()) {
        return Err(Error::NonIntegral(format!(
            "coefficient of ξ^{}: {}",
            e.0, c
        )));
    }
    Ok(())
}

/// Writes `g = d · pser + s` with the coefficients of `s` in `{0, ..., p-1}`.
///
/// Positions are settled in increasing `ξ` order: the coefficient at `ξ^j` is
/// split as `p q + r` (floor division), `q ξ^j pser` is subtracted, `r` is
/// kept. The result is valid modulo `ξ^min(V_g, V_pser + val d)`.
pub fn divide(
    g: &TruncatedSeries,
    pser: &TruncatedSeries,
) -> Result<(TruncatedSeries, ReducedSeries)> {
    check_input(g, pser)?;
    let p = g.prime();
    let vg = g.validity();
    if vg == EXACT {
        return Err(Error::UnboundedValidity);
    }
    let mut work: BTreeMap<u32, GradedPolynomial> =
        g.terms().map(|(e, c)| (e.0, c.clone())).collect();
    let divisor: Vec<(u32, &GradedPolynomial)> = pser
        .terms()
        .filter(|(e, _)| e.0 > 0)
        .map(|(e, c)| (e.0, c))
        .collect();
    let mut d_terms = Vec::new();
    let mut s_terms = Vec::new();
    let mut horizon = vg;
    while let Some((j, c)) = work.pop_first() {
        if j >= horizon {
            break;
        }
        let (q, r) = c.floor_divmod(p)?;
        if !r.is_zero() {
            s_terms.push((j, r));
        }
        if q.is_zero() {
            continue;
        }
        // The first quotient term caps what pser can certify.
        horizon = horizon.min(pser.validity().saturating_add(j));
        for &(i, pc) in &divisor {
            let pos = j + i;
            if pos >= horizon {
                break;
            }
            let sub = &q * pc;
            let slot = work
                .entry(pos)
                .or_insert_with(|| GradedPolynomial::zero(Basis::V));
            *slot = &*slot - &sub;
            if slot.is_zero() {
                work.remove(&pos);
            }
        }
        d_terms.push((j, q));
    }
    let mut d = TruncatedSeries::univariate(p, Basis::V, horizon, d_terms)?;
    let mut s = TruncatedSeries::univariate(p, Basis::V, horizon, s_terms)?;
    if let (Some(w), Some(0)) = (g.weight(), pser.weight()) {
        d = d.tag_weight(w);
        s = s.tag_weight(w);
    }
    Ok((
        d,
        ReducedSeries {
            series: s,
            normal: true,
        },
    ))
}

/// The canonical representative of `g` modulo `⟨p⟩ξ`.
pub fn canonical_rep(g: &TruncatedSeries, pser: &TruncatedSeries) -> Result<ReducedSeries> {
    divide(g, pser).map(|(_, s)| s)
}

/// The lowest nonzero coefficient of a normal series, proving it nonzero in
/// the quotient. `None` is inconclusive.
pub fn nonvanishing_certificate(s: &ReducedSeries) -> Option<(u32, GradedPolynomial)> {
    if !s.normal {
        return None;
    }
    s.series.terms().next().map(|(e, c)| (e.0, c.clone()))
}

/// Supplies `⟨p⟩ξ` in the `v`-basis at any requested validity, rebuilding
/// the underlying context only when a longer series is needed.
pub struct Reducer {
    prime: u32,
    cache: Mutex<Option<Arc<TruncatedSeries>>>,
}

impl Reducer {
    pub fn new(prime: u32) -> Self {
        Self {
            prime,
            cache: Mutex::new(None),
        }
    }

    /// Seeds the cache from an existing context.
    pub fn from_context(ctx: &FglContext) -> Result<Self> {
        let r = Self::new(ctx.prime());
        *r.cache.lock().expect("cache") = Some(Arc::new(ctx.reduced_p_series()?));
        Ok(r)
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// `⟨p⟩ξ` valid modulo at least `ξ^validity`.
    pub fn p_series(&self, validity: u32) -> Result<Arc<TruncatedSeries>> {
        let mut cache = self.cache.lock().expect("cache");
        if let Some(s) = cache.as_ref() {
            if s.validity() >= validity {
                return Ok(s.clone());
            }
        }
        let ctx = FglContext::new(self.prime, validity.max(1))?;
        let s = Arc::new(ctx.reduced_p_series()?);
        *cache = Some(s.clone());
        Ok(s)
    }

    pub fn divide(&self, g: &TruncatedSeries) -> Result<(TruncatedSeries, ReducedSeries)> {
        if g.validity() == EXACT {
            return Err(Error::UnboundedValidity);
        }
        divide(g, &*self.p_series(g.validity())?)
    }

    pub fn canonical_rep(&self, g: &TruncatedSeries) -> Result<ReducedSeries> {
        self.divide(g).map(|(_, s)| s)
    }

    /// Whether `g` is divisible by `⟨p⟩ξ` within its validity.
    pub fn divisible_by_reduced(&self, g: &TruncatedSeries) -> Result<bool> {
        Ok(self.canonical_rep(g)?.is_zero())
    }

    /// Whether `g` is divisible by `[p]ξ = ξ ⟨p⟩ξ` within its validity.
    pub fn divisible_by_p_series(&self, g: &TruncatedSeries) -> Result<bool> {
        if g.get((0, 0)).is_some() {
            return Ok(false);
        }
        if g.validity() == 0 {
            return Ok(true);
        }
        self.divisible_by_reduced(&g.div_xi_power(1)?)
    }
}
