//! JSON wire format for series.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::series::EXACT;
use super::{Basis, GradedPolynomial, Monomial, Rational, TruncatedSeries};
use crate::error::{Error, Result};

/// One coefficient: `coef` is `"n/d"` (`"n"` is accepted on input), `exps`
/// maps generator indices to exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefJson {
    pub coef: String,
    pub exps: BTreeMap<String, u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub xi: u32,
    pub x: u32,
    pub poly: Vec<CoefJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub prime: u32,
    pub truncation: u32,
    /// `null` for an exact series.
    pub validity: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_limit: Option<u32>,
    pub basis: Basis,
    pub terms: Vec<TermJson>,
}

fn poly_json(p: &GradedPolynomial) -> Vec<CoefJson> {
    p.terms()
        .map(|(m, c)| CoefJson {
            coef: format!("{}/{}", c.numer(), c.denom()),
            exps: m.factors().map(|(g, e)| (g.to_string(), e)).collect(),
        })
        .collect()
}

fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad coefficient '{}'", s));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

fn poly_from_json(basis: Basis, coefs: &[CoefJson]) -> Result<GradedPolynomial> {
    let mut terms = Vec::with_capacity(coefs.len());
    for c in coefs {
        let mut pairs = Vec::new();
        for (g, e) in &c.exps {
            let g: usize = g
                .parse()
                .ok()
                .filter(|g| *g >= 1)
                .ok_or_else(|| Error::Parse(format!("bad generator index '{}'", g)))?;
            pairs.push((g, *e));
        }
        terms.push((Monomial::from_pairs(pairs), parse_rational(&c.coef)?));
    }
    Ok(GradedPolynomial::from_terms(basis, terms))
}

impl SeriesJson {
    pub fn from_series(s: &TruncatedSeries, truncation: u32) -> Self {
        Self {
            quantity: None,
            n: None,
            prime: s.prime(),
            truncation,
            validity: (s.validity() != EXACT).then_some(s.validity()),
            x_limit: (s.x_limit() != EXACT).then_some(s.x_limit()),
            basis: s.basis(),
            terms: s
                .terms()
                .map(|(e, c)| TermJson {
                    xi: e.0,
                    x: e.1,
                    poly: poly_json(c),
                })
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<TruncatedSeries> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(((t.xi, t.x), poly_from_json(self.basis, &t.poly)?));
        }
        let s = TruncatedSeries::from_terms(
            self.prime,
            self.basis,
            self.validity.unwrap_or(EXACT),
            terms,
        )?;
        Ok(match self.x_limit {
            Some(c) => s.with_x_limit(c),
            None => s,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}
