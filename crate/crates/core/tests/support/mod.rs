//! Oracles and generators shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use bpmc::obstruction::MultiIndex;
use bpmc::ring::{Basis, GradedPolynomial, Monomial, Rational, TruncatedSeries};
use num_bigint::BigInt;
use rand::Rng;

const W: usize = 6;

type Expansion = BTreeMap<[u32; W], i128>;

fn weighted(m: &[u32; W]) -> usize {
    m.iter()
        .enumerate()
        .map(|(i, e)| (i + 1) * *e as usize)
        .sum()
}

fn mul(a: &Expansion, b: &Expansion) -> Expansion {
    let mut out = Expansion::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut m = [0u32; W];
            for i in 0..W {
                m[i] = ma[i] + mb[i];
            }
            if weighted(&m) > W {
                continue;
            }
            *out.entry(m).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// `(1 + b_1 + ... + b_6)^n` expanded by brute-force multiplication, up to
/// weighted degree 6. Negative powers go through the geometric series.
pub fn expansion(n: i64) -> Expansion {
    let one: Expansion = [([0u32; W], 1)].into_iter().collect();
    let mut base = one.clone();
    for i in 0..W {
        let mut m = [0u32; W];
        m[i] = 1;
        base.insert(m, 1);
    }
    if n < 0 {
        let mut minus_b = Expansion::new();
        for (m, c) in &base {
            if *m != [0u32; W] {
                minus_b.insert(*m, -c);
            }
        }
        let mut inv = one.clone();
        let mut term = one.clone();
        for _ in 0..W {
            term = mul(&term, &minus_b);
            for (m, c) in &term {
                *inv.entry(*m).or_insert(0) += c;
            }
        }
        base = inv;
    }
    let mut out = one;
    for _ in 0..n.unsigned_abs() {
        out = mul(&out, &base);
    }
    out
}

/// Every multi-index with `|ᾱ|' <= 6`, paired with its expansion key.
pub fn small_indices() -> Vec<(MultiIndex, [u32; W])> {
    fn go(rest: usize, i: usize, cur: &mut [u32; W], out: &mut Vec<(MultiIndex, [u32; W])>) {
        if i > W {
            out.push((MultiIndex::new(cur.to_vec()), *cur));
            return;
        }
        for e in 0..=rest / i {
            cur[i - 1] = e as u32;
            go(rest - e * i, i + 1, cur, out);
        }
        cur[i - 1] = 0;
    }
    let mut out = Vec::new();
    go(W, 1, &mut [0u32; W], &mut out);
    out
}

/// Checks `mu(n, ᾱ)` against the expansion for all small `ᾱ`; returns the
/// first mismatch.
pub fn check_mu(n: i64) -> Result<usize, String> {
    let e = expansion(n);
    let indices = small_indices();
    for (alpha, key) in &indices {
        let want = BigInt::from(e.get(key).copied().unwrap_or(0));
        let got = bpmc::obstruction::mu(n, alpha);
        if got != want {
            return Err(format!(
                "mu({}, {}) = {}, expansion gives {}",
                n, alpha, got, want
            ));
        }
    }
    Ok(indices.len())
}

/// A random integral polynomial in `v_1, v_2, v_3`.
pub fn random_poly(rng: &mut impl Rng, terms: usize, max_coef: i64) -> GradedPolynomial {
    GradedPolynomial::from_terms(
        Basis::V,
        (0..terms).map(|_| {
            let mono = Monomial::from_pairs((1..=3).map(|g| (g, rng.random_range(0..=3u32))));
            let c = rng.random_range(-max_coef..=max_coef);
            (mono, Rational::from_integer(c.into()))
        }),
    )
}

/// A random integral univariate series valid modulo `ξ^validity`.
pub fn random_series(rng: &mut impl Rng, p: u32, validity: u32) -> TruncatedSeries {
    let terms = (0..validity)
        .filter_map(|j| {
            if !rng.random_bool(0.7) {
                return None;
            }
            let n = rng.random_range(1..=3);
            Some((j, random_poly(rng, n, 40)))
        })
        .collect::<Vec<_>>();
    TruncatedSeries::univariate(p, Basis::V, validity, terms).expect("one basis")
}
