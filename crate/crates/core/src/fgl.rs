//! The universal p-typical formal group law over `BP^*` and its derived
//! series.
//!
//! Everything is computed in the rational `l`-basis, where the logarithm is
//! `ξ + Σ l_m ξ^{p^m}`, and moved to the Hazewinkel generators `v_m` with
//! [`FglContext::to_v_basis`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::ring::{Basis, GradedPolynomial, Monomial, PolyAccumulator, Rational, TruncatedSeries};

/// Deterministic primality test for the small primes this crate handles.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest `m` with `p^m - 1 <= k`.
pub fn generator_horizon(p: u32, k: u32) -> usize {
    let mut m = 0;
    let mut q: u64 = p as u64;
    while q - 1 <= k as u64 {
        m += 1;
        q *= p as u64;
    }
    m
}

/// Cached formal group law data for one prime and truncation order `k`.
pub struct FglContext {
    prime: u32,
    truncation: u32,
    log: TruncatedSeries,
    exp: TruncatedSeries,
    /// `l_m` in the `v`-basis, index `m - 1`.
    hazewinkel: Vec<GradedPolynomial>,
    powers: Mutex<HashMap<(usize, u32), Arc<GradedPolynomial>>>,
}

impl std::fmt::Debug for FglContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FglContext")
            .field("prime", &self.prime)
            .field("truncation", &self.truncation)
            .finish_non_exhaustive()
    }
}

impl FglContext {
    pub fn new(prime: u32, truncation: u32) -> Result<Self> {
        if !is_prime(prime as u64) {
            return Err(Error::NotPrime(prime as u64));
        }
        if truncation < 1 {
            return Err(Error::InvalidArgument(
                "truncation must be at least 1".into(),
            ));
        }
        let log = build_log(prime, truncation);
        let exp = log.revert()?;
        let hazewinkel = hazewinkel_table(prime, generator_horizon(prime, truncation));
        Ok(Self {
            prime,
            truncation,
            log,
            exp,
            hazewinkel,
            powers: Mutex::new(HashMap::new()),
        })
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// Generators `v_m` (and `l_m`) with `p^m - 1 <= k`.
    pub fn horizon(&self) -> usize {
        self.hazewinkel.len()
    }

    /// `log(ξ) = ξ + Σ l_m ξ^{p^m}`, valid modulo `ξ^{k+1}`.
    pub fn log_series(&self) -> &TruncatedSeries {
        &self.log
    }

    /// The compositional inverse of the logarithm.
    pub fn exp_series(&self) -> &TruncatedSeries {
        &self.exp
    }

    pub fn hazewinkel_table(&self) -> &[GradedPolynomial] {
        &self.hazewinkel
    }

    /// `log ∘ s`.
    pub fn log_of(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.log.compose(s)
    }

    /// `exp ∘ s`.
    pub fn exp_of(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.exp.compose(s)
    }

    /// The formal sum `exp(log s + log t)`.
    pub fn formal_sum(&self, s: &TruncatedSeries, t: &TruncatedSeries) -> Result<TruncatedSeries> {
        let inner = self.log_of(s)?.checked_add(&self.log_of(t)?)?;
        self.exp_of(&inner)
    }

    /// `ξ` as an `l`-basis series valid modulo `ξ^{k+1}`.
    pub fn xi(&self) -> TruncatedSeries {
        TruncatedSeries::monomial(self.prime, Basis::L, (1, 0))
            .truncate(self.truncation + 1)
            .with_weight(-1)
    }

    /// The n-series `[n]ξ = exp(n log ξ)` in the `l`-basis.
    pub fn n_series(&self, n: i64) -> Result<TruncatedSeries> {
        if n == 0 {
            return Ok(
                TruncatedSeries::zero(self.prime, Basis::L, self.truncation + 1).with_weight(-1),
            );
        }
        self.exp_of(&self.log.scale_int(n))
    }

    /// `[p]ξ` in the `l`-basis.
    pub fn p_series(&self) -> Result<TruncatedSeries> {
        self.n_series(self.prime as i64)
    }

    /// `⟨p⟩ξ = [p]ξ / ξ` in the `l`-basis, valid modulo `ξ^k`.
    pub fn reduced_p_series_l(&self) -> Result<TruncatedSeries> {
        self.p_series()?.div_xi_power(1)
    }

    /// `⟨p⟩ξ` in the `v`-basis, where all coefficients are integers.
    pub fn reduced_p_series(&self) -> Result<TruncatedSeries> {
        let s = self.series_to_v(&self.reduced_p_series_l()?)?;
        require_integral(&s)?;
        Ok(s)
    }

    fn l_power(&self, m: usize, e: u32) -> Result<Arc<GradedPolynomial>> {
        if m > self.hazewinkel.len() {
            return Err(Error::HorizonExceeded {
                generator: m,
                horizon: self.hazewinkel.len(),
            });
        }
        if let Some(p) = self.powers.lock().expect("cache").get(&(m, e)) {
            return Ok(p.clone());
        }
        let p = if e == 1 {
            self.hazewinkel[m - 1].clone()
        } else {
            let half = self.l_power(m, e / 2)?;
            let sq = &*half * &*half;
            if e % 2 == 1 {
                &sq * &self.hazewinkel[m - 1]
            } else {
                sq
            }
        };
        let p = Arc::new(p);
        self.powers.lock().expect("cache").insert((m, e), p.clone());
        Ok(p)
    }

    /// Rewrites an `l`-basis polynomial in the `v`-basis.
    pub fn to_v_basis(&self, poly: &GradedPolynomial) -> Result<GradedPolynomial> {
        if poly.basis() != Basis::L {
            return Err(Error::WrongBasis { expected: Basis::L });
        }
        let mut acc = PolyAccumulator::new();
        for (mono, c) in poly.terms() {
            let mut prod = GradedPolynomial::constant(Basis::V, c);
            for (m, e) in mono.factors() {
                prod = &prod * &*self.l_power(m, e)?;
            }
            acc.add_poly(&prod);
        }
        Ok(acc.finish(Basis::V))
    }

    /// Rewrites every coefficient of an `l`-basis series in the `v`-basis.
    pub fn series_to_v(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        s.map_coefficients(Basis::V, |c| self.to_v_basis(c))
    }
}

/// Fails unless every coefficient of a `v`-basis series is integral.
pub fn require_integral(s: &TruncatedSeries) -> Result<()> {
    for (e, c) in s.terms() {
        if !c.is_integral() {
            return Err(Error::NonIntegral(format!(
                "coefficient of ξ^{} x^{}: {}",
                e.0, e.1, c
            )));
        }
    }
    Ok(())
}

/// `log ξ = ξ + Σ_{p^m <= k} l_m ξ^{p^m}` modulo `ξ^{k+1}`.
pub fn build_log(p: u32, k: u32) -> TruncatedSeries {
    let mut terms = vec![(1u32, GradedPolynomial::one(Basis::L))];
    let mut q = p as u64;
    let mut m = 1;
    while q <= k as u64 {
        terms.push((q as u32, GradedPolynomial::generator(Basis::L, m)));
        q *= p as u64;
        m += 1;
    }
    TruncatedSeries::univariate(p, Basis::L, k + 1, terms)
        .expect("single basis")
        .with_weight(-1)
}

/// `l_1, ..., l_horizon` in the `v`-basis from the Hazewinkel recursion
/// `p l_n = Σ_{i=0}^{n-1} l_i v_{n-i}^{p^i}` with `l_0 = 1`.
pub fn hazewinkel_table(p: u32, horizon: usize) -> Vec<GradedPolynomial> {
    let inv_p = Rational::new(1.into(), p.into());
    let mut table: Vec<GradedPolynomial> = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let mut sum = GradedPolynomial::generator(Basis::V, n);
        for i in 1..n {
            let v = GradedPolynomial::monomial(
                Basis::V,
                Monomial::generator_pow(n - i, p.pow(i as u32)),
                Rational::from_integer(1.into()),
            );
            sum = &sum + &(&table[i - 1] * &v);
        }
        table.push(sum.scale(&inv_p));
    }
    table
}
