use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::monomial::Monomial;
use super::Rational;
use crate::error::{Error, Result};

/// Which family of polynomial generators a polynomial is written in.
///
/// `L` is the rational basis `l_1, l_2, ...` (coefficients of the
/// logarithm), `V` the integral Hazewinkel generators `v_1, v_2, ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "l")]
    L,
    #[serde(rename = "v")]
    V,
}

impl Basis {
    pub fn symbol(self) -> &'static str {
        match self {
            Basis::L => "l",
            Basis::V => "v",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// An exact sparse polynomial over the rationals in the generators of one
/// [`Basis`].
///
/// Stored as integer numerators over one positive common denominator, reduced
/// so that the denominator shares no factor with every numerator. Terms are
/// kept in the canonical [`Monomial`] order with no zero coefficients, so two
/// equal polynomials are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedPolynomial {
    basis: Basis,
    terms: Vec<(Monomial, BigInt)>,
    denom: BigInt,
}

impl GradedPolynomial {
    pub fn zero(basis: Basis) -> Self {
        Self {
            basis,
            terms: Vec::new(),
            denom: BigInt::one(),
        }
    }

    pub fn one(basis: Basis) -> Self {
        Self::integer(basis, 1)
    }

    pub fn integer(basis: Basis, c: i64) -> Self {
        Self::monomial(basis, Monomial::one(), Rational::from_integer(c.into()))
    }

    pub fn constant(basis: Basis, c: Rational) -> Self {
        Self::monomial(basis, Monomial::one(), c)
    }

    /// The generator `g_m` of the basis.
    pub fn generator(basis: Basis, m: usize) -> Self {
        Self::monomial(basis, Monomial::generator(m), Rational::one())
    }

    pub fn monomial(basis: Basis, mono: Monomial, c: Rational) -> Self {
        Self::from_terms(basis, [(mono, c)])
    }

    /// Collects terms, summing repeated monomials and dropping zeros.
    pub fn from_terms(basis: Basis, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut acc = PolyAccumulator::new();
        for (m, c) in terms {
            acc.add_term(m, c.numer().clone(), c.denom());
        }
        acc.finish(basis)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(monomial, coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Rational)> + '_ {
        self.terms
            .iter()
            .map(|(m, c)| (m, Rational::new(c.clone(), self.denom.clone())))
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.terms.iter().map(|(m, _)| m)
    }

    /// Integer numerators over [`Self::denominator`].
    pub fn numerators(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> + '_ {
        self.terms.iter().map(|(m, c)| (m, c))
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        match self.terms.binary_search_by(|(m, _)| m.cmp(mono)) {
            Ok(i) => Rational::new(self.terms[i].1.clone(), self.denom.clone()),
            Err(_) => Rational::zero(),
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, _)] if m.is_one() => Some(self.constant_term()),
            _ => None,
        }
    }

    pub fn is_integral(&self) -> bool {
        self.denom.is_one()
    }

    pub fn max_generator(&self) -> usize {
        self.terms
            .iter()
            .map(|(m, _)| m.max_generator())
            .max()
            .unwrap_or(0)
    }

    /// The common weight of all terms, or `None` for zero or inhomogeneous
    /// polynomials.
    pub fn weight(&self, p: u32) -> Option<u64> {
        let mut it = self.terms.iter().map(|(m, _)| m.weight(p));
        let w = it.next()?;
        it.all(|x| x == w).then_some(w)
    }

    /// The zero polynomial is homogeneous of every weight.
    pub fn is_homogeneous_of(&self, p: u32, w: i64) -> bool {
        self.terms.iter().all(|(m, _)| m.weight(p) as i64 == w)
    }

    fn check_basis(&self, other: &Self) -> Result<()> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch(self.basis, other.basis))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        Ok(self.combine(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        Ok(self.combine(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_basis(other)?;
        let mut acc = PolyAccumulator::new();
        acc.add_product(self, other);
        Ok(acc.finish(self.basis))
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -other } else { other.clone() };
        }
        let (sa, sb, denom) = if self.denom == other.denom {
            (BigInt::one(), BigInt::one(), self.denom.clone())
        } else {
            let l = self.denom.lcm(&other.denom);
            (&l / &self.denom, &l / &other.denom, l)
        };
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let scaled = |c: &BigInt, s: &BigInt| if s.is_one() { c.clone() } else { c * s };
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            match ord {
                std::cmp::Ordering::Less => {
                    out.push((self.terms[i].0.clone(), scaled(&self.terms[i].1, &sa)));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let c = scaled(&other.terms[j].1, &sb);
                    out.push((other.terms[j].0.clone(), if negate { -c } else { c }));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let a = scaled(&self.terms[i].1, &sa);
                    let b = scaled(&other.terms[j].1, &sb);
                    let c = if negate { a - b } else { a + b };
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        let mut p = Self {
            basis: self.basis,
            terms: out,
            denom,
        };
        p.reduce();
        p
    }

    /// Restores the invariant `gcd(numerators, denominator) = 1`.
    fn reduce(&mut self) {
        if self.terms.is_empty() {
            self.denom = BigInt::one();
            return;
        }
        if self.denom.is_one() {
            return;
        }
        let mut g = self.denom.clone();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                return;
            }
        }
        for (_, c) in &mut self.terms {
            *c /= &g;
        }
        self.denom /= &g;
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.basis);
        }
        let mut p = Self {
            basis: self.basis,
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x * c.numer()))
                .collect(),
            denom: &self.denom * c.denom(),
        };
        p.reduce();
        p
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        self.scale(&Rational::from_integer(c.clone()))
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Self {
        Self {
            basis: self.basis,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(mono), c.clone()))
                .collect(),
            denom: self.denom.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.basis);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Keeps only the terms whose monomial satisfies `keep`.
    pub fn retain(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Self {
        let mut p = Self {
            basis: self.basis,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .cloned()
                .collect(),
            denom: self.denom.clone(),
        };
        p.reduce();
        p
    }

    /// For an integral polynomial, splits every coefficient `c` as
    /// `c = p q + r` with `0 <= r < p`, returning `(q, r)`.
    pub fn floor_divmod(&self, p: u32) -> Result<(Self, Self)> {
        if !self.is_integral() {
            return Err(Error::NonIntegral(self.to_string()));
        }
        let pb = BigInt::from(p);
        let mut q = Vec::new();
        let mut r = Vec::new();
        for (m, c) in &self.terms {
            let (qq, rr) = c.div_mod_floor(&pb);
            if !qq.is_zero() {
                q.push((m.clone(), qq));
            }
            if !rr.is_zero() {
                r.push((m.clone(), rr));
            }
        }
        let mk = |terms| Self {
            basis: self.basis,
            terms,
            denom: BigInt::one(),
        };
        Ok((mk(q), mk(r)))
    }

    /// Whether every coefficient is an integer in `{0, ..., p-1}`.
    pub fn is_normalized_mod(&self, p: u32) -> bool {
        let pb = BigInt::from(p);
        self.is_integral() && self.terms.iter().all(|(_, c)| !c.is_negative() && c < &pb)
    }
}

impl Neg for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn neg(self) -> GradedPolynomial {
        GradedPolynomial {
            basis: self.basis,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
            denom: self.denom.clone(),
        }
    }
}

impl Neg for GradedPolynomial {
    type Output = GradedPolynomial;
    fn neg(mut self) -> GradedPolynomial {
        for (_, c) in &mut self.terms {
            *c = -std::mem::take(c);
        }
        self
    }
}

// Operator forms panic on a basis mismatch; the `checked_*` forms report it.
impl Add for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn add(self, rhs: Self) -> GradedPolynomial {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl Sub for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn sub(self, rhs: Self) -> GradedPolynomial {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl Mul for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn mul(self, rhs: Self) -> GradedPolynomial {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl fmt::Debug for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Running sum of products of polynomials, kept over a common denominator.
#[derive(Default)]
pub(crate) struct PolyAccumulator {
    terms: BTreeMap<Monomial, BigInt>,
    denom: Option<BigInt>,
}

impl PolyAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Brings the accumulator onto a denominator divisible by `d` and returns
    /// the factor by which an addend over `d` has to be scaled.
    fn align(&mut self, d: &BigInt) -> BigInt {
        match &self.denom {
            None => {
                self.denom = Some(d.clone());
                BigInt::one()
            }
            Some(cur) if cur == d => BigInt::one(),
            Some(cur) => {
                let l = cur.lcm(d);
                let up = &l / cur;
                if !up.is_one() {
                    for c in self.terms.values_mut() {
                        *c *= &up;
                    }
                }
                let s = &l / d;
                self.denom = Some(l);
                s
            }
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt, d: &BigInt) {
        if c.is_zero() {
            return;
        }
        let s = self.align(d);
        let c = if s.is_one() { c } else { c * s };
        *self.terms.entry(m).or_default() += c;
    }

    pub fn add_poly(&mut self, a: &GradedPolynomial) {
        if a.is_zero() {
            return;
        }
        let s = self.align(&a.denom);
        for (m, c) in &a.terms {
            let e = self.terms.entry(m.clone()).or_default();
            if s.is_one() {
                *e += c;
            } else {
                *e += c * &s;
            }
        }
    }

    pub fn add_product(&mut self, a: &GradedPolynomial, b: &GradedPolynomial) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let s = if a.denom.is_one() && b.denom.is_one() {
            self.align(&BigInt::one())
        } else {
            self.align(&(&a.denom * &b.denom))
        };
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let mut c = ca * cb;
                if !s.is_one() {
                    c *= &s;
                }
                *self.terms.entry(ma.mul(mb)).or_default() += c;
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn finish(self, basis: Basis) -> GradedPolynomial {
        let mut p = GradedPolynomial {
            basis,
            terms: self
                .terms
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            denom: self.denom.unwrap_or_else(BigInt::one),
        };
        p.reduce();
        p
    }
}
