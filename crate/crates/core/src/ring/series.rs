use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use rayon::prelude::*;

use super::poly::{Basis, GradedPolynomial, PolyAccumulator};
use super::Rational;
use crate::error::{Error, Result};

/// Validity of a series known exactly (no truncation error).
pub const EXACT: u32 = u32::MAX;

/// `(xi exponent, x exponent)`.
pub type Exponent = (u32, u32);

fn sat_add(a: u32, b: u32) -> u32 {
    a.saturating_add(b)
}

fn sat_mul(a: u32, b: u32) -> u32 {
    a.saturating_mul(b)
}

/// A power series in `xi` (and optionally `x`) over [`GradedPolynomial`]s,
/// known modulo the ideal `(xi, x)^validity + (x^x_limit)`.
///
/// Every stored exponent `(i, j)` satisfies `i + j < validity` and
/// `j < x_limit`. An optional declared weight `w` promises that the
/// coefficient of `xi^i x^j` is homogeneous of weight `w + i + j`; at odd
/// primes that lets the validity skip orders where every coefficient is forced
/// to vanish.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    prime: u32,
    basis: Basis,
    coeffs: BTreeMap<Exponent, GradedPolynomial>,
    validity: u32,
    x_limit: u32,
    weight: Option<i64>,
}

impl TruncatedSeries {
    pub fn zero(prime: u32, basis: Basis, validity: u32) -> Self {
        Self {
            prime,
            basis,
            coeffs: BTreeMap::new(),
            validity,
            x_limit: EXACT,
            weight: None,
        }
    }

    /// Builds a series from terms; zeros and terms outside the validity are
    /// dropped, repeated exponents are summed.
    pub fn from_terms(
        prime: u32,
        basis: Basis,
        validity: u32,
        terms: impl IntoIterator<Item = (Exponent, GradedPolynomial)>,
    ) -> Result<Self> {
        let mut s = Self::zero(prime, basis, validity);
        for (e, c) in terms {
            if c.basis() != basis {
                return Err(Error::BasisMismatch(basis, c.basis()));
            }
            if c.is_zero() || !s.in_range(e) {
                continue;
            }
            let slot = s
                .coeffs
                .entry(e)
                .or_insert_with(|| GradedPolynomial::zero(basis));
            *slot = &*slot + &c;
            if slot.is_zero() {
                s.coeffs.remove(&e);
            }
        }
        Ok(s)
    }

    /// Univariate series `sum_j c_j xi^j`.
    pub fn univariate(
        prime: u32,
        basis: Basis,
        validity: u32,
        terms: impl IntoIterator<Item = (u32, GradedPolynomial)>,
    ) -> Result<Self> {
        Self::from_terms(
            prime,
            basis,
            validity,
            terms.into_iter().map(|(j, c)| ((j, 0), c)),
        )
    }

    pub fn constant(prime: u32, c: GradedPolynomial, validity: u32) -> Self {
        let basis = c.basis();
        Self::from_terms(prime, basis, validity, [((0, 0), c)]).expect("single basis")
    }

    pub fn one(prime: u32, basis: Basis, validity: u32) -> Self {
        Self::constant(prime, GradedPolynomial::one(basis), validity)
    }

    /// The exact monomial `xi^i x^j`.
    pub fn monomial(prime: u32, basis: Basis, e: Exponent) -> Self {
        Self::constant(prime, GradedPolynomial::one(basis), EXACT).shift(e.0, e.1)
    }

    /// Declares the total weight (with `weight(xi) = weight(x) = -1`).
    pub fn with_weight(mut self, w: i64) -> Self {
        self.weight = Some(w);
        self.settle();
        self
    }

    /// Records the weight without adjusting the validity.
    pub(crate) fn tag_weight(mut self, w: i64) -> Self {
        self.weight = Some(w);
        self
    }

    pub fn with_x_limit(mut self, limit: u32) -> Self {
        self.x_limit = self.x_limit.min(limit);
        self.prune();
        self
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn validity(&self) -> u32 {
        self.validity
    }

    pub fn x_limit(&self) -> u32 {
        self.x_limit
    }

    pub fn weight(&self) -> Option<i64> {
        self.weight
    }

    pub fn is_exact(&self) -> bool {
        self.validity == EXACT
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &GradedPolynomial)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Zero within its validity.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, e: Exponent) -> Option<&GradedPolynomial> {
        self.coeffs.get(&e)
    }

    fn in_range(&self, e: Exponent) -> bool {
        (e.0 as u64 + e.1 as u64) < self.validity as u64 && e.1 < self.x_limit
    }

    /// The coefficient of `xi^i x^j`, refusing exponents the series does not
    /// determine.
    pub fn coefficient_of(&self, e: Exponent) -> Result<GradedPolynomial> {
        if !self.in_range(e) {
            return Err(Error::OutsideValidity {
                xi: e.0,
                x: e.1,
                validity: self.validity,
            });
        }
        Ok(self
            .coeffs
            .get(&e)
            .cloned()
            .unwrap_or_else(|| GradedPolynomial::zero(self.basis)))
    }

    /// `(xi, x)`-adic valuation; a series vanishing within its validity has
    /// valuation at least `validity`.
    pub fn valuation(&self) -> u32 {
        self.coeffs
            .keys()
            .map(|e| e.0 + e.1)
            .min()
            .unwrap_or(self.validity)
    }

    /// A lower bound for the `x`-adic valuation of the true series. Unknown
    /// terms beyond a finite validity may be free of `x`, so only exact
    /// series can have a positive bound.
    pub fn x_valuation(&self) -> u32 {
        if self.validity != EXACT {
            return 0;
        }
        self.coeffs
            .keys()
            .map(|e| e.1)
            .min()
            .unwrap_or(self.x_limit)
    }

    pub fn is_univariate(&self) -> bool {
        self.coeffs.keys().all(|e| e.1 == 0)
    }

    pub fn max_generator(&self) -> usize {
        self.coeffs
            .values()
            .map(|c| c.max_generator())
            .max()
            .unwrap_or(0)
    }

    fn prune(&mut self) {
        let (v, xl) = (self.validity as u64, self.x_limit);
        self.coeffs
            .retain(|e, c| !c.is_zero() && (e.0 as u64 + e.1 as u64) < v && e.1 < xl);
    }

    /// Raises the validity past orders at which the declared weight forces
    /// every coefficient to vanish (only possible at odd primes, where every
    /// generator weight is divisible by `p - 1`).
    fn settle(&mut self) {
        self.prune();
        let Some(w) = self.weight else { return };
        if self.prime <= 2 || self.validity == EXACT {
            return;
        }
        let step = (self.prime - 1) as i64;
        while self.validity != EXACT && (w + self.validity as i64).rem_euclid(step) != 0 {
            self.validity += 1;
        }
    }

    /// Lowers the validity to `v` (never raises it).
    pub fn truncate(&self, v: u32) -> Self {
        let mut s = self.clone();
        s.validity = s.validity.min(v);
        s.prune();
        s
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        if self.basis != other.basis {
            return Err(Error::BasisMismatch(self.basis, other.basis));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, negate: bool) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self {
            prime: self.prime,
            basis: self.basis,
            coeffs: BTreeMap::new(),
            validity: self.validity.min(other.validity),
            x_limit: self.x_limit.min(other.x_limit),
            weight: match (self.weight, other.weight) {
                (Some(a), Some(b)) if a == b => Some(a),
                _ => None,
            },
        };
        for (e, c) in &self.coeffs {
            if out.in_range(*e) {
                out.coeffs.insert(*e, c.clone());
            }
        }
        for (e, c) in &other.coeffs {
            if !out.in_range(*e) {
                continue;
            }
            let c = if negate { -c } else { c.clone() };
            match out.coeffs.get_mut(e) {
                Some(slot) => *slot = &*slot + &c,
                None => {
                    out.coeffs.insert(*e, c);
                }
            }
        }
        out.settle();
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    /// Product. The result is valid modulo
    /// `(xi,x)^min(V_A + val B, V_B + val A) + (x^min(c_A + xval B, c_B + xval A))`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let validity = sat_add(self.validity, other.valuation())
            .min(sat_add(other.validity, self.valuation()));
        let x_limit = sat_add(self.x_limit, other.x_valuation())
            .min(sat_add(other.x_limit, self.x_valuation()));
        let coeffs = raw_product(&self.coeffs, &other.coeffs, validity, x_limit, self.basis);
        let mut out = Self {
            prime: self.prime,
            basis: self.basis,
            coeffs,
            validity,
            x_limit,
            weight: self.weight.zip(other.weight).map(|(a, b)| a + b),
        };
        out.settle();
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.values_mut() {
            *c = -&*c;
        }
        s
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut s = self.clone();
        if c.is_zero() {
            s.coeffs.clear();
        } else {
            for v in s.coeffs.values_mut() {
                *v = v.scale(c);
            }
        }
        s
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&Rational::from_integer(c.into()))
    }

    /// Multiplies every coefficient by the polynomial `c`. The weight is
    /// kept only when `c` is homogeneous.
    pub fn scale_poly(&self, c: &GradedPolynomial) -> Result<Self> {
        if c.basis() != self.basis {
            return Err(Error::BasisMismatch(self.basis, c.basis()));
        }
        let mut s = self.clone();
        s.coeffs = s
            .coeffs
            .into_iter()
            .map(|(e, v)| (e, &v * c))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        s.weight = match (s.weight, c.is_zero()) {
            (w, true) => w,
            (Some(w), false) => c.weight(self.prime).map(|cw| w + cw as i64),
            (None, false) => None,
        };
        s.settle();
        Ok(s)
    }

    /// Multiplication by `xi^a x^b`.
    pub fn shift(&self, a: u32, b: u32) -> Self {
        Self {
            prime: self.prime,
            basis: self.basis,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| ((e.0 + a, e.1 + b), c.clone()))
                .collect(),
            validity: sat_add(self.validity, a + b),
            x_limit: sat_add(self.x_limit, b),
            weight: self.weight.map(|w| w - (a + b) as i64),
        }
    }

    /// Exact division by `xi^j`.
    pub fn div_xi_power(&self, j: u32) -> Result<Self> {
        if let Some(e) = self.coeffs.keys().find(|e| e.0 < j) {
            return Err(Error::NotDivisible(format!(
                "term xi^{} x^{} is not divisible by xi^{}",
                e.0, e.1, j
            )));
        }
        if self.validity != EXACT && self.validity < j {
            return Err(Error::NotDivisible(format!(
                "validity {} is below xi^{}",
                self.validity, j
            )));
        }
        let mut s = Self {
            prime: self.prime,
            basis: self.basis,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| ((e.0 - j, e.1), c.clone()))
                .collect(),
            validity: if self.validity == EXACT {
                EXACT
            } else {
                self.validity - j
            },
            x_limit: self.x_limit,
            weight: self.weight.map(|w| w + j as i64),
        };
        s.settle();
        Ok(s)
    }

    /// The coefficient of `x^i`, as a series in `xi` alone.
    pub fn x_slice(&self, i: u32) -> Result<Self> {
        if i >= self.x_limit || (self.validity != EXACT && i >= self.validity) {
            return Err(Error::OutsideValidity {
                xi: 0,
                x: i,
                validity: self.validity,
            });
        }
        let mut s = Self {
            prime: self.prime,
            basis: self.basis,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| e.1 == i)
                .map(|(e, c)| ((e.0, 0), c.clone()))
                .collect(),
            validity: if self.validity == EXACT {
                EXACT
            } else {
                self.validity - i
            },
            x_limit: EXACT,
            weight: self.weight.map(|w| w + i as i64),
        };
        s.settle();
        Ok(s)
    }

    /// Applies `f` to every coefficient; `f` may change the basis.
    pub fn map_coefficients(
        &self,
        basis: Basis,
        f: impl Fn(&GradedPolynomial) -> Result<GradedPolynomial> + Sync,
    ) -> Result<Self> {
        let mapped: Result<Vec<_>> = self
            .coeffs
            .par_iter()
            .map(|(e, c)| Ok((*e, f(c)?)))
            .collect();
        let mut s = Self {
            prime: self.prime,
            basis,
            coeffs: BTreeMap::new(),
            validity: self.validity,
            x_limit: self.x_limit,
            weight: self.weight,
        };
        for (e, c) in mapped? {
            if c.basis() != basis {
                return Err(Error::BasisMismatch(basis, c.basis()));
            }
            if !c.is_zero() {
                s.coeffs.insert(e, c);
            }
        }
        Ok(s)
    }

    /// Keeps only the monomials satisfying `keep` in every coefficient.
    pub fn retain_monomials(&self, keep: impl Fn(&super::Monomial) -> bool) -> Self {
        let mut s = self.clone();
        s.coeffs = s
            .coeffs
            .into_iter()
            .map(|(e, c)| (e, c.retain(&keep)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        s
    }

    /// Equality of all coefficients both series determine.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_disagreement(other).is_none()
    }

    /// The lowest exponent (in `(xi, x)` order) inside the joint validity at
    /// which the two series differ.
    pub fn first_disagreement(&self, other: &Self) -> Option<Exponent> {
        if self.basis != other.basis || self.prime != other.prime {
            return Some((0, 0));
        }
        let v = self.validity.min(other.validity) as u64;
        let xl = self.x_limit.min(other.x_limit);
        let inside = |e: &Exponent| (e.0 as u64 + e.1 as u64) < v && e.1 < xl;
        let mut keys: Vec<Exponent> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .copied()
            .filter(inside)
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .find(|e| self.coeffs.get(e) != other.coeffs.get(e))
    }

    /// Checks the declared weight against every stored coefficient.
    pub fn check_homogeneity(&self) -> std::result::Result<(), String> {
        let Some(w) = self.weight else {
            return Ok(());
        };
        for (e, c) in &self.coeffs {
            let expect = w + (e.0 + e.1) as i64;
            if !c.is_homogeneous_of(self.prime, expect) {
                return Err(format!(
                    "coefficient of xi^{} x^{} is not homogeneous of weight {}",
                    e.0, e.1, expect
                ));
            }
        }
        Ok(())
    }

    /// `A(B)` for `A` a series in `xi` alone and `B` without constant term.
    ///
    /// Valid modulo `(xi,x)^V` with `V = min(V_A val(B), min_{a_j != 0, j >= 1}
    /// V_B + (j-1) val(B))`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_compatible(inner)?;
        if !self.is_univariate() {
            return Err(Error::NotUnivariate);
        }
        if inner.coeffs.contains_key(&(0, 0)) {
            return Err(Error::NonzeroConstantTerm);
        }
        let vb = inner.valuation().max(1);
        let xvb = inner.x_valuation();
        let mut validity = sat_mul(self.validity, vb);
        let mut x_limit = EXACT;
        for (e, _) in self.coeffs.iter().filter(|(e, _)| e.0 >= 1) {
            let j = e.0;
            validity = validity.min(sat_add(inner.validity, sat_mul(j - 1, vb)));
            x_limit = x_limit.min(sat_add(inner.x_limit, sat_mul(j - 1, xvb)));
        }
        if validity == EXACT && self.validity == EXACT && inner.validity != EXACT {
            // Only the constant term of A is present.
            validity = EXACT;
        }
        let top = self.coeffs.keys().map(|e| e.0).max().unwrap_or(0);
        let mut acc: BTreeMap<Exponent, GradedPolynomial> = BTreeMap::new();
        for j in (0..=top).rev() {
            if !acc.is_empty() {
                acc = raw_product(&acc, &inner.coeffs, validity, x_limit, self.basis);
            }
            if let Some(c) = self.coeffs.get(&(j, 0)) {
                if validity > 0 {
                    let slot = acc
                        .entry((0, 0))
                        .or_insert_with(|| GradedPolynomial::zero(self.basis));
                    *slot = &*slot + c;
                    if slot.is_zero() {
                        acc.remove(&(0, 0));
                    }
                }
            }
        }
        let weight = match (self.weight, inner.weight) {
            // A of weight w has coefficients c_j of weight w + j; substituting a
            // weight -1 series keeps the weight of A.
            (Some(w), Some(-1)) => Some(w),
            _ => None,
        };
        let mut out = Self {
            prime: self.prime,
            basis: self.basis,
            coeffs: acc,
            validity,
            x_limit,
            weight,
        };
        out.settle();
        Ok(out)
    }

    fn unit_constant(&self) -> Result<Rational> {
        let c = self
            .coeffs
            .get(&(0, 0))
            .and_then(|c| c.as_constant())
            .unwrap_or_else(Rational::zero);
        if c.is_zero() {
            Err(Error::NotInvertible)
        } else {
            Ok(c)
        }
    }

    /// Multiplicative inverse of a univariate series whose constant term is a
    /// nonzero rational, computed degree by degree.
    pub fn reciprocal(&self) -> Result<Self> {
        if !self.is_univariate() {
            return Err(Error::NotUnivariate);
        }
        if self.validity == EXACT {
            return Err(Error::UnboundedValidity);
        }
        let c0 = self.unit_constant()?;
        let inv0 = c0.recip();
        let neg_inv0 = -inv0.clone();
        let a: Vec<(u32, &GradedPolynomial)> = self
            .coeffs
            .iter()
            .filter(|(e, _)| e.0 > 0)
            .map(|(e, c)| (e.0, c))
            .collect();
        let v = self.validity;
        let mut r: Vec<Option<GradedPolynomial>> = vec![None; v as usize];
        if v > 0 {
            r[0] = Some(GradedPolynomial::constant(self.basis, inv0));
        }
        for n in 1..v {
            let mut acc = PolyAccumulator::new();
            for &(i, ai) in a.iter().take_while(|(i, _)| *i <= n) {
                if let Some(rj) = &r[(n - i) as usize] {
                    acc.add_product(ai, rj);
                }
            }
            if !acc.is_empty() {
                let s = acc.finish(self.basis).scale(&neg_inv0);
                if !s.is_zero() {
                    r[n as usize] = Some(s);
                }
            }
        }
        let mut out = Self::univariate(
            self.prime,
            self.basis,
            v,
            r.into_iter()
                .enumerate()
                .filter_map(|(n, c)| c.map(|c| (n as u32, c))),
        )?;
        if let Some(w) = self.weight {
            out = out.with_weight(-w);
        }
        Ok(out)
    }

    /// Compositional inverse of a univariate series `a_1 xi + a_2 xi^2 + ...`
    /// with `a_1` a nonzero rational.
    ///
    /// Degree by degree: `b_n = -(1/a_1) sum_{j>=2} a_j [xi^n] B^j`, with the
    /// powers `B^j = xi^j U^j` maintained online by the J.C.P. Miller
    /// recurrence for `U^j`.
    pub fn revert(&self) -> Result<Self> {
        if !self.is_univariate() {
            return Err(Error::NotUnivariate);
        }
        if self.validity == EXACT {
            return Err(Error::UnboundedValidity);
        }
        if self.coeffs.contains_key(&(0, 0)) {
            return Err(Error::NonzeroConstantTerm);
        }
        let a1 = self
            .coeffs
            .get(&(1, 0))
            .and_then(|c| c.as_constant())
            .filter(|c| !c.is_zero())
            .ok_or(Error::NotInvertible)?;
        let basis = self.basis;
        let v = self.validity as usize;
        let u0 = a1.recip();
        let neg_u0 = -u0.clone();
        // u[i] = b_{i+1}
        let mut u: Vec<Option<GradedPolynomial>> = Vec::with_capacity(v);
        u.push(Some(GradedPolynomial::constant(basis, u0.clone())));
        let higher: Vec<(usize, &GradedPolynomial)> = self
            .coeffs
            .iter()
            .filter(|(e, _)| e.0 >= 2)
            .map(|(e, c)| (e.0 as usize, c))
            .collect();
        // powers[k][m] = [xi^m] U^{j_k}
        let mut powers: Vec<Vec<Option<GradedPolynomial>>> = higher
            .iter()
            .map(|&(j, _)| {
                vec![Some(GradedPolynomial::constant(
                    basis,
                    pow_rational(&u0, j as u32),
                ))]
            })
            .collect();
        for n in 2..v {
            let mut acc = PolyAccumulator::new();
            for (k, &(j, aj)) in higher.iter().enumerate() {
                if j > n {
                    continue;
                }
                let m = n - j;
                while powers[k].len() <= m {
                    let next = miller_step(&u, &powers[k], j as u32, &u0, basis);
                    powers[k].push(next);
                }
                if let Some(w) = &powers[k][m] {
                    acc.add_product(aj, w);
                }
            }
            let bn = acc.finish(basis).scale(&neg_u0);
            u.push(if bn.is_zero() { None } else { Some(bn) });
        }
        let mut out = Self::univariate(
            self.prime,
            basis,
            self.validity,
            u.into_iter()
                .enumerate()
                .filter_map(|(i, c)| c.map(|c| (i as u32 + 1, c))),
        )?;
        if let Some(w) = self.weight {
            out = out.with_weight(w);
        }
        Ok(out)
    }
}

fn pow_rational(r: &Rational, e: u32) -> Rational {
    num_traits::pow(r.clone(), e as usize)
}

/// Next coefficient `W_m` of `W = U^q` from `U` and `W_0..W_{m-1}`:
/// `W_m = (1/(m u_0)) sum_{i=1}^m ((q+1) i - m) u_i W_{m-i}`.
fn miller_step(
    u: &[Option<GradedPolynomial>],
    w: &[Option<GradedPolynomial>],
    q: u32,
    u0: &Rational,
    basis: Basis,
) -> Option<GradedPolynomial> {
    let m = w.len();
    let mut acc = PolyAccumulator::new();
    for i in 1..=m {
        let (Some(ui), Some(wi)) = (u.get(i).and_then(|c| c.as_ref()), w[m - i].as_ref()) else {
            continue;
        };
        let factor = (q as i64 + 1) * i as i64 - m as i64;
        if factor == 0 {
            continue;
        }
        acc.add_product(&ui.scale_int(&factor.into()), wi);
    }
    if acc.is_empty() {
        return None;
    }
    let scale = (u0 * Rational::from_integer((m as i64).into())).recip();
    let c = acc.finish(basis).scale(&scale);
    (!c.is_zero()).then_some(c)
}

/// Product of two coefficient maps truncated to total degree `< validity` and
/// `x` degree `< x_limit`. Output slots are summed independently (in
/// parallel); exact arithmetic makes the result independent of scheduling.
pub(crate) fn raw_product(
    a: &BTreeMap<Exponent, GradedPolynomial>,
    b: &BTreeMap<Exponent, GradedPolynomial>,
    validity: u32,
    x_limit: u32,
    basis: Basis,
) -> BTreeMap<Exponent, GradedPolynomial> {
    let at: Vec<(Exponent, &GradedPolynomial)> = a.iter().map(|(e, c)| (*e, c)).collect();
    let mut bt: Vec<(Exponent, &GradedPolynomial)> = b.iter().map(|(e, c)| (*e, c)).collect();
    bt.sort_by_key(|(e, _)| (e.0 as u64 + e.1 as u64, *e));
    let v = validity as u64;
    let mut groups: HashMap<Exponent, Vec<(u32, u32)>> = HashMap::new();
    for (ia, (ea, _)) in at.iter().enumerate() {
        let da = ea.0 as u64 + ea.1 as u64;
        if da >= v {
            continue;
        }
        for (ib, (eb, _)) in bt.iter().enumerate() {
            if da + eb.0 as u64 + eb.1 as u64 >= v {
                break;
            }
            let x = ea.1 as u64 + eb.1 as u64;
            if x >= x_limit as u64 {
                continue;
            }
            groups
                .entry((ea.0 + eb.0, ea.1 + eb.1))
                .or_default()
                .push((ia as u32, ib as u32));
        }
    }
    let mut slots: Vec<(Exponent, Vec<(u32, u32)>)> = groups.into_iter().collect();
    slots.sort_unstable_by_key(|(e, _)| *e);
    slots
        .into_par_iter()
        .filter_map(|(e, pairs)| {
            let mut acc = PolyAccumulator::new();
            for (ia, ib) in pairs {
                acc.add_product(at[ia as usize].1, bt[ib as usize].1);
            }
            let c = acc.finish(basis);
            (!c.is_zero()).then_some((e, c))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

impl std::fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self)
    }
}
