use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// A finitely supported multi-index `ᾱ = (α_1, α_2, ...)`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    alpha: Vec<u32>,
}

impl MultiIndex {
    pub fn new(alpha: impl Into<Vec<u32>>) -> Self {
        let mut alpha = alpha.into();
        while alpha.last() == Some(&0) {
            alpha.pop();
        }
        Self { alpha }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// `α_i` for `i >= 1`.
    pub fn get(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.alpha.get(i - 1).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> &[u32] {
        &self.alpha
    }

    /// `|ᾱ| = Σ α_i`.
    pub fn size(&self) -> u32 {
        self.alpha.iter().sum()
    }

    /// `|ᾱ|' = Σ i α_i`.
    pub fn weighted_size(&self) -> u32 {
        self.alpha
            .iter()
            .enumerate()
            .map(|(i, a)| (i as u32 + 1) * a)
            .sum()
    }

    /// `(i, α_i)` with `α_i > 0`.
    pub fn support(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.alpha
            .iter()
            .enumerate()
            .filter(|(_, a)| **a > 0)
            .map(|(i, a)| (i + 1, *a))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.alpha.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, ")")
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Falling factorial `n (n-1) ... (n-s+1)`.
pub(crate) fn falling(n: i64, s: u32) -> BigInt {
    (0..s as i64).fold(BigInt::one(), |acc, j| acc * (n - j))
}

/// The coefficient of `b^ᾱ` in `(1 + b_1 + b_2 + ...)^n`, for any integer `n`:
/// `n (n-1) ... (n-|ᾱ|+1) / ∏ α_i!`.
pub fn mu(n: i64, alpha: &MultiIndex) -> BigInt {
    mu_from_parts(n, alpha.size(), &alpha_factorials(alpha))
}

pub(crate) fn alpha_factorials(alpha: &MultiIndex) -> BigInt {
    alpha
        .entries()
        .iter()
        .fold(BigInt::one(), |acc, a| acc * factorial(*a))
}

pub(crate) fn mu_from_parts(n: i64, size: u32, fact: &BigInt) -> BigInt {
    let num = falling(n, size);
    let (q, r) = num.div_rem(fact);
    debug_assert!(r.is_zero());
    q
}

/// `{p^j - 1 : j >= 0}` up to `n`.
pub fn cp_degrees(p: u32, n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut q: u64 = 1;
    while q - 1 <= n as u64 {
        out.push((q - 1) as u32);
        q *= p as u64;
    }
    out
}

/// Every `ᾱ` whose summand in `MC_n` can be nonzero: `|ᾱ|' <= n` and
/// `n - |ᾱ|'` of the form `p^j - 1`. Sorted by `(|ᾱ|', ᾱ)`.
pub fn enumerate_indices(n: u32, p: u32) -> Vec<(MultiIndex, u32)> {
    let mut out = Vec::new();
    for r in cp_degrees(p, n) {
        let k = n - r;
        let mut parts = Vec::new();
        partitions(k, k.max(1), &mut parts, &mut out, k);
    }
    out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    out
}

/// Appends all `ᾱ` with `|ᾱ|' = rest` using parts of size at most `max`.
fn partitions(rest: u32, max: u32, parts: &mut Vec<u32>, out: &mut Vec<(MultiIndex, u32)>, k: u32) {
    if rest == 0 {
        let mut alpha = vec![0u32; parts.first().copied().unwrap_or(0) as usize];
        for &i in parts.iter() {
            alpha[i as usize - 1] += 1;
        }
        out.push((MultiIndex::new(alpha), k));
        return;
    }
    for i in (1..=max.min(rest)).rev() {
        parts.push(i);
        partitions(rest - i, i, parts, out, k);
        parts.pop();
    }
}
