use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// A monomial in the generators `g_1, g_2, ...` (either the `v_m` or the `l_m`).
///
/// `exps[m - 1]` is the exponent of `g_m`. Trailing zero exponents are never
/// stored, so the unit monomial is the empty vector.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: SmallVec<[u32; 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    /// The single generator `g_m` (`m >= 1`).
    pub fn generator(m: usize) -> Self {
        Self::generator_pow(m, 1)
    }

    pub fn generator_pow(m: usize, e: u32) -> Self {
        assert!(m >= 1, "generators are indexed from 1");
        let mut exps = SmallVec::from_elem(0, m);
        exps[m - 1] = e;
        let mut mono = Self { exps };
        mono.trim();
        mono
    }

    /// Builds a monomial from `(m, e)` pairs; repeated generators accumulate.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut exps: SmallVec<[u32; 4]> = SmallVec::new();
        for (m, e) in pairs {
            assert!(m >= 1, "generators are indexed from 1");
            if exps.len() < m {
                exps.resize(m, 0);
            }
            exps[m - 1] += e;
        }
        let mut mono = Self { exps };
        mono.trim();
        mono
    }

    fn trim(&mut self) {
        while self.exps.last() == Some(&0) {
            self.exps.pop();
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Exponent of `g_m`.
    pub fn exponent(&self, m: usize) -> u32 {
        if m == 0 {
            return 0;
        }
        self.exps.get(m - 1).copied().unwrap_or(0)
    }

    /// Highest generator index with a nonzero exponent (0 for the unit).
    pub fn max_generator(&self) -> usize {
        self.exps.len()
    }

    /// `(m, e)` pairs with `e > 0`, ascending in `m`.
    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i + 1, e))
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// `sum_m e_m (p^m - 1)`.
    pub fn weight(&self, p: u32) -> u64 {
        self.factors()
            .map(|(m, e)| e as u64 * (generator_weight(p, m)))
            .sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (long, short) = if self.exps.len() >= other.exps.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut exps = long.exps.clone();
        for (e, o) in exps.iter_mut().zip(short.exps.iter()) {
            *e += o;
        }
        Self { exps }
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        Self {
            exps: self.exps.iter().map(|x| x * e).collect(),
        }
    }

    /// Whether any generator with index in `killed` divides this monomial.
    pub fn involves_any(&self, killed: impl Fn(usize) -> bool) -> bool {
        self.factors().any(|(m, _)| killed(m))
    }
}

/// `p^m - 1`, the weight of the generator `g_m`.
pub fn generator_weight(p: u32, m: usize) -> u64 {
    (p as u64).pow(m as u32) - 1
}

impl Ord for Monomial {
    /// Reverse lexicographic from the highest generator: `g_1^10 < g_1^7 g_2 <
    /// g_1 g_2^3 < g_1^3 g_3`. Within a homogeneous polynomial this lists terms
    /// by increasing exponent of the largest generators.
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.exps.len().max(other.exps.len());
        for i in (0..n).rev() {
            let a = self.exps.get(i).copied().unwrap_or(0);
            let b = other.exps.get(i).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial{:?}", self.exps.as_slice())
    }
}
