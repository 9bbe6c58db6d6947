//! McClure's obstruction series `MC_n(ξ)`.
//!
//! The primary route is the multi-index sum
//!
//! ```text
//! MC_n = Σ_ᾱ μ(-(n+1); ᾱ) · r_*[CP^(n - |ᾱ|')] · a_0^(n - |ᾱ|) · ∏ a_i^α_i
//! ```
//!
//! evaluated in the `l`-basis. [`mc_via_inverse`] and [`mc_2p2_explicit`]
//! are independent cross-checks.

mod index;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use index::mu_from_parts;
pub use index::{cp_degrees, enumerate_indices, mu, MultiIndex};

use crate::error::{Error, Result};
use crate::fgl::{require_integral, FglContext};
use crate::powerop::PowerOpData;
use crate::reduction::{nonvanishing_certificate, ReducedSeries, Reducer};
use crate::ring::{Basis, GradedPolynomial, Rational, TruncatedSeries, EXACT};

/// `r_*[CP^i]` in the `l`-basis: `p^m l_m` when `i = p^m - 1`, else 0.
pub fn cp_image_l(p: u32, i: u32) -> GradedPolynomial {
    let mut q: u64 = 1;
    let mut m = 0;
    while q - 1 < i as u64 {
        q *= p as u64;
        m += 1;
    }
    if q - 1 != i as u64 {
        return GradedPolynomial::zero(Basis::L);
    }
    if m == 0 {
        return GradedPolynomial::one(Basis::L);
    }
    GradedPolynomial::generator(Basis::L, m).scale_int(&BigInt::from(q))
}

/// `r_*[CP^i]` in the `v`-basis.
pub fn cp_image(ctx: &FglContext, i: u32) -> Result<GradedPolynomial> {
    let c = ctx.to_v_basis(&cp_image_l(ctx.prime(), i))?;
    if !c.is_integral() {
        return Err(Error::NonIntegral(c.to_string()));
    }
    Ok(c)
}

/// Whether `MC_n` is an obstruction (`n != p^i - 1`).
pub fn is_obstruction_index(p: u32, n: u32) -> bool {
    !cp_degrees(p, n).contains(&n)
}

/// `MC_n ≡ 0` by sparseness (odd `p`, `n` not divisible by `p - 1`).
pub fn vanishes_by_sparseness(p: u32, n: u32) -> bool {
    p > 2 && !n.is_multiple_of(p - 1)
}

#[derive(Clone, Debug)]
pub struct ObstructionResult {
    pub n: u32,
    pub prime: u32,
    /// The unreduced series in the `v`-basis; `None` when skipped by sparseness.
    pub raw: Option<TruncatedSeries>,
    pub reduced: ReducedSeries,
    pub certificate: Option<(u32, GradedPolynomial)>,
}

impl ObstructionResult {
    pub fn is_obstruction_index(&self) -> bool {
        is_obstruction_index(self.prime, self.n)
    }

    pub fn by_sparseness(&self) -> bool {
        self.raw.is_none()
    }
}

pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

#[derive(Clone, Copy, Default)]
pub struct McOptions<'a> {
    /// Compute the sum even when sparseness already forces `MC_n ≡ 0`.
    pub force_full: bool,
    /// Truncate every intermediate product at this order.
    pub validity_cap: Option<u32>,
    /// Called with `(summands done, total)`.
    pub progress: Option<Progress<'a>>,
}

type Buckets = BTreeMap<u32, TruncatedSeries>;

fn merge(into: &mut Buckets, from: Buckets) -> Result<()> {
    for (s, t) in from {
        match into.remove(&s) {
            Some(cur) => {
                into.insert(s, cur.checked_add(&t)?);
            }
            None => {
                into.insert(s, t);
            }
        }
    }
    Ok(())
}

struct Walker<'a> {
    n: u32,
    prime: u32,
    cap: u32,
    a0_val: u32,
    /// `powers[i][e - 1] = a_i^e`.
    powers: Vec<Vec<TruncatedSeries>>,
    cps: Vec<u32>,
    done: AtomicUsize,
    total: usize,
    progress: Option<Progress<'a>>,
}

struct Node {
    prod: Option<TruncatedSeries>,
    size: u32,
    fact: BigInt,
}

impl Walker<'_> {
    /// Products that will later gain at least `(n - s_max) val(a_0)` orders
    /// need not be kept beyond `cap` minus that.
    fn cut(&self, s_max: u32) -> u32 {
        if self.cap == EXACT {
            return EXACT;
        }
        self.cap
            .saturating_sub(self.n.saturating_sub(s_max) * self.a0_val)
            .max(1)
    }

    fn times(&self, node: &Node, i: usize, e: u32, s_max: u32) -> Result<Node> {
        if e == 0 {
            return Ok(Node {
                prod: node.prod.clone(),
                size: node.size,
                fact: node.fact.clone(),
            });
        }
        let pw = &self.powers[i][e as usize - 1];
        let prod = match &node.prod {
            None => pw.clone(),
            Some(p) => p.checked_mul(pw)?.truncate(self.cut(s_max)),
        };
        let fact = (1..=e).fold(node.fact.clone(), |acc, j| acc * j);
        Ok(Node {
            prod: Some(prod),
            size: node.size + e,
            fact,
        })
    }

    fn walk(&self, i: usize, budget: u32, node: Node) -> Result<Buckets> {
        let mut out = Buckets::new();
        if i == 1 {
            for &r in self.cps.iter().filter(|&&r| r <= budget) {
                let e = budget - r;
                let leaf = self.times(&node, 1, e, node.size + e)?;
                let coef = mu_from_parts(-(self.n as i64) - 1, leaf.size, &leaf.fact);
                let cp = cp_image_l(self.prime, r).scale_int(&coef);
                let term = match leaf.prod {
                    Some(p) => p.scale_poly(&cp)?,
                    None => TruncatedSeries::constant(self.prime, cp, EXACT),
                };
                merge(&mut out, Buckets::from([(leaf.size, term)]))?;
                let done = self.done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(cb) = self.progress {
                    cb(done, self.total);
                }
            }
            return Ok(out);
        }
        let choices: Vec<u32> = (0..=budget / i as u32).collect();
        let branch = |e: &u32| -> Result<Buckets> {
            let rest = budget - e * i as u32;
            let child = self.times(&node, i, *e, node.size + e + rest)?;
            self.walk(i - 1, rest, child)
        };
        let parts: Vec<Result<Buckets>> = if i >= 3 && choices.len() > 1 {
            choices.par_iter().map(branch).collect()
        } else {
            choices.iter().map(branch).collect()
        };
        for part in parts {
            merge(&mut out, part?)?;
        }
        Ok(out)
    }
}

fn need_a(data: &PowerOpData, n: u32) -> Result<()> {
    if (data.a.len() as u32) <= n {
        return Err(Error::InvalidArgument(format!(
            "MC_{} needs a_0..a_{}; only a_0..a_{} available (raise the truncation above {})",
            n,
            n,
            data.a.len() - 1,
            n
        )));
    }
    Ok(())
}

/// The raw multi-index sum in the `l`-basis.
pub fn mc_raw_l(data: &PowerOpData, n: u32, opts: &McOptions<'_>) -> Result<TruncatedSeries> {
    need_a(data, n)?;
    let p = data.prime();
    let cap = opts.validity_cap.unwrap_or(EXACT);
    let a0 = &data.a[0];
    let total = enumerate_indices(n, p).len();
    let powers: Vec<Vec<TruncatedSeries>> = (0..=n as usize)
        .into_par_iter()
        .map(|i| -> Result<Vec<TruncatedSeries>> {
            if i == 0 {
                return Ok(Vec::new());
            }
            let mut v: Vec<TruncatedSeries> = Vec::new();
            for _ in 1..=(n as usize / i) {
                let next = match v.last() {
                    None => data.a[i].truncate(cap),
                    Some(prev) => prev.checked_mul(&data.a[i])?.truncate(cap),
                };
                v.push(next);
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let walker = Walker {
        n,
        prime: p,
        cap,
        a0_val: a0.valuation(),
        powers,
        cps: cp_degrees(p, n),
        done: AtomicUsize::new(0),
        total,
        progress: opts.progress,
    };
    let root = Node {
        prod: None,
        size: 0,
        fact: BigInt::one(),
    };
    let buckets = if n == 0 {
        let term = TruncatedSeries::constant(p, GradedPolynomial::one(Basis::L), EXACT);
        Buckets::from([(0, term)])
    } else {
        walker.walk(n as usize, n, root)?
    };
    let mut total_sum: Option<TruncatedSeries> = None;
    let mut a0_pow = TruncatedSeries::one(p, Basis::L, EXACT).with_weight(0);
    let mut have = 0u32;
    for s in (0..=n).rev() {
        let Some(b) = buckets.get(&s) else { continue };
        while have < n - s {
            a0_pow = a0_pow.checked_mul(a0)?.truncate(cap);
            have += 1;
        }
        let term = b.checked_mul(&a0_pow)?.truncate(cap);
        total_sum = Some(match total_sum {
            None => term,
            Some(t) => t.checked_add(&term)?,
        });
    }
    let raw = total_sum.unwrap_or_else(|| TruncatedSeries::zero(p, Basis::L, cap));
    Ok(raw.with_weight(-(n as i64) * (p as i64 - 2)))
}

/// `MC_n`: raw series, canonical representative modulo `⟨p⟩ξ` and a
/// nonvanishing certificate when one exists.
pub fn mc(
    ctx: &FglContext,
    data: &PowerOpData,
    reducer: &Reducer,
    n: u32,
    opts: &McOptions<'_>,
) -> Result<ObstructionResult> {
    let p = ctx.prime();
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if vanishes_by_sparseness(p, n) && !opts.force_full {
        return Ok(sparse_result(p, n));
    }
    let raw_l = mc_raw_l(data, n, opts)?;
    finish(ctx, reducer, n, &raw_l)
}

fn sparse_result(p: u32, n: u32) -> ObstructionResult {
    ObstructionResult {
        n,
        prime: p,
        raw: None,
        reduced: ReducedSeries {
            series: TruncatedSeries::zero(p, Basis::V, EXACT),
            normal: true,
        },
        certificate: None,
    }
}

fn finish(
    ctx: &FglContext,
    reducer: &Reducer,
    n: u32,
    raw_l: &TruncatedSeries,
) -> Result<ObstructionResult> {
    let p = ctx.prime();
    let raw = ctx.series_to_v(raw_l)?;
    require_integral(&raw)?;
    if raw.validity() < p {
        return Err(Error::InsufficientTruncation {
            validity: raw.validity(),
            needed: p,
        });
    }
    let reduced = reducer.canonical_rep(&raw)?;
    let certificate = nonvanishing_certificate(&reduced);
    Ok(ObstructionResult {
        n,
        prime: p,
        raw: Some(raw),
        reduced,
        certificate,
    })
}

/// An [`ObstructionResult`] together with the internal truncation used.
#[derive(Clone, Debug)]
pub struct McRun {
    pub result: ObstructionResult,
    pub truncation: u32,
}

/// `MC_n` valid modulo exactly `ξ^target`, searching for the smallest
/// internal truncation that reaches it.
pub fn mc_to_validity(
    p: u32,
    n: u32,
    target: u32,
    reducer: &Reducer,
    opts: &McOptions<'_>,
) -> Result<McRun> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if vanishes_by_sparseness(p, n) && !opts.force_full {
        return Ok(McRun {
            result: sparse_result(p, n),
            truncation: n + 1,
        });
    }
    if target < p {
        return Err(Error::InsufficientTruncation {
            validity: target,
            needed: p,
        });
    }
    let capped = McOptions {
        validity_cap: Some(target),
        ..*opts
    };
    let mut k = n + 1;
    loop {
        let ctx = FglContext::new(p, k)?;
        let data = PowerOpData::compute(&ctx, n)?;
        let raw_l = mc_raw_l(&data, n, &capped)?;
        if raw_l.validity() >= target {
            let mut result = finish(&ctx, reducer, n, &raw_l.truncate(target))?;
            result.reduced.series = result.reduced.series.truncate(target);
            return Ok(McRun {
                result,
                truncation: k,
            });
        }
        k += target - raw_l.validity();
    }
}

/// `ξ^(-shift) · body`.
#[derive(Clone)]
struct Laurent {
    shift: u32,
    body: TruncatedSeries,
}

impl Laurent {
    fn series(s: TruncatedSeries) -> Self {
        Self { shift: 0, body: s }
    }

    fn inverse(s: &TruncatedSeries) -> Result<Self> {
        let v = s.valuation();
        Ok(Self {
            shift: v,
            body: s.div_xi_power(v)?.reciprocal()?,
        })
    }

    fn mul(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            shift: self.shift + o.shift,
            body: self.body.checked_mul(&o.body)?,
        })
    }

    fn add(&self, o: &Self) -> Result<Self> {
        let shift = self.shift.max(o.shift);
        let a = self.body.shift(shift - self.shift, 0);
        let b = o.body.shift(shift - o.shift, 0);
        Ok(Self {
            shift,
            body: a.checked_add(&b)?,
        })
    }

    fn scale_poly(&self, c: &GradedPolynomial) -> Result<Self> {
        Ok(Self {
            shift: self.shift,
            body: self.body.scale_poly(c)?,
        })
    }

    fn into_series(self) -> Result<TruncatedSeries> {
        self.body.div_xi_power(self.shift)
    }
}

/// `MC_n = a_0^(2n+1) Σ_k r_*[CP^(n-k)] [z^k] (Σ a_i z^i)^(-(n+1))`, evaluated
/// with Laurent coefficients in `ξ`; returned in the `l`-basis.
pub fn mc_via_inverse_l(data: &PowerOpData, n: u32) -> Result<TruncatedSeries> {
    need_a(data, n)?;
    let p = data.prime();
    let a = &data.a;
    let inv0 = Laurent::inverse(&a[0])?;
    let neg_inv0 = inv0.scale_poly(&GradedPolynomial::integer(Basis::L, -1))?;
    // r = 1 / Σ a_i z^i
    let mut r: Vec<Laurent> = vec![inv0];
    for k in 1..=n as usize {
        let mut acc: Option<Laurent> = None;
        for i in 1..=k {
            let t = Laurent::series(a[i].clone()).mul(&r[k - i])?;
            acc = Some(match acc {
                None => t,
                Some(x) => x.add(&t)?,
            });
        }
        r.push(acc.expect("k >= 1").mul(&neg_inv0)?);
    }
    // s = r^(n+1), truncated at z^(n+1)
    let mut s = r.clone();
    for _ in 0..n {
        let mut next = Vec::with_capacity(s.len());
        for k in 0..=n as usize {
            let mut acc: Option<Laurent> = None;
            for j in 0..=k {
                let t = s[j].mul(&r[k - j])?;
                acc = Some(match acc {
                    None => t,
                    Some(x) => x.add(&t)?,
                });
            }
            next.push(acc.expect("nonempty"));
        }
        s = next;
    }
    let mut total: Option<Laurent> = None;
    for k in 0..=n {
        let cp = cp_image_l(p, n - k);
        if cp.is_zero() {
            continue;
        }
        let t = s[k as usize].scale_poly(&cp)?;
        total = Some(match total {
            None => t,
            Some(x) => x.add(&t)?,
        });
    }
    let mut a0_pow = TruncatedSeries::one(p, Basis::L, EXACT);
    for _ in 0..(2 * n + 1) {
        a0_pow = a0_pow.checked_mul(&a[0])?;
    }
    let total = total.expect("k = n term has r_*[CP^0] = 1");
    Laurent::series(a0_pow).mul(&total)?.into_series()
}

/// [`mc_via_inverse_l`] in the `v`-basis.
pub fn mc_via_inverse(ctx: &FglContext, data: &PowerOpData, n: u32) -> Result<TruncatedSeries> {
    let s = ctx.series_to_v(&mc_via_inverse_l(data, n)?)?;
    require_integral(&s)?;
    Ok(s)
}

/// `(2p-1) a_0^(2p-4) (-v_1 a_0 a_(p-1) - a_0 a_(2p-2) + p a_(p-1)^2)`.
///
/// Equal to the raw `MC_(2(p-1))` at `p = 2`; at odd primes it omits
/// summands divisible by `[p]ξ`, so only the classes modulo `⟨p⟩ξ` agree.
pub fn mc_2p2_explicit(ctx: &FglContext, data: &PowerOpData) -> Result<TruncatedSeries> {
    let p = ctx.prime();
    let m = 2 * (p as usize - 1);
    need_a(data, m as u32)?;
    let a0 = &data.a[0];
    let ap = &data.a[p as usize - 1];
    let a2p = &data.a[m];
    let v1 = GradedPolynomial::generator(Basis::L, 1).scale_int(&BigInt::from(-(p as i64)));
    let t1 = a0.checked_mul(ap)?.scale_poly(&v1)?;
    let t2 = a0.checked_mul(a2p)?.neg();
    let t3 = ap.checked_mul(ap)?.scale(&Rational::from_integer(p.into()));
    let mut inner = t1.checked_add(&t2)?.checked_add(&t3)?;
    for _ in 0..(2 * p - 4) {
        inner = inner.checked_mul(a0)?;
    }
    let out_l = inner.scale(&Rational::from_integer((2 * p as i64 - 1).into()));
    let out = ctx.series_to_v(&out_l)?;
    require_integral(&out)?;
    Ok(out)
}
