//! The `bpmc` command line: compute series on demand and verify the shipped
//! golden tables.

pub mod golden;

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Mutex;

use bpmc::fgl::{is_prime, require_integral};
use bpmc::obstruction::{is_obstruction_index, mc_to_validity, McOptions, ObstructionResult};
use bpmc::powerop::PowerOpData;
use bpmc::reduction::Reducer;
use bpmc::ring::{Basis, GradedPolynomial, SeriesJson, TruncatedSeries};
use bpmc::FglContext;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Compute(#[from] bpmc::Error),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Compute(_) => 1,
            CliError::Mismatch(_) => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Log,
    Exp,
    Pseries,
    ReducedPseries,
    PowerOpCoeffs,
    Mc,
    Verify,
}

impl FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "log" => Command::Log,
            "exp" => Command::Exp,
            "pseries" => Command::Pseries,
            "reduced-pseries" => Command::ReducedPseries,
            "power-op-coeffs" => Command::PowerOpCoeffs,
            "mc" => Command::Mc,
            "verify" => Command::Verify,
            _ => return Err(CliError::Validation(format!("unknown command '{}'", s))),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Validation(format!("unknown format '{}'", s))),
        }
    }
}

/// Generators to kill: an explicit list, or every `v_m` from some index on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ideal {
    pub generators: Vec<usize>,
    pub from: Option<usize>,
}

impl Ideal {
    pub fn is_empty(&self) -> bool {
        self.generators.is_empty() && self.from.is_none()
    }

    pub fn kills(&self, m: usize) -> bool {
        self.generators.contains(&m) || self.from.is_some_and(|f| m >= f)
    }
}

impl FromStr for Ideal {
    type Err = CliError;
    /// `"v2,v3"`, `"2,3"` or `"v2+"` (all of `v_2, v_3, ...`).
    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut ideal = Ideal::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || CliError::Validation(format!("bad ideal generator '{}'", part));
            let body = part.strip_prefix('v').unwrap_or(part);
            let (digits, open) = match body.strip_suffix('+') {
                Some(d) => (d, true),
                None => (body, false),
            };
            let m: usize = digits.parse().map_err(|_| bad())?;
            if m == 0 {
                return Err(bad());
            }
            if open {
                ideal.from = Some(ideal.from.map_or(m, |f| f.min(m)));
            } else {
                ideal.generators.push(m);
            }
        }
        Ok(ideal)
    }
}

/// Removes every monomial involving a killed generator.
pub fn apply_ideal(series: &TruncatedSeries, ideal: &Ideal) -> TruncatedSeries {
    if ideal.is_empty() {
        return series.clone();
    }
    series.retain_monomials(|m| !m.involves_any(|g| ideal.kills(g)))
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub prime: u32,
    pub n: Option<u32>,
    pub truncation: Option<u32>,
    pub ideal: Ideal,
    pub format: Format,
    pub threads: Option<usize>,
    pub force_full: bool,
    pub reduce: bool,
    pub raw: bool,
    pub suite: Option<String>,
    pub progress: bool,
}

impl RunConfig {
    pub fn new(command: Command, prime: u32) -> Self {
        Self {
            command,
            prime,
            n: None,
            truncation: None,
            ideal: Ideal::default(),
            format: Format::Text,
            threads: None,
            force_full: false,
            reduce: false,
            raw: false,
            suite: None,
            progress: false,
        }
    }
}

/// Truncation reproducing the displayed range of the shipped tables.
pub fn default_truncation(p: u32) -> u32 {
    match p {
        2 => 13,
        3 => 25,
        5 => 99,
        7 => 221,
        11 => 549,
        13 => 767,
        _ => 4 * p,
    }
}

fn validate(cfg: &RunConfig) -> Result<u32, CliError> {
    if cfg.command != Command::Verify && !is_prime(cfg.prime as u64) {
        return Err(CliError::Validation(format!(
            "{} is not a prime",
            cfg.prime
        )));
    }
    let k = cfg
        .truncation
        .unwrap_or_else(|| default_truncation(cfg.prime));
    if k < 1 {
        return Err(CliError::Validation("truncation must be at least 1".into()));
    }
    if cfg.command == Command::Mc && cfg.n.is_none_or(|n| n < 1) {
        return Err(CliError::Validation("mc needs --n >= 1".into()));
    }
    if matches!(cfg.command, Command::Log | Command::Exp) && !cfg.ideal.is_empty() {
        return Err(CliError::Validation(
            "log and exp are printed in the l-basis; --ideal applies to v-basis output".into(),
        ));
    }
    if cfg.threads == Some(0) {
        return Err(CliError::Validation("--threads must be positive".into()));
    }
    Ok(k)
}

/// Runs one command, returning its rendered output.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    let k = validate(cfg)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {}", e)))?;
    pool.install(|| dispatch(cfg, k))
}

fn dispatch(cfg: &RunConfig, k: u32) -> Result<String, CliError> {
    let p = cfg.prime;
    match cfg.command {
        Command::Log => {
            let ctx = FglContext::new(p, k)?;
            Ok(render_series(
                cfg,
                "log",
                None,
                "log(ξ) =",
                ctx.log_series(),
                k,
            ))
        }
        Command::Exp => {
            let ctx = FglContext::new(p, k)?;
            Ok(render_series(
                cfg,
                "exp",
                None,
                "exp(ξ) =",
                ctx.exp_series(),
                k,
            ))
        }
        Command::Pseries => {
            let ctx = FglContext::new(p, k)?;
            let s = ctx.series_to_v(&ctx.p_series()?)?;
            require_integral(&s)?;
            let s = apply_ideal(&s.truncate(k + 1), &cfg.ideal);
            Ok(render_series(
                cfg,
                "pseries",
                None,
                &format!("[{}]ξ =", p),
                &s,
                k,
            ))
        }
        Command::ReducedPseries => {
            let s = reduced_pseries(p, k)?;
            let s = apply_ideal(&s, &cfg.ideal);
            Ok(render_series(
                cfg,
                "reduced-pseries",
                None,
                &format!("⟨{}⟩ξ =", p),
                &s,
                k,
            ))
        }
        Command::PowerOpCoeffs => power_op_coeffs(cfg, k),
        Command::Mc => mc_command(cfg, k),
        Command::Verify => verify(cfg),
    }
}

/// `⟨p⟩ξ` valid modulo exactly `ξ^(k+1)`.
pub fn reduced_pseries(p: u32, k: u32) -> Result<TruncatedSeries, CliError> {
    let ctx = FglContext::new(p, k + 1)?;
    Ok(ctx.reduced_p_series()?.truncate(k + 1))
}

fn render_series(
    cfg: &RunConfig,
    quantity: &str,
    n: Option<u32>,
    label: &str,
    s: &TruncatedSeries,
    k: u32,
) -> String {
    match cfg.format {
        Format::Text => format!("{} {}\n", label, s),
        Format::Json => {
            let mut j = SeriesJson::from_series(s, k);
            j.quantity = Some(quantity.to_string());
            j.n = n;
            j.to_json() + "\n"
        }
    }
}

fn power_op_coeffs(cfg: &RunConfig, k: u32) -> Result<String, CliError> {
    let p = cfg.prime;
    let max_index = cfg.n.unwrap_or(2 * (p - 1));
    let ctx = FglContext::new(p, k)?;
    let data = PowerOpData::compute(&ctx, max_index)?;
    let reducer = Reducer::from_context(&ctx)?;
    let mut text = String::new();
    let mut json = Vec::new();
    for i in 0..data.a.len() {
        let a = data.a_v(&ctx, i)?;
        let (s, label) = if cfg.reduce {
            (reducer.canonical_rep(&a)?.series, "≡")
        } else {
            (a, "=")
        };
        let s = apply_ideal(&s, &cfg.ideal);
        match cfg.format {
            Format::Text => {
                let suffix = if cfg.reduce {
                    format!(" mod ⟨{}⟩ξ", p)
                } else {
                    String::new()
                };
                let _ = writeln!(text, "a_{} {} {}{}", i, label, s, suffix);
            }
            Format::Json => {
                let mut j = SeriesJson::from_series(&s, k);
                j.quantity = Some(if cfg.reduce { "a-reduced" } else { "a" }.into());
                j.n = Some(i as u32);
                json.push(j);
            }
        }
    }
    Ok(match cfg.format {
        Format::Text => text,
        Format::Json => serde_json::to_string_pretty(&json).expect("serializable") + "\n",
    })
}

#[derive(Serialize)]
struct CertificateJson {
    xi: u32,
    poly: SeriesJson,
}

#[derive(Serialize)]
struct McJson {
    quantity: &'static str,
    n: u32,
    prime: u32,
    truncation: u32,
    internal_truncation: u32,
    obstruction_index: bool,
    by_sparseness: bool,
    certificate: Option<CertificateJson>,
    reduced: SeriesJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    raw: Option<SeriesJson>,
}

/// `MC_n` reported modulo `ξ^(k+1)`.
pub fn compute_mc(
    p: u32,
    n: u32,
    k: u32,
    force_full: bool,
    progress: bool,
) -> Result<(ObstructionResult, u32), CliError> {
    let reducer = Reducer::new(p);
    let last = Mutex::new(0usize);
    let report = |done: usize, total: usize| {
        let pct = done * 100 / total.max(1);
        let mut last = last.lock().expect("progress");
        if pct != *last || done == total {
            *last = pct;
            eprintln!("progress: {}/{} summands", done, total);
        }
    };
    let opts = McOptions {
        force_full,
        validity_cap: None,
        progress: if progress { Some(&report) } else { None },
    };
    let run = mc_to_validity(p, n, k + 1, &reducer, &opts)?;
    Ok((run.result, run.truncation))
}

fn mc_command(cfg: &RunConfig, k: u32) -> Result<String, CliError> {
    let p = cfg.prime;
    let n = cfg.n.expect("validated");
    let (r, internal) = compute_mc(p, n, k, cfg.force_full, cfg.progress)?;
    let reduced = apply_ideal(&r.reduced.series, &cfg.ideal);
    let certificate = r
        .certificate
        .as_ref()
        .map(|(j, c)| (*j, apply_ideal_poly(c, &cfg.ideal)))
        .filter(|(_, c)| !c.is_zero());
    let raw = r
        .raw
        .as_ref()
        .map(|s| apply_ideal(&s.truncate(k + 1), &cfg.ideal));
    let obstruction = is_obstruction_index(p, n);
    match cfg.format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "MC_{}(ξ) ≡ {} mod ⟨{}⟩ξ", n, reduced, p);
            if cfg.raw {
                match &raw {
                    Some(s) => {
                        let _ = writeln!(out, "MC_{}(ξ) = {}", n, s);
                    }
                    None => {
                        let _ = writeln!(out, "# raw series not computed");
                    }
                }
            }
            if obstruction {
                let _ = writeln!(out, "# n = {} is an obstruction index (n ≠ p^i - 1)", n);
            } else {
                let _ = writeln!(out, "# n = {} = p^i - 1 is not an obstruction index", n);
            }
            if r.by_sparseness() {
                let _ = writeln!(out, "# vanishes by sparseness (n ≢ 0 mod p - 1)");
            }
            match &certificate {
                Some((j, c)) => {
                    let _ = writeln!(out, "# nonvanishing certificate: ({}) ξ^{}", c, j);
                }
                None if !r.by_sparseness() => {
                    let _ = writeln!(out, "# no certificate: zero through O(ξ)^{}", k + 1);
                }
                None => {}
            }
            if !r.by_sparseness() {
                let _ = writeln!(out, "# internal truncation k = {}", internal);
            }
            Ok(out)
        }
        Format::Json => {
            let json = McJson {
                quantity: "mc",
                n,
                prime: p,
                truncation: k,
                internal_truncation: internal,
                obstruction_index: obstruction,
                by_sparseness: r.by_sparseness(),
                certificate: certificate.map(|(j, c)| CertificateJson {
                    xi: j,
                    poly: SeriesJson::from_series(
                        &TruncatedSeries::constant(p, c, bpmc::ring::EXACT),
                        k,
                    ),
                }),
                reduced: {
                    let mut j = SeriesJson::from_series(&reduced, k);
                    j.quantity = Some("mc".into());
                    j.n = Some(n);
                    j
                },
                raw: if cfg.raw {
                    raw.map(|s| SeriesJson::from_series(&s, k))
                } else {
                    None
                },
            };
            Ok(serde_json::to_string_pretty(&json).expect("serializable") + "\n")
        }
    }
}

fn apply_ideal_poly(c: &GradedPolynomial, ideal: &Ideal) -> GradedPolynomial {
    c.retain(|m| !m.involves_any(|g| ideal.kills(g)))
}

fn compute_golden(g: &golden::Golden) -> Result<TruncatedSeries, CliError> {
    let t = &g.table;
    let v = t
        .validity
        .ok_or_else(|| CliError::Validation(format!("{}: golden table has no validity", g.name)))?;
    let k = v - 1;
    match (t.quantity.as_deref(), t.n) {
        (Some("reduced-pseries"), _) => reduced_pseries(t.prime, k),
        (Some("mc"), Some(n)) => Ok(compute_mc(t.prime, n, k, false, false)?.0.reduced.series),
        (q, n) => Err(CliError::Validation(format!(
            "{}: unsupported golden quantity {:?} (n = {:?})",
            g.name, q, n
        ))),
    }
}

/// Compares a computed series with a golden table on every coefficient the
/// table determines.
pub fn compare(golden: &TruncatedSeries, got: &TruncatedSeries) -> Result<(), String> {
    if got.validity() < golden.validity() {
        return Err(format!(
            "computed series is valid only modulo ξ^{}, table needs ξ^{}",
            got.validity(),
            golden.validity()
        ));
    }
    let got = got.truncate(golden.validity());
    match golden.first_disagreement(&got) {
        None => Ok(()),
        Some(e) => {
            let zero = GradedPolynomial::zero(Basis::V);
            Err(format!(
                "first mismatch at ξ^{}: expected {}, got {}",
                e.0,
                golden.get(e).unwrap_or(&zero),
                got.get(e).unwrap_or(&zero)
            ))
        }
    }
}

fn verify(cfg: &RunConfig) -> Result<String, CliError> {
    let tables = golden::load()?;
    let suite = cfg.suite.as_deref().unwrap_or("all");
    let selected: Vec<_> = tables
        .iter()
        .filter(|g| suite == "all" || suite.split(',').any(|s| s.trim() == g.suite()))
        .collect();
    if selected.is_empty() {
        return Err(CliError::Validation(format!(
            "no golden tables in suite '{}'",
            suite
        )));
    }
    let mut out = String::new();
    let mut failures = Vec::new();
    for g in selected {
        let golden = g.table.to_series().map_err(CliError::Compute)?;
        let got = compute_golden(g)?;
        match compare(&golden, &got) {
            Ok(()) => {
                let _ = writeln!(
                    out,
                    "ok   {} ({} through O(ξ)^{})",
                    g.name,
                    g.describe(),
                    golden.validity()
                );
            }
            Err(msg) => {
                let _ = writeln!(out, "FAIL {} ({}): {}", g.name, g.describe(), msg);
                failures.push(format!("{}: {}", g.name, msg));
            }
        }
    }
    if failures.is_empty() {
        Ok(out)
    } else {
        Err(CliError::Mismatch(format!(
            "{}{}",
            out,
            failures.join("\n")
        )))
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
