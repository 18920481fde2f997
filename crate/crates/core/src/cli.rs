//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven from tests.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::criterion::{verdict, ConditionReport, Verdict};
use crate::density::{scan_seeded, sf_count_in_ap};
use crate::error::Error;
use crate::factor::DEFAULT_SEED;
use crate::frey::{frey_invariants, FreyInvariants};
use crate::mersenne::{
    alpha_congruence_check, density_bound_partial, mersenne_factor,
    DensityBound, MersenneData, FACTOR_CAP,
};
use crate::quadfield::{splitting_of_two, SquarefreeD};
use crate::sunit::{brute_force_sunit, classify_relevant_solutions, orbit_params, Classification, SearchBounds};
use crate::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "quadflt", version, about = "Fermat criteria and S-unit solutions for real quadratic fields")]
pub struct Cli {
    /// Seed for randomized factorization and sampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct BoundArgs {
    /// Largest r1 searched when 2 splits.
    #[arg(long, default_value_t = 40)]
    pub r1_max: u32,
    /// Largest s tried in the exponential families.
    #[arg(long, default_value_t = 64)]
    pub s_max: u32,
}

impl BoundArgs {
    fn bounds(&self) -> SearchBounds {
        SearchBounds {
            r1_max: self.r1_max,
            s_max: self.s_max,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide the valuation criterion for Q(√d).
    Check {
        d: u64,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the relevant S-unit solutions of Q(√d), one per orbit.
    Sunit {
        d: u64,
        #[command(flatten)]
        bounds: BoundArgs,
        /// Cross-check against an exhaustive search at --height.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 100_000)]
        height: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Density of the fields covered by the criterion up to --max.
    Scan {
        #[arg(long, default_value_t = 1_000_000)]
        max: u64,
        #[arg(long, default_value_t = 40)]
        r1_max: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Factor Mersenne numbers and report the density bounds built on them.
    Mersenne {
        #[arg(long, conflicts_with = "range", required_unless_present = "range")]
        m: Option<u32>,
        /// Inclusive range such as 2..40.
        #[arg(long)]
        range: Option<String>,
        /// Factor beyond the cap, accepting partial results.
        #[arg(long)]
        allow_override: bool,
        /// Randomized congruence trials per m.
        #[arg(long, default_value_t = 1000)]
        trials: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Frey curve invariants for u + v + w = 0.
    #[command(allow_negative_numbers = true)]
    Frey {
        u: String,
        v: String,
        w: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Squarefree counts in the progression r mod n up to x.
    DensityAp {
        r: u64,
        n: u64,
        x: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Parses `argv` (including the program name), runs the command and writes
/// the report to `out`. Returns the process exit code: 0 on success, 2 on
/// invalid input, 1 on internal errors.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            if out.write_all(report.as_bytes()).is_err() {
                return 1;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::OutOfRange(_)
        | Error::NotSquarefree { .. }
        | Error::InvalidInput(_)
        | Error::Degenerate(_)
        | Error::CapExceeded { .. }
        | Error::ParamViolation(_)
        | Error::Irrelevant => 2,
        Error::ZeroValuation => 1,
    }
}

fn envelope(command: &str, bounds: Value, result: Value) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "bounds": bounds,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn bounds_value(b: SearchBounds) -> Value {
    to_value(&b)
}

fn execute(cli: &Cli) -> crate::Result<String> {
    let format = match &cli.command {
        Command::Check { format, .. }
        | Command::Sunit { format, .. }
        | Command::Mersenne { format, .. }
        | Command::Frey { format, .. }
        | Command::DensityAp { format, .. } => Some(*format),
        Command::Scan { .. } => None,
    };
    if format == Some(Format::Csv) {
        return Err(Error::InvalidInput("csv output is only available for scan".into()));
    }
    match &cli.command {
        Command::Check { d, bounds, format } => {
            let d = SquarefreeD::new(*d)?;
            let v = verdict(d, bounds.bounds());
            Ok(match format {
                Format::Json => envelope("check", bounds_value(v.bounds), to_value(&v)),
                _ => check_text(&v),
            })
        }
        Command::Sunit {
            d,
            bounds,
            oracle,
            height,
            format,
        } => {
            let d = SquarefreeD::new(*d)?;
            let c = classify_relevant_solutions(d, bounds.bounds());
            let oracle = oracle.then(|| oracle_report(&c, *height));
            Ok(match format {
                Format::Json => {
                    let mut b = bounds_value(c.bounds);
                    if oracle.is_some() {
                        b["height"] = json!(height);
                    }
                    envelope("sunit", b, sunit_json(&c, oracle.as_ref()))
                }
                _ => sunit_text(&c, oracle.as_ref()),
            })
        }
        Command::Scan { max, r1_max, format } => {
            let r = scan_seeded(*max, *r1_max, cli.seed)?;
            let b = json!({ "max": max, "r1_max": r1_max });
            match format {
                Format::Json => Ok(envelope("scan", b, to_value(&r))),
                Format::Csv => scan_csv(&r),
                Format::Text => Ok(scan_text(&r)),
            }
        }
        Command::Mersenne {
            m,
            range,
            allow_override,
            trials,
            format,
        } => {
            let ms = match (m, range) {
                (Some(m), _) => vec![*m],
                (None, Some(r)) => parse_range(r)?,
                (None, None) => unreachable!("clap requires one of --m and --range"),
            };
            let reports = ms
                .iter()
                .map(|&m| mersenne_report(m, *allow_override, *trials, cli.seed))
                .collect::<crate::Result<Vec<_>>>()?;
            let b = json!({ "cap": FACTOR_CAP, "allow_override": allow_override, "trials": trials, "seed": cli.seed });
            Ok(match format {
                Format::Json => envelope("mersenne", b, to_value(&reports)),
                _ => reports.iter().map(mersenne_text).collect(),
            })
        }
        Command::Frey { u, v, w, format } => {
            let (u, v, w) = (parse_rational(u)?, parse_rational(v)?, parse_rational(w)?);
            let f = frey_invariants(&u, &v, &w)?;
            Ok(match format {
                Format::Json => envelope("frey", json!({}), to_value(&f)),
                _ => frey_text(&f),
            })
        }
        Command::DensityAp { r, n, x, format } => {
            let c = sf_count_in_ap(*r, *n, *x)?;
            Ok(match format {
                Format::Json => envelope("density-ap", json!({ "x": x }), to_value(&c)),
                _ => format!(
                    "squarefree 2 <= d <= {} with d ≡ {} (mod {}): {}\npredicted {:.1} (coefficient {}), relative error {:.5}\n",
                    c.x, c.r, c.n, c.count, c.predicted, c.coefficient, c.relative_error
                ),
            })
        }
    }
}

fn parse_range(r: &str) -> crate::Result<Vec<u32>> {
    let bad = || Error::InvalidInput(format!("range {r:?} is not of the form a..b"));
    let (a, b) = r.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn parse_rational(s: &str) -> crate::Result<BigRational> {
    let bad = || Error::InvalidInput(format!("{s:?} is not an integer or fraction"));
    let int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| bad());
    match s.split_once('/') {
        Some((n, d)) => {
            let d = int(d)?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(int(n)?, d))
        }
        None => Ok(BigRational::from_integer(int(s)?)),
    }
}

fn check_text(v: &Verdict) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "d = {}: {}", v.d, v.outcome);
    let _ = writeln!(s, "provenance: {}", v.provenance.clauses.join("; "));
    if v.provenance.es_dependent {
        let _ = writeln!(s, "T is empty: relies on the Eichler–Shimura conjecture");
    }
    let _ = writeln!(s, "2 is {:?} in Q(√{})", v.splitting.kind, v.d);
    let _ = writeln!(s, "classification row: {}", v.row.describe());
    if !v.complete {
        let _ = writeln!(s, "search incomplete: r1 <= {}", v.bounds.r1_max);
    }
    let _ = writeln!(s, "irrelevant orbit: {}", report_line(&v.irrelevant));
    for r in &v.orbits {
        let _ = writeln!(s, "orbit: {}", report_line(r));
    }
    s
}

fn report_line(r: &ConditionReport) -> String {
    let vals: Vec<String> = r
        .valuations
        .iter()
        .map(|p| {
            format!(
                "{}: ord λ = {}, ord μ = {}, ord λμ = {}, ord 2 = {}",
                p.prime, p.ord_lambda, p.ord_mu, p.ord_lambda_mu, p.ord_2
            )
        })
        .collect();
    let flag = |holds: bool| if holds { "yes" } else { "no" };
    format!(
        "({}, {}) (A) {} (B) {} [{}]",
        r.solution.lambda(),
        r.solution.mu(),
        flag(r.cond_a.holds),
        flag(r.cond_b.holds),
        vals.join("; ")
    )
}

#[derive(serde::Serialize)]
struct OracleReport {
    height: u64,
    solutions: usize,
    orbits: usize,
    /// Every orbit found by the exhaustive search is classified, and every
    /// classified orbit whose representative fits in the box is found.
    agrees: bool,
}

fn oracle_report(c: &Classification, height: u64) -> OracleReport {
    let sols = brute_force_sunit(c.d, height);
    let found = orbit_params(&sols);
    let h = BigInt::from(height);
    let covered = c.orbits.iter().all(|o| {
        let fits = o.param.trace().magnitude() <= h.magnitude() && o.param.v.magnitude() <= h.magnitude();
        !fits || found.contains(&o.param)
    });
    let classified = found.iter().all(|p| c.orbits.iter().any(|o| &o.param == p));
    OracleReport {
        height,
        solutions: sols.len(),
        orbits: found.len(),
        agrees: covered && classified,
    }
}

fn sunit_json(c: &Classification, oracle: Option<&OracleReport>) -> Value {
    let splitting = splitting_of_two(c.d);
    let orbits: Vec<Value> = c
        .orbits
        .iter()
        .map(|o| {
            let r = ConditionReport::for_orbit(o, &splitting);
            json!({
                "lambda": o.representative.lambda().to_string(),
                "mu": o.representative.mu().to_string(),
                "param": o.param,
                "members": o.members.iter().map(|m| m.lambda().to_string()).collect::<Vec<_>>(),
                "valuations": r.valuations,
            })
        })
        .collect();
    json!({
        "d": c.d,
        "row": c.row,
        "row_text": c.row.describe(),
        "complete": c.complete,
        "orbit_count": c.orbits.len(),
        "orbits": orbits,
        "oracle": oracle.map(to_value),
    })
}

fn sunit_text(c: &Classification, oracle: Option<&OracleReport>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "d = {}: {} relevant orbit(s){}", c.d, c.orbits.len(), if c.complete { "" } else { " found (search incomplete)" });
    let _ = writeln!(s, "classification row: {}", c.row.describe());
    for o in &c.orbits {
        let p = &o.param;
        let _ = writeln!(
            s,
            "({}, {})  η1 = {}, η2 = {}, r1 = {}, r2 = {}, v = {}",
            o.representative.lambda(),
            o.representative.mu(),
            p.eta1,
            p.eta2,
            p.r1,
            p.r2,
            p.v
        );
    }
    if let Some(o) = oracle {
        let _ = writeln!(
            s,
            "oracle at height {}: {} solutions, {} relevant orbits, agreement {}",
            o.height,
            o.solutions,
            o.orbits,
            o.agrees
        );
    }
    s
}

fn scan_text(r: &crate::density::DensityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "squarefree 2 <= d <= {}: {} (Möbius sum {}, 6X/π² = {:.1})", r.x, r.n_sf, r.n_sf_mobius, r.sf_main_term);
    let _ = writeln!(s, "with a relevant solution (r1 <= {}): {}", r.r1_max, r.n_c_prime_found);
    let _ = writeln!(s, "relative density of C: {}", r.rel_density_c);
    let _ = writeln!(s, "relative density of D: {} (limit 5/6)", r.rel_density_d);
    for f in &r.flags {
        let _ = writeln!(s, "note: {f}");
    }
    s
}

fn scan_csv(r: &crate::density::DensityReport) -> crate::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
    w.write_record(["d", "squarefree", "class_mod_16", "in_C_prime", "witness"])
        .map_err(internal)?;
    for d in 2..=r.x {
        let witness = r.witnesses.get(&d);
        let witness_text = witness
            .map(|p| format!("{} {} {} {} {}", p.eta1, p.eta2, p.r1, p.r2, p.v))
            .unwrap_or_default();
        w.write_record([
            d.to_string(),
            r.sieve[d as usize].to_string(),
            (d % 16).to_string(),
            witness.is_some().to_string(),
            witness_text,
        ])
        .map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(serde::Serialize)]
struct MersenneReport {
    data: MersenneData,
    /// From the factorization; absent when it is partial.
    density_bound: Option<DensityBound>,
    /// From `h >= 2^ω(m) − 2` alone.
    corollary_bound: DensityBound,
    corollary_holds: bool,
    alpha_congruence: bool,
}

fn mersenne_report(m: u32, allow_override: bool, trials: u32, seed: u64) -> crate::Result<MersenneReport> {
    let data = mersenne_factor(m, allow_override)?;
    let density_bound = data.complete.then(|| DensityBound::from_h(m, data.omega as u64));
    let corollary_bound = density_bound_partial(m)?;
    Ok(MersenneReport {
        corollary_holds: data.omega as u64 >= corollary_bound.h,
        alpha_congruence: alpha_congruence_check(m, trials, seed),
        density_bound,
        corollary_bound,
        data,
    })
}

fn mersenne_text(r: &MersenneReport) -> String {
    let d = &r.data;
    let primitive: Vec<String> = d.primitive_divisors.iter().map(u128::to_string).collect();
    let bound_line = |b: &DensityBound| {
        format!("{} ≈ {:.4}{}", b.exact, b.decimal, if b.vacuous { " (vacuous)" } else { "" })
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "M_{} = {} = {}{}",
        d.m,
        d.value,
        d.factorization,
        if d.complete { "" } else { " · (unfactored)" }
    );
    let _ = writeln!(
        s,
        "  h = {}{}, 2^ω(m) − 2 = {}, primitive: {}",
        d.omega,
        if d.complete { "" } else { " (lower bound)" },
        r.corollary_bound.h,
        if primitive.is_empty() { "none".to_string() } else { primitive.join(", ") }
    );
    if let Some(b) = &r.density_bound {
        let _ = writeln!(s, "  density bound {}", bound_line(b));
    }
    let _ = writeln!(s, "  bound from 2^ω(m) − 2 alone {}", bound_line(&r.corollary_bound));
    let _ = writeln!(s, "  α congruence: {}", if r.alpha_congruence { "ok" } else { "FAILED" });
    if !d.unfactored.is_empty() {
        let _ = writeln!(s, "  unfactored: {}", d.unfactored.join(", "));
    }
    s
}

fn frey_text(f: &FreyInvariants<BigRational>) -> String {
    format!("c4 = {}\nc6 = {}\nΔ = {}\nj = {}\n", f.c4, f.c6, f.disc, f.j)
}
