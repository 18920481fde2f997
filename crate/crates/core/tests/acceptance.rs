//! One pass/fail line per acceptance criterion. Exits nonzero on any failure.

use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadflt::criterion::{self, Outcome};
use quadflt::density;
use quadflt::frey::{self, FieldElement};
use quadflt::mersenne;
use quadflt::quadfield::{splitting_of_two, valuation_above_2, v2, QuadElement, SplittingKind, SquarefreeD};
use quadflt::sunit::{self, brute_force_sunit, s3_orbit, SUnitSolution, SearchBounds};

type Check = std::result::Result<(), String>;

fn sd(d: u64) -> SquarefreeD {
    SquarefreeD::new(d).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Check {
    ensure(elapsed <= limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

/// Naive squarefree test by trial division, independent of the library sieve.
fn squarefree_naive(n: u64) -> bool {
    let mut n = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

fn odd_prime_divisors(n: u64) -> Vec<u64> {
    let mut n = n;
    let mut out = vec![];
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out.retain(|&q| q % 2 == 1);
    out
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = vec![];
    let mut err = vec![];
    let mut argv = vec!["quadflt"];
    argv.extend_from_slice(args);
    let code = quadflt::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

/// Relevant orbit representatives, transcribed from the published table
/// (the second `d = 2` entry with `μ = −3 − 2√2`; `λ + μ = 1` forces it).
fn table_one(d: u64) -> Vec<(i64, i64, bool)> {
    match d {
        2 => vec![(0, 1, false), (-16, 12, false), (4, 2, false), (-2, 2, false)],
        3 => vec![(2, 1, false), (8, 4, false)],
        5 => vec![(1, 1, true), (-8, 4, false), (-1, 1, false)],
        6 => vec![(-4, 2, false)],
        _ => unreachable!(),
    }
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for d in [2u64, 3, 5, 6] {
        let (code, out) = run_cli(&["sunit", &d.to_string(), "--format", "json"]);
        ensure(code == 0, || format!("sunit {d} exited {code}"))?;
        let expected = std::fs::read_to_string(golden.join(format!("sunit_{d}.json"))).unwrap();
        ensure(out == expected, || format!("sunit {d} output differs from golden file"))?;

        let c = sunit::classify_relevant_solutions(sd(d), SearchBounds::default());
        let table = table_one(d);
        ensure(c.orbits.len() == table.len(), || {
            format!("d = {d}: {} orbits, expected {}", c.orbits.len(), table.len())
        })?;
        for (x, y, half) in table {
            let sol = SUnitSolution::new(QuadElement::new(x, y, sd(d), half).unwrap()).unwrap();
            let hits = c.orbits.iter().filter(|o| o.contains(&sol)).count();
            ensure(hits == 1, || format!("d = {d}: λ = {} lies in {hits} orbits", sol.lambda()))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(1))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let in_scope = |d: u64| {
        let r8 = d % 8;
        let r16 = d % 16;
        ((r8 == 3 || r8 == 5) && d != 3 && d != 5) || ((r16 == 6 || r16 == 10) && d != 6)
    };
    let ds: Vec<u64> = (2..=10_000).filter(|&d| squarefree_naive(d) && in_scope(d)).collect();
    for &d in &ds {
        let c = sunit::classify_relevant_solutions(sd(d), SearchBounds::default());
        ensure(c.orbits.is_empty(), || format!("d = {d}: {} relevant orbits", c.orbits.len()))?;
    }
    for &d in ds.iter().filter(|&&d| d <= 200) {
        let relevant = brute_force_sunit(sd(d), 100_000).into_iter().filter(|s| s.relevant()).count();
        ensure(relevant == 0, || format!("d = {d}: oracle found {relevant} relevant solutions"))?;
    }
    within(start.elapsed(), Duration::from_secs(120))
}

/// Congruence clauses, evaluated directly from `d`.
fn clause_applies(d: u64) -> bool {
    let qs = odd_prime_divisors(d);
    match (d % 8, d % 16) {
        (3, _) => true,
        (_, 6) | (_, 10) => true,
        (_, 2) => qs.iter().any(|q| q % 8 == 5 || q % 8 == 7),
        (_, 14) => qs.iter().any(|q| q % 8 == 3 || q % 8 == 5),
        _ => false,
    }
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let verdicts = criterion::verdicts_in_range(2, 10_000, SearchBounds::default());
    let mut n_clause = 0;
    let mut n_es = 0;
    for v in &verdicts {
        let d = v.d.get();
        if clause_applies(d) {
            n_clause += 1;
            ensure(v.outcome == Outcome::HoldsUnconditional, || format!("d = {d}: {}", v.outcome))?;
        }
        if d > 5 && d % 8 == 5 {
            n_es += 1;
            ensure(v.outcome == Outcome::HoldsUnderEs, || format!("d = {d}: {}", v.outcome))?;
        }
    }
    ensure(n_clause > 1000 && n_es > 500, || format!("only {n_clause} / {n_es} fields checked"))?;

    let v5 = criterion::verdict(sd(5), SearchBounds::default());
    ensure(v5.outcome == Outcome::CriterionFails, || format!("d = 5: {}", v5.outcome))?;
    let s5 = splitting_of_two(sd(5));
    let ords: Vec<i64> = table_one(5)
        .into_iter()
        .map(|(x, y, half)| {
            let sol = SUnitSolution::new(QuadElement::new(x, y, sd(5), half).unwrap()).unwrap();
            criterion::prime_valuations(&sol, &s5.s[0], &s5).ord_lambda_mu
        })
        .collect();
    ensure(ords == [0, 2, 1], || format!("d = 5: ord(λμ) = {ords:?}"))?;
    let mut from_verdict: Vec<i64> = v5.orbits.iter().map(|r| r.valuations[0].ord_lambda_mu).collect();
    from_verdict.sort();
    ensure(from_verdict == [0, 1, 2], || format!("d = 5 verdict orbits: {from_verdict:?}"))?;
    within(start.elapsed(), Duration::from_secs(120))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let x = 1_000_000u64;
    let (code, out) = run_cli(&["scan", "--max", &x.to_string(), "--r1-max", "40", "--format", "json"]);
    ensure(code == 0, || format!("scan exited {code}"))?;
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    let r = &json["result"];
    let dens_d = r["rel_density_D"]["decimal"].as_f64().unwrap();
    let dens_c = r["rel_density_C"]["decimal"].as_f64().unwrap();
    ensure((dens_d - 5.0 / 6.0).abs() <= 0.01, || format!("rel_density_D = {dens_d}"))?;
    ensure((dens_c - 1.0).abs() <= 0.01, || format!("rel_density_C = {dens_c}"))?;
    ensure(r["flags"].as_array().is_some_and(|f| !f.is_empty()), || "proxy semantics not flagged".into())?;

    let n_sf = r["n_sf"].as_u64().unwrap();
    let exact = (2..=x).filter(|&n| squarefree_naive(n)).count() as u64;
    ensure(n_sf.abs_diff(exact) <= 10, || format!("n_sf = {n_sf}, exact {exact}"))?;
    let main_term = 6.0 * x as f64 / std::f64::consts::PI.powi(2);
    ensure((n_sf as f64 - main_term).abs() <= 1e-3 * main_term, || format!("n_sf = {n_sf} vs {main_term}"))?;
    within(start.elapsed(), Duration::from_secs(60))
}

fn criterion_5() -> Check {
    let x = 1_000_000u64;
    let six_over_pi2 = 6.0 / std::f64::consts::PI.powi(2);
    // Odd squarefree integers have density 4/π², shared equally by the
    // four odd classes mod 8.
    for (r, n, share) in [(5u64, 8u64, 1.0 / 6.0), (1, 8, 1.0 / 6.0), (3, 8, 1.0 / 6.0), (0, 1, 1.0)] {
        let c = density::sf_count_in_ap(r, n, x).map_err(|e| e.to_string())?;
        let naive = (2..=x).filter(|&m| m % n == r % n && squarefree_naive(m)).count() as u64;
        ensure(c.count == naive, || format!("({r}, {n}): count {} vs {naive}", c.count))?;
        let main = share * six_over_pi2 * x as f64;
        ensure((c.predicted - main).abs() <= 1e-6 * main, || format!("({r}, {n}): predicted {}", c.predicted))?;
        ensure((c.count as f64 - main).abs() <= 0.01 * main, || format!("({r}, {n}): {} vs {main}", c.count))?;
    }
    Ok(())
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let checks = mersenne::primitive_divisor_check(2..=40).map_err(|e| e.to_string())?;
    let missing: Vec<u32> = checks.iter().filter(|(_, ok)| !ok).map(|(m, _)| *m).collect();
    ensure(missing == [6], || format!("no primitive divisor at {missing:?}"))?;

    let mut equal = vec![];
    for m in 1..=40u32 {
        let data = mersenne::mersenne_factor(m, false).map_err(|e| e.to_string())?;
        let product = data.prime_factors.iter().fold(BigInt::one(), |acc, &(p, e)| acc * BigInt::from(p).pow(e));
        ensure(data.complete && product == BigInt::from(mersenne::mersenne(m)), || format!("M_{m} misfactored"))?;
        let h = data.omega as u64;
        let bound = mersenne::corollary_lower_bound(m);
        ensure(h >= bound, || format!("m = {m}: h = {h} < {bound}"))?;
        if h == bound {
            equal.push(m);
        }
    }
    // Equality also occurs at m = 30, where 2^30 − 1 = 3²·7·11·31·151·331.
    ensure(equal == [1, 6, 30], || format!("equality at {equal:?}"))?;
    for m in [2u32, 3, 5, 6, 10] {
        ensure(mersenne::alpha_congruence_check(m, 1000, 0xa1fa + m as u64), || format!("congruence fails for m = {m}"))?;
    }
    within(start.elapsed(), Duration::from_secs(30))
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let n: i64 = rng.random_range(-10_000..=10_000);
    let d: i64 = rng.random_range(1..=1000);
    BigRational::new(n.into(), d.into())
}

fn random_quad(rng: &mut ChaCha8Rng, d: SquarefreeD) -> QuadElement {
    let x: i64 = rng.random_range(-1000..=1000);
    let y: i64 = rng.random_range(-1000..=1000);
    let den: i64 = rng.random_range(1..=64);
    QuadElement::from_parts(x.into(), y.into(), den.into(), d)
}

fn frey_identities<F: FieldElement>(u: &F, v: &F) -> Check {
    let w = u.constant(0).minus(u).minus(v);
    let Ok(f) = frey::frey_invariants(u, v, &w) else {
        return Ok(());
    };
    let [a, b, c] = frey::c4_expressions(u, v, &w);
    ensure(a == b && b == c, || format!("c4 expressions disagree at ({u}, {v}, {w})"))?;
    let lhs = f.c4.cube().minus(&f.c6.square());
    ensure(lhs == u.constant(1728).times(&f.disc), || format!("c4³ − c6² ≠ 1728Δ at ({u}, {v}, {w})"))
}

fn j_invariance<F: FieldElement>(lambda: &F) -> Check {
    let Ok(j) = frey::lambda_to_j(lambda) else {
        return Ok(());
    };
    let one = lambda.constant(1);
    let images = [
        one.minus(lambda),
        one.over(lambda),
        one.over(&one.minus(lambda)),
        lambda.over(&lambda.minus(&one)),
        lambda.minus(&one).over(lambda),
    ];
    for l in images {
        ensure(frey::lambda_to_j(&l).ok().as_ref() == Some(&j), || format!("j not S3-invariant at λ = {lambda}"))?;
    }
    ensure(frey::lambda_mu_to_j(lambda).ok().as_ref() == Some(&j), || format!("j formulas differ at λ = {lambda}"))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    const N: usize = 1000;
    for _ in 0..N {
        let eta1 = if rng.random_bool(0.5) { 1 } else { -1 };
        let eta2 = if rng.random_bool(0.5) { 1 } else { -1 };
        let r1 = rng.random_range(0..200);
        let r2 = rng.random_range(0..200);
        let lhs2 = sunit::paracond2_lhs(eta1, eta2, r1, r2);
        ensure(lhs2 == sunit::paracond3_lhs(eta1, eta2, r1, r2), || format!("paracond at {eta1} {eta2} {r1} {r2}"))?;
        let a = BigInt::from(eta1) << r1;
        let b = BigInt::from(eta2) << r2;
        let t = &a - &b + 1;
        ensure(lhs2 == &t * &t - (&a << 2), || format!("paracond2 formula at {eta1} {eta2} {r1} {r2}"))?;
    }
    for _ in 0..N {
        // Factoring the α_i stays cheap below 2^64.
        let t = rng.random_range(1..62u32);
        let s = rng.random_range(t + 1..=62u32);
        let q = mersenne::alpha_factors(s, t).map_err(|e| e.to_string())?;
        let (p, r) = (BigInt::one() << s, BigInt::one() << t);
        let product = (&p + &r + 1) * (&p + &r - 1) * (&p - &r + 1) * (&p - &r - 1);
        ensure(q.product == product, || format!("four-factor product at ({s}, {t})"))?;
        ensure(product == sunit::paracond2_lhs(1, 1, 2 * s, 2 * t), || format!("product ≠ paracond2 at ({s}, {t})"))?;
        for (&a, &(d, v)) in q.alpha.iter().zip(&q.decompositions) {
            ensure(a == d * v * v, || format!("α = {a} ≠ {d}·{v}²"))?;
        }
    }
    for i in 0..N {
        let (u, v) = (random_rational(&mut rng), random_rational(&mut rng));
        frey_identities(&u, &v)?;
        j_invariance(&u)?;
        let d = sd([2u64, 3, 5, 6, 7, 17, 21, 33][i % 8]);
        let (u, v) = (random_quad(&mut rng, d), random_quad(&mut rng, d));
        frey_identities(&u, &v)?;
        j_invariance(&u)?;
    }
    // j over every member of a few genuine S-unit orbits.
    for d in [2u64, 3, 5, 6, 7] {
        for o in sunit::classify_relevant_solutions(sd(d), SearchBounds::default()).orbits {
            let j = frey::lambda_to_j(o.representative.lambda()).unwrap();
            for m in s3_orbit(&o.representative) {
                ensure(frey::lambda_to_j(m.lambda()).unwrap() == j, || format!("orbit j differs at d = {d}"))?;
            }
        }
    }
    Ok(())
}

/// `ord_P1` from a 2-adic root of `d` known to `bits` bits.
fn split_valuation_at(e: &QuadElement, bits: u32) -> Option<i64> {
    let root = quadflt::quadfield::hensel_sqrt_2adic(e.d(), bits).unwrap();
    let modulus = BigInt::one() << (bits - 1);
    let image = (e.x() + e.y() * BigInt::from(root)) % &modulus;
    if image.is_zero() {
        return None;
    }
    Some(v2(&image.abs()) as i64 - v2(e.den()) as i64)
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pools: [(SplittingKind, &[u64]); 3] = [
        (SplittingKind::Split, &[17, 33, 41, 57, 65, 73, 89, 97, 105, 113]),
        (SplittingKind::Inert, &[5, 13, 21, 29, 37, 53, 61, 69, 77, 85]),
        (SplittingKind::Ramified, &[2, 3, 6, 7, 10, 11, 14, 15, 19, 22]),
    ];
    for (kind, ds) in pools {
        for i in 0..1000 {
            let d = sd(ds[i % ds.len()]);
            let s = splitting_of_two(d);
            ensure(s.kind == kind, || format!("d = {d} has kind {:?}", s.kind))?;
            let e = random_quad(&mut rng, d);
            if e.is_zero() {
                continue;
            }
            let norm = e.norm();
            let v2_norm = v2(norm.numer()) as i64 - v2(norm.denom()) as i64;
            let mut sum = 0;
            for p in &s.s {
                let ord = valuation_above_2(&e, p, &s).map_err(|err| err.to_string())?;
                sum += p.f as i64 * ord;
                if kind == SplittingKind::Split && p.label.to_string() == "P1" {
                    // Enough bits to see the valuation, then twice that.
                    let nn = e.x() * e.x() - d.to_bigint() * e.y() * e.y();
                    let bits = (v2(&nn) as u32 + 8).max(16);
                    let lo = split_valuation_at(&e, bits);
                    let hi = split_valuation_at(&e, 2 * bits);
                    ensure(lo == Some(ord) && hi == Some(ord), || format!("{e}: {ord} vs {lo:?} / {hi:?}"))?;
                }
            }
            ensure(sum == v2_norm, || format!("{e} in Q(√{d}): Σ f·ord = {sum}, v2(N) = {v2_norm}"))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("table of relevant S-unit orbits for d = 2, 3, 5, 6", criterion_1),
        ("residue classes with no relevant orbits", criterion_2),
        ("verdict suite up to 10^4", criterion_3),
        ("density scan at 10^6", criterion_4),
        ("squarefree counts in progressions", criterion_5),
        ("Mersenne suite", criterion_6),
        ("algebraic identities", criterion_7),
        ("valuation oracle", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("criterion {}: PASS ({name}, {secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL ({name}, {secs:.2}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
