//! Integer factorization on `u128`.
//!
//! Trial division by the primes below [`TRIAL_BOUND`] (exact divisibility
//! via precomputed 2-adic inverses), then Brent's variant of Pollard rho in
//! Montgomery form. Primality is Miller-Rabin with a deterministic base set
//! below 2^64 and Baillie-PSW above.

use std::sync::OnceLock;

use num_integer::Roots;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Primes below this bound are removed by trial division.
pub const TRIAL_BOUND: u64 = 1_000_000;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x2ad1_c5eed;

/// A prime with its exponent.
pub type Factor = (u128, u32);

struct TrialPrime {
    p: u64,
    inv: u128,
    limit: u128,
}

fn trial_table() -> &'static [TrialPrime] {
    static TABLE: OnceLock<Vec<TrialPrime>> = OnceLock::new();
    TABLE.get_or_init(|| {
        primes_up_to(TRIAL_BOUND)
            .into_iter()
            .filter(|&p| p > 2)
            .map(|p| {
                let p128 = p as u128;
                let mut inv = p128;
                for _ in 0..7 {
                    inv = inv.wrapping_mul(2u128.wrapping_sub(p128.wrapping_mul(inv)));
                }
                TrialPrime {
                    p,
                    inv,
                    limit: u128::MAX / p128,
                }
            })
            .collect()
    })
}

/// All primes `p <= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

pub fn is_square_u128(n: u128) -> bool {
    let r = n.sqrt();
    r * r == n
}

/// Montgomery arithmetic modulo an odd `n`, with `R = 2^128`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Montgomery {
    n: u128,
    neg_inv: u128,
    r2: u128,
    one: u128,
}

fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let lo = (p00 & MASK) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

impl Montgomery {
    pub(crate) fn new(n: u128) -> Self {
        debug_assert!(n & 1 == 1 && n > 1);
        let mut inv = n;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(n.wrapping_mul(inv)));
        }
        let one = (u128::MAX % n + 1) % n;
        let mut m = Montgomery {
            n,
            neg_inv: inv.wrapping_neg(),
            r2: 0,
            one,
        };
        let mut r2 = one;
        for _ in 0..128 {
            r2 = m.add(r2, r2);
        }
        m.r2 = r2;
        m
    }

    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let m = lo.wrapping_mul(self.neg_inv);
        let (mh, ml) = mul_wide(m, self.n);
        let (_, carry) = lo.overflowing_add(ml);
        let (t, o1) = hi.overflowing_add(mh);
        let (t, o2) = t.overflowing_add(carry as u128);
        if o1 || o2 || t >= self.n {
            t.wrapping_sub(self.n)
        } else {
            t
        }
    }

    pub(crate) fn mul(&self, a: u128, b: u128) -> u128 {
        let (hi, lo) = mul_wide(a, b);
        self.redc(hi, lo)
    }

    pub(crate) fn add(&self, a: u128, b: u128) -> u128 {
        let (s, o) = a.overflowing_add(b);
        if o || s >= self.n {
            s.wrapping_sub(self.n)
        } else {
            s
        }
    }

    pub(crate) fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a.wrapping_sub(b).wrapping_add(self.n)
        }
    }

    fn half(&self, a: u128) -> u128 {
        if a & 1 == 0 {
            a >> 1
        } else {
            (a >> 1) + (self.n >> 1) + 1
        }
    }

    pub(crate) fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.n, self.r2)
    }

    fn pow(&self, mut base: u128, mut exp: u128) -> u128 {
        let mut acc = self.one;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

fn strong_probable_prime(n: u128, m: &Montgomery, base: u128) -> bool {
    let n1 = n - 1;
    let s = n1.trailing_zeros();
    let d = n1 >> s;
    let minus_one = m.sub(0, m.one);
    let mut x = m.pow(m.to_mont(base), d);
    if x == m.one || x == minus_one {
        return true;
    }
    for _ in 1..s {
        x = m.mul(x, x);
        if x == minus_one {
            return true;
        }
    }
    false
}

fn jacobi(a: i64, n: u128) -> i32 {
    let mut a = if a >= 0 {
        (a as u128) % n
    } else {
        let r = ((-a) as u128) % n;
        if r == 0 {
            0
        } else {
            n - r
        }
    };
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a & 1 == 0 {
            a >>= 1;
            let r = n & 7;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a & 3 == 3 && n & 3 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

fn signed_residue(m: &Montgomery, x: i64) -> u128 {
    if x >= 0 {
        m.to_mont(x as u128)
    } else {
        m.sub(0, m.to_mont((-x) as u128))
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters (P = 1).
fn strong_lucas(n: u128, m: &Montgomery) -> bool {
    if is_square_u128(n) {
        return false;
    }
    let mut d: i64 = 5;
    loop {
        match jacobi(d, n) {
            -1 => break,
            0 if (d.unsigned_abs() as u128) != n => return false,
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let q = (1 - d) / 4;
    let dm = signed_residue(m, d);
    let qm = signed_residue(m, q);

    let np1 = n + 1;
    let s = np1.trailing_zeros();
    let k = np1 >> s;

    let mut u = m.one;
    let mut v = m.one;
    let mut qk = qm;
    let bits = 128 - k.leading_zeros();
    for i in (0..bits - 1).rev() {
        u = m.mul(u, v);
        v = m.sub(m.mul(v, v), m.add(qk, qk));
        qk = m.mul(qk, qk);
        if (k >> i) & 1 == 1 {
            let u2 = m.half(m.add(u, v));
            let v2 = m.half(m.add(m.mul(dm, u), v));
            u = u2;
            v = v2;
            qk = m.mul(qk, qm);
        }
    }
    if u == 0 || v == 0 {
        return true;
    }
    for _ in 1..s {
        v = m.sub(m.mul(v, v), m.add(qk, qk));
        qk = m.mul(qk, qk);
        if v == 0 {
            return true;
        }
    }
    false
}

pub fn is_prime(n: u128) -> bool {
    const SMALL: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in SMALL {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let m = Montgomery::new(n);
    if n <= u64::MAX as u128 {
        // The first twelve prime bases are deterministic below 3.18e23.
        SMALL.iter().all(|&b| strong_probable_prime(n, &m, b))
    } else {
        strong_probable_prime(n, &m, 2) && strong_lucas(n, &m)
    }
}

/// One Brent cycle search. Returns a nontrivial factor or `None` when the
/// cycle closed on `n` itself or the iteration budget ran out.
fn brent(n: u128, c: u128, x0: u128, budget: &mut u64) -> Option<u128> {
    const BATCH: u64 = 128;
    let m = Montgomery::new(n);
    let c = m.to_mont(c);
    let f = |y: u128| m.add(m.mul(y, y), c);
    let mut y = m.to_mont(x0);
    let mut r: u64 = 1;
    let mut q = m.one;
    let mut g = 1u128;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = m.mul(q, m.sub(x, y));
            }
            g = gcd_u128(q, n);
            k += steps;
            if *budget <= steps {
                *budget = 0;
                return None;
            }
            *budget -= steps;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u128(m.sub(x, ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn find_factor(n: u128, rng: &mut ChaCha8Rng, budget: &mut u64) -> Option<u128> {
    if n & 1 == 0 {
        return Some(2);
    }
    let r = n.sqrt();
    if r * r == n {
        return Some(r);
    }
    while *budget > 0 {
        let c = rng.random_range(1..n - 1);
        let x0 = rng.random_range(0..n);
        if let Some(g) = brent(n, c, x0, budget) {
            return Some(g);
        }
    }
    None
}

/// Result of a (possibly budgeted) factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    /// Proven-prime (BPSW above 2^64) factors with exponents, ascending.
    pub primes: Vec<Factor>,
    /// Composite parts that could not be split within the budget.
    pub unfactored: Vec<u128>,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_empty()
    }
}

fn push_factor(out: &mut Vec<Factor>, p: u128, e: u32) {
    if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
        entry.1 += e;
    } else {
        out.push((p, e));
    }
}

/// Removes all primes below [`TRIAL_BOUND`] from `n`. Returns the cofactor
/// and whether trial division already reached the cube root of it.
fn trial_divide(mut n: u128, out: &mut Vec<Factor>) -> (u128, bool) {
    let tz = n.trailing_zeros();
    if tz > 0 {
        push_factor(out, 2, tz);
        n >>= tz;
    }
    for tp in trial_table() {
        let p = tp.p as u128;
        if p * p * p > n {
            return (n, true);
        }
        if n.wrapping_mul(tp.inv) <= tp.limit {
            let mut e = 0;
            while n.wrapping_mul(tp.inv) <= tp.limit {
                n = n.wrapping_mul(tp.inv);
                e += 1;
            }
            push_factor(out, p, e);
        }
    }
    (n, false)
}

fn split_rest(n: u128, rng: &mut ChaCha8Rng, budget: &mut u64, out: &mut Factorization) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        push_factor(&mut out.primes, n, 1);
        return;
    }
    match find_factor(n, rng, budget) {
        Some(g) => {
            split_rest(g, rng, budget, out);
            split_rest(n / g, rng, budget, out);
        }
        None => out.unfactored.push(n),
    }
}

/// Factors `n` with at most `budget` rho iterations overall.
pub fn factor_with_budget(n: u128, seed: u64, budget: u64) -> Factorization {
    let mut out = Factorization {
        primes: Vec::new(),
        unfactored: Vec::new(),
    };
    if n <= 1 {
        return out;
    }
    let (rest, _) = trial_divide(n, &mut out.primes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut budget = budget;
    split_rest(rest, &mut rng, &mut budget, &mut out);
    out.primes.sort_unstable();
    out.unfactored.sort_unstable();
    out
}

/// Complete factorization of `n >= 1`, ascending primes with exponents.
pub fn factor(n: u128) -> Vec<Factor> {
    factor_seeded(n, DEFAULT_SEED)
}

pub fn factor_seeded(n: u128, seed: u64) -> Vec<Factor> {
    let f = factor_with_budget(n, seed, u64::MAX);
    debug_assert!(f.is_complete());
    f.primes
}

/// Splits `n = d * w^2` with `d` squarefree.
pub fn squarefree_part(n: u128) -> Result<(u128, u128)> {
    squarefree_part_seeded(n, DEFAULT_SEED)
}

pub fn squarefree_part_seeded(n: u128, seed: u64) -> Result<(u128, u128)> {
    if n == 0 {
        return Err(Error::InvalidInput("squarefree part of 0".into()));
    }
    Ok(squarefree_split(n, seed, None).expect("unbounded split always succeeds"))
}

/// Like [`squarefree_part`] but gives up with `None` as soon as the
/// squarefree part is certainly larger than `limit`.
pub fn squarefree_part_at_most(n: u128, limit: u128, seed: u64) -> Result<Option<(u128, u128)>> {
    if n == 0 {
        return Err(Error::InvalidInput("squarefree part of 0".into()));
    }
    Ok(squarefree_split(n, seed, Some(limit)))
}

fn squarefree_split(n: u128, seed: u64, limit: Option<u128>) -> Option<(u128, u128)> {
    let mut small = Vec::new();
    let (rest, covered_cube_root) = trial_divide(n, &mut small);
    let (mut d, mut w) = (1u128, 1u128);
    for (p, e) in small {
        if e % 2 == 1 {
            d *= p;
        }
        w *= p.pow(e / 2);
    }
    if let Some(limit) = limit {
        if d > limit {
            return None;
        }
    }
    if rest == 1 {
        return Some((d, w));
    }
    let r = rest.sqrt();
    if r * r == rest {
        return Some((d, w * r));
    }
    if covered_cube_root {
        // rest is a prime or a product of two distinct primes.
        let d = d * rest;
        return match limit {
            Some(limit) if d > limit => None,
            _ => Some((d, w)),
        };
    }
    // Every prime left in `rest` exceeds the trial bound, and at least one
    // of them occurs to an odd power.
    if let Some(limit) = limit {
        if d.saturating_mul(TRIAL_BOUND as u128) >= limit {
            return None;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut budget = u64::MAX;
    let mut big = Factorization {
        primes: Vec::new(),
        unfactored: Vec::new(),
    };
    split_rest(rest, &mut rng, &mut budget, &mut big);
    for (p, e) in big.primes {
        if e % 2 == 1 {
            d *= p;
        }
        w *= p.pow(e / 2);
    }
    match limit {
        Some(limit) if d > limit => None,
        _ => Some((d, w)),
    }
}

pub fn is_squarefree_u64(n: u64) -> bool {
    n >= 1 && factor(n as u128).iter().all(|&(_, e)| e == 1)
}

/// Renders a factorization as `2²·3`.
pub fn format_factorization(factors: &[Factor]) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    factors
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                p.to_string()
            } else {
                let exp: String = e
                    .to_string()
                    .chars()
                    .map(|c| SUP[c.to_digit(10).unwrap() as usize])
                    .collect();
                format!("{p}{exp}")
            }
        })
        .collect::<Vec<_>>()
        .join("·")
}

/// Euler's totient of `n >= 1`.
pub fn totient(n: u64) -> u64 {
    factor(n as u128)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p as u64 * (p as u64 - 1))
}

pub fn distinct_prime_count(n: u64) -> usize {
    if n <= 1 {
        0
    } else {
        factor(n as u128).len()
    }
}
