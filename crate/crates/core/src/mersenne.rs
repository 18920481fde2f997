//! Mersenne numbers `M_m = 2^m − 1`: factorizations, primitive divisors,
//! the four factors `2^s ± 2^t ± 1`, and the density bounds built on them.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::factor::{distinct_prime_count, factor, factor_with_budget, format_factorization, squarefree_part, Factor};
use crate::sunit::paracond2_lhs;

/// Largest `m` factored without an explicit override.
pub const FACTOR_CAP: u32 = 64;

/// Rho iterations allowed per cyclotomic piece in override mode.
const OVERRIDE_BUDGET: u64 = 1 << 22;

pub fn mersenne(m: u32) -> BigUint {
    (BigUint::one() << m) - 1u32
}

fn serialize_factors<S: Serializer>(factors: &[Factor], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(factors.len()))?;
    for (p, e) in factors {
        seq.serialize_element(&(p.to_string(), e))?;
    }
    seq.end()
}

fn serialize_u128s<S: Serializer>(v: &[u128], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|p| p.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MersenneData {
    pub m: u32,
    #[serde(serialize_with = "crate::serde_display")]
    pub value: BigUint,
    /// Primes with multiplicity, ascending.
    #[serde(serialize_with = "serialize_factors")]
    pub prime_factors: Vec<Factor>,
    pub factorization: String,
    /// Composite cofactors left unsplit (override mode only).
    pub unfactored: Vec<String>,
    /// `h_m`, the number of distinct primes found. A lower bound when
    /// `complete` is false.
    pub omega: usize,
    #[serde(serialize_with = "serialize_u128s")]
    pub primitive_divisors: Vec<u128>,
    pub complete: bool,
}

/// `Φ_n(2) = ∏_{k | n} (2^k − 1)^{μ(n/k)}`.
pub fn cyclotomic_at_two(n: u32) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for k in (1..=n).filter(|k| n % k == 0) {
        match mobius(n / k) {
            1 => num *= mersenne(k),
            -1 => den *= mersenne(k),
            _ => {}
        }
    }
    num / den
}

fn mobius(n: u32) -> i32 {
    let f = factor(n as u128);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Divides out every prime of `M_{m/q}` for each prime `q | m`; what is
/// left is the product of the primes first appearing at `m`.
pub fn primitive_part(m: u32) -> BigUint {
    let mut part = mersenne(m);
    for (q, _) in factor(m as u128) {
        let earlier = mersenne(m / q as u32);
        loop {
            let g = part.gcd(&earlier);
            if g.is_one() {
                break;
            }
            part /= g;
        }
    }
    part
}

fn merge(out: &mut Vec<Factor>, p: u128, e: u32) {
    match out.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += e,
        None => out.push((p, e)),
    }
}

/// Factors `M_m` through its cyclotomic pieces. Above [`FACTOR_CAP`] this
/// needs `allow_override` and may return a partial result.
pub fn mersenne_factor(m: u32, allow_override: bool) -> Result<MersenneData> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    if m > FACTOR_CAP && !allow_override {
        return Err(Error::CapExceeded { m, cap: FACTOR_CAP });
    }
    let mut primes: Vec<Factor> = Vec::new();
    let mut unfactored: Vec<String> = Vec::new();
    for n in (1..=m).filter(|n| m % n == 0) {
        let piece = cyclotomic_at_two(n);
        match piece.to_u128() {
            Some(v) => {
                let budget = if m > FACTOR_CAP { OVERRIDE_BUDGET } else { u64::MAX };
                let f = factor_with_budget(v, crate::factor::DEFAULT_SEED, budget);
                for (p, e) in f.primes {
                    merge(&mut primes, p, e);
                }
                unfactored.extend(f.unfactored.iter().map(u128::to_string));
            }
            None => unfactored.push(piece.to_string()),
        }
    }
    primes.sort_unstable();

    let primitive = primitive_part(m);
    let primitive_divisors: Vec<u128> = primes
        .iter()
        .map(|&(p, _)| p)
        .filter(|&p| (&primitive % BigUint::from(p)).is_zero())
        .collect();

    let value = mersenne(m);
    let complete = unfactored.is_empty();
    if complete {
        let product = primes
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e));
        debug_assert_eq!(product, value);
    }
    Ok(MersenneData {
        m,
        factorization: if m == 1 { "1".into() } else { format_factorization(&primes) },
        omega: primes.len(),
        value,
        prime_factors: primes,
        unfactored,
        primitive_divisors,
        complete,
    })
}

/// `(m, M_m has a primitive divisor)` for each `m` in the range.
pub fn primitive_divisor_check(range: std::ops::RangeInclusive<u32>) -> Result<Vec<(u32, bool)>> {
    range
        .map(|m| mersenne_factor(m, false).map(|d| (m, !d.primitive_divisors.is_empty())))
        .collect()
}

/// The lower bound `2^ω(m) − 2` on `h_m`.
pub fn corollary_lower_bound(m: u32) -> u64 {
    (1u64 << distinct_prime_count(m as u64)).saturating_sub(2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HSource {
    Factorization,
    Corollary,
}

/// `m²·2^(−h/2)`, the upper bound on the density of the sieved set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityBound {
    pub m: u32,
    pub h: u64,
    pub h_source: HSource,
    pub corollary_lower_bound: u64,
    /// `m²·2^(−h/2)` as text; exact for either parity of `h`.
    pub exact: String,
    /// The same value as a reduced fraction when `h` is even.
    pub rational: Option<String>,
    pub decimal: f64,
    /// True when the bound is at least 1 and so says nothing.
    pub vacuous: bool,
}

impl DensityBound {
    /// The bound for a known `h = h_m`.
    pub fn from_h(m: u32, h: u64) -> Self {
        Self::new(m, h, HSource::Factorization)
    }

    fn new(m: u32, h: u64, h_source: HSource) -> Self {
        let m2 = (m as u128).pow(2);
        let rational = (h % 2 == 0).then(|| {
            let den = BigUint::one() << (h / 2);
            let g = BigUint::from(m2).gcd(&den);
            let (n, d) = (BigUint::from(m2) / &g, den / &g);
            if d.is_one() {
                n.to_string()
            } else {
                format!("{n}/{d}")
            }
        });
        // m²/2^(h/2) >= 1  ⟺  m⁴ >= 2^h
        let vacuous = BigUint::from(m2).pow(2) >= BigUint::one() << h;
        DensityBound {
            m,
            h,
            h_source,
            corollary_lower_bound: corollary_lower_bound(m),
            exact: format!("{m2}·2^(-{h}/2)"),
            rational,
            decimal: m2 as f64 * 2f64.powf(-(h as f64) / 2.0),
            vacuous,
        }
    }
}

/// The bound with `h = h_m` from a full factorization of `M_m`.
pub fn density_bound(m: u32) -> Result<DensityBound> {
    let data = mersenne_factor(m, false)?;
    Ok(DensityBound::new(m, data.omega as u64, HSource::Factorization))
}

/// The bound with `h = 2^ω(m) − 2`, which needs no factorization.
pub fn density_bound_partial(m: u32) -> Result<DensityBound> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    Ok(DensityBound::new(m, corollary_lower_bound(m), HSource::Corollary))
}

/// `α_1..α_4 = 2^s + 2^t + 1, 2^s + 2^t − 1, 2^s − 2^t + 1, 2^s − 2^t − 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaQuadruple {
    pub s: u32,
    pub t: u32,
    #[serde(serialize_with = "serialize_u128s")]
    pub alpha: Vec<u128>,
    /// `(d_i, v_i)` with `α_i = d_i·v_i²` and `d_i` squarefree.
    #[serde(serialize_with = "serialize_pairs")]
    pub decompositions: Vec<(u128, u128)>,
    #[serde(serialize_with = "crate::serde_bigint")]
    pub product: BigInt,
}

fn serialize_pairs<S: Serializer>(v: &[(u128, u128)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(a, b)| (a.to_string(), b.to_string())))
}

fn alpha_values(s: u32, t: u32) -> [u128; 4] {
    let (a, b) = (1u128 << s, 1u128 << t);
    [a + b + 1, a + b - 1, a - b + 1, a - b - 1]
}

pub fn alpha_factors(s: u32, t: u32) -> Result<AlphaQuadruple> {
    if t == 0 || s <= t {
        return Err(Error::InvalidInput(format!("need s > t > 0, got s = {s}, t = {t}")));
    }
    if s > 125 {
        return Err(Error::InvalidInput(format!("s = {s} too large")));
    }
    let alpha = alpha_values(s, t);
    let product = alpha.iter().fold(BigInt::one(), |acc, &a| acc * BigInt::from(a));
    assert_eq!(product, paracond2_lhs(1, 1, 2 * s, 2 * t), "four-factor product");
    let decompositions = alpha
        .iter()
        .map(|&a| squarefree_part(a).expect("α > 0"))
        .collect();
    Ok(AlphaQuadruple {
        s,
        t,
        alpha: alpha.to_vec(),
        decompositions,
        product,
    })
}

/// Draws random `(s1, t1)` and shifts each coordinate by a multiple of `m`;
/// all four `α_i` must agree modulo `M_m`.
pub fn alpha_congruence_check(m: u32, trials: u32, seed: u64) -> bool {
    if m == 0 {
        return false;
    }
    let modulus = BigInt::from(mersenne(m));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha_mod = |s: u32, t: u32| -> Vec<BigInt> {
        let (a, b) = (BigInt::one() << s, BigInt::one() << t);
        [&a + &b + 1, &a + &b - 1, &a - &b + 1, &a - &b - 1]
            .into_iter()
            .map(|x: BigInt| x.mod_floor(&modulus))
            .collect()
    };
    (0..trials).all(|_| {
        let t1 = rng.random_range(1..=40u32);
        let s1 = rng.random_range(t1 + 1..=60);
        let (a, b) = (rng.random_range(0..=4u32), rng.random_range(0..=4u32));
        let (s2, t2) = (s1 + a * m, t1 + b * m);
        alpha_mod(s1, t1) == alpha_mod(s2, t2)
    })
}

/// `(s, d, w)` with `(2^(s−1) − 1)(2^(s−1) + 1) = d·w²` for `2 <= s <= s_max`.
pub fn class_m_witnesses(s_max: u32) -> Result<Vec<(u32, u128, u128)>> {
    if s_max > 128 {
        return Err(Error::InvalidInput(format!("s_max = {s_max} exceeds 128")));
    }
    Ok((2..=s_max)
        .map(|s| {
            let half = 1u128 << (s - 1);
            // The two factors are odd and differ by 2, hence coprime.
            let (d1, w1) = squarefree_part(half - 1).expect("positive");
            let (d2, w2) = squarefree_part(half + 1).expect("positive");
            (s, d1 * d2, w1 * w2)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_mersenne_numbers() {
        let m6 = mersenne_factor(6, false).unwrap();
        assert_eq!(m6.prime_factors, vec![(3, 2), (7, 1)]);
        assert_eq!(m6.omega, 2);
        assert!(m6.primitive_divisors.is_empty());
        assert_eq!(m6.factorization, "3²·7");

        let m11 = mersenne_factor(11, false).unwrap();
        assert_eq!(m11.prime_factors, vec![(23, 1), (89, 1)]);
        assert_eq!(m11.primitive_divisors, vec![23, 89]);

        let m1 = mersenne_factor(1, false).unwrap();
        assert_eq!((m1.omega, m1.value.clone()), (0, BigUint::one()));

        let m12 = mersenne_factor(12, false).unwrap();
        assert_eq!(m12.factorization, "3²·5·7·13");
        assert_eq!(m12.primitive_divisors, vec![13]);

        assert_eq!(mersenne_factor(65, false), Err(Error::CapExceeded { m: 65, cap: 64 }));
        assert!(mersenne_factor(0, false).is_err());
    }

    #[test]
    fn cyclotomic_pieces() {
        let expected = [1u32, 3, 7, 5, 31, 3, 127, 17, 73, 11, 2047, 13];
        for (n, &v) in (1..=12).zip(&expected) {
            assert_eq!(cyclotomic_at_two(n), BigUint::from(v), "n = {n}");
        }
    }

    #[test]
    fn override_mode() {
        let d = mersenne_factor(210, true).unwrap();
        assert!(d.omega as u64 >= corollary_lower_bound(210));
        let d = mersenne_factor(67, true).unwrap();
        assert_eq!(d.prime_factors, vec![(193707721, 1), (761838257287, 1)]);
        assert!(d.complete);
    }

    #[test]
    fn density_bounds() {
        let b6 = density_bound(6).unwrap();
        assert_eq!((b6.h, b6.rational.as_deref(), b6.vacuous), (2, Some("18"), true));
        let b30 = density_bound(30).unwrap();
        assert_eq!(b30.h, 6);
        assert_eq!(b30.rational.as_deref(), Some("225/2"));
        assert_eq!(b30.decimal, 112.5);
        assert!(density_bound(210).is_err());
        let b210 = density_bound_partial(210).unwrap();
        assert_eq!(b210.h, 14);
        assert_eq!(b210.rational.as_deref(), Some("11025/32"));
        assert!((b210.decimal - 344.53125).abs() < 1e-9);
    }

    #[test]
    fn odd_h_compares_exactly() {
        // m = 2: h = 1, bound 4/√2 > 1.
        let b = density_bound(2).unwrap();
        assert_eq!(b.h, 1);
        assert!(b.rational.is_none() && b.vacuous);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_factors(2, 1).unwrap().alpha, vec![7, 5, 3, 1]);
        let q = alpha_factors(3, 1).unwrap();
        assert_eq!(q.alpha, vec![11, 9, 7, 5]);
        assert_eq!(q.decompositions[1], (1, 3));
        assert!(alpha_factors(1, 1).is_err());
        assert!(alpha_factors(3, 0).is_err());
    }

    #[test]
    fn alpha_congruence_examples() {
        let m7 = BigInt::from(7);
        let diff = |s1: u32, t1: u32, s2: u32, t2: u32| -> Vec<BigInt> {
            let a = alpha_values(s1, t1);
            let b = alpha_values(s2, t2);
            (0..4).map(|i| (BigInt::from(a[i]) - BigInt::from(b[i])).mod_floor(&m7)).collect()
        };
        assert!(diff(5, 2, 8, 5).iter().all(Zero::is_zero));
        assert!(alpha_congruence_check(3, 100, 1));
        assert!(alpha_congruence_check(1, 10, 1));
    }

    #[test]
    fn class_m_examples() {
        let w = class_m_witnesses(4).unwrap();
        assert_eq!(w, vec![(2, 3, 1), (3, 15, 1), (4, 7, 3)]);
        assert!(class_m_witnesses(1).unwrap().is_empty());
    }
}
