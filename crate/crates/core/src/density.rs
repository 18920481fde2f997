//! Counting squarefree `d`: totals, arithmetic progressions, the fields with
//! relevant S-unit solutions, and integers built from primes in fixed
//! residue classes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::factor::{factor, gcd_u128, squarefree_part_at_most, totient, DEFAULT_SEED};
use crate::quadfield::SquarefreeD;
use crate::sunit::{paracond2_lhs, ParamSolution};

/// `sieve[d]` is true iff `2 <= d <= x` is squarefree.
pub fn squarefree_sieve(x: u64) -> Vec<bool> {
    let n = x as usize;
    let mut sf = vec![true; n + 1];
    sf.iter_mut().take(2).for_each(|b| *b = false);
    let mut q = 2usize;
    while q * q <= n {
        let sq = q * q;
        for m in (sq..=n).step_by(sq) {
            sf[m] = false;
        }
        q += 1;
    }
    sf
}

/// `#{2 <= d <= x squarefree}` from `Σ μ(k)·⌊x/k²⌋`, independent of the sieve.
pub fn squarefree_count_mobius(x: u64) -> u64 {
    let k_max = x.isqrt() as usize;
    let mut mu = vec![1i8; k_max + 1];
    let mut composite = vec![false; k_max + 1];
    for p in 2..=k_max {
        if composite[p] {
            continue;
        }
        for m in (p..=k_max).step_by(p) {
            if m > p {
                composite[m] = true;
            }
            mu[m] = -mu[m];
        }
        for m in (p * p..=k_max).step_by(p * p) {
            mu[m] = 0;
        }
    }
    let total: i64 = (1..=k_max)
        .map(|k| mu[k] as i64 * (x / (k as u64 * k as u64)) as i64)
        .sum();
    // Excludes d = 1.
    (total - 1).max(0) as u64
}

/// An exact ratio with its decimal rendering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Density(pub Ratio<u64>);

impl Density {
    pub fn new(num: u64, den: u64) -> Self {
        Density(Ratio::new(num, den.max(1)))
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≈ {:.6}", self.0, self.to_f64())
    }
}

impl Serialize for Density {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Density", 2)?;
        st.serialize_field("exact", &self.0.to_string())?;
        st.serialize_field("decimal", &self.to_f64())?;
        st.end()
    }
}

/// Squarefree count in `d ≡ r (mod n)` next to its main-term prediction
/// `c·6x/π²`, where
/// `c = φ(n) / (s·φ(n/s)·n·∏_{q | n}(1 − q⁻²))` and `s = gcd(r, n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApCount {
    pub r: u64,
    pub n: u64,
    pub x: u64,
    pub s: u64,
    pub count: u64,
    #[serde(serialize_with = "crate::serde_display")]
    pub coefficient: Ratio<u128>,
    pub predicted: f64,
    pub relative_error: f64,
}

fn ap_gcd(r: u64, n: u64) -> u64 {
    gcd_u128((r % n) as u128, n as u128) as u64
}

pub fn ap_coefficient(r: u64, n: u64) -> Result<Ratio<u128>> {
    if n == 0 {
        return Err(Error::InvalidInput("modulus 0".into()));
    }
    let s = ap_gcd(r, n);
    if factor(s as u128).iter().any(|&(_, e)| e > 1) {
        return Err(Error::InvalidInput(format!(
            "gcd({r}, {n}) = {s} is not squarefree"
        )));
    }
    let (mut num, mut den) = (totient(n) as u128, (s as u128) * totient(n / s) as u128 * n as u128);
    for (q, _) in factor(n as u128) {
        // 1/(1 − q⁻²) = q²/(q² − 1)
        num *= q * q;
        den *= q * q - 1;
    }
    Ok(Ratio::new(num, den))
}

pub fn sf_count_in_ap_with(sieve: &[bool], r: u64, n: u64) -> Result<ApCount> {
    let coefficient = ap_coefficient(r, n)?;
    let x = sieve.len().saturating_sub(1) as u64;
    let start = (r % n) as usize;
    let count = (start..sieve.len()).step_by(n as usize).filter(|&d| sieve[d]).count() as u64;
    let predicted = coefficient.to_f64().unwrap() * 6.0 * x as f64 / (PI * PI);
    Ok(ApCount {
        r,
        n,
        x,
        s: ap_gcd(r, n),
        count,
        coefficient,
        predicted,
        relative_error: (count as f64 - predicted).abs() / predicted,
    })
}

pub fn sf_count_in_ap(r: u64, n: u64, x: u64) -> Result<ApCount> {
    ap_coefficient(r, n)?;
    sf_count_in_ap_with(&squarefree_sieve(x), r, n)
}

/// Every squarefree `2 <= d <= x` for which some parameter tuple with
/// `r2 <= r1 <= r1_max` solves `L(η1, η2, r1, r2) = d·v²`, with the smallest
/// such tuple as witness.
pub fn enumerate_c_prime(x: u64, r1_max: u32) -> BTreeMap<u64, ParamSolution> {
    enumerate_c_prime_seeded(x, r1_max, DEFAULT_SEED)
}

pub fn enumerate_c_prime_seeded(x: u64, r1_max: u32, seed: u64) -> BTreeMap<u64, ParamSolution> {
    let mut found: BTreeMap<u64, ParamSolution> = BTreeMap::new();
    for r1 in 0..=r1_max {
        for r2 in 0..=r1 {
            for eta1 in [-1i8, 1] {
                for eta2 in [-1i8, 1] {
                    let l = paracond2_lhs(eta1, eta2, r1, r2);
                    let Some(l) = l.to_u128().filter(|&l| l > 0) else {
                        continue;
                    };
                    let Some((d, v)) = squarefree_part_at_most(l, x as u128, seed).expect("l > 0")
                    else {
                        continue;
                    };
                    if d < 2 {
                        continue;
                    }
                    let d = SquarefreeD::new(d as u64).expect("squarefree part");
                    let witness = ParamSolution::new(eta1, eta2, r1, r2, v.into(), d)
                        .expect("every split of L is a valid parametrisation");
                    found
                        .entry(d.get())
                        .and_modify(|w| {
                            if witness < *w {
                                *w = witness.clone();
                            }
                        })
                        .or_insert(witness);
                }
            }
        }
    }
    found
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    #[serde(rename = "X")]
    pub x: u64,
    pub r1_max: u32,
    /// Squarefree `2 <= d <= x`, by sieve.
    pub n_sf: u64,
    /// The same count from the Möbius sum.
    pub n_sf_mobius: u64,
    /// `6x/π²`.
    pub sf_main_term: f64,
    #[serde(rename = "n_C_prime_found")]
    pub n_c_prime_found: u64,
    /// Squarefree `d` with no relevant solution found.
    #[serde(rename = "n_C")]
    pub n_c: u64,
    /// Members of the previous set with `d ≢ 5 (mod 8)`.
    #[serde(rename = "n_D")]
    pub n_d: u64,
    #[serde(rename = "rel_density_C")]
    pub rel_density_c: Density,
    #[serde(rename = "rel_density_D")]
    pub rel_density_d: Density,
    pub flags: Vec<String>,
    pub witnesses: BTreeMap<u64, ParamSolution>,
    #[serde(skip)]
    pub sieve: Vec<bool>,
}

pub fn scan(x: u64, r1_max: u32) -> Result<DensityReport> {
    scan_seeded(x, r1_max, DEFAULT_SEED)
}

pub fn scan_seeded(x: u64, r1_max: u32, seed: u64) -> Result<DensityReport> {
    if x < 100 {
        return Err(Error::InvalidInput(format!("scan limit {x} < 100")));
    }
    let sieve = squarefree_sieve(x);
    let n_sf = sieve.iter().filter(|&&b| b).count() as u64;
    let not_5_mod_8 = (0..sieve.len()).filter(|&d| sieve[d] && d % 8 != 5).count() as u64;
    let witnesses = enumerate_c_prime_seeded(x, r1_max, seed);
    let n_c_prime_found = witnesses.len() as u64;
    let found_not_5_mod_8 = witnesses.keys().filter(|&&d| d % 8 != 5).count() as u64;
    let n_c = n_sf - n_c_prime_found;
    let n_d = not_5_mod_8 - found_not_5_mod_8;
    Ok(DensityReport {
        x,
        r1_max,
        n_sf,
        n_sf_mobius: squarefree_count_mobius(x),
        sf_main_term: 6.0 * x as f64 / (PI * PI),
        n_c_prime_found,
        n_c,
        n_d,
        rel_density_c: Density::new(n_c, n_sf),
        rel_density_d: Density::new(n_d, n_sf),
        flags: vec![
            format!(
                "membership outside the found exceptions is a proxy: only r2 <= r1 <= {r1_max} was searched"
            ),
            "d ≡ 1 (mod 8) exceptions with larger parameters are not excluded from the counts".into(),
        ],
        witnesses,
        sieve,
    })
}

/// Count of `2 <= d <= x` whose prime factors all lie in the given classes
/// mod `n`, with the fitted exponent `κ` in `count ≈ γ·x/(log x)^κ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothReport {
    pub residues: Vec<u64>,
    pub n: u64,
    pub x: u64,
    pub count: u64,
    /// `1 − m/φ(n)`.
    pub expected_exponent: f64,
    /// Least-squares fit over the ladder; `None` when counts vanish.
    pub fitted_exponent: Option<f64>,
    pub ladder: Vec<(u64, u64)>,
}

/// Smallest prime factor for `0..=x` (0 and 1 map to themselves).
fn smallest_prime_factors(x: usize) -> Vec<u32> {
    let mut spf: Vec<u32> = (0..=x as u32).collect();
    let mut p = 2usize;
    while p * p <= x {
        if spf[p] == p as u32 {
            for m in (p * p..=x).step_by(p) {
                if spf[m] == m as u32 {
                    spf[m] = p as u32;
                }
            }
        }
        p += 1;
    }
    spf
}

pub fn smooth_residue_count(residues: &[u64], n: u64, x: u64) -> Result<SmoothReport> {
    if n == 0 {
        return Err(Error::InvalidInput("modulus 0".into()));
    }
    let mut classes: Vec<u64> = residues.iter().map(|r| r % n).collect();
    classes.sort_unstable();
    if classes.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("residues must be pairwise distinct".into()));
    }
    if let Some(r) = residues.iter().find(|&&r| r.gcd(&n) != 1) {
        return Err(Error::InvalidInput(format!("residue {r} is not coprime to {n}")));
    }
    let allowed: Vec<bool> = (0..n).map(|r| classes.binary_search(&r).is_ok()).collect();

    let spf = smallest_prime_factors(x as usize);
    let mut good = vec![false; x as usize + 1];
    if x >= 1 {
        good[1] = true;
    }
    for m in 2..=x as usize {
        let p = spf[m] as usize;
        good[m] = allowed[p % n as usize] && good[m / p];
    }
    let mut cumulative = Vec::with_capacity(good.len());
    let mut running = 0u64;
    for (m, &g) in good.iter().enumerate() {
        if m >= 2 && g {
            running += 1;
        }
        cumulative.push(running);
    }

    let mut ladder = Vec::new();
    let mut step = x;
    while step >= 1000 {
        ladder.push((step, cumulative[step as usize]));
        step /= 2;
    }
    ladder.reverse();

    let phi = totient(n) as f64;
    Ok(SmoothReport {
        residues: residues.to_vec(),
        n,
        x,
        count: cumulative.last().copied().unwrap_or(0),
        expected_exponent: 1.0 - classes.len() as f64 / phi,
        fitted_exponent: fit_log_exponent(&ladder),
        ladder,
    })
}

/// Slope of `log(count/x)` against `log log x`, negated.
fn fit_log_exponent(ladder: &[(u64, u64)]) -> Option<f64> {
    let points: Vec<(f64, f64)> = ladder
        .iter()
        .filter(|&&(_, c)| c > 0)
        .map(|&(x, c)| ((x as f64).ln().ln(), (c as f64 / x as f64).ln()))
        .collect();
    if points.len() < 2 || points.len() < ladder.len() {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}
