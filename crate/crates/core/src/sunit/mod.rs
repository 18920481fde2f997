//! The S-unit equation `λ + μ = 1` over `Q(√d)`, where `S` is the set of
//! primes above 2.
//!
//! Relevant solutions are handled through their integral parametrisation
//!
//! ```text
//! λ = (η1·2^r1 − η2·2^r2 + 1 + v√d)/2,   μ = 1 − λ,
//! (η1·2^r1 − η2·2^r2 + 1)² − η1·2^(r1+2) = d·v²
//! ```
//!
//! and grouped into orbits under the six cross-ratio maps and Galois
//! conjugation.

mod classify;
mod oracle;

pub use classify::{
    classify_relevant_solutions, param_search, solve_exponential_family, table_one_entries,
    table_row, Classification, ExpFamily, SearchBounds, TableRow,
};
pub use oracle::{brute_force_sunit, orbit_params};

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadfield::{QuadElement, SquarefreeD};

fn is_power_of_two(n: &BigInt) -> bool {
    let m = n.magnitude();
    !m.is_zero() && m.count_ones() == 1
}

/// `±2^a` for a nonzero integer, as `(sign, a)`.
fn signed_power_of_two(n: &BigInt) -> Option<(i8, u32)> {
    is_power_of_two(n).then(|| {
        let sign = if n.is_negative() { -1 } else { 1 };
        (sign, n.magnitude().trailing_zeros().unwrap_or(0) as u32)
    })
}

/// Membership in `O_S^*`: the denominator and the norm are both powers of 2.
pub fn is_s_unit(e: &QuadElement) -> bool {
    if e.is_zero() || !is_power_of_two(e.den()) {
        return false;
    }
    let n = e.norm();
    is_power_of_two(n.numer()) && is_power_of_two(n.denom())
}

/// A solution `(λ, μ)` of `λ + μ = 1` with `λ, μ ∈ O_S^*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SUnitSolution {
    lambda: QuadElement,
    mu: QuadElement,
}

impl SUnitSolution {
    pub fn new(lambda: QuadElement) -> Result<Self> {
        if lambda.is_zero() || lambda.is_one() {
            return Err(Error::Degenerate(format!("λ = {lambda}")));
        }
        let mu = &QuadElement::from_int(1, lambda.d()) - &lambda;
        if !is_s_unit(&lambda) || !is_s_unit(&mu) {
            return Err(Error::InvalidInput(format!(
                "({lambda}, {mu}) is not a pair of S-units"
            )));
        }
        Ok(SUnitSolution { lambda, mu })
    }

    pub fn lambda(&self) -> &QuadElement {
        &self.lambda
    }

    pub fn mu(&self) -> &QuadElement {
        &self.mu
    }

    pub fn d(&self) -> SquarefreeD {
        self.lambda.d()
    }

    /// Irrelevant solutions are exactly the rational ones:
    /// `(2, −1)`, `(−1, 2)` and `(1/2, 1/2)`.
    pub fn relevant(&self) -> bool {
        !self.lambda.is_rational()
    }

    pub fn is_integral(&self) -> bool {
        self.lambda.is_integral() && self.mu.is_integral()
    }

    pub fn swap(&self) -> Self {
        SUnitSolution {
            lambda: self.mu.clone(),
            mu: self.lambda.clone(),
        }
    }

    pub fn conjugate(&self) -> Self {
        SUnitSolution {
            lambda: self.lambda.conjugate(),
            mu: self.mu.conjugate(),
        }
    }

    fn sort_key(&self) -> (BigInt, BigInt, BigInt) {
        let l = &self.lambda;
        (l.den().clone(), l.x().clone(), l.y().clone())
    }
}

impl PartialOrd for SUnitSolution {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SUnitSolution {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

/// The six images `z, 1/z, 1−z, 1/(1−z), z/(z−1), (z−1)/z` of `λ`, each
/// paired with `1 − image`.
pub fn s3_orbit(sol: &SUnitSolution) -> Vec<SUnitSolution> {
    let z = &sol.lambda;
    let one = QuadElement::from_int(1, z.d());
    let one_minus = &one - z;
    let z_minus = z - &one;
    [
        z.clone(),
        &one / z,
        one_minus.clone(),
        &one / &one_minus,
        z / &z_minus,
        &z_minus / z,
    ]
    .into_iter()
    .map(|l| SUnitSolution::new(l).expect("cross-ratio maps preserve S-unit solutions"))
    .collect()
}

/// Integer data `(η1, η2, r1, r2, v)` of a relevant solution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ParamSolution {
    pub eta1: i8,
    pub eta2: i8,
    pub r1: u32,
    pub r2: u32,
    #[serde(serialize_with = "crate::serde_bigint")]
    pub v: BigInt,
    pub d: SquarefreeD,
}

fn signed_pow2(sign: i8, e: u32) -> BigInt {
    let p = BigInt::one() << e;
    if sign < 0 {
        -p
    } else {
        p
    }
}

/// `(η1·2^r1 − η2·2^r2 + 1)² − η1·2^(r1+2)`.
pub fn paracond2_lhs(eta1: i8, eta2: i8, r1: u32, r2: u32) -> BigInt {
    let t = signed_pow2(eta1, r1) - signed_pow2(eta2, r2) + 1;
    &t * &t - signed_pow2(eta1, r1 + 2)
}

/// `(η2·2^r2 − η1·2^r1 + 1)² − η2·2^(r2+2)`.
pub fn paracond3_lhs(eta1: i8, eta2: i8, r1: u32, r2: u32) -> BigInt {
    let t = signed_pow2(eta2, r2) - signed_pow2(eta1, r1) + 1;
    &t * &t - signed_pow2(eta2, r2 + 2)
}

impl ParamSolution {
    pub fn new(eta1: i8, eta2: i8, r1: u32, r2: u32, v: BigInt, d: SquarefreeD) -> Result<Self> {
        let p = ParamSolution {
            eta1,
            eta2,
            r1,
            r2,
            v,
            d,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ParamViolation(msg));
        if self.eta1.abs() != 1 || self.eta2.abs() != 1 {
            return bad(format!("signs ({}, {}) must be ±1", self.eta1, self.eta2));
        }
        if self.r1 < self.r2 {
            return bad(format!("r1 = {} < r2 = {}", self.r1, self.r2));
        }
        if self.v.is_zero() {
            return bad("v = 0".into());
        }
        let lhs = paracond2_lhs(self.eta1, self.eta2, self.r1, self.r2);
        let rhs = self.d.to_bigint() * &self.v * &self.v;
        if lhs != rhs {
            return bad(format!("{lhs} != {}·{}²", self.d, self.v));
        }
        if self.d.get() % 8 != 1 && self.r2 != 0 {
            return bad(format!("r2 = {} but 2 does not split", self.r2));
        }
        Ok(())
    }

    /// Trace of `λ`: `η1·2^r1 − η2·2^r2 + 1`.
    pub fn trace(&self) -> BigInt {
        signed_pow2(self.eta1, self.r1) - signed_pow2(self.eta2, self.r2) + 1
    }

    fn canonical_key(&self) -> (u32, u32, i8, i8, BigInt, BigInt) {
        (
            self.r1,
            self.r2,
            self.eta1,
            self.eta2,
            self.v.abs(),
            self.v.clone(),
        )
    }
}

impl PartialOrd for ParamSolution {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ParamSolution {
    /// Lexicographic in `(d, r1, r2, η1, η2, |v|, v)`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.d
            .cmp(&other.d)
            .then_with(|| self.canonical_key().cmp(&other.canonical_key()))
    }
}

pub fn param_to_solution(p: &ParamSolution) -> Result<SUnitSolution> {
    p.validate()?;
    let lambda = QuadElement::new(p.trace(), p.v.clone(), p.d, true)?;
    SUnitSolution::new(lambda)
}

/// Reads off `(η, r)` with `norm = η·2^r` for an integral S-unit.
fn norm_exponent(e: &QuadElement) -> Option<(i8, u32)> {
    let n = e.norm();
    if !n.is_integer() {
        return None;
    }
    signed_power_of_two(n.numer())
}

/// Parameters of an integral relevant solution without swapping.
fn integral_param_unswapped(sol: &SUnitSolution) -> Option<ParamSolution> {
    let (eta1, r1) = norm_exponent(&sol.lambda)?;
    let (eta2, r2) = norm_exponent(&sol.mu)?;
    if r1 < r2 {
        return None;
    }
    let (_, v) = sol.lambda.half_coords()?;
    Some(ParamSolution {
        eta1,
        eta2,
        r1,
        r2,
        v,
        d: sol.d(),
    })
}

/// Recovers `(η1, η2, r1, r2, v)` from an integral relevant solution,
/// swapping `λ` and `μ` when needed so that `r1 >= r2`.
pub fn solution_to_param(sol: &SUnitSolution) -> Result<ParamSolution> {
    if !sol.relevant() {
        return Err(Error::Irrelevant);
    }
    if !sol.is_integral() {
        return Err(Error::InvalidInput(format!(
            "({}, {}) is not integral; normalize it first",
            sol.lambda, sol.mu
        )));
    }
    let p = integral_param_unswapped(sol)
        .or_else(|| integral_param_unswapped(&sol.swap()))
        .expect("integral S-units have norms ±2^r");
    debug_assert!(p.validate().is_ok());
    Ok(p)
}

/// An integral translate of a relevant solution under the cross-ratio maps.
pub fn normalize_integral(sol: &SUnitSolution) -> Result<SUnitSolution> {
    if !sol.relevant() {
        return Err(Error::Irrelevant);
    }
    Ok(s3_orbit(sol)
        .into_iter()
        .find(SUnitSolution::is_integral)
        .expect("every relevant orbit has an integral member"))
}

/// All distinct images of `sol` under the cross-ratio maps and conjugation.
fn orbit_members(sol: &SUnitSolution) -> Vec<SUnitSolution> {
    let mut members: Vec<SUnitSolution> = s3_orbit(sol)
        .into_iter()
        .flat_map(|t| {
            let c = t.conjugate();
            [t, c]
        })
        .collect();
    members.sort();
    members.dedup();
    members
}

/// Canonical parameters of the orbit of a relevant solution: the minimum of
/// `(r1, r2, η1, η2, |v|)` over integral members with `v > 0`.
pub fn canonical_param(sol: &SUnitSolution) -> Result<ParamSolution> {
    if !sol.relevant() {
        return Err(Error::Irrelevant);
    }
    Ok(orbit_members(sol)
        .iter()
        .filter(|t| t.is_integral())
        .filter_map(integral_param_unswapped)
        .filter(|p| p.v.is_positive())
        .min()
        .expect("every relevant orbit has an integral member"))
}

/// A relevant orbit under the cross-ratio maps and Galois conjugation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitClass {
    pub representative: SUnitSolution,
    pub param: ParamSolution,
    pub members: Vec<SUnitSolution>,
}

impl OrbitClass {
    pub fn of(sol: &SUnitSolution) -> Result<Self> {
        let param = canonical_param(sol)?;
        let representative = param_to_solution(&param)?;
        let members = orbit_members(&representative);
        Ok(OrbitClass {
            representative,
            param,
            members,
        })
    }

    pub fn contains(&self, sol: &SUnitSolution) -> bool {
        self.members.binary_search(sol).is_ok()
    }
}

/// The irrelevant solution `(2, −1)` in `Q(√d)`.
pub fn irrelevant_solution(d: SquarefreeD) -> SUnitSolution {
    SUnitSolution::new(QuadElement::from_int(2, d)).expect("(2, -1) is an S-unit solution")
}
