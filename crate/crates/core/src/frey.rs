//! Invariants of the Frey curve `Y² = X(X − u)(X + v)` attached to
//! `u + v + w = 0`, local reduction types at odd primes, and the λ-invariant
//! to j-invariant map.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadfield::QuadElement;

/// The arithmetic needed by the formulas, over `Q` or `Q(√d)`.
pub trait FieldElement: Clone + PartialEq + fmt::Display {
    /// The integer `n` in the same field as `self`.
    fn constant(&self, n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    /// Panics on division by zero; callers check first.
    fn over(&self, other: &Self) -> Self;

    fn square(&self) -> Self {
        self.times(self)
    }

    fn cube(&self) -> Self {
        self.times(self).times(self)
    }
}

impl FieldElement for BigRational {
    fn constant(&self, n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
}

impl FieldElement for QuadElement {
    fn constant(&self, n: i64) -> Self {
        QuadElement::from_int(n, self.d())
    }
    fn is_zero(&self) -> bool {
        QuadElement::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn over(&self, other: &Self) -> Self {
        self / other
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreyInvariants<F: FieldElement> {
    #[serde(serialize_with = "crate::serde_display")]
    pub c4: F,
    #[serde(serialize_with = "crate::serde_display")]
    pub c6: F,
    #[serde(serialize_with = "crate::serde_display")]
    pub disc: F,
    #[serde(serialize_with = "crate::serde_display")]
    pub j: F,
}

/// The three expressions `16(u² − vw)`, `16(v² − wu)`, `16(w² − uv)`.
/// They agree whenever `u + v + w = 0`.
pub fn c4_expressions<F: FieldElement>(u: &F, v: &F, w: &F) -> [F; 3] {
    let sixteen = u.constant(16);
    [
        sixteen.times(&u.square().minus(&v.times(w))),
        sixteen.times(&v.square().minus(&w.times(u))),
        sixteen.times(&w.square().minus(&u.times(v))),
    ]
}

pub fn frey_invariants<F: FieldElement>(u: &F, v: &F, w: &F) -> Result<FreyInvariants<F>> {
    if !u.plus(v).plus(w).is_zero() {
        return Err(Error::InvalidInput(format!("{u} + {v} + {w} ≠ 0")));
    }
    let uvw = u.times(v).times(w);
    if uvw.is_zero() {
        return Err(Error::Degenerate(format!("uvw = 0 for ({u}, {v}, {w})")));
    }
    let [c4, ..] = c4_expressions(u, v, w);
    let c6 = u
        .constant(-32)
        .times(&u.minus(v))
        .times(&v.minus(w))
        .times(&w.minus(u));
    let disc = u.constant(16).times(&uvw.square());
    let j = c4.cube().over(&disc);
    Ok(FreyInvariants { c4, c6, disc, j })
}

/// Reduction type at an odd prime `q`, read off from `ord_q` of `u, v, w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReductionType {
    Good,
    /// `ord_q` of the minimal discriminant, from the formula
    /// `2(ord u + ord v + ord w) − 6s` with `s` the smallest valuation.
    Multiplicative { ord_disc_min: u64 },
    Additive,
}

pub fn reduction_type(vu: u64, vv: u64, vw: u64) -> ReductionType {
    let s = vu.min(vv).min(vw);
    if s % 2 == 1 {
        ReductionType::Additive
    } else if vu == vv && vv == vw {
        ReductionType::Good
    } else {
        ReductionType::Multiplicative {
            ord_disc_min: 2 * (vu + vv + vw) - 6 * s,
        }
    }
}

fn check_lambda<F: FieldElement>(lambda: &F) -> Result<()> {
    if lambda.is_zero() || lambda.minus(&lambda.constant(1)).is_zero() {
        return Err(Error::Degenerate(format!("λ = {lambda}")));
    }
    Ok(())
}

/// `2^8·(λ² − λ + 1)³ / (λ²(λ − 1)²)`.
pub fn lambda_to_j<F: FieldElement>(lambda: &F) -> Result<F> {
    check_lambda(lambda)?;
    let one = lambda.constant(1);
    let num = lambda.square().minus(lambda).plus(&one).cube();
    let den = lambda.square().times(&lambda.minus(&one).square());
    Ok(lambda.constant(256).times(&num.over(&den)))
}

/// The same value written through `μ = 1 − λ`: `2^8·(1 − λμ)³ / (λμ)²`.
pub fn lambda_mu_to_j<F: FieldElement>(lambda: &F) -> Result<F> {
    check_lambda(lambda)?;
    let one = lambda.constant(1);
    let lm = lambda.times(&one.minus(lambda));
    Ok(lambda.constant(256).times(&one.minus(&lm).cube().over(&lm.square())))
}

/// `n` as a rational, for callers working over `Q`.
pub fn rational(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `1728`, the j-invariant of the irrelevant orbit.
pub fn j_1728() -> BigRational {
    rational(1728)
}
