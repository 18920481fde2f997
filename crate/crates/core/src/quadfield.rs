//! Exact arithmetic in `Q(√d)` and valuations at the primes above 2.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::factor;

/// A squarefree integer `d >= 2`, i.e. a real quadratic field `Q(√d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SquarefreeD(u64);

impl SquarefreeD {
    pub fn new(d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::OutOfRange(d));
        }
        let f = factor::factor(d as u128);
        if f.iter().any(|&(_, e)| e > 1) {
            return Err(Error::NotSquarefree {
                n: d,
                factorization: factor::format_factorization(&f),
            });
        }
        Ok(SquarefreeD(d))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }
}

impl fmt::Display for SquarefreeD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// 2-adic valuation of a nonzero integer.
pub fn v2(n: &BigInt) -> u64 {
    debug_assert!(!n.is_zero());
    n.trailing_zeros().unwrap_or(0)
}

/// 2-adic valuation of a nonzero rational.
pub fn v2_rational(q: &BigRational) -> i64 {
    v2(q.numer()) as i64 - v2(q.denom()) as i64
}

/// The element `(x + y√d) / den` of `Q(√d)`.
///
/// Stored normalized: `den > 0` and `gcd(x, y, den) = 1`. Algebraic
/// integers have `den = 1`, or `den = 2` with `x`, `y` odd when
/// `d ≡ 1 (mod 4)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadElement {
    x: BigInt,
    y: BigInt,
    den: BigInt,
    d: SquarefreeD,
}

impl QuadElement {
    /// `x + y√d`, or `(x + y√d)/2` when `half` is set. A half element must
    /// be an algebraic integer.
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, d: SquarefreeD, half: bool) -> Result<Self> {
        let (x, y) = (x.into(), y.into());
        if half {
            let odd = x.is_odd() || y.is_odd();
            if odd && (d.get() % 4 != 1 || x.is_odd() != y.is_odd()) {
                return Err(Error::InvalidInput(format!(
                    "({x} + {y}√{d})/2 is not an algebraic integer"
                )));
            }
            Ok(Self::from_parts(x, y, BigInt::from(2), d))
        } else {
            Ok(Self::from_parts(x, y, BigInt::one(), d))
        }
    }

    /// General element `(x + y√d)/den`; panics on `den = 0`.
    pub fn from_parts(x: BigInt, y: BigInt, den: BigInt, d: SquarefreeD) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (mut x, mut y, mut den) = (x, y, den);
        if den.is_negative() {
            x = -x;
            y = -y;
            den = -den;
        }
        let g = x.gcd(&y).gcd(&den);
        if !g.is_one() {
            x /= &g;
            y /= &g;
            den /= &g;
        }
        QuadElement { x, y, den, d }
    }

    pub fn from_int(n: impl Into<BigInt>, d: SquarefreeD) -> Self {
        Self::from_parts(n.into(), BigInt::zero(), BigInt::one(), d)
    }

    pub fn from_rational(q: &BigRational, d: SquarefreeD) -> Self {
        Self::from_parts(q.numer().clone(), BigInt::zero(), q.denom().clone(), d)
    }

    pub fn sqrt_d(d: SquarefreeD) -> Self {
        Self::from_parts(BigInt::zero(), BigInt::one(), BigInt::one(), d)
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn d(&self) -> SquarefreeD {
        self.d
    }

    pub fn is_half(&self) -> bool {
        self.den == BigInt::from(2)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero() && self.den.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// Membership in the ring of integers `O_K`.
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
            || (self.is_half() && self.d.get() % 4 == 1 && self.x.is_odd() && self.y.is_odd())
    }

    /// Coordinates `(X, Y)` with `self = (X + Y√d)/2`, for integral elements.
    pub fn half_coords(&self) -> Option<(BigInt, BigInt)> {
        if self.den.is_one() {
            Some((&self.x * 2, &self.y * 2))
        } else if self.is_integral() {
            Some((self.x.clone(), self.y.clone()))
        } else {
            None
        }
    }

    pub fn conjugate(&self) -> Self {
        QuadElement {
            x: self.x.clone(),
            y: -&self.y,
            den: self.den.clone(),
            d: self.d,
        }
    }

    fn numerator_norm(&self) -> BigInt {
        &self.x * &self.x - &self.y * &self.y * self.d.to_bigint()
    }

    pub fn norm(&self) -> BigRational {
        BigRational::new(self.numerator_norm(), &self.den * &self.den)
    }

    pub fn trace(&self) -> BigRational {
        BigRational::new(&self.x * 2, self.den.clone())
    }

    /// The rational value, if `y = 0`.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational()
            .then(|| BigRational::new(self.x.clone(), self.den.clone()))
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.numerator_norm();
        Some(Self::from_parts(
            &self.x * &self.den,
            -&self.y * &self.den,
            n,
            self.d,
        ))
    }

    fn check_field(&self, other: &Self) {
        assert_eq!(self.d, other.d, "elements of different fields");
    }
}

impl fmt::Display for QuadElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.d.get();
        let mut num = String::new();
        if !self.x.is_zero() || self.y.is_zero() {
            num.push_str(&self.x.to_string());
        }
        if !self.y.is_zero() {
            let mag = self.y.abs();
            let coeff = if mag.is_one() { String::new() } else { mag.to_string() };
            if self.y.is_negative() {
                num.push('-');
            } else if !self.x.is_zero() {
                num.push('+');
            }
            num.push_str(&format!("{coeff}√{d}"));
        }
        if self.den.is_one() {
            f.write_str(&num)
        } else if !self.x.is_zero() && !self.y.is_zero() {
            write!(f, "({num})/{}", self.den)
        } else {
            write!(f, "{num}/{}", self.den)
        }
    }
}

impl Serialize for QuadElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QuadElement", 4)?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("x", &self.x.to_string())?;
        st.serialize_field("y", &self.y.to_string())?;
        st.serialize_field("den", &self.den.to_string())?;
        st.end()
    }
}

impl<'a> Add<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn add(self, o: &QuadElement) -> QuadElement {
        self.check_field(o);
        QuadElement::from_parts(
            &self.x * &o.den + &o.x * &self.den,
            &self.y * &o.den + &o.y * &self.den,
            &self.den * &o.den,
            self.d,
        )
    }
}

impl<'a> Sub<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn sub(self, o: &QuadElement) -> QuadElement {
        self + &(-o)
    }
}

impl<'a> Mul<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    fn mul(self, o: &QuadElement) -> QuadElement {
        self.check_field(o);
        let d = self.d.to_bigint();
        QuadElement::from_parts(
            &self.x * &o.x + &self.y * &o.y * d,
            &self.x * &o.y + &self.y * &o.x,
            &self.den * &o.den,
            self.d,
        )
    }
}

impl<'a> Div<&'a QuadElement> for &'a QuadElement {
    type Output = QuadElement;
    /// Panics on division by zero.
    fn div(self, o: &QuadElement) -> QuadElement {
        self * &o.inverse().expect("division by zero in Q(√d)")
    }
}

impl Neg for &QuadElement {
    type Output = QuadElement;
    fn neg(self) -> QuadElement {
        QuadElement {
            x: -&self.x,
            y: -&self.y,
            den: self.den.clone(),
            d: self.d,
        }
    }
}

impl Neg for QuadElement {
    type Output = QuadElement;
    fn neg(self) -> QuadElement {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<QuadElement> for QuadElement {
            type Output = QuadElement;
            fn $m(self, o: QuadElement) -> QuadElement { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a QuadElement> for QuadElement {
            type Output = QuadElement;
            fn $m(self, o: &QuadElement) -> QuadElement { (&self).$m(o) }
        }
        impl<'a> $tr<QuadElement> for &'a QuadElement {
            type Output = QuadElement;
            fn $m(self, o: QuadElement) -> QuadElement { self.$m(&o) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SplittingKind {
    #[serde(rename = "ramified")]
    Ramified,
    #[serde(rename = "inert")]
    Inert,
    #[serde(rename = "split")]
    Split,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PrimeLabel {
    /// The unique prime above 2 (ramified or inert).
    P,
    /// Split case: the prime where `√d` maps to the 2-adic root `r ≡ 1 (mod 4)`.
    P1,
    /// Split case: the prime where `√d` maps to `-r`.
    P2,
}

impl fmt::Display for PrimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrimeLabel::P => "P",
            PrimeLabel::P1 => "P1",
            PrimeLabel::P2 => "P2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeAbove2 {
    pub label: PrimeLabel,
    /// Ramification index.
    pub e: u32,
    /// Residue degree.
    pub f: u32,
    pub ord_of_two: u32,
}

impl PrimeAbove2 {
    pub fn in_t(&self) -> bool {
        self.f == 1
    }

    pub fn in_u(&self) -> bool {
        self.ord_of_two % 3 != 0
    }
}

/// Decomposition of 2 in `Q(√d)`: the set `S` of primes above 2, the subset
/// `T` of residue degree one and the subset `U` with `3 ∤ ord_P(2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplittingData {
    pub d: SquarefreeD,
    pub kind: SplittingKind,
    pub s: Vec<PrimeAbove2>,
    pub t: Vec<PrimeAbove2>,
    pub u: Vec<PrimeAbove2>,
}

impl SplittingData {
    pub fn prime(&self, label: PrimeLabel) -> Option<&PrimeAbove2> {
        self.s.iter().find(|p| p.label == label)
    }
}

pub fn splitting_of_two(d: SquarefreeD) -> SplittingData {
    let prime = |label, e, f| PrimeAbove2 {
        label,
        e,
        f,
        ord_of_two: e,
    };
    let (kind, s) = match d.get() % 8 {
        1 => (
            SplittingKind::Split,
            vec![prime(PrimeLabel::P1, 1, 1), prime(PrimeLabel::P2, 1, 1)],
        ),
        5 => (SplittingKind::Inert, vec![prime(PrimeLabel::P, 1, 2)]),
        _ => (SplittingKind::Ramified, vec![prime(PrimeLabel::P, 2, 1)]),
    };
    let t = s.iter().copied().filter(PrimeAbove2::in_t).collect();
    let u = s.iter().copied().filter(PrimeAbove2::in_u).collect();
    SplittingData { d, kind, s, t, u }
}

/// `r mod 2^k` with `r² ≡ d (mod 2^k)` and `r ≡ 1 (mod 4)`.
///
/// The 2-adic square root of `d` congruent to 1 mod 4 agrees with the
/// returned residue modulo `2^(k-1)`.
pub fn hensel_sqrt_2adic(d: SquarefreeD, k: u32) -> Result<BigUint> {
    if d.get() % 8 != 1 {
        return Err(Error::InvalidInput(format!(
            "2 does not split in Q(√{d}): need d ≡ 1 (mod 8)"
        )));
    }
    if k < 3 {
        return Err(Error::InvalidInput(format!("precision {k} < 3 bits")));
    }
    let d = BigUint::from(d.get());
    let mut r = BigUint::one();
    // Invariant: r² ≡ d (mod 2^j).
    for j in 3..k {
        let modulus = BigUint::one() << (j + 1);
        if (&r * &r) % &modulus != &d % &modulus {
            r += BigUint::one() << (j - 1);
        }
    }
    Ok(r % (BigUint::one() << k))
}

/// `ord_P` of the integral element `x + y√d` at a split prime.
fn split_numerator_valuation(x: &BigInt, y: &BigInt, d: SquarefreeD, label: PrimeLabel) -> u64 {
    let mut k: u32 = 16;
    loop {
        let r = BigInt::from_biguint(Sign::Plus, hensel_sqrt_2adic(d, k).expect("split field"));
        let r = if label == PrimeLabel::P2 { -r } else { r };
        let modulus = BigInt::one() << (k - 1);
        let image = (x + y * r).mod_floor(&modulus);
        if !image.is_zero() {
            return v2(&image);
        }
        k *= 2;
    }
}

/// `ord_P(e)` for a nonzero element `e` and a prime `P` above 2.
pub fn valuation_above_2(e: &QuadElement, p: &PrimeAbove2, splitting: &SplittingData) -> Result<i64> {
    if e.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if splitting.d != e.d() || splitting.prime(p.label).is_none() {
        return Err(Error::InvalidInput(format!(
            "prime {} does not lie in Q(√{})",
            p.label,
            e.d()
        )));
    }
    let den_part = p.e as i64 * v2(&e.den) as i64;
    let num = match splitting.kind {
        SplittingKind::Ramified => v2(&e.numerator_norm()) as i64,
        SplittingKind::Inert => {
            let n = v2(&e.numerator_norm());
            debug_assert!(n % 2 == 0);
            (n / 2) as i64
        }
        SplittingKind::Split => split_numerator_valuation(&e.x, &e.y, e.d, p.label) as i64,
    };
    Ok(num - den_part)
}
