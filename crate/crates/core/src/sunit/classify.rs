use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{param_to_solution, paracond2_lhs, OrbitClass, ParamSolution, SUnitSolution};
use crate::quadfield::{QuadElement, SquarefreeD};

/// Search limits for the parts of the classification that are finite
/// searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBounds {
    /// Largest `r1` tried when 2 splits (`d ≡ 1 mod 8`).
    pub r1_max: u32,
    /// Largest `s` tried in the exponential families `4^s + c = d·w²`.
    pub s_max: u32,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            r1_max: 40,
            s_max: 64,
        }
    }
}

/// The exponential equations `4^s + c = d·w²` governing the residue classes
/// with relevant solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ExpFamily {
    /// `4^s − 1 = d·w²`, `d ≡ 7 (mod 8)`.
    #[serde(rename = "4^s-1")]
    MinusOne,
    /// `4^s + 2 = d·w²`, `d ≡ 2 (mod 16)`.
    #[serde(rename = "4^s+2")]
    PlusTwo,
    /// `4^s − 2 = d·w²`, `d ≡ 14 (mod 16)`.
    #[serde(rename = "4^s-2")]
    MinusTwo,
}

impl ExpFamily {
    pub fn shift(self) -> i64 {
        match self {
            ExpFamily::MinusOne => -1,
            ExpFamily::PlusTwo => 2,
            ExpFamily::MinusTwo => -2,
        }
    }

    pub fn from_shift(c: i64) -> Option<Self> {
        match c {
            -1 => Some(ExpFamily::MinusOne),
            2 => Some(ExpFamily::PlusTwo),
            -2 => Some(ExpFamily::MinusTwo),
            _ => None,
        }
    }

    /// The relevant solution attached to a family member `(s, w)`.
    pub fn solution(self, d: SquarefreeD, s: u32, w: &BigUint) -> SUnitSolution {
        let w = BigInt::from(w.clone());
        let (x, y) = match self {
            ExpFamily::MinusOne => (BigInt::one() << (2 * s + 1), (BigInt::one() << (s + 1)) * w),
            ExpFamily::PlusTwo => (-(BigInt::one() << (2 * s)), (BigInt::one() << s) * w),
            ExpFamily::MinusTwo => (BigInt::one() << (2 * s), (BigInt::one() << s) * w),
        };
        let lambda = QuadElement::new(x, y, d, false).expect("integral element");
        SUnitSolution::new(lambda).expect("family members solve the S-unit equation")
    }
}

/// All `(s, w)` with `2 <= s <= s_max`, `w > 0` and `4^s + c = d·w²`.
/// The negated `w` gives the Galois-conjugate solution and is omitted.
pub fn solve_exponential_family(family: ExpFamily, d: SquarefreeD, s_max: u32) -> Vec<(u32, BigUint)> {
    let d = BigUint::from(d.get());
    (2..=s_max)
        .filter_map(|s| {
            let n = BigInt::from(BigUint::one() << (2 * s)) + family.shift();
            let n = n.to_biguint()?;
            if !(&n % &d).is_zero() {
                return None;
            }
            let q = n / &d;
            let w = q.sqrt();
            (&w * &w == q).then_some((s, w))
        })
        .collect()
}

/// Residue-class rows of the classification for `d ≢ 1 (mod 8)`, plus the
/// split class where only a bounded search is available.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableRow {
    D2,
    D3,
    D5,
    D6,
    ThreeMod8,
    FiveMod8,
    SevenMod8,
    TwoMod16,
    SixMod16,
    TenMod16,
    FourteenMod16,
    OneMod8,
}

impl TableRow {
    pub fn family(self) -> Option<ExpFamily> {
        match self {
            TableRow::SevenMod8 => Some(ExpFamily::MinusOne),
            TableRow::TwoMod16 => Some(ExpFamily::PlusTwo),
            TableRow::FourteenMod16 => Some(ExpFamily::MinusTwo),
            _ => None,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            TableRow::D2 => "d = 2: (√2, 1−√2), (−16+12√2, 17−12√2), (4+2√2, −3−2√2), (−2+2√2, 3−2√2)",
            TableRow::D3 => "d = 3: (2+√3, −1−√3), (8+4√3, −7−4√3)",
            TableRow::D5 => "d = 5: ((1+√5)/2, (1−√5)/2), (−8+4√5, 9−4√5), (−1+√5, 2−√5)",
            TableRow::D6 => "d = 6: (−4+2√6, 5−2√6)",
            TableRow::ThreeMod8 => "d ≡ 3 (mod 8), d ≠ 3: none",
            TableRow::FiveMod8 => "d ≡ 5 (mod 8), d ≠ 5: none",
            TableRow::SevenMod8 => {
                "d ≡ 7 (mod 8): (2^(2s+1) + 2^(s+1)·w√d, 1 − 2^(2s+1) − 2^(s+1)·w√d) with 4^s − 1 = d·w², s ≥ 2"
            }
            TableRow::TwoMod16 => {
                "d ≡ 2 (mod 16), d ≠ 2: (−2^(2s) + 2^s·w√d, 1 + 2^(2s) − 2^s·w√d) with 4^s + 2 = d·w², s ≥ 2"
            }
            TableRow::SixMod16 => "d ≡ 6 (mod 16), d ≠ 6: none",
            TableRow::TenMod16 => "d ≡ 10 (mod 16): none",
            TableRow::FourteenMod16 => {
                "d ≡ 14 (mod 16): (2^(2s) + 2^s·w√d, 1 − 2^(2s) − 2^s·w√d) with 4^s − 2 = d·w², s ≥ 2"
            }
            TableRow::OneMod8 => "d ≡ 1 (mod 8): no closed form; bounded search over (η1, η2, r1, r2)",
        }
    }
}

pub fn table_row(d: SquarefreeD) -> TableRow {
    match d.get() {
        2 => return TableRow::D2,
        3 => return TableRow::D3,
        5 => return TableRow::D5,
        6 => return TableRow::D6,
        _ => {}
    }
    match (d.get() % 8, d.get() % 16) {
        (1, _) => TableRow::OneMod8,
        (3, _) => TableRow::ThreeMod8,
        (5, _) => TableRow::FiveMod8,
        (7, _) => TableRow::SevenMod8,
        (_, 2) => TableRow::TwoMod16,
        (_, 6) => TableRow::SixMod16,
        (_, 10) => TableRow::TenMod16,
        (_, 14) => TableRow::FourteenMod16,
        _ => unreachable!("squarefree d is not divisible by 4"),
    }
}

/// The listed relevant solutions for the four exceptional fields.
pub fn table_one_entries(d: SquarefreeD) -> Option<Vec<SUnitSolution>> {
    let coords: &[(i64, i64, bool)] = match d.get() {
        2 => &[(0, 1, false), (-16, 12, false), (4, 2, false), (-2, 2, false)],
        3 => &[(2, 1, false), (8, 4, false)],
        5 => &[(1, 1, true), (-8, 4, false), (-1, 1, false)],
        6 => &[(-4, 2, false)],
        _ => return None,
    };
    Some(
        coords
            .iter()
            .map(|&(x, y, half)| {
                let l = QuadElement::new(x, y, d, half).expect("integral entry");
                SUnitSolution::new(l).expect("listed entries are S-unit solutions")
            })
            .collect(),
    )
}

fn insert_orbit(orbits: &mut BTreeMap<ParamSolution, OrbitClass>, sol: &SUnitSolution) {
    let orbit = OrbitClass::of(sol).expect("relevant solution");
    orbits.entry(orbit.param.clone()).or_insert(orbit);
}

/// Orbits reached by parameters with `r2 <= r1 <= r1_max` (or `r2 = 0` only).
pub fn param_search(d: SquarefreeD, r1_max: u32, r2_zero: bool) -> Vec<OrbitClass> {
    let dd = d.to_bigint();
    let mut orbits = BTreeMap::new();
    for r1 in 0..=r1_max {
        let r2_max = if r2_zero { 0 } else { r1 };
        for r2 in 0..=r2_max {
            for eta1 in [-1i8, 1] {
                for eta2 in [-1i8, 1] {
                    let l = paracond2_lhs(eta1, eta2, r1, r2);
                    if !l.is_positive() || !(&l % &dd).is_zero() {
                        continue;
                    }
                    let q = l / &dd;
                    let v = q.sqrt();
                    if &v * &v != q {
                        continue;
                    }
                    let p = ParamSolution::new(eta1, eta2, r1, r2, v, d)
                        .expect("search only emits valid parameters");
                    insert_orbit(&mut orbits, &param_to_solution(&p).expect("valid parameters"));
                }
            }
        }
    }
    orbits.into_values().collect()
}

/// Result of classifying the relevant solutions for one field.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub d: SquarefreeD,
    pub row: TableRow,
    pub orbits: Vec<OrbitClass>,
    /// True when the result is exact up to the family bound `s_max`.
    pub complete: bool,
    pub bounds: SearchBounds,
}

/// Relevant solutions of `λ + μ = 1` in `O_S^*`, one orbit per class.
///
/// For `d ≢ 1 (mod 8)` the residue-class classification is exact; the only
/// finite piece is the family search up to `s_max`. For `d ≡ 1 (mod 8)` the
/// result is a bounded search and `complete` is false.
pub fn classify_relevant_solutions(d: SquarefreeD, bounds: SearchBounds) -> Classification {
    let row = table_row(d);
    let (orbits, complete) = match row {
        TableRow::OneMod8 => (param_search(d, bounds.r1_max, false), false),
        TableRow::D2 | TableRow::D3 | TableRow::D5 | TableRow::D6 => {
            let mut orbits = BTreeMap::new();
            for s in table_one_entries(d).expect("exceptional field") {
                insert_orbit(&mut orbits, &s);
            }
            let orbits: Vec<OrbitClass> = orbits.into_values().collect();
            debug_assert_eq!(
                orbits.iter().map(|o| &o.param).collect::<Vec<_>>(),
                param_search(d, 5, true).iter().map(|o| &o.param).collect::<Vec<_>>()
            );
            (orbits, true)
        }
        _ => {
            // Small exponents first, then the residue-class family.
            let mut orbits: BTreeMap<ParamSolution, OrbitClass> = param_search(d, 5, true)
                .into_iter()
                .map(|o| (o.param.clone(), o))
                .collect();
            if let Some(family) = row.family() {
                for (s, w) in solve_exponential_family(family, d, bounds.s_max) {
                    insert_orbit(&mut orbits, &family.solution(d, s, &w));
                }
            }
            (orbits.into_values().collect(), true)
        }
    };
    Classification {
        d,
        row,
        orbits,
        complete,
        bounds,
    }
}
