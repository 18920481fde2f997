//! The valuation criterion at the primes above 2.
//!
//! Asymptotic FLT over `Q(√d)` follows once every S-unit solution satisfies
//!
//! * (A): some `P ∈ T` has `max(|ord_P λ|, |ord_P μ|) ≤ 4·ord_P(2)`, or
//! * (B): some `P ∈ U` meets the same bound and `ord_P(λμ) ≡ ord_P(2) (mod 3)`,
//!
//! with the Eichler–Shimura assumption needed only when `T = ∅`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::factor::factor;
use crate::quadfield::{splitting_of_two, valuation_above_2, PrimeAbove2, PrimeLabel, SplittingData, SquarefreeD};
use crate::sunit::{
    classify_relevant_solutions, irrelevant_solution, s3_orbit, Classification, OrbitClass, ParamSolution,
    SUnitSolution, SearchBounds, TableRow,
};

/// Valuations of one solution at one prime above 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeValuations {
    pub prime: PrimeLabel,
    pub ord_2: u32,
    pub ord_lambda: i64,
    pub ord_mu: i64,
    pub ord_lambda_mu: i64,
}

impl PrimeValuations {
    fn within_bound(&self) -> bool {
        self.ord_lambda.abs().max(self.ord_mu.abs()) <= 4 * self.ord_2 as i64
    }

    fn congruence(&self) -> bool {
        (self.ord_lambda_mu - self.ord_2 as i64).rem_euclid(3) == 0
    }
}

pub fn prime_valuations(sol: &SUnitSolution, p: &PrimeAbove2, splitting: &SplittingData) -> PrimeValuations {
    let ord = |e| valuation_above_2(e, p, splitting).expect("S-units are nonzero elements of the field");
    let ord_lambda = ord(sol.lambda());
    let ord_mu = ord(sol.mu());
    PrimeValuations {
        prime: p.label,
        ord_2: p.ord_of_two,
        ord_lambda,
        ord_mu,
        ord_lambda_mu: ord_lambda + ord_mu,
    }
}

/// Whether a condition holds, and at which prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub witness: Option<PrimeLabel>,
}

impl ConditionCheck {
    fn first(primes: &[PrimeAbove2], mut ok: impl FnMut(&PrimeAbove2) -> bool) -> Self {
        let witness = primes.iter().find(|p| ok(p)).map(|p| p.label);
        ConditionCheck {
            holds: witness.is_some(),
            witness,
        }
    }
}

pub fn check_condition_a(sol: &SUnitSolution, splitting: &SplittingData) -> ConditionCheck {
    ConditionCheck::first(&splitting.t, |p| prime_valuations(sol, p, splitting).within_bound())
}

pub fn check_condition_b(sol: &SUnitSolution, splitting: &SplittingData) -> ConditionCheck {
    ConditionCheck::first(&splitting.u, |p| {
        let v = prime_valuations(sol, p, splitting);
        v.within_bound() && v.congruence()
    })
}

/// Conditions (A) and (B) evaluated on one orbit representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub solution: SUnitSolution,
    /// Canonical parameters; absent for the irrelevant orbit.
    pub param: Option<ParamSolution>,
    pub cond_a: ConditionCheck,
    pub cond_b: ConditionCheck,
    pub valuations: Vec<PrimeValuations>,
}

impl ConditionReport {
    pub fn evaluate(sol: &SUnitSolution, param: Option<ParamSolution>, splitting: &SplittingData) -> Self {
        ConditionReport {
            solution: sol.clone(),
            param,
            cond_a: check_condition_a(sol, splitting),
            cond_b: check_condition_b(sol, splitting),
            valuations: splitting.s.iter().map(|p| prime_valuations(sol, p, splitting)).collect(),
        }
    }

    pub fn for_orbit(orbit: &OrbitClass, splitting: &SplittingData) -> Self {
        Self::evaluate(&orbit.representative, Some(orbit.param.clone()), splitting)
    }

    pub fn passes(&self) -> bool {
        self.cond_a.holds || self.cond_b.holds
    }
}

/// The congruence clauses that settle `d` without looking at solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem1Class {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
    #[serde(rename = "iv")]
    IV,
}

impl fmt::Display for Theorem1Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            Theorem1Class::I => "i",
            Theorem1Class::II => "ii",
            Theorem1Class::III => "iii",
            Theorem1Class::IV => "iv",
        };
        write!(f, "Theorem 1({tag})")
    }
}

fn has_prime_divisor_mod8(d: u64, classes: &[u64]) -> bool {
    factor(d as u128)
        .iter()
        .any(|&(q, _)| classes.contains(&((q % 8) as u64)))
}

pub fn theorem1_class(d: SquarefreeD) -> Option<Theorem1Class> {
    let d = d.get();
    match (d % 8, d % 16) {
        (3, _) => Some(Theorem1Class::I),
        (_, 6) | (_, 10) => Some(Theorem1Class::II),
        (_, 2) if has_prime_divisor_mod8(d, &[5, 7]) => Some(Theorem1Class::III),
        (_, 14) if has_prime_divisor_mod8(d, &[3, 5]) => Some(Theorem1Class::IV),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    HoldsUnconditional,
    #[serde(rename = "holds_under_ES")]
    HoldsUnderEs,
    CriterionFails,
    IncompleteSearch,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::HoldsUnconditional => "holds_unconditional",
            Outcome::HoldsUnderEs => "holds_under_ES",
            Outcome::CriterionFails => "criterion_fails",
            Outcome::IncompleteSearch => "incomplete_search",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    /// Congruence clause matching `d`, if any. The general check still runs.
    pub fast_path: Option<Theorem1Class>,
    /// Clauses that produced the outcome, most specific first.
    pub clauses: Vec<String>,
    /// True when the outcome relies on the Eichler–Shimura conjecture.
    pub es_dependent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub d: SquarefreeD,
    pub outcome: Outcome,
    pub provenance: Provenance,
    pub splitting: SplittingData,
    pub row: TableRow,
    pub irrelevant: ConditionReport,
    pub orbits: Vec<ConditionReport>,
    pub failing_orbits: Vec<ParamSolution>,
    pub complete: bool,
    pub bounds: SearchBounds,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self.outcome, Outcome::HoldsUnconditional | Outcome::HoldsUnderEs)
    }
}

/// Evaluates the criterion on a finished classification.
pub fn verdict_from(classification: &Classification) -> Verdict {
    let d = classification.d;
    let splitting = splitting_of_two(d);

    let irrelevant = ConditionReport::evaluate(&irrelevant_solution(d), None, &splitting);
    assert!(splitting.t.is_empty() || irrelevant.cond_a.holds, "irrelevant orbit fails (A) for d = {d}");
    assert!(splitting.u.is_empty() || irrelevant.cond_b.holds, "irrelevant orbit fails (B) for d = {d}");

    let orbits: Vec<ConditionReport> = classification
        .orbits
        .iter()
        .map(|o| ConditionReport::for_orbit(o, &splitting))
        .collect();
    let failing_orbits: Vec<ParamSolution> = orbits
        .iter()
        .filter(|r| !r.passes())
        .filter_map(|r| r.param.clone())
        .collect();

    let t_empty = splitting.t.is_empty();
    let outcome = if !irrelevant.passes() || !failing_orbits.is_empty() {
        Outcome::CriterionFails
    } else if !classification.complete {
        Outcome::IncompleteSearch
    } else if !t_empty {
        Outcome::HoldsUnconditional
    } else {
        Outcome::HoldsUnderEs
    };

    let fast_path = theorem1_class(d);
    if fast_path.is_some() {
        assert_eq!(outcome, Outcome::HoldsUnconditional, "congruence clause contradicted for d = {d}");
    }
    let mut clauses = Vec::new();
    if let Some(c) = fast_path {
        clauses.push(c.to_string());
    }
    if outcome == Outcome::HoldsUnderEs && d.get() > 5 {
        clauses.push("Theorem 2".to_string());
    }
    clauses.push("Theorem 3 general check".to_string());

    Verdict {
        d,
        outcome,
        provenance: Provenance {
            fast_path,
            clauses,
            es_dependent: t_empty,
        },
        splitting,
        row: classification.row,
        irrelevant,
        orbits,
        failing_orbits,
        complete: classification.complete,
        bounds: classification.bounds,
    }
}

pub fn verdict(d: SquarefreeD, bounds: SearchBounds) -> Verdict {
    verdict_from(&classify_relevant_solutions(d, bounds))
}

/// Verdicts for every squarefree `d` in `lo..=hi`, in order.
pub fn verdicts_in_range(lo: u64, hi: u64, bounds: SearchBounds) -> Vec<Verdict> {
    (lo.max(2)..=hi)
        .into_par_iter()
        .filter_map(|d| SquarefreeD::new(d).ok())
        .map(|d| verdict(d, bounds))
        .collect()
}

/// Whether (A) and (B) give the same answers on all six cross-ratio images
/// and their conjugates.
pub fn conditions_orbit_invariant(sol: &SUnitSolution) -> bool {
    let splitting = splitting_of_two(sol.d());
    let key = |s: &SUnitSolution| {
        (
            check_condition_a(s, &splitting).holds,
            check_condition_b(s, &splitting).holds,
        )
    };
    let base = key(sol);
    s3_orbit(sol)
        .iter()
        .all(|s| key(s) == base && key(&s.conjugate()) == base)
}
