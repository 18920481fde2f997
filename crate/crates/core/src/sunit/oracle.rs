//! Exhaustive search for integral S-unit solutions by coordinate height.
//! Independent of the parametrisation; used to cross-check the classifier.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{canonical_param, ParamSolution, SUnitSolution};
use crate::quadfield::{QuadElement, SquarefreeD};

fn isqrt_exact(n: u128) -> Option<u128> {
    // Quadratic residues modulo 64 filter out most non-squares.
    const QR64: u64 = {
        let mut mask = 0u64;
        let mut i = 0;
        while i < 64 {
            mask |= 1 << ((i * i) % 64);
            i += 1;
        }
        mask
    };
    if (QR64 >> (n % 64)) & 1 == 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

fn is_pow2(n: i128) -> bool {
    n != 0 && n.unsigned_abs().is_power_of_two()
}

/// `(x, y)` with `λ = (x + y√d)/2` for one `y >= 0`.
fn solutions_at(d: u64, y: u64, height: u64) -> Vec<(i64, i64)> {
    let d_mod4 = d % 4;
    let h2 = (height as u128) * (height as u128);
    let base = d as u128 * y as u128 * y as u128;
    let mut xs = BTreeSet::new();
    // 4·N(λ) = x² − d·y² = ±4·2^a
    for a in 0u32.. {
        let t = 4u128 << a;
        let mut progressed = false;
        if base + t <= h2 {
            progressed = true;
            if let Some(x) = isqrt_exact(base + t) {
                xs.insert(x as i64);
                xs.insert(-(x as i64));
            }
        }
        if t <= base {
            progressed = true;
            if let Some(x) = isqrt_exact(base - t) {
                if x as u128 <= height as u128 {
                    xs.insert(x as i64);
                    xs.insert(-(x as i64));
                }
            }
        }
        if !progressed {
            break;
        }
    }
    let mut out = Vec::new();
    for x in xs {
        let integral = (x % 2 == 0 && y % 2 == 0)
            || (d_mod4 == 1 && x.rem_euclid(2) == 1 && y % 2 == 1);
        if !integral {
            continue;
        }
        let mx = 2 - x as i128;
        let n_mu = mx * mx - d as i128 * (y as i128) * (y as i128);
        if n_mu % 4 != 0 || !is_pow2(n_mu / 4) {
            continue;
        }
        out.push((x, y as i64));
        if y != 0 {
            out.push((x, -(y as i64)));
        }
    }
    out
}

/// Every solution with `λ = (x + y√d)/2 ∈ O_K` and `|x|, |y| <= height`,
/// including the integral irrelevant ones `(2, −1)` and `(−1, 2)`.
pub fn brute_force_sunit(d: SquarefreeD, height: u64) -> Vec<SUnitSolution> {
    assert!(
        (d.get() as f64) * (height as f64).powi(2) < 2f64.powi(100),
        "search box too large"
    );
    let coords: Vec<(i64, i64)> = (0..=height)
        .into_par_iter()
        .flat_map_iter(|y| solutions_at(d.get(), y, height))
        .collect();
    let mut sols: Vec<SUnitSolution> = coords
        .into_iter()
        .map(|(x, y)| {
            let l = QuadElement::new(x, y, d, true).expect("integrality checked");
            SUnitSolution::new(l).expect("norms checked")
        })
        .collect();
    sols.sort();
    sols
}

/// Canonical parameters of the distinct relevant orbits among `sols`.
pub fn orbit_params(sols: &[SUnitSolution]) -> BTreeSet<ParamSolution> {
    sols.iter()
        .filter(|s| s.relevant())
        .map(|s| canonical_param(s).expect("relevant"))
        .collect()
}
