//! Closed-form Betti tables for the preset families that have one.

use super::{choose, punctured_euclidean_formula, Graded};
use crate::lie::Variant;
use crate::model::PresetSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Golden {
    pub source: &'static str,
    pub table: Graded,
}

fn table(entries: &[(usize, usize)]) -> Graded {
    entries.iter().copied().filter(|&(_, b)| b > 0).collect()
}

/// `R^n`: one class in degree 0, plus one in degree `n-1` for even `n`
/// once `k >= 2`.
pub fn euclidean_formula(n: usize, k: usize) -> Graded {
    if k >= 2 && n % 2 == 0 {
        table(&[(0, 1), (n - 1, 1)])
    } else {
        table(&[(0, 1)])
    }
}

/// Torus minus a point. Below `k` the count depends on the parity of the
/// degree; at `k` on the parity of `k`.
pub fn punctured_torus_formula(k: usize) -> Graded {
    let mut out = Graded::new();
    for d in 0..k {
        let dim = if d % 2 == 1 { (3 * d - 1) / 2 + 1 } else { 3 * d / 2 + 1 };
        out.insert(d, dim);
    }
    out.insert(k, if k % 2 == 1 { k + 1 } else { k / 2 + 1 });
    out
}

fn nh_count(h: usize, l: i64) -> usize {
    if l < 0 {
        0
    } else {
        choose(l + h as i64 - 2, h as i64 - 2) as usize
    }
}

/// Connected sum of `h` projective planes, untwisted. Splitting off the
/// `h-1` polynomial generators of degree 2 leaves copies of `B_j(RP^2)`,
/// which gives `N(d) + N(d-3)` for `d <= k` and `N(k-2)` at `d = k+1`, with
/// `N(l) = C(l+h-2, h-2)`.
pub fn nh_formula(h: usize, k: usize) -> Graded {
    let mut out = Graded::new();
    for d in 0..=k {
        let dim = nh_count(h, d as i64) + nh_count(h, d as i64 - 3);
        out.insert(d, dim);
    }
    out.insert(k + 1, nh_count(h, k as i64 - 2));
    out.retain(|_, b| *b > 0);
    out
}

/// The usual closed form read literally: `C(h+*-2, h-2)` for
/// `* ∈ {0, 1, 2, k+1}` and the two-term sum for `3 <= * <= k`. It
/// overcounts at `* = k+1` once `h >= 3`; kept to demonstrate that.
pub fn nh_literal_formula(h: usize, k: usize) -> Graded {
    let mut out = Graded::new();
    for d in [0, 1, 2, k + 1] {
        out.insert(d, nh_count(h, d as i64));
    }
    for d in 3..=k {
        out.insert(d, nh_count(h, d as i64) + nh_count(h, d as i64 - 3));
    }
    out.retain(|_, b| *b > 0);
    out
}

/// Klein bottle with orientation-twisted coefficients.
pub fn klein_twisted_formula(k: usize) -> Graded {
    match k {
        0 => table(&[(0, 1)]),
        k if k % 2 == 1 => table(&[(k, 1), (k + 1, 1)]),
        _ => Graded::new(),
    }
}

/// `RP^n`, `n` even.
pub fn rp_even_formula(n: usize, k: usize, twisted: bool) -> Graded {
    match (twisted, k) {
        (_, 0) => table(&[(0, 1)]),
        (false, 1) => table(&[(0, 1)]),
        (false, _) => table(&[(0, 1), (2 * n - 1, 1)]),
        (true, 1) => table(&[(n, 1)]),
        (true, _) => Graded::new(),
    }
}

/// Closed Möbius band relative to its boundary, untwisted, `k >= 1`.
pub fn moebius_relative_formula(k: usize) -> Graded {
    if k % 2 == 0 {
        table(&[(k, 1), (k + 1, 1)])
    } else {
        Graded::new()
    }
}

/// Open Möbius band.
pub fn moebius_open_formula(k: usize, twisted: bool) -> Graded {
    match (twisted, k) {
        (_, 0) => table(&[(0, 1)]),
        (false, _) => table(&[(0, 1), (1, 1)]),
        (true, _) => Graded::new(),
    }
}

/// The closed form for `spec` under `variant` at weight `k`, if one is known.
pub fn golden_table(spec: &PresetSpec, variant: Variant, k: usize) -> Option<Golden> {
    let param = |key: &str| spec.params.get(key).map(|&v| v as usize);
    let (source, table) = match (spec.name.as_str(), variant) {
        ("euclidean", Variant::Standard) => ("euclidean", euclidean_formula(param("n")?, k)),
        ("punctured-euclidean", Variant::Standard) => (
            "punctured-euclidean",
            punctured_euclidean_formula(param("n")?, param("m")?, k),
        ),
        ("punctured-torus", Variant::Standard) => ("punctured-torus", punctured_torus_formula(k)),
        ("nonorientable-surface", Variant::Standard) => ("nonorientable-surface", nh_formula(param("h")?, k)),
        ("klein-bottle", Variant::Standard) => ("nonorientable-surface", nh_formula(2, k)),
        ("klein-bottle", Variant::TwistedEven) => ("klein-twisted", klein_twisted_formula(k)),
        ("rp-even", Variant::Standard) => ("rp-even", rp_even_formula(param("n")?, k, false)),
        ("rp-even", Variant::TwistedEven) => ("rp-even-twisted", rp_even_formula(param("n")?, k, true)),
        // Relative tables are reduced, so weight 0 has no closed form here.
        ("moebius-closed", Variant::Relative) if k >= 1 => ("moebius-relative", moebius_relative_formula(k)),
        ("moebius-closed", Variant::TwistedEven) if k >= 1 => ("moebius-relative-twisted", klein_twisted_formula(k)),
        ("moebius-open", Variant::Standard) => ("moebius-open", moebius_open_formula(k, false)),
        ("moebius-open", Variant::TwistedEven) => ("moebius-open-twisted", moebius_open_formula(k, true)),
        _ => return None,
    };
    Some(Golden { source, table })
}
