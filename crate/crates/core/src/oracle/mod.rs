//! Brute-force cross-checks for the CE pipeline.
//!
//! Nothing here enumerates monomials or eliminates matrices through the
//! pipeline's code: generator degrees are re-derived from the model, counts
//! come from generating functions or direct exponent enumeration, and the
//! one check that inspects pipeline matrices (`D∘D = 0`) multiplies their
//! entries with its own loop.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::ce::{CeEngine, CeError};
use crate::lie::{build_lie_model, LieError, Variant};
use crate::linalg::{Rational, SparseMatrix};
use crate::model::{CohomologyModel, PresetSpec, Sheaf, TableKind};

mod golden;

pub use golden::{
    golden_table, klein_twisted_formula, moebius_open_formula, moebius_relative_formula, nh_formula,
    nh_literal_formula, punctured_torus_formula, rp_even_formula, euclidean_formula, Golden,
};

/// Degree -> dimension.
pub type Graded = BTreeMap<usize, usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum OracleValue {
    Table(Graded),
    Integer(i64),
}

impl fmt::Display for OracleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleValue::Integer(x) => write!(f, "{x}"),
            OracleValue::Table(t) => {
                let parts: Vec<String> = t.iter().map(|(d, b)| format!("{d}:{b}")).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleOutcome {
    pub name: String,
    pub inputs: String,
    pub pipeline_value: OracleValue,
    pub oracle_value: OracleValue,
    pub agree: bool,
}

impl OracleOutcome {
    fn new(name: &str, inputs: String, pipeline_value: OracleValue, oracle_value: OracleValue) -> Self {
        Self {
            name: name.to_string(),
            inputs,
            agree: pipeline_value == oracle_value,
            pipeline_value,
            oracle_value,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SuiteError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Ce(#[from] CeError),
}

/// `C(top, bottom)`, zero when `top < 0` or `bottom` is outside `0..=top`.
pub fn choose(top: i64, bottom: i64) -> u128 {
    if top < 0 || bottom < 0 || bottom > top {
        return 0;
    }
    let bottom = bottom.min(top - bottom) as u128;
    let top = top as u128;
    (0..bottom).fold(1u128, |acc, i| acc * (top - i) / (i + 1))
}

/// `x (x-1) ... (x-k+1) / k!` for any integer `x`.
pub fn generalized_binomial(x: i64, k: usize) -> i128 {
    let mut num = 1i128;
    let mut den = 1i128;
    for i in 0..k as i128 {
        num *= x as i128 - i;
        den *= i + 1;
    }
    num / den
}

/// Graded dimension of `Sym^k` of a graded vector space: odd degrees are
/// exterior, even degrees polynomial.
pub fn sym_power_oracle(graded_dims: &Graded, k: usize) -> Graded {
    let gens: Vec<usize> = graded_dims
        .iter()
        .flat_map(|(&d, &count)| std::iter::repeat(d).take(count))
        .collect();
    let mut out = Graded::new();
    sym_rec(&gens, k, 0, &mut out);
    out.retain(|_, v| *v > 0);
    out
}

fn sym_rec(gens: &[usize], remaining: usize, degree: usize, out: &mut Graded) {
    let Some((&d, rest)) = gens.split_first() else {
        if remaining == 0 {
            *out.entry(degree).or_default() += 1;
        }
        return;
    };
    let max = if d % 2 == 1 { remaining.min(1) } else { remaining };
    for e in 0..=max {
        sym_rec(rest, remaining - e, degree + e * d, out);
    }
}

/// The closed form for `B_k(R^n minus m points)`, from binomials only.
pub fn punctured_euclidean_formula(n: usize, m: usize, k: usize) -> Graded {
    let (m, step) = (m as i64, n - 1);
    let mut out = Graded::new();
    for i in 0..=k {
        let ii = i as i64;
        let dim = if n % 2 == 1 {
            choose(m + ii - 1, ii)
        } else if i < k {
            choose(m + ii - 1, m - 1) + choose(m + ii - 2, m - 1)
        } else {
            choose(m + ii - 1, m - 1)
        };
        if dim > 0 {
            *out.entry(i * step).or_default() += dim as usize;
        }
    }
    out
}

/// `(weight, raw CE degree)` of each generator, derived from the model's
/// classes for `variant`.
pub fn oracle_generators(model: &CohomologyModel, variant: Variant) -> Vec<(usize, usize)> {
    let n = model.n;
    let (w1, s1, s2) = match variant {
        Variant::Standard | Variant::Relative => (Sheaf::Twisted, n, (n % 2 == 0).then_some(2 * n - 1)),
        Variant::TwistedEven => (Sheaf::Untwisted, n, Some(2 * n - 1)),
        Variant::TwistedOdd => (Sheaf::Untwisted, n + 1, Some(2 * n + 1)),
    };
    let mut out: Vec<(usize, usize)> = model.classes(w1).iter().map(|c| (1, s1 - c.degree)).collect();
    if let Some(s2) = s2 {
        out.extend(model.classes(Sheaf::Untwisted).iter().map(|c| (2, s2 - c.degree)));
    }
    out
}

/// True when the variant's bracket vanishes for structural reasons: no
/// weight-2 generators, or an empty product table.
pub fn oracle_abelian(model: &CohomologyModel, variant: Variant) -> bool {
    match variant {
        Variant::Standard | Variant::Relative => model.n % 2 == 1 || model.table(TableKind::TwistedTwisted).is_empty(),
        Variant::TwistedEven | Variant::TwistedOdd => model.table(TableKind::UntwistedUntwisted).is_empty(),
    }
}

/// Weight-`k` part of the free graded-commutative algebra on `gens`, by raw
/// degree, from its two-variable generating function.
pub fn monomial_count_oracle(gens: &[(usize, usize)], k: usize) -> Graded {
    let max_degree = gens.iter().map(|&(_, d)| d).max().unwrap_or(0) * k;
    // poly[w][d]
    let mut poly = vec![vec![0u128; max_degree + 1]; k + 1];
    poly[0][0] = 1;
    for &(w, d) in gens {
        if w > k {
            continue;
        }
        if d % 2 == 1 {
            for tw in (w..=k).rev() {
                for td in (d..=max_degree).rev() {
                    poly[tw][td] += poly[tw - w][td - d];
                }
            }
        } else {
            for tw in w..=k {
                for td in d..=max_degree {
                    poly[tw][td] += poly[tw - w][td - d];
                }
            }
        }
    }
    poly[k]
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
        .map(|(d, c)| (d, *c as usize))
        .collect()
}

/// `Σ (-1)^d dim C_d` in weight `k`, from `Π (1 - t^w)^{±1}`.
pub fn euler_chain_oracle(gens: &[(usize, usize)], k: usize) -> i64 {
    let mut poly = vec![0i128; k + 1];
    poly[0] = 1;
    for &(w, d) in gens {
        if w > k {
            continue;
        }
        if d % 2 == 1 {
            for t in (w..=k).rev() {
                poly[t] -= poly[t - w];
            }
        } else {
            for t in w..=k {
                poly[t] += poly[t - w];
            }
        }
    }
    poly[k] as i64
}

/// `χ(B_k(M))` from `χ(M)` alone: `C(χ, k)` for even `n`, `C(χ+k-1, k)` for
/// odd `n`. Needs a manifold without boundary and untwisted coefficients.
pub fn euler_binomial_oracle(model: &CohomologyModel, k: usize) -> i64 {
    let chi: i64 = model
        .classes(Sheaf::Twisted)
        .iter()
        .map(|c| if (model.n - c.degree) % 2 == 0 { 1 } else { -1 })
        .sum();
    if model.n % 2 == 0 {
        generalized_binomial(chi, k) as i64
    } else {
        generalized_binomial(chi + k as i64 - 1, k) as i64
    }
}

/// Nonzero entries of `a·b`, multiplied row by row from the raw triplets.
fn product_nonzero(a: &SparseMatrix, b: &SparseMatrix) -> i64 {
    let mut b_rows: BTreeMap<usize, Vec<(usize, &Rational)>> = BTreeMap::new();
    for (r, c, x) in b.triplets() {
        b_rows.entry(r).or_default().push((c, x));
    }
    let mut a_rows: BTreeMap<usize, Vec<(usize, &Rational)>> = BTreeMap::new();
    for (r, c, x) in a.triplets() {
        a_rows.entry(r).or_default().push((c, x));
    }
    let mut count = 0;
    for row in a_rows.values() {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for &(j, x) in row {
            for &(c, y) in b_rows.get(&j).map_or(&[][..], Vec::as_slice) {
                *acc.entry(c).or_insert_with(Rational::zero) += x * y;
            }
        }
        count += acc.values().filter(|v| !v.is_zero()).count() as i64;
    }
    count
}

fn alternating(table: &Graded) -> i64 {
    table
        .iter()
        .map(|(&d, &b)| if d % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum()
}

/// The preset a model was built from, if it still matches that preset.
pub fn identify_preset(model: &CohomologyModel) -> Option<PresetSpec> {
    let spec: PresetSpec = model.name.parse().ok()?;
    (spec.build().ok()? == *model).then_some(spec)
}

/// Every applicable oracle for `model` under `variant`, `k = 0..=k_max`.
pub fn run_oracle_suite(model: &CohomologyModel, variant: Variant, k_max: usize) -> Result<Vec<OracleOutcome>, SuiteError> {
    let engine = CeEngine::new(build_lie_model(model, variant)?);
    run_oracle_suite_with(&engine, model, k_max)
}

/// As [`run_oracle_suite`], reusing an engine (and its cache and cap).
pub fn run_oracle_suite_with(engine: &CeEngine, model: &CohomologyModel, k_max: usize) -> Result<Vec<OracleOutcome>, SuiteError> {
    let variant = engine.lie_model().variant;
    let offset = engine.lie_model().degree_offset_per_weight;
    let gens = oracle_generators(model, variant);
    let abelian = oracle_abelian(model, variant);
    let odd_free = gens.iter().all(|&(w, _)| w == 1);
    let preset = identify_preset(model);
    let ks: Vec<usize> = (0..=k_max).collect();
    let per_k = engine.exec().try_map(&ks, |&k| -> Result<Vec<OracleOutcome>, SuiteError> {
        let inputs = format!("{} {variant} k={k}", model.name);
        let slice = engine.slice(k)?;
        let raw = engine.betti_raw(k)?;
        let reported: Graded = raw.iter().map(|(&d, &b)| (d - k * offset, b)).collect();
        let mut out = Vec::new();

        let top = slice.max_degree().map_or(0, |m| m + 1);
        let nonzero = (1..top)
            .map(|d| product_nonzero(&slice.differential(d), &slice.differential(d + 1)))
            .sum();
        out.push(OracleOutcome::new(
            "d-squared",
            inputs.clone(),
            OracleValue::Integer(nonzero),
            OracleValue::Integer(0),
        ));
        out.push(OracleOutcome::new(
            "euler-chains",
            inputs.clone(),
            OracleValue::Integer(alternating(&raw)),
            OracleValue::Integer(euler_chain_oracle(&gens, k)),
        ));
        if variant == Variant::Standard && !model.boundary {
            out.push(OracleOutcome::new(
                "euler-binomial",
                inputs.clone(),
                OracleValue::Integer(alternating(&raw)),
                OracleValue::Integer(euler_binomial_oracle(model, k)),
            ));
        }
        if abelian {
            out.push(OracleOutcome::new(
                "monomial-count",
                inputs.clone(),
                OracleValue::Table(raw.clone()),
                OracleValue::Table(monomial_count_oracle(&gens, k)),
            ));
        }
        if odd_free {
            // Only weight-1 generators: H_* of the space (shifted down by the
            // per-weight offset) and its symmetric powers.
            let mut homology = Graded::new();
            for &(_, d) in &gens {
                *homology.entry(d - offset).or_default() += 1;
            }
            out.push(OracleOutcome::new(
                "sym-power",
                inputs.clone(),
                OracleValue::Table(reported.clone()),
                OracleValue::Table(sym_power_oracle(&homology, k)),
            ));
        }
        if let Some(golden) = preset.as_ref().and_then(|spec| golden_table(spec, variant, k)) {
            out.push(OracleOutcome::new(
                &format!("golden:{}", golden.source),
                inputs,
                OracleValue::Table(reported),
                OracleValue::Table(golden.table),
            ));
        }
        Ok(out)
    })?;
    Ok(per_k.into_iter().flatten().collect())
}
