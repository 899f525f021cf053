//! Cap product with the unit, `∂/∂p : C(k+1) -> C(k)`, and verification of
//! the stable ranges it induces on homology.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::ce::{homology_basis, CeEngine, CeError, WeightSlice};
use crate::lie::{LieModel, Variant};
use crate::linalg::{
    induced_map_on_quotients, rank_with, LinalgError, Rational, SparseMatrix,
};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StabilityError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Ce(#[from] CeError),
    #[error("cap map is not a chain map from weight {} to weight {k} in CE degree {degree}", k + 1)]
    NotAChainMap { k: usize, degree: usize },
    #[error("induced map at weight {k}, degree {degree}: {source}")]
    Linalg {
        k: usize,
        degree: usize,
        source: LinalgError,
    },
}

fn point_class(lm: &LieModel) -> Result<usize, StabilityError> {
    lm.p_generator.ok_or_else(|| {
        StabilityError::Precondition(
            "no point class: the model is disconnected or the variant has no twisted top class".into(),
        )
    })
}

/// The cap map in one CE degree `d`: a `dim_k(d) x dim_{k+1}(d)` matrix
/// sending `p^r y` to `r p^{r-1} y`.
fn cap_in_degree(lm: &LieModel, p: usize, src: &WeightSlice, dst: &WeightSlice, d: usize) -> SparseMatrix {
    let triplets = src.basis(d).iter().enumerate().filter_map(|(c, m)| {
        let r = m.exponent(p);
        if r == 0 {
            return None;
        }
        let target = m.without(p, lm).expect("p divides m");
        let row = dst.index_of(&target).expect("p has weight 1 and degree 0");
        Some((row, c, Rational::from_integer(BigInt::from(r))))
    });
    SparseMatrix::new(dst.dim(d), src.dim(d), triplets).expect("indices come from the bases")
}

fn top(a: &WeightSlice, b: &WeightSlice) -> usize {
    a.max_degree().max(b.max_degree()).map_or(0, |m| m + 1)
}

/// `λ ⌢ -` from weight `k+1` to weight `k`, one matrix per CE degree
/// `0..=max`, checked to commute with the differentials.
pub fn cap_map(engine: &CeEngine, k: usize) -> Result<Vec<SparseMatrix>, StabilityError> {
    let lm = engine.lie_model();
    let p = point_class(lm)?;
    let src = engine.slice(k + 1)?;
    let dst = engine.slice(k)?;
    let maps: Vec<SparseMatrix> = (0..top(&src, &dst))
        .map(|d| cap_in_degree(lm, p, &src, &dst, d))
        .collect();
    for d in 1..maps.len() {
        let left = maps[d - 1].mul(&src.differential(d)).expect("shapes agree");
        let right = dst.differential(d).mul(&maps[d]).expect("shapes agree");
        if left != right {
            return Err(StabilityError::NotAChainMap { k, degree: d });
        }
    }
    Ok(maps)
}

/// Whether the chain-level cap map onto weight `k` is onto in every degree.
pub fn check_surjectivity(engine: &CeEngine, k: usize) -> Result<bool, StabilityError> {
    let maps = cap_map(engine, k)?;
    let exec = engine.exec();
    Ok(maps.iter().all(|m| rank_with(m, exec) == m.rows()))
}

/// Which clause of the stability theorem applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictedRange {
    /// Iso for `d < k`, onto for `d = k`.
    OrientableSurface,
    /// Iso for `d <= k`, onto for `d = k + 1`.
    General,
}

impl PredictedRange {
    /// Last degree required to be an isomorphism (`None`: no degree) and
    /// the degree required to be onto.
    pub fn bounds(self, k: usize) -> (Option<usize>, usize) {
        match self {
            PredictedRange::OrientableSurface => (k.checked_sub(1), k),
            PredictedRange::General => (Some(k), k + 1),
        }
    }
}

impl fmt::Display for PredictedRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PredictedRange::OrientableSurface => "orientable surface: iso for * < k, onto for * = k",
            PredictedRange::General => "iso for * <= k, onto for * = k+1",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Iso,
    Surjective,
    Unconstrained,
}

/// The induced map `H_d(B_{k+1}) -> H_d(B_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeVerdict {
    pub k: usize,
    pub degree: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub dims_equal: bool,
    pub induced_map_iso: bool,
    pub induced_map_surjective: bool,
    pub expected: Expectation,
}

impl DegreeVerdict {
    pub fn meets_expectation(&self) -> bool {
        match self.expected {
            Expectation::Iso => self.induced_map_iso,
            Expectation::Surjective => self.induced_map_surjective,
            Expectation::Unconstrained => true,
        }
    }
}

/// A stable range derived from the degrees of the generators other than
/// `p`: the kernel of `∂/∂p` (the `p`-free monomials of weight `k+1`) is
/// zero below CE degree `ceil(slope (k+1))`, so the induced map is an
/// isomorphism below that degree and onto at it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImprovedRange {
    /// `slope = num / den`; `None` when `p` is the only generator.
    pub slope: Option<(i64, i64)>,
    /// Some tested `k >= 1` whose bound exceeds the theorem's.
    pub improves: bool,
    pub holds: bool,
    pub first_violation: Option<(usize, usize)>,
}

impl ImprovedRange {
    /// `ceil(slope (k+1))`; `None` means every degree.
    pub fn kernel_floor(&self, k: usize) -> Option<usize> {
        self.slope.map(|(num, den)| {
            let total = num * (k as i64 + 1);
            Integer::div_ceil(&total, &den) as usize
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub k_range: Vec<usize>,
    pub predicted: PredictedRange,
    pub entries: Vec<DegreeVerdict>,
    pub verdict: Verdict,
    pub counterexample: Option<DegreeVerdict>,
    /// `(k, degree)` at the onto-only degree where the map is not an
    /// isomorphism: the iso range cannot be extended there.
    pub sharp_at: Vec<(usize, usize)>,
    pub chain_level_surjective: bool,
    pub improved: ImprovedRange,
}

fn slope(lm: &LieModel, p: usize) -> Option<(i64, i64)> {
    let mut best: Option<Rational> = None;
    for g in lm.generators().filter(|g| g.id != p) {
        let value = Rational::new(BigInt::from(g.ce_degree), BigInt::from(g.weight));
        if best.as_ref().map_or(true, |b| value < *b) {
            best = Some(value);
        }
    }
    best.map(|b| {
        (
            b.numer().to_i64().expect("small degrees"),
            b.denom().to_i64().expect("small weights"),
        )
    })
}

fn verdicts_for(engine: &CeEngine, k: usize, range: PredictedRange) -> Result<(Vec<DegreeVerdict>, bool), StabilityError> {
    let exec = engine.exec();
    let maps = cap_map(engine, k)?;
    let surjective = maps.iter().all(|m| rank_with(m, exec) == m.rows());
    let src = engine.slice(k + 1)?;
    let dst = engine.slice(k)?;
    let (iso_through, onto_at) = range.bounds(k);
    let mut out = Vec::with_capacity(maps.len());
    for (d, f) in maps.iter().enumerate() {
        let (z_src, b_src) = homology_basis(&src, d, exec);
        let (z_dst, b_dst) = homology_basis(&dst, d, exec);
        let induced = induced_map_on_quotients(f, &z_src, &b_src, &z_dst, &b_dst).map_err(|source| {
            StabilityError::Linalg {
                k,
                degree: d,
                source,
            }
        })?;
        let rank = rank_with(&induced, exec);
        let source_dim = z_src.len() - b_src.len();
        let target_dim = z_dst.len() - b_dst.len();
        let expected = if iso_through.is_some_and(|t| d <= t) {
            Expectation::Iso
        } else if d == onto_at {
            Expectation::Surjective
        } else {
            Expectation::Unconstrained
        };
        out.push(DegreeVerdict {
            k,
            degree: d,
            source_dim,
            target_dim,
            rank,
            dims_equal: source_dim == target_dim,
            induced_map_iso: rank == source_dim && rank == target_dim,
            induced_map_surjective: rank == target_dim,
            expected,
        });
    }
    Ok((out, surjective))
}

/// Checks the stable range for `H_*(B_{k+1}) -> H_*(B_k)`, `k = 0..=k_max`.
pub fn verify_stability(engine: &CeEngine, k_max: usize) -> Result<StabilityReport, StabilityError> {
    let lm = engine.lie_model();
    if lm.variant != Variant::Standard {
        return Err(StabilityError::Precondition(format!(
            "stability is stated for the standard variant, not {}",
            lm.variant
        )));
    }
    if !lm.connected {
        return Err(StabilityError::Precondition("the manifold must be connected".into()));
    }
    if lm.n < 2 {
        return Err(StabilityError::Precondition(format!("need n > 1, got n = {}", lm.n)));
    }
    let p = point_class(lm)?;
    let predicted = if lm.orientable_surface {
        PredictedRange::OrientableSurface
    } else {
        PredictedRange::General
    };
    let ks: Vec<usize> = (0..=k_max).collect();
    let per_k = engine.exec().try_map(&ks, |&k| verdicts_for(engine, k, predicted))?;

    let mut improved = ImprovedRange {
        slope: slope(lm, p),
        improves: false,
        holds: true,
        first_violation: None,
    };
    let mut entries = Vec::new();
    let mut chain_level_surjective = true;
    for (k, (verdicts, surjective)) in ks.iter().zip(per_k) {
        chain_level_surjective &= surjective;
        let floor = improved.kernel_floor(*k);
        let (iso_through, _) = predicted.bounds(*k);
        // The theorem gives iso for d < bound.
        let bound = iso_through.map_or(0, |t| t + 1);
        if *k > 0 && floor.map_or(true, |f| f > bound) {
            improved.improves = true;
        }
        for v in &verdicts {
            let ok = match floor {
                None => v.induced_map_iso,
                Some(f) if v.degree < f => v.induced_map_iso,
                Some(f) if v.degree == f => v.induced_map_surjective,
                Some(_) => true,
            };
            if !ok && improved.holds {
                improved.holds = false;
                improved.first_violation = Some((*k, v.degree));
            }
        }
        entries.extend(verdicts);
    }
    let counterexample = entries.iter().find(|v| !v.meets_expectation()).cloned();
    let sharp_at = entries
        .iter()
        .filter(|v| v.expected == Expectation::Surjective && !v.induced_map_iso)
        .map(|v| (v.k, v.degree))
        .collect();
    Ok(StabilityReport {
        k_range: ks,
        predicted,
        verdict: if counterexample.is_none() && chain_level_surjective {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        counterexample,
        entries,
        sharp_at,
        chain_level_surjective,
        improved,
    })
}

impl StabilityReport {
    /// The verdict for `(k, degree)`, if that degree has chains.
    pub fn entry(&self, k: usize, degree: usize) -> Option<&DegreeVerdict> {
        self.entries.iter().find(|v| v.k == k && v.degree == degree)
    }
}
