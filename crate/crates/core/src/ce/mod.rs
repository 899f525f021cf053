//! Weight slices of the Chevalley-Eilenberg complex `Sym(g[1])`.

mod monomial;

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::exec::Exec;
use crate::lie::{bracket_eval, LieModel, Variant};
use crate::linalg::{
    column_space_basis_with, kernel_basis_with, rank_with, Rational, SparseMatrix, SpanReducer,
    SubspaceBasis,
};

pub use monomial::{count_slice, enumerate_slice_basis, Monomial};

/// Largest slice (total number of monomials) the engine will build.
pub const MAX_SLICE_DIM: usize = 1_000_000;

/// Default upper end of `k` sweeps.
pub const DEFAULT_K_MAX: usize = 12;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CeError {
    #[error("weight-{k} slice has {size} monomials, above the cap of {cap}")]
    SliceTooLarge { k: usize, size: u128, cap: usize },
    #[error("D^2 != 0 at weight {k}, CE degree {degree}, on the monomial {monomial}")]
    DSquaredNonzero {
        k: usize,
        degree: usize,
        monomial: String,
    },
    #[error("Euler characteristic mismatch at weight {k}: chains {chains}, homology {homology}")]
    EulerMismatch { k: usize, chains: i64, homology: i64 },
}

/// One weight of the CE complex: monomial bases per CE degree and the
/// differentials `D_d : C_d -> C_{d-1}`.
#[derive(Debug)]
pub struct WeightSlice {
    k: usize,
    bases: Vec<Vec<Monomial>>,
    index: Vec<HashMap<Monomial, usize>>,
    differentials: Vec<SparseMatrix>,
    ranks: OnceLock<Vec<usize>>,
}

impl WeightSlice {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Largest CE degree with chains (`None` for an empty slice).
    pub fn max_degree(&self) -> Option<usize> {
        self.bases.len().checked_sub(1)
    }

    pub fn basis(&self, d: usize) -> &[Monomial] {
        self.bases.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn dim(&self, d: usize) -> usize {
        self.basis(d).len()
    }

    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(Vec::len).sum()
    }

    /// Position of `m` in the degree-`m.ce_degree()` basis.
    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m.ce_degree())?.get(m).copied()
    }

    /// `D_d`, a `dim(d-1) x dim(d)` matrix (all shapes exist, most are empty).
    pub fn differential(&self, d: usize) -> Cow<'_, SparseMatrix> {
        match self.differentials.get(d) {
            Some(m) if d >= 1 => Cow::Borrowed(m),
            _ => Cow::Owned(SparseMatrix::zeros(
                d.checked_sub(1).map_or(0, |e| self.dim(e)),
                self.dim(d),
            )),
        }
    }

    /// `rank D_d` for `d = 0 ..= max_degree + 1`.
    pub fn ranks(&self, exec: Exec) -> &[usize] {
        self.ranks.get_or_init(|| {
            let top = self.bases.len();
            let degrees: Vec<usize> = (0..=top).collect();
            exec.map(&degrees, |&d| {
                if d == 0 || d >= top {
                    0
                } else {
                    rank_with(&self.differentials[d], exec)
                }
            })
        })
    }

    /// Betti numbers by raw CE degree, zeros omitted.
    pub fn betti_raw(&self, exec: Exec) -> BTreeMap<usize, usize> {
        let ranks = self.ranks(exec);
        (0..self.bases.len())
            .map(|d| (d, self.dim(d) - ranks[d] - ranks[d + 1]))
            .filter(|(_, b)| *b > 0)
            .collect()
    }
}

/// The coderivation extension of `D(σx σy) = (-1)^{|x|} σ[x,y]` applied to
/// one monomial.
fn differential_terms(lm: &LieModel, m: &Monomial) -> Vec<(Monomial, Rational)> {
    let exps = m.exponents();
    let w1 = lm.weight1.len();
    let odd = |id: usize| lm.generator(id).expect("id in range").is_odd();
    // odd_before[a] = number of odd factors strictly before position a.
    let mut odd_before = Vec::with_capacity(exps.len());
    let mut count = 0usize;
    for &(id, e) in exps {
        odd_before.push(count);
        if odd(id) {
            count += e as usize;
        }
    }
    let mut out = Vec::new();
    for a in 0..exps.len() {
        let (i, ei) = exps[a];
        if i >= w1 {
            break;
        }
        for b in a..exps.len() {
            let (j, ej) = exps[b];
            if j >= w1 {
                break;
            }
            let multiplicity = if a == b {
                if ei < 2 {
                    continue;
                }
                (ei as u64) * (ei as u64 - 1) / 2
            } else {
                ei as u64 * ej as u64
            };
            let bracket = bracket_eval(lm, i, j).expect("weight-1 ids");
            if bracket.is_empty() {
                continue;
            }
            let mut negative = false;
            if odd(i) {
                negative ^= odd_before[a] % 2 == 1;
            }
            if odd(j) && a != b {
                let before = odd_before[b] - usize::from(odd(i));
                negative ^= before % 2 == 1;
            }
            // (-1)^{|x_i|}, Lie degree = CE degree - 1.
            negative ^= !odd(i);
            let rest = m
                .without(i, lm)
                .and_then(|r| r.without(j, lm))
                .expect("factors present");
            let base = Rational::from_integer(multiplicity.into());
            for (&k, c) in &bracket {
                let Some((target, insert_negative)) = rest.with(k, lm) else {
                    continue;
                };
                let mut coeff = &base * c;
                if negative ^ insert_negative {
                    coeff = -coeff;
                }
                out.push((target, coeff));
            }
        }
    }
    out
}

/// Builds the weight-`k` slice: the monomial bases and every differential,
/// checking `D^2 = 0`.
pub fn assemble_differential(
    lm: &LieModel,
    k: usize,
    basis: BTreeMap<usize, Vec<Monomial>>,
    exec: Exec,
) -> Result<WeightSlice, CeError> {
    let top = basis.keys().next_back().map_or(0, |d| d + 1);
    let mut bases = vec![Vec::new(); top];
    for (d, list) in basis {
        bases[d] = list;
    }
    let index: Vec<HashMap<Monomial, usize>> = bases
        .iter()
        .map(|list| list.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect())
        .collect();
    let mut differentials = vec![SparseMatrix::zeros(0, bases.first().map_or(0, Vec::len))];
    for d in 1..top {
        let columns = exec.map(&bases[d], |m| differential_terms(lm, m));
        let triplets = columns.into_iter().enumerate().flat_map(|(c, terms)| {
            let index = &index[d - 1];
            terms.into_iter().map(move |(t, x)| {
                let r = *index.get(&t).expect("D lowers the CE degree by one and keeps weight");
                (r, c, x)
            })
        });
        let m = SparseMatrix::new(bases[d - 1].len(), bases[d].len(), triplets)
            .expect("indices come from the bases");
        differentials.push(m);
    }
    let slice = WeightSlice {
        k,
        bases,
        index,
        differentials,
        ranks: OnceLock::new(),
    };
    let degrees: Vec<usize> = (2..top).collect();
    let failures = exec.map(&degrees, |&d| {
        let product = slice.differentials[d - 1]
            .mul(&slice.differentials[d])
            .expect("consecutive differentials compose");
        (0..product.cols()).find(|&c| !product.column(c).is_zero()).map(|c| (d, c))
    });
    if let Some((d, c)) = failures.into_iter().flatten().next() {
        return Err(CeError::DSquaredNonzero {
            k,
            degree: d,
            monomial: slice.bases[d][c].display(lm),
        });
    }
    Ok(slice)
}

/// Cycles and boundaries in CE degree `d`; the cycle basis starts with the
/// boundary basis.
pub fn homology_basis(slice: &WeightSlice, d: usize, exec: Exec) -> (SubspaceBasis, SubspaceBasis) {
    let boundaries = column_space_basis_with(&slice.differential(d + 1), exec);
    let kernel = kernel_basis_with(&slice.differential(d), exec);
    let mut reducer = SpanReducer::new();
    let mut cycles = Vec::with_capacity(kernel.len());
    for v in boundaries.vectors() {
        reducer.insert(v, None);
        cycles.push(v.clone());
    }
    for v in kernel.vectors() {
        if cycles.len() == kernel.len() {
            break;
        }
        if reducer.insert(v, None) {
            cycles.push(v.clone());
        }
    }
    (SubspaceBasis::new_unchecked(slice.dim(d), cycles), boundaries)
}

/// Betti numbers across several weights, keyed by reported degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub variant: Variant,
    pub degree_offset_per_weight: usize,
    /// `k -> raw CE degree -> b`, zeros omitted.
    raw: BTreeMap<usize, BTreeMap<usize, usize>>,
}

impl BettiTable {
    pub fn new(variant: Variant, degree_offset_per_weight: usize) -> Self {
        Self {
            variant,
            degree_offset_per_weight,
            raw: BTreeMap::new(),
        }
    }

    pub fn insert_raw(&mut self, k: usize, row: BTreeMap<usize, usize>) {
        self.raw.insert(k, row.into_iter().filter(|(_, b)| *b > 0).collect());
    }

    pub fn weights(&self) -> impl Iterator<Item = usize> + '_ {
        self.raw.keys().copied()
    }

    pub fn raw(&self, k: usize) -> Option<&BTreeMap<usize, usize>> {
        self.raw.get(&k)
    }

    /// Row `k` in configuration-space degrees.
    pub fn reported(&self, k: usize) -> Option<BTreeMap<usize, usize>> {
        let shift = k * self.degree_offset_per_weight;
        self.raw
            .get(&k)
            .map(|row| row.iter().map(|(d, b)| (d - shift, *b)).collect())
    }

    pub fn get(&self, k: usize, degree: usize) -> usize {
        self.reported(k)
            .and_then(|row| row.get(&degree).copied())
            .unwrap_or(0)
    }

    /// `(k, reported degree, b)` in ascending order, zeros omitted.
    pub fn entries(&self) -> Vec<(usize, usize, usize)> {
        self.raw
            .keys()
            .flat_map(|&k| {
                self.reported(k)
                    .unwrap_or_default()
                    .into_iter()
                    .map(move |(d, b)| (k, d, b))
            })
            .collect()
    }
}

/// Builds and caches slices for one Lie model.
#[derive(Debug)]
pub struct CeEngine {
    lm: LieModel,
    exec: Exec,
    max_slice_dim: usize,
    cache: RwLock<HashMap<usize, Arc<WeightSlice>>>,
}

impl CeEngine {
    pub fn new(lm: LieModel) -> Self {
        Self {
            lm,
            exec: Exec::default(),
            max_slice_dim: MAX_SLICE_DIM,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_max_slice_dim(mut self, cap: usize) -> Self {
        self.max_slice_dim = cap;
        self
    }

    pub fn lie_model(&self) -> &LieModel {
        &self.lm
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    /// The weight-`k` slice, built on first use.
    pub fn slice(&self, k: usize) -> Result<Arc<WeightSlice>, CeError> {
        if let Some(s) = self.cache.read().expect("cache lock").get(&k) {
            return Ok(Arc::clone(s));
        }
        let size = count_slice(&self.lm, k);
        if size > self.max_slice_dim as u128 {
            return Err(CeError::SliceTooLarge {
                k,
                size,
                cap: self.max_slice_dim,
            });
        }
        let basis = enumerate_slice_basis(&self.lm, k);
        let slice = Arc::new(assemble_differential(&self.lm, k, basis, self.exec)?);
        let mut cache = self.cache.write().expect("cache lock");
        Ok(Arc::clone(cache.entry(k).or_insert(slice)))
    }

    /// Betti numbers of weight `k` by raw CE degree.
    pub fn betti_raw(&self, k: usize) -> Result<BTreeMap<usize, usize>, CeError> {
        Ok(self.slice(k)?.betti_raw(self.exec))
    }

    /// Betti numbers of weight `k` by configuration-space degree.
    pub fn betti(&self, k: usize) -> Result<BTreeMap<usize, usize>, CeError> {
        let shift = k * self.lm.degree_offset_per_weight;
        Ok(self
            .betti_raw(k)?
            .into_iter()
            .map(|(d, b)| (d - shift, b))
            .collect())
    }

    /// Rows for every `k` in `ks`, computed concurrently.
    pub fn betti_table(&self, ks: &[usize]) -> Result<BettiTable, CeError> {
        let rows = self.exec.try_map(ks, |&k| self.betti_raw(k))?;
        let mut table = BettiTable::new(self.lm.variant, self.lm.degree_offset_per_weight);
        for (&k, row) in ks.iter().zip(rows) {
            table.insert_raw(k, row);
        }
        Ok(table)
    }

    /// `(Σ (-1)^d dim C_d, Σ (-1)^d b_d)` over raw CE degrees; an error when
    /// they differ.
    pub fn euler_characteristic(&self, k: usize) -> Result<(i64, i64), CeError> {
        let slice = self.slice(k)?;
        let alt = |d: usize, x: usize| if d % 2 == 0 { x as i64 } else { -(x as i64) };
        let chains = (0..slice.bases.len()).map(|d| alt(d, slice.dim(d))).sum();
        let homology = slice.betti_raw(self.exec).into_iter().map(|(d, b)| alt(d, b)).sum();
        if chains != homology {
            return Err(CeError::EulerMismatch {
                k,
                chains,
                homology,
            });
        }
        Ok((chains, homology))
    }
}

/// Betti numbers of `B_k` (reported degrees) without keeping a cache.
pub fn betti(lm: &LieModel, k: usize) -> Result<BTreeMap<usize, usize>, CeError> {
    CeEngine::new(lm.clone()).betti(k)
}

/// Both sides of the Euler characteristic identity for weight `k`.
pub fn euler_characteristic(lm: &LieModel, k: usize) -> Result<(i64, i64), CeError> {
    CeEngine::new(lm.clone()).euler_characteristic(k)
}

#[cfg(test)]
mod tests;
