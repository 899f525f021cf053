use std::collections::BTreeMap;

use crate::lie::LieModel;

/// A canonical monomial in `Sym(g[1])`: strictly increasing generator ids,
/// positive exponents, odd generators at most once.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<(usize, u32)>,
    ce_degree: usize,
    weight: usize,
}

impl Monomial {
    /// The empty monomial (weight 0, degree 0).
    pub fn unit() -> Self {
        Self {
            exps: Vec::new(),
            ce_degree: 0,
            weight: 0,
        }
    }

    /// Checks canonical form against `lm`.
    pub fn from_exponents(lm: &LieModel, exps: &[(usize, u32)]) -> Option<Self> {
        let mut m = Self::unit();
        let mut last = None;
        for &(id, e) in exps {
            let g = lm.generator(id)?;
            if e == 0 || (g.is_odd() && e > 1) || last.is_some_and(|l| l >= id) {
                return None;
            }
            last = Some(id);
            m.exps.push((id, e));
            m.ce_degree += e as usize * g.ce_degree;
            m.weight += e as usize * g.weight;
        }
        Some(m)
    }

    pub fn exponents(&self) -> &[(usize, u32)] {
        &self.exps
    }

    pub fn exponent(&self, id: usize) -> u32 {
        self.exps
            .binary_search_by_key(&id, |&(i, _)| i)
            .map_or(0, |pos| self.exps[pos].1)
    }

    pub fn ce_degree(&self) -> usize {
        self.ce_degree
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn is_unit(&self) -> bool {
        self.exps.is_empty()
    }

    /// Removes one factor of `id` (no sign: callers track Koszul signs).
    pub fn without(&self, id: usize, lm: &LieModel) -> Option<Monomial> {
        let pos = self.exps.binary_search_by_key(&id, |&(i, _)| i).ok()?;
        let g = lm.generator(id)?;
        let mut out = self.clone();
        if out.exps[pos].1 == 1 {
            out.exps.remove(pos);
        } else {
            out.exps[pos].1 -= 1;
        }
        out.ce_degree -= g.ce_degree;
        out.weight -= g.weight;
        Some(out)
    }

    /// `x_id · self`, moved into canonical position. Returns the monomial and
    /// whether moving an odd `x_id` past odd factors flipped the sign; `None`
    /// when the product vanishes (`x_id` odd and already present).
    pub fn with(&self, id: usize, lm: &LieModel) -> Option<(Monomial, bool)> {
        let g = lm.generator(id)?;
        let mut out = self.clone();
        out.ce_degree += g.ce_degree;
        out.weight += g.weight;
        let mut negative = false;
        match self.exps.binary_search_by_key(&id, |&(i, _)| i) {
            Ok(pos) => {
                if g.is_odd() {
                    return None;
                }
                out.exps[pos].1 += 1;
            }
            Err(pos) => {
                if g.is_odd() {
                    let passed = self.exps[..pos]
                        .iter()
                        .filter(|(i, _)| lm.generator(*i).is_some_and(|h| h.is_odd()))
                        .count();
                    negative = passed % 2 == 1;
                }
                out.exps.insert(pos, (id, 1));
            }
        }
        Some((out, negative))
    }

    /// `p^2 a b~` style rendering with the source labels; weight-2
    /// generators carry a `~`.
    pub fn display(&self, lm: &LieModel) -> String {
        if self.exps.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|&(id, e)| {
                let g = lm.generator(id).expect("monomial built from this model");
                let tilde = if g.weight == 2 { "~" } else { "" };
                let label = format!("{}{tilde}", g.source.label);
                if e == 1 {
                    label
                } else {
                    format!("{label}^{e}")
                }
            })
            .collect();
        parts.join(" ")
    }
}

/// Number of weight-`k` monomials, saturating.
pub fn count_slice(lm: &LieModel, k: usize) -> u128 {
    let mut counts = vec![0u128; k + 1];
    counts[0] = 1;
    for g in lm.generators() {
        let w = g.weight;
        if w > k {
            continue;
        }
        if g.is_odd() {
            for total in (w..=k).rev() {
                counts[total] = counts[total].saturating_add(counts[total - w]);
            }
        } else {
            for total in w..=k {
                counts[total] = counts[total].saturating_add(counts[total - w]);
            }
        }
    }
    counts[k]
}

/// All weight-`k` monomials grouped by CE degree. Within a degree the order
/// is lexicographically decreasing in the exponent vector `(e_0, e_1, ...)`.
pub fn enumerate_slice_basis(lm: &LieModel, k: usize) -> BTreeMap<usize, Vec<Monomial>> {
    let gens: Vec<(usize, usize, bool)> = lm
        .generators()
        .map(|g| (g.weight, g.ce_degree, g.is_odd()))
        .collect();
    let mut out: BTreeMap<usize, Vec<Monomial>> = BTreeMap::new();
    let mut current = Monomial::unit();
    fill(&gens, 0, k, &mut current, &mut out);
    out
}

fn fill(
    gens: &[(usize, usize, bool)],
    id: usize,
    remaining: usize,
    current: &mut Monomial,
    out: &mut BTreeMap<usize, Vec<Monomial>>,
) {
    if remaining == 0 {
        out.entry(current.ce_degree).or_default().push(current.clone());
        return;
    }
    let Some(&(weight, degree, odd)) = gens.get(id) else {
        return;
    };
    let max = if odd { 1.min(remaining / weight) } else { remaining / weight };
    for e in (0..=max).rev() {
        if e > 0 {
            current.exps.push((id, e as u32));
            current.ce_degree += e * degree;
            current.weight += e * weight;
        }
        fill(gens, id + 1, remaining - e * weight, current, out);
        if e > 0 {
            current.exps.pop();
            current.ce_degree -= e * degree;
            current.weight -= e * weight;
        }
    }
}
