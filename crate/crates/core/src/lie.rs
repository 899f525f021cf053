//! The weight-graded two-step nilpotent Lie algebra attached to a model.
//!
//! Generators carry their degree in `Sym(g[1])` directly (the CE degree), so
//! the cohomological-to-homological conversion happens once, here.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::Rational;
use crate::model::{ClassRef, CohomologyModel, LinComb, Sheaf, TableKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// `H_*(B_k(M); Q)`.
    Standard,
    /// `H_*(B_k(M); Q^w)` for even `n`.
    TwistedEven,
    /// `H_*(B_k(M); Q^w)` for odd `n`, reported after the `[k]` shift.
    TwistedOdd,
    /// Reduced homology of `B_k(M, ∂M)`.
    Relative,
}

impl Variant {
    /// The twisted variant matching the parity of `n`.
    pub fn twisted_for(n: usize) -> Variant {
        if n % 2 == 0 {
            Variant::TwistedEven
        } else {
            Variant::TwistedOdd
        }
    }

    pub fn is_twisted(self) -> bool {
        matches!(self, Variant::TwistedEven | Variant::TwistedOdd)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Standard => "standard",
            Variant::TwistedEven => "twisted-even",
            Variant::TwistedOdd => "twisted-odd",
            Variant::Relative => "relative",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CeGenerator {
    pub id: usize,
    pub source: ClassRef,
    pub weight: usize,
    pub ce_degree: usize,
}

impl CeGenerator {
    pub fn is_odd(&self) -> bool {
        self.ce_degree % 2 == 1
    }
}

/// Generator ids are global: weight-1 generators come first, then weight 2.
/// The bracket is stored on weight-1 pairs `i <= j` only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieModel {
    pub variant: Variant,
    pub n: usize,
    pub weight1: Vec<CeGenerator>,
    pub weight2: Vec<CeGenerator>,
    pub bracket: BTreeMap<(usize, usize), LinComb>,
    pub p_generator: Option<usize>,
    pub degree_offset_per_weight: usize,
    /// Copied from the model, for stability preconditions and ranges.
    pub connected: bool,
    pub orientable_surface: bool,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LieError {
    #[error("variant {variant} needs n {parity}, got n = {n}")]
    Parity {
        variant: Variant,
        n: usize,
        parity: &'static str,
    },
    #[error("model is invalid: {0}")]
    InvalidModel(String),
    #[error("generator {0} is not a weight-1 generator")]
    NotWeightOne(usize),
    #[error("generator {0} does not exist")]
    UnknownGenerator(usize),
    #[error("{0}")]
    Reshape(String),
}

fn gens(
    model: &CohomologyModel,
    sheaf: Sheaf,
    weight: usize,
    first_id: usize,
    shift: usize,
) -> Vec<CeGenerator> {
    (0..model.classes(sheaf).len())
        .map(|pos| {
            let source = model.class_ref(sheaf, pos).expect("position in range");
            CeGenerator {
                id: first_id + pos,
                ce_degree: shift - source.degree,
                source,
                weight,
            }
        })
        .collect()
}

/// Builds the Lie model of `model` for `variant`.
///
/// The bracket of suspended generators is `[α⊗v, β⊗v] = (-1)^{s_β} (α⌣β)⊗[v,v]`
/// with `s_β` the cohomological degree of `β`; brackets only exist when the
/// shift is odd, which is exactly when the weight-2 part is present.
pub fn build_lie_model(model: &CohomologyModel, variant: Variant) -> Result<LieModel, LieError> {
    let violations = model.validate();
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(LieError::InvalidModel(text.join("; ")));
    }
    let n = model.n;
    let parity = |want_even: bool| {
        if (n % 2 == 0) != want_even {
            Err(LieError::Parity {
                variant,
                n,
                parity: if want_even { "even" } else { "odd" },
            })
        } else {
            Ok(())
        }
    };
    // (weight-1 sheaf, weight-1 shift, weight-2 shift, table, offset)
    let (w1_sheaf, shift1, shift2, table, offset) = match variant {
        Variant::Standard | Variant::Relative => (
            Sheaf::Twisted,
            n,
            (n % 2 == 0).then(|| 2 * n - 1),
            TableKind::TwistedTwisted,
            0,
        ),
        Variant::TwistedEven => {
            parity(true)?;
            (Sheaf::Untwisted, n, Some(2 * n - 1), TableKind::UntwistedUntwisted, 0)
        }
        Variant::TwistedOdd => {
            parity(false)?;
            (Sheaf::Untwisted, n + 1, Some(2 * n + 1), TableKind::UntwistedUntwisted, 1)
        }
    };
    let weight1 = gens(model, w1_sheaf, 1, 0, shift1);
    let weight2 = match shift2 {
        Some(shift) => gens(model, Sheaf::Untwisted, 2, weight1.len(), shift),
        None => vec![],
    };
    let mut bracket = BTreeMap::new();
    if shift2.is_some() {
        for (l, r, value) in model.table(table).entries() {
            let s_beta = weight1[r].source.degree;
            let sign = if s_beta % 2 == 1 {
                -Rational::one()
            } else {
                Rational::one()
            };
            let combo: LinComb = value
                .iter()
                .map(|(pos, c)| (weight1.len() + pos, c * &sign))
                .collect();
            bracket.insert((l, r), combo);
        }
    }
    let p_generator = match variant {
        Variant::Standard | Variant::Relative if model.connected => {
            let mut tops = weight1.iter().filter(|g| g.source.degree == n);
            match (tops.next(), tops.next()) {
                (Some(g), None) => Some(g.id),
                _ => None,
            }
        }
        _ => None,
    };
    Ok(LieModel {
        variant,
        n,
        weight1,
        weight2,
        bracket,
        p_generator,
        degree_offset_per_weight: offset,
        connected: model.connected,
        orientable_surface: model.is_orientable_surface(),
    })
}

impl LieModel {
    pub fn generator_count(&self) -> usize {
        self.weight1.len() + self.weight2.len()
    }

    pub fn generator(&self, id: usize) -> Option<&CeGenerator> {
        if id < self.weight1.len() {
            self.weight1.get(id)
        } else {
            self.weight2.get(id - self.weight1.len())
        }
    }

    /// All generators by id.
    pub fn generators(&self) -> impl Iterator<Item = &CeGenerator> + '_ {
        self.weight1.iter().chain(&self.weight2)
    }

    pub fn is_abelian(&self) -> bool {
        self.bracket.is_empty()
    }

    /// Degree of the underlying Lie algebra element (CE degree minus one),
    /// as a parity.
    fn lie_odd(&self, id: usize) -> bool {
        self.generator(id).expect("id checked").ce_degree % 2 == 0
    }

    /// Sets every generator's id to its position; used after reshaping.
    fn renumber(&mut self) {
        for (i, g) in self.weight1.iter_mut().enumerate() {
            g.id = i;
        }
        let offset = self.weight1.len();
        for (i, g) in self.weight2.iter_mut().enumerate() {
            g.id = offset + i;
        }
    }

    /// The same Lie algebra with generators renumbered: generator `i` gets
    /// id `perm[i]`. The permutation must keep each weight block in place.
    pub fn permuted(&self, perm: &[usize]) -> Result<LieModel, LieError> {
        let total = self.generator_count();
        let w1 = self.weight1.len();
        let mut seen = vec![false; total];
        if perm.len() != total {
            return Err(LieError::Reshape(format!("permutation has length {}, expected {total}", perm.len())));
        }
        for (i, &j) in perm.iter().enumerate() {
            if j >= total || seen[j] || (i < w1) != (j < w1) {
                return Err(LieError::Reshape("not a weight-preserving permutation".into()));
            }
            seen[j] = true;
        }
        let mut out = self.clone();
        for g in self.generators() {
            let slot = perm[g.id];
            let target = if slot < w1 {
                &mut out.weight1[slot]
            } else {
                &mut out.weight2[slot - w1]
            };
            *target = CeGenerator { id: slot, ..g.clone() };
        }
        out.bracket.clear();
        for (&(i, j), value) in &self.bracket {
            let (a, b) = (perm[i], perm[j]);
            let mut combo: LinComb = value.iter().map(|(k, c)| (perm[*k], c.clone())).collect();
            let key = if a <= b {
                (a, b)
            } else {
                // [x_j, x_i] = -(-1)^{|x_i||x_j|} [x_i, x_j]
                if !(self.lie_odd(i) && self.lie_odd(j)) {
                    for c in combo.values_mut() {
                        *c = -c.clone();
                    }
                }
                (b, a)
            };
            out.bracket.insert(key, combo);
        }
        out.p_generator = self.p_generator.map(|p| perm[p]);
        out.renumber();
        Ok(out)
    }

    /// The same Lie algebra in the basis `factors[i] · x_i`.
    pub fn rescaled(&self, factors: &[Rational]) -> Result<LieModel, LieError> {
        if factors.len() != self.generator_count() || factors.iter().any(|f| f.is_zero()) {
            return Err(LieError::Reshape("need one nonzero factor per generator".into()));
        }
        let mut out = self.clone();
        for ((i, j), value) in out.bracket.iter_mut() {
            for (k, c) in value.iter_mut() {
                *c = &*c * &factors[*i] * &factors[*j] / &factors[*k];
            }
        }
        Ok(out)
    }
}

/// `[x_i, x_j]` on weight-1 generators, using the stored orientation when
/// `i <= j` and the graded mirror otherwise.
pub fn bracket_eval(lm: &LieModel, i: usize, j: usize) -> Result<LinComb, LieError> {
    for id in [i, j] {
        if id >= lm.generator_count() {
            return Err(LieError::UnknownGenerator(id));
        }
        if id >= lm.weight1.len() {
            return Err(LieError::NotWeightOne(id));
        }
    }
    let (key, flip) = if i <= j {
        ((i, j), false)
    } else {
        ((j, i), !(lm.lie_odd(i) && lm.lie_odd(j)))
    };
    let Some(value) = lm.bracket.get(&key) else {
        return Ok(LinComb::new());
    };
    Ok(if flip {
        value.iter().map(|(k, c)| (*k, -c.clone())).collect()
    } else {
        value.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PresetSpec;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn build(name: &str, params: &[(&str, i64)], variant: Variant) -> LieModel {
        build_lie_model(&PresetSpec::new(name, params).build().unwrap(), variant).unwrap()
    }

    fn degrees(gens: &[CeGenerator]) -> Vec<usize> {
        gens.iter().map(|g| g.ce_degree).collect()
    }

    #[test]
    fn plane() {
        let lm = build("euclidean", &[("n", 2)], Variant::Standard);
        assert_eq!(degrees(&lm.weight1), vec![0]);
        assert_eq!(degrees(&lm.weight2), vec![1]);
        assert!(lm.is_abelian());
        assert_eq!(lm.p_generator, Some(0));
    }

    #[test]
    fn klein_twisted() {
        let lm = build("klein-bottle", &[], Variant::TwistedEven);
        // a = unit (CE degree 2), b = degree-1 class (CE degree 1).
        assert_eq!(degrees(&lm.weight1), vec![2, 1]);
        assert_eq!(degrees(&lm.weight2), vec![3, 2]);
        let (a, b, a_t, b_t) = (0, 1, 2, 3);
        assert_eq!(bracket_eval(&lm, a, a).unwrap(), LinComb::from([(a_t, q(1))]));
        assert_eq!(bracket_eval(&lm, a, b).unwrap(), LinComb::from([(b_t, q(-1))]));
        assert_eq!(bracket_eval(&lm, b, b).unwrap(), LinComb::new());
        // both have even Lie degree after the mirror: [b, a] = -[a, b].
        assert_eq!(bracket_eval(&lm, b, a).unwrap(), LinComb::from([(b_t, q(1))]));
        assert_eq!(lm.p_generator, None);
        assert_eq!(bracket_eval(&lm, a, a_t), Err(LieError::NotWeightOne(a_t)));
    }

    #[test]
    fn real_projective_plane() {
        for n in [2usize, 4] {
            let lm = build("rp-even", &[("n", n as i64)], Variant::Standard);
            assert_eq!(degrees(&lm.weight1), vec![0]);
            assert_eq!(degrees(&lm.weight2), vec![2 * n - 1]);
            assert!(lm.is_abelian());
            assert_eq!(lm.weight1[0].source.sheaf, Sheaf::Twisted);
            assert_eq!(lm.weight1[0].source.degree, n);
        }
    }

    #[test]
    fn zero_products_mean_zero_brackets() {
        let lm = build("punctured-euclidean", &[("n", 2), ("m", 3)], Variant::Standard);
        for i in 0..lm.weight1.len() {
            for j in 0..lm.weight1.len() {
                assert!(bracket_eval(&lm, i, j).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn odd_dimension_is_abelian() {
        for spec in crate::model::preset_instances() {
            let model = spec.build().unwrap();
            if model.n % 2 == 1 {
                let lm = build_lie_model(&model, Variant::Standard).unwrap();
                assert!(lm.weight2.is_empty() && lm.is_abelian(), "{spec}");
            }
        }
    }

    #[test]
    fn twisted_odd_shift() {
        let lm = build("sphere", &[("n", 3)], Variant::TwistedOdd);
        assert_eq!(lm.degree_offset_per_weight, 1);
        assert_eq!(degrees(&lm.weight1), vec![4, 1]);
        assert_eq!(degrees(&lm.weight2), vec![7, 4]);
        assert!(matches!(
            build_lie_model(&PresetSpec::new("sphere", &[("n", 3)]).build().unwrap(), Variant::TwistedEven),
            Err(LieError::Parity { .. })
        ));
    }

    #[test]
    fn structural_invariants_hold_for_presets() {
        for spec in crate::model::preset_instances() {
            let model = spec.build().unwrap();
            let variants = [Variant::Standard, Variant::Relative, Variant::twisted_for(model.n)];
            for variant in variants {
                let lm = build_lie_model(&model, variant).unwrap();
                let sheaf = if variant.is_twisted() { Sheaf::Untwisted } else { Sheaf::Twisted };
                assert_eq!(lm.weight1.len(), model.classes(sheaf).len());
                for (&(i, j), value) in &lm.bracket {
                    assert!(i <= j && j < lm.weight1.len());
                    for k in value.keys() {
                        let d = lm.generator(*k).unwrap().ce_degree;
                        assert_eq!(d + 1, lm.weight1[i].ce_degree + lm.weight1[j].ce_degree, "{spec}");
                    }
                }
                if model.connected && !model.boundary && !variant.is_twisted() {
                    let p = lm.p_generator.expect("connected models have p");
                    assert_eq!(lm.weight1[p].ce_degree, 0);
                }
            }
        }
    }

    #[test]
    fn permuting_twice_back_is_identity() {
        let lm = build("orientable-surface", &[("g", 2)], Variant::Standard);
        let w1 = lm.weight1.len();
        let total = lm.generator_count();
        let perm: Vec<usize> = (0..w1).rev().chain((w1..total).rev()).collect();
        let once = lm.permuted(&perm).unwrap();
        assert_ne!(once, lm);
        assert_eq!(once.permuted(&perm).unwrap(), lm);
        for i in 0..w1 {
            for j in 0..w1 {
                let direct: LinComb = bracket_eval(&lm, i, j)
                    .unwrap()
                    .into_iter()
                    .map(|(k, c)| (perm[k], c))
                    .collect();
                assert_eq!(bracket_eval(&once, perm[i], perm[j]).unwrap(), direct);
            }
        }
        assert!(lm.permuted(&[0]).is_err());
    }
}
