use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;
use crate::lie::{build_lie_model, Variant};
use crate::model::{preset_instances, PresetSpec, Sheaf};

fn lie(name: &str, params: &[(&str, i64)], variant: Variant) -> LieModel {
    build_lie_model(&PresetSpec::new(name, params).build().unwrap(), variant).unwrap()
}

fn table(pairs: &[(usize, usize)]) -> BTreeMap<usize, usize> {
    pairs.iter().copied().collect()
}

fn rendered(lm: &LieModel, k: usize) -> BTreeMap<usize, Vec<String>> {
    enumerate_slice_basis(lm, k)
        .into_iter()
        .map(|(d, list)| (d, list.iter().map(|m| m.display(lm)).collect()))
        .collect()
}

#[test]
fn enumeration_examples() {
    let plane = lie("euclidean", &[("n", 2)], Variant::Standard);
    assert_eq!(
        rendered(&plane, 3),
        BTreeMap::from([(0, vec!["p^3".to_string()]), (1, vec!["p p~".to_string()])])
    );
    assert_eq!(rendered(&plane, 0), BTreeMap::from([(0, vec!["1".to_string()])]));

    let torus = lie("torus", &[], Variant::Standard);
    let weight_one: usize = enumerate_slice_basis(&torus, 1).values().map(Vec::len).sum();
    assert_eq!(weight_one, torus.weight1.len());
    for list in enumerate_slice_basis(&torus, 1).values() {
        for m in list {
            assert_eq!(m.exponents().len(), 1);
            assert_eq!(m.exponents()[0].1, 1);
        }
    }
}

#[test]
fn enumeration_order_is_lex_decreasing() {
    let lm = lie("punctured-euclidean", &[("n", 2), ("m", 2)], Variant::Standard);
    let total = lm.generator_count();
    for list in enumerate_slice_basis(&lm, 5).values() {
        let dense: Vec<Vec<u32>> = list
            .iter()
            .map(|m| (0..total).map(|id| m.exponent(id)).collect())
            .collect();
        for pair in dense.windows(2) {
            assert!(pair[0] > pair[1], "{pair:?}");
        }
    }
}

#[test]
fn counts_match_enumeration() {
    for spec in preset_instances() {
        let model = spec.build().unwrap();
        let lm = build_lie_model(&model, Variant::Standard).unwrap();
        for k in 0..=6 {
            let basis = enumerate_slice_basis(&lm, k);
            let total: usize = basis.values().map(Vec::len).sum();
            assert_eq!(count_slice(&lm, k), total as u128, "{spec} k={k}");
            for (d, list) in &basis {
                for m in list {
                    assert_eq!((m.ce_degree(), m.weight()), (*d, k));
                    assert_eq!(Monomial::from_exponents(&lm, m.exponents()).as_ref(), Some(m));
                }
            }
        }
    }
}

fn slice(lm: &LieModel, k: usize) -> WeightSlice {
    assemble_differential(lm, k, enumerate_slice_basis(lm, k), Exec::Sequential).unwrap()
}

#[test]
fn punctured_torus_differential() {
    let lm = lie("punctured-torus", &[], Variant::Standard);
    let s = slice(&lm, 2);
    let ab = Monomial::from_exponents(&lm, &[(0, 1), (1, 1)]).unwrap();
    assert_eq!(ab.display(&lm), "a b");
    let col = s.differential(2).column(s.index_of(&ab).unwrap());
    assert_eq!(col.nnz(), 1);
    let (row, coeff) = &col.entries()[0];
    assert_eq!(s.basis(1)[*row].display(&lm), "p~");
    assert!(coeff.numer().magnitude() == &1u32.into() && coeff.is_integer());
}

#[test]
fn klein_twisted_differential() {
    let lm = lie("klein-bottle", &[], Variant::TwistedEven);
    let s = slice(&lm, 2);
    let image = |exps: &[(usize, u32)]| {
        let m = Monomial::from_exponents(&lm, exps).unwrap();
        let col = s.differential(m.ce_degree()).column(s.index_of(&m).unwrap());
        col.entries()
            .iter()
            .map(|(r, c)| (s.basis(m.ce_degree() - 1)[*r].display(&lm), c.clone()))
            .collect::<Vec<_>>()
    };
    let a_squared = image(&[(0, 2)]);
    assert_eq!(a_squared.len(), 1);
    assert_eq!(a_squared[0].0, "1~");
    let ab = image(&[(0, 1), (1, 1)]);
    assert_eq!(ab.len(), 1);
    assert_eq!(ab[0].0, "w1~");
}

#[test]
fn abelian_models_have_zero_differential() {
    let lm = lie("punctured-euclidean", &[("n", 2), ("m", 3)], Variant::Standard);
    let s = slice(&lm, 5);
    for d in 0..=s.max_degree().unwrap() + 1 {
        assert!(s.differential(d).is_zero());
    }
}

#[test]
fn betti_examples() {
    let plane = lie("euclidean", &[("n", 2)], Variant::Standard);
    for k in 2..=6 {
        assert_eq!(betti(&plane, k).unwrap(), table(&[(0, 1), (1, 1)]));
    }
    let pt = lie("punctured-torus", &[], Variant::Standard);
    assert_eq!(betti(&pt, 2).unwrap(), table(&[(0, 1), (1, 2), (2, 2)]));
    let klein = lie("klein-bottle", &[], Variant::TwistedEven);
    assert_eq!(betti(&klein, 3).unwrap(), table(&[(3, 1), (4, 1)]));
    assert_eq!(betti(&klein, 2).unwrap(), table(&[]));
}

#[test]
fn homology_basis_examples() {
    let lm = lie("punctured-euclidean", &[("n", 3), ("m", 2)], Variant::Standard);
    let s = slice(&lm, 3);
    for d in 0..=s.max_degree().unwrap() {
        let (z, b) = homology_basis(&s, d, Exec::Sequential);
        assert_eq!(z.len(), s.dim(d));
        assert!(b.is_empty());
    }

    let klein = lie("klein-bottle", &[], Variant::TwistedEven);
    let s = slice(&klein, 2);
    for d in 0..=s.max_degree().unwrap() {
        let (z, b) = homology_basis(&s, d, Exec::Sequential);
        assert_eq!(z.len(), b.len(), "degree {d}");
    }

    let pt = lie("punctured-torus", &[], Variant::Standard);
    let s = slice(&pt, 2);
    let dims: Vec<usize> = (0..=2)
        .map(|d| {
            let (z, b) = homology_basis(&s, d, Exec::Sequential);
            assert_eq!(&z.vectors()[..b.len()], b.vectors());
            z.len() - b.len()
        })
        .collect();
    assert_eq!(dims, vec![1, 2, 2]);
}

#[test]
fn euler_examples() {
    let plane = lie("euclidean", &[("n", 2)], Variant::Standard);
    assert_eq!(euler_characteristic(&plane, 5).unwrap(), (0, 0));
    for spec in preset_instances() {
        let lm = build_lie_model(&spec.build().unwrap(), Variant::Standard).unwrap();
        assert_eq!(euler_characteristic(&lm, 0).unwrap(), (1, 1));
    }
    let n2 = lie("nonorientable-surface", &[("h", 2)], Variant::Standard);
    let (chains, homology) = euler_characteristic(&n2, 4).unwrap();
    assert_eq!(chains, homology);
}

#[test]
fn weight_zero_and_one() {
    for spec in preset_instances() {
        let model = spec.build().unwrap();
        let lm = build_lie_model(&model, Variant::Standard).unwrap();
        let engine = CeEngine::new(lm);
        assert_eq!(engine.betti(0).unwrap(), table(&[(0, 1)]));
        let s1 = engine.slice(1).unwrap();
        for d in 0..=s1.max_degree().map_or(0, |m| m + 1) {
            assert!(s1.differential(d).is_zero());
        }
        let expected: BTreeMap<usize, usize> = (0..=model.n)
            .map(|d| (d, model.dim(Sheaf::Twisted, model.n - d)))
            .filter(|(_, b)| *b > 0)
            .collect();
        assert_eq!(engine.betti(1).unwrap(), expected, "{spec}");
    }
}

#[test]
fn differentials_are_homogeneous() {
    let lm = lie("orientable-surface", &[("g", 2)], Variant::Standard);
    let s = slice(&lm, 4);
    for d in 1..=s.max_degree().unwrap() {
        let m = s.differential(d);
        assert_eq!((m.rows(), m.cols()), (s.dim(d - 1), s.dim(d)));
        for (r, c, _) in m.triplets() {
            assert_eq!(s.basis(d)[c].ce_degree(), s.basis(d - 1)[r].ce_degree() + 1);
            assert_eq!(s.basis(d)[c].weight(), s.basis(d - 1)[r].weight());
        }
    }
}

#[test]
fn cap_on_slice_size() {
    let lm = lie("orientable-surface", &[("g", 2)], Variant::Standard);
    let engine = CeEngine::new(lm).with_max_slice_dim(10);
    assert!(matches!(engine.slice(4), Err(CeError::SliceTooLarge { k: 4, cap: 10, .. })));
    assert!(engine.slice(0).is_ok());
}

#[test]
fn sequential_and_parallel_agree() {
    let lm = lie("orientable-surface", &[("g", 2)], Variant::Standard);
    let ks: Vec<usize> = (0..=5).collect();
    let seq = CeEngine::new(lm.clone()).with_exec(Exec::Sequential).betti_table(&ks).unwrap();
    let par = CeEngine::new(lm).with_exec(Exec::Parallel).betti_table(&ks).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn slices_are_reproducible() {
    let lm = lie("klein-bottle", &[], Variant::TwistedEven);
    let a = slice(&lm, 5);
    let b = assemble_differential(&lm, 5, enumerate_slice_basis(&lm, 5), Exec::Parallel).unwrap();
    for d in 0..=a.max_degree().unwrap() + 1 {
        assert_eq!(a.differential(d), b.differential(d));
        assert_eq!(a.basis(d), b.basis(d));
    }
}

#[test]
fn twisted_odd_reports_shifted_degrees() {
    let lm = lie("sphere", &[("n", 3)], Variant::TwistedOdd);
    let engine = CeEngine::new(lm);
    let raw = engine.betti_raw(2).unwrap();
    let shifted = engine.betti(2).unwrap();
    assert_eq!(raw.len(), shifted.len());
    for ((d, b), (e, c)) in raw.iter().zip(&shifted) {
        assert_eq!((*d - 2, *b), (*e, *c));
    }
    let t = engine.betti_table(&[2]).unwrap();
    assert_eq!(t.reported(2).unwrap(), shifted);
}

fn shuffled_perm(lm: &LieModel, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let w1 = lm.weight1.len();
    let mut first: Vec<usize> = (0..w1).collect();
    let mut second: Vec<usize> = (w1..lm.generator_count()).collect();
    first.shuffle(&mut rng);
    second.shuffle(&mut rng);
    first.into_iter().chain(second).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn betti_is_invariant_under_generator_permutation(seed in any::<u64>(), which in 0usize..3) {
        let lm = [
            lie("orientable-surface", &[("g", 2)], Variant::Standard),
            lie("klein-bottle", &[], Variant::TwistedEven),
            lie("punctured-torus", &[], Variant::Standard),
        ][which].clone();
        let perm = shuffled_perm(&lm, seed);
        let permuted = lm.permuted(&perm).unwrap();
        let ks: Vec<usize> = (0..=5).collect();
        prop_assert_eq!(
            CeEngine::new(lm).betti_table(&ks).unwrap(),
            CeEngine::new(permuted).betti_table(&ks).unwrap()
        );
    }

    #[test]
    fn betti_is_invariant_under_rescaling(
        factors in proptest::collection::vec((1i64..=7, 1i64..=5, any::<bool>()), 12)
    ) {
        let lm = lie("orientable-surface", &[("g", 2)], Variant::Standard);
        let factors: Vec<Rational> = factors
            .into_iter()
            .take(lm.generator_count())
            .map(|(a, b, neg)| Rational::new((if neg { -a } else { a }).into(), b.into()))
            .collect();
        let rescaled = lm.rescaled(&factors).unwrap();
        let ks: Vec<usize> = (0..=5).collect();
        prop_assert_eq!(
            CeEngine::new(lm).betti_table(&ks).unwrap(),
            CeEngine::new(rescaled).betti_table(&ks).unwrap()
        );
    }
}
