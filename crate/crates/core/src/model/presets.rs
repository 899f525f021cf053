//! Built-in manifolds.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{
    closed_orientable_from_ring, CohomologyClass, CohomologyModel, CupProductTable, ModelError,
    TableKind,
};

pub type PresetParams = BTreeMap<String, i64>;

/// Catalogue entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PresetInfo {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub summary: &'static str,
    /// Example table this preset reproduces.
    pub reproduces: &'static str,
}

const CATALOGUE: &[PresetInfo] = &[
    PresetInfo {
        name: "euclidean",
        params: &["n"],
        summary: "R^n",
        reproduces: "B_k(R^n): Q for n odd, Q + Q[n-1] for n even (k > 1)",
    },
    PresetInfo {
        name: "punctured-euclidean",
        params: &["n", "m"],
        summary: "R^n minus m points",
        reproduces: "binomial tables in degrees i(n-1)",
    },
    PresetInfo {
        name: "torus",
        params: &[],
        summary: "closed torus T^2",
        reproduces: "orientable-surface stable range",
    },
    PresetInfo {
        name: "punctured-torus",
        params: &[],
        summary: "T^2 minus a point",
        reproduces: "B_2 = Q + Q^2[1] + Q^2[2], unlike the twice-punctured plane",
    },
    PresetInfo {
        name: "orientable-surface",
        params: &["g"],
        summary: "closed orientable surface of genus g",
        reproduces: "orientable-surface stable range",
    },
    PresetInfo {
        name: "nonorientable-surface",
        params: &["h"],
        summary: "connected sum of h projective planes N_h",
        reproduces: "untwisted Betti numbers of B_k(N_h)",
    },
    PresetInfo {
        name: "rp-even",
        params: &["n"],
        summary: "RP^n for even n",
        reproduces: "Q + Q[2n-1] untwisted, 0 twisted (k > 1)",
    },
    PresetInfo {
        name: "klein-bottle",
        params: &[],
        summary: "Klein bottle, equal to N_2",
        reproduces: "twisted Q[k] + Q[k+1] for odd k; sharpness of the stable range",
    },
    PresetInfo {
        name: "moebius-closed",
        params: &[],
        summary: "closed Moebius band (boundary, relative variant)",
        reproduces: "relative tables Q[k] + Q[k+1] by parity of k",
    },
    PresetInfo {
        name: "moebius-open",
        params: &[],
        summary: "open Moebius band",
        reproduces: "Q[0] + Q[1] untwisted, 0 twisted",
    },
    PresetInfo {
        name: "sphere",
        params: &["n"],
        summary: "S^n",
        reproduces: "Sym^k(H_*(S^n)) for odd n",
    },
    PresetInfo {
        name: "closed-orientable",
        params: &[],
        summary: "closed orientable manifold from a cohomology ring (library helper or model file)",
        reproduces: "Sym^k(H_*(M)) for odd n",
    },
];

pub fn preset_catalogue() -> &'static [PresetInfo] {
    CATALOGUE
}

/// A preset name with parameters, printed as `name(k=v,...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PresetSpec {
    pub name: String,
    pub params: PresetParams,
}

impl PresetSpec {
    pub fn new(name: &str, params: &[(&str, i64)]) -> Self {
        Self {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn build(&self) -> Result<CohomologyModel, ModelError> {
        preset(&self.name, &self.params)
    }
}

impl fmt::Display for PresetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            let parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for PresetSpec {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |message: &str| ModelError::InvalidParameter {
            preset: s.to_string(),
            message: message.to_string(),
        };
        let (name, rest) = match s.split_once('(') {
            None => (s, ""),
            Some((name, rest)) => (
                name,
                rest.strip_suffix(')').ok_or_else(|| bad("unbalanced parenthesis"))?,
            ),
        };
        let mut params = PresetParams::new();
        for part in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let v = v.trim().parse().map_err(|_| bad("parameter values are integers"))?;
            params.insert(k.trim().to_string(), v);
        }
        Ok(Self {
            name: name.trim().to_string(),
            params,
        })
    }
}

const MAX_PARAM: i64 = 64;

struct Params<'a> {
    preset: &'a str,
    params: &'a PresetParams,
}

impl Params<'_> {
    fn get(&self, key: &str, min: i64) -> Result<usize, ModelError> {
        let v = *self
            .params
            .get(key)
            .ok_or_else(|| ModelError::MissingParameter {
                preset: self.preset.to_string(),
                param: key.to_string(),
            })?;
        if !(min..=MAX_PARAM).contains(&v) {
            return Err(self.invalid(format!("{key} must lie in {min}..={MAX_PARAM}, got {v}")));
        }
        Ok(v as usize)
    }

    fn invalid(&self, message: String) -> ModelError {
        ModelError::InvalidParameter {
            preset: self.preset.to_string(),
            message,
        }
    }
}

fn classes(list: &[(usize, String)]) -> Vec<CohomologyClass> {
    list.iter()
        .map(|(d, l)| CohomologyClass::new(*d, l.clone()))
        .collect()
}

fn unit_products(model: &mut CohomologyModel, kind: TableKind, unit: &str) {
    let labels: Vec<String> = model
        .classes(kind.input_sheaf())
        .iter()
        .map(|c| c.label.clone())
        .collect();
    for x in &labels {
        model
            .set_product_by_label(kind, unit, x, &[(x, 1)])
            .expect("preset labels resolve");
    }
}

fn surface(name: String, g: usize, a: impl Fn(usize) -> String, b: impl Fn(usize) -> String) -> CohomologyModel {
    let mut list = vec![(0, "1".to_string())];
    list.extend((1..=g).map(|i| (1, a(i))));
    list.extend((1..=g).map(|i| (1, b(i))));
    list.push((2, "p".to_string()));
    let mut ring = CohomologyModel::new("", 2, true, classes(&list), vec![]);
    for i in 1..=g {
        ring.set_product_by_label(TableKind::UntwistedUntwisted, &a(i), &b(i), &[("p", 1)])
            .expect("preset labels resolve");
    }
    closed_orientable_from_ring(&name, 2, classes(&list), ring.uu_products())
        .expect("surfaces have a one-dimensional top degree")
}

/// Builds a catalogued manifold. The model name is the canonical
/// `name(k=v,...)` form, so [`PresetSpec::from_str`] recovers the call.
pub fn preset(name: &str, params: &PresetParams) -> Result<CohomologyModel, ModelError> {
    let info = CATALOGUE
        .iter()
        .find(|i| i.name == name)
        .ok_or_else(|| ModelError::UnknownPreset(name.to_string()))?;
    let p = Params {
        preset: name,
        params,
    };
    if let Some(extra) = params.keys().find(|k| !info.params.contains(&k.as_str())) {
        return Err(p.invalid(format!("unknown parameter `{extra}`")));
    }
    let spec = PresetSpec {
        name: name.to_string(),
        params: params.clone(),
    };
    let full_name = spec.to_string();
    let uu = TableKind::UntwistedUntwisted;
    let ww = TableKind::TwistedTwisted;

    let model = match name {
        "euclidean" => {
            let n = p.get("n", 1)?;
            let top = classes(&[(n, "p".into())]);
            CohomologyModel::new(full_name, n, true, top.clone(), top)
        }
        "punctured-euclidean" => {
            let n = p.get("n", 1)?;
            let m = p.get("m", 1)?;
            let mut list: Vec<(usize, String)> = (1..=m).map(|i| (1, format!("y{i}"))).collect();
            list.push((n, "p".into()));
            CohomologyModel::new(full_name, n, true, classes(&list), classes(&list))
        }
        "sphere" => {
            let n = p.get("n", 1)?;
            let list = classes(&[(0, "1".into()), (n, "p".into())]);
            let ring = CupProductTable::new(uu);
            closed_orientable_from_ring(&full_name, n, list, &ring)?
        }
        "torus" => surface(full_name, 1, |_| "a".into(), |_| "b".into()),
        "orientable-surface" => {
            let g = p.get("g", 0)?;
            surface(full_name, g, |i| format!("a{i}"), |i| format!("b{i}"))
        }
        "punctured-torus" => {
            let list = classes(&[(1, "a".into()), (1, "b".into()), (2, "p".into())]);
            let mut model = CohomologyModel::new(full_name, 2, true, list.clone(), list);
            for kind in [ww, uu] {
                model.set_product_by_label(kind, "a", "b", &[("p", 1)])?;
            }
            model
        }
        "nonorientable-surface" | "klein-bottle" => {
            let h = if name == "klein-bottle" { 2 } else { p.get("h", 1)? };
            let mut untwisted = vec![(0, "1".to_string())];
            untwisted.extend((1..h).map(|i| (1, format!("w{i}"))));
            let mut twisted: Vec<(usize, String)> = (1..h).map(|i| (1, format!("u{i}"))).collect();
            twisted.push((2, "p".into()));
            let mut model =
                CohomologyModel::new(full_name, 2, true, classes(&untwisted), classes(&twisted));
            unit_products(&mut model, uu, "1");
            model
        }
        "rp-even" => {
            let n = p.get("n", 2)?;
            if n % 2 != 0 {
                return Err(p.invalid(format!("n must be even, got {n}")));
            }
            let mut model = CohomologyModel::new(
                full_name,
                n,
                true,
                classes(&[(0, "1".into())]),
                classes(&[(n, "p".into())]),
            );
            unit_products(&mut model, uu, "1");
            model
        }
        "moebius-closed" => {
            let mut model = CohomologyModel::new(
                full_name,
                2,
                true,
                classes(&[(0, "1".into()), (1, "w1".into())]),
                vec![],
            );
            model.boundary = true;
            unit_products(&mut model, uu, "1");
            model
        }
        "moebius-open" => CohomologyModel::new(
            full_name,
            2,
            true,
            vec![],
            classes(&[(1, "u1".into()), (2, "p".into())]),
        ),
        "closed-orientable" => {
            return Err(p.invalid(
                "built from a cohomology ring: use closed_orientable_from_ring or a model file"
                    .into(),
            ))
        }
        _ => unreachable!("catalogue and builder disagree on `{name}`"),
    };
    Ok(model)
}

/// One or two small instances of every buildable preset, used by sweeps.
pub fn preset_instances() -> Vec<PresetSpec> {
    vec![
        PresetSpec::new("euclidean", &[("n", 2)]),
        PresetSpec::new("euclidean", &[("n", 3)]),
        PresetSpec::new("punctured-euclidean", &[("n", 2), ("m", 2)]),
        PresetSpec::new("punctured-euclidean", &[("n", 3), ("m", 2)]),
        PresetSpec::new("torus", &[]),
        PresetSpec::new("punctured-torus", &[]),
        PresetSpec::new("orientable-surface", &[("g", 2)]),
        PresetSpec::new("nonorientable-surface", &[("h", 3)]),
        PresetSpec::new("klein-bottle", &[]),
        PresetSpec::new("rp-even", &[("n", 2)]),
        PresetSpec::new("rp-even", &[("n", 4)]),
        PresetSpec::new("moebius-closed", &[]),
        PresetSpec::new("moebius-open", &[]),
        PresetSpec::new("sphere", &[("n", 2)]),
        PresetSpec::new("sphere", &[("n", 3)]),
    ]
}
