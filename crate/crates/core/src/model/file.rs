//! JSON model files.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{
    CohomologyClass, CohomologyModel, CupProductTable, LinComb, ModelError, Sheaf, TableKind,
};
use crate::linalg::Rational;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    name: String,
    n: usize,
    connected: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    boundary: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientable_surface: Option<bool>,
    #[serde(default)]
    untwisted: Vec<ClassDoc>,
    #[serde(default)]
    twisted: Vec<ClassDoc>,
    #[serde(default)]
    ww_products: Vec<ProductDoc>,
    #[serde(default)]
    uu_products: Vec<ProductDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    degree: usize,
    label: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductDoc {
    left_label: String,
    right_label: String,
    result: Vec<TermDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    label: String,
    coeff_num: i64,
    #[serde(default = "one")]
    coeff_den: i64,
}

fn one() -> i64 {
    1
}

fn json_error(e: serde_json::Error) -> ModelError {
    use serde_json::error::Category;
    let (line, column, message) = (e.line(), e.column(), e.to_string());
    match e.classify() {
        Category::Data => ModelError::Schema {
            line,
            column,
            message,
        },
        _ => ModelError::Syntax {
            line,
            column,
            message,
        },
    }
}

/// Parses a model document. Structural problems (syntax, unknown fields,
/// duplicate or unknown labels) are errors; mathematical ones are left to
/// [`CohomologyModel::validate`].
pub fn parse_model_file(text: &str) -> Result<CohomologyModel, ModelError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(json_error)?;
    let classes = |sheaf: Sheaf, list: Vec<ClassDoc>| {
        let mut seen = HashSet::new();
        list.into_iter()
            .map(|c| {
                if !seen.insert(c.label.clone()) {
                    return Err(ModelError::DuplicateLabel {
                        sheaf,
                        label: c.label,
                    });
                }
                Ok(CohomologyClass::new(c.degree, c.label))
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let untwisted = classes(Sheaf::Untwisted, doc.untwisted)?;
    let twisted = classes(Sheaf::Twisted, doc.twisted)?;
    let mut model = CohomologyModel::new(doc.name, doc.n, doc.connected, untwisted, twisted);
    model.boundary = doc.boundary;
    model.orientable_surface = doc.orientable_surface;

    for (kind, entries) in [
        (TableKind::TwistedTwisted, doc.ww_products),
        (TableKind::UntwistedUntwisted, doc.uu_products),
    ] {
        let input = kind.input_sheaf();
        let lookup = |sheaf: Sheaf, label: &str| {
            model
                .position_of(sheaf, label)
                .ok_or_else(|| ModelError::UnknownLabel {
                    table: kind.field(),
                    sheaf,
                    label: label.to_string(),
                })
        };
        let mut table = CupProductTable::new(kind);
        let degrees = model.degrees(input);
        for entry in entries {
            let l = lookup(input, &entry.left_label)?;
            let r = lookup(input, &entry.right_label)?;
            let mut value = LinComb::new();
            for term in entry.result {
                if term.coeff_den == 0 {
                    return Err(ModelError::ZeroDenominator {
                        table: kind.field(),
                        label: term.label,
                    });
                }
                let pos = lookup(Sheaf::Untwisted, &term.label)?;
                let c = Rational::new(BigInt::from(term.coeff_num), BigInt::from(term.coeff_den));
                *value.entry(pos).or_insert_with(Rational::zero) += c;
            }
            table.insert(&degrees, l, r, value)?;
        }
        model.set_table(table);
    }
    Ok(model)
}

fn small(x: &BigInt) -> Result<i64, ModelError> {
    x.to_i64()
        .ok_or_else(|| ModelError::CoefficientRange(x.to_string()))
}

/// Pretty-printed model document; `parse_model_file` inverts it.
pub fn serialize_model(model: &CohomologyModel) -> Result<String, ModelError> {
    let class_docs = |sheaf: Sheaf| {
        model
            .classes(sheaf)
            .iter()
            .map(|c| ClassDoc {
                degree: c.degree,
                label: c.label.clone(),
            })
            .collect::<Vec<_>>()
    };
    let product_docs = |kind: TableKind| -> Result<Vec<ProductDoc>, ModelError> {
        let input = model.classes(kind.input_sheaf());
        let output = model.classes(Sheaf::Untwisted);
        model
            .table(kind)
            .entries()
            .map(|(l, r, value)| {
                let result = value
                    .iter()
                    .map(|(pos, c)| {
                        Ok(TermDoc {
                            label: output[*pos].label.clone(),
                            coeff_num: small(c.numer())?,
                            coeff_den: small(c.denom())?,
                        })
                    })
                    .collect::<Result<_, ModelError>>()?;
                Ok(ProductDoc {
                    left_label: input[l].label.clone(),
                    right_label: input[r].label.clone(),
                    result,
                })
            })
            .collect()
    };
    let doc = ModelDoc {
        name: model.name.clone(),
        n: model.n,
        connected: model.connected,
        boundary: model.boundary,
        orientable_surface: model.orientable_surface,
        untwisted: class_docs(Sheaf::Untwisted),
        twisted: class_docs(Sheaf::Twisted),
        ww_products: product_docs(TableKind::TwistedTwisted)?,
        uu_products: product_docs(TableKind::UntwistedUntwisted)?,
    };
    Ok(serde_json::to_string_pretty(&doc).expect("model documents always serialise"))
}
