//! Cohomological input data: compactly supported cohomology of a manifold,
//! untwisted and with coefficients in the orientation sheaf, together with
//! the two cup-product tables the Lie model needs.

mod file;
mod presets;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::Rational;

pub use file::{parse_model_file, serialize_model};
pub use presets::{preset, preset_catalogue, preset_instances, PresetInfo, PresetParams, PresetSpec};

/// Which coefficient system a class lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheaf {
    Untwisted,
    Twisted,
}

impl fmt::Display for Sheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sheaf::Untwisted => "untwisted",
            Sheaf::Twisted => "twisted",
        })
    }
}

/// A basis class of `H_c^degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CohomologyClass {
    pub degree: usize,
    pub label: String,
}

impl CohomologyClass {
    pub fn new(degree: usize, label: impl Into<String>) -> Self {
        Self {
            degree,
            label: label.into(),
        }
    }
}

/// `(sheaf, degree, index within degree)` plus the display label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassRef {
    pub sheaf: Sheaf,
    pub degree: usize,
    pub index: usize,
    pub label: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableKind {
    TwistedTwisted,
    UntwistedUntwisted,
}

impl TableKind {
    /// Sheaf of the two factors. Products always land in the untwisted sheaf.
    pub fn input_sheaf(self) -> Sheaf {
        match self {
            TableKind::TwistedTwisted => Sheaf::Twisted,
            TableKind::UntwistedUntwisted => Sheaf::Untwisted,
        }
    }

    fn field(self) -> &'static str {
        match self {
            TableKind::TwistedTwisted => "ww_products",
            TableKind::UntwistedUntwisted => "uu_products",
        }
    }
}

/// A formal rational combination of untwisted classes, keyed by position.
pub type LinComb = BTreeMap<usize, Rational>;

fn sign(odd: bool) -> Rational {
    Rational::from_integer(if odd { -1 } else { 1 }.into())
}

/// Cup products on basis pairs.
///
/// Classes are addressed by their position in the model's (degree-sorted)
/// class list, so `left <= right` is the `(degree, index)` order. Only that
/// orientation is stored; the other one is `(-1)^{s_l s_r}` times it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupProductTable {
    kind: TableKind,
    products: BTreeMap<(usize, usize), LinComb>,
}

impl CupProductTable {
    pub fn new(kind: TableKind) -> Self {
        Self {
            kind,
            products: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    /// Stored entries, `left <= right`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &LinComb)> + '_ {
        self.products.iter().map(|(&(l, r), v)| (l, r, v))
    }

    pub fn get(&self, left: usize, right: usize) -> Option<&LinComb> {
        self.products.get(&(left, right))
    }

    /// Inserts `left ⌣ right = value`. A reversed pair is normalised with the
    /// graded-commutative sign using `degrees` (the input-sheaf degrees). An
    /// entry already present must agree.
    pub fn insert(
        &mut self,
        degrees: &[usize],
        left: usize,
        right: usize,
        value: LinComb,
    ) -> Result<(), ModelError> {
        let mut value: LinComb = value.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let key = if left <= right {
            (left, right)
        } else {
            let s = sign(degrees[left] * degrees[right] % 2 == 1);
            for c in value.values_mut() {
                *c *= &s;
            }
            (right, left)
        };
        match self.products.get(&key) {
            Some(existing) if *existing != value => Err(ModelError::ConflictingProduct {
                table: self.kind.field(),
                left: key.0,
                right: key.1,
            }),
            _ => {
                if value.is_empty() {
                    self.products.remove(&key);
                } else {
                    self.products.insert(key, value);
                }
                Ok(())
            }
        }
    }

    /// Both orientations of every product.
    pub fn symmetric_completion(&self, degrees: &[usize]) -> BTreeMap<(usize, usize), LinComb> {
        let mut out = BTreeMap::new();
        for (&(l, r), v) in &self.products {
            out.insert((l, r), v.clone());
            if l != r {
                let s = sign(degrees[l] * degrees[r] % 2 == 1);
                out.insert((r, l), v.iter().map(|(k, c)| (*k, c * &s)).collect());
            }
        }
        out
    }

    /// Rebuilds a table from a (possibly completed) list of products.
    pub fn from_products(
        kind: TableKind,
        degrees: &[usize],
        products: impl IntoIterator<Item = ((usize, usize), LinComb)>,
    ) -> Result<Self, ModelError> {
        let mut table = Self::new(kind);
        for ((l, r), v) in products {
            table.insert(degrees, l, r, v)?;
        }
        Ok(table)
    }
}

/// Compactly supported cohomology of `M` with both cup-product tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyModel {
    pub name: String,
    pub n: usize,
    pub connected: bool,
    /// `M` has nonempty boundary and the data is that of the compact
    /// manifold; only the relative variant is meaningful then.
    pub boundary: bool,
    /// Overrides the surface classification used for stability ranges.
    pub orientable_surface: Option<bool>,
    untwisted: Vec<CohomologyClass>,
    twisted: Vec<CohomologyClass>,
    ww_products: CupProductTable,
    uu_products: CupProductTable,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid model document at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate {sheaf} label `{label}`")]
    DuplicateLabel { sheaf: Sheaf, label: String },
    #[error("{table}: unknown {sheaf} label `{label}`")]
    UnknownLabel {
        table: &'static str,
        sheaf: Sheaf,
        label: String,
    },
    #[error("{table}: zero denominator in the coefficient of `{label}`")]
    ZeroDenominator { table: &'static str, label: String },
    #[error("{table}: conflicting entries for the pair ({left}, {right})")]
    ConflictingProduct {
        table: &'static str,
        left: usize,
        right: usize,
    },
    #[error("coefficient does not fit the file format: {0}")]
    CoefficientRange(String),
    #[error("class position {index} out of range for the {sheaf} list")]
    ClassOutOfRange { sheaf: Sheaf, index: usize },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("preset `{preset}`: missing parameter `{param}`")]
    MissingParameter { preset: String, param: String },
    #[error("preset `{preset}`: invalid parameter: {message}")]
    InvalidParameter { preset: String, message: String },
    #[error("top degree {n} must be one-dimensional, found {found} classes")]
    TopDegree { n: usize, found: usize },
}

/// The invariant a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Dimension,
    DegreeRange,
    UnresolvedReference,
    DegreeAdditivity,
    GradedCommutativity,
    Connectivity,
    DuplicateLabel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{:?}]: {}", self.field, self.rule, self.detail)
    }
}

impl CohomologyModel {
    /// Builds a model with empty product tables. Class lists are sorted by
    /// degree, keeping the given order inside a degree.
    pub fn new(
        name: impl Into<String>,
        n: usize,
        connected: bool,
        mut untwisted: Vec<CohomologyClass>,
        mut twisted: Vec<CohomologyClass>,
    ) -> Self {
        untwisted.sort_by_key(|c| c.degree);
        twisted.sort_by_key(|c| c.degree);
        Self {
            name: name.into(),
            n,
            connected,
            boundary: false,
            orientable_surface: None,
            untwisted,
            twisted,
            ww_products: CupProductTable::new(TableKind::TwistedTwisted),
            uu_products: CupProductTable::new(TableKind::UntwistedUntwisted),
        }
    }

    pub fn classes(&self, sheaf: Sheaf) -> &[CohomologyClass] {
        match sheaf {
            Sheaf::Untwisted => &self.untwisted,
            Sheaf::Twisted => &self.twisted,
        }
    }

    pub fn degrees(&self, sheaf: Sheaf) -> Vec<usize> {
        self.classes(sheaf).iter().map(|c| c.degree).collect()
    }

    /// Number of classes in `H_c^degree`.
    pub fn dim(&self, sheaf: Sheaf, degree: usize) -> usize {
        self.classes(sheaf).iter().filter(|c| c.degree == degree).count()
    }

    /// Resolves a position in the class list.
    pub fn class_ref(&self, sheaf: Sheaf, position: usize) -> Option<ClassRef> {
        let classes = self.classes(sheaf);
        let class = classes.get(position)?;
        let first = classes.iter().position(|c| c.degree == class.degree)?;
        Some(ClassRef {
            sheaf,
            degree: class.degree,
            index: position - first,
            label: class.label.clone(),
        })
    }

    pub fn position_of(&self, sheaf: Sheaf, label: &str) -> Option<usize> {
        self.classes(sheaf).iter().position(|c| c.label == label)
    }

    pub fn table(&self, kind: TableKind) -> &CupProductTable {
        match kind {
            TableKind::TwistedTwisted => &self.ww_products,
            TableKind::UntwistedUntwisted => &self.uu_products,
        }
    }

    pub fn ww_products(&self) -> &CupProductTable {
        &self.ww_products
    }

    pub fn uu_products(&self) -> &CupProductTable {
        &self.uu_products
    }

    /// Records `left ⌣ right` by class positions.
    pub fn set_product(
        &mut self,
        kind: TableKind,
        left: usize,
        right: usize,
        value: LinComb,
    ) -> Result<(), ModelError> {
        let input = kind.input_sheaf();
        let count = self.classes(input).len();
        for index in [left, right] {
            if index >= count {
                return Err(ModelError::ClassOutOfRange {
                    sheaf: input,
                    index,
                });
            }
        }
        let degrees = self.degrees(input);
        let table = match kind {
            TableKind::TwistedTwisted => &mut self.ww_products,
            TableKind::UntwistedUntwisted => &mut self.uu_products,
        };
        table.insert(&degrees, left, right, value)
    }

    /// Records `left ⌣ right` by labels, with integer coefficients.
    pub fn set_product_by_label(
        &mut self,
        kind: TableKind,
        left: &str,
        right: &str,
        result: &[(&str, i64)],
    ) -> Result<(), ModelError> {
        let input = kind.input_sheaf();
        let lookup = |sheaf: Sheaf, label: &str| {
            self.position_of(sheaf, label)
                .ok_or_else(|| ModelError::UnknownLabel {
                    table: kind.field(),
                    sheaf,
                    label: label.to_string(),
                })
        };
        let l = lookup(input, left)?;
        let r = lookup(input, right)?;
        let mut value = LinComb::new();
        for (label, c) in result {
            let pos = lookup(Sheaf::Untwisted, label)?;
            *value.entry(pos).or_insert_with(Rational::zero) += Rational::from_integer((*c).into());
        }
        self.set_product(kind, l, r, value)
    }

    /// Replaces a whole table (used by the file reader and tests).
    pub(crate) fn set_table(&mut self, table: CupProductTable) {
        match table.kind() {
            TableKind::TwistedTwisted => self.ww_products = table,
            TableKind::UntwistedUntwisted => self.uu_products = table,
        }
    }

    /// Whether stability ranges should use the orientable-surface clause.
    /// Without an explicit flag: `n = 2` and the twisted data coincides with
    /// the untwisted data.
    pub fn is_orientable_surface(&self) -> bool {
        self.orientable_surface.unwrap_or_else(|| {
            self.n == 2
                && self.degrees(Sheaf::Twisted) == self.degrees(Sheaf::Untwisted)
                && self.ww_products.products == self.uu_products.products
        })
    }

    /// Every broken invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |field: String, rule: Rule, detail: String| {
            out.push(Violation {
                field,
                rule,
                detail,
            })
        };
        if self.n == 0 {
            push("n".into(), Rule::Dimension, "dimension must be at least 1".into());
        }
        for sheaf in [Sheaf::Untwisted, Sheaf::Twisted] {
            let mut seen = HashMap::new();
            for (pos, class) in self.classes(sheaf).iter().enumerate() {
                if class.degree > self.n {
                    push(
                        format!("{sheaf}[{pos}]"),
                        Rule::DegreeRange,
                        format!("class `{}` has degree {} > n = {}", class.label, class.degree, self.n),
                    );
                }
                if seen.insert(class.label.as_str(), pos).is_some() {
                    push(
                        format!("{sheaf}[{pos}]"),
                        Rule::DuplicateLabel,
                        format!("label `{}` used twice", class.label),
                    );
                }
            }
        }
        for kind in [TableKind::TwistedTwisted, TableKind::UntwistedUntwisted] {
            let input = self.classes(kind.input_sheaf());
            let output = self.classes(Sheaf::Untwisted);
            for (l, r, value) in self.table(kind).entries() {
                let field = format!("{}({l},{r})", kind.field());
                let (Some(left), Some(right)) = (input.get(l), input.get(r)) else {
                    push(field, Rule::UnresolvedReference, "factor position out of range".into());
                    continue;
                };
                let field = format!("{}({},{})", kind.field(), left.label, right.label);
                let target = left.degree + right.degree;
                for (&pos, coeff) in value {
                    match output.get(pos) {
                        None => push(
                            field.clone(),
                            Rule::UnresolvedReference,
                            format!("result position {pos} out of range"),
                        ),
                        Some(class) if class.degree != target => push(
                            field.clone(),
                            Rule::DegreeAdditivity,
                            format!(
                                "result `{}` has degree {}, expected {}",
                                class.label, class.degree, target
                            ),
                        ),
                        Some(_) => {}
                    }
                    if coeff.is_zero() {
                        push(field.clone(), Rule::UnresolvedReference, "stored zero coefficient".into());
                    }
                }
                if l == r && left.degree % 2 == 1 && !value.is_empty() {
                    push(
                        field,
                        Rule::GradedCommutativity,
                        format!("square of the odd class `{}` must vanish", left.label),
                    );
                }
            }
        }
        if self.connected && !self.boundary && self.n > 0 {
            let top = self.dim(Sheaf::Twisted, self.n);
            if top != 1 {
                push(
                    "twisted".into(),
                    Rule::Connectivity,
                    format!("connected model needs a one-dimensional twisted top degree, found {top}"),
                );
            }
        }
        out
    }
}

/// Builds the model of a closed orientable `n`-manifold from its cohomology
/// ring. Twisted and untwisted data coincide. When there is a single class in
/// degree 0 it is taken to be the unit and the unit products are filled in.
pub fn closed_orientable_from_ring(
    name: &str,
    n: usize,
    classes: Vec<CohomologyClass>,
    ring: &CupProductTable,
) -> Result<CohomologyModel, ModelError> {
    let top = classes.iter().filter(|c| c.degree == n).count();
    if top != 1 {
        return Err(ModelError::TopDegree { n, found: top });
    }
    let mut model = CohomologyModel::new(name, n, true, classes.clone(), classes);
    let degrees = model.degrees(Sheaf::Untwisted);
    let mut table = CupProductTable::new(TableKind::UntwistedUntwisted);
    for (l, r, v) in ring.entries() {
        if l >= degrees.len() || r >= degrees.len() {
            return Err(ModelError::ClassOutOfRange {
                sheaf: Sheaf::Untwisted,
                index: l.max(r),
            });
        }
        table.insert(&degrees, l, r, v.clone())?;
    }
    if degrees.iter().filter(|&&d| d == 0).count() == 1 {
        let unit = degrees.iter().position(|&d| d == 0).expect("counted above");
        for x in 0..degrees.len() {
            if table.get(unit.min(x), unit.max(x)).is_none() {
                let value = LinComb::from([(x, Rational::from_integer(1.into()))]);
                table.insert(&degrees, unit, x, value)?;
            }
        }
    }
    model.set_table(table.clone());
    model.set_table(CupProductTable {
        kind: TableKind::TwistedTwisted,
        products: table.products,
    });
    Ok(model)
}
