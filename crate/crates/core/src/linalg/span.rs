//! Incremental row-echelon span with optional coordinate tracking.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Rational, SparseVector};

/// An echelon basis built one vector at a time.
///
/// Rows are primitive integer vectors keyed by their leading index. Some
/// inserted vectors may be *tracked*: each row then remembers which
/// combination of tracked inputs it equals modulo the untracked ones, so
/// [`SpanReducer::reduce`] can report coordinates of a vector on the tracked
/// inputs. This is how quotient coordinates `Z / B` are read off: boundaries
/// go in untracked, homology representatives tracked.
#[derive(Clone, Debug, Default)]
pub struct SpanReducer {
    rows: HashMap<usize, EchelonRow>,
    tracked: usize,
}

#[derive(Clone, Debug)]
struct EchelonRow {
    entries: Vec<(usize, BigInt)>,
    /// Sparse coordinates on the tracked inputs.
    track: BTreeMap<usize, Rational>,
}

/// Outcome of reducing a vector against the span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub in_span: bool,
    /// Coordinates on the tracked inputs, modulo untracked ones. Only
    /// meaningful when `in_span`.
    pub coordinates: Vec<Rational>,
}

struct Working {
    /// `multiplier * v_original = current + sum(lambda_i * row_i)`.
    multiplier: BigInt,
    current: BTreeMap<usize, BigInt>,
    /// `sum(lambda_i * track(row_i))`.
    acc: BTreeMap<usize, Rational>,
}

impl SpanReducer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Dimension of the span.
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Number of tracked inputs accepted so far.
    pub fn tracked(&self) -> usize {
        self.tracked
    }

    fn reduce_working(&self, v: &SparseVector) -> Working {
        let multiplier = v
            .entries()
            .iter()
            .fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
        let ints = v
            .entries()
            .iter()
            .map(|(c, x)| (*c, x.numer() * (&multiplier / x.denom())))
            .collect();
        let mut w = Working {
            multiplier,
            current: ints,
            acc: BTreeMap::new(),
        };
        let mut cursor = 0usize;
        loop {
            let Some((&j, b)) = w.current.range(cursor..).next() else {
                break;
            };
            let b = b.clone();
            cursor = j + 1;
            let Some(row) = self.rows.get(&j) else {
                continue;
            };
            let a = &row.entries[0].1;
            let g = a.gcd(&b);
            let (a, b) = (a / &g, &b / &g);
            for x in w.current.values_mut() {
                *x *= &a;
            }
            for (c, x) in &row.entries {
                let slot = w.current.entry(*c).or_insert_with(BigInt::zero);
                *slot -= &b * x;
                if slot.is_zero() {
                    w.current.remove(c);
                }
            }
            w.multiplier *= &a;
            let a_rat = Rational::from_integer(a.clone());
            let b_rat = Rational::from_integer(b.clone());
            for x in w.acc.values_mut() {
                *x *= &a_rat;
            }
            for (t, x) in &row.track {
                let slot = w.acc.entry(*t).or_insert_with(Rational::zero);
                *slot += &b_rat * x;
            }
            w.acc.retain(|_, x| !x.is_zero());
        }
        w
    }

    /// Reduces `v`; when it lies in the span, also returns its coordinates on
    /// the tracked inputs.
    pub fn reduce(&self, v: &SparseVector) -> Reduction {
        let w = self.reduce_working(v);
        let in_span = w.current.is_empty();
        let mut coordinates = vec![Rational::zero(); self.tracked];
        if in_span {
            let m = Rational::from_integer(w.multiplier);
            for (t, x) in w.acc {
                coordinates[t] = x / &m;
            }
        }
        Reduction {
            in_span,
            coordinates,
        }
    }

    pub fn contains(&self, v: &SparseVector) -> bool {
        self.reduce_working(v).current.is_empty()
    }

    /// Adds `v` to the span. Returns `false` (and changes nothing) when `v`
    /// is already in it. With `track = Some(t)`, `t` must equal
    /// [`SpanReducer::tracked`]: tracked inputs are numbered consecutively.
    pub fn insert(&mut self, v: &SparseVector, track: Option<usize>) -> bool {
        let w = self.reduce_working(v);
        if w.current.is_empty() {
            return false;
        }
        // new row = multiplier * v - acc-combination; track(v) = e_t.
        let mut track_map: BTreeMap<usize, Rational> =
            w.acc.into_iter().map(|(t, x)| (t, -x)).collect();
        if let Some(t) = track {
            assert_eq!(t, self.tracked, "tracked inputs must be numbered consecutively");
            track_map.insert(t, Rational::from_integer(w.multiplier.clone()));
            self.tracked += 1;
        }
        let mut entries: Vec<(usize, BigInt)> = w.current.into_iter().collect();
        let content = entries
            .iter()
            .fold(BigInt::zero(), |acc, (_, x)| acc.gcd(x));
        if entries[0].1.is_negative() {
            for (_, x) in &mut entries {
                *x = -x.clone();
            }
            for x in track_map.values_mut() {
                *x = -x.clone();
            }
        }
        if !content.is_one() {
            let c = Rational::from_integer(content.clone());
            for (_, x) in &mut entries {
                *x /= &content;
            }
            for x in track_map.values_mut() {
                *x /= &c;
            }
        }
        track_map.retain(|_, x| !x.is_zero());
        let lead = entries[0].0;
        self.rows.insert(
            lead,
            EchelonRow {
                entries,
                track: track_map,
            },
        );
        true
    }
}
