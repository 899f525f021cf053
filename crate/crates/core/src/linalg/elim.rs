//! Sparse fraction-free Gaussian elimination with Markowitz-style pivoting.
//!
//! Row updates are `row_i <- a * row_i - b * row_p` with `a` the pivot and
//! `b` the entry of `row_i` in the pivot column, followed by division by the
//! row content. No division ever leaves the integers, and dividing out the
//! content keeps entries small on the very sparse, small-coefficient
//! matrices the CE complexes produce.
//!
//! The pivot is the entry minimising `nnz(row) + nnz(column)` over active
//! rows, ties broken by lowest `(row, col)`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Rational, SparseVector};
use crate::exec::Exec;

/// What the elimination has to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Eliminate below/around pivots only among not-yet-pivoted rows. Enough
    /// for rank and pivot columns.
    Forward,
    /// Gauss-Jordan: each pivot column is cleared from every other row,
    /// including earlier pivot rows. Needed for kernels.
    Reduced,
}

/// Integer scalar usable by the elimination engine.
pub(crate) trait Ring: Clone + Send + Sync + PartialEq {
    fn is_zero(&self) -> bool;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    /// `a * x - b * y`, or `None` on overflow.
    fn cross(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    /// `a * x`, or `None` on overflow.
    fn times(a: &Self, x: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn is_unit(&self) -> bool;
    fn div_exact(&self, d: &Self) -> Self;
}

impl Ring for i64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        // Keep headroom so that |entries| stay below 2^62 and negation is safe.
        v.to_i64().filter(|x| x.unsigned_abs() < (1 << 62))
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn cross(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn times(a: &Self, x: &Self) -> Option<Self> {
        a.checked_mul(*x)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn is_unit(&self) -> bool {
        self.unsigned_abs() == 1
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
}

impl Ring for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn cross(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn times(a: &Self, x: &Self) -> Option<Self> {
        Some(a * x)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
}

type Row<T> = Vec<(usize, T)>;

/// Result of an elimination, in arbitrary precision.
#[derive(Clone, Debug)]
pub(crate) struct IntRows {
    rows: Vec<Row<BigInt>>,
    /// `(row, col)` in selection order.
    pivots: Vec<(usize, usize)>,
}

impl IntRows {
    pub(crate) fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub(crate) fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.iter().map(|&(_, c)| c).collect()
    }

    /// Kernel basis read off a `Mode::Reduced` elimination.
    pub(crate) fn kernel_vectors(&self, cols: usize) -> Vec<SparseVector> {
        let mut is_pivot = vec![false; cols];
        for &(_, c) in &self.pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
        let mut slot = vec![usize::MAX; cols];
        for (i, &c) in free.iter().enumerate() {
            slot[c] = i;
        }
        let mut entries: Vec<Vec<(usize, Rational)>> = free
            .iter()
            .map(|&f| vec![(f, Rational::one())])
            .collect();
        for &(r, p) in &self.pivots {
            let row = &self.rows[r];
            let pivot = row
                .iter()
                .find(|(c, _)| *c == p)
                .map(|(_, v)| v.clone())
                .expect("pivot entry present");
            for (c, v) in row {
                if *c != p {
                    debug_assert!(!is_pivot[*c], "reduced form clears other pivot columns");
                    entries[slot[*c]].push((p, Rational::new(-v.clone(), pivot.clone())));
                }
            }
        }
        entries.into_iter().map(SparseVector::from_entries).collect()
    }
}

/// Runs the elimination on primitive integer rows, trying `i64` first.
pub(crate) fn eliminate_rows(
    rows: Vec<Row<BigInt>>,
    cols: usize,
    mode: Mode,
    exec: Exec,
) -> IntRows {
    let small: Option<Vec<Row<i64>>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|(c, v)| i64::from_big(v).map(|x| (*c, x)))
                .collect()
        })
        .collect();
    if let Some(small) = small {
        if let Some(done) = Engine::new(small, cols, mode).run(exec) {
            return IntRows {
                rows: done
                    .rows
                    .into_iter()
                    .map(|row| row.into_iter().map(|(c, v)| (c, v.to_big())).collect())
                    .collect(),
                pivots: done.pivots,
            };
        }
    }
    let done = Engine::new(rows, cols, mode)
        .run(exec)
        .expect("arbitrary precision never overflows");
    IntRows {
        rows: done.rows,
        pivots: done.pivots,
    }
}

struct Done<T> {
    rows: Vec<Row<T>>,
    pivots: Vec<(usize, usize)>,
}

struct Engine<T> {
    rows: Vec<Row<T>>,
    col_rows: Vec<BTreeSet<usize>>,
    /// `(nnz, row)` of rows not yet used as pivots.
    active: BTreeSet<(usize, usize)>,
    mode: Mode,
}

/// Below this many rows to update, a pivot step stays on one thread.
const PARALLEL_UPDATE_THRESHOLD: usize = 64;

impl<T: Ring> Engine<T> {
    fn new(rows: Vec<Row<T>>, cols: usize, mode: Mode) -> Self {
        let mut col_rows = vec![BTreeSet::new(); cols];
        let mut active = BTreeSet::new();
        for (r, row) in rows.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            active.insert((row.len(), r));
            for (c, _) in row {
                col_rows[*c].insert(r);
            }
        }
        Self {
            rows,
            col_rows,
            active,
            mode,
        }
    }

    fn select_pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for &(len, r) in &self.active {
            if let Some((cost, _, _)) = best {
                if len + 1 > cost {
                    break;
                }
            }
            for (c, _) in &self.rows[r] {
                let candidate = (len + self.col_rows[*c].len(), r, *c);
                if best.map_or(true, |b| candidate < b) {
                    best = Some(candidate);
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    fn run(mut self, exec: Exec) -> Option<Done<T>> {
        let mut pivots = Vec::new();
        while let Some((pr, pc)) = self.select_pivot() {
            self.active.remove(&(self.rows[pr].len(), pr));
            let targets: Vec<usize> = self.col_rows[pc]
                .iter()
                .copied()
                .filter(|&i| i != pr)
                .collect();
            if self.mode == Mode::Forward {
                for (c, _) in &self.rows[pr] {
                    self.col_rows[*c].remove(&pr);
                }
            }

            let pivot_row = &self.rows[pr];
            let pivot_val = pivot_row
                .iter()
                .find(|(c, _)| *c == pc)
                .map(|(_, v)| v.clone())
                .expect("pivot entry present");
            let rows = &self.rows;
            let update = |&i: &usize| -> Option<Row<T>> {
                let row = &rows[i];
                let b = row
                    .iter()
                    .find(|(c, _)| *c == pc)
                    .map(|(_, v)| v.clone())
                    .expect("target row has an entry in the pivot column");
                combine(&pivot_val, row, &b, pivot_row)
            };
            let updated: Vec<Option<Row<T>>> =
                if exec.is_parallel() && targets.len() >= PARALLEL_UPDATE_THRESHOLD {
                    exec.map(&targets, update)
                } else {
                    targets.iter().map(update).collect()
                };

            for (i, new_row) in targets.into_iter().zip(updated) {
                let new_row = new_row?;
                self.replace_row(i, new_row);
            }
            pivots.push((pr, pc));
        }
        Some(Done {
            rows: self.rows,
            pivots,
        })
    }

    fn replace_row(&mut self, i: usize, new_row: Row<T>) {
        let was_active = self.active.remove(&(self.rows[i].len(), i));
        let old = std::mem::take(&mut self.rows[i]);
        let (mut a, mut b) = (0, 0);
        while a < old.len() || b < new_row.len() {
            let oc = old.get(a).map(|(c, _)| *c);
            let nc = new_row.get(b).map(|(c, _)| *c);
            match (oc, nc) {
                (Some(x), Some(y)) if x == y => {
                    a += 1;
                    b += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    self.col_rows[x].remove(&i);
                    a += 1;
                }
                (Some(x), None) => {
                    self.col_rows[x].remove(&i);
                    a += 1;
                }
                (_, Some(y)) => {
                    self.col_rows[y].insert(i);
                    b += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        if was_active && !new_row.is_empty() {
            self.active.insert((new_row.len(), i));
        }
        self.rows[i] = new_row;
    }
}

/// `a * x - b * y` on sorted sparse rows, made primitive.
fn combine<T: Ring>(a: &T, x: &[(usize, T)], b: &T, y: &[(usize, T)]) -> Option<Row<T>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let xi = x.get(i).map(|(c, _)| *c);
        let yj = y.get(j).map(|(c, _)| *c);
        match (xi, yj) {
            (Some(cx), Some(cy)) if cx == cy => {
                let v = T::cross(a, &x[i].1, b, &y[j].1)?;
                if !v.is_zero() {
                    out.push((cx, v));
                }
                i += 1;
                j += 1;
            }
            (Some(cx), Some(cy)) if cx < cy => {
                out.push((cx, T::times(a, &x[i].1)?));
                i += 1;
            }
            (Some(cx), None) => {
                out.push((cx, T::times(a, &x[i].1)?));
                i += 1;
            }
            (_, Some(cy)) => {
                out.push((cy, T::times(b, &y[j].1)?.neg()?));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    make_primitive(&mut out);
    Some(out)
}

fn make_primitive<T: Ring>(row: &mut Row<T>) {
    let Some((_, first)) = row.first() else {
        return;
    };
    let mut g = first.clone();
    for (_, v) in row.iter().skip(1) {
        if g.is_unit() {
            return;
        }
        g = g.gcd(v);
    }
    if g.is_unit() || g.is_zero() {
        return;
    }
    for (_, v) in row.iter_mut() {
        *v = v.div_exact(&g);
    }
}
