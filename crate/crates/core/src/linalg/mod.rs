//! Exact sparse linear algebra over the rationals.
//!
//! Matrices are immutable once built. Every rank, kernel and quotient
//! computation copies the entries into a private integer workspace (each row
//! scaled by the lcm of its denominators) and runs fraction-free elimination
//! there, first with checked `i64` arithmetic and, on overflow, again with
//! arbitrary-precision integers.

mod elim;
mod span;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub use num_rational::BigRational as Rational;

use crate::exec::Exec;
pub(crate) use elim::{eliminate_rows, Mode};
pub use span::SpanReducer;

/// Errors raised by the linear-algebra layer.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    /// An entry index lies outside the declared shape.
    #[error("entry ({row}, {col}) is outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    /// Two operands have incompatible shapes.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    /// `d_out * d_in` is not the zero matrix.
    #[error("composite of consecutive differentials is nonzero ({nonzero} nonzero entries)")]
    NotAComplex { nonzero: usize },
    /// Vectors handed to a basis constructor are linearly dependent.
    #[error("{count} vectors span only a {rank}-dimensional space")]
    Dependent { count: usize, rank: usize },
    /// A map fails to carry cycles to cycles or boundaries to boundaries.
    #[error("map does not preserve {what}: image of source vector {index} leaves the target subspace")]
    NotAChainMap { what: &'static str, index: usize },
}

/// Sparse rational vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVector {
    entries: Vec<(usize, Rational)>,
}

impl SparseVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a vector from arbitrary `(index, value)` pairs, summing repeats
    /// and dropping zeros.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut entries: Vec<(usize, Rational)> = entries.into_iter().collect();
        entries.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Rational)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        Self { entries: out }
    }

    pub fn from_integers(entries: impl IntoIterator<Item = (usize, i64)>) -> Self {
        Self::from_entries(
            entries
                .into_iter()
                .map(|(i, v)| (i, Rational::from_integer(BigInt::from(v)))),
        )
    }

    /// Unit vector `e_index`.
    pub fn unit(index: usize) -> Self {
        Self {
            entries: vec![(index, Rational::one())],
        }
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Rational {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .map(|pos| self.entries[pos].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// Largest stored index plus one (0 for the zero vector).
    pub fn support_bound(&self) -> usize {
        self.entries.last().map_or(0, |(i, _)| i + 1)
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            entries: self
                .entries
                .iter()
                .map(|(i, v)| (*i, v * factor))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_entries(self.entries.iter().chain(other.entries.iter()).cloned())
    }
}

/// Immutable sparse rational matrix, stored row by row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_entries: Vec<Vec<(usize, Rational)>>,
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMatrix({}x{}, nnz={})", self.rows, self.cols, self.nnz())?;
        if self.rows * self.cols <= 64 {
            for r in 0..self.rows {
                write!(f, "\n  [")?;
                for c in 0..self.cols {
                    write!(f, " {}", self.get(r, c))?;
                }
                write!(f, " ]")?;
            }
        }
        Ok(())
    }
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Repeated positions
    /// are summed; zero results are dropped.
    pub fn new(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self, LinalgError> {
        let mut row_entries: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(LinalgError::OutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            row_entries[r].push((c, v));
        }
        let row_entries = row_entries
            .into_iter()
            .map(|row| SparseVector::from_entries(row).entries)
            .collect();
        Ok(Self {
            rows,
            cols,
            row_entries,
        })
    }

    /// Integer-valued convenience constructor.
    pub fn from_integer_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self, LinalgError> {
        Self::new(
            rows,
            cols,
            triplets
                .into_iter()
                .map(|(r, c, v)| (r, c, Rational::from_integer(BigInt::from(v)))),
        )
    }

    /// Dense row-major integer matrix.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let triplets = rows.iter().enumerate().flat_map(|(r, row)| {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            row.iter().enumerate().map(move |(c, &v)| (r, c, v))
        });
        Self::from_integer_triplets(rows.len(), cols, triplets).expect("indices in range")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[SparseVector]) -> Result<Self, LinalgError> {
        let triplets = columns
            .iter()
            .enumerate()
            .flat_map(|(c, v)| v.entries().iter().map(move |(r, x)| (*r, c, x.clone())));
        Self::new(rows, columns.len(), triplets)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_entries: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Rational::one())
    }

    /// `value * I_n`.
    pub fn scalar(n: usize, value: Rational) -> Self {
        if value.is_zero() {
            return Self::zeros(n, n);
        }
        Self {
            rows: n,
            cols: n,
            row_entries: (0..n).map(|i| vec![(i, value.clone())]).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.row_entries.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.row_entries.iter().all(Vec::is_empty)
    }

    pub fn row(&self, r: usize) -> &[(usize, Rational)] {
        &self.row_entries[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.row_entries[r]
            .binary_search_by_key(&c, |(j, _)| *j)
            .map(|pos| self.row_entries[r][pos].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    /// All stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.row_entries
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn column(&self, c: usize) -> SparseVector {
        SparseVector::from_entries(
            self.row_entries
                .iter()
                .enumerate()
                .filter_map(|(r, row)| {
                    row.binary_search_by_key(&c, |(j, _)| *j)
                        .ok()
                        .map(|pos| (r, row[pos].1.clone()))
                }),
        )
    }

    pub fn columns(&self) -> Vec<SparseVector> {
        let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.cols];
        for (r, c, v) in self.triplets() {
            cols[c].push((r, v.clone()));
        }
        cols.into_iter()
            .map(|entries| SparseVector { entries })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let triplets = self.triplets().map(|(r, c, v)| (c, r, v.clone()));
        Self::new(self.cols, self.rows, triplets).expect("transposed indices in range")
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            row_entries: self
                .row_entries
                .iter()
                .map(|row| row.iter().map(|(c, v)| (*c, v * factor)).collect())
                .collect(),
        }
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let row_entries = self
            .row_entries
            .iter()
            .map(|row| {
                SparseVector::from_entries(row.iter().flat_map(|(k, a)| {
                    other.row_entries[*k].iter().map(move |(c, b)| (*c, a * b))
                }))
                .entries
            })
            .collect();
        Ok(SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            row_entries,
        })
    }

    /// `self - other`.
    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot subtract {}x{} from {}x{}",
                other.rows, other.cols, self.rows, self.cols
            )));
        }
        let row_entries = self
            .row_entries
            .iter()
            .zip(&other.row_entries)
            .map(|(a, b)| {
                SparseVector::from_entries(
                    a.iter()
                        .cloned()
                        .chain(b.iter().map(|(c, v)| (*c, -v.clone()))),
                )
                .entries
            })
            .collect();
        Ok(SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            row_entries,
        })
    }

    pub fn mul_vec(&self, v: &SparseVector) -> SparseVector {
        SparseVector::from_entries(self.row_entries.iter().enumerate().filter_map(|(r, row)| {
            let mut acc = Rational::zero();
            let (mut i, mut j) = (0, 0);
            let entries = v.entries();
            while i < row.len() && j < entries.len() {
                match row[i].0.cmp(&entries[j].0) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        acc += &row[i].1 * &entries[j].1;
                        i += 1;
                        j += 1;
                    }
                }
            }
            (!acc.is_zero()).then_some((r, acc))
        }))
    }

    /// Reorders rows and columns: entry `(r, c)` moves to
    /// `(row_perm[r], col_perm[c])`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> SparseMatrix {
        assert_eq!(row_perm.len(), self.rows);
        assert_eq!(col_perm.len(), self.cols);
        let triplets = self
            .triplets()
            .map(|(r, c, v)| (row_perm[r], col_perm[c], v.clone()));
        SparseMatrix::new(self.rows, self.cols, triplets).expect("permutation in range")
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            out[r][c] = v.clone();
        }
        out
    }

    /// Rows scaled to primitive integer vectors, ready for elimination.
    pub(crate) fn integer_rows(&self) -> Vec<Vec<(usize, BigInt)>> {
        self.row_entries.iter().map(|row| integerize(row)).collect()
    }
}

/// Scales a rational sparse row by the lcm of its denominators and divides
/// out the content, yielding a primitive integer row with the same span.
pub(crate) fn integerize(row: &[(usize, Rational)]) -> Vec<(usize, BigInt)> {
    use num_integer::Integer;
    if row.is_empty() {
        return Vec::new();
    }
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let mut ints: Vec<(usize, BigInt)> = row
        .iter()
        .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
        .collect();
    let content = ints
        .iter()
        .fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if !content.is_one() && !content.is_zero() {
        for (_, v) in &mut ints {
            *v /= &content;
        }
    }
    ints
}

/// Linearly independent vectors in `Q^ambient_dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<SparseVector>,
}

impl SubspaceBasis {
    /// Checked constructor: fails unless the vectors are independent and fit
    /// the ambient dimension.
    pub fn new(ambient_dim: usize, vectors: Vec<SparseVector>) -> Result<Self, LinalgError> {
        if let Some(v) = vectors.iter().find(|v| v.support_bound() > ambient_dim) {
            return Err(LinalgError::OutOfBounds {
                row: v.support_bound() - 1,
                col: 0,
                rows: ambient_dim,
                cols: 1,
            });
        }
        let basis = Self {
            ambient_dim,
            vectors,
        };
        let r = rank(&basis.as_matrix());
        if r != basis.len() {
            return Err(LinalgError::Dependent {
                count: basis.len(),
                rank: r,
            });
        }
        Ok(basis)
    }

    pub(crate) fn new_unchecked(ambient_dim: usize, vectors: Vec<SparseVector>) -> Self {
        Self {
            ambient_dim,
            vectors,
        }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self::new_unchecked(ambient_dim, Vec::new())
    }

    /// Standard basis `e_0, ..., e_{n-1}`.
    pub fn full(ambient_dim: usize) -> Self {
        Self::new_unchecked(ambient_dim, (0..ambient_dim).map(SparseVector::unit).collect())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vectors(&self) -> &[SparseVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// The basis vectors as the columns of an `ambient_dim x len` matrix.
    pub fn as_matrix(&self) -> SparseMatrix {
        SparseMatrix::from_columns(self.ambient_dim, &self.vectors)
            .expect("basis vectors fit the ambient dimension")
    }
}

/// Rank of `m` over Q.
pub fn rank(m: &SparseMatrix) -> usize {
    rank_with(m, Exec::default())
}

pub fn rank_with(m: &SparseMatrix, exec: Exec) -> usize {
    eliminate_rows(m.integer_rows(), m.cols(), Mode::Forward, exec).rank()
}

/// Basis of `{ v : m v = 0 }`, one vector per non-pivot column, ordered by
/// that column.
pub fn kernel_basis(m: &SparseMatrix) -> SubspaceBasis {
    kernel_basis_with(m, Exec::default())
}

pub fn kernel_basis_with(m: &SparseMatrix, exec: Exec) -> SubspaceBasis {
    let reduced = eliminate_rows(m.integer_rows(), m.cols(), Mode::Reduced, exec);
    SubspaceBasis::new_unchecked(m.cols(), reduced.kernel_vectors(m.cols()))
}

/// Basis of the column space, made of original columns of `m` at pivot
/// positions (ascending column order).
pub fn column_space_basis(m: &SparseMatrix) -> SubspaceBasis {
    column_space_basis_with(m, Exec::default())
}

pub fn column_space_basis_with(m: &SparseMatrix, exec: Exec) -> SubspaceBasis {
    let elim = eliminate_rows(m.integer_rows(), m.cols(), Mode::Forward, exec);
    let mut pivot_cols = elim.pivot_columns();
    pivot_cols.sort_unstable();
    let columns = m.columns();
    SubspaceBasis::new_unchecked(
        m.rows(),
        pivot_cols.into_iter().map(|c| columns[c].clone()).collect(),
    )
}

/// `dim ker(d_out) - rank(d_in)` for the middle space of
/// `. --d_in--> V --d_out--> .`.
pub fn homology_dims(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<usize, LinalgError> {
    if d_out.cols() != d_in.rows() {
        return Err(LinalgError::ShapeMismatch(format!(
            "d_out has {} columns but d_in has {} rows",
            d_out.cols(),
            d_in.rows()
        )));
    }
    let composite = d_out.mul(d_in)?;
    if !composite.is_zero() {
        return Err(LinalgError::NotAComplex {
            nonzero: composite.nnz(),
        });
    }
    let kernel = d_out.cols() - rank(d_out);
    Ok(kernel - rank(d_in))
}

/// Matrix of the map `Z_src / B_src -> Z_dst / B_dst` induced by `f`.
///
/// Quotient bases are the cycle vectors that are independent modulo the
/// boundaries, taken greedily in the order given; with cycle lists that
/// extend a boundary basis (as produced by the CE layer) these are exactly
/// the trailing cycle vectors. Rows index the target quotient basis, columns
/// the source one.
pub fn induced_map_on_quotients(
    f: &SparseMatrix,
    src_cycles: &SubspaceBasis,
    src_boundaries: &SubspaceBasis,
    dst_cycles: &SubspaceBasis,
    dst_boundaries: &SubspaceBasis,
) -> Result<SparseMatrix, LinalgError> {
    if f.cols() != src_cycles.ambient_dim()
        || f.cols() != src_boundaries.ambient_dim()
        || f.rows() != dst_cycles.ambient_dim()
        || f.rows() != dst_boundaries.ambient_dim()
    {
        return Err(LinalgError::ShapeMismatch(format!(
            "map is {}x{}, source ambient {}/{}, target ambient {}/{}",
            f.rows(),
            f.cols(),
            src_cycles.ambient_dim(),
            src_boundaries.ambient_dim(),
            dst_cycles.ambient_dim(),
            dst_boundaries.ambient_dim()
        )));
    }

    let mut target = SpanReducer::new();
    for b in dst_boundaries.vectors() {
        target.insert(b, None);
    }
    for (index, b) in src_boundaries.vectors().iter().enumerate() {
        if !target.reduce(&f.mul_vec(b)).in_span {
            return Err(LinalgError::NotAChainMap {
                what: "boundaries",
                index,
            });
        }
    }
    let mut dst_quotient_dim = 0;
    for z in dst_cycles.vectors() {
        if target.insert(z, Some(dst_quotient_dim)) {
            dst_quotient_dim += 1;
        }
    }

    let mut source = SpanReducer::new();
    for b in src_boundaries.vectors() {
        source.insert(b, None);
    }
    let mut triplets = Vec::new();
    let mut src_quotient_dim = 0;
    for (index, z) in src_cycles.vectors().iter().enumerate() {
        if !source.insert(z, None) {
            continue;
        }
        let reduced = target.reduce(&f.mul_vec(z));
        if !reduced.in_span {
            return Err(LinalgError::NotAChainMap {
                what: "cycles",
                index,
            });
        }
        for (row, coeff) in reduced.coordinates.into_iter().enumerate() {
            if !coeff.is_zero() {
                triplets.push((row, src_quotient_dim, coeff));
            }
        }
        src_quotient_dim += 1;
    }
    SparseMatrix::new(dst_quotient_dim, src_quotient_dim, triplets)
}

/// Textbook rational Gauss elimination on a dense copy. Kept independent of
/// the sparse fraction-free engine so tests can compare the two.
pub fn naive_dense_rank(m: &SparseMatrix) -> usize {
    let mut a = m.to_dense();
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][c].clone();
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let factor = &a[r][c] / &pivot;
                for j in c..cols {
                    let delta = &factor * &a[rank][j];
                    a[r][j] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}
