//! Exact sparse linear algebra over the rationals.
//!
//! Matrices are stored by column. Every rank, kernel and eigenspace
//! computation clears denominators column by column and runs the integer
//! elimination in [`elim`], so results are exact.

pub(crate) mod elim;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use elim::{ElimOptions, IntVec, IntVectors};

pub use elim_api::*;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse vector: strictly increasing indices, nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SparseVector {
    entries: Vec<(u32, Rational)>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from unsorted entries; duplicates are summed and zeros dropped.
    pub fn from_entries(entries: impl IntoIterator<Item = (u32, Rational)>) -> Self {
        let mut m: BTreeMap<u32, Rational> = BTreeMap::new();
        for (i, x) in entries {
            *m.entry(i).or_insert_with(Rational::zero) += x;
        }
        SparseVector {
            entries: m.into_iter().filter(|(_, x)| !x.is_zero()).collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(entries: Vec<(u32, Rational)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|e| !e.1.is_zero()));
        SparseVector { entries }
    }

    pub fn from_dense(v: &[Rational]) -> Self {
        SparseVector {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i as u32, x.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, x) in &self.entries {
            out[*i as usize] = x.clone();
        }
        out
    }

    pub fn entries(&self) -> &[(u32, Rational)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: u32) -> Rational {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(p) => self.entries[p].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::new();
        }
        SparseVector {
            entries: self.entries.iter().map(|(i, x)| (*i, x * s)).collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: &Rational, other: &SparseVector) -> Self {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, &b[j].1 * s));
                j += 1;
            } else {
                let v = &a[i].1 + &b[j].1 * s;
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        out.retain(|e| !e.1.is_zero());
        SparseVector { entries: out }
    }

    pub fn add(&self, other: &SparseVector) -> Self {
        self.axpy(&Rational::one(), other)
    }

    pub fn sub(&self, other: &SparseVector) -> Self {
        self.axpy(&-Rational::one(), other)
    }

    /// Primitive integer form (denominators cleared, content removed).
    pub(crate) fn to_primitive_ints(&self) -> IntVec<BigInt> {
        primitive_ints(&self.entries)
    }
}

pub(crate) fn primitive_ints(entries: &[(u32, Rational)]) -> IntVec<BigInt> {
    if entries.is_empty() {
        return Vec::new();
    }
    let mut l = BigInt::one();
    for (_, x) in entries {
        l = l.lcm(x.denom());
    }
    let mut out: IntVec<BigInt> = entries
        .iter()
        .map(|(i, x)| (*i, x.numer() * (&l / x.denom())))
        .collect();
    let mut g = BigInt::zero();
    for (_, x) in &out {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if !g.is_one() && !g.is_zero() {
        for e in out.iter_mut() {
            e.1 = &e.1 / &g;
        }
    }
    out
}

fn small_ints(entries: &[(u32, Rational)]) -> Option<IntVec<i64>> {
    let mut out = Vec::with_capacity(entries.len());
    let mut all_int = true;
    for (i, x) in entries {
        if !x.is_integer() {
            all_int = false;
            break;
        }
        match x.numer().to_i64() {
            Some(v) if v != i64::MIN => out.push((*i, v)),
            _ => return None,
        }
    }
    if all_int {
        return Some(out);
    }
    let big = primitive_ints(entries);
    let mut out = Vec::with_capacity(big.len());
    for (i, x) in big {
        match x.to_i64() {
            Some(v) if v != i64::MIN => out.push((i, v)),
            _ => return None,
        }
    }
    Some(out)
}

pub(crate) fn to_int_vectors<'a>(cols: impl Iterator<Item = &'a [(u32, Rational)]>) -> IntVectors {
    let cols: Vec<&[(u32, Rational)]> = cols.collect();
    let mut small = Vec::with_capacity(cols.len());
    for c in &cols {
        match small_ints(c) {
            Some(v) => small.push(v),
            None => return IntVectors::Big(cols.iter().map(|c| primitive_ints(c)).collect()),
        }
    }
    IntVectors::Small(small)
}

fn int_to_rational(v: &[(u32, BigInt)]) -> SparseVector {
    SparseVector::from_sorted_unchecked(
        {
            let mut e: Vec<(u32, Rational)> = v
                .iter()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (*i, Rational::from_integer(x.clone())))
                .collect();
            e.sort_unstable_by_key(|x| x.0);
            e
        },
    )
}

/// Sparse rational matrix stored by column.
pub struct SparseMatrix {
    nrows: usize,
    columns: Vec<SparseVector>,
    rank: OnceLock<usize>,
}

impl Clone for SparseMatrix {
    fn clone(&self) -> Self {
        let rank = OnceLock::new();
        if let Some(r) = self.rank.get() {
            let _ = rank.set(*r);
        }
        SparseMatrix {
            nrows: self.nrows,
            columns: self.columns.clone(),
            rank,
        }
    }
}

impl PartialEq for SparseMatrix {
    fn eq(&self, o: &Self) -> bool {
        self.nrows == o.nrows && self.columns == o.columns
    }
}
impl Eq for SparseMatrix {}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMatrix {}x{} [", self.nrows, self.ncols())?;
        for r in 0..self.nrows.min(12) {
            write!(f, "\n  ")?;
            for c in 0..self.ncols().min(12) {
                write!(f, "{} ", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            nrows: rows,
            columns: vec![SparseVector::new(); cols],
            rank: OnceLock::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &Rational::one())
    }

    pub fn scalar(n: usize, s: &Rational) -> Self {
        let columns = (0..n)
            .map(|i| {
                if s.is_zero() {
                    SparseVector::new()
                } else {
                    SparseVector::from_sorted_unchecked(vec![(i as u32, s.clone())])
                }
            })
            .collect();
        SparseMatrix {
            nrows: n,
            columns,
            rank: OnceLock::new(),
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVector>) -> Self {
        for c in &columns {
            if let Some(&(i, _)) = c.entries.last() {
                assert!((i as usize) < rows, "row index {i} out of range {rows}");
            }
        }
        SparseMatrix {
            nrows: rows,
            columns,
            rank: OnceLock::new(),
        }
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Self {
        let mut per_col: Vec<Vec<(u32, Rational)>> = vec![Vec::new(); cols];
        for (r, c, x) in triplets {
            assert!(r < rows && c < cols, "entry ({r},{c}) out of range");
            per_col[c].push((r as u32, x));
        }
        let columns = per_col.into_iter().map(SparseVector::from_entries).collect();
        Self::from_columns(rows, columns)
    }

    /// Build from dense rows of integers.
    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::from_triplets(
            nrows,
            ncols,
            rows.iter().enumerate().flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, x)| **x != 0)
                    .map(move |(c, x)| (r, c, rat(*x)))
            }),
        )
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::from_triplets(
            nrows,
            ncols,
            rows.iter().enumerate().flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(move |(c, x)| (r, c, x.clone()))
            }),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &SparseVector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVector] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.columns[c].get(r as u32)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.nnz()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.ncols()]; self.nrows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in &col.entries {
                out[*i as usize][j] = x.clone();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut per_row: Vec<Vec<(u32, Rational)>> = vec![Vec::new(); self.nrows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, x) in &col.entries {
                per_row[*i as usize].push((j as u32, x.clone()));
            }
        }
        let columns = per_row
            .into_iter()
            .map(SparseVector::from_sorted_unchecked)
            .collect();
        let t = SparseMatrix::from_columns(self.ncols(), columns);
        if let Some(r) = self.rank.get() {
            let _ = t.rank.set(*r);
        }
        t
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        let mut acc: BTreeMap<u32, Rational> = BTreeMap::new();
        for (j, x) in &v.entries {
            for (i, y) in &self.columns[*j as usize].entries {
                *acc.entry(*i).or_insert_with(Rational::zero) += x * y;
            }
        }
        SparseVector {
            entries: acc.into_iter().filter(|(_, x)| !x.is_zero()).collect(),
        }
    }

    /// Product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols() != other.nrows {
            return Err(Error::Unsupported(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows,
                self.ncols(),
                other.nrows,
                other.ncols()
            )));
        }
        let columns = other.columns.iter().map(|c| self.apply(c)).collect();
        Ok(SparseMatrix::from_columns(self.nrows, columns))
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.combine(other, &Rational::one())
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.combine(other, &-Rational::one())
    }

    fn combine(&self, other: &SparseMatrix, s: &Rational) -> Result<SparseMatrix> {
        if self.nrows != other.nrows || self.ncols() != other.ncols() {
            return Err(Error::Unsupported(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.nrows,
                self.ncols(),
                other.nrows,
                other.ncols()
            )));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.axpy(s, b))
            .collect();
        Ok(SparseMatrix::from_columns(self.nrows, columns))
    }

    pub fn scale(&self, s: &Rational) -> SparseMatrix {
        SparseMatrix::from_columns(self.nrows, self.columns.iter().map(|c| c.scale(s)).collect())
    }

    /// Rank over the rationals (cached).
    pub fn rank(&self) -> usize {
        *self.rank.get_or_init(|| rank_of_columns(&self.columns, self.nrows))
    }

    /// Basis of the right kernel `{v : self * v = 0}`.
    pub fn kernel_basis(&self) -> Vec<SparseVector> {
        let e = elim::eliminate(
            to_int_vectors(self.columns.iter().map(|c| c.entries())),
            self.nrows,
            ElimOptions {
                track_kernel: true,
                keep_pivot_rows: false,
            },
        );
        let _ = self.rank.set(e.rank);
        let mut out: Vec<SparseVector> = e.kernel.iter().map(|k| int_to_rational(k)).collect();
        out.sort_by(|a, b| a.entries.iter().map(|e| e.0).cmp(b.entries.iter().map(|e| e.0)));
        out
    }

    /// Indices of a maximal set of linearly independent columns.
    pub fn independent_columns(&self) -> Vec<usize> {
        let (r, mut piv) = rank_and_pivots(&self.columns, self.nrows);
        let _ = self.rank.set(r);
        piv.sort_unstable();
        piv
    }

    /// Basis of `{v : self * v = lambda v}`.
    pub fn eigenspace(&self, lambda: &Rational) -> Result<Vec<SparseVector>> {
        if self.nrows != self.ncols() {
            return Err(Error::NotSquare {
                rows: self.nrows,
                cols: self.ncols(),
            });
        }
        let shifted = self.sub(&SparseMatrix::scalar(self.nrows, lambda))?;
        Ok(shifted.kernel_basis())
    }
}

/// Rank of the span of `cols` (vectors of length `nrows`).
///
/// Eliminates along whichever side has fewer vectors: dependent vectors are the
/// expensive ones, and there are `count - rank` of them.
pub fn rank_of_columns(cols: &[SparseVector], nrows: usize) -> usize {
    if nrows < cols.len() {
        let mut rows: Vec<Vec<(u32, Rational)>> = vec![Vec::new(); nrows];
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.entries() {
                rows[*i as usize].push((j as u32, x.clone()));
            }
        }
        let rows: Vec<SparseVector> = rows.into_iter().map(SparseVector::from_sorted_unchecked).collect();
        return rank_and_pivots(&rows, cols.len()).0;
    }
    rank_and_pivots(cols, nrows).0
}

/// Rank of the span of machine-integer vectors of length `nrows`.
pub(crate) fn rank_of_i64_columns(cols: Vec<Vec<(u32, i64)>>, nrows: usize) -> usize {
    if nrows < cols.len() {
        let mut rows: Vec<Vec<(u32, i64)>> = vec![Vec::new(); nrows];
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c {
                rows[*i as usize].push((j as u32, *x));
            }
        }
        let n = cols.len();
        return elim::rank_small(rows, n).0;
    }
    elim::rank_small(cols, nrows).0
}

fn rank_and_pivots(cols: &[SparseVector], nrows: usize) -> (usize, Vec<usize>) {
    match to_int_vectors(cols.iter().map(|c| c.entries())) {
        IntVectors::Small(v) => {
            let (r, p) = elim::rank_small(v, nrows);
            (r, p.into_iter().map(|x| x as usize).collect())
        }
        big => {
            let e = elim::eliminate(big, nrows, ElimOptions::default());
            (e.rank, e.pivot_ids.into_iter().map(|x| x as usize).collect())
        }
    }
}

/// Dimension of `ker(d_out) / im(d_in)` for `V --d_in--> W --d_out--> U`.
///
/// Fails with a composition error if `d_out * d_in != 0`.
pub fn homology_dim(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<usize> {
    if d_in.nrows() != d_out.ncols() {
        return Err(Error::Unsupported(format!(
            "differentials do not compose: {}x{} after {}x{}",
            d_out.nrows(),
            d_out.ncols(),
            d_in.nrows(),
            d_in.ncols()
        )));
    }
    let comp = d_out.mul(d_in)?;
    if !comp.is_zero() {
        return Err(Error::CompositionNonzero(format!(
            "{} nonzero entries in the composite",
            comp.nnz()
        )));
    }
    Ok(d_out.ncols() - d_out.rank() - d_in.rank())
}

/// Rank of the span of `vectors` modulo the span of `modulo`, both in a space of dimension `dim`.
///
/// With `vectors` the images of a cycle basis and `modulo` the boundaries,
/// this is the rank of the induced map on homology.
pub fn rank_modulo(vectors: &[SparseVector], modulo: &[SparseVector], dim: usize) -> usize {
    let mut all: Vec<SparseVector> = modulo.to_vec();
    all.extend(vectors.iter().cloned());
    rank_of_columns(&all, dim) - rank_of_columns(modulo, dim)
}

mod elim_api {
    use super::*;

    /// Reducer modulo a subspace spanned by given vectors.
    #[derive(Clone, Debug, Default)]
    pub struct Subspace {
        ech: elim::Echelon,
    }

    impl Subspace {
        pub fn spanned_by<'a>(vectors: impl IntoIterator<Item = &'a SparseVector>, dim: usize) -> Self {
            let vs: Vec<&SparseVector> = vectors.into_iter().collect();
            let e = elim::eliminate(
                to_int_vectors(vs.iter().map(|v| v.entries())),
                dim,
                ElimOptions {
                    keep_pivot_rows: true,
                    track_kernel: false,
                },
            );
            Subspace {
                ech: elim::Echelon::from_elimination(&e),
            }
        }

        pub fn dim(&self) -> usize {
            self.ech.dim()
        }

        pub fn contains(&self, v: &SparseVector) -> bool {
            self.ech.reduce(&v.to_primitive_ints()).is_empty()
        }

        /// Add a vector; returns false if it was already in the subspace.
        pub fn insert(&mut self, v: &SparseVector) -> bool {
            self.ech.insert(&v.to_primitive_ints())
        }
    }

    /// Sign-normalised representative of a line: primitive integer vector with
    /// positive leading entry.
    pub fn normalize_direction(v: &SparseVector) -> SparseVector {
        let mut p = v.to_primitive_ints();
        if p.first().is_some_and(|e| e.1.is_negative()) {
            for e in p.iter_mut() {
                e.1 = -e.1.clone();
            }
        }
        int_to_rational(&p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_of_rank_one_matrix() {
        let m = SparseMatrix::from_rows_i64(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel_basis().len(), 1);
    }

    #[test]
    fn kernel_of_row_vector() {
        let m = SparseMatrix::from_rows_i64(&[vec![1, 1, 1]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(v).is_zero());
        }
    }

    #[test]
    fn homology_of_exact_sequence_is_zero() {
        // Q --(1)--> Q --(0)--> Q
        let d_in = SparseMatrix::from_rows_i64(&[vec![1]]);
        let d_out = SparseMatrix::from_rows_i64(&[vec![0]]);
        assert_eq!(homology_dim(&d_in, &d_out).unwrap(), 0);
        let zero = SparseMatrix::zeros(1, 1);
        assert_eq!(homology_dim(&zero, &zero).unwrap(), 1);
    }

    #[test]
    fn homology_rejects_non_complex() {
        let d = SparseMatrix::from_rows_i64(&[vec![1]]);
        let err = homology_dim(&d, &d).unwrap_err();
        assert!(matches!(err, Error::CompositionNonzero(_)));
    }

    #[test]
    fn eigenspaces_of_swap() {
        let m = SparseMatrix::from_rows_i64(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.eigenspace(&rat(1)).unwrap().len(), 1);
        assert_eq!(m.eigenspace(&rat(-1)).unwrap().len(), 1);
        assert_eq!(m.eigenspace(&rat(2)).unwrap().len(), 0);
        let r = SparseMatrix::zeros(2, 3);
        assert!(matches!(r.eigenspace(&rat(0)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn rational_entries() {
        let m = SparseMatrix::from_rows(&[
            vec![rat_frac(1, 2), rat_frac(1, 3)],
            vec![rat_frac(3, 2), rat(1)],
        ]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn subspace_membership() {
        let a = SparseVector::from_dense(&[rat(1), rat(1), rat(0)]);
        let b = SparseVector::from_dense(&[rat(0), rat(1), rat(1)]);
        let mut s = Subspace::spanned_by([&a, &b], 3);
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&a.sub(&b)));
        assert!(!s.contains(&SparseVector::from_dense(&[rat(1), rat(0), rat(0)])));
        assert!(!s.insert(&a.add(&b)));
        assert!(s.insert(&SparseVector::from_dense(&[rat(0), rat(0), rat(5)])));
        assert_eq!(s.dim(), 3);
    }

    /// Plain dense Gaussian elimination, kept deliberately naive.
    fn dense_rank(rows: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|x| rat(*x)).collect())
            .collect();
        let ncols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for i in 0..m.len() {
                if i != rank && !m[i][c].is_zero() {
                    let f = &m[i][c] / &m[rank][c];
                    for k in 0..ncols {
                        let d = &f * &m[rank][k];
                        m[i][k] -= d;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                proptest::collection::vec(prop_oneof![3 => Just(0i64), 2 => -4i64..5], c),
                r,
            )
        })
    }

    proptest! {
        #[test]
        fn rank_matches_dense_elimination(rows in matrix_strategy()) {
            let m = SparseMatrix::from_rows_i64(&rows);
            prop_assert_eq!(m.rank(), dense_rank(&rows));
        }

        #[test]
        fn rank_nullity(rows in matrix_strategy()) {
            let m = SparseMatrix::from_rows_i64(&rows);
            let k = m.kernel_basis();
            prop_assert_eq!(m.rank() + k.len(), m.ncols());
            for v in &k {
                prop_assert!(m.apply(v).is_zero());
            }
        }

        #[test]
        fn rank_of_transpose(rows in matrix_strategy()) {
            let m = SparseMatrix::from_rows_i64(&rows);
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn huge_entries_stay_exact(rows in matrix_strategy(), s in 1i64..1_000_000) {
            let scaled: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|x| x * s * 1_000_000_007).collect()).collect();
            let m = SparseMatrix::from_rows_i64(&scaled);
            prop_assert_eq!(m.rank(), dense_rank(&rows));
        }
    }
}
