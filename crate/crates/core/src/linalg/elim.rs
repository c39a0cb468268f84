//! Fraction-free sparse Gaussian elimination over the integers.
//!
//! Vectors are eliminated against each other (so the rank computed is the
//! rank of the span of the input vectors). Singleton coordinates and
//! unit-length rows are pivoted first; after that the shortest live row is
//! pivoted on its sparsest coordinate. Rows are kept primitive (content
//! divided out) to stop coefficient growth.
//!
//! The arithmetic is generic over [`IntCoeff`]: a checked `i64` fast path and
//! a `BigInt` fallback that is used whenever the fast path overflows.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use num_bigint::BigInt;

pub(crate) trait IntCoeff: Clone + PartialEq + Send + Sync + std::fmt::Debug {
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn gcd(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
    fn to_big(&self) -> BigInt;
}

impl IntCoeff for i64 {
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn gcd(&self, o: &Self) -> Self {
        // i64::MIN never survives the checked ops above, so abs is safe here
        num_integer::Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl IntCoeff for BigInt {
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        num_traits::One::is_one(self.magnitude())
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn gcd(&self, o: &Self) -> Self {
        num_integer::Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

pub(crate) type IntVec<T> = Vec<(u32, T)>;

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct ElimOptions {
    /// Keep the (triangular) pivot rows so vectors can be reduced modulo the span.
    pub keep_pivot_rows: bool,
    /// Track combinations of input vectors; zero rows then yield a kernel basis.
    pub track_kernel: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct Elimination<T> {
    pub rank: usize,
    /// Input vector ids chosen as pivots, in pivot order. They form a basis of the span.
    pub pivot_ids: Vec<u32>,
    pub pivot_coords: Vec<u32>,
    pub pivot_rows: Vec<IntVec<T>>,
    /// Integer relations among the input vectors (coefficients indexed by input id).
    pub kernel: Vec<IntVec<T>>,
}

impl<T: IntCoeff> Elimination<T> {
    pub fn into_big(self) -> Elimination<BigInt> {
        let conv = |v: Vec<IntVec<T>>| -> Vec<IntVec<BigInt>> {
            v.into_iter()
                .map(|r| r.into_iter().map(|(i, x)| (i, x.to_big())).collect())
                .collect()
        };
        Elimination {
            rank: self.rank,
            pivot_ids: self.pivot_ids,
            pivot_coords: self.pivot_coords,
            pivot_rows: conv(self.pivot_rows),
            kernel: conv(self.kernel),
        }
    }
}

struct Overflow;

/// `alpha*x - beta*y` over sorted sparse vectors. Returns the result plus the
/// coordinates that appeared (present only in `y`) and disappeared (cancelled).
#[allow(clippy::type_complexity)]
fn combine<T: IntCoeff>(
    alpha: &T,
    x: &[(u32, T)],
    beta: &T,
    y: &[(u32, T)],
    track: bool,
) -> Result<(IntVec<T>, Vec<u32>, Vec<u32>), Overflow> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let mut added = Vec::new();
    let mut removed = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push((x[i].0, alpha.mul(&x[i].1).ok_or(Overflow)?));
            i += 1;
        } else if take_y {
            let v = beta.mul(&y[j].1).ok_or(Overflow)?.neg().ok_or(Overflow)?;
            out.push((y[j].0, v));
            if track {
                added.push(y[j].0);
            }
            j += 1;
        } else {
            let a = alpha.mul(&x[i].1).ok_or(Overflow)?;
            let b = beta.mul(&y[j].1).ok_or(Overflow)?;
            let v = a.sub(&b).ok_or(Overflow)?;
            if v.is_zero() {
                if track {
                    removed.push(x[i].0);
                }
            } else {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok((out, added, removed))
}

fn content<T: IntCoeff>(parts: &[&[(u32, T)]]) -> Option<T> {
    let mut g: Option<T> = None;
    for part in parts {
        for (_, v) in part.iter() {
            g = Some(match g {
                None => v.gcd(v),
                Some(g) => g.gcd(v),
            });
            if let Some(ref gg) = g {
                if gg.is_unit() {
                    return None;
                }
            }
        }
    }
    g
}

fn divide_all<T: IntCoeff>(v: &mut [(u32, T)], g: &T) {
    for e in v.iter_mut() {
        e.1 = e.1.div_exact(g);
    }
}

fn find<T>(row: &[(u32, T)], c: u32) -> Option<usize> {
    row.binary_search_by_key(&c, |e| e.0).ok()
}

struct State<T> {
    rows: Vec<IntVec<T>>,
    tags: Vec<IntVec<T>>,
    active: Vec<bool>,
    coord_rows: Vec<Vec<u32>>,
    count: Vec<u32>,
    row_heap: BinaryHeap<Reverse<(u32, u32)>>,
    singles: Vec<u32>,
    unit_rows: Vec<u32>,
    opts: ElimOptions,
    out: Elimination<T>,
}

impl<T: IntCoeff> State<T> {
    fn note_count(&mut self, c: u32) {
        let n = self.count[c as usize];
        if n == 1 {
            self.singles.push(c);
        }
    }

    fn retire_row(&mut self, r: u32) {
        self.active[r as usize] = false;
        let row = std::mem::take(&mut self.rows[r as usize]);
        for &(c, _) in &row {
            self.count[c as usize] -= 1;
            self.note_count(c);
        }
        self.rows[r as usize] = row;
    }

    fn record_zero_row(&mut self, r: u32) {
        self.active[r as usize] = false;
        if self.opts.track_kernel {
            let tag = std::mem::take(&mut self.tags[r as usize]);
            self.out.kernel.push(tag);
        }
    }

    fn live_rows_with(&mut self, c: u32) -> Vec<u32> {
        let list = std::mem::take(&mut self.coord_rows[c as usize]);
        let mut live: Vec<u32> = list
            .into_iter()
            .filter(|&k| self.active[k as usize] && find(&self.rows[k as usize], c).is_some())
            .collect();
        live.sort_unstable();
        live.dedup();
        self.coord_rows[c as usize] = live.clone();
        live
    }

    fn pivot(&mut self, r: u32, c: u32) -> Result<(), Overflow> {
        let others: Vec<u32> = self
            .live_rows_with(c)
            .into_iter()
            .filter(|&k| k != r)
            .collect();
        let prow = std::mem::take(&mut self.rows[r as usize]);
        let ptag = if self.opts.track_kernel {
            std::mem::take(&mut self.tags[r as usize])
        } else {
            Vec::new()
        };
        let p = prow[find(&prow, c).expect("pivot entry")].1.clone();
        for k in others {
            let krow = std::mem::take(&mut self.rows[k as usize]);
            let a = krow[find(&krow, c).expect("live entry")].1.clone();
            let g = p.gcd(&a);
            let alpha = p.div_exact(&g);
            let beta = a.div_exact(&g);
            let (mut nrow, added, removed) = combine(&alpha, &krow, &beta, &prow, true)?;
            let mut ntag = Vec::new();
            if self.opts.track_kernel {
                let ktag = std::mem::take(&mut self.tags[k as usize]);
                ntag = combine(&alpha, &ktag, &beta, &ptag, false)?.0;
            }
            let g = if self.opts.track_kernel {
                content(&[&nrow, &ntag])
            } else {
                content(&[&nrow])
            };
            if let Some(g) = g {
                divide_all(&mut nrow, &g);
                divide_all(&mut ntag, &g);
            }
            for cc in removed {
                self.count[cc as usize] -= 1;
                self.note_count(cc);
            }
            for cc in added {
                self.count[cc as usize] += 1;
                self.coord_rows[cc as usize].push(k);
                self.note_count(cc);
            }
            let len = nrow.len();
            self.rows[k as usize] = nrow;
            if self.opts.track_kernel {
                self.tags[k as usize] = ntag;
            }
            if len == 0 {
                self.record_zero_row(k);
            } else if len == 1 {
                self.unit_rows.push(k);
            } else {
                self.row_heap.push(Reverse((len as u32, k)));
            }
        }
        self.rows[r as usize] = prow;
        self.retire_row(r);
        let prow = std::mem::take(&mut self.rows[r as usize]);
        self.out.rank += 1;
        self.out.pivot_ids.push(r);
        self.out.pivot_coords.push(c);
        if self.opts.keep_pivot_rows {
            self.out.pivot_rows.push(prow);
        }
        Ok(())
    }

    fn best_row(&mut self, c: u32) -> Option<u32> {
        let live = self.live_rows_with(c);
        live.into_iter().min_by_key(|&k| {
            let row = &self.rows[k as usize];
            let unit = row[find(row, c).unwrap()].1.is_unit();
            (row.len(), !unit, k)
        })
    }

    fn run(mut self) -> Result<Elimination<T>, Overflow> {
        loop {
            if let Some(c) = self.singles.pop() {
                if self.count[c as usize] != 1 {
                    continue;
                }
                let r = self.best_row(c).expect("singleton coordinate has a live row");
                self.pivot(r, c)?;
                continue;
            }
            if let Some(r) = self.unit_rows.pop() {
                if !self.active[r as usize] || self.rows[r as usize].len() != 1 {
                    continue;
                }
                let c = self.rows[r as usize][0].0;
                self.pivot(r, c)?;
                continue;
            }
            let Some(Reverse((len, r))) = self.row_heap.pop() else {
                break;
            };
            let row = &self.rows[r as usize];
            if !self.active[r as usize] || row.len() != len as usize || len == 0 {
                continue;
            }
            let c = row
                .iter()
                .min_by_key(|e| (self.count[e.0 as usize], !e.1.is_unit(), e.0))
                .expect("nonempty row")
                .0;
            self.pivot(r, c)?;
        }
        debug_assert!(self
            .active
            .iter()
            .enumerate()
            .all(|(i, &a)| !a || self.rows[i].is_empty()));
        Ok(self.out)
    }
}

fn eliminate_with<T: IntCoeff>(
    vectors: Vec<IntVec<T>>,
    ncoords: usize,
    opts: ElimOptions,
) -> Result<Elimination<T>, Overflow> {

    let nvec = vectors.len();
    let mut st = State {
        rows: Vec::with_capacity(nvec),
        tags: Vec::new(),
        active: vec![true; nvec],
        coord_rows: vec![Vec::new(); ncoords],
        count: vec![0; ncoords],
        row_heap: BinaryHeap::new(),
        singles: Vec::new(),
        unit_rows: Vec::new(),
        opts,
        out: Elimination {
            rank: 0,
            pivot_ids: Vec::new(),
            pivot_coords: Vec::new(),
            pivot_rows: Vec::new(),
            kernel: Vec::new(),
        },
    };
    for (i, mut v) in vectors.into_iter().enumerate() {
        v.retain(|e| !e.1.is_zero());
        v.sort_unstable_by_key(|e| e.0);
        if let Some(g) = content(&[&v]) {
            if !opts.track_kernel {
                divide_all(&mut v, &g);
            }
        }
        for &(c, _) in &v {
            assert!((c as usize) < ncoords, "coordinate {c} out of range {ncoords}");
            st.coord_rows[c as usize].push(i as u32);
            st.count[c as usize] += 1;
        }
        st.rows.push(v);
        if opts.track_kernel {
            st.tags.push(vec![(i as u32, T::one())]);
        }
    }
    for i in 0..nvec {
        match st.rows[i].len() {
            0 => st.record_zero_row(i as u32),
            1 => st.unit_rows.push(i as u32),
            l => st.row_heap.push(Reverse((l as u32, i as u32))),
        }
    }
    st.unit_rows.reverse();
    for c in (0..ncoords as u32).rev() {
        st.note_count(c);
    }
    st.run()
}

/// Integer vectors, in the cheapest representation that holds them.
pub(crate) enum IntVectors {
    Small(Vec<IntVec<i64>>),
    Big(Vec<IntVec<BigInt>>),
}

/// Eliminate, trying machine integers first and falling back to bignums.
pub(crate) fn eliminate(vs: IntVectors, ncoords: usize, opts: ElimOptions) -> Elimination<BigInt> {
    match vs {
        IntVectors::Small(v) => {
            let backup: Vec<IntVec<BigInt>> = v
                .iter()
                .map(|r| r.iter().map(|(i, x)| (*i, BigInt::from(*x))).collect())
                .collect();
            match eliminate_with(v, ncoords, opts) {
                Ok(e) => e.into_big(),
                Err(Overflow) => eliminate_big(backup, ncoords, opts),
            }
        }
        IntVectors::Big(v) => eliminate_big(v, ncoords, opts),
    }
}

/// Rank only; avoids keeping a bignum backup copy unless the fast path overflows.
pub(crate) fn rank_small(v: Vec<IntVec<i64>>, ncoords: usize) -> (usize, Vec<u32>) {
    let opts = ElimOptions::default();
    match eliminate_with(v.clone(), ncoords, opts) {
        Ok(e) => (e.rank, e.pivot_ids),
        Err(Overflow) => {
            let big = v
                .into_iter()
                .map(|r| r.into_iter().map(|(i, x)| (i, BigInt::from(x))).collect())
                .collect();
            let e = eliminate_big(big, ncoords, opts);
            (e.rank, e.pivot_ids)
        }
    }
}

fn eliminate_big(v: Vec<IntVec<BigInt>>, ncoords: usize, opts: ElimOptions) -> Elimination<BigInt> {
    match eliminate_with(v, ncoords, opts) {
        Ok(e) => e,
        Err(Overflow) => unreachable!("bignum arithmetic cannot overflow"),
    }
}

/// Triangular basis of a subspace, able to reduce vectors modulo it.
#[derive(Clone, Debug, Default)]
pub(crate) struct Echelon {
    rows: Vec<IntVec<BigInt>>,
    pivot_coord: Vec<u32>,
    index: HashMap<u32, usize>,
}

impl Echelon {
    pub fn from_elimination(e: &Elimination<BigInt>) -> Self {
        let mut ech = Echelon::default();
        for (k, (row, &c)) in e.pivot_rows.iter().zip(&e.pivot_coords).enumerate() {
            ech.index.insert(c, k);
            ech.rows.push(row.clone());
            ech.pivot_coord.push(c);
        }
        ech
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` modulo the span; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[(u32, BigInt)]) -> IntVec<BigInt> {
        let mut cur: IntVec<BigInt> = v.iter().filter(|e| !e.1.is_zero()).cloned().collect();
        cur.sort_unstable_by_key(|e| e.0);
        let mut heap: BinaryHeap<Reverse<usize>> = cur
            .iter()
            .filter_map(|(c, _)| self.index.get(c).map(|&k| Reverse(k)))
            .collect();
        while let Some(Reverse(k)) = heap.pop() {
            let c = self.pivot_coord[k];
            let Some(pos) = find(&cur, c) else { continue };
            let row = &self.rows[k];
            let p = &row[find(row, c).unwrap()].1;
            let a = cur[pos].1.clone();
            let g = p.gcd(&a);
            let alpha = p.div_exact(&g);
            let beta = a.div_exact(&g);
            let (mut next, added, _) = match combine(&alpha, &cur, &beta, row, true) {
                Ok(x) => x,
                Err(Overflow) => unreachable!(),
            };
            for cc in added {
                if let Some(&kk) = self.index.get(&cc) {
                    heap.push(Reverse(kk));
                }
            }
            if let Some(g) = content(&[&next]) {
                divide_all(&mut next, &g);
            }
            cur = next;
        }
        cur
    }

    /// Insert `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[(u32, BigInt)]) -> bool {
        let r = self.reduce(v);
        if r.is_empty() {
            return false;
        }
        // Pivot on a coordinate that no earlier row uses as pivot.
        let c = r[0].0;
        let k = self.rows.len();
        self.index.insert(c, k);
        self.pivot_coord.push(c);
        self.rows.push(r);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(rows: &[&[i64]]) -> Vec<IntVec<i64>> {
        rows.iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, x)| **x != 0)
                    .map(|(i, x)| (i as u32, *x))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let v = small(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1], &[1, 3, 4]]);
        let (r, piv) = rank_small(v, 3);
        assert_eq!(r, 2);
        assert_eq!(piv.len(), 2);
    }

    #[test]
    fn kernel_relations_are_relations() {
        let rows: &[&[i64]] = &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1], &[1, 3, 4], &[5, 0, 5]];
        let v = small(rows);
        let e = eliminate(
            IntVectors::Small(v),
            3,
            ElimOptions {
                track_kernel: true,
                keep_pivot_rows: true,
            },
        );
        assert_eq!(e.kernel.len(), rows.len() - e.rank);
        for rel in &e.kernel {
            let mut sum = [BigInt::from(0), BigInt::from(0), BigInt::from(0)];
            for (i, c) in rel {
                for (j, x) in rows[*i as usize].iter().enumerate() {
                    sum[j] += c * BigInt::from(*x);
                }
            }
            assert!(sum.iter().all(|s| s.is_zero()));
        }
    }

    #[test]
    fn overflow_falls_back_to_bignums() {
        let big = i64::MAX / 3;
        let v = small(&[&[big, big - 1, 7], &[big - 5, big, 3], &[1, 1, 1]]);
        let e = eliminate(IntVectors::Small(v), 3, ElimOptions::default());
        assert_eq!(e.rank, 3);
    }

    #[test]
    fn echelon_reduces_members_to_zero() {
        let v = small(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1]]);
        let e = eliminate(
            IntVectors::Small(v),
            4,
            ElimOptions {
                keep_pivot_rows: true,
                track_kernel: false,
            },
        );
        let ech = Echelon::from_elimination(&e);
        let member: Vec<(u32, BigInt)> = vec![(0, 1.into()), (3, 1.into())];
        assert!(ech.reduce(&member).is_empty());
        let outsider: Vec<(u32, BigInt)> = vec![(0, 1.into()), (3, (-1).into())];
        assert!(!ech.reduce(&outsider).is_empty());
    }
}
