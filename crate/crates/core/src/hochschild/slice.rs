//! Enumeration of bar tensors per (degree, weight, multidegree) and the
//! matrices of b and of the (b,B) total differential on them.

use std::collections::{BTreeSet, HashMap};

use smallvec::SmallVec;

use super::chain::{boundary, collect, connes, Coef, SignConvention, Tensor};
use crate::algebra::{BasisTable, GradedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{Rational, SparseVector};

/// Multidegree of a tensor under the algebra's grading functionals.
pub type Key = SmallVec<[i64; 4]>;

/// Ordered tensor basis of one slice.
#[derive(Clone, Debug, Default)]
pub struct TensorBasis {
    tensors: Vec<Tensor>,
    index: HashMap<Tensor, u32>,
}

impl TensorBasis {
    pub fn new(tensors: Vec<Tensor>) -> Self {
        let index = tensors
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        TensorBasis { tensors, index }
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn position(&self, t: &Tensor) -> Option<u32> {
        self.index.get(t).copied()
    }
}

fn key_nonneg(table: &BasisTable) -> bool {
    (0..table.len() as u32).all(|g| table.key(g).iter().all(|x| *x >= 0))
}

/// All normalized tensors of degree `n`, weight `w` and multidegree `key`,
/// in lexicographic order of basis ids.
pub fn enumerate(table: &BasisTable, n: usize, w: u32, key: &[i64]) -> Vec<Tensor> {
    let mut out = Vec::new();
    if n as u32 > w || w > table.max_weight() {
        return out;
    }
    let prune = key_nonneg(table);
    let mut rem: Vec<i64> = key.to_vec();
    let mut cur = Tensor::new();
    rec(table, 0, n, w, &mut rem, &mut cur, &mut out, prune);
    out
}

#[allow(clippy::too_many_arguments)]
fn rec(
    table: &BasisTable,
    pos: usize,
    n: usize,
    rem_w: u32,
    rem_key: &mut Vec<i64>,
    cur: &mut Tensor,
    out: &mut Vec<Tensor>,
    prune: bool,
) {
    if pos == n + 1 {
        if rem_w == 0 && rem_key.iter().all(|x| *x == 0) {
            out.push(cur.clone());
        }
        return;
    }
    let after = (n - pos) as u32;
    if rem_w < after {
        return;
    }
    let lo = if pos == 0 { 0 } else { 1 };
    let hi = rem_w - after;
    let lo = if pos == n { rem_w } else { lo };
    if lo > hi {
        return;
    }
    for wt in lo..=hi {
        for g in table.range(wt) {
            let k = table.key(g);
            let mut ok = true;
            for (r, x) in rem_key.iter_mut().zip(k) {
                *r -= x;
                if prune && *r < 0 {
                    ok = false;
                }
            }
            if ok {
                cur.push(g);
                rec(table, pos + 1, n, rem_w - wt, rem_key, cur, out, prune);
                cur.pop();
            }
            for (r, x) in rem_key.iter_mut().zip(k) {
                *r += x;
            }
        }
    }
}

/// Multidegree classes of weight `w`, each with the number of classes it stands for.
///
/// For polynomial rings, classes that differ by permuting generators of equal
/// weight give isomorphic complexes, so only sorted representatives are kept.
pub fn classes(algebra: &GradedAlgebra, w: u32) -> Vec<(Key, usize)> {
    let n = algebra.nvars();
    let weights = algebra.weights();
    let mut keys: BTreeSet<Key> = BTreeSet::new();
    let mut exps = vec![0u16; n];
    fn go(i: usize, rem: u32, weights: &[u32], exps: &mut Vec<u16>, f: &mut dyn FnMut(&[u16])) {
        if i == weights.len() {
            if rem == 0 {
                f(exps);
            }
            return;
        }
        let mut e = 0u32;
        while e * weights[i] <= rem {
            exps[i] = e as u16;
            go(i + 1, rem - e * weights[i], weights, exps, f);
            e += 1;
        }
        exps[i] = 0;
    }
    go(0, w, weights, &mut exps, &mut |e| {
        keys.insert(algebra.multidegree(&algebra.monomial(e)));
    });
    if !algebra.is_free() {
        return keys.into_iter().map(|k| (k, 1)).collect();
    }
    let mut orbits: std::collections::BTreeMap<Key, usize> = std::collections::BTreeMap::new();
    for k in keys {
        *orbits.entry(canonical_free_key(weights, &k)).or_insert(0) += 1;
    }
    orbits.into_iter().collect()
}

/// Sort exponents within each block of equal-weight generators (descending).
pub fn canonical_free_key(weights: &[u32], k: &[i64]) -> Key {
    let mut out: Key = SmallVec::from_slice(k);
    let mut groups: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, w) in weights.iter().enumerate() {
        groups.entry(*w).or_default().push(i);
    }
    for idx in groups.values() {
        let mut vals: Vec<i64> = idx.iter().map(|&i| k[i]).collect();
        vals.sort_unstable_by(|a, b| b.cmp(a));
        for (&i, v) in idx.iter().zip(vals) {
            out[i] = v;
        }
    }
    out
}

fn to_entries<C: Coef>(terms: Vec<(Tensor, C)>, basis: &TensorBasis, offset: u32) -> Vec<(u32, C)> {
    let mut v: Vec<(u32, C)> = terms
        .into_iter()
        .map(|(t, c)| {
            let i = basis
                .position(&t)
                .unwrap_or_else(|| panic!("tensor {t:?} missing from target slice"));
            (i + offset, c)
        })
        .collect();
    v.sort_unstable_by_key(|e| e.0);
    v
}

fn check_zero<C: Coef>(terms: &[(Tensor, C)], what: &str) -> Result<()> {
    if terms.iter().any(|e| !e.1.vanishes()) {
        return Err(Error::CompositionNonzero(what.to_string()));
    }
    Ok(())
}

type Op<C> = fn(&BasisTable, SignConvention, &[u32], &mut Vec<(Tensor, C)>);

/// Apply `op` to every term of a chain given as (tensor, coefficient) pairs.
fn apply_op<C: Coef>(table: &BasisTable, conv: SignConvention, chain: &[(Tensor, C)], op: Op<C>) -> Vec<(Tensor, C)> {
    let mut out = Vec::new();
    for (t, x) in chain {
        let s = out.len();
        op(table, conv, t, &mut out);
        for e in &mut out[s..] {
            e.1 = e.1.mul(x);
        }
    }
    collect(out)
}

/// Columns of `b : C_n -> C_{n-1}` on the given source tensors, as sorted entry lists.
///
/// When `check` is set, `b(b(t)) = 0` is verified exactly for every source tensor.
pub(crate) fn b_entries<C: Coef>(
    table: &BasisTable,
    conv: SignConvention,
    src: &[Tensor],
    tgt: &TensorBasis,
    check: bool,
) -> Result<Vec<Vec<(u32, C)>>> {
    let mut cols = Vec::with_capacity(src.len());
    let mut buf = Vec::new();
    for t in src {
        buf.clear();
        boundary(table, conv, t, &mut buf);
        let terms = collect(std::mem::take(&mut buf));
        if check && t.len() > 2 {
            let bb = apply_op(table, conv, &terms, boundary::<C>);
            check_zero(&bb, &format!("b∘b on a degree-{} tensor", t.len() - 1))?;
        }
        cols.push(to_entries(terms, tgt, 0));
    }
    Ok(cols)
}

/// Columns of `b : C_n -> C_{n-1}` on the given source tensors.
pub fn b_columns(
    table: &BasisTable,
    conv: SignConvention,
    src: &[Tensor],
    tgt: &TensorBasis,
    check: bool,
) -> Result<Vec<SparseVector>> {
    Ok(b_entries::<Rational>(table, conv, src, tgt, check)?
        .into_iter()
        .map(SparseVector::from_entries)
        .collect())
}

fn check_connes_with<C: Coef>(table: &BasisTable, conv: SignConvention, src: &[Tensor]) -> Result<()> {
    for t in src {
        let one = vec![(t.clone(), C::unit(false))];
        let bt = apply_op(table, conv, &one, connes::<C>);
        let bbt = apply_op(table, conv, &bt, connes::<C>);
        check_zero(&bbt, "B∘B")?;
        let x = apply_op(table, conv, &bt, boundary::<C>);
        let y = apply_op(table, conv, &apply_op(table, conv, &one, boundary::<C>), connes::<C>);
        let mut sum = x;
        sum.extend(y);
        check_zero(&collect(sum), "bB + Bb")?;
    }
    Ok(())
}

/// Verify `B∘B = 0` and `bB + Bb = 0` on the given tensors.
pub fn check_connes(table: &BasisTable, conv: SignConvention, src: &[Tensor]) -> Result<()> {
    if table.has_unit_products() {
        check_connes_with::<i64>(table, conv, src)
    } else {
        check_connes_with::<Rational>(table, conv, src)
    }
}

/// Bases `C_n, C_{n-2}, ...` of the degree-`n` part of the (b,B) total complex.
pub struct TotalBasis {
    pub parts: Vec<(usize, TensorBasis)>,
    pub offsets: Vec<u32>,
}

impl TotalBasis {
    pub fn new(table: &BasisTable, n: usize, w: u32, key: &[i64]) -> Self {
        let mut parts = Vec::new();
        let mut offsets = Vec::new();
        let mut off = 0u32;
        let mut k = n as i64;
        while k >= 0 {
            let b = TensorBasis::new(enumerate(table, k as usize, w, key));
            offsets.push(off);
            off += b.len() as u32;
            parts.push((k as usize, b));
            k -= 2;
        }
        TotalBasis { parts, offsets }
    }

    pub fn len(&self) -> usize {
        self.parts.iter().map(|p| p.1.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn part(&self, degree: usize) -> Option<(&TensorBasis, u32)> {
        self.parts
            .iter()
            .zip(&self.offsets)
            .find(|((d, _), _)| *d == degree)
            .map(|((_, b), o)| (b, *o))
    }
}

/// Columns of the total differential `D(x_k) = b x_k + B x_k` from degree `n` to `n-1`.
pub(crate) fn total_entries<C: Coef>(
    table: &BasisTable,
    conv: SignConvention,
    src: &TotalBasis,
    tgt: &TotalBasis,
    n: usize,
) -> Vec<Vec<(u32, C)>> {
    let mut cols = Vec::with_capacity(src.len());
    for (k, basis) in &src.parts {
        for t in basis.tensors() {
            let mut entries: Vec<(u32, C)> = Vec::new();
            if *k >= 1 {
                let mut buf = Vec::new();
                boundary(table, conv, t, &mut buf);
                if let Some((b, off)) = tgt.part(k - 1) {
                    entries.extend(to_entries(collect(buf), b, off));
                }
            }
            if k + 2 <= n {
                let mut buf = Vec::new();
                connes(table, conv, t, &mut buf);
                if let Some((b, off)) = tgt.part(k + 1) {
                    entries.extend(to_entries(collect(buf), b, off));
                }
            }
            entries.sort_unstable_by_key(|e| e.0);
            cols.push(entries);
        }
    }
    cols
}

pub fn total_columns(
    table: &BasisTable,
    conv: SignConvention,
    src: &TotalBasis,
    tgt: &TotalBasis,
    n: usize,
) -> Vec<SparseVector> {
    total_entries::<Rational>(table, conv, src, tgt, n)
        .into_iter()
        .map(SparseVector::from_entries)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn tensor_counts_for_plane() {
        let a = Arc::new(GradedAlgebra::parse("vars x:1 y:1").unwrap());
        let t = a.table(6);
        // Weight 2, degree 1, multidegree (1,1): x[y], y[x], 1[xy].
        let v = enumerate(&t, 1, 2, &[1, 1]);
        assert_eq!(v.len(), 3);
        let v = enumerate(&t, 2, 2, &[1, 1]);
        assert_eq!(v.len(), 2);
        let cl = classes(&a, 4);
        assert_eq!(cl.iter().map(|c| c.1).sum::<usize>(), 5);
        assert_eq!(cl.len(), 3);
    }
}
