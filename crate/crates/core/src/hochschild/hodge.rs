//! Eulerian idempotents in ℚ[S_n] and the Hodge (λ-) decomposition of HH_n.
//!
//! A permutation `p` acts on a bar tensor by moving entry `j` to position `p[j]`
//! (positions 1..n; the zeroth entry is fixed). Products compose as maps.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use rayon::prelude::*;
use smallvec::SmallVec;

use super::chain::{boundary, collect, Tensor};
use super::homology::HochschildEngine;
use super::slice::TensorBasis;
use super::BarChain;
use crate::error::{Error, Result};
use crate::linalg::{rank_of_columns, Rational, SparseMatrix, SparseVector, Subspace};

pub type Perm = SmallVec<[u8; 8]>;

/// Element of the rational group algebra of a symmetric group.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupElement {
    n: usize,
    terms: BTreeMap<Perm, Rational>,
}

pub fn permutations(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Perm = SmallVec::new();
    let mut used = vec![false; n];
    fn go(n: usize, cur: &mut Perm, used: &mut [bool], out: &mut Vec<Perm>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v as u8);
                go(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    go(n, &mut cur, &mut used, &mut out);
    out
}

pub fn is_odd(p: &[u8]) -> bool {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

pub fn descents(p: &[u8]) -> usize {
    p.windows(2).filter(|w| w[0] > w[1]).count()
}

fn signed(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

impl GroupElement {
    pub fn zero(n: usize) -> Self {
        GroupElement { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut e = Self::zero(n);
        e.add_term((0..n as u8).collect(), Rational::one());
        e
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Perm, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, p: &[u8]) -> Rational {
        self.terms.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, p: Perm, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(p.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn add(&self, o: &GroupElement) -> GroupElement {
        let mut r = self.clone();
        for (p, c) in &o.terms {
            r.add_term(p.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, s: &Rational) -> GroupElement {
        let mut r = Self::zero(self.n);
        for (p, c) in &self.terms {
            r.add_term(p.clone(), c * s);
        }
        r
    }

    /// `self ∘ o`: first apply `o`, then `self`.
    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        let mut r = Self::zero(self.n);
        for (s, a) in &self.terms {
            for (t, b) in &o.terms {
                let p: Perm = t.iter().map(|&j| s[j as usize]).collect();
                r.add_term(p, a * b);
            }
        }
        r
    }

    /// Apply to a basis tensor, accumulating into `out`.
    pub fn act(&self, t: &[u32], coef: &Rational, out: &mut Vec<(Tensor, Rational)>) {
        for (p, c) in &self.terms {
            let mut r: Tensor = SmallVec::from_slice(t);
            for (j, &x) in t[1..].iter().enumerate() {
                r[1 + p[j] as usize] = x;
            }
            out.push((r, c * coef));
        }
    }

    /// Apply to a vector over the tensors of `basis` (which must be stable under permutations).
    pub fn act_vector(&self, v: &SparseVector, basis: &TensorBasis) -> SparseVector {
        let mut out = Vec::new();
        for (i, x) in v.entries() {
            self.act(&basis.tensors()[*i as usize], x, &mut out);
        }
        SparseVector::from_entries(collect(out).into_iter().map(|(t, c)| {
            (basis.position(&t).expect("slice is stable under permutations"), c)
        }))
    }

    /// Trace of the action on the span of `tensors` (a permutation-stable set).
    pub fn trace(&self, tensors: &[Tensor]) -> Rational {
        let mut tr = Rational::zero();
        for (p, c) in &self.terms {
            let fixed = tensors
                .iter()
                .filter(|t| (0..p.len()).all(|j| t[1 + p[j] as usize] == t[1 + j]))
                .count();
            tr += c * Rational::from_integer(fixed.into());
        }
        tr
    }
}

/// Coefficients of the polynomial `binom(x + a, n)` in `x`, lowest degree first.
fn binomial_poly(a: i64, n: usize) -> Vec<Rational> {
    let mut poly = vec![Rational::one()];
    for k in 0..n as i64 {
        // multiply by (x + a - k)
        let c = Rational::from_integer((a - k).into());
        let mut next = vec![Rational::zero(); poly.len() + 1];
        for (d, v) in poly.iter().enumerate() {
            next[d + 1] += v;
            next[d] += v * &c;
        }
        poly = next;
    }
    let mut fact = Rational::one();
    for k in 1..=n as i64 {
        fact *= Rational::from_integer(k.into());
    }
    poly.into_iter().map(|v| v / &fact).collect()
}

/// Signed sum of the `(p, n-p)`-shuffles.
pub fn shuffle_element(n: usize, p: usize) -> GroupElement {
    let mut e = GroupElement::zero(n);
    for perm in permutations(n) {
        if perm[..p].windows(2).all(|w| w[0] < w[1]) && perm[p..].windows(2).all(|w| w[0] < w[1]) {
            e.add_term(perm.clone(), signed(is_odd(&perm)));
        }
    }
    e
}

/// Validated Eulerian idempotents `e^(1..n)` and the Adams operation ψ₂ in degree `n`.
#[derive(Debug)]
pub struct EulerianTable {
    pub degree: usize,
    /// `idempotents[i-1]` is `e^(i)`.
    pub idempotents: Vec<GroupElement>,
    pub psi2: GroupElement,
}

impl EulerianTable {
    pub fn idempotent(&self, i: usize) -> &GroupElement {
        &self.idempotents[i - 1]
    }
}

fn build_table(n: usize) -> Result<EulerianTable> {
    let fail = |detail: String| Error::IdempotentSanityFail { degree: n, detail };
    // Σ_σ binom(x - d(σ) + n - 1, n) sgn(σ) σ = Σ_i e^(i) x^i
    let mut coeffs = vec![GroupElement::zero(n); n + 1];
    for p in permutations(n) {
        let poly = binomial_poly(n as i64 - 1 - descents(&p) as i64, n);
        let s = signed(is_odd(&p));
        for (i, c) in poly.into_iter().enumerate() {
            coeffs[i].add_term(p.clone(), c * &s);
        }
    }
    if n > 0 && !coeffs[0].is_zero() {
        return Err(fail("constant coefficient is nonzero".into()));
    }
    let idempotents: Vec<GroupElement> = coeffs.into_iter().skip(1).collect();
    let mut sum = GroupElement::zero(n);
    for e in &idempotents {
        sum = sum.add(e);
    }
    if n > 0 && sum != GroupElement::identity(n) {
        return Err(fail("idempotents do not sum to the identity".into()));
    }
    for (i, a) in idempotents.iter().enumerate() {
        for (j, b) in idempotents.iter().enumerate() {
            let ab = a.mul(b);
            let ok = if i == j { &ab == a } else { ab.is_zero() };
            if !ok {
                return Err(fail(format!("e^({}) e^({}) has the wrong value", i + 1, j + 1)));
            }
        }
    }
    let mut psi2 = GroupElement::zero(n);
    for p in 0..=n {
        psi2 = psi2.add(&shuffle_element(n, p));
    }
    let mut weighted = GroupElement::zero(n);
    for (i, e) in idempotents.iter().enumerate() {
        weighted = weighted.add(&e.scale(&Rational::from_integer((1i64 << (i + 1)).into())));
    }
    if n > 0 && weighted != psi2 {
        return Err(fail("shuffle Adams operation differs from Σ 2^i e^(i)".into()));
    }
    Ok(EulerianTable { degree: n, idempotents, psi2 })
}

/// Eulerian table for degree `n`, built once and validated.
pub fn eulerian(n: usize) -> Result<Arc<EulerianTable>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<EulerianTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return Ok(t.clone());
    }
    let t = Arc::new(build_table(n)?);
    cache.lock().unwrap().insert(n, t.clone());
    Ok(t)
}

fn to_vector(terms: Vec<(Tensor, Rational)>, basis: &TensorBasis) -> SparseVector {
    SparseVector::from_entries(
        terms
            .into_iter()
            .map(|(t, c)| (basis.position(&t).expect("tensor in slice"), c)),
    )
}

impl HochschildEngine {
    fn check_commutes(&self, n: usize, e: &GroupElement, e_low: &GroupElement, src: &TensorBasis) -> Result<()> {
        let conv = self.convention();
        let table = self.table();
        let one = Rational::one();
        for t in src.tensors() {
            let mut et = Vec::new();
            e.act(t, &one, &mut et);
            let mut lhs = Vec::new();
            for (s, c) in collect(et) {
                let k = lhs.len();
                boundary(table, conv, &s, &mut lhs);
                for x in &mut lhs[k..] {
                    x.1 *= &c;
                }
            }
            let mut bt = Vec::new();
            boundary(table, conv, t, &mut bt);
            let mut rhs = Vec::new();
            for (s, c) in collect(bt) {
                e_low.act(&s, &c, &mut rhs);
            }
            let mut diff = lhs;
            diff.extend(rhs.into_iter().map(|(s, c)| (s, -c)));
            if !collect(diff).is_empty() {
                return Err(Error::IdempotentSanityFail {
                    degree: n,
                    detail: "idempotent does not commute with the Hochschild boundary".into(),
                });
            }
        }
        Ok(())
    }

    /// Hodge dimensions `dim HH_n^(i)`, i = 1..n, on one class, via traces
    /// of the idempotents and ranks of their images on boundaries.
    pub fn hodge_class(&self, n: usize, w: u32, key: &[i64]) -> Result<Vec<usize>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let hi = eulerian(n)?;
        let lo = eulerian(n - 1)?;
        let (src, tgt, bn) = self.b_matrix(n, w, key)?;
        let (_, _, bn1) = self.b_matrix(n + 1, w, key)?;
        let (im_n, im_n1) = (bn.columns(), bn1.columns());
        let mut out = Vec::with_capacity(n);
        for i in 1..=n {
            let e = hi.idempotent(i);
            let e_low = if i <= n - 1 { lo.idempotent(i).clone() } else { GroupElement::zero(n - 1) };
            self.check_commutes(n, e, &e_low, &src)?;
            let tr = e.trace(src.tensors());
            if !tr.is_integer() || tr < Rational::zero() {
                return Err(Error::IdempotentSanityFail { degree: n, detail: format!("trace {tr} is not a dimension") });
            }
            let tr: usize = tr.to_integer().try_into().expect("trace fits");
            let a: Vec<SparseVector> = im_n.iter().map(|v| e_low.act_vector(v, &tgt)).collect();
            let b: Vec<SparseVector> = im_n1.iter().map(|v| e.act_vector(v, &src)).collect();
            out.push(tr - rank_of_columns(&a, tgt.len()) - rank_of_columns(&b, src.len()));
        }
        Ok(out)
    }

    /// Hodge dimensions on one class via the eigenspaces of ψ₂ on chains.
    pub fn hodge_class_eigen(&self, n: usize, w: u32, key: &[i64]) -> Result<Vec<usize>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let psi = |m: usize, basis: &TensorBasis| -> Result<SparseMatrix> {
            let t = eulerian(m)?;
            let cols = (0..basis.len())
                .map(|j| {
                    let mut out = Vec::new();
                    t.psi2.act(&basis.tensors()[j], &Rational::one(), &mut out);
                    to_vector(collect(out), basis)
                })
                .collect();
            Ok(SparseMatrix::from_columns(basis.len(), cols))
        };
        let (src, tgt, bn) = self.b_matrix(n, w, key)?;
        let (src1, _, bn1) = self.b_matrix(n + 1, w, key)?;
        let (p_n, p_n1) = (psi(n, &src)?, psi(n + 1, &src1)?);
        let mut total = 0;
        let mut out = Vec::with_capacity(n);
        for i in 1..=n {
            let lam = Rational::from_integer((1i64 << i).into());
            let v_n = p_n.eigenspace(&lam)?;
            let v_n1 = p_n1.eigenspace(&lam)?;
            total += v_n.len();
            let bv: Vec<SparseVector> = v_n.iter().map(|v| bn.apply(v)).collect();
            let bv1: Vec<SparseVector> = v_n1.iter().map(|v| bn1.apply(v)).collect();
            out.push(v_n.len() - rank_of_columns(&bv, tgt.len()) - rank_of_columns(&bv1, src.len()));
        }
        if total != src.len() {
            return Err(Error::IdempotentSanityFail {
                degree: n,
                detail: format!("ψ₂ eigenspaces span {total} of {} chain dimensions", src.len()),
            });
        }
        Ok(out)
    }

    fn hodge_sum(&self, n: usize, w: u32, f: impl Fn(&[i64]) -> Result<Vec<usize>> + Sync) -> Result<Vec<usize>> {
        let cl = self.classes(w);
        let parts: Vec<Result<Vec<usize>>> = cl
            .par_iter()
            .map(|(k, m)| Ok(f(k)?.into_iter().map(|d| d * m).collect()))
            .collect();
        let mut out = vec![0; n];
        for p in parts {
            for (o, d) in out.iter_mut().zip(p?) {
                *o += d;
            }
        }
        Ok(out)
    }

    /// `dim HH_n^(i)` at weight `w` for i = 1..n (empty for n = 0).
    pub fn hodge_split(&self, n: usize, w: u32) -> Result<Vec<usize>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        self.hodge_sum(n, w, |k| self.hodge_class(n, w, k))
    }

    /// Same dimensions computed from ψ₂ eigenspaces.
    pub fn hodge_split_eigen(&self, n: usize, w: u32) -> Result<Vec<usize>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        self.hodge_sum(n, w, |k| self.hodge_class_eigen(n, w, k))
    }

    /// Cycles representing a basis of `HH_n^(i)` at weight `w`.
    pub fn hodge_representatives(&self, n: usize, w: u32, i: usize) -> Result<Vec<BarChain>> {
        let e = eulerian(n)?.idempotent(i).clone();
        let mut out = Vec::new();
        for (key, _) in self.all_classes(w) {
            let (basis, cycles, bounds) = self.cycles_and_boundaries(n, w, &key)?;
            let mut sub = Subspace::spanned_by(bounds.iter(), basis.len());
            for z in cycles {
                let ez = e.act_vector(&z, &basis);
                if !ez.is_zero() && sub.insert(&ez) {
                    out.push(self.chain_from_vector(n, &basis, &ez));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GradedAlgebra;

    fn rat(n: i64, d: i64) -> Rational {
        crate::linalg::rat_frac(n, d)
    }

    #[test]
    fn degree_two_idempotents() {
        let t = eulerian(2).unwrap();
        let id: Perm = SmallVec::from_slice(&[0, 1]);
        let tau: Perm = SmallVec::from_slice(&[1, 0]);
        assert_eq!(t.idempotent(1).coefficient(&id), rat(1, 2));
        assert_eq!(t.idempotent(1).coefficient(&tau), rat(1, 2));
        assert_eq!(t.idempotent(2).coefficient(&id), rat(1, 2));
        assert_eq!(t.idempotent(2).coefficient(&tau), rat(-1, 2));
        assert_eq!(t.psi2.coefficient(&id), rat(3, 1));
        assert_eq!(t.psi2.coefficient(&tau), rat(-1, 1));
    }

    #[test]
    fn tables_validate_through_degree_five() {
        for n in 0..=5 {
            let t = eulerian(n).unwrap();
            assert_eq!(t.idempotents.len(), n);
        }
    }

    #[test]
    fn plane_hodge_concentrates_in_top_piece() {
        let a = Arc::new(GradedAlgebra::parse("vars x:1 y:1").unwrap());
        let e = HochschildEngine::new(a, 5);
        for w in 2..=5 {
            assert_eq!(e.hodge_split(2, w).unwrap(), vec![0, e.hh(2, w).unwrap()]);
            assert_eq!(e.hodge_split_eigen(2, w).unwrap(), e.hodge_split(2, w).unwrap());
        }
    }

    #[test]
    fn cusp_hodge_pieces_agree() {
        let a = Arc::new(GradedAlgebra::parse("vars x:2 y:3\nrel y^2 - x^3").unwrap());
        let e = HochschildEngine::new(a, 10);
        assert_eq!(e.hodge_split(1, 5).unwrap(), vec![2]);
        for w in 2..=10 {
            for n in 1..=3 {
                let h = e.hodge_split(n, w).unwrap();
                assert_eq!(h.iter().sum::<usize>(), e.hh(n, w).unwrap());
                assert_eq!(h, e.hodge_split_eigen(n, w).unwrap(), "n={n} w={w}");
            }
        }
        let reps = e.hodge_representatives(2, 6, 1).unwrap();
        assert_eq!(reps.len(), e.hodge_split(2, 6).unwrap()[0]);
    }
}
