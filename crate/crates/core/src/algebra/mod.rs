//! Connected graded commutative algebras over the rationals.

mod groebner;
mod hom;
pub(crate) mod parse;
mod poly;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::Zero;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::linalg::{Rational, SparseMatrix, SparseVector};

pub use hom::{algebra_hom, GradedHom};
pub use poly::{Monomial, Poly};

use parse::{PolyParser, Statement};

/// Monomial basis of one weight component, in decreasing monomial order.
#[derive(Debug)]
pub struct WeightBasis {
    weight: u32,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
}

impl WeightBasis {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).map(|&i| i as usize)
    }
}

/// Finitely presented graded algebra `Q[x_1..x_n]/I` with positive weights.
pub struct GradedAlgebra {
    name: String,
    names: Vec<String>,
    weights: Vec<u32>,
    relations: Vec<Poly>,
    gb: Vec<Poly>,
    nf_cache: RwLock<HashMap<Monomial, Arc<Poly>>>,
    bases: RwLock<HashMap<u32, Arc<WeightBasis>>>,
    table: RwLock<Option<Arc<BasisTable>>>,
    gradings: OnceLock<Vec<Vec<i64>>>,
}

impl Clone for GradedAlgebra {
    fn clone(&self) -> Self {
        Self::assemble(
            self.name.clone(),
            self.names.clone(),
            self.weights.clone(),
            self.relations.clone(),
            self.gb.clone(),
        )
    }
}

impl std::fmt::Debug for GradedAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl GradedAlgebra {
    fn assemble(
        name: String,
        names: Vec<String>,
        weights: Vec<u32>,
        relations: Vec<Poly>,
        gb: Vec<Poly>,
    ) -> Self {
        GradedAlgebra {
            name,
            names,
            weights,
            relations,
            gb,
            nf_cache: RwLock::new(HashMap::new()),
            bases: RwLock::new(HashMap::new()),
            table: RwLock::new(None),
            gradings: OnceLock::new(),
        }
    }

    /// Build from generators and already-parsed relations.
    pub fn new(name: &str, generators: &[(&str, u32)], relations: Vec<Poly>) -> Result<Self> {
        let names: Vec<String> = generators.iter().map(|g| g.0.to_string()).collect();
        let weights: Vec<u32> = generators.iter().map(|g| g.1).collect();
        if let Some(g) = generators.iter().find(|g| g.1 == 0) {
            return Err(Error::ZeroWeightGenerator(g.0.to_string()));
        }
        for r in &relations {
            if !r.is_homogeneous() {
                return Err(Error::InhomogeneousRelation {
                    relation: r.format(&names),
                    weights: r.term_weights(),
                });
            }
            if r.weight() == Some(0) {
                return Err(Error::Unsupported(
                    "relation is a nonzero constant; the algebra would be zero".into(),
                ));
            }
        }
        let relations: Vec<Poly> = relations.into_iter().filter(|r| !r.is_zero()).collect();
        let gb = groebner::groebner(&relations, &weights);
        Ok(Self::assemble(name.to_string(), names, weights, relations, gb))
    }

    /// Polynomial ring on the given generators.
    pub fn polynomial(name: &str, generators: &[(&str, u32)]) -> Self {
        Self::new(name, generators, Vec::new()).expect("positive weights")
    }

    /// Build from parsed text, using the relation strings in the generator names.
    pub fn with_relations(name: &str, generators: &[(&str, u32)], relations: &[&str]) -> Result<Self> {
        let names: Vec<String> = generators.iter().map(|g| g.0.to_string()).collect();
        let weights: Vec<u32> = generators.iter().map(|g| g.1).collect();
        if let Some(g) = generators.iter().find(|g| g.1 == 0) {
            return Err(Error::ZeroWeightGenerator(g.0.to_string()));
        }
        let mut rels = Vec::new();
        for r in relations {
            rels.push(PolyParser::new(&names, &weights, r, 1, 1).parse_all()?);
        }
        Self::new(name, generators, rels)
    }

    /// Parse the plain-text presentation format.
    pub fn parse(text: &str) -> Result<Self> {
        let st = parse::statements(text);
        Self::from_statements(&st, "algebra")
    }

    pub(crate) fn from_statements(st: &[Statement], default_name: &str) -> Result<Self> {
        let mut name = default_name.to_string();
        let mut vars: Option<Vec<(String, i64)>> = None;
        let mut rels: Vec<(Poly, &Statement)> = Vec::new();
        let mut weights: Vec<u32> = Vec::new();
        let mut names: Vec<String> = Vec::new();
        for (k, s) in st.iter().enumerate() {
            match s.keyword.as_str() {
                "algebra" => {
                    if k != 0 {
                        return Err(Error::parse(s.line, s.column, "`algebra` must come first"));
                    }
                    let n = s.rest.trim();
                    if n.is_empty() || n.contains(char::is_whitespace) {
                        return Err(Error::parse(s.line, s.rest_column, "expected a single algebra name"));
                    }
                    name = n.to_string();
                }
                "vars" => {
                    if vars.is_some() {
                        return Err(Error::parse(s.line, s.column, "duplicate `vars` line"));
                    }
                    let v = parse::parse_vars(s)?;
                    for (sym, w) in &v {
                        if *w == 0 {
                            return Err(Error::ZeroWeightGenerator(sym.clone()));
                        }
                        if *w < 0 || *w > u16::MAX as i64 {
                            return Err(Error::parse(s.line, s.rest_column, format!("weight of `{sym}` must be a positive integer")));
                        }
                    }
                    names = v.iter().map(|x| x.0.clone()).collect();
                    weights = v.iter().map(|x| x.1 as u32).collect();
                    vars = Some(v);
                }
                "rels:" | "rels" => {
                    if !s.rest.is_empty() {
                        return Err(Error::parse(s.line, s.rest_column, "`rels:` takes no arguments"));
                    }
                }
                "rel" => {
                    if vars.is_none() {
                        return Err(Error::parse(s.line, s.column, "`rel` before `vars`"));
                    }
                    if s.rest.is_empty() {
                        return Err(Error::parse(s.line, s.rest_column, "empty relation"));
                    }
                    let p = PolyParser::new(&names, &weights, &s.rest, s.line, s.rest_column).parse_all()?;
                    rels.push((p, s));
                }
                other => {
                    return Err(Error::parse(s.line, s.column, format!("unknown keyword `{other}`")));
                }
            }
        }
        if vars.is_none() {
            let (line, col) = st.first().map_or((1, 1), |s| (s.line, s.column));
            return Err(Error::parse(line, col, "missing `vars` line"));
        }
        for (p, s) in &rels {
            if !p.is_homogeneous() {
                return Err(Error::InhomogeneousRelation {
                    relation: s.rest.clone(),
                    weights: p.term_weights(),
                });
            }
            if p.weight() == Some(0) {
                return Err(Error::parse(s.line, s.rest_column, "relation is a nonzero constant"));
            }
        }
        let gens: Vec<(&str, u32)> = names.iter().map(|s| s.as_str()).zip(weights.iter().copied()).collect();
        Self::new(&name, &gens, rels.into_iter().map(|r| r.0).collect())
    }

    /// Parse a polynomial in this algebra's generators (not reduced).
    pub fn parse_poly(&self, text: &str) -> Result<Poly> {
        PolyParser::new(&self.names, &self.weights, text, 1, 1).parse_all()
    }

    pub(crate) fn parse_poly_at(&self, text: &str, line: usize, col: usize) -> Result<Poly> {
        PolyParser::new(&self.names, &self.weights, text, line, col).parse_all()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    /// Reduced monic Gröbner basis of the relation ideal.
    pub fn groebner_basis(&self) -> &[Poly] {
        &self.gb
    }

    /// Whether every reduced basis element is a monomial or a sum of two monomials
    /// with unit coefficients; then products of basis monomials are single monomials or zero.
    pub fn is_binomial(&self) -> bool {
        self.gb.iter().all(|g| {
            let t = g.terms();
            let unit = |c: &Rational| c.is_integer() && (c.to_integer() == 1.into() || c.to_integer() == (-1).into());
            t.len() == 1 || (t.len() == 2 && unit(&t[0].1) && unit(&t[1].1))
        })
    }

    pub fn is_free(&self) -> bool {
        self.gb.is_empty()
    }

    pub fn generator(&self, i: usize) -> Poly {
        Poly::term(Monomial::var(i, &self.weights), Rational::from_integer(1.into()))
    }

    pub fn monomial(&self, exps: &[u16]) -> Monomial {
        Monomial::from_exponents(exps, &self.weights)
    }

    pub fn format(&self, p: &Poly) -> String {
        p.format(&self.names)
    }

    pub fn describe(&self) -> String {
        let vars: Vec<String> = self
            .names
            .iter()
            .zip(&self.weights)
            .map(|(n, w)| format!("{n}:{w}"))
            .collect();
        let mut s = format!("algebra {}\nvars {}\n", self.name, vars.join(" "));
        for r in &self.relations {
            s.push_str(&format!("rel {}\n", self.format(r)));
        }
        s
    }

    /// Same presentation under another name.
    pub fn renamed(&self, name: &str) -> Self {
        let mut a = self.clone();
        a.name = name.to_string();
        a
    }

    /// Polynomial ring over this algebra in one more generator.
    pub fn adjoin(&self, sym: &str, weight: u32) -> Result<Self> {
        if self.names.iter().any(|n| n == sym) {
            return Err(Error::Unsupported(format!("generator `{sym}` already exists")));
        }
        let mut gens: Vec<(&str, u32)> = self
            .names
            .iter()
            .map(|s| s.as_str())
            .zip(self.weights.iter().copied())
            .collect();
        gens.push((sym, weight));
        let n = gens.len();
        let rels = self
            .relations
            .iter()
            .map(|r| {
                Poly::from_terms(
                    n,
                    r.terms().iter().map(|(m, c)| {
                        let mut e = m.exponents().to_vec();
                        e.push(0);
                        (Monomial::from_exponents(&e, &gens.iter().map(|g| g.1).collect::<Vec<_>>()), c.clone())
                    }),
                )
            })
            .collect();
        Self::new(&format!("{}[{}]", self.name, sym), &gens, rels)
    }

    fn reducer(&self, m: &Monomial) -> Option<&Poly> {
        self.gb
            .iter()
            .find(|g| g.leading().is_some_and(|(lm, _)| lm.divides(m)))
    }

    pub fn is_standard(&self, m: &Monomial) -> bool {
        self.reducer(m).is_none()
    }

    /// Normal form of a monomial (memoised).
    pub fn nf_monomial(&self, m: &Monomial) -> Arc<Poly> {
        if let Some(p) = self.nf_cache.read().unwrap().get(m) {
            return p.clone();
        }
        let p = match self.reducer(m) {
            None => Poly::term(m.clone(), Rational::from_integer(1.into())),
            Some(g) => {
                let (lm, lc) = g.leading().unwrap();
                let q = lm.quotient_of(m);
                let mut acc = Poly::zero(self.nvars());
                for (t, c) in &g.terms()[1..] {
                    let sub = self.nf_monomial(&t.mul(&q));
                    acc = acc.axpy(&(-(c / lc)), &sub);
                }
                acc
            }
        };
        let p = Arc::new(p);
        self.nf_cache.write().unwrap().insert(m.clone(), p.clone());
        p
    }

    pub fn nf(&self, p: &Poly) -> Poly {
        let mut acc = Poly::zero(self.nvars());
        for (m, c) in p.terms() {
            acc = acc.axpy(c, &self.nf_monomial(m));
        }
        acc
    }

    pub fn multiply(&self, p: &Poly, q: &Poly) -> Poly {
        self.nf(&p.mul(q))
    }

    /// Standard monomials of weight `w`.
    pub fn weight_basis(&self, w: u32) -> Arc<WeightBasis> {
        if let Some(b) = self.bases.read().unwrap().get(&w) {
            return b.clone();
        }
        let mut mons = Vec::new();
        let mut exps = vec![0u16; self.nvars()];
        self.enumerate(0, w, &mut exps, &mut mons);
        mons.sort_unstable_by(|a, b| b.cmp(a));
        let index = mons
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();
        let b = Arc::new(WeightBasis {
            weight: w,
            monomials: mons,
            index,
        });
        self.bases.write().unwrap().insert(w, b.clone());
        b
    }

    fn enumerate(&self, i: usize, rem: u32, exps: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i == self.nvars() {
            if rem == 0 {
                let m = self.monomial(exps);
                if self.is_standard(&m) {
                    out.push(m);
                }
            }
            return;
        }
        let w = self.weights[i];
        let mut e = 0u32;
        while e * w <= rem {
            exps[i] = e as u16;
            // Prune as soon as a prefix is already non-standard.
            let m = self.monomial(exps);
            if !self.is_standard(&m) {
                break;
            }
            self.enumerate(i + 1, rem - e * w, exps, out);
            e += 1;
        }
        exps[i] = 0;
    }

    pub fn dim(&self, w: u32) -> usize {
        self.weight_basis(w).len()
    }

    /// Coordinates of a weight-`w` polynomial in `weight_basis(w)`, after reduction.
    pub fn coords(&self, w: u32, p: &Poly) -> Result<SparseVector> {
        let basis = self.weight_basis(w);
        let p = self.nf(p);
        let mut entries = Vec::with_capacity(p.terms().len());
        for (m, c) in p.terms() {
            match basis.position(m) {
                Some(i) if m.weight() == w => entries.push((i as u32, c.clone())),
                _ => {
                    return Err(Error::Unsupported(format!(
                        "polynomial {} is not homogeneous of weight {w}",
                        self.format(&p)
                    )))
                }
            }
        }
        Ok(SparseVector::from_entries(entries))
    }

    pub fn from_coords(&self, w: u32, v: &SparseVector) -> Poly {
        let basis = self.weight_basis(w);
        Poly::from_terms(
            self.nvars(),
            v.entries()
                .iter()
                .map(|(i, c)| (basis.monomials()[*i as usize].clone(), c.clone())),
        )
    }

    /// Matrix of multiplication by a homogeneous `f` from weight `w` to `w + deg f`.
    pub fn multiplication_matrix(&self, f: &Poly, w: u32) -> Result<SparseMatrix> {
        let fw = f.weight().unwrap_or(0);
        let src = self.weight_basis(w);
        let tgt = self.dim(w + fw);
        let mut cols = Vec::with_capacity(src.len());
        for m in src.monomials() {
            let p = f.mul_term(m, &Rational::from_integer(1.into()));
            cols.push(self.coords(w + fw, &p)?);
        }
        Ok(SparseMatrix::from_columns(tgt, cols))
    }

    /// Krull dimension, read off the leading monomials.
    pub fn krull_dim(&self) -> usize {
        let n = self.nvars();
        let supports: Vec<u64> = self
            .gb
            .iter()
            .map(|g| {
                g.leading()
                    .unwrap()
                    .0
                    .support()
                    .fold(0u64, |acc, i| acc | (1 << i))
            })
            .collect();
        let mut best = 0;
        for s in 0u64..(1u64 << n) {
            if supports.iter().all(|l| l & !s != 0) {
                best = best.max(s.count_ones() as usize);
            }
        }
        best
    }

    /// Integer linear functionals on exponent vectors that are constant on every relation.
    ///
    /// They span all torsion-free gradings compatible with the presentation; the
    /// weight functional is in their span. Free algebras get the coordinate functionals.
    pub fn grading_functionals(&self) -> &[Vec<i64>] {
        self.gradings.get_or_init(|| {
            let n = self.nvars();
            let mut diffs: Vec<Vec<i64>> = Vec::new();
            for g in &self.gb {
                let t = g.terms();
                for k in 1..t.len() {
                    diffs.push(
                        t[0].0
                            .exponents()
                            .iter()
                            .zip(t[k].0.exponents())
                            .map(|(a, b)| *a as i64 - *b as i64)
                            .collect(),
                    );
                }
            }
            if diffs.is_empty() {
                return (0..n)
                    .map(|i| (0..n).map(|j| (i == j) as i64).collect())
                    .collect();
            }
            let m = SparseMatrix::from_rows_i64(&diffs);
            m.kernel_basis()
                .iter()
                .map(|v| {
                    let ints = crate::linalg::primitive_ints(v.entries());
                    let mut row = vec![0i64; n];
                    for (i, x) in ints {
                        row[i as usize] = i64::try_from(x).expect("small grading functional");
                    }
                    if row.iter().all(|x| *x <= 0) {
                        row.iter_mut().for_each(|x| *x = -*x);
                    }
                    row
                })
                .collect()
        })
    }

    /// Multidegree of a monomial under [`Self::grading_functionals`].
    pub fn multidegree(&self, m: &Monomial) -> SmallVec<[i64; 4]> {
        self.grading_functionals()
            .iter()
            .map(|f| {
                f.iter()
                    .zip(m.exponents())
                    .map(|(a, e)| a * *e as i64)
                    .sum()
            })
            .collect()
    }

    /// Global basis table covering weights `0..=max_weight` (cached, grown on demand).
    pub fn table(&self, max_weight: u32) -> Arc<BasisTable> {
        if let Some(t) = self.table.read().unwrap().as_ref() {
            if t.max_weight >= max_weight {
                return t.clone();
            }
        }
        let t = Arc::new(BasisTable::build(self, max_weight));
        let mut slot = self.table.write().unwrap();
        match slot.as_ref() {
            Some(old) if old.max_weight >= max_weight => old.clone(),
            _ => {
                *slot = Some(t.clone());
                t
            }
        }
    }
}

/// All standard monomials of weight at most `max_weight`, numbered globally by
/// weight and then basis order, with a lazily filled product table.
pub struct BasisTable {
    max_weight: u32,
    offsets: Vec<u32>,
    weight_of: Vec<u32>,
    monomials: Vec<Monomial>,
    keys: Vec<SmallVec<[i64; 4]>>,
    products: Vec<OnceLock<Box<[(u32, Rational)]>>>,
    int_products: Option<Vec<OnceLock<Option<(u32, i64)>>>>,
    algebra_nf: Box<dyn Fn(&Monomial) -> Arc<Poly> + Send + Sync>,
    lookup: HashMap<Monomial, u32>,
}

impl BasisTable {
    fn build(a: &GradedAlgebra, max_weight: u32) -> Self {
        let mut offsets = Vec::with_capacity(max_weight as usize + 2);
        let mut weight_of = Vec::new();
        let mut monomials = Vec::new();
        for w in 0..=max_weight {
            offsets.push(monomials.len() as u32);
            for m in a.weight_basis(w).monomials() {
                weight_of.push(w);
                monomials.push(m.clone());
            }
        }
        offsets.push(monomials.len() as u32);
        let keys = monomials.iter().map(|m| a.multidegree(m)).collect();
        let n = monomials.len();
        let lookup = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();
        let snapshot = a.clone();
        // Share the memo with the source algebra when possible.
        let _ = &snapshot;
        let products = (0..n * n).map(|_| OnceLock::new()).collect();
        let int_products = a
            .is_binomial()
            .then(|| (0..n * n).map(|_| OnceLock::new()).collect());
        BasisTable {
            max_weight,
            offsets,
            weight_of,
            monomials,
            keys,
            products,
            int_products,
            algebra_nf: Box::new(move |m| snapshot.nf_monomial(m)),
            lookup,
        }
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Global ids of weight `w`.
    pub fn range(&self, w: u32) -> std::ops::Range<u32> {
        self.offsets[w as usize]..self.offsets[w as usize + 1]
    }

    pub fn gid(&self, w: u32, local: usize) -> u32 {
        self.offsets[w as usize] + local as u32
    }

    pub fn local(&self, gid: u32) -> usize {
        (gid - self.offsets[self.weight_of[gid as usize] as usize]) as usize
    }

    pub fn weight(&self, gid: u32) -> u32 {
        self.weight_of[gid as usize]
    }

    pub fn monomial(&self, gid: u32) -> &Monomial {
        &self.monomials[gid as usize]
    }

    pub fn key(&self, gid: u32) -> &[i64] {
        &self.keys[gid as usize]
    }

    pub fn lookup(&self, m: &Monomial) -> Option<u32> {
        self.lookup.get(m).copied()
    }

    /// Product of two basis elements, as global-id coordinates.
    pub fn mul(&self, a: u32, b: u32) -> &[(u32, Rational)] {
        let n = self.monomials.len();
        debug_assert!(self.weight(a) + self.weight(b) <= self.max_weight);
        self.products[a as usize * n + b as usize].get_or_init(|| {
            if a > b {
                return self.mul(b, a).into();
            }
            let m = self.monomials[a as usize].mul(&self.monomials[b as usize]);
            let p = (self.algebra_nf)(&m);
            let mut v: Vec<(u32, Rational)> = p
                .terms()
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(t, c)| (self.lookup[t], c.clone()))
                .collect();
            v.sort_unstable_by_key(|e| e.0);
            v.into_boxed_slice()
        })
    }

    /// Whether [`BasisTable::mul_unit`] is available.
    pub fn has_unit_products(&self) -> bool {
        self.int_products.is_some()
    }

    /// Product of two basis elements for binomial algebras: a single basis
    /// element with coefficient ±1, or `None` when the product vanishes.
    pub fn mul_unit(&self, a: u32, b: u32) -> Option<(u32, i64)> {
        let n = self.monomials.len();
        let table = self.int_products.as_ref().expect("algebra is binomial");
        *table[a as usize * n + b as usize].get_or_init(|| match self.mul(a, b) {
            [] => None,
            [(g, c)] if c.is_integer() => Some((*g, c.to_integer().try_into().expect("unit coefficient"))),
            _ => unreachable!("binomial algebras have monomial products"),
        })
    }

    /// Coordinates (global ids) of a polynomial already in normal form.
    pub fn vector_of(&self, p: &Poly) -> SparseVector {
        SparseVector::from_entries(p.terms().iter().map(|(m, c)| (self.lookup[m], c.clone())))
    }

    pub fn poly_of(&self, v: &SparseVector) -> Poly {
        let n = self.monomials.first().map_or(0, |m| m.nvars());
        Poly::from_terms(
            n,
            v.entries()
                .iter()
                .map(|(g, c)| (self.monomials[*g as usize].clone(), c.clone())),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cusp() -> GradedAlgebra {
        GradedAlgebra::parse("algebra cusp\nvars x:2 y:3\nrel y^2 - x^3").unwrap()
    }

    #[test]
    fn cusp_weight_bases() {
        let a = cusp();
        assert_eq!(a.dim(0), 1);
        assert_eq!(a.dim(1), 0);
        for w in 2..30 {
            assert_eq!(a.dim(w), 1, "weight {w}");
        }
        assert_eq!(a.weight_basis(6).monomials(), &[a.monomial(&[3, 0])]);
        let y = a.generator(1);
        let x = a.generator(0);
        assert_eq!(a.multiply(&y, &y), x.pow(3));
        let one = Poly::one(2);
        assert_eq!(a.multiply(&one, &y), y);
    }

    #[test]
    fn plane_hilbert_function() {
        let a = GradedAlgebra::parse("vars x:1 y:1; rels:").unwrap();
        for w in 0..20 {
            assert_eq!(a.dim(w), w as usize + 1);
        }
        assert_eq!(a.krull_dim(), 2);
    }

    #[test]
    fn dual_numbers() {
        let a = GradedAlgebra::parse("vars e:1; rel e^2").unwrap();
        let e = a.generator(0);
        assert!(a.multiply(&e, &e).is_zero());
        assert_eq!(a.dim(1), 1);
        assert_eq!(a.dim(2), 0);
        assert_eq!(a.krull_dim(), 0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            GradedAlgebra::parse("vars x:1 y:2\nrel y - x"),
            Err(Error::InhomogeneousRelation { .. })
        ));
        assert!(matches!(
            GradedAlgebra::parse("vars x:0"),
            Err(Error::ZeroWeightGenerator(_))
        ));
        assert!(matches!(
            GradedAlgebra::parse("vars x:1\nrel x +"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            GradedAlgebra::parse("algebra a\nfoo"),
            Err(Error::Parse { line: 2, column: 1, .. })
        ));
    }

    #[test]
    fn gradings_of_cusp() {
        let a = cusp();
        let g = a.grading_functionals();
        assert_eq!(g.len(), 1);
        let x = a.monomial(&[1, 0]);
        let y = a.monomial(&[0, 1]);
        let (dx, dy) = (a.multidegree(&x)[0], a.multidegree(&y)[0]);
        assert_eq!(dx * 3, dy * 2);
    }

    #[test]
    fn table_products() {
        let a = cusp();
        let t = a.table(12);
        let y = t.lookup(&a.monomial(&[0, 1])).unwrap();
        let p = t.mul(y, y);
        assert_eq!(p.len(), 1);
        assert_eq!(t.monomial(p[0].0), &a.monomial(&[3, 0]));
        assert_eq!(t.range(1).len(), 0);
    }
}
