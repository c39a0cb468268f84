//! Kähler differentials `Ω^p` of a presented graded algebra, weight by weight.
//!
//! `Ω^p` is presented as the free module on `dx_S` (`S` a `p`-subset of the
//! generators) modulo `A·(dg ∧ dx_T)` for the relations `g`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use smallvec::SmallVec;

use crate::algebra::{GradedAlgebra, GradedHom, Monomial, Poly};
use crate::error::{Error, Result};
use crate::hochschild::{BarChain, HochschildEngine, Key, TensorBasis};
use crate::linalg::{rank_of_columns, Rational, SparseMatrix, SparseVector};

/// Sorted generator indices of a wedge monomial `dx_S`.
pub type Subset = SmallVec<[u8; 4]>;

/// A differential form: wedge monomials with polynomial coefficients.
pub type Form = BTreeMap<Subset, Poly>;

fn subsets(n: usize, p: usize) -> Vec<Subset> {
    fn go(start: usize, n: usize, p: usize, cur: &mut Subset, out: &mut Vec<Subset>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i as u8);
            go(i + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, p, &mut Subset::new(), &mut out);
    out
}

/// Partial derivative of a polynomial (no reduction).
pub fn partial(p: &Poly, i: usize, weights: &[u32]) -> Poly {
    let n = p.nvars();
    Poly::from_terms(
        n,
        p.terms().iter().filter_map(|(m, c)| {
            let e = m.exponents()[i];
            if e == 0 {
                return None;
            }
            let mut ex = m.exponents().to_vec();
            ex[i] -= 1;
            Some((Monomial::from_exponents(&ex, weights), c * Rational::from_integer(e.into())))
        }),
    )
}

/// Exterior derivative of a function: `Σ ∂p/∂x_i dx_i`.
pub fn d_function(alg: &GradedAlgebra, p: &Poly) -> Form {
    let mut f = Form::new();
    for i in 0..p.nvars() {
        let q = alg.nf(&partial(p, i, alg.weights()));
        if !q.is_zero() {
            f.insert(SmallVec::from_slice(&[i as u8]), q);
        }
    }
    f
}

/// Sign and sorted union of two disjoint subsets, or `None` if they meet.
fn merge(a: &[u8], b: &[u8]) -> Option<(bool, Subset)> {
    let mut inversions = 0usize;
    for x in a {
        for y in b {
            if x == y {
                return None;
            }
            if y < x {
                inversions += 1;
            }
        }
    }
    let mut s: Subset = a.iter().chain(b).copied().collect();
    s.sort_unstable();
    Some((inversions % 2 == 1, s))
}

pub fn wedge(alg: &GradedAlgebra, a: &Form, b: &Form) -> Form {
    let mut out = Form::new();
    for (s, p) in a {
        for (t, q) in b {
            if let Some((neg, u)) = merge(s, t) {
                let mut prod = alg.multiply(p, q);
                if neg {
                    prod = prod.neg();
                }
                let e = out.entry(u).or_insert_with(|| Poly::zero(alg.nvars()));
                *e = e.add(&prod);
            }
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

fn form_weight(alg: &GradedAlgebra, s: &[u8]) -> u32 {
    s.iter().map(|i| alg.weights()[*i as usize]).sum()
}

/// `Ω^p` of one algebra, presented per weight.
#[derive(Clone, Debug)]
pub struct DifferentialModule {
    algebra: Arc<GradedAlgebra>,
    p: usize,
    subsets: Vec<Subset>,
}

/// Free generators `m dx_S` of one weight, in presentation order.
#[derive(Clone, Debug, Default)]
pub struct FreeBasis {
    /// `(subset index, offset)` blocks; each block spans `A_{w - wt(S)}`.
    pub blocks: Vec<(usize, u32, u32)>,
    pub len: usize,
}

impl DifferentialModule {
    pub fn new(algebra: Arc<GradedAlgebra>, p: usize) -> Self {
        let subsets = subsets(algebra.nvars(), p);
        DifferentialModule { algebra, p, subsets }
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    /// Block layout of the free module in weight `w`.
    pub fn free_basis(&self, w: u32) -> FreeBasis {
        let mut fb = FreeBasis::default();
        for (k, s) in self.subsets.iter().enumerate() {
            let sw = form_weight(&self.algebra, s);
            if sw > w {
                continue;
            }
            let len = self.algebra.dim(w - sw) as u32;
            if len > 0 {
                fb.blocks.push((k, fb.len as u32, len));
                fb.len += len as usize;
            }
        }
        fb
    }

    /// Coordinates of a weight-`w` form in the free module.
    pub fn coords(&self, w: u32, form: &Form) -> Result<SparseVector> {
        let fb = self.free_basis(w);
        let mut e = Vec::new();
        for (s, poly) in form {
            if poly.is_zero() {
                continue;
            }
            let k = self
                .subsets
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| Error::Unsupported("form has the wrong degree".into()))?;
            let sw = form_weight(&self.algebra, s);
            let Some(&(_, off, _)) = fb.blocks.iter().find(|b| b.0 == k) else {
                return Err(Error::Unsupported("form is not homogeneous".into()));
            };
            let v = self.algebra.coords(w - sw, poly)?;
            e.extend(v.entries().iter().map(|(i, c)| (i + off, c.clone())));
        }
        Ok(SparseVector::from_entries(e))
    }

    /// The form `m dx_S` of free coordinate `i`.
    pub fn basis_form(&self, w: u32, fb: &FreeBasis, i: usize) -> (Monomial, Subset) {
        let &(k, off, _) = fb
            .blocks
            .iter()
            .rev()
            .find(|b| b.1 as usize <= i)
            .expect("coordinate in range");
        let s = &self.subsets[k];
        let sw = form_weight(&self.algebra, s);
        let m = self.algebra.weight_basis(w - sw).monomials()[i - off as usize].clone();
        (m, s.clone())
    }

    /// Relation columns `m · dg ∧ dx_T` spanning the kernel of the free module onto `Ω^p_w`.
    pub fn relations(&self, w: u32) -> Vec<SparseVector> {
        if self.p == 0 {
            return Vec::new();
        }
        let alg = &self.algebra;
        let mut out = Vec::new();
        let lower = subsets(alg.nvars(), self.p - 1);
        for g in alg.relations() {
            let gw = g.weight().expect("relations are homogeneous");
            let dg = d_function(alg, g);
            for t in &lower {
                let tw = form_weight(alg, t) + gw;
                if tw > w {
                    continue;
                }
                let mut dt = Form::new();
                dt.insert(t.clone(), Poly::one(alg.nvars()));
                let base = wedge(alg, &dg, &dt);
                for m in alg.weight_basis(w - tw).monomials() {
                    let mf: Form = base
                        .iter()
                        .map(|(s, p)| (s.clone(), alg.nf(&p.mul_term(m, &Rational::one()))))
                        .collect();
                    let v = self.coords(w, &mf).expect("relation forms are homogeneous");
                    if !v.is_zero() {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    /// `dim Ω^p_w`.
    pub fn dim(&self, w: u32) -> usize {
        let fb = self.free_basis(w);
        fb.len - rank_of_columns(&self.relations(w), fb.len)
    }

    /// Matrix of the de Rham differential between free modules, `F^p_w -> F^{p+1}_w`.
    pub fn de_rham_matrix(&self, w: u32) -> SparseMatrix {
        let next = DifferentialModule::new(self.algebra.clone(), self.p + 1);
        let fb = self.free_basis(w);
        let alg = &self.algebra;
        let cols = (0..fb.len)
            .map(|i| {
                let (m, s) = self.basis_form(w, &fb, i);
                let mut ds = Form::new();
                ds.insert(s, Poly::one(alg.nvars()));
                let f = wedge(alg, &d_function(alg, &Poly::term(m, Rational::one())), &ds);
                next.coords(w, &f).expect("d preserves weight")
            })
            .collect();
        SparseMatrix::from_columns(next.free_basis(w).len, cols)
    }

    /// Check that `d` descends to `Ω^p_w -> Ω^{p+1}_w` and that `d∘d = 0`.
    pub fn check_de_rham(&self, w: u32) -> Result<()> {
        let d = self.de_rham_matrix(w);
        let next = DifferentialModule::new(self.algebra.clone(), self.p + 1);
        let dd = next.de_rham_matrix(w).mul(&d)?;
        if !dd.is_zero() {
            return Err(Error::CompositionNonzero(format!("d∘d on Ω^{} in weight {w}", self.p)));
        }
        let rel_next = next.relations(w);
        let len = next.free_basis(w).len;
        let base = rank_of_columns(&rel_next, len);
        let mut all = rel_next;
        all.extend(self.relations(w).iter().map(|v| d.apply(v)));
        if rank_of_columns(&all, len) != base {
            return Err(Error::CompositionNonzero(format!(
                "d does not preserve the relations of Ω^{} in weight {w}",
                self.p
            )));
        }
        Ok(())
    }
}

/// `dim Ω^p_{A/ℚ}` in weight `w`.
pub fn omega_dims(a: &Arc<GradedAlgebra>, p: usize, w: u32) -> usize {
    DifferentialModule::new(a.clone(), p).dim(w)
}

/// Image of `m dx_S` under a hom: `ν(m) dν(x_{s1}) ∧ …`.
fn push_form(hom: &GradedHom, m: &Monomial, s: &[u8]) -> Form {
    let tgt = hom.target();
    let mut f = Form::new();
    f.insert(Subset::new(), hom.apply(&Poly::term(m.clone(), Rational::one())));
    for i in s {
        f = wedge(tgt, &f, &d_function(tgt, &hom.images()[*i as usize]));
    }
    f
}

/// `dim ker(Ω^p_A -> Ω^p_B)` in weight `w`.
pub fn torsion_dims(hom: &GradedHom, p: usize, w: u32) -> Result<usize> {
    let src = DifferentialModule::new(hom.source().clone(), p);
    let tgt = DifferentialModule::new(hom.target().clone(), p);
    let fb = src.free_basis(w);
    let tb = tgt.free_basis(w);
    let mut images = Vec::with_capacity(fb.len);
    for i in 0..fb.len {
        let (m, s) = src.basis_form(w, &fb, i);
        let f = push_form(hom, &m, &s);
        let f: Form = f.into_iter().map(|(k, q)| (k, hom.target().nf(&q))).collect();
        images.push(tgt.coords(w, &f)?);
    }
    let rel_t = tgt.relations(w);
    let base = rank_of_columns(&rel_t, tb.len);
    let mut all = rel_t;
    all.extend(images);
    let induced = rank_of_columns(&all, tb.len) - base;
    Ok(src.dim(w) - induced)
}

/// Antisymmetrization `Ω^n -> HH_n` on one weight slice.
#[derive(Clone, Debug)]
pub struct HkrMap {
    pub n: usize,
    pub w: u32,
    /// Chain-level images of the free generators `m dx_S`, as bar chains.
    pub images: Vec<BarChain>,
    /// Matrix over the free generators (columns) and the slice basis (rows).
    pub matrix: SparseMatrix,
    pub basis: TensorBasis,
}

fn hkr_chain(engine: &HochschildEngine, m: &Monomial, s: &[u8]) -> Result<BarChain> {
    let alg = engine.algebra();
    let n = s.len();
    let mut c = BarChain::zero(alg, n, engine.max_weight());
    let mut fact = Rational::one();
    for k in 2..=n {
        fact *= Rational::from_integer(k.into());
    }
    let scale = fact.recip();
    for p in crate::hochschild::permutations(n) {
        let mut entries = vec![Poly::term(m.clone(), Rational::one())];
        entries.extend(p.iter().map(|j| alg.generator(s[*j as usize] as usize)));
        let coef = if crate::hochschild::is_odd(&p) { -scale.clone() } else { scale.clone() };
        c.add_term(&coef, &entries)?;
    }
    Ok(c)
}

/// The antisymmetrization map on the `(n, w)` slice, over all multidegree classes.
pub fn hkr_map(engine: &HochschildEngine, n: usize, w: u32) -> Result<HkrMap> {
    let module = DifferentialModule::new(engine.algebra().clone(), n);
    let fb = module.free_basis(w);
    let basis = engine.slice_basis(n, w);
    let mut images = Vec::with_capacity(fb.len);
    let mut cols = Vec::with_capacity(fb.len);
    for i in 0..fb.len {
        let (m, s) = module.basis_form(w, &fb, i);
        let c = hkr_chain(engine, &m, &s)?;
        cols.push(engine.chain_vector(&c, &basis)?);
        images.push(c);
    }
    Ok(HkrMap { n, w, images, matrix: SparseMatrix::from_columns(basis.len(), cols), basis })
}

/// Dimension of the image of `Ω^n_w` in `HH_n`, class by class; also checks
/// that every image is a cycle.
pub fn hkr_image_dim(engine: &HochschildEngine, n: usize, w: u32) -> Result<usize> {
    let alg = engine.algebra().clone();
    let module = DifferentialModule::new(alg.clone(), n);
    let fb = module.free_basis(w);
    let mut by_class: BTreeMap<Key, Vec<BarChain>> = BTreeMap::new();
    for i in 0..fb.len {
        let (m, s) = module.basis_form(w, &fb, i);
        let mut ex = m.exponents().to_vec();
        for j in &s {
            ex[*j as usize] += 1;
        }
        let key: Key = alg.multidegree(&alg.monomial(&ex)).into_iter().collect();
        by_class.entry(key).or_default().push(hkr_chain(engine, &m, &s)?);
    }
    let conv = engine.convention();
    let parts: Vec<Result<usize>> = by_class
        .into_par_iter()
        .map(|(key, chains)| {
            let (_, _, bn1) = engine.b_matrix(n + 1, w, &key)?;
            let basis = TensorBasis::new(engine.tensors(n, w, &key));
            let mut vecs = Vec::with_capacity(chains.len());
            for c in &chains {
                if !c.boundary(conv).is_zero() {
                    return Err(Error::CompositionNonzero(format!(
                        "antisymmetrized form {} is not a cycle",
                        c.format()
                    )));
                }
                vecs.push(engine.chain_vector(c, &basis)?);
            }
            Ok(crate::linalg::rank_modulo(&vecs, bn1.columns(), basis.len()))
        })
        .collect();
    parts.into_iter().sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Smoothness {
    Smooth,
    Singular {
        /// The singular point found (the origin, for connected gradings).
        locus: String,
        embedding_dim: usize,
        krull_dim: usize,
        reduced: bool,
    },
}

impl Smoothness {
    pub fn is_smooth(&self) -> bool {
        matches!(self, Smoothness::Smooth)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Smoothness::Smooth => "SMOOTH",
            Smoothness::Singular { .. } => "SINGULAR",
        }
    }
}

/// Jacobian criterion for a connected graded algebra.
///
/// The origin lies in the closure of every graded orbit, so the algebra is
/// smooth iff it is regular at the origin: embedding dimension (generators
/// minus the rank of the linear parts of the relations) equals Krull dimension.
/// `cutoff` bounds the weights probed for nilpotent generators.
pub fn jacobian_smooth(a: &GradedAlgebra, cutoff: u32) -> Result<Smoothness> {
    let n = a.nvars();
    if n >= 64 {
        return Err(Error::Indeterminate(format!("{n} generators exceed the dimension search")));
    }
    let mut rows = Vec::new();
    for r in a.relations() {
        let mut row = vec![Rational::zero(); n];
        for (m, c) in r.terms() {
            if m.degree() == 1 {
                let i = m.support().next().expect("degree one");
                row[i] = c.clone();
            }
        }
        rows.push(row);
    }
    let lin = if rows.is_empty() { 0 } else { SparseMatrix::from_rows(&rows).rank() };
    let embedding_dim = n - lin;
    let krull_dim = a.krull_dim();
    if embedding_dim == krull_dim {
        return Ok(Smoothness::Smooth);
    }
    let mut reduced = true;
    for i in 0..n {
        let g = a.generator(i);
        let w = a.weights()[i];
        let mut pw = g.clone();
        let mut k = 1;
        while (k + 1) * w <= cutoff && !pw.is_zero() {
            pw = a.multiply(&pw, &g);
            k += 1;
        }
        if pw.is_zero() {
            reduced = false;
        }
    }
    Ok(Smoothness::Singular { locus: "origin".into(), embedding_dim, krull_dim, reduced })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::algebra_hom;

    fn alg(s: &str) -> Arc<GradedAlgebra> {
        Arc::new(GradedAlgebra::parse(s).unwrap())
    }

    fn cusp() -> Arc<GradedAlgebra> {
        alg("algebra cusp\nvars x:2 y:3\nrel y^2 - x^3")
    }

    #[test]
    fn cusp_one_forms() {
        let a = cusp();
        assert_eq!(omega_dims(&a, 1, 5), 2);
        assert_eq!(omega_dims(&a, 1, 6), 1);
        for w in 0..10 {
            assert_eq!(omega_dims(&a, 0, w), a.dim(w));
        }
        assert_eq!(omega_dims(&a, 3, 12), 0);
    }

    #[test]
    fn cusp_torsion() {
        let a = cusp();
        let t = alg("algebra line\nvars t:1");
        let h = algebra_hom(a, t.clone(), vec![t.parse_poly("t^2").unwrap(), t.parse_poly("t^3").unwrap()]).unwrap();
        let dims: Vec<usize> = (0..14).map(|w| torsion_dims(&h, 1, w).unwrap()).collect();
        assert_eq!(dims.iter().sum::<usize>(), 2);
        assert_eq!((dims[5], dims[7]), (1, 1));
        let id = GradedHom::identity(t);
        assert!((0..8).all(|w| torsion_dims(&id, 1, w).unwrap() == 0));
    }

    #[test]
    fn de_rham_complex() {
        for a in [cusp(), alg("vars x:1 y:1 z:1\nrel z^2 - x*y")] {
            for p in 0..3 {
                for w in 0..8 {
                    DifferentialModule::new(a.clone(), p).check_de_rham(w).unwrap();
                }
            }
        }
    }

    #[test]
    fn hkr_examples() {
        let line = alg("vars x:1");
        let e = HochschildEngine::new(line, 6);
        for w in 1..=6 {
            assert_eq!(hkr_image_dim(&e, 1, w).unwrap(), 1);
        }
        let plane = alg("vars x:1 y:1");
        let e = HochschildEngine::new(plane, 4);
        let m = hkr_map(&e, 2, 2).unwrap();
        assert_eq!(m.images.len(), 1);
        assert_eq!(m.images[0].format(), "-1/2[y|x] + 1/2[x|y]");
        assert_eq!(hkr_image_dim(&e, 2, 2).unwrap(), 1);
        let c = HochschildEngine::new(cusp(), 6);
        assert_eq!(hkr_map(&c, 1, 1).unwrap().matrix.ncols(), 0);
    }

    #[test]
    fn smoothness_verdicts() {
        assert!(jacobian_smooth(&alg("vars x:1 y:1"), 8).unwrap().is_smooth());
        assert!(!jacobian_smooth(&cusp(), 8).unwrap().is_smooth());
        match jacobian_smooth(&alg("vars e:1\nrel e^2"), 8).unwrap() {
            Smoothness::Singular { reduced, .. } => assert!(!reduced),
            s => panic!("{s:?}"),
        }
        // A linear relation only re-embeds a plane.
        assert!(jacobian_smooth(&alg("vars x:1 y:1 z:1\nrel z - x"), 8).unwrap().is_smooth());
    }
}
