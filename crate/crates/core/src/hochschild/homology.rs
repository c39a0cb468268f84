//! Hochschild and cyclic homology per (degree, weight), assembled from
//! multidegree classes. Ranks are cached in memory and optionally on disk.

use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::chain::{collect, connes, BarChain, SignConvention};
use super::slice::{self, Key, TensorBasis, TotalBasis};
use crate::algebra::{BasisTable, GradedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{rank_modulo, rank_of_i64_columns, Rational, SparseMatrix, SparseVector, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Kind {
    B,
    Total,
    Dim,
}

type CellKey = (Kind, usize, u32, Key);
type Cell = Arc<OnceLock<std::result::Result<usize, String>>>;

/// Hochschild/cyclic homology engine for one algebra up to a weight cutoff.
pub struct HochschildEngine {
    algebra: Arc<GradedAlgebra>,
    table: Arc<BasisTable>,
    max_weight: u32,
    conv: SignConvention,
    cells: Mutex<HashMap<CellKey, Cell>>,
    disk: Option<(PathBuf, Mutex<BTreeMap<String, usize>>)>,
}

fn cell_name(k: &CellKey) -> String {
    let kind = match k.0 {
        Kind::B => "b",
        Kind::Total => "d",
        Kind::Dim => "c",
    };
    let key: Vec<String> = k.3.iter().map(|x| x.to_string()).collect();
    format!("{kind}:{}:{}:{}", k.1, k.2, key.join(","))
}

impl HochschildEngine {
    pub fn new(algebra: Arc<GradedAlgebra>, max_weight: u32) -> Self {
        let table = algebra.table(max_weight);
        HochschildEngine {
            algebra,
            table,
            max_weight,
            conv: SignConvention::Standard,
            cells: Mutex::new(HashMap::new()),
            disk: None,
        }
    }

    pub fn with_convention(mut self, conv: SignConvention) -> Self {
        self.conv = conv;
        self
    }

    /// Persist ranks under `dir` (one JSON file per algebra and convention).
    pub fn with_cache_dir(mut self, dir: Option<PathBuf>) -> Result<Self> {
        let Some(dir) = dir else { return Ok(self) };
        std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.algebra.describe().hash(&mut h);
        self.conv.name().hash(&mut h);
        "ranks-v1".hash(&mut h);
        let path = dir.join(format!("khh-{:016x}.json", h.finish()));
        let map: BTreeMap<String, usize> = match std::fs::read_to_string(&path) {
            Ok(s) => serde_json::from_str(&s).unwrap_or_default(),
            Err(_) => BTreeMap::new(),
        };
        self.disk = Some((path, Mutex::new(map)));
        Ok(self)
    }

    /// Write cached ranks to disk, if a cache directory is configured.
    pub fn flush(&self) -> Result<()> {
        if let Some((path, map)) = &self.disk {
            let m = map.lock().unwrap();
            let s = serde_json::to_string(&*m).map_err(|e| Error::Io(e.to_string()))?;
            std::fs::write(path, s).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn table(&self) -> &Arc<BasisTable> {
        &self.table
    }

    pub fn convention(&self) -> SignConvention {
        self.conv
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    fn ensure_weight(&self, w: u32) -> Result<()> {
        if w > self.max_weight {
            return Err(Error::Cutoff(format!(
                "weight {w} requested from an engine built for weights <= {}",
                self.max_weight
            )));
        }
        Ok(())
    }

    fn cached(&self, k: CellKey, f: impl FnOnce() -> Result<usize>) -> Result<usize> {
        let name = self.disk.as_ref().map(|_| cell_name(&k));
        if let (Some((_, map)), Some(name)) = (&self.disk, &name) {
            if let Some(v) = map.lock().unwrap().get(name) {
                return Ok(*v);
            }
        }
        let cell = self.cells.lock().unwrap().entry(k).or_default().clone();
        let r = cell.get_or_init(|| f().map_err(|e| e.to_string()));
        match r {
            Ok(v) => {
                if let (Some((_, map)), Some(name)) = (&self.disk, name) {
                    map.lock().unwrap().insert(name, *v);
                }
                Ok(*v)
            }
            Err(msg) => Err(Error::CompositionNonzero(msg.clone())),
        }
    }

    /// Multidegree classes of weight `w` with their multiplicities.
    pub fn classes(&self, w: u32) -> Vec<(Key, usize)> {
        slice::classes(&self.algebra, w)
    }

    pub fn tensors(&self, n: usize, w: u32, key: &[i64]) -> Vec<super::Tensor> {
        slice::enumerate(&self.table, n, w, key)
    }

    /// Dimension of the chain group `C_n` in one class.
    pub fn chain_dim(&self, n: usize, w: u32, key: &[i64]) -> Result<usize> {
        self.ensure_weight(w)?;
        if n as u32 > w {
            return Ok(0);
        }
        self.cached((Kind::Dim, n, w, Key::from_slice(key)), || {
            Ok(self.tensors(n, w, key).len())
        })
    }

    /// Matrix of `b : C_n -> C_{n-1}` on one class, with both tensor bases.
    pub fn b_matrix(&self, n: usize, w: u32, key: &[i64]) -> Result<(TensorBasis, TensorBasis, SparseMatrix)> {
        self.ensure_weight(w)?;
        let src = TensorBasis::new(self.tensors(n, w, key));
        if n == 0 {
            return Ok((src.clone(), TensorBasis::default(), SparseMatrix::zeros(0, src.len())));
        }
        let tgt = TensorBasis::new(self.tensors(n - 1, w, key));
        let cols = slice::b_columns(&self.table, self.conv, src.tensors(), &tgt, true)?;
        let m = SparseMatrix::from_columns(tgt.len(), cols);
        Ok((src, tgt, m))
    }

    /// Rank of `b : C_n -> C_{n-1}` on one class.
    pub fn rank_b(&self, n: usize, w: u32, key: &[i64]) -> Result<usize> {
        self.ensure_weight(w)?;
        if n == 0 || n as u32 > w {
            return Ok(0);
        }
        self.cached((Kind::B, n, w, Key::from_slice(key)), || {
            if !self.table.has_unit_products() {
                let (_, _, m) = self.b_matrix(n, w, key)?;
                return Ok(m.rank());
            }
            let src = self.tensors(n, w, key);
            let tgt = TensorBasis::new(self.tensors(n - 1, w, key));
            let cols = slice::b_entries::<i64>(&self.table, self.conv, &src, &tgt, true)?;
            Ok(rank_of_i64_columns(cols, tgt.len()))
        })
    }

    pub fn hh_class(&self, n: usize, w: u32, key: &[i64]) -> Result<usize> {
        let c = self.chain_dim(n, w, key)?;
        Ok(c - self.rank_b(n, w, key)? - self.rank_b(n + 1, w, key)?)
    }

    /// `dim HH_n` in weight `w`.
    pub fn hh(&self, n: usize, w: u32) -> Result<usize> {
        self.ensure_weight(w)?;
        if n as u32 > w {
            return Ok(0);
        }
        let cl = self.classes(w);
        let parts: Vec<Result<usize>> = cl
            .par_iter()
            .map(|(k, mult)| Ok(self.hh_class(n, w, k)? * mult))
            .collect();
        parts.into_iter().sum()
    }

    /// Matrix of the total differential `TC_n -> TC_{n-1}` on one class.
    pub fn total_matrix(&self, n: usize, w: u32, key: &[i64]) -> Result<(TotalBasis, TotalBasis, SparseMatrix)> {
        self.ensure_weight(w)?;
        let src = TotalBasis::new(&self.table, n, w, key);
        if n == 0 {
            let len = src.len();
            return Ok((src, TotalBasis { parts: Vec::new(), offsets: Vec::new() }, SparseMatrix::zeros(0, len)));
        }
        let tgt = TotalBasis::new(&self.table, n - 1, w, key);
        for (_, b) in &src.parts {
            slice::check_connes(&self.table, self.conv, b.tensors())?;
        }
        let cols = slice::total_columns(&self.table, self.conv, &src, &tgt, n);
        let m = SparseMatrix::from_columns(tgt.len(), cols);
        Ok((src, tgt, m))
    }

    pub fn rank_total(&self, n: usize, w: u32, key: &[i64]) -> Result<usize> {
        self.ensure_weight(w)?;
        if n == 0 {
            return Ok(0);
        }
        self.cached((Kind::Total, n, w, Key::from_slice(key)), || {
            if !self.table.has_unit_products() {
                let (_, _, m) = self.total_matrix(n, w, key)?;
                return Ok(m.rank());
            }
            let src = TotalBasis::new(&self.table, n, w, key);
            let tgt = TotalBasis::new(&self.table, n - 1, w, key);
            for (_, b) in &src.parts {
                slice::check_connes(&self.table, self.conv, b.tensors())?;
            }
            let cols = slice::total_entries::<i64>(&self.table, self.conv, &src, &tgt, n);
            Ok(rank_of_i64_columns(cols, tgt.len()))
        })
    }

    fn total_dim(&self, n: usize, w: u32, key: &[i64]) -> Result<usize> {
        let mut s = 0;
        let mut k = n as i64;
        while k >= 0 {
            s += self.chain_dim(k as usize, w, key)?;
            k -= 2;
        }
        Ok(s)
    }

    pub fn hc_class(&self, n: usize, w: u32, key: &[i64]) -> Result<usize> {
        let c = self.total_dim(n, w, key)?;
        Ok(c - self.rank_total(n, w, key)? - self.rank_total(n + 1, w, key)?)
    }

    /// `dim HC_n` in weight `w`, from the (b,B) total complex.
    pub fn hc(&self, n: usize, w: u32) -> Result<usize> {
        self.ensure_weight(w)?;
        let cl = self.classes(w);
        let parts: Vec<Result<usize>> = cl
            .par_iter()
            .map(|(k, mult)| Ok(self.hc_class(n, w, k)? * mult))
            .collect();
        parts.into_iter().sum()
    }

    /// Cycles and boundaries of `C_n` in one class, as vectors over its tensor basis.
    pub fn cycles_and_boundaries(
        &self,
        n: usize,
        w: u32,
        key: &[i64],
    ) -> Result<(TensorBasis, Vec<SparseVector>, Vec<SparseVector>)> {
        let (src, _, bn) = self.b_matrix(n, w, key)?;
        let cycles = bn.kernel_basis();
        let (_, _, bn1) = self.b_matrix(n + 1, w, key)?;
        let bounds: Vec<SparseVector> = bn1
            .independent_columns()
            .into_iter()
            .map(|j| bn1.column(j).clone())
            .collect();
        Ok((src, cycles, bounds))
    }

    /// Cycles representing a basis of `HH_n` in weight `w`.
    pub fn hh_representatives(&self, n: usize, w: u32) -> Result<Vec<BarChain>> {
        self.ensure_weight(w)?;
        let mut out = Vec::new();
        for (key, _) in self.all_classes(w) {
            let (basis, cycles, bounds) = self.cycles_and_boundaries(n, w, &key)?;
            let mut sub = Subspace::spanned_by(bounds.iter(), basis.len());
            for z in cycles {
                if sub.insert(&z) {
                    out.push(self.chain_from_vector(n, &basis, &z));
                }
            }
        }
        Ok(out)
    }

    /// All classes without symmetry reduction.
    pub fn all_classes(&self, w: u32) -> Vec<(Key, usize)> {
        let mut keys: Vec<Key> = Vec::new();
        let cl = slice::classes(&self.algebra, w);
        if !self.algebra.is_free() {
            return cl;
        }
        // Expand orbit representatives back to every permuted class.
        let weights = self.algebra.weights().to_vec();
        let n = weights.len();
        let mut exps = vec![0u16; n];
        fn go(i: usize, rem: u32, weights: &[u32], exps: &mut Vec<u16>, out: &mut Vec<Key>) {
            if i == weights.len() {
                if rem == 0 {
                    out.push(exps.iter().map(|e| *e as i64).collect());
                }
                return;
            }
            let mut e = 0u32;
            while e * weights[i] <= rem {
                exps[i] = e as u16;
                go(i + 1, rem - e * weights[i], weights, exps, out);
                e += 1;
            }
            exps[i] = 0;
        }
        go(0, w, &weights, &mut exps, &mut keys);
        keys.sort();
        keys.into_iter().map(|k| (k, 1)).collect()
    }

    pub(crate) fn chain_from_vector(&self, n: usize, basis: &TensorBasis, v: &SparseVector) -> BarChain {
        BarChain::from_tensors(
            &self.algebra,
            &self.table,
            n,
            v.entries()
                .iter()
                .map(|(i, c)| (basis.tensors()[*i as usize].clone(), c.clone())),
        )
    }

    /// Tensors of `C_n` in weight `w` over all classes, class by class.
    pub fn slice_basis(&self, n: usize, w: u32) -> TensorBasis {
        let mut all = Vec::new();
        for (key, _) in self.all_classes(w) {
            all.extend(self.tensors(n, w, &key));
        }
        TensorBasis::new(all)
    }

    /// Matrix of `b : C_n -> C_{n-1}` on the whole weight-`w` slice.
    pub fn slice_b_matrix(&self, n: usize, w: u32) -> Result<(TensorBasis, TensorBasis, SparseMatrix)> {
        self.ensure_weight(w)?;
        let src = self.slice_basis(n, w);
        if n == 0 {
            let len = src.len();
            return Ok((src, TensorBasis::default(), SparseMatrix::zeros(0, len)));
        }
        let tgt = self.slice_basis(n - 1, w);
        let cols = slice::b_columns(&self.table, self.conv, src.tensors(), &tgt, true)?;
        let m = SparseMatrix::from_columns(tgt.len(), cols);
        Ok((src, tgt, m))
    }

    /// Coordinates of a chain on a tensor basis (terms outside the basis are an error).
    pub fn chain_vector(&self, c: &BarChain, basis: &TensorBasis) -> Result<SparseVector> {
        self.vector_of_chain(c, basis)
    }

    /// Coordinates of a chain on the tensors of one class (terms outside the class are an error).
    pub(crate) fn vector_of_chain(&self, c: &BarChain, basis: &TensorBasis) -> Result<SparseVector> {
        let mut e = Vec::new();
        for (t, x) in c.terms() {
            let i = basis.position(t).ok_or_else(|| {
                Error::Unsupported("chain has terms outside the requested slice".into())
            })?;
            e.push((i, x.clone()));
        }
        Ok(SparseVector::from_entries(e))
    }

    /// Whether a cycle is a boundary (its class vanishes in `HH_n`).
    pub fn is_boundary(&self, c: &BarChain) -> Result<bool> {
        if c.is_zero() {
            return Ok(true);
        }
        let n = c.degree();
        let w = c
            .weight()
            .ok_or_else(|| Error::Unsupported("chain is not weight-homogeneous".into()))?;
        self.ensure_weight(w)?;
        // A homogeneous chain may still spread over several classes.
        let mut by_class: BTreeMap<Key, Vec<(super::Tensor, Rational)>> = BTreeMap::new();
        for (t, x) in c.terms() {
            let mut k = Key::from_elem(0, self.algebra.grading_functionals().len());
            for g in t {
                for (a, b) in k.iter_mut().zip(self.table.key(*g)) {
                    *a += b;
                }
            }
            by_class.entry(k).or_default().push((t.clone(), x.clone()));
        }
        for (key, terms) in by_class {
            let part = BarChain::from_tensors(&self.algebra, &self.table, n, terms);
            let (_, _, bn1) = self.b_matrix(n + 1, w, &key)?;
            let basis = TensorBasis::new(self.tensors(n, w, &key));
            let v = self.vector_of_chain(&part, &basis)?;
            let cols: Vec<SparseVector> = bn1.columns().to_vec();
            if rank_modulo(&[v], &cols, basis.len()) != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exactness of `HH_n -> HC_n -> HC_{n-2} -> HH_{n-1}` at `HC_n` and `HC_{n-2}`
    /// in one class, using the maps induced on homology.
    pub fn sbi_exact_class(&self, n: usize, w: u32, key: &[i64]) -> Result<bool> {
        let hc_n = self.hc_class(n, w, key)?;
        let (tc_n, _, d_n) = self.total_matrix(n, w, key)?;
        let (_, _, d_n1) = self.total_matrix(n + 1, w, key)?;
        let z_hc_n = d_n.kernel_basis();
        let bd_hc_n = d_n1.columns().to_vec();
        let (_, z_hh_n, _) = self.cycles_and_boundaries(n, w, key)?;
        let rank_i = rank_modulo(&z_hh_n, &bd_hc_n, tc_n.len());
        if n < 2 {
            return Ok(rank_i == hc_n);
        }
        let len_cn = tc_n.parts[0].1.len() as u32;
        let (tc_n2, _, d_n2) = self.total_matrix(n - 2, w, key)?;
        let bd_hc_n2 = d_n1_cols(self, n - 1, w, key)?;
        let s_img: Vec<SparseVector> = z_hc_n
            .iter()
            .map(|v| {
                SparseVector::from_entries(
                    v.entries()
                        .iter()
                        .filter(|(i, _)| *i >= len_cn)
                        .map(|(i, c)| (i - len_cn, c.clone())),
                )
            })
            .collect();
        let rank_s = rank_modulo(&s_img, &bd_hc_n2, tc_n2.len());
        let hc_n2 = self.hc_class(n - 2, w, key)?;
        // Connecting map HC_{n-2} -> HH_{n-1}: apply B to the top component.
        let z_hc_n2 = d_n2.kernel_basis();
        let (_, c_nm1, b_n) = self.b_matrix(n, w, key)?;
        let _ = c_nm1;
        let cnm1 = TensorBasis::new(self.tensors(n - 1, w, key));
        let top = &tc_n2.parts[0].1;
        let top_len = top.len() as u32;
        let mut b_img = Vec::new();
        for v in &z_hc_n2 {
            let mut terms = Vec::new();
            for (i, c) in v.entries() {
                if *i >= top_len {
                    continue;
                }
                let mut buf: Vec<(super::Tensor, Rational)> = Vec::new();
                connes(&self.table, self.conv, &top.tensors()[*i as usize], &mut buf);
                for (t, x) in buf {
                    terms.push((t, x * c));
                }
            }
            let terms = collect(terms);
            b_img.push(SparseVector::from_entries(terms.into_iter().map(|(t, x)| {
                (cnm1.position(&t).expect("B lands in C_{n-1}"), x)
            })));
        }
        let rank_b = rank_modulo(&b_img, b_n.columns(), cnm1.len());
        Ok(rank_i + rank_s == hc_n && rank_s + rank_b == hc_n2)
    }
}

fn d_n1_cols(e: &HochschildEngine, n: usize, w: u32, key: &[i64]) -> Result<Vec<SparseVector>> {
    let (_, _, m) = e.total_matrix(n, w, key)?;
    Ok(m.columns().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn alg(text: &str) -> Arc<GradedAlgebra> {
        Arc::new(GradedAlgebra::parse(text).unwrap())
    }

    fn cusp() -> Arc<GradedAlgebra> {
        alg("algebra cusp\nvars x:2 y:3\nrel y^2 - x^3")
    }

    #[test]
    fn cusp_chain_operations() {
        let a = cusp();
        let conv = SignConvention::Standard;
        let z = BarChain::parse_terms(&a, 12, &[(2, &["x", "y"]), (3, &["y", "x"])]).unwrap();
        assert!(z.boundary(conv).is_zero());
        let yy = BarChain::parse_terms(&a, 12, &[(1, &["1", "y", "y"])]).unwrap();
        let want = BarChain::parse_terms(&a, 12, &[(2, &["y", "y"]), (-1, &["1", "x^3"])]).unwrap();
        assert_eq!(yy.boundary(conv), want);
        let y = BarChain::parse_terms(&a, 12, &[(1, &["y"])]).unwrap();
        let want = BarChain::parse_terms(&a, 12, &[(1, &["1", "y"])]).unwrap();
        assert_eq!(y.connes_b(conv), want);
        assert!(want.connes_b(conv).is_zero());
    }

    #[test]
    fn shuffle_of_degree_one() {
        let a = alg("vars x:1 y:1");
        let p = BarChain::parse_terms(&a, 4, &[(1, &["1", "x"])]).unwrap();
        let q = BarChain::parse_terms(&a, 4, &[(1, &["1", "y"])]).unwrap();
        let want =
            BarChain::parse_terms(&a, 4, &[(1, &["1", "x", "y"]), (-1, &["1", "y", "x"])]).unwrap();
        assert_eq!(p.shuffle(&q).unwrap(), want);
        assert_eq!(want.format(), "-[y|x] + [x|y]");
    }

    #[test]
    fn line_and_cusp_dimensions() {
        let e = HochschildEngine::new(alg("vars x:1"), 6);
        for w in 1..=6 {
            assert_eq!(e.hh(1, w).unwrap(), 1);
            assert_eq!(e.hh(2, w).unwrap(), 0);
        }
        let e = HochschildEngine::new(cusp(), 8);
        assert_eq!(e.hh(1, 5).unwrap(), 2);
        assert_eq!(e.hh(3, 5).unwrap(), 0);
        assert!(matches!(e.hh(1, 9), Err(Error::Cutoff(_))));
        let reps = e.hh_representatives(1, 5).unwrap();
        assert_eq!(reps.len(), 2);
        for r in &reps {
            assert!(r.boundary(SignConvention::Standard).is_zero());
        }
    }

    #[test]
    fn cyclic_dimensions() {
        let e = HochschildEngine::new(alg("algebra Q\nvars"), 0);
        assert_eq!(e.hc(0, 0).unwrap(), 1);
        assert_eq!(e.hc(1, 0).unwrap(), 0);
        assert_eq!(e.hc(2, 0).unwrap(), 1);
        let a = cusp();
        let e = HochschildEngine::new(a.clone(), 9);
        for w in 0..=9 {
            assert_eq!(e.hc(0, w).unwrap(), a.dim(w));
        }
        // HH_n = HC_n + HC_{n-1} in positive weight.
        for w in 1..=9 {
            for n in 0..=3 {
                let lower = if n == 0 { 0 } else { e.hc(n - 1, w).unwrap() };
                assert_eq!(e.hh(n, w).unwrap(), e.hc(n, w).unwrap() + lower, "n={n} w={w}");
            }
        }
    }

    #[test]
    fn sbi_exact_on_cusp() {
        let e = HochschildEngine::new(cusp(), 8);
        for w in 2..=8 {
            for (k, _) in e.classes(w) {
                for n in 0..=3 {
                    assert!(e.sbi_exact_class(n, w, &k).unwrap(), "n={n} w={w}");
                }
            }
        }
    }

    #[test]
    fn boundary_membership() {
        let a = cusp();
        let e = HochschildEngine::new(a.clone(), 12);
        let z = BarChain::parse_terms(&a, 12, &[(2, &["x", "y"]), (3, &["y", "x"])]).unwrap();
        assert!(!e.is_boundary(&z).unwrap());
        let zz = z.shuffle(&z).unwrap();
        assert!(zz.boundary(SignConvention::Standard).is_zero());
        assert!(e.is_boundary(&zz).unwrap());
        let _ = rat(0);
    }

    #[test]
    fn corrupt_boundary_breaks_connes_identity() {
        let e = HochschildEngine::new(alg("vars x:1"), 3).with_convention(SignConvention::CorruptB);
        assert!(matches!(e.hc(1, 2), Err(Error::CompositionNonzero(_))));
    }

    #[test]
    fn disk_cache_roundtrip() {
        let dir = std::env::temp_dir().join(format!("khh-cache-test-{}", std::process::id()));
        let e = HochschildEngine::new(cusp(), 7).with_cache_dir(Some(dir.clone())).unwrap();
        let v = e.hh(2, 7).unwrap();
        e.flush().unwrap();
        let e2 = HochschildEngine::new(cusp(), 7).with_cache_dir(Some(dir.clone())).unwrap();
        assert_eq!(e2.hh(2, 7).unwrap(), v);
        std::fs::remove_dir_all(dir).ok();
    }
}
