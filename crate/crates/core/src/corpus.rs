//! The example corpus: `corpus/<name>/{algebra.alg, square.sq, curve.ec, expected.json}`.
//!
//! `expected.json` holds the cutoffs of a member and one table per quantity,
//! each tagged with its `source`: `oracle` values are rewritten from a fresh
//! computation (after the oracle's cross-check passes), `closed-form` values
//! are only compared.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::algebra::GradedAlgebra;
use crate::cdh::{cdh_omega, nk0_crosscheck, FiberEngine, ResolutionSquare, SquareKind};
use crate::elliptic::{rr_dims, DivisorClass, EllipticCurve, Point, Torsion};
use crate::error::{Error, Result};
use crate::hochschild::HochschildEngine;
use crate::kahler::{jacobian_smooth, omega_dims, torsion_dims};
use crate::table::{canonical_json, DimensionTable};

/// Where the values of a table come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    /// Computed; `cross_check` names the independent route compared during the computation.
    Oracle { oracle: String, cross_check: Option<String> },
    /// Fixed by a closed-form rule; never regenerated.
    ClosedForm { rule: String },
}

impl Source {
    fn oracle(o: &str, cross: &str) -> Self {
        Source::Oracle { oracle: o.into(), cross_check: Some(cross.into()) }
    }

    fn closed(rule: &str) -> Self {
        Source::ClosedForm { rule: rule.into() }
    }

    pub fn to_value(&self) -> Value {
        match self {
            Source::Oracle { oracle, cross_check } => json!({"kind": "oracle", "oracle": oracle, "cross_check": cross_check}),
            Source::ClosedForm { rule } => json!({"kind": "closed-form", "rule": rule}),
        }
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self, Source::Oracle { .. })
    }
}

#[derive(Clone, Debug)]
pub struct Quantity {
    pub source: Source,
    pub table: DimensionTable,
}

/// Cutoffs of one member, read from `expected.json`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cutoffs {
    pub max_weight: u32,
    pub n_max: usize,
    pub hodge_max_weight: u32,
    pub tk_max_weight: u32,
}

impl Cutoffs {
    fn from_value(v: &Value) -> Self {
        let g = |k: &str, d: u64| v.get(k).and_then(Value::as_u64).unwrap_or(d);
        let max_weight = g("max_weight", 8) as u32;
        Cutoffs {
            max_weight,
            n_max: g("n_max", 3) as usize,
            hodge_max_weight: g("hodge_max_weight", max_weight as u64) as u32,
            tk_max_weight: g("tk_max_weight", max_weight as u64) as u32,
        }
    }

    fn to_value(&self) -> Value {
        json!({
            "max_weight": self.max_weight,
            "n_max": self.n_max,
            "hodge_max_weight": self.hodge_max_weight,
            "tk_max_weight": self.tk_max_weight,
        })
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub dir: PathBuf,
    pub algebra: Option<String>,
    pub square: Option<String>,
    pub curve: Option<String>,
    pub expected: Option<Value>,
}

impl CorpusEntry {
    pub fn cutoffs(&self) -> Cutoffs {
        Cutoffs::from_value(self.expected.as_ref().and_then(|v| v.get("cutoffs")).unwrap_or(&Value::Null))
    }

    /// The expected table of one quantity.
    pub fn expected_table(&self, quantity: &str) -> Option<DimensionTable> {
        let v = self.expected.as_ref()?.get("quantities")?.get(quantity)?.get("table")?;
        DimensionTable::from_value(v).ok()
    }
}

fn read_opt(p: &Path) -> Result<Option<String>> {
    if p.exists() {
        fs::read_to_string(p).map(Some).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
    } else {
        Ok(None)
    }
}

/// All members, sorted by name.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    let rd = fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    for ent in rd {
        let ent = ent.map_err(|e| Error::Io(e.to_string()))?;
        let path = ent.path();
        if !path.is_dir() {
            continue;
        }
        let expected = match read_opt(&path.join("expected.json"))? {
            Some(t) => Some(serde_json::from_str(&t).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?),
            None => None,
        };
        out.push(CorpusEntry {
            name: ent.file_name().to_string_lossy().into_owned(),
            algebra: read_opt(&path.join("algebra.alg"))?,
            square: read_opt(&path.join("square.sq"))?,
            curve: read_opt(&path.join("curve.ec"))?,
            dir: path,
            expected,
        });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

fn disagree(member: &str, what: String) -> Error {
    Error::OracleDisagreement(format!("{member}: {what}"))
}

/// Every quantity of one member, each computed with its cross-check.
pub fn compute_quantities(entry: &CorpusEntry) -> Result<BTreeMap<String, Quantity>> {
    let c = entry.cutoffs();
    let mut q = BTreeMap::new();
    let meta = |t: DimensionTable| t.with_meta("member", &entry.name);
    if let Some(text) = &entry.algebra {
        let a = Arc::new(GradedAlgebra::parse(text)?);
        algebra_quantities(entry, &a, &c, &mut q, &meta)?;
    }
    if let Some(text) = &entry.square {
        let sq = ResolutionSquare::parse(text)?.validate(c.tk_max_weight.max(c.max_weight))?;
        square_quantities(entry, Arc::new(sq), &c, &mut q, &meta)?;
    }
    if let Some(text) = &entry.curve {
        curve_quantities(entry, text, &mut q, &meta)?;
    }
    Ok(q)
}

type Meta<'a> = dyn Fn(DimensionTable) -> DimensionTable + 'a;

fn algebra_quantities(
    entry: &CorpusEntry,
    a: &Arc<GradedAlgebra>,
    c: &Cutoffs,
    q: &mut BTreeMap<String, Quantity>,
    meta: &Meta,
) -> Result<()> {
    let e = HochschildEngine::new(a.clone(), c.max_weight);
    let mut hh = meta(DimensionTable::new("HH_n", &["n", "w"]));
    let mut hc = meta(DimensionTable::new("HC_n", &["n", "w"]));
    let mut hodge = meta(DimensionTable::new("HH_n^(i)", &["n", "w", "i"]));
    let mut omega = meta(DimensionTable::new("Omega^p", &["p", "w"]));
    for n in 0..=c.n_max {
        for w in 0..=c.max_weight {
            let h = e.hh(n, w)?;
            hh.set(&[n as i64, w as i64], h as i64);
            hc.set(&[n as i64, w as i64], e.hc(n, w)? as i64);
            for (key, _) in e.classes(w) {
                if !e.sbi_exact_class(n, w, &key)? {
                    return Err(disagree(&entry.name, format!("SBI sequence not exact at n={n}, w={w}")));
                }
            }
            omega.set(&[n as i64, w as i64], omega_dims(a, n, w) as i64);
            if n >= 1 && w <= c.hodge_max_weight {
                let tr = e.hodge_split(n, w)?;
                let eig = e.hodge_split_eigen(n, w)?;
                if tr != eig {
                    return Err(disagree(&entry.name, format!("Hodge n={n} w={w}: traces {tr:?}, eigenspaces {eig:?}")));
                }
                if tr.iter().sum::<usize>() != h {
                    return Err(disagree(&entry.name, format!("Hodge pieces of HH_{n}({w}) do not sum to {h}")));
                }
                for (i, d) in tr.iter().enumerate() {
                    hodge.set(&[n as i64, w as i64, i as i64 + 1], *d as i64);
                }
            }
        }
    }
    let smooth = jacobian_smooth(a, c.max_weight)?.is_smooth();
    if smooth {
        // Smooth members: HH_n = Ω^n in every computed slice.
        for (k, v) in &omega.cells {
            if hh.get(k) != Some(*v) {
                return Err(disagree(&entry.name, format!("HH and Omega differ at {k:?}")));
            }
        }
    }
    let mut sm = meta(DimensionTable::new("jacobian smooth", &[]));
    sm.set(&[], smooth as i64);
    q.insert("hh".into(), Quantity { source: Source::oracle("bar-complex ranks", "sum of Hodge pieces"), table: hh });
    q.insert("hc".into(), Quantity { source: Source::oracle("(b,B) total complex", "SBI exactness"), table: hc });
    q.insert("hodge".into(), Quantity { source: Source::oracle("Eulerian idempotent traces", "psi_2 eigenspaces"), table: hodge });
    q.insert(
        "omega".into(),
        Quantity {
            source: Source::oracle("Kahler presentation", if smooth { "HKR: equals HH_n" } else { "de Rham relations" }),
            table: omega,
        },
    );
    q.insert("smooth".into(), Quantity { source: Source::oracle("Jacobian criterion", "nilpotent probe"), table: sm });
    Ok(())
}

fn square_quantities(
    entry: &CorpusEntry,
    sq: Arc<ResolutionSquare>,
    c: &Cutoffs,
    q: &mut BTreeMap<String, Quantity>,
    meta: &Meta,
) -> Result<()> {
    let f = FiberEngine::new(sq.clone(), c.tk_max_weight)?;
    let d = sq.a.krull_dim();
    let mut tk = meta(DimensionTable::new("TK_n", &["n", "w"]).with_meta("square", sq.kind.name()));
    for n in 0..=d + 1 {
        for w in 0..=c.tk_max_weight {
            let cell = f.fiber_cell(1 - n as i64, w)?;
            tk.set(&[n as i64, w as i64], cell.dim as i64);
        }
    }
    let src = if sq.kind == SquareKind::Identity {
        Source::closed("cone of the identity")
    } else {
        Source::oracle("mapping cone", "long exact sequence")
    };
    q.insert("tk".into(), Quantity { source: src, table: tk.clone() });

    if sq.kind == SquareKind::Normalization {
        let mut tors = meta(DimensionTable::new("torsion of Omega^1", &["w"]));
        for w in 0..=c.tk_max_weight {
            let t = torsion_dims(&sq.nu, 1, w)?;
            if tk.get(&[2, w as i64]) != Some(t as i64) {
                return Err(disagree(&entry.name, format!("tk(2,{w}) differs from torsion {t}")));
            }
            tors.set(&[w as i64], t as i64);
        }
        q.insert("torsion_omega1".into(), Quantity { source: Source::oracle("Kahler torsion", "tk(2, w)"), table: tors });
    }
    if matches!(sq.kind, SquareKind::Normalization | SquareKind::Identity) {
        let rows = nk0_crosscheck(&sq, c.tk_max_weight, 6)?;
        let mut pic = meta(DimensionTable::new("Pic(A[s])_j", &["j"]));
        for r in &rows {
            if r.pic != r.seminormal {
                return Err(disagree(&entry.name, format!("NK_0 at s-degree {}: {} vs {}", r.j, r.pic, r.seminormal)));
            }
            pic.set(&[r.j as i64], r.pic as i64);
        }
        q.insert("nk0".into(), Quantity { source: Source::oracle("conductor units", "seminormalization"), table: pic });
    }
    let mut om = meta(DimensionTable::new("H^q_cdh(Omega^p)", &["p", "q", "w"]));
    for p in 0..=d {
        for qq in 0..=1 {
            for (w, v) in cdh_omega(&sq, p, qq, c.tk_max_weight)?.dims.iter().enumerate() {
                om.set(&[p as i64, qq as i64, w as i64], *v as i64);
            }
        }
    }
    q.insert("cdh_omega".into(), Quantity { source: Source::closed("Mayer-Vietoris of the square"), table: om });
    Ok(())
}

fn curve_quantities(entry: &CorpusEntry, text: &str, q: &mut BTreeMap<String, Quantity>, meta: &Meta) -> Result<()> {
    let cf = EllipticCurve::parse(text)?;
    let e = &cf.curve;
    let mut tors = meta(DimensionTable::new("torsion order (0 = infinite)", &["point"]));
    for (i, p) in cf.points.iter().enumerate() {
        let o = match e.torsion_order(p) {
            Torsion::Finite(n) => n as i64,
            Torsion::Infinite => 0,
        };
        // Cross-check: n P = O exactly at the order.
        if o > 0 && !e.mul(o, p).is_infinity() {
            return Err(disagree(&entry.name, format!("point {p} has no order {o}")));
        }
        tors.set(&[i as i64], o);
    }
    q.insert("torsion".into(), Quantity { source: Source::oracle("Mazur loop", "scalar multiple"), table: tors });

    let p = cf.points.first().cloned().unwrap_or(Point::Infinity);
    let base = cf.points.get(1).cloned().unwrap_or(Point::Infinity);
    let j = DivisorClass::difference(e, &p, &base);
    let l = DivisorClass::point(&base);
    let mut rr = meta(DimensionTable::new("h^p(J^r (x) L^k)", &["r", "k", "p"]));
    for r in -2..=2 {
        for k in -3..=3 {
            let (h0, h1) = rr_dims(&j.scale(e, r).add(e, &l.scale(e, k)));
            rr.set(&[r, k, 0], h0);
            rr.set(&[r, k, 1], h1);
        }
    }
    q.insert("rr".into(), Quantity { source: Source::closed("Riemann-Roch in genus 1"), table: rr });
    Ok(())
}

/// Outcome for one quantity of one member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegenRow {
    pub member: String,
    pub quantity: String,
    /// `unchanged`, `updated`, `new` or `mismatch` (closed-form values that disagree).
    pub status: String,
}

fn expected_value(entry: &CorpusEntry, q: &BTreeMap<String, Quantity>) -> Value {
    let mut quantities = serde_json::Map::new();
    for (k, v) in q {
        quantities.insert(k.clone(), json!({"source": v.source.to_value(), "table": v.table.to_value()}));
    }
    json!({
        "member": entry.name,
        "cutoffs": entry.cutoffs().to_value(),
        "quantities": quantities,
    })
}

/// Recompute every member; with `write`, rewrite `expected.json` for oracle values.
///
/// Closed-form values are never rewritten once present; a disagreement is
/// reported as `mismatch` and, like any failed cross-check, is an error.
pub fn regenerate_goldens(dir: &Path, write: bool) -> Result<Vec<RegenRow>> {
    let mut rows = Vec::new();
    for entry in load_corpus(dir)? {
        let mut fresh = compute_quantities(&entry)?;
        for (name, qn) in fresh.iter_mut() {
            let old = entry.expected_table(name);
            let status = match &old {
                None => "new",
                Some(t) if t.cells == qn.table.cells => "unchanged",
                Some(_) if qn.source.is_oracle() => "updated",
                Some(_) => "mismatch",
            };
            if status == "mismatch" {
                return Err(disagree(&entry.name, format!("closed-form table `{name}` differs from the computation")));
            }
            if let (Some(t), false) = (&old, qn.source.is_oracle()) {
                qn.table = t.clone();
            }
            rows.push(RegenRow { member: entry.name.clone(), quantity: name.clone(), status: status.into() });
        }
        if write {
            let text = canonical_json(&expected_value(&entry, &fresh));
            fs::write(entry.dir.join("expected.json"), text).map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    Ok(rows)
}
