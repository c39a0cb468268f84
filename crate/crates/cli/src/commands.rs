//! Command implementations; each returns tables plus free-form JSON fields.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Map, Value};

use khh::algebra::GradedAlgebra;
use khh::cdh::{cdh_omega, fiber_engine, nk0_crosscheck, pic_conductor, FiberEngine, ResolutionSquare, SquareKind};
use khh::corpus::{load_corpus, regenerate_goldens};
use khh::elliptic::{cusp_bundle_tables, ktilde_summands, serre_twist_check, DivisorClass, EllipticCurve, Point};
use khh::hochschild::{verify_cusp_cycles, verify_kunneth, HochschildEngine, SignConvention};
use khh::kahler::jacobian_smooth;
use khh::table::{canonical_json, DimensionTable};
use khh::{Error, ErrorClass, Result};

use crate::{Cli, Command, Format, HomologyArgs};

pub struct Output {
    pub tables: Vec<DimensionTable>,
    pub fields: Map<String, Value>,
    pub lines: Vec<String>,
    pub exit: u8,
}

impl Output {
    fn new() -> Self {
        Output { tables: Vec::new(), fields: Map::new(), lines: Vec::new(), exit: 0 }
    }

    fn field(&mut self, k: &str, v: impl Into<Value>) {
        self.fields.insert(k.to_string(), v.into());
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => {
                let mut m = self.fields.clone();
                m.insert("tables".into(), Value::Array(self.tables.iter().map(|t| t.to_value()).collect()));
                canonical_json(&Value::Object(m))
            }
            Format::Csv => {
                let mut s = String::new();
                for t in &self.tables {
                    s.push_str(&format!("# {}\n", t.label));
                    s.push_str(&t.to_csv());
                }
                s
            }
            Format::Text => {
                let mut s = String::new();
                for l in &self.lines {
                    s.push_str(l);
                    s.push('\n');
                }
                for t in &self.tables {
                    if !s.is_empty() {
                        s.push('\n');
                    }
                    s.push_str(&t.to_text());
                }
                s
            }
        }
    }
}

/// 2 parse, 3 precondition, 4 hypothesis, 5 internal sanity, 1 failed verification.
pub fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Parse => 2,
        ErrorClass::Precondition => 3,
        ErrorClass::Hypothesis => 4,
        ErrorClass::Sanity => 5,
        ErrorClass::Verification => 1,
    }
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn algebra(p: &Path) -> Result<Arc<GradedAlgebra>> {
    Ok(Arc::new(GradedAlgebra::parse(&read(p)?)?))
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("KHH_CACHE_DIR").filter(|s| !s.is_empty()).map(PathBuf::from)
}

fn engine(a: Arc<GradedAlgebra>, w: u32, conv: SignConvention) -> Result<HochschildEngine> {
    HochschildEngine::new(a, w).with_convention(conv).with_cache_dir(cache_dir())
}

fn twist_sign(s: &str) -> Result<i64> {
    match s {
        "standard" | "positive" => Ok(1),
        "negative" => Ok(-1),
        other => Err(Error::Unsupported(format!("unknown twist convention `{other}`"))),
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let conv_str = cli.global.convention.as_str();
    let bar_conv = || conv_str.parse::<SignConvention>();
    match &cli.command {
        Command::Hh(a) => homology(a, bar_conv()?, "hh"),
        Command::Hc(a) => homology(a, bar_conv()?, "hc"),
        Command::Hodge(a) => homology(a, bar_conv()?, "hodge"),
        Command::Kunneth { algebra: p, n, max_weight, j_cutoff } => kunneth(p, *n, *max_weight, *j_cutoff, bar_conv()?),
        Command::Cycles { i_max } => cycles(*i_max),
        Command::Tk { square, n, max_weight } => tk(square, *n, *max_weight),
        Command::Pic { square, m, j_cutoff, max_weight } => pic(square, *m, *j_cutoff, *max_weight),
        Command::CdhOmega { square, p, q, max_weight } => omega(square, *p, *q, *max_weight),
        Command::Curve { curve } => curve_info(curve),
        Command::Cuspbundle { curve, points, n_min, n_max, m, j_cutoff } => {
            cuspbundle(curve, points.as_deref(), (*n_min, *n_max), *m, *j_cutoff, twist_sign(conv_str)?)
        }
        Command::Smoothness { corpus } => smoothness(corpus),
        Command::Report { corpus, write } => report(corpus, *write),
    }
}

fn homology(args: &HomologyArgs, conv: SignConvention, what: &str) -> Result<Output> {
    let a = algebra(&args.algebra)?;
    let e = engine(a.clone(), args.max_weight, conv)?;
    let n = args.n as i64;
    let mut t = match what {
        "hh" => DimensionTable::new("HH_n", &["n", "w"]),
        "hc" => DimensionTable::new("HC_n", &["n", "w"]),
        _ => DimensionTable::new("HH_n^(i)", &["n", "w", "i"]),
    }
    .with_meta("algebra", a.name())
    .with_meta("convention", conv.name())
    .with_meta("max_weight", args.max_weight);
    for w in 0..=args.max_weight {
        match what {
            "hh" => t.set(&[n, w as i64], e.hh(args.n, w)? as i64),
            "hc" => t.set(&[n, w as i64], e.hc(args.n, w)? as i64),
            _ => {
                for (i, d) in e.hodge_split(args.n, w)?.iter().enumerate() {
                    t.set(&[n, w as i64, i as i64 + 1], *d as i64);
                }
            }
        }
    }
    e.flush()?;
    let mut out = Output::new();
    out.tables.push(t);
    Ok(out)
}

fn kunneth(p: &Path, n: usize, w: u32, j: u32, conv: SignConvention) -> Result<Output> {
    let a = algebra(p)?;
    let r = verify_kunneth(&a, j, n, w, conv)?;
    let mut out = Output::new();
    let mut computed = DimensionTable::new("A[t]: computed", &["kind", "n", "w", "j"]);
    let mut predicted = DimensionTable::new("A[t]: Kunneth prediction", &["kind", "n", "w", "j"]);
    let mut mismatches = Vec::new();
    for c in &r.cells {
        let kind = if c.kind == "HH" { 0 } else { 1 };
        let k = [kind, c.n as i64, c.w as i64, c.j as i64];
        computed.set(&k, c.computed as i64);
        predicted.set(&k, c.predicted as i64);
        if !c.ok() {
            mismatches.push(json!({"kind": c.kind, "n": c.n, "w": c.w, "j": c.j, "computed": c.computed, "predicted": c.predicted}));
            out.lines.push(format!("MISMATCH {} n={} w={} j={}: computed {}, predicted {}", c.kind, c.n, c.w, c.j, c.computed, c.predicted));
        }
    }
    for t in [&mut computed, &mut predicted] {
        t.set_meta("algebra", a.name());
        t.set_meta("convention", conv.name());
        t.set_meta("kind", "0 = HH, 1 = HC");
    }
    let status = if r.passed() { "PASS" } else { "FAIL" };
    out.lines.insert(0, format!("kunneth {}: {status} ({} cells)", a.name(), r.cells.len()));
    out.field("status", status);
    out.field("mismatches", mismatches);
    out.tables.push(computed);
    out.tables.push(predicted);
    if !r.passed() {
        out.exit = 1;
    }
    Ok(out)
}

fn cycles(i_max: usize) -> Result<Output> {
    let r = verify_cusp_cycles(i_max)?;
    let mut out = Output::new();
    out.lines.push(format!("z  = {}: cycle {}, nonzero class {}", r.z.chain, r.z.is_cycle, r.z.nonzero_class));
    out.lines.push(format!("tz = {}: cycle {}, nonzero class {}", r.tz.chain, r.tz.is_cycle, r.tz.nonzero_class));
    for a in &r.attempts {
        out.lines.push(format!("{} {:?}: b(w*) = {}; success {}", a.convention, a.signs, a.boundary_of_w_star, a.success));
    }
    for f in &r.fallback {
        out.lines.push(format!("HH_{}({}) = {}; representative {}", f.degree, f.weight, f.dimension, f.representative.as_deref().unwrap_or("-")));
    }
    out.lines.push(format!("status: {}", r.status));
    let v = serde_json::to_value(&r).map_err(|e| Error::Io(e.to_string()))?;
    if let Value::Object(m) = v {
        out.fields = m;
    }
    Ok(out)
}

fn tk(square: &Path, n_max: usize, w: u32) -> Result<Output> {
    let f = fiber_engine(&read(square)?, w)?;
    let sq = f.square();
    let name = sq.name.clone();
    let mut out = Output::new();
    let mut t = DimensionTable::new("TK_n", &["n", "w"]).with_meta("square", &name).with_meta("kind", sq.kind.name());
    let mut les = DimensionTable::new("TK_n: long exact sequence kernel + cokernel", &["n", "w"]).with_meta("square", &name);
    for n in 0..=n_max {
        for wt in 0..=w {
            let c = f.fiber_cell(1 - n as i64, wt)?;
            t.set(&[n as i64, wt as i64], c.dim as i64);
            les.set(&[n as i64, wt as i64], (c.kernel + c.cokernel) as i64);
        }
    }
    out.tables.push(t);
    out.tables.push(les);
    if sq.kind == SquareKind::Normalization && sq.a.weights() == [2, 3] && sq.a.relations().len() == 1 {
        // Shown next to TK for comparison only; the two are not expected to agree cell by cell.
        let mut k = DimensionTable::new("K~_n(A) = (J^5 + J^6) V_n + J Omega^n over Q, J in weight 1", &["n", "w"])
            .with_meta("square", &name);
        for n in 0..=n_max as i64 {
            for s in ktilde_summands(n, 0).items() {
                if s.j_power <= w as i64 {
                    k.set(&[n, s.j_power], s.multiplicity as i64);
                }
            }
        }
        out.tables.push(k);
    }
    if n_max >= 2 {
        let r = f.tk_formula_check(n_max, w)?;
        let mut a = DimensionTable::new("TK_n^(i)", &["n", "i", "w"]).with_meta("square", &name);
        let mut b = DimensionTable::new("HH_{n-1}^(i-1)(A)", &["n", "i", "w"]).with_meta("square", &name);
        for c in &r.cells {
            a.set(&[c.n as i64, c.i as i64, c.w as i64], c.tk_hodge as i64);
            b.set(&[c.n as i64, c.i as i64, c.w as i64], c.hh_hodge as i64);
        }
        out.tables.push(a);
        out.tables.push(b);
        out.lines.push(format!("formula i < n: cell-wise {}, aggregate {}", r.cellwise_equal, r.aggregate_equal));
        out.field("formula_cellwise_equal", r.cellwise_equal);
        out.field("formula_aggregate_equal", r.aggregate_equal);
    }
    match nk0_crosscheck(sq, w, 6) {
        Ok(rows) => {
            let ok = rows.iter().all(|r| r.pic == r.seminormal);
            out.lines.push(format!("nk0 crosscheck: {}", if ok { "PASS" } else { "FAIL" }));
            out.field("nk0", if ok { "PASS" } else { "FAIL" });
            let mut t = DimensionTable::new("NK_0: Pic(A[s])_j and dim(A+/A)", &["j", "side"]).with_meta("square", &name);
            for r in &rows {
                t.set(&[r.j as i64, 0], r.pic as i64);
                t.set(&[r.j as i64, 1], r.seminormal as i64);
            }
            out.tables.push(t);
            if !ok {
                out.exit = 1;
            }
        }
        Err(Error::Unsupported(m)) => {
            out.lines.push(format!("nk0 crosscheck: UNSUPPORTED ({m})"));
            out.field("nk0", "UNSUPPORTED");
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

fn pic(square: &Path, m: usize, j: usize, w: u32) -> Result<Output> {
    let sq = ResolutionSquare::parse(&read(square)?)?.validate(w)?;
    let r = pic_conductor(&sq, m, w, j)?;
    let mut t = DimensionTable::new("Pic(A[s_1..s_m]) by s-degree", &["j"]).with_meta("square", &sq.name).with_meta("m", m);
    t.set(&[0], r.constant as i64);
    for (jj, d) in &r.per_degree {
        t.set(&[*jj as i64], *d as i64);
    }
    let mut prof = DimensionTable::new("(A~/cA~)_w / (A/c)_w", &["w"]).with_meta("square", &sq.name);
    for (wt, d) in r.weight_profile.iter().enumerate() {
        prof.set(&[wt as i64], *d as i64);
    }
    let mut out = Output::new();
    out.tables.push(t);
    out.tables.push(prof);
    Ok(out)
}

fn omega(square: &Path, p: usize, q: usize, w: u32) -> Result<Output> {
    let sq = ResolutionSquare::parse(&read(square)?)?.validate(w)?;
    let r = cdh_omega(&sq, p, q, w)?;
    let mut t = DimensionTable::new("H^q_cdh(Omega^p)", &["w"])
        .with_meta("square", &sq.name)
        .with_meta("p", p)
        .with_meta("q", q);
    for (wt, d) in r.dims.iter().enumerate() {
        t.set(&[wt as i64], *d as i64);
    }
    let mut out = Output::new();
    out.tables.push(t);
    Ok(out)
}

fn curve_info(p: &Path) -> Result<Output> {
    let cf = EllipticCurve::parse(&read(p)?)?;
    let e = &cf.curve;
    let mut out = Output::new();
    out.lines.push(format!("curve {}", e.describe()));
    out.lines.push(format!("discriminant {}", e.discriminant));
    out.field("curve", e.describe());
    out.field("discriminant", e.discriminant.to_string());
    let mut pts = Vec::new();
    for pt in &cf.points {
        let o = e.torsion_order(pt);
        out.lines.push(format!("point {pt}: order {o}"));
        pts.push(json!({"point": pt.to_string(), "order": o.to_string()}));
    }
    out.field("points", pts);
    let base = cf.points.get(1).cloned().unwrap_or(Point::Infinity);
    if let Some(pp) = cf.points.first() {
        let j = DivisorClass::difference(e, pp, &base);
        let l = DivisorClass::point(&base);
        let mut t = DimensionTable::new("twist threshold N0 for J^r and L = O(Q)", &["r"]).with_meta("curve", &e.name);
        for r in -6..=6 {
            t.set(&[r], serre_twist_check(&j.scale(e, r), &l)? as i64);
        }
        out.tables.push(t);
    }
    Ok(out)
}

fn parse_point(s: &str) -> Result<Point> {
    let s = s.trim();
    if s == "inf" {
        return Ok(Point::Infinity);
    }
    let (x, y) = s.split_once(',').ok_or_else(|| Error::Unsupported(format!("point `{s}` is not `x,y` or `inf`")))?;
    let r = |t: &str| t.trim().parse::<khh::Rational>().map_err(|_| Error::Unsupported(format!("invalid rational `{t}`")));
    Ok(Point::Affine(r(x)?, r(y)?))
}

fn cuspbundle(p: &Path, points: Option<&str>, n: (i64, i64), m: usize, j: i64, sign: i64) -> Result<Output> {
    let cf = EllipticCurve::parse(&read(p)?)?;
    let pts: Vec<Point> = match points {
        Some(s) => s.split(';').map(parse_point).collect::<Result<_>>()?,
        None => cf.points.clone(),
    };
    let pp = pts.first().cloned().ok_or_else(|| Error::Unsupported("no point P given".into()))?;
    let q = pts.get(1).cloned().unwrap_or(Point::Infinity);
    let t = cusp_bundle_tables(&cf.curve, &pp, &q, n, m, j, sign)?;
    let mut out = Output::new();
    out.lines.push(format!("P - Q has order {}", t.order));
    out.lines.push(format!("table (a) verdict: {}", t.verdict()));
    for f in &t.findings {
        out.lines.push(format!("FLAG {f}"));
    }
    if let Value::Object(mut m) = t.to_value() {
        m.remove("tables");
        out.fields = m;
    }
    out.tables.extend(t.tables().into_iter().cloned());
    Ok(out)
}

/// First `(i, w)` with `tk(i, w) ≠ 0`, `i ≤ d + 1`, in that order.
pub fn witness(f: &FiberEngine, d: usize, w_max: u32) -> Result<Option<(usize, u32)>> {
    for i in 0..=d + 1 {
        for w in 0..=w_max {
            if f.tk(i, w)? != 0 {
                return Ok(Some((i, w)));
            }
        }
    }
    Ok(None)
}

fn smoothness(dir: &Path) -> Result<Output> {
    let mut out = Output::new();
    let mut members = Vec::new();
    let mut violations = 0;
    for entry in load_corpus(dir)? {
        let Some(text) = &entry.square else { continue };
        let c = entry.cutoffs();
        let attribute = |e: Error| Error::Io(format!("{}: {e}", entry.name));
        let sq = ResolutionSquare::parse(text).and_then(|s| s.validate(c.tk_max_weight)).map_err(attribute)?;
        let verdict = jacobian_smooth(&sq.a, c.tk_max_weight).map_err(attribute)?;
        let d = sq.a.krull_dim();
        let f = FiberEngine::new(Arc::new(sq), c.tk_max_weight)?;
        let wit = witness(&f, d, c.tk_max_weight)?;
        let ok = verdict.is_smooth() == wit.is_none();
        if !ok {
            violations += 1;
        }
        let ws = wit.map_or("NONE".to_string(), |(i, w)| format!("i={i}, w={w}"));
        out.lines.push(format!("{:<16} {:<9} d={d} witness {ws}{}", entry.name, verdict.label(), if ok { "" } else { "  VIOLATION" }));
        members.push(json!({"member": entry.name, "verdict": verdict.label(), "dimension": d, "witness": ws, "max_weight": c.tk_max_weight}));
    }
    out.lines.push(format!("violations: {violations}"));
    out.field("members", members);
    out.field("violations", violations);
    if violations > 0 {
        out.exit = 1;
    }
    Ok(out)
}

fn report(dir: &Path, write: bool) -> Result<Output> {
    let rows = regenerate_goldens(dir, write)?;
    let mut out = Output::new();
    let mut drift = 0;
    let mut list = Vec::new();
    for r in &rows {
        if r.status != "unchanged" {
            drift += 1;
        }
        out.lines.push(format!("{:<16} {:<16} {}", r.member, r.quantity, r.status));
        list.push(json!({"member": r.member, "quantity": r.quantity, "status": r.status}));
    }
    out.lines.push(format!("{} quantities, {drift} changed", rows.len()));
    out.field("rows", list);
    out.field("changed", drift);
    if drift > 0 && !write {
        out.exit = 1;
    }
    Ok(out)
}
