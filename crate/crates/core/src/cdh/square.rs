//! Resolution squares `A -> Ã` of graded algebras and their text format.
//!
//! ```text
//! algebra cusp
//! vars x:2 y:3
//! rel y^2 - x^3
//! square normalization
//! target vars t:1
//! normalize line x->t^2 y->t^3
//! conductor x y
//! ```
//!
//! `square` names the kind (`normalization`, `quotient`, `reduction`,
//! `identity`); `target vars` / `target rel` present `Ã`; `group` lists the
//! sign (±1) by which an involution acts on each target generator (quotient
//! squares only).

use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use crate::algebra::parse::{statements, Statement};
use crate::algebra::{algebra_hom, GradedAlgebra, GradedHom, Poly};
use crate::error::{Error, Result};
use crate::kahler::{jacobian_smooth, Smoothness};
use crate::linalg::{rank_of_columns, SparseVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SquareKind {
    /// One-point normalization of a curve; the conductor square is cartesian.
    Normalization,
    /// `A = Ã^G` for an involution `G` acting by signs on a polynomial ring.
    Quotient,
    /// `Ã = A_red` for a non-reduced `A`.
    Reduction,
    /// `A` smooth, `Ã = A`.
    Identity,
}

impl SquareKind {
    pub fn name(&self) -> &'static str {
        match self {
            SquareKind::Normalization => "normalization",
            SquareKind::Quotient => "quotient",
            SquareKind::Reduction => "reduction",
            SquareKind::Identity => "identity",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ResolutionSquare {
    pub name: String,
    pub kind: SquareKind,
    pub a: Arc<GradedAlgebra>,
    pub atil: Arc<GradedAlgebra>,
    pub nu: GradedHom,
    /// Conductor generators in `A`; their images generate it in `Ã`.
    pub conductor: Vec<Poly>,
    /// Involution signs on the generators of `Ã` (quotient squares).
    pub group: Option<Vec<i8>>,
    /// Set by [`ResolutionSquare::validate`] once both reduced quotients are certified to be `ℚ`.
    pub center_is_exceptional: bool,
}

fn split_target(s: &Statement) -> Result<Statement> {
    let rest = s.rest.as_str();
    let (kw, tail) = match rest.find(char::is_whitespace) {
        Some(p) => (&rest[..p], &rest[p..]),
        None => (rest, ""),
    };
    if kw.is_empty() {
        return Err(Error::parse(s.line, s.rest_column, "expected `target vars` or `target rel`"));
    }
    let tail_trim = tail.trim_start();
    Ok(Statement {
        line: s.line,
        column: s.rest_column,
        keyword: kw.to_string(),
        rest: tail_trim.to_string(),
        rest_column: s.rest_column + kw.chars().count() + (tail.chars().count() - tail_trim.chars().count()),
    })
}

fn token_columns(s: &Statement) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut pos = 0;
    for tok in s.rest.split_whitespace() {
        let off = s.rest[pos..].find(tok).unwrap_or(0) + pos;
        out.push((s.rest_column + s.rest[..off].chars().count(), tok));
        pos = off + tok.len();
    }
    out
}

impl ResolutionSquare {
    /// Parse an algebra presentation extended by square statements.
    pub fn parse(text: &str) -> Result<Self> {
        let st = statements(text);
        let mut alg_st = Vec::new();
        let mut tgt_st = Vec::new();
        let mut kind: Option<SquareKind> = None;
        let mut normalize: Option<Statement> = None;
        let mut conductor: Vec<Statement> = Vec::new();
        let mut group: Option<Statement> = None;
        for s in &st {
            match s.keyword.as_str() {
                "square" => {
                    kind = Some(match s.rest.as_str() {
                        "normalization" => SquareKind::Normalization,
                        "quotient" => SquareKind::Quotient,
                        "reduction" => SquareKind::Reduction,
                        "identity" => SquareKind::Identity,
                        other => {
                            return Err(Error::parse(s.line, s.rest_column, format!("unknown square kind `{other}`")))
                        }
                    })
                }
                "target" => tgt_st.push(split_target(s)?),
                "normalize" => normalize = Some(s.clone()),
                "conductor" => conductor.push(s.clone()),
                "group" => group = Some(s.clone()),
                _ => alg_st.push(s.clone()),
            }
        }
        let a = Arc::new(GradedAlgebra::from_statements(&alg_st, "algebra")?);
        let kind = kind.unwrap_or(if normalize.is_none() { SquareKind::Identity } else { SquareKind::Normalization });
        if kind == SquareKind::Identity && normalize.is_none() {
            let nu = GradedHom::identity(a.clone());
            return Ok(ResolutionSquare {
                name: a.name().to_string(),
                kind,
                a: a.clone(),
                atil: a,
                nu,
                conductor: Vec::new(),
                group: None,
                center_is_exceptional: false,
            });
        }
        let norm = normalize.ok_or_else(|| {
            let (l, c) = st.first().map_or((1, 1), |s| (s.line, s.column));
            Error::parse(l, c, "missing `normalize` line")
        })?;
        let toks = token_columns(&norm);
        let (name_col, tname) = *toks
            .first()
            .ok_or_else(|| Error::parse(norm.line, norm.rest_column, "expected a target name"))?;
        if tname.contains("->") {
            return Err(Error::parse(norm.line, name_col, "expected a target name before the generator images"));
        }
        let atil = Arc::new(GradedAlgebra::from_statements(&tgt_st, tname)?);
        let mut images: Vec<Option<Poly>> = vec![None; a.nvars()];
        for (col, tok) in &toks[1..] {
            let (g, img) = tok
                .split_once("->")
                .ok_or_else(|| Error::parse(norm.line, *col, format!("expected `gen->poly`, found `{tok}`")))?;
            let i = a
                .generator_names()
                .iter()
                .position(|n| n == g)
                .ok_or_else(|| Error::parse(norm.line, *col, format!("unknown generator `{g}`")))?;
            let pcol = col + g.chars().count() + 2;
            images[i] = Some(atil.parse_poly_at(img, norm.line, pcol)?);
        }
        let images: Vec<Poly> = images
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| {
                    Error::parse(norm.line, norm.column, format!("no image for generator `{}`", a.generator_names()[i]))
                })
            })
            .collect::<Result<_>>()?;
        let nu = algebra_hom(a.clone(), atil.clone(), images)?;
        let mut cond = Vec::new();
        for s in &conductor {
            for (col, tok) in token_columns(s) {
                cond.push(a.parse_poly_at(tok, s.line, col)?);
            }
        }
        let group = match group {
            None => None,
            Some(s) => {
                let mut g = Vec::new();
                for (col, tok) in token_columns(&s) {
                    match tok {
                        "1" | "+1" => g.push(1),
                        "-1" => g.push(-1),
                        _ => return Err(Error::parse(s.line, col, format!("group signs must be ±1, found `{tok}`"))),
                    }
                }
                if g.len() != atil.nvars() {
                    return Err(Error::parse(s.line, s.column, "one sign per target generator expected"));
                }
                Some(g)
            }
        };
        Ok(ResolutionSquare {
            name: a.name().to_string(),
            kind,
            a,
            atil,
            nu,
            conductor: cond,
            group,
            center_is_exceptional: false,
        })
    }

    /// Sign of a target monomial under the involution (1 when there is none).
    pub fn sign_of(&self, exps: &[u16]) -> i8 {
        match &self.group {
            None => 1,
            Some(g) => {
                let odd = exps.iter().zip(g).filter(|(e, s)| **s < 0 && *e % 2 == 1).count();
                if odd % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Dimension of `(cÃ)_w` and its spanning vectors in `Ã_w`.
    pub fn conductor_in_target(&self, w: u32) -> (usize, Vec<SparseVector>) {
        let t = &self.atil;
        let mut vecs = Vec::new();
        for c in &self.conductor {
            let img = self.nu.apply(c);
            let Some(cw) = img.weight() else { continue };
            if cw > w {
                continue;
            }
            for m in t.weight_basis(w - cw).monomials() {
                let p = t.nf(&img.mul_term(m, &crate::linalg::Rational::one()));
                vecs.push(t.coords(w, &p).expect("homogeneous"));
            }
        }
        (rank_of_columns(&vecs, t.dim(w)), vecs)
    }

    /// Check the square's hypotheses on weights `0..=cutoff` and certify the
    /// center/exceptional flag where it applies.
    pub fn validate(mut self, cutoff: u32) -> Result<Self> {
        let bad = |m: String| Err(Error::SquareInvalid(m));
        match jacobian_smooth(&self.atil, cutoff)? {
            Smoothness::Smooth => {}
            _ => return bad(format!("target {} is not smooth", self.atil.name())),
        }
        for w in 0..=cutoff {
            let m = self.nu.matrix(w);
            let r = m.rank();
            let (da, dt) = (self.a.dim(w), self.atil.dim(w));
            match self.kind {
                SquareKind::Reduction => {
                    if r != dt {
                        return bad(format!("map to the reduction is not onto in weight {w}"));
                    }
                }
                _ => {
                    if r != da {
                        return bad(format!("map is not injective in weight {w}"));
                    }
                }
            }
            if self.kind == SquareKind::Identity && r != dt {
                return bad(format!("identity square is not an isomorphism in weight {w}"));
            }
            if self.kind == SquareKind::Quotient {
                let inv = self
                    .atil
                    .weight_basis(w)
                    .monomials()
                    .iter()
                    .filter(|m| self.sign_of(m.exponents()) == 1)
                    .count();
                if r != inv {
                    return bad(format!("image is not the full invariant ring in weight {w}"));
                }
            }
        }
        match self.kind {
            SquareKind::Quotient => {
                if self.group.is_none() {
                    return bad("quotient square needs a `group` line".into());
                }
                if !self.atil.is_free() {
                    return bad("quotient squares need a polynomial target".into());
                }
                for (i, p) in self.nu.images().iter().enumerate() {
                    if p.terms().iter().any(|(m, _)| self.sign_of(m.exponents()) != 1) {
                        return bad(format!("image of `{}` is not invariant", self.a.generator_names()[i]));
                    }
                }
            }
            SquareKind::Reduction => {
                // Kernel elements must be nilpotent.
                for w in 1..=cutoff {
                    for v in self.nu.matrix(w).kernel_basis() {
                        let f = self.a.from_coords(w, &v);
                        let mut p = f.clone();
                        let mut k = 1;
                        while !p.is_zero() && k < 64 {
                            p = self.a.multiply(&p, &f);
                            k += 1;
                        }
                        if !p.is_zero() {
                            return bad(format!("kernel element {} is not nilpotent", self.a.format(&f)));
                        }
                    }
                }
            }
            SquareKind::Normalization => self.center_is_exceptional = self.certify_conductor(cutoff)?,
            SquareKind::Identity => {}
        }
        Ok(self)
    }

    /// Conductor checks: `cÃ ⊆ ν(A)`, `cÃ ∩ ν(A) = ν(cA)`, and `A/c`, `Ã/cÃ`
    /// finite with residue field `ℚ` (so the center and the exceptional fiber
    /// are both the rational point).
    fn certify_conductor(&self, cutoff: u32) -> Result<bool> {
        if self.conductor.is_empty() {
            return Err(Error::SquareInvalid("normalization square needs a `conductor` line".into()));
        }
        let mut top = None;
        for w in 0..=cutoff {
            let (dc, vecs) = self.conductor_in_target(w);
            let img: Vec<SparseVector> = self.nu.matrix(w).columns().to_vec();
            let r_img = rank_of_columns(&img, self.atil.dim(w));
            let mut both = img.clone();
            both.extend(vecs);
            if rank_of_columns(&both, self.atil.dim(w)) != r_img {
                return Err(Error::SquareInvalid(format!("conductor is not contained in A in weight {w}")));
            }
            let da = self.conductor_dim_in_source(w);
            if da != dc {
                return Err(Error::SquareInvalid(format!(
                    "conductor ideals differ in weight {w}: {da} in A, {dc} in the target"
                )));
            }
            if dc == self.atil.dim(w) && w > 0 {
                top.get_or_insert(w);
            } else if w > 0 {
                top = None;
            }
        }
        match top {
            Some(n) if 2 * n <= cutoff + 1 => Ok(true),
            _ => Err(Error::SquareInvalid(format!(
                "the target quotient by the conductor does not vanish in a tail below weight {cutoff}"
            ))),
        }
    }

    /// `dim (cA)_w`.
    pub fn conductor_dim_in_source(&self, w: u32) -> usize {
        let a = &self.a;
        let mut vecs = Vec::new();
        for c in &self.conductor {
            let Some(cw) = c.weight() else { continue };
            if cw > w {
                continue;
            }
            for m in a.weight_basis(w - cw).monomials() {
                let p = a.nf(&c.mul_term(m, &crate::linalg::Rational::one()));
                vecs.push(a.coords(w, &p).expect("homogeneous"));
            }
        }
        rank_of_columns(&vecs, a.dim(w))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub const CUSP_SQ: &str = "algebra cusp\nvars x:2 y:3\nrel y^2 - x^3\nsquare normalization\ntarget vars t:1\nnormalize line x->t^2 y->t^3\nconductor x y\n";

    #[test]
    fn parse_and_validate_cusp() {
        let sq = ResolutionSquare::parse(CUSP_SQ).unwrap().validate(12).unwrap();
        assert_eq!(sq.kind, SquareKind::Normalization);
        assert!(sq.center_is_exceptional);
        assert_eq!(sq.atil.name(), "line");
        assert_eq!(sq.conductor_in_target(1).0, 0);
        assert_eq!(sq.conductor_in_target(2).0, 1);
    }

    #[test]
    fn identity_and_errors() {
        let sq = ResolutionSquare::parse("vars x:1").unwrap().validate(6).unwrap();
        assert_eq!(sq.kind, SquareKind::Identity);
        let e = ResolutionSquare::parse("vars x:2 y:3\nrel y^2-x^3\ntarget vars t:1\nnormalize line x->t y->t^3").unwrap_err();
        assert!(matches!(e, Error::WeightMismatch { .. }));
        let e = ResolutionSquare::parse("vars x:2 y:3\ntarget vars t:1\nnormalize line x->t^2 z->t^3").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        // (x^2) is not the conductor: t^4 Q[t] misses t^5 = x y.
        let sq = ResolutionSquare::parse("vars x:2 y:3\nrel y^2-x^3\ntarget vars t:1\nnormalize line x->t^2 y->t^3\nconductor x^2").unwrap();
        assert!(matches!(sq.validate(12), Err(Error::SquareInvalid(_))));
    }

    #[test]
    fn quotient_square() {
        let text = "vars x:2 y:2 z:2\nrel z^2 - x*y\nsquare quotient\ntarget vars u:1 v:1\nnormalize plane x->u^2 y->v^2 z->u*v\ngroup -1 -1";
        let sq = ResolutionSquare::parse(text).unwrap().validate(8).unwrap();
        assert_eq!(sq.kind, SquareKind::Quotient);
        let dual = "vars e:1\nrel e^2\nsquare reduction\ntarget vars\nnormalize point e->0";
        let sq = ResolutionSquare::parse(dual).unwrap().validate(6).unwrap();
        assert_eq!(sq.atil.nvars(), 0);
    }
}
