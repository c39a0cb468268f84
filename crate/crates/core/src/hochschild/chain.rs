//! Normalized bar tensors and the operators b, B and the shuffle product.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::algebra::{BasisTable, GradedAlgebra, Poly};
use crate::error::{Error, Result};
use crate::linalg::Rational;

/// `a_0[a_1|...|a_n]` as global basis ids; entries `1..=n` have positive weight.
pub type Tensor = SmallVec<[u32; 8]>;

/// Sign convention for the Hochschild boundary and Connes' operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub enum SignConvention {
    /// `b = sum_{i<n} (-1)^i d_i + (-1)^n d_n`, `B` with signs `(-1)^{ni}`.
    #[default]
    Standard,
    /// The standard operators conjugated by reversing the bar entries.
    Transposed,
    /// Negative control: `b` with the wrap-around face dropped (the bar differential b').
    CorruptB,
}

impl SignConvention {
    pub fn name(&self) -> &'static str {
        match self {
            SignConvention::Standard => "standard",
            SignConvention::Transposed => "transposed",
            SignConvention::CorruptB => "corrupt-b",
        }
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(SignConvention::Standard),
            "transposed" => Ok(SignConvention::Transposed),
            "corrupt-b" => Ok(SignConvention::CorruptB),
            other => Err(Error::Unsupported(format!("unknown sign convention `{other}`"))),
        }
    }
}

fn reversed(t: &[u32]) -> Tensor {
    let mut r = Tensor::from_slice(t);
    r[1..].reverse();
    r
}

/// Coefficient rings the chain-level kernels run over: exact rationals, or
/// machine integers for binomial algebras (whose products are ±monomials).
pub(crate) trait Coef: Clone + PartialEq + Send + Sync {
    fn unit(negative: bool) -> Self;
    fn vanishes(&self) -> bool;
    fn add_assign(&mut self, o: &Self);
    fn mul(&self, o: &Self) -> Self;
    /// Call `f(g, s * c)` for each term `c * e_g` of the product of basis elements `a`, `b`.
    fn products(table: &BasisTable, a: u32, b: u32, s: &Self, f: impl FnMut(u32, Self));
}

impl Coef for Rational {
    fn unit(negative: bool) -> Self {
        if negative {
            -Rational::one()
        } else {
            Rational::one()
        }
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn products(table: &BasisTable, a: u32, b: u32, s: &Self, mut f: impl FnMut(u32, Self)) {
        for (g, c) in table.mul(a, b) {
            f(*g, s * c);
        }
    }
}

impl Coef for i64 {
    fn unit(negative: bool) -> Self {
        if negative {
            -1
        } else {
            1
        }
    }
    fn vanishes(&self) -> bool {
        *self == 0
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn products(table: &BasisTable, a: u32, b: u32, s: &Self, mut f: impl FnMut(u32, Self)) {
        if let Some((g, c)) = table.mul_unit(a, b) {
            f(g, s * c);
        }
    }
}

/// Standard Hochschild boundary of one basis tensor.
fn b_standard<C: Coef>(table: &BasisTable, t: &[u32], wrap: bool, out: &mut Vec<(Tensor, C)>) {
    let n = t.len() - 1;
    if n == 0 {
        return;
    }
    for i in 0..n {
        C::products(table, t[i], t[i + 1], &C::unit(i % 2 == 1), |g, c| {
            let mut r = Tensor::with_capacity(n);
            r.extend_from_slice(&t[..i]);
            r.push(g);
            r.extend_from_slice(&t[i + 2..]);
            out.push((r, c));
        });
    }
    if wrap {
        C::products(table, t[n], t[0], &C::unit(n % 2 == 1), |g, c| {
            let mut r = Tensor::with_capacity(n);
            r.push(g);
            r.extend_from_slice(&t[1..n]);
            out.push((r, c));
        });
    }
}

/// Hochschild boundary of a basis tensor under the given convention.
pub(crate) fn boundary<C: Coef>(table: &BasisTable, conv: SignConvention, t: &[u32], out: &mut Vec<(Tensor, C)>) {
    match conv {
        SignConvention::Standard => b_standard(table, t, true, out),
        SignConvention::CorruptB => b_standard(table, t, false, out),
        SignConvention::Transposed => {
            let start = out.len();
            b_standard(table, &reversed(t), true, out);
            for e in &mut out[start..] {
                e.0 = reversed(&e.0);
            }
        }
    }
}

fn connes_standard<C: Coef>(table: &BasisTable, t: &[u32], out: &mut Vec<(Tensor, C)>) {
    if table.weight(t[0]) == 0 {
        return;
    }
    let n = t.len() - 1;
    for i in 0..=n {
        let mut r = Tensor::with_capacity(n + 2);
        r.push(0);
        r.extend_from_slice(&t[i..]);
        r.extend_from_slice(&t[..i]);
        out.push((r, C::unit((n * i) % 2 == 1)));
    }
}

/// Connes' operator of a basis tensor (normalized complex).
pub(crate) fn connes<C: Coef>(table: &BasisTable, conv: SignConvention, t: &[u32], out: &mut Vec<(Tensor, C)>) {
    match conv {
        SignConvention::Standard | SignConvention::CorruptB => connes_standard(table, t, out),
        SignConvention::Transposed => {
            let start = out.len();
            connes_standard(table, &reversed(t), out);
            for e in &mut out[start..] {
                e.0 = reversed(&e.0);
            }
        }
    }
}

/// Sorted, merged and zero-free form of a list of terms.
pub(crate) fn collect<C: Coef>(mut terms: Vec<(Tensor, C)>) -> Vec<(Tensor, C)> {
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(Tensor, C)> = Vec::with_capacity(terms.len());
    for (t, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == t => last.1.add_assign(&c),
            _ => out.push((t, c)),
        }
    }
    out.retain(|e| !e.1.vanishes());
    out
}

/// Signed shuffles of two bar tensors (without multiplying the zeroth entries).
pub(crate) fn shuffles(a: &[u32], b: &[u32], out: &mut Vec<(SmallVec<[u32; 8]>, bool)>) {
    fn go(a: &[u32], b: &[u32], cur: &mut SmallVec<[u32; 8]>, parity: bool, out: &mut Vec<(SmallVec<[u32; 8]>, bool)>) {
        if a.is_empty() && b.is_empty() {
            out.push((cur.clone(), parity));
            return;
        }
        if let Some((&x, rest)) = a.split_first() {
            cur.push(x);
            // Placing an entry of `a` after the remaining entries of `b` would
            // cross them; here it goes first, so no sign change.
            go(rest, b, cur, parity, out);
            cur.pop();
        }
        if let Some((&y, rest)) = b.split_first() {
            cur.push(y);
            // `y` jumps over every remaining entry of `a`.
            go(a, rest, cur, parity ^ (a.len() % 2 == 1), out);
            cur.pop();
        }
    }
    let mut cur = SmallVec::new();
    go(a, b, &mut cur, false, out);
}

/// Finite linear combination of normalized bar tensors of one degree.
#[derive(Clone)]
pub struct BarChain {
    algebra: Arc<GradedAlgebra>,
    table: Arc<BasisTable>,
    degree: usize,
    terms: BTreeMap<Tensor, Rational>,
}

impl PartialEq for BarChain {
    fn eq(&self, o: &Self) -> bool {
        self.degree == o.degree && self.terms == o.terms
    }
}

impl fmt::Debug for BarChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format())
    }
}

impl BarChain {
    /// Zero chain of degree `n`, able to hold tensors up to `max_weight`.
    pub fn zero(algebra: &Arc<GradedAlgebra>, degree: usize, max_weight: u32) -> Self {
        BarChain {
            algebra: algebra.clone(),
            table: algebra.table(max_weight),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn from_tensors(
        algebra: &Arc<GradedAlgebra>,
        table: &Arc<BasisTable>,
        degree: usize,
        terms: impl IntoIterator<Item = (Tensor, Rational)>,
    ) -> Self {
        let mut c = BarChain {
            algebra: algebra.clone(),
            table: table.clone(),
            degree,
            terms: BTreeMap::new(),
        };
        for (t, x) in terms {
            debug_assert_eq!(t.len(), degree + 1);
            c.add_tensor(t, x);
        }
        c
    }

    fn add_tensor(&mut self, t: Tensor, x: Rational) {
        if x.is_zero() {
            return;
        }
        match self.terms.entry(t) {
            Entry::Vacant(v) => {
                v.insert(x);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += x;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Add `coef * a_0[a_1|...|a_n]` for polynomials `a_i`, expanded multilinearly.
    /// Constant parts of `a_1..a_n` vanish in the normalized complex.
    pub fn add_term(&mut self, coef: &Rational, entries: &[Poly]) -> Result<()> {
        if entries.len() != self.degree + 1 {
            return Err(Error::Unsupported(format!(
                "degree-{} chain needs {} entries, got {}",
                self.degree,
                self.degree + 1,
                entries.len()
            )));
        }
        let mut expansions: Vec<Vec<(u32, Rational)>> = Vec::new();
        for (k, p) in entries.iter().enumerate() {
            let p = self.algebra.nf(p);
            let mut v = Vec::new();
            for (m, c) in p.terms() {
                if k > 0 && m.weight() == 0 {
                    continue;
                }
                let g = self.table.lookup(m).ok_or_else(|| {
                    Error::Cutoff(format!(
                        "monomial of weight {} exceeds the chain's weight cutoff {}",
                        m.weight(),
                        self.table.max_weight()
                    ))
                })?;
                v.push((g, c.clone()));
            }
            expansions.push(v);
        }
        let mut acc: Vec<(Tensor, Rational)> = vec![(Tensor::new(), coef.clone())];
        for v in &expansions {
            let mut next = Vec::with_capacity(acc.len() * v.len());
            for (t, x) in &acc {
                for (g, c) in v {
                    let mut t2 = t.clone();
                    t2.push(*g);
                    next.push((t2, x * c));
                }
            }
            acc = next;
        }
        for (t, x) in acc {
            self.add_tensor(t, x);
        }
        Ok(())
    }

    /// Convenience: `sum coef_k * a_0[a_1|...]` with entries parsed from text.
    pub fn parse_terms(
        algebra: &Arc<GradedAlgebra>,
        max_weight: u32,
        terms: &[(i64, &[&str])],
    ) -> Result<Self> {
        let degree = terms.first().map_or(0, |t| t.1.len() - 1);
        let mut c = BarChain::zero(algebra, degree, max_weight);
        for (coef, entries) in terms {
            let polys: Vec<Poly> = entries
                .iter()
                .map(|s| algebra.parse_poly(s))
                .collect::<Result<_>>()?;
            c.add_term(&Rational::from_integer((*coef).into()), &polys)?;
        }
        Ok(c)
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra> {
        &self.algebra
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tensor, &Rational)> {
        self.terms.iter()
    }

    /// Weights occurring in the chain.
    pub fn weights(&self) -> Vec<u32> {
        let mut w: Vec<u32> = self
            .terms
            .keys()
            .map(|t| t.iter().map(|g| self.table.weight(*g)).sum())
            .collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    pub fn weight(&self) -> Option<u32> {
        let w = self.weights();
        (w.len() == 1).then(|| w[0])
    }

    fn map(&self, degree: usize, f: impl Fn(&[u32], &mut Vec<(Tensor, Rational)>)) -> BarChain {
        let mut out = Vec::new();
        for (t, x) in &self.terms {
            let start = out.len();
            f(t, &mut out);
            for e in &mut out[start..] {
                e.1 *= x;
            }
        }
        BarChain::from_tensors(&self.algebra, &self.table, degree, collect(out))
    }

    /// Hochschild boundary.
    pub fn boundary(&self, conv: SignConvention) -> BarChain {
        if self.degree == 0 {
            return BarChain::from_tensors(&self.algebra, &self.table, 0, []);
        }
        self.map(self.degree - 1, |t, out| boundary(&self.table, conv, t, out))
    }

    /// Connes' operator.
    pub fn connes_b(&self, conv: SignConvention) -> BarChain {
        self.map(self.degree + 1, |t, out| connes(&self.table, conv, t, out))
    }

    /// Shuffle product.
    pub fn shuffle(&self, other: &BarChain) -> Result<BarChain> {
        let max = self.table.max_weight().min(other.table.max_weight());
        let total = self.weights().iter().max().copied().unwrap_or(0)
            + other.weights().iter().max().copied().unwrap_or(0);
        if total > max {
            return Err(Error::Cutoff(format!(
                "shuffle product has weight {total}, above the table cutoff {max}"
            )));
        }
        let mut out = Vec::new();
        let mut sh = Vec::new();
        for (s, x) in &self.terms {
            for (t, y) in &other.terms {
                sh.clear();
                shuffles(&s[1..], &t[1..], &mut sh);
                let xy = x * y;
                for (g, c) in self.table.mul(s[0], t[0]) {
                    let base = &xy * c;
                    for (mid, odd) in &sh {
                        let mut r = Tensor::with_capacity(mid.len() + 1);
                        r.push(*g);
                        r.extend_from_slice(mid);
                        out.push((r, if *odd { -base.clone() } else { base.clone() }));
                    }
                }
            }
        }
        Ok(BarChain::from_tensors(
            &self.algebra,
            &self.table,
            self.degree + other.degree,
            collect(out),
        ))
    }

    pub fn scale(&self, s: &Rational) -> BarChain {
        BarChain::from_tensors(
            &self.algebra,
            &self.table,
            self.degree,
            self.terms.iter().map(|(t, x)| (t.clone(), x * s)),
        )
    }

    pub fn add(&self, o: &BarChain) -> BarChain {
        let mut c = self.clone();
        for (t, x) in &o.terms {
            c.add_tensor(t.clone(), x.clone());
        }
        c
    }

    pub fn sub(&self, o: &BarChain) -> BarChain {
        self.add(&o.scale(&-Rational::one()))
    }

    /// Human-readable form such as `2*x[y] + 3*y[x]`.
    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names = self.algebra.generator_names();
        let mut s = String::new();
        for (k, (t, x)) in self.terms.iter().enumerate() {
            let neg = x.is_negative();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = x.abs();
            let head = self.table.monomial(t[0]);
            let head_s = if head.is_one() {
                String::new()
            } else {
                head.format(names)
            };
            let coef_s = if a.is_one() { String::new() } else { format!("{a}") };
            match (coef_s.is_empty(), head_s.is_empty()) {
                (true, true) if t.len() == 1 => s.push('1'),
                (true, true) => {}
                (true, false) => s.push_str(&head_s),
                (false, true) => s.push_str(&coef_s),
                (false, false) => {
                    s.push_str(&coef_s);
                    s.push('*');
                    s.push_str(&head_s);
                }
            }
            if t.len() > 1 {
                let inner: Vec<String> = t[1..]
                    .iter()
                    .map(|g| self.table.monomial(*g).format(names))
                    .collect();
                s.push('[');
                s.push_str(&inner.join("|"));
                s.push(']');
            }
        }
        s
    }
}
