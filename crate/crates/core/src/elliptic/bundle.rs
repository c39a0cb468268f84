//! Line-bundle summands of the relative K-groups of a cusp bundle over an
//! elliptic curve, and their cohomology tables.

use serde::Serialize;
use serde_json::{json, Value};

use super::divisor::{rr_dims, DivisorClass};
use super::{EllipticCurve, Point, Torsion};
use crate::error::{Error, Result};
use crate::table::DimensionTable;

/// `J^j_power ⊗ 𝓛^l_twist`, `multiplicity` times.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Summand {
    pub j_power: i64,
    pub l_twist: i64,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SummandList(pub Vec<Summand>);

impl SummandList {
    /// Merge equal bundles and sort.
    pub fn canonical(mut items: Vec<Summand>) -> Self {
        items.sort();
        let mut out: Vec<Summand> = Vec::with_capacity(items.len());
        for s in items {
            match out.last_mut() {
                Some(l) if l.j_power == s.j_power && l.l_twist == s.l_twist => l.multiplicity += s.multiplicity,
                _ => out.push(s),
            }
        }
        out.retain(|s| s.multiplicity > 0);
        SummandList(out)
    }

    pub fn items(&self) -> &[Summand] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Tensor every summand with `J^j`, `mult` times.
    fn twist(&self, j: i64, mult: u64) -> Vec<Summand> {
        self.0
            .iter()
            .map(|s| Summand { j_power: s.j_power + j, l_twist: s.l_twist, multiplicity: s.multiplicity * mult })
            .collect()
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Rank of `Ω^k` of `O_E[t_1..t_m]` over itself (`Ω_E ≅ O_E`).
fn omega_rank(k: i64, m: usize) -> u64 {
    if k < 0 {
        0
    } else {
        binomial(m as u64 + 1, k as u64)
    }
}

/// `V_n` over `O_E[t_1..t_m]` as `J`-powers with multiplicities (the free
/// polynomial factor is left implicit).
pub fn vn_summands(n: i64, m: usize) -> SummandList {
    if n < 2 {
        return SummandList::default();
    }
    let i = n / 2;
    let odd = n % 2;
    let items = (0..i)
        .map(|k| Summand { j_power: 6 * (i - 1 - k), l_twist: 0, multiplicity: omega_rank(2 * k + odd, m) })
        .collect();
    SummandList::canonical(items)
}

/// `V_n` on the curve itself.
pub fn assemble_vn(n: i64) -> SummandList {
    vn_summands(n, 0)
}

/// Sheaf summands of `K̃_n` of the cusp bundle over `E × 𝔸^m`:
/// `(J⁵ ⊕ J⁶) ⊗ V_n ⊕ J ⊗ Ω^n`.
pub fn ktilde_summands(n: i64, m: usize) -> SummandList {
    let v = vn_summands(n, m);
    let mut items = v.twist(5, 1);
    items.extend(v.twist(6, 1));
    items.push(Summand { j_power: 1, l_twist: 0, multiplicity: omega_rank(n, m) });
    SummandList::canonical(items)
}

#[derive(Clone, Debug)]
pub struct CuspBundleTables {
    pub curve: EllipticCurve,
    pub p: Point,
    pub q: Point,
    pub order: Torsion,
    /// (a) multiplicities of the summands of `K̃_n` over `E × 𝔸^m`.
    pub summands_a: DimensionTable,
    /// (a) `multiplicity · h^p` of every summand.
    pub cohomology_a: DimensionTable,
    /// (a) `H⁰(K̃_n) ⊕ H¹(K̃_{n+1})`, the descent contribution to `K_n(X × 𝔸^m)/K_n(E)`.
    pub descent_a: DimensionTable,
    pub regular: bool,
    /// (b) `h^p(J ⊗ 𝓛^{±j})` per twist convention.
    pub twists_b: DimensionTable,
    /// (b) `K̃_0(𝕃)` and `K̃_{-1}(𝕃)` per twist convention.
    pub ktilde_b: DimensionTable,
    /// (c) `h^p(J ⊗ 𝓛^{±j})` for the dual numbers `O_E ⊕ J`.
    pub dual_c: DimensionTable,
    pub findings: Vec<String>,
}

impl CuspBundleTables {
    pub fn verdict(&self) -> &'static str {
        if self.regular {
            "K_n(X x A^m) = K_n(E)"
        } else {
            "NOT K-REGULAR"
        }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "curve": self.curve.describe(),
            "P": self.p.to_string(),
            "Q": self.q.to_string(),
            "order_of_P_minus_Q": self.order.to_string(),
            "verdict_a": self.verdict(),
            "tables": [
                self.summands_a.to_value(),
                self.cohomology_a.to_value(),
                self.descent_a.to_value(),
                self.twists_b.to_value(),
                self.ktilde_b.to_value(),
                self.dual_c.to_value(),
            ],
            "findings": self.findings,
        })
    }

    pub fn tables(&self) -> [&DimensionTable; 6] {
        [&self.summands_a, &self.cohomology_a, &self.descent_a, &self.twists_b, &self.ktilde_b, &self.dual_c]
    }
}

/// The three table families for the cusp bundle `Spec O_E[J², J³]`, `J = O(P - Q)`,
/// and `𝓛 = O(Q)`. `twist_sign` only selects the convention recorded as primary.
pub fn cusp_bundle_tables(
    e: &EllipticCurve,
    p: &Point,
    q: &Point,
    n_range: (i64, i64),
    m_max: usize,
    j_cutoff: i64,
    twist_sign: i64,
) -> Result<CuspBundleTables> {
    e.check(p)?;
    e.check(q)?;
    if j_cutoff < 1 {
        return Err(Error::Cutoff("j-cutoff must be at least 1".into()));
    }
    let d = e.sub(p, q);
    let order = e.torsion_order(&d);
    if let Torsion::Finite(k) = order {
        return Err(Error::TorsionPoint(k));
    }
    let j = DivisorClass::difference(e, p, q);
    let l = DivisorClass::point(q);
    let meta = |t: DimensionTable| {
        t.with_meta("curve", &e.name)
            .with_meta("P", p)
            .with_meta("Q", q)
            .with_meta("twist_convention", if twist_sign < 0 { "negative" } else { "positive" })
    };

    let (n_lo, n_hi) = n_range;
    let mut summands_a = meta(DimensionTable::new("cusp bundle: summands of K~_n over E x A^m", &["m", "n", "j_power"]));
    let mut cohomology_a = meta(DimensionTable::new("cusp bundle: h^p of summands", &["m", "n", "j_power", "p"]));
    let mut descent_a = meta(DimensionTable::new("cusp bundle: K_n(X x A^m)/K_n(E) from descent", &["m", "n"]));
    let h = |s: &Summand, p: usize| -> i64 {
        let (h0, h1) = rr_dims(&j.scale(e, s.j_power).add(e, &l.scale(e, s.l_twist)));
        s.multiplicity as i64 * if p == 0 { h0 } else { h1 }
    };
    for m in 0..=m_max {
        for n in n_lo..=n_hi + 1 {
            for s in ktilde_summands(n, m).items() {
                if n <= n_hi {
                    summands_a.set(&[m as i64, n, s.j_power], s.multiplicity as i64);
                }
                for pp in 0..2 {
                    cohomology_a.set(&[m as i64, n, s.j_power, pp as i64], h(s, pp));
                }
            }
        }
        for n in n_lo..=n_hi {
            let h0: i64 = ktilde_summands(n, m).items().iter().map(|s| h(s, 0)).sum();
            let h1: i64 = ktilde_summands(n + 1, m).items().iter().map(|s| h(s, 1)).sum();
            descent_a.set(&[m as i64, n], h0 + h1);
        }
    }
    let regular = cohomology_a.cells.values().all(|v| *v == 0) && descent_a.cells.values().all(|v| *v == 0);

    let mut twists_b = meta(DimensionTable::new("line bundle over X: h^p(J (x) L^(sign*j))", &["sign", "j", "p"]));
    let mut ktilde_b = meta(DimensionTable::new("line bundle over X: K~_n", &["sign", "n"]));
    let mut dual_c = meta(DimensionTable::new("dual numbers O_E + J: h^p(J (x) L^(sign*j))", &["sign", "j", "p"]));
    for sign in [-1i64, 1] {
        let (mut s0, mut s1) = (0, 0);
        for jj in 1..=j_cutoff {
            let (h0, h1) = rr_dims(&j.add(e, &l.scale(e, sign * jj)));
            twists_b.set(&[sign, jj, 0], h0);
            twists_b.set(&[sign, jj, 1], h1);
            dual_c.set(&[sign, jj, 0], h0);
            dual_c.set(&[sign, jj, 1], h1);
            s0 += h0;
            s1 += h1;
        }
        ktilde_b.set(&[sign, -1], s1);
        ktilde_b.set(&[sign, 0], s0 + s1);
    }

    let mut findings = Vec::new();
    let pos_m1 = ktilde_b.get(&[1, -1]).unwrap_or(0);
    let neg_m1 = ktilde_b.get(&[-1, -1]).unwrap_or(0);
    if pos_m1 == 0 && neg_m1 != 0 {
        findings.push(format!(
            "TWIST_CONVENTION_CONFLICT: K~_-1 of the line bundle is 0 under positive twists \
             (h^1(J (x) L^j) = 0 for 1 <= j <= {j_cutoff}) and {neg_m1} under negative twists; \
             its nonvanishing holds only under the negative convention"
        ));
    }
    Ok(CuspBundleTables {
        curve: e.clone(),
        p: p.clone(),
        q: q.clone(),
        order,
        summands_a,
        cohomology_a,
        descent_a,
        regular,
        twists_b,
        ktilde_b,
        dual_c,
        findings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vn_on_the_curve() {
        let one = |j| SummandList(vec![Summand { j_power: j, l_twist: 0, multiplicity: 1 }]);
        assert_eq!(assemble_vn(2), one(0));
        assert_eq!(assemble_vn(3), one(0));
        assert_eq!(assemble_vn(4), one(6));
        assert_eq!(assemble_vn(5), one(6));
        assert!(assemble_vn(1).is_empty());
        // Over E x A^1, Ω^1 has rank 2 and Ω^2 rank 1.
        let v4 = vn_summands(4, 1);
        assert_eq!(v4.items().len(), 2);
        assert_eq!(v4.items()[0], Summand { j_power: 0, l_twist: 0, multiplicity: 1 });
        assert_eq!(ktilde_summands(0, 0), one(1));
        assert!(ktilde_summands(-1, 2).is_empty());
        assert!(ktilde_summands(6, 2).items().iter().all(|s| s.j_power > 0));
    }

    #[test]
    fn tables_for_37a() {
        let e = EllipticCurve::curve_37a();
        let t = cusp_bundle_tables(&e, &Point::affine(0, 0), &Point::Infinity, (-1, 6), 2, 4, 1).unwrap();
        assert!(t.regular);
        assert!(t.cohomology_a.cells.values().all(|v| *v == 0));
        for jj in 1..=4 {
            assert_eq!(t.twists_b.get(&[1, jj, 0]), Some(jj));
            assert_eq!(t.twists_b.get(&[1, jj, 1]), Some(0));
            assert_eq!(t.twists_b.get(&[-1, jj, 1]), Some(jj));
        }
        assert_eq!(t.ktilde_b.get(&[1, 0]), Some(10));
        assert_eq!(t.ktilde_b.get(&[1, -1]), Some(0));
        assert_eq!(t.findings.len(), 1);
        let e2 = EllipticCurve::from_ints("32a2", [0, 0, 0, -1, 0]).unwrap();
        let r = cusp_bundle_tables(&e2, &Point::affine(0, 0), &Point::Infinity, (-1, 6), 0, 4, 1);
        assert!(matches!(r, Err(Error::TorsionPoint(2))));
    }
}
