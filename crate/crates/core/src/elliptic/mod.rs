//! Elliptic curves over ℚ in long Weierstrass form, their group law, divisor
//! classes and line-bundle cohomology.
//!
//! ```text
//! curve 0 0 1 -1 0
//! point 0 0
//! point inf
//! ```

mod bundle;
mod divisor;

pub use bundle::{assemble_vn, cusp_bundle_tables, ktilde_summands, vn_summands, CuspBundleTables, Summand, SummandList};
pub use divisor::{rr_dims, serre_twist_check, DivisorClass};

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::algebra::parse::statements;
use crate::error::{Error, Result};
use crate::linalg::Rational;

/// Torsion orders tried before a point is declared non-torsion (Mazur's bound).
pub const MAZUR_BOUND: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine(Rational, Rational),
}

impl Point {
    pub fn affine(x: i64, y: i64) -> Self {
        Point::Affine(Rational::from_integer(x.into()), Rational::from_integer(y.into()))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "inf"),
            Point::Affine(x, y) => write!(f, "({x}, {y})"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Torsion {
    Finite(u32),
    Infinite,
}

impl Torsion {
    pub fn is_torsion(&self) -> bool {
        matches!(self, Torsion::Finite(_))
    }
}

impl fmt::Display for Torsion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Torsion::Finite(n) => write!(f, "{n}"),
            Torsion::Infinite => write!(f, "INFINITE"),
        }
    }
}

impl Serialize for Torsion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `y² + a1 xy + a3 y = x³ + a2 x² + a4 x + a6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipticCurve {
    pub name: String,
    /// `[a1, a2, a3, a4, a6]`.
    pub a: [Rational; 5],
    pub discriminant: Rational,
}

/// A parsed curve file: the curve and its listed points in order.
#[derive(Clone, Debug)]
pub struct CurveFile {
    pub curve: EllipticCurve,
    pub points: Vec<Point>,
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

impl EllipticCurve {
    pub fn new(name: &str, a: [Rational; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = &a;
        let b2 = a1 * a1 + q(4) * a2;
        let b4 = q(2) * a4 + a1 * a3;
        let b6 = a3 * a3 + q(4) * a6;
        let b8 = a1 * a1 * a6 + q(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let discriminant =
            -(&b2 * &b2 * &b8) - q(8) * &b4 * &b4 * &b4 - q(27) * &b6 * &b6 + q(9) * &b2 * &b4 * &b6;
        if discriminant.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(EllipticCurve { name: name.to_string(), a, discriminant })
    }

    pub fn from_ints(name: &str, a: [i64; 5]) -> Result<Self> {
        Self::new(name, a.map(q))
    }

    /// `y² + y = x³ - x`, conductor 37.
    pub fn curve_37a() -> Self {
        Self::from_ints("37a", [0, 0, 1, -1, 0]).expect("nonsingular")
    }

    pub fn parse(text: &str) -> Result<CurveFile> {
        let mut name = String::from("curve");
        let mut coeffs: Option<[Rational; 5]> = None;
        let mut pts: Vec<(usize, usize, Point)> = Vec::new();
        for s in statements(text) {
            let toks = tokens(&s.rest, s.rest_column);
            match s.keyword.as_str() {
                "name" => name = s.rest.clone(),
                "curve" => {
                    if toks.len() != 5 {
                        return Err(Error::parse(s.line, s.rest_column, "expected five coefficients a1 a2 a3 a4 a6"));
                    }
                    let mut a: Vec<Rational> = Vec::new();
                    for (c, t) in &toks {
                        a.push(parse_rational(t).ok_or_else(|| Error::parse(s.line, *c, format!("invalid rational `{t}`")))?);
                    }
                    coeffs = Some(a.try_into().expect("five"));
                }
                "point" => {
                    let p = match toks.as_slice() {
                        [(_, t)] if *t == "inf" => Point::Infinity,
                        [(cx, x), (cy, y)] => Point::Affine(
                            parse_rational(x).ok_or_else(|| Error::parse(s.line, *cx, format!("invalid rational `{x}`")))?,
                            parse_rational(y).ok_or_else(|| Error::parse(s.line, *cy, format!("invalid rational `{y}`")))?,
                        ),
                        _ => return Err(Error::parse(s.line, s.rest_column, "expected `point x y` or `point inf`")),
                    };
                    pts.push((s.line, s.column, p));
                }
                other => return Err(Error::parse(s.line, s.column, format!("unknown keyword `{other}`"))),
            }
        }
        let a = coeffs.ok_or_else(|| Error::parse(1, 1, "missing `curve` line"))?;
        let curve = EllipticCurve::new(&name, a)?;
        for (line, col, p) in &pts {
            if !curve.contains(p) {
                return Err(Error::parse(*line, *col, format!("point {p} is not on the curve")));
            }
        }
        Ok(CurveFile { curve, points: pts.into_iter().map(|p| p.2).collect() })
    }

    pub fn contains(&self, p: &Point) -> bool {
        let [a1, a2, a3, a4, a6] = &self.a;
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => y * y + a1 * x * y + a3 * y == x * x * x + a2 * x * x + a4 * x + a6,
        }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::NotOnCurve(p.to_string()))
        }
    }

    pub fn neg(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), -y - &self.a[0] * x - &self.a[2]),
        }
    }

    /// Chord-and-tangent addition.
    pub fn add(&self, p: &Point, r: &Point) -> Point {
        let (x1, y1, x2, y2) = match (p, r) {
            (Point::Infinity, _) => return r.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let [a1, a2, a3, a4, _] = &self.a;
        if x1 == x2 && (y1 + y2 + a1 * x2 + a3).is_zero() {
            return Point::Infinity;
        }
        let lambda = if x1 == x2 {
            (q(3) * x1 * x1 + q(2) * a2 * x1 + a4 - a1 * y1) / (q(2) * y1 + a1 * x1 + a3)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let nu = y1 - &lambda * x1;
        let x3 = &lambda * &lambda + a1 * &lambda - a2 - x1 - x2;
        let y3 = -(&lambda + a1) * &x3 - nu - a3;
        Point::Affine(x3, y3)
    }

    pub fn sub(&self, p: &Point, r: &Point) -> Point {
        self.add(p, &self.neg(r))
    }

    /// `n·P` by double-and-add.
    pub fn mul(&self, n: i64, p: &Point) -> Point {
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Order of `P` if it is at most [`MAZUR_BOUND`], else `Infinite`.
    pub fn torsion_order(&self, p: &Point) -> Torsion {
        let mut acc = p.clone();
        for n in 1..=MAZUR_BOUND {
            if acc.is_infinity() {
                return Torsion::Finite(n);
            }
            acc = self.add(&acc, p);
        }
        Torsion::Infinite
    }

    pub fn describe(&self) -> String {
        let names = ["a1", "a2", "a3", "a4", "a6"];
        let parts: Vec<String> = names.iter().zip(&self.a).map(|(n, v)| format!("{n}={v}")).collect();
        format!("{} [{}]", self.name, parts.join(", "))
    }
}

fn tokens(rest: &str, col0: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut pos = 0;
    for tok in rest.split_whitespace() {
        let off = rest[pos..].find(tok).unwrap_or(0) + pos;
        out.push((col0 + rest[..off].chars().count(), tok));
        pos = off + tok.len();
    }
    out
}

fn parse_rational(s: &str) -> Option<Rational> {
    let r = Rational::from_str(s).ok()?;
    (!r.denom().is_zero()).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e37() -> EllipticCurve {
        EllipticCurve::curve_37a()
    }

    /// Determinant test for three affine points on one line.
    fn collinear(p: &Point, r: &Point, s: &Point) -> bool {
        let (Point::Affine(x1, y1), Point::Affine(x2, y2), Point::Affine(x3, y3)) = (p, r, s) else {
            return false;
        };
        ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)).is_zero()
    }

    #[test]
    fn group_law_basics() {
        let e = e37();
        assert_eq!(e.discriminant, q(37));
        let p = Point::affine(0, 0);
        assert_eq!(e.add(&p, &Point::Infinity), p);
        assert_eq!(e.add(&p, &e.neg(&p)), Point::Infinity);
        // Frozen regression vector.
        let s = e.add(&p, &Point::affine(1, 0));
        assert_eq!(s, Point::affine(-1, -1));
        assert!(collinear(&p, &Point::affine(1, 0), &e.neg(&s)));
        assert_eq!(e.mul(2, &p), Point::affine(1, 0));
        assert_eq!(e.torsion_order(&p), Torsion::Infinite);
        assert_eq!(e.torsion_order(&Point::Infinity), Torsion::Finite(1));
    }

    #[test]
    fn two_torsion() {
        let e = EllipticCurve::from_ints("32a2", [0, 0, 0, -1, 0]).unwrap();
        for x in [-1, 0, 1] {
            let p = Point::affine(x, 0);
            assert_eq!(e.neg(&p), p);
            assert_eq!(e.torsion_order(&p), Torsion::Finite(2));
        }
        assert!(matches!(EllipticCurve::from_ints("bad", [0, 0, 0, 0, 0]), Err(Error::SingularCurve)));
    }

    #[test]
    fn parse_file() {
        let f = EllipticCurve::parse("name 37a\ncurve 0 0 1 -1 0\npoint 0 0\npoint inf").unwrap();
        assert_eq!(f.curve, e37());
        assert_eq!(f.points, [Point::affine(0, 0), Point::Infinity]);
        let e = EllipticCurve::parse("curve 0 0 1 -1 0\npoint 1 1").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = EllipticCurve::parse("curve 0 0 1 x 0").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, column: 13, .. }), "{e:?}");
    }

    proptest! {
        #[test]
        fn associativity(a in -6i64..6, b in -6i64..6, c in -6i64..6, t in 0usize..2) {
            let e = e37();
            let p = Point::affine(0, 0);
            let pts = [e.mul(a, &p), e.mul(b, &p), e.mul(c, &p)];
            let (x, y, z) = (&pts[0], &pts[1], &pts[2]);
            let z = if t == 1 { e.neg(z) } else { z.clone() };
            prop_assert_eq!(e.add(&e.add(x, y), &z), e.add(x, &e.add(y, &z)));
            prop_assert_eq!(e.neg(&e.neg(x)), x.clone());
            prop_assert!(e.contains(&e.add(x, y)));
        }
    }
}
