use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::linalg::Rational;

pub(crate) type Exps = SmallVec<[u16; 6]>;

/// Monomial in the generators, carrying its weight.
///
/// Ordered by weight, then reverse lexicographically starting from the first
/// generator: a smaller exponent there makes the monomial larger. This is
/// weighted grevlex with the generators ranked in reverse declaration order,
/// so for `y^2 - x^3` the leading term is `y^2` and `x^3` is a normal form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    weight: u32,
    exps: Exps,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            weight: 0,
            exps: SmallVec::from_elem(0, nvars),
        }
    }

    pub fn from_exponents(exps: &[u16], weights: &[u32]) -> Self {
        assert_eq!(exps.len(), weights.len());
        let weight = exps
            .iter()
            .zip(weights)
            .map(|(e, w)| *e as u32 * w)
            .sum();
        Monomial {
            weight,
            exps: SmallVec::from_slice(exps),
        }
    }

    pub fn var(i: usize, weights: &[u32]) -> Self {
        let mut e = SmallVec::from_elem(0, weights.len());
        e[i] = 1;
        Monomial {
            weight: weights[i],
            exps: e,
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|e| *e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|e| *e as u32).sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial {
            weight: self.weight + o.weight,
            exps: self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.weight <= o.weight && self.exps.iter().zip(&o.exps).all(|(a, b)| a <= b)
    }

    /// `o / self`, assuming `self` divides `o`.
    pub fn quotient_of(&self, o: &Monomial) -> Monomial {
        Monomial {
            weight: o.weight - self.weight,
            exps: self.exps.iter().zip(&o.exps).map(|(a, b)| b - a).collect(),
        }
    }

    pub fn lcm(&self, o: &Monomial, weights: &[u32]) -> Monomial {
        let e: Exps = self
            .exps
            .iter()
            .zip(&o.exps)
            .map(|(a, b)| *a.max(b))
            .collect();
        Monomial::from_exponents(&e, weights)
    }

    pub fn coprime(&self, o: &Monomial) -> bool {
        self.exps.iter().zip(&o.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, _)| i)
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (i, e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.weight.cmp(&o.weight).then_with(|| {
            for i in 0..self.exps.len() {
                match o.exps[i].cmp(&self.exps[i]) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Polynomial with rational coefficients; terms sorted by decreasing monomial.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Monomial, Rational)>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let nvars = m.nvars();
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Poly {
            nvars,
            terms: vec![(m, c)],
        }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), nvars);
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        Poly {
            nvars,
            terms: acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Rational)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    /// Weights of the terms, deduplicated and sorted.
    pub fn term_weights(&self) -> Vec<u32> {
        let mut w: Vec<u32> = self.terms.iter().map(|t| t.0.weight()).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    pub fn is_homogeneous(&self) -> bool {
        self.term_weights().len() <= 1
    }

    /// Weight of a nonzero homogeneous polynomial.
    pub fn weight(&self) -> Option<u32> {
        let w = self.term_weights();
        (w.len() == 1).then(|| w[0])
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Rational::one())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.axpy(&Rational::one(), o)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.axpy(&-Rational::one(), o)
    }

    /// `self + c * o`, merging the sorted term lists.
    pub fn axpy(&self, c: &Rational, o: &Poly) -> Poly {
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ord = if i >= a.len() {
                Ordering::Less
            } else if j >= b.len() {
                Ordering::Greater
            } else {
                a[i].0.cmp(&b[j].0)
            };
            match ord {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), &b[j].1 * c));
                    j += 1;
                }
                Ordering::Equal => {
                    let v = &a[i].1 + &b[j].1 * c;
                    if !v.is_zero() {
                        out.push((a[i].0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.retain(|t| !t.1.is_zero());
        Poly {
            nvars: self.nvars.max(o.nvars),
            terms: out,
        }
    }

    /// `c * m * self`.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(t, x)| (t.mul(m), x * c)).collect(),
        }
    }

    /// Product in the free polynomial ring (no reduction).
    pub fn mul(&self, o: &Poly) -> Poly {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                *acc.entry(m1.mul(m2)).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        Poly {
            nvars: self.nvars,
            terms: acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                let _ = write!(s, "{a}");
            } else if a.is_one() {
                s.push_str(&m.format(names));
            } else {
                let _ = write!(s, "{a}*{}", m.format(names));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn grevlex_order() {
        let w = [1, 1, 1];
        let m = |e: &[u16]| Monomial::from_exponents(e, &w);
        assert!(m(&[0, 0, 2]) > m(&[0, 1, 1]));
        assert!(m(&[0, 1, 1]) > m(&[0, 2, 0]));
        assert!(m(&[0, 2, 0]) > m(&[1, 0, 1]));
        assert!(m(&[3, 0, 0]) > m(&[0, 0, 2]));
    }

    #[test]
    fn weights_dominate() {
        let w = [2, 3];
        let x3 = Monomial::from_exponents(&[3, 0], &w);
        let y2 = Monomial::from_exponents(&[0, 2], &w);
        let y = Monomial::from_exponents(&[0, 1], &w);
        assert_eq!(x3.weight(), 6);
        assert!(y2 > x3);
        assert!(x3 > y);
    }

    #[test]
    fn arithmetic() {
        let w = [1, 1];
        let x = Poly::term(Monomial::var(0, &w), rat(1));
        let y = Poly::term(Monomial::var(1, &w), rat(1));
        let s = x.add(&y);
        let d = x.sub(&y);
        let p = s.mul(&d);
        let names = vec!["x".to_string(), "y".to_string()];
        assert_eq!(p.format(&names), "-y^2 + x^2");
        assert!(p.sub(&x.pow(2)).add(&y.pow(2)).is_zero());
    }
}
