//! Buchberger completion for weight-homogeneous ideals.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_traits::Zero;

use super::poly::{Monomial, Poly};
use crate::linalg::Rational;

/// Fully reduce `p` modulo `basis` (every term, not just the leading one).
pub(crate) fn reduce(p: &Poly, basis: &[Poly]) -> Poly {
    let nvars = p.nvars();
    let mut work: BTreeMap<Monomial, Rational> = p.terms().iter().cloned().collect();
    let mut out: Vec<(Monomial, Rational)> = Vec::new();
    while let Some((m, c)) = work.pop_last() {
        if c.is_zero() {
            continue;
        }
        let div = basis
            .iter()
            .find(|g| g.leading().is_some_and(|(lm, _)| lm.divides(&m)));
        match div {
            None => out.push((m, c)),
            Some(g) => {
                let (lm, lc) = g.leading().unwrap();
                let q = lm.quotient_of(&m);
                let f = &c / lc;
                for (t, x) in &g.terms()[1..] {
                    let e = work.entry(t.mul(&q)).or_insert_with(Rational::zero);
                    *e -= &f * x;
                }
            }
        }
    }
    Poly::from_terms(nvars, out)
}

fn s_poly(f: &Poly, g: &Poly, weights: &[u32]) -> Poly {
    let (lf, cf) = f.leading().unwrap();
    let (lg, cg) = g.leading().unwrap();
    let l = lf.lcm(lg, weights);
    let a = f.mul_term(&lf.quotient_of(&l), &cf.recip());
    let b = g.mul_term(&lg.quotient_of(&l), &cg.recip());
    a.sub(&b)
}

/// Reduced, monic Gröbner basis, sorted by increasing leading monomial.
pub(crate) fn groebner(gens: &[Poly], weights: &[u32]) -> Vec<Poly> {
    let mut basis: Vec<Poly> = Vec::new();
    // Queue of (weight, tiebreak, pair or generator index).
    let mut queue: BinaryHeap<Reverse<(u32, usize, usize, usize)>> = BinaryHeap::new();
    const GEN: usize = usize::MAX;
    for (k, g) in gens.iter().enumerate() {
        if let Some((lm, _)) = g.leading() {
            queue.push(Reverse((lm.weight(), 0, GEN, k)));
        }
    }
    let mut seq = 1usize;
    while let Some(Reverse((_, _, i, j))) = queue.pop() {
        let candidate = if i == GEN {
            gens[j].clone()
        } else {
            let (li, _) = basis[i].leading().unwrap();
            let (lj, _) = basis[j].leading().unwrap();
            if li.coprime(lj) {
                continue;
            }
            s_poly(&basis[i], &basis[j], weights)
        };
        let r = reduce(&candidate, &basis);
        if r.is_zero() {
            continue;
        }
        let r = r.monic();
        let n = basis.len();
        let lr = r.leading().unwrap().0.clone();
        basis.push(r);
        for k in 0..n {
            let lk = &basis[k].leading().unwrap().0;
            let l = lk.lcm(&lr, weights);
            queue.push(Reverse((l.weight(), seq, k, n)));
            seq += 1;
        }
    }
    // Minimalise, then interreduce.
    let mut minimal: Vec<Poly> = Vec::new();
    for (k, g) in basis.iter().enumerate() {
        let lm = &g.leading().unwrap().0;
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let lh = &h.leading().unwrap().0;
            j != k && lh.divides(lm) && (lh != lm || j < k)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced: Vec<Poly> = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Poly> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, p)| p.clone())
            .collect();
        let (lm, lc) = minimal[k].leading().unwrap().clone();
        let tail = Poly::from_terms(minimal[k].nvars(), minimal[k].terms()[1..].iter().cloned());
        let tail = reduce(&tail, &others);
        let p = Poly::term(lm, lc).add(&tail).monic();
        reduced.push(p);
    }
    reduced.sort_by(|a, b| a.leading().unwrap().0.cmp(&b.leading().unwrap().0));
    reduced
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn mono(e: &[u16], w: &[u32]) -> Monomial {
        Monomial::from_exponents(e, w)
    }

    #[test]
    fn cusp_basis_is_the_relation() {
        let w = [2, 3];
        let rel = Poly::from_terms(2, [(mono(&[0, 2], &w), rat(1)), (mono(&[3, 0], &w), rat(-1))]);
        let gb = groebner(&[rel], &w);
        assert_eq!(gb.len(), 1);
        assert_eq!(gb[0].leading().unwrap().0, mono(&[0, 2], &w));
    }

    #[test]
    fn twisted_cubic_needs_completion() {
        // 2x2 minors of [[x,y,z],[y,z,w]]; checks the Buchberger criterion on the output.
        let w = [1, 1, 1, 1];
        let p = |t: &[(&[u16], i64)]| {
            Poly::from_terms(4, t.iter().map(|(e, c)| (mono(e, &w), rat(*c))))
        };
        let f1 = p(&[(&[1, 0, 1, 0], 1), (&[0, 2, 0, 0], -1)]);
        let f2 = p(&[(&[1, 0, 0, 1], 1), (&[0, 1, 1, 0], -1)]);
        let f3 = p(&[(&[0, 1, 0, 1], 1), (&[0, 0, 2, 0], -1)]);
        let gb = groebner(&[f1.clone(), f2.clone(), f3.clone()], &w);
        for f in [&f1, &f2, &f3] {
            assert!(reduce(f, &gb).is_zero());
        }
        for a in &gb {
            for b in &gb {
                assert!(reduce(&s_poly(a, b, &w), &gb).is_zero());
            }
        }
    }
}
