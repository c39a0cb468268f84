use std::sync::{Arc, OnceLock};

use num_traits::One;

use super::{GradedAlgebra, Poly};
use crate::error::{Error, Result};
use crate::linalg::{Rational, SparseMatrix, SparseVector};

/// Weight-preserving algebra homomorphism given by generator images.
#[derive(Clone)]
pub struct GradedHom {
    source: Arc<GradedAlgebra>,
    target: Arc<GradedAlgebra>,
    images: Vec<Poly>,
    basis_images: Arc<OnceLock<Vec<SparseVector>>>,
}

impl std::fmt::Debug for GradedHom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .source
            .generator_names()
            .iter()
            .zip(&self.images)
            .map(|(n, p)| format!("{n}->{}", self.target.format(p)))
            .collect();
        write!(f, "{} -> {}: {}", self.source.name(), self.target.name(), parts.join(", "))
    }
}

/// Check and build the homomorphism `A -> B` with the given generator images.
pub fn algebra_hom(a: Arc<GradedAlgebra>, b: Arc<GradedAlgebra>, images: Vec<Poly>) -> Result<GradedHom> {
    if images.len() != a.nvars() {
        return Err(Error::Unsupported(format!(
            "expected {} generator images, got {}",
            a.nvars(),
            images.len()
        )));
    }
    let images: Vec<Poly> = images.iter().map(|p| b.nf(p)).collect();
    for (i, p) in images.iter().enumerate() {
        let expected = a.weights()[i];
        if p.is_zero() {
            continue;
        }
        let ws = p.term_weights();
        if ws != [expected] {
            let found = ws.into_iter().find(|w| *w != expected).unwrap_or(expected);
            return Err(Error::WeightMismatch {
                generator: a.generator_names()[i].clone(),
                expected,
                found,
            });
        }
    }
    let hom = GradedHom {
        source: a.clone(),
        target: b.clone(),
        images,
        basis_images: Arc::new(OnceLock::new()),
    };
    for r in a.relations() {
        if !hom.apply(r).is_zero() {
            return Err(Error::RelationNotKilled(a.format(r)));
        }
    }
    Ok(hom)
}

impl GradedHom {
    pub fn identity(a: Arc<GradedAlgebra>) -> GradedHom {
        let images = (0..a.nvars()).map(|i| a.generator(i)).collect();
        algebra_hom(a.clone(), a, images).expect("identity is a homomorphism")
    }

    pub fn source(&self) -> &Arc<GradedAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedAlgebra> {
        &self.target
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    /// Image of a polynomial, in normal form in the target.
    pub fn apply(&self, p: &Poly) -> Poly {
        let n = self.target.nvars();
        let mut acc = Poly::zero(n);
        for (m, c) in p.terms() {
            let mut t = Poly::constant(n, c.clone());
            for (i, e) in m.exponents().iter().enumerate() {
                for _ in 0..*e {
                    t = self.target.multiply(&t, &self.images[i]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Matrix of the map on weight-`w` components in the monomial bases.
    pub fn matrix(&self, w: u32) -> SparseMatrix {
        let src = self.source.weight_basis(w);
        let cols = src
            .monomials()
            .iter()
            .map(|m| {
                let img = self.apply(&Poly::term(m.clone(), Rational::one()));
                self.target.coords(w, &img).expect("homomorphism preserves weight")
            })
            .collect();
        SparseMatrix::from_columns(self.target.dim(w), cols)
    }

    /// Images of the source basis elements with global ids below the table size,
    /// as coordinates in the target's global ids.
    pub fn basis_images(&self, max_weight: u32) -> Vec<SparseVector> {
        let st = self.source.table(max_weight);
        let tt = self.target.table(max_weight);
        let cached = self.basis_images.get();
        if let Some(c) = cached {
            if c.len() >= st.len() {
                return c[..st.len()].to_vec();
            }
        }
        let out: Vec<SparseVector> = (0..st.len() as u32)
            .map(|g| {
                let img = self.apply(&Poly::term(st.monomial(g).clone(), Rational::one()));
                tt.vector_of(&img)
            })
            .collect();
        let _ = self.basis_images.set(out.clone());
        out
    }

    pub fn compose(&self, next: &GradedHom) -> Result<GradedHom> {
        let images = self.images.iter().map(|p| next.apply(p)).collect();
        algebra_hom(self.source.clone(), next.target.clone(), images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cusp_and_line() -> (Arc<GradedAlgebra>, Arc<GradedAlgebra>) {
        let a = GradedAlgebra::parse("algebra cusp\nvars x:2 y:3\nrel y^2 - x^3").unwrap();
        let b = GradedAlgebra::parse("algebra line\nvars t:1").unwrap();
        (Arc::new(a), Arc::new(b))
    }

    #[test]
    fn normalization_of_cusp() {
        let (a, b) = cusp_and_line();
        let h = algebra_hom(a.clone(), b.clone(), vec![b.parse_poly("t^2").unwrap(), b.parse_poly("t^3").unwrap()]).unwrap();
        for w in 0..12 {
            let m = h.matrix(w);
            assert_eq!(m.rank(), a.dim(w));
        }
        assert!(GradedHom::identity(a.clone()).matrix(6).eq(&SparseMatrix::identity(1)));
    }

    #[test]
    fn weight_mismatch() {
        let (a, b) = cusp_and_line();
        let err = algebra_hom(a, b.clone(), vec![b.parse_poly("t").unwrap(), b.parse_poly("t^3").unwrap()]).unwrap_err();
        assert!(matches!(err, Error::WeightMismatch { expected: 2, found: 1, .. }));
    }

    #[test]
    fn relation_not_killed() {
        let (a, b) = cusp_and_line();
        let err = algebra_hom(a, b.clone(), vec![b.parse_poly("t^2").unwrap(), b.parse_poly("2t^3").unwrap()]).unwrap_err();
        assert!(matches!(err, Error::RelationNotKilled(_)));
    }
}
