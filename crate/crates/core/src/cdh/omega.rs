//! `H^q_cdh(A, Ω^p)` per weight, from the resolution square.

use serde::Serialize;

use super::square::{ResolutionSquare, SquareKind};
use crate::error::{Error, Result};
use crate::kahler::{omega_dims, DifferentialModule};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CdhOmega {
    pub p: usize,
    pub q: usize,
    /// Dimensions in weights `0..=max_weight`.
    pub dims: Vec<usize>,
}

/// `(Ω^p_Ã)_w` fixed by the involution of a quotient square.
fn invariant_forms(sq: &ResolutionSquare, p: usize, w: u32) -> usize {
    let module = DifferentialModule::new(sq.atil.clone(), p);
    let fb = module.free_basis(w);
    (0..fb.len)
        .filter(|i| {
            let (m, s) = module.basis_form(w, &fb, *i);
            let mut ex = m.exponents().to_vec();
            for j in &s {
                ex[*j as usize] += 1;
            }
            sq.sign_of(&ex) == 1
        })
        .count()
}

/// Cohomology of the point (center = exceptional fiber = `Spec ℚ`).
fn point(p: usize, w: u32) -> usize {
    usize::from(p == 0 && w == 0)
}

/// `H^q_cdh(A, Ω^p)` in weights `0..=max_weight`, for `q ≤ 1`.
///
/// Normalization squares use the Mayer-Vietoris sequence
/// `0 -> H^0 -> Ω^p(Ã) ⊕ Ω^p(center) -> Ω^p(exceptional) -> H^1 -> 0`.
pub fn cdh_omega(sq: &ResolutionSquare, p: usize, q: usize, max_weight: u32) -> Result<CdhOmega> {
    if q >= 2 {
        return Err(Error::UnsupportedDimension(q));
    }
    let mut dims = Vec::with_capacity(max_weight as usize + 1);
    for w in 0..=max_weight {
        let d = match sq.kind {
            SquareKind::Normalization => {
                if !sq.center_is_exceptional {
                    return Err(Error::SquareInvalid("center/exceptional isomorphism is not certified".into()));
                }
                // Ω^p(Ã)_w ⊕ Ω^p(center)_w -> Ω^p(exceptional)_w: both points are Spec ℚ,
                // so the map is onto (via the center) whenever the target is nonzero.
                let target = omega_dims(&sq.atil, p, w);
                let (center, exc) = (point(p, w), point(p, w));
                let rank = exc.min(center);
                if q == 0 {
                    target + center - rank
                } else {
                    exc - rank
                }
            }
            SquareKind::Quotient => {
                if q == 0 {
                    invariant_forms(sq, p, w)
                } else {
                    0
                }
            }
            // cdh sheaves do not see nilpotents.
            SquareKind::Reduction => {
                if q == 0 {
                    omega_dims(&sq.atil, p, w)
                } else {
                    0
                }
            }
            SquareKind::Identity => {
                if q == 0 {
                    omega_dims(&sq.a, p, w)
                } else {
                    0
                }
            }
        };
        dims.push(d);
    }
    Ok(CdhOmega { p, q, dims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdh::square::tests::CUSP_SQ;

    #[test]
    fn cusp_values() {
        let sq = ResolutionSquare::parse(CUSP_SQ).unwrap().validate(10).unwrap();
        let h = cdh_omega(&sq, 1, 0, 10).unwrap();
        assert_eq!(h.dims[0], 0);
        assert!(h.dims[1..].iter().all(|d| *d == 1));
        assert!(cdh_omega(&sq, 0, 1, 10).unwrap().dims.iter().all(|d| *d == 0));
        assert!(cdh_omega(&sq, 2, 0, 10).unwrap().dims.iter().all(|d| *d == 0));
        assert_eq!(cdh_omega(&sq, 0, 0, 4).unwrap().dims, [1, 1, 1, 1, 1]);
        assert!(matches!(cdh_omega(&sq, 1, 2, 4), Err(Error::UnsupportedDimension(_))));
    }

    #[test]
    fn quotient_invariants() {
        let text = "vars x:2 y:2 z:2\nrel z^2 - x*y\nsquare quotient\ntarget vars u:1 v:1\nnormalize plane x->u^2 y->v^2 z->u*v\ngroup -1 -1";
        let sq = ResolutionSquare::parse(text).unwrap().validate(6).unwrap();
        // Invariant 1-forms of weight 2: u du, v du, u dv, v dv.
        assert_eq!(cdh_omega(&sq, 1, 0, 2).unwrap().dims, [0, 0, 4]);
        assert_eq!(cdh_omega(&sq, 2, 0, 2).unwrap().dims, [0, 0, 1]);
    }
}
