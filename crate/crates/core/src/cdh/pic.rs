//! Picard groups of `A[s_1..s_m]` from the units sequence of the conductor
//! square, and the comparison with `A⁺/A`.

use serde::Serialize;

use super::square::{ResolutionSquare, SquareKind};
use crate::error::{Error, Result};
use crate::linalg::{rank_of_columns, SparseVector};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PicReport {
    pub polynomial_vars: usize,
    /// `dim Pic(A)`.
    pub constant: usize,
    /// `(j, dim)` of the `s`-degree-`j` part of `Pic(A[s])`, for `j = 1..=max_degree`.
    pub per_degree: Vec<(usize, usize)>,
    /// `dim (Ã/cÃ)_w / (A/c)_w` for `w = 0..=cutoff`.
    pub weight_profile: Vec<usize>,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn require_curve(sq: &ResolutionSquare) -> Result<()> {
    match sq.kind {
        SquareKind::Normalization => {
            if !sq.center_is_exceptional {
                return Err(Error::SquareInvalid("conductor square is not certified".into()));
            }
            Ok(())
        }
        SquareKind::Identity => Ok(()),
        k => Err(Error::Unsupported(format!("Picard groups of {} squares", k.name()))),
    }
}

/// `dim (Ã/cÃ)_w - rank((A/c)_w -> (Ã/cÃ)_w)`.
fn unit_cokernel(sq: &ResolutionSquare, w: u32) -> usize {
    if w == 0 {
        return 0;
    }
    let dt = sq.atil.dim(w);
    let (dc, cvecs) = sq.conductor_in_target(w);
    if dc == dt {
        return 0;
    }
    let mut cols: Vec<SparseVector> = cvecs;
    cols.extend(sq.nu.matrix(w).columns().iter().cloned());
    dt - rank_of_columns(&cols, dt)
}

/// Picard groups of `A[s_1..s_m]` per `s`-degree.
///
/// `Ã[s]` is a polynomial ring, so its units are `ℚ^×` and its Picard group
/// vanishes; the units of `(Ã/c)[s]` are `ℚ^× · (1 + nilpotents)` and `log`
/// identifies the cokernel of unipotent units with
/// `((Ã/c)_+ / (A/c)_+)[s]`, one copy per `s`-monomial.
pub fn pic_conductor(sq: &ResolutionSquare, m: usize, cutoff: u32, max_degree: usize) -> Result<PicReport> {
    require_curve(sq)?;
    let weight_profile: Vec<usize> = if sq.kind == SquareKind::Identity {
        vec![0; cutoff as usize + 1]
    } else {
        (0..=cutoff).map(|w| unit_cokernel(sq, w)).collect()
    };
    let d: usize = weight_profile.iter().sum();
    let per_degree = (1..=max_degree)
        .map(|j| (j, if m == 0 { 0 } else { d * binomial(j + m - 1, m - 1) }))
        .collect();
    Ok(PicReport { polynomial_vars: m, constant: d, per_degree, weight_profile })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SeminormalReport {
    /// `dim (A⁺/A)_w` for `w = 0..=cutoff`.
    pub quotient: Vec<usize>,
    pub total: usize,
}

/// `A⁺/A` for a one-point square.
///
/// With a single point over the origin and residue field `ℚ`, `A⁺` is
/// `ℚ + Ã_+` (the monomials `t^m`, `m ≥ 1`, together with the constants).
pub fn seminormalization(sq: &ResolutionSquare, cutoff: u32) -> Result<SeminormalReport> {
    let quotient: Vec<usize> = match sq.kind {
        SquareKind::Identity => vec![0; cutoff as usize + 1],
        SquareKind::Normalization => {
            if sq.atil.nvars() != 1 || !sq.atil.is_free() {
                return Err(Error::Unsupported("seminormalization of a non-monomial curve".into()));
            }
            (0..=cutoff)
                .map(|w| if w == 0 { 0 } else { sq.atil.dim(w) - sq.nu.matrix(w).rank() })
                .collect()
        }
        SquareKind::Reduction => {
            return Err(Error::Unsupported("A is not reduced; seminormalization is not defined here".into()))
        }
        SquareKind::Quotient => return Err(Error::Unsupported("seminormalization of a surface".into())),
    };
    let total = quotient.iter().sum();
    Ok(SeminormalReport { quotient, total })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Nk0Row {
    pub j: usize,
    /// `Pic(A[s])_j` from the conductor square.
    pub pic: usize,
    /// `dim(A⁺/A) · dim ℚ[s]_j`.
    pub seminormal: usize,
}

/// Compare `Pic(A[s])/Pic(A)` with `(A⁺/A) ⊗ sℚ[s]` in `s`-degrees `1..=max_degree`.
pub fn nk0_crosscheck(sq: &ResolutionSquare, cutoff: u32, max_degree: usize) -> Result<Vec<Nk0Row>> {
    let sn = seminormalization(sq, cutoff)?;
    let pic = pic_conductor(sq, 1, cutoff, max_degree)?;
    Ok(pic
        .per_degree
        .iter()
        .map(|&(j, p)| Nk0Row { j, pic: p, seminormal: sn.total })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdh::square::tests::CUSP_SQ;

    #[test]
    fn cusp_pic() {
        let sq = ResolutionSquare::parse(CUSP_SQ).unwrap().validate(10).unwrap();
        let p = pic_conductor(&sq, 0, 10, 3).unwrap();
        assert_eq!(p.constant, 1);
        assert_eq!(p.weight_profile[1], 1);
        let p = pic_conductor(&sq, 1, 10, 4).unwrap();
        assert!(p.per_degree.iter().all(|(_, d)| *d == 1));
        assert_eq!(pic_conductor(&sq, 2, 10, 3).unwrap().per_degree, [(1, 2), (2, 3), (3, 4)]);
        let rows = nk0_crosscheck(&sq, 10, 6).unwrap();
        assert!(rows.iter().all(|r| r.pic == 1 && r.seminormal == 1));
    }

    #[test]
    fn other_curves() {
        let t25 = "vars x:2 y:5\nrel y^2 - x^5\nsquare normalization\ntarget vars t:1\nnormalize line x->t^2 y->t^5\nconductor x^2 y";
        let sq = ResolutionSquare::parse(t25).unwrap().validate(12).unwrap();
        assert_eq!(pic_conductor(&sq, 0, 12, 1).unwrap().constant, 2);
        assert!(nk0_crosscheck(&sq, 12, 6).unwrap().iter().all(|r| r.pic == 2 && r.seminormal == 2));
        let line = ResolutionSquare::parse("vars t:1").unwrap().validate(8).unwrap();
        assert!(nk0_crosscheck(&line, 8, 6).unwrap().iter().all(|r| r.pic == 0 && r.seminormal == 0));
        let dual = ResolutionSquare::parse("vars e:1\nrel e^2\nsquare reduction\ntarget vars\nnormalize point e->0")
            .unwrap()
            .validate(6)
            .unwrap();
        assert!(matches!(nk0_crosscheck(&dual, 6, 6), Err(Error::Unsupported(_))));
    }
}
