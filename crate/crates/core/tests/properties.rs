use std::sync::Arc;

use proptest::prelude::*;

use khh::algebra::{GradedAlgebra, Monomial, Poly};
use khh::cdh::{FiberEngine, ResolutionSquare};
use khh::elliptic::{cusp_bundle_tables, rr_dims, DivisorClass, EllipticCurve, Point};
use khh::hochschild::{HochschildEngine, CUSP};
use khh::kahler::{hkr_image_dim, omega_dims, DifferentialModule};
use khh::linalg::rat;
use khh::SparseMatrix;

fn cusp() -> Arc<GradedAlgebra> {
    Arc::new(GradedAlgebra::parse(CUSP).unwrap())
}

fn poly(a: &GradedAlgebra, terms: &[(Vec<u16>, i64)]) -> Poly {
    Poly::from_terms(
        a.nvars(),
        terms.iter().map(|(e, c)| (Monomial::from_exponents(e, a.weights()), rat(*c))),
    )
}

fn terms(nvars: usize) -> impl Strategy<Value = Vec<(Vec<u16>, i64)>> {
    proptest::collection::vec((proptest::collection::vec(0u16..4, nvars), -3i64..4), 0..5)
}

fn small_matrix(r: usize, c: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(proptest::collection::vec(-3i64..4, c), r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_products_associate(
        (a, b, c) in (1usize..5, 1usize..5, 1usize..5, 1usize..5)
            .prop_flat_map(|(p, q, r, s)| (small_matrix(p, q), small_matrix(q, r), small_matrix(r, s)))
    ) {
        let (a, b, c) = (SparseMatrix::from_rows_i64(&a), SparseMatrix::from_rows_i64(&b), SparseMatrix::from_rows_i64(&c));
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left.to_dense(), right.to_dense());
    }

    #[test]
    fn normal_form_is_a_ring_map(p in terms(2), q in terms(2)) {
        let a = cusp();
        let (p, q) = (poly(&a, &p), poly(&a, &q));
        prop_assert_eq!(a.nf(&p.add(&q)), a.nf(&p).add(&a.nf(&q)));
        prop_assert_eq!(a.nf(&p.mul(&q)), a.nf(&a.nf(&p).mul(&a.nf(&q))));
    }

    #[test]
    fn normal_form_with_completed_basis(p in terms(4), q in terms(4)) {
        let a = GradedAlgebra::with_relations("cubic", &[("a", 1), ("b", 1), ("c", 1), ("d", 1)], &["a*c - b^2", "b*d - c^2", "a*d - b*c"]).unwrap();
        let (p, q) = (poly(&a, &p), poly(&a, &q));
        prop_assert_eq!(a.nf(&p.mul(&q)), a.nf(&a.nf(&p).mul(&a.nf(&q))));
        prop_assert_eq!(a.multiply(&p, &q), a.multiply(&q, &p));
    }

    #[test]
    fn hilbert_functions(w in 0u32..40) {
        let plane = GradedAlgebra::with_relations("plane", &[("x", 1), ("y", 1)], &[]).unwrap();
        prop_assert_eq!(plane.dim(w), w as usize + 1);
        prop_assert_eq!(cusp().dim(w), usize::from(w != 1));
    }

    #[test]
    fn hkr_for_weighted_free_algebras(weights in proptest::collection::vec(1u32..4, 1..4), w in 0u32..7, n in 0usize..4) {
        let names = ["x", "y", "z"];
        let gens: Vec<(&str, u32)> = weights.iter().enumerate().map(|(i, k)| (names[i], *k)).collect();
        let a = Arc::new(GradedAlgebra::with_relations("free", &gens, &[]).unwrap());
        let e = HochschildEngine::new(a.clone(), 6);
        let hh = e.hh(n, w).unwrap();
        prop_assert_eq!(hh, omega_dims(&a, n, w));
        prop_assert_eq!(hkr_image_dim(&e, n, w).unwrap(), hh);
        if n > 0 {
            let split = e.hodge_split(n, w).unwrap();
            prop_assert_eq!(split[n - 1], hh);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn connectedness_bounds(n in 0usize..6, w in 0u32..10) {
        let e = HochschildEngine::new(cusp(), 9);
        if n as u32 > w {
            let free = Arc::new(GradedAlgebra::with_relations("line", &[("x", 1)], &[]).unwrap());
            prop_assert_eq!(HochschildEngine::new(free, 9).hh(n, w).unwrap(), 0);
        }
        if 2 * n as u32 > w {
            prop_assert_eq!(e.hh(n, w).unwrap(), 0);
        }
    }

    #[test]
    fn adams_eigenspaces_match_idempotents(n in 1usize..4, w in 0u32..11) {
        let e = HochschildEngine::new(cusp(), 10);
        let a = e.hodge_split(n, w).unwrap();
        prop_assert_eq!(a.iter().sum::<usize>(), e.hh(n, w).unwrap());
        prop_assert_eq!(a, e.hodge_split_eigen(n, w).unwrap());
    }

    #[test]
    fn sbi_sequence_is_exact(n in 0usize..4, w in 0u32..11) {
        let e = HochschildEngine::new(cusp(), 10);
        for (key, _) in e.all_classes(w) {
            prop_assert!(e.sbi_exact_class(n, w, &key).unwrap());
        }
    }

    #[test]
    fn shuffle_is_graded_commutative(w1 in 2u32..7, w2 in 2u32..7, p in 0usize..3, q in 0usize..3) {
        let e = HochschildEngine::new(cusp(), 12);
        let conv = e.convention();
        for c in e.hh_representatives(p, w1).unwrap() {
            for d in e.hh_representatives(q, w2).unwrap() {
                let cd = c.shuffle(&d).unwrap();
                let dc = d.shuffle(&c).unwrap();
                let sign = if (p * q) % 2 == 0 { rat(1) } else { rat(-1) };
                let diff = cd.sub(&dc.scale(&sign));
                prop_assert!(cd.boundary(conv).is_zero());
                prop_assert!(diff.is_zero() || e.is_boundary(&diff).unwrap());
            }
        }
    }

    #[test]
    fn forms_above_the_generator_count_vanish(p in 3usize..6, w in 0u32..12) {
        prop_assert_eq!(omega_dims(&cusp(), p, w), 0);
        let m = DifferentialModule::new(cusp(), 1);
        prop_assert!(m.check_de_rham(w).is_ok());
    }

    #[test]
    fn fiber_long_exact_sequence(m in -4i64..2, w in 0u32..9) {
        let f = khh::cdh::fiber_engine(&std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/cusp/square.sq")).unwrap(), 8).unwrap();
        let c = f.fiber_cell(m, w).unwrap();
        prop_assert_eq!(c.dim, c.kernel + c.cokernel);
    }

    #[test]
    fn fiber_of_a_smooth_square_vanishes(m in -4i64..2, w in 0u32..8) {
        let text = "algebra plane\nvars x:1 y:1";
        let sq = ResolutionSquare::parse(text).unwrap().validate(7).unwrap();
        let f = FiberEngine::new(Arc::new(sq), 7).unwrap();
        prop_assert_eq!(f.fiber_dims(m, w).unwrap(), 0);
    }

    #[test]
    fn table_a_vanishes_off_torsion(k in 1i64..5, l in -3i64..3, m in 0usize..3) {
        let e = EllipticCurve::curve_37a();
        let g = Point::affine(0, 0);
        let (p, q) = (e.mul(k + l, &g), e.mul(l, &g));
        let t = cusp_bundle_tables(&e, &p, &q, (-1, 6), m, 3, 1).unwrap();
        prop_assert!(t.regular);
        prop_assert!(t.cohomology_a.cells.values().all(|v| *v == 0));
        prop_assert_eq!(e.neg(&e.neg(&p)), p.clone());
        let d = DivisorClass::difference(&e, &p, &q);
        let (h0, h1) = rr_dims(&d.neg(&e));
        prop_assert_eq!(rr_dims(&d), (h1, h0));
    }
}
