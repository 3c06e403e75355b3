use proptest::prelude::*;

use nhcech::cech::{cech_differential, cohomology_dims, restriction_map};
use nhcech::complex::{Simplex, SimplicialComplex};
use nhcech::diagram::{canonicalize, collapse, GluedDiagram};
use nhcech::gallery;
use nhcech::linalg::{FMatrix, PrimeField};
use nhcech::mv::{
    assemble_les, connecting_homomorphism_via, fibred_product, inductive_product, total_cohomology,
    verify_exact_sequence, IntersectionLattice,
};

fn field() -> impl Strategy<Value = PrimeField> {
    prop_oneof![Just(PrimeField::F2), Just(PrimeField::F3), Just(PrimeField::new(5).unwrap())]
}

fn matrix() -> impl Strategy<Value = FMatrix> {
    (field(), 1usize..6, 1usize..6).prop_flat_map(|(f, r, c)| {
        prop::collection::vec(0i64..f.modulus() as i64, r * c).prop_map(move |vals| {
            let rows: Vec<Vec<i64>> = vals.chunks(c).map(|ch| ch.to_vec()).collect();
            FMatrix::from_rows(f, &rows)
        })
    })
}

/// Random complex on up to 6 vertices, generated by random simplices of dim ≤ 3.
fn complex() -> impl Strategy<Value = SimplicialComplex> {
    prop::collection::vec(prop::collection::btree_set(0u8..6, 1..=4), 1..8).prop_map(|gens| {
        SimplicialComplex::from_generators(
            gens.into_iter().map(|g| Simplex::from_unsorted(g.into_iter().map(|v| format!("x{v}"))).unwrap()),
        )
    })
}

fn random_diagram(seed: u64) -> GluedDiagram {
    canonicalize(&gallery::random_admissible(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_of_transpose(a in matrix()) {
        prop_assert_eq!(a.rank(), a.transpose().rank());
        let (r, n) = a.rank_nullity();
        prop_assert_eq!(r + n, a.cols());
        for v in a.kernel_basis() {
            prop_assert!(a.apply(&v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn solvable_iff_rank_unchanged(a in matrix(), seed in any::<u64>()) {
        let f = a.field();
        let b: Vec<u32> = (0..a.rows()).map(|i| f.reduce((seed >> (i * 3)) as i64 & 7)).collect();
        let aug = a.hstack(&FMatrix::from_columns(f, a.rows(), std::slice::from_ref(&b)));
        let sol = a.solve(&b).unwrap();
        prop_assert_eq!(sol.is_some(), aug.rank() == a.rank());
        if let Some(x) = sol {
            prop_assert_eq!(a.apply(&x), b);
        }
    }

    #[test]
    fn delta_squares_to_zero(k in complex(), f in field()) {
        for q in 0..3 {
            let d0 = cech_differential(&k, q, f).matrix;
            let d1 = cech_differential(&k, q + 1, f).matrix;
            prop_assert!(d1.mul(&d0).is_zero());
        }
    }

    #[test]
    fn restriction_commutes_with_delta(k in complex(), keep in prop::collection::btree_set(0u8..6, 1..6), f in field()) {
        let labels = keep.into_iter().map(|v| format!("x{v}").into()).collect();
        let l = k.induced(&labels);
        for q in 0..3 {
            let r0 = restriction_map(&k, &l, q, f).unwrap().matrix;
            let r1 = restriction_map(&k, &l, q + 1, f).unwrap().matrix;
            let lhs = cech_differential(&l, q, f).matrix.mul(&r0);
            let rhs = r1.mul(&cech_differential(&k, q, f).matrix);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn random_diagrams_exact_and_total_agrees(seed in 0u64..10_000, f in field()) {
        let d = random_diagram(seed).with_field(f);
        let top = d.union().dimension().unwrap_or(0);
        for q in 0..=top {
            let v = verify_exact_sequence(&d, q);
            prop_assert!(v.exact, "{:?}", v);
        }
        let t = total_cohomology(&d, top);
        prop_assert!(t.d_squared_zero);
        prop_assert_eq!(t.dims, t.union_dims);
    }

    #[test]
    fn random_diagram_compositions_vanish(seed in 0u64..10_000) {
        let d = random_diagram(seed);
        let lat = IntersectionLattice::new(&d);
        for q in 0..3 {
            for p in 0..d.n() - 1 {
                let a = lat.level_map(p, q).matrix;
                let b = lat.level_map(p + 1, q).matrix;
                prop_assert!(b.mul(&a).is_zero());
            }
        }
    }

    #[test]
    fn collapse_invariance(seed in 0u64..10_000, pick in any::<u8>()) {
        let d = random_diagram(seed);
        let before = cohomology_dims(d.union(), 2, d.field());
        let n = d.n();
        // a nonempty proper subset chosen by the low bits of `pick`
        let mask = 1 + (pick as usize % ((1 << n) - 2));
        let j: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let c = collapse(&d, &j).unwrap();
        prop_assert_eq!(cohomology_dims(c.union(), 2, c.field()), before.clone());
        prop_assert_eq!(total_cohomology(&c, 2).dims, before);
        for q in 0..3 {
            prop_assert!(verify_exact_sequence(&c, q).exact);
        }
    }

    #[test]
    fn binary_les_on_random(seed in 0u64..10_000, f in field()) {
        let d = random_diagram(seed).with_field(f);
        let two = if d.n() == 2 { d.clone() } else { collapse(&d, &(0..d.n() - 1).collect::<Vec<_>>()).unwrap() };
        let r = assemble_les(&two, 2).unwrap();
        prop_assert!(r.exact, "{:?}", r);
        prop_assert!(r.identity_holds);
        let union = cohomology_dims(d.union(), 2, f);
        for (deg, u) in r.degrees.iter().zip(union) {
            prop_assert_eq!(deg.h_union, u);
        }
        for q in 0..2 {
            let a = connecting_homomorphism_via(&two, q, 0).unwrap();
            let b = connecting_homomorphism_via(&two, q, 1).unwrap();
            prop_assert_eq!(a.matrix, b.matrix);
        }
    }

    #[test]
    fn fibred_product_is_image(seed in 0u64..10_000) {
        let d = random_diagram(seed);
        for q in 0..3 {
            let fp = fibred_product(&d, q);
            prop_assert!(fp.equals_image());
            prop_assert!(inductive_product(&d, q).agrees());
        }
    }
}

#[test]
fn hundred_seeded_diagrams_are_exact() {
    for seed in 0..100 {
        let d = random_diagram(seed);
        let top = d.union().dimension().unwrap_or(0);
        for q in 0..=top {
            assert!(verify_exact_sequence(&d, q).exact, "seed {seed} q {q}");
        }
    }
}
