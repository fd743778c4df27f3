mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use triadica_core::algebra::{
    characters, check_unital_morphism, direct_product, enumerate_unital_morphisms, function_algebra, pullback_matrix, tensor_product,
};
use triadica_core::exactla::{dot, q, unit_vector, Rational};

#[test]
fn characters_kill_the_nilradical() {
    for (name, a) in common::fixture_algebras() {
        let chars = characters(&a).unwrap();
        assert!(!chars.is_empty(), "{name}");
        for chi in &chars {
            assert!(chi.is_character_of(&a), "{name}");
            for b in a.nilradical().basis() {
                assert_eq!(dot(&chi.functional, b), q(0), "{name}");
            }
        }
    }
}

#[test]
fn characters_of_function_algebras_are_coordinate_projections() {
    for k in 1..=4 {
        let found: BTreeSet<Vec<Rational>> = characters(&function_algebra(k)).unwrap().into_iter().map(|c| c.functional).collect();
        let expected: BTreeSet<Vec<Rational>> = (0..k).map(|i| unit_vector(k, i)).collect();
        assert_eq!(found, expected);
    }
}

#[test]
fn unital_morphisms_are_point_maps() {
    for m in 1..=3 {
        for k in 0..=3 {
            let morphisms = enumerate_unital_morphisms(m, k);
            assert_eq!(morphisms.len(), m.pow(k as u32));
            let source_chars = characters(&function_algebra(m)).unwrap();
            for h in morphisms {
                // ev_x ∘ h is a character of the source, hence some ev_{φ(x)}
                let point_map: Vec<usize> = (0..k)
                    .map(|x| {
                        let row = h.matrix().row(x).to_vec();
                        let chi = source_chars.iter().find(|c| c.functional == row).expect("row is a character");
                        chi.functional.iter().position(|v| *v == q(1)).unwrap()
                    })
                    .collect();
                assert_eq!(h.matrix(), &pullback_matrix(&point_map, m));
            }
        }
    }
}

#[test]
fn tensor_products_of_fixtures_are_valid() {
    let fixtures = common::fixture_algebras();
    for (na, a) in &fixtures {
        for (nb, b) in &fixtures {
            let t = tensor_product(a, b);
            assert_eq!(t.algebra.validate(), None, "{na} ⊗ {nb}");
            assert!(t.algebra.dim() == a.dim() * b.dim());
        }
    }
}

proptest! {
    #[test]
    fn characters_of_products(picks in proptest::collection::vec(0usize..6, 1..4)) {
        let fixtures = common::fixture_algebras();
        let factors: Vec<_> = picks.iter().map(|&i| fixtures[i].1.clone()).collect();
        let (product, projections) = direct_product(&factors);
        let chars = characters(&product).unwrap();
        let expected: usize = factors.iter().map(|f| characters(f).unwrap().len()).sum();
        prop_assert_eq!(chars.len(), expected);
        for chi in &chars {
            prop_assert!(chi.is_character_of(&product));
            for b in product.nilradical().basis() {
                prop_assert!(dot(&chi.functional, b) == q(0));
            }
        }
        for (p, f) in projections.iter().zip(&factors) {
            prop_assert_eq!(check_unital_morphism(p, &product, f), None);
        }
    }
}
