mod common;

use proptest::prelude::*;
use triadica_core::algebra::AlgebraModule;
use triadica_core::exactla::{is_zero_vector, qr, Rational};
use triadica_core::kaehler::{kaehler_module, kaehler_presheaf, random_derivation};
use triadica_core::sheaf::AlgebraPresheaf;
use triadica_core::triad::{check_leibniz, leibniz_deviation, FunctionalTriad};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_vector(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec((-4i64..=4, 1i64..=3).prop_map(|(a, b)| qr(a, b)), n)
}

proptest! {
    /// Basis-pair vanishing and vanishing on random pairs agree, for both
    /// genuine derivations and arbitrary linear maps.
    #[test]
    fn leibniz_basis_check_matches_random_pairs(
        pick in 0usize..6,
        seed in any::<u64>(),
        entries in proptest::collection::vec((-2i64..=2, 1i64..=2).prop_map(|(a, b)| qr(a, b)), 36),
        coeffs in (small_vector(4), small_vector(4)),
    ) {
        let a = common::fixture_algebras()[pick].1.clone();
        let n = a.dim();
        let m = AlgebraModule::regular(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let derivation = random_derivation(&a, &m, &mut rng);
        let arbitrary = triadica_core::exactla::Matrix::from_fn(n, n, |i, j| entries[i * n + j].clone());
        let (x, y) = (coeffs.0[..n].to_vec(), coeffs.1[..n].to_vec());
        prop_assert!(check_leibniz(&derivation, &a, &m).is_ok());
        prop_assert!(is_zero_vector(&leibniz_deviation(&derivation, &a, &m, &x, &y)));
        if check_leibniz(&arbitrary, &a, &m).is_ok() {
            prop_assert!(is_zero_vector(&leibniz_deviation(&arbitrary, &a, &m, &x, &y)));
        }
        // bilinearity of the deviation
        let two_x: Vec<Rational> = x.iter().map(|v| v * qr(2, 1)).collect();
        let l1 = leibniz_deviation(&arbitrary, &a, &m, &two_x, &y);
        let l2: Vec<Rational> = leibniz_deviation(&arbitrary, &a, &m, &x, &y).iter().map(|v| v * qr(2, 1)).collect();
        prop_assert_eq!(l1, l2);
    }

    #[test]
    fn valid_triads_kill_the_unit(space in common::random_space(), pick in 0usize..6) {
        let a = common::fixture_algebras()[pick].1.clone();
        let kt = kaehler_presheaf(&AlgebraPresheaf::constant(&space, &a)).unwrap();
        prop_assert!(kt.triad.validate().is_valid());
        for u in 0..space.open_count() {
            let unit = kt.triad.algebra().algebra(u).unit().to_vec();
            prop_assert!(is_zero_vector(&kt.triad.differential(u).mul_vec(&unit)));
        }
    }

    #[test]
    fn pushforward_is_functorial(f in common::random_map(), g_seed in any::<u64>(), pick in 0usize..6) {
        let y = f.codomain().clone();
        let targets = common::fixture_spaces();
        let z = targets[(g_seed as usize) % targets.len()].clone();
        let maps = common::continuous_maps(&y, &z);
        let g = maps[(g_seed as usize / 7) % maps.len()].clone();
        let a = common::fixture_algebras()[pick].1.clone();
        let t = kaehler_presheaf(&AlgebraPresheaf::constant(f.domain(), &a)).unwrap().triad;
        prop_assert_eq!(t.pushforward(&f.then(&g)), t.pushforward(&f).pushforward(&g));
        prop_assert!(t.pushforward(&f).validate().is_valid());
        let ft = FunctionalTriad::full(f.domain()).into_triad();
        prop_assert!(ft.pushforward(&f).validate().is_valid());
    }
}

#[test]
fn kaehler_differentials_pass_leibniz_on_fixtures() {
    for (name, a) in common::fixture_algebras() {
        let k = kaehler_module(&a);
        assert!(check_leibniz(&k.d_matrix, &a, &k.module).is_ok(), "{name}");
    }
}
