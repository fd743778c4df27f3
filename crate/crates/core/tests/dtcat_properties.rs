mod common;

use proptest::prelude::*;
use triadica_core::dtcat::{
    check_morphism, compose, constant_morphism, enumerate_presheaf_morphisms, identity_morphism, pullback_morphism,
    verify_pullback_forced, TriadMorphism,
};
use triadica_core::exactla::Matrix;
use triadica_core::finspace::{ContinuousMap, FiniteSpace};
use triadica_core::kaehler::kaehler_presheaf;
use triadica_core::sheaf::AlgebraPresheaf;
use triadica_core::triad::FunctionalTriad;

fn functional_morphism(f: &ContinuousMap) -> TriadMorphism {
    TriadMorphism {
        map: f.clone(),
        fa: pullback_morphism(f).components,
        fomega: (0..f.codomain().open_count()).map(|_| Matrix::zeros(0, 0)).collect(),
    }
}

proptest! {
    #[test]
    fn constant_morphisms_are_morphisms(x in common::random_space(), y in common::random_space(), pick in 0usize..6, c in 0usize..3) {
        let a = common::fixture_algebras()[pick].1.clone();
        let source = kaehler_presheaf(&AlgebraPresheaf::constant(&x, &a)).unwrap().triad;
        let target = FunctionalTriad::full(&y);
        let c = c % y.point_count();
        let m = constant_morphism(&source, &target, c).unwrap();
        let report = check_morphism(&m, &source, target.triad());
        prop_assert!(report.is_valid(), "{:?}", report.findings);
        for (v, fa) in m.fa.iter().enumerate() {
            let u = m.map.preimage_open(v);
            prop_assert!((source.differential(u) * fa).is_zero());
        }
    }

    #[test]
    fn pullbacks_are_morphisms_and_compose(f in common::random_map(), seed in any::<u64>()) {
        let spaces = common::fixture_spaces();
        let z = spaces[(seed as usize) % spaces.len()].clone();
        let maps = common::continuous_maps(f.codomain(), &z);
        let g = maps[(seed as usize / 11) % maps.len()].clone();
        let (tx, ty, tz) = (FunctionalTriad::full(f.domain()), FunctionalTriad::full(f.codomain()), FunctionalTriad::full(&z));
        let (mf, mg) = (functional_morphism(&f), functional_morphism(&g));
        prop_assert!(check_morphism(&mf, tx.triad(), ty.triad()).is_valid());
        prop_assert!(check_morphism(&mg, ty.triad(), tz.triad()).is_valid());
        let gf = compose(&mg, &mf).unwrap();
        prop_assert!(check_morphism(&gf, tx.triad(), tz.triad()).is_valid());
        prop_assert_eq!(&gf, &functional_morphism(&f.then(&g)));
        prop_assert_eq!(&compose(&identity_morphism(tz.triad()), &gf).unwrap(), &gf);
        prop_assert_eq!(&compose(&gf, &identity_morphism(tx.triad())).unwrap(), &gf);
    }

    #[test]
    fn pushed_algebra_components_are_natural(f in common::random_map()) {
        // g_*(f_A) for the identity-morphism components of X, reindexed along f
        let tx = FunctionalTriad::full(f.domain());
        let id = identity_morphism(tx.triad());
        let pushed = id.algebra_morphism().pushforward(&f);
        let p = tx.triad().algebra().pushforward(&f);
        prop_assert_eq!(pushed.check_naturality(p.linear(), p.linear()), None);
    }

    #[test]
    fn pullback_is_among_enumerated_morphisms(f in common::random_map()) {
        let ax = AlgebraPresheaf::functional(f.domain());
        let ay = AlgebraPresheaf::functional(f.codomain());
        let all = enumerate_presheaf_morphisms(&f, &ay, &ax).unwrap();
        let pullback = pullback_morphism(&f);
        prop_assert!(all.contains(&pullback));
        let report = verify_pullback_forced(&f, &pullback);
        prop_assert!(report.is_forced());
        let discrete = f.domain().is_discrete() && f.codomain().is_discrete();
        prop_assert_eq!(report.exploratory, !discrete);
        if discrete {
            prop_assert_eq!(all.len(), 1);
        }
    }
}

#[test]
fn non_discrete_spaces_admit_extra_families() {
    // On the indiscrete 2-point space the only nonempty open is the whole
    // space, so any unital endomorphism of ℚ² is a family.
    let i = FiniteSpace::indiscrete(2);
    let f = ContinuousMap::identity(&i);
    let p = AlgebraPresheaf::functional(&i);
    let all = enumerate_presheaf_morphisms(&f, &p, &p).unwrap();
    assert_eq!(all.len(), 4);
    let forced = all.iter().filter(|h| verify_pullback_forced(&f, h).is_forced()).count();
    assert_eq!(forced, 1);
    assert!(all.iter().all(|h| verify_pullback_forced(&f, h).exploratory));
}
