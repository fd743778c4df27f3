#![allow(dead_code)]

use proptest::prelude::*;
use triadica_core::algebra::{function_algebra, square_zero_algebra, truncated_poly_algebra, Algebra};
use triadica_core::finspace::{all_point_maps, ContinuousMap, FiniteSpace, PointSet};

/// ℚ, ℚ², ℚ³, ℚ[x]/(x²), ℚ[x]/(x³), ℚ[x,y]/(x²,xy,y²).
pub fn fixture_algebras() -> Vec<(&'static str, Algebra)> {
    vec![
        ("Q", function_algebra(1)),
        ("Q^2", function_algebra(2)),
        ("Q^3", function_algebra(3)),
        ("Q[x]/(x^2)", truncated_poly_algebra(2)),
        ("Q[x]/(x^3)", truncated_poly_algebra(3)),
        ("Q[x,y]/(x^2,xy,y^2)", square_zero_algebra(2)),
    ]
}

/// Small spaces with at most three points.
pub fn fixture_spaces() -> Vec<FiniteSpace> {
    vec![
        FiniteSpace::point(),
        FiniteSpace::discrete(2),
        FiniteSpace::sierpinski(),
        FiniteSpace::indiscrete(2),
        FiniteSpace::discrete(3),
        FiniteSpace::from_point_lists(3, &[vec![], vec![0], vec![0, 1], vec![0, 1, 2]]).unwrap(),
    ]
}

pub fn continuous_maps(x: &FiniteSpace, y: &FiniteSpace) -> Vec<ContinuousMap> {
    all_point_maps(x.point_count(), y.point_count())
        .into_iter()
        .filter_map(|v| ContinuousMap::new(x.clone(), y.clone(), v).ok())
        .collect()
}

fn close(n: usize, gens: Vec<u64>) -> FiniteSpace {
    let mut opens = vec![PointSet::EMPTY, PointSet::full(n)];
    for g in gens {
        if !opens.contains(&PointSet(g)) {
            opens.push(PointSet(g));
        }
    }
    loop {
        let snapshot = opens.clone();
        let mut added = false;
        for a in &snapshot {
            for b in &snapshot {
                for c in [a.union(*b), a.intersection(*b)] {
                    if !opens.contains(&c) {
                        opens.push(c);
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    opens.sort();
    FiniteSpace::new(n, opens).expect("closed family")
}

/// Topologies on 1..=3 points generated by up to three random opens.
pub fn random_space() -> impl Strategy<Value = FiniteSpace> {
    (1usize..=3).prop_flat_map(|n| proptest::collection::vec(0u64..(1u64 << n), 0..4).prop_map(move |g| close(n, g)))
}

/// A space with a continuous map into another one.
pub fn random_map() -> impl Strategy<Value = ContinuousMap> {
    (random_space(), random_space(), any::<u64>()).prop_map(|(x, y, seed)| {
        let maps = continuous_maps(&x, &y);
        maps[(seed as usize) % maps.len()].clone()
    })
}
