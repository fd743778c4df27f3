mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use triadica_core::algebra::{
    check_unital_morphism, direct_product, function_algebra, square_zero_algebra, truncated_poly_algebra, Algebra,
    AlgebraModule,
};
use triadica_core::exactla::{Matrix, Rational};
use triadica_core::kaehler::{factor_derivation, induced_differential_map, kaehler_module, random_derivation};

/// `dim ker m − dim I²` computed directly from structure constants.
fn brute_force_omega_dim(a: &Algebra) -> usize {
    let n = a.dim();
    let c = |i: usize, j: usize, k: usize| a.structure_constants().get(i, j, k).clone();
    // multiplication A⊗A → A, column i·n+j
    let m = Matrix::from_fn(n, n * n, |k, col| c(col / n, col % n, k));
    let kernel_dim = n * n - m.rank();
    // kernel basis by brute elimination on the transposed system
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..n * n).filter(|j| !pivots.contains(j)).collect();
    let kernel: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::from_integer(0.into()); n * n];
            v[f] = Rational::from_integer(1.into());
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[(row, f)].clone();
            }
            v
        })
        .collect();
    assert_eq!(kernel.len(), kernel_dim);
    // (e_i⊗e_j)(e_k⊗e_l) = (e_ie_k)⊗(e_je_l)
    let mul = |x: &[Rational], y: &[Rational]| {
        let mut out = vec![Rational::from_integer(0.into()); n * n];
        for p in 0..n * n {
            if x[p] == Rational::from_integer(0.into()) {
                continue;
            }
            for s in 0..n * n {
                if y[s] == Rational::from_integer(0.into()) {
                    continue;
                }
                let (i, j, k, l) = (p / n, p % n, s / n, s % n);
                for u in 0..n {
                    for v in 0..n {
                        out[u * n + v] += &x[p] * &y[s] * c(i, k, u) * c(j, l, v);
                    }
                }
            }
        }
        out
    };
    let products: Vec<Vec<Rational>> = kernel.iter().flat_map(|x| kernel.iter().map(move |y| mul(x, y))).collect();
    let square_dim = if products.is_empty() {
        0
    } else {
        Matrix::from_rows(n * n, products).unwrap().rank()
    };
    kernel_dim - square_dim
}

#[test]
fn dimensions_match_brute_force() {
    for (name, a) in common::fixture_algebras() {
        let k = kaehler_module(&a);
        assert_eq!(k.omega_dim, brute_force_omega_dim(&a), "{name}");
        let n = a.dim();
        assert!(k.omega_dim <= k.ideal.dim() && k.ideal.dim() <= n * n - n, "{name}");
    }
}

fn modules_for(a: &Algebra) -> Vec<AlgebraModule> {
    let regular = AlgebraModule::regular(a);
    let k = kaehler_module(a).module;
    vec![regular.clone(), regular.direct_sum(&regular), k.direct_sum(&regular)]
}

#[test]
fn universal_property_on_random_derivations() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (name, a) in common::fixture_algebras() {
        let k = kaehler_module(&a);
        for module in modules_for(&a) {
            for _ in 0..10 {
                let d = random_derivation(&a, &module, &mut rng);
                let f = factor_derivation(&k, &module, &d).unwrap();
                assert_eq!(&f.phi * &k.d_matrix, d, "{name}");
                assert!(f.unique, "{name}");
            }
        }
    }
}

#[test]
fn induced_maps_are_natural() {
    let (q3, _) = direct_product(&[truncated_poly_algebra(2), function_algebra(1)]);
    let cases: Vec<(Algebra, Algebra, Matrix)> = vec![
        // x ↦ x²
        (truncated_poly_algebra(2), truncated_poly_algebra(3), Matrix::from_i64(3, 2, &[1, 0, 0, 0, 0, 1])),
        // x ↦ x
        (truncated_poly_algebra(3), truncated_poly_algebra(2), Matrix::from_i64(2, 3, &[1, 0, 0, 0, 1, 0])),
        // x ↦ x, y ↦ 0
        (square_zero_algebra(2), truncated_poly_algebra(2), Matrix::from_i64(2, 3, &[1, 0, 0, 0, 1, 0])),
        // ℚ[x]/(x²) × ℚ → ℚ[x]/(x²)
        (q3.clone(), truncated_poly_algebra(2), Matrix::from_i64(2, 3, &[1, 0, 0, 0, 1, 0])),
        (truncated_poly_algebra(2), q3, Matrix::from_i64(3, 2, &[1, 0, 0, 1, 1, 0])),
    ];
    for (a, b, h) in cases {
        assert_eq!(check_unital_morphism(&h, &a, &b), None);
        let (ka, kb) = (kaehler_module(&a), kaehler_module(&b));
        let omega_h = induced_differential_map(&h, &ka, &kb).unwrap();
        assert_eq!(&kb.d_matrix * &h, &omega_h * &ka.d_matrix);
    }
}

#[test]
fn left_and_right_actions_agree_on_fixtures() {
    for (name, a) in common::fixture_algebras() {
        let k = kaehler_module(&a);
        assert_eq!(&k.right_action(), k.module.action(), "{name}");
    }
}
