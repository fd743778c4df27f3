//! Kähler differentials of finite-dimensional algebras and the Kähler triad
//! of an algebra presheaf.
//!
//! For an algebra `A` with multiplication map `m: A⊗A → A` and `I = ker m`,
//! the module of differentials is `Ω_A = I/I²` with `δ(x) = x⊗1 − 1⊗x + I²`.
//! `A` acts on `Ω_A` through the left tensor factor.

use rand::Rng;
use thiserror::Error;

use crate::algebra::{tensor_product, Algebra, AlgebraModule, TensorProduct};
use crate::exactla::{
    kernel, product_subspace, qr, quotient_space, solve_left, sub_vectors, unit_vector, Matrix, Rational, Subspace,
    Tensor3,
};
use crate::sheaf::{AlgebraPresheaf, ModulePresheaf, PresheafMorphism, RestrictionMap, SheafError};
use crate::triad::{check_leibniz, DifferentialTriad, LeibnizViolation, TriadError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KaehlerError {
    #[error("map is not a derivation: Leibniz fails at (e{}, e{})", .0.i, .0.j)]
    NotADerivation(LeibnizViolation),
    /// Must not happen for a genuine derivation.
    #[error("derivation does not factor through the Kähler differential (internal soundness failure)")]
    FactorizationFailed,
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Triad(#[from] TriadError),
}

/// `Ω_A = I/I²` with the universal derivation `δ_A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KaehlerModule {
    pub algebra: Algebra,
    pub tensor: TensorProduct,
    /// `I = ker(m)` inside `A⊗A`.
    pub ideal: Subspace,
    /// `I²`, a subspace of `I`.
    pub ideal_square: Subspace,
    pub omega_dim: usize,
    /// `δ_A` as an `omega_dim × dim` matrix.
    pub d_matrix: Matrix,
    pub module: AlgebraModule,
    /// `A⊗A ⊇ I → I/I²`; only meaningful on elements of `I`.
    pub projection: Matrix,
    /// Representatives in `I` of the basis of `I/I²`.
    pub section: Matrix,
}

pub fn kaehler_module(algebra: &Algebra) -> KaehlerModule {
    let tensor = tensor_product(algebra, algebra);
    let mult = tensor.algebra.structure_constants();
    let ideal = kernel(&algebra.multiplication_map());
    let ideal_square = product_subspace(&ideal, &ideal, mult);

    let in_ideal_coords = Subspace::span(
        ideal.dim(),
        ideal_square.basis().iter().map(|b| ideal.coordinates(b).expect("I² ⊆ I")),
    );
    let quo = quotient_space(ideal.dim(), &in_ideal_coords);
    let n2 = tensor.algebra.dim();
    let pivot_selection = Matrix::from_fn(ideal.dim(), n2, |r, c| {
        if ideal.pivots()[r] == c {
            qr(1, 1)
        } else {
            qr(0, 1)
        }
    });
    let projection = &quo.projection * &pivot_selection;
    let section = &ideal.basis_matrix().transpose() * &quo.section;
    let omega_dim = quo.dim;

    let n = algebra.dim();
    let d_cols: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let diff = sub_vectors(&tensor.left.column(i), &tensor.right.column(i));
            projection.mul_vec(&diff)
        })
        .collect();
    let d_matrix = Matrix::from_columns(omega_dim, &d_cols);

    let reps = section.columns();
    let action = Tensor3::from_fn(n, omega_dim, omega_dim, |k, l| {
        projection.mul_vec(&tensor.algebra.mul(&tensor.left.column(k), &reps[l]))
    });
    KaehlerModule {
        algebra: algebra.clone(),
        tensor,
        ideal,
        ideal_square,
        omega_dim,
        d_matrix,
        module: AlgebraModule::new_unchecked(action),
        projection,
        section,
    }
}

impl KaehlerModule {
    /// The action through the right tensor factor, `a·ξ := (1⊗a)ξ`.
    pub fn right_action(&self) -> Tensor3 {
        let n = self.algebra.dim();
        let reps = self.section.columns();
        Tensor3::from_fn(n, self.omega_dim, self.omega_dim, |k, l| {
            self.projection
                .mul_vec(&self.tensor.algebra.mul(&self.tensor.right.column(k), &reps[l]))
        })
    }

    /// `e_k·δ(e_i)` for all `(k, i)`, column `k·n + i`. These span `Ω_A`.
    fn generators(&self) -> Matrix {
        let n = self.algebra.dim();
        let cols: Vec<Vec<Rational>> = (0..n * n)
            .map(|c| self.module.act(&unit_vector(n, c / n), &self.d_matrix.column(c % n)))
            .collect();
        Matrix::from_columns(self.omega_dim, &cols)
    }
}

/// The unique `A`-linear `φ: Ω_A → M` with `φ∘δ_A = D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub phi: Matrix,
    /// The generators `a·δ(b)` span `Ω_A`, so `φ` is unique.
    pub unique: bool,
}

pub fn factor_derivation(
    kaehler: &KaehlerModule,
    module: &AlgebraModule,
    derivation: &Matrix,
) -> Result<Factorization, KaehlerError> {
    let algebra = &kaehler.algebra;
    check_leibniz(derivation, algebra, module).map_err(KaehlerError::NotADerivation)?;
    let n = algebra.dim();
    let generators = kaehler.generators();
    let target_cols: Vec<Vec<Rational>> = (0..n * n)
        .map(|c| module.act(&unit_vector(n, c / n), &derivation.column(c % n)))
        .collect();
    let targets = Matrix::from_columns(module.dim(), &target_cols);
    let (phi, unique) = solve_left(&generators, &targets);
    let phi = phi.ok_or(KaehlerError::FactorizationFailed)?;
    if &phi * &kaehler.d_matrix != *derivation {
        return Err(KaehlerError::FactorizationFailed);
    }
    for k in 0..n {
        let a = unit_vector(n, k);
        if &phi * &kaehler.module.act_matrix(&a) != &module.act_matrix(&a) * &phi {
            return Err(KaehlerError::FactorizationFailed);
        }
    }
    Ok(Factorization { phi, unique })
}

/// Basis of all derivations `A → M`, from the Leibniz constraints on basis pairs.
pub fn derivation_space(algebra: &Algebra, module: &AlgebraModule) -> Vec<Matrix> {
    let n = algebra.dim();
    let dm = module.dim();
    let unknowns = dm * n;
    let var = |r: usize, c: usize| r * n + c;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i..n {
            let prod = algebra.basis_product(i, j);
            for r in 0..dm {
                let mut row = vec![qr(0, 1); unknowns];
                for (c, coeff) in prod.iter().enumerate() {
                    row[var(r, c)] += coeff;
                }
                for s in 0..dm {
                    row[var(s, j)] -= module.action().get(i, s, r);
                    row[var(s, i)] -= module.action().get(j, s, r);
                }
                rows.push(row);
            }
        }
    }
    let constraints = Matrix::from_rows(unknowns, rows).expect("constraint rows");
    kernel(&constraints)
        .basis()
        .iter()
        .map(|v| Matrix::from_fn(dm, n, |r, c| v[var(r, c)].clone()))
        .collect()
}

/// A random derivation: a combination of [`derivation_space`] with small
/// random rational coefficients.
pub fn random_derivation<R: Rng>(algebra: &Algebra, module: &AlgebraModule, rng: &mut R) -> Matrix {
    derivation_space(algebra, module)
        .iter()
        .fold(Matrix::zeros(module.dim(), algebra.dim()), |acc, basis| {
            let coeff = qr(rng.gen_range(-5..=5), rng.gen_range(1..=3));
            acc.add(&basis.scale(&coeff))
        })
}

/// `Ω(h): Ω_A → Ω_B` for an algebra morphism `h: A → B`, obtained by
/// factoring the derivation `δ_B ∘ h`.
pub fn induced_differential_map(
    h: &Matrix,
    source: &KaehlerModule,
    target: &KaehlerModule,
) -> Result<Matrix, KaehlerError> {
    let pulled = target.module.pull_back(h);
    let derivation = &target.d_matrix * h;
    Ok(factor_derivation(source, &pulled, &derivation)?.phi)
}

/// Kähler data for a presheaf: per-open modules, the presheaf-level triad,
/// and its sheafification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KaehlerTriad {
    pub modules: Vec<KaehlerModule>,
    pub presheaf_triad: DifferentialTriad,
    pub triad: DifferentialTriad,
}

pub fn kaehler_presheaf(presheaf: &AlgebraPresheaf) -> Result<KaehlerTriad, KaehlerError> {
    let space = presheaf.space();
    let modules: Vec<KaehlerModule> = presheaf.algebras().iter().map(kaehler_module).collect();
    let mut given = RestrictionMap::new();
    for (u, v) in space.inclusions() {
        if u == v {
            continue;
        }
        let phi = induced_differential_map(presheaf.restriction(u, v), &modules[u], &modules[v])?;
        given.insert((u, v), phi);
    }
    let omega = ModulePresheaf::new(presheaf, modules.iter().map(|k| k.module.clone()).collect(), given)?;
    let differentials: Vec<Matrix> = modules.iter().map(|k| k.d_matrix.clone()).collect();
    let presheaf_triad = DifferentialTriad::new(presheaf.clone(), omega.clone(), differentials.clone())?;

    let algebra_plus = presheaf.sheafify();
    let omega_plus = omega.sheafify(presheaf, &algebra_plus);
    let d = PresheafMorphism { components: differentials };
    let d_plus = d.sheafify(&algebra_plus.linear, presheaf.linear(), &omega_plus.linear);
    let triad = DifferentialTriad::new(algebra_plus.presheaf, omega_plus.presheaf, d_plus.components)?;
    Ok(KaehlerTriad { modules, presheaf_triad, triad })
}
