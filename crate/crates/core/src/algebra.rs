//! Finite-dimensional commutative unital algebras over ℚ given by structure
//! constants, their morphisms, modules, tensor products and characters.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactla::{
    is_zero_vector, kernel, q, quotient_space, rational_roots, scale_vector, solve, sub_vectors,
    unit_vector, zero_vector, Matrix, Rational, Subspace, Tensor3,
};

/// First violated algebra axiom, with the offending basis indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraViolation {
    Shape { reason: String },
    NotCommutative { i: usize, j: usize },
    NotAssociative { i: usize, j: usize, l: usize },
    UnitFails { i: usize },
}

impl fmt::Display for AlgebraViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape { reason } => write!(f, "malformed structure constants: {reason}"),
            Self::NotCommutative { i, j } => write!(f, "e{i}·e{j} ≠ e{j}·e{i}"),
            Self::NotAssociative { i, j, l } => write!(f, "(e{i}·e{j})·e{l} ≠ e{i}·(e{j}·e{l})"),
            Self::UnitFails { i } => write!(f, "unit·e{i} ≠ e{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("invalid algebra: {0}")]
    Invalid(AlgebraViolation),
    #[error("not a unital algebra morphism: {0}")]
    NotAMorphism(MorphismViolation),
    #[error("invalid module: {0}")]
    InvalidModule(ModuleViolation),
    /// The semisimple quotient has a simple factor that is a proper field
    /// extension of ℚ, so not every character is ℚ-valued.
    #[error("algebra is not split over ℚ: multiplication by basis element {element} has minimal polynomial {} without a full set of rational roots", format_poly(.min_poly))]
    NotSplit { element: usize, min_poly: Vec<Rational> },
}

/// Ascending coefficients as `x^2 - 2`.
fn format_poly(coeffs: &[Rational]) -> String {
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        let mag = match k {
            0 => a.to_string(),
            _ if a.is_one() => String::new(),
            _ => a.to_string(),
        };
        let var = match k {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{k}"),
        };
        let body = format!("{mag}{var}");
        terms.push(match (terms.is_empty(), neg) {
            (true, true) => format!("-{body}"),
            (true, false) => body,
            (false, true) => format!("- {body}"),
            (false, false) => format!("+ {body}"),
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" ")
    }
}

/// A commutative, associative, unital algebra `ℚ^dim` with
/// `eᵢ·eⱼ = Σₖ c[i][j][k] eₖ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    mult: Tensor3,
    unit: Vec<Rational>,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra(dim {})", self.dim())
    }
}

impl Algebra {
    /// Validating constructor.
    pub fn new(mult: Tensor3, unit: Vec<Rational>) -> Result<Self, AlgebraError> {
        let a = Self::new_unchecked(mult, unit);
        match a.validate() {
            None => Ok(a),
            Some(v) => Err(AlgebraError::Invalid(v)),
        }
    }

    /// Skips the axiom check; use [`Algebra::validate`] to inspect the result.
    pub fn new_unchecked(mult: Tensor3, unit: Vec<Rational>) -> Self {
        Self { mult, unit }
    }

    /// The zero algebra (dim 0, unit 0), sections over the empty open.
    pub fn zero() -> Self {
        Self { mult: Tensor3::zeros(0, 0, 0), unit: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.unit.len()
    }

    pub fn unit(&self) -> &[Rational] {
        &self.unit
    }

    pub fn structure_constants(&self) -> &Tensor3 {
        &self.mult
    }

    /// Unit equals zero, which happens only for the zero algebra.
    pub fn is_degenerate(&self) -> bool {
        is_zero_vector(&self.unit)
    }

    /// Returns the first violated axiom, if any.
    pub fn validate(&self) -> Option<AlgebraViolation> {
        let n = self.dim();
        if self.mult.dims() != (n, n, n) {
            return Some(AlgebraViolation::Shape {
                reason: format!("structure constants have shape {:?}, expected ({n}, {n}, {n})", self.mult.dims()),
            });
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.mult.fiber(i, j) != self.mult.fiber(j, i) {
                    return Some(AlgebraViolation::NotCommutative { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = self.mult.fiber(i, j).to_vec();
                for l in 0..n {
                    let left = self.mult.apply(&ij, &unit_vector(n, l));
                    let right = self.mult.apply(&unit_vector(n, i), self.mult.fiber(j, l));
                    if left != right {
                        return Some(AlgebraViolation::NotAssociative { i, j, l });
                    }
                }
            }
        }
        for i in 0..n {
            if self.mul(&self.unit, &unit_vector(n, i)) != unit_vector(n, i) {
                return Some(AlgebraViolation::UnitFails { i });
            }
        }
        None
    }

    pub fn mul(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        self.mult.apply(a, b)
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &[Rational] {
        self.mult.fiber(i, j)
    }

    /// Matrix of `x ↦ a·x`.
    pub fn left_mult(&self, a: &[Rational]) -> Matrix {
        self.mult.left_operator(a)
    }

    pub fn power(&self, a: &[Rational], k: usize) -> Vec<Rational> {
        (0..k).fold(self.unit.clone(), |acc, _| self.mul(&acc, a))
    }

    /// Linear map `A ⊗ A → A`, `eᵢ⊗eⱼ ↦ eᵢeⱼ`, with column index `i·n + j`.
    pub fn multiplication_map(&self) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vec<Rational>> =
            (0..n * n).map(|c| self.basis_product(c / n, c % n).to_vec()).collect();
        Matrix::from_columns(n, &cols)
    }

    /// `(a, b) ↦ trace(L_{ab})`.
    pub fn trace_form(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| {
            let m = self.left_mult(self.basis_product(i, j));
            (0..n).fold(Rational::zero(), |acc, k| acc + &m[(k, k)])
        })
    }

    /// All nilpotent elements; in characteristic 0 this is the radical of
    /// the trace form.
    pub fn nilradical(&self) -> Subspace {
        kernel(&self.trace_form())
    }

    /// Subalgebra on the canonical basis of `sub`, with its inclusion matrix.
    /// `sub` must be closed under multiplication and contain the unit.
    pub fn subalgebra(&self, sub: &Subspace) -> (Algebra, Matrix) {
        assert_eq!(sub.ambient_dim(), self.dim());
        let basis = sub.basis();
        let d = basis.len();
        let mult = Tensor3::from_fn(d, d, d, |i, j| {
            sub.coordinates(&self.mul(&basis[i], &basis[j]))
                .expect("subspace is closed under multiplication")
        });
        let unit = sub.coordinates(&self.unit).expect("subspace contains the unit");
        let inclusion = sub.basis_matrix().transpose();
        (Algebra { mult, unit }, inclusion)
    }

    /// Quotient by an ideal, with the projection `A → A/ideal`.
    pub fn quotient(&self, ideal: &Subspace) -> (Algebra, Matrix) {
        let quo = quotient_space(self.dim(), ideal);
        let sections = quo.section.columns();
        let s = quo.dim;
        let mult = Tensor3::from_fn(s, s, s, |i, j| {
            quo.projection.mul_vec(&self.mul(&sections[i], &sections[j]))
        });
        let unit = quo.projection.mul_vec(&self.unit);
        (Algebra { mult, unit }, quo.projection)
    }
}

/// ℚᵏ with pointwise product on indicator functions; `k = 0` gives the zero algebra.
pub fn function_algebra(k: usize) -> Algebra {
    let mult = Tensor3::from_fn(k, k, k, |i, j| if i == j { unit_vector(k, i) } else { zero_vector(k) });
    Algebra { mult, unit: vec![Rational::one(); k] }
}

/// `ℚ[x]/(xᵏ)` on the basis `1, x, …, x^{k−1}`.
pub fn truncated_poly_algebra(order: usize) -> Algebra {
    assert!(order >= 1, "truncated polynomial algebra needs order ≥ 1");
    let k = order;
    let mult = Tensor3::from_fn(k, k, k, |i, j| if i + j < k { unit_vector(k, i + j) } else { zero_vector(k) });
    Algebra { mult, unit: unit_vector(k, 0) }
}

/// `ℚ[x]/(x² − c)` on the basis `1, x`; split iff `c` is a rational square.
pub fn quadratic_algebra(c: Rational) -> Algebra {
    let mut mult = Tensor3::zeros(2, 2, 2);
    mult.set_fiber(0, 0, vec![q(1), q(0)]);
    mult.set_fiber(0, 1, vec![q(0), q(1)]);
    mult.set_fiber(1, 0, vec![q(0), q(1)]);
    mult.set_fiber(1, 1, vec![c, q(0)]);
    Algebra { mult, unit: vec![q(1), q(0)] }
}

/// `ℚ[x₁,…,x_r]/(all products xᵢxⱼ)`, basis `1, x₁, …, x_r`.
pub fn square_zero_algebra(generators: usize) -> Algebra {
    let n = generators + 1;
    let mult = Tensor3::from_fn(n, n, n, |i, j| match (i, j) {
        (0, j) => unit_vector(n, j),
        (i, 0) => unit_vector(n, i),
        _ => zero_vector(n),
    });
    Algebra { mult, unit: unit_vector(n, 0) }
}

/// `A ⊗ B` with embeddings `a ↦ a⊗1` and `b ↦ 1⊗b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorProduct {
    pub algebra: Algebra,
    pub left: Matrix,
    pub right: Matrix,
}

/// Basis `eᵢ⊗fⱼ` at index `i·dim(B) + j`.
pub fn tensor_product(a: &Algebra, b: &Algebra) -> TensorProduct {
    let (n, m) = (a.dim(), b.dim());
    let d = n * m;
    let kron = |x: &[Rational], y: &[Rational]| -> Vec<Rational> {
        let mut out = zero_vector(d);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    out[i * m + j] = xi * yj;
                }
            }
        }
        out
    };
    let mult = Tensor3::from_fn(d, d, d, |p, r| {
        let (i, j) = (p / m, p % m);
        let (k, l) = (r / m, r % m);
        kron(a.basis_product(i, k), b.basis_product(j, l))
    });
    let unit = kron(a.unit(), b.unit());
    let left_cols: Vec<_> = (0..n).map(|i| kron(&unit_vector(n, i), b.unit())).collect();
    let right_cols: Vec<_> = (0..m).map(|j| kron(a.unit(), &unit_vector(m, j))).collect();
    TensorProduct {
        algebra: Algebra { mult, unit },
        left: Matrix::from_columns(d, &left_cols),
        right: Matrix::from_columns(d, &right_cols),
    }
}

/// Cartesian product `A₁ × … × A_r` with block coordinates, plus the
/// coordinate projections.
pub fn direct_product(factors: &[Algebra]) -> (Algebra, Vec<Matrix>) {
    let offsets: Vec<usize> = factors
        .iter()
        .scan(0, |acc, a| {
            let o = *acc;
            *acc += a.dim();
            Some(o)
        })
        .collect();
    let d: usize = factors.iter().map(Algebra::dim).sum();
    let owner = |p: usize| -> usize {
        (0..factors.len()).rev().find(|&f| offsets[f] <= p && factors[f].dim() > 0).expect("index in some block")
    };
    let mult = Tensor3::from_fn(d, d, d, |p, r| {
        let (fp, fr) = (owner(p), owner(r));
        let mut out = zero_vector(d);
        if fp == fr {
            let o = offsets[fp];
            for (k, c) in factors[fp].basis_product(p - o, r - o).iter().enumerate() {
                out[o + k] = c.clone();
            }
        }
        out
    });
    let unit: Vec<Rational> = factors.iter().flat_map(|a| a.unit().iter().cloned()).collect();
    let projections = factors
        .iter()
        .zip(&offsets)
        .map(|(a, &o)| Matrix::from_fn(a.dim(), d, |i, j| if j == o + i { q(1) } else { q(0) }))
        .collect();
    (Algebra { mult, unit }, projections)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismViolation {
    Shape { expected: (usize, usize), found: (usize, usize) },
    UnitNotPreserved,
    NotMultiplicative { i: usize, j: usize },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape { expected, found } => write!(f, "matrix is {}x{}, expected {}x{}", found.0, found.1, expected.0, expected.1),
            Self::UnitNotPreserved => write!(f, "unit is not mapped to unit"),
            Self::NotMultiplicative { i, j } => write!(f, "h(e{i}·e{j}) ≠ h(e{i})·h(e{j})"),
        }
    }
}

/// Checks that `matrix` is a unit-preserving multiplicative map `source → target`.
pub fn check_unital_morphism(matrix: &Matrix, source: &Algebra, target: &Algebra) -> Option<MorphismViolation> {
    let expected = (target.dim(), source.dim());
    if (matrix.rows(), matrix.cols()) != expected {
        return Some(MorphismViolation::Shape { expected, found: (matrix.rows(), matrix.cols()) });
    }
    if matrix.mul_vec(source.unit()) != target.unit() {
        return Some(MorphismViolation::UnitNotPreserved);
    }
    let images = matrix.columns();
    for i in 0..source.dim() {
        for j in i..source.dim() {
            let lhs = matrix.mul_vec(source.basis_product(i, j));
            let rhs = target.mul(&images[i], &images[j]);
            if lhs != rhs {
                return Some(MorphismViolation::NotMultiplicative { i, j });
            }
        }
    }
    None
}

/// A validated unit-preserving algebra morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraMorphism {
    source: Algebra,
    target: Algebra,
    matrix: Matrix,
}

impl AlgebraMorphism {
    pub fn new(source: Algebra, target: Algebra, matrix: Matrix) -> Result<Self, AlgebraError> {
        match check_unital_morphism(&matrix, &source, &target) {
            None => Ok(Self { source, target, matrix }),
            Some(v) => Err(AlgebraError::NotAMorphism(v)),
        }
    }

    pub fn identity(a: &Algebra) -> Self {
        Self { source: a.clone(), target: a.clone(), matrix: Matrix::identity(a.dim()) }
    }

    pub fn source(&self) -> &Algebra {
        &self.source
    }

    pub fn target(&self) -> &Algebra {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AlgebraMorphism) -> AlgebraMorphism {
        assert_eq!(self.target, other.source, "morphisms are not composable");
        AlgebraMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: &other.matrix * &self.matrix,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleViolation {
    Shape { reason: String },
    UnitNotIdentity { m: usize },
    NotAssociative { i: usize, j: usize, m: usize },
}

impl fmt::Display for ModuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shape { reason } => write!(f, "malformed action: {reason}"),
            Self::UnitNotIdentity { m } => write!(f, "unit does not fix basis element {m}"),
            Self::NotAssociative { i, j, m } => write!(f, "(e{i}·e{j})·w{m} ≠ e{i}·(e{j}·w{m})"),
        }
    }
}

/// A finite-dimensional module over an algebra, given by its action tensor
/// `A × M → M`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlgebraModule {
    action: Tensor3,
}

impl AlgebraModule {
    pub fn new_unchecked(action: Tensor3) -> Self {
        Self { action }
    }

    pub fn new(algebra: &Algebra, action: Tensor3) -> Result<Self, AlgebraError> {
        let m = Self { action };
        match m.validate(algebra) {
            None => Ok(m),
            Some(v) => Err(AlgebraError::InvalidModule(v)),
        }
    }

    pub fn zero(algebra: &Algebra) -> Self {
        Self { action: Tensor3::zeros(algebra.dim(), 0, 0) }
    }

    /// `A` acting on itself.
    pub fn regular(algebra: &Algebra) -> Self {
        Self { action: algebra.structure_constants().clone() }
    }

    /// `M₁ ⊕ M₂` with block coordinates.
    pub fn direct_sum(&self, other: &AlgebraModule) -> AlgebraModule {
        let (a, m1, _) = self.action.dims();
        let m2 = other.dim();
        let d = m1 + m2;
        AlgebraModule {
            action: Tensor3::from_fn(a, d, d, |i, j| {
                let mut out = zero_vector(d);
                if j < m1 {
                    out[..m1].clone_from_slice(self.action.fiber(i, j));
                } else {
                    out[m1..].clone_from_slice(other.action.fiber(i, j - m1));
                }
                out
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.action.dims().1
    }

    pub fn action(&self) -> &Tensor3 {
        &self.action
    }

    pub fn act(&self, a: &[Rational], w: &[Rational]) -> Vec<Rational> {
        self.action.apply(a, w)
    }

    /// Matrix of `w ↦ a·w`.
    pub fn act_matrix(&self, a: &[Rational]) -> Matrix {
        self.action.left_operator(a)
    }

    /// Restriction of scalars along `h: B → A` (columns of `h` are images of B's basis).
    pub fn pull_back(&self, h: &Matrix) -> AlgebraModule {
        let (_, m, _) = self.action.dims();
        let images = h.columns();
        AlgebraModule {
            action: Tensor3::from_fn(h.cols(), m, m, |i, j| self.act(&images[i], &unit_vector(m, j))),
        }
    }

    pub fn validate(&self, algebra: &Algebra) -> Option<ModuleViolation> {
        let (a, m, m2) = self.action.dims();
        if a != algebra.dim() || m != m2 {
            return Some(ModuleViolation::Shape {
                reason: format!("action has shape {:?} for an algebra of dim {}", self.action.dims(), algebra.dim()),
            });
        }
        for w in 0..m {
            if self.act(algebra.unit(), &unit_vector(m, w)) != unit_vector(m, w) {
                return Some(ModuleViolation::UnitNotIdentity { m: w });
            }
        }
        for i in 0..a {
            for j in 0..a {
                for w in 0..m {
                    let lhs = self.act(algebra.basis_product(i, j), &unit_vector(m, w));
                    let rhs = self.act(&unit_vector(a, i), self.action.fiber(j, w));
                    if lhs != rhs {
                        return Some(ModuleViolation::NotAssociative { i, j, m: w });
                    }
                }
            }
        }
        None
    }
}

/// A ℚ-valued character, stored as its values on the basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Character {
    pub functional: Vec<Rational>,
}

impl Character {
    pub fn evaluate(&self, a: &[Rational]) -> Rational {
        crate::exactla::dot(&self.functional, a)
    }

    /// Unital, multiplicative and nonzero on `algebra`.
    pub fn is_character_of(&self, algebra: &Algebra) -> bool {
        let n = algebra.dim();
        if self.functional.len() != n || is_zero_vector(&self.functional) {
            return false;
        }
        if !self.evaluate(algebra.unit()).is_one() {
            return false;
        }
        (0..n).all(|i| {
            (0..n).all(|j| self.evaluate(algebra.basis_product(i, j)) == &self.functional[i] * &self.functional[j])
        })
    }
}

/// Minimal polynomial of a square matrix, lowest degree first, monic.
pub fn minimal_polynomial(m: &Matrix) -> Vec<Rational> {
    let d = m.rows();
    assert_eq!(d, m.cols());
    let flatten = |x: &Matrix| -> Vec<Rational> { x.to_rows().into_iter().flatten().collect() };
    let mut powers = vec![flatten(&Matrix::identity(d))];
    let mut current = Matrix::identity(d);
    loop {
        current = &current * m;
        let target = flatten(&current);
        let system = Matrix::from_columns(d * d, &powers);
        if let Some(c) = solve(&system, &target).particular {
            let mut poly: Vec<Rational> = c.into_iter().map(|x| -x).collect();
            poly.push(Rational::one());
            return poly;
        }
        powers.push(target);
    }
}

/// Every ℚ-valued character, sorted lexicographically by functional.
///
/// Works in `A / nilradical`: a complete set of primitive idempotents is
/// found by splitting the unit along the rational eigenvalues of
/// multiplication operators, and each one-dimensional factor yields a
/// character. Fails with [`AlgebraError::NotSplit`] if some operator has a
/// non-rational eigenvalue.
pub fn characters(algebra: &Algebra) -> Result<Vec<Character>, AlgebraError> {
    if algebra.is_degenerate() {
        return Ok(Vec::new());
    }
    let (semisimple, projection) = algebra.quotient(&algebra.nilradical());
    let s = semisimple.dim();
    let mut idempotents = vec![semisimple.unit().to_vec()];
    for b in 0..s {
        let mut refined = Vec::new();
        for e in idempotents {
            let corner = semisimple.left_mult(&e).image();
            let eb = semisimple.mul(&e, &unit_vector(s, b));
            let op_cols: Vec<Vec<Rational>> = corner
                .basis()
                .iter()
                .map(|v| corner.coordinates(&semisimple.mul(&eb, v)).expect("corner is an ideal"))
                .collect();
            let op = Matrix::from_columns(corner.dim(), &op_cols);
            let min_poly = minimal_polynomial(&op);
            let roots = rational_roots(&min_poly);
            if roots.len() + 1 != min_poly.len() {
                return Err(AlgebraError::NotSplit { element: b, min_poly });
            }
            if roots.len() == 1 {
                refined.push(e);
                continue;
            }
            for (j, lj) in roots.iter().enumerate() {
                // Lagrange idempotent Π_{l≠j} (eb − λₗe)/(λⱼ − λₗ) inside eA.
                let mut p = e.clone();
                for (l, ll) in roots.iter().enumerate() {
                    if l == j {
                        continue;
                    }
                    let factor = scale_vector(&(lj - ll).recip(), &sub_vectors(&eb, &scale_vector(ll, &e)));
                    p = semisimple.mul(&p, &factor);
                }
                refined.push(p);
            }
        }
        idempotents = refined;
    }
    let mut chars = Vec::with_capacity(idempotents.len());
    for e in &idempotents {
        let pivot = e.iter().position(|x| !x.is_zero()).expect("primitive idempotent is nonzero");
        let functional = (0..algebra.dim())
            .map(|i| {
                let image = semisimple.mul(e, &projection.column(i));
                &image[pivot] / &e[pivot]
            })
            .collect();
        let chi = Character { functional };
        if !chi.is_character_of(algebra) {
            // A corner of dimension > 1 that no basis element splits.
            return Err(AlgebraError::NotSplit { element: 0, min_poly: Vec::new() });
        }
        chars.push(chi);
    }
    chars.sort();
    chars.dedup();
    Ok(chars)
}

/// Every unit-preserving morphism `function_algebra(m) → function_algebra(k)`.
///
/// A morphism sends the indicator basis to pairwise orthogonal idempotents
/// summing to the unit; idempotents of ℚᵏ are 0/1 vectors, so the search
/// runs over 0/1 assignments with orthogonality pruning. Every survivor is
/// re-checked as an algebra morphism.
pub fn enumerate_unital_morphisms(m: usize, k: usize) -> Vec<AlgebraMorphism> {
    let source = function_algebra(m);
    let target = function_algebra(k);
    assert!(k < 63, "target too large to enumerate");
    let candidates: Vec<u64> = (0..(1u64 << k)).collect();
    let full = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut results = Vec::new();
    let mut chosen: Vec<u64> = Vec::with_capacity(m);

    fn search(
        m: usize,
        full: u64,
        candidates: &[u64],
        used: u64,
        chosen: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if chosen.len() == m {
            if used == full {
                out.push(chosen.clone());
            }
            return;
        }
        for &c in candidates {
            if c & used != 0 {
                continue;
            }
            chosen.push(c);
            search(m, full, candidates, used | c, chosen, out);
            chosen.pop();
        }
    }

    let mut assignments = Vec::new();
    search(m, full, &candidates, 0, &mut chosen, &mut assignments);
    for assignment in assignments {
        let matrix = Matrix::from_fn(k, m, |row, col| if assignment[col] & (1u64 << row) != 0 { q(1) } else { q(0) });
        let morphism = AlgebraMorphism::new(source.clone(), target.clone(), matrix)
            .expect("orthogonal idempotent decomposition of the unit is a morphism");
        results.push(morphism);
    }
    results
}

/// Pullback `α ↦ α∘φ` along `φ: {0..k} → {0..m}`, as a `k × m` matrix.
pub fn pullback_matrix(point_map: &[usize], m: usize) -> Matrix {
    Matrix::from_fn(point_map.len(), m, |row, col| if point_map[row] == col { q(1) } else { q(0) })
}
