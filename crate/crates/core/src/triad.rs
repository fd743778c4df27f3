//! Differential triads `(A, ∂, Ω)` over finite spaces.
//!
//! `∂` is stored per open as a matrix `A(U) → Ω(U)`. Construction only checks
//! shapes; [`DifferentialTriad::validate`] runs every axiom and reports all
//! findings, so deliberately broken triads can be built and inspected.

use std::fmt;

use thiserror::Error;

use crate::algebra::{check_unital_morphism, function_algebra, Algebra, AlgebraModule};
use crate::exactla::{is_zero_vector, sub_vectors, Matrix, Rational, Subspace};
use crate::finspace::{ContinuousMap, FiniteSpace};
use crate::sheaf::{
    check_sheaf_condition, function_restriction, AlgebraPresheaf, ModulePresheaf, SheafError, SheafWitness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriadError {
    #[error("algebra and module presheaves live over different spaces")]
    SpaceMismatch,
    #[error("expected one differential per open ({expected}), found {found}")]
    WrongOpenCount { expected: usize, found: usize },
    #[error("differential over open {open} has shape {found:?}, expected {expected:?}")]
    DifferentialShape { open: usize, expected: (usize, usize), found: (usize, usize) },
    #[error("embedding over open {open} is not an injective unital morphism into functions on the open: {reason}")]
    BadEmbedding { open: usize, reason: String },
    #[error("embeddings do not commute with restriction {from}→{to}")]
    EmbeddingNotNatural { from: usize, to: usize },
    #[error(transparent)]
    Sheaf(#[from] SheafError),
}

/// `∂(eᵢeⱼ) ≠ eᵢ∂(eⱼ) + eⱼ∂(eᵢ)`; `deviation` is the difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeibnizViolation {
    pub i: usize,
    pub j: usize,
    pub deviation: Vec<Rational>,
}

/// `L(a, b) = ∂(ab) − a·∂(b) − b·∂(a)`.
pub fn leibniz_deviation(
    d: &Matrix,
    algebra: &Algebra,
    module: &AlgebraModule,
    a: &[Rational],
    b: &[Rational],
) -> Vec<Rational> {
    let lhs = d.mul_vec(&algebra.mul(a, b));
    let ad_b = module.act(a, &d.mul_vec(b));
    let bd_a = module.act(b, &d.mul_vec(a));
    sub_vectors(&sub_vectors(&lhs, &ad_b), &bd_a)
}

/// Checks the Leibniz rule on every basis pair; the deviation is bilinear,
/// so this is equivalent to the rule on all pairs.
pub fn check_leibniz(d: &Matrix, algebra: &Algebra, module: &AlgebraModule) -> Result<(), LeibnizViolation> {
    let n = algebra.dim();
    assert_eq!((d.rows(), d.cols()), (module.dim(), n), "differential shape does not match algebra and module");
    for i in 0..n {
        for j in i..n {
            let ei = crate::exactla::unit_vector(n, i);
            let ej = crate::exactla::unit_vector(n, j);
            let deviation = leibniz_deviation(d, algebra, module, &ei, &ej);
            if !is_zero_vector(&deviation) {
                return Err(LeibnizViolation { i, j, deviation });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriadFinding {
    AlgebraNotSheaf(SheafWitness),
    ModuleNotSheaf(SheafWitness),
    Leibniz { open: usize, violation: LeibnizViolation },
    /// `ρ^U_V ∘ ∂_U ≠ ∂_V ∘ r^U_V`, first failing on `basis_element` of `A(U)`.
    Naturality { from: usize, to: usize, basis_element: usize },
    /// `∂(1) ≠ 0`; implied by a Leibniz failure but reported on its own.
    UnitNotClosed { open: usize },
}

impl fmt::Display for TriadFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AlgebraNotSheaf(w) => write!(f, "algebra presheaf is not a sheaf: {w}"),
            Self::ModuleNotSheaf(w) => write!(f, "module presheaf is not a sheaf: {w}"),
            Self::Leibniz { open, violation } => write!(
                f,
                "Leibniz rule fails over open #{open} at basis pair (e{}, e{})",
                violation.i, violation.j
            ),
            Self::Naturality { from, to, basis_element } => write!(
                f,
                "differential does not commute with restriction #{from}→#{to} (basis element e{basis_element})"
            ),
            Self::UnitNotClosed { open } => write!(f, "∂(1) ≠ 0 over open #{open}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TriadReport {
    pub findings: Vec<TriadFinding>,
}

impl TriadReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DifferentialTriad {
    algebra: AlgebraPresheaf,
    module: ModulePresheaf,
    differential: Vec<Matrix>,
}

impl DifferentialTriad {
    pub fn new(algebra: AlgebraPresheaf, module: ModulePresheaf, differential: Vec<Matrix>) -> Result<Self, TriadError> {
        if algebra.space() != module.linear().space() {
            return Err(TriadError::SpaceMismatch);
        }
        let n = algebra.space().open_count();
        if differential.len() != n {
            return Err(TriadError::WrongOpenCount { expected: n, found: differential.len() });
        }
        for (open, d) in differential.iter().enumerate() {
            let expected = (module.module(open).dim(), algebra.algebra(open).dim());
            if (d.rows(), d.cols()) != expected {
                return Err(TriadError::DifferentialShape { open, expected, found: (d.rows(), d.cols()) });
            }
        }
        Ok(Self { algebra, module, differential })
    }

    /// `Ω = 0`, `∂ = 0` over the given algebra presheaf.
    pub fn with_zero_module(algebra: AlgebraPresheaf) -> Self {
        let module = ModulePresheaf::zero(&algebra);
        let differential = algebra.algebras().iter().map(|a| Matrix::zeros(0, a.dim())).collect();
        Self { algebra, module, differential }
    }

    pub fn space(&self) -> &FiniteSpace {
        self.algebra.space()
    }

    pub fn algebra(&self) -> &AlgebraPresheaf {
        &self.algebra
    }

    pub fn module(&self) -> &ModulePresheaf {
        &self.module
    }

    pub fn differential(&self, open: usize) -> &Matrix {
        &self.differential[open]
    }

    pub fn differentials(&self) -> &[Matrix] {
        &self.differential
    }

    /// Runs the sheaf checks, Leibniz on every open, `∂(1) = 0`, and every
    /// naturality square; all findings are collected.
    pub fn validate(&self) -> TriadReport {
        let mut findings = Vec::new();
        let cert = check_sheaf_condition(self.algebra.linear());
        findings.extend(cert.witnesses.into_iter().map(TriadFinding::AlgebraNotSheaf));
        let cert = check_sheaf_condition(self.module.linear());
        findings.extend(cert.witnesses.into_iter().map(TriadFinding::ModuleNotSheaf));
        for open in 0..self.space().open_count() {
            let (a, m, d) = (self.algebra.algebra(open), self.module.module(open), &self.differential[open]);
            if let Err(violation) = check_leibniz(d, a, m) {
                findings.push(TriadFinding::Leibniz { open, violation });
            }
            if !is_zero_vector(&d.mul_vec(a.unit())) {
                findings.push(TriadFinding::UnitNotClosed { open });
            }
        }
        for (u, v) in self.space().inclusions() {
            let lhs = self.module.restriction(u, v) * &self.differential[u];
            let rhs = &self.differential[v] * self.algebra.restriction(u, v);
            if lhs != rhs {
                let basis_element = (0..lhs.cols()).find(|&j| lhs.column(j) != rhs.column(j)).unwrap_or(0);
                findings.push(TriadFinding::Naturality { from: u, to: v, basis_element });
            }
        }
        TriadReport { findings }
    }

    /// `f_*(A, ∂, Ω)` over the codomain of `f`.
    pub fn pushforward(&self, f: &ContinuousMap) -> DifferentialTriad {
        let differential = (0..f.codomain().open_count())
            .map(|v| self.differential[f.preimage_open(v)].clone())
            .collect();
        DifferentialTriad {
            algebra: self.algebra.pushforward(f),
            module: self.module.pushforward(f),
            differential,
        }
    }

    /// `ker ∂_U`, and whether it is exactly the constants `span{1}`.
    pub fn kernel_of_differential(&self, open: usize) -> DifferentialKernel {
        let kernel = self.differential[open].kernel();
        let constants = Subspace::span(self.algebra.algebra(open).dim(), [self.algebra.algebra(open).unit().to_vec()]);
        DifferentialKernel { constants_only: kernel == constants, kernel }
    }

    /// `ker ∂_U = span{1}` over every open.
    pub fn differential_kills_only_constants(&self) -> bool {
        (0..self.space().open_count()).all(|u| self.kernel_of_differential(u).constants_only)
    }

    /// `Im ∂_U` as a subspace of `Ω(U)`.
    pub fn image_of_differential(&self, open: usize) -> Subspace {
        self.differential[open].image()
    }

    /// Sections of `Ω(U)` whose germ at each point of `U` lies in the image
    /// of `∂` there. Contains the per-open image.
    pub fn local_image_of_differential(&self, open: usize) -> Subspace {
        let space = self.space();
        let mut acc = Subspace::full(self.module.module(open).dim());
        for x in space.open(open).points() {
            let ux = space.minimal_open(x);
            let germ = self.module.restriction(open, ux);
            let image = self.image_of_differential(ux);
            // preimage of `image` under `germ`
            let quo = crate::exactla::quotient_space(image.ambient_dim(), &image);
            let pre = (&quo.projection * germ).kernel();
            acc = acc.intersection(&pre);
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialKernel {
    pub kernel: Subspace,
    pub constants_only: bool,
}

/// A triad whose algebra sheaf is embedded in functions on the space.
///
/// `embeddings[U]` is an injective unital morphism `A(U) → ℚ^{|U|}` (points
/// of `U` in increasing order), compatible with restrictions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FunctionalTriad {
    triad: DifferentialTriad,
    embeddings: Vec<Matrix>,
}

impl FunctionalTriad {
    pub fn new(triad: DifferentialTriad, embeddings: Vec<Matrix>) -> Result<Self, TriadError> {
        let space = triad.space().clone();
        let n = space.open_count();
        if embeddings.len() != n {
            return Err(TriadError::WrongOpenCount { expected: n, found: embeddings.len() });
        }
        for (open, e) in embeddings.iter().enumerate() {
            let functions = function_algebra(space.open(open).len());
            if let Some(v) = check_unital_morphism(e, triad.algebra().algebra(open), &functions) {
                return Err(TriadError::BadEmbedding { open, reason: v.to_string() });
            }
            if !e.is_injective() {
                return Err(TriadError::BadEmbedding { open, reason: "not injective".into() });
            }
        }
        for (u, v) in space.inclusions() {
            let lhs = &embeddings[v] * triad.algebra().restriction(u, v);
            let rhs = &function_restriction(space.open(u), space.open(v)) * &embeddings[u];
            if lhs != rhs {
                return Err(TriadError::EmbeddingNotNatural { from: u, to: v });
            }
        }
        Ok(Self { triad, embeddings })
    }

    /// `U ↦ ℚ^{|U|}` with identity embeddings, `Ω = 0`, `∂ = 0`.
    pub fn full(space: &FiniteSpace) -> Self {
        let algebra = AlgebraPresheaf::functional(space);
        let embeddings = space.opens().iter().map(|o| Matrix::identity(o.len())).collect();
        Self { triad: DifferentialTriad::with_zero_module(algebra), embeddings }
    }

    pub fn triad(&self) -> &DifferentialTriad {
        &self.triad
    }

    pub fn into_triad(self) -> DifferentialTriad {
        self.triad
    }

    pub fn embedding(&self, open: usize) -> &Matrix {
        &self.embeddings[open]
    }

    pub fn embeddings(&self) -> &[Matrix] {
        &self.embeddings
    }

    pub fn omega_zero(&self) -> bool {
        self.triad.module().modules().iter().all(|m| m.dim() == 0)
    }

    /// `α ↦ α(x)` on `A(U)` for a point `x ∈ U`, as a row vector.
    pub fn evaluation(&self, open: usize, x: usize) -> Vec<Rational> {
        let row = self.triad.space().open(open).rank_of(x).expect("point lies in the open");
        self.embeddings[open].row(row).to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::truncated_poly_algebra;
    use crate::exactla::{q, unit_vector, Tensor3};
    use crate::sheaf::RestrictionMap;

    /// Free rank-1 module over ℚ[x]/(x³) with `∂(xʲ) = j·x^{j−1}dx`.
    fn naive_truncated_derivative() -> (Algebra, AlgebraModule, Matrix) {
        let a = truncated_poly_algebra(3);
        let m = AlgebraModule::regular(&a);
        let d = Matrix::from_i64(3, 3, &[0, 1, 0, 0, 0, 2, 0, 0, 0]);
        (a, m, d)
    }

    #[test]
    fn zero_differential_is_leibniz() {
        let a = truncated_poly_algebra(3);
        let m = AlgebraModule::regular(&a);
        assert!(check_leibniz(&Matrix::zeros(3, 3), &a, &m).is_ok());
    }

    #[test]
    fn naive_truncated_derivative_fails_at_x_x2() {
        let (a, m, d) = naive_truncated_derivative();
        let v = check_leibniz(&d, &a, &m).unwrap_err();
        assert_eq!((v.i, v.j), (1, 2));
        // 0 − (x·2x dx + x²·dx) = −3x² dx
        assert_eq!(v.deviation, vec![q(0), q(0), q(-3)]);
    }

    #[test]
    fn functional_triad_with_zero_module_is_valid() {
        for space in [FiniteSpace::discrete(2), FiniteSpace::sierpinski(), FiniteSpace::indiscrete(3)] {
            let t = FunctionalTriad::full(&space);
            assert!(t.omega_zero());
            assert!(t.triad().validate().is_valid());
        }
    }

    #[test]
    fn broken_square_is_reported() {
        // constant dual-number algebra over Sierpiński, Ω = A, ∂ = 0 except a
        // stray ∂ over {0} that breaks naturality but not Leibniz
        let s = FiniteSpace::sierpinski();
        let a = truncated_poly_algebra(2);
        let base = AlgebraPresheaf::constant(&s, &a);
        let modules: Vec<AlgebraModule> = base.algebras().iter().map(AlgebraModule::regular).collect();
        let mut given = RestrictionMap::new();
        given.insert((2, 1), Matrix::identity(2));
        let module = ModulePresheaf::new(&base, modules, given).unwrap();
        // x ↦ x is a derivation of the dual numbers into themselves: ∂(x·x) = 0 = 2x·x
        let d = Matrix::from_i64(2, 2, &[0, 0, 0, 1]);
        let differential = vec![Matrix::zeros(0, 0), d, Matrix::zeros(2, 2)];
        let t = DifferentialTriad::new(base, module, differential).unwrap();
        let report = t.validate();
        assert_eq!(report.findings, vec![TriadFinding::Naturality { from: 2, to: 1, basis_element: 1 }]);
    }

    #[test]
    fn kernel_of_zero_differential() {
        let t = FunctionalTriad::full(&FiniteSpace::discrete(2));
        let full = t.triad().space().full_index();
        let k = t.triad().kernel_of_differential(full);
        assert_eq!(k.kernel.dim(), 2);
        assert!(!k.constants_only);
        let single = t.triad().space().index_of(crate::finspace::PointSet::singleton(0)).unwrap();
        assert!(t.triad().kernel_of_differential(single).constants_only);
    }

    #[test]
    fn leibniz_module_action_shape() {
        let a = truncated_poly_algebra(2);
        let m = AlgebraModule::new(&a, Tensor3::from_fn(2, 1, 1, |i, _| if i == 0 { vec![q(1)] } else { vec![q(0)] })).unwrap();
        // ℚ as a module via x ↦ 0; ∂(x) = 1 is the evaluation derivation
        let d = Matrix::from_i64(1, 2, &[0, 1]);
        assert!(check_leibniz(&d, &a, &m).is_ok());
        let dev = leibniz_deviation(&d, &a, &m, &unit_vector(2, 1), &unit_vector(2, 1));
        assert!(is_zero_vector(&dev));
    }
}
