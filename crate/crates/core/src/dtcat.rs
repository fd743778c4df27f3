//! Morphisms of differential triads and the finite-scale content of the
//! category they form.
//!
//! A morphism `δ_X → δ_Y` is `(f, f_A, f_Ω)` where `f: X → Y` is continuous
//! and `f_A`, `f_Ω` are indexed by the opens `V` of `Y`, mapping
//! `A_Y(V) → A_X(f⁻¹V)` and `Ω_Y(V) → Ω_X(f⁻¹V)`.

use std::fmt;

use thiserror::Error;

use crate::algebra::{characters, check_unital_morphism, enumerate_unital_morphisms, function_algebra, Character, MorphismViolation};
use crate::exactla::{unit_vector, Matrix, Rational};
use crate::finspace::{all_point_maps, is_continuous, ContinuousMap, FiniteSpace};
use crate::sheaf::{AlgebraPresheaf, LinearPresheaf, PresheafMorphism};
use crate::triad::{DifferentialTriad, FunctionalTriad};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DtcatError {
    #[error("target triad has no function embeddings")]
    NotFunctional,
    #[error("point {point} is outside a space of {size} points")]
    PointOutOfRange { point: usize, size: usize },
    #[error("exhaustion needs {required} candidate maps, bound is {bound}")]
    BoundExceeded { required: u128, bound: u128 },
    #[error("space is not discrete")]
    NotDiscrete,
    #[error("algebra over open {open} is not a function algebra")]
    NotFunctionAlgebra { open: usize },
    #[error("morphisms are not composable")]
    NotComposable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriadMorphism {
    pub map: ContinuousMap,
    /// Indexed by opens of the codomain.
    pub fa: Vec<Matrix>,
    pub fomega: Vec<Matrix>,
}

impl TriadMorphism {
    pub fn algebra_morphism(&self) -> PresheafMorphism {
        PresheafMorphism { components: self.fa.clone() }
    }

    pub fn module_morphism(&self) -> PresheafMorphism {
        PresheafMorphism { components: self.fomega.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Component {
    Algebra,
    Module,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Algebra => "f_A",
            Self::Module => "f_Ω",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismFinding {
    SpaceMismatch,
    NotContinuous,
    WrongComponentCount { component: Component, expected: usize, found: usize },
    Shape { component: Component, open: usize, expected: (usize, usize), found: (usize, usize) },
    NotAlgebraMorphism { open: usize, violation: MorphismViolation },
    /// A component fails to commute with the restriction `from → to` of `Y`.
    Restriction { component: Component, from: usize, to: usize, basis_element: usize },
    /// `f_Ω(a·w) ≠ f_A(a)·f_Ω(w)` on basis elements.
    NotSemilinear { open: usize, algebra_element: usize, module_element: usize },
    /// `f_Ω ∘ ∂_Y ≠ ∂_X ∘ f_A` over the open.
    DifferentialSquare { open: usize, basis_element: usize, deviation: Vec<Rational> },
}

impl fmt::Display for MorphismFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SpaceMismatch => f.write_str("underlying map does not go between the triads' spaces"),
            Self::NotContinuous => f.write_str("underlying map is not continuous"),
            Self::WrongComponentCount { component, expected, found } => {
                write!(f, "{component} has {found} components, expected {expected}")
            }
            Self::Shape { component, open, expected, found } => {
                write!(f, "{component} over open #{open} has shape {found:?}, expected {expected:?}")
            }
            Self::NotAlgebraMorphism { open, violation } => {
                write!(f, "f_A over open #{open} is not a unital algebra morphism: {violation}")
            }
            Self::Restriction { component, from, to, basis_element } => write!(
                f,
                "{component} does not commute with restriction #{from}→#{to} (basis element e{basis_element})"
            ),
            Self::NotSemilinear { open, algebra_element, module_element } => write!(
                f,
                "f_Ω(a·w) ≠ f_A(a)·f_Ω(w) over open #{open} at (e{algebra_element}, w{module_element})"
            ),
            Self::DifferentialSquare { open, basis_element, .. } => {
                write!(f, "f_Ω∘∂_Y ≠ ∂_X∘f_A over open #{open} at basis element e{basis_element}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MorphismReport {
    pub findings: Vec<MorphismFinding>,
}

impl MorphismReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }
}

fn first_differing_column(a: &Matrix, b: &Matrix) -> Option<usize> {
    (0..a.cols()).find(|&j| a.column(j) != b.column(j))
}

/// Checks continuity, the algebra and module components, compatibility
/// with restrictions, semilinearity and the commuting square with `∂`.
/// Every violation is reported; shape errors stop the check early.
pub fn check_morphism(m: &TriadMorphism, source: &DifferentialTriad, target: &DifferentialTriad) -> MorphismReport {
    let mut findings = Vec::new();
    let (x, y) = (source.space(), target.space());
    if m.map.domain() != x || m.map.codomain() != y {
        return MorphismReport { findings: vec![MorphismFinding::SpaceMismatch] };
    }
    if is_continuous(m.map.values(), x, y).is_err() {
        return MorphismReport { findings: vec![MorphismFinding::NotContinuous] };
    }
    let n = y.open_count();
    for (component, list) in [(Component::Algebra, &m.fa), (Component::Module, &m.fomega)] {
        if list.len() != n {
            findings.push(MorphismFinding::WrongComponentCount { component, expected: n, found: list.len() });
        }
    }
    if !findings.is_empty() {
        return MorphismReport { findings };
    }
    let pre: Vec<usize> = (0..n).map(|v| m.map.preimage_open(v)).collect();
    for v in 0..n {
        let shapes = [
            (Component::Algebra, &m.fa[v], (source.algebra().algebra(pre[v]).dim(), target.algebra().algebra(v).dim())),
            (Component::Module, &m.fomega[v], (source.module().module(pre[v]).dim(), target.module().module(v).dim())),
        ];
        for (component, mat, expected) in shapes {
            if (mat.rows(), mat.cols()) != expected {
                findings.push(MorphismFinding::Shape { component, open: v, expected, found: (mat.rows(), mat.cols()) });
            }
        }
    }
    if !findings.is_empty() {
        return MorphismReport { findings };
    }

    for v in 0..n {
        if let Some(violation) =
            check_unital_morphism(&m.fa[v], target.algebra().algebra(v), source.algebra().algebra(pre[v]))
        {
            findings.push(MorphismFinding::NotAlgebraMorphism { open: v, violation });
        }
    }
    for (v, w) in y.inclusions() {
        let squares = [
            (Component::Algebra, &m.fa, source.algebra().restriction(pre[v], pre[w]), target.algebra().restriction(v, w)),
            (Component::Module, &m.fomega, source.module().restriction(pre[v], pre[w]), target.module().restriction(v, w)),
        ];
        for (component, comps, rx, ry) in squares {
            let lhs = rx * &comps[v];
            let rhs = &comps[w] * ry;
            if let Some(basis_element) = first_differing_column(&lhs, &rhs) {
                findings.push(MorphismFinding::Restriction { component, from: v, to: w, basis_element });
            }
        }
    }
    for v in 0..n {
        let (ay, my) = (target.algebra().algebra(v), target.module().module(v));
        let mx = source.module().module(pre[v]);
        for i in 0..ay.dim() {
            let fa_i = m.fa[v].column(i);
            for j in 0..my.dim() {
                let lhs = m.fomega[v].mul_vec(my.action().fiber(i, j));
                let rhs = mx.act(&fa_i, &m.fomega[v].column(j));
                if lhs != rhs {
                    findings.push(MorphismFinding::NotSemilinear { open: v, algebra_element: i, module_element: j });
                }
            }
        }
        let lhs = &m.fomega[v] * target.differential(v);
        let rhs = source.differential(pre[v]) * &m.fa[v];
        for j in 0..lhs.cols() {
            let (l, r) = (lhs.column(j), rhs.column(j));
            if l != r {
                let deviation = crate::exactla::sub_vectors(&l, &r);
                findings.push(MorphismFinding::DifferentialSquare { open: v, basis_element: j, deviation });
            }
        }
    }
    MorphismReport { findings }
}

pub fn identity_morphism(triad: &DifferentialTriad) -> TriadMorphism {
    let space = triad.space();
    TriadMorphism {
        map: ContinuousMap::identity(space),
        fa: triad.algebra().algebras().iter().map(|a| Matrix::identity(a.dim())).collect(),
        fomega: triad.module().modules().iter().map(|m| Matrix::identity(m.dim())).collect(),
    }
}

/// `ĝ ∘ f̂` for `f̂: δ_X → δ_Y` and `ĝ: δ_Y → δ_Z`:
/// `(g∘f)_W = f_{g⁻¹W} ∘ g_W` for both components.
pub fn compose(g: &TriadMorphism, f: &TriadMorphism) -> Result<TriadMorphism, DtcatError> {
    if f.map.codomain() != g.map.domain() {
        return Err(DtcatError::NotComposable);
    }
    let z = g.map.codomain();
    let pre: Vec<usize> = (0..z.open_count()).map(|w| g.map.preimage_open(w)).collect();
    Ok(TriadMorphism {
        map: f.map.then(&g.map),
        fa: pre.iter().enumerate().map(|(w, &v)| &f.fa[v] * &g.fa[w]).collect(),
        fomega: pre.iter().enumerate().map(|(w, &v)| &f.fomega[v] * &g.fomega[w]).collect(),
    })
}

/// The morphism over the constant map at `c`: `α ↦ α(c)·1` on opens
/// containing `c`, the zero map into the zero algebra elsewhere, `f_Ω = 0`.
pub fn constant_morphism(
    source: &DifferentialTriad,
    target: &FunctionalTriad,
    c: usize,
) -> Result<TriadMorphism, DtcatError> {
    let (x, y) = (source.space(), target.triad().space());
    if c >= y.point_count() {
        return Err(DtcatError::PointOutOfRange { point: c, size: y.point_count() });
    }
    let map = ContinuousMap::constant(x, y, c);
    let mut fa = Vec::with_capacity(y.open_count());
    let mut fomega = Vec::with_capacity(y.open_count());
    for v in 0..y.open_count() {
        let u = map.preimage_open(v);
        let unit = source.algebra().algebra(u).unit();
        let dim_v = target.triad().algebra().algebra(v).dim();
        let component = if y.open(v).contains(c) {
            let ev = target.evaluation(v, c);
            Matrix::from_fn(unit.len(), dim_v, |i, j| &unit[i] * &ev[j])
        } else {
            Matrix::zeros(0, dim_v)
        };
        fa.push(component);
        fomega.push(Matrix::zeros(source.module().module(u).dim(), target.triad().module().module(v).dim()));
    }
    Ok(TriadMorphism { map, fa, fomega })
}

/// Outcome of comparing the `f_Ω` components of two morphisms with equal `f_A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ImageAgreement {
    PreconditionNotMet { reason: String },
    AgreeEverywhere,
    /// Equal on `Im ∂_Y` over every open, different somewhere else.
    AgreeOnImageDifferGlobally { open: usize, module_element: usize },
    DisagreeOnImage { open: usize, image_vector: Vec<Rational> },
}

pub fn differential_agreement_on_image(
    m1: &TriadMorphism,
    m2: &TriadMorphism,
    target: &DifferentialTriad,
) -> ImageAgreement {
    if m1.map != m2.map {
        return ImageAgreement::PreconditionNotMet { reason: "morphisms lie over different maps".into() };
    }
    if m1.fa != m2.fa {
        return ImageAgreement::PreconditionNotMet { reason: "algebra components differ".into() };
    }
    for v in 0..target.space().open_count() {
        for b in target.image_of_differential(v).basis() {
            if m1.fomega[v].mul_vec(b) != m2.fomega[v].mul_vec(b) {
                return ImageAgreement::DisagreeOnImage { open: v, image_vector: b.clone() };
            }
        }
    }
    for v in 0..target.space().open_count() {
        if let Some(module_element) = first_differing_column(&m1.fomega[v], &m2.fomega[v]) {
            return ImageAgreement::AgreeOnImageDifferGlobally { open: v, module_element };
        }
    }
    ImageAgreement::AgreeEverywhere
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraUniqueness {
    PreconditionNotMet { reason: String },
    /// `ker ∂_X` is larger than the constants over this open; no claim is made.
    HypothesisNotMet { open: usize },
    Equal,
    /// The two algebra components differ although the hypothesis holds.
    Counterexample { open: usize, basis_element: usize },
}

/// With `ker ∂_X = constants`, the difference `f_A − f_A'` lands in the
/// constants (both squares with `∂` commute and `f_Ω` agrees) and kills the
/// unit; the check reproduces both steps and then compares directly.
pub fn algebra_component_uniqueness(
    m1: &TriadMorphism,
    m2: &TriadMorphism,
    source: &DifferentialTriad,
    target: &DifferentialTriad,
) -> AlgebraUniqueness {
    if m1.map != m2.map {
        return AlgebraUniqueness::PreconditionNotMet { reason: "morphisms lie over different maps".into() };
    }
    if m1.fomega != m2.fomega {
        return AlgebraUniqueness::PreconditionNotMet { reason: "module components differ".into() };
    }
    for u in 0..source.space().open_count() {
        if !source.kernel_of_differential(u).constants_only {
            return AlgebraUniqueness::HypothesisNotMet { open: u };
        }
    }
    for v in 0..m1.fa.len() {
        let u = m1.map.preimage_open(v);
        let diff = m1.fa[v].sub(&m2.fa[v]);
        let kernel = source.kernel_of_differential(u).kernel;
        for j in 0..diff.cols() {
            let column = diff.column(j);
            if !kernel.contains(&column) {
                return AlgebraUniqueness::PreconditionNotMet {
                    reason: format!("difference leaves ker ∂ over open #{u}; an input is not a morphism"),
                };
            }
        }
        if !crate::exactla::is_zero_vector(&diff.mul_vec(target.algebra().algebra(v).unit())) {
            return AlgebraUniqueness::PreconditionNotMet {
                reason: format!("an algebra component over open #{v} is not unital"),
            };
        }
        if let Some(basis_element) = first_differing_column(&m1.fa[v], &m2.fa[v]) {
            return AlgebraUniqueness::Counterexample { open: v, basis_element };
        }
    }
    AlgebraUniqueness::Equal
}

/// The character `α ↦ α(x)` on the stalk at `x`, checked against every
/// germ map: evaluating at `x` over any open `V ∋ x` factors through the stalk.
pub fn evaluation_character(t: &FunctionalTriad, x: usize) -> Character {
    let space = t.triad().space();
    let ux = space.minimal_open(x);
    let functional = t.evaluation(ux, x);
    for (v, germ) in t.triad().algebra().linear().germ_maps(x) {
        let through_stalk: Vec<Rational> =
            (0..germ.cols()).map(|j| crate::exactla::dot(&functional, &germ.column(j))).collect();
        assert_eq!(through_stalk, t.evaluation(v, x), "evaluation at {x} is not compatible with germ map from open {v}");
    }
    Character { functional }
}

/// `α ↦ α∘f` as a morphism `A_Y → f_*(A_X)` of full functional presheaves.
pub fn pullback_morphism(f: &ContinuousMap) -> PresheafMorphism {
    let (x, y) = (f.domain(), f.codomain());
    let components = (0..y.open_count())
        .map(|v| {
            let (ov, ou) = (y.open(v), x.open(f.preimage_open(v)));
            Matrix::from_fn(ou.len(), ov.len(), |row, col| {
                let point = ou.points().nth(row).expect("row indexes a point");
                if ov.rank_of(f.apply(point)) == Some(col) {
                    crate::exactla::q(1)
                } else {
                    crate::exactla::q(0)
                }
            })
        })
        .collect();
    PresheafMorphism { components }
}

fn require_function_algebras(p: &AlgebraPresheaf) -> Result<(), DtcatError> {
    for (open, o) in p.space().opens().iter().enumerate() {
        if p.algebra(open) != &function_algebra(o.len()) {
            return Err(DtcatError::NotFunctionAlgebra { open });
        }
    }
    Ok(())
}

/// All restriction-compatible families of unital morphisms
/// `A_Y(V) → A_X(f⁻¹V)` between full functional presheaves. Opens are
/// assigned by decreasing size; each choice is checked against every
/// already-assigned comparable open.
pub fn enumerate_presheaf_morphisms(
    f: &ContinuousMap,
    source: &AlgebraPresheaf,
    target: &AlgebraPresheaf,
) -> Result<Vec<PresheafMorphism>, DtcatError> {
    require_function_algebras(source)?;
    require_function_algebras(target)?;
    let y = f.codomain();
    let pushed = target.pushforward(f);
    let order = y.opens_by_decreasing_size();
    let candidates: Vec<Vec<Matrix>> = (0..y.open_count())
        .map(|v| {
            enumerate_unital_morphisms(source.algebra(v).dim(), pushed.algebra(v).dim())
                .into_iter()
                .map(|m| m.into_matrix())
                .collect()
        })
        .collect();

    fn compatible(v: usize, chosen: &[Option<Matrix>], y: &FiniteSpace, s: &LinearPresheaf, t: &LinearPresheaf) -> bool {
        let hv = chosen[v].as_ref().expect("assigned");
        chosen.iter().enumerate().all(|(u, hu)| {
            let Some(hu) = hu else { return true };
            let (ov, ou) = (y.open(v), y.open(u));
            if ov.is_subset_of(ou) {
                t.restriction(u, v) * hu == hv * s.restriction(u, v)
            } else if ou.is_subset_of(ov) {
                t.restriction(v, u) * hv == hu * s.restriction(v, u)
            } else {
                true
            }
        })
    }

    fn search(
        depth: usize,
        order: &[usize],
        candidates: &[Vec<Matrix>],
        chosen: &mut Vec<Option<Matrix>>,
        ctx: (&FiniteSpace, &LinearPresheaf, &LinearPresheaf),
        out: &mut Vec<PresheafMorphism>,
    ) {
        if depth == order.len() {
            let components = chosen.iter().map(|c| c.clone().expect("assigned")).collect();
            out.push(PresheafMorphism { components });
            return;
        }
        let v = order[depth];
        for c in &candidates[v] {
            chosen[v] = Some(c.clone());
            if compatible(v, chosen, ctx.0, ctx.1, ctx.2) {
                search(depth + 1, order, candidates, chosen, ctx, out);
            }
        }
        chosen[v] = None;
    }

    let mut out = Vec::new();
    let mut chosen = vec![None; y.open_count()];
    search(0, &order, &candidates, &mut chosen, (y, source.linear(), pushed.linear()), &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackMismatch {
    pub open: usize,
    pub point: usize,
    /// `ev_x ∘ h_V` as a row on `A_Y(V)`.
    pub found: Vec<Rational>,
    /// `ev_{f(x)}`.
    pub expected: Vec<Rational>,
    pub is_character: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackReport {
    /// Set when either space is not discrete; the result then asserts nothing.
    pub exploratory: bool,
    pub mismatches: Vec<PullbackMismatch>,
}

impl PullbackReport {
    pub fn is_forced(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks that `h` is the pullback along `f`. For every open `V` and point
/// `x ∈ f⁻¹V`, `ev_x ∘ h_V` is a character of `A_Y(V)` and must be
/// `ev_{f(x)}`; over function algebras that pins down every entry of `h_V`.
pub fn verify_pullback_forced(f: &ContinuousMap, h: &PresheafMorphism) -> PullbackReport {
    let (x, y) = (f.domain(), f.codomain());
    let exploratory = !(x.is_discrete() && y.is_discrete());
    let mut mismatches = Vec::new();
    for v in 0..y.open_count() {
        let ov = y.open(v);
        let ou = x.open(f.preimage_open(v));
        let chars = characters(&function_algebra(ov.len())).expect("function algebras split");
        for (row, point) in ou.points().enumerate() {
            let found = h.components[v].row(row).to_vec();
            let expected = unit_vector(ov.len(), ov.rank_of(f.apply(point)).expect("f maps f⁻¹V into V"));
            if found != expected {
                let is_character = chars.iter().any(|c| c.functional == found);
                mismatches.push(PullbackMismatch { open: v, point, found, expected, is_character });
            }
        }
    }
    PullbackReport { exploratory, mismatches }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullnessReport {
    pub map_count: usize,
    pub morphism_count: usize,
    /// Each point map carries exactly one morphism, and it is the pullback.
    pub bijective: bool,
    /// Point map table with the morphisms found over it.
    pub morphisms: Vec<(Vec<usize>, Vec<TriadMorphism>)>,
    /// Enumerated morphisms that failed [`check_morphism`]; must be empty.
    pub invalid: usize,
}

/// Enumerates every morphism between the full functional triads (`Ω = 0`)
/// on two discrete spaces and compares with the point maps.
pub fn fullness_check(x: &FiniteSpace, y: &FiniteSpace, bound: u128) -> Result<FullnessReport, DtcatError> {
    if !x.is_discrete() || !y.is_discrete() {
        return Err(DtcatError::NotDiscrete);
    }
    let required = (y.point_count() as u128).checked_pow(x.point_count() as u32).unwrap_or(u128::MAX);
    if required > bound {
        return Err(DtcatError::BoundExceeded { required, bound });
    }
    let (tx, ty) = (FunctionalTriad::full(x), FunctionalTriad::full(y));
    let mut morphisms = Vec::new();
    let mut bijective = true;
    let mut invalid = 0;
    let mut map_count = 0;
    for values in all_point_maps(x.point_count(), y.point_count()) {
        let Ok(map) = ContinuousMap::new(x.clone(), y.clone(), values.clone()) else { continue };
        map_count += 1;
        let families = enumerate_presheaf_morphisms(&map, ty.triad().algebra(), tx.triad().algebra())?;
        let pullback = pullback_morphism(&map);
        bijective &= families.len() == 1 && families[0] == pullback;
        let found: Vec<TriadMorphism> = families
            .into_iter()
            .map(|h| TriadMorphism {
                fomega: (0..y.open_count()).map(|_| Matrix::zeros(0, 0)).collect(),
                fa: h.components,
                map: map.clone(),
            })
            .collect();
        invalid += found.iter().filter(|m| !check_morphism(m, tx.triad(), ty.triad()).is_valid()).count();
        morphisms.push((values, found));
    }
    let morphism_count = morphisms.iter().map(|(_, m)| m.len()).sum();
    Ok(FullnessReport { map_count, morphism_count, bijective, morphisms, invalid })
}
