//! Presheaves of vector spaces, algebras and modules over finite spaces.
//!
//! A presheaf stores one section space per open (by open index) and one
//! restriction matrix per inclusion `U ⊇ V`. Restrictions are completed and
//! checked for functoriality when the presheaf is built, so every later
//! operation can rely on them. Whether a presheaf is a sheaf is not a type
//! distinction; [`check_sheaf_condition`] produces a certificate.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{
    check_unital_morphism, direct_product, Algebra, AlgebraModule, ModuleViolation, MorphismViolation,
};
use crate::exactla::{kernel, zero_vector, Matrix, Rational, Subspace, Tensor3};
use crate::finspace::{ContinuousMap, FiniteSpace, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("expected {expected} section entries (one per open), found {found}")]
    WrongOpenCount { expected: usize, found: usize },
    #[error("restriction {from}→{to} is not an inclusion of opens")]
    NotAnInclusion { from: usize, to: usize },
    #[error("restriction {from}→{to} has shape {found:?}, expected {expected:?}")]
    RestrictionShape { from: usize, to: usize, expected: (usize, usize), found: (usize, usize) },
    #[error("no restriction given or derivable for {from}→{to}")]
    MissingRestriction { from: usize, to: usize },
    #[error("restriction {open}→{open} is not the identity")]
    IdentityRestriction { open: usize },
    #[error("restrictions are not functorial along {u}⊇{v}⊇{w}")]
    NotFunctorial { u: usize, v: usize, w: usize },
    #[error("sections over the empty open must be zero-dimensional, found dim {dim}")]
    NonZeroEmptySections { dim: usize },
    #[error("algebra over open {open} is invalid: {reason}")]
    InvalidAlgebra { open: usize, reason: String },
    #[error("restriction {from}→{to} is not a unital algebra morphism: {violation}")]
    RestrictionNotAlgebraMorphism { from: usize, to: usize, violation: MorphismViolation },
    #[error("module over open {open} is invalid: {violation}")]
    InvalidModule { open: usize, violation: ModuleViolation },
    #[error("module restriction {from}→{to} is not compatible with the action at (e{i}, w{j})")]
    ActionIncompatible { from: usize, to: usize, i: usize, j: usize },
    #[error("presheaves live over different spaces")]
    SpaceMismatch,
    #[error("morphism component over open {open} has shape {found:?}, expected {expected:?}")]
    ComponentShape { open: usize, expected: (usize, usize), found: (usize, usize) },
}

/// Restriction data keyed by `(from, to)` open indices.
pub type RestrictionMap = BTreeMap<(usize, usize), Matrix>;

/// A presheaf of finite-dimensional ℚ-vector spaces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearPresheaf {
    space: FiniteSpace,
    dims: Vec<usize>,
    restrictions: RestrictionMap,
}

impl LinearPresheaf {
    /// Builds a presheaf from section dimensions and any generating set of
    /// restrictions. Identities and maps into a zero-dimensional space are
    /// filled in; other missing maps are composed along chains of given
    /// ones. Functoriality is checked on every chain `U ⊇ V ⊇ W`.
    pub fn new(space: FiniteSpace, dims: Vec<usize>, given: RestrictionMap) -> Result<Self, SheafError> {
        let n = space.open_count();
        if dims.len() != n {
            return Err(SheafError::WrongOpenCount { expected: n, found: dims.len() });
        }
        let mut restrictions = RestrictionMap::new();
        for ((u, v), m) in given {
            if u >= n || v >= n || !space.open(v).is_subset_of(space.open(u)) {
                return Err(SheafError::NotAnInclusion { from: u, to: v });
            }
            let expected = (dims[v], dims[u]);
            if (m.rows(), m.cols()) != expected {
                return Err(SheafError::RestrictionShape { from: u, to: v, expected, found: (m.rows(), m.cols()) });
            }
            if u == v && m != Matrix::identity(dims[u]) {
                return Err(SheafError::IdentityRestriction { open: u });
            }
            restrictions.insert((u, v), m);
        }
        for u in 0..n {
            restrictions.entry((u, u)).or_insert_with(|| Matrix::identity(dims[u]));
        }
        let inclusions: Vec<(usize, usize)> = space.inclusions().collect();
        for &(u, v) in &inclusions {
            if dims[v] == 0 {
                restrictions.entry((u, v)).or_insert_with(|| Matrix::zeros(0, dims[u]));
            }
        }
        loop {
            let mut progress = false;
            for &(u, v) in &inclusions {
                if restrictions.contains_key(&(u, v)) {
                    continue;
                }
                let via = (0..n).find(|&w| {
                    w != u && w != v && restrictions.contains_key(&(u, w)) && restrictions.contains_key(&(w, v))
                });
                if let Some(w) = via {
                    let composed = &restrictions[&(w, v)] * &restrictions[&(u, w)];
                    restrictions.insert((u, v), composed);
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        if let Some(&(u, v)) = inclusions.iter().find(|k| !restrictions.contains_key(k)) {
            return Err(SheafError::MissingRestriction { from: u, to: v });
        }
        let presheaf = Self { space, dims, restrictions };
        presheaf.check_functorial()?;
        Ok(presheaf)
    }

    fn check_functorial(&self) -> Result<(), SheafError> {
        let n = self.space.open_count();
        for u in 0..n {
            for v in 0..n {
                if !self.space.open(v).is_subset_of(self.space.open(u)) {
                    continue;
                }
                for w in 0..n {
                    if !self.space.open(w).is_subset_of(self.space.open(v)) {
                        continue;
                    }
                    if &self.restrictions[&(v, w)] * &self.restrictions[&(u, v)] != self.restrictions[&(u, w)] {
                        return Err(SheafError::NotFunctorial { u, v, w });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn section_dim(&self, open: usize) -> usize {
        self.dims[open]
    }

    /// `r^U_V`; panics unless `V ⊆ U`.
    pub fn restriction(&self, from: usize, to: usize) -> &Matrix {
        self.restrictions
            .get(&(from, to))
            .unwrap_or_else(|| panic!("no restriction {from}→{to}: not an inclusion"))
    }

    pub fn restrictions(&self) -> &RestrictionMap {
        &self.restrictions
    }

    /// Germ maps `r^U_{U_x}` for every open `U ∋ x`, keyed by `U`.
    pub fn germ_maps(&self, x: usize) -> BTreeMap<usize, Matrix> {
        let ux = self.space.minimal_open(x);
        (0..self.space.open_count())
            .filter(|&u| self.space.open(u).contains(x))
            .map(|u| (u, self.restriction(u, ux).clone()))
            .collect()
    }

    /// Restrictions reindexed along `f`: `(f_*P)(V) = P(f⁻¹V)`.
    pub fn pushforward(&self, f: &ContinuousMap) -> LinearPresheaf {
        assert_eq!(f.domain(), &self.space, "map domain differs from the presheaf's space");
        let y = f.codomain();
        let pre: Vec<usize> = (0..y.open_count()).map(|v| f.preimage_open(v)).collect();
        let dims = pre.iter().map(|&u| self.dims[u]).collect();
        let restrictions = y
            .inclusions()
            .map(|(v, w)| ((v, w), self.restriction(pre[v], pre[w]).clone()))
            .collect();
        LinearPresheaf { space: y.clone(), dims, restrictions }
    }
}

fn block_offsets(dims: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    dims.iter()
        .map(|d| {
            let o = acc;
            acc += d;
            o
        })
        .collect()
}

/// Why an open cover fails the sheaf condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SheafFailure {
    /// Distinct sections agree on every cover member.
    NotInjective { kernel_dim: usize },
    /// Compatible families do not all come from sections.
    GluingFails { equalizer_dim: usize, section_dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafWitness {
    pub open: usize,
    pub cover: Vec<usize>,
    pub failure: SheafFailure,
}

impl fmt::Display for SheafWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            SheafFailure::NotInjective { kernel_dim } => write!(
                f,
                "open #{} with cover {:?}: restriction to the cover has a {}-dimensional kernel",
                self.open, self.cover, kernel_dim
            ),
            SheafFailure::GluingFails { equalizer_dim, section_dim } => write!(
                f,
                "open #{} with cover {:?}: gluing fails, section dim {} ≠ equalizer dim {}",
                self.open, self.cover, section_dim, equalizer_dim
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafCertificate {
    pub is_sheaf: bool,
    pub witnesses: Vec<SheafWitness>,
}

/// Irredundant covers of open `u` by proper nonempty subopens, lexicographic.
pub fn irredundant_covers(space: &FiniteSpace, u: usize) -> Vec<Vec<usize>> {
    let target = space.open(u);
    let candidates: Vec<usize> = (0..space.open_count())
        .filter(|&v| v != u && !space.open(v).is_empty() && space.open(v).is_subset_of(target))
        .collect();
    assert!(candidates.len() < 25, "too many subopens to enumerate covers");
    let mut covers = Vec::new();
    for mask in 1u32..(1u32 << candidates.len()) {
        let members: Vec<usize> = (0..candidates.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| candidates[i])
            .collect();
        let union = members.iter().fold(PointSet::EMPTY, |acc, &m| acc.union(space.open(m)));
        if union != target {
            continue;
        }
        let irredundant = members.iter().all(|&m| {
            let rest = members
                .iter()
                .filter(|&&o| o != m)
                .fold(PointSet::EMPTY, |acc, &o| acc.union(space.open(o)));
            !space.open(m).is_subset_of(rest)
        });
        if irredundant {
            covers.push(members);
        }
    }
    covers.sort();
    covers
}

/// Checks injectivity and gluing for every open and every irredundant cover.
///
/// Witnesses are ordered by open index, then cover.
pub fn check_sheaf_condition(p: &LinearPresheaf) -> SheafCertificate {
    let space = p.space();
    let mut witnesses = Vec::new();
    let empty = space.empty_index();
    if p.section_dim(empty) != 0 {
        witnesses.push(SheafWitness {
            open: empty,
            cover: Vec::new(),
            failure: SheafFailure::GluingFails { equalizer_dim: 0, section_dim: p.section_dim(empty) },
        });
    }
    for u in 0..space.open_count() {
        for cover in irredundant_covers(space, u) {
            if let Some(failure) = check_cover(p, u, &cover) {
                witnesses.push(SheafWitness { open: u, cover, failure });
            }
        }
    }
    SheafCertificate { is_sheaf: witnesses.is_empty(), witnesses }
}

fn check_cover(p: &LinearPresheaf, u: usize, cover: &[usize]) -> Option<SheafFailure> {
    let space = p.space();
    let dims: Vec<usize> = cover.iter().map(|&c| p.section_dim(c)).collect();
    let offsets = block_offsets(&dims);
    let total: usize = dims.iter().sum();
    let section_dim = p.section_dim(u);

    let blocks: Vec<Matrix> = cover.iter().map(|&c| p.restriction(u, c).clone()).collect();
    let stacked = stack_rows(&blocks, section_dim);
    let kernel_dim = section_dim - stacked.rank();
    if kernel_dim > 0 {
        return Some(SheafFailure::NotInjective { kernel_dim });
    }

    let mut constraint_rows: Vec<Vec<Rational>> = Vec::new();
    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            let overlap = space
                .index_of(space.open(cover[i]).intersection(space.open(cover[j])))
                .expect("intersections are open");
            let ri = p.restriction(cover[i], overlap);
            let rj = p.restriction(cover[j], overlap);
            for r in 0..p.section_dim(overlap) {
                let mut row = zero_vector(total);
                for c in 0..dims[i] {
                    row[offsets[i] + c] = ri[(r, c)].clone();
                }
                for c in 0..dims[j] {
                    row[offsets[j] + c] = -rj[(r, c)].clone();
                }
                constraint_rows.push(row);
            }
        }
    }
    let constraints = Matrix::from_rows(total, constraint_rows).expect("rows have total length");
    let equalizer_dim = kernel(&constraints).dim();
    (equalizer_dim != section_dim).then_some(SheafFailure::GluingFails { equalizer_dim, section_dim })
}

/// Sections over the minimal open of a point, with its germ maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stalk<T> {
    pub point: usize,
    pub open: usize,
    pub sections: T,
    pub germ_maps: BTreeMap<usize, Matrix>,
}

/// The sheaf of compatible stalk families attached to a presheaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSheafification {
    pub sheaf: LinearPresheaf,
    /// Per open `U`: compatible families inside `Π_{x∈U} P(U_x)`.
    pub families: Vec<Subspace>,
    /// Per open `U`: the canonical map `P(U) → P⁺(U)`.
    pub canonical: Vec<Matrix>,
}

impl LinearSheafification {
    /// Block offsets of the points of open `u` in its product coordinates.
    pub fn stalk_dims(p: &LinearPresheaf, u: usize) -> Vec<usize> {
        let space = p.space();
        space.open(u).points().map(|x| p.section_dim(space.minimal_open(x))).collect()
    }
}

/// `P⁺(U)` = families `(s_x)_{x∈U}` with `r^{U_x}_{U_y}(s_x) = s_y` whenever `y ∈ U_x`.
pub fn sheafify_linear(p: &LinearPresheaf) -> LinearSheafification {
    let space = p.space();
    let n = space.open_count();
    let mut families = Vec::with_capacity(n);
    let mut canonical = Vec::with_capacity(n);
    for u in 0..n {
        let points: Vec<usize> = space.open(u).points().collect();
        let dims = LinearSheafification::stalk_dims(p, u);
        let offsets = block_offsets(&dims);
        let total: usize = dims.iter().sum();
        let mut rows = Vec::new();
        for (ix, &x) in points.iter().enumerate() {
            let ux = space.minimal_open(x);
            for (iy, &y) in points.iter().enumerate() {
                if ix == iy || !space.open(ux).contains(y) {
                    continue;
                }
                let r = p.restriction(ux, space.minimal_open(y));
                for row in 0..dims[iy] {
                    let mut v = zero_vector(total);
                    for c in 0..dims[ix] {
                        v[offsets[ix] + c] = r[(row, c)].clone();
                    }
                    v[offsets[iy] + row] -= Rational::from_integer(1.into());
                    rows.push(v);
                }
            }
        }
        let family = kernel(&Matrix::from_rows(total, rows).expect("constraint rows"));
        let germs: Vec<Matrix> = points.iter().map(|&x| p.restriction(u, space.minimal_open(x)).clone()).collect();
        let stacked = stack_rows(&germs, p.section_dim(u));
        let canon_cols: Vec<Vec<Rational>> = stacked
            .columns()
            .iter()
            .map(|c| family.coordinates(c).expect("germ families are compatible"))
            .collect();
        canonical.push(Matrix::from_columns(family.dim(), &canon_cols));
        families.push(family);
    }
    let dims: Vec<usize> = families.iter().map(Subspace::dim).collect();
    let mut restrictions = RestrictionMap::new();
    for (u, v) in space.inclusions() {
        let truncation = truncation_matrix(p, u, v);
        let cols: Vec<Vec<Rational>> = families[u]
            .basis()
            .iter()
            .map(|b| families[v].coordinates(&truncation.mul_vec(b)).expect("truncation preserves compatibility"))
            .collect();
        restrictions.insert((u, v), Matrix::from_columns(dims[v], &cols));
    }
    let sheaf = LinearPresheaf::new(space.clone(), dims, restrictions).expect("truncation is functorial");
    LinearSheafification { sheaf, families, canonical }
}

/// Vertical stack of matrices sharing a column count.
pub(crate) fn stack_rows(blocks: &[Matrix], cols: usize) -> Matrix {
    let rows: Vec<Vec<Rational>> = blocks.iter().flat_map(Matrix::to_rows).collect();
    Matrix::from_rows(cols, rows).expect("blocks share a column count")
}

/// Product coordinates over `U` → product coordinates over `V ⊆ U`.
fn truncation_matrix(p: &LinearPresheaf, u: usize, v: usize) -> Matrix {
    let space = p.space();
    let du = LinearSheafification::stalk_dims(p, u);
    let dv = LinearSheafification::stalk_dims(p, v);
    let ou = block_offsets(&du);
    let ov = block_offsets(&dv);
    let mut m = Matrix::zeros(dv.iter().sum(), du.iter().sum());
    for (iv, x) in space.open(v).points().enumerate() {
        let iu = space.open(u).rank_of(x).expect("V ⊆ U");
        for c in 0..dv[iv] {
            m[(ov[iv] + c, ou[iu] + c)] = Rational::from_integer(1.into());
        }
    }
    m
}

/// A family of per-open linear maps between two presheaves over one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresheafMorphism {
    pub components: Vec<Matrix>,
}

/// A failed naturality square `target.r(U,V) ∘ h_U = h_V ∘ source.r(U,V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalityViolation {
    pub from: usize,
    pub to: usize,
    /// Basis element of the source sections over `from` where the square fails.
    pub basis_element: usize,
}

impl PresheafMorphism {
    pub fn new(source: &LinearPresheaf, target: &LinearPresheaf, components: Vec<Matrix>) -> Result<Self, SheafError> {
        if source.space() != target.space() {
            return Err(SheafError::SpaceMismatch);
        }
        let n = source.space().open_count();
        if components.len() != n {
            return Err(SheafError::WrongOpenCount { expected: n, found: components.len() });
        }
        for (open, c) in components.iter().enumerate() {
            let expected = (target.section_dim(open), source.section_dim(open));
            if (c.rows(), c.cols()) != expected {
                return Err(SheafError::ComponentShape { open, expected, found: (c.rows(), c.cols()) });
            }
        }
        Ok(Self { components })
    }

    pub fn identity(p: &LinearPresheaf) -> Self {
        Self { components: p.dims().iter().map(|&d| Matrix::identity(d)).collect() }
    }

    /// First failing naturality square, in `(from, to)` order.
    pub fn check_naturality(&self, source: &LinearPresheaf, target: &LinearPresheaf) -> Option<NaturalityViolation> {
        for (u, v) in source.space().inclusions() {
            let lhs = target.restriction(u, v) * &self.components[u];
            let rhs = &self.components[v] * source.restriction(u, v);
            if lhs != rhs {
                let basis_element = (0..lhs.cols()).find(|&j| lhs.column(j) != rhs.column(j)).unwrap_or(0);
                return Some(NaturalityViolation { from: u, to: v, basis_element });
            }
        }
        None
    }

    /// `other ∘ self`, componentwise.
    pub fn then(&self, other: &PresheafMorphism) -> PresheafMorphism {
        PresheafMorphism { components: self.components.iter().zip(&other.components).map(|(a, b)| b * a).collect() }
    }

    /// Reindexing along `f`: `(f_*h)_V = h_{f⁻¹V}`.
    pub fn pushforward(&self, f: &ContinuousMap) -> PresheafMorphism {
        let y = f.codomain();
        PresheafMorphism { components: (0..y.open_count()).map(|v| self.components[f.preimage_open(v)].clone()).collect() }
    }

    /// Induced map between sheafifications.
    pub fn sheafify(&self, source: &LinearSheafification, source_pre: &LinearPresheaf, target: &LinearSheafification) -> PresheafMorphism {
        let space = source_pre.space();
        let components = (0..space.open_count())
            .map(|u| {
                let blocks: Vec<Matrix> = space
                    .open(u)
                    .points()
                    .map(|x| self.components[space.minimal_open(x)].clone())
                    .collect();
                let stacked = Matrix::block_diagonal(&blocks);
                let cols: Vec<Vec<Rational>> = source.families[u]
                    .basis()
                    .iter()
                    .map(|b| target.families[u].coordinates(&stacked.mul_vec(b)).expect("stalkwise maps preserve compatibility"))
                    .collect();
                Matrix::from_columns(target.sheaf.section_dim(u), &cols)
            })
            .collect();
        PresheafMorphism { components }
    }
}

/// A presheaf of commutative unital algebras.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AlgebraPresheaf {
    linear: LinearPresheaf,
    algebras: Vec<Algebra>,
}

impl AlgebraPresheaf {
    pub fn new(space: FiniteSpace, algebras: Vec<Algebra>, given: RestrictionMap) -> Result<Self, SheafError> {
        let n = space.open_count();
        if algebras.len() != n {
            return Err(SheafError::WrongOpenCount { expected: n, found: algebras.len() });
        }
        let empty = space.empty_index();
        if algebras[empty].dim() != 0 {
            return Err(SheafError::NonZeroEmptySections { dim: algebras[empty].dim() });
        }
        for (open, a) in algebras.iter().enumerate() {
            if let Some(v) = a.validate() {
                return Err(SheafError::InvalidAlgebra { open, reason: v.to_string() });
            }
        }
        let dims = algebras.iter().map(Algebra::dim).collect();
        let linear = LinearPresheaf::new(space, dims, given)?;
        for (&(u, v), m) in linear.restrictions() {
            if let Some(violation) = check_unital_morphism(m, &algebras[u], &algebras[v]) {
                return Err(SheafError::RestrictionNotAlgebraMorphism { from: u, to: v, violation });
            }
        }
        Ok(Self { linear, algebras })
    }

    /// `U ↦ A` for every nonempty `U`, identity restrictions.
    pub fn constant(space: &FiniteSpace, algebra: &Algebra) -> Self {
        let algebras: Vec<Algebra> = space
            .opens()
            .iter()
            .map(|o| if o.is_empty() { Algebra::zero() } else { algebra.clone() })
            .collect();
        let given = space
            .inclusions()
            .filter(|&(_, v)| !space.open(v).is_empty())
            .map(|(u, v)| ((u, v), Matrix::identity(algebra.dim())))
            .collect();
        Self::new(space.clone(), algebras, given).expect("constant presheaf is valid")
    }

    /// `U ↦ ℚ^{|U|}` (functions on `U`) with restriction of functions.
    pub fn functional(space: &FiniteSpace) -> Self {
        let algebras = space.opens().iter().map(|o| crate::algebra::function_algebra(o.len())).collect();
        let given = space
            .inclusions()
            .map(|(u, v)| ((u, v), function_restriction(space.open(u), space.open(v))))
            .collect();
        Self::new(space.clone(), algebras, given).expect("functional presheaf is valid")
    }

    pub fn linear(&self) -> &LinearPresheaf {
        &self.linear
    }

    pub fn space(&self) -> &FiniteSpace {
        self.linear.space()
    }

    pub fn algebra(&self, open: usize) -> &Algebra {
        &self.algebras[open]
    }

    pub fn algebras(&self) -> &[Algebra] {
        &self.algebras
    }

    pub fn restriction(&self, from: usize, to: usize) -> &Matrix {
        self.linear.restriction(from, to)
    }

    pub fn stalk(&self, x: usize) -> Stalk<Algebra> {
        let open = self.space().minimal_open(x);
        Stalk { point: x, open, sections: self.algebras[open].clone(), germ_maps: self.linear.germ_maps(x) }
    }

    pub fn pushforward(&self, f: &ContinuousMap) -> AlgebraPresheaf {
        let linear = self.linear.pushforward(f);
        let algebras = (0..f.codomain().open_count()).map(|v| self.algebras[f.preimage_open(v)].clone()).collect();
        AlgebraPresheaf { linear, algebras }
    }

    pub fn sheafify(&self) -> AlgebraSheafification {
        let linear = sheafify_linear(&self.linear);
        let space = self.space();
        let algebras = (0..space.open_count())
            .map(|u| {
                let factors: Vec<Algebra> = space.open(u).points().map(|x| self.algebras[space.minimal_open(x)].clone()).collect();
                let (product, _) = direct_product(&factors);
                product.subalgebra(&linear.families[u]).0
            })
            .collect();
        let presheaf = AlgebraPresheaf { linear: linear.sheaf.clone(), algebras };
        AlgebraSheafification { presheaf, linear }
    }
}

/// Restriction of functions from `u` to `v ⊆ u` in indicator coordinates.
pub fn function_restriction(u: PointSet, v: PointSet) -> Matrix {
    let points: Vec<usize> = v.points().collect();
    Matrix::from_fn(v.len(), u.len(), |row, col| {
        if u.rank_of(points[row]) == Some(col) {
            Rational::from_integer(1.into())
        } else {
            Rational::from_integer(0.into())
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSheafification {
    pub presheaf: AlgebraPresheaf,
    pub linear: LinearSheafification,
}

/// A presheaf of modules over an [`AlgebraPresheaf`]. The base is not owned;
/// validation takes it as an argument.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModulePresheaf {
    linear: LinearPresheaf,
    modules: Vec<AlgebraModule>,
}

impl ModulePresheaf {
    pub fn new(base: &AlgebraPresheaf, modules: Vec<AlgebraModule>, given: RestrictionMap) -> Result<Self, SheafError> {
        let space = base.space();
        let n = space.open_count();
        if modules.len() != n {
            return Err(SheafError::WrongOpenCount { expected: n, found: modules.len() });
        }
        for (open, m) in modules.iter().enumerate() {
            if let Some(violation) = m.validate(base.algebra(open)) {
                return Err(SheafError::InvalidModule { open, violation });
            }
        }
        let dims = modules.iter().map(AlgebraModule::dim).collect();
        let linear = LinearPresheaf::new(space.clone(), dims, given)?;
        let presheaf = Self { linear, modules };
        if let Some((from, to, i, j)) = presheaf.action_violation(base) {
            return Err(SheafError::ActionIncompatible { from, to, i, j });
        }
        Ok(presheaf)
    }

    /// The zero module over every open.
    pub fn zero(base: &AlgebraPresheaf) -> Self {
        let modules = base.algebras().iter().map(AlgebraModule::zero).collect();
        Self::new(base, modules, RestrictionMap::new()).expect("zero module presheaf is valid")
    }

    /// `ρ(a·w) = r(a)·ρ(w)` on basis pairs.
    fn action_violation(&self, base: &AlgebraPresheaf) -> Option<(usize, usize, usize, usize)> {
        for (&(u, v), rho) in self.linear.restrictions() {
            let r = base.restriction(u, v);
            let (da, dm) = (base.algebra(u).dim(), self.modules[u].dim());
            for i in 0..da {
                let ra = r.column(i);
                for j in 0..dm {
                    let lhs = rho.mul_vec(self.modules[u].action().fiber(i, j));
                    let rhs = self.modules[v].act(&ra, &rho.column(j));
                    if lhs != rhs {
                        return Some((u, v, i, j));
                    }
                }
            }
        }
        None
    }

    pub fn linear(&self) -> &LinearPresheaf {
        &self.linear
    }

    pub fn module(&self, open: usize) -> &AlgebraModule {
        &self.modules[open]
    }

    pub fn modules(&self) -> &[AlgebraModule] {
        &self.modules
    }

    pub fn restriction(&self, from: usize, to: usize) -> &Matrix {
        self.linear.restriction(from, to)
    }

    pub fn stalk(&self, x: usize) -> Stalk<AlgebraModule> {
        let open = self.linear.space().minimal_open(x);
        Stalk { point: x, open, sections: self.modules[open].clone(), germ_maps: self.linear.germ_maps(x) }
    }

    pub fn pushforward(&self, f: &ContinuousMap) -> ModulePresheaf {
        let linear = self.linear.pushforward(f);
        let modules = (0..f.codomain().open_count()).map(|v| self.modules[f.preimage_open(v)].clone()).collect();
        ModulePresheaf { linear, modules }
    }

    /// Sheafification over the sheafified base; the action on families is stalkwise.
    pub fn sheafify(&self, base: &AlgebraPresheaf, base_plus: &AlgebraSheafification) -> ModuleSheafification {
        let linear = sheafify_linear(&self.linear);
        let space = base.space();
        let modules = (0..space.open_count())
            .map(|u| {
                let points: Vec<usize> = space.open(u).points().collect();
                let adims: Vec<usize> = points.iter().map(|&x| base.algebra(space.minimal_open(x)).dim()).collect();
                let mdims: Vec<usize> = points.iter().map(|&x| self.modules[space.minimal_open(x)].dim()).collect();
                let (ao, mo) = (block_offsets(&adims), block_offsets(&mdims));
                let mtotal: usize = mdims.iter().sum();
                let afam = &base_plus.linear.families[u];
                let mfam = &linear.families[u];
                let action = Tensor3::from_fn(afam.dim(), mfam.dim(), mfam.dim(), |i, j| {
                    let (a, w) = (&afam.basis()[i], &mfam.basis()[j]);
                    let mut out = zero_vector(mtotal);
                    for (k, &x) in points.iter().enumerate() {
                        let local = self.modules[space.minimal_open(x)]
                            .act(&a[ao[k]..ao[k] + adims[k]], &w[mo[k]..mo[k] + mdims[k]]);
                        out[mo[k]..mo[k] + mdims[k]].clone_from_slice(&local);
                    }
                    mfam.coordinates(&out).expect("stalkwise action preserves compatibility")
                });
                AlgebraModule::new_unchecked(action)
            })
            .collect();
        let presheaf = ModulePresheaf { linear: linear.sheaf.clone(), modules };
        ModuleSheafification { presheaf, linear }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSheafification {
    pub presheaf: ModulePresheaf,
    pub linear: LinearSheafification,
}

/// Sections over an arbitrary subset `K`, realized at its minimal open superset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSections {
    pub subset: PointSet,
    pub open: usize,
    pub dim: usize,
    /// `r^V_K` for every open `V ⊇ K`, keyed by `V`.
    pub maps: BTreeMap<usize, Matrix>,
}

pub fn sections_over_subset(p: &LinearPresheaf, subset: PointSet) -> SubsetSections {
    let space = p.space();
    let open = space.minimal_open_superset(subset);
    let maps = (0..space.open_count())
        .filter(|&v| subset.is_subset_of(space.open(v)))
        .map(|v| (v, p.restriction(v, open).clone()))
        .collect();
    SubsetSections { subset, open, dim: p.section_dim(open), maps }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("diagram over subset fails at open {open}, basis section {section}")]
pub struct SubsetSquareViolation {
    pub open: usize,
    pub section: usize,
}

/// `h_K` for a presheaf morphism `h: P → Q`, after checking
/// `h_K ∘ r^V_K = ρ^V_K ∘ h_V` for every open `V ⊇ K`.
pub fn morphism_over_subset(
    h: &PresheafMorphism,
    source: &LinearPresheaf,
    target: &LinearPresheaf,
    subset: PointSet,
) -> Result<Matrix, SubsetSquareViolation> {
    let space = source.space();
    let k = space.minimal_open_superset(subset);
    let hk = &h.components[k];
    for v in (0..space.open_count()).filter(|&v| subset.is_subset_of(space.open(v))) {
        let lhs = hk * source.restriction(v, k);
        let rhs = target.restriction(v, k) * &h.components[v];
        if lhs != rhs {
            let section = (0..lhs.cols()).find(|&j| lhs.column(j) != rhs.column(j)).unwrap_or(0);
            return Err(SubsetSquareViolation { open: v, section });
        }
    }
    Ok(hk.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{function_algebra, truncated_poly_algebra};
    use crate::exactla::q;

    fn set(points: &[usize]) -> PointSet {
        PointSet::from_points(points.iter().copied())
    }

    #[test]
    fn stalk_examples() {
        let d = FiniteSpace::discrete(2);
        let p = AlgebraPresheaf::functional(&d);
        let s = p.stalk(0);
        assert_eq!(d.open(s.open), set(&[0]));
        assert_eq!(s.sections.dim(), 1);

        let i = FiniteSpace::indiscrete(3);
        let p = AlgebraPresheaf::constant(&i, &truncated_poly_algebra(2));
        for x in 0..3 {
            assert_eq!(p.stalk(x).open, i.full_index());
        }

        let s = FiniteSpace::sierpinski();
        let p = AlgebraPresheaf::functional(&s);
        assert_eq!(p.stalk(1).sections, function_algebra(2));
        assert_eq!(p.stalk(0).sections, function_algebra(1));
        assert_eq!(p.stalk(1).germ_maps.len(), 1);
        assert_eq!(p.stalk(0).germ_maps.len(), 2);
    }

    #[test]
    fn sheaf_condition_examples() {
        let d = FiniteSpace::discrete(2);
        assert!(check_sheaf_condition(AlgebraPresheaf::functional(&d).linear()).is_sheaf);

        let constant = AlgebraPresheaf::constant(&d, &function_algebra(1));
        let cert = check_sheaf_condition(constant.linear());
        assert!(!cert.is_sheaf);
        let w = &cert.witnesses[0];
        assert_eq!(d.open(w.open), set(&[0, 1]));
        let cover: Vec<PointSet> = w.cover.iter().map(|&c| d.open(c)).collect();
        assert_eq!(cover, vec![set(&[0]), set(&[1])]);
        assert_eq!(w.failure, SheafFailure::GluingFails { equalizer_dim: 2, section_dim: 1 });

        let i = FiniteSpace::indiscrete(3);
        assert!(check_sheaf_condition(AlgebraPresheaf::constant(&i, &function_algebra(1)).linear()).is_sheaf);
    }

    #[test]
    fn sheafify_examples() {
        let d = FiniteSpace::discrete(2);
        let constant = AlgebraPresheaf::constant(&d, &function_algebra(1));
        let plus = constant.sheafify();
        assert_eq!(plus.presheaf.algebra(d.full_index()).dim(), 2);
        assert!(check_sheaf_condition(plus.presheaf.linear()).is_sheaf);
        assert_eq!(plus.presheaf.algebra(d.full_index()), &function_algebra(2));

        let s = FiniteSpace::sierpinski();
        let constant = AlgebraPresheaf::constant(&s, &function_algebra(1));
        let plus = constant.sheafify();
        assert_eq!(plus.presheaf.algebra(s.full_index()).dim(), 1);

        let sheaf = AlgebraPresheaf::functional(&FiniteSpace::discrete(3));
        let plus = sheaf.sheafify();
        for u in 0..8 {
            assert_eq!(plus.presheaf.algebra(u).dim(), sheaf.algebra(u).dim());
            assert!(plus.linear.canonical[u].is_injective());
        }
    }

    #[test]
    fn pushforward_examples() {
        let s = FiniteSpace::sierpinski();
        let p = AlgebraPresheaf::functional(&s);
        assert_eq!(p.pushforward(&ContinuousMap::identity(&s)), p);

        let x = FiniteSpace::discrete(2);
        let px = AlgebraPresheaf::functional(&x);
        let c = ContinuousMap::constant(&x, &s, 0);
        let pushed = px.pushforward(&c);
        for v in 0..s.open_count() {
            let expected = if s.open(v).contains(0) { 2 } else { 0 };
            assert_eq!(pushed.algebra(v).dim(), expected);
        }

        let pt = FiniteSpace::point();
        let collapse = ContinuousMap::constant(&x, &pt, 0);
        let pushed = px.pushforward(&collapse);
        assert_eq!(pushed.algebra(pt.full_index()), &function_algebra(2));
        assert!(check_sheaf_condition(pushed.linear()).is_sheaf);
    }

    #[test]
    fn sections_over_subset_examples() {
        let s = FiniteSpace::sierpinski();
        let p = AlgebraPresheaf::functional(&s);
        let k = sections_over_subset(p.linear(), set(&[0]));
        assert_eq!(k.open, s.index_of(set(&[0])).unwrap());
        assert_eq!(k.maps[&s.full_index()], *p.restriction(s.full_index(), k.open));

        let k = sections_over_subset(p.linear(), set(&[1]));
        assert_eq!(s.open(k.open), set(&[0, 1]));
        assert_eq!(k.dim, 2);
        assert_eq!(k.open, p.stalk(1).open);
    }

    #[test]
    fn morphism_over_subset_detects_unnatural_maps() {
        let d = FiniteSpace::discrete(2);
        let p = AlgebraPresheaf::functional(&d);
        let id = PresheafMorphism::identity(p.linear());
        for mask in 0..4u64 {
            let hk = morphism_over_subset(&id, p.linear(), p.linear(), PointSet(mask)).unwrap();
            assert_eq!(hk, Matrix::identity(PointSet(mask).len()));
        }
        let mut broken = id.clone();
        broken.components[d.full_index()] = Matrix::from_i64(2, 2, &[0, 1, 1, 0]);
        let err = morphism_over_subset(&broken, p.linear(), p.linear(), set(&[0])).unwrap_err();
        assert_eq!(err.open, d.full_index());
        assert!(broken.check_naturality(p.linear(), p.linear()).is_some());
    }

    #[test]
    fn restriction_completion_and_errors() {
        let d = FiniteSpace::discrete(2);
        let algebras = vec![Algebra::zero(), function_algebra(1), function_algebra(1), function_algebra(2)];
        let mut given = RestrictionMap::new();
        given.insert((3, 1), Matrix::from_i64(1, 2, &[1, 0]));
        given.insert((3, 2), Matrix::from_i64(1, 2, &[0, 1]));
        let p = AlgebraPresheaf::new(d.clone(), algebras.clone(), given.clone()).unwrap();
        assert_eq!(p.restriction(3, 0).rows(), 0);
        assert!(check_sheaf_condition(p.linear()).is_sheaf);

        let mut bad = given.clone();
        bad.insert((3, 1), Matrix::from_i64(1, 2, &[1, 1]));
        assert!(matches!(
            AlgebraPresheaf::new(d.clone(), algebras.clone(), bad),
            Err(SheafError::RestrictionNotAlgebraMorphism { .. })
        ));
        let mut missing = given.clone();
        missing.remove(&(3, 2));
        assert!(matches!(
            AlgebraPresheaf::new(d.clone(), algebras, missing),
            Err(SheafError::MissingRestriction { from: 3, to: 2 })
        ));
    }

    #[test]
    fn functoriality_is_enforced() {
        // chain {0,1} ⊇ {0} ⊇ ∅ plus an inconsistent direct map on a 3-open chain space
        let space = FiniteSpace::from_point_lists(2, &[vec![], vec![0], vec![0, 1]]).unwrap();
        let a = truncated_poly_algebra(2);
        let algebras = vec![Algebra::zero(), a.clone(), a.clone()];
        let mut given = RestrictionMap::new();
        given.insert((2, 1), Matrix::identity(2));
        assert!(AlgebraPresheaf::new(space.clone(), algebras.clone(), given.clone()).is_ok());
        // x ↦ 2x is a unital endomorphism of the dual numbers
        given.insert((2, 1), Matrix::from_i64(2, 2, &[1, 0, 0, 2]));
        let p = AlgebraPresheaf::new(space, algebras, given).unwrap();
        assert_eq!(p.restriction(2, 1)[(1, 1)], q(2));
    }

    #[test]
    fn module_presheaf_compatibility() {
        let s = FiniteSpace::sierpinski();
        let a = truncated_poly_algebra(2);
        let base = AlgebraPresheaf::constant(&s, &a);
        let modules: Vec<AlgebraModule> = base.algebras().iter().map(AlgebraModule::regular).collect();
        let mut given = RestrictionMap::new();
        given.insert((2, 1), Matrix::identity(2));
        let m = ModulePresheaf::new(&base, modules.clone(), given).unwrap();
        assert_eq!(m.stalk(1).sections.dim(), 2);

        let mut bad = RestrictionMap::new();
        bad.insert((2, 1), Matrix::from_i64(2, 2, &[0, 1, 1, 0]));
        assert!(matches!(ModulePresheaf::new(&base, modules, bad), Err(SheafError::ActionIncompatible { .. })));
    }
}
