//! The JSON workspace format and its resolution into core objects.
//!
//! Entries live in named lists; every name is unique across the document and
//! may only refer to entries defined earlier. Rationals are strings.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use triadica_core::algebra::{
    direct_product, function_algebra, quadratic_algebra, square_zero_algebra, tensor_product, truncated_poly_algebra,
    Algebra, AlgebraModule,
};
use triadica_core::dtcat::{compose, constant_morphism, identity_morphism, TriadMorphism};
use triadica_core::exactla::{parse_rational, Matrix, Rational, Tensor3};
use triadica_core::finspace::{ContinuousMap, FiniteSpace, PointSet};
use triadica_core::kaehler::kaehler_presheaf;
use triadica_core::sheaf::{AlgebraPresheaf, ModulePresheaf, RestrictionMap};
use triadica_core::triad::{DifferentialTriad, FunctionalTriad};

pub const SCHEMA_VERSION: u32 = 1;

pub type MatrixEntries = Vec<Vec<String>>;
pub type TensorEntries = Vec<Vec<Vec<String>>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkspaceDocument {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spaces: Vec<Named<SpaceSpec>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub algebras: Vec<Named<AlgebraSpec>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub presheaves: Vec<Named<PresheafSpec>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triads: Vec<Named<TriadSpec>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub morphisms: Vec<Named<MorphismSpec>>,
}

impl WorkspaceDocument {
    pub fn empty() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            spaces: Vec::new(),
            algebras: Vec::new(),
            presheaves: Vec::new(),
            maps: Vec::new(),
            triads: Vec::new(),
            morphisms: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Named<T> {
    pub name: String,
    #[serde(flatten)]
    pub spec: T,
}

/// An open, by index into the space's list of opens or by its points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OpenRef {
    Index(usize),
    Points(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Discrete { points: usize },
    Indiscrete { points: usize },
    Sierpinski,
    Point,
    Explicit { points: usize, opens: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgebraSpec {
    FunctionAlgebra { k: usize },
    TruncatedPoly { order: usize },
    SquareZero { generators: usize },
    /// `ℚ[x]/(x² − c)`.
    Quadratic { c: String },
    /// `mult[i][j]` is the product `eᵢ·eⱼ` in the basis.
    StructureConstants { dim: usize, mult: TensorEntries, unit: Vec<String> },
    Tensor { left: String, right: String },
    Product { factors: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionEntry {
    pub open: OpenRef,
    pub algebra: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionEntry {
    pub from: OpenRef,
    pub to: OpenRef,
    pub matrix: MatrixEntries,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentEntry {
    pub open: OpenRef,
    pub matrix: MatrixEntries,
}

/// `action[i][j]` is `eᵢ·wⱼ` in the module basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleEntry {
    pub open: OpenRef,
    pub dim: usize,
    pub action: TensorEntries,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PresheafSpec {
    Constant { space: String, algebra: String },
    Functional { space: String },
    Explicit {
        space: String,
        sections: Vec<SectionEntry>,
        #[serde(default)]
        restrictions: Vec<RestrictionEntry>,
    },
    Sheafify { presheaf: String },
    Pushforward { presheaf: String, map: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub name: String,
    pub domain: String,
    pub codomain: String,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TriadSpec {
    Kaehler { presheaf: String },
    /// Functions on every open, `Ω = 0`.
    Functional { space: String },
    /// `Ω = 0` over a given algebra presheaf.
    Zero { presheaf: String },
    Explicit {
        presheaf: String,
        #[serde(default)]
        modules: Vec<ModuleEntry>,
        #[serde(default)]
        module_restrictions: Vec<RestrictionEntry>,
        #[serde(default)]
        differentials: Vec<ComponentEntry>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        embeddings: Option<Vec<ComponentEntry>>,
    },
    Pushforward { triad: String, map: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MorphismSpec {
    Explicit {
        source: String,
        target: String,
        map: String,
        #[serde(default)]
        fa: Vec<ComponentEntry>,
        #[serde(default)]
        fomega: Vec<ComponentEntry>,
    },
    Identity { triad: String },
    Constant { source: String, target: String, point: usize },
    /// `second ∘ first`.
    Compose { first: String, second: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WorkspaceError {
    #[error("parse error{}: {message}", position(.line, .column, .location))]
    Parse { message: String, line: Option<usize>, column: Option<usize>, location: Option<String> },
    #[error("unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    UnsupportedSchema { found: u32 },
    #[error("duplicate name '{name}' at {location}")]
    DuplicateName { name: String, location: String },
    #[error("unresolved reference to {expected} '{name}' at {location}")]
    UnresolvedReference { name: String, expected: &'static str, location: String },
    #[error("dimension mismatch at {location}: {message}")]
    DimensionMismatch { location: String, message: String },
    #[error("invalid object at {location}: {message}")]
    Invalid { location: String, message: String },
}

fn position(line: &Option<usize>, column: &Option<usize>, location: &Option<String>) -> String {
    match (line, column, location) {
        (Some(l), Some(c), _) => format!(" at line {l}, column {c}"),
        (_, _, Some(loc)) => format!(" at {loc}"),
        _ => String::new(),
    }
}

impl WorkspaceError {
    pub fn location(&self) -> String {
        match self {
            Self::Parse { line: Some(l), column: Some(c), .. } => format!("line {l}, column {c}"),
            Self::Parse { location: Some(loc), .. } => loc.clone(),
            Self::Parse { .. } | Self::UnsupportedSchema { .. } => "schema".into(),
            Self::DuplicateName { location, .. }
            | Self::UnresolvedReference { location, .. }
            | Self::DimensionMismatch { location, .. }
            | Self::Invalid { location, .. } => location.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedTriad {
    pub triad: DifferentialTriad,
    pub functional: Option<FunctionalTriad>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedMorphism {
    pub source: String,
    pub target: String,
    pub morphism: TriadMorphism,
}

/// A fully resolved workspace. Maps are keyed by entry name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Workspace {
    pub spaces: BTreeMap<String, FiniteSpace>,
    pub algebras: BTreeMap<String, Algebra>,
    pub presheaves: BTreeMap<String, AlgebraPresheaf>,
    pub maps: BTreeMap<String, ContinuousMap>,
    pub triads: BTreeMap<String, ResolvedTriad>,
    pub morphisms: BTreeMap<String, ResolvedMorphism>,
}

impl Workspace {
    /// Which section a name belongs to.
    pub fn kind_of(&self, name: &str) -> Option<&'static str> {
        if self.spaces.contains_key(name) {
            Some("space")
        } else if self.algebras.contains_key(name) {
            Some("algebra")
        } else if self.presheaves.contains_key(name) {
            Some("presheaf")
        } else if self.maps.contains_key(name) {
            Some("map")
        } else if self.triads.contains_key(name) {
            Some("triad")
        } else if self.morphisms.contains_key(name) {
            Some("morphism")
        } else {
            None
        }
    }
}

pub fn parse_document(text: &str) -> Result<WorkspaceDocument, WorkspaceError> {
    let doc: WorkspaceDocument = serde_json::from_str(text).map_err(|e| WorkspaceError::Parse {
        message: e.to_string(),
        line: Some(e.line()),
        column: Some(e.column()),
        location: None,
    })?;
    if doc.schema != SCHEMA_VERSION {
        return Err(WorkspaceError::UnsupportedSchema { found: doc.schema });
    }
    Ok(doc)
}

/// Parses and resolves a workspace, collecting every error found.
pub fn parse_workspace(text: &str) -> Result<Workspace, Vec<WorkspaceError>> {
    let doc = parse_document(text).map_err(|e| vec![e])?;
    resolve(&doc)
}

/// Why a lookup failed: a real error, or a reference to an entry that
/// already failed (reported once, at its definition).
enum Miss {
    Error(WorkspaceError),
    Poisoned,
}

impl From<WorkspaceError> for Miss {
    fn from(e: WorkspaceError) -> Self {
        Miss::Error(e)
    }
}

type Step<T> = Result<T, Miss>;

struct Resolver {
    ws: Workspace,
    failed: BTreeSet<String>,
    errors: Vec<WorkspaceError>,
}

fn invalid(location: &str, message: impl ToString) -> Miss {
    Miss::Error(WorkspaceError::Invalid { location: location.to_string(), message: message.to_string() })
}

fn mismatch(location: &str, message: impl ToString) -> Miss {
    Miss::Error(WorkspaceError::DimensionMismatch { location: location.to_string(), message: message.to_string() })
}

pub fn parse_rational_at(text: &str, location: &str) -> Result<Rational, WorkspaceError> {
    parse_rational(text).map_err(|e| WorkspaceError::Parse {
        message: format!("invalid rational '{text}': {e}"),
        line: None,
        column: None,
        location: Some(location.to_string()),
    })
}

fn parse_vector(entries: &[String], len: usize, location: &str) -> Step<Vec<Rational>> {
    if entries.len() != len {
        return Err(mismatch(location, format!("expected {len} entries, found {}", entries.len())));
    }
    entries
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational_at(s, &format!("{location}[{i}]")).map_err(Miss::from))
        .collect()
}

/// A `rows × cols` matrix; an empty list stands for any matrix with no rows.
pub fn parse_matrix(entries: &MatrixEntries, rows: usize, cols: usize, location: &str) -> Result<Matrix, WorkspaceError> {
    match parse_matrix_step(entries, rows, cols, location) {
        Ok(m) => Ok(m),
        Err(Miss::Error(e)) => Err(e),
        Err(Miss::Poisoned) => unreachable!("matrices do not reference entries"),
    }
}

fn parse_matrix_step(entries: &MatrixEntries, rows: usize, cols: usize, location: &str) -> Step<Matrix> {
    if entries.len() != rows {
        return Err(mismatch(location, format!("expected {rows}×{cols} matrix, found {} rows", entries.len())));
    }
    let parsed: Vec<Vec<Rational>> = entries
        .iter()
        .enumerate()
        .map(|(i, row)| parse_vector(row, cols, &format!("{location}[{i}]")))
        .collect::<Result<_, _>>()?;
    Ok(Matrix::from_rows(cols, parsed).expect("row lengths checked"))
}

fn parse_tensor(entries: &TensorEntries, dims: (usize, usize, usize), location: &str) -> Step<Tensor3> {
    let (d0, d1, d2) = dims;
    if entries.len() != d0 {
        return Err(mismatch(location, format!("expected {d0} slices, found {}", entries.len())));
    }
    let mut t = Tensor3::zeros(d0, d1, d2);
    for (i, slice) in entries.iter().enumerate() {
        if slice.len() != d1 {
            return Err(mismatch(&format!("{location}[{i}]"), format!("expected {d1} vectors, found {}", slice.len())));
        }
        for (j, v) in slice.iter().enumerate() {
            t.set_fiber(i, j, parse_vector(v, d2, &format!("{location}[{i}][{j}]"))?);
        }
    }
    Ok(t)
}

impl Resolver {
    fn lookup<'a, T>(
        &self,
        map: &'a BTreeMap<String, T>,
        name: &str,
        expected: &'static str,
        location: &str,
    ) -> Step<&'a T> {
        if let Some(v) = map.get(name) {
            return Ok(v);
        }
        if self.failed.contains(name) {
            return Err(Miss::Poisoned);
        }
        Err(Miss::Error(WorkspaceError::UnresolvedReference {
            name: name.to_string(),
            expected,
            location: location.to_string(),
        }))
    }

    fn space(&self, name: &str, loc: &str) -> Step<FiniteSpace> {
        self.lookup(&self.ws.spaces, name, "space", loc).cloned()
    }

    fn algebra(&self, name: &str, loc: &str) -> Step<Algebra> {
        self.lookup(&self.ws.algebras, name, "algebra", loc).cloned()
    }

    fn presheaf(&self, name: &str, loc: &str) -> Step<AlgebraPresheaf> {
        self.lookup(&self.ws.presheaves, name, "presheaf", loc).cloned()
    }

    fn map(&self, name: &str, loc: &str) -> Step<ContinuousMap> {
        self.lookup(&self.ws.maps, name, "map", loc).cloned()
    }

    fn triad(&self, name: &str, loc: &str) -> Step<ResolvedTriad> {
        self.lookup(&self.ws.triads, name, "triad", loc).cloned()
    }

    fn morphism(&self, name: &str, loc: &str) -> Step<ResolvedMorphism> {
        self.lookup(&self.ws.morphisms, name, "morphism", loc).cloned()
    }

    fn record<T>(&mut self, name: &str, result: Step<T>, insert: impl FnOnce(&mut Workspace, T)) {
        match result {
            Ok(v) => insert(&mut self.ws, v),
            Err(miss) => {
                if let Miss::Error(e) = miss {
                    self.errors.push(e);
                }
                self.failed.insert(name.to_string());
            }
        }
    }
}

fn resolve_open(space: &FiniteSpace, open: &OpenRef, location: &str) -> Step<usize> {
    match open {
        OpenRef::Index(i) if *i < space.open_count() => Ok(*i),
        OpenRef::Index(i) => Err(invalid(location, format!("open index {i} out of range ({} opens)", space.open_count()))),
        OpenRef::Points(points) => {
            if let Some(p) = points.iter().find(|&&p| p >= space.point_count()) {
                return Err(invalid(location, format!("point {p} outside the space")));
            }
            space
                .index_of(PointSet::from_points(points.iter().copied()))
                .ok_or_else(|| invalid(location, format!("{points:?} is not an open set")))
        }
    }
}

/// Matrices per open; missing entries are allowed only for matrices with no entries.
fn components(
    space: &FiniteSpace,
    entries: &[ComponentEntry],
    shape: impl Fn(usize) -> (usize, usize),
    location: &str,
) -> Step<Vec<Matrix>> {
    let mut out: Vec<Option<Matrix>> = vec![None; space.open_count()];
    for (i, e) in entries.iter().enumerate() {
        let loc = format!("{location}[{i}]");
        let open = resolve_open(space, &e.open, &format!("{loc}.open"))?;
        if out[open].is_some() {
            return Err(invalid(&loc, format!("second component for open #{open}")));
        }
        let (r, c) = shape(open);
        out[open] = Some(parse_matrix_step(&e.matrix, r, c, &format!("{loc}.matrix"))?);
    }
    out.into_iter()
        .enumerate()
        .map(|(open, m)| match m {
            Some(m) => Ok(m),
            None => {
                let (r, c) = shape(open);
                if r * c == 0 {
                    Ok(Matrix::zeros(r, c))
                } else {
                    Err(mismatch(location, format!("missing {r}×{c} component for open #{open}")))
                }
            }
        })
        .collect()
}

fn restrictions(
    space: &FiniteSpace,
    entries: &[RestrictionEntry],
    dims: &[usize],
    location: &str,
) -> Step<RestrictionMap> {
    let mut out = RestrictionMap::new();
    for (i, e) in entries.iter().enumerate() {
        let loc = format!("{location}[{i}]");
        let from = resolve_open(space, &e.from, &format!("{loc}.from"))?;
        let to = resolve_open(space, &e.to, &format!("{loc}.to"))?;
        let m = parse_matrix_step(&e.matrix, dims[to], dims[from], &format!("{loc}.matrix"))?;
        if out.insert((from, to), m).is_some() {
            return Err(invalid(&loc, format!("second restriction #{from}→#{to}")));
        }
    }
    Ok(out)
}

fn build_space(spec: &SpaceSpec, loc: &str) -> Step<FiniteSpace> {
    let check = |n: usize| {
        if n == 0 || n > triadica_core::finspace::MAX_POINTS {
            Err(invalid(loc, format!("point count {n} outside 1..={}", triadica_core::finspace::MAX_POINTS)))
        } else {
            Ok(n)
        }
    };
    Ok(match spec {
        SpaceSpec::Discrete { points } => {
            if *points > 12 {
                return Err(invalid(loc, "discrete spaces are limited to 12 points"));
            }
            FiniteSpace::discrete(check(*points)?)
        }
        SpaceSpec::Indiscrete { points } => FiniteSpace::indiscrete(check(*points)?),
        SpaceSpec::Sierpinski => FiniteSpace::sierpinski(),
        SpaceSpec::Point => FiniteSpace::point(),
        SpaceSpec::Explicit { points, opens } => {
            FiniteSpace::from_point_lists(check(*points)?, opens).map_err(|e| invalid(loc, e))?
        }
    })
}

impl Resolver {
    fn build_algebra(&self, spec: &AlgebraSpec, loc: &str) -> Step<Algebra> {
        Ok(match spec {
            AlgebraSpec::FunctionAlgebra { k } => function_algebra(*k),
            AlgebraSpec::TruncatedPoly { order } if *order >= 1 => truncated_poly_algebra(*order),
            AlgebraSpec::TruncatedPoly { .. } => return Err(invalid(loc, "order must be at least 1")),
            AlgebraSpec::SquareZero { generators } => square_zero_algebra(*generators),
            AlgebraSpec::Quadratic { c } => quadratic_algebra(parse_rational_at(c, &format!("{loc}.c"))?),
            AlgebraSpec::StructureConstants { dim, mult, unit } => {
                let mult = parse_tensor(mult, (*dim, *dim, *dim), &format!("{loc}.mult"))?;
                let unit = parse_vector(unit, *dim, &format!("{loc}.unit"))?;
                Algebra::new(mult, unit).map_err(|e| invalid(loc, e))?
            }
            AlgebraSpec::Tensor { left, right } => {
                let l = self.algebra(left, &format!("{loc}.left"))?;
                let r = self.algebra(right, &format!("{loc}.right"))?;
                tensor_product(&l, &r).algebra
            }
            AlgebraSpec::Product { factors } => {
                let fs: Vec<Algebra> = factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| self.algebra(f, &format!("{loc}.factors[{i}]")))
                    .collect::<Result<_, _>>()?;
                direct_product(&fs).0
            }
        })
    }

    fn build_presheaf(&self, spec: &PresheafSpec, loc: &str) -> Step<AlgebraPresheaf> {
        Ok(match spec {
            PresheafSpec::Constant { space, algebra } => {
                let s = self.space(space, &format!("{loc}.space"))?;
                let a = self.algebra(algebra, &format!("{loc}.algebra"))?;
                AlgebraPresheaf::constant(&s, &a)
            }
            PresheafSpec::Functional { space } => AlgebraPresheaf::functional(&self.space(space, &format!("{loc}.space"))?),
            PresheafSpec::Explicit { space, sections, restrictions: given } => {
                let s = self.space(space, &format!("{loc}.space"))?;
                let mut algebras: Vec<Option<Algebra>> = vec![None; s.open_count()];
                for (i, e) in sections.iter().enumerate() {
                    let l = format!("{loc}.sections[{i}]");
                    let open = resolve_open(&s, &e.open, &format!("{l}.open"))?;
                    if algebras[open].is_some() {
                        return Err(invalid(&l, format!("second algebra for open #{open}")));
                    }
                    algebras[open] = Some(self.algebra(&e.algebra, &format!("{l}.algebra"))?);
                }
                let algebras: Vec<Algebra> = algebras
                    .into_iter()
                    .enumerate()
                    .map(|(open, a)| match a {
                        Some(a) => Ok(a),
                        None if s.open(open).is_empty() => Ok(Algebra::zero()),
                        None => Err(invalid(&format!("{loc}.sections"), format!("no algebra for open #{open}"))),
                    })
                    .collect::<Result<_, _>>()?;
                let dims: Vec<usize> = algebras.iter().map(Algebra::dim).collect();
                let given = restrictions(&s, given, &dims, &format!("{loc}.restrictions"))?;
                AlgebraPresheaf::new(s, algebras, given).map_err(|e| invalid(loc, e))?
            }
            PresheafSpec::Sheafify { presheaf } => self.presheaf(presheaf, &format!("{loc}.presheaf"))?.sheafify().presheaf,
            PresheafSpec::Pushforward { presheaf, map } => {
                let p = self.presheaf(presheaf, &format!("{loc}.presheaf"))?;
                let f = self.map(map, &format!("{loc}.map"))?;
                if f.domain() != p.space() {
                    return Err(invalid(&format!("{loc}.map"), "map domain is not the presheaf's space"));
                }
                p.pushforward(&f)
            }
        })
    }

    fn build_map(&self, spec: &MapSpec, loc: &str) -> Step<ContinuousMap> {
        let x = self.space(&spec.domain, &format!("{loc}.domain"))?;
        let y = self.space(&spec.codomain, &format!("{loc}.codomain"))?;
        ContinuousMap::new(x, y, spec.values.clone()).map_err(|e| invalid(loc, e))
    }

    fn build_triad(&self, spec: &TriadSpec, loc: &str) -> Step<ResolvedTriad> {
        Ok(match spec {
            TriadSpec::Kaehler { presheaf } => {
                let p = self.presheaf(presheaf, &format!("{loc}.presheaf"))?;
                let kt = kaehler_presheaf(&p).map_err(|e| invalid(loc, e))?;
                ResolvedTriad { triad: kt.triad, functional: None }
            }
            TriadSpec::Functional { space } => {
                let t = FunctionalTriad::full(&self.space(space, &format!("{loc}.space"))?);
                ResolvedTriad { triad: t.triad().clone(), functional: Some(t) }
            }
            TriadSpec::Zero { presheaf } => {
                let p = self.presheaf(presheaf, &format!("{loc}.presheaf"))?;
                ResolvedTriad { triad: DifferentialTriad::with_zero_module(p), functional: None }
            }
            TriadSpec::Explicit { presheaf, modules, module_restrictions, differentials, embeddings } => {
                let p = self.presheaf(presheaf, &format!("{loc}.presheaf"))?;
                let s = p.space().clone();
                let mut ms: Vec<Option<AlgebraModule>> = vec![None; s.open_count()];
                for (i, e) in modules.iter().enumerate() {
                    let l = format!("{loc}.modules[{i}]");
                    let open = resolve_open(&s, &e.open, &format!("{l}.open"))?;
                    if ms[open].is_some() {
                        return Err(invalid(&l, format!("second module for open #{open}")));
                    }
                    let da = p.algebra(open).dim();
                    let action = parse_tensor(&e.action, (da, e.dim, e.dim), &format!("{l}.action"))?;
                    ms[open] = Some(AlgebraModule::new_unchecked(action));
                }
                let ms: Vec<AlgebraModule> = ms
                    .into_iter()
                    .enumerate()
                    .map(|(open, m)| {
                        m.unwrap_or_else(|| AlgebraModule::new_unchecked(Tensor3::zeros(p.algebra(open).dim(), 0, 0)))
                    })
                    .collect();
                let mdims: Vec<usize> = ms.iter().map(AlgebraModule::dim).collect();
                let given = restrictions(&s, module_restrictions, &mdims, &format!("{loc}.module_restrictions"))?;
                let omega = ModulePresheaf::new(&p, ms, given).map_err(|e| invalid(loc, e))?;
                let ds = components(&s, differentials, |u| (mdims[u], p.algebra(u).dim()), &format!("{loc}.differentials"))?;
                let triad = DifferentialTriad::new(p.clone(), omega, ds).map_err(|e| invalid(loc, e))?;
                let functional = match embeddings {
                    None => None,
                    Some(es) => {
                        let es = components(&s, es, |u| (s.open(u).len(), p.algebra(u).dim()), &format!("{loc}.embeddings"))?;
                        Some(FunctionalTriad::new(triad.clone(), es).map_err(|e| invalid(loc, e))?)
                    }
                };
                ResolvedTriad { triad, functional }
            }
            TriadSpec::Pushforward { triad, map } => {
                let t = self.triad(triad, &format!("{loc}.triad"))?;
                let f = self.map(map, &format!("{loc}.map"))?;
                if f.domain() != t.triad.space() {
                    return Err(invalid(&format!("{loc}.map"), "map domain is not the triad's space"));
                }
                ResolvedTriad { triad: t.triad.pushforward(&f), functional: None }
            }
        })
    }

    fn build_morphism(&self, spec: &MorphismSpec, loc: &str) -> Step<ResolvedMorphism> {
        Ok(match spec {
            MorphismSpec::Explicit { source, target, map, fa, fomega } => {
                let (sx, ty) = (self.triad(source, &format!("{loc}.source"))?, self.triad(target, &format!("{loc}.target"))?);
                let f = self.map(map, &format!("{loc}.map"))?;
                if f.domain() != sx.triad.space() || f.codomain() != ty.triad.space() {
                    return Err(invalid(&format!("{loc}.map"), "map does not go from the source space to the target space"));
                }
                let y = ty.triad.space();
                let pre = |v: usize| f.preimage_open(v);
                let fa = components(
                    y,
                    fa,
                    |v| (sx.triad.algebra().algebra(pre(v)).dim(), ty.triad.algebra().algebra(v).dim()),
                    &format!("{loc}.fa"),
                )?;
                let fomega = components(
                    y,
                    fomega,
                    |v| (sx.triad.module().module(pre(v)).dim(), ty.triad.module().module(v).dim()),
                    &format!("{loc}.fomega"),
                )?;
                ResolvedMorphism {
                    source: source.clone(),
                    target: target.clone(),
                    morphism: TriadMorphism { map: f.clone(), fa, fomega },
                }
            }
            MorphismSpec::Identity { triad } => {
                let t = self.triad(triad, &format!("{loc}.triad"))?;
                ResolvedMorphism { source: triad.clone(), target: triad.clone(), morphism: identity_morphism(&t.triad) }
            }
            MorphismSpec::Constant { source, target, point } => {
                let sx = self.triad(source, &format!("{loc}.source"))?;
                let ty = self.triad(target, &format!("{loc}.target"))?;
                let functional = ty
                    .functional
                    .as_ref()
                    .ok_or_else(|| invalid(&format!("{loc}.target"), triadica_core::dtcat::DtcatError::NotFunctional))?;
                let m = constant_morphism(&sx.triad, functional, *point).map_err(|e| invalid(loc, e))?;
                ResolvedMorphism { source: source.clone(), target: target.clone(), morphism: m }
            }
            MorphismSpec::Compose { first, second } => {
                let f = self.morphism(first, &format!("{loc}.first"))?;
                let g = self.morphism(second, &format!("{loc}.second"))?;
                let (fy, gy) = (self.triad(&f.target, loc)?, self.triad(&g.source, loc)?);
                if fy.triad != gy.triad {
                    return Err(invalid(loc, format!("'{first}' ends at '{}' but '{second}' starts at '{}'", f.target, g.source)));
                }
                let m = compose(&g.morphism, &f.morphism).map_err(|e| invalid(loc, e))?;
                ResolvedMorphism { source: f.source.clone(), target: g.target.clone(), morphism: m }
            }
        })
    }
}

pub fn resolve(doc: &WorkspaceDocument) -> Result<Workspace, Vec<WorkspaceError>> {
    let mut r = Resolver { ws: Workspace::default(), failed: BTreeSet::new(), errors: Vec::new() };
    let mut seen = BTreeSet::new();
    let mut names: Vec<(String, String)> = Vec::new();
    names.extend(doc.spaces.iter().enumerate().map(|(i, e)| (e.name.clone(), format!("spaces[{i}]"))));
    names.extend(doc.algebras.iter().enumerate().map(|(i, e)| (e.name.clone(), format!("algebras[{i}]"))));
    names.extend(doc.presheaves.iter().enumerate().map(|(i, e)| (e.name.clone(), format!("presheaves[{i}]"))));
    names.extend(doc.maps.iter().enumerate().map(|(i, e)| (e.name.clone(), format!("maps[{i}]"))));
    names.extend(doc.triads.iter().enumerate().map(|(i, e)| (e.name.clone(), format!("triads[{i}]"))));
    names.extend(doc.morphisms.iter().enumerate().map(|(i, e)| (e.name.clone(), format!("morphisms[{i}]"))));
    for (name, location) in names {
        if !seen.insert(name.clone()) {
            r.errors.push(WorkspaceError::DuplicateName { name, location });
        }
    }
    if !r.errors.is_empty() {
        return Err(r.errors);
    }

    for (i, e) in doc.spaces.iter().enumerate() {
        let result = build_space(&e.spec, &format!("spaces[{i}]"));
        r.record(&e.name, result, |ws, v| {
            ws.spaces.insert(e.name.clone(), v);
        });
    }
    for (i, e) in doc.algebras.iter().enumerate() {
        let result = r.build_algebra(&e.spec, &format!("algebras[{i}]"));
        r.record(&e.name, result, |ws, v| {
            ws.algebras.insert(e.name.clone(), v);
        });
    }
    for (i, e) in doc.presheaves.iter().enumerate() {
        let result = r.build_presheaf(&e.spec, &format!("presheaves[{i}]"));
        r.record(&e.name, result, |ws, v| {
            ws.presheaves.insert(e.name.clone(), v);
        });
    }
    for (i, e) in doc.maps.iter().enumerate() {
        let result = r.build_map(e, &format!("maps[{i}]"));
        r.record(&e.name, result, |ws, v| {
            ws.maps.insert(e.name.clone(), v);
        });
    }
    for (i, e) in doc.triads.iter().enumerate() {
        let result = r.build_triad(&e.spec, &format!("triads[{i}]"));
        r.record(&e.name, result, |ws, v| {
            ws.triads.insert(e.name.clone(), v);
        });
    }
    for (i, e) in doc.morphisms.iter().enumerate() {
        let result = r.build_morphism(&e.spec, &format!("morphisms[{i}]"));
        r.record(&e.name, result, |ws, v| {
            ws.morphisms.insert(e.name.clone(), v);
        });
    }
    if r.errors.is_empty() {
        Ok(r.ws)
    } else {
        Err(r.errors)
    }
}
