//! Serialization of core objects back into the workspace format.
//!
//! Everything is written in explicit form (explicit opens, structure
//! constants, explicit restriction and component matrices), so an exported
//! document re-parses into objects equal to the originals.

use triadica_core::algebra::Algebra;
use triadica_core::dtcat::TriadMorphism;
use triadica_core::exactla::{Matrix, Rational, Tensor3};
use triadica_core::finspace::{ContinuousMap, FiniteSpace};
use triadica_core::sheaf::AlgebraPresheaf;
use triadica_core::triad::DifferentialTriad;

use crate::workspace::{
    AlgebraSpec, ComponentEntry, MapSpec, MatrixEntries, ModuleEntry, MorphismSpec, Named, OpenRef, PresheafSpec,
    RestrictionEntry, SectionEntry, SpaceSpec, TensorEntries, TriadSpec, WorkspaceDocument,
};

pub fn rational_string(r: &Rational) -> String {
    r.to_string()
}

pub fn vector_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational_string).collect()
}

pub fn matrix_entries(m: &Matrix) -> MatrixEntries {
    m.to_rows().iter().map(|r| vector_strings(r)).collect()
}

fn tensor_entries(t: &Tensor3) -> TensorEntries {
    let (d0, d1, _) = t.dims();
    (0..d0).map(|i| (0..d1).map(|j| vector_strings(t.fiber(i, j))).collect()).collect()
}

/// Builds a self-contained document, sharing equal spaces and algebras.
pub struct Exporter {
    doc: WorkspaceDocument,
    spaces: Vec<(FiniteSpace, String)>,
    algebras: Vec<(Algebra, String)>,
    presheaves: Vec<(AlgebraPresheaf, String)>,
    triads: Vec<(DifferentialTriad, String)>,
}

impl Default for Exporter {
    fn default() -> Self {
        Self::new()
    }
}

impl Exporter {
    pub fn new() -> Self {
        Self { doc: WorkspaceDocument::empty(), spaces: Vec::new(), algebras: Vec::new(), presheaves: Vec::new(), triads: Vec::new() }
    }

    pub fn finish(self) -> WorkspaceDocument {
        self.doc
    }

    pub fn space(&mut self, hint: &str, s: &FiniteSpace) -> String {
        if let Some((_, n)) = self.spaces.iter().find(|(t, _)| t == s) {
            return n.clone();
        }
        let name = format!("{hint}.space");
        let opens = s.opens().iter().map(|o| o.points().collect()).collect();
        self.doc.spaces.push(Named { name: name.clone(), spec: SpaceSpec::Explicit { points: s.point_count(), opens } });
        self.spaces.push((s.clone(), name.clone()));
        name
    }

    pub fn algebra(&mut self, hint: &str, a: &Algebra) -> String {
        if let Some((_, n)) = self.algebras.iter().find(|(b, _)| b == a) {
            return n.clone();
        }
        let name = format!("{hint}.algebra{}", self.algebras.len());
        let spec = AlgebraSpec::StructureConstants {
            dim: a.dim(),
            mult: tensor_entries(a.structure_constants()),
            unit: vector_strings(a.unit()),
        };
        self.doc.algebras.push(Named { name: name.clone(), spec });
        self.algebras.push((a.clone(), name.clone()));
        name
    }

    pub fn presheaf(&mut self, name: &str, p: &AlgebraPresheaf) -> String {
        if let Some((_, n)) = self.presheaves.iter().find(|(q, _)| q == p) {
            return n.clone();
        }
        let space = self.space(name, p.space());
        let sections = (0..p.space().open_count())
            .map(|u| SectionEntry { open: OpenRef::Index(u), algebra: self.algebra(name, p.algebra(u)) })
            .collect();
        let restrictions = p
            .space()
            .inclusions()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| RestrictionEntry {
                from: OpenRef::Index(u),
                to: OpenRef::Index(v),
                matrix: matrix_entries(p.restriction(u, v)),
            })
            .collect();
        self.doc.presheaves.push(Named { name: name.to_string(), spec: PresheafSpec::Explicit { space, sections, restrictions } });
        self.presheaves.push((p.clone(), name.to_string()));
        name.to_string()
    }

    pub fn triad(&mut self, name: &str, t: &DifferentialTriad, embeddings: Option<&[Matrix]>) -> String {
        if let Some((_, n)) = self.triads.iter().find(|(s, _)| s == t) {
            return n.clone();
        }
        let presheaf = self.presheaf(&format!("{name}.A"), t.algebra());
        let space = t.space();
        let modules = (0..space.open_count())
            .map(|u| {
                let m = t.module().module(u);
                ModuleEntry { open: OpenRef::Index(u), dim: m.dim(), action: tensor_entries(m.action()) }
            })
            .collect();
        let module_restrictions = space
            .inclusions()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| RestrictionEntry {
                from: OpenRef::Index(u),
                to: OpenRef::Index(v),
                matrix: matrix_entries(t.module().restriction(u, v)),
            })
            .collect();
        let per_open = |ms: &[Matrix]| -> Vec<ComponentEntry> {
            ms.iter()
                .enumerate()
                .map(|(u, m)| ComponentEntry { open: OpenRef::Index(u), matrix: matrix_entries(m) })
                .collect()
        };
        let spec = TriadSpec::Explicit {
            presheaf,
            modules,
            module_restrictions,
            differentials: per_open(t.differentials()),
            embeddings: embeddings.map(per_open),
        };
        self.doc.triads.push(Named { name: name.to_string(), spec });
        self.triads.push((t.clone(), name.to_string()));
        name.to_string()
    }

    pub fn map(&mut self, name: &str, f: &ContinuousMap) -> String {
        let domain = self.space(&format!("{name}.domain"), f.domain());
        let codomain = self.space(&format!("{name}.codomain"), f.codomain());
        if let Some(existing) = self.doc.maps.iter().find(|m| m.domain == domain && m.codomain == codomain && m.values == f.values()) {
            return existing.name.clone();
        }
        self.doc.maps.push(MapSpec { name: name.to_string(), domain, codomain, values: f.values().to_vec() });
        name.to_string()
    }

    /// A morphism between already-exported triads.
    pub fn morphism(&mut self, name: &str, m: &TriadMorphism, source: &str, target: &str) {
        let map = self.map(&format!("{name}.map"), &m.map);
        let per_open = |ms: &[Matrix]| -> Vec<ComponentEntry> {
            ms.iter()
                .enumerate()
                .map(|(u, m)| ComponentEntry { open: OpenRef::Index(u), matrix: matrix_entries(m) })
                .collect()
        };
        let spec = MorphismSpec::Explicit {
            source: source.to_string(),
            target: target.to_string(),
            map,
            fa: per_open(&m.fa),
            fomega: per_open(&m.fomega),
        };
        self.doc.morphisms.push(Named { name: name.to_string(), spec });
    }
}
