//! Workspace-driven front end: parse a JSON workspace, run one command on
//! named targets, and emit a deterministic report.

pub mod export;
pub mod report;
pub mod workspace;

use std::collections::BTreeMap;

use serde_json::{json, Value};

use triadica_core::algebra::characters;
use triadica_core::dtcat::{
    algebra_component_uniqueness, check_morphism, compose, constant_morphism, differential_agreement_on_image,
    enumerate_presheaf_morphisms, fullness_check, pullback_morphism, verify_pullback_forced, AlgebraUniqueness,
    DtcatError, ImageAgreement, MorphismFinding, PullbackReport,
};
use triadica_core::finspace::FiniteSpace;
use triadica_core::kaehler::kaehler_presheaf;
use triadica_core::sheaf::{check_sheaf_condition, AlgebraPresheaf, SheafFailure, SheafWitness};
use triadica_core::triad::{DifferentialTriad, TriadFinding};

use crate::export::{matrix_entries, vector_strings, Exporter};
pub use crate::report::{Finding, Report, Severity, Status};
use crate::workspace::{parse_workspace, ResolvedTriad, Workspace, WorkspaceError};

pub const DEFAULT_BOUND: u128 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Kaehler,
    Sheafify,
    Pushforward,
    CheckMorphism,
    Compose,
    ConstantMorphism,
    Uniqueness,
    RecoverMap,
    Fullness,
    Spectrum,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Validate => "validate",
            Self::Kaehler => "kaehler",
            Self::Sheafify => "sheafify",
            Self::Pushforward => "pushforward",
            Self::CheckMorphism => "check-morphism",
            Self::Compose => "compose",
            Self::ConstantMorphism => "constant-morphism",
            Self::Uniqueness => "uniqueness",
            Self::RecoverMap => "recover-map",
            Self::Fullness => "fullness",
            Self::Spectrum => "spectrum",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Options {
    pub targets: Vec<String>,
    pub bound: u128,
    pub exploratory: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self { targets: Vec::new(), bound: DEFAULT_BOUND, exploratory: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn usage(command: Command, findings: Vec<Finding>) -> Outcome {
    Outcome { report: Report::new(command.name(), findings, None, false), exit_code: EXIT_USAGE }
}

pub fn workspace_error_finding(e: &WorkspaceError) -> Finding {
    let witness = match e {
        WorkspaceError::Parse { line: Some(l), column: Some(c), .. } => json!({ "line": l, "column": c }),
        WorkspaceError::UnresolvedReference { name, expected, .. } => json!({ "name": name, "expected": expected }),
        WorkspaceError::DuplicateName { name, .. } => json!({ "name": name }),
        _ => Value::Null,
    };
    Finding::error(e.location(), e.to_string()).with_witness(witness)
}

/// Parses `text` and runs `command`; parse and reference errors exit with 2.
pub fn run_text(command: Command, text: &str, options: &Options) -> Outcome {
    match parse_workspace(text) {
        Ok(ws) => run(command, &ws, options),
        Err(errors) => usage(command, errors.iter().map(workspace_error_finding).collect()),
    }
}

type CommandResult = Result<(Vec<Finding>, Option<Value>, bool), Vec<Finding>>;

pub fn run(command: Command, ws: &Workspace, options: &Options) -> Outcome {
    let result = match command {
        Command::Validate => validate(ws, options),
        Command::Kaehler => kaehler(ws, options),
        Command::Sheafify => sheafify(ws, options),
        Command::Pushforward => pushforward(ws, options),
        Command::CheckMorphism => check_morphisms(ws, options),
        Command::Compose => compose_cmd(ws, options),
        Command::ConstantMorphism => constant_cmd(ws, options),
        Command::Uniqueness => uniqueness(ws, options),
        Command::RecoverMap => recover_map(ws, options),
        Command::Fullness => fullness(ws, options),
        Command::Spectrum => spectrum(ws, options),
    };
    match result {
        Ok((findings, derived, exploratory)) => {
            let report = Report::new(command.name(), findings, derived, exploratory);
            let exit_code = if report.status == Status::Fail { EXIT_FAIL } else { EXIT_PASS };
            Outcome { report, exit_code }
        }
        Err(findings) => usage(command, findings),
    }
}

fn target_error(name: &str, message: impl Into<String>) -> Vec<Finding> {
    vec![Finding::error(format!("--target {name}"), message).with_witness(json!({ "name": name }))]
}

/// Named targets of one kind, sorted; all entries of that kind when none are given.
fn targets_of(ws: &Workspace, options: &Options, kinds: &[&str], defaults: Vec<String>) -> Result<Vec<String>, Vec<Finding>> {
    if options.targets.is_empty() {
        return Ok(defaults);
    }
    let mut out = Vec::new();
    for t in &options.targets {
        match ws.kind_of(t) {
            Some(k) if kinds.contains(&k) => out.push(t.clone()),
            Some(k) => return Err(target_error(t, format!("'{t}' is a {k}, expected {}", kinds.join(" or ")))),
            None => return Err(target_error(t, format!("unresolved target '{t}'"))),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Exactly the given kinds, in order.
fn positional(ws: &Workspace, options: &Options, kinds: &[&str]) -> Result<Vec<String>, Vec<Finding>> {
    if options.targets.len() != kinds.len() {
        return Err(vec![Finding::error(
            "--target",
            format!("expected {} targets ({}), found {}", kinds.len(), kinds.join(", "), options.targets.len()),
        )]);
    }
    for (t, k) in options.targets.iter().zip(kinds) {
        match ws.kind_of(t) {
            Some(found) if found == *k => {}
            Some(found) => return Err(target_error(t, format!("'{t}' is a {found}, expected {k}"))),
            None => return Err(target_error(t, format!("unresolved target '{t}'"))),
        }
    }
    Ok(options.targets.clone())
}

fn sheaf_witness_json(w: &SheafWitness) -> Value {
    match &w.failure {
        SheafFailure::NotInjective { kernel_dim } => json!({ "open": w.open, "cover": w.cover, "kernel_dim": kernel_dim }),
        SheafFailure::GluingFails { equalizer_dim, section_dim } => {
            json!({ "open": w.open, "cover": w.cover, "equalizer_dim": equalizer_dim, "section_dim": section_dim })
        }
    }
}

fn triad_finding(location: &str, f: &TriadFinding) -> Finding {
    let witness = match f {
        TriadFinding::AlgebraNotSheaf(w) | TriadFinding::ModuleNotSheaf(w) => sheaf_witness_json(w),
        TriadFinding::Leibniz { open, violation } => {
            json!({ "open": open, "pair": [violation.i, violation.j], "deviation": vector_strings(&violation.deviation) })
        }
        TriadFinding::Naturality { from, to, basis_element } => json!({ "from": from, "to": to, "basis_element": basis_element }),
        TriadFinding::UnitNotClosed { open } => json!({ "open": open }),
    };
    Finding::error(location, f.to_string()).with_witness(witness)
}

fn triad_findings(location: &str, t: &DifferentialTriad) -> Vec<Finding> {
    let report = t.validate();
    if report.is_valid() {
        let omega: Vec<usize> = t.module().modules().iter().map(|m| m.dim()).collect();
        let algebra: Vec<usize> = t.algebra().algebras().iter().map(|a| a.dim()).collect();
        vec![Finding::info(location, "valid differential triad").with_witness(json!({
            "algebra_dims": algebra,
            "module_dims": omega,
            "kernel_is_constants": t.differential_kills_only_constants(),
        }))]
    } else {
        report.findings.iter().map(|f| triad_finding(location, f)).collect()
    }
}

fn presheaf_findings(location: &str, p: &AlgebraPresheaf) -> Vec<Finding> {
    let cert = check_sheaf_condition(p.linear());
    if cert.is_sheaf {
        vec![Finding::info(location, "sheaf condition holds").with_witness(json!({ "section_dims": p.linear().dims() }))]
    } else {
        cert.witnesses
            .iter()
            .map(|w| Finding::error(location, format!("not a sheaf: {w}")).with_witness(sheaf_witness_json(w)))
            .collect()
    }
}

fn validate(ws: &Workspace, options: &Options) -> CommandResult {
    let names = targets_of(ws, options, &["triad", "presheaf"], ws.triads.keys().cloned().collect())?;
    let mut findings = Vec::new();
    for name in names {
        if let Some(t) = ws.triads.get(&name) {
            let loc = format!("triads.{name}");
            findings.extend(triad_findings(&loc, &t.triad));
            if t.functional.is_some() {
                findings.push(Finding::info(&loc, "function embeddings are valid"));
            }
        } else {
            findings.extend(presheaf_findings(&format!("presheaves.{name}"), &ws.presheaves[&name]));
        }
    }
    Ok((findings, None, false))
}

fn derived_workspace(exporter: Exporter) -> Value {
    json!({ "workspace": serde_json::to_value(exporter.finish()).expect("documents serialize") })
}

fn kaehler(ws: &Workspace, options: &Options) -> CommandResult {
    let names = targets_of(ws, options, &["presheaf"], ws.presheaves.keys().cloned().collect())?;
    let mut findings = Vec::new();
    let mut exporter = Exporter::new();
    for name in names {
        let loc = format!("presheaves.{name}");
        match kaehler_presheaf(&ws.presheaves[&name]) {
            Ok(kt) => {
                let dims: Vec<usize> = kt.modules.iter().map(|k| k.omega_dim).collect();
                findings.push(Finding::info(&loc, "Kähler differentials computed").with_witness(json!({ "omega_dims_per_open": dims })));
                findings.extend(triad_findings(&format!("{loc}.kaehler"), &kt.triad));
                exporter.triad(&format!("{name}.kaehler"), &kt.triad, None);
            }
            Err(e) => findings.push(Finding::error(&loc, e.to_string())),
        }
    }
    Ok((findings, Some(derived_workspace(exporter)), false))
}

fn sheafify(ws: &Workspace, options: &Options) -> CommandResult {
    let names = targets_of(ws, options, &["presheaf"], ws.presheaves.keys().cloned().collect())?;
    let mut findings = Vec::new();
    let mut exporter = Exporter::new();
    for name in names {
        let loc = format!("presheaves.{name}");
        let p = &ws.presheaves[&name];
        let plus = p.sheafify();
        findings.push(Finding::info(&loc, "sheafified").with_witness(json!({
            "section_dims": p.linear().dims(),
            "sheafified_dims": plus.presheaf.linear().dims(),
        })));
        findings.extend(presheaf_findings(&format!("{loc}.sheafified"), &plus.presheaf));
        exporter.presheaf(&format!("{name}.sheafified"), &plus.presheaf);
    }
    Ok((findings, Some(derived_workspace(exporter)), false))
}

fn pushforward(ws: &Workspace, options: &Options) -> CommandResult {
    let names = positional(ws, options, &["triad", "map"])?;
    let (t, f) = (&ws.triads[&names[0]], &ws.maps[&names[1]]);
    if f.domain() != t.triad.space() {
        return Err(target_error(&names[1], "map domain is not the triad's space"));
    }
    let pushed = t.triad.pushforward(f);
    let name = format!("{}.pushforward.{}", names[0], names[1]);
    let findings = triad_findings(&format!("triads.{name}"), &pushed);
    let mut exporter = Exporter::new();
    exporter.triad(&name, &pushed, None);
    Ok((findings, Some(derived_workspace(exporter)), false))
}

fn morphism_finding(location: &str, f: &MorphismFinding) -> Finding {
    let witness = match f {
        MorphismFinding::Shape { open, expected, found, .. } => json!({ "open": open, "expected": expected, "found": found }),
        MorphismFinding::NotAlgebraMorphism { open, .. } => json!({ "open": open }),
        MorphismFinding::Restriction { from, to, basis_element, .. } => json!({ "from": from, "to": to, "basis_element": basis_element }),
        MorphismFinding::NotSemilinear { open, algebra_element, module_element } => {
            json!({ "open": open, "algebra_element": algebra_element, "module_element": module_element })
        }
        MorphismFinding::DifferentialSquare { open, basis_element, deviation } => {
            json!({ "open": open, "basis_element": basis_element, "deviation": vector_strings(deviation) })
        }
        _ => Value::Null,
    };
    Finding::error(location, f.to_string()).with_witness(witness)
}

fn morphism_findings(ws: &Workspace, name: &str) -> Vec<Finding> {
    let m = &ws.morphisms[name];
    let loc = format!("morphisms.{name}");
    let report = check_morphism(&m.morphism, &ws.triads[&m.source].triad, &ws.triads[&m.target].triad);
    if report.is_valid() {
        vec![Finding::info(loc, "valid morphism of differential triads").with_witness(json!({ "map": m.morphism.map.values() }))]
    } else {
        report.findings.iter().map(|f| morphism_finding(&loc, f)).collect()
    }
}

fn check_morphisms(ws: &Workspace, options: &Options) -> CommandResult {
    let names = targets_of(ws, options, &["morphism"], ws.morphisms.keys().cloned().collect())?;
    Ok((names.iter().flat_map(|n| morphism_findings(ws, n)).collect(), None, false))
}

fn export_triad(exporter: &mut Exporter, name: &str, t: &ResolvedTriad) -> String {
    exporter.triad(name, &t.triad, t.functional.as_ref().map(|f| f.embeddings()))
}

fn compose_cmd(ws: &Workspace, options: &Options) -> CommandResult {
    let names = positional(ws, options, &["morphism", "morphism"])?;
    let (f, g) = (&ws.morphisms[&names[0]], &ws.morphisms[&names[1]]);
    if ws.triads[&f.target] != ws.triads[&g.source] {
        return Err(target_error(&names[1], format!("'{}' does not start where '{}' ends", names[1], names[0])));
    }
    let gf = compose(&g.morphism, &f.morphism).map_err(|e| target_error(&names[1], e.to_string()))?;
    let (sx, tz) = (&ws.triads[&f.source], &ws.triads[&g.target]);
    let name = format!("{}.after.{}", names[1], names[0]);
    let report = check_morphism(&gf, &sx.triad, &tz.triad);
    let loc = format!("morphisms.{name}");
    let findings = if report.is_valid() {
        vec![Finding::info(&loc, "composite is a valid morphism").with_witness(json!({ "map": gf.map.values() }))]
    } else {
        report.findings.iter().map(|x| morphism_finding(&loc, x)).collect()
    };
    let mut exporter = Exporter::new();
    let s = export_triad(&mut exporter, &f.source, sx);
    let t = export_triad(&mut exporter, &g.target, tz);
    exporter.morphism(&name, &gf, &s, &t);
    Ok((findings, Some(derived_workspace(exporter)), false))
}

fn constant_cmd(ws: &Workspace, options: &Options) -> CommandResult {
    let names = positional(ws, options, &["triad", "triad"])?;
    let (sx, ty) = (&ws.triads[&names[0]], &ws.triads[&names[1]]);
    let Some(functional) = &ty.functional else {
        let e = DtcatError::NotFunctional;
        return Ok((vec![Finding::error(format!("triads.{}", names[1]), e.to_string())], None, false));
    };
    let mut findings = Vec::new();
    let mut exporter = Exporter::new();
    let s = export_triad(&mut exporter, &names[0], sx);
    let t = export_triad(&mut exporter, &names[1], ty);
    for c in 0..ty.triad.space().point_count() {
        let name = format!("{}.constant.{c}", names[0]);
        let loc = format!("morphisms.{name}");
        let m = constant_morphism(&sx.triad, functional, c).map_err(|e| target_error(&names[1], e.to_string()))?;
        let report = check_morphism(&m, &sx.triad, &ty.triad);
        findings.extend(report.findings.iter().map(|x| morphism_finding(&loc, x)));
        for (v, fa) in m.fa.iter().enumerate() {
            let u = m.map.preimage_open(v);
            if !(sx.triad.differential(u) * fa).is_zero() {
                findings.push(Finding::error(&loc, "∂_X ∘ c_A ≠ 0").with_witness(json!({ "open": v })));
            }
        }
        if report.is_valid() {
            findings.push(Finding::info(&loc, "constant map is differentiable").with_witness(json!({ "point": c })));
        }
        exporter.morphism(&name, &m, &s, &t);
    }
    Ok((findings, Some(derived_workspace(exporter)), false))
}

fn uniqueness(ws: &Workspace, options: &Options) -> CommandResult {
    let names = positional(ws, options, &["morphism", "morphism"])?;
    let (m1, m2) = (&ws.morphisms[&names[0]], &ws.morphisms[&names[1]]);
    let loc = format!("morphisms.{}+{}", names[0], names[1]);
    let mut findings = Vec::new();
    for n in &names {
        let bad: Vec<Finding> = morphism_findings(ws, n).into_iter().filter(|f| f.severity == Severity::Error).collect();
        if !bad.is_empty() {
            findings.push(Finding::error(&loc, format!("'{n}' is not a valid morphism")));
            findings.extend(bad);
        }
    }
    if m1.source != m2.source || m1.target != m2.target {
        findings.push(Finding::error(&loc, "morphisms do not share source and target"));
    }
    if !findings.is_empty() {
        return Ok((findings, None, false));
    }
    let (source, target) = (&ws.triads[&m1.source].triad, &ws.triads[&m1.target].triad);
    let (a, b) = (&m1.morphism, &m2.morphism);
    if a.map != b.map {
        findings.push(Finding::error(&loc, "morphisms lie over different maps"));
    }
    if a.map == b.map && a.fa == b.fa {
        match differential_agreement_on_image(a, b, target) {
            ImageAgreement::AgreeEverywhere => findings.push(Finding::info(&loc, "equal f_A and equal f_Ω")),
            ImageAgreement::AgreeOnImageDifferGlobally { open, module_element } => findings.push(
                Finding::info(&loc, "agree on Im ∂, differ on complement")
                    .with_witness(json!({ "open": open, "module_element": module_element })),
            ),
            ImageAgreement::DisagreeOnImage { open, image_vector } => findings.push(
                Finding::error(&loc, "f_Ω components disagree on Im ∂ although f_A agrees")
                    .with_witness(json!({ "open": open, "image_vector": vector_strings(&image_vector) })),
            ),
            ImageAgreement::PreconditionNotMet { reason } => findings.push(Finding::error(&loc, reason)),
        }
    }
    if a.map == b.map && a.fomega == b.fomega {
        match algebra_component_uniqueness(a, b, source, target) {
            AlgebraUniqueness::Equal => findings.push(Finding::info(&loc, "equal f_Ω forces equal f_A")),
            AlgebraUniqueness::HypothesisNotMet { open } => findings.push(
                Finding::warning(&loc, "hypothesis not met: ker ∂_X is larger than the constants; no claim about f_A")
                    .with_witness(json!({ "open": open })),
            ),
            AlgebraUniqueness::Counterexample { open, basis_element } => findings.push(
                Finding::error(&loc, "equal f_Ω but different f_A")
                    .with_witness(json!({ "open": open, "basis_element": basis_element })),
            ),
            AlgebraUniqueness::PreconditionNotMet { reason } => findings.push(Finding::error(&loc, reason)),
        }
    }
    if a.map == b.map && a.fa != b.fa && a.fomega != b.fomega {
        findings.push(Finding::info(&loc, "neither component agrees; nothing to compare"));
    }
    Ok((findings, None, false))
}

fn pullback_findings(loc: &str, report: &PullbackReport, severity: Severity) -> Vec<Finding> {
    report
        .mismatches
        .iter()
        .map(|m| {
            Finding::new(severity, loc, "component is not the pullback along the map").with_witness(json!({
                "open": m.open,
                "point": m.point,
                "found": vector_strings(&m.found),
                "expected": vector_strings(&m.expected),
                "is_character": m.is_character,
            }))
        })
        .collect()
}

fn recover_map(ws: &Workspace, options: &Options) -> CommandResult {
    let names = targets_of(ws, options, &["map", "morphism"], Vec::new())?;
    if names.is_empty() {
        return Err(vec![Finding::error("--target", "recover-map needs a map or morphism target")]);
    }
    let mut findings = Vec::new();
    let mut any_exploratory = false;
    for name in names {
        let (f, given) = match ws.maps.get(&name) {
            Some(f) => (f.clone(), None),
            None => {
                let m = &ws.morphisms[&name];
                (m.morphism.map.clone(), Some(m))
            }
        };
        let discrete = f.domain().is_discrete() && f.codomain().is_discrete();
        if !discrete && !options.exploratory {
            return Err(target_error(&name, "spaces are not discrete; rerun with --exploratory"));
        }
        any_exploratory |= !discrete;
        let severity = if discrete { Severity::Error } else { Severity::Info };
        match given {
            None => {
                let loc = format!("maps.{name}");
                let (ax, ay) = (AlgebraPresheaf::functional(f.domain()), AlgebraPresheaf::functional(f.codomain()));
                let all = enumerate_presheaf_morphisms(&f, &ay, &ax).map_err(|e| target_error(&name, e.to_string()))?;
                let forced = all.iter().filter(|h| verify_pullback_forced(&f, h).is_forced()).count();
                let witness = json!({ "families": all.len(), "pullbacks": forced, "map": f.values() });
                if all.len() == 1 && forced == 1 {
                    findings.push(Finding::info(&loc, "the only unital presheaf morphism is the pullback").with_witness(witness));
                } else {
                    findings.push(Finding::new(severity, &loc, "unital presheaf morphisms other than the pullback exist").with_witness(witness));
                    for h in all.iter().filter(|h| !verify_pullback_forced(&f, h).is_forced()).take(4) {
                        findings.extend(pullback_findings(&loc, &verify_pullback_forced(&f, h), Severity::Info));
                    }
                }
            }
            Some(m) => {
                let loc = format!("morphisms.{name}");
                let (sx, ty) = (&ws.triads[&m.source].triad, &ws.triads[&m.target].triad);
                if sx.algebra() != &AlgebraPresheaf::functional(f.domain()) || ty.algebra() != &AlgebraPresheaf::functional(f.codomain()) {
                    return Err(target_error(&name, "morphism is not between full functional triads"));
                }
                let report = verify_pullback_forced(&f, &m.morphism.algebra_morphism());
                if report.is_forced() {
                    findings.push(Finding::info(&loc, "f_A is the pullback along the map").with_witness(json!({ "map": f.values() })));
                }
                findings.extend(pullback_findings(&loc, &report, severity));
            }
        }
    }
    Ok((findings, None, any_exploratory))
}

fn fullness(ws: &Workspace, options: &Options) -> CommandResult {
    let names = positional(ws, options, &["space", "space"])?;
    let (x, y): (&FiniteSpace, &FiniteSpace) = (&ws.spaces[&names[0]], &ws.spaces[&names[1]]);
    let report = match fullness_check(x, y, options.bound) {
        Ok(r) => r,
        Err(e @ (DtcatError::NotDiscrete | DtcatError::BoundExceeded { .. })) => {
            return Err(vec![Finding::error("--target", e.to_string())]);
        }
        Err(e) => return Ok((vec![Finding::error("fullness", e.to_string())], None, false)),
    };
    let loc = format!("spaces.{}->{}", names[0], names[1]);
    let expected = y.point_count().pow(x.point_count() as u32);
    let witness = json!({
        "point_maps": report.map_count,
        "morphisms": report.morphism_count,
        "expected": expected,
        "bijective": report.bijective,
    });
    let mut findings = Vec::new();
    if report.morphism_count == expected && report.map_count == expected && report.bijective && report.invalid == 0 {
        findings.push(Finding::info(&loc, "morphisms of functional triads correspond bijectively to maps").with_witness(witness));
    } else {
        findings.push(Finding::error(&loc, "morphism count or correspondence differs from the point maps").with_witness(witness));
    }
    let table: Vec<Value> = report
        .morphisms
        .iter()
        .map(|(values, ms)| json!({ "map": values, "fa": ms.iter().map(|m| m.fa.iter().map(matrix_entries).collect::<Vec<_>>()).collect::<Vec<_>>() }))
        .collect();
    Ok((findings, Some(json!({ "correspondence": table })), false))
}

fn spectrum(ws: &Workspace, options: &Options) -> CommandResult {
    let names = targets_of(ws, options, &["algebra"], ws.algebras.keys().cloned().collect())?;
    let mut findings = Vec::new();
    let mut derived = BTreeMap::new();
    for name in names {
        let loc = format!("algebras.{name}");
        match characters(&ws.algebras[&name]) {
            Ok(chars) => {
                findings.push(Finding::info(&loc, format!("{} characters", chars.len())));
                let list: Vec<Vec<String>> = chars.iter().map(|c| vector_strings(&c.functional)).collect();
                derived.insert(name, json!(list));
            }
            Err(e) => findings.push(Finding::error(&loc, e.to_string())),
        }
    }
    Ok((findings, Some(json!({ "characters": derived })), false))
}

/// The pullback family along a map, for fixtures and tests.
pub fn pullback_components(f: &triadica_core::finspace::ContinuousMap) -> Vec<triadica_core::exactla::Matrix> {
    pullback_morphism(f).components
}
