//! JSON forms of extensions, walks and coarse-graining provenance.

use std::env;

use cayleywalk_core::cayley::GeneratingSet;
use cayleywalk_core::coarse::CoarseGrainedWalk;
use cayleywalk_core::group::named_extension;
use cayleywalk_core::linalg::{c, CMat};
use cayleywalk_core::walk::{QuantumWalk, DEFAULT_TOLERANCE};
use cayleywalk_core::{Element, Error, Extension, IntMat, Quotient, Result};
use serde::{Deserialize, Serialize};

/// Environment variable overriding the unitarity tolerance.
pub const TOLERANCE_VAR: &str = "CAYLEYWALK_TOLERANCE";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionJson {
    pub dim: usize,
    pub quotient: QuotientJson,
    /// One `d x d` integer matrix per quotient element.
    pub phi: Vec<Vec<Vec<i64>>>,
    /// `cocycle[q1][q2]` is `f(q1, q2)`.
    pub cocycle: Vec<Vec<Vec<i64>>>,
}

/// Either full data or a name (`"trivial"`, `"J2"`, `"K1"`, `"Dinf"`, ...).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtensionField {
    Name(String),
    Data(ExtensionJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorJson {
    pub n: Vec<i64>,
    pub q: usize,
}

/// A walk file. `generators` lists `S` without the identity, in matrix
/// order; the identity matrix comes last when `includes_identity` is set.
/// `matrices` may be omitted for graph-only commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub extension: ExtensionField,
    pub generators: Vec<GeneratorJson>,
    #[serde(default)]
    pub includes_identity: bool,
    #[serde(default = "one")]
    pub coin_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Free-form notes written by `catalog emit`; ignored on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

fn one() -> usize {
    1
}

pub fn extension_to_json(ext: &Extension) -> ExtensionJson {
    ExtensionJson {
        dim: ext.dim(),
        quotient: QuotientJson { order: ext.quotient().order(), table: ext.quotient().table_rows() },
        phi: ext.phis().iter().map(IntMat::to_rows).collect(),
        cocycle: ext.cocycle_table(),
    }
}

pub fn extension_from_json(j: &ExtensionJson) -> Result<Extension> {
    let quotient = Quotient::from_table(&j.quotient.table)?;
    if quotient.order() != j.quotient.order {
        return Err(Error::Structural(format!(
            "quotient order {} does not match a table of {} rows",
            j.quotient.order,
            quotient.order()
        )));
    }
    let n = quotient.order();
    for m in &j.phi {
        if m.len() != j.dim || m.iter().any(|r| r.len() != j.dim) {
            return Err(Error::Structural(format!("automorphism is not {0}x{0}", j.dim)));
        }
    }
    if j.cocycle.len() != n || j.cocycle.iter().any(|r| r.len() != n) {
        return Err(Error::Structural(format!("cocycle table must be {n}x{n}")));
    }
    let phi = j.phi.iter().map(|m| IntMat::from_rows(m)).collect();
    let cocycle = j.cocycle.iter().flatten().cloned().collect();
    Extension::new(j.dim, quotient, phi, cocycle)
}

fn resolve_extension(field: &ExtensionField, dim_hint: Option<usize>) -> Result<Extension> {
    match field {
        ExtensionField::Data(d) => extension_from_json(d),
        ExtensionField::Name(s) if s.eq_ignore_ascii_case("trivial") => {
            let d = dim_hint.ok_or_else(|| Error::Structural("trivial extension needs at least one generator".into()))?;
            Ok(Extension::trivial(d))
        }
        ExtensionField::Name(s) => named_extension(s),
    }
}

fn extension_field(ext: &Extension) -> ExtensionField {
    if ext.quotient().order() == 1 {
        ExtensionField::Name("trivial".into())
    } else {
        ExtensionField::Data(extension_to_json(ext))
    }
}

pub fn generating_set_from_json(j: &WalkJson) -> Result<GeneratingSet> {
    let ext = resolve_extension(&j.extension, j.generators.first().map(|g| g.n.len()))?;
    let id = ext.identity();
    let plus: Vec<Element> =
        j.generators.iter().map(|g| Element::new(g.n.clone(), g.q)).filter(|g| *g != id).collect();
    if plus.len() != j.generators.len() {
        return Err(Error::Structural("the identity is set by includes_identity, not listed".into()));
    }
    GeneratingSet::new(ext, plus, j.includes_identity)
}

/// Tolerance from the environment, if set.
pub fn env_tolerance() -> Result<Option<f64>> {
    match env::var(TOLERANCE_VAR) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(Some(t)),
            _ => Err(Error::Structural(format!("{TOLERANCE_VAR}={s} is not a positive number"))),
        },
    }
}

/// Loads a walk; the environment tolerance overrides the file's.
pub fn walk_from_json(j: &WalkJson) -> Result<QuantumWalk> {
    let gs = generating_set_from_json(j)?;
    let mats = j.matrices.as_ref().ok_or_else(|| Error::Structural("walk file has no matrices".into()))?;
    if gs.len() != mats.len() {
        return Err(Error::Structural(format!("{} generators but {} matrices", gs.len(), mats.len())));
    }
    let s = j.coin_dim;
    let mut out = Vec::with_capacity(mats.len());
    for (i, m) in mats.iter().enumerate() {
        if m.len() != s || m.iter().any(|r| r.len() != s) {
            return Err(Error::Structural(format!("matrix {i} is not {s}x{s}")));
        }
        out.push(CMat::from_fn(s, s, |r, col| c(m[r][col][0], m[r][col][1])));
    }
    let tol = env_tolerance()?.or(j.tolerance).unwrap_or(DEFAULT_TOLERANCE);
    Ok(QuantumWalk::new(gs, s, out)?.with_tolerance(tol))
}

pub fn walk_to_json(w: &QuantumWalk, name: Option<&str>) -> WalkJson {
    let gs = w.gens();
    let id = gs.ext().identity();
    let generators =
        gs.elements().iter().filter(|g| **g != id).map(|g| GeneratorJson { n: g.n.clone(), q: g.q }).collect();
    let s = w.coin_dim();
    let matrices = w.matrices().iter().map(cmat_to_json).collect();
    WalkJson {
        name: name.map(str::to_string),
        extension: extension_field(gs.ext()),
        generators,
        includes_identity: gs.includes_identity(),
        coin_dim: s,
        matrices: Some(matrices),
        tolerance: Some(w.tolerance()),
        metadata: None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    /// Lattice vector of the coarse matrix receiving the scalar.
    pub target: Vec<i64>,
    pub row: usize,
    pub col: usize,
    pub source: GeneratorJson,
    pub label: String,
}

/// Sidecar for `walk coarse-grain`: where every scalar lands, and the
/// resulting matrices written in scalar labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceJson {
    pub entries: Vec<ProvenanceEntry>,
    pub symbolic: Vec<(Vec<i64>, String)>,
}

/// `z_(n,q)` labels in generator order.
pub fn default_labels(gs: &GeneratingSet) -> Vec<String> {
    gs.elements().iter().map(|g| format!("z{g}")).collect()
}

/// `[[re, im], ...]` rows of a complex matrix.
pub fn cmat_to_json(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|col| [m[(r, col)].re, m[(r, col)].im]).collect()).collect()
}

pub fn provenance_to_json(source: &QuantumWalk, cg: &CoarseGrainedWalk, labels: &[String]) -> ProvenanceJson {
    let base = cg.base.gens().elements();
    let src = source.gens().elements();
    let entries = cg
        .provenance
        .iter()
        .map(|p| ProvenanceEntry {
            target: base[p.target].n.clone(),
            row: p.row,
            col: p.col,
            source: GeneratorJson { n: src[p.source].n.clone(), q: src[p.source].q },
            label: labels[p.source].clone(),
        })
        .collect();
    ProvenanceJson { entries, symbolic: cg.symbolic(labels) }
}

pub fn parse_walk(text: &str) -> std::result::Result<WalkJson, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn parse_extension(text: &str) -> std::result::Result<ExtensionField, serde_json::Error> {
    serde_json::from_str(text)
}
