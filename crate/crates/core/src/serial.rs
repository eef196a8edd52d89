//! The space file: a JSON document describing a space together with named
//! maps out of it, modules on it and roofs with it as apex.
//!
//! ```json
//! {
//!   "field": "Q",
//!   "points": ["p0", "pinf", "eta"],
//!   "order": [["p0", "eta"], ["pinf", "eta"]],
//!   "stalks": {
//!     "p0":   { "vars": ["x"], "relations": [], "invert": [], "weights": [1] },
//!     "pinf": { "vars": ["u"], "relations": [], "invert": [], "weights": [-1] },
//!     "eta":  { "vars": ["x"], "relations": [], "invert": ["x"], "weights": [1] }
//!   },
//!   "restrictions": [
//!     { "from": "p0", "to": "eta", "images": { "x": "x" }, "extra_invert": ["x"] },
//!     { "from": "pinf", "to": "eta", "images": { "u": "1/x" }, "extra_invert": ["u"] }
//!   ]
//! }
//! ```
//!
//! `order` lists covering pairs; every pair carries exactly one restriction.
//! A restriction with `extra_invert` is declared a localization (and
//! verified); without it the map is general.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{Grading, LocAlgebra};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fixtures;
use crate::hom::AlgHom;
use crate::module::{FpModule, ModElem};
use crate::qcoh::SheafModule;
use crate::space::{FinSpace, GlobalSections, SpaceMap};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub points: Vec<String>,
    #[serde(default)]
    pub order: Vec<(String, String)>,
    pub stalks: BTreeMap<String, StalkDoc>,
    #[serde(default)]
    pub restrictions: Vec<RestrictionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global_sections: Option<SectionsDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub roofs: BTreeMap<String, RoofDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StalkDoc {
    #[serde(default)]
    pub vars: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub invert: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Weight>>,
}

/// A weight is an integer (rank-1 grading) or a vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Int(i64),
    Vec(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDoc {
    pub images: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_invert: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionDoc {
    pub from: String,
    pub to: String,
    pub images: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_invert: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionsDoc {
    #[serde(flatten)]
    pub algebra: StalkDoc,
    pub maps: BTreeMap<String, HomDoc>,
}

/// `"self"`, `"builtin:NAME"` or an embedded space document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetDoc {
    Named(String),
    Space(Box<Document>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub target: TargetDoc,
    pub points: BTreeMap<String, String>,
    pub comorphisms: BTreeMap<String, HomDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModStalkDoc {
    pub gens: usize,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<Weight>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModRestrictionDoc {
    pub from: String,
    pub to: String,
    /// One row per generator at `from`: its image in the module at `to`.
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub points: BTreeMap<String, ModStalkDoc>,
    #[serde(default)]
    pub restrictions: Vec<ModRestrictionDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoofDoc {
    pub left: String,
    pub right: String,
}

/// A loaded space file.
#[derive(Clone, Debug)]
pub struct SpaceFile {
    pub space: FinSpace,
    pub maps: BTreeMap<String, SpaceMap>,
    pub modules: BTreeMap<String, SheafModule>,
    pub roofs: BTreeMap<String, RoofDoc>,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

/// Attaches a path to the errors raised while building from a document.
fn at<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Schema { .. } => e,
        other => schema(path, other.to_string()),
    })
}

/// Parses the JSON text into a [`Document`]; syntax errors carry line and
/// column, type errors the path of the offending value.
pub fn parse_document(text: &str) -> Result<Document> {
    let mut de = serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let msg = format!("{inner}");
        if inner.is_syntax() || inner.is_eof() || path == "." {
            Error::Parse(msg)
        } else {
            schema(path, msg)
        }
    })?;
    de.end().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(doc)
}

pub fn parse_space_file(text: &str, default_field: Field) -> Result<SpaceFile> {
    load(&parse_document(text)?, default_field)
}

fn weights_of(ws: &Option<Vec<Weight>>) -> Option<Vec<Vec<i64>>> {
    ws.as_ref().map(|ws| {
        ws.iter()
            .map(|w| match w {
                Weight::Int(d) => vec![*d],
                Weight::Vec(v) => v.clone(),
            })
            .collect()
    })
}

fn weights_doc(ws: &[Vec<i64>], rank: usize) -> Vec<Weight> {
    ws.iter().map(|w| if rank == 1 { Weight::Int(w[0]) } else { Weight::Vec(w.clone()) }).collect()
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(|s| s.as_str()).collect()
}

fn build_algebra(field: Field, s: &StalkDoc) -> Result<LocAlgebra> {
    LocAlgebra::from_strings(field, &strs(&s.vars), &strs(&s.relations), &strs(&s.invert), weights_of(&s.weights))
}

fn algebra_doc(a: &LocAlgebra) -> StalkDoc {
    StalkDoc {
        vars: a.vars().to_vec(),
        relations: a.relations().iter().map(|p| p.to_string_with(a.vars())).collect(),
        invert: a.inverted().iter().map(|p| p.to_string_with(a.vars())).collect(),
        weights: a.grading().map(|g: &Grading| weights_doc(&g.weights, g.rank)),
    }
}

fn build_hom(src: &LocAlgebra, tgt: &LocAlgebra, images: &BTreeMap<String, String>, extra: &Option<Vec<String>>) -> Result<AlgHom> {
    let pairs: Vec<(&str, &str)> = images.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    let extra: Option<Vec<&str>> = extra.as_ref().map(|e| e.iter().map(|s| s.as_str()).collect());
    AlgHom::parse(src, tgt, &pairs, extra.as_deref())
}

fn hom_doc(h: &AlgHom) -> HomDoc {
    let images = h.source().vars().iter().cloned().zip(h.var_images().iter().map(|e| h.target().format(e))).collect();
    let extra_invert = h.extras().map(|es| es.iter().map(|e| h.source().format(e)).collect());
    HomDoc { images, extra_invert }
}

fn point_index(x_names: &[String], name: &str, path: &str) -> Result<usize> {
    x_names.iter().position(|n| n == name).ok_or_else(|| schema(path, format!("unknown point `{name}`")))
}

fn build_space(doc: &Document, default_field: Field) -> Result<FinSpace> {
    let field = match &doc.field {
        Some(f) => at("field", Field::parse(f))?,
        None => default_field,
    };
    let names = &doc.points;
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(schema(format!("points[{i}]"), format!("duplicate point `{n}`")));
        }
    }
    for k in doc.stalks.keys() {
        if !names.contains(k) {
            return Err(schema(format!("stalks.{k}"), format!("unknown point `{k}`")));
        }
    }
    let mut stalks = Vec::with_capacity(names.len());
    for n in names {
        let s = doc.stalks.get(n).ok_or_else(|| schema("stalks", format!("no stalk for point `{n}`")))?;
        stalks.push(at(&format!("stalks.{n}"), build_algebra(field, s))?);
    }
    let mut order = Vec::new();
    for (i, (a, b)) in doc.order.iter().enumerate() {
        let p = format!("order[{i}]");
        let pair = (point_index(names, a, &p)?, point_index(names, b, &p)?);
        if order.contains(&pair) {
            return Err(schema(p, format!("duplicate pair ({a}, {b})")));
        }
        order.push(pair);
    }
    let mut edges: Vec<Option<((usize, usize), AlgHom)>> = vec![None; order.len()];
    for (i, r) in doc.restrictions.iter().enumerate() {
        let p = format!("restrictions[{i}]");
        let pair = (point_index(names, &r.from, &p)?, point_index(names, &r.to, &p)?);
        let k = order
            .iter()
            .position(|q| *q == pair)
            .ok_or_else(|| schema(&p, format!("({}, {}) is not a listed covering pair", r.from, r.to)))?;
        if edges[k].is_some() {
            return Err(schema(p, format!("second restriction for ({}, {})", r.from, r.to)));
        }
        let h = at(&p, build_hom(&stalks[pair.0], &stalks[pair.1], &r.images, &r.extra_invert))?;
        edges[k] = Some((pair, h));
    }
    let mut given = Vec::with_capacity(order.len());
    for (k, e) in edges.into_iter().enumerate() {
        let (a, b) = &doc.order[k];
        given.push(e.ok_or_else(|| schema("restrictions", format!("no restriction for ({a}, {b})")))?);
    }
    let x = FinSpace::from_edges(field, names.clone(), stalks, given)?;
    let problems = x.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidSpace(problems.join("; ")));
    }
    let Some(gs) = &doc.global_sections else { return Ok(x) };
    let r = at("global_sections", build_algebra(field, &gs.algebra))?;
    let mut maps = Vec::with_capacity(x.len());
    for k in gs.maps.keys() {
        point_index(names, k, &format!("global_sections.maps.{k}"))?;
    }
    for (p, n) in names.iter().enumerate() {
        let path = format!("global_sections.maps.{n}");
        let h = gs.maps.get(n).ok_or_else(|| schema("global_sections.maps", format!("no map to `{n}`")))?;
        maps.push(at(&path, build_hom(&r, x.stalk(p), &h.images, &h.extra_invert))?);
    }
    at("global_sections", x.with_global_sections(GlobalSections { algebra: r, maps }))
}

fn build_map(x: &FinSpace, name: &str, m: &MapDoc, field: Field) -> Result<SpaceMap> {
    let path = format!("maps.{name}");
    let y = match &m.target {
        TargetDoc::Named(s) if s == "self" => x.clone(),
        TargetDoc::Named(s) => match s.strip_prefix("builtin:") {
            Some(b) => at(&format!("{path}.target"), fixtures::builtin(b, x.field()))?,
            None => return Err(schema(format!("{path}.target"), format!("expected `self`, `builtin:NAME` or a space, got `{s}`"))),
        },
        TargetDoc::Space(d) => {
            if !d.maps.is_empty() || !d.modules.is_empty() || !d.roofs.is_empty() {
                return Err(schema(format!("{path}.target"), "an embedded target carries no maps, modules or roofs"));
            }
            let y = build_space(d, field).map_err(|e| match e {
                Error::Schema { path: p, message } => schema(format!("{path}.target.{p}"), message),
                other => schema(format!("{path}.target"), other.to_string()),
            })?;
            if y.field() != x.field() {
                return Err(schema(format!("{path}.target.field"), "target is over a different field"));
            }
            y
        }
    };
    let mut points = Vec::with_capacity(x.len());
    let mut coms = Vec::with_capacity(x.len());
    for k in m.points.keys().chain(m.comorphisms.keys()) {
        point_index(x.names(), k, &path)?;
    }
    for (p, n) in x.names().iter().enumerate() {
        let q = m.points.get(n).ok_or_else(|| schema(format!("{path}.points"), format!("no image for `{n}`")))?;
        let q = point_index(y.names(), q, &format!("{path}.points.{n}"))?;
        let h = m.comorphisms.get(n).ok_or_else(|| schema(format!("{path}.comorphisms"), format!("no comorphism at `{n}`")))?;
        coms.push(at(&format!("{path}.comorphisms.{n}"), build_hom(y.stalk(q), x.stalk(p), &h.images, &h.extra_invert))?);
        points.push(q);
    }
    at(&path, SpaceMap::new(x, &y, points, coms))
}

fn build_module(x: &FinSpace, name: &str, m: &ModuleDoc) -> Result<SheafModule> {
    let path = format!("modules.{name}");
    for k in m.points.keys() {
        point_index(x.names(), k, &format!("{path}.points"))?;
    }
    let mut stalks = Vec::with_capacity(x.len());
    for (p, n) in x.names().iter().enumerate() {
        let pp = format!("{path}.points.{n}");
        let s = m.points.get(n).ok_or_else(|| schema(format!("{path}.points"), format!("no module at `{n}`")))?;
        let ring = x.stalk(p);
        let mut rels = Vec::with_capacity(s.relations.len());
        for (i, row) in s.relations.iter().enumerate() {
            if row.len() != s.gens {
                return Err(schema(format!("{pp}.relations[{i}]"), format!("expected {} entries", s.gens)));
            }
            rels.push(at(&format!("{pp}.relations[{i}]"), row.iter().map(|e| ring.parse(e)).collect::<Result<ModElem>>())?);
        }
        stalks.push(at(&pp, FpModule::new(ring, s.gens, rels, weights_of(&s.shifts)))?);
    }
    let mut edges = Vec::with_capacity(m.restrictions.len());
    for (i, r) in m.restrictions.iter().enumerate() {
        let rp = format!("{path}.restrictions[{i}]");
        let a = point_index(x.names(), &r.from, &rp)?;
        let b = point_index(x.names(), &r.to, &rp)?;
        if r.matrix.len() != stalks[a].ngens() {
            return Err(schema(format!("{rp}.matrix"), format!("expected {} rows", stalks[a].ngens())));
        }
        let mut rows = Vec::with_capacity(r.matrix.len());
        for (j, row) in r.matrix.iter().enumerate() {
            if row.len() != stalks[b].ngens() {
                return Err(schema(format!("{rp}.matrix[{j}]"), format!("expected {} entries", stalks[b].ngens())));
            }
            rows.push(at(&format!("{rp}.matrix[{j}]"), row.iter().map(|e| x.stalk(b).parse(e)).collect::<Result<ModElem>>())?);
        }
        edges.push(((a, b), rows));
    }
    let missing: Vec<String> = edge_pairs(x)
        .into_iter()
        .filter(|&(a, b)| !edges.iter().any(|e| e.0 == (a, b)))
        .map(|(a, b)| format!("({}, {})", x.name(a), x.name(b)))
        .collect();
    if !missing.is_empty() {
        return Err(schema(format!("{path}.restrictions"), format!("missing restrictions for {}", missing.join(", "))));
    }
    let s = at(&path, SheafModule::from_edges(x, stalks, edges))?;
    let problems = s.validate();
    if !problems.is_empty() {
        return Err(schema(path, problems.join("; ")));
    }
    Ok(s)
}

/// Builds the space, maps, modules and roofs described by `doc`.
pub fn load(doc: &Document, default_field: Field) -> Result<SpaceFile> {
    let space = build_space(doc, default_field)?;
    let field = space.field();
    let mut maps = BTreeMap::new();
    for (n, m) in &doc.maps {
        maps.insert(n.clone(), build_map(&space, n, m, field)?);
    }
    let mut modules = BTreeMap::new();
    for (n, m) in &doc.modules {
        modules.insert(n.clone(), build_module(&space, n, m)?);
    }
    for (n, r) in &doc.roofs {
        for (leg, m) in [("left", &r.left), ("right", &r.right)] {
            if !maps.contains_key(m) {
                return Err(schema(format!("roofs.{n}.{leg}"), format!("unknown map `{m}`")));
            }
        }
    }
    Ok(SpaceFile { space, maps, modules, roofs: doc.roofs.clone() })
}

/// Covering pairs plus the pairs of distinct equivalent points: enough
/// edges to regenerate every restriction.
pub fn edge_pairs(x: &FinSpace) -> Vec<(usize, usize)> {
    let mut e = x.covering_pairs();
    for a in 0..x.len() {
        for b in 0..x.len() {
            if a != b && x.leq(a, b) && x.leq(b, a) {
                e.push((a, b));
            }
        }
    }
    e.sort_unstable();
    e
}

/// The document of a bare space.
pub fn space_document(x: &FinSpace) -> Document {
    let n = |i: usize| x.name(i).to_string();
    let pairs = edge_pairs(x);
    let restrictions = pairs
        .iter()
        .map(|&(a, b)| {
            let h = hom_doc(x.restriction(a, b));
            RestrictionDoc { from: n(a), to: n(b), images: h.images, extra_invert: h.extra_invert }
        })
        .collect();
    let global_sections = x.global_sections().map(|gs| SectionsDoc {
        algebra: algebra_doc(&gs.algebra),
        maps: gs.maps.iter().enumerate().map(|(p, h)| (n(p), hom_doc(h))).collect(),
    });
    Document {
        field: Some(x.field().name()),
        points: x.names().to_vec(),
        order: pairs.iter().map(|&(a, b)| (n(a), n(b))).collect(),
        stalks: (0..x.len()).map(|p| (n(p), algebra_doc(x.stalk(p)))).collect(),
        restrictions,
        global_sections,
        maps: BTreeMap::new(),
        modules: BTreeMap::new(),
        roofs: BTreeMap::new(),
    }
}

fn same_space(a: &FinSpace, b: &FinSpace) -> bool {
    a.names() == b.names()
        && a.stalks() == b.stalks()
        && (0..a.len()).all(|p| (0..a.len()).all(|q| a.leq(p, q) == b.leq(p, q)))
}

pub fn map_document(f: &SpaceMap) -> MapDoc {
    let x = f.source();
    let target = if same_space(x, f.target()) {
        TargetDoc::Named("self".into())
    } else {
        TargetDoc::Space(Box::new(space_document(f.target())))
    };
    MapDoc {
        target,
        points: (0..x.len()).map(|p| (x.name(p).to_string(), f.target().name(f.at(p)).to_string())).collect(),
        comorphisms: (0..x.len()).map(|p| (x.name(p).to_string(), hom_doc(f.comorphism(p)))).collect(),
    }
}

pub fn module_document(m: &SheafModule) -> ModuleDoc {
    let x = m.space();
    let points = (0..x.len())
        .map(|p| {
            let s = m.stalk(p);
            let ring = s.ring();
            let doc = ModStalkDoc {
                gens: s.ngens(),
                relations: s.relations().iter().map(|r| r.iter().map(|e| ring.format(e)).collect()).collect(),
                shifts: s.shifts().map(|sh| weights_doc(sh, ring.grading().map(|g| g.rank).unwrap_or(sh.first().map_or(0, |v| v.len())))),
            };
            (x.name(p).to_string(), doc)
        })
        .collect();
    let restrictions = edge_pairs(x)
        .into_iter()
        .map(|(a, b)| ModRestrictionDoc {
            from: x.name(a).to_string(),
            to: x.name(b).to_string(),
            matrix: m.restriction(a, b).matrix.iter().map(|row| row.iter().map(|e| x.stalk(b).format(e)).collect()).collect(),
        })
        .collect();
    ModuleDoc { points, restrictions }
}

impl SpaceFile {
    pub fn bare(space: FinSpace) -> SpaceFile {
        SpaceFile { space, maps: BTreeMap::new(), modules: BTreeMap::new(), roofs: BTreeMap::new() }
    }

    pub fn to_document(&self) -> Document {
        let mut d = space_document(&self.space);
        d.maps = self.maps.iter().map(|(n, f)| (n.clone(), map_document(f))).collect();
        d.modules = self.modules.iter().map(|(n, m)| (n.clone(), module_document(m))).collect();
        d.roofs = self.roofs.clone();
        d
    }

    pub fn to_json(&self) -> String {
        to_json(&self.to_document())
    }
}

pub fn to_json(doc: &Document) -> String {
    serde_json::to_string_pretty(doc).expect("documents always serialize")
}

/// The built-in spaces as files; `p1` carries the identity and the chart
/// swap as maps and the corresponding roofs.
pub fn builtin_file(name: &str, field: Field) -> Result<SpaceFile> {
    let x = fixtures::builtin(name, field)?;
    let mut f = SpaceFile::bare(x.clone());
    if name == "p1" {
        f.maps.insert("id".into(), SpaceMap::identity(&x));
        f.maps.insert("swap".into(), fixtures::p1_swap(&x));
        f.roofs.insert("identity".into(), RoofDoc { left: "id".into(), right: "id".into() });
        f.roofs.insert("swap".into(), RoofDoc { left: "id".into(), right: "swap".into() });
    }
    Ok(f)
}

/// `point(RING)` with `RING` like `Q[x,y]`, `F101[x,1/x]` or
/// `Q[x,y]/(x*y - 1)`: one point, variables of weight 1, entries `1/f`
/// inverting `f`.
pub fn point_space(spec: &str, default_field: Field) -> Result<FinSpace> {
    let bad = || Error::Parse(format!("cannot read ring `{spec}`; expected e.g. `Q[x,y]/(x*y)`"));
    let s = spec.trim();
    let open = s.find('[').ok_or_else(bad)?;
    let close = s.find(']').ok_or_else(bad)?;
    if close < open {
        return Err(bad());
    }
    let field = match s[..open].trim() {
        "" | "k" => default_field,
        f => Field::parse(f)?,
    };
    let mut vars = Vec::new();
    let mut invert = Vec::new();
    for t in s[open + 1..close].split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match t.strip_prefix("1/") {
            Some(f) => invert.push(f.to_string()),
            None => vars.push(t.to_string()),
        }
    }
    let rest = s[close + 1..].trim();
    let relations: Vec<String> = if rest.is_empty() {
        vec![]
    } else {
        let inner = rest.strip_prefix('/').map(str::trim).and_then(|r| r.strip_prefix('(')).and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        inner.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
    };
    let doc = StalkDoc { weights: Some(vars.iter().map(|_| Weight::Int(1)).collect()), vars, relations, invert };
    let a = build_algebra(field, &doc).or_else(|_| build_algebra(field, &StalkDoc { weights: None, ..doc }))?;
    Ok(FinSpace::point(&a))
}

/// Reads `builtin:NAME`, `point(RING)` or a path.
pub fn load_input(input: &str, default_field: Field) -> Result<SpaceFile> {
    if let Some(name) = input.strip_prefix("builtin:") {
        return builtin_file(name, default_field);
    }
    if let Some(r) = input.strip_prefix("point(").and_then(|r| r.strip_suffix(')')) {
        return Ok(SpaceFile::bare(point_space(r, default_field)?));
    }
    let text = std::fs::read_to_string(input).map_err(|e| Error::Parse(format!("{input}: {e}")))?;
    parse_space_file(&text, default_field)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn builtins_round_trip() {
        for n in fixtures::BUILTIN_NAMES {
            let f = builtin_file(n, Field::Rationals).unwrap();
            let a = f.to_json();
            let g = parse_space_file(&a, Field::Rationals).unwrap();
            let b = g.to_json();
            assert_eq!(tree(&a), tree(&b), "{n}");
            assert!(g.space.find_isomorphism(&f.space).is_some());
            for (k, m) in &f.maps {
                assert!(g.maps[k].equals(m));
            }
        }
    }

    #[test]
    fn modules_round_trip() {
        let x = fixtures::p1(Field::Rationals);
        let mut f = SpaceFile::bare(x.clone());
        f.modules.insert("O(-2)".into(), fixtures::p1_twist(&x, -2));
        let a = f.to_json();
        let b = parse_space_file(&a, Field::Rationals).unwrap().to_json();
        assert_eq!(tree(&a), tree(&b));
    }

    #[test]
    fn errors_name_locations() {
        match parse_document("{\n  \"points\": [\"a\",\n}") {
            Err(Error::Parse(m)) => assert!(m.contains("line"), "{m}"),
            other => panic!("{other:?}"),
        }
        let text = r#"{"points": ["a"], "stalks": {"a": {"vars": 3}}}"#;
        match parse_document(text) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "stalks.a.vars"),
            other => panic!("{other:?}"),
        }
        let text = r#"{"points": ["a"], "stalks": {"a": {}}, "colour": 1}"#;
        assert!(matches!(parse_document(text), Err(Error::Schema { .. }) | Err(Error::Parse(_))));
        let text = r#"{"points": ["a"], "order": [["a", "b"]], "stalks": {"a": {}}}"#;
        match parse_space_file(text, Field::Rationals) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "order[0]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn point_rings() {
        let x = point_space("Q[x,1/x]", Field::Rationals).unwrap();
        assert_eq!(x.stalk(0).ninv(), 1);
        let y = point_space("F101[x,y]/(x*y - 1)", Field::Rationals).unwrap();
        assert_eq!(y.field(), Field::Prime(101));
        assert!(point_space("Q(x)", Field::Rationals).is_err());
    }
}
