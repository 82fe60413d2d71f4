//! JSON persistence of exact tree maps and JSON views of computed results.
//!
//! A document looks like
//!
//! ```json
//! {
//!   "formatVersion": 1,
//!   "vertices": [{ "id": "a", "tag": "julia" }, { "id": "b", "tag": "julia" }],
//!   "edges": [["a", "b"]],
//!   "subdivisions": { "e0": ["1/3", "2/3"] },
//!   "vertexImage": { "a": "a", "b": "b", "e0:1/3": "b", "e0:2/3": "a" },
//!   "weights": { "e0#0": "1/1", "e0#1": "1/1", "e0#2": "1/1" },
//!   "labels": { "e0:1/3": "b-1", "e0:2/3": "a-1" }
//! }
//! ```
//!
//! Edge `e<k>` is the `k`-th entry of `edges`, parametrized from its first
//! vertex to its second. Segment `e<k>#<i>` is the `i`-th piece of `e<k>`
//! counted from coordinate 0. Rationals are written `p/q` in lowest terms.
//! Missing weights default to `1/1` and missing labels to the point
//! reference.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graft::{GraftReport, GraftResult};
use crate::orbits::{CantorReport, MarkovGraph, PeriodicOrbit};
use crate::scalar::{parse_ratio, ratio_string};
use crate::spectral::{Matrix, SpectralCertificate, SpectralEstimate};
use crate::tree::{EdgeId, Tag, Tree, TreeMapBuilder, TreePoint};
use crate::{Rational, TreeMap};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexEntry {
    pub id: String,
    #[serde(default = "untagged")]
    pub tag: String,
}

fn untagged() -> String {
    Tag::Untagged.as_str().into()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graft: Option<GraftMetadata>,
}

impl Metadata {
    pub fn named(name: impl Into<String>) -> Self {
        Metadata {
            name: Some(name.into()),
            ..Metadata::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == Metadata::default()
    }
}

/// Attachment data of a grafted map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GraftMetadata {
    /// Vertex names `x0, .., x(p-1)`.
    pub orbit: Vec<String>,
    pub branch: String,
    /// Copy vertex name → original vertex name and copy index.
    pub copies: BTreeMap<String, CopyEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CopyEntry {
    pub of: String,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TreeMapDocument {
    pub format_version: u32,
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<[String; 2]>,
    #[serde(default)]
    pub subdivisions: BTreeMap<String, Vec<String>>,
    pub vertex_image: BTreeMap<String, String>,
    #[serde(default)]
    pub weights: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

/// `e<k>:<p/q>`, or the vertex name for a vertex.
pub fn point_ref(tree: &Tree, p: &TreePoint<Rational>) -> String {
    match tree.vertex_at(p) {
        Some(v) => tree.vertex(v).name.clone(),
        None => format!("{}:{}", p.edge, ratio_string(&p.t)),
    }
}

/// `e<k>:<p/q>` even for vertices.
pub fn point_coordinate(p: &TreePoint<Rational>) -> String {
    format!("{}:{}", p.edge, ratio_string(&p.t))
}

fn mark_ref(e: EdgeId, t: &Rational) -> String {
    format!("{e}:{}", ratio_string(t))
}

impl TreeMapDocument {
    pub fn from_map(tm: &TreeMap, metadata: Metadata) -> Self {
        let tree = tm.tree();
        let vertices = tree
            .vertices()
            .map(|(_, v)| VertexEntry {
                id: v.name.clone(),
                tag: v.tag.as_str().into(),
            })
            .collect();
        let edges = tree
            .edges()
            .map(|(_, [a, b])| [tree.vertex(a).name.clone(), tree.vertex(b).name.clone()])
            .collect();
        let mut subdivisions = BTreeMap::new();
        let mut vertex_image = BTreeMap::new();
        let mut weights = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for (v, vx) in tree.vertices() {
            vertex_image.insert(vx.name.clone(), tree.vertex(tm.vertex_image(v)).name.clone());
        }
        for (e, _) in tree.edges() {
            let marks = tm.marks(e);
            subdivisions.insert(e.to_string(), marks.iter().map(|m| ratio_string(&m.t)).collect());
            for m in marks {
                let r = mark_ref(e, &m.t);
                vertex_image.insert(r.clone(), tree.vertex(m.image).name.clone());
                if m.label != format!("{e}:{}", m.t) {
                    labels.insert(r, m.label.clone());
                }
            }
            for s in tm.segments_of(e) {
                weights.insert(s.label(), ratio_string(&s.weight));
            }
        }
        TreeMapDocument {
            format_version: FORMAT_VERSION,
            vertices,
            edges,
            subdivisions,
            vertex_image,
            weights,
            labels,
            metadata,
        }
    }

    /// Builds and validates the map.
    pub fn to_map(&self) -> Result<TreeMap> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::parse(
                "formatVersion",
                format!("unsupported version {}, expected {FORMAT_VERSION}", self.format_version),
            ));
        }
        let mut b = TreeMapBuilder::<Rational>::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let tag = Tag::parse(&v.tag)
                .ok_or_else(|| Error::parse(format!("vertices[{i}].tag"), format!("unknown tag {:?}", v.tag)))?;
            b = b.vertex(v.id.clone(), tag);
        }
        for [from, to] in &self.edges {
            b = b.edge(from.clone(), to.clone());
        }
        let ne = self.edges.len();
        let edge_index = |key: &str, context: &str| -> Result<usize> {
            key.strip_prefix('e')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|k| *k < ne && format!("e{k}") == key)
                .ok_or_else(|| Error::parse(context, format!("unknown edge {key:?}")))
        };
        let mut mark_count = vec![0usize; ne];
        let mut mark_refs = Vec::new();
        for (key, coords) in &self.subdivisions {
            let e = edge_index(key, &format!("subdivisions.{key}"))?;
            mark_count[e] = coords.len();
            for (i, c) in coords.iter().enumerate() {
                let context = format!("subdivisions.{key}[{i}]");
                let t = parse_ratio(c).ok_or_else(|| Error::parse(&context, format!("not a rational: {c:?}")))?;
                let r = mark_ref(EdgeId(e), &t);
                let image = self
                    .vertex_image
                    .get(&r)
                    .ok_or_else(|| Error::parse(&context, format!("no image given for {r}")))?;
                b = match self.labels.get(&r) {
                    Some(l) => b.mark(e, t, l.clone(), image.clone()),
                    None => b.unlabelled_mark(e, t, image.clone()),
                };
                mark_refs.push(r);
            }
        }
        let vertex_names: Vec<&str> = self.vertices.iter().map(|v| v.id.as_str()).collect();
        for (key, target) in &self.vertex_image {
            if vertex_names.contains(&key.as_str()) {
                b = b.image(key.clone(), target.clone());
            } else if !mark_refs.contains(key) {
                return Err(Error::parse(
                    format!("vertexImage.{key}"),
                    "neither a vertex nor a subdivision point",
                ));
            }
        }
        for key in self.labels.keys() {
            if !mark_refs.contains(key) {
                return Err(Error::parse(format!("labels.{key}"), "not a subdivision point"));
            }
        }
        let mut weights: Vec<Vec<Rational>> = mark_count.iter().map(|k| vec![Rational::from_integer(1.into()); k + 1]).collect();
        for (key, w) in &self.weights {
            let context = format!("weights.{key}");
            let (e, i) = key
                .split_once('#')
                .ok_or_else(|| Error::parse(&context, "segment reference must look like e<k>#<i>"))?;
            let e = edge_index(e, &context)?;
            let i: usize = i
                .parse()
                .ok()
                .filter(|i| *i <= mark_count[e])
                .ok_or_else(|| Error::parse(&context, "no such segment"))?;
            weights[e][i] = parse_ratio(w).ok_or_else(|| Error::parse(&context, format!("not a rational: {w:?}")))?;
        }
        for (e, w) in weights.into_iter().enumerate() {
            b = b.weights(e, w);
        }
        b.build()
    }
}

pub fn parse_document(text: &str) -> Result<TreeMapDocument> {
    serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })
}

/// Parses and validates a document.
pub fn parse(text: &str) -> Result<(TreeMap, Metadata)> {
    let doc = parse_document(text)?;
    let tm = doc.to_map()?;
    Ok((tm, doc.metadata))
}

/// Pretty-printed canonical document, newline terminated.
pub fn serialize(tm: &TreeMap, metadata: &Metadata) -> String {
    let doc = TreeMapDocument::from_map(tm, metadata.clone());
    let mut s = serde_json::to_string_pretty(&doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn graft_metadata(result: &GraftResult<Rational>, name: Option<String>) -> Metadata {
    let g = result.grafted.tree();
    let copies = result
        .copies
        .iter()
        .flat_map(|c| {
            c.vertices.iter().map(move |(orig, copy)| {
                (
                    g.vertex(*copy).name.clone(),
                    CopyEntry {
                        of: g.vertex(*orig).name.clone(),
                        index: c.index,
                    },
                )
            })
        })
        .collect();
    Metadata {
        name,
        provenance: Some(format!("self-graft along a period-{} orbit", result.period())),
        graft: Some(GraftMetadata {
            orbit: result.orbit_vertices.iter().map(|v| g.vertex(*v).name.clone()).collect(),
            branch: result.branch.to_string(),
            copies,
        }),
    }
}

// JSON views of results

pub fn error_json(e: &Error) -> Value {
    let violations: Vec<Value> = e
        .violations()
        .iter()
        .map(|v| json!({ "code": v.code(), "message": v.to_string() }))
        .collect();
    json!({ "error": e.code(), "message": e.to_string(), "violations": violations })
}

pub fn validation_json(tm: &TreeMap) -> Value {
    let tree = tm.tree();
    let cycles: Vec<Value> = tm
        .vertex_dynamics()
        .cycles
        .iter()
        .map(|c| {
            json!({
                "vertices": c.vertices.iter().map(|v| tree.vertex(*v).name.clone()).collect::<Vec<_>>(),
                "label": format!("{:?}", c.label).to_uppercase(),
            })
        })
        .collect();
    let n = match tm.count_julia_cycles() {
        Ok(n) => json!(n),
        Err(_) => Value::Null,
    };
    json!({
        "valid": true,
        "vertices": tree.vertex_count(),
        "edges": tree.edge_count(),
        "segments": tm.segments().len(),
        "vertexCycles": cycles,
        "juliaCycles": n,
    })
}

pub fn matrix_json(m: &Matrix<Rational>) -> Value {
    json!({
        "labels": m.labels(),
        "rows": m.rows().iter().map(|r| r.iter().map(ratio_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn certificate_json(c: &SpectralCertificate<Rational>) -> Value {
    json!({
        "kind": c.kind.as_str(),
        "bound": ratio_string(&c.bound),
        "witness": c.witness.iter().map(ratio_string).collect::<Vec<_>>(),
    })
}

/// `"<1"`, `">=1"` or `"undecided"`.
pub fn verdict(est: &SpectralEstimate<Rational>) -> &'static str {
    let one = Rational::from_integer(1.into());
    if est.certifies_below_one() {
        "<1"
    } else if est.exact.as_ref().is_some_and(|x| *x >= one)
        || (est.lower >= one && est.lower_certificate.is_some())
    {
        ">=1"
    } else {
        "undecided"
    }
}

pub fn estimate_json(est: &SpectralEstimate<Rational>) -> Value {
    json!({
        "lower": ratio_string(&est.lower),
        "upper": ratio_string(&est.upper),
        "estimate": est.estimate,
        "exact": est.exact.as_ref().map(ratio_string),
        "verdict": verdict(est),
        "lowerCertificate": est.lower_certificate.as_ref().map(certificate_json),
        "upperCertificate": est.upper_certificate.as_ref().map(certificate_json),
    })
}

pub fn orbit_json(tm: &TreeMap, o: &PeriodicOrbit<Rational>) -> Value {
    let tree = tm.tree();
    json!({
        "id": o.id,
        "period": o.period,
        "class": o.class.as_str(),
        "itinerary": o.itinerary.iter().map(|s| tm.segment(*s).label()).collect::<Vec<_>>(),
        "points": o.points.iter().map(point_coordinate).collect::<Vec<_>>(),
        "pointLabels": o.points.iter().map(|p| point_ref(tree, p)).collect::<Vec<_>>(),
        "fixedPoint": o.fixed_point().map(point_coordinate),
        "slope": ratio_string(&o.slope),
        "multiplierSign": o.multiplier_sign(),
    })
}

pub fn orbits_json(tm: &TreeMap, orbits: &[PeriodicOrbit<Rational>]) -> Value {
    Value::Array(orbits.iter().map(|o| orbit_json(tm, o)).collect())
}

pub fn cantor_json(r: &CantorReport<Rational>) -> Value {
    let edges = |es: &[EdgeId]| es.iter().map(|e| e.to_string()).collect::<Vec<_>>();
    json!({
        "status": r.status,
        "blocks": r.blocks.iter().map(|b| json!({
            "edges": edges(&b.edges),
            "exceedsOne": b.exceeds_one,
            "lowerCertificate": b.lower_certificate.as_ref().map(certificate_json),
        })).collect::<Vec<_>>(),
        "witness": r.witness.as_ref().map(|w| json!({
            "edges": edges(&w.edges),
            "countMatrix": matrix_json(&w.count_matrix),
            "certificate": certificate_json(&w.certificate),
        })),
        "growthEdges": edges(&r.growth_edges),
        "growth": r.growth.iter().map(|row| row.iter().map(ratio_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn graft_report_json(result: &GraftResult<Rational>, report: Option<&GraftReport<Rational>>) -> Value {
    let g = result.grafted.tree();
    json!({
        "period": result.period(),
        "branch": result.branch.to_string(),
        "orbit": result.orbit_vertices.iter().map(|v| g.vertex(*v).name.clone()).collect::<Vec<_>>(),
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "checks": report.map(|r| r.checks.iter().map(|c| json!({
            "check": c.kind.as_str(),
            "status": c.status.as_str(),
            "detail": c.detail,
            "certificate": c.certificate.as_ref().map(certificate_json),
        })).collect::<Vec<_>>()),
    })
}

pub fn markov_json(graph: &MarkovGraph) -> Value {
    json!({
        "nodes": graph.nodes.iter().map(|n| json!({
            "segment": n.label,
            "edge": n.edge.to_string(),
            "image": n.image.to_string(),
        })).collect::<Vec<_>>(),
        "arcs": graph.arcs().map(|(a, b)| json!([graph.nodes[a].label, graph.nodes[b].label])).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig2_toy, persian_carpet};

    #[test]
    fn fixtures_round_trip() {
        for tm in [persian_carpet::<Rational>(), fig2_toy()] {
            let text = serialize(&tm, &Metadata::named("fixture"));
            let (back, meta) = parse(&text).unwrap();
            assert_eq!(back, tm);
            assert_eq!(meta.name.as_deref(), Some("fixture"));
            assert_eq!(serialize(&back, &meta), text);
        }
    }

    #[test]
    fn document_errors() {
        let tm = fig2_toy::<Rational>();
        let mut doc = TreeMapDocument::from_map(&tm, Metadata::default());
        doc.weights.insert("e0#1".into(), "0/1".into());
        let err = doc.to_map().unwrap_err();
        assert_eq!(err.violations()[0].code(), "NONPOSITIVE_WEIGHT");

        let mut doc = TreeMapDocument::from_map(&tm, Metadata::default());
        doc.vertices.push(VertexEntry { id: "c".into(), tag: "julia".into() });
        doc.edges.push(["b".into(), "c".into()]);
        doc.edges.push(["c".into(), "a".into()]);
        doc.vertex_image.insert("c".into(), "c".into());
        let err = doc.to_map().unwrap_err();
        assert!(err.violations().iter().any(|v| v.code() == "NOT_A_TREE"));

        let err = parse("{ \"formatVersion\": 1,").unwrap_err();
        assert_eq!(err.code(), "PARSE_ERROR");
        let mut doc = TreeMapDocument::from_map(&tm, Metadata::default());
        doc.subdivisions.insert("e0".into(), vec!["1/3".into(), "two thirds".into()]);
        match doc.to_map().unwrap_err() {
            Error::Parse { context, .. } => assert_eq!(context, "subdivisions.e0[1]"),
            e => panic!("{e}"),
        }
    }
}
