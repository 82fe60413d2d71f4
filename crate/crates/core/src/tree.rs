//! Finite trees, marked points, and piecewise-linear tree maps.
//!
//! A [`MarkedTreeMap`] is a finite tree `T` with vertex set `X0`, a finer
//! marked set `X1 ⊇ X0` of subdivision points, and a continuous map that
//! sends every `X1`-segment affinely onto an edge of `(T, X0)`. Edges carry
//! the canonical parametrization `[0, 1]` from their first endpoint to their
//! second, and every segment carries a positive weight.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result, Violation};
use crate::scalar::{self, Scalar};

/// Default cap on the size of refined marked sets.
pub const DEFAULT_POINT_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Caller-supplied vertex metadata: which kind of complementary piece the
/// vertex stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    Fatou,
    Julia,
    Untagged,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Fatou => "fatou",
            Tag::Julia => "julia",
            Tag::Untagged => "untagged",
        }
    }

    pub fn parse(s: &str) -> Option<Tag> {
        match s.to_ascii_lowercase().as_str() {
            "fatou" => Some(Tag::Fatou),
            "julia" => Some(Tag::Julia),
            "untagged" | "" => Some(Tag::Untagged),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub tag: Tag,
}

impl Vertex {
    pub fn new(name: impl Into<String>, tag: Tag) -> Self {
        Vertex {
            name: name.into(),
            tag,
        }
    }
}

/// A finite combinatorial tree with oriented edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    vertices: Vec<Vertex>,
    edges: Vec<[VertexId; 2]>,
    incident: Vec<Vec<EdgeId>>,
}

impl Tree {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<[VertexId; 2]>) -> Result<Self, Vec<Violation>> {
        let mut violations = Vec::new();
        let n = vertices.len();
        let mut names = HashSet::new();
        for v in &vertices {
            if !names.insert(v.name.as_str()) {
                violations.push(Violation::Malformed(format!(
                    "duplicate vertex name {}",
                    v.name
                )));
            }
        }
        if edges.is_empty() {
            violations.push(Violation::NotATree("a tree map needs at least one edge".into()));
        }
        let mut incident = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (i, &[u, v]) in edges.iter().enumerate() {
            if u.0 >= n || v.0 >= n {
                violations.push(Violation::Malformed(format!("edge e{i} has an unknown endpoint")));
                continue;
            }
            if u == v {
                violations.push(Violation::NotATree(format!(
                    "edge e{i} is a loop at {}",
                    vertices[u.0].name
                )));
                continue;
            }
            if !seen.insert((u.min(v), u.max(v))) {
                violations.push(Violation::NotATree(format!(
                    "edge e{i} duplicates [{}, {}]",
                    vertices[u.0].name, vertices[v.0].name
                )));
            }
            incident[u.0].push(EdgeId(i));
            incident[v.0].push(EdgeId(i));
        }
        if !violations.is_empty() {
            return Err(violations);
        }
        if edges.len() + 1 != n {
            violations.push(Violation::NotATree(format!(
                "{} vertices but {} edges",
                n,
                edges.len()
            )));
        }
        // connectivity
        let mut reached = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        reached[0] = true;
        while let Some(u) = queue.pop_front() {
            for e in &incident[u] {
                let w = other_end(&edges[e.0], VertexId(u)).0;
                if !reached[w] {
                    reached[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = reached.iter().position(|r| !r) {
            violations.push(Violation::NotATree(format!(
                "vertex {} is not connected to {}",
                vertices[v].name, vertices[0].name
            )));
        }
        if violations.is_empty() {
            Ok(Tree {
                vertices,
                edges,
                incident,
            })
        } else {
            Err(violations)
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.0]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &Vertex)> {
        self.vertices.iter().enumerate().map(|(i, v)| (VertexId(i), v))
    }

    pub fn edge(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e.0]
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, [VertexId; 2])> + '_ {
        self.edges.iter().enumerate().map(|(i, e)| (EdgeId(i), *e))
    }

    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v.0]
    }

    pub fn find_vertex(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.name == name).map(VertexId)
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.incident[u.0]
            .iter()
            .copied()
            .find(|e| other_end(&self.edges[e.0], u) == v)
    }

    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        other_end(&self.edges[e.0], v)
    }

    /// Point at coordinate `t` on `edge`, in normal form.
    pub fn point<S: Scalar>(&self, edge: EdgeId, t: S) -> TreePoint<S> {
        debug_assert!(t >= S::zero() && t <= S::one(), "coordinate {t} outside [0,1]");
        if t.is_zero() {
            self.vertex_point(self.edges[edge.0][0])
        } else if t.is_one() {
            self.vertex_point(self.edges[edge.0][1])
        } else {
            TreePoint { edge, t }
        }
    }

    /// Normal form of a vertex: lowest incident edge, then its coordinate there.
    pub fn vertex_point<S: Scalar>(&self, v: VertexId) -> TreePoint<S> {
        let edge = self.incident[v.0][0];
        let t = if self.edges[edge.0][0] == v {
            S::zero()
        } else {
            S::one()
        };
        TreePoint { edge, t }
    }

    pub fn vertex_at<S: Scalar>(&self, p: &TreePoint<S>) -> Option<VertexId> {
        if p.t.is_zero() {
            Some(self.edges[p.edge.0][0])
        } else if p.t.is_one() {
            Some(self.edges[p.edge.0][1])
        } else {
            None
        }
    }

    /// Coordinate of `p` on the closed edge `edge`, if `p` lies on it.
    pub fn coordinate_on<S: Scalar>(&self, p: &TreePoint<S>, edge: EdgeId) -> Option<S> {
        if p.edge == edge {
            return Some(p.t.clone());
        }
        let v = self.vertex_at(p)?;
        let [a, b] = self.edges[edge.0];
        if v == a {
            Some(S::zero())
        } else if v == b {
            Some(S::one())
        } else {
            None
        }
    }

    /// Vertex name, or `e<k>:<t>` for an interior point.
    pub fn point_label<S: Scalar>(&self, p: &TreePoint<S>) -> String {
        match self.vertex_at(p) {
            Some(v) => self.vertices[v.0].name.clone(),
            None => p.to_string(),
        }
    }

    /// Vertices of the component of `T \ {cut}` that contains `start`.
    pub fn component_avoiding(&self, start: VertexId, cut: VertexId) -> Vec<VertexId> {
        let mut seen = vec![false; self.vertices.len()];
        seen[cut.0] = true;
        seen[start.0] = true;
        let mut out = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for e in &self.incident[u.0] {
                let w = self.other_end(*e, u);
                if !seen[w.0] {
                    seen[w.0] = true;
                    out.push(w);
                    queue.push_back(w);
                }
            }
        }
        out.sort();
        out
    }
}

fn other_end(edge: &[VertexId; 2], v: VertexId) -> VertexId {
    if edge[0] == v {
        edge[1]
    } else {
        edge[0]
    }
}

/// A point of a tree: an edge and a coordinate in `[0, 1]`.
///
/// Values built through [`Tree::point`] are in normal form, so equality of
/// points is equality of the underlying topological points.
#[derive(Clone, Debug, PartialEq)]
pub struct TreePoint<S> {
    pub edge: EdgeId,
    pub t: S,
}

impl<S: Scalar> TreePoint<S> {
    fn sort_key_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.edge
            .cmp(&other.edge)
            .then_with(|| scalar::cmp(&self.t, &other.t))
    }
}

impl<S: Scalar> fmt::Display for TreePoint<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.edge, self.t)
    }
}

/// A finite set of tree points in normal form, kept sorted.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedSet<S> {
    points: Vec<TreePoint<S>>,
}

impl<S: Scalar> MarkedSet<S> {
    pub fn from_points(points: impl IntoIterator<Item = TreePoint<S>>) -> Self {
        let mut points: Vec<_> = points.into_iter().collect();
        points.sort_by(|a, b| a.sort_key_cmp(b));
        points.dedup();
        MarkedSet { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TreePoint<S>> {
        self.points.iter()
    }

    pub fn contains(&self, p: &TreePoint<S>) -> bool {
        self.points.binary_search_by(|q| q.sort_key_cmp(p)).is_ok()
    }

    pub fn is_subset(&self, other: &MarkedSet<S>) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    /// Coordinates of the set's points on the closed edge `edge`, sorted.
    pub fn coordinates_on(&self, tree: &Tree, edge: EdgeId) -> Vec<S> {
        let mut out: Vec<S> = self
            .points
            .iter()
            .filter_map(|p| tree.coordinate_on(p, edge))
            .collect();
        out.sort_by(scalar::cmp);
        out.dedup();
        out
    }
}

impl<S> IntoIterator for MarkedSet<S> {
    type Item = TreePoint<S>;
    type IntoIter = std::vec::IntoIter<TreePoint<S>>;
    fn into_iter(self) -> Self::IntoIter {
        self.points.into_iter()
    }
}

/// An interior subdivision point of an edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Mark<S> {
    pub t: S,
    pub label: String,
    pub image: VertexId,
}

/// A segment of `(T, X1)`: the closed piece of an edge between consecutive
/// marked points.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment<S> {
    pub id: SegmentId,
    pub edge: EdgeId,
    /// Position of the segment along its edge, starting at 0.
    pub index: usize,
    pub start: S,
    pub end: S,
    /// Image vertex of the start point.
    pub from: VertexId,
    /// Image vertex of the end point.
    pub to: VertexId,
    /// Edge of `(T, X0)` the segment maps onto.
    pub image: EdgeId,
    pub weight: S,
}

impl<S: Scalar> Segment<S> {
    pub fn label(&self) -> String {
        format!("{}#{}", self.edge, self.index)
    }

    pub fn len(&self) -> S {
        self.end.clone() - self.start.clone()
    }

    pub fn is_whole_edge(&self) -> bool {
        self.start.is_zero() && self.end.is_one()
    }

    /// Whether the map reverses orientation from this edge to the image edge.
    pub fn reversed(&self, tree: &Tree) -> bool {
        tree.edge(self.image)[0] != self.from
    }

    /// Affine map `t ↦ scale·t + offset` from this edge's coordinate to the
    /// image edge's coordinate.
    pub fn affine(&self, tree: &Tree) -> Affine<S> {
        let inv = S::one() / self.len();
        if self.reversed(tree) {
            // t ↦ 1 - (t - start)/len
            Affine {
                scale: -inv.clone(),
                offset: S::one() + self.start.clone() * inv,
            }
        } else {
            Affine {
                scale: inv.clone(),
                offset: -(self.start.clone() * inv),
            }
        }
    }

    pub fn contains(&self, t: &S) -> bool {
        *t >= self.start && *t <= self.end
    }
}

/// An affine map of the line with exact coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine<S> {
    pub scale: S,
    pub offset: S,
}

impl<S: Scalar> Affine<S> {
    pub fn identity() -> Self {
        Affine {
            scale: S::one(),
            offset: S::zero(),
        }
    }

    pub fn apply(&self, t: &S) -> S {
        self.scale.clone() * t.clone() + self.offset.clone()
    }

    pub fn invert(&self, u: &S) -> S {
        (u.clone() - self.offset.clone()) / self.scale.clone()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Affine<S>) -> Affine<S> {
        Affine {
            scale: other.scale.clone() * self.scale.clone(),
            offset: other.scale.clone() * self.offset.clone() + other.offset.clone(),
        }
    }

    /// Unique fixed point, when the scale differs from 1.
    pub fn fixed_point(&self) -> Option<S> {
        let denom = S::one() - self.scale.clone();
        (!denom.is_zero()).then(|| self.offset.clone() / denom)
    }
}

/// Labelled vertex cycle of the vertex dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleLabel {
    Julia,
    Fatou,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCycle {
    /// Starts at the smallest vertex id and follows the map.
    pub vertices: Vec<VertexId>,
    pub label: CycleLabel,
}

impl VertexCycle {
    pub fn period(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexDynamics {
    pub map: Vec<VertexId>,
    pub cycles: Vec<VertexCycle>,
}

/// A validated piecewise-linear tree map.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkedTreeMap<S> {
    tree: Tree,
    marks: Vec<Vec<Mark<S>>>,
    vertex_image: Vec<VertexId>,
    segments: Vec<Segment<S>>,
    edge_segments: Vec<Range<usize>>,
}

impl<S: Scalar> MarkedTreeMap<S> {
    /// Validates the parts and assembles the map. Every violated invariant is
    /// reported, not only the first.
    pub fn from_parts(
        tree: Tree,
        marks: Vec<Vec<Mark<S>>>,
        vertex_image: Vec<VertexId>,
        weights: Vec<Vec<S>>,
    ) -> Result<Self> {
        let mut violations = Vec::new();
        let ne = tree.edge_count();
        if marks.len() != ne || weights.len() != ne {
            return Err(Error::Invalid(vec![Violation::Malformed(format!(
                "expected subdivision and weight lists for {ne} edges"
            ))]));
        }
        if vertex_image.len() != tree.vertex_count() {
            return Err(Error::Invalid(vec![Violation::Malformed(
                "every vertex needs an image".into(),
            )]));
        }
        let nv = tree.vertex_count();
        for (v, img) in vertex_image.iter().enumerate() {
            if img.0 >= nv {
                violations.push(Violation::VertexEscapesX0 {
                    point: tree.vertices[v].name.clone(),
                    target: format!("#{}", img.0),
                });
            }
        }
        for (e, ms) in marks.iter().enumerate() {
            let mut prev = S::zero();
            for m in ms {
                if m.t <= prev || m.t >= S::one() {
                    violations.push(Violation::Malformed(format!(
                        "subdivision of e{e} is not strictly increasing inside (0,1) at {}",
                        m.t
                    )));
                }
                if m.image.0 >= nv {
                    violations.push(Violation::VertexEscapesX0 {
                        point: format!("e{e}:{}", m.t),
                        target: format!("#{}", m.image.0),
                    });
                }
                prev = m.t.clone();
            }
            if weights[e].len() != ms.len() + 1 {
                violations.push(Violation::Malformed(format!(
                    "e{e} has {} segments but {} weights",
                    ms.len() + 1,
                    weights[e].len()
                )));
            }
        }
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }

        let mut segments = Vec::new();
        let mut edge_segments = Vec::with_capacity(ne);
        for (e, ms) in marks.iter().enumerate() {
            let [a, b] = tree.edges[e];
            let begin = segments.len();
            let mut points: Vec<(S, VertexId)> = Vec::with_capacity(ms.len() + 2);
            points.push((S::zero(), vertex_image[a.0]));
            points.extend(ms.iter().map(|m| (m.t.clone(), m.image)));
            points.push((S::one(), vertex_image[b.0]));
            for (k, pair) in points.windows(2).enumerate() {
                let (start, from) = pair[0].clone();
                let (end, to) = pair[1].clone();
                let label = format!("e{e}#{k}");
                let weight = weights[e][k].clone();
                if weight <= S::zero() {
                    violations.push(Violation::NonpositiveWeight {
                        segment: label.clone(),
                        weight: weight.to_string(),
                    });
                }
                let image = if from == to {
                    violations.push(Violation::CollapsedSegment {
                        segment: label,
                        vertex: tree.vertices[from.0].name.clone(),
                    });
                    None
                } else {
                    let img = tree.edge_between(from, to);
                    if img.is_none() {
                        violations.push(Violation::NonAdjacentImages {
                            segment: label,
                            from: tree.vertices[from.0].name.clone(),
                            to: tree.vertices[to.0].name.clone(),
                        });
                    }
                    img
                };
                segments.push(Segment {
                    id: SegmentId(segments.len()),
                    edge: EdgeId(e),
                    index: k,
                    start,
                    end,
                    from,
                    to,
                    image: image.unwrap_or(EdgeId(usize::MAX)),
                    weight,
                });
            }
            edge_segments.push(begin..segments.len());
        }
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        Ok(MarkedTreeMap {
            tree,
            marks,
            vertex_image,
            segments,
            edge_segments,
        })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn marks(&self, e: EdgeId) -> &[Mark<S>] {
        &self.marks[e.0]
    }

    pub fn vertex_image(&self, v: VertexId) -> VertexId {
        self.vertex_image[v.0]
    }

    pub fn segments(&self) -> &[Segment<S>] {
        &self.segments
    }

    pub fn segment(&self, id: SegmentId) -> &Segment<S> {
        &self.segments[id.0]
    }

    pub fn segments_of(&self, e: EdgeId) -> &[Segment<S>] {
        &self.segments[self.edge_segments[e.0].clone()]
    }

    pub fn weights(&self, e: EdgeId) -> Vec<S> {
        self.segments_of(e).iter().map(|s| s.weight.clone()).collect()
    }

    /// The segment of `edge` containing coordinate `t`; the left one at a mark.
    pub fn segment_at(&self, edge: EdgeId, t: &S) -> &Segment<S> {
        let segs = self.segments_of(edge);
        segs.iter().find(|s| *t <= s.end).unwrap_or(&segs[segs.len() - 1])
    }

    /// The marked point `X1 ⊇ X0`.
    pub fn x1(&self) -> MarkedSet<S> {
        let vertices = (0..self.tree.vertex_count()).map(|v| self.tree.vertex_point(VertexId(v)));
        let marks = self.marks.iter().enumerate().flat_map(|(e, ms)| {
            ms.iter().map(move |m| TreePoint {
                edge: EdgeId(e),
                t: m.t.clone(),
            })
        });
        MarkedSet::from_points(vertices.chain(marks))
    }

    pub fn x0(&self) -> MarkedSet<S> {
        MarkedSet::from_points((0..self.tree.vertex_count()).map(|v| self.tree.vertex_point(VertexId(v))))
    }

    /// Label of an `X1` point: the vertex name or the mark label.
    pub fn marked_label(&self, p: &TreePoint<S>) -> Option<String> {
        if let Some(v) = self.tree.vertex_at(p) {
            return Some(self.tree.vertex(v).name.clone());
        }
        self.marks[p.edge.0]
            .iter()
            .find(|m| m.t == p.t)
            .map(|m| m.label.clone())
    }

    /// Image of a point.
    pub fn evaluate(&self, p: &TreePoint<S>) -> TreePoint<S> {
        if let Some(v) = self.tree.vertex_at(p) {
            return self.tree.vertex_point(self.vertex_image[v.0]);
        }
        let seg = self.segment_at(p.edge, &p.t);
        let u = seg.affine(&self.tree).apply(&p.t);
        self.tree.point(seg.image, u)
    }

    pub fn iterate(&self, p: &TreePoint<S>, n: usize) -> TreePoint<S> {
        let mut q = p.clone();
        for _ in 0..n {
            q = self.evaluate(&q);
        }
        q
    }

    /// Full preimage of a finite set.
    pub fn pullback_points(&self, set: &MarkedSet<S>) -> MarkedSet<S> {
        let mut on_edge: Vec<Vec<S>> = vec![Vec::new(); self.tree.edge_count()];
        for p in set.iter() {
            match self.tree.vertex_at(p) {
                Some(v) => {
                    for e in self.tree.incident(v) {
                        let t = if self.tree.edge(*e)[0] == v {
                            S::zero()
                        } else {
                            S::one()
                        };
                        on_edge[e.0].push(t);
                    }
                }
                None => on_edge[p.edge.0].push(p.t.clone()),
            }
        }
        let mut out = Vec::new();
        for seg in &self.segments {
            let map = seg.affine(&self.tree);
            for u in &on_edge[seg.image.0] {
                out.push(self.tree.point(seg.edge, map.invert(u)));
            }
        }
        MarkedSet::from_points(out)
    }

    /// `X_n = τ^{-n}(X0)`.
    pub fn refine(&self, n: usize) -> Result<MarkedSet<S>> {
        self.refine_capped(n, DEFAULT_POINT_CAP)
    }

    pub fn refine_capped(&self, n: usize, cap: usize) -> Result<MarkedSet<S>> {
        let mut set = self.x0();
        for _ in 0..n {
            set = self.pullback_points(&set);
            if set.len() > cap {
                return Err(Error::ResourceLimit {
                    what: format!("refined marked set has {} points", set.len()),
                    cap,
                });
            }
        }
        Ok(set)
    }

    /// Restriction of the map to `X0` and its cycles.
    pub fn vertex_dynamics(&self) -> VertexDynamics {
        let n = self.tree.vertex_count();
        let map = self.vertex_image.clone();
        // 0 = unvisited, 1 = on current path, 2 = done
        let mut state = vec![0u8; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                path.push(v);
                v = map[v].0;
            }
            if state[v] == 1 {
                let pos = path.iter().position(|&x| x == v).expect("on path");
                let mut cyc: Vec<VertexId> = path[pos..].iter().map(|&x| VertexId(x)).collect();
                let min = cyc.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i).unwrap();
                cyc.rotate_left(min);
                let tags: HashSet<Tag> = cyc.iter().map(|v| self.tree.vertex(*v).tag).collect();
                let label = if tags.len() == 1 && tags.contains(&Tag::Julia) {
                    CycleLabel::Julia
                } else if tags.len() == 1 && tags.contains(&Tag::Fatou) {
                    CycleLabel::Fatou
                } else {
                    CycleLabel::Mixed
                };
                cycles.push(VertexCycle {
                    vertices: cyc,
                    label,
                });
            }
            for x in path {
                state[x] = 2;
            }
        }
        cycles.sort_by_key(|c| c.vertices[0]);
        VertexDynamics { map, cycles }
    }

    /// Number of JULIA-labelled vertex cycles.
    pub fn count_julia_cycles(&self) -> Result<usize> {
        let dynamics = self.vertex_dynamics();
        for c in &dynamics.cycles {
            if let Some(v) = c.vertices.iter().find(|v| self.tree.vertex(**v).tag == Tag::Untagged) {
                return Err(Error::UntaggedCycle(self.tree.vertex(*v).name.clone()));
            }
        }
        Ok(dynamics
            .cycles
            .iter()
            .filter(|c| c.label == CycleLabel::Julia)
            .count())
    }

    /// Same combinatorics with the marks of each edge moved to new
    /// coordinates (one strictly increasing list per edge).
    pub fn with_mark_positions(&self, positions: &[Vec<S>]) -> Result<Self> {
        let marks = self
            .marks
            .iter()
            .zip(positions)
            .map(|(ms, ts)| {
                ms.iter()
                    .zip(ts)
                    .map(|(m, t)| Mark {
                        t: t.clone(),
                        label: m.label.clone(),
                        image: m.image,
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>();
        if positions.len() != self.marks.len()
            || marks.iter().zip(&self.marks).any(|(a, b)| a.len() != b.len())
        {
            return Err(Error::Invalid(vec![Violation::Malformed(
                "re-placement must keep the number of marks on every edge".into(),
            )]));
        }
        let weights = (0..self.tree.edge_count())
            .map(|e| self.weights(EdgeId(e)))
            .collect();
        Self::from_parts(self.tree.clone(), marks, self.vertex_image.clone(), weights)
    }

    /// Marks at equal spacing: `k` marks sit at `i/(k+1)`.
    pub fn with_uniform_placement(&self) -> Self {
        let positions: Vec<Vec<S>> = self
            .marks
            .iter()
            .map(|ms| {
                let k = ms.len() as i64;
                (1..=k).map(|i| S::ratio(i, k + 1)).collect()
            })
            .collect();
        self.with_mark_positions(&positions)
            .expect("uniform placement keeps the combinatorics")
    }
}

/// Incremental by-name construction of a [`MarkedTreeMap`].
///
/// Edges are numbered in insertion order. Unspecified weights default to 1.
#[derive(Clone, Debug)]
pub struct TreeMapBuilder<S> {
    vertices: Vec<Vertex>,
    edges: Vec<(String, String)>,
    marks: Vec<(usize, S, Option<String>, String)>,
    images: Vec<(String, String)>,
    weights: BTreeMap<usize, Vec<S>>,
}

impl<S: Scalar> Default for TreeMapBuilder<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> TreeMapBuilder<S> {
    pub fn new() -> Self {
        TreeMapBuilder {
            vertices: Vec::new(),
            edges: Vec::new(),
            marks: Vec::new(),
            images: Vec::new(),
            weights: BTreeMap::new(),
        }
    }

    pub fn vertex(mut self, name: impl Into<String>, tag: Tag) -> Self {
        self.vertices.push(Vertex::new(name, tag));
        self
    }

    pub fn edge(mut self, from: impl Into<String>, to: impl Into<String>) -> Self {
        self.edges.push((from.into(), to.into()));
        self
    }

    /// Adds an interior mark on edge number `edge` with the given image vertex.
    pub fn mark(mut self, edge: usize, t: S, label: impl Into<String>, image: impl Into<String>) -> Self {
        self.marks.push((edge, t, Some(label.into()), image.into()));
        self
    }

    pub fn unlabelled_mark(mut self, edge: usize, t: S, image: impl Into<String>) -> Self {
        self.marks.push((edge, t, None, image.into()));
        self
    }

    pub fn image(mut self, vertex: impl Into<String>, target: impl Into<String>) -> Self {
        self.images.push((vertex.into(), target.into()));
        self
    }

    pub fn weights(mut self, edge: usize, weights: Vec<S>) -> Self {
        self.weights.insert(edge, weights);
        self
    }

    pub fn build(self) -> Result<MarkedTreeMap<S>> {
        let mut violations = Vec::new();
        let index: HashMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i))
            .collect();
        let mut edges = Vec::new();
        for (i, (a, b)) in self.edges.iter().enumerate() {
            match (index.get(a.as_str()), index.get(b.as_str())) {
                (Some(&a), Some(&b)) => edges.push([VertexId(a), VertexId(b)]),
                _ => violations.push(Violation::Malformed(format!(
                    "edge e{i} = [{a}, {b}] names an unknown vertex"
                ))),
            }
        }
        let resolve = |point: String, target: &str, violations: &mut Vec<Violation>| {
            match index.get(target) {
                Some(&v) => Some(VertexId(v)),
                None => {
                    violations.push(Violation::VertexEscapesX0 {
                        point,
                        target: target.to_string(),
                    });
                    None
                }
            }
        };
        let mut vertex_image = vec![None; self.vertices.len()];
        for (v, target) in &self.images {
            match index.get(v.as_str()) {
                Some(&i) => vertex_image[i] = resolve(v.clone(), target, &mut violations),
                None => violations.push(Violation::Malformed(format!("image given for unknown vertex {v}"))),
            }
        }
        for (i, img) in vertex_image.iter().enumerate() {
            if img.is_none() && !violations.iter().any(|x| matches!(x, Violation::VertexEscapesX0 { point, .. } if *point == self.vertices[i].name)) {
                violations.push(Violation::Malformed(format!(
                    "vertex {} has no image",
                    self.vertices[i].name
                )));
            }
        }
        let mut marks: Vec<Vec<Mark<S>>> = vec![Vec::new(); self.edges.len()];
        for (e, t, label, target) in self.marks {
            if e >= marks.len() {
                violations.push(Violation::Malformed(format!("mark on unknown edge e{e}")));
                continue;
            }
            let label = label.unwrap_or_else(|| format!("e{e}:{t}"));
            if let Some(image) = resolve(label.clone(), &target, &mut violations) {
                marks[e].push(Mark { t, label, image });
            }
        }
        for ms in &mut marks {
            ms.sort_by(|a, b| scalar::cmp(&a.t, &b.t));
        }
        let tree = Tree::new(self.vertices, edges);
        let tree = match tree {
            Ok(t) => Some(t),
            Err(v) => {
                violations.extend(v);
                None
            }
        };
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        let tree = tree.expect("checked");
        let weights = (0..marks.len())
            .map(|e| {
                self.weights
                    .get(&e)
                    .cloned()
                    .unwrap_or_else(|| vec![S::one(); marks[e].len() + 1])
            })
            .collect();
        let vertex_image = vertex_image.into_iter().map(|v| v.expect("checked")).collect();
        MarkedTreeMap::from_parts(tree, marks, vertex_image, weights)
    }
}
