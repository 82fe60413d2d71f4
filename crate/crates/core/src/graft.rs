//! Self-grafting of a tree map along a repelling periodic orbit.
//!
//! Given a repelling cycle `O = {x0, .., x(p-1)}` in `T \ X0` and a branch
//! `B` of `T \ {x0}` that misses `O`, the construction attaches `p` copies
//! `B_i = θ_i(B)` at the points `x_i` and defines
//!
//! * `τ̃ = τ` on `T \ B`,
//! * `τ̃ = θ_1` on `B` (`θ_0` when `p = 1`),
//! * `τ̃ = θ_{i+1} ∘ θ_i⁻¹` on `B_i` for `0 < i < p` (indices mod `p`),
//! * `τ̃ = τ ∘ θ_0⁻¹` on `B_0`.
//!
//! Segments inside `B` and `B_1, .., B_{p-1}` get weight 1; a segment of
//! `B_0` or `T \ B` gets the weight of the source segment containing its
//! preimage under `θ_0` (respectively itself). The new vertices on `O` are
//! tagged JULIA and copies inherit the tags of their originals.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::orbits::{OrbitClass, PeriodicOrbit};
use crate::scalar::{self, Scalar};
use crate::spectral::{certify_upper, transition_matrix, SpectralCertificate};
use crate::tree::{EdgeId, Mark, MarkedSet, MarkedTreeMap, Tag, Tree, TreePoint, Vertex, VertexId};

/// Default seed of the random samples drawn by [`verify_graft`].
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Random sample points per source segment in the recovery check.
pub const SAMPLES_PER_SEGMENT: usize = 20;

/// A piece of a source edge, `[start, end]` in the parent's coordinate.
/// The piece is parametrized from `start` to `end`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgePiece<S> {
    pub parent: EdgeId,
    pub start: S,
    pub end: S,
}

impl<S: Scalar> EdgePiece<S> {
    pub fn to_parent(&self, s: &S) -> S {
        self.start.clone() + (self.end.clone() - self.start.clone()) * s.clone()
    }

    pub fn from_parent(&self, t: &S) -> S {
        (t.clone() - self.start.clone()) / (self.end.clone() - self.start.clone())
    }

    pub fn contains(&self, t: &S) -> bool {
        *t >= self.start && *t <= self.end
    }
}

/// The same map with a finite forward-invariant set added to the vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinedMap<S> {
    pub map: MarkedTreeMap<S>,
    /// `pieces[j]` is the part of the source tree covered by edge `j`.
    pub pieces: Vec<EdgePiece<S>>,
    /// Vertices of the added points, in the order given.
    pub added: Vec<VertexId>,
}

impl<S: Scalar> RefinedMap<S> {
    /// Source point of a refined point.
    pub fn embed(&self, source: &Tree, p: &TreePoint<S>) -> TreePoint<S> {
        let piece = &self.pieces[p.edge.0];
        source.point(piece.parent, piece.to_parent(&p.t))
    }

    /// Refined point of a source point.
    pub fn project(&self, source: &Tree, p: &TreePoint<S>) -> TreePoint<S> {
        let (j, piece) = self
            .pieces
            .iter()
            .enumerate()
            .find(|(_, piece)| piece.parent == p.edge && piece.contains(&p.t))
            .expect("pieces cover the parent edge");
        // a source vertex keeps its id
        match source.vertex_at(p) {
            Some(v) => self.map.tree().vertex_point(v),
            None => self.map.tree().point(EdgeId(j), piece.from_parent(&p.t)),
        }
    }
}

/// Adds the interior points `points` (named `names`, tagged `tag`) to the
/// vertex set. The map must send every added point to a vertex or to an
/// added point. Preimages of the added points become new marks, labelled
/// with the image's name followed by primes; source marks keep their
/// labels. Weights are inherited from the containing source segment.
pub fn refine_vertex_set<S: Scalar>(
    tm: &MarkedTreeMap<S>,
    points: &[TreePoint<S>],
    names: &[String],
    tag: Tag,
) -> Result<RefinedMap<S>> {
    let tree = tm.tree();
    let nv = tree.vertex_count();
    let find_added = |p: &TreePoint<S>| points.iter().position(|q| q == p);
    for p in points {
        if tree.vertex_at(p).is_some() || tm.marked_label(p).is_some() {
            return Err(Error::InvalidGraft(format!("point {p} is already marked")));
        }
        let img = tm.evaluate(p);
        if tree.vertex_at(&img).is_none() && find_added(&img).is_none() {
            return Err(Error::InvalidGraft(format!("image of {p} is not a vertex of the refined set")));
        }
    }
    // vertices and pieces
    let mut vertices: Vec<Vertex> = tree.vertices().map(|(_, v)| v.clone()).collect();
    for n in names {
        vertices.push(Vertex::new(n.clone(), tag));
    }
    let added: Vec<VertexId> = (0..points.len()).map(|i| VertexId(nv + i)).collect();
    let mut pieces = Vec::new();
    let mut edges = Vec::new();
    for (e, [a, b]) in tree.edges() {
        let mut cuts: Vec<(S, VertexId)> = points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.edge == e)
            .map(|(i, p)| (p.t.clone(), added[i]))
            .collect();
        cuts.sort_by(|x, y| scalar::cmp(&x.0, &y.0));
        let mut ends = vec![(S::zero(), a)];
        ends.extend(cuts);
        ends.push((S::one(), b));
        for w in ends.windows(2) {
            pieces.push(EdgePiece {
                parent: e,
                start: w[0].0.clone(),
                end: w[1].0.clone(),
            });
            edges.push([w[0].1, w[1].1]);
        }
    }
    let refined_tree = Tree::new(vertices, edges).map_err(Error::Invalid)?;
    let locate = |p: &TreePoint<S>| -> VertexId {
        match tree.vertex_at(p) {
            Some(v) => v,
            None => added[find_added(p).expect("checked invariance")],
        }
    };
    let mut image: Vec<VertexId> = (0..nv).map(|v| tm.vertex_image(VertexId(v))).collect();
    image.extend(points.iter().map(|p| locate(&tm.evaluate(p))));

    // marks: the pullback of X0 plus the added points
    let target = MarkedSet::from_points(tm.x0().into_iter().chain(points.iter().cloned()));
    let preimages = tm.pullback_points(&target);
    let mut primes: BTreeMap<usize, usize> = BTreeMap::new();
    let mut marks: Vec<Vec<Mark<S>>> = vec![Vec::new(); pieces.len()];
    let mut weights: Vec<Vec<S>> = vec![Vec::new(); pieces.len()];
    for x in preimages.iter() {
        if tree.vertex_at(x).is_some() || find_added(x).is_some() {
            continue;
        }
        let (j, piece) = pieces
            .iter()
            .enumerate()
            .find(|(_, pc)| pc.parent == x.edge && pc.start < x.t && x.t < pc.end)
            .expect("interior point lies inside one piece");
        let img = locate(&tm.evaluate(x));
        let label = match tm.marked_label(x) {
            Some(l) => l,
            None => {
                let k = primes.entry(img.0).or_insert(0);
                *k += 1;
                format!("{}{}", refined_tree.vertex(img).name, "'".repeat(*k))
            }
        };
        marks[j].push(Mark {
            t: piece.from_parent(&x.t),
            label,
            image: img,
        });
    }
    let two = scalar::two::<S>();
    for (j, piece) in pieces.iter().enumerate() {
        let mut cuts: Vec<S> = vec![S::zero()];
        cuts.extend(marks[j].iter().map(|m| m.t.clone()));
        cuts.push(S::one());
        for w in cuts.windows(2) {
            let mid = piece.to_parent(&((w[0].clone() + w[1].clone()) / two.clone()));
            weights[j].push(tm.segment_at(piece.parent, &mid).weight.clone());
        }
    }
    let map = MarkedTreeMap::from_parts(refined_tree, marks, image, weights)?;
    Ok(RefinedMap { map, pieces, added })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// Toward coordinate 0 of the edge carrying the attachment point.
    Left,
    Right,
}

/// Which component of `T \ {x_j}` to copy: the side of the orbit point
/// `points[attach]` of the orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchChoice {
    pub attach: usize,
    pub side: Side,
}

impl BranchChoice {
    /// `left`, `right`, `left@j` or `right@j`.
    pub fn parse(text: &str) -> Option<BranchChoice> {
        let (side, attach) = match text.split_once('@') {
            Some((s, j)) => (s, j.parse().ok()?),
            None => (text, 0),
        };
        let side = match side {
            "left" => Side::Left,
            "right" => Side::Right,
            _ => return None,
        };
        Some(BranchChoice { attach, side })
    }
}

impl fmt::Display for BranchChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Left => "left",
            Side::Right => "right",
        };
        if self.attach == 0 {
            f.write_str(side)
        } else {
            write!(f, "{side}@{}", self.attach)
        }
    }
}

fn check_orbit<S: Scalar>(tm: &MarkedTreeMap<S>, orbit: &PeriodicOrbit<S>) -> Result<()> {
    if orbit.class != OrbitClass::Repelling {
        return Err(Error::InvalidGraft(format!("orbit {} is {}, not REPELLING", orbit.id, orbit.class)));
    }
    let p = orbit.points.len();
    if p == 0 {
        return Err(Error::InvalidGraft("orbit has no points".into()));
    }
    for (i, x) in orbit.points.iter().enumerate() {
        if tm.tree().vertex_at(x).is_some() || tm.marked_label(x).is_some() {
            return Err(Error::InvalidGraft(format!("orbit point {x} is marked")));
        }
        if tm.evaluate(x) != orbit.points[(i + 1) % p] {
            return Err(Error::InvalidGraft(format!("orbit point {x} does not map to the next point")));
        }
    }
    let distinct: HashSet<String> = orbit.points.iter().map(|x| x.to_string()).collect();
    if distinct.len() != p {
        return Err(Error::InvalidGraft("orbit points are not distinct".into()));
    }
    Ok(())
}

/// Vertices of the refined tree lying in the chosen branch, and its edges.
fn branch_of<S: Scalar>(
    refined: &RefinedMap<S>,
    attach: VertexId,
    side: Side,
) -> (Vec<VertexId>, Vec<EdgeId>) {
    let t = refined.map.tree();
    let inc = t.incident(attach);
    // an added point has degree 2: the piece ending at it, then the one starting there
    let edge = match side {
        Side::Left => inc.iter().copied().find(|e| t.edge(*e)[1] == attach),
        Side::Right => inc.iter().copied().find(|e| t.edge(*e)[0] == attach),
    }
    .expect("added points are interior to an edge");
    let start = t.other_end(edge, attach);
    let vertices = t.component_avoiding(start, attach);
    let set: HashSet<VertexId> = vertices.iter().copied().collect();
    let edges = t
        .edges()
        .filter(|(_, [a, b])| set.contains(a) || set.contains(b))
        .map(|(e, _)| e)
        .collect();
    (vertices, edges)
}

fn fresh_names(taken: &HashSet<String>, p: usize) -> Vec<String> {
    let plain: Vec<String> = (0..p).map(|i| format!("x{i}")).collect();
    if plain.iter().all(|n| !taken.contains(n)) {
        return plain;
    }
    (1..)
        .map(|g| (0..p).map(|i| format!("x{i}.{g}")).collect::<Vec<_>>())
        .find(|names| names.iter().all(|n| !taken.contains(n)))
        .expect("unbounded supply of names")
}

fn rotated<S: Scalar>(orbit: &PeriodicOrbit<S>, j: usize) -> Vec<TreePoint<S>> {
    let mut pts = orbit.points.clone();
    pts.rotate_left(j);
    pts
}

/// All admissible branch choices: a side of an orbit point whose component
/// contains no other orbit point.
pub fn graft_sites<S: Scalar>(tm: &MarkedTreeMap<S>, orbit: &PeriodicOrbit<S>) -> Result<Vec<BranchChoice>> {
    check_orbit(tm, orbit)?;
    let p = orbit.points.len();
    let taken: HashSet<String> = tm.tree().vertices().map(|(_, v)| v.name.clone()).collect();
    let names = fresh_names(&taken, p);
    let refined = refine_vertex_set(tm, &orbit.points, &names, Tag::Julia)?;
    let mut out = Vec::new();
    for attach in 0..p {
        for side in [Side::Left, Side::Right] {
            let (vs, _) = branch_of(&refined, refined.added[attach], side);
            if vs.iter().all(|v| !refined.added.contains(v)) {
                out.push(BranchChoice { attach, side });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoAdmissibleBranch);
    }
    Ok(out)
}

/// Input of [`self_graft`].
#[derive(Clone, Debug)]
pub struct GraftSpec<S> {
    pub source: MarkedTreeMap<S>,
    pub orbit: PeriodicOrbit<S>,
    pub branch: BranchChoice,
}

impl<S: Scalar> GraftSpec<S> {
    pub fn new(source: MarkedTreeMap<S>, orbit: PeriodicOrbit<S>, branch: BranchChoice) -> Result<Self> {
        check_orbit(&source, &orbit)?;
        if branch.attach >= orbit.points.len() {
            return Err(Error::InvalidGraft(format!("branch {branch} names a point outside the orbit")));
        }
        if !graft_sites(&source, &orbit)?.contains(&branch) {
            return Err(Error::InvalidGraft(format!("branch {branch} meets the orbit again")));
        }
        Ok(GraftSpec { source, orbit, branch })
    }
}

/// The attachment isomorphism `θ_i: B → B_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyMap {
    pub index: usize,
    /// `x_i`, where `B_i` is attached.
    pub attach: VertexId,
    /// `(v, θ_i(v))` for the vertices of `B`.
    pub vertices: Vec<(VertexId, VertexId)>,
    /// `(e, θ_i(e))` for the edges of `B`; coordinates are preserved.
    pub edges: Vec<(EdgeId, EdgeId)>,
}

/// Position of a point of the grafted tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// `T \ B`, including the orbit points.
    Outside,
    Branch,
    Copy(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraftResult<S> {
    pub source: MarkedTreeMap<S>,
    /// Source map with the orbit added to the vertices. Its vertex and edge
    /// ids are the first ids of `grafted`.
    pub refined: RefinedMap<S>,
    pub grafted: MarkedTreeMap<S>,
    pub branch: BranchChoice,
    /// `x_0, .., x_{p-1}` with `x_0` the attachment point of `B`.
    pub orbit_points: Vec<TreePoint<S>>,
    pub orbit_vertices: Vec<VertexId>,
    /// Vertices of `B` other than `x_0`.
    pub branch_vertices: Vec<VertexId>,
    pub branch_edges: Vec<EdgeId>,
    pub copies: Vec<CopyMap>,
}

impl<S: Scalar> GraftResult<S> {
    pub fn period(&self) -> usize {
        self.orbit_vertices.len()
    }

    pub fn region_of_edge(&self, e: EdgeId) -> Region {
        if self.branch_edges.contains(&e) {
            return Region::Branch;
        }
        match self.copies.iter().find(|c| c.edges.iter().any(|(_, ce)| *ce == e)) {
            Some(c) => Region::Copy(c.index),
            None => Region::Outside,
        }
    }

    /// A vertex is classified by itself, not by the edge it is written on.
    pub fn region(&self, p: &TreePoint<S>) -> Region {
        match self.grafted.tree().vertex_at(p) {
            Some(v) => {
                if self.branch_vertices.contains(&v) {
                    Region::Branch
                } else if let Some(c) = self.copies.iter().find(|c| c.vertices.iter().any(|(_, cv)| *cv == v)) {
                    Region::Copy(c.index)
                } else {
                    Region::Outside
                }
            }
            None => self.region_of_edge(p.edge),
        }
    }

    /// A source point as a point of `T ⊂ T'`.
    pub fn embed_source(&self, x: &TreePoint<S>) -> TreePoint<S> {
        let y = self.refined.project(self.source.tree(), x);
        // refined ids coincide with grafted ids
        match self.refined.map.tree().vertex_at(&y) {
            Some(v) => self.grafted.tree().vertex_point(v),
            None => self.grafted.tree().point(y.edge, y.t),
        }
    }

    /// `θ_i` applied to a point of `B` (or its attachment point `x_0`).
    pub fn theta(&self, i: usize, p: &TreePoint<S>) -> Option<TreePoint<S>> {
        let g = self.grafted.tree();
        let copy = &self.copies[i];
        if let Some(v) = g.vertex_at(p) {
            if v == self.orbit_vertices[0] {
                return Some(g.vertex_point(copy.attach));
            }
            return copy
                .vertices
                .iter()
                .find(|(o, _)| *o == v)
                .map(|(_, c)| g.vertex_point(*c));
        }
        copy.edges
            .iter()
            .find(|(o, _)| *o == p.edge)
            .map(|(_, c)| g.point(*c, p.t.clone()))
    }

    /// `θ_i⁻¹` applied to a point of `B_i`.
    pub fn theta_inverse(&self, i: usize, p: &TreePoint<S>) -> Option<TreePoint<S>> {
        let g = self.grafted.tree();
        let copy = &self.copies[i];
        if let Some(v) = g.vertex_at(p) {
            if v == copy.attach {
                return Some(g.vertex_point(self.orbit_vertices[0]));
            }
            return copy
                .vertices
                .iter()
                .find(|(_, c)| *c == v)
                .map(|(o, _)| g.vertex_point(*o));
        }
        copy.edges
            .iter()
            .find(|(_, c)| *c == p.edge)
            .map(|(o, _)| g.point(*o, p.t.clone()))
    }

    /// The grafted edge ids coming from the refined edges of each source edge.
    pub fn edge_groups(&self) -> Vec<Vec<EdgeId>> {
        let mut groups = vec![Vec::new(); self.source.tree().edge_count()];
        for (j, piece) in self.refined.pieces.iter().enumerate() {
            groups[piece.parent.0].push(EdgeId(j));
        }
        groups
    }
}

/// Performs the self-grafting described in the module documentation.
pub fn self_graft<S: Scalar>(spec: &GraftSpec<S>) -> Result<GraftResult<S>> {
    let tm = &spec.source;
    check_orbit(tm, &spec.orbit)?;
    let p = spec.orbit.points.len();
    let j = spec.branch.attach;
    if j >= p {
        return Err(Error::InvalidGraft(format!("branch {} names a point outside the orbit", spec.branch)));
    }
    let orbit_points = rotated(&spec.orbit, j);
    let taken: HashSet<String> = tm.tree().vertices().map(|(_, v)| v.name.clone()).collect();
    let names = fresh_names(&taken, p);
    let refined = refine_vertex_set(tm, &orbit_points, &names, Tag::Julia)?;
    let x = refined.added.clone();
    let (b_vertices, b_edges) = branch_of(&refined, x[0], spec.branch.side);
    if b_vertices.iter().any(|v| x.contains(v)) {
        return Err(Error::InvalidGraft(format!("branch {} meets the orbit again", spec.branch)));
    }
    let r = &refined.map;
    let rt = r.tree();
    let nv = rt.vertex_count();
    let ne = rt.edge_count();
    let nb = b_vertices.len();
    let b_index: BTreeMap<VertexId, usize> = b_vertices.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let copy_vertex = |i: usize, v: VertexId| -> VertexId {
        if v == x[0] {
            x[i]
        } else {
            VertexId(nv + i * nb + b_index[&v])
        }
    };

    // tree
    let mut vertices: Vec<Vertex> = rt.vertices().map(|(_, v)| v.clone()).collect();
    let mut names_taken: HashSet<String> = vertices.iter().map(|v| v.name.clone()).collect();
    for i in 0..p {
        for v in &b_vertices {
            let orig = rt.vertex(*v);
            let mut name = format!("theta{i}({})", orig.name);
            let mut k = 1;
            while names_taken.contains(&name) {
                k += 1;
                name = format!("theta{i}({})#{k}", orig.name);
            }
            names_taken.insert(name.clone());
            vertices.push(Vertex::new(name, orig.tag));
        }
    }
    let mut edges: Vec<[VertexId; 2]> = rt.edges().map(|(_, e)| e).collect();
    let mut copies = Vec::with_capacity(p);
    for (i, &attach) in x.iter().enumerate() {
        let mut cm = CopyMap {
            index: i,
            attach,
            vertices: b_vertices.iter().map(|v| (*v, copy_vertex(i, *v))).collect(),
            edges: Vec::new(),
        };
        for e in &b_edges {
            let [a, b] = rt.edge(*e);
            cm.edges.push((*e, EdgeId(edges.len())));
            edges.push([copy_vertex(i, a), copy_vertex(i, b)]);
        }
        copies.push(cm);
    }
    let tree = Tree::new(vertices, edges).map_err(Error::Invalid)?;

    // vertex images
    let next = 1 % p;
    let mut image = Vec::with_capacity(tree.vertex_count());
    for v in 0..nv {
        let v = VertexId(v);
        image.push(if b_index.contains_key(&v) {
            copy_vertex(next, v)
        } else {
            r.vertex_image(v)
        });
    }
    for i in 0..p {
        for v in &b_vertices {
            image.push(if i == 0 {
                r.vertex_image(*v)
            } else {
                copy_vertex((i + 1) % p, *v)
            });
        }
    }

    // marks and weights
    let mut marks: Vec<Vec<Mark<S>>> = Vec::with_capacity(tree.edge_count());
    let mut weights: Vec<Vec<S>> = Vec::with_capacity(tree.edge_count());
    for e in 0..ne {
        let e = EdgeId(e);
        if b_edges.contains(&e) {
            marks.push(Vec::new());
            weights.push(vec![S::one()]);
        } else {
            marks.push(r.marks(e).to_vec());
            weights.push(r.weights(e));
        }
    }
    for i in 0..p {
        for e in &b_edges {
            if i == 0 {
                marks.push(
                    r.marks(*e)
                        .iter()
                        .map(|m| Mark {
                            t: m.t.clone(),
                            label: format!("theta0({})", m.label),
                            image: m.image,
                        })
                        .collect(),
                );
                weights.push(r.weights(*e));
            } else {
                marks.push(Vec::new());
                weights.push(vec![S::one()]);
            }
        }
    }
    let grafted = MarkedTreeMap::from_parts(tree, marks, image, weights)?;
    Ok(GraftResult {
        source: tm.clone(),
        refined,
        grafted,
        branch: spec.branch,
        orbit_points,
        orbit_vertices: x,
        branch_vertices: b_vertices,
        branch_edges: b_edges,
        copies,
    })
}

/// Period bounds tried in turn by [`choose_graft`].
pub const SEARCH_PERIODS: [usize; 6] = [6, 12, 18, 24, 30, 36];

/// Grafts along a repelling orbit of least period, searched up to
/// `max_period`, at the site giving the fewest edges. Ties keep the first
/// orbit in id order and the first site.
pub fn choose_graft<S: Scalar>(tm: &MarkedTreeMap<S>, max_period: usize) -> Result<GraftResult<S>> {
    let mut bounds: Vec<usize> = SEARCH_PERIODS.iter().copied().filter(|p| *p < max_period).collect();
    bounds.push(max_period);
    let mut orbit = None;
    for bound in bounds {
        let orbits = crate::orbits::periodic_orbits(tm, bound)?;
        if let Some(o) = orbits.into_iter().find(|o| o.class == OrbitClass::Repelling) {
            orbit = Some(o);
            break;
        }
    }
    let orbit = orbit.ok_or(Error::NoAdmissibleBranch)?;
    let mut best: Option<GraftResult<S>> = None;
    for site in graft_sites(tm, &orbit)? {
        let g = self_graft(&GraftSpec::new(tm.clone(), orbit.clone(), site)?)?;
        if best.as_ref().is_none_or(|b| g.grafted.tree().edge_count() < b.grafted.tree().edge_count()) {
            best = Some(g);
        }
    }
    best.ok_or(Error::NoAdmissibleBranch)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckKind {
    Recovery,
    Grouping,
    Contraction,
    NIncrement,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::Recovery => "RECOVERY",
            CheckKind::Grouping => "GROUPING",
            CheckKind::Contraction => "CONTRACTION",
            CheckKind::NIncrement => "N-INCREMENT",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    /// The hypothesis of the check does not hold.
    Vacuous,
    Fail,
}

impl CheckStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Vacuous => "VACUOUS",
            CheckStatus::Fail => "FAIL",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraftCheck<S> {
    pub kind: CheckKind,
    pub status: CheckStatus,
    /// Evidence on success, the failing witness otherwise.
    pub detail: String,
    /// Present for a passing contraction check.
    pub certificate: Option<SpectralCertificate<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraftReport<S> {
    pub checks: Vec<GraftCheck<S>>,
}

impl<S: Scalar> GraftReport<S> {
    pub fn get(&self, kind: CheckKind) -> &GraftCheck<S> {
        self.checks.iter().find(|c| c.kind == kind).expect("all four checks are present")
    }

    pub fn status(&self, kind: CheckKind) -> CheckStatus {
        self.get(kind).status
    }

    /// No check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

fn check<S>(kind: CheckKind, status: CheckStatus, detail: impl Into<String>) -> GraftCheck<S> {
    GraftCheck {
        kind,
        status,
        detail: detail.into(),
        certificate: None,
    }
}

/// Source sample points: all of `refine(source, 2)` plus random rationals.
pub fn recovery_samples<S: Scalar>(tm: &MarkedTreeMap<S>, per_segment: usize, seed: u64) -> Result<Vec<TreePoint<S>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<TreePoint<S>> = tm.refine(2)?.into_iter().collect();
    for seg in tm.segments() {
        for _ in 0..per_segment {
            let d: i64 = rng.gen_range(2..=1000);
            let k: i64 = rng.gen_range(1..d);
            let t = seg.start.clone() + seg.len() * S::ratio(k, d);
            out.push(tm.tree().point(seg.edge, t));
        }
    }
    Ok(out)
}

/// Runs the four checks with the default seed.
pub fn verify_graft<S: Scalar>(result: &GraftResult<S>) -> Result<GraftReport<S>> {
    verify_graft_seeded(result, DEFAULT_SEED)
}

pub fn verify_graft_seeded<S: Scalar>(result: &GraftResult<S>, seed: u64) -> Result<GraftReport<S>> {
    Ok(GraftReport {
        checks: vec![
            check_recovery(result, seed)?,
            check_grouping(result),
            check_contraction(result),
            check_n_increment(result),
        ],
    })
}

fn check_recovery<S: Scalar>(result: &GraftResult<S>, seed: u64) -> Result<GraftCheck<S>> {
    let src = &result.source;
    let g = &result.grafted;
    let p = result.period();
    let samples = recovery_samples(src, SAMPLES_PER_SEGMENT, seed)?;
    let mut in_branch = 0;
    for x in &samples {
        let y = result.embed_source(x);
        let expected = result.embed_source(&src.evaluate(x));
        match result.region(&y) {
            Region::Branch => {
                in_branch += 1;
                let mut z = y.clone();
                for i in 1..=p {
                    z = g.evaluate(&z);
                    let theta = result.theta(i % p, &y).expect("y lies in B");
                    if z != theta {
                        return Ok(check(
                            CheckKind::Recovery,
                            CheckStatus::Fail,
                            format!("iterate {i} of {x} is {z}, expected theta{}({x}) = {theta}", i % p),
                        ));
                    }
                }
                let z = g.evaluate(&z);
                if z != expected {
                    return Ok(check(
                        CheckKind::Recovery,
                        CheckStatus::Fail,
                        format!("iterate {} of {x} in B is {z}, expected {expected}", p + 1),
                    ));
                }
            }
            Region::Outside => {
                let z = g.evaluate(&y);
                if z != expected {
                    return Ok(check(
                        CheckKind::Recovery,
                        CheckStatus::Fail,
                        format!("image of {x} is {z}, expected {expected}"),
                    ));
                }
            }
            Region::Copy(_) => return Err(Error::Internal(format!("source point {x} embeds into a copy"))),
        }
    }
    Ok(check(
        CheckKind::Recovery,
        CheckStatus::Pass,
        format!("{} sample points, {in_branch} in B", samples.len()),
    ))
}

fn check_grouping<S: Scalar>(result: &GraftResult<S>) -> GraftCheck<S> {
    let a = transition_matrix(&result.source);
    let b = transition_matrix(&result.refined.map);
    let groups = result.edge_groups();
    for (k, gk) in groups.iter().enumerate() {
        for (l, gl) in groups.iter().enumerate() {
            for j in gl {
                let sum = gk.iter().fold(S::zero(), |acc, i| acc + b.get(i.0, j.0).clone());
                if sum != *a.get(k, l) {
                    return check(
                        CheckKind::Grouping,
                        CheckStatus::Fail,
                        format!("(k, l, j) = (e{k}, e{l}, {j}): column sum {sum} differs from {}", a.get(k, l)),
                    );
                }
            }
        }
    }
    check(
        CheckKind::Grouping,
        CheckStatus::Pass,
        format!("{}x{} refined entries grouped over {} source edges", b.dim(), b.dim(), a.dim()),
    )
}

fn check_contraction<S: Scalar>(result: &GraftResult<S>) -> GraftCheck<S> {
    let one = S::one();
    if certify_upper(&transition_matrix(&result.source), &one).is_none() {
        return check(
            CheckKind::Contraction,
            CheckStatus::Vacuous,
            "source transition matrix has no certificate below 1",
        );
    }
    let m = transition_matrix(&result.grafted);
    match certify_upper(&m, &one) {
        Some(c) => GraftCheck {
            kind: CheckKind::Contraction,
            status: CheckStatus::Pass,
            detail: format!("grafted {}x{} transition matrix certified below 1", m.dim(), m.dim()),
            certificate: Some(c),
        },
        None => check(
            CheckKind::Contraction,
            CheckStatus::Fail,
            format!("no certificate below 1 for the grafted matrix\n{m}"),
        ),
    }
}

fn check_n_increment<S: Scalar>(result: &GraftResult<S>) -> GraftCheck<S> {
    let (before, after) = match (result.source.count_julia_cycles(), result.grafted.count_julia_cycles()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            return check(CheckKind::NIncrement, CheckStatus::Vacuous, format!("tags incomplete: {e}"))
        }
    };
    if after != before + 1 {
        return check(
            CheckKind::NIncrement,
            CheckStatus::Fail,
            format!("N went from {before} to {after}"),
        );
    }
    let mut orbit = result.orbit_vertices.clone();
    orbit.sort();
    let found = result.grafted.vertex_dynamics().cycles.into_iter().any(|c| {
        let mut vs = c.vertices.clone();
        vs.sort();
        vs == orbit
    });
    if !found {
        return check(
            CheckKind::NIncrement,
            CheckStatus::Fail,
            "the orbit is not a vertex cycle of the grafted map",
        );
    }
    check(
        CheckKind::NIncrement,
        CheckStatus::Pass,
        format!("N: {before} -> {after}; new cycle is the grafted orbit"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig2_toy, persian_carpet};
    use crate::orbits::periodic_orbits;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn repelling(tm: &MarkedTreeMap<Rational>, period: usize) -> PeriodicOrbit<Rational> {
        periodic_orbits(tm, period)
            .unwrap()
            .into_iter()
            .find(|o| o.class == OrbitClass::Repelling && o.period == period)
            .unwrap()
    }

    #[test]
    fn branch_ids_round_trip() {
        for s in ["left", "right", "left@2", "right@1"] {
            assert_eq!(BranchChoice::parse(s).unwrap().to_string(), s);
        }
        assert!(BranchChoice::parse("up").is_none());
    }

    #[test]
    fn fig2_sites_and_refinement() {
        let tm = fig2_toy::<Rational>();
        let o = repelling(&tm, 1);
        let sites = graft_sites(&tm, &o).unwrap();
        assert_eq!(sites.len(), 2);
        let r = refine_vertex_set(&tm, &o.points, &["x0".into()], Tag::Julia).unwrap();
        assert_eq!(r.map.tree().edge_count(), 2);
        let labels: Vec<Vec<String>> = (0..2)
            .map(|e| r.map.marks(EdgeId(e)).iter().map(|m| m.label.clone()).collect())
            .collect();
        assert_eq!(labels, vec![vec!["x0'", "b-1"], vec!["a-1", "x0''"]]);
        let x0p = r.map.tree().point(EdgeId(0), r.map.marks(EdgeId(0))[0].t.clone());
        assert_eq!(r.embed(tm.tree(), &x0p), tm.tree().point(EdgeId(0), q(1, 6)));
    }

    #[test]
    fn carpet_graft_is_valid() {
        let tm = persian_carpet::<Rational>();
        let o = repelling(&tm, 3);
        let sites = graft_sites(&tm, &o).unwrap();
        assert_eq!(sites.len(), 3);
        let spec = GraftSpec::new(tm, o, sites[0]).unwrap();
        let g = self_graft(&spec).unwrap();
        assert_eq!(g.copies.len(), 3);
        assert_eq!(g.grafted.count_julia_cycles().unwrap(), 2);
        let report = verify_graft(&g).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.checks.iter().all(|c| c.status == CheckStatus::Pass));
    }
}
