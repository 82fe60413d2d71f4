//! Symbolic dynamics of a tree map: the Markov graph on segments, periodic
//! orbits, invariant whole-edge cycles and the Cantor-multicurve test.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use crate::spectral::{
    certify_lower, count_matrix, scc_decomposition, spectral_radius_estimate, Matrix, SpectralCertificate,
};
use crate::tree::{Affine, EdgeId, MarkedTreeMap, SegmentId, TreePoint};

/// Default cap on the number of enumerated itineraries.
pub const DEFAULT_CYCLE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovNode {
    pub segment: SegmentId,
    pub label: String,
    pub edge: EdgeId,
    pub image: EdgeId,
}

/// Digraph on segments: `J → J'` iff `J'` is a segment of the edge `τ(J)`.
/// Node `k` is segment `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovGraph {
    pub nodes: Vec<MarkovNode>,
    pub successors: Vec<Vec<usize>>,
}

impl MarkovGraph {
    pub fn arc_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&j| (i, j)))
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.successors[from].binary_search(&to).is_ok()
    }
}

pub fn markov_graph<S: Scalar>(tm: &MarkedTreeMap<S>) -> MarkovGraph {
    let nodes = tm
        .segments()
        .iter()
        .map(|s| MarkovNode {
            segment: s.id,
            label: s.label(),
            edge: s.edge,
            image: s.image,
        })
        .collect::<Vec<_>>();
    let successors = tm
        .segments()
        .iter()
        .map(|s| tm.segments_of(s.image).iter().map(|t| t.id.0).collect())
        .collect();
    MarkovGraph { nodes, successors }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrbitClass {
    Repelling,
    NeutralEdgeCycle,
    VertexCycle,
}

impl OrbitClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OrbitClass::Repelling => "REPELLING",
            OrbitClass::NeutralEdgeCycle => "NEUTRAL_EDGE_CYCLE",
            OrbitClass::VertexCycle => "VERTEX_CYCLE",
        }
    }
}

impl fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A primitive periodic itinerary of the Markov graph together with the
/// orbit it carries.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbit<S> {
    /// `fp<k>` (repelling fixed points), `p<period>-<k>`, `v<period>-<k>` or
    /// `n<period>-<k>`, numbered from 1 within class and period.
    pub id: String,
    /// Lexicographically least rotation.
    pub itinerary: Vec<SegmentId>,
    /// Length of the itinerary. A vertex cycle shadowed by the itinerary may
    /// have a smaller minimal period.
    pub period: usize,
    pub class: OrbitClass,
    /// `points[k]` lies in segment `itinerary[k]` and `τ(points[k]) =
    /// points[k + 1]`. Empty for an identity edge cycle (slope +1), whose
    /// points are all fixed.
    pub points: Vec<TreePoint<S>>,
    /// Derivative of the `p`-fold branch composition in edge coordinates.
    pub slope: S,
}

impl<S: Scalar> PeriodicOrbit<S> {
    pub fn fixed_point(&self) -> Option<&TreePoint<S>> {
        self.points.first()
    }

    pub fn multiplier_sign(&self) -> i8 {
        if self.slope < S::zero() {
            -1
        } else {
            1
        }
    }

    /// Whether some step of the itinerary lies in a segment that is not a
    /// whole edge.
    pub fn enters_proper_segment(&self, tm: &MarkedTreeMap<S>) -> bool {
        self.itinerary.iter().any(|s| !tm.segment(*s).is_whole_edge())
    }
}

/// All primitive periodic itineraries up to `max_period`, classified.
pub fn periodic_orbits<S: Scalar>(tm: &MarkedTreeMap<S>, max_period: usize) -> Result<Vec<PeriodicOrbit<S>>> {
    periodic_orbits_capped(tm, max_period, DEFAULT_CYCLE_CAP)
}

pub fn periodic_orbits_capped<S: Scalar>(
    tm: &MarkedTreeMap<S>,
    max_period: usize,
    cap: usize,
) -> Result<Vec<PeriodicOrbit<S>>> {
    if max_period == 0 {
        return Err(Error::InvalidArgument("max_period must be at least 1".into()));
    }
    let graph = markov_graph(tm);
    let mut words = Vec::new();
    for period in 1..=max_period {
        for start in 0..graph.nodes.len() {
            lyndon_cycles(&graph, start, period, cap, &mut words)?;
        }
    }
    let mut orbits = words
        .into_iter()
        .map(|w| classify(tm, w))
        .collect::<Result<Vec<_>>>()?;
    orbits.sort_by(|a, b| a.period.cmp(&b.period).then_with(|| a.itinerary.cmp(&b.itinerary)));
    let mut counters: BTreeMap<(OrbitClass, usize), usize> = BTreeMap::new();
    for o in &mut orbits {
        let k = counters.entry((o.class, o.period)).or_insert(0);
        *k += 1;
        o.id = match (o.class, o.period) {
            (OrbitClass::Repelling, 1) => format!("fp{k}"),
            (OrbitClass::Repelling, p) => format!("p{p}-{k}"),
            (OrbitClass::VertexCycle, p) => format!("v{p}-{k}"),
            (OrbitClass::NeutralEdgeCycle, p) => format!("n{p}-{k}"),
        };
    }
    Ok(orbits)
}

/// Appends every closed walk of length `len` that starts at `start` and is a
/// Lyndon word (so `start` is its least letter).
fn lyndon_cycles(
    graph: &MarkovGraph,
    start: usize,
    len: usize,
    cap: usize,
    out: &mut Vec<Vec<SegmentId>>,
) -> Result<()> {
    fn extend(
        graph: &MarkovGraph,
        word: &mut Vec<usize>,
        per: usize,
        len: usize,
        cap: usize,
        out: &mut Vec<Vec<SegmentId>>,
    ) -> Result<()> {
        let t = word.len();
        if t == len {
            if per == len && graph.has_arc(word[len - 1], word[0]) {
                if out.len() >= cap {
                    return Err(Error::ResourceLimit {
                        what: "periodic itineraries".into(),
                        cap,
                    });
                }
                out.push(word.iter().map(|&s| SegmentId(s)).collect());
            }
            return Ok(());
        }
        let last = word[t - 1];
        for &a in &graph.successors[last] {
            // prefix must stay a pre-necklace
            let cmp = a.cmp(&word[t - per]);
            if cmp == std::cmp::Ordering::Less {
                continue;
            }
            let next_per = if cmp == std::cmp::Ordering::Equal { per } else { t + 1 };
            word.push(a);
            let r = extend(graph, word, next_per, len, cap, out);
            word.pop();
            r?;
        }
        Ok(())
    }
    let mut word = vec![start];
    extend(graph, &mut word, 1, len, cap, out)
}

fn classify<S: Scalar>(tm: &MarkedTreeMap<S>, itinerary: Vec<SegmentId>) -> Result<PeriodicOrbit<S>> {
    let tree = tm.tree();
    let period = itinerary.len();
    let branch = itinerary
        .iter()
        .fold(Affine::identity(), |acc, s| acc.then(&tm.segment(*s).affine(tree)));
    let edge = tm.segment(itinerary[0]).edge;
    let neutral = branch.scale.abs() == S::one();
    if neutral && branch.scale == S::one() {
        return Ok(PeriodicOrbit {
            id: String::new(),
            itinerary,
            period,
            class: OrbitClass::NeutralEdgeCycle,
            points: Vec::new(),
            slope: branch.scale,
        });
    }
    let t = branch.fixed_point().expect("slope differs from 1");
    let x0 = tree.point(edge, t);
    let mut points = vec![x0];
    for _ in 1..period {
        let next = tm.evaluate(points.last().expect("nonempty"));
        points.push(next);
    }
    if tm.evaluate(points.last().expect("nonempty")) != points[0] {
        return Err(Error::Internal(format!(
            "fixed point {} of the branch composition is not periodic",
            points[0]
        )));
    }
    let class = if tree.vertex_at(&points[0]).is_some() {
        OrbitClass::VertexCycle
    } else if let Some(p) = points.iter().find(|p| tm.marked_label(p).is_some()) {
        return Err(Error::Internal(format!("periodic point {p} is an interior mark")));
    } else if neutral {
        OrbitClass::NeutralEdgeCycle
    } else {
        OrbitClass::Repelling
    };
    Ok(PeriodicOrbit {
        id: String::new(),
        itinerary,
        period,
        class,
        points,
        slope: branch.scale,
    })
}

/// Cycles `I0 → I1 → ... → I0` of edges that are single segments, each
/// mapping onto the next. Each cycle starts at its least edge.
pub fn invariant_edge_cycles<S: Scalar>(tm: &MarkedTreeMap<S>) -> Vec<Vec<EdgeId>> {
    let n = tm.tree().edge_count();
    let next: Vec<Option<EdgeId>> = (0..n)
        .map(|e| match tm.segments_of(EdgeId(e)) {
            [only] => Some(only.image),
            _ => None,
        })
        .collect();
    let mut cycles = Vec::new();
    for start in 0..n {
        let mut walk = vec![EdgeId(start)];
        let mut cur = next[start];
        while let Some(e) = cur {
            if e.0 < start || walk.len() > n {
                break;
            }
            if e.0 == start {
                cycles.push(walk);
                break;
            }
            if walk.contains(&e) {
                break;
            }
            walk.push(e);
            cur = next[e.0];
        }
    }
    cycles.sort();
    cycles
}

/// One irreducible block of the count matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CantorBlock<S> {
    pub edges: Vec<EdgeId>,
    pub exceeds_one: bool,
    /// Present when `exceeds_one`: LOWER certificate at a bound `> 1` for the
    /// block matrix.
    pub lower_certificate: Option<SpectralCertificate<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CantorWitness<S> {
    /// The expanding block together with every edge having a path into it.
    pub edges: Vec<EdgeId>,
    pub count_matrix: Matrix<S>,
    /// LOWER certificate for `count_matrix` at a bound `> 1`.
    pub certificate: SpectralCertificate<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CantorReport<S> {
    pub status: bool,
    pub blocks: Vec<CantorBlock<S>>,
    pub witness: Option<CantorWitness<S>>,
    /// Edges indexing the columns of `growth`: the witness edges, or all
    /// edges when there is no witness.
    pub growth_edges: Vec<EdgeId>,
    /// `growth[n - 1][i]` = number of level-`n` pullback segments inside
    /// `growth_edges[i]` whose iterates stay in the set, for `n = 1..=n_max`.
    pub growth: Vec<Vec<S>>,
}

/// Decides whether some irreducible block of the count matrix has spectral
/// radius `> 1`, with a LOWER certificate as proof.
pub fn cantor_analysis<S: Scalar>(tm: &MarkedTreeMap<S>, n_max: usize) -> Result<CantorReport<S>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let c = count_matrix(tm);
    let decomposition = scc_decomposition(&c);
    let mut blocks = Vec::new();
    let mut expanding = None;
    for (bi, block) in decomposition.blocks.iter().enumerate() {
        if block.is_trivial() {
            continue;
        }
        let edges: Vec<EdgeId> = block.indices.iter().map(|&i| EdgeId(i)).collect();
        // an irreducible integer matrix has radius > 1 iff some row sum is ≥ 2
        let two = scalar::two::<S>();
        let exceeds_one = block.matrix.row_sums().iter().any(|s| *s >= two);
        let lower_certificate = if exceeds_one {
            Some(certify_above_one(&block.matrix)?)
        } else {
            None
        };
        if exceeds_one && expanding.is_none() {
            expanding = Some(bi);
        }
        blocks.push(CantorBlock {
            edges,
            exceeds_one,
            lower_certificate,
        });
    }
    let witness = match expanding {
        Some(bi) => {
            let target = &decomposition.blocks[bi].indices;
            let reach = reaches(&c, target);
            let indices: Vec<usize> = (0..c.dim()).filter(|&i| reach[i]).collect();
            let sub = c.principal(&indices);
            let block_cert = blocks
                .iter()
                .find(|b| b.edges.iter().map(|e| e.0).eq(target.iter().copied()))
                .and_then(|b| b.lower_certificate.clone())
                .expect("expanding block is certified");
            let witness_vec = indices
                .iter()
                .map(|i| match target.binary_search(i) {
                    Ok(k) => block_cert.witness[k].clone(),
                    Err(_) => S::zero(),
                })
                .collect();
            let certificate = SpectralCertificate {
                witness: witness_vec,
                ..block_cert
            };
            if !certificate.verify(&sub) {
                return Err(Error::Internal("lifted Cantor certificate failed re-check".into()));
            }
            Some(CantorWitness {
                edges: indices.iter().map(|&i| EdgeId(i)).collect(),
                count_matrix: sub,
                certificate,
            })
        }
        None => None,
    };
    let (growth_edges, growth_matrix) = match &witness {
        Some(w) => (w.edges.clone(), w.count_matrix.clone()),
        None => ((0..c.dim()).map(EdgeId).collect(), c.clone()),
    };
    let mut growth = Vec::with_capacity(n_max);
    let mut power = growth_matrix.clone();
    for n in 1..=n_max {
        if n > 1 {
            power = power.mul(&growth_matrix);
        }
        growth.push(power.row_sums());
    }
    Ok(CantorReport {
        status: witness.is_some(),
        blocks,
        witness,
        growth_edges,
        growth,
    })
}

fn certify_above_one<S: Scalar>(block: &Matrix<S>) -> Result<SpectralCertificate<S>> {
    let mut tol = 0.5;
    for _ in 0..40 {
        let est = spectral_radius_estimate(block, tol)?;
        if est.lower > S::one() {
            if let Some(c) = est.lower_certificate.or_else(|| certify_lower(block, &est.lower)) {
                return Ok(c);
            }
        }
        tol /= 4.0;
    }
    Err(Error::Nonconvergence("no LOWER certificate above 1 for an expanding block".into()))
}

/// `reach[i]` iff there is a path from `i` into `target` (including `target`).
fn reaches<S: Scalar>(m: &Matrix<S>, target: &[usize]) -> Vec<bool> {
    let n = m.dim();
    let succ = m.successors();
    let mut reach = vec![false; n];
    for &t in target {
        reach[t] = true;
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            if !reach[i] && succ[i].iter().any(|&j| reach[j]) {
                reach[i] = true;
                changed = true;
            }
        }
        if !changed {
            return reach;
        }
    }
}
