//! Access-point layout and the three graphs derived from it.
//!
//! The overlap graph joins APs whose radio disks intersect, the neighbor
//! graph joins APs with at least one observed re-association between them,
//! and the non-overlap neighbor graph (NONG) is either the exact complement
//! of the overlap graph or its intersection with the neighbor graph.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::geom::{Point, WorldBounds};
use crate::ids::ApId;

/// An access point with a circular radio range.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessPoint {
    pub id: ApId,
    pub position: Point,
    /// Radio range in meters, strictly positive.
    pub radius: f64,
}

impl AccessPoint {
    pub fn new(id: impl Into<ApId>, position: Point, radius: f64) -> Self {
        AccessPoint {
            id: id.into(),
            position,
            radius,
        }
    }

    /// True when `p` lies strictly inside the radio range.
    pub fn covers(&self, p: Point) -> bool {
        self.position.distance(p) < self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyError {
    /// Two access points share an id.
    DuplicateId(ApId),
    /// A pairwise operation was handed the same AP twice.
    SameAp(ApId),
    /// An AP id not present in the topology or graph.
    UnknownAp(ApId),
    /// The topology has no access points.
    Empty,
    /// An AP sits outside the world rectangle.
    OutOfBounds(ApId),
    /// Radius must be > 0.
    BadRadius(ApId),
    /// Two graphs passed to one operation disagree on the vertex set.
    VertexMismatch,
}

impl fmt::Display for TopologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyError::DuplicateId(id) => write!(f, "duplicate AP id: {id}"),
            TopologyError::SameAp(id) => write!(
                f,
                "operation on a pair requires distinct APs, got {id} twice"
            ),
            TopologyError::UnknownAp(id) => write!(f, "unknown AP id: {id}"),
            TopologyError::Empty => write!(f, "topology must contain at least one AP"),
            TopologyError::OutOfBounds(id) => write!(f, "AP {id} lies outside the world bounds"),
            TopologyError::BadRadius(id) => write!(f, "AP {id} has non-positive radius"),
            TopologyError::VertexMismatch => write!(f, "graphs disagree on the vertex set"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TopologyError {}

/// The AP layout: a validated set of access points inside a world rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    aps: Vec<AccessPoint>,
    world: WorldBounds,
}

impl Topology {
    /// Validates ids, positions, and radii. APs are kept sorted by id so
    /// iteration order is deterministic.
    pub fn new(mut aps: Vec<AccessPoint>, world: WorldBounds) -> Result<Self, TopologyError> {
        if aps.is_empty() {
            return Err(TopologyError::Empty);
        }
        aps.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in aps.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(TopologyError::DuplicateId(pair[0].id.clone()));
            }
        }
        for ap in &aps {
            if ap.radius <= 0.0 {
                return Err(TopologyError::BadRadius(ap.id.clone()));
            }
            if !world.contains(ap.position) {
                return Err(TopologyError::OutOfBounds(ap.id.clone()));
            }
        }
        Ok(Topology { aps, world })
    }

    pub fn aps(&self) -> &[AccessPoint] {
        &self.aps
    }

    pub fn world(&self) -> WorldBounds {
        self.world
    }

    pub fn get(&self, id: &ApId) -> Option<&AccessPoint> {
        self.aps.iter().find(|ap| &ap.id == id)
    }

    pub fn ap_ids(&self) -> BTreeSet<ApId> {
        self.aps.iter().map(|ap| ap.id.clone()).collect()
    }

    /// APs covering `p`, in id order.
    pub fn covering(&self, p: Point) -> impl Iterator<Item = &AccessPoint> {
        self.aps.iter().filter(move |ap| ap.covers(p))
    }

    /// The covering AP closest to `p`; ties break toward the lowest id.
    /// `aps` is id-sorted, so the strict `<` keeps the first (lowest-id)
    /// minimum.
    pub fn nearest_covering(&self, p: Point) -> Option<&AccessPoint> {
        let mut best: Option<(&AccessPoint, f64)> = None;
        for ap in self.covering(p) {
            let d = ap.position.distance(p);
            match best {
                Some((_, bd)) if d >= bd => {}
                _ => best = Some((ap, d)),
            }
        }
        best.map(|(ap, _)| ap)
    }
}

/// Strict disk intersection: tangent circles do not overlap. Two APs
/// overlap exactly when some location is interior to both ranges.
pub fn overlaps(a: &AccessPoint, b: &AccessPoint) -> Result<bool, TopologyError> {
    if a.id == b.id {
        return Err(TopologyError::SameAp(a.id.clone()));
    }
    Ok(a.position.distance(b.position) < a.radius + b.radius)
}

/// Which relation a graph encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Neighbor,
    Overlap,
    NonOverlap,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Neighbor => f.write_str("neighbor"),
            GraphKind::Overlap => f.write_str("overlap"),
            GraphKind::NonOverlap => f.write_str("non_overlap"),
        }
    }
}

/// Undirected graph over AP ids. Edges are stored as (low, high) pairs, so
/// symmetry holds by construction and there are no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApGraph {
    kind: GraphKind,
    vertices: BTreeSet<ApId>,
    edges: BTreeSet<(ApId, ApId)>,
}

fn ordered(a: ApId, b: ApId) -> (ApId, ApId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ApGraph {
    pub fn new(kind: GraphKind, vertices: BTreeSet<ApId>) -> Self {
        ApGraph {
            kind,
            vertices,
            edges: BTreeSet::new(),
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn vertices(&self) -> &BTreeSet<ApId> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(ApId, ApId)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_vertex(&self, v: &ApId) -> bool {
        self.vertices.contains(v)
    }

    /// Inserts the undirected edge (a, b). Self-loops and edges touching
    /// unknown vertices are rejected. Returns whether the edge was new.
    pub fn add_edge(&mut self, a: ApId, b: ApId) -> Result<bool, TopologyError> {
        if a == b {
            return Err(TopologyError::SameAp(a));
        }
        if !self.vertices.contains(&a) {
            return Err(TopologyError::UnknownAp(a));
        }
        if !self.vertices.contains(&b) {
            return Err(TopologyError::UnknownAp(b));
        }
        Ok(self.edges.insert(ordered(a, b)))
    }

    pub fn has_edge(&self, a: &ApId, b: &ApId) -> bool {
        if a == b {
            return false;
        }
        self.edges.contains(&ordered(a.clone(), b.clone()))
    }

    /// Adjacent vertices of `v`, in id order.
    pub fn adjacent(&self, v: &ApId) -> BTreeSet<ApId> {
        self.edges
            .iter()
            .filter_map(|(a, b)| {
                if a == v {
                    Some(b.clone())
                } else if b == v {
                    Some(a.clone())
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, v: &ApId) -> usize {
        self.edges.iter().filter(|(a, b)| a == v || b == v).count()
    }

    /// Plain-text edge list: one `<a> <b>` line per edge, lexicographically
    /// sorted, LF line endings.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }
}

/// Builds the overlap graph: edge (i, j) iff the radio disks of i and j
/// intersect.
pub fn build_overlap_graph(t: &Topology) -> ApGraph {
    let mut g = ApGraph::new(GraphKind::Overlap, t.ap_ids());
    let aps = t.aps();
    for (i, a) in aps.iter().enumerate() {
        for b in &aps[i + 1..] {
            // ids are distinct by Topology construction
            if overlaps(a, b).unwrap_or(false) {
                let _ = g.add_edge(a.id.clone(), b.id.clone());
            }
        }
    }
    g
}

/// Builds the non-overlap neighbor graph.
///
/// Without a neighbor graph this is the exact complement of the overlap
/// graph: (i, j) is an edge iff i != j and (i, j) is not an overlap edge.
/// With a neighbor graph it is the intersection: pairs with an observed
/// re-association relationship that do not overlap.
pub fn build_nong(overlap: &ApGraph, neighbor: Option<&ApGraph>) -> Result<ApGraph, TopologyError> {
    if let Some(n) = neighbor {
        if n.vertices() != overlap.vertices() {
            return Err(TopologyError::VertexMismatch);
        }
    }
    let mut g = ApGraph::new(GraphKind::NonOverlap, overlap.vertices().clone());
    match neighbor {
        None => {
            let verts: Vec<&ApId> = overlap.vertices().iter().collect();
            for (i, a) in verts.iter().enumerate() {
                for b in &verts[i + 1..] {
                    if !overlap.has_edge(a, b) {
                        let _ = g.add_edge((*a).clone(), (*b).clone());
                    }
                }
            }
        }
        Some(n) => {
            for (a, b) in n.edges() {
                if !overlap.has_edge(a, b) {
                    let _ = g.add_edge(a.clone(), b.clone());
                }
            }
        }
    }
    Ok(g)
}

/// Learns the neighbor graph from a re-association log: edge (i, j) iff at
/// least one re-association i->j or j->i was observed.
pub fn learn_neighbor_graph<'a, I>(t: &Topology, log: I) -> Result<ApGraph, TopologyError>
where
    I: IntoIterator<Item = (&'a ApId, &'a ApId)>,
{
    let mut g = ApGraph::new(GraphKind::Neighbor, t.ap_ids());
    for (from, to) in log {
        g.add_edge(from.clone(), to.clone())?;
    }
    Ok(g)
}

/// All unordered vertex pairs of a graph's vertex set.
pub fn all_pairs(vertices: &BTreeSet<ApId>) -> BTreeMap<(ApId, ApId), ()> {
    let verts: Vec<&ApId> = vertices.iter().collect();
    let mut pairs = BTreeMap::new();
    for (i, a) in verts.iter().enumerate() {
        for b in &verts[i + 1..] {
            pairs.insert(((*a).clone(), (*b).clone()), ());
        }
    }
    pairs
}
