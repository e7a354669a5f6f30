//! Rooted decorated planar graphs in the disk.
//!
//! A graph is stored as a rotation system: every internal vertex lists its
//! half-edges counterclockwise, every boundary leaf is a single half-edge,
//! and the leaves are listed in counterclockwise order around the boundary
//! circle, with one of them marked as the root.
//!
//! Around a vertex the counterclockwise pattern is `in-1, ..., in-(m-1),
//! out-(m-1), ..., out-1`. With `m = 4`:
//!
//! ```text
//! slot   0     1     2     3      4      5
//! edge   in-1  in-2  in-3  out-3  out-2  out-1
//! sector    R2    R3    U4     L3     L2     U1   (sector s sits between slots s and s+1)
//! ```

use std::collections::VecDeque;
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BasisPath, Generator, Vertex};
use crate::weight::WeightVector;

pub type HalfEdgeId = usize;

/// `(vertex, slot)` in the standard pattern.
pub type Slot = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// The half-edge is the head of its edge.
    In,
    /// The half-edge is the tail of its edge.
    Out,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    /// Internal vertex, by index into the rotation list.
    Vertex(usize),
    /// Boundary leaf, by position in the boundary cycle.
    Leaf(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfEdge {
    pub id: HalfEdgeId,
    pub owner: Owner,
    /// Next half-edge counterclockwise at the owner; a leaf is its own successor.
    pub next_ccw: HalfEdgeId,
    pub mate: HalfEdgeId,
    pub direction: Direction,
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: HalfEdgeId,
    pub head: HalfEdgeId,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructuralError {
    #[error("m = {0} is not supported (need m >= 3)")]
    UnsupportedParameter(usize),
    #[error("half-edge {0} is out of range")]
    OutOfRange(HalfEdgeId),
    #[error("half-edge {0} belongs to more than one edge")]
    SharedHalfEdge(HalfEdgeId),
    #[error("edge {0} has the same half-edge at both ends")]
    DegenerateEdge(usize),
    #[error("half-edge {0} appears more than once among vertices and leaves")]
    DuplicateOwner(HalfEdgeId),
    #[error("half-edge {0} is not placed at any vertex or leaf")]
    Unplaced(HalfEdgeId),
    #[error("half-edge {0} is not part of any edge")]
    Unmated(HalfEdgeId),
    #[error("vertex {0} has an empty rotation")]
    EmptyRotation(usize),
    #[error("the boundary has no leaves")]
    EmptyBoundary,
    #[error("root index {root} is out of range for {leaves} leaves")]
    RootOutOfRange { root: usize, leaves: usize },
    #[error("slot ({vertex}, {slot}) is out of range")]
    SlotOutOfRange { vertex: usize, slot: usize },
    #[error("slot ({vertex}, {slot}) is used twice")]
    SlotReused { vertex: usize, slot: usize },
    #[error("slots ({0}, {1}) and ({2}, {3}) cannot be joined by an edge")]
    IncompatibleSlots(usize, usize, usize, usize),
    #[error("root slot ({vertex}, {slot}) is not a leaf")]
    RootNotALeaf { vertex: usize, slot: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilingError {
    #[error("graph is not a centered tiling graph: {0}")]
    Invalid(String),
    #[error("region of boundary interval {interval} reads as zero")]
    ZeroRegion { interval: usize },
    #[error("extension does not give a nonzero reading: {0}")]
    InvalidExtension(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Degree,
    LabelCompatibility,
    Connectivity,
    LoopOnlyCycles,
    DiskEmbedding,
    InternalFaces,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [
        Axiom::Degree,
        Axiom::LabelCompatibility,
        Axiom::Connectivity,
        Axiom::LoopOnlyCycles,
        Axiom::DiskEmbedding,
        Axiom::InternalFaces,
    ];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Degree => "degree",
            Axiom::LabelCompatibility => "label compatibility",
            Axiom::Connectivity => "connectivity",
            Axiom::LoopOnlyCycles => "loop-only cycles",
            Axiom::DiskEmbedding => "disk embedding",
            Axiom::InternalFaces => "internal faces",
        })
    }
}

/// Pass/fail per axiom, in the order of [`Axiom::ALL`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub results: Vec<(Axiom, Result<(), String>)>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.results.iter().all(|(_, r)| r.is_ok())
    }

    pub fn passed(&self, axiom: Axiom) -> bool {
        self.results.iter().any(|(a, r)| *a == axiom && r.is_ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (Axiom, &str)> {
        self.results
            .iter()
            .filter_map(|(a, r)| r.as_ref().err().map(|e| (*a, e.as_str())))
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (axiom, r)) in self.results.iter().enumerate() {
            if k > 0 {
                f.write_str("\n")?;
            }
            match r {
                Ok(()) => write!(f, "{axiom}: ok")?,
                Err(e) => write!(f, "{axiom}: FAIL ({e})")?,
            }
        }
        Ok(())
    }
}

/// The sector at a vertex between half-edge `after` and its ccw successor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub vertex: usize,
    pub after: HalfEdgeId,
    /// `None` when the two half-edges do not form a labelled sector.
    pub sector: Option<Generator>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    Internal,
    /// The region `X(I)` of boundary interval `I`.
    Boundary(usize),
    /// The face outside the boundary circle.
    Outer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub kind: FaceKind,
    /// Corners in traversal order; a boundary region starts right after its interval.
    pub corners: Vec<Corner>,
    /// Boundary intervals touched; interval `i` runs from leaf `i` to leaf `i+1`.
    pub intervals: Vec<usize>,
}

impl Face {
    /// The type `i` of an admissible internal face, or `None`.
    pub fn internal_type(&self, m: usize) -> Option<usize> {
        if self.kind != FaceKind::Internal {
            return None;
        }
        let labels: Vec<Generator> = self
            .corners
            .iter()
            .map(|c| c.sector)
            .collect::<Option<_>>()?;
        match labels.as_slice() {
            [Generator::U(i)] => Some(if *i == 1 { 1 } else { m }),
            [Generator::R(i), Generator::L(j)] | [Generator::L(j), Generator::R(i)] if i == j => {
                Some(*i as usize)
            }
            _ => None,
        }
    }
}

/// The boundary reading of a valid graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSequence {
    /// Vertex of the output idempotent `iota`.
    pub idempotent: Vertex,
    pub inputs: Vec<BasisPath>,
    /// Number of internal vertices, which is also the power of `t`.
    pub d: usize,
    pub weight: WeightVector,
}

/// Translation-invariant key for rooted, labelled, embedded graphs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(pub String);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Slot `s` at a vertex: `in-(s+1)` for `s <= m-2`, else `out-(2m-2-s)`.
pub fn slot_kind(m: usize, s: usize) -> (Direction, u8) {
    if s + 2 <= m {
        (Direction::In, (s + 1) as u8)
    } else {
        (Direction::Out, (2 * m - 2 - s) as u8)
    }
}

/// Label of the sector from `(dir_a, a)` to the next half-edge `(dir_b, b)`
/// counterclockwise, if the pair is one of the allowed transitions.
pub fn sector_between(m: usize, a: (Direction, u8), b: (Direction, u8)) -> Option<Generator> {
    let top = (m - 1) as u8;
    match (a, b) {
        ((Direction::In, i), (Direction::In, j)) if j == i + 1 && i >= 1 && j <= top => {
            Some(Generator::R(j))
        }
        ((Direction::In, i), (Direction::Out, j)) if i == top && j == top => {
            Some(Generator::U(m as u8))
        }
        ((Direction::Out, i), (Direction::Out, j)) if j + 1 == i && j >= 1 && i <= top => {
            Some(Generator::L(i))
        }
        ((Direction::Out, 1), (Direction::In, 1)) => Some(Generator::U(1)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingGraph {
    m: usize,
    rotations: Vec<Vec<HalfEdgeId>>,
    edges: Vec<Edge>,
    boundary: Vec<HalfEdgeId>,
    root: usize,
    half_edges: Vec<HalfEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct GraphDocument {
    m: usize,
    vertices: Vec<Vec<HalfEdgeId>>,
    edges: Vec<Edge>,
    boundary: BoundaryDocument,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct BoundaryDocument {
    leaves: Vec<HalfEdgeId>,
    root: usize,
}

/// One step of the face traversal: either a corner or the passage through a leaf.
#[derive(Debug, Clone, Copy)]
enum Mark {
    Corner(Corner),
    Leaf(HalfEdgeId),
}

impl TilingGraph {
    /// Builds a graph from raw rotation data, checking only the structure.
    pub fn new(
        m: usize,
        rotations: Vec<Vec<HalfEdgeId>>,
        edges: Vec<Edge>,
        boundary: Vec<HalfEdgeId>,
        root: usize,
    ) -> Result<Self, StructuralError> {
        if m < 3 {
            return Err(StructuralError::UnsupportedParameter(m));
        }
        let count = 2 * edges.len();
        let mut mate = vec![usize::MAX; count];
        let mut direction = vec![Direction::In; count];
        let mut label = vec![0u8; count];
        for (k, e) in edges.iter().enumerate() {
            for h in [e.tail, e.head] {
                if h >= count {
                    return Err(StructuralError::OutOfRange(h));
                }
            }
            if e.tail == e.head {
                return Err(StructuralError::DegenerateEdge(k));
            }
            for (h, other, dir) in [
                (e.tail, e.head, Direction::Out),
                (e.head, e.tail, Direction::In),
            ] {
                if mate[h] != usize::MAX {
                    return Err(StructuralError::SharedHalfEdge(h));
                }
                mate[h] = other;
                direction[h] = dir;
                label[h] = e.label;
            }
        }
        if let Some(h) = mate.iter().position(|&x| x == usize::MAX) {
            return Err(StructuralError::Unmated(h));
        }
        if boundary.is_empty() {
            return Err(StructuralError::EmptyBoundary);
        }
        if root >= boundary.len() {
            return Err(StructuralError::RootOutOfRange {
                root,
                leaves: boundary.len(),
            });
        }
        let mut owner: Vec<Option<Owner>> = vec![None; count];
        let mut next = vec![0usize; count];
        let mut place = |h: HalfEdgeId, o: Owner| -> Result<(), StructuralError> {
            let slot = owner.get_mut(h).ok_or(StructuralError::OutOfRange(h))?;
            if slot.is_some() {
                return Err(StructuralError::DuplicateOwner(h));
            }
            *slot = Some(o);
            Ok(())
        };
        for (v, rot) in rotations.iter().enumerate() {
            if rot.is_empty() {
                return Err(StructuralError::EmptyRotation(v));
            }
            for &h in rot {
                place(h, Owner::Vertex(v))?;
            }
        }
        for (p, &h) in boundary.iter().enumerate() {
            place(h, Owner::Leaf(p))?;
        }
        for rot in &rotations {
            for (k, &h) in rot.iter().enumerate() {
                next[h] = rot[(k + 1) % rot.len()];
            }
        }
        for &h in &boundary {
            next[h] = h;
        }
        let half_edges = (0..count)
            .map(|h| {
                Ok(HalfEdge {
                    id: h,
                    owner: owner[h].ok_or(StructuralError::Unplaced(h))?,
                    next_ccw: next[h],
                    mate: mate[h],
                    direction: direction[h],
                    label: label[h],
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TilingGraph {
            m,
            rotations,
            edges,
            boundary,
            root,
            half_edges,
        })
    }

    /// Builds a graph on `d` vertices, each carrying the standard slot
    /// pattern, from a list of joined slot pairs. Unjoined slots become
    /// leaves, ordered by tracing the face that contains them; the root is
    /// the leaf at slot `root`.
    ///
    /// Half-edge `(v, s)` gets id `v * (2m - 2) + s`; leaves follow.
    pub fn from_slots(
        m: usize,
        d: usize,
        joins: &[(Slot, Slot)],
        root: Slot,
    ) -> Result<Self, StructuralError> {
        if m < 3 {
            return Err(StructuralError::UnsupportedParameter(m));
        }
        let deg = 2 * m - 2;
        let id = |(v, s): (usize, usize)| v * deg + s;
        let mut partner: Vec<Option<usize>> = vec![None; d * deg];
        for &(a, b) in joins {
            for (v, s) in [a, b] {
                if v >= d || s >= deg {
                    return Err(StructuralError::SlotOutOfRange { vertex: v, slot: s });
                }
            }
            let (da, la) = slot_kind(m, a.1);
            let (db, lb) = slot_kind(m, b.1);
            if da == db || la != lb {
                return Err(StructuralError::IncompatibleSlots(a.0, a.1, b.0, b.1));
            }
            for (x, y) in [(a, b), (b, a)] {
                if partner[id(x)].is_some() || x == y {
                    return Err(StructuralError::SlotReused {
                        vertex: x.0,
                        slot: x.1,
                    });
                }
                partner[id(x)] = Some(id(y));
            }
        }
        if root.0 >= d || root.1 >= deg {
            return Err(StructuralError::SlotOutOfRange {
                vertex: root.0,
                slot: root.1,
            });
        }
        if partner[id(root)].is_some() {
            return Err(StructuralError::RootNotALeaf {
                vertex: root.0,
                slot: root.1,
            });
        }
        let free: Vec<usize> = (0..d * deg).filter(|&h| partner[h].is_none()).collect();
        let leaf_of = |k: usize| d * deg + k;
        let mut mate = vec![0usize; d * deg + free.len()];
        for (h, p) in partner.iter().enumerate() {
            if let Some(p) = p {
                mate[h] = *p;
            }
        }
        for (k, &h) in free.iter().enumerate() {
            mate[h] = leaf_of(k);
            mate[leaf_of(k)] = h;
        }
        let is_leaf = |h: usize| h >= d * deg;
        let sigma = |h: usize| {
            if is_leaf(h) {
                h
            } else {
                (h / deg) * deg + (h % deg + 1) % deg
            }
        };
        // Leaves in the order of their face orbits, starting from the root.
        let mut seen = vec![false; mate.len()];
        let mut order = Vec::with_capacity(free.len());
        let root_leaf = mate[id(root)];
        let mut starts = vec![root_leaf];
        starts.extend((0..free.len()).map(leaf_of));
        for start in starts {
            if seen[start] {
                continue;
            }
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                if is_leaf(h) {
                    order.push(h);
                }
                h = sigma(mate[h]);
            }
        }
        let mut edges = Vec::new();
        for (h, &other) in mate.iter().enumerate().take(d * deg) {
            if slot_kind(m, h % deg).0 == Direction::Out {
                edges.push(Edge {
                    tail: h,
                    head: other,
                    label: slot_kind(m, h % deg).1,
                });
            } else if is_leaf(other) {
                edges.push(Edge {
                    tail: other,
                    head: h,
                    label: slot_kind(m, h % deg).1,
                });
            }
        }
        let rotations = (0..d).map(|v| (v * deg..(v + 1) * deg).collect()).collect();
        TilingGraph::new(m, rotations, edges, order, 0)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of internal vertices.
    pub fn d(&self) -> usize {
        self.rotations.len()
    }

    /// Number of boundary leaves.
    pub fn n(&self) -> usize {
        self.boundary.len()
    }

    pub fn rotations(&self) -> &[Vec<HalfEdgeId>] {
        &self.rotations
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn boundary(&self) -> &[HalfEdgeId] {
        &self.boundary
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn half_edge(&self, h: HalfEdgeId) -> &HalfEdge {
        &self.half_edges[h]
    }

    /// The same graph rooted at a different leaf.
    pub fn with_root(&self, root: usize) -> Result<Self, StructuralError> {
        if root >= self.boundary.len() {
            return Err(StructuralError::RootOutOfRange {
                root,
                leaves: self.boundary.len(),
            });
        }
        let mut g = self.clone();
        g.root = root;
        Ok(g)
    }

    fn is_leaf(&self, h: HalfEdgeId) -> bool {
        matches!(self.half_edges[h].owner, Owner::Leaf(_))
    }

    fn kind(&self, h: HalfEdgeId) -> (Direction, u8) {
        let e = &self.half_edges[h];
        (e.direction, e.label)
    }

    /// Label of the sector between `h` and its ccw successor.
    pub fn sector_after(&self, h: HalfEdgeId) -> Option<Generator> {
        let e = &self.half_edges[h];
        match e.owner {
            Owner::Vertex(_) => sector_between(self.m, self.kind(h), self.kind(e.next_ccw)),
            Owner::Leaf(_) => None,
        }
    }

    /// Orbits of `h -> next_ccw(mate(h))`, where leaves are fixed points of
    /// `next_ccw`. Each orbit is a face of the graph drawn in the plane.
    fn orbits(&self) -> Vec<Vec<Mark>> {
        let mut seen = vec![false; self.half_edges.len()];
        let mut out = Vec::new();
        // Start from the root leaf so the boundary orbit begins there.
        let root_leaf = self.boundary[self.root];
        let starts = std::iter::once(root_leaf).chain(0..self.half_edges.len());
        for start in starts {
            if seen[start] {
                continue;
            }
            let mut marks = Vec::new();
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                if self.is_leaf(h) {
                    marks.push(Mark::Leaf(h));
                }
                let x = self.half_edges[h].mate;
                if let Owner::Vertex(v) = self.half_edges[x].owner {
                    marks.push(Mark::Corner(Corner {
                        vertex: v,
                        after: x,
                        sector: self.sector_after(x),
                    }));
                }
                h = self.half_edges[x].next_ccw;
            }
            out.push(marks);
        }
        out
    }

    /// All faces: internal faces, one region per boundary interval, and the outer face.
    pub fn faces(&self) -> Vec<Face> {
        let mut faces = Vec::new();
        for marks in self.orbits() {
            let leaves: Vec<usize> = marks
                .iter()
                .enumerate()
                .filter_map(|(k, mk)| matches!(mk, Mark::Leaf(_)).then_some(k))
                .collect();
            if leaves.is_empty() {
                faces.push(Face {
                    kind: FaceKind::Internal,
                    corners: marks
                        .iter()
                        .filter_map(|mk| match mk {
                            Mark::Corner(c) => Some(*c),
                            Mark::Leaf(_) => None,
                        })
                        .collect(),
                    intervals: Vec::new(),
                });
                continue;
            }
            for (j, &k) in leaves.iter().enumerate() {
                let end = leaves
                    .get(j + 1)
                    .copied()
                    .unwrap_or(marks.len() + leaves[0]);
                let Mark::Leaf(leaf) = marks[k] else {
                    unreachable!()
                };
                let Owner::Leaf(interval) = self.half_edges[leaf].owner else {
                    unreachable!()
                };
                let corners = (k + 1..end)
                    .map(|t| match marks[t % marks.len()] {
                        Mark::Corner(c) => c,
                        Mark::Leaf(_) => unreachable!("leaf marks are split points"),
                    })
                    .collect();
                faces.push(Face {
                    kind: FaceKind::Boundary(interval),
                    corners,
                    intervals: vec![interval],
                });
            }
        }
        faces.push(Face {
            kind: FaceKind::Outer,
            corners: Vec::new(),
            intervals: (0..self.boundary.len()).collect(),
        });
        faces
    }

    fn check_degree(&self) -> Result<(), String> {
        let want = 2 * self.m - 2;
        match self.rotations.iter().position(|r| r.len() != want) {
            Some(v) => Err(format!(
                "vertex {v} has degree {}, expected {want}",
                self.rotations[v].len()
            )),
            None => Ok(()),
        }
    }

    fn check_labels(&self) -> Result<(), String> {
        for e in &self.edges {
            if e.label == 0 || e.label as usize >= self.m {
                return Err(format!("edge label {} outside 1..={}", e.label, self.m - 1));
            }
        }
        for (v, rot) in self.rotations.iter().enumerate() {
            for &h in rot {
                if self.sector_after(h).is_none() {
                    let (d1, l1) = self.kind(h);
                    let (d2, l2) = self.kind(self.half_edges[h].next_ccw);
                    return Err(format!(
                        "vertex {v}: {d1:?}-{l1} followed by {d2:?}-{l2} breaks the rotation pattern"
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<(), String> {
        if self.rotations.is_empty() {
            return Err("graph has no internal vertex".into());
        }
        let node = |h: HalfEdgeId| match self.half_edges[h].owner {
            Owner::Vertex(v) => v,
            Owner::Leaf(p) => self.rotations.len() + p,
        };
        let total = self.rotations.len() + self.boundary.len();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = total;
        for e in &self.edges {
            let a = find(&mut parent, node(e.tail));
            let b = find(&mut parent, node(e.head));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        if components == 1 {
            Ok(())
        } else {
            Err(format!("graph has {components} components"))
        }
    }

    fn check_cycles(&self) -> Result<(), String> {
        let d = self.rotations.len();
        let mut adj = vec![Vec::new(); d];
        let mut indeg = vec![0usize; d];
        for e in &self.edges {
            if let (Owner::Vertex(a), Owner::Vertex(b)) =
                (self.half_edges[e.tail].owner, self.half_edges[e.head].owner)
            {
                if a != b {
                    adj[a].push(b);
                    indeg[b] += 1;
                }
            }
        }
        let mut queue: VecDeque<usize> = (0..d).filter(|&v| indeg[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop_front() {
            removed += 1;
            for &w in &adj[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if removed == d {
            Ok(())
        } else {
            Err("directed cycle through distinct vertices".into())
        }
    }

    fn check_disk(&self, orbits: &[Vec<Mark>]) -> Result<(), String> {
        let v = (self.rotations.len() + self.boundary.len()) as i64;
        let e = self.edges.len() as i64;
        let f = orbits.len() as i64;
        if v - e + f != 2 {
            return Err(format!(
                "Euler characteristic {} (V={v}, E={e}, F={f})",
                v - e + f
            ));
        }
        let leaf_orbits: Vec<&Vec<Mark>> = orbits
            .iter()
            .filter(|o| o.iter().any(|mk| matches!(mk, Mark::Leaf(_))))
            .collect();
        if leaf_orbits.len() != 1 {
            return Err(format!(
                "leaves lie on {} different faces",
                leaf_orbits.len()
            ));
        }
        let seen: Vec<HalfEdgeId> = leaf_orbits[0]
            .iter()
            .filter_map(|mk| match mk {
                Mark::Leaf(h) => Some(*h),
                Mark::Corner(_) => None,
            })
            .collect();
        // orbits() starts at the root leaf
        let n = self.boundary.len();
        let expected: Vec<HalfEdgeId> =
            (0..n).map(|k| self.boundary[(self.root + k) % n]).collect();
        if seen != expected {
            return Err("leaves are not met in the stored boundary order".into());
        }
        Ok(())
    }

    fn check_internal_faces(&self) -> Result<(), String> {
        for face in self.faces() {
            if face.kind == FaceKind::Internal && face.internal_type(self.m).is_none() {
                let sectors: Vec<String> = face
                    .corners
                    .iter()
                    .map(|c| c.sector.map_or("?".to_string(), |g| g.to_string()))
                    .collect();
                return Err(format!(
                    "inadmissible internal face [{}]",
                    sectors.join(" ")
                ));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> ValidityReport {
        let orbits = self.orbits();
        let results = vec![
            (Axiom::Degree, self.check_degree()),
            (Axiom::LabelCompatibility, self.check_labels()),
            (Axiom::Connectivity, self.check_connected()),
            (Axiom::LoopOnlyCycles, self.check_cycles()),
            (Axiom::DiskEmbedding, self.check_disk(&orbits)),
            (Axiom::InternalFaces, self.check_internal_faces()),
        ];
        ValidityReport { results }
    }

    fn ensure_valid(&self) -> Result<(), TilingError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            let msg: Vec<String> = report
                .failures()
                .map(|(a, e)| format!("{a}: {e}"))
                .collect();
            Err(TilingError::Invalid(msg.join("; ")))
        }
    }

    /// Counts internal faces by type. Faces of no admissible type are ignored.
    pub fn weight_vector(&self) -> WeightVector {
        let mut w = WeightVector::zero(self.m);
        for face in self.faces() {
            if let Some(i) = face.internal_type(self.m) {
                w.increment(i);
            }
        }
        w
    }

    /// Reads the idempotent and the boundary inputs, starting at the root
    /// interval and going counterclockwise.
    pub fn algebra_sequence(&self) -> Result<AlgebraSequence, TilingError> {
        self.ensure_valid()?;
        let n = self.boundary.len();
        let mut regions: Vec<Option<Vec<Generator>>> = vec![None; n];
        let mut weight = WeightVector::zero(self.m);
        for face in self.faces() {
            match face.kind {
                FaceKind::Boundary(i) => {
                    let word = face
                        .corners
                        .iter()
                        .map(|c| c.sector)
                        .collect::<Option<Vec<_>>>()
                        .ok_or(TilingError::ZeroRegion { interval: i })?;
                    regions[i] = Some(word);
                }
                FaceKind::Internal => {
                    if let Some(i) = face.internal_type(self.m) {
                        weight.increment(i);
                    }
                }
                FaceKind::Outer => {}
            }
        }
        let mut inputs = Vec::with_capacity(n);
        for k in 0..n {
            let i = (self.root + k) % n;
            let word = regions[i].as_deref().unwrap_or(&[]);
            let path = BasisPath::from_word(word).ok_or(TilingError::ZeroRegion { interval: i })?;
            inputs.push(path);
        }
        let root_leaf = self.boundary[self.root];
        Ok(AlgebraSequence {
            idempotent: self.half_edges[root_leaf].label,
            inputs,
            d: self.rotations.len(),
            weight,
        })
    }

    /// A key equal for two graphs exactly when they are isomorphic as rooted,
    /// labelled, embedded graphs.
    ///
    /// Vertices are numbered in breadth-first order from the root leaf, and
    /// each rotation is listed from its `in-1` half-edge.
    pub fn canonical_form(&self) -> CanonicalKey {
        let d = self.rotations.len();
        let mut key = format!("{}:", self.m);
        if d == 0 {
            return CanonicalKey(key);
        }
        let start_of = |v: usize| -> usize {
            let rot = &self.rotations[v];
            rot.iter()
                .position(|&h| self.kind(h) == (Direction::In, 1))
                .unwrap_or(0)
        };
        let slot_of = |h: HalfEdgeId| -> (usize, usize) {
            let Owner::Vertex(v) = self.half_edges[h].owner else {
                unreachable!()
            };
            let rot = &self.rotations[v];
            let pos = rot
                .iter()
                .position(|&x| x == h)
                .expect("h is in its rotation");
            (v, (pos + rot.len() - start_of(v)) % rot.len())
        };
        let root_leaf = self.boundary[self.root];
        let first = self.half_edges[root_leaf].mate;
        let mut ids = vec![usize::MAX; d];
        let mut queue = Vec::with_capacity(d);
        match self.half_edges[first].owner {
            Owner::Vertex(v) => {
                ids[v] = 0;
                queue.push(v);
            }
            Owner::Leaf(_) => return CanonicalKey(key + "-"),
        }
        let mut qi = 0;
        while qi < queue.len() {
            let v = queue[qi];
            qi += 1;
            if qi > 1 {
                key.push('|');
            }
            let rot = &self.rotations[v];
            let s0 = start_of(v);
            for k in 0..rot.len() {
                if k > 0 {
                    key.push(',');
                }
                let h = rot[(s0 + k) % rot.len()];
                let x = self.half_edges[h].mate;
                if x == root_leaf {
                    key.push('*');
                } else if self.is_leaf(x) {
                    key.push('L');
                } else {
                    let (u, s) = slot_of(x);
                    if ids[u] == usize::MAX {
                        ids[u] = queue.len();
                        queue.push(u);
                    }
                    let _ = write!(key, "{}.{}", ids[u], s);
                }
            }
        }
        CanonicalKey(key)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphDocument::from(self)).expect("graph documents serialize")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, String> {
        let doc: GraphDocument =
            serde_json::from_value(value.clone()).map_err(|e| e.to_string())?;
        doc.try_into().map_err(|e: StructuralError| e.to_string())
    }

    /// Graphviz rendering: internal vertices as circles, leaves as points,
    /// the root leaf drawn as a double circle.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph tiling {\n");
        let _ = writeln!(s, "  // m = {}, d = {}, n = {}", self.m, self.d(), self.n());
        for v in 0..self.rotations.len() {
            let _ = writeln!(s, "  v{v} [shape=circle];");
        }
        for p in 0..self.boundary.len() {
            if p == self.root {
                let _ = writeln!(s, "  b{p} [shape=doublecircle, label=\"root\"];");
            } else {
                let _ = writeln!(s, "  b{p} [shape=point];");
            }
        }
        let name = |h: HalfEdgeId| match self.half_edges[h].owner {
            Owner::Vertex(v) => format!("v{v}"),
            Owner::Leaf(p) => format!("b{p}"),
        };
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  {} -> {} [label=\"{}\"];",
                name(e.tail),
                name(e.head),
                e.label
            );
        }
        s.push_str("}\n");
        s
    }
}

impl From<&TilingGraph> for GraphDocument {
    fn from(g: &TilingGraph) -> Self {
        GraphDocument {
            m: g.m,
            vertices: g.rotations.clone(),
            edges: g.edges.clone(),
            boundary: BoundaryDocument {
                leaves: g.boundary.clone(),
                root: g.root,
            },
        }
    }
}

impl TryFrom<GraphDocument> for TilingGraph {
    type Error = StructuralError;

    fn try_from(doc: GraphDocument) -> Result<Self, StructuralError> {
        TilingGraph::new(
            doc.m,
            doc.vertices,
            doc.edges,
            doc.boundary.leaves,
            doc.boundary.root,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// A tiling graph with a chain of 2-valent vertices on its root edge.
///
/// The chain multiplies into the first input (left) or the last input
/// (right) and also forms the output factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedGraph {
    pub graph: TilingGraph,
    pub side: Side,
    pub extension: Vec<Generator>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedReading {
    pub idempotent: Vertex,
    pub inputs: Vec<BasisPath>,
    pub output_factor: BasisPath,
    pub d: usize,
    pub weight: WeightVector,
}

impl ExtendedGraph {
    pub fn read(&self) -> Result<ExtendedReading, TilingError> {
        let seq = self.graph.algebra_sequence()?;
        let iota = BasisPath::idempotent(seq.idempotent);
        let ext = if self.extension.is_empty() {
            iota.clone()
        } else {
            BasisPath::from_word(&self.extension).ok_or_else(|| {
                TilingError::InvalidExtension("extension labels multiply to zero".into())
            })?
        };
        if ext.source() != seq.idempotent || ext.target() != seq.idempotent {
            return Err(TilingError::InvalidExtension(format!(
                "extension {ext} does not start and end at [{}]",
                seq.idempotent
            )));
        }
        let mut inputs = seq.inputs;
        let zero = || TilingError::InvalidExtension("extended input reads as zero".into());
        match self.side {
            Side::Left => {
                inputs[0] = ext.mul(&inputs[0]).ok_or_else(zero)?;
            }
            Side::Right => {
                let last = inputs.len() - 1;
                inputs[last] = inputs[last].mul(&ext).ok_or_else(zero)?;
            }
        }
        Ok(ExtendedReading {
            idempotent: seq.idempotent,
            inputs,
            output_factor: ext,
            d: seq.d,
            weight: seq.weight,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(m: usize) -> TilingGraph {
        TilingGraph::from_slots(m, 1, &[], (0, 0)).unwrap()
    }

    fn words(seq: &AlgebraSequence) -> Vec<String> {
        seq.inputs.iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn star_reads_the_generators() {
        let g = star(4);
        assert!(g.validate().is_valid(), "{}", g.validate());
        let seq = g.algebra_sequence().unwrap();
        assert_eq!(seq.idempotent, 1);
        assert_eq!(seq.d, 1);
        assert!(seq.weight.is_zero());
        // Rooted at in-1, the single region per interval is one sector each.
        assert_eq!(words(&seq), ["R2", "R3", "U4", "L3", "L2", "U1"]);
        assert_eq!(g.faces().len(), 7);
    }

    #[test]
    fn star_faces_partition_the_corners() {
        let g = star(5);
        let faces = g.faces();
        let corners: usize = faces.iter().map(|f| f.corners.len()).sum();
        assert_eq!(corners, 8);
        assert_eq!(
            faces.iter().filter(|f| f.kind == FaceKind::Outer).count(),
            1
        );
    }

    #[test]
    fn root_choice_changes_key_and_reading() {
        let g = star(4);
        let h = g.with_root(2).unwrap();
        assert_ne!(g.canonical_form(), h.canonical_form());
        let seq = h.algebra_sequence().unwrap();
        assert_eq!(seq.idempotent, 3);
        assert_eq!(words(&seq)[0], "U4");
    }

    #[test]
    fn loop_gives_a_monogon() {
        // m = 3: out-1 (slot 3) to in-1 (slot 0) at the same vertex.
        let g = TilingGraph::from_slots(3, 1, &[((0, 3), (0, 0))], (0, 1)).unwrap();
        assert!(g.validate().is_valid(), "{}", g.validate());
        assert_eq!(g.weight_vector().components(), &[1, 0, 0]);
        let seq = g.algebra_sequence().unwrap();
        assert_eq!(seq.idempotent, 2);
        assert_eq!(words(&seq), ["U3", "L2*R2"]);
    }

    #[test]
    fn two_loops_at_one_vertex_are_allowed() {
        // m = 4: out-1 to in-1 encloses U1, out-3 to in-3 encloses U4.
        let g =
            TilingGraph::from_slots(4, 1, &[((0, 5), (0, 0)), ((0, 3), (0, 2))], (0, 1)).unwrap();
        assert!(g.validate().is_valid(), "{}", g.validate());
        assert_eq!(g.weight_vector().components(), &[1, 0, 0, 1]);
        assert_eq!(g.algebra_sequence().unwrap().inputs.len(), 2);
    }

    #[test]
    fn tree_on_two_vertices() {
        // m = 3: out-2 of vertex 0 into in-2 of vertex 1.
        let g = TilingGraph::from_slots(3, 2, &[((0, 2), (1, 1))], (0, 0)).unwrap();
        let report = g.validate();
        assert!(report.is_valid(), "{report}");
        let seq = g.algebra_sequence().unwrap();
        assert_eq!(seq.d, 2);
        assert_eq!(seq.inputs.len(), 6);
        let grading: u32 = seq.inputs.iter().map(|p| p.doubled_total()).sum();
        assert_eq!(grading, 2 * 3 * 2);
    }

    #[test]
    fn directed_two_cycle_is_rejected() {
        let g =
            TilingGraph::from_slots(3, 2, &[((0, 2), (1, 1)), ((1, 2), (0, 1))], (0, 0)).unwrap();
        let report = g.validate();
        assert!(!report.passed(Axiom::LoopOnlyCycles));
    }

    #[test]
    fn alternating_orientation_fails_label_compatibility() {
        // Four half-edges around one vertex, alternating in/out.
        let edges = vec![
            Edge {
                tail: 4,
                head: 0,
                label: 1,
            },
            Edge {
                tail: 1,
                head: 5,
                label: 1,
            },
            Edge {
                tail: 6,
                head: 2,
                label: 2,
            },
            Edge {
                tail: 3,
                head: 7,
                label: 2,
            },
        ];
        let g = TilingGraph::new(3, vec![vec![0, 1, 2, 3]], edges, vec![4, 5, 6, 7], 0).unwrap();
        let report = g.validate();
        assert!(report.passed(Axiom::Degree));
        assert!(!report.passed(Axiom::LabelCompatibility));
        assert!(g.algebra_sequence().is_err());
    }

    #[test]
    fn reversed_boundary_fails_disk_check() {
        let g = star(4);
        let mut leaves = g.boundary().to_vec();
        leaves.reverse();
        let h = TilingGraph::new(4, g.rotations().to_vec(), g.edges().to_vec(), leaves, 0).unwrap();
        let report = h.validate();
        assert!(!report.passed(Axiom::DiskEmbedding));
        assert!(report.passed(Axiom::Connectivity));
    }

    #[test]
    fn structural_errors_are_caught() {
        let e = Edge {
            tail: 0,
            head: 1,
            label: 1,
        };
        assert!(matches!(
            TilingGraph::new(3, vec![vec![0]], vec![e], vec![0], 0),
            Err(StructuralError::DuplicateOwner(0))
        ));
        assert!(matches!(
            TilingGraph::new(3, vec![], vec![e], vec![0], 0),
            Err(StructuralError::Unplaced(1))
        ));
        assert!(matches!(
            TilingGraph::new(3, vec![vec![0]], vec![e], vec![1], 3),
            Err(StructuralError::RootOutOfRange { .. })
        ));
        assert!(matches!(
            TilingGraph::new(
                3,
                vec![vec![0]],
                vec![Edge {
                    tail: 0,
                    head: 0,
                    label: 1
                }],
                vec![1],
                0
            ),
            Err(StructuralError::DegenerateEdge(0))
        ));
    }

    #[test]
    fn no_internal_vertex_is_not_connected_enough() {
        let e = Edge {
            tail: 0,
            head: 1,
            label: 1,
        };
        let g = TilingGraph::new(3, vec![], vec![e], vec![0, 1], 0).unwrap();
        assert!(!g.validate().passed(Axiom::Connectivity));
    }

    #[test]
    fn key_ignores_vertex_numbering() {
        let a = TilingGraph::from_slots(3, 2, &[((0, 2), (1, 1))], (0, 0)).unwrap();
        let b = TilingGraph::from_slots(3, 2, &[((1, 2), (0, 1))], (1, 0)).unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());
        assert_eq!(a.algebra_sequence().unwrap(), b.algebra_sequence().unwrap());
    }

    #[test]
    fn json_round_trip() {
        let g = TilingGraph::from_slots(3, 2, &[((0, 2), (1, 1))], (0, 0)).unwrap();
        let back = TilingGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
        assert!(TilingGraph::from_json(&serde_json::json!({"m": 3})).is_err());
    }

    #[test]
    fn dot_marks_root() {
        let dot = star(3).to_dot();
        assert!(dot.contains("doublecircle"));
        assert_eq!(dot.matches("->").count(), 4);
    }

    #[test]
    fn extension_multiplies_one_side() {
        let g = star(3);
        let right = ExtendedGraph {
            graph: g.clone(),
            side: Side::Right,
            extension: vec![Generator::U(1), Generator::U(1)],
        };
        let r = right.read().unwrap();
        assert_eq!(r.output_factor.to_string(), "U1^2");
        assert_eq!(r.inputs.last().unwrap().to_string(), "U1^3");

        let empty = ExtendedGraph {
            graph: g.clone(),
            side: Side::Left,
            extension: vec![],
        };
        let e = empty.read().unwrap();
        assert_eq!(e.output_factor, BasisPath::idempotent(1));
        assert_eq!(e.inputs, g.algebra_sequence().unwrap().inputs);

        let bad = ExtendedGraph {
            graph: g,
            side: Side::Left,
            extension: vec![Generator::R(2)],
        };
        assert!(matches!(bad.read(), Err(TilingError::InvalidExtension(_))));
    }
}
