//! Resolutions of a singular diagram into circles: effective ranges, circle
//! tracing, saddle classification, crux detection, twisted arcs and the
//! gradings `i = |alpha|`, `q(alpha)` and `w~`.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::diagram::{
    Diagram, DiagramError, EdgeId, VertexId, VertexKind, IN_L, IN_R, OUT_L, OUT_R,
};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SmoothError {
    #[error("resolution value {1} at vertex {0} lies outside the effective range")]
    OutOfRange(VertexId, i32),
    #[error("vertex {0} missing from the resolution map")]
    MissingVertex(VertexId),
    #[error("diagram does not have exactly one double point")]
    NotSingular,
    #[error("that step at a double point is the map Phi, not a saddle")]
    NotASaddle,
    #[error("wide smoothing does not split the crux circle; diagram is not planar")]
    NotPlanar,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Assignment `alpha: vertex id -> value` in the effective range:
/// double points in `[-2, 1]`, negative crossings in `[-1, 0]`, positive
/// crossings in `[0, 1]`.
pub type ResolutionMap = BTreeMap<VertexId, i32>;

/// Effective range of a resolution value by vertex kind.
pub fn effective_range(kind: VertexKind) -> (i32, i32) {
    match kind {
        VertexKind::Dbl => (-2, 1),
        VertexKind::Neg => (-1, 0),
        VertexKind::Pos => (0, 1),
    }
}

/// Which local pairing a value selects: `true` = wide.
/// Double points: `{-2, 1}` wide, `{-1, 0}` V. Negative: `-1` wide, `0` V.
/// Positive: `0` V, `1` wide.
pub fn is_wide(kind: VertexKind, value: i32) -> bool {
    match kind {
        VertexKind::Dbl => value == -2 || value == 1,
        VertexKind::Neg => value == -1,
        VertexKind::Pos => value == 1,
    }
}

pub fn check_range(d: &Diagram, alpha: &ResolutionMap) -> Result<(), SmoothError> {
    for v in &d.vertices {
        let a = *alpha.get(&v.id).ok_or(SmoothError::MissingVertex(v.id))?;
        let (lo, hi) = effective_range(v.kind);
        if a < lo || a > hi {
            return Err(SmoothError::OutOfRange(v.id, a));
        }
    }
    Ok(())
}

/// A node of the circle-tracing graph: one port slot of one vertex.
pub type Slot = (VertexId, usize);

/// A resolved diagram: edges and local connections partitioned into circles.
/// Free loops come last in the circle numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smoothing {
    pub alpha: ResolutionMap,
    pub n_circles: usize,
    pub circle_of_slot: BTreeMap<Slot, usize>,
    pub circle_edges: Vec<BTreeSet<EdgeId>>,
    pub free_loop_circles: usize,
}

impl Smoothing {
    pub fn circle_of_edge(&self, e: EdgeId) -> Option<usize> {
        self.circle_edges.iter().position(|s| s.contains(&e))
    }
}

/// Local pairings of the four port slots selected by the resolution.
pub fn local_pairs(kind: VertexKind, value: i32) -> [(usize, usize); 2] {
    if is_wide(kind, value) {
        [(IN_L, IN_R), (OUT_L, OUT_R)]
    } else {
        [(IN_L, OUT_L), (IN_R, OUT_R)]
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Compute the circles of the `alpha`-smoothing.
pub fn smooth(d: &Diagram, alpha: &ResolutionMap) -> Result<Smoothing, SmoothError> {
    check_range(d, alpha)?;
    let slots: Vec<Slot> = d
        .vertices
        .iter()
        .flat_map(|v| (0..4).map(move |s| (v.id, s)))
        .collect();
    let slot_idx: BTreeMap<Slot, usize> = slots.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut uf = UnionFind::new(slots.len());

    // edges join their two end slots
    let mut edge_ends: BTreeMap<EdgeId, Vec<Slot>> = BTreeMap::new();
    for v in &d.vertices {
        for s in 0..4 {
            edge_ends.entry(v.ports[s]).or_default().push((v.id, s));
        }
    }
    for ends in edge_ends.values() {
        // a loop edge occupies two slots of one vertex; any edge has 2 ends
        debug_assert_eq!(ends.len(), 2);
        uf.union(slot_idx[&ends[0]], slot_idx[&ends[1]]);
    }
    // local pairings
    for v in &d.vertices {
        for (a, b) in local_pairs(v.kind, alpha[&v.id]) {
            uf.union(slot_idx[&(v.id, a)], slot_idx[&(v.id, b)]);
        }
    }

    // canonical circle numbering by least slot index
    let mut root_to_circle: BTreeMap<usize, usize> = BTreeMap::new();
    let mut circle_of_slot = BTreeMap::new();
    for (i, s) in slots.iter().enumerate() {
        let root = uf.find(i);
        let next = root_to_circle.len();
        let c = *root_to_circle.entry(root).or_insert(next);
        circle_of_slot.insert(*s, c);
    }
    let n_graph_circles = root_to_circle.len();
    let mut circle_edges: Vec<BTreeSet<EdgeId>> = vec![BTreeSet::new(); n_graph_circles];
    for (e, ends) in &edge_ends {
        let c = circle_of_slot[&ends[0]];
        circle_edges[c].insert(*e);
    }
    for _ in 0..d.free_loops {
        circle_edges.push(BTreeSet::new());
    }
    Ok(Smoothing {
        alpha: alpha.clone(),
        n_circles: n_graph_circles + d.free_loops,
        circle_of_slot,
        circle_edges,
        free_loop_circles: d.free_loops,
    })
}

/// The elementary cobordism between the smoothings at `alpha` and
/// `alpha + v` (one step in direction `v`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SaddleDescriptor {
    /// Circles `src_a`, `src_b` of the source merge into `tgt` in the target.
    Merge {
        src_a: usize,
        src_b: usize,
        tgt: usize,
    },
    /// Circle `src` splits into `tgt_a`, `tgt_b`.
    Split {
        src: usize,
        tgt_a: usize,
        tgt_b: usize,
    },
}

fn step(alpha: &ResolutionMap, v: VertexId) -> ResolutionMap {
    let mut next = alpha.clone();
    *next.get_mut(&v).unwrap() += 1;
    next
}

/// Classify the saddle `alpha -> alpha + v`. Errors with `NotASaddle` on the
/// double-point step `-1 -> 0` (that edge is `Phi`, not an elementary saddle).
pub fn saddle(
    d: &Diagram,
    alpha: &ResolutionMap,
    v: VertexId,
) -> Result<SaddleDescriptor, SmoothError> {
    let vert = d.vertex(v)?;
    if vert.kind == VertexKind::Dbl && alpha[&v] == -1 {
        return Err(SmoothError::NotASaddle);
    }
    let src = smooth(d, alpha)?;
    let next = step(alpha, v);
    let tgt = smooth(d, &next)?;
    saddle_between(&src, &tgt, d, v)
}

/// Representative slots of the two local connections at `v` in a smoothing:
/// one slot from each pair of the active pairing.
pub fn local_reps(sm: &Smoothing, d: &Diagram, v: VertexId) -> [usize; 2] {
    let kind = d.vertex(v).unwrap().kind;
    let pairs = local_pairs(kind, sm.alpha[&v]);
    [pairs[0].0, pairs[1].0]
}

/// Classification given precomputed smoothings.
pub fn saddle_between(
    src: &Smoothing,
    tgt: &Smoothing,
    d: &Diagram,
    v: VertexId,
) -> Result<SaddleDescriptor, SmoothError> {
    let [s1, s2] = local_reps(src, d, v);
    let c1 = src.circle_of_slot[&(v, s1)];
    let c2 = src.circle_of_slot[&(v, s2)];
    if c1 != c2 {
        // merging: all four slots of v lie on the merged target circle
        let t = tgt.circle_of_slot[&(v, IN_L)];
        Ok(SaddleDescriptor::Merge {
            src_a: c1,
            src_b: c2,
            tgt: t,
        })
    } else {
        let [t1s, t2s] = local_reps(tgt, d, v);
        let t1 = tgt.circle_of_slot[&(v, t1s)];
        let t2 = tgt.circle_of_slot[&(v, t2s)];
        if t1 == t2 {
            return Err(SmoothError::NotPlanar);
        }
        Ok(SaddleDescriptor::Split {
            src: c1,
            tgt_a: t1,
            tgt_b: t2,
        })
    }
}

/// Correspondence of circles untouched by the transition at `v`: for each
/// target circle, the source circle sharing an edge (or free-loop slot).
/// Circles involved in the saddle get `None`.
pub fn circle_correspondence(src: &Smoothing, tgt: &Smoothing, v: VertexId) -> Vec<Option<usize>> {
    let touched_src: BTreeSet<usize> = (0..4).map(|s| src.circle_of_slot[&(v, s)]).collect();
    let touched_tgt: BTreeSet<usize> = (0..4).map(|s| tgt.circle_of_slot[&(v, s)]).collect();
    let n_graph = tgt.n_circles - tgt.free_loop_circles;
    let mut out = vec![None; tgt.n_circles];
    for (c, edges) in tgt.circle_edges.iter().enumerate().take(n_graph) {
        if touched_tgt.contains(&c) {
            continue;
        }
        let e = edges.iter().next().expect("graph circle has an edge");
        let sc = src.circle_of_edge(*e).expect("edge in source");
        debug_assert!(!touched_src.contains(&sc));
        out[c] = Some(sc);
    }
    // free loops occupy the same trailing positions in both smoothings
    for k in 0..tgt.free_loop_circles {
        out[n_graph + k] = Some(src.n_circles - src.free_loop_circles + k);
    }
    out
}

/// Gradings of a full resolution: `i = |alpha|`, `q(alpha) = sum alpha^q(v)`
/// (with `alpha^q = alpha - 1` at double points with `alpha < 0`), and `w~`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grading {
    pub i: i64,
    pub q_alpha: i64,
    pub w_tilde: i64,
}

pub fn gradings(d: &Diagram, alpha: &ResolutionMap) -> Result<Grading, SmoothError> {
    check_range(d, alpha)?;
    let mut i = 0i64;
    let mut q = 0i64;
    for v in &d.vertices {
        let a = alpha[&v.id] as i64;
        i += a;
        q += if v.kind == VertexKind::Dbl && a < 0 {
            a - 1
        } else {
            a
        };
    }
    Ok(Grading {
        i,
        q_alpha: q,
        w_tilde: d.stats().w_tilde,
    })
}

/// Crux data of a resolution `alpha` of the crossings of a single-double-point
/// diagram (`alpha(b0) = 0` implied).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CruxInfo {
    /// The V smoothing with `alpha(b0) = 0`.
    pub smoothing: Smoothing,
    /// Edges of the twisted arc (the arc leaving the double point along
    /// `out_l`, ending at `out_r` by planarity).
    pub twisted_edges: BTreeSet<EdgeId>,
    /// Local connections `(vertex, smaller slot of the pair)` traversed by
    /// the twisted arc.
    pub twisted_locals: BTreeSet<Slot>,
}

/// Decide whether `alpha` (given on the crossings only) is a crux map, and
/// when it is, trace the twisted arc.
pub fn is_crux(d: &Diagram, alpha: &ResolutionMap) -> Result<Option<CruxInfo>, SmoothError> {
    let doubles = d.double_points();
    if doubles.len() != 1 {
        return Err(SmoothError::NotSingular);
    }
    let b0 = doubles[0];
    let mut full = alpha.clone();
    full.insert(b0, 0);
    check_range(d, &full)?;
    let sm = smooth(d, &full)?;
    let c1 = sm.circle_of_slot[&(b0, IN_L)];
    let c2 = sm.circle_of_slot[&(b0, IN_R)];
    if c1 != c2 {
        return Ok(None);
    }
    // trace the arc from (b0, out_l): with the V pairing at b0 in place we
    // walk edge / local-connection alternately until we re-enter b0
    let mut twisted_edges = BTreeSet::new();
    let mut twisted_locals = BTreeSet::new();
    // per-slot edge exit: walking "out of" a slot means crossing its edge
    let mut other_end: BTreeMap<Slot, Slot> = BTreeMap::new();
    {
        let mut ends: BTreeMap<EdgeId, Vec<Slot>> = BTreeMap::new();
        for v in &d.vertices {
            for s in 0..4 {
                ends.entry(v.ports[s]).or_default().push((v.id, s));
            }
        }
        for e in ends.values() {
            other_end.insert(e[0], e[1]);
            other_end.insert(e[1], e[0]);
        }
    }
    let local_partner = |slot: Slot| -> Slot {
        let v = d.vertex(slot.0).unwrap();
        for (a, b) in local_pairs(v.kind, full[&slot.0]) {
            if a == slot.1 {
                return (slot.0, b);
            }
            if b == slot.1 {
                return (slot.0, a);
            }
        }
        unreachable!()
    };
    let mut cur = (b0, OUT_L);
    loop {
        // cross the edge at cur
        let edge = d.vertex(cur.0).unwrap().ports[cur.1];
        let far = other_end[&cur];
        twisted_edges.insert(edge);
        if far.0 == b0 {
            if far.1 != OUT_R {
                // the arc must close at out_r for a planar diagram
                return Err(SmoothError::NotPlanar);
            }
            break;
        }
        // traverse the local connection at the far vertex
        let nxt = local_partner(far);
        twisted_locals.insert((far.0, far.1.min(nxt.1)));
        cur = nxt;
    }
    Ok(Some(CruxInfo {
        smoothing: sm,
        twisted_edges,
        twisted_locals,
    }))
}

/// Enumerate all in-range resolutions of the listed vertices.
pub fn enumerate_resolutions(d: &Diagram, vertices: &[VertexId]) -> Vec<ResolutionMap> {
    let mut out = vec![ResolutionMap::new()];
    for vid in vertices {
        let kind = d.vertex(*vid).unwrap().kind;
        let (lo, hi) = effective_range(kind);
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1) as usize);
        for base in &out {
            for a in lo..=hi {
                let mut m = base.clone();
                m.insert(*vid, a);
                next.push(m);
            }
        }
        out = next;
    }
    out
}

/// All crux maps of a single-double-point diagram (with their crux data).
pub fn crux_maps(d: &Diagram) -> Result<Vec<(ResolutionMap, CruxInfo)>, SmoothError> {
    let doubles = d.double_points();
    if doubles.len() != 1 {
        return Err(SmoothError::NotSingular);
    }
    let crossings: Vec<VertexId> = d
        .vertices
        .iter()
        .filter(|v| v.kind != VertexKind::Dbl)
        .map(|v| v.id)
        .collect();
    let mut out = Vec::new();
    for alpha in enumerate_resolutions(d, &crossings) {
        if let Some(info) = is_crux(d, &alpha)? {
            out.push((alpha, info));
        }
    }
    Ok(out)
}
