//! Cycle gadgets: a decided graph `G` becomes an edge enumeration of a
//! coded graph `H(G)` from which `G` can be read back without knowing
//! which pairs are non-edges in advance.
//!
//! Layout of `H(G)` for `G` on `n` nodes:
//!
//! * node `x` owns the block `c_x = 4x`, `t_x^k = 4x + k` (`k = 1, 2, 3`),
//!   with edges `c_x - t^1`, `t^1 - t^2`, `t^2 - t^3`, `t^3 - t^1`;
//! * after all node blocks, each pair `x < y`, in colex order (by `y`, then
//!   `x`), owns `d_xy` followed by cycle nodes `w_1 .. w_k`, with `k = 5`
//!   if `xy` is an edge of `G` and `k = 7` otherwise, and edges
//!   `d - c_x`, `d - c_y`, `d - w_1`, `w_1 - w_2`, ..., `w_k - w_1`.
//!
//! Edges are emitted in exactly this order.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{check_bijection, Graph, GraphError};

pub type EdgeStream = Vec<(u32, u32)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error("malformed gadget structure: {0}")]
    Malformed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("not an isomorphism of coded graphs: {0}")]
    NotIsomorphism(String),
}

/// Index allocation for `H(G)`.
#[derive(Clone, Debug)]
pub struct GadgetLayout {
    n: u32,
    pair_start: BTreeMap<(u32, u32), (u32, u32)>,
    total: u32,
}

impl GadgetLayout {
    pub fn new(g: &Graph) -> Self {
        let n = g.node_count();
        let mut next = 4 * n;
        let mut pair_start = BTreeMap::new();
        for y in 0..n {
            for x in 0..y {
                let k = if g.has_edge(x, y) { 5 } else { 7 };
                pair_start.insert((x, y), (next, k));
                next += 1 + k;
            }
        }
        GadgetLayout {
            n,
            pair_start,
            total: next,
        }
    }

    pub fn node_count(&self) -> u32 {
        self.total
    }

    pub fn c(&self, x: u32) -> u32 {
        4 * x
    }

    pub fn t(&self, x: u32, k: u32) -> u32 {
        4 * x + k
    }

    pub fn d(&self, x: u32, y: u32) -> u32 {
        self.pair_start[&(x.min(y), x.max(y))].0
    }

    pub fn cycle_len(&self, x: u32, y: u32) -> u32 {
        self.pair_start[&(x.min(y), x.max(y))].1
    }

    /// `w_i`, `1 <= i <= cycle_len`.
    pub fn w(&self, x: u32, y: u32, i: u32) -> u32 {
        self.d(x, y) + i
    }

    /// Pairs in emission order.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n).flat_map(|y| (0..y).map(move |x| (x, y)))
    }
}

/// The edge enumeration of `H(G)`.
pub fn encode_h(g: &Graph) -> EdgeStream {
    let lay = GadgetLayout::new(g);
    let mut out = Vec::new();
    for x in 0..g.node_count() {
        let (c, t1, t2, t3) = (lay.c(x), lay.t(x, 1), lay.t(x, 2), lay.t(x, 3));
        out.extend([(c, t1), (t1, t2), (t2, t3), (t3, t1)]);
    }
    for (x, y) in lay.pairs() {
        let d = lay.d(x, y);
        let k = lay.cycle_len(x, y);
        out.extend([(d, lay.c(x)), (d, lay.c(y)), (d, lay.w(x, y, 1))]);
        for i in 1..=k {
            out.push((lay.w(x, y, i), lay.w(x, y, i % k + 1)));
        }
    }
    out
}

/// The coded graph `H(G)` as a plain graph.
pub fn coded_graph(g: &Graph) -> Graph {
    let lay = GadgetLayout::new(g);
    Graph::from_edges(lay.node_count(), encode_h(g)).expect("layout is valid")
}

/// What a prefix of a coded-graph enumeration determines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decoded {
    /// `c_nodes[m]` is the coded-graph node numbered `m`.
    pub c_nodes: Vec<u32>,
    pub edges: BTreeSet<(u32, u32)>,
    pub non_edges: BTreeSet<(u32, u32)>,
    /// Pairs of numbered nodes whose status is not yet decided.
    pub pending: Vec<(u32, u32)>,
}

impl Decoded {
    /// Numbered nodes and the edges decided so far.
    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.c_nodes.len() as u32, self.edges.iter().copied())
            .expect("decoded edges are between numbered nodes")
    }

    pub fn is_complete(&self) -> bool {
        self.pending.is_empty()
    }

    /// True iff everything decided in `self` is decided the same way in
    /// `later`.
    pub fn is_refined_by(&self, later: &Decoded) -> bool {
        later.c_nodes.starts_with(&self.c_nodes)
            && self.edges.is_subset(&later.edges)
            && self.non_edges.is_subset(&later.non_edges)
    }
}

struct Adjacency {
    adj: BTreeMap<u32, BTreeSet<u32>>,
}

impl Adjacency {
    fn build(stream: &[(u32, u32)]) -> Result<Self, GadgetError> {
        let mut adj: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        for (stage, &(x, y)) in stream.iter().enumerate() {
            if x == y {
                return Err(GadgetError::Malformed(format!("self-loop at stage {stage}")));
            }
            if !adj.entry(x).or_default().insert(y) {
                return Err(GadgetError::Malformed(format!(
                    "duplicate edge ({x},{y}) at stage {stage}"
                )));
            }
            adj.entry(y).or_default().insert(x);
        }
        Ok(Adjacency { adj })
    }

    fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        self.adj.get(&v).into_iter().flatten().copied()
    }

    fn has(&self, x: u32, y: u32) -> bool {
        self.adj.get(&x).is_some_and(|s| s.contains(&y))
    }

    fn on_triangle(&self, v: u32) -> bool {
        let nb: Vec<u32> = self.neighbors(v).collect();
        nb.iter()
            .enumerate()
            .any(|(i, &a)| nb[i + 1..].iter().any(|&b| self.has(a, b)))
    }
}

/// Reads the graph back from a prefix of an enumeration of a coded graph.
///
/// A node is a marker (`c`-node) iff it lies on no triangle but is adjacent
/// to a node on one. A marker gets number `m` once every smaller index is
/// classified, `m` being the count of smaller markers. A pair of numbered
/// markers is decided once their shared `d`-node's attached cycle closes:
/// length 5 means an edge, length 7 a non-edge.
pub fn decode_f(stream: &[(u32, u32)]) -> Result<Decoded, GadgetError> {
    Ok(analyze(stream)?.decoded)
}

struct Analysis {
    decoded: Decoded,
    adj: Adjacency,
    tri: BTreeSet<u32>,
    /// Decided pairs of marker numbers: connector and cycle from the bridge.
    gadgets: BTreeMap<(u32, u32), (u32, Vec<u32>)>,
}

fn analyze(stream: &[(u32, u32)]) -> Result<Analysis, GadgetError> {
    let g = Adjacency::build(stream)?;
    let tri: BTreeSet<u32> = g.adj.keys().copied().filter(|&v| g.on_triangle(v)).collect();
    let markers: BTreeSet<u32> = g
        .adj
        .keys()
        .copied()
        .filter(|v| !tri.contains(v) && g.neighbors(*v).any(|w| tri.contains(&w)))
        .collect();
    for &c in &markers {
        if g.neighbors(c).any(|w| markers.contains(&w)) {
            return Err(GadgetError::Malformed(format!(
                "marker {c} is adjacent to another marker"
            )));
        }
    }

    // classified: on a triangle, a marker, or adjacent to a marker (d-node),
    // or on a closed cycle hanging off a d-node
    let mut classified: BTreeSet<u32> = tri.clone();
    classified.extend(markers.iter().copied());
    for &c in &markers {
        classified.extend(g.neighbors(c));
    }

    let mut c_nodes = Vec::new();
    let mut next_expected = 0u32;
    let mut pairs = Vec::new();
    let mut cycle_nodes = BTreeSet::new();

    // numbering needs cycles classified, so settle pairs among all markers
    // first and number afterwards
    let marker_list: Vec<u32> = markers.iter().copied().collect();
    for (i, &p) in marker_list.iter().enumerate() {
        for &q in &marker_list[i + 1..] {
            let status = pair_status(&g, &tri, &markers, p, q)?;
            if let PairStatus::Decided { cycle, .. } = &status {
                cycle_nodes.extend(cycle.iter().copied());
            }
            pairs.push((p, q, status));
        }
    }
    classified.extend(cycle_nodes);

    for &c in &marker_list {
        // every index below c must be classified
        if (next_expected..c).any(|q| !classified.contains(&q)) {
            break;
        }
        next_expected = c + 1;
        c_nodes.push(c);
    }

    let number: BTreeMap<u32, u32> = c_nodes
        .iter()
        .enumerate()
        .map(|(m, &c)| (c, m as u32))
        .collect();
    let mut out = Decoded {
        c_nodes,
        ..Decoded::default()
    };
    let mut gadgets = BTreeMap::new();
    for (p, q, status) in pairs {
        let (Some(&m), Some(&n)) = (number.get(&p), number.get(&q)) else {
            continue;
        };
        let key = (m.min(n), m.max(n));
        match status {
            PairStatus::Decided { edge, d, cycle } => {
                if edge {
                    out.edges.insert(key);
                } else {
                    out.non_edges.insert(key);
                }
                gadgets.insert(key, (d, cycle));
            }
            PairStatus::Pending => out.pending.push(key),
        }
    }
    out.pending.sort();
    Ok(Analysis {
        decoded: out,
        adj: g,
        tri,
        gadgets,
    })
}

/// Node map from the coded graph enumerated by `stream` into
/// `H(decode_f(stream).graph())`, on every node of a numbered marker block
/// or a decided pair gadget. Triangle and cycle orientation is fixed by
/// taking the smaller index first, so `encode_h(G)` maps identically.
pub fn natural_iso(stream: &[(u32, u32)]) -> Result<BTreeMap<u32, u32>, GadgetError> {
    let an = analyze(stream)?;
    let target = GadgetLayout::new(&an.decoded.graph());
    let mut out = BTreeMap::new();
    for (m, &c) in an.decoded.c_nodes.iter().enumerate() {
        let m = m as u32;
        out.insert(c, target.c(m));
        let Some(t1) = an.adj.neighbors(c).find(|w| an.tri.contains(w)) else {
            continue;
        };
        out.insert(t1, target.t(m, 1));
        let rest: Vec<u32> = an
            .adj
            .neighbors(t1)
            .filter(|w| an.tri.contains(w) && *w != c)
            .collect();
        if let [t2, t3] = rest[..] {
            out.insert(t2, target.t(m, 2));
            out.insert(t3, target.t(m, 3));
        }
    }
    for (&(m, n), (d, cycle)) in &an.gadgets {
        out.insert(*d, target.d(m, n));
        for (i, &w) in cycle.iter().enumerate() {
            out.insert(w, target.w(m, n, i as u32 + 1));
        }
    }
    Ok(out)
}

enum PairStatus {
    Pending,
    Decided { edge: bool, d: u32, cycle: Vec<u32> },
}

fn pair_status(
    g: &Adjacency,
    tri: &BTreeSet<u32>,
    markers: &BTreeSet<u32>,
    p: u32,
    q: u32,
) -> Result<PairStatus, GadgetError> {
    let shared: Vec<u32> = g
        .neighbors(p)
        .filter(|&d| !tri.contains(&d) && g.has(q, d))
        .collect();
    let d = match shared.as_slice() {
        [] => return Ok(PairStatus::Pending),
        [d] => *d,
        _ => {
            return Err(GadgetError::Malformed(format!(
                "markers {p} and {q} share several connector nodes"
            )))
        }
    };
    let outer: Vec<u32> = g.neighbors(d).filter(|w| !markers.contains(w)).collect();
    if g.neighbors(d).filter(|w| markers.contains(w)).count() > 2 {
        return Err(GadgetError::Malformed(format!(
            "connector {d} is adjacent to more than two markers"
        )));
    }
    let w1 = match outer.as_slice() {
        [] => return Ok(PairStatus::Pending),
        [w] => *w,
        _ => {
            return Err(GadgetError::Malformed(format!(
                "connector {d} has several bridge edges"
            )))
        }
    };
    // walk the cycle through w1 avoiding d
    let mut cycle = vec![w1];
    let mut prev = d;
    let mut cur = w1;
    loop {
        let next: Vec<u32> = g.neighbors(cur).filter(|&x| x != prev && x != d).collect();
        if next.len() > 2 || (cur != w1 && next.len() > 1) {
            return Err(GadgetError::Malformed(format!(
                "cycle node {cur} has too many neighbors"
            )));
        }
        let Some(&nx) = next.first() else {
            return Ok(PairStatus::Pending);
        };
        if nx == w1 {
            break;
        }
        if cycle.contains(&nx) {
            return Err(GadgetError::Malformed(format!(
                "cycle through {w1} does not close at the bridge node"
            )));
        }
        cycle.push(nx);
        prev = cur;
        cur = nx;
        if cycle.len() > 7 {
            return Err(GadgetError::Malformed(format!(
                "cycle through {w1} is longer than 7"
            )));
        }
    }
    match cycle.len() {
        5 => Ok(PairStatus::Decided { edge: true, d, cycle }),
        7 => Ok(PairStatus::Decided { edge: false, d, cycle }),
        k => Err(GadgetError::Malformed(format!(
            "cycle of length {k} attached at connector {d}"
        ))),
    }
}

/// The block-wise isomorphism `H(G) -> H(G~)` induced by an isomorphism
/// `g: G -> G~`.
pub fn transfer_h(g: &[u32], left: &Graph, right: &Graph) -> Result<Vec<u32>, GadgetError> {
    left.check_isomorphism(g, right)?;
    let ll = GadgetLayout::new(left);
    let rl = GadgetLayout::new(right);
    let mut out = vec![u32::MAX; ll.node_count() as usize];
    for x in 0..left.node_count() {
        let gx = g[x as usize];
        out[ll.c(x) as usize] = rl.c(gx);
        for k in 1..=3 {
            out[ll.t(x, k) as usize] = rl.t(gx, k);
        }
    }
    for (x, y) in ll.pairs() {
        let (gx, gy) = (g[x as usize], g[y as usize]);
        out[ll.d(x, y) as usize] = rl.d(gx, gy);
        for i in 1..=ll.cycle_len(x, y) {
            out[ll.w(x, y, i) as usize] = rl.w(gx, gy, i);
        }
    }
    Ok(out)
}

/// The node map between decoded graphs induced by an isomorphism `h` of
/// coded graphs (given on all coded nodes): marker number `m` goes to the
/// number of `h(c_m)`. `h` is checked against both enumerations.
pub fn transfer_f(
    h: &[u32],
    left_stream: &[(u32, u32)],
    right_stream: &[(u32, u32)],
) -> Result<Vec<u32>, GadgetError> {
    let right_edges: BTreeSet<(u32, u32)> = right_stream
        .iter()
        .map(|&(x, y)| (x.min(y), x.max(y)))
        .collect();
    if left_stream.len() != right_stream.len() {
        return Err(GadgetError::NotIsomorphism(format!(
            "streams have {} and {} edges",
            left_stream.len(),
            right_stream.len()
        )));
    }
    check_bijection(h, h.len() as u32)?;
    for &(x, y) in left_stream {
        let (Some(&a), Some(&b)) = (h.get(x as usize), h.get(y as usize)) else {
            return Err(GadgetError::NotIsomorphism(format!(
                "node map is undefined on edge ({x},{y})"
            )));
        };
        if !right_edges.contains(&(a.min(b), a.max(b))) {
            return Err(GadgetError::NotIsomorphism(format!(
                "edge ({x},{y}) maps to the non-edge ({a},{b})"
            )));
        }
    }
    let left = decode_f(left_stream)?;
    let right = decode_f(right_stream)?;
    let rank: BTreeMap<u32, u32> = right
        .c_nodes
        .iter()
        .enumerate()
        .map(|(m, &c)| (c, m as u32))
        .collect();
    left.c_nodes
        .iter()
        .map(|&c| {
            rank.get(&h[c as usize]).copied().ok_or_else(|| {
                GadgetError::NotIsomorphism(format!("marker {c} maps to a non-marker"))
            })
        })
        .collect()
}
