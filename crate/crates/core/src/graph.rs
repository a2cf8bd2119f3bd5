//! Finite symmetric irreflexive graphs.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(u32),
    #[error("edge ({0},{1}) mentions a node outside 0..{2}")]
    OutOfRange(u32, u32, u32),
    #[error("not a bijection on 0..{0}")]
    NotBijection(u32),
    #[error("not an isomorphism: ({0},{1}) is {2} but its image is not")]
    NotIsomorphism(u32, u32, &'static str),
}

/// Undirected simple graph on nodes `0..n`; edges stored as `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    n: u32,
    edges: BTreeSet<(u32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: u32,
    edges: Vec<[u32; 2]>,
}

impl Graph {
    pub fn empty(n: u32) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        for (x, y) in edges {
            g.add_edge(x, y)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, x: u32, y: u32) -> Result<(), GraphError> {
        if x == y {
            return Err(GraphError::SelfLoop(x));
        }
        if x >= self.n || y >= self.n {
            return Err(GraphError::OutOfRange(x, y, self.n));
        }
        self.edges.insert((x.min(y), x.max(y)));
        Ok(())
    }

    pub fn node_count(&self) -> u32 {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, x: u32, y: u32) -> bool {
        self.edges.contains(&(x.min(y), x.max(y)))
    }

    /// Image under the node map `g` (`g[x]` is the image of `x`).
    pub fn permuted(&self, g: &[u32]) -> Result<Graph, GraphError> {
        check_bijection(g, self.n)?;
        Graph::from_edges(self.n, self.edges().map(|(x, y)| (g[x as usize], g[y as usize])))
    }

    /// Checks that `g` is an isomorphism from `self` onto `other`.
    pub fn check_isomorphism(&self, g: &[u32], other: &Graph) -> Result<(), GraphError> {
        check_bijection(g, self.n)?;
        if other.n != self.n {
            return Err(GraphError::NotBijection(self.n));
        }
        for x in 0..self.n {
            for y in x + 1..self.n {
                let here = self.has_edge(x, y);
                if here != other.has_edge(g[x as usize], g[y as usize]) {
                    return Err(GraphError::NotIsomorphism(
                        x,
                        y,
                        if here { "an edge" } else { "a non-edge" },
                    ));
                }
            }
        }
        Ok(())
    }

    /// Brute-force isomorphism search; fine for the small graphs used here.
    pub fn find_isomorphism(&self, other: &Graph) -> Option<Vec<u32>> {
        if self.n != other.n || self.edge_count() != other.edge_count() {
            return None;
        }
        let mut perm: Vec<u32> = (0..self.n).collect();
        loop {
            if self.check_isomorphism(&perm, other).is_ok() {
                return Some(perm);
            }
            if !next_permutation(&mut perm) {
                return None;
            }
        }
    }

    /// Lexicographically least edge list over all relabelings.
    pub fn canonical_form(&self) -> Vec<(u32, u32)> {
        let mut perm: Vec<u32> = (0..self.n).collect();
        let mut best: Option<Vec<(u32, u32)>> = None;
        loop {
            let mut e: Vec<(u32, u32)> = self
                .edges()
                .map(|(x, y)| {
                    let (a, b) = (perm[x as usize], perm[y as usize]);
                    (a.min(b), a.max(b))
                })
                .collect();
            e.sort();
            if best.as_ref().is_none_or(|b| e < *b) {
                best = Some(e);
            }
            if !next_permutation(&mut perm) {
                return best.unwrap();
            }
        }
    }

    /// Every labeled graph on `n` nodes.
    pub fn all_labeled(n: u32) -> Vec<Graph> {
        let pairs: Vec<(u32, u32)> = (0..n)
            .flat_map(|y| (0..y).map(move |x| (x, y)))
            .collect();
        (0u64..1 << pairs.len())
            .map(|mask| {
                Graph::from_edges(
                    n,
                    pairs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &p)| p),
                )
                .unwrap()
            })
            .collect()
    }

    /// One representative per isomorphism class on exactly `n` nodes.
    pub fn isomorphism_classes(n: u32) -> Vec<Graph> {
        let mut seen = BTreeSet::new();
        Graph::all_labeled(n)
            .into_iter()
            .filter(|g| seen.insert(g.canonical_form()))
            .collect()
    }

    /// Erdos-Renyi graph with edge probability 1/2.
    pub fn random(n: u32, rng: &mut impl Rng) -> Graph {
        let mut g = Graph::empty(n);
        for y in 0..n {
            for x in 0..y {
                if rng.gen_bool(0.5) {
                    g.edges.insert((x, y));
                }
            }
        }
        g
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphFile {
            n: self.n,
            edges: self.edges().map(|(x, y)| [x, y]).collect(),
        })
        .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Graph, String> {
        let f: GraphFile = serde_json::from_str(s).map_err(|e| e.to_string())?;
        Graph::from_edges(f.n, f.edges.into_iter().map(|[x, y]| (x, y))).map_err(|e| e.to_string())
    }
}

pub fn check_bijection(g: &[u32], n: u32) -> Result<(), GraphError> {
    if g.len() != n as usize {
        return Err(GraphError::NotBijection(n));
    }
    let mut seen = vec![false; n as usize];
    for &y in g {
        if y >= n || std::mem::replace(&mut seen[y as usize], true) {
            return Err(GraphError::NotBijection(n));
        }
    }
    Ok(())
}

pub fn invert(g: &[u32]) -> Vec<u32> {
    let mut inv = vec![0; g.len()];
    for (x, &y) in g.iter().enumerate() {
        inv[y as usize] = x as u32;
    }
    inv
}

/// `(g . h)(x) = g[h[x]]`.
pub fn compose(g: &[u32], h: &[u32]) -> Vec<u32> {
    h.iter().map(|&x| g[x as usize]).collect()
}

pub fn next_permutation(p: &mut [u32]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts() {
        let counts: Vec<usize> = (0..=5).map(|n| Graph::isomorphism_classes(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 11, 34]);
    }

    #[test]
    fn json_round_trip() {
        let g = Graph::from_edges(3, [(0, 1), (2, 1)]).unwrap();
        let s = g.to_json();
        assert_eq!(s, r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        assert_eq!(Graph::from_json(&s).unwrap(), g);
        assert!(Graph::from_json(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
    }

    #[test]
    fn isomorphism_search() {
        let p = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let q = Graph::from_edges(3, [(0, 2), (2, 1)]).unwrap();
        let g = p.find_isomorphism(&q).unwrap();
        assert!(p.check_isomorphism(&g, &q).is_ok());
        assert!(p.check_isomorphism(&[0, 1, 2], &q).is_err());
    }
}
