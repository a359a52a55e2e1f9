//! Physical coupling graphs and logical-to-physical mappings.

use serde::Deserialize;
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CouplingError {
    #[error("edge ({0}, {1}) is out of range or a self-loop")]
    BadEdge(usize, usize),
    #[error("coupling graph is not connected")]
    Disconnected,
    #[error("bad coupling specification `{0}`")]
    BadSpec(String),
    #[error("cannot read coupling file: {0}")]
    Io(String),
}

#[derive(Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Undirected connected graph over physical qubits `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
    dist: Vec<Vec<u32>>,
}

impl CouplingGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, CouplingError> {
        let mut set = BTreeSet::new();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(CouplingError::BadEdge(a, b));
            }
            if set.insert((a.min(b), a.max(b))) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        let mut g = CouplingGraph { n, adj, edges: set, dist: Vec::new() };
        g.dist = (0..n).map(|s| g.bfs(s)).collect();
        if g.dist.iter().flatten().any(|&d| d == u32::MAX) {
            return Err(CouplingError::Disconnected);
        }
        Ok(g)
    }

    pub fn line(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &e).expect("line graph")
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut e = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    e.push((v, v + 1));
                }
                if r + 1 < rows {
                    e.push((v, v + cols));
                }
            }
        }
        Self::from_edges(rows * cols, &e).expect("grid graph")
    }

    pub fn complete(n: usize) -> Self {
        let mut e = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                e.push((a, b));
            }
        }
        Self::from_edges(n, &e).expect("complete graph")
    }

    /// Parses `{"n": .., "edges": [[a, b], ..]}`.
    pub fn from_json(text: &str) -> Result<Self, CouplingError> {
        let f: GraphFile = serde_json::from_str(text).map_err(|e| CouplingError::BadSpec(e.to_string()))?;
        let e: Vec<_> = f.edges.iter().map(|[a, b]| (*a, *b)).collect();
        Self::from_edges(f.n, &e)
    }

    /// `line:N`, `grid:RxC`, `complete:N`, or a path to a JSON file.
    pub fn from_spec(spec: &str) -> Result<Self, CouplingError> {
        let bad = || CouplingError::BadSpec(spec.to_string());
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        if let Some(n) = spec.strip_prefix("line:") {
            Ok(Self::line(num(n)?))
        } else if let Some(n) = spec.strip_prefix("complete:") {
            Ok(Self::complete(num(n)?))
        } else if let Some(rc) = spec.strip_prefix("grid:") {
            let (r, c) = rc.split_once('x').ok_or_else(bad)?;
            Ok(Self::grid(num(r)?, num(c)?))
        } else {
            let text = std::fs::read_to_string(spec).map_err(|e| CouplingError::Io(e.to_string()))?;
            Self::from_json(&text)
        }
    }

    fn bfs(&self, s: usize) -> Vec<u32> {
        let mut d = vec![u32::MAX; self.n];
        d[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &self.adj[u] {
                if d[v] == u32::MAX {
                    d[v] = d[u] + 1;
                    q.push_back(v);
                }
            }
        }
        d
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Hop distance.
    pub fn distance(&self, a: usize, b: usize) -> u32 {
        self.dist[a][b]
    }

    /// A shortest path `a → b` inclusive of both ends, preferring low-numbered nodes.
    pub fn shortest_path(&self, a: usize, b: usize) -> Vec<usize> {
        let mut path = vec![a];
        let mut cur = a;
        while cur != b {
            cur = *self.adj[cur].iter().find(|&&v| self.dist[v][b] + 1 == self.dist[cur][b]).expect("connected graph");
            path.push(cur);
        }
        path
    }

    /// All-pairs distances where entering a node costs 1 if it is `active`
    /// and 3 otherwise. Row-major `n × n`.
    pub fn weighted_table(&self, active: &[bool]) -> Vec<u32> {
        let n = self.n;
        let mut out = vec![u32::MAX; n * n];
        for s in 0..n {
            let d = &mut out[s * n..(s + 1) * n];
            d[s] = 0;
            let mut heap = BinaryHeap::from([Reverse((0u32, s))]);
            while let Some(Reverse((du, u))) = heap.pop() {
                if du > d[u] {
                    continue;
                }
                for &v in &self.adj[u] {
                    let nd = du + if active[v] { 1 } else { 3 };
                    if nd < d[v] {
                        d[v] = nd;
                        heap.push(Reverse((nd, v)));
                    }
                }
            }
        }
        out
    }

    /// Weighted distance from `a` to `b` given the set of active nodes.
    pub fn weighted_dist(&self, a: usize, b: usize, active: &[bool]) -> Result<u32, CouplingError> {
        let t = self.weighted_table(active);
        match t[a * self.n + b] {
            u32::MAX => Err(CouplingError::Disconnected),
            d => Ok(d),
        }
    }
}

/// Bijection between logical and physical qubits over `n` positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mapping {
    l2p: Vec<usize>,
    p2l: Vec<usize>,
}

impl Mapping {
    pub fn identity(n: usize) -> Self {
        Mapping { l2p: (0..n).collect(), p2l: (0..n).collect() }
    }

    /// Panics unless `l2p` is a permutation.
    pub fn from_l2p(l2p: Vec<usize>) -> Self {
        let mut p2l = vec![usize::MAX; l2p.len()];
        for (l, &p) in l2p.iter().enumerate() {
            assert!(p < l2p.len() && p2l[p] == usize::MAX, "not a permutation");
            p2l[p] = l;
        }
        Mapping { l2p, p2l }
    }

    pub fn len(&self) -> usize {
        self.l2p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l2p.is_empty()
    }

    pub fn phys(&self, l: usize) -> usize {
        self.l2p[l]
    }

    pub fn logical(&self, p: usize) -> usize {
        self.p2l[p]
    }

    pub fn l2p(&self) -> &[usize] {
        &self.l2p
    }

    /// Exchanges the logical qubits sitting on physical `a` and `b`.
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        let (la, lb) = (self.p2l[a], self.p2l[b]);
        self.p2l.swap(a, b);
        self.l2p[la] = b;
        self.l2p[lb] = a;
    }

    pub fn is_bijective(&self) -> bool {
        self.l2p.iter().enumerate().all(|(l, &p)| self.p2l[p] == l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_and_distances() {
        let g = CouplingGraph::grid(2, 3);
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.distance(0, 5), 3);
        assert_eq!(g.shortest_path(0, 5).len(), 4);
        assert_eq!(CouplingGraph::from_spec("complete:4").unwrap().edges().count(), 6);
        assert!(matches!(CouplingGraph::from_edges(3, &[(0, 1)]), Err(CouplingError::Disconnected)));
    }

    #[test]
    fn weighted_distance_charges_inactive_hops() {
        let g = CouplingGraph::line(3);
        assert_eq!(g.weighted_dist(0, 1, &[true, true, false]).unwrap(), 1);
        assert_eq!(g.weighted_dist(0, 2, &[true, false, true]).unwrap(), 4);
        assert_eq!(CouplingGraph::line(4).weighted_dist(0, 3, &[true; 4]).unwrap(), 3);
    }

    #[test]
    fn json_roundtrip() {
        let g = CouplingGraph::from_json(r#"{"n": 3, "edges": [[0,1],[1,2]]}"#).unwrap();
        assert_eq!(g, CouplingGraph::line(3));
    }

    #[test]
    fn swap_keeps_bijection() {
        let mut m = Mapping::identity(4);
        m.swap_physical(1, 3);
        assert!(m.is_bijective());
        assert_eq!(m.phys(1), 3);
        assert_eq!(m.logical(1), 3);
    }
}
