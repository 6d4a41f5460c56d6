//! Undirected multigraphs stored as symmetric adjacency matrices.
//!
//! Vertex labels in every public vertex-level API are 1-based. Adjacency
//! entries are edge multiplicities. Input graphs never carry loops, but the
//! positive/negative inverse of a graph can (a nonzero diagonal entry of
//! `A⁻¹`), so [`Graph::from_adjacency`] accepts them.

mod canon;
pub mod io;

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::exact::IntMatrix;

pub use canon::{canonical_form, canonical_key, enumerate_connected_simple, CanonicalKey, MAX_CANONICAL_N};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("loop at vertex {0} rejected")]
    LoopRejected(usize),
    #[error("vertex {vertex} out of range 1..={n}")]
    IndexOutOfRange { vertex: usize, n: usize },
    #[error("edge {0}-{1} has zero multiplicity")]
    ZeroMultiplicity(usize, usize),
    #[error("adjacency matrix is not square and symmetric")]
    NotSymmetric,
    #[error("adjacency entry ({0}, {1}) is negative or too large")]
    BadEntry(usize, usize),
    #[error("canonical labeling supports at most {max} vertices, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph JSON: {0}")]
    Json(String),
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph { n, adj: vec![0; n * n] }
    }

    /// Builds a graph from 1-based `(u, v, multiplicity)` triples. Repeated
    /// pairs accumulate.
    pub fn from_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v, mult) in edges {
            g.add_edge(u, v, mult)?;
        }
        Ok(g)
    }

    /// Simple graph from 1-based vertex pairs.
    pub fn from_simple_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let triples: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1)).collect();
        Self::from_edges(n, &triples)
    }

    /// Graph of a symmetric nonnegative integer matrix. Diagonal entries become loops.
    pub fn from_adjacency(m: &IntMatrix) -> Result<Self> {
        if !m.is_symmetric() {
            return Err(GraphError::NotSymmetric);
        }
        let n = m.rows();
        let mut adj = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let v: &BigInt = &m[(i, j)];
                if v.is_negative() {
                    return Err(GraphError::BadEntry(i + 1, j + 1));
                }
                adj[i * n + j] = v.to_u64().ok_or(GraphError::BadEntry(i + 1, j + 1))?;
            }
        }
        Ok(Graph { n, adj })
    }

    pub fn add_edge(&mut self, u: usize, v: usize, mult: u64) -> Result<()> {
        let n = self.n;
        for w in [u, v] {
            if w == 0 || w > n {
                return Err(GraphError::IndexOutOfRange { vertex: w, n });
            }
        }
        if u == v {
            return Err(GraphError::LoopRejected(u));
        }
        if mult == 0 {
            return Err(GraphError::ZeroMultiplicity(u, v));
        }
        let (i, j) = (u - 1, v - 1);
        self.adj[i * n + j] += mult;
        self.adj[j * n + i] += mult;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Adjacency entry at 0-based `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.adj[i * self.n + j]
    }

    pub fn adjacency(&self) -> IntMatrix {
        IntMatrix::from_fn(self.n, self.n, |i, j| BigInt::from(self.entry(i, j)))
    }

    /// Row-major `f64` adjacency.
    pub fn adjacency_f64(&self) -> Vec<f64> {
        self.adj.iter().map(|&x| x as f64).collect()
    }

    pub fn has_loops(&self) -> bool {
        (0..self.n).any(|i| self.entry(i, i) != 0)
    }

    pub fn is_simple(&self) -> bool {
        !self.has_loops() && self.adj.iter().all(|&x| x <= 1)
    }

    /// Edges as 1-based `(u, v, multiplicity)` with `u <= v`, loops included.
    pub fn edges(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                let m = self.entry(i, j);
                if m > 0 {
                    out.push((i + 1, j + 1, m));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> u64 {
        self.edges().iter().map(|e| e.2).sum()
    }

    /// 0-based neighbours of 0-based vertex `i` (loops excluded).
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| j != i && self.entry(i, j) > 0)
    }

    /// Degrees indexed by 0-based vertex; multiplicities count, a loop adds 2.
    pub fn degrees(&self) -> Vec<u64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j)).sum::<u64>() + self.entry(i, i))
            .collect()
    }

    pub fn max_degree(&self) -> u64 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn degree_histogram(&self) -> BTreeMap<u64, usize> {
        let mut hist = BTreeMap::new();
        for d in self.degrees() {
            *hist.entry(d).or_insert(0) += 1;
        }
        hist
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Shortest-path distances from a 0-based source.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// BFS two-colouring: `Some(colour per 0-based vertex)` iff bipartite.
    pub fn two_coloring(&self) -> Option<Vec<u8>> {
        if self.has_loops() {
            return None;
        }
        let mut colour: Vec<Option<u8>> = vec![None; self.n];
        for start in 0..self.n {
            if colour[start].is_some() {
                continue;
            }
            colour[start] = Some(0);
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let cu = colour[u].unwrap_or(0);
                for v in self.neighbors(u) {
                    match colour[v] {
                        None => {
                            colour[v] = Some(1 - cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(colour.into_iter().map(|c| c.unwrap_or(0)).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.two_coloring().is_some()
    }

    /// Number of perfect matchings; `k` parallel edges between `u` and `v`
    /// give `k` distinct matchings through `{u, v}`.
    pub fn count_one_factors(&self) -> u128 {
        if self.n % 2 == 1 {
            return 0;
        }
        let words = self.n.div_ceil(64).max(1);
        let mut memo: HashMap<Vec<u64>, u128> = HashMap::new();
        let free = vec![0u64; words];
        self.count_matchings(free, &mut memo)
    }

    fn count_matchings(&self, used: Vec<u64>, memo: &mut HashMap<Vec<u64>, u128>) -> u128 {
        let is_used = |bits: &[u64], i: usize| bits[i / 64] >> (i % 64) & 1 == 1;
        let Some(u) = (0..self.n).find(|&i| !is_used(&used, i)) else {
            return 1;
        };
        if let Some(&c) = memo.get(&used) {
            return c;
        }
        let mut total = 0u128;
        for v in self.neighbors(u) {
            if is_used(&used, v) {
                continue;
            }
            let mut next = used.clone();
            next[u / 64] |= 1 << (u % 64);
            next[v / 64] |= 1 << (v % 64);
            total += u128::from(self.entry(u, v)) * self.count_matchings(next, memo);
        }
        memo.insert(used, total);
        total
    }

    /// All perfect matchings as sorted lists of 1-based vertex pairs
    /// (parallel edges are not distinguished).
    pub fn perfect_matchings(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        let mut used = vec![false; self.n];
        let mut current = Vec::new();
        self.collect_matchings(&mut used, &mut current, &mut out);
        out
    }

    fn collect_matchings(
        &self,
        used: &mut [bool],
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let Some(u) = (0..self.n).find(|&i| !used[i]) else {
            out.push(current.clone());
            return;
        };
        used[u] = true;
        for v in self.neighbors(u).collect::<Vec<_>>() {
            if used[v] {
                continue;
            }
            used[v] = true;
            current.push((u + 1, v + 1));
            self.collect_matchings(used, current, out);
            current.pop();
            used[v] = false;
        }
        used[u] = false;
    }

    /// Cut edges as 1-based pairs `(u, v)` with `u < v`. Parallel edges never are.
    pub fn bridges(&self) -> Vec<(usize, usize)> {
        let components = self.component_count();
        let mut out = Vec::new();
        for (u, v, m) in self.edges() {
            if u == v || m != 1 {
                continue;
            }
            let mut g = self.clone();
            let (i, j) = (u - 1, v - 1);
            g.adj[i * self.n + j] = 0;
            g.adj[j * self.n + i] = 0;
            if g.component_count() > components {
                out.push((u, v));
            }
        }
        out
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            count += 1;
            for (v, d) in self.bfs_distances(s).into_iter().enumerate() {
                if d.is_some() {
                    seen[v] = true;
                }
            }
        }
        count
    }

    /// Relabels vertices: old 0-based vertex `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n, "permutation length");
        let mut g = Graph::empty(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                g.adj[perm[i] * self.n + perm[j]] = self.entry(i, j);
            }
        }
        g
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let n = self.n + other.n;
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in 0..n {
                g.adj[i * n + j] = match (i < self.n, j < self.n) {
                    (true, true) => self.entry(i, j),
                    (false, false) => other.entry(i - self.n, j - self.n),
                    _ => 0,
                };
            }
        }
        g
    }

    /// Does some cut edge lie in a perfect matching? Only meaningful for graphs
    /// with a unique 1-factor, where every such graph must have one.
    pub fn has_bridge_in_one_factor(&self) -> bool {
        let bridges = self.bridges();
        self.perfect_matchings()
            .iter()
            .any(|m| m.iter().any(|&(u, v)| bridges.contains(&(u.min(v), u.max(v)))))
    }
}
