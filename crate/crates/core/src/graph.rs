//! Unweighted simple connected graphs, BFS machinery, balls and the local
//! density filter.

use crate::error::{Error, Result};
use fixedbitset::FixedBitSet;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::sync::OnceLock;

pub const UNREACHABLE: u32 = u32::MAX;

/// Membership bitset over `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    bits: FixedBitSet,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet { bits: FixedBitSet::with_capacity(n) }
    }

    pub fn from_iter(n: usize, items: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(n);
        for v in items {
            s.insert(v);
        }
        s
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::new(n);
        s.bits.insert_range(..);
        s
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, v: usize) {
        self.bits.insert(v);
    }

    pub fn remove(&mut self, v: usize) {
        self.bits.set(v, false);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.bits.contains(v)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Simple, undirected, connected graph with contiguous ids `0..n`.
///
/// All-pairs hop distances are computed by `n` BFS runs on first use and
/// cached behind a one-time barrier, so a `Graph` can be shared freely.
pub struct Graph {
    adj: Vec<Vec<usize>>,
    labels: Vec<String>,
    dist: OnceLock<Vec<u32>>,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph { adj: self.adj.clone(), labels: self.labels.clone(), dist: OnceLock::new() }
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph").field("n", &self.n()).field("edges", &self.edges()).finish()
    }
}

impl Graph {
    /// Builds a graph on `0..n`, rejecting loops, duplicate edges and
    /// disconnected input.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    pub fn with_labels(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Graph> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Model("empty graph".into()));
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Model(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::Model(format!("self-loop at {}", labels[u])));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Model(format!("duplicate edge {} {}", labels[u], labels[v])));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Graph { adj, labels, dist: OnceLock::new() };
        if !g.is_connected() {
            return Err(Error::Model("graph is disconnected".into()));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        self.bfs(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// Hop distances from `src`.
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        bfs_within(&self.adj, src, None)
    }

    fn table(&self) -> &[u32] {
        self.dist.get_or_init(|| {
            let n = self.n();
            let mut t = Vec::with_capacity(n * n);
            for v in 0..n {
                t.extend(self.bfs(v));
            }
            t
        })
    }

    pub fn dist(&self, u: usize, v: usize) -> u32 {
        self.table()[u * self.n() + v]
    }

    pub fn dist_row(&self, v: usize) -> &[u32] {
        let n = self.n();
        &self.table()[v * n..(v + 1) * n]
    }

    pub fn eccentricity(&self, v: usize) -> u32 {
        self.dist_row(v).iter().copied().max().unwrap_or(0)
    }

    pub fn diameter(&self) -> u32 {
        (0..self.n()).map(|v| self.eccentricity(v)).max().unwrap_or(0)
    }

    /// BFS layers from `v`: layer `i` is exactly `{x : d(v, x) = i}`.
    pub fn bfs_layers(&self, v: usize) -> Vec<VertexSet> {
        let row = self.dist_row(v);
        let ecc = row.iter().copied().max().unwrap_or(0) as usize;
        let mut layers = vec![VertexSet::new(self.n()); ecc + 1];
        for (x, &d) in row.iter().enumerate() {
            layers[d as usize].insert(x);
        }
        layers
    }

    /// Closed ball `{y : d(v, y) <= r}`.
    pub fn ball(&self, v: usize, r: u32) -> VertexSet {
        let row = self.dist_row(v);
        VertexSet::from_iter(self.n(), (0..self.n()).filter(|&y| row[y] <= r))
    }

    /// Distance from every vertex to the nearest member of `set`.
    pub fn dist_to_set(&self, set: &VertexSet) -> Vec<u32> {
        let n = self.n();
        let mut d = vec![UNREACHABLE; n];
        let mut q = VecDeque::new();
        for s in set.iter() {
            d[s] = 0;
            q.push_back(s);
        }
        while let Some(x) = q.pop_front() {
            for &y in &self.adj[x] {
                if d[y] == UNREACHABLE {
                    d[y] = d[x] + 1;
                    q.push_back(y);
                }
            }
        }
        d
    }

    /// `ball(F, r)`: every vertex within `r` of some member of `set`.
    pub fn ball_of_set(&self, set: &VertexSet, r: u32) -> VertexSet {
        let d = self.dist_to_set(set);
        VertexSet::from_iter(self.n(), (0..self.n()).filter(|&y| d[y] <= r))
    }

    /// Connected components of the subgraph induced by `set`, each sorted,
    /// ordered by smallest member.
    pub fn components_within(&self, set: &VertexSet) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in set.iter() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &y in &self.adj[x] {
                    if set.contains(y) && !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Induced subgraph on `vertices` (which must induce a connected graph),
    /// returned with the map from new ids to old ids.
    pub fn induced(&self, vertices: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let mut old = vertices.to_vec();
        old.sort_unstable();
        old.dedup();
        let mut pos = BTreeMap::new();
        for (i, &v) in old.iter().enumerate() {
            pos.insert(v, i);
        }
        let mut edges = Vec::new();
        for (i, &v) in old.iter().enumerate() {
            for &w in &self.adj[v] {
                if let Some(&j) = pos.get(&w) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
        }
        let labels = old.iter().map(|&v| self.labels[v].clone()).collect();
        Ok((Graph::with_labels(labels, &edges)?, old))
    }

    /// Plain DOT: node and edge statements only.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for v in 0..self.n() {
            let _ = writeln!(s, "  \"{}\";", self.labels[v]);
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "  \"{}\" -- \"{}\";", self.labels[u], self.labels[v]);
        }
        s.push_str("}\n");
        s
    }

    /// Edge-list text using original labels.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        if self.n() == 1 {
            let _ = writeln!(s, "# isolated {}", self.labels[0]);
        }
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{} {}", self.labels[u], self.labels[v]);
        }
        s
    }
}

pub(crate) fn bfs_within(adj: &[Vec<usize>], src: usize, allowed: Option<&VertexSet>) -> Vec<u32> {
    let mut d = vec![UNREACHABLE; adj.len()];
    d[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if d[y] == UNREACHABLE && allowed.is_none_or(|a| a.contains(y)) {
                d[y] = d[x] + 1;
                q.push_back(y);
            }
        }
    }
    d
}

/// Parses `u v` lines with non-negative integer ids; `#` starts a comment.
/// A line holding a single id declares an isolated vertex, which is only
/// legal when it is the whole graph. Ids are renumbered to `0..n` in
/// increasing order of the original id.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut ids = BTreeSet::new();
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let parse_id = |t: &str| t.parse::<u64>().map_err(|_| Error::parse(i + 1, format!("bad vertex id {t:?}")));
        match toks.as_slice() {
            [a] => {
                ids.insert(parse_id(a)?);
            }
            [a, b] => {
                let (a, b) = (parse_id(a)?, parse_id(b)?);
                ids.insert(a);
                ids.insert(b);
                raw.push((a, b));
            }
            _ => return Err(Error::parse(i + 1, format!("expected \"u v\", got {line:?}"))),
        }
    }
    if ids.is_empty() {
        return Err(Error::parse(0, "no vertices"));
    }
    let index: BTreeMap<u64, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let labels = ids.iter().map(|v| v.to_string()).collect();
    let edges: Vec<(usize, usize)> = raw.iter().map(|(a, b)| (index[a], index[b])).collect();
    Graph::with_labels(labels, &edges)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Density {
    Pass,
    Reject { v: usize, r: u32, ball: usize },
}

/// Local density test: rejects iff some `v` and `r >= 1` have
/// `|ball(v, r)| > 4 r c h`. A rejection certifies that no non-contracting
/// `c`-embedding into a weighted subdivision of any quasi-subgraph of a
/// pattern with `h` edges exists. Radii are scanned up to the diameter.
pub fn local_density_filter(g: &Graph, h: usize, c: u32) -> Density {
    let diam = g.diameter() as usize;
    let mut best: Option<(u32, usize, usize)> = None;
    let mut counts = vec![0usize; diam + 1];
    for v in 0..g.n() {
        counts.iter_mut().for_each(|x| *x = 0);
        for &d in g.dist_row(v) {
            counts[d as usize] += 1;
        }
        let mut size = counts[0];
        for r in 1..=diam {
            size += counts[r];
            if size as u64 > 4 * r as u64 * c as u64 * h as u64 {
                if best.is_none_or(|(br, _, _)| (r as u32) < br) {
                    best = Some((r as u32, v, size));
                }
                break;
            }
        }
    }
    match best {
        Some((r, v, ball)) => Density::Reject { v, r, ball },
        None => Density::Pass,
    }
}
