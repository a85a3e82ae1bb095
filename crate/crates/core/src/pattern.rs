//! Pattern multigraphs and quasi-subgraph enumeration.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Labeled multigraph. Parallel edges and loops are allowed; edge ids are
/// positions in `edges`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

impl PatternGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Self {
        PatternGraph { vertices, edges }
    }

    /// Numbered vertices `0..n` with the given edges.
    pub fn numbered(n: usize, edges: &[(usize, usize)]) -> Self {
        PatternGraph { vertices: (0..n).map(|i| i.to_string()).collect(), edges: edges.to_vec() }
    }

    pub fn complete(k: usize) -> Self {
        let mut e = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                e.push((i, j));
            }
        }
        Self::numbered(k, &e)
    }

    pub fn line() -> Self {
        Self::complete(2)
    }

    pub fn cycle() -> Self {
        Self::complete(3)
    }

    pub fn star(leaves: usize) -> Self {
        let e: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::numbered(leaves + 1, &e)
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// `h`, the number of edges.
    pub fn h(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()
    }

    pub fn incident(&self, v: usize) -> Vec<usize> {
        (0..self.h()).filter(|&e| self.edges[e].0 == v || self.edges[e].1 == v).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n() == 0 {
            return false;
        }
        let mut comp: Vec<usize> = (0..self.n()).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
            comp[ra] = rb;
        }
        let root = find(&mut comp, 0);
        (0..self.n()).all(|v| find(&mut comp, v) == root)
    }

    /// Unweighted hop diameter.
    pub fn diameter(&self) -> usize {
        let n = self.n();
        let mut best = 0;
        for s in 0..n {
            let mut d = vec![usize::MAX; n];
            d[s] = 0;
            let mut q = std::collections::VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for &(a, b) in &self.edges {
                    for (p, o) in [(a, b), (b, a)] {
                        if p == x && d[o] == usize::MAX {
                            d[o] = d[x] + 1;
                            q.push_back(o);
                        }
                    }
                }
            }
            best = best.max(d.into_iter().filter(|&x| x != usize::MAX).max().unwrap_or(0));
        }
        best
    }

    /// Sorted multiset of edges under the smallest relabeling; equal for
    /// isomorphic patterns. Exhaustive over permutations, so only for tiny
    /// patterns.
    pub fn canonical_form(&self) -> (usize, Vec<(usize, usize)>) {
        let n = self.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<(usize, usize)>> = None;
        let degs: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        loop {
            // only relabelings that sort vertices by degree descending
            if perm.windows(2).all(|w| degs[w[0]] >= degs[w[1]]) {
                let mut inv = vec![0; n];
                for (i, &v) in perm.iter().enumerate() {
                    inv[v] = i;
                }
                let mut e: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (inv[a].min(inv[b]), inv[a].max(inv[b]))).collect();
                e.sort_unstable();
                if best.as_ref().is_none_or(|b| e < *b) {
                    best = Some(e);
                }
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        (n, best.unwrap_or_default())
    }

    pub fn is_isomorphic(&self, other: &PatternGraph) -> bool {
        self.n() == other.n() && self.h() == other.h() && self.canonical_form() == other.canonical_form()
    }

    /// True when the pattern, with degree-2 vertices suppressed, is a path
    /// (or a single vertex).
    pub fn is_path_like(&self) -> bool {
        self.is_connected() && (0..self.n()).all(|v| self.degree(v) <= 2) && self.edges.len() + 1 == self.n()
    }

    /// True when the pattern is a single cycle (loops and 2-cycles count).
    pub fn is_cycle_like(&self) -> bool {
        self.is_connected() && (0..self.n()).all(|v| self.degree(v) == 2) && self.edges.len() == self.n()
    }

    pub fn to_edge_list(&self) -> String {
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &(a, b) in &self.edges {
            *counts.entry((a, b)).or_default() += 1;
        }
        let mut s = String::new();
        if self.edges.is_empty() {
            for v in &self.vertices {
                s.push_str(v);
                s.push('\n');
            }
        }
        for ((a, b), k) in counts {
            if k == 1 {
                s.push_str(&format!("{} {}\n", self.vertices[a], self.vertices[b]));
            } else {
                s.push_str(&format!("{} {} {}\n", self.vertices[a], self.vertices[b], k));
            }
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph H {\n");
        for v in &self.vertices {
            s.push_str(&format!("  \"{v}\";\n"));
        }
        for &(a, b) in &self.edges {
            s.push_str(&format!("  \"{}\" -- \"{}\";\n", self.vertices[a], self.vertices[b]));
        }
        s.push_str("}\n");
        s
    }
}

pub fn next_permutation(p: &mut [usize]) -> bool {
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

/// Parses a pattern: `u v` or `u v multiplicity` per line, `#` comments,
/// a lone label declares a vertex. Labels are arbitrary tokens. Loops are
/// accepted; the pattern must be connected.
pub fn parse_pattern(text: &str) -> Result<PatternGraph> {
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut order = Vec::new();
    let mut edges = Vec::new();
    let mut id = |t: &str, order: &mut Vec<String>| -> usize {
        let next = index.len();
        *index.entry(t.to_string()).or_insert_with(|| {
            order.push(t.to_string());
            next
        })
    };
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [a] => {
                id(a, &mut order);
            }
            [a, b] => {
                let (x, y) = (id(a, &mut order), id(b, &mut order));
                edges.push((x, y));
            }
            [a, b, k] => {
                let k: usize = k.parse().map_err(|_| Error::parse(i + 1, format!("bad multiplicity {k:?}")))?;
                if k == 0 {
                    return Err(Error::parse(i + 1, "multiplicity must be positive"));
                }
                let (x, y) = (id(a, &mut order), id(b, &mut order));
                edges.extend(std::iter::repeat_n((x, y), k));
            }
            _ => return Err(Error::parse(i + 1, format!("expected \"u v [k]\", got {line:?}"))),
        }
    }
    let p = PatternGraph::new(order, edges);
    if p.n() == 0 {
        return Err(Error::parse(0, "empty pattern"));
    }
    if !p.is_connected() {
        return Err(Error::Model("pattern is disconnected".into()));
    }
    Ok(p)
}

/// One rule application of the quasi-subgraph definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    DeleteVertex(String),
    DeleteEdge(usize),
    /// Split edge `uv` into pendant edges `uu'` and `vv'`.
    SplitEdge(usize),
    /// After a split, drop one pendant half (the half at the named endpoint).
    DropHalf(usize, String),
}

#[derive(Debug, Clone)]
pub struct QuasiSubgraph {
    pub graph: PatternGraph,
    pub rules: Vec<Rule>,
}

/// All connected quasi-subgraphs of `h` up to isomorphism: every edge is
/// kept, deleted, or split once into two pendant halves of which either may
/// be deleted. Vertices left without edges are deleted, and `K1` is always
/// included. Ordered by edge count, largest first.
pub fn enumerate_quasi_subgraphs(h: &PatternGraph) -> Vec<QuasiSubgraph> {
    enumerate_quasi_subgraphs_counted(h).0
}

/// As [`enumerate_quasi_subgraphs`], also returning the number of rule
/// combinations inspected before deduplication.
pub fn enumerate_quasi_subgraphs_counted(h: &PatternGraph) -> (Vec<QuasiSubgraph>, usize) {
    let m = h.h();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut raw = 0usize;
    // per edge: 0 delete, 1 keep, 2 split keep both, 3 split keep a-half, 4 split keep b-half
    let mut choice = vec![0u8; m];
    loop {
        raw += 1;
        let mut labels: Vec<String> = h.vertices.clone();
        let mut edges = Vec::new();
        let mut rules = Vec::new();
        for e in 0..m {
            let (a, b) = h.edges[e];
            match choice[e] {
                0 => rules.push(Rule::DeleteEdge(e)),
                1 => edges.push((a, b)),
                c => {
                    rules.push(Rule::SplitEdge(e));
                    if c != 4 {
                        labels.push(format!("{}'{e}", h.vertices[a]));
                        edges.push((a, labels.len() - 1));
                    } else {
                        rules.push(Rule::DropHalf(e, h.vertices[a].clone()));
                    }
                    if c != 3 {
                        labels.push(format!("{}'{e}", h.vertices[b]));
                        edges.push((b, labels.len() - 1));
                    } else {
                        rules.push(Rule::DropHalf(e, h.vertices[b].clone()));
                    }
                }
            }
        }
        if !edges.is_empty() {
            let used: BTreeSet<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
            let remap: BTreeMap<usize, usize> = used.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            for v in 0..h.n() {
                if !used.contains(&v) {
                    rules.push(Rule::DeleteVertex(h.vertices[v].clone()));
                }
            }
            let g = PatternGraph::new(
                used.iter().map(|&v| labels[v].clone()).collect(),
                edges.iter().map(|&(a, b)| (remap[&a], remap[&b])).collect(),
            );
            if g.is_connected() && seen.insert(g.canonical_form()) {
                out.push(QuasiSubgraph { graph: g, rules });
            }
        }
        // odometer
        let mut i = 0;
        while i < m {
            choice[i] += 1;
            if choice[i] <= 4 {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
    }
    if h.n() > 0 {
        let k1 = PatternGraph::new(vec![h.vertices[0].clone()], vec![]);
        if seen.insert(k1.canonical_form()) {
            let rules = (1..h.n()).map(|v| Rule::DeleteVertex(h.vertices[v].clone())).collect();
            out.push(QuasiSubgraph { graph: k1, rules });
        }
    }
    out.sort_by_key(|q| std::cmp::Reverse(q.graph.h()));
    (out, raw)
}
