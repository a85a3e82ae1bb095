//! Embeddings into the line: the exact sliding-window search, the BFS-layer
//! approximation with its certificate, and a brute-force oracle.

use crate::embedding::{self, Embedding};
use crate::error::{Budget, Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::pattern::next_permutation;
use crate::rational::{self, Rat};
use fixedbitset::FixedBitSet;
use num::Signed;
use std::collections::HashSet;

/// A pushed ordering: `positions[0] = 0` and each gap is the distance
/// between consecutive vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineEmbedding {
    pub order: Vec<usize>,
    pub positions: Vec<Rat>,
}

impl LineEmbedding {
    pub fn pushed(g: &Graph, order: Vec<usize>) -> Self {
        let positions = embedding::pushed_positions(g, &order);
        LineEmbedding { order, positions }
    }

    pub fn pushed_metric(d: &Metric, order: Vec<usize>) -> Self {
        let mut positions = Vec::with_capacity(order.len());
        let mut acc = 0i64;
        for (i, &v) in order.iter().enumerate() {
            if i > 0 {
                acc += d.dist(order[i - 1], v) as i64;
            }
            positions.push(rational::int(acc));
        }
        LineEmbedding { order, positions }
    }

    pub fn to_embedding(&self) -> Result<Embedding> {
        embedding::line_embedding(self.order.len(), &self.order, &self.positions)
    }

    /// Largest stretch of a graph edge; equals the distortion of a pushed
    /// order since pushed orders never contract.
    pub fn edge_stretch(&self, g: &Graph) -> Rat {
        let mut at = vec![0usize; g.n()];
        for (i, &v) in self.order.iter().enumerate() {
            at[v] = i;
        }
        let mut best = rational::one();
        for (u, v) in g.edges() {
            let s = (&self.positions[at[u]] - &self.positions[at[v]]).abs();
            if s > best {
                best = s;
            }
        }
        best
    }
}

/// Finite metric with positive integer distances.
#[derive(Debug, Clone)]
pub struct Metric {
    n: usize,
    d: Vec<u32>,
}

impl Metric {
    pub fn new(n: usize, d: Vec<u32>) -> Result<Metric> {
        if d.len() != n * n {
            return Err(Error::Param("distance table has the wrong size".into()));
        }
        for u in 0..n {
            for v in 0..n {
                if (d[u * n + v] == 0) != (u == v) || d[u * n + v] != d[v * n + u] {
                    return Err(Error::Param(format!("not a metric at ({u}, {v})")));
                }
            }
        }
        Ok(Metric { n, d })
    }

    /// Shortest-path metric of `g` restricted to `vertices`.
    pub fn restrict(g: &Graph, vertices: &[usize]) -> Metric {
        let n = vertices.len();
        let mut d = vec![0; n * n];
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate() {
                d[i * n + j] = g.dist(u, v);
            }
        }
        Metric { n, d }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, u: usize, v: usize) -> u32 {
        self.d[u * self.n + v]
    }

    pub fn max_dist(&self) -> u32 {
        self.d.iter().copied().max().unwrap_or(0)
    }
}

/// Window of the exact search: the last placed vertices in order, and the
/// placed vertices that already slid out on the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleWindow {
    pub slots: Vec<usize>,
    pub left: VertexSet,
}

impl FeasibleWindow {
    pub fn right(&self) -> VertexSet {
        let mut r = VertexSet::full(self.left.universe());
        for v in self.left.iter() {
            r.remove(v);
        }
        for &v in &self.slots {
            r.remove(v);
        }
        r
    }

    /// Checks the window conditions: consecutive gaps at most `c`, no edge
    /// between the left and right parts, and, for a full window, the
    /// `c`-ball of the middle slot inside the window.
    pub fn is_feasible(&self, g: &Graph, c: u32) -> bool {
        if self.slots.windows(2).any(|w| g.dist(w[0], w[1]) > c) {
            return false;
        }
        let right = self.right();
        if self.left.iter().any(|u| g.neighbors(u).iter().any(|&v| right.contains(v))) {
            return false;
        }
        let k = window_width(c);
        if self.slots.len() == k {
            let mid = self.slots[k / 2 - 1];
            if !g.ball(mid, c).iter().all(|v| self.slots.contains(&v)) {
                return false;
            }
        }
        true
    }
}

/// Number of slots `4c^2 + 2`.
pub fn window_width(c: u32) -> usize {
    4 * (c as usize) * (c as usize) + 2
}

/// Outcome of the exact search together with the number of window states
/// visited.
#[derive(Debug, Clone)]
pub struct LineSearch {
    pub embedding: Option<LineEmbedding>,
    pub states: u64,
}

struct Instance<'a> {
    n: usize,
    dist: &'a dyn Fn(usize, usize) -> u32,
    /// Pairs whose stretch is checked, with their distance.
    check: Vec<Vec<(usize, u32)>>,
    gap: u32,
    width: usize,
    c: u32,
    /// Radius-`c` balls for the middle-slot test (graph mode only).
    balls: Option<Vec<Vec<usize>>>,
}

#[derive(Clone)]
struct Frame {
    window: Vec<(usize, u64)>,
    placed: FixedBitSet,
    via: Option<usize>,
    next: usize,
}

fn search(inst: &Instance, budget: &mut Budget) -> Result<LineSearch> {
    let n = inst.n;
    let mut visited: HashSet<(Vec<usize>, FixedBitSet)> = HashSet::new();
    let mut stack = vec![Frame { window: Vec::new(), placed: FixedBitSet::with_capacity(n), via: None, next: 0 }];
    let mut states = 1u64;
    while let Some(top) = stack.last_mut() {
        if top.placed.count_ones(..) == n {
            let order = stack.iter().filter_map(|f| f.via).collect();
            return Ok(LineSearch { embedding: Some(LineEmbedding { order, positions: Vec::new() }), states });
        }
        let mut child = None;
        while top.next < n {
            let x = top.next;
            top.next += 1;
            if top.placed.contains(x) {
                continue;
            }
            if let Some(f) = extend(inst, top, x) {
                let key = (f.window.iter().map(|p| p.0).collect::<Vec<_>>(), f.placed.clone());
                if visited.insert(key) {
                    child = Some(f);
                    break;
                }
            }
        }
        match child {
            Some(f) => {
                states += 1;
                budget.tick(|| format!("line window search, {} vertices placed", f.placed.count_ones(..)))?;
                stack.push(f);
            }
            None => {
                stack.pop();
            }
        }
    }
    Ok(LineSearch { embedding: None, states })
}

fn extend(inst: &Instance, top: &Frame, x: usize) -> Option<Frame> {
    let pos = match top.window.last() {
        Some(&(last, p)) => {
            let gap = (inst.dist)(last, x);
            if gap > inst.gap {
                return None;
            }
            p + gap as u64
        }
        None => 0,
    };
    for &(u, d) in &inst.check[x] {
        if !top.placed.contains(u) {
            continue;
        }
        let pu = top.window.iter().find(|p| p.0 == u)?.1;
        if pos - pu > inst.c as u64 * d as u64 {
            return None;
        }
    }
    let mut placed = top.placed.clone();
    placed.insert(x);
    let mut window = top.window.clone();
    window.push((x, pos));
    if window.len() > inst.width {
        let (f, _) = window.remove(0);
        if inst.check[f].iter().any(|&(u, _)| !placed.contains(u)) {
            return None;
        }
    }
    if let Some(balls) = &inst.balls {
        if window.len() == inst.width {
            let mid = window[inst.width / 2 - 1].0;
            if !balls[mid].iter().all(|v| window.iter().any(|p| p.0 == *v)) {
                return None;
            }
        }
    }
    Some(Frame { window, placed, via: Some(x), next: 0 })
}

/// Exact search for a non-contracting pushed `c`-embedding of `g` into the
/// line.
pub fn line_embed_exact(g: &Graph, c: u32, budget: &mut Budget) -> Result<Option<LineEmbedding>> {
    Ok(line_embed_exact_stats(g, c, budget)?.embedding)
}

pub fn line_embed_exact_stats(g: &Graph, c: u32, budget: &mut Budget) -> Result<LineSearch> {
    if c == 0 {
        return Err(Error::Param("c must be at least 1".into()));
    }
    let dist = |u: usize, v: usize| g.dist(u, v);
    let inst = Instance {
        n: g.n(),
        dist: &dist,
        check: (0..g.n()).map(|v| g.neighbors(v).iter().map(|&u| (u, 1)).collect()).collect(),
        gap: c,
        width: window_width(c),
        c,
        balls: Some((0..g.n()).map(|v| g.ball(v, c).to_vec()).collect()),
    };
    let mut out = search(&inst, budget)?;
    out.embedding = out.embedding.map(|e| LineEmbedding::pushed(g, e.order));
    Ok(out)
}

/// Metric-input variant: every pair is checked, and the window holds
/// `4c^2 W + 2` slots for maximum distance `W`.
pub fn line_embed_exact_metric(d: &Metric, c: u32, budget: &mut Budget) -> Result<Option<LineEmbedding>> {
    if c == 0 {
        return Err(Error::Param("c must be at least 1".into()));
    }
    let n = d.n();
    let w = d.max_dist().max(1);
    if n > 1 && (n - 1) as u64 > c as u64 * w as u64 {
        return Ok(None);
    }
    let dist = |u: usize, v: usize| d.dist(u, v);
    let inst = Instance {
        n,
        dist: &dist,
        check: (0..n).map(|v| (0..n).filter(|&u| u != v).map(|u| (u, d.dist(u, v))).collect()).collect(),
        gap: c * w,
        width: 4 * (c * c * w) as usize + 2,
        c,
        balls: None,
    };
    let out = search(&inst, budget)?;
    Ok(out.embedding.map(|e| LineEmbedding::pushed_metric(d, e.order)))
}

/// Result of the BFS-layer approximation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApproxLine {
    Embedding(LineEmbedding),
    /// Three vertices of one BFS layer around `root`, pairwise farther
    /// than `2c` apart; any non-contracting `c`-embedding would put two of
    /// them on the same side of `root`, forcing their distance to `2c` or
    /// less.
    CertifiedNo {
        root: usize,
        triple: [usize; 3],
    },
}

/// Root of the layer order: the endpoint of a two-sweep with the larger
/// eccentricity, ties by id.
pub fn approx_root(g: &Graph) -> usize {
    let far = |s: usize| -> usize {
        let row = g.dist_row(s);
        let mut best = s;
        for v in 0..g.n() {
            if row[v] > row[best] {
                best = v;
            }
        }
        best
    };
    let a = far(0);
    let b = far(a);
    let (ea, eb) = (g.eccentricity(a), g.eccentricity(b));
    if ea > eb || (ea == eb && a < b) {
        a
    } else {
        b
    }
}

/// Layer order from `root`: layers by increasing distance; inside a layer,
/// by distance to the vertex nearest the previously placed vertex, then
/// by id.
pub fn layer_order(g: &Graph, root: usize) -> Vec<usize> {
    let mut order = vec![root];
    for layer in g.bfs_layers(root).into_iter().skip(1) {
        let last = *order.last().unwrap();
        let members = layer.to_vec();
        let anchor = *members.iter().min_by_key(|&&v| (g.dist(last, v), v)).unwrap();
        let mut sorted = members;
        sorted.sort_by_key(|&v| (g.dist(anchor, v), v));
        order.extend(sorted);
    }
    order
}

fn far_triple(g: &Graph, layer: &[usize], c: u32) -> Option<[usize; 3]> {
    let lim = 2 * c;
    for (i, &a) in layer.iter().enumerate() {
        for (j, &b) in layer.iter().enumerate().skip(i + 1) {
            if g.dist(a, b) <= lim {
                continue;
            }
            for &x in &layer[j + 1..] {
                if g.dist(a, x) > lim && g.dist(b, x) > lim {
                    return Some([a, b, x]);
                }
            }
        }
    }
    None
}

/// Polynomial-time approximation. Returns `CertifiedNo` only with a
/// checkable certificate; otherwise the pushed layer order from
/// [`approx_root`].
pub fn line_embed_approx(g: &Graph, c: u32) -> ApproxLine {
    if let Some(cert) = certificate(g, c) {
        return cert;
    }
    ApproxLine::Embedding(LineEmbedding::pushed(g, layer_order(g, approx_root(g))))
}

/// Searches every root for a layer with three pairwise far vertices.
pub fn certificate(g: &Graph, c: u32) -> Option<ApproxLine> {
    for root in 0..g.n() {
        for layer in g.bfs_layers(root).into_iter().skip(1) {
            if layer.len() < 3 {
                continue;
            }
            if let Some(triple) = far_triple(g, &layer.to_vec(), c) {
                return Some(ApproxLine::CertifiedNo { root, triple });
            }
        }
    }
    None
}

/// Largest graph accepted by the permutation oracle.
pub const ORACLE_CAP: usize = 9;

/// Minimum distortion over all pushed orderings, by enumeration. Ties go
/// to the lexicographically first ordering.
pub fn min_line_distortion_oracle(g: &Graph) -> Result<(Rat, LineEmbedding)> {
    let n = g.n();
    if n > ORACLE_CAP {
        return Err(Error::Size { what: "vertex count", got: n, cap: ORACLE_CAP });
    }
    let edges = g.edges();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(u32, Vec<usize>)> = None;
    let mut pos = vec![0u32; n];
    loop {
        let mut acc = 0;
        for i in 0..n {
            if i > 0 {
                acc += g.dist(perm[i - 1], perm[i]);
            }
            pos[perm[i]] = acc;
        }
        let stretch = edges.iter().map(|&(u, v)| pos[u].abs_diff(pos[v])).max().unwrap_or(1).max(1);
        if best.as_ref().is_none_or(|b| stretch < b.0) {
            best = Some((stretch, perm.clone()));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (d, order) = best.expect("at least one ordering");
    Ok((rational::int(d as i64), LineEmbedding::pushed(g, order)))
}
