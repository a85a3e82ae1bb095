//! Approximation into subdivisions of a pattern: SEARCH finds structure
//! that does not fit on a line, COVER collects candidate cluster
//! representatives, STITCH glues line approximations of the remaining
//! components onto a multigraph that is checked against the pattern.

use crate::embedding::{self, distortion, normalize_to_proper_pushing, DistortionReport, Embedding};
use crate::error::{Error, Result};
use crate::graph::{local_density_filter, Density, Graph, VertexSet};
use crate::host::{Host, Point};
use crate::line::{approx_root, layer_order, line_embed_approx, ApproxLine};
use crate::pattern::PatternGraph;
use crate::rational::{self, Rat};
use num::BigInt;
use serde::Serialize;
use std::collections::BTreeSet;

/// Parameters derived from `c` and the edge count `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxParams {
    pub c: u32,
    pub h: usize,
    /// Long-edge threshold `20 c^3`.
    pub ell: u64,
    /// `5 ell h`.
    pub r: u64,
    /// Initial STITCH radius and growth step, both `4r`.
    pub delta: u64,
    pub c_alg: BigInt,
}

impl ApproxParams {
    pub fn new(c: u32, h: usize) -> Self {
        let ell = 20 * (c as u64).pow(3);
        let r = 5 * ell * h as u64;
        ApproxParams { c, h, ell, r, delta: 4 * r, c_alg: c_alg(c, h) }
    }

    pub fn c_alg_rat(&self) -> Rat {
        Rat::from_integer(self.c_alg.clone())
    }
}

/// `64 * 10^6 * c^24 * (h + 1)^9`.
pub fn c_alg(c: u32, h: usize) -> BigInt {
    BigInt::from(64_000_000u64) * BigInt::from(c).pow(24) * BigInt::from(h as u64 + 1).pow(9)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FailReason {
    NearF,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SearchOutcome {
    Success(usize),
    Fail(FailReason),
}

/// One classified layer `X_i = X_i^L ∪ X_i^R`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceLayer {
    pub i: usize,
    pub all: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchTrace {
    pub start: usize,
    pub v_left: Option<usize>,
    pub v_right: Option<usize>,
    /// Classified layers from `i = 2c^2` up to the halting layer.
    pub layers: Vec<TraceLayer>,
    pub outcome: SearchOutcome,
}

fn diameter_exceeds(g: &Graph, set: &[usize], lim: u32) -> bool {
    set.iter().enumerate().any(|(i, &a)| set[i + 1..].iter().any(|&b| g.dist(a, b) > lim))
}

/// Breadth-first exploration from `v` that splits each layer into a left
/// and a right side and succeeds as soon as the split is inconsistent with
/// a line. All arbitrary picks take the smallest id.
pub fn search(g: &Graph, p: &ApproxParams, f: &VertexSet, v: usize) -> SearchTrace {
    let dist_f = g.dist_to_set(f);
    search_with(g, p, &dist_f, v)
}

fn search_with(g: &Graph, p: &ApproxParams, dist_f: &[u32], v: usize) -> SearchTrace {
    let c = p.c;
    let start = 2 * (c as usize) * (c as usize);
    let lim = 2 * c;
    let row = g.dist_row(v);
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (x, &d) in row.iter().enumerate() {
        let d = d as usize;
        if layers.len() <= d {
            layers.resize(d + 1, Vec::new());
        }
        layers[d].push(x);
    }
    let mut trace =
        SearchTrace { start: v, v_left: None, v_right: None, layers: Vec::new(), outcome: SearchOutcome::Fail(FailReason::Exhausted) };
    if layers.len() <= start {
        return trace;
    }
    let x0 = &layers[start];
    let vl = x0[0];
    let vr = x0.iter().copied().find(|&x| g.dist(x, vl) > lim);
    trace.v_left = Some(vl);
    trace.v_right = vr;
    let mut left: Vec<usize> = Vec::new();
    let mut right: Vec<usize> = Vec::new();
    let mut bad = false;
    for &x in x0 {
        let l = g.dist(x, vl) <= lim;
        let r = vr.is_some_and(|w| g.dist(x, w) <= lim);
        if l {
            left.push(x);
        }
        if r {
            right.push(x);
        }
        bad |= l == r;
    }
    trace.layers.push(TraceLayer { i: start, all: x0.clone(), left: left.clone(), right: right.clone() });
    if bad {
        trace.outcome = SearchOutcome::Success(v);
        return trace;
    }
    let n = g.n();
    for i in start + 1..layers.len() {
        let xi = &layers[i];
        if xi.iter().any(|&x| dist_f[x] as u64 <= p.r) {
            trace.outcome = SearchOutcome::Fail(FailReason::NearF);
            return trace;
        }
        let mut in_l = vec![false; n];
        let mut in_r = vec![false; n];
        left.iter().for_each(|&x| in_l[x] = true);
        right.iter().for_each(|&x| in_r[x] = true);
        let mut nl = Vec::new();
        let mut nr = Vec::new();
        let mut both = None;
        for &x in xi {
            let l = g.neighbors(x).iter().any(|&y| in_l[y]);
            let r = g.neighbors(x).iter().any(|&y| in_r[y]);
            if l {
                nl.push(x);
            }
            if r {
                nr.push(x);
            }
            if l && r && both.is_none() {
                both = Some(x);
            }
        }
        trace.layers.push(TraceLayer { i, all: xi.clone(), left: nl.clone(), right: nr.clone() });
        if let Some(x) = both {
            trace.outcome = SearchOutcome::Success(x);
            return trace;
        }
        for side in [&nl, &nr] {
            if !side.is_empty() && (side.len() > start || diameter_exceeds(g, side, lim)) {
                trace.outcome = SearchOutcome::Success(side[0]);
                return trace;
            }
        }
        left = nl;
        right = nr;
    }
    trace
}

/// Every set output by some computation path of COVER; at most `2^h`
/// sets, each of size at most `h`.
pub fn cover(g: &Graph, p: &ApproxParams) -> Vec<VertexSet> {
    cover_traced(g, p).0
}

/// COVER together with the successful SEARCH traces that drove its
/// branching.
pub fn cover_traced(g: &Graph, p: &ApproxParams) -> (Vec<VertexSet>, Vec<SearchTrace>) {
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut traces = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(f) = stack.pop() {
        let fs = VertexSet::from_iter(g.n(), f.iter().copied());
        let dist_f = g.dist_to_set(&fs);
        let mut success = None;
        for v in 0..g.n() {
            if !f.is_empty() && dist_f[v] as u64 <= p.r {
                continue;
            }
            let t = search_with(g, p, &dist_f, v);
            if let SearchOutcome::Success(u) = t.outcome {
                success = Some((v, u, t));
                break;
            }
        }
        match success {
            None => {
                out.insert(f);
            }
            Some((v, u, t)) => {
                traces.push(t);
                if f.len() == p.h {
                    continue;
                }
                for w in [v, u] {
                    let mut next = f.clone();
                    next.push(w);
                    next.sort_unstable();
                    next.dedup();
                    if !stack.contains(&next) {
                        stack.push(next);
                    }
                }
            }
        }
    }
    let family = out.into_iter().map(|f| VertexSet::from_iter(g.n(), f)).collect();
    (family, traces)
}

/// Output of one STITCH run.
#[derive(Debug, Clone)]
pub struct Stitched {
    pub embedding: Embedding,
    /// The multigraph built from the ball components and deep components.
    pub h_prime: PatternGraph,
    pub radius: u64,
}

/// Builds an embedding around the balls of radius `R` about `F`. `None`
/// when a deep component is certified not to fit on a line, the
/// multigraph is not a topological subgraph of `pattern`, or the layout
/// contracts.
pub fn stitch(g: &Graph, pattern: &PatternGraph, p: &ApproxParams, f: &VertexSet) -> Result<Option<Stitched>> {
    let n = g.n();
    let fl = f.to_vec();
    let mut radius = p.delta;
    loop {
        let grow = fl.iter().enumerate().any(|(i, &a)| {
            fl[i + 1..].iter().any(|&b| {
                let d = g.dist(a, b) as u64;
                2 * radius <= d && d <= 2 * radius + p.delta
            })
        });
        if !grow {
            break;
        }
        radius += p.delta;
    }
    let dist_f = g.dist_to_set(f);
    let ball = VertexSet::from_iter(n, (0..n).filter(|&v| !f.is_empty() && dist_f[v] as u64 <= radius));
    let bcomps = g.components_within(&ball);
    let mut comp_of = vec![usize::MAX; n];
    for (i, comp) in bcomps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = i;
        }
    }
    let rest = VertexSet::from_iter(n, (0..n).filter(|&v| !ball.contains(v)));
    let mut bstar: Vec<Vec<usize>> = bcomps.clone();
    let mut deep: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for z in g.components_within(&rest) {
        let touching: BTreeSet<usize> =
            z.iter().flat_map(|&x| g.neighbors(x).iter().copied()).filter(|&y| ball.contains(y)).map(|y| comp_of[y]).collect();
        let touching: Vec<usize> = touching.into_iter().collect();
        let is_deep = f.is_empty() || z.iter().any(|&x| dist_f[x] as u64 >= p.delta / 2);
        if is_deep {
            if touching.len() > 2 {
                return Ok(None);
            }
            deep.push((z, touching));
        } else {
            if touching.len() != 1 {
                return Ok(None);
            }
            bstar[touching[0]].extend(z);
        }
    }
    for b in &mut bstar {
        b.sort_unstable();
    }

    // multigraph: one vertex per ball component, one edge per deep component
    let mut labels: Vec<String> = (0..bcomps.len()).map(|i| format!("B{i}")).collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut orders: Vec<Vec<usize>> = Vec::new();
    for (z, touching) in &deep {
        let (a, b) = match touching.len() {
            0 => {
                labels.push("x".into());
                labels.push("y".into());
                (labels.len() - 2, labels.len() - 1)
            }
            1 => (touching[0], touching[0]),
            _ => (touching[0], touching[1]),
        };
        let (gz, ids) = g.induced(z)?;
        let order = match line_embed_approx(&gz, p.c) {
            ApproxLine::CertifiedNo { .. } => return Ok(None),
            ApproxLine::Embedding(le) => le.order.iter().map(|&i| ids[i]).collect::<Vec<_>>(),
        };
        edges.push((a, b));
        orders.push(orient(g, order, a, b, &comp_of, touching.len()));
    }
    let fallback = edges.is_empty();
    if fallback {
        labels.push("end".into());
        edges.push((0, labels.len() - 1));
        orders.push(Vec::new());
    }
    let h_prime = PatternGraph::new(labels, edges.clone());
    if topological_subgraph_check(&h_prime, pattern)?.is_none() {
        return Ok(None);
    }

    // B* of each ball component goes on its lowest incident edge: the
    // first vertex sits on the pattern vertex, the rest follow towards
    // the deep component
    let k = bcomps.len();
    let mut chosen = vec![usize::MAX; k];
    for (e, &(a, b)) in edges.iter().enumerate() {
        for x in [a, b] {
            if x < k && chosen[x] == usize::MAX {
                chosen[x] = e;
            }
        }
    }
    let mut bseq: Vec<Vec<usize>> = Vec::with_capacity(k);
    for i in 0..k {
        let e = chosen[i];
        let order = &orders[e];
        let seq = if order.is_empty() {
            let (gb, ids) = g.induced(&bstar[i])?;
            layer_order(&gb, approx_root(&gb)).into_iter().map(|j| ids[j]).collect()
        } else {
            let z1 = if edges[e].0 == i { order[0] } else { *order.last().unwrap() };
            let mut s = bstar[i].clone();
            s.sort_by_key(|&v| (std::cmp::Reverse(g.dist(v, z1)), v));
            s
        };
        bseq.push(seq);
    }
    let mut vertex_image: Vec<usize> = vec![usize::MAX; h_prime.n()];
    for i in 0..k {
        vertex_image[i] = bseq[i][0];
    }
    let mut sequences: Vec<Vec<usize>> = Vec::with_capacity(edges.len());
    for (e, &(a, b)) in edges.iter().enumerate() {
        let mut seq: Vec<usize> = Vec::new();
        if a < k {
            seq.push(vertex_image[a]);
            if chosen[a] == e {
                seq.extend(&bseq[a][1..]);
            }
        }
        seq.extend(&orders[e]);
        if b < k && a != b {
            if chosen[b] == e {
                seq.extend(bseq[b][1..].iter().rev());
            }
            seq.push(vertex_image[b]);
        } else if a == b {
            seq.push(vertex_image[a]);
        }
        if a >= k {
            vertex_image[a] = seq[0];
        }
        if b >= k {
            vertex_image[b] = *seq.last().unwrap();
        }
        sequences.push(seq);
    }
    let mut image: Vec<Option<Point>> = vec![None; n];
    for (x, &v) in vertex_image.iter().enumerate() {
        image[v] = Some(Point::Vertex(x));
    }
    let mut lengths = Vec::with_capacity(edges.len());
    let mut points = Vec::with_capacity(edges.len());
    for (e, seq) in sequences.iter().enumerate() {
        let mut acc = 0i64;
        let mut pts = Vec::new();
        for (i, w) in seq.windows(2).enumerate() {
            acc += g.dist(w[0], w[1]) as i64;
            if i + 2 < seq.len() {
                pts.push(rational::int(acc));
                image[w[1]] = Some(Point::Edge(e, rational::int(acc)));
            }
        }
        lengths.push(rational::int(acc));
        points.push(pts);
    }
    let image: Vec<Point> = match image.into_iter().collect() {
        Some(i) => i,
        None => return Err(Error::Model("stitch left a vertex without an image".into())),
    };
    let host = Host::new(h_prime.clone(), lengths, points)?;
    let emb = Embedding::new(host, image)?;
    match normalize_to_proper_pushing(g, &emb) {
        Ok(e) => Ok(Some(Stitched { embedding: e, h_prime, radius })),
        Err(Error::Contract(..)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Orients a deep component's order so that vertices next to `B_a` come
/// first and those next to `B_b` last.
fn orient(g: &Graph, order: Vec<usize>, a: usize, b: usize, comp_of: &[usize], touching: usize) -> Vec<usize> {
    if touching == 1 {
        // loop: put the attachment nearest the start
        let first = order.iter().position(|&x| g.neighbors(x).iter().any(|&y| comp_of[y] == a));
        let last = order.iter().rposition(|&x| g.neighbors(x).iter().any(|&y| comp_of[y] == a));
        if let (Some(f), Some(l)) = (first, last) {
            if order.len() - 1 - l < f {
                return order.into_iter().rev().collect();
            }
        }
        return order;
    }
    if touching == 0 {
        return order;
    }
    let m = order.len();
    let (mut fwd, mut bwd) = (0usize, 0usize);
    for (i, &x) in order.iter().enumerate() {
        for &y in g.neighbors(x) {
            if comp_of[y] == a {
                fwd += i;
                bwd += m - 1 - i;
            } else if comp_of[y] == b {
                fwd += m - 1 - i;
                bwd += i;
            }
        }
    }
    if bwd < fwd {
        order.into_iter().rev().collect()
    } else {
        order
    }
}

/// Largest pattern accepted by the brute-force topological check.
pub const TOPO_CAP: usize = 10;

/// Where a branch vertex of the multigraph lands in the pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopoImage {
    Vertex(usize),
    /// Interior of pattern edge `e`.
    EdgeInterior(usize),
}

/// Decides whether `hp` (a multigraph) is a topological subgraph of `h`:
/// after suppressing degree-2 vertices, branch vertices go injectively to
/// locations of `h` and edges to internally disjoint paths. Returns the
/// location of every surviving vertex of `hp`.
pub fn topological_subgraph_check(hp: &PatternGraph, h: &PatternGraph) -> Result<Option<Vec<(usize, TopoImage)>>> {
    if h.n() > TOPO_CAP {
        return Err(Error::Size { what: "pattern vertex count", got: h.n(), cap: TOPO_CAP });
    }
    let (keep, sedges) = suppress(hp);
    // host: every edge of h split in three, so loops and parallel edges
    // become simple paths
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); h.n() + 2 * h.h()];
    let mut origin: Vec<TopoImage> = (0..h.n()).map(TopoImage::Vertex).collect();
    for (e, &(a, b)) in h.edges.iter().enumerate() {
        let (m1, m2) = (h.n() + 2 * e, h.n() + 2 * e + 1);
        origin.push(TopoImage::EdgeInterior(e));
        origin.push(TopoImage::EdgeInterior(e));
        for (x, y) in [(a, m1), (m1, m2), (m2, b)] {
            adj[x].push(y);
            adj[y].push(x);
        }
    }
    let deg: Vec<usize> = keep.iter().map(|&v| sedges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()).collect();
    let index = |v: usize| keep.iter().position(|&k| k == v).unwrap();
    let sedges: Vec<(usize, usize)> = sedges.iter().map(|&(a, b)| (index(a), index(b))).collect();
    let mut state = Topo { adj: &adj, edges: &sedges, deg: &deg, phi: vec![usize::MAX; keep.len()], used: vec![false; adj.len()] };
    if state.assign(0) {
        let out = keep.iter().zip(&state.phi).map(|(&v, &x)| (v, origin[x].clone())).collect();
        return Ok(Some(out));
    }
    Ok(None)
}

/// Repeatedly replaces a degree-2 vertex whose two edge ends are distinct
/// by a single edge. Returns surviving vertices and the edge list.
fn suppress(hp: &PatternGraph) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut edges = hp.edges.clone();
    let mut alive = vec![true; hp.n()];
    loop {
        let mut changed = false;
        for v in 0..hp.n() {
            if !alive[v] {
                continue;
            }
            let inc: Vec<usize> = (0..edges.len()).filter(|&e| edges[e].0 == v || edges[e].1 == v).collect();
            if inc.len() != 2 || inc.iter().any(|&e| edges[e].0 == edges[e].1) {
                continue;
            }
            let other = |e: usize| if edges[e].0 == v { edges[e].1 } else { edges[e].0 };
            let (x, y) = (other(inc[0]), other(inc[1]));
            edges.remove(inc[1]);
            edges.remove(inc[0]);
            edges.push((x, y));
            alive[v] = false;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    ((0..hp.n()).filter(|&v| alive[v]).collect(), edges)
}

struct Topo<'a> {
    adj: &'a [Vec<usize>],
    edges: &'a [(usize, usize)],
    deg: &'a [usize],
    phi: Vec<usize>,
    used: Vec<bool>,
}

impl Topo<'_> {
    fn assign(&mut self, i: usize) -> bool {
        if i == self.phi.len() {
            return self.route(0);
        }
        for x in 0..self.adj.len() {
            if self.used[x] || self.adj[x].len() < self.deg[i] {
                continue;
            }
            self.phi[i] = x;
            self.used[x] = true;
            if self.assign(i + 1) {
                return true;
            }
            self.used[x] = false;
        }
        self.phi[i] = usize::MAX;
        false
    }

    fn route(&mut self, e: usize) -> bool {
        if e == self.edges.len() {
            return true;
        }
        let (a, b) = (self.phi[self.edges[e].0], self.phi[self.edges[e].1]);
        let mut path = vec![a];
        self.walk(e, b, &mut path)
    }

    /// Extends `path` to `target` through unused vertices, then routes the
    /// remaining edges; backtracks over all simple paths.
    fn walk(&mut self, e: usize, target: usize, path: &mut Vec<usize>) -> bool {
        let x = *path.last().unwrap();
        for i in 0..self.adj[x].len() {
            let y = self.adj[x][i];
            if y == target {
                // a closed walk needs at least three edges in the simple host
                if path[0] == target && path.len() < 3 {
                    continue;
                }
                if self.route(e + 1) {
                    return true;
                }
                continue;
            }
            if self.used[y] {
                continue;
            }
            self.used[y] = true;
            path.push(y);
            if self.walk(e, target, path) {
                return true;
            }
            path.pop();
            self.used[y] = false;
        }
        false
    }
}

/// Outcome of the approximation driver.
#[derive(Debug, Clone)]
pub enum ApproxOutcome {
    Embedding { embedding: Embedding, report: DistortionReport, subpattern: PatternGraph, f: Vec<usize> },
    NoCEmbedding(String),
}

/// Connected subgraphs of `h` with at least one edge, up to isomorphism,
/// by decreasing edge count.
pub fn connected_subgraphs(h: &PatternGraph) -> Vec<PatternGraph> {
    let mut out: Vec<PatternGraph> = Vec::new();
    let mut forms = BTreeSet::new();
    let m = h.h();
    for mask in 1u64..(1u64 << m) {
        let es: Vec<(usize, usize)> = (0..m).filter(|&e| mask >> e & 1 == 1).map(|e| h.edges[e]).collect();
        let vs: BTreeSet<usize> = es.iter().flat_map(|&(a, b)| [a, b]).collect();
        let vs: Vec<usize> = vs.into_iter().collect();
        let idx = |v: usize| vs.iter().position(|&x| x == v).unwrap();
        let sub =
            PatternGraph::new(vs.iter().map(|&v| h.vertices[v].clone()).collect(), es.iter().map(|&(a, b)| (idx(a), idx(b))).collect());
        if sub.is_connected() && forms.insert(sub.canonical_form()) {
            out.push(sub);
        }
    }
    out.sort_by_key(|s| std::cmp::Reverse(s.h()));
    out
}

/// Full pipeline: density filter, subgraph guesses, COVER and STITCH, and
/// exact verification. Returns the verified embedding of smallest
/// distortion, or `NoCEmbedding` when no branch stays within `c_ALG`.
pub fn approx_embed(g: &Graph, h: &PatternGraph, c: u32) -> Result<ApproxOutcome> {
    if c == 0 {
        return Err(Error::Param("c must be at least 1".into()));
    }
    if h.n() == 0 {
        return Err(Error::Param("empty pattern".into()));
    }
    if let Density::Reject { v, r, ball } = local_density_filter(g, h.h(), c) {
        return Ok(ApproxOutcome::NoCEmbedding(format!("ball of radius {r} around {} has {ball} vertices", g.label(v))));
    }
    if g.n() == 1 {
        let host = Host::new(PatternGraph::new(vec![h.vertices[0].clone()], vec![]), vec![], vec![])?;
        let embedding = Embedding::new(host, vec![Point::Vertex(0)])?;
        let report = distortion(g, &embedding)?;
        return Ok(ApproxOutcome::Embedding { embedding, report, subpattern: h.clone(), f: vec![] });
    }
    let bound = ApproxParams::new(c, h.h()).c_alg_rat();
    let mut best: Option<ApproxOutcome> = None;
    for sub in connected_subgraphs(h) {
        let p = ApproxParams::new(c, sub.h());
        for f in cover(g, &p) {
            let Some(st) = stitch(g, &sub, &p, &f)? else { continue };
            let report = distortion(g, &st.embedding)?;
            if !report.non_contracting || report.distortion > bound {
                continue;
            }
            let better = match &best {
                Some(ApproxOutcome::Embedding { report: r, .. }) => report.distortion < r.distortion,
                _ => true,
            };
            if better {
                best = Some(ApproxOutcome::Embedding { embedding: st.embedding, report, subpattern: sub.clone(), f: f.to_vec() });
            }
        }
    }
    Ok(best.unwrap_or_else(|| ApproxOutcome::NoCEmbedding("no stitched branch stays within c_ALG".into())))
}

/// Whether an embedding satisfies every output guarantee of the driver.
pub fn check_output(g: &Graph, emb: &Embedding, c: u32, h: usize) -> Result<bool> {
    let r = distortion(g, emb)?;
    Ok(r.non_contracting
        && embedding::is_pushing(g, emb).0
        && embedding::is_proper(g, emb).0
        && r.distortion <= ApproxParams::new(c, h).c_alg_rat())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, e: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, e).unwrap()
    }

    fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        graph(n, &e)
    }

    fn cycle(n: usize) -> Graph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        graph(n, &e)
    }

    fn spider(legs: usize, len: usize) -> Graph {
        let mut e = Vec::new();
        for l in 0..legs {
            for i in 0..len {
                let v = 1 + l * len + i;
                e.push((if i == 0 { 0 } else { v - 1 }, v));
            }
        }
        graph(1 + legs * len, &e)
    }

    #[test]
    fn parameters() {
        let p = ApproxParams::new(1, 3);
        assert_eq!((p.ell, p.r, p.delta), (20, 300, 1200));
        assert_eq!(p.c_alg, BigInt::from(64_000_000u64) * BigInt::from(4u64).pow(9));
        assert_eq!(c_alg(2, 1), BigInt::from(64_000_000u64) * BigInt::from(1u64 << 24) * BigInt::from(512));
    }

    #[test]
    fn search_on_long_path_fails() {
        let g = path(200);
        let p = ApproxParams::new(1, 1);
        let t = search(&g, &p, &VertexSet::new(200), 100);
        assert_eq!(t.outcome, SearchOutcome::Fail(FailReason::Exhausted));
        // the two sides stay on the two sides of the start
        for layer in &t.layers {
            assert!(layer.left.iter().all(|&x| x < 100) || layer.left.iter().all(|&x| x > 100));
            assert!(layer.left.iter().all(|x| !layer.right.contains(x)));
        }
    }

    #[test]
    fn search_on_spider_succeeds_near_center() {
        let g = spider(3, 500);
        let p = ApproxParams::new(1, 3);
        let t = search(&g, &p, &VertexSet::new(g.n()), 100);
        let SearchOutcome::Success(u) = t.outcome else { panic!("{:?}", t.outcome) };
        assert!(g.dist(u, 0) as u64 <= 2 * p.ell * 3);
    }

    #[test]
    fn search_near_f_fails() {
        let g = path(50);
        let p = ApproxParams::new(1, 1);
        let f = VertexSet::from_iter(50, [49]);
        let t = search(&g, &p, &f, 0);
        assert_eq!(t.outcome, SearchOutcome::Fail(FailReason::NearF));
        assert_eq!(t.layers.last().unwrap().i, 2);
    }

    #[test]
    fn cover_examples() {
        let g = path(200);
        assert_eq!(cover(&g, &ApproxParams::new(1, 1)), vec![VertexSet::new(200)]);
        let g = spider(3, 500);
        let p = ApproxParams::new(1, 3);
        let fam = cover(&g, &p);
        assert!(fam.len() <= 8 && fam.iter().all(|f| f.len() <= 3));
        assert!(fam.iter().any(|f| f.iter().any(|v| g.dist(v, 0) as u64 <= 2 * p.ell * 3)));
        for f in &fam {
            let v = f.to_vec();
            for (i, &a) in v.iter().enumerate() {
                for &b in &v[i + 1..] {
                    assert!(g.dist(a, b) as u64 > p.r);
                }
            }
        }
    }

    #[test]
    fn stitch_path_is_single_edge() {
        let g = path(200);
        let p = ApproxParams::new(1, 1);
        let st = stitch(&g, &PatternGraph::line(), &p, &VertexSet::new(200)).unwrap().unwrap();
        assert_eq!(st.h_prime.h(), 1);
        assert_eq!(distortion(&g, &st.embedding).unwrap().distortion, rational::one());
    }

    #[test]
    fn stitch_star_subdivision() {
        let g = spider(3, 100);
        let p = ApproxParams::new(1, 3);
        let f = VertexSet::from_iter(g.n(), [0]);
        let st = stitch(&g, &PatternGraph::star(3), &p, &f).unwrap().unwrap();
        assert!(check_output(&g, &st.embedding, 1, 3).unwrap());
    }

    #[test]
    fn topological_examples() {
        let star = PatternGraph::star(3);
        assert!(topological_subgraph_check(&star, &star).unwrap().is_some());
        let k4 = PatternGraph::complete(4);
        assert!(topological_subgraph_check(&k4, &PatternGraph::cycle()).unwrap().is_none());
        assert!(topological_subgraph_check(&PatternGraph::line(), &PatternGraph::cycle()).unwrap().is_some());
        let looped = PatternGraph::numbered(1, &[(0, 0)]);
        assert!(topological_subgraph_check(&looped, &PatternGraph::cycle()).unwrap().is_some());
        assert!(topological_subgraph_check(&looped, &PatternGraph::line()).unwrap().is_none());
        let theta = PatternGraph::numbered(2, &[(0, 1), (0, 1), (0, 1)]);
        assert!(topological_subgraph_check(&theta, &k4).unwrap().is_some());
        assert!(topological_subgraph_check(&theta, &PatternGraph::cycle()).unwrap().is_none());
        let big = PatternGraph::complete(11);
        assert!(matches!(topological_subgraph_check(&star, &big), Err(Error::Size { .. })));
    }

    #[test]
    fn driver_examples() {
        let g = path(10);
        let ApproxOutcome::Embedding { report, .. } = approx_embed(&g, &PatternGraph::line(), 1).unwrap() else { panic!("path rejected") };
        assert_eq!(report.distortion, rational::one());
        let mut e = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                e.push((i, j));
            }
        }
        let k5 = graph(5, &e);
        assert!(matches!(approx_embed(&k5, &PatternGraph::line(), 1).unwrap(), ApproxOutcome::NoCEmbedding(_)));
        let c = cycle(100);
        let ApproxOutcome::Embedding { embedding, .. } = approx_embed(&c, &PatternGraph::cycle(), 1).unwrap() else {
            panic!("cycle rejected")
        };
        assert!(check_output(&c, &embedding, 1, 3).unwrap());
    }
}
