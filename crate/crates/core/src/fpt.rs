//! Exact embedding into subdivisions of a fixed pattern: interesting
//! vertices, the cluster and path sub-solvers, the branching driver and the
//! clique gadget.

use crate::embedding::{distortion, normalize_to_proper_pushing, DistortionReport, Embedding};
use crate::error::{Budget, Error, Result};
use crate::graph::{local_density_filter, Density, Graph, VertexSet};
use crate::host::{Host, Point};
use crate::line::{self, LineEmbedding, Metric};
use crate::lp::{Lp, LpOutcome, Rel};
use crate::pattern::{enumerate_quasi_subgraphs, PatternGraph};
use crate::rational::{self, Rat};
use num::{BigInt, One, Signed, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, HashSet};

/// Parameters derived from `c`, the current quasi-subgraph and `|E(H)|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FptParams {
    pub c: u32,
    /// Edges of weight at most `16c^4` are short.
    pub short: u64,
    /// `diam(H^q) + 8c^4`, with the hop diameter of the quasi-subgraph.
    pub delta: u64,
    /// Window length `4c^2 + 1`.
    pub window: usize,
    /// Cap `8 c delta |E(H)|` on the number of delta-interesting vertices.
    pub interesting_cap: u64,
    /// Cap `(4c|E(H)|)^2` on the number of components of `G - I`.
    pub component_cap: u64,
}

impl FptParams {
    pub fn new(c: u32, hq: &PatternGraph, h_edges: usize) -> Self {
        let c64 = c as u64;
        let c4 = c64.pow(4);
        let delta = hq.diameter() as u64 + 8 * c4;
        let e = h_edges as u64;
        FptParams {
            c,
            short: 16 * c4,
            delta,
            window: 4 * (c as usize) * (c as usize) + 1,
            interesting_cap: 8 * c64 * delta * e,
            component_cap: (4 * c64 * e).pow(2),
        }
    }

    /// Minimum number of images on a long edge leaving an interesting
    /// cluster: `8c^2 + 2`, capped by the `8c^4` interesting prefix such an
    /// edge is guaranteed to carry.
    pub fn occupancy(&self) -> usize {
        let c = self.c as usize;
        (8 * c * c + 2).min(8 * c.pow(4))
    }

    /// Radius `(4c^2 + 1) c` of the ball test for path windows.
    pub fn zl_radius(&self) -> u32 {
        self.window as u32 * self.c
    }

    /// Largest ball that a vertex of a long edge can have: the radius maps
    /// into an interval of length `2c` times the radius with unit gaps.
    pub fn zl_size(&self) -> usize {
        2 * self.window * (self.c as usize) * (self.c as usize) + 1
    }
}

/// Whether `ball(v, alpha)` with the metric of `g` admits no `c`-embedding
/// into the line.
pub fn is_alpha_interesting(g: &Graph, v: usize, alpha: u64, c: u32, budget: &mut Budget) -> Result<bool> {
    if alpha == 0 {
        return Ok(false);
    }
    let r = alpha.min(u32::MAX as u64 - 1) as u32;
    let ball = g.ball(v, r).to_vec();
    let metric = Metric::restrict(g, &ball);
    Ok(line::line_embed_exact_metric(&metric, c, budget)?.is_none())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Interesting {
    Set(VertexSet),
    /// More than the cap: no `c`-embedding into subdivisions of this
    /// quasi-subgraph.
    TooMany {
        found: usize,
        cap: u64,
    },
}

/// All `delta`-interesting vertices, or `TooMany` once the cap is passed.
pub fn delta_interesting_set(g: &Graph, p: &FptParams, budget: &mut Budget) -> Result<Interesting> {
    let mut set = VertexSet::new(g.n());
    for v in 0..g.n() {
        if is_alpha_interesting(g, v, p.delta, p.c, budget)? {
            set.insert(v);
            if set.len() as u64 > p.interesting_cap {
                return Ok(Interesting::TooMany { found: set.len(), cap: p.interesting_cap });
            }
        }
    }
    Ok(Interesting::Set(set))
}

// ---------------------------------------------------------------- CLUSTER

/// End designation of a part: its first vertex (at the edge's first
/// endpoint) or its last vertex (at the second endpoint).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Port {
    pub edge: usize,
    pub last: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterConfiguration {
    /// Part of `S` on each edge of `C`, ordered from the edge's first
    /// endpoint.
    pub parts: Vec<Vec<usize>>,
    /// Chosen simple path (edge ids of `C`) for each pair of ports on
    /// different parts.
    pub paths: Vec<(Port, Port, Vec<usize>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSolution {
    pub config: ClusterConfiguration,
    pub alpha: Vec<Rat>,
    pub beta: Vec<Rat>,
    pub objective: Rat,
    /// The weighted subdivision `C'`.
    pub host: Host,
    /// `f_C`, as `(vertex of G, location)`.
    pub placement: Vec<(usize, Point)>,
}

impl ClusterSolution {
    /// Offsets from the edge's first endpoint of the part on edge `e`.
    pub fn part_offsets(&self, g: &Graph, e: usize) -> Vec<(Rat, usize)> {
        offsets(g, &self.alpha[e], &self.config.parts[e])
    }
}

fn offsets(g: &Graph, start: &Rat, seq: &[usize]) -> Vec<(Rat, usize)> {
    let mut out = Vec::with_capacity(seq.len());
    let mut acc = start.clone();
    for (i, &v) in seq.iter().enumerate() {
        if i > 0 {
            acc += rational::int(g.dist(seq[i - 1], v) as i64);
        }
        out.push((acc.clone(), v));
    }
    out
}

/// Restrictions used when a cluster solution has to agree with a window.
#[derive(Debug, Clone, Default)]
pub struct ClusterConstraints {
    /// `(edge, seq)`: the part on `edge` must end with `seq`.
    pub tails: Vec<(usize, Vec<usize>)>,
    /// `(edge, k)`: the part on `edge` has at least `k` vertices.
    pub min_len: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct ClusterRun {
    pub solutions: Vec<ClusterSolution>,
    /// Complete (partition, ordering) pairs inspected.
    pub configurations: u64,
}

/// `|E(C)|^|S| * |S|! * (|V(C)| - 2)!`.
pub fn cluster_bound(s: usize, cp: &PatternGraph) -> BigInt {
    let fact = |k: usize| (1..=k).fold(BigInt::one(), |a, x| a * BigInt::from(x));
    num::pow(BigInt::from(cp.h()), s) * fact(s) * fact(cp.n().saturating_sub(2))
}

/// Every solution of `CLUSTER(S, C)` found by the configuration
/// enumeration: at most one per (partition, ordering).
pub fn cluster_solutions(g: &Graph, s: &[usize], cp: &PatternGraph, c: u32, budget: &mut Budget) -> Result<Vec<ClusterSolution>> {
    Ok(cluster_solutions_with(g, s, cp, c, &ClusterConstraints::default(), budget)?.solutions)
}

pub fn cluster_solutions_with(
    g: &Graph,
    s: &[usize],
    cp: &PatternGraph,
    c: u32,
    cons: &ClusterConstraints,
    budget: &mut Budget,
) -> Result<ClusterRun> {
    let m = cp.h();
    if m == 0 {
        return Ok(ClusterRun { solutions: vec![], configurations: 0 });
    }
    let mut tails = vec![Vec::new(); m];
    for (e, t) in &cons.tails {
        tails[*e] = t.clone();
    }
    let mut min_len = vec![0; m];
    for &(e, k) in &cons.min_len {
        min_len[e] = min_len[e].max(k);
    }
    let tail_vs: HashSet<usize> = tails.iter().flatten().copied().collect();
    if !tail_vs.iter().all(|v| s.contains(v)) {
        return Err(Error::Param("tail vertices must belong to S".into()));
    }
    let free: Vec<usize> = s.iter().copied().filter(|v| !tail_vs.contains(v)).collect();
    let mut diam = 1u32;
    for &u in s {
        for &v in s {
            diam = diam.max(g.dist(u, v));
        }
    }
    let forest = is_forest(cp);
    let mut toward = vec![vec![None; m]; m];
    if forest {
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    let ps = simple_paths(cp, cp.edges[i].0, cp.edges[j].0);
                    toward[i][j] = ps.first().map(|p| !p.contains(&i));
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&e| tails[e].is_empty());
    let mut en = Enumerator {
        g,
        cp,
        c,
        forest,
        toward,
        order,
        tails,
        min_len,
        used: vec![false; free.len()],
        free,
        parts: vec![Vec::new(); m],
        pos: vec![Vec::new(); m],
        w0: rational::int(diam as i64),
        paths: BTreeMap::new(),
        out: Vec::new(),
        configurations: 0,
    };
    en.dfs(0, budget)?;
    Ok(ClusterRun { solutions: en.out, configurations: en.configurations })
}

fn is_forest(p: &PatternGraph) -> bool {
    let mut comp: Vec<usize> = (0..p.n()).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for &(a, b) in &p.edges {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        if ra == rb {
            return false;
        }
        comp[ra] = rb;
    }
    true
}

/// Simple paths between two vertices of a pattern, as edge-id lists. The
/// empty path is the only one from a vertex to itself.
pub fn simple_paths(p: &PatternGraph, a: usize, b: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if a == b {
        out.push(Vec::new());
        return out;
    }
    let mut on = vec![false; p.n()];
    let mut stack = Vec::new();
    fn walk(p: &PatternGraph, x: usize, b: usize, on: &mut [bool], stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if x == b {
            out.push(stack.clone());
            return;
        }
        on[x] = true;
        for e in p.incident(x) {
            let (u, v) = p.edges[e];
            if u == v {
                continue;
            }
            let y = if u == x { v } else { u };
            if !on[y] {
                stack.push(e);
                walk(p, y, b, on, stack, out);
                stack.pop();
            }
        }
        on[x] = false;
    }
    walk(p, a, b, &mut on, &mut stack, &mut out);
    out
}

struct Enumerator<'a> {
    g: &'a Graph,
    cp: &'a PatternGraph,
    c: u32,
    forest: bool,
    /// For edges `i`, `j` of one tree: whether the tree path from `j`
    /// reaches `i` at its first endpoint.
    toward: Vec<Vec<Option<bool>>>,
    /// Edge order of the enumeration: edges with a fixed tail first.
    order: Vec<usize>,
    tails: Vec<Vec<usize>>,
    min_len: Vec<usize>,
    free: Vec<usize>,
    used: Vec<bool>,
    parts: Vec<Vec<usize>>,
    pos: Vec<Vec<i64>>,
    w0: Rat,
    paths: BTreeMap<(usize, usize), Vec<Vec<usize>>>,
    out: Vec<ClusterSolution>,
    configurations: u64,
}

/// Linear form over the `2|E(C)|` offset variables plus a constant.
#[derive(Clone)]
struct Form {
    coef: Vec<i64>,
    konst: Rat,
}

impl Form {
    fn zero(vars: usize) -> Self {
        Form { coef: vec![0; vars], konst: Rat::zero() }
    }

    fn minus(&self, o: &Form) -> Form {
        Form { coef: self.coef.iter().zip(&o.coef).map(|(a, b)| a - b).collect(), konst: &self.konst - &o.konst }
    }

    fn row(&self) -> Vec<Rat> {
        self.coef.iter().map(|&x| rational::int(x)).collect()
    }
}

impl Enumerator<'_> {
    fn fits(&self, i: usize, v: usize) -> bool {
        if !self.forest {
            return true;
        }
        let g = self.g;
        let c = self.c as i64;
        let pv = match self.parts[i].last() {
            Some(&last) => self.pos[i].last().unwrap() + g.dist(last, v) as i64,
            None => 0,
        };
        let within = self.parts[i].iter().zip(&self.pos[i]).all(|(&u, &pu)| pv - pu <= c * g.dist(u, v) as i64);
        if !within {
            return false;
        }
        // two images on one edge see a third image elsewhere in the tree
        // through the same endpoint, so their host distances to it differ
        // by exactly their along-edge distance
        let ok = |first: bool, (pa, a): (i64, usize), (pb, b): (i64, usize), y: usize| {
            let (near, far) = if (pa < pb) == first { (a, b) } else { (b, a) };
            let gap = (pb - pa).abs();
            let (dn, df) = (g.dist(near, y) as i64, g.dist(far, y) as i64);
            df - c * dn <= gap && gap <= c * df - dn
        };
        for j in 0..self.parts.len() {
            if j == i || self.parts[j].is_empty() {
                continue;
            }
            if let Some(first) = self.toward[i][j] {
                for (&x, &px) in self.parts[i].iter().zip(&self.pos[i]) {
                    if !self.parts[j].iter().all(|&y| ok(first, (px, x), (pv, v), y)) {
                        return false;
                    }
                }
            }
            if let Some(first) = self.toward[j][i] {
                let part = &self.parts[j];
                for a in 0..part.len() {
                    for b in a + 1..part.len() {
                        if !ok(first, (self.pos[j][a], part[a]), (self.pos[j][b], part[b]), v) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn push(&mut self, i: usize, v: usize) {
        let p = match self.parts[i].last() {
            Some(&last) => self.pos[i].last().unwrap() + self.g.dist(last, v) as i64,
            None => 0,
        };
        self.parts[i].push(v);
        self.pos[i].push(p);
    }

    fn pop(&mut self, i: usize) {
        self.parts[i].pop();
        self.pos[i].pop();
    }

    fn dfs(&mut self, step: usize, budget: &mut Budget) -> Result<()> {
        budget.tick(|| format!("cluster configuration, step {step}"))?;
        let m = self.cp.h();
        if step == m {
            if self.used.iter().all(|&u| u) {
                self.configurations += 1;
                self.solve(budget)?;
            }
            return Ok(());
        }
        let i = self.order[step];
        if self.parts[i].len() + self.tails[i].len() >= self.min_len[i] && (step + 1 < m || self.used.iter().all(|&u| u)) {
            let before = self.parts[i].len();
            let tail = self.tails[i].clone();
            let mut ok = true;
            for &t in &tail {
                if !self.fits(i, t) {
                    ok = false;
                    break;
                }
                self.push(i, t);
            }
            if ok {
                self.dfs(step + 1, budget)?;
            }
            while self.parts[i].len() > before {
                self.pop(i);
            }
        }
        for k in 0..self.free.len() {
            if self.used[k] {
                continue;
            }
            let v = self.free[k];
            if !self.fits(i, v) {
                continue;
            }
            self.used[k] = true;
            self.push(i, v);
            self.dfs(step, budget)?;
            self.pop(i);
            self.used[k] = false;
        }
        Ok(())
    }

    fn paths_between(&mut self, a: usize, b: usize) -> Vec<Vec<usize>> {
        let cp = self.cp;
        self.paths.entry((a, b)).or_insert_with(|| simple_paths(cp, a, b)).clone()
    }

    fn port_vertex(&self, p: Port) -> usize {
        let part = &self.parts[p.edge];
        if p.last {
            *part.last().unwrap()
        } else {
            part[0]
        }
    }

    fn port_end(&self, p: Port) -> usize {
        let (a, b) = self.cp.edges[p.edge];
        if p.last {
            b
        } else {
            a
        }
    }

    fn olen(&self, i: usize) -> i64 {
        self.pos[i].last().copied().unwrap_or(0)
    }

    fn term(&self, path: &[usize]) -> Form {
        let vars = 2 * self.cp.h();
        let mut f = Form::zero(vars);
        for &e in path {
            if self.parts[e].is_empty() {
                f.konst += &self.w0;
            } else {
                f.coef[2 * e] += 1;
                f.coef[2 * e + 1] += 1;
                f.konst += rational::int(self.olen(e));
            }
        }
        f
    }

    fn omega(&self, p: Port) -> Form {
        let mut f = Form::zero(2 * self.cp.h());
        f.coef[2 * p.edge + p.last as usize] += 1;
        f
    }

    fn solve(&mut self, budget: &mut Budget) -> Result<()> {
        let m = self.cp.h();
        let vars = 2 * m;
        let mut base = Lp::new(vars);
        base.objective = vec![rational::one(); vars];
        let mut ports = Vec::new();
        for i in 0..m {
            if self.parts[i].is_empty() {
                for k in 0..2 {
                    let mut row = vec![Rat::zero(); vars];
                    row[2 * i + k] = rational::one();
                    base.add(row, Rel::Eq, Rat::zero());
                }
                continue;
            }
            ports.push(Port { edge: i, last: false });
            ports.push(Port { edge: i, last: true });
            if self.parts[i].len() >= 2 {
                // along-edge distance of the two ends is its own geodesic
                let (x, y) = (self.parts[i][0], *self.parts[i].last().unwrap());
                let (a, b) = self.cp.edges[i];
                let own = self.omega(Port { edge: i, last: false });
                let own = Form {
                    coef: own.coef.iter().zip(&self.omega(Port { edge: i, last: true }).coef).map(|(p, q)| p + q).collect(),
                    konst: Rat::zero(),
                };
                base.add(own.row(), Rel::Ge, rational::int(self.g.dist(x, y) as i64 - self.olen(i)));
                for p in self.paths_between(a, b) {
                    if p.contains(&i) {
                        continue;
                    }
                    let t = self.term(&p);
                    let lhs = Form { coef: own.coef.iter().zip(&t.coef).map(|(p, q)| p + q).collect(), konst: t.konst };
                    base.add(lhs.row(), Rel::Ge, rational::int(self.olen(i)) - &lhs.konst);
                }
            }
        }
        let mut pairs = Vec::new();
        for (a, &p) in ports.iter().enumerate() {
            for &q in &ports[a + 1..] {
                if p.edge == q.edge {
                    continue;
                }
                let cands = self.paths_between(self.port_end(p), self.port_end(q));
                if cands.is_empty() {
                    return Ok(());
                }
                pairs.push((p, q, cands));
            }
        }
        let bases: Vec<usize> = pairs.iter().map(|x| x.2.len()).collect();
        let mut choice = vec![0usize; pairs.len()];
        let mut found: Vec<(Rat, Vec<Rat>, Vec<usize>)> = Vec::new();
        loop {
            budget.tick(|| "cluster path choice".into())?;
            let mut lp = base.clone();
            for (k, (p, q, cands)) in pairs.iter().enumerate() {
                let (x, y) = (self.port_vertex(*p), self.port_vertex(*q));
                let chosen = self.term(&cands[choice[k]]);
                let mut ell = chosen.clone();
                for (t, (a, b)) in ell.coef.iter_mut().zip(self.omega(*p).coef.iter().zip(&self.omega(*q).coef)) {
                    *t += a + b;
                }
                lp.add(ell.row(), Rel::Ge, rational::int(self.g.dist(x, y) as i64) - &ell.konst);
                for (j, other) in cands.iter().enumerate() {
                    if j != choice[k] {
                        let diff = self.term(other).minus(&chosen);
                        lp.add(diff.row(), Rel::Ge, -diff.konst.clone());
                    }
                }
            }
            if let LpOutcome::Optimal { x, value } = lp.solve() {
                found.push((value, x, choice.clone()));
            }
            if !odometer(&mut choice, &bases) {
                break;
            }
        }
        found.sort_by(|a, b| a.0.cmp(&b.0));
        for (value, x, choice) in found {
            let paths = pairs.iter().zip(&choice).map(|((p, q, c), &k)| (*p, *q, c[k].clone())).collect();
            if let Some(sol) = self.build(value, x, paths) {
                if self.verify(&sol) {
                    self.out.push(sol);
                    break;
                }
            }
        }
        Ok(())
    }

    fn build(&self, objective: Rat, x: Vec<Rat>, paths: Vec<(Port, Port, Vec<usize>)>) -> Option<ClusterSolution> {
        let m = self.cp.h();
        let alpha: Vec<Rat> = (0..m).map(|i| x[2 * i].clone()).collect();
        let beta: Vec<Rat> = (0..m).map(|i| x[2 * i + 1].clone()).collect();
        let mut lengths = Vec::with_capacity(m);
        let mut points = Vec::with_capacity(m);
        let mut placement = Vec::new();
        for i in 0..m {
            if self.parts[i].is_empty() {
                lengths.push(self.w0.clone());
                points.push(Vec::new());
                continue;
            }
            let len = &alpha[i] + rational::int(self.olen(i)) + &beta[i];
            if !len.is_positive() {
                return None;
            }
            let (a, b) = self.cp.edges[i];
            let mut pts = Vec::new();
            for (off, v) in offsets(self.g, &alpha[i], &self.parts[i]) {
                let p = if off.is_zero() {
                    Point::Vertex(a)
                } else if off == len {
                    Point::Vertex(b)
                } else {
                    pts.push(off.clone());
                    Point::Edge(i, off)
                };
                placement.push((v, p));
            }
            lengths.push(len);
            points.push(pts);
        }
        let host = Host::new(self.cp.clone(), lengths, points).ok()?;
        let config = ClusterConfiguration { parts: self.parts.clone(), paths };
        Some(ClusterSolution { config, alpha, beta, objective, host, placement })
    }

    fn verify(&self, sol: &ClusterSolution) -> bool {
        verify_cluster(self.g, sol, self.c)
    }
}

/// Solution conditions: pairwise non-contracting and `c`-bounded, and
/// consecutive pairs tight.
pub fn verify_cluster(g: &Graph, sol: &ClusterSolution, c: u32) -> bool {
    let metric = sol.host.metric();
    let pl = &sol.placement;
    for (i, (u, pu)) in pl.iter().enumerate() {
        for (v, pv) in &pl[i + 1..] {
            let Some(dh) = metric.dist(pu, pv) else { return false };
            let d = rational::int(g.dist(*u, *v) as i64);
            if dh < d || dh > &d * rational::int(c as i64) {
                return false;
            }
        }
    }
    let at: BTreeMap<usize, &Point> = pl.iter().map(|(v, p)| (*v, p)).collect();
    for part in &sol.config.parts {
        for w in part.windows(2) {
            let dh = metric.dist(at[&w[0]], at[&w[1]]);
            if dh != Some(rational::int(g.dist(w[0], w[1]) as i64)) {
                return false;
            }
        }
    }
    true
}

fn odometer(digits: &mut [usize], base: &[usize]) -> bool {
    for i in 0..digits.len() {
        digits[i] += 1;
        if digits[i] < base[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

// ---------------------------------------------------------------- clusters of H'

/// A component of the short edges of a quasi-subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoringCluster {
    pub vertices: Vec<usize>,
    pub short_edges: Vec<usize>,
}

impl BoringCluster {
    pub fn is_trivial(&self) -> bool {
        self.vertices.len() == 1 && self.short_edges.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ChainEnd {
    /// The chain stops at a single leaf vertex.
    Leaf(usize),
    /// The chain stops in a cluster with short edges.
    Cluster(BoringCluster),
    /// The chain reaches interesting cluster `cluster` through the
    /// endpoint `side` of its last edge.
    Interesting { cluster: usize, side: usize },
}

/// A path cluster read from its start: long edges with the side each is
/// entered from, and the boring clusters between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathCluster {
    pub edges: Vec<(usize, usize)>,
    pub between: Vec<BoringCluster>,
    pub end: ChainEnd,
}

#[derive(Debug, Clone)]
struct ClusterInfo {
    cluster: BoringCluster,
    /// Long edge ends `(edge, side)` at the cluster.
    ends: Vec<(usize, usize)>,
}

fn end_vertex(hq: &PatternGraph, (e, side): (usize, usize)) -> usize {
    if side == 0 {
        hq.edges[e].0
    } else {
        hq.edges[e].1
    }
}

fn clusters_of(hq: &PatternGraph, short: &[bool]) -> (Vec<usize>, Vec<ClusterInfo>) {
    let n = hq.n();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for (e, &(a, b)) in hq.edges.iter().enumerate() {
        if short[e] {
            let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
            comp[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut id = vec![usize::MAX; n];
    let mut list: Vec<ClusterInfo> = Vec::new();
    for v in 0..n {
        let r = find(&mut comp, v);
        if id[r] == usize::MAX {
            id[r] = list.len();
            list.push(ClusterInfo { cluster: BoringCluster { vertices: vec![], short_edges: vec![] }, ends: vec![] });
        }
        id[v] = id[r];
        list[id[v]].cluster.vertices.push(v);
    }
    for (e, &(a, b)) in hq.edges.iter().enumerate() {
        if short[e] {
            list[id[a]].cluster.short_edges.push(e);
        } else {
            list[id[a]].ends.push((e, 0));
            list[id[b]].ends.push((e, 1));
        }
    }
    (id, list)
}

fn chains_of(hq: &PatternGraph, id: &[usize], list: &[ClusterInfo]) -> Vec<(usize, (usize, usize), PathCluster)> {
    let interesting = |x: usize| list[x].ends.len() >= 3;
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    let mut out = Vec::new();
    for x in 0..list.len() {
        if !interesting(x) {
            continue;
        }
        for &start in &list[x].ends {
            if !used.insert(start) {
                continue;
            }
            let mut edges = vec![start];
            let mut between = Vec::new();
            let end = loop {
                let (e, s) = *edges.last().unwrap();
                let other = (e, 1 - s);
                let y = id[end_vertex(hq, other)];
                if interesting(y) {
                    used.insert(other);
                    break ChainEnd::Interesting { cluster: y, side: other.1 };
                }
                let mut rest = list[y].ends.clone();
                if let Some(k) = rest.iter().position(|&z| z == other) {
                    rest.remove(k);
                }
                match rest.first() {
                    None => {
                        let bc = list[y].cluster.clone();
                        break if bc.is_trivial() { ChainEnd::Leaf(bc.vertices[0]) } else { ChainEnd::Cluster(bc) };
                    }
                    Some(&next) => {
                        between.push(list[y].cluster.clone());
                        edges.push(next);
                    }
                }
            };
            out.push((x, start, PathCluster { edges, between, end }));
        }
    }
    out
}

/// A cluster with its long edges cut to pendant edges, as the input `C` of
/// a cluster call.
#[derive(Debug, Clone)]
struct LocalPattern {
    pattern: PatternGraph,
    /// H' edge of each local short edge, in local edge order.
    short: Vec<usize>,
    /// Long edge end of each pendant; pendant `k` is local edge
    /// `short.len() + k`, oriented away from the cluster.
    pendants: Vec<(usize, usize)>,
}

fn local_pattern(hq: &PatternGraph, bc: &BoringCluster, ends: &[(usize, usize)]) -> LocalPattern {
    let mut labels: Vec<String> = bc.vertices.iter().map(|&v| hq.vertices[v].clone()).collect();
    let at = |v: usize| bc.vertices.iter().position(|&x| x == v).unwrap();
    let mut edges: Vec<(usize, usize)> = bc.short_edges.iter().map(|&e| (at(hq.edges[e].0), at(hq.edges[e].1))).collect();
    for &(e, s) in ends {
        labels.push(format!("{}~{e}.{s}", hq.vertices[end_vertex(hq, (e, s))]));
        edges.push((at(end_vertex(hq, (e, s))), labels.len() - 1));
    }
    LocalPattern { pattern: PatternGraph::new(labels, edges), short: bc.short_edges.clone(), pendants: ends.to_vec() }
}

/// Piece of an assembled host: the full contents of one pattern edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Fill {
    pub edge: usize,
    pub length: Rat,
    /// `(offset from the edge's first endpoint, vertex)`.
    pub placed: Vec<(Rat, usize)>,
}

fn short_fills(g: &Graph, sol: &ClusterSolution, lp: &LocalPattern) -> Vec<Fill> {
    lp.short
        .iter()
        .enumerate()
        .map(|(j, &e)| Fill { edge: e, length: sol.host.lengths[j].clone(), placed: sol.part_offsets(g, j) })
        .collect()
}

/// Images along one long edge in traversal order, with the offset of the
/// first image from the entry end and of the exit end from the last image.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrackPiece {
    pub start: Option<Rat>,
    pub seq: Vec<usize>,
    pub end: Option<Rat>,
}

fn track_fill(g: &Graph, (edge, entry): (usize, usize), start: &Rat, seq: &[usize], end: &Rat) -> Fill {
    let offs = offsets(g, start, seq);
    let length = match offs.last() {
        Some((o, _)) => o + end,
        None => start + end,
    };
    let placed = offs.into_iter().map(|(o, v)| if entry == 0 { (o, v) } else { (&length - &o, v) }).collect();
    Fill { edge, length, placed }
}

/// Builds the host from one fill per pattern edge and checks the result is
/// a non-contracting `c`-embedding.
fn finish(g: &Graph, hq: &PatternGraph, fills: Vec<Fill>, c: u32) -> Option<(Embedding, DistortionReport)> {
    let h = hq.h();
    let mut by_edge: Vec<Option<Fill>> = vec![None; h];
    for f in fills {
        if by_edge[f.edge].is_some() {
            return None;
        }
        let e = f.edge;
        by_edge[e] = Some(f);
    }
    let mut image: Vec<Option<Point>> = vec![None; g.n()];
    let mut lengths = Vec::with_capacity(h);
    let mut points = Vec::with_capacity(h);
    for (e, f) in by_edge.into_iter().enumerate() {
        let f = f?;
        if !f.length.is_positive() {
            return None;
        }
        let (a, b) = hq.edges[e];
        let mut pts = Vec::new();
        for (o, v) in f.placed {
            let p = if o.is_zero() {
                Point::Vertex(a)
            } else if o == f.length {
                Point::Vertex(b)
            } else if o.is_positive() && o < f.length {
                pts.push(o.clone());
                Point::Edge(e, o)
            } else {
                return None;
            };
            match &image[v] {
                Some(q) if *q != p => return None,
                _ => image[v] = Some(p),
            }
        }
        pts.sort();
        pts.dedup();
        lengths.push(f.length);
        points.push(pts);
    }
    let image: Vec<Point> = image.into_iter().collect::<Option<_>>()?;
    let host = Host::new(hq.clone(), lengths, points).ok()?;
    let emb = Embedding::new(host, image).ok()?;
    let report = distortion(g, &emb).ok()?;
    (report.non_contracting && report.distortion <= rational::int(c as i64)).then_some((emb, report))
}

// ---------------------------------------------------------------- PATH

/// Output of the path sub-solver: one track per long edge of the chain
/// and the contents of the short edges of its clusters. The first track
/// excludes `S` and the last excludes `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathFragment {
    pub tracks: Vec<TrackPiece>,
    pub fills: Vec<Fill>,
    /// Vertices of `W` in the order they were placed.
    pub order: Vec<usize>,
}

/// A node of the succession graph: the window, every vertex placed so
/// far, the chain edge `r`, and whether edge `r` still holds only its
/// entry vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathState {
    pub window: Vec<usize>,
    pub placed: VertexSet,
    pub r: usize,
    pub fresh: bool,
}

#[derive(Debug, Clone)]
enum Move {
    Start,
    Append(usize),
    Junction,
    Cluster(Box<(ClusterSolution, LocalPattern)>),
    Close,
    Leaf,
}

struct PathSearch<'a> {
    g: &'a Graph,
    hq: &'a PatternGraph,
    p: &'a PathCluster,
    params: &'a FptParams,
    w: &'a VertexSet,
    /// `T` in traversal order.
    t_rev: Vec<usize>,
    in_t: VertexSet,
    zone: Vec<usize>,
    zl: VertexSet,
}

/// The vertices of `zone` whose `(4c^2+1)c`-ball passes the size test.
pub fn z_ell(g: &Graph, zone: &[usize], p: &FptParams) -> VertexSet {
    let r = p.zl_radius();
    let cap = p.zl_size();
    VertexSet::from_iter(g.n(), zone.iter().copied().filter(|&v| g.dist_row(v).iter().filter(|&&d| d <= r).count() <= cap))
}

impl PathSearch<'_> {
    fn c(&self) -> u32 {
        self.params.c
    }

    fn window_valid(&self, seq: &[usize]) -> bool {
        let g = self.g;
        let c = self.c();
        if seq.iter().any(|&v| !self.zl.contains(v)) {
            return false;
        }
        if seq.windows(2).any(|w| g.dist(w[0], w[1]) > c) {
            return false;
        }
        let pos: Vec<i64> = offsets(g, &Rat::zero(), seq).iter().map(|(o, _)| o.to_integer().try_into().unwrap_or(i64::MAX)).collect();
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                if pos[j] - pos[i] > c as i64 * g.dist(seq[i], seq[j]) as i64 {
                    return false;
                }
            }
        }
        self.mid_ball_ok(seq)
    }

    fn mid_ball_ok(&self, seq: &[usize]) -> bool {
        if seq.len() != self.params.window {
            return true;
        }
        let mid = seq[seq.len() / 2];
        let row = self.g.dist_row(mid);
        self.zone.iter().all(|&u| row[u] > self.c() || seq.contains(&u))
    }

    /// The window after placing `x`, if every window condition holds.
    fn advance(&self, window: &[usize], placed: &VertexSet, x: usize) -> Option<Vec<usize>> {
        let g = self.g;
        let c = self.c() as i64;
        let last = *window.last()?;
        if g.dist(last, x) as i64 > c {
            return None;
        }
        let mut pos = Vec::with_capacity(window.len());
        let mut acc = 0i64;
        for (i, &v) in window.iter().enumerate() {
            if i > 0 {
                acc += g.dist(window[i - 1], v) as i64;
            }
            pos.push(acc);
        }
        let px = acc + g.dist(last, x) as i64;
        if window.iter().zip(&pos).any(|(&y, &py)| px - py > c * g.dist(y, x) as i64) {
            return None;
        }
        let mut next: Vec<usize> = window.to_vec();
        if window.len() == self.params.window {
            let y0 = window[0];
            let open = g.neighbors(y0).iter().any(|&z| z != x && (self.w.contains(z) || self.in_t.contains(z)) && !placed.contains(z));
            if open {
                return None;
            }
            next.remove(0);
        }
        next.push(x);
        self.mid_ball_ok(&next).then_some(next)
    }

    fn close_ok(&self, st: &PathState) -> bool {
        let mut window = st.window.clone();
        let mut placed = st.placed.clone();
        for &x in &self.t_rev {
            match self.advance(&window, &placed, x) {
                Some(next) => {
                    window = next;
                    placed.insert(x);
                }
                None => return false,
            }
        }
        true
    }

    fn transitions(
        &self,
        st: &PathState,
        bc: &BoringCluster,
        out_end: Option<(usize, usize)>,
        budget: &mut Budget,
    ) -> Result<Vec<(ClusterSolution, LocalPattern, Vec<usize>)>> {
        let g = self.g;
        let (e, s) = self.p.edges[st.r];
        let mut ends = vec![(e, 1 - s)];
        ends.extend(out_end);
        let lp = local_pattern(self.hq, bc, &ends);
        let pin = lp.short.len();
        let mut s_r = st.window.clone();
        for x in self.w.iter() {
            if !st.placed.contains(x) && st.window.iter().any(|&y| g.dist(x, y) as u64 <= self.params.delta) {
                s_r.push(x);
            }
        }
        let mut cons = ClusterConstraints { tails: vec![(pin, st.window.iter().rev().copied().collect())], min_len: vec![] };
        if out_end.is_some() {
            cons.min_len.push((pin + 1, self.params.window));
        }
        let run = cluster_solutions_with(g, &s_r, &lp.pattern, self.c(), &cons, budget)?;
        Ok(run.solutions.into_iter().map(|sol| (sol, lp.clone(), s_r.clone())).collect())
    }

    fn run(&self, s: &[usize], budget: &mut Budget) -> Result<Option<PathFragment>> {
        let n = self.g.n();
        let mut placed = VertexSet::new(n);
        for &v in s {
            placed.insert(v);
        }
        let init = PathState { window: s.to_vec(), placed, r: 0, fresh: false };
        let mut nodes: Vec<(usize, Move)> = vec![(0, Move::Start)];
        let mut seen: HashSet<PathState> = HashSet::new();
        let mut stack = vec![(0usize, init)];
        let last_edge = self.p.edges.len() - 1;
        while let Some((id, st)) = stack.pop() {
            budget.tick(|| format!("path state on chain edge {}", st.r))?;
            if !seen.insert(st.clone()) {
                continue;
            }
            let all_w = self.w.is_subset(&st.placed);
            if st.r == last_edge && !st.fresh && all_w {
                match &self.p.end {
                    ChainEnd::Leaf(_) => {
                        nodes.push((id, Move::Leaf));
                        return Ok(Some(self.build(&nodes, nodes.len() - 1, s)));
                    }
                    ChainEnd::Interesting { .. } if self.close_ok(&st) => {
                        nodes.push((id, Move::Close));
                        return Ok(Some(self.build(&nodes, nodes.len() - 1, s)));
                    }
                    _ => {}
                }
            }
            let mut children: Vec<(Move, PathState)> = Vec::new();
            for x in self.w.iter() {
                if st.placed.contains(x) || !self.zl.contains(x) {
                    continue;
                }
                if let Some(window) = self.advance(&st.window, &st.placed, x) {
                    let mut placed = st.placed.clone();
                    placed.insert(x);
                    children.push((Move::Append(x), PathState { window, placed, r: st.r, fresh: false }));
                }
            }
            if !st.fresh && st.r < last_edge {
                let bc = &self.p.between[st.r];
                if bc.is_trivial() {
                    children.push((Move::Junction, PathState { r: st.r + 1, fresh: true, ..st.clone() }));
                } else {
                    let out_end = self.p.edges[st.r + 1];
                    for (sol, lp, s_r) in self.transitions(&st, bc, Some(out_end), budget)? {
                        let part = &sol.config.parts[lp.short.len() + 1];
                        let window = part[part.len() - self.params.window..].to_vec();
                        let mut placed = st.placed.clone();
                        s_r.iter().for_each(|&v| placed.insert(v));
                        children.push((Move::Cluster(Box::new((sol, lp))), PathState { window, placed, r: st.r + 1, fresh: false }));
                    }
                }
            }
            if !st.fresh && st.r == last_edge {
                if let ChainEnd::Cluster(bc) = &self.p.end {
                    for (sol, lp, s_r) in self.transitions(&st, bc, None, budget)? {
                        let mut placed = st.placed.clone();
                        s_r.iter().for_each(|&v| placed.insert(v));
                        if self.w.is_subset(&placed) {
                            nodes.push((id, Move::Cluster(Box::new((sol, lp)))));
                            return Ok(Some(self.build(&nodes, nodes.len() - 1, s)));
                        }
                    }
                }
            }
            for (mv, child) in children.into_iter().rev() {
                nodes.push((id, mv));
                stack.push((nodes.len() - 1, child));
            }
        }
        Ok(None)
    }

    fn build(&self, nodes: &[(usize, Move)], leaf: usize, s: &[usize]) -> PathFragment {
        let mut moves = Vec::new();
        let mut at = leaf;
        while at != 0 {
            moves.push(nodes[at].1.clone());
            at = nodes[at].0;
        }
        moves.reverse();
        let k = self.params.window;
        let mut tracks = vec![TrackPiece::default(); self.p.edges.len()];
        let mut fills = Vec::new();
        let mut order = Vec::new();
        let mut r = 0;
        let mut last = *s.last().unwrap();
        for mv in moves {
            match mv {
                Move::Start | Move::Close => {}
                Move::Append(x) => {
                    tracks[r].seq.push(x);
                    order.push(x);
                    last = x;
                }
                Move::Junction => {
                    tracks[r].end = Some(Rat::zero());
                    r += 1;
                    tracks[r].start = Some(Rat::zero());
                    tracks[r].seq.push(last);
                }
                Move::Leaf => tracks[r].end = Some(Rat::zero()),
                Move::Cluster(b) => {
                    let (sol, lp) = *b;
                    let pin = lp.short.len();
                    let part_in = &sol.config.parts[pin];
                    let inner: Vec<usize> = part_in.iter().rev().skip(k).copied().collect();
                    order.extend(&inner);
                    tracks[r].seq.extend(inner);
                    tracks[r].end = Some(sol.alpha[pin].clone());
                    for f in short_fills(self.g, &sol, &lp) {
                        order.extend(f.placed.iter().map(|x| x.1));
                        fills.push(f);
                    }
                    if lp.pendants.len() == 2 {
                        r += 1;
                        let part_out = sol.config.parts[pin + 1].clone();
                        order.extend(&part_out);
                        last = *part_out.last().unwrap();
                        tracks[r].start = Some(sol.alpha[pin + 1].clone());
                        tracks[r].seq = part_out;
                    }
                }
            }
        }
        PathFragment { tracks, fills, order }
    }
}

/// PATH: extends the window `S` through `W` along the chain `p`, ending at
/// the leaf, inside the terminal cluster, or at the window `T` (given from
/// the far cluster outward). `None` when `S` or `T` is not a feasible
/// window or no terminal state is reachable.
#[allow(clippy::too_many_arguments)]
pub fn path_embed(
    g: &Graph,
    hq: &PatternGraph,
    w: &VertexSet,
    p: &PathCluster,
    s: &[usize],
    t: Option<&[usize]>,
    params: &FptParams,
    budget: &mut Budget,
) -> Result<Option<PathFragment>> {
    let k = params.window;
    if p.edges.is_empty() || p.between.len() + 1 != p.edges.len() {
        return Err(Error::Param("malformed path cluster".into()));
    }
    if s.len() != k || t.is_some_and(|t| t.len() != k) {
        return Ok(None);
    }
    let t = t.unwrap_or(&[]);
    if s.iter().chain(t).any(|&v| w.contains(v)) || s.iter().any(|v| t.contains(v)) {
        return Err(Error::Param("S and T must be disjoint from W and from each other".into()));
    }
    if matches!(p.end, ChainEnd::Interesting { .. }) == t.is_empty() {
        return Err(Error::Param("T is required exactly when the chain ends at an interesting cluster".into()));
    }
    let zone: Vec<usize> = w.iter().chain(s.iter().copied()).chain(t.iter().copied()).collect();
    let search = PathSearch {
        g,
        hq,
        p,
        params,
        w,
        t_rev: t.iter().rev().copied().collect(),
        in_t: VertexSet::from_iter(g.n(), t.iter().copied()),
        zl: z_ell(g, &zone, params),
        zone,
    };
    if !search.window_valid(s) || (!t.is_empty() && !search.window_valid(&search.t_rev)) {
        return Ok(None);
    }
    search.run(s, budget)
}

// ---------------------------------------------------------------- sub-solvers for chains

/// A cyclic order whose consecutive gaps, closing gap included, are the
/// graph distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleEmbedding {
    pub order: Vec<usize>,
    pub positions: Vec<u64>,
    pub length: u64,
}

/// Exact search for a non-contracting `c`-embedding into a weighted cycle
/// with pushed consecutive weights. Orders with a gap above `c` are skipped:
/// such an embedding is improper and the line branch covers it.
pub fn cycle_embed_exact(g: &Graph, c: u32, budget: &mut Budget) -> Result<Option<CycleEmbedding>> {
    let n = g.n();
    if n < 3 {
        return Ok(None);
    }
    let mut order = vec![0usize];
    let mut pos = vec![0i64; n];
    let mut placed = vec![false; n];
    placed[0] = true;
    if cycle_dfs(g, c as i64, &mut order, &mut pos, &mut placed, budget)? {
        let length = (pos[*order.last().unwrap()] + g.dist(*order.last().unwrap(), 0) as i64) as u64;
        let positions = order.iter().map(|&v| pos[v] as u64).collect();
        return Ok(Some(CycleEmbedding { order, positions, length }));
    }
    Ok(None)
}

fn cycle_dfs(g: &Graph, c: i64, order: &mut Vec<usize>, pos: &mut [i64], placed: &mut [bool], budget: &mut Budget) -> Result<bool> {
    budget.tick(|| format!("cycle order of length {}", order.len()))?;
    let n = g.n();
    let last = *order.last().unwrap();
    if order.len() == n {
        let close = g.dist(last, order[0]) as i64;
        if close > c {
            return Ok(false);
        }
        let len = pos[last] + close;
        for u in 0..n {
            for v in u + 1..n {
                let d = (pos[u] - pos[v]).abs();
                let h = d.min(len - d);
                let dg = g.dist(u, v) as i64;
                if h < dg || (g.has_edge(u, v) && h > c) {
                    return Ok(false);
                }
            }
        }
        return Ok(true);
    }
    let rem = n - order.len() - 1;
    for x in 0..n {
        if placed[x] || g.dist(last, x) as i64 > c {
            continue;
        }
        let px = pos[last] + g.dist(last, x) as i64;
        let lower = px + if rem == 0 { g.dist(x, order[0]) as i64 } else { rem as i64 + 1 };
        let ok = g.neighbors(x).iter().filter(|&&u| placed[u]).all(|&u| {
            let d = px - pos[u];
            d <= c || lower - d <= c
        });
        if !ok {
            continue;
        }
        placed[x] = true;
        pos[x] = px;
        order.push(x);
        if cycle_dfs(g, c, order, pos, placed, budget)? {
            return Ok(true);
        }
        order.pop();
        placed[x] = false;
    }
    Ok(false)
}

/// Walks a connected pattern of maximum degree 2 from `start`, returning
/// the edges in order with the side each is entered from.
fn walk_chain(hq: &PatternGraph, start: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut used = vec![false; hq.h()];
    let mut cur = start;
    while let Some(e) = hq.incident(cur).into_iter().find(|&e| !used[e]) {
        used[e] = true;
        let (a, b) = hq.edges[e];
        let side = if a == cur { 0 } else { 1 };
        out.push((e, side));
        cur = if side == 0 { b } else { a };
    }
    out
}

/// Lays out a sequence of images (with positions) over the chain of
/// `hq`, branch vertices on the images at `anchor` indices.
fn chain_fills(chain: &[(usize, usize)], order: &[usize], pos: &[Rat], anchors: &[usize], total: &Rat) -> Vec<Fill> {
    let mut fills = Vec::new();
    for (k, &(e, side)) in chain.iter().enumerate() {
        let from = anchors[k];
        let to = anchors.get(k + 1).copied();
        let base = pos[from].clone();
        let end_pos = match to {
            Some(t) => pos[t].clone(),
            None => total.clone(),
        };
        let length = &end_pos - &base;
        let mut placed = Vec::new();
        let stop = to.unwrap_or(order.len());
        for i in from..stop {
            let o = &pos[i] - &base;
            placed.push(if side == 0 { (o.clone(), order[i]) } else { (&length - &o, order[i]) });
        }
        if let Some(t) = to {
            placed.push(if side == 0 { (length.clone(), order[t]) } else { (Rat::zero(), order[t]) });
        } else if anchors.len() == chain.len() {
            // closing edge of a cycle returns to the first image
            placed.push(if side == 0 { (length.clone(), order[0]) } else { (Rat::zero(), order[0]) });
        }
        fills.push(Fill { edge: e, length, placed });
    }
    fills
}

fn map_line(g: &Graph, le: &LineEmbedding, hq: &PatternGraph, c: u32) -> Option<(Embedding, DistortionReport)> {
    let n = g.n();
    let m = hq.h();
    if m == 0 || n < m + 1 {
        return None;
    }
    let start = (0..hq.n()).find(|&v| hq.degree(v) == 1)?;
    let chain = walk_chain(hq, start);
    let mut anchors: Vec<usize> = (0..m).collect();
    anchors.push(n - 1);
    let total = le.positions[n - 1].clone();
    finish(g, hq, chain_fills(&chain, &le.order, &le.positions, &anchors, &total), c)
}

fn map_cycle(g: &Graph, ce: &CycleEmbedding, hq: &PatternGraph, c: u32) -> Option<(Embedding, DistortionReport)> {
    let m = hq.h();
    if m == 0 || g.n() < m {
        return None;
    }
    let chain = walk_chain(hq, 0);
    let anchors: Vec<usize> = (0..m).collect();
    let pos: Vec<Rat> = ce.positions.iter().map(|&p| rational::int(p as i64)).collect();
    finish(g, hq, chain_fills(&chain, &ce.order, &pos, &anchors, &rational::int(ce.length as i64)), c)
}

/// The cyclic order as an embedding into a subdivided triangle, if it is
/// non-contracting.
pub fn cycle_to_embedding(g: &Graph, ce: &CycleEmbedding) -> Option<(Embedding, DistortionReport)> {
    map_cycle(g, ce, &PatternGraph::cycle(), u32::MAX)
}

// ---------------------------------------------------------------- driver

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Route {
    Line,
    Cycle,
    Bounded,
    General,
    Gadget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetMode {
    /// Never build the gadget; branches that need it make the search
    /// incomplete.
    Off,
    /// Build it only for branches without interesting clusters that are
    /// not a single chain.
    Auto,
    /// Decide through the gadget alone.
    Force,
}

#[derive(Debug, Clone)]
pub enum FptOutcome {
    Embedding { embedding: Embedding, report: DistortionReport, subpattern: PatternGraph, route: Route },
    No(String),
}

impl FptOutcome {
    pub fn is_embedding(&self) -> bool {
        matches!(self, FptOutcome::Embedding { .. })
    }
}

enum Branch {
    NoInterestingCluster,
    Done(Option<(Embedding, DistortionReport)>),
}

/// Exact decision with the gadget used where needed.
pub fn fpt_embed(g: &Graph, h: &PatternGraph, c: u32, budget: &mut Budget) -> Result<FptOutcome> {
    fpt_embed_with(g, h, c, GadgetMode::Auto, budget)
}

pub fn fpt_embed_with(g: &Graph, h: &PatternGraph, c: u32, mode: GadgetMode, budget: &mut Budget) -> Result<FptOutcome> {
    if c == 0 {
        return Err(Error::Param("c must be at least 1".into()));
    }
    if h.n() == 0 {
        return Err(Error::Param("empty pattern".into()));
    }
    if let Density::Reject { v, r, ball } = local_density_filter(g, h.h(), c) {
        return Ok(FptOutcome::No(format!("ball of radius {r} around {} has {ball} vertices", g.label(v))));
    }
    let n = g.n();
    if n == 1 {
        let pattern = PatternGraph::new(vec![h.vertices[0].clone()], vec![]);
        let host = Host::new(pattern.clone(), vec![], vec![])?;
        let embedding = Embedding::new(host, vec![Point::Vertex(0)])?;
        let report = distortion(g, &embedding)?;
        return Ok(FptOutcome::Embedding { embedding, report, subpattern: pattern, route: Route::Line });
    }
    if mode == GadgetMode::Force {
        return gadget_route(g, h, c, budget);
    }
    let mut line_cache: Option<Option<LineEmbedding>> = None;
    let mut cycle_cache: Option<Option<CycleEmbedding>> = None;
    let mut needs_gadget: Option<String> = None;
    for q in enumerate_quasi_subgraphs(h) {
        let hq = q.graph;
        let m = hq.h();
        if m == 0 {
            continue;
        }
        let found = if hq.is_path_like() {
            if line_cache.is_none() {
                line_cache = Some(line::line_embed_exact(g, c, budget)?);
            }
            line_cache.as_ref().unwrap().as_ref().and_then(|le| map_line(g, le, &hq, c)).map(|x| (x, Route::Line))
        } else if hq.is_cycle_like() {
            if cycle_cache.is_none() {
                cycle_cache = Some(cycle_embed_exact(g, c, budget)?);
            }
            cycle_cache.as_ref().unwrap().as_ref().and_then(|ce| map_cycle(g, ce, &hq, c)).map(|x| (x, Route::Cycle))
        } else {
            let mut hit = None;
            'sets: for size in 0..=m {
                for set in combinations(m, size) {
                    budget.tick(|| format!("short-edge set {set:?} of {}", hq.to_edge_list().trim()))?;
                    let mut short = vec![false; m];
                    set.iter().for_each(|&e| short[e] = true);
                    if size == m {
                        if let Some(x) = bounded_branch(g, &hq, c, budget)? {
                            hit = Some((x, Route::Bounded));
                            break 'sets;
                        }
                        continue;
                    }
                    let params = FptParams::new(c, &hq, h.h());
                    match general_branch(g, &hq, &short, &params, budget)? {
                        Branch::Done(Some(x)) => {
                            hit = Some((x, Route::General));
                            break 'sets;
                        }
                        Branch::Done(None) => {}
                        Branch::NoInterestingCluster => {
                            needs_gadget.get_or_insert_with(|| format!("short-edge set {set:?} of {}", hq.to_edge_list().trim()));
                        }
                    }
                }
            }
            hit
        };
        if let Some(((embedding, report), route)) = found {
            return Ok(FptOutcome::Embedding { embedding, report, subpattern: hq, route });
        }
    }
    if let Some(at) = needs_gadget {
        return match mode {
            GadgetMode::Off => Err(Error::Budget { budget: budget.cap, at: format!("{at} needs the gadget") }),
            _ => gadget_route(g, h, c, budget),
        };
    }
    Ok(FptOutcome::No("every branch exhausted".into()))
}

/// Every edge short: the whole graph is one cluster call.
fn bounded_branch(g: &Graph, hq: &PatternGraph, c: u32, budget: &mut Budget) -> Result<Option<(Embedding, DistortionReport)>> {
    let p = FptParams::new(c, hq, hq.h());
    if g.n() as u64 > hq.h() as u64 * p.short + hq.n() as u64 {
        return Ok(None);
    }
    let all: Vec<usize> = (0..g.n()).collect();
    let bc = BoringCluster { vertices: (0..hq.n()).collect(), short_edges: (0..hq.h()).collect() };
    let lp = local_pattern(hq, &bc, &[]);
    for sol in cluster_solutions(g, &all, &lp.pattern, c, budget)? {
        if let Some(x) = finish(g, hq, short_fills(g, &sol, &lp), c) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

fn general_branch(g: &Graph, hq: &PatternGraph, short: &[bool], params: &FptParams, budget: &mut Budget) -> Result<Branch> {
    let (id, list) = clusters_of(hq, short);
    let inter: Vec<usize> = (0..list.len()).filter(|&x| list[x].ends.len() >= 3).collect();
    if inter.is_empty() {
        return Ok(Branch::NoInterestingCluster);
    }
    let chains = chains_of(hq, &id, &list);
    let locals: Vec<LocalPattern> = inter.iter().map(|&x| local_pattern(hq, &list[x].cluster, &list[x].ends)).collect();
    let slot = |x: usize| inter.iter().position(|&y| y == x).unwrap();
    let pendant_of = |x: usize, end: (usize, usize)| {
        let lp = &locals[slot(x)];
        lp.short.len() + lp.pendants.iter().position(|&z| z == end).unwrap()
    };
    let iset = match delta_interesting_set(g, params, budget)? {
        Interesting::Set(s) => s.to_vec(),
        Interesting::TooMany { .. } => return Ok(Branch::Done(None)),
    };
    let need: usize = locals.iter().map(|lp| lp.pendants.len() * params.occupancy()).sum();
    let k = inter.len();
    for size in (need..=iset.len()).rev() {
        for pick in combinations(iset.len(), size) {
            let chosen: Vec<usize> = pick.iter().map(|&i| iset[i]).collect();
            let mut rest = VertexSet::full(g.n());
            chosen.iter().for_each(|&v| rest.remove(v));
            let comps = g.components_within(&rest);
            if comps.len() as u64 > params.component_cap || (chains.is_empty() && !comps.is_empty()) {
                continue;
            }
            let mut assign = vec![0usize; size];
            let bases = vec![k; size];
            loop {
                budget.tick(|| format!("assignment of {size} interesting vertices"))?;
                let mut groups = vec![Vec::new(); k];
                for (j, &v) in chosen.iter().enumerate() {
                    groups[assign[j]].push(v);
                }
                let mut sols = Vec::with_capacity(k);
                for (i, lp) in locals.iter().enumerate() {
                    let cons = ClusterConstraints {
                        tails: vec![],
                        min_len: (0..lp.pendants.len()).map(|j| (lp.short.len() + j, params.occupancy())).collect(),
                    };
                    let run = cluster_solutions_with(g, &groups[i], &lp.pattern, params.c, &cons, budget)?;
                    if run.solutions.is_empty() {
                        break;
                    }
                    sols.push(run.solutions);
                }
                if sols.len() == k {
                    let ctx = Combine { g, hq, params, chains: &chains, locals: &locals, comps: &comps };
                    let sb: Vec<usize> = sols.iter().map(Vec::len).collect();
                    let mut pick_sol = vec![0usize; k];
                    loop {
                        let chosen_sols: Vec<&ClusterSolution> = (0..k).map(|i| &sols[i][pick_sol[i]]).collect();
                        if let Some(x) = ctx.try_solutions(&chosen_sols, &slot, &pendant_of, budget)? {
                            return Ok(Branch::Done(Some(x)));
                        }
                        if !odometer(&mut pick_sol, &sb) {
                            break;
                        }
                    }
                }
                if !odometer(&mut assign, &bases) {
                    break;
                }
            }
        }
    }
    Ok(Branch::Done(None))
}

struct Combine<'a> {
    g: &'a Graph,
    hq: &'a PatternGraph,
    params: &'a FptParams,
    chains: &'a [(usize, (usize, usize), PathCluster)],
    locals: &'a [LocalPattern],
    comps: &'a [Vec<usize>],
}

impl Combine<'_> {
    fn try_solutions(
        &self,
        sols: &[&ClusterSolution],
        slot: &dyn Fn(usize) -> usize,
        pendant_of: &dyn Fn(usize, (usize, usize)) -> usize,
        budget: &mut Budget,
    ) -> Result<Option<(Embedding, DistortionReport)>> {
        let g = self.g;
        let kw = self.params.window;
        let p = self.chains.len();
        let mut base_fills = Vec::new();
        for (i, sol) in sols.iter().enumerate() {
            base_fills.extend(short_fills(g, sol, &self.locals[i]));
        }
        // windows: the outermost images on each pendant
        let mut heads = Vec::with_capacity(p);
        for (x, start, chain) in self.chains {
            let sx = slot(*x);
            let pe = pendant_of(*x, *start);
            let part = &sols[sx].config.parts[pe];
            let head = (sols[sx].alpha[pe].clone(), part.clone());
            let tail = match chain.end {
                ChainEnd::Interesting { cluster, side } => {
                    let last = chain.edges.last().unwrap().0;
                    let sy = slot(cluster);
                    let pe = pendant_of(cluster, (last, side));
                    Some((sols[sy].alpha[pe].clone(), sols[sy].config.parts[pe].clone()))
                }
                _ => None,
            };
            heads.push((head, tail));
        }
        let tc = self.comps.len();
        let mut assign = vec![0usize; tc];
        let bases = vec![p; tc];
        loop {
            budget.tick(|| "assignment of components to path clusters".into())?;
            let mut fills = base_fills.clone();
            let mut ok = true;
            for (j, (_, _, chain)) in self.chains.iter().enumerate() {
                let mut w = VertexSet::new(g.n());
                for (ci, comp) in self.comps.iter().enumerate() {
                    if assign[ci] == j {
                        comp.iter().for_each(|&v| w.insert(v));
                    }
                }
                let ((alpha, part), tail) = &heads[j];
                let s = &part[part.len() - kw..];
                let t = tail.as_ref().map(|(_, tp)| &tp[tp.len() - kw..]);
                let Some(frag) = path_embed(g, self.hq, &w, chain, s, t, self.params, budget)? else {
                    ok = false;
                    break;
                };
                let last = chain.edges.len() - 1;
                for (idx, tp) in frag.tracks.iter().enumerate() {
                    let mut seq = Vec::new();
                    let start = if idx == 0 {
                        seq.extend(part);
                        alpha.clone()
                    } else {
                        tp.start.clone().unwrap_or_default()
                    };
                    seq.extend(&tp.seq);
                    let end = match (idx == last, tail) {
                        (true, Some((a, tpart))) => {
                            seq.extend(tpart.iter().rev());
                            a.clone()
                        }
                        _ => tp.end.clone().unwrap_or_default(),
                    };
                    fills.push(track_fill(g, chain.edges[idx], &start, &seq, &end));
                }
                fills.extend(frag.fills);
            }
            if ok {
                if let Some(x) = finish(g, self.hq, fills, self.params.c) {
                    return Ok(Some(x));
                }
            }
            if !odometer(&mut assign, &bases) {
                break;
            }
        }
        Ok(None)
    }
}

// ---------------------------------------------------------------- gadget

/// How an edge of a gadget pattern relates to the original pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeOrigin {
    Whole(usize),
    /// Half `0` runs from the first endpoint to the subdivision vertex.
    Half(usize, usize),
    Clique,
    Attach,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GadgetVariant {
    pub pattern: PatternGraph,
    pub origin: Vec<EdgeOrigin>,
    /// Elements of `V(H) + E(H)` the clique attaches to; edges are
    /// numbered after the vertices.
    pub attach: [usize; 3],
    /// Subdivision vertex of each split edge.
    pub split_vertex: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone)]
pub struct Gadget {
    pub graph: Graph,
    pub k: usize,
    pub path_len: usize,
    /// Clique vertex carrying the three paths.
    pub hub: usize,
    pub anchors: [usize; 3],
    pub variants: Vec<GadgetVariant>,
}

/// `G + K_k` joined by three paths of length `16c^4 + 1` from one clique
/// vertex to the three lowest ids, and one pattern per 3-subset of
/// `V(H) + E(H)` with `K_k` attached through one vertex.
pub fn augment_with_clique_gadget(g: &Graph, h: &PatternGraph, c: u32) -> Result<Gadget> {
    let n = g.n();
    if n < 3 {
        return Err(Error::Param("the gadget needs at least three vertices".into()));
    }
    let k = 8 * c as usize * h.h();
    if k == 0 {
        return Err(Error::Param("the gadget needs a pattern with edges".into()));
    }
    let path_len = 16 * (c as usize).pow(4) + 1;
    let mut labels: Vec<String> = g.labels().to_vec();
    let mut edges = g.edges();
    let hub = n;
    for i in 0..k {
        labels.push(format!("#K{i}"));
    }
    for i in 0..k {
        for j in i + 1..k {
            edges.push((n + i, n + j));
        }
    }
    let anchors = [0, 1, 2];
    for (p, &a) in anchors.iter().enumerate() {
        let mut prev = hub;
        for s in 1..path_len {
            labels.push(format!("#P{p}.{s}"));
            let v = labels.len() - 1;
            edges.push((prev, v));
            prev = v;
        }
        edges.push((prev, a));
    }
    let graph = Graph::with_labels(labels, &edges)?;
    let elems = h.n() + h.h();
    let mut variants = Vec::new();
    for pick in combinations(elems, 3) {
        let attach = [pick[0], pick[1], pick[2]];
        let mut vs = h.vertices.clone();
        let mut es = Vec::new();
        let mut origin = Vec::new();
        let mut split_vertex = BTreeMap::new();
        for (e, &(a, b)) in h.edges.iter().enumerate() {
            if attach.contains(&(h.n() + e)) {
                vs.push(format!("#m{e}"));
                let m = vs.len() - 1;
                split_vertex.insert(e, m);
                es.push((a, m));
                origin.push(EdgeOrigin::Half(e, 0));
                es.push((m, b));
                origin.push(EdgeOrigin::Half(e, 1));
            } else {
                es.push((a, b));
                origin.push(EdgeOrigin::Whole(e));
            }
        }
        let q0 = vs.len();
        for i in 0..k {
            vs.push(format!("#q{i}"));
        }
        for i in 0..k {
            for j in i + 1..k {
                es.push((q0 + i, q0 + j));
                origin.push(EdgeOrigin::Clique);
            }
        }
        for &x in &attach {
            let target = if x < h.n() { x } else { split_vertex[&(x - h.n())] };
            es.push((q0, target));
            origin.push(EdgeOrigin::Attach);
        }
        variants.push(GadgetVariant { pattern: PatternGraph::new(vs, es), origin, attach, split_vertex });
    }
    Ok(Gadget { graph, k, path_len, hub, anchors, variants })
}

/// Restricts an embedding of the augmented graph to `G` on the original
/// pattern, or `None` when some vertex of `G` lands on the gadget.
fn restrict_gadget(g: &Graph, h: &PatternGraph, v: &GadgetVariant, emb: &Embedding) -> Option<Embedding> {
    let host = &emb.host;
    let mut lengths = Vec::with_capacity(h.h());
    let mut points = Vec::with_capacity(h.h());
    let mut halves: BTreeMap<usize, [usize; 2]> = BTreeMap::new();
    let mut whole: BTreeMap<usize, usize> = BTreeMap::new();
    for (f, o) in v.origin.iter().enumerate() {
        match *o {
            EdgeOrigin::Whole(e) => {
                whole.insert(e, f);
            }
            EdgeOrigin::Half(e, s) => halves.entry(e).or_insert([0, 0])[s] = f,
            _ => {}
        }
    }
    let mut shift: BTreeMap<usize, (usize, Rat)> = BTreeMap::new();
    for e in 0..h.h() {
        if let Some(&f) = whole.get(&e) {
            lengths.push(host.lengths[f].clone());
            points.push(host.points[f].clone());
            shift.insert(f, (e, Rat::zero()));
        } else {
            let [f1, f2] = halves[&e];
            let l1 = host.lengths[f1].clone();
            let mut pts = host.points[f1].clone();
            pts.push(l1.clone());
            pts.extend(host.points[f2].iter().map(|t| t + &l1));
            lengths.push(&l1 + &host.lengths[f2]);
            points.push(pts);
            shift.insert(f1, (e, Rat::zero()));
            shift.insert(f2, (e, l1));
        }
    }
    let mut image = Vec::with_capacity(g.n());
    for p in &emb.image[..g.n()] {
        image.push(match p {
            Point::Vertex(x) if *x < h.n() => Point::Vertex(*x),
            Point::Vertex(x) => {
                let (&e, _) = v.split_vertex.iter().find(|(_, &m)| m == *x)?;
                Point::Edge(e, host.lengths[halves[&e][0]].clone())
            }
            Point::Edge(f, t) => {
                let (e, off) = shift.get(f)?;
                Point::Edge(*e, off + t)
            }
        });
    }
    let host = Host::new(h.clone(), lengths, points).ok()?;
    Embedding::new(host, image).ok()
}

fn gadget_route(g: &Graph, h: &PatternGraph, c: u32, budget: &mut Budget) -> Result<FptOutcome> {
    let gadget = augment_with_clique_gadget(g, h, c)?;
    let gp = &gadget.graph;
    for v in &gadget.variants {
        let hk = &v.pattern;
        let free: Vec<usize> = (0..hk.h()).filter(|&f| matches!(v.origin[f], EdgeOrigin::Whole(_) | EdgeOrigin::Half(..))).collect();
        let params = FptParams::new(c, hk, hk.h());
        for size in 0..=free.len() {
            for set in combinations(free.len(), size) {
                let mut short: Vec<bool> = v.origin.iter().map(|o| *o == EdgeOrigin::Clique).collect();
                set.iter().for_each(|&i| short[free[i]] = true);
                let Branch::Done(Some((emb, _))) = general_branch(gp, hk, &short, &params, budget)? else { continue };
                let Some(restricted) = restrict_gadget(g, h, v, &emb) else { continue };
                let Ok(report) = distortion(g, &restricted) else { continue };
                if !report.non_contracting || report.distortion > rational::int(c as i64) {
                    continue;
                }
                let embedding = normalize_to_proper_pushing(g, &restricted)?;
                let report = distortion(g, &embedding)?;
                return Ok(FptOutcome::Embedding { embedding, report, subpattern: h.clone(), route: Route::Gadget });
            }
        }
    }
    Ok(FptOutcome::No("no gadget branch embeds".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

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
            let mut prev = 0;
            for s in 0..len {
                let v = 1 + l * len + s;
                e.push((prev, v));
                prev = v;
            }
        }
        graph(1 + legs * len, &e)
    }

    #[test]
    fn parameters() {
        let p = FptParams::new(1, &PatternGraph::line(), 1);
        assert_eq!((p.short, p.delta, p.window, p.interesting_cap, p.component_cap), (16, 9, 5, 72, 16));
        assert_eq!(p.occupancy(), 8);
        let p = FptParams::new(2, &PatternGraph::star(3), 3);
        assert_eq!((p.short, p.delta, p.window), (256, 130, 17));
    }

    #[test]
    fn alpha_interesting_examples() {
        let mut b = Budget::default();
        let g = path(9);
        for a in 0..5 {
            assert!(!is_alpha_interesting(&g, 4, a, 1, &mut b).unwrap());
        }
        let s = spider(3, 2);
        assert!(!is_alpha_interesting(&s, 0, 0, 1, &mut b).unwrap());
        assert!(is_alpha_interesting(&s, 0, 2, 1, &mut b).unwrap());
    }

    #[test]
    fn delta_interesting_examples() {
        let mut b = Budget::default();
        let p = FptParams::new(1, &PatternGraph::line(), 1);
        assert_eq!(delta_interesting_set(&path(12), &p, &mut b).unwrap(), Interesting::Set(VertexSet::new(12)));
        let p = FptParams::new(1, &PatternGraph::star(3), 3);
        match delta_interesting_set(&spider(3, 12), &p, &mut b).unwrap() {
            Interesting::Set(s) => {
                assert!(s.contains(0));
                assert!(s.len() as u64 <= p.interesting_cap);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cluster_hand_example() {
        let g = path(3);
        let mut b = Budget::default();
        let sols = cluster_solutions(&g, &[0, 1, 2], &PatternGraph::line(), 1, &mut b).unwrap();
        let sol = sols.iter().find(|s| s.config.parts[0] == vec![0, 1, 2]).unwrap();
        assert_eq!((sol.alpha[0].clone(), sol.beta[0].clone()), (int(0), int(0)));
        assert_eq!(sol.host.lengths, vec![int(2)]);
        assert_eq!(sol.host.points, vec![vec![int(1)]]);
        let at: BTreeMap<usize, Point> = sol.placement.iter().cloned().collect();
        assert_eq!(at[&0], Point::Vertex(0));
        assert_eq!(at[&2], Point::Vertex(1));
        assert_eq!(at[&1], Point::Edge(0, int(1)));
    }

    #[test]
    fn cluster_empty_and_bound() {
        let g = path(3);
        let mut b = Budget::default();
        let sols = cluster_solutions(&g, &[], &PatternGraph::star(2), 1, &mut b).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].alpha.iter().chain(&sols[0].beta).all(|x| x.is_zero()));
        assert!(sols[0].host.points.iter().all(Vec::is_empty));
        let star = PatternGraph::star(3);
        let s = spider(3, 1);
        let sols = cluster_solutions(&s, &[0, 1, 2, 3], &star, 1, &mut b).unwrap();
        assert!(!sols.is_empty());
        assert!(BigInt::from(sols.len()) <= cluster_bound(4, &star));
        assert!(sols.iter().all(|x| verify_cluster(&s, x, 1)));
    }

    #[test]
    fn simple_paths_in_triangle() {
        let k3 = PatternGraph::cycle();
        assert_eq!(simple_paths(&k3, 0, 1).len(), 2);
        assert_eq!(simple_paths(&k3, 2, 2), vec![Vec::<usize>::new()]);
    }

    fn one_edge_chain() -> PathCluster {
        PathCluster { edges: vec![(0, 0)], between: vec![], end: ChainEnd::Leaf(1) }
    }

    #[test]
    fn path_on_long_path() {
        let g = path(30);
        let p = FptParams::new(1, &PatternGraph::line(), 1);
        let w = VertexSet::from_iter(30, 5..20);
        let s: Vec<usize> = (0..5).collect();
        let mut b = Budget::default();
        let frag = path_embed(&g, &PatternGraph::line(), &w, &one_edge_chain(), &s, None, &p, &mut b).unwrap().unwrap();
        assert_eq!(frag.order, (5..20).collect::<Vec<_>>());
        assert_eq!(frag.tracks[0].end, Some(int(0)));
    }

    #[test]
    fn path_rejects_gappy_window() {
        let g = path(30);
        let p = FptParams::new(1, &PatternGraph::line(), 1);
        let w = VertexSet::from_iter(30, 10..20);
        let s = vec![0, 1, 2, 3, 5];
        let mut b = Budget::default();
        assert!(path_embed(&g, &PatternGraph::line(), &w, &one_edge_chain(), &s, None, &p, &mut b).unwrap().is_none());
    }

    #[test]
    fn cycle_solver() {
        let mut b = Budget::default();
        let ce = cycle_embed_exact(&cycle(5), 1, &mut b).unwrap().unwrap();
        assert_eq!(ce.length, 5);
        assert!(cycle_embed_exact(&spider(3, 1), 2, &mut b).unwrap().is_none());
    }

    #[test]
    fn fpt_examples() {
        let mut b = Budget::default();
        match fpt_embed(&path(6), &PatternGraph::line(), 1, &mut b).unwrap() {
            FptOutcome::Embedding { report, .. } => assert_eq!(report.distortion, int(1)),
            o => panic!("{o:?}"),
        }
        let k13 = spider(3, 1);
        assert!(!fpt_embed(&k13, &PatternGraph::line(), 2, &mut b).unwrap().is_embedding());
        assert!(fpt_embed(&k13, &PatternGraph::line(), 3, &mut b).unwrap().is_embedding());
        match fpt_embed(&cycle(8), &PatternGraph::cycle(), 1, &mut b).unwrap() {
            FptOutcome::Embedding { report, route, .. } => {
                assert_eq!(report.distortion, int(1));
                assert_eq!(route, Route::Cycle);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn path_closes_on_far_window() {
        let g = path(30);
        let p = FptParams::new(1, &PatternGraph::line(), 1);
        let w = VertexSet::from_iter(30, 5..25);
        let s: Vec<usize> = (0..5).collect();
        let t: Vec<usize> = (25..30).rev().collect();
        let chain = PathCluster { edges: vec![(0, 0)], between: vec![], end: ChainEnd::Interesting { cluster: 0, side: 1 } };
        let mut b = Budget::default();
        let frag = path_embed(&g, &PatternGraph::line(), &w, &chain, &s, Some(&t), &p, &mut b).unwrap().unwrap();
        assert_eq!(frag.order, (5..25).collect::<Vec<_>>());
        let bad: Vec<usize> = vec![29, 28, 27, 25, 26];
        assert!(path_embed(&g, &PatternGraph::line(), &w, &chain, &s, Some(&bad), &p, &mut b).unwrap().is_none());
    }

    #[test]
    fn path_crosses_boring_cluster() {
        let hq = PatternGraph::new((0..4).map(|i| i.to_string()).collect(), vec![(0, 1), (1, 2), (2, 3)]);
        let g = path(40);
        let p = FptParams::new(1, &hq, 3);
        let bc = BoringCluster { vertices: vec![1, 2], short_edges: vec![1] };
        let chain = PathCluster { edges: vec![(0, 0), (2, 0)], between: vec![bc], end: ChainEnd::Leaf(3) };
        let w = VertexSet::from_iter(40, 5..40);
        let s: Vec<usize> = (0..5).collect();
        let mut b = Budget::default();
        let frag = path_embed(&g, &hq, &w, &chain, &s, None, &p, &mut b).unwrap().unwrap();
        assert_eq!(frag.fills.len(), 1);
        let mut fills = frag.fills.clone();
        let head = [0usize, 1, 2, 3, 4];
        for (idx, tp) in frag.tracks.iter().enumerate() {
            let mut seq = if idx == 0 { head.to_vec() } else { vec![] };
            seq.extend(&tp.seq);
            let start = if idx == 0 { int(0) } else { tp.start.clone().unwrap() };
            fills.push(track_fill(&g, chain.edges[idx], &start, &seq, &tp.end.clone().unwrap()));
        }
        let (_, report) = finish(&g, &hq, fills, 1).unwrap();
        assert_eq!(report.distortion, int(1));
    }

    #[test]
    fn spider_assembles_from_tracks() {
        let star = PatternGraph::star(3);
        let (id, list) = clusters_of(&star, &[false; 3]);
        let chains = chains_of(&star, &id, &list);
        assert_eq!(chains.len(), 3);
        assert!(chains.iter().all(|c| matches!(c.2.end, ChainEnd::Leaf(_))));
        let g = spider(3, 4);
        let fills: Vec<Fill> = chains
            .iter()
            .enumerate()
            .map(|(l, (_, _, ch))| {
                let seq: Vec<usize> = std::iter::once(0).chain((0..4).map(|s| 1 + l * 4 + s)).collect();
                track_fill(&g, ch.edges[0], &int(0), &seq, &int(0))
            })
            .collect();
        let (_, report) = finish(&g, &star, fills.clone(), 1).unwrap();
        assert_eq!(report.distortion, int(1));
        let mut dup = fills;
        dup.pop();
        assert!(finish(&g, &star, dup, 1).is_none());
    }

    #[test]
    fn gadget_is_reported_as_budget() {
        let mut b = Budget::new(20_000);
        let r = fpt_embed_with(&path(4), &PatternGraph::line(), 1, GadgetMode::Force, &mut b);
        assert!(matches!(r, Err(ref e) if e.is_budget()), "{r:?}");
    }

    #[test]
    fn general_route_on_spider() {
        let mut b = Budget::default();
        match fpt_embed(&spider(3, 8), &PatternGraph::star(3), 1, &mut b).unwrap() {
            FptOutcome::Embedding { report, route, .. } => {
                assert_eq!(report.distortion, int(1));
                assert_eq!(route, Route::General);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn gadget_shape() {
        let g = path(4);
        let gd = augment_with_clique_gadget(&g, &PatternGraph::line(), 1).unwrap();
        assert_eq!(gd.k, 8);
        assert_eq!(gd.path_len, 17);
        assert_eq!(gd.variants.len(), 1);
        assert_eq!(gd.graph.n(), 4 + 8 + 3 * 16);
        assert_eq!(gd.graph.dist(gd.hub, 0), 17);
        assert!(augment_with_clique_gadget(&path(2), &PatternGraph::line(), 1).is_err());
    }
}
