//! Embeddings of a graph into a compact host, the exact distortion
//! verifier, the pushing and proper predicates, and normalization.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::host::{Host, HostMetric, Point, Resolved};
use crate::pattern::PatternGraph;
use crate::rational::{self, Rat};
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Injective map from `V(G)` to host locations; `image[v]` is where `v`
/// lands.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub host: Host,
    pub image: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    #[serde(with = "rational::serde_rat")]
    pub expansion: Rat,
    #[serde(with = "rational::serde_rat")]
    pub contraction: Rat,
    #[serde(with = "rational::serde_rat")]
    pub distortion: Rat,
    pub expansion_witness: Option<(usize, usize)>,
    pub contraction_witness: Option<(usize, usize)>,
    pub non_contracting: bool,
}

/// A host location that no edge of `G` covers.
#[derive(Debug, Clone, PartialEq)]
pub enum Improper {
    Point(Point),
    /// Open segment `(from, to)` of an edge carrying no host point.
    Segment {
        edge: usize,
        from: Rat,
        to: Rat,
    },
}

impl Embedding {
    pub fn new(host: Host, image: Vec<Point>) -> Result<Embedding> {
        let image: Vec<Point> = image.into_iter().map(|p| host.normalize(p)).collect();
        for (v, p) in image.iter().enumerate() {
            if !host.is_host_point(p) {
                return Err(Error::Model(format!("image of vertex {v} is not a host point")));
            }
        }
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for (v, p) in image.iter().enumerate() {
            let key = format!("{p:?}");
            if let Some(&u) = seen.get(&key) {
                return Err(Error::Degenerate(u, v));
            }
            seen.insert(key, v);
        }
        Ok(Embedding { host, image })
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// Images lying on edge `e` (endpoints included), sorted by offset.
    /// For a loop the endpoint image appears at both ends.
    pub fn images_on_edge(&self, e: usize) -> Vec<(Rat, usize)> {
        let (a, b) = self.host.pattern.edges[e];
        let len = &self.host.lengths[e];
        let mut out = Vec::new();
        for (v, p) in self.image.iter().enumerate() {
            match p {
                Point::Vertex(x) => {
                    if *x == a {
                        out.push((rational::zero(), v));
                    }
                    if *x == b {
                        out.push((len.clone(), v));
                    }
                }
                Point::Edge(f, t) if *f == e => out.push((t.clone(), v)),
                _ => {}
            }
        }
        out.sort();
        out
    }

    /// Pairs consecutive with respect to some edge, with their along-edge
    /// distance.
    pub fn consecutive_pairs(&self) -> Vec<(usize, usize, usize, Rat)> {
        let mut out = Vec::new();
        for e in 0..self.host.pattern.h() {
            let imgs = self.images_on_edge(e);
            for w in imgs.windows(2) {
                if w[0].1 != w[1].1 {
                    out.push((e, w[0].1, w[1].1, &w[1].0 - &w[0].0));
                }
            }
        }
        out
    }
}

fn check_sizes(g: &Graph, emb: &Embedding) -> Result<()> {
    if g.n() != emb.n() {
        return Err(Error::Mismatch(format!("graph has {} vertices, embedding maps {}", g.n(), emb.n())));
    }
    Ok(())
}

/// Exact expansion, contraction and distortion over all pairs.
pub fn distortion(g: &Graph, emb: &Embedding) -> Result<DistortionReport> {
    check_sizes(g, emb)?;
    let metric = emb.host.metric();
    let n = g.n();
    let resolved: Option<Vec<Resolved>> = emb.image.iter().map(|p| metric.resolve(p)).collect();
    let mut exp = (Rat::zero(), None);
    let mut con = (Rat::zero(), None);
    let disconnected = || Error::Model("host is disconnected between images".into());
    if let (Some(res), Some(scale)) = (&resolved, metric.scale()) {
        // ratios kept as (numerator, denominator) in scaled integers
        let mut e_best: Option<(i128, i128, (usize, usize))> = None;
        let mut c_best: Option<(i128, i128, (usize, usize))> = None;
        for u in 0..n {
            for v in u + 1..n {
                let dh = metric.dist_resolved(&res[u], &res[v]).ok_or_else(disconnected)?;
                if dh == 0 {
                    return Err(Error::Degenerate(u, v));
                }
                let dg = g.dist(u, v) as i128 * scale;
                if e_best.is_none_or(|(p, q, _)| dh * q > p * dg) {
                    e_best = Some((dh, dg, (u, v)));
                }
                if c_best.is_none_or(|(p, q, _)| dg * q > p * dh) {
                    c_best = Some((dg, dh, (u, v)));
                }
            }
        }
        if let Some((p, q, w)) = e_best {
            exp = (Rat::new(p.into(), q.into()), Some(w));
        }
        if let Some((p, q, w)) = c_best {
            con = (Rat::new(p.into(), q.into()), Some(w));
        }
    } else {
        for u in 0..n {
            for v in u + 1..n {
                let dh = metric.dist(&emb.image[u], &emb.image[v]).ok_or_else(disconnected)?;
                if dh.is_zero() {
                    return Err(Error::Degenerate(u, v));
                }
                let dg = rational::int(g.dist(u, v) as i64);
                let e = &dh / &dg;
                if e > exp.0 {
                    exp = (e, Some((u, v)));
                }
                let c = &dg / &dh;
                if c > con.0 {
                    con = (c, Some((u, v)));
                }
            }
        }
    }
    if n == 1 {
        exp.0 = Rat::one();
        con.0 = Rat::one();
    }
    let non_contracting = con.0 <= Rat::one();
    Ok(DistortionReport {
        distortion: &exp.0 * &con.0,
        expansion: exp.0,
        contraction: con.0,
        expansion_witness: exp.1,
        contraction_witness: con.1,
        non_contracting,
    })
}

/// True iff every pair consecutive along an edge sits at along-edge
/// distance `d_G`; otherwise the first violating pair.
pub fn is_pushing(g: &Graph, emb: &Embedding) -> (bool, Option<(usize, usize)>) {
    for (_, u, v, gap) in emb.consecutive_pairs() {
        if gap != rational::int(g.dist(u, v) as i64) {
            return (false, Some((u, v)));
        }
    }
    (true, None)
}

/// Candidate locations for the proper check: pattern vertices, interior
/// subdivision points and the midpoint of every open segment.
fn proper_candidates(host: &Host) -> Vec<(Point, Improper)> {
    let mut out = Vec::new();
    for v in 0..host.pattern.n() {
        out.push((Point::Vertex(v), Improper::Point(Point::Vertex(v))));
    }
    for e in 0..host.pattern.h() {
        let mut stops = vec![rational::zero()];
        stops.extend(host.points[e].iter().cloned());
        stops.push(host.lengths[e].clone());
        for (i, w) in stops.windows(2).enumerate() {
            if i > 0 {
                let p = Point::Edge(e, w[0].clone());
                out.push((p.clone(), Improper::Point(p)));
            }
            let mid = (&w[0] + &w[1]) / rational::int(2);
            out.push((Point::Edge(e, mid), Improper::Segment { edge: e, from: w[0].clone(), to: w[1].clone() }));
        }
    }
    out
}

struct Coverage<'a> {
    metric: HostMetric<'a>,
    edges: Vec<(usize, usize)>,
    edge_len: Vec<Rat>,
    fast: Option<(Vec<Resolved>, Vec<i128>)>,
}

impl<'a> Coverage<'a> {
    fn new(g: &Graph, emb: &'a Embedding) -> Self {
        let metric = emb.host.metric();
        let edges = g.edges();
        let edge_len = edges.iter().map(|&(u, v)| metric.dist(&emb.image[u], &emb.image[v]).unwrap_or_else(Rat::zero)).collect();
        let fast = emb.image.iter().map(|p| metric.resolve(p)).collect::<Option<Vec<_>>>().map(|res| {
            let lens = edges.iter().map(|&(u, v)| metric.dist_resolved(&res[u], &res[v]).unwrap_or(-1)).collect();
            (res, lens)
        });
        Coverage { metric, edges, edge_len, fast }
    }

    fn covered(&self, emb: &Embedding, z: &Point) -> bool {
        if let (Some((res, lens)), Some(rz)) = (&self.fast, self.metric.resolve(z)) {
            let dz: Vec<Option<i128>> = res.iter().map(|p| self.metric.dist_resolved(&rz, p)).collect();
            return self.edges.iter().zip(lens).any(|(&(u, v), &len)| match (dz[u], dz[v]) {
                (Some(a), Some(b)) => a + b == len,
                _ => false,
            });
        }
        let dz: Vec<Option<Rat>> = emb.image.iter().map(|p| self.metric.dist(z, p)).collect();
        self.edges.iter().zip(&self.edge_len).any(|(&(u, v), len)| match (&dz[u], &dz[v]) {
            (Some(a), Some(b)) => &(a + b) == len,
            _ => false,
        })
    }
}

/// True iff every host location lies on a shortest path between the images
/// of the endpoints of some edge of `G`; otherwise the first uncovered
/// location.
pub fn is_proper(g: &Graph, emb: &Embedding) -> (bool, Option<Improper>) {
    if g.n() == 1 {
        return if emb.host.pattern.h() == 0 {
            (true, None)
        } else {
            (false, Some(Improper::Segment { edge: 0, from: rational::zero(), to: emb.host.lengths[0].clone() }))
        };
    }
    let cov = Coverage::new(g, emb);
    for (z, witness) in proper_candidates(&emb.host) {
        if !cov.covered(emb, &z) {
            return (false, Some(witness));
        }
    }
    (true, None)
}

/// Shrinks every inflated consecutive gap to `d_G`, rescaling the
/// subdivision points inside it.
fn push_gaps(g: &Graph, emb: &Embedding) -> Embedding {
    let host = &emb.host;
    let mut lengths = Vec::new();
    let mut points = Vec::new();
    let mut new_image = emb.image.clone();
    for e in 0..host.pattern.h() {
        let imgs = emb.images_on_edge(e);
        // breakpoints (old offset -> new offset) of a piecewise-linear map
        let mut old_b = vec![rational::zero()];
        let mut new_b = vec![rational::zero()];
        let mut shift = rational::zero();
        for w in imgs.windows(2) {
            let (t0, u) = (&w[0].0, w[0].1);
            let (t1, v) = (&w[1].0, w[1].1);
            if u == v {
                continue;
            }
            let gap = t1 - t0;
            let want = rational::int(g.dist(u, v) as i64);
            if gap > want {
                let n0 = t0 - &shift;
                old_b.push(t0.clone());
                new_b.push(n0.clone());
                shift += &gap - &want;
                old_b.push(t1.clone());
                new_b.push(t1 - &shift);
            }
        }
        let len = &host.lengths[e];
        old_b.push(len.clone());
        new_b.push(len - &shift);
        let map = |t: &Rat| -> Rat {
            for i in 0..old_b.len() - 1 {
                if *t >= old_b[i] && *t <= old_b[i + 1] {
                    let span = &old_b[i + 1] - &old_b[i];
                    if span.is_zero() {
                        return new_b[i].clone();
                    }
                    let frac = (t - &old_b[i]) / span;
                    return &new_b[i] + frac * (&new_b[i + 1] - &new_b[i]);
                }
            }
            t - &shift
        };
        let pts: Vec<Rat> = host.points[e].iter().map(&map).collect();
        for p in new_image.iter_mut() {
            if let Point::Edge(f, t) = p {
                if *f == e {
                    *t = map(t);
                }
            }
        }
        lengths.push(len - &shift);
        points.push(pts);
    }
    Embedding { host: Host { pattern: host.pattern.clone(), lengths, points }, image: new_image }
}

/// Deletes uncovered segments and points. Cut ends become new pendant
/// pattern vertices, so the result lives on a quasi-subgraph.
fn prune(g: &Graph, emb: &Embedding) -> Option<Embedding> {
    let cov = Coverage::new(g, emb);
    let host = &emb.host;
    let pat = &host.pattern;
    let mut changed = false;
    let mut vertex_ok: Vec<bool> = (0..pat.n()).map(|v| cov.covered(emb, &Point::Vertex(v))).collect();
    let image_at: BTreeMap<String, usize> = emb.image.iter().enumerate().map(|(v, p)| (format!("{p:?}"), v)).collect();
    for (v, ok) in vertex_ok.iter_mut().enumerate() {
        if !*ok && image_at.contains_key(&format!("{:?}", Point::Vertex(v))) {
            *ok = true;
        }
    }
    // each kept run of an edge: (start offset, end offset, interior points)
    let mut runs: Vec<(usize, Rat, Rat, Vec<Rat>)> = Vec::new();
    for e in 0..pat.h() {
        let mut stops = vec![rational::zero()];
        stops.extend(host.points[e].iter().cloned());
        stops.push(host.lengths[e].clone());
        let seg_ok: Vec<bool> = stops.windows(2).map(|w| cov.covered(emb, &Point::Edge(e, (&w[0] + &w[1]) / rational::int(2)))).collect();
        let mut i = 0;
        while i < seg_ok.len() {
            if !seg_ok[i] {
                changed = true;
                i += 1;
                continue;
            }
            let start = i;
            while i < seg_ok.len() && seg_ok[i] {
                i += 1;
            }
            let inner = stops[start + 1..i].to_vec();
            runs.push((e, stops[start].clone(), stops[i].clone(), inner));
        }
    }
    if !changed && vertex_ok.iter().all(|&x| x) {
        return None;
    }
    let mut labels: Vec<String> = Vec::new();
    let mut old_vertex: BTreeMap<usize, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut lengths = Vec::new();
    let mut points = Vec::new();
    let mut image: Vec<Option<Point>> = vec![None; emb.n()];
    let mut keep_vertex = |v: usize, labels: &mut Vec<String>| -> usize {
        *old_vertex.entry(v).or_insert_with(|| {
            labels.push(pat.vertices[v].clone());
            labels.len() - 1
        })
    };
    for (e, from, to, inner) in &runs {
        let (a, b) = pat.edges[*e];
        let len = &host.lengths[*e];
        let mut endpoint = |t: &Rat, orig: usize, labels: &mut Vec<String>| -> usize {
            if t.is_zero() && orig == a || *t == *len && orig == b {
                keep_vertex(orig, labels)
            } else {
                labels.push(format!("{}~{}", pat.vertices[a], rational::to_string(t)));
                let id = labels.len() - 1;
                if let Some(&v) = image_at.get(&format!("{:?}", Point::Edge(*e, t.clone()))) {
                    image[v] = Some(Point::Vertex(id));
                }
                id
            }
        };
        let x = endpoint(from, a, &mut labels);
        let y = endpoint(to, b, &mut labels);
        let id = edges.len();
        edges.push((x, y));
        lengths.push(to - from);
        points.push(inner.iter().map(|t| t - from).collect::<Vec<_>>());
        for t in inner {
            if let Some(&v) = image_at.get(&format!("{:?}", Point::Edge(*e, t.clone()))) {
                image[v] = Some(Point::Edge(id, t - from));
            }
        }
    }
    for (v, p) in emb.image.iter().enumerate() {
        if let Point::Vertex(x) = p {
            let id = keep_vertex(*x, &mut labels);
            image[v] = Some(Point::Vertex(id));
        }
    }
    let image: Option<Vec<Point>> = image.into_iter().collect();
    let host = Host { pattern: PatternGraph::new(labels, edges), lengths, points };
    Some(Embedding { host, image: image? })
}

/// Normalizes a non-contracting embedding into a proper, pushing,
/// non-contracting one on a quasi-subgraph of its pattern. Distortion never
/// increases and the operation is idempotent.
pub fn normalize_to_proper_pushing(g: &Graph, emb: &Embedding) -> Result<Embedding> {
    let report = distortion(g, emb)?;
    if !report.non_contracting {
        let (u, v) = report.contraction_witness.unwrap_or((0, 0));
        return Err(Error::Contract(u, v));
    }
    let mut cur = emb.clone();
    for _ in 0..64 {
        let pushed = if is_pushing(g, &cur).0 { cur.clone() } else { push_gaps(g, &cur) };
        match prune(g, &pushed) {
            Some(next) => cur = next,
            None => return Ok(pushed),
        }
    }
    Err(Error::Model("normalization did not converge".into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonPattern {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonPoint {
    vertex_label: Option<String>,
    offset: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonEmbedding {
    pattern: JsonPattern,
    points: Vec<Vec<JsonPoint>>,
    edge_lengths: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    vertex_images: BTreeMap<String, String>,
}

/// Serializes with graph labels; branch-vertex images go to
/// `vertex_images`, interior points (with or without an image) to `points`.
pub fn to_json(g: &Graph, emb: &Embedding) -> String {
    let pat = &emb.host.pattern;
    let mut at: BTreeMap<String, usize> = BTreeMap::new();
    for (v, p) in emb.image.iter().enumerate() {
        at.insert(format!("{p:?}"), v);
    }
    let points = (0..pat.h())
        .map(|e| {
            emb.host.points[e]
                .iter()
                .map(|t| JsonPoint {
                    vertex_label: at.get(&format!("{:?}", Point::Edge(e, t.clone()))).map(|&v| g.label(v).to_string()),
                    offset: rational::to_string(t),
                })
                .collect()
        })
        .collect();
    let mut vertex_images = BTreeMap::new();
    for (v, p) in emb.image.iter().enumerate() {
        if let Point::Vertex(x) = p {
            vertex_images.insert(pat.vertices[*x].clone(), g.label(v).to_string());
        }
    }
    let j = JsonEmbedding {
        pattern: JsonPattern {
            vertices: pat.vertices.clone(),
            edges: pat.edges.iter().map(|&(a, b)| (pat.vertices[a].clone(), pat.vertices[b].clone())).collect(),
        },
        points,
        edge_lengths: (0..pat.h()).map(|e| (e.to_string(), rational::to_string(&emb.host.lengths[e]))).collect(),
        vertex_images,
    };
    serde_json::to_string_pretty(&j).expect("embedding serializes")
}

/// Reads the JSON form against `g`'s labels. Points at offset `0` or at the
/// edge length denote the edge's endpoints.
pub fn from_json(g: &Graph, text: &str) -> Result<Embedding> {
    let j: JsonEmbedding = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let vidx: BTreeMap<&str, usize> = j.pattern.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut edges = Vec::new();
    for (a, b) in &j.pattern.edges {
        let (Some(&x), Some(&y)) = (vidx.get(a.as_str()), vidx.get(b.as_str())) else {
            return Err(Error::Mismatch(format!("edge {a}-{b} names an unknown pattern vertex")));
        };
        edges.push((x, y));
    }
    let pattern = PatternGraph::new(j.pattern.vertices.clone(), edges);
    let h = pattern.h();
    if j.points.len() != h {
        return Err(Error::Mismatch("points list does not match the pattern".into()));
    }
    let gidx: BTreeMap<&str, usize> = g.labels().iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let mut lengths = Vec::with_capacity(h);
    for e in 0..h {
        let s = j.edge_lengths.get(&e.to_string()).ok_or_else(|| Error::Mismatch(format!("no length for edge {e}")))?;
        lengths.push(rational::parse(s)?);
    }
    let mut image: Vec<Option<Point>> = vec![None; g.n()];
    let place = |label: &str, p: Point, image: &mut Vec<Option<Point>>| -> Result<()> {
        let &v = gidx.get(label).ok_or_else(|| Error::Mismatch(format!("unknown graph vertex {label}")))?;
        match &image[v] {
            Some(q) if *q != p => Err(Error::Mismatch(format!("vertex {label} has two images"))),
            _ => {
                image[v] = Some(p);
                Ok(())
            }
        }
    };
    let mut points = vec![Vec::new(); h];
    for e in 0..h {
        for jp in &j.points[e] {
            let t = rational::parse(&jp.offset)?;
            let p = if t.is_zero() {
                Point::Vertex(pattern.edges[e].0)
            } else if t == lengths[e] {
                Point::Vertex(pattern.edges[e].1)
            } else {
                points[e].push(t.clone());
                Point::Edge(e, t)
            };
            if let Some(l) = &jp.vertex_label {
                place(l, p, &mut image)?;
            }
        }
        points[e].sort();
        let before = points[e].len();
        points[e].dedup();
        if points[e].len() != before {
            return Err(Error::Degenerate(0, 0));
        }
    }
    for (pv, gl) in &j.vertex_images {
        let &x = vidx.get(pv.as_str()).ok_or_else(|| Error::Mismatch(format!("unknown pattern vertex {pv}")))?;
        place(gl, Point::Vertex(x), &mut image)?;
    }
    let host = Host::new(pattern, lengths, points)?;
    let image: Vec<Point> = image
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| Error::Mismatch(format!("vertex {} has no image", g.label(v)))))
        .collect::<Result<_>>()?;
    Embedding::new(host, image)
}

/// Places `order` on a single edge with the given positions (first at
/// offset 0). A one-vertex order lands on a `K1` host.
pub fn line_embedding(n: usize, order: &[usize], positions: &[Rat]) -> Result<Embedding> {
    assert_eq!(order.len(), n);
    if n == 1 {
        let host = Host::new(PatternGraph::numbered(1, &[]), vec![], vec![])?;
        return Embedding::new(host, vec![Point::Vertex(0)]);
    }
    let len = positions[n - 1].clone() - positions[0].clone();
    let inner: Vec<Rat> = positions[1..n - 1].iter().map(|p| p - &positions[0]).collect();
    let host = Host::new(PatternGraph::line(), vec![len], vec![inner.clone()])?;
    let mut image = vec![Point::Vertex(0); n];
    image[order[0]] = Point::Vertex(0);
    image[order[n - 1]] = Point::Vertex(1);
    for (i, &v) in order[1..n - 1].iter().enumerate() {
        image[v] = Point::Edge(0, inner[i].clone());
    }
    Embedding::new(host, image)
}

/// Pushed positions for an ordering: each gap is the graph distance.
pub fn pushed_positions(g: &Graph, order: &[usize]) -> Vec<Rat> {
    let mut pos = Vec::with_capacity(order.len());
    let mut acc = 0i64;
    for (i, &v) in order.iter().enumerate() {
        if i > 0 {
            acc += g.dist(order[i - 1], v) as i64;
        }
        pos.push(rational::int(acc));
    }
    pos
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn graph(n: usize, e: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, e).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        graph(n, &e)
    }

    fn on_line(g: &Graph, order: &[usize]) -> Embedding {
        line_embedding(g.n(), order, &pushed_positions(g, order)).unwrap()
    }

    #[test]
    fn identity_path() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let r = distortion(&g, &on_line(&g, &[0, 1, 2])).unwrap();
        assert_eq!(r.distortion, int(1));
        assert!(r.non_contracting);
    }

    #[test]
    fn c4_in_cyclic_order() {
        let g = cycle(4);
        let emb = on_line(&g, &[0, 1, 2, 3]);
        let r = distortion(&g, &emb).unwrap();
        assert_eq!(r.distortion, int(3));
        assert_eq!(r.expansion_witness, Some((0, 3)));
        assert!(is_pushing(&g, &emb).0);
        assert!(is_proper(&g, &emb).0);
    }

    #[test]
    fn star_on_line() {
        let g = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        // leaf, center, leaf, leaf at positions 0, 1, 2, 4
        let emb = on_line(&g, &[1, 0, 2, 3]);
        let pos: Vec<_> = emb.host.points[0].clone();
        assert_eq!(pos, vec![int(1), int(2)]);
        assert_eq!(emb.host.lengths[0], int(4));
        assert_eq!(distortion(&g, &emb).unwrap().distortion, int(3));
    }

    #[test]
    fn doubled_weights_are_not_pushing() {
        let g = cycle(4);
        let pos: Vec<Rat> = (0..4).map(|i| int(2 * i)).collect();
        let emb = line_embedding(4, &[0, 1, 2, 3], &pos).unwrap();
        assert_eq!(is_pushing(&g, &emb), (false, Some((0, 1))));
        let single = graph(1, &[]);
        assert!(is_pushing(&single, &on_line(&single, &[0])).0);
    }

    #[test]
    fn dangling_edge_is_improper() {
        let g = graph(2, &[(0, 1)]);
        let host = Host::new(PatternGraph::star(2), vec![int(1), int(1)], vec![vec![], vec![]]).unwrap();
        let emb = Embedding::new(host, vec![Point::Vertex(0), Point::Vertex(1)]).unwrap();
        let (ok, w) = is_proper(&g, &emb);
        assert!(!ok);
        assert_eq!(w, Some(Improper::Point(Point::Vertex(2))));
    }

    #[test]
    fn degenerate_images_rejected() {
        let host = Host::new(PatternGraph::line(), vec![int(1)], vec![vec![]]).unwrap();
        assert_eq!(Embedding::new(host, vec![Point::Vertex(0), Point::Vertex(0)]), Err(Error::Degenerate(0, 1)));
    }

    #[test]
    fn json_round_trip() {
        let g = cycle(5);
        let emb = on_line(&g, &[0, 1, 2, 3, 4]);
        let text = to_json(&g, &emb);
        let back = from_json(&g, &text).unwrap();
        assert_eq!(back, emb);
        assert!(text.contains("\"4/1\""));
    }

    #[test]
    fn normalize_fixed_point_and_gap() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let emb = on_line(&g, &[0, 1, 2, 3]);
        assert_eq!(normalize_to_proper_pushing(&g, &emb).unwrap(), emb);
        let pos = vec![int(0), int(1), int(7), int(8)];
        let inflated = line_embedding(4, &[0, 1, 2, 3], &pos).unwrap();
        let before = distortion(&g, &inflated).unwrap().distortion;
        let out = normalize_to_proper_pushing(&g, &inflated).unwrap();
        assert!(is_pushing(&g, &out).0);
        assert!(distortion(&g, &out).unwrap().distortion < before);
    }

    #[test]
    fn normalize_rejects_contracting_input() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let pos = vec![int(0), frac_half(), int(1)];
        let emb = line_embedding(3, &[0, 1, 2], &pos).unwrap();
        assert!(matches!(normalize_to_proper_pushing(&g, &emb), Err(Error::Contract(..))));
    }

    fn frac_half() -> Rat {
        crate::rational::frac(1, 2)
    }
}
