//! Weighted subdivisions stored compactly: per pattern edge a rational
//! length and the ordered offsets of its interior subdivision points.

use crate::error::{Error, Result};
use crate::pattern::PatternGraph;
use crate::rational::{self, Rat};
use num::{Signed, Zero};
use std::cmp::Ordering;

/// A location in a host. `Edge` offsets are measured from the edge's first
/// endpoint and lie strictly inside the edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Vertex(usize),
    Edge(usize, Rat),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Host {
    pub pattern: PatternGraph,
    pub lengths: Vec<Rat>,
    /// Interior subdivision offsets per edge, strictly increasing.
    pub points: Vec<Vec<Rat>>,
}

impl Host {
    pub fn new(pattern: PatternGraph, lengths: Vec<Rat>, points: Vec<Vec<Rat>>) -> Result<Host> {
        let host = Host { pattern, lengths, points };
        host.validate()?;
        Ok(host)
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.pattern.h();
        if self.lengths.len() != h || self.points.len() != h {
            return Err(Error::Model("host tables do not match the pattern".into()));
        }
        for e in 0..h {
            if !self.lengths[e].is_positive() {
                return Err(Error::Model(format!("edge {e} has non-positive length")));
            }
            let mut prev = rational::zero();
            for p in &self.points[e] {
                if *p <= prev || *p >= self.lengths[e] {
                    return Err(Error::Model(format!("edge {e}: offsets must increase strictly inside (0, length)")));
                }
                prev = p.clone();
            }
        }
        Ok(())
    }

    /// Canonical form of a location: offsets at an end become the vertex.
    pub fn normalize(&self, p: Point) -> Point {
        match p {
            Point::Edge(e, t) if t.is_zero() => Point::Vertex(self.pattern.edges[e].0),
            Point::Edge(e, t) if t == self.lengths[e] => Point::Vertex(self.pattern.edges[e].1),
            p => p,
        }
    }

    /// Whether `p` is a vertex of the expanded subdivision.
    pub fn is_host_point(&self, p: &Point) -> bool {
        match p {
            Point::Vertex(v) => *v < self.pattern.n(),
            Point::Edge(e, t) => *e < self.pattern.h() && self.points[*e].binary_search(t).is_ok(),
        }
    }

    /// Index of an interior point, for stable ordering.
    pub fn point_index(&self, e: usize, t: &Rat) -> Option<usize> {
        self.points[e].binary_search(t).ok()
    }

    /// Total number of vertices of the expanded subdivision.
    pub fn expanded_size(&self) -> usize {
        self.pattern.n() + self.points.iter().map(Vec::len).sum::<usize>()
    }

    pub fn metric(&self) -> HostMetric<'_> {
        HostMetric::new(self)
    }
}

/// All-pairs distances between pattern vertices (Floyd-Warshall over exact
/// rationals), from which any two locations are compared in O(1).
///
/// When every length and offset is a multiple of `1 / D` for a small `D`,
/// an integer copy scaled by `2D` is kept as well (the factor 2 makes
/// segment midpoints representable) and used by [`HostMetric::resolve`].
pub struct HostMetric<'a> {
    host: &'a Host,
    vv: Vec<Vec<Option<Rat>>>,
    fast: Option<Fast>,
}

struct Fast {
    scale: i128,
    vv: Vec<Vec<Option<i128>>>,
    len: Vec<i128>,
}

/// A location pre-resolved against the scaled integer metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved {
    edge: Option<(usize, i128)>,
    ends: [(usize, i128); 2],
    count: usize,
}

fn min_opt(a: Option<Rat>, b: Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x <= y { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Largest scale for which the integer path is used.
const MAX_SCALE: i64 = 1 << 40;

impl<'a> HostMetric<'a> {
    pub fn new(host: &'a Host) -> Self {
        let k = host.pattern.n();
        let mut vv: Vec<Vec<Option<Rat>>> = vec![vec![None; k]; k];
        for (v, row) in vv.iter_mut().enumerate() {
            row[v] = Some(rational::zero());
        }
        for (e, &(a, b)) in host.pattern.edges.iter().enumerate() {
            if a != b {
                let w = host.lengths[e].clone();
                vv[a][b] = min_opt(vv[a][b].take(), Some(w.clone()));
                vv[b][a] = min_opt(vv[b][a].take(), Some(w));
            }
        }
        for m in 0..k {
            for i in 0..k {
                let Some(im) = vv[i][m].clone() else { continue };
                for j in 0..k {
                    if let Some(mj) = &vv[m][j] {
                        let cand = &im + mj;
                        if vv[i][j].as_ref().is_none_or(|cur| cand < *cur) {
                            vv[i][j] = Some(cand);
                        }
                    }
                }
            }
        }
        let fast = Self::fast_tables(host, &vv);
        HostMetric { host, vv, fast }
    }

    fn fast_tables(host: &Host, vv: &[Vec<Option<Rat>>]) -> Option<Fast> {
        let all = host.lengths.iter().chain(host.points.iter().flatten());
        let d = rational::common_denominator(all);
        let d: i64 = i64::try_from(d).ok().filter(|&d| d <= MAX_SCALE)?;
        let scale = 2 * d as i128;
        let conv = |r: &Rat| -> Option<i128> {
            let x = r * Rat::from_integer(scale.into());
            if !x.is_integer() {
                return None;
            }
            i128::try_from(x.to_integer()).ok().filter(|v| v.abs() < (1i128 << 100))
        };
        let len = host.lengths.iter().map(conv).collect::<Option<Vec<_>>>()?;
        let mut table = Vec::with_capacity(vv.len());
        for row in vv {
            let mut out = Vec::with_capacity(row.len());
            for x in row {
                out.push(match x {
                    Some(r) => Some(conv(r)?),
                    None => None,
                });
            }
            table.push(out);
        }
        Some(Fast { scale, vv: table, len })
    }

    pub fn host(&self) -> &Host {
        self.host
    }

    /// Denominator of the integer path, if it is available.
    pub fn scale(&self) -> Option<i128> {
        self.fast.as_ref().map(|f| f.scale)
    }

    /// Pre-resolves a location for [`HostMetric::dist_resolved`]; `None` if
    /// the integer path is unavailable or the offset is off its grid.
    pub fn resolve(&self, p: &Point) -> Option<Resolved> {
        let f = self.fast.as_ref()?;
        match p {
            Point::Vertex(v) => Some(Resolved { edge: None, ends: [(*v, 0), (*v, 0)], count: 1 }),
            Point::Edge(e, t) => {
                let x = t * Rat::from_integer(f.scale.into());
                if !x.is_integer() {
                    return None;
                }
                let s = i128::try_from(x.to_integer()).ok()?;
                let (a, b) = self.host.pattern.edges[*e];
                Some(Resolved { edge: Some((*e, s)), ends: [(a, s), (b, f.len[*e] - s)], count: 2 })
            }
        }
    }

    /// Scaled integer distance between resolved locations; `None` if they
    /// lie in different components.
    pub fn dist_resolved(&self, p: &Resolved, q: &Resolved) -> Option<i128> {
        let f = self.fast.as_ref().expect("resolved points imply the integer path");
        let mut best: Option<i128> = None;
        if let (Some((e, s)), Some((g, t))) = (p.edge, q.edge) {
            if e == g {
                best = Some((s - t).abs());
            }
        }
        for (x, dx) in &p.ends[..p.count] {
            for (y, dy) in &q.ends[..q.count] {
                if let Some(mid) = f.vv[*x][*y] {
                    let cand = dx + mid + dy;
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
        }
        best
    }

    /// Exact shortest-path distance; `None` if the locations lie in
    /// different components.
    pub fn dist(&self, p: &Point, q: &Point) -> Option<Rat> {
        if let (Some(a), Some(b)) = (self.resolve(p), self.resolve(q)) {
            let scale = self.scale().expect("resolved");
            return self.dist_resolved(&a, &b).map(|d| Rat::new(d.into(), scale.into()));
        }
        self.dist_exact(p, q)
    }

    fn ends(&self, p: &Point) -> Vec<(usize, Rat)> {
        match p {
            Point::Vertex(v) => vec![(*v, rational::zero())],
            Point::Edge(e, t) => {
                let (a, b) = self.host.pattern.edges[*e];
                vec![(a, t.clone()), (b, &self.host.lengths[*e] - t)]
            }
        }
    }

    /// Same as [`HostMetric::dist`] but always through exact rationals.
    pub fn dist_exact(&self, p: &Point, q: &Point) -> Option<Rat> {
        let ends_p = self.ends(p);
        let ends_q = self.ends(q);
        let mut best: Option<Rat> = None;
        if let (Point::Edge(e, s), Point::Edge(f, t)) = (p, q) {
            if e == f {
                best = Some((s - t).abs());
            }
        }
        for (x, dx) in &ends_p {
            for (y, dy) in &ends_q {
                if let Some(mid) = &self.vv[*x][*y] {
                    best = min_opt(best, Some(dx + mid + dy));
                }
            }
        }
        best
    }
}

/// Total order on locations along one edge, used when sorting images.
pub fn offset_cmp(a: &Rat, b: &Rat) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn collinear_interior_points() {
        let host = Host::new(PatternGraph::line(), vec![int(4)], vec![vec![frac(1, 2), frac(5, 2)]]).unwrap();
        let m = host.metric();
        let d = m.dist(&Point::Edge(0, frac(1, 2)), &Point::Edge(0, frac(5, 2))).unwrap();
        assert_eq!(d, int(2));
        assert_eq!(m.dist(&Point::Vertex(1), &Point::Vertex(1)).unwrap(), int(0));
    }

    #[test]
    fn antipodal_on_triangle() {
        let host = Host::new(PatternGraph::cycle(), vec![int(2), int(2), int(2)], vec![vec![int(1)], vec![int(1)], vec![int(1)]]).unwrap();
        let m = host.metric();
        // edges (0,1), (0,2), (1,2); midpoint of (0,1) is antipodal to vertex 2
        assert_eq!(m.dist(&Point::Edge(0, int(1)), &Point::Vertex(2)).unwrap(), int(3));
    }

    #[test]
    fn rejects_bad_offsets() {
        assert!(Host::new(PatternGraph::line(), vec![int(2)], vec![vec![int(2)]]).is_err());
        assert!(Host::new(PatternGraph::line(), vec![int(0)], vec![vec![]]).is_err());
    }
}
