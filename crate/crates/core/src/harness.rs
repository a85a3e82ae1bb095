//! Seeded instance generators, brute-force optima for line and cycle
//! hosts, and the benchmark driver.
//!
//! Randomness comes from SplitMix64 seeded with the instance seed, so an
//! instance is a pure function of its family, parameters and seed.

use crate::approx::{approx_embed, ApproxOutcome};
use crate::embedding::Embedding;
use crate::error::{Budget, Error, Result};
use crate::fpt::{self, CycleEmbedding, FptOutcome};
use crate::graph::Graph;
use crate::line::{self, LineEmbedding};
use crate::pattern::PatternGraph;
use crate::rational::{self, Rat};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Family {
    /// Every edge of `pattern` replaced by a path of `legs` edges, then a
    /// leaf attached to each vertex with probability `pendant_rate`.
    SubdividedH {
        pattern: PatternGraph,
        legs: usize,
        pendant_rate: f64,
    },
    Cycle {
        n: usize,
    },
    /// `legs` paths from a center, each of length drawn from `1..=len`.
    Spider {
        legs: usize,
        len: usize,
    },
    /// A spine path with a leaf on each spine vertex with probability
    /// `pendant_rate`.
    Caterpillar {
        spine: usize,
        pendant_rate: f64,
    },
    /// A random recursive tree plus `chords` random extra edges.
    RandomTree {
        n: usize,
        chords: usize,
    },
    Clique {
        k: usize,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::SubdividedH { .. } => "subdivided-H",
            Family::Cycle { .. } => "cycle",
            Family::Spider { .. } => "spider",
            Family::Caterpillar { .. } => "caterpillar",
            Family::RandomTree { .. } => "random-tree",
            Family::Clique { .. } => "clique",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        InstanceSpec { family, seed }
    }

    /// Stable identifier built from the family, its sizes and the seed.
    pub fn id(&self) -> String {
        let params = match &self.family {
            Family::SubdividedH { pattern, legs, pendant_rate } => format!("h{}-l{legs}-p{pendant_rate}", pattern.h()),
            Family::Cycle { n } => format!("n{n}"),
            Family::Spider { legs, len } => format!("k{legs}-l{len}"),
            Family::Caterpillar { spine, pendant_rate } => format!("s{spine}-p{pendant_rate}"),
            Family::RandomTree { n, chords } => format!("n{n}-x{chords}"),
            Family::Clique { k } => format!("k{k}"),
        };
        format!("{}-{params}-s{}", self.family.name(), self.seed)
    }
}

fn check(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Param(msg.into()))
    }
}

/// The graph and its natural pattern.
pub fn generate(spec: &InstanceSpec) -> Result<(Graph, PatternGraph)> {
    let mut rng = SplitMix64::seed_from_u64(spec.seed);
    match &spec.family {
        Family::SubdividedH { pattern, legs, pendant_rate } => {
            check(*legs >= 1 && pattern.n() >= 1, "subdivided-H needs legs >= 1 and a pattern")?;
            check((0.0..=1.0).contains(pendant_rate), "pendant rate must lie in [0, 1]")?;
            let mut labels: Vec<String> = pattern.vertices.clone();
            let mut edges = Vec::new();
            let mut seen = BTreeSet::new();
            for (e, &(a, b)) in pattern.edges.iter().enumerate() {
                let key = (a.min(b), a.max(b));
                let need = if a == b {
                    3
                } else if seen.contains(&key) {
                    2
                } else {
                    1
                };
                check(*legs >= need, "loops need legs >= 3 and parallel edges legs >= 2")?;
                seen.insert(key);
                let mut prev = a;
                for s in 1..*legs {
                    labels.push(format!("{e}.{s}"));
                    let v = labels.len() - 1;
                    edges.push((prev, v));
                    prev = v;
                }
                edges.push((prev, b));
            }
            let core = labels.len();
            for v in 0..core {
                if rng.gen_bool(*pendant_rate) {
                    labels.push(format!("p{v}"));
                    edges.push((v, labels.len() - 1));
                }
            }
            Ok((Graph::with_labels(labels, &edges)?, pattern.clone()))
        }
        Family::Cycle { n } => {
            check(*n >= 3, "a cycle needs n >= 3")?;
            let e: Vec<_> = (0..*n).map(|i| (i, (i + 1) % n)).collect();
            Ok((Graph::from_edges(*n, &e)?, PatternGraph::cycle()))
        }
        Family::Spider { legs, len } => {
            check(*legs >= 1 && *len >= 1, "a spider needs legs >= 1 and len >= 1")?;
            let mut e = Vec::new();
            let mut n = 1;
            for _ in 0..*legs {
                let l = rng.gen_range(1..=*len);
                let mut prev = 0;
                for _ in 0..l {
                    e.push((prev, n));
                    prev = n;
                    n += 1;
                }
            }
            Ok((Graph::from_edges(n, &e)?, PatternGraph::star(*legs)))
        }
        Family::Caterpillar { spine, pendant_rate } => {
            check(*spine >= 1, "a caterpillar needs spine >= 1")?;
            check((0.0..=1.0).contains(pendant_rate), "pendant rate must lie in [0, 1]")?;
            let mut e: Vec<_> = (1..*spine).map(|i| (i - 1, i)).collect();
            let mut n = *spine;
            for v in 0..*spine {
                if rng.gen_bool(*pendant_rate) {
                    e.push((v, n));
                    n += 1;
                }
            }
            Ok((Graph::from_edges(n, &e)?, PatternGraph::line()))
        }
        Family::RandomTree { n, chords } => {
            check(*n >= 1, "a tree needs n >= 1")?;
            let mut set = BTreeSet::new();
            for v in 1..*n {
                let p = rng.gen_range(0..v);
                set.insert((p, v));
            }
            let free = n * (n - 1) / 2 - set.len();
            check(*chords <= free, "too many chords")?;
            while set.len() < n - 1 + chords {
                let a = rng.gen_range(0..*n);
                let b = rng.gen_range(0..*n);
                if a != b {
                    set.insert((a.min(b), a.max(b)));
                }
            }
            let e: Vec<_> = set.into_iter().collect();
            Ok((Graph::from_edges(*n, &e)?, PatternGraph::line()))
        }
        Family::Clique { k } => {
            check(*k >= 1, "a clique needs k >= 1")?;
            let mut e = Vec::new();
            for i in 0..*k {
                for j in i + 1..*k {
                    e.push((i, j));
                }
            }
            Ok((Graph::from_edges(*k, &e)?, PatternGraph::line()))
        }
    }
}

/// Largest graph accepted by the cycle oracle.
pub const CYCLE_ORACLE_CAP: usize = 8;

/// Minimum distortion into subdivisions of quasi-subgraphs of the triangle:
/// the best non-contracting pushed cyclic order, or the line optimum when
/// that is no worse.
pub fn min_cycle_distortion_oracle(g: &Graph) -> Result<(Rat, Embedding)> {
    let n = g.n();
    if n > CYCLE_ORACLE_CAP {
        return Err(Error::Size { what: "vertex count", got: n, cap: CYCLE_ORACLE_CAP });
    }
    let (line_opt, le) = line::min_line_distortion_oracle(g)?;
    let mut best: Option<(Rat, CycleEmbedding)> = None;
    if n >= 3 {
        let mut rest: Vec<usize> = (1..n).collect();
        loop {
            let order: Vec<usize> = std::iter::once(0).chain(rest.iter().copied()).collect();
            if let Some((d, ce)) = cycle_order_distortion(g, &order) {
                if best.as_ref().is_none_or(|b| d < b.0) {
                    best = Some((d, ce));
                }
            }
            if !crate::pattern::next_permutation(&mut rest) {
                break;
            }
        }
    }
    match best {
        Some((d, ce)) if d < line_opt => {
            let (emb, _) = fpt::cycle_to_embedding(g, &ce).ok_or_else(|| Error::Model("cycle order does not embed".into()))?;
            Ok((d, emb))
        }
        _ => Ok((line_opt, le.to_embedding()?)),
    }
}

/// Distortion of a pushed cyclic order, or `None` when it contracts a
/// pair.
pub fn cycle_order_distortion(g: &Graph, order: &[usize]) -> Option<(Rat, CycleEmbedding)> {
    let n = order.len();
    let mut pos = vec![0u64; g.n()];
    let mut acc = 0u64;
    let mut positions = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            acc += g.dist(order[i - 1], order[i]) as u64;
        }
        pos[order[i]] = acc;
        positions.push(acc);
    }
    let len = acc + g.dist(order[n - 1], order[0]) as u64;
    let mut worst = (0u64, 1u64);
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            let d = pos[u].abs_diff(pos[v]);
            let h = d.min(len - d);
            let dg = g.dist(u, v) as u64;
            if h < dg {
                return None;
            }
            if h * worst.1 > worst.0 * dg {
                worst = (h, dg);
            }
        }
    }
    let ce = CycleEmbedding { order: order.to_vec(), positions, length: len };
    Some((rational::frac(worst.0 as i64, worst.1 as i64), ce))
}

/// Exact optimum for the line or the triangle pattern; `None` for other
/// patterns or graphs above the oracle caps.
pub fn oracle_optimum(g: &Graph, h: &PatternGraph) -> Option<Rat> {
    if h.is_isomorphic(&PatternGraph::line()) && g.n() <= line::ORACLE_CAP {
        return line::min_line_distortion_oracle(g).ok().map(|x| x.0);
    }
    if h.is_isomorphic(&PatternGraph::cycle()) && g.n() <= CYCLE_ORACLE_CAP {
        return min_cycle_distortion_oracle(g).ok().map(|x| x.0);
    }
    None
}

/// One benchmark corpus entry for the exact solver: `n <= 7`, the line or
/// the triangle, and `c` in `{1, 2, 3}`.
#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub id: String,
    pub graph: Graph,
    pub pattern: PatternGraph,
    pub c: u32,
}

/// `count` small instances drawn from every family.
pub fn small_corpus(count: usize, seed: u64) -> Vec<CorpusItem> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s = rng.gen::<u64>();
        let family = match rng.gen_range(0..6) {
            0 => Family::SubdividedH {
                pattern: if rng.gen_bool(0.5) { PatternGraph::line() } else { PatternGraph::cycle() },
                legs: rng.gen_range(1..=2),
                pendant_rate: 0.3,
            },
            1 => Family::Cycle { n: rng.gen_range(3..=7) },
            2 => Family::Spider { legs: 3, len: 2 },
            3 => Family::Caterpillar { spine: rng.gen_range(2..=4), pendant_rate: 0.5 },
            4 => Family::RandomTree { n: rng.gen_range(2..=7), chords: rng.gen_range(0..=2) },
            _ => Family::Clique { k: rng.gen_range(2..=5) },
        };
        let spec = InstanceSpec::new(family, s);
        let Ok((graph, _)) = generate(&spec) else { continue };
        if graph.n() > 7 {
            continue;
        }
        let pattern = if rng.gen_bool(0.5) { PatternGraph::line() } else { PatternGraph::cycle() };
        let c = rng.gen_range(1..=3);
        let id = format!("{}-{}", spec.id(), if pattern.h() == 1 { "K2" } else { "K3" });
        out.push(CorpusItem { id, graph, pattern, c });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Algo {
    Line,
    Approx,
    Fpt,
    Oracle,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Line => "line",
            Algo::Approx => "approx",
            Algo::Fpt => "fpt",
            Algo::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub id: String,
    pub family: String,
    pub n: usize,
    pub h: usize,
    pub c: u32,
    pub algo: Algo,
    /// `EMBED`, `NO`, `BUDGET` or `ERROR`.
    pub verdict: String,
    #[serde(with = "opt_rat")]
    pub distortion: Option<Rat>,
    #[serde(with = "opt_rat")]
    pub oracle_opt: Option<Rat>,
    pub micros: u128,
}

mod opt_rat {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&rational::to_string(r)),
            None => s.serialize_none(),
        }
    }
}

pub const CSV_HEADER: &str = "id,family,n,h,c,algo,verdict,distortion,oracle_opt,micros";

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let r2s = |r: &Option<Rat>| r.as_ref().map(rational::to_string).unwrap_or_default();
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.id,
            r.family,
            r.n,
            r.h,
            r.c,
            r.algo.name(),
            r.verdict,
            r2s(&r.distortion),
            r2s(&r.oracle_opt),
            r.micros
        );
    }
    out
}

/// One benchmark job: an instance, a pattern and `c`.
#[derive(Debug, Clone)]
pub struct BenchCase {
    pub id: String,
    pub family: String,
    pub graph: Graph,
    pub pattern: PatternGraph,
    pub c: u32,
}

impl BenchCase {
    pub fn from_spec(spec: &InstanceSpec, c: u32) -> Result<Self> {
        let (graph, pattern) = generate(spec)?;
        Ok(BenchCase { id: spec.id(), family: spec.family.name().into(), graph, pattern, c })
    }
}

/// Runs every algorithm on every case, on all available cores. Rows are
/// sorted by case id and algorithm.
pub fn bench(cases: &[BenchCase], algos: &[Algo], budget: u64) -> Vec<BenchRecord> {
    let jobs: Vec<(usize, Algo)> = (0..cases.len()).flat_map(|i| algos.iter().map(move |&a| (i, a))).collect();
    let threads = std::thread::available_parallelism().map_or(1, |x| x.get()).min(jobs.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut rows: Vec<BenchRecord> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut mine = Vec::new();
                    loop {
                        let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        let Some(&(i, algo)) = jobs.get(k) else { break };
                        mine.push(run_one(&cases[i], algo, budget));
                    }
                    mine
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("bench worker")).collect()
    });
    rows.sort_by(|a, b| (&a.id, a.c, a.algo).cmp(&(&b.id, b.c, b.algo)));
    rows
}

pub fn run_one(case: &BenchCase, algo: Algo, budget: u64) -> BenchRecord {
    let g = &case.graph;
    let h = &case.pattern;
    let c = case.c;
    let oracle_opt = oracle_optimum(g, h);
    let start = Instant::now();
    let result: Result<Option<Rat>> = match algo {
        Algo::Line => {
            let mut b = Budget::new(budget);
            line::line_embed_exact(g, c, &mut b).map(|r| r.map(|le: LineEmbedding| le.edge_stretch(g)))
        }
        Algo::Approx => approx_embed(g, h, c).map(|o| match o {
            ApproxOutcome::Embedding { report, .. } => Some(report.distortion),
            ApproxOutcome::NoCEmbedding(_) => None,
        }),
        Algo::Fpt => {
            let mut b = Budget::new(budget);
            fpt::fpt_embed(g, h, c, &mut b).map(|o| match o {
                FptOutcome::Embedding { report, .. } => Some(report.distortion),
                FptOutcome::No(_) => None,
            })
        }
        Algo::Oracle => match &oracle_opt {
            Some(opt) => Ok((*opt <= rational::int(c as i64)).then(|| opt.clone())),
            None => Err(Error::Param("no oracle for this instance".into())),
        },
    };
    let micros = start.elapsed().as_micros();
    let (verdict, distortion) = match result {
        Ok(Some(d)) => ("EMBED", Some(d)),
        Ok(None) => ("NO", None),
        Err(e) if e.is_budget() => ("BUDGET", None),
        Err(_) => ("ERROR", None),
    };
    BenchRecord {
        id: case.id.clone(),
        family: case.family.clone(),
        n: g.n(),
        h: h.h(),
        c,
        algo,
        verdict: verdict.into(),
        distortion,
        oracle_opt,
        micros,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::distortion;
    use crate::rational::int;

    #[test]
    fn generators_are_deterministic() {
        let spec = InstanceSpec::new(Family::RandomTree { n: 12, chords: 3 }, 42);
        let (a, _) = generate(&spec).unwrap();
        let (b, _) = generate(&spec).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.m(), 14);
        let (c8, p) = generate(&InstanceSpec::new(Family::Cycle { n: 8 }, 0)).unwrap();
        assert_eq!((c8.n(), c8.m(), p.h()), (8, 8, 3));
        let (k8, p) = generate(&InstanceSpec::new(Family::Clique { k: 8 }, 0)).unwrap();
        assert_eq!((k8.m(), p.h()), (28, 1));
    }

    #[test]
    fn subdivided_star() {
        let spec = InstanceSpec::new(Family::SubdividedH { pattern: PatternGraph::star(3), legs: 5, pendant_rate: 0.0 }, 1);
        let (g, h) = generate(&spec).unwrap();
        assert_eq!((g.n(), g.m(), h.h()), (16, 15, 3));
        assert!(generate(&InstanceSpec::new(Family::Cycle { n: 2 }, 0)).is_err());
    }

    fn graph(n: usize, e: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, e).unwrap()
    }

    #[test]
    fn cycle_oracle_examples() {
        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let (d, emb) = min_cycle_distortion_oracle(&c5).unwrap();
        assert_eq!(d, int(1));
        assert_eq!(distortion(&c5, &emb).unwrap().distortion, int(1));
        let p4 = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(min_cycle_distortion_oracle(&p4).unwrap().0, int(1));
        let k13 = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let (d, emb) = min_cycle_distortion_oracle(&k13).unwrap();
        assert_eq!(d, int(3));
        assert_eq!(distortion(&k13, &emb).unwrap().distortion, int(3));
    }

    #[test]
    fn bench_rows_are_sorted_and_sandwiched() {
        let cases: Vec<BenchCase> =
            (0..4).map(|s| BenchCase::from_spec(&InstanceSpec::new(Family::Cycle { n: 4 + s as usize }, s), 1).unwrap()).collect();
        let rows = bench(&cases, &[Algo::Approx, Algo::Fpt, Algo::Oracle], 1_000_000);
        assert_eq!(rows.len(), 12);
        for r in &rows {
            if let (Some(d), Some(o)) = (&r.distortion, &r.oracle_opt) {
                assert!(d >= o);
            }
        }
        let csv = to_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 13);
    }
}
