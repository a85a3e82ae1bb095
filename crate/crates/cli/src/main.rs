use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hembed::approx::{approx_embed, ApproxOutcome};
use hembed::embedding::{distortion, from_json, is_proper, is_pushing, to_json};
use hembed::fpt::{fpt_embed_with, FptOutcome, GadgetMode};
use hembed::graph::parse_graph;
use hembed::harness::{self, Algo, BenchCase, Family, InstanceSpec};
use hembed::line::{self, ApproxLine};
use hembed::pattern::parse_pattern;
use hembed::{rational, Budget, DistortionReport, Embedding, Error, Graph, PatternGraph, Point};
use serde_json::json;

/// Exit codes: 0 embedding found, 1 certified NO, 2 budget exceeded, 3 input error.
#[derive(Parser)]
#[command(name = "hembed", version, about = "Low-distortion embeddings of graphs into subdivisions of a pattern")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance and print the graph.
    Gen {
        #[command(flatten)]
        family: FamilyArgs,
        /// Also write the natural pattern of the instance here.
        #[arg(long)]
        pattern_out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Exact embedding into the line.
    EmbedLine {
        #[command(flatten)]
        run: RunArgs,
        /// Use the BFS-layer approximation instead of the exact search.
        #[arg(long)]
        approx: bool,
    },
    /// Approximate embedding into a subdivision of the pattern.
    Approx {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        pattern: PathBuf,
    },
    /// Exact embedding into a subdivision of the pattern.
    Fpt {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        pattern: PathBuf,
        /// Never build the clique gadget.
        #[arg(long)]
        no_gadget: bool,
        /// Decide through the clique gadget only.
        #[arg(long, conflicts_with = "no_gadget")]
        force_gadget: bool,
    },
    /// Distortion report of an embedding file against a graph.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
    },
    /// Brute-force optimum into the line, or into the triangle.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        /// `K2` by default; a triangle pattern selects the cycle oracle.
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run algorithms over seeded instances and print CSV.
    Bench {
        #[command(flatten)]
        family: FamilyArgs,
        /// Number of consecutive seeds, starting at `--seed`.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value_t = 1)]
        c: u32,
        #[arg(long, value_delimiter = ',', default_value = "approx,fpt,oracle")]
        algos: Vec<AlgoArg>,
        #[arg(long, default_value_t = Budget::DEFAULT)]
        budget: u64,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    c: u32,
    /// State budget of the exact searches.
    #[arg(long, default_value_t = Budget::DEFAULT)]
    budget: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Progress and search details on stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Vertex count (cycle, random-tree).
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Clique size.
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Edges per subdivided pattern edge, or spider legs.
    #[arg(long, default_value_t = 3)]
    legs: usize,
    /// Maximum spider leg length.
    #[arg(long, default_value_t = 4)]
    len: usize,
    #[arg(long, default_value_t = 5)]
    spine: usize,
    #[arg(long, default_value_t = 0)]
    chords: usize,
    #[arg(long, default_value_t = 0.0)]
    pendant_rate: f64,
    /// Pattern file for `subdivided-h`.
    #[arg(long)]
    pattern: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    SubdividedH,
    Cycle,
    Spider,
    Caterpillar,
    RandomTree,
    Clique,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Line,
    Approx,
    Fpt,
    Oracle,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Algo {
        match a {
            AlgoArg::Line => Algo::Line,
            AlgoArg::Approx => Algo::Approx,
            AlgoArg::Fpt => Algo::Fpt,
            AlgoArg::Oracle => Algo::Oracle,
        }
    }
}

const EXIT_NO: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INPUT: u8 = 3;

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::parse(0, format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Error> {
    parse_graph(&read(path)?)
}

fn load_pattern(path: &Path) -> Result<PatternGraph, Error> {
    parse_pattern(&read(path)?)
}

impl FamilyArgs {
    fn spec(&self, seed: u64) -> Result<InstanceSpec, Error> {
        let family = match self.family {
            FamilyArg::SubdividedH => {
                let pattern = match &self.pattern {
                    Some(p) => load_pattern(p)?,
                    None => return Err(Error::Param("subdivided-h needs --pattern".into())),
                };
                Family::SubdividedH { pattern, legs: self.legs, pendant_rate: self.pendant_rate }
            }
            FamilyArg::Cycle => Family::Cycle { n: self.n },
            FamilyArg::Spider => Family::Spider { legs: self.legs, len: self.len },
            FamilyArg::Caterpillar => Family::Caterpillar { spine: self.spine, pendant_rate: self.pendant_rate },
            FamilyArg::RandomTree => Family::RandomTree { n: self.n, chords: self.chords },
            FamilyArg::Clique => Family::Clique { k: self.k },
        };
        Ok(InstanceSpec::new(family, seed))
    }
}

/// Expanded host in DOT: pattern vertices as boxes, images labelled with
/// graph vertex labels.
fn embedding_dot(g: &Graph, emb: &Embedding) -> String {
    let host = &emb.host;
    let pat = &host.pattern;
    let mut label_at = std::collections::BTreeMap::new();
    for (v, p) in emb.image.iter().enumerate() {
        label_at.insert(format!("{p:?}"), g.label(v).to_string());
    }
    let mut out = String::from("graph host {\n");
    for (x, name) in pat.vertices.iter().enumerate() {
        let img = label_at.get(&format!("{:?}", Point::Vertex(x))).map(|l| format!(" [{l}]")).unwrap_or_default();
        out.push_str(&format!("  v{x} [shape=box, label=\"{name}{img}\"];\n"));
    }
    for (e, &(a, b)) in pat.edges.iter().enumerate() {
        let mut prev = (format!("v{a}"), rational::zero());
        for (i, t) in host.points[e].iter().enumerate() {
            let id = format!("e{e}_{i}");
            let label = label_at.get(&format!("{:?}", Point::Edge(e, t.clone()))).cloned().unwrap_or_default();
            out.push_str(&format!("  {id} [shape=point, xlabel=\"{label}\"];\n"));
            out.push_str(&format!("  {} -- {id} [label=\"{}\"];\n", prev.0, rational::to_string(&(t - &prev.1))));
            prev = (id, t.clone());
        }
        out.push_str(&format!("  {} -- v{b} [label=\"{}\"];\n", prev.0, rational::to_string(&(&host.lengths[e] - &prev.1))));
    }
    out.push_str("}\n");
    out
}

/// Image table, one row per graph vertex.
fn embedding_csv(g: &Graph, emb: &Embedding) -> String {
    let mut out = String::from("vertex,pattern_vertex,edge,offset\n");
    for (v, p) in emb.image.iter().enumerate() {
        match p {
            Point::Vertex(x) => out.push_str(&format!("{},{},,\n", g.label(v), emb.host.pattern.vertices[*x])),
            Point::Edge(e, t) => out.push_str(&format!("{},,{e},{}\n", g.label(v), rational::to_string(t))),
        }
    }
    out
}

fn print_embedding(g: &Graph, emb: &Embedding, report: &DistortionReport, extra: serde_json::Value, format: Option<Format>) {
    match format.unwrap_or(Format::Json) {
        Format::Dot => print!("{}", embedding_dot(g, emb)),
        Format::Csv => print!("{}", embedding_csv(g, emb)),
        Format::Json => {
            let emb_json: serde_json::Value = serde_json::from_str(&to_json(g, emb)).expect("embedding json");
            let out = json!({ "verdict": "EMBED", "report": report, "details": extra, "embedding": emb_json });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
    }
}

fn print_no(reason: &str) -> u8 {
    println!("{}", json!({ "verdict": "NO", "reason": reason }));
    EXIT_NO
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Gen { family, pattern_out, format } => {
            let spec = family.spec(family.seed)?;
            let (g, h) = harness::generate(&spec)?;
            if let Some(p) = pattern_out {
                fs::write(&p, h.to_edge_list()).map_err(|e| Error::Param(format!("{}: {e}", p.display())))?;
            }
            match format {
                Some(Format::Dot) => print!("{}", g.to_dot()),
                Some(Format::Json) => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({ "id": spec.id(), "graph": g.to_edge_list(), "pattern": h.to_edge_list() }))
                        .expect("json")
                ),
                _ => print!("{}", g.to_edge_list()),
            }
            Ok(0)
        }
        Command::EmbedLine { run, approx } => {
            let g = load_graph(&run.graph)?;
            if approx {
                return Ok(match line::line_embed_approx(&g, run.c) {
                    ApproxLine::Embedding(le) => {
                        let emb = le.to_embedding()?;
                        let report = distortion(&g, &emb)?;
                        print_embedding(&g, &emb, &report, json!({ "order": le.order }), run.format);
                        0
                    }
                    ApproxLine::CertifiedNo { root, triple } => {
                        print_no(&format!("layer of root {} holds far triple {:?}", g.label(root), triple.map(|v| g.label(v).to_string())))
                    }
                });
            }
            let mut budget = Budget::new(run.budget);
            let found = line::line_embed_exact(&g, run.c, &mut budget)?;
            if run.trace {
                eprintln!("states used: {}", budget.used);
            }
            Ok(match found {
                Some(le) => {
                    let emb = le.to_embedding()?;
                    let report = distortion(&g, &emb)?;
                    print_embedding(&g, &emb, &report, json!({ "order": le.order }), run.format);
                    0
                }
                None => print_no("no feasible window sequence"),
            })
        }
        Command::Approx { run, pattern } => {
            let g = load_graph(&run.graph)?;
            let h = load_pattern(&pattern)?;
            Ok(match approx_embed(&g, &h, run.c)? {
                ApproxOutcome::Embedding { embedding, report, subpattern, f } => {
                    if run.trace {
                        eprintln!("subpattern edges: {}, |F| = {}", subpattern.h(), f.len());
                    }
                    print_embedding(&g, &embedding, &report, json!({ "subpattern": subpattern.to_edge_list(), "f": f }), run.format);
                    0
                }
                ApproxOutcome::NoCEmbedding(reason) => print_no(&reason),
            })
        }
        Command::Fpt { run, pattern, no_gadget, force_gadget } => {
            let g = load_graph(&run.graph)?;
            let h = load_pattern(&pattern)?;
            let mode = if no_gadget {
                GadgetMode::Off
            } else if force_gadget {
                GadgetMode::Force
            } else {
                GadgetMode::Auto
            };
            let mut budget = Budget::new(run.budget);
            let out = fpt_embed_with(&g, &h, run.c, mode, &mut budget);
            if run.trace {
                eprintln!("states used: {}", budget.used);
            }
            Ok(match out? {
                FptOutcome::Embedding { embedding, report, subpattern, route } => {
                    if run.trace {
                        eprintln!("route {route:?}, subpattern edges: {}", subpattern.h());
                    }
                    print_embedding(
                        &g,
                        &embedding,
                        &report,
                        json!({ "route": route, "subpattern": subpattern.to_edge_list() }),
                        run.format,
                    );
                    0
                }
                FptOutcome::No(reason) => print_no(&reason),
            })
        }
        Command::Verify { graph, embedding } => {
            let g = load_graph(&graph)?;
            let text = read(&embedding)?;
            // accept the output of the embedding subcommands as well as a bare embedding
            let inner = match serde_json::from_str::<serde_json::Value>(&text) {
                Ok(serde_json::Value::Object(m)) if m.contains_key("embedding") => m["embedding"].to_string(),
                _ => text,
            };
            let emb = from_json(&g, &inner)?;
            let report = distortion(&g, &emb)?;
            let out = json!({
                "report": report,
                "pushing": is_pushing(&g, &emb).0,
                "proper": is_proper(&g, &emb).0,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
            Ok(if report.non_contracting { 0 } else { EXIT_NO })
        }
        Command::Oracle { graph, pattern, format } => {
            let g = load_graph(&graph)?;
            let h = match pattern {
                Some(p) => load_pattern(&p)?,
                None => PatternGraph::line(),
            };
            let (opt, emb) = if h.is_isomorphic(&PatternGraph::line()) {
                let (opt, le) = line::min_line_distortion_oracle(&g)?;
                (opt, le.to_embedding()?)
            } else if h.is_isomorphic(&PatternGraph::cycle()) {
                harness::min_cycle_distortion_oracle(&g)?
            } else {
                return Err(Error::Param("the oracle handles K2 and K3 only".into()));
            };
            let report = distortion(&g, &emb)?;
            print_embedding(&g, &emb, &report, json!({ "optimum": rational::to_string(&opt) }), format);
            Ok(0)
        }
        Command::Bench { family, seeds, c, algos, budget, format } => {
            if matches!(format, Some(Format::Dot)) {
                return Err(Error::Param("bench prints CSV or JSON".into()));
            }
            let cases =
                (family.seed..family.seed + seeds).map(|s| BenchCase::from_spec(&family.spec(s)?, c)).collect::<Result<Vec<_>, Error>>()?;
            let algos: Vec<Algo> = algos.into_iter().map(Algo::from).collect();
            let rows = harness::bench(&cases, &algos, budget);
            match format {
                Some(Format::Json) => println!("{}", serde_json::to_string_pretty(&rows).expect("json")),
                _ => print!("{}", harness::to_csv(&rows)),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.is_budget() => {
            eprintln!("error: {e}");
            println!("{}", json!({ "verdict": "BUDGET", "reason": e.to_string() }));
            ExitCode::from(EXIT_BUDGET)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
