use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn hembed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hembed")).args(args).output().expect("run hembed")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

const STAR: &str = "0 1\n0 2\n0 3\n";
const PATH4: &str = "0 1\n1 2\n2 3\n";

#[test]
fn line_yes_no_and_verify() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.txt", STAR);
    let no = hembed(&["embed-line", "--graph", &g, "--c", "2"]);
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(json(&no)["verdict"], "NO");
    let yes = hembed(&["embed-line", "--graph", &g, "--c", "3"]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(json(&yes)["report"]["distortion"], "3/1");
    let e = write(dir.path(), "e.json", std::str::from_utf8(&yes.stdout).unwrap());
    let v = hembed(&["verify", "--graph", &g, "--embedding", &e]);
    assert_eq!(v.status.code(), Some(0));
    let r = json(&v);
    assert_eq!(r["report"]["non_contracting"], true);
    assert_eq!(r["report"]["distortion"], "3/1");
}

#[test]
fn verify_rejects_contraction_and_duplicates() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.txt", PATH4);
    let yes = hembed(&["embed-line", "--graph", &g, "--c", "1"]);
    let mut doc = json(&yes)["embedding"].clone();
    let text = doc.to_string();
    let e = write(dir.path(), "ok.json", &text);
    assert_eq!(hembed(&["verify", "--graph", &g, "--embedding", &e]).status.code(), Some(0));

    // halve every length and offset: still proper, now contracting
    let halve = |v: &mut serde_json::Value| {
        let s = v.as_str().unwrap();
        let (p, q) = s.split_once('/').unwrap_or((s, "1"));
        *v = serde_json::Value::String(format!("{p}/{}", q.parse::<u64>().unwrap() * 2));
    };
    fn walk(v: &mut serde_json::Value, f: &dyn Fn(&mut serde_json::Value)) {
        match v {
            serde_json::Value::String(s) if s.contains('/') => f(v),
            serde_json::Value::Array(a) => a.iter_mut().for_each(|x| walk(x, f)),
            serde_json::Value::Object(m) => m.values_mut().for_each(|x| walk(x, f)),
            _ => {}
        }
    }
    walk(&mut doc, &halve);
    let e = write(dir.path(), "half.json", &doc.to_string());
    let v = hembed(&["verify", "--graph", &g, "--embedding", &e]);
    assert_ne!(v.status.code(), Some(0));

    // two vertices on one point
    let mut d: serde_json::Value = serde_json::from_str(&text).unwrap();
    let off = d["points"][0][0]["offset"].clone();
    d["points"][0][1]["offset"] = off;
    let e = write(dir.path(), "dup.json", &d.to_string());
    let v = hembed(&["verify", "--graph", &g, "--embedding", &e]);
    assert_ne!(v.status.code(), Some(0));
}

#[test]
fn fpt_and_approx_on_generated_spider() {
    let dir = TempDir::new().unwrap();
    let h = dir.path().join("h.txt");
    let gen = hembed(&["gen", "--family", "spider", "--legs", "3", "--len", "3", "--seed", "4", "--pattern-out", h.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0));
    let g = write(dir.path(), "g.txt", std::str::from_utf8(&gen.stdout).unwrap());
    let f = hembed(&["fpt", "--graph", &g, "--pattern", h.to_str().unwrap(), "--c", "1"]);
    assert_eq!(f.status.code(), Some(0));
    assert_eq!(json(&f)["report"]["distortion"], "1/1");
    let a = hembed(&["approx", "--graph", &g, "--pattern", h.to_str().unwrap(), "--c", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a)["report"]["non_contracting"], true);
}

#[test]
fn fpt_budget_and_input_errors() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.txt", STAR);
    let h = write(dir.path(), "h.txt", "0 1\n");
    let b = hembed(&["fpt", "--graph", &g, "--pattern", &h, "--c", "1", "--force-gadget", "--budget", "50"]);
    assert_eq!(b.status.code(), Some(2));
    assert_eq!(json(&b)["verdict"], "BUDGET");
    let bad = write(dir.path(), "bad.txt", "0 x\n");
    assert_eq!(hembed(&["fpt", "--graph", &bad, "--pattern", &h]).status.code(), Some(3));
    assert_eq!(hembed(&["embed-line", "--graph", "/nonexistent/graph"]).status.code(), Some(3));
}

#[test]
fn oracle_and_bench() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.txt", "0 1\n1 2\n2 3\n3 0\n");
    let o = hembed(&["oracle", "--graph", &g]);
    assert_eq!(json(&o)["details"]["optimum"], "3/1");
    let k3 = write(dir.path(), "k3.txt", "a b\nb c\nc a\n");
    let o = hembed(&["oracle", "--graph", &g, "--pattern", &k3]);
    assert_eq!(json(&o)["details"]["optimum"], "1/1");
    let b = hembed(&["bench", "--family", "cycle", "--n", "5", "--seeds", "2", "--c", "1", "--algos", "fpt,oracle"]);
    assert_eq!(b.status.code(), Some(0));
    let text = String::from_utf8(b.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,family,n,h,c,algo,verdict,distortion,oracle_opt,micros");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.contains(",EMBED,1/1,")));
}

#[test]
fn dot_and_csv_formats() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.txt", PATH4);
    let d = hembed(&["embed-line", "--graph", &g, "--format", "dot"]);
    assert!(String::from_utf8(d.stdout).unwrap().starts_with("graph host {"));
    let c = hembed(&["embed-line", "--graph", &g, "--format", "csv"]);
    let text = String::from_utf8(c.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    let gen = hembed(&["gen", "--family", "clique", "--k", "4", "--format", "dot"]);
    assert!(String::from_utf8(gen.stdout).unwrap().contains("--"));
}
