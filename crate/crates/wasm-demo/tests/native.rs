use hembed_wasm_demo::{approx_json, line_json, verify_json};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn line_then_verify() {
    let g = "0 1\n0 2\n0 3\n";
    assert_eq!(parse(&line_json(g, 2).unwrap())["verdict"], "NO");
    let out = line_json(g, 3).unwrap();
    assert_eq!(parse(&out)["report"]["distortion"], "3/1");
    let v = parse(&verify_json(g, &out).unwrap());
    assert_eq!(v["report"]["non_contracting"], true);
    assert_eq!(v["proper"], true);
}

#[test]
fn approx_on_cycle() {
    let g = "0 1\n1 2\n2 3\n3 4\n4 0\n";
    let out = parse(&approx_json(g, "a b\nb c\nc a\n", 1).unwrap());
    assert_eq!(out["verdict"], "EMBED");
    assert_eq!(out["report"]["non_contracting"], true);
}

#[test]
fn errors_are_messages() {
    assert!(line_json("0 x\n", 1).is_err());
    assert!(verify_json("0 1\n", "{}").is_err());
}
