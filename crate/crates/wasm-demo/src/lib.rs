//! Browser bindings. Each export takes edge-list text and returns a JSON
//! document; the plain functions carry the logic so they also run natively.

use hembed::approx::{approx_embed, ApproxOutcome};
use hembed::embedding::{distortion, from_json, is_proper, is_pushing, to_json};
use hembed::graph::parse_graph;
use hembed::line::line_embed_exact;
use hembed::pattern::parse_pattern;
use hembed::{Budget, DistortionReport, Embedding, Graph};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Budget of one browser call, kept small so the page stays responsive.
pub const DEMO_BUDGET: u64 = 200_000;

fn found(g: &Graph, emb: &Embedding, report: &DistortionReport) -> Value {
    let emb: Value = serde_json::from_str(&to_json(g, emb)).expect("embedding json");
    json!({ "verdict": "EMBED", "report": report, "embedding": emb })
}

pub fn line_json(graph: &str, c: u32) -> Result<String, String> {
    let g = parse_graph(graph).map_err(|e| e.to_string())?;
    let mut budget = Budget::new(DEMO_BUDGET);
    let out = match line_embed_exact(&g, c, &mut budget).map_err(|e| e.to_string())? {
        Some(le) => {
            let emb = le.to_embedding().map_err(|e| e.to_string())?;
            let report = distortion(&g, &emb).map_err(|e| e.to_string())?;
            found(&g, &emb, &report)
        }
        None => json!({ "verdict": "NO" }),
    };
    Ok(out.to_string())
}

pub fn verify_json(graph: &str, embedding: &str) -> Result<String, String> {
    let g = parse_graph(graph).map_err(|e| e.to_string())?;
    let inner = match serde_json::from_str::<Value>(embedding) {
        Ok(Value::Object(m)) if m.contains_key("embedding") => m["embedding"].to_string(),
        _ => embedding.to_string(),
    };
    let emb = from_json(&g, &inner).map_err(|e| e.to_string())?;
    let report = distortion(&g, &emb).map_err(|e| e.to_string())?;
    Ok(json!({ "report": report, "pushing": is_pushing(&g, &emb).0, "proper": is_proper(&g, &emb).0 }).to_string())
}

pub fn approx_json(graph: &str, pattern: &str, c: u32) -> Result<String, String> {
    let g = parse_graph(graph).map_err(|e| e.to_string())?;
    let h = parse_pattern(pattern).map_err(|e| e.to_string())?;
    let out = match approx_embed(&g, &h, c).map_err(|e| e.to_string())? {
        ApproxOutcome::Embedding { embedding, report, .. } => found(&g, &embedding, &report),
        ApproxOutcome::NoCEmbedding(reason) => json!({ "verdict": "NO", "reason": reason }),
    };
    Ok(out.to_string())
}

#[wasm_bindgen]
pub fn embed_line(graph: &str, c: u32) -> Result<String, JsError> {
    line_json(graph, c).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn verify(graph: &str, embedding: &str) -> Result<String, JsError> {
    verify_json(graph, embedding).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn approx(graph: &str, pattern: &str, c: u32) -> Result<String, JsError> {
    approx_json(graph, pattern, c).map_err(|e| JsError::new(&e))
}
