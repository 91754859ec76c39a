//! wasm-bindgen exports for the static demo page in `www/`.

use foldcheck::fold_dp::{witness_json, Mode};
use foldcheck::pattern::{self, build_pattern};
use foldcheck::pipeline::{self, NoClock, Options, RunReport};
use foldcheck::svg;
use foldcheck::testgen::{self, GenSpec, Kind};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Runs the full check on FOLD JSON text. Returns a JSON object with
/// `report`, `witness` and `svg` (the arrangement shaded by ply, absent
/// when the pattern is not locally flat-foldable).
#[wasm_bindgen]
pub fn check_pattern(fold_json: &str, ignore_labels: bool) -> Result<String, JsError> {
    let mode = if ignore_labels { Mode::Unlabeled } else { Mode::Labeled };
    let opts = Options { mode, threads: 1 };
    let a = pipeline::analyze(fold_json.as_bytes(), &opts, &mut NoClock).map_err(err)?;
    let report = serde_json::to_value(RunReport::from_analysis(&a, mode, false)).map_err(err)?;
    let witness = a.solved.as_ref().and_then(|s| s.outcome.witness.as_ref());
    let witness: Value = serde_json::from_str(&witness_json(witness)).map_err(err)?;
    let svg = a.solved.as_ref().map(|s| svg::render_arrangement(&s.arrangement));
    Ok(json!({ "report": report, "witness": witness, "svg": svg }).to_string())
}

/// Generates a pattern as FOLD JSON. `kind` is one of `accordion`,
/// `map-grid`, `random-vertex` or `simple-fold`; `a` and `b` are the size
/// parameters (crease count, rows and columns, degree, fold count).
#[wasm_bindgen]
pub fn generate(kind: &str, a: u32, b: u32, seed: u64, flips: u32) -> Result<String, JsError> {
    let (a, b) = (a as usize, b as usize);
    let kind = match kind {
        "accordion" => Kind::Accordion { n: a },
        "map-grid" => Kind::MapGrid { rows: a, cols: b },
        "random-vertex" => Kind::RandomVertex { degree: a, labels: None },
        "simple-fold" => Kind::SimpleFold { k: a },
        other => return Err(JsError::new(&format!("unknown kind {other}"))),
    };
    let input = testgen::generate(&GenSpec { seed, kind, flips: flips as usize }).map_err(err)?;
    Ok(input.to_fold_json())
}

/// Draws the crease pattern itself, before any folding.
#[wasm_bindgen]
pub fn render_crease_pattern(fold_json: &str) -> Result<String, JsError> {
    let input = pattern::parse(fold_json.as_bytes()).map_err(err)?;
    let cp = build_pattern(&input).map_err(err)?;
    Ok(svg::render_pattern(&cp))
}
