//! Browser bindings. The plain functions return JSON strings and compile on
//! any target; the exported wrappers only convert errors for JavaScript.

use gradwin::graded_semilinear::{NewtonPolygon, SigmaModuleJson, SlopeMultiset};
use gradwin::local_model::{chart_presentation, ChartReport, ChartSpec, Presentation};
use gradwin::sym_structure::{LadderStep, RaiseOrder, SymSpec};
use gradwin::{Ring, RingParams};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct CheckLine {
    name: String,
    pass: bool,
}

#[derive(Serialize)]
struct SymSummary {
    p: u64,
    precision: u32,
    r: usize,
    b: Vec<usize>,
    n: usize,
    sigma: Vec<usize>,
    omega: Vec<usize>,
    f: Vec<Vec<usize>>,
    z_i: Vec<usize>,
    slopes_n: SlopeMultiset,
    slopes_m: SlopeMultiset,
    expected_slopes_m: SlopeMultiset,
    pass: bool,
    checks: Vec<CheckLine>,
    ladder: Vec<LadderStep>,
}

#[derive(Serialize)]
struct PolygonSummary {
    ranks: Vec<usize>,
    polygon: NewtonPolygon,
}

#[derive(Serialize)]
struct ChartSummary {
    presentation: Presentation,
    report: ChartReport,
    pass: bool,
}

fn ring(p: u64, r: usize, precision: u32) -> Result<Ring, String> {
    Ring::new(RingParams::new(p, r, precision, 1)).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("summaries serialize")
}

/// Builds and verifies a Sym-structure from a JSON spec.
pub fn sym_summary_json(spec_json: &str, p: u64, precision: u32) -> Result<String, String> {
    let spec: SymSpec = serde_json::from_str(spec_json).map_err(|e| format!("spec: {e}"))?;
    let k = ring(p, spec.r, precision)?;
    let s = k.build_sym(&spec, RaiseOrder::Default).map_err(|e| e.to_string())?;
    let rep = k.verify_sym(&s).map_err(|e| e.to_string())?;
    let params = &s.params;
    Ok(to_json(&SymSummary {
        p,
        precision,
        r: params.r,
        b: params.b.clone(),
        n: params.n,
        sigma: params.sigma.clone(),
        omega: params.omega.clone(),
        f: params.f.clone(),
        z_i: params.z_i.clone(),
        slopes_n: rep.slopes_n.clone(),
        slopes_m: rep.slopes_m.clone(),
        expected_slopes_m: rep.expected_slopes_m.clone(),
        pass: rep.passed(),
        checks: rep.checks.iter().map(|c| CheckLine { name: c.name.clone(), pass: c.pass }).collect(),
        ladder: rep.ladder.clone(),
    }))
}

/// Graded Newton polygon of a module given as ranks and matrices.
pub fn newton_polygon_json(module_json: &str, p: u64, precision: u32) -> Result<String, String> {
    let mj: SigmaModuleJson = serde_json::from_str(module_json).map_err(|e| format!("module: {e}"))?;
    let k = ring(p, mj.ranks.len(), precision)?;
    let m = k.module_from_json(&mj).map_err(|e| e.to_string())?;
    let polygon = k.graded_polygon(&m).map_err(|e| e.to_string())?;
    Ok(to_json(&PolygonSummary { ranks: m.ranks().to_vec(), polygon }))
}

/// Samples one local-model chart and compares the two formulations.
pub fn local_model_json(n: usize, k: usize, nu: usize, mu: usize, p: u64, samples: usize, seed: u64) -> Result<String, String> {
    let chart = ChartSpec::new(n, k, nu, mu).map_err(|e| e.to_string())?;
    let report = ring(p, 1, 6)?.sample_chart(&chart, samples, seed).map_err(|e| e.to_string())?;
    let pass = report.passed();
    Ok(to_json(&ChartSummary { presentation: chart_presentation(&chart), report, pass }))
}

#[wasm_bindgen(js_name = symBuild)]
pub fn sym_build(spec_json: &str, p: u32, precision: u32) -> Result<String, JsValue> {
    sym_summary_json(spec_json, p.into(), precision).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = newtonPolygon)]
pub fn newton_polygon(module_json: &str, p: u32, precision: u32) -> Result<String, JsValue> {
    newton_polygon_json(module_json, p.into(), precision).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = localModel)]
pub fn local_model(n: u32, k: u32, nu: u32, mu: u32, p: u32, samples: u32, seed: u32) -> Result<String, JsValue> {
    local_model_json(n as usize, k as usize, nu as usize, mu as usize, p.into(), samples as usize, seed.into())
        .map_err(|e| JsValue::from_str(&e))
}
