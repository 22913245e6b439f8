//! Browser bindings. Each export returns a JSON string; the plain functions
//! underneath are what the native tests call.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use onehot_core::bench::{run_shadow_bounds, run_tradeoff, Experiment, ExperimentSpec};
use onehot_core::conversions::{crt_to_one_hot, duplicate_submaps, encrypt_crt};
use onehot_core::representations::{find_crt_basis, BasisStrategy, CrtRep};
use onehot_core::simd::HeContext;

/// Largest CRT product the demo will simulate exactly.
pub const MAX_DEMO_M: u64 = 4096;

#[derive(Serialize)]
pub struct CrtDemo {
    pub moduli: Vec<u64>,
    pub m: u64,
    pub slots: u64,
    pub residues: Vec<u64>,
    pub submaps: Vec<Vec<u8>>,
    pub duplicated: Vec<Vec<u8>>,
    pub one_hot_index: usize,
    pub ct_mults: u64,
    pub depth: u32,
    pub rotations: u64,
}

fn to_bits(v: &[f64], len: usize) -> Vec<u8> {
    v[..len].iter().map(|x| x.round() as u8).collect()
}

pub fn crt_demo(n: u64, a: u64) -> Result<CrtDemo, String> {
    let basis = find_crt_basis(n, BasisStrategy::default()).map_err(|e| e.to_string())?.basis;
    if basis.m() > MAX_DEMO_M {
        return Err(format!("m = {} is too large for the demo (limit {MAX_DEMO_M})", basis.m()));
    }
    let m = basis.m() as usize;
    let ctx = HeContext::exact(m.next_power_of_two()).map_err(|e| e.to_string())?;
    let rep = CrtRep::encode(a, &basis).map_err(|e| e.to_string())?;
    let subs = encrypt_crt(&ctx, &rep).map_err(|e| e.to_string())?;
    let dup = duplicate_submaps(&ctx, &subs, &basis).map_err(|e| e.to_string())?;
    let r = crt_to_one_hot(&ctx, &subs, &basis).map_err(|e| e.to_string())?;
    let out = ctx.decrypt_real(&r.output);
    let one_hot_index = out[..m].iter().position(|&v| v == 1.0).ok_or("no hot slot")?;
    Ok(CrtDemo {
        moduli: basis.moduli().to_vec(),
        m: basis.m(),
        slots: basis.slot_cost(),
        residues: rep.residues(),
        submaps: rep.submaps.iter().map(|s| s.bits().to_vec()).collect(),
        duplicated: dup.iter().map(|d| to_bits(&ctx.decrypt_real(d), m)).collect(),
        one_hot_index,
        ct_mults: r.cost.ct_mults,
        depth: r.cost.max_depth,
        rotations: r.cost.rotations,
    })
}

pub fn shadow_bounds_json(max_level: usize) -> Result<String, String> {
    let rows = run_shadow_bounds(max_level).map_err(|e| e.to_string())?;
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

pub fn tradeoff_json(n: u64, shape: &str) -> Result<String, String> {
    let mut spec = ExperimentSpec::new(Experiment::Tradeoff);
    spec.n = Some(vec![n]);
    spec.shape = Some(shape.to_string());
    let rows = run_tradeoff(&spec).map_err(|e| e.to_string())?;
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = crtExample)]
pub fn crt_example(n: u32, a: u32) -> Result<String, JsError> {
    let demo = crt_demo(n as u64, a as u64).map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&demo).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = shadowBounds)]
pub fn shadow_bounds(max_level: u32) -> Result<String, JsError> {
    shadow_bounds_json(max_level as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = tradeoff)]
pub fn tradeoff(n: u32, shape: &str) -> Result<String, JsError> {
    tradeoff_json(n as u64, shape).map_err(|e| JsError::new(&e))
}
