//! wasm-bindgen entry points for the static page in `www/`.
//!
//! Each export wraps a plain function in [`ops`] that builds a synthetic
//! graph from a seed where needed and returns a flat `Vec<f64>` (a
//! `Float64Array` on the JS side). Errors become JS exceptions.

use wasm_bindgen::prelude::*;

pub mod ops;

fn js(e: lwdp_core::error::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[node, λ, LS, GS, S*(β_1), ...]` for the busiest node of a random graph.
#[wasm_bindgen]
pub fn sensitivity_curve(
    nodes: usize,
    density: f64,
    max_weight: i32,
    seed: u32,
    eps1: f64,
    unbiased: bool,
    betas: &[f64],
) -> Result<Vec<f64>, JsError> {
    ops::sensitivity_curve(
        nodes,
        density,
        max_weight.into(),
        seed.into(),
        eps1,
        unbiased,
        betas,
    )
    .map_err(js)
}

/// Rows of `[w_T - λ, E[biased], Var[biased], Var[unbiased]]`.
#[wasm_bindgen]
pub fn estimator_moments(p: f64, lo: i32, hi: i32) -> Result<Vec<f64>, JsError> {
    ops::estimator_moments(p, lo.into(), hi.into()).map_err(js)
}

/// `[f(G), two-step k~, baseline k~, weight uploads, downloads, count uploads, |Δ|]`.
#[wasm_bindgen]
pub fn protocol_run(
    nodes: usize,
    density: f64,
    max_weight: i32,
    seed: u32,
    eps: f64,
    unbiased: bool,
    smooth: bool,
) -> Result<Vec<f64>, JsError> {
    ops::protocol_run(
        nodes,
        density,
        max_weight.into(),
        seed.into(),
        eps,
        unbiased,
        smooth,
    )
    .map_err(js)
}
