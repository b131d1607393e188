//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON string; errors come back as `{"error": "..."}`
//! so the page never has to deal with exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use genuskit::order_genus::{self, MatTuple};
use genuskit::{checks, matrix_mod, Atom, Limits, Result};

/// Enumerations in the browser get a smaller budget than the CLI default.
const BROWSER_CAP: usize = 400_000;

fn limits() -> Limits {
    Limits::with_cap(BROWSER_CAP)
}

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn scalar_pair(t: &MatTuple) -> (u64, u64) {
    (t[0].entries()[0], t[1].entries()[0])
}

/// Double cosets of `Z x_m Z` laid out on the grid of unit pairs `(a, b)`.
///
/// Returns `{m, units, cells: [[a, b, block], ...], blockSizes, brute, formula}`.
pub fn pullback_grid_value(m: u32) -> Result<Value> {
    let spec = order_genus::pullback_spec(m as u64)?;
    let blocks = order_genus::double_cosets(&spec, &limits())?;
    let units: Vec<u64> = genuskit::units(m as u64)?
        .iter()
        .map(|r| r.value())
        .collect();
    let mut cells = Vec::new();
    for (id, block) in blocks.iter().enumerate() {
        for t in block {
            let (a, b) = scalar_pair(t);
            cells.push(json!([a, b, id]));
        }
    }
    Ok(json!({
        "m": m,
        "units": units,
        "cells": cells,
        "blockSizes": blocks.iter().map(Vec::len).collect::<Vec<_>>(),
        "brute": blocks.len(),
        "formula": order_genus::genus_pullback_formula(m as u64)?,
    }))
}

#[wasm_bindgen]
pub fn pullback_grid(m: u32) -> String {
    respond(pullback_grid_value(m))
}

pub fn atom_info_value(name: &str) -> Result<Value> {
    let atom: Atom = name.trim().parse()?;
    Ok(json!({
        "atom": atom.to_string(),
        "torsion": atom.is_torsion(),
        "b0": atom.rational_wedge(),
        "endo": serde_json::to_value(atom.endo_order()).expect("serializable"),
        "genus": atom.genus(&limits())?,
    }))
}

#[wasm_bindgen]
pub fn atom_info(name: &str) -> String {
    respond(atom_info_value(name))
}

pub fn stable_image_value(r: u32, m: u32) -> Result<Value> {
    let (r, m) = (r as usize, m as u64);
    let gl = matrix_mod::enumerate_gl(r, m, &limits())?.order();
    let image = matrix_mod::stable_image(r, m, &limits())?.order();
    Ok(json!({ "r": r, "m": m, "glOrder": gl, "imageOrder": image, "index": gl / image }))
}

#[wasm_bindgen]
pub fn stable_image_summary(r: u32, m: u32) -> String {
    respond(stable_image_value(r, m))
}

#[wasm_bindgen]
pub fn atom_a_table() -> String {
    respond(
        checks::atom_a_rows(&limits())
            .map(|rows| serde_json::to_value(rows).expect("serializable")),
    )
}
