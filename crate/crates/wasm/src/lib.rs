//! Browser bindings. Each operation takes plain numbers or strings and
//! returns a JSON string, so the page needs no generated type glue.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use theta_gabor::bargmann::bergman_density;
use theta_gabor::frames::{frame_bounds, PointSet};
use theta_gabor::localization::{parse_symbol, restriction_matrix, spectrum, RestrictionOptions, SpectrumOptions};
use theta_gabor::quadrature::TorusGrid;
use theta_gabor::{GaborParams, WindowSpec};

const MAX_N: usize = 64;

fn params(n: usize, omega_re: f64, omega_im: f64) -> Result<GaborParams, String> {
    if n == 0 || n > MAX_N {
        return Err(format!("N must be in 1..={MAX_N}"));
    }
    GaborParams::one_dim(n, omega_re, omega_im).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct Density {
    pub m_x: usize,
    pub m_xi: usize,
    /// Row-major over `(x, ξ)`, `ξ` fastest.
    pub rho: Vec<f64>,
    pub integral: f64,
    pub min: f64,
    pub max: f64,
}

pub fn density(n: usize, omega_re: f64, omega_im: f64, oversample: usize) -> Result<Density, String> {
    let p = params(n, omega_re, omega_im)?;
    let grid = TorusGrid::oversampled(n, 1, oversample.clamp(1, 16));
    let rep = bergman_density(&grid, &p).map_err(|e| e.to_string())?;
    Ok(Density { m_x: grid.m_x, m_xi: grid.m_xi, rho: rep.values, integral: rep.integral, min: rep.min, max: rep.max })
}

#[derive(Debug, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub trace_norm: f64,
    pub plunge_fraction: f64,
}

pub fn restriction_spectrum(n: usize, omega_re: f64, omega_im: f64, symbol: &str) -> Result<Spectrum, String> {
    let p = params(n, omega_re, omega_im)?;
    let sym = parse_symbol(symbol, 1).map_err(|e| e.to_string())?;
    let r = restriction_matrix(&sym, &p, &RestrictionOptions::default()).map_err(|e| e.to_string())?;
    let rep = spectrum(&r.matrix, &SpectrumOptions::default()).map_err(|e| e.to_string())?;
    Ok(Spectrum { eigenvalues: rep.eigenvalues, trace_norm: r.trace / n as f64, plunge_fraction: rep.plunge_fraction })
}

#[derive(Debug, Serialize)]
pub struct FrameCheck {
    pub is_frame: bool,
    pub a: f64,
    pub b: f64,
    pub singular_values: Vec<f64>,
    pub parity_no_frame: Option<bool>,
}

/// `flat` holds `k₀, l₀, k₁, l₁, …`.
pub fn frame_check(n: usize, omega_re: f64, omega_im: f64, flat: &[usize]) -> Result<FrameCheck, String> {
    let p = params(n, omega_re, omega_im)?;
    if !flat.len().is_multiple_of(2) {
        return Err("indices must come in (k, l) pairs".into());
    }
    let pairs: Vec<(usize, usize)> = flat.chunks(2).map(|c| (c[0], c[1])).collect();
    let pts = PointSet::from_pairs(&pairs, &p).map_err(|e| e.to_string())?;
    let rep = frame_bounds(&pts, &WindowSpec::Gaussian(p.clone()), &p).map_err(|e| e.to_string())?;
    Ok(FrameCheck {
        is_frame: rep.is_frame,
        a: rep.a,
        b: rep.b,
        singular_values: rep.singular_values,
        parity_no_frame: rep.parity.map(|q| q.no_frame),
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.map(|v| serde_json::to_string(&v).expect("serialize")).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = densityGrid)]
pub fn density_js(n: usize, omega_re: f64, omega_im: f64, oversample: usize) -> Result<String, JsValue> {
    to_js(density(n, omega_re, omega_im, oversample))
}

#[wasm_bindgen(js_name = restrictionSpectrum)]
pub fn restriction_spectrum_js(n: usize, omega_re: f64, omega_im: f64, symbol: &str) -> Result<String, JsValue> {
    to_js(restriction_spectrum(n, omega_re, omega_im, symbol))
}

#[wasm_bindgen(js_name = frameCheck)]
pub fn frame_check_js(n: usize, omega_re: f64, omega_im: f64, flat: Vec<usize>) -> Result<String, JsValue> {
    to_js(frame_check(n, omega_re, omega_im, &flat))
}
