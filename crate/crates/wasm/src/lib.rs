//! Browser bindings. Every entry point returns a JSON string for the page in
//! `www/` to draw; the `*_json` functions hold the logic and are callable
//! natively.

use serde_json::{json, Value};
use sparsedisc::discretization::{one_sided_check, universal_check, CheckOptions};
use sparsedisc::lowerbound::{min_m_threshold, sine_failure_certificate};
use sparsedisc::recovery::{womp_run, WompConfig};
use sparsedisc::rng::{self, complex_gaussian, random_support, AUX_STREAM_BASE};
use sparsedisc::sampling::{draw_points, sample_matrix};
use sparsedisc::{Dictionary, Domain, PointSet, SamplingMode};
use wasm_bindgen::prelude::*;

/// Support enumeration bound; keeps a click responsive.
pub const BROWSER_CAP: u128 = 200_000;

fn mode_of(name: &str) -> Result<SamplingMode, String> {
    match name {
        "iid-uniform" => Ok(SamplingMode::IidUniform),
        "stratified" => Ok(SamplingMode::Stratified),
        "equispaced" => Ok(SamplingMode::Equispaced),
        other => Err(format!("unknown sampling mode {other:?}")),
    }
}

fn first_coords(xi: &PointSet) -> Vec<f64> {
    xi.points().iter().map(|p| p[0]).collect()
}

pub fn discretization_check_json(half_width: u32, m: u32, mode: &str, v: u32, seed: u32) -> Result<Value, String> {
    let dict = Dictionary::trig(half_width as usize, 1, BROWSER_CAP).map_err(|e| e.to_string())?;
    let xi = draw_points(m as usize, Domain::torus(1), mode_of(mode)?, seed.into()).map_err(|e| e.to_string())?;
    let opts = CheckOptions {
        cap: BROWSER_CAP,
        ..CheckOptions::default()
    };
    let cert = universal_check(&dict, v as usize, &xi, 0.5, 1.5, &opts).map_err(|e| e.to_string())?;
    Ok(json!({
        "N": dict.len(),
        "m": xi.len(),
        "points": first_coords(&xi),
        "holds": cert.holds(),
        "c1_global": cert.c1_global,
        "c2_global": cert.c2_global,
        "min_support": cert.min_support.iter().map(|&i| dict.frequency(i).map(|k| k[0])).collect::<Vec<_>>(),
        "max_support": cert.max_support.iter().map(|&i| dict.frequency(i).map(|k| k[0])).collect::<Vec<_>>(),
        "supports_checked": cert.supports_checked as f64,
    }))
}

pub fn womp_trace_json(n: u32, v: u32, m: u32, t: f64, iterations: u32, seed: u32) -> Result<Value, String> {
    let dict = Dictionary::trig_window(n as usize).map_err(|e| e.to_string())?;
    let n = dict.len();
    if v == 0 || v as usize > n {
        return Err(format!("need 1 ≤ v ≤ N = {n}"));
    }
    let xi = draw_points(m as usize, dict.domain(), SamplingMode::IidUniform, seed.into())
        .map_err(|e| e.to_string())?;
    let mut r = rng::stream(seed.into(), AUX_STREAM_BASE);
    let support = random_support(&mut r, n, v as usize);
    let mut coeffs = vec![Default::default(); n];
    for &i in &support {
        coeffs[i] = complex_gaussian(&mut r);
    }
    let phi = sample_matrix(&dict, &xi).map_err(|e| e.to_string())?;
    let y = phi.apply(&coeffs);
    let cfg = WompConfig {
        weakness: t,
        max_iterations: iterations as usize,
        ..WompConfig::default()
    };
    let trace = womp_run(&phi, &y, &cfg).map_err(|e| e.to_string())?;
    let freq = |i: usize| dict.frequency(i).map(|k| k[0]);
    Ok(json!({
        "N": n,
        "m": xi.len(),
        "true_frequencies": support.iter().map(|&i| freq(i)).collect::<Vec<_>>(),
        "selected_frequencies": trace.selected.iter().map(|&i| freq(i)).collect::<Vec<_>>(),
        "residual_norms": trace.residual_norms,
    }))
}

pub fn sine_certificate_json(points: &[f64], n: u32, c1: f64) -> Result<Value, String> {
    if points.is_empty() {
        return Err("place at least one point".into());
    }
    let scale = std::f64::consts::SQRT_2;
    let xi = PointSet::explicit(Domain::unit_interval(), points.iter().map(|&x| vec![x]).collect())
        .map_err(|e| e.to_string())?;
    let cert = sine_failure_certificate(&xi, n.into(), c1, scale).map_err(|e| e.to_string())?;
    let dict = Dictionary::sine(n as usize, scale).map_err(|e| e.to_string())?;
    let check = one_sided_check(&dict, 1, &xi, c1, &CheckOptions::default()).map_err(|e| e.to_string())?;
    Ok(json!({
        "certificate": cert,
        "one_sided_holds": check.holds(),
        "one_sided_c1_global": check.c1_global,
        "worst_k": check.min_support.first().map(|&i| i + 1),
        "m_threshold": min_m_threshold(n.into(), c1, scale).map_err(|e| e.to_string())?,
    }))
}

fn to_js(r: Result<Value, String>) -> Result<String, JsError> {
    r.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

/// Universal check of `𝒯(M)` on the circle for `v`-sparse sums.
#[wasm_bindgen]
pub fn discretization_check(half_width: u32, m: u32, mode: &str, v: u32, seed: u32) -> Result<String, JsError> {
    to_js(discretization_check_json(half_width, m, mode, v, seed))
}

/// WOMP on samples of a random `v`-sparse sum over `n` centered frequencies.
#[wasm_bindgen]
pub fn womp_trace(n: u32, v: u32, m: u32, t: f64, iterations: u32, seed: u32) -> Result<String, JsError> {
    to_js(womp_trace_json(n, v, m, t, iterations, seed))
}

/// Failure certificate for the `n`-term sine system at the given points.
#[wasm_bindgen]
pub fn sine_certificate(points: Vec<f64>, n: u32, c1: f64) -> Result<String, JsError> {
    to_js(sine_certificate_json(&points, n, c1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equispaced_five_points_certify_exactly() {
        let r = discretization_check_json(2, 5, "equispaced", 2, 0).unwrap();
        assert_eq!(r["holds"], Value::Bool(true));
        assert!((r["c1_global"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn omp_recovers_with_enough_points() {
        let r = womp_trace_json(16, 2, 64, 1.0, 6, 3).unwrap();
        let res = r["residual_norms"].as_array().unwrap();
        assert!(res.last().unwrap().as_f64().unwrap() < 1e-8);
        let mut truth: Vec<i64> = r["true_frequencies"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
        let mut sel: Vec<i64> = r["selected_frequencies"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
        truth.sort_unstable();
        sel.sort_unstable();
        assert_eq!(truth, sel);
    }

    #[test]
    fn two_points_fail_for_sixty_four_sines() {
        let r = sine_certificate_json(&[0.3, 0.71], 64, 0.5).unwrap();
        assert!(r["certificate"].is_object());
        assert_eq!(r["one_sided_holds"], Value::Bool(false));
        assert!(sine_certificate_json(&[], 64, 0.5).is_err());
        assert!(discretization_check_json(2, 5, "grid", 2, 0).is_err());
    }
}
