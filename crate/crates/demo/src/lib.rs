//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; errors become JS exceptions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde_json::json;
use spinboson::jump::{estimate_moment_mc, moment_closed_form};
use spinboson::series::{self, Radius};
use spinboson::{Kernel, KernelSpec};
use wasm_bindgen::prelude::*;

fn indicator(cutoff: f64) -> Result<Kernel, String> {
    Kernel::new(KernelSpec::indicator(cutoff)).map_err(|e| e.to_string())
}

fn radius_json(r: Radius) -> serde_json::Value {
    match r {
        Radius::Finite(x) => json!(x),
        Radius::Unbounded => json!("unbounded"),
    }
}

/// `h(s)` on `points` evenly spaced values in `[0, s_max]`, with the norms.
pub fn kernel_curve_json(cutoff: f64, s_max: f64, points: usize) -> Result<String, String> {
    if !(s_max > 0.0) || points < 2 {
        return Err("need s_max > 0 and at least 2 points".into());
    }
    let k = indicator(cutoff)?;
    let s: Vec<f64> = (0..points).map(|i| s_max * i as f64 / (points - 1) as f64).collect();
    let h: Vec<f64> = s.iter().map(|&x| k.h(x)).collect();
    Ok(json!({ "s": s, "h": h, "norm_inf": k.norm_inf(), "norm_l1": k.norm_l1() }).to_string())
}

/// Radius certificate and the remainder bound at coupling `lambda`.
pub fn certificate_json(cutoff: f64, gamma: f64, lambda: f64, pmax: usize) -> Result<String, String> {
    let k = indicator(cutoff)?;
    let r = series::radius_bound_gamma(&k, gamma).map_err(|e| e.to_string())?;
    let alpha = series::alpha_from_lambda(lambda);
    let tail = series::tail_bound(alpha, pmax, &k, gamma).ok();
    Ok(json!({
        "R_min": radius_json(r),
        "lambda_radius": radius_json(series::lambda_radius(r)),
        "K": series::k_constant(&k, gamma).map_err(|e| e.to_string())?,
        "alpha": alpha,
        "tail_bound": tail,
    })
    .to_string())
}

/// Closed-form spin moment and its Monte Carlo estimate.
pub fn moment_json(times: &[f64], samples: u32, seed: u32) -> Result<String, String> {
    let closed = moment_closed_form(times).map_err(|e| e.to_string())?;
    let est = estimate_moment_mc(times, samples as u64, seed as u64).map_err(|e| e.to_string())?;
    Ok(json!({ "closed_form": closed, "estimate": est.value, "std_error": est.std_error, "samples": samples }).to_string())
}

#[wasm_bindgen]
pub fn kernel_curve(cutoff: f64, s_max: f64, points: usize) -> Result<String, JsError> {
    kernel_curve_json(cutoff, s_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn certificate(cutoff: f64, gamma: f64, lambda: f64, pmax: usize) -> Result<String, JsError> {
    certificate_json(cutoff, gamma, lambda, pmax).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn moment(times: Vec<f64>, samples: u32, seed: u32) -> Result<String, JsError> {
    moment_json(&times, samples, seed).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn curve_starts_at_norm_inf() {
        let v: Value = serde_json::from_str(&kernel_curve_json(1.0, 5.0, 11).unwrap()).unwrap();
        let h0 = v["h"][0].as_f64().unwrap();
        assert!((h0 - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(v["s"].as_array().unwrap().len(), 11);
        assert!(kernel_curve_json(1.0, 0.0, 11).is_err());
        assert!(kernel_curve_json(-1.0, 1.0, 11).is_err());
    }

    #[test]
    fn certificate_values() {
        let v: Value = serde_json::from_str(&certificate_json(1.0, 0.5, 0.1, 2).unwrap()).unwrap();
        assert!((v["R_min"].as_f64().unwrap() - 7.5416e-4).abs() < 1e-7);
        assert!(v["tail_bound"].as_f64().unwrap() > 0.0);
        let outside: Value = serde_json::from_str(&certificate_json(1.0, 0.5, 1.0, 2).unwrap()).unwrap();
        assert!(outside["tail_bound"].is_null());
    }

    #[test]
    fn moment_pair() {
        let v: Value = serde_json::from_str(&moment_json(&[0.5, 1.5], 20_000, 1).unwrap()).unwrap();
        assert!((v["closed_form"].as_f64().unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert!(moment_json(&[1.0, 0.5], 10, 1).is_err());
    }
}
