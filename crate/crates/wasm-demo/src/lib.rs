//! Browser bindings: determinant scan, eigen-solve with eigenfunction, classical orbit.
//!
//! Every export takes and returns JSON strings. The `*_json` functions hold the logic
//! and run natively; the `#[wasm_bindgen]` wrappers only convert errors.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use twobody_core::classical::{classify, integrate_trajectory, radial_period_angle, turning_points, OrbitParams, OrbitPoint, Regime};
use twobody_core::model::{ChannelKind, Spin};
use twobody_core::{
    build_system, default_bracket, eigenfunction_full, find_eigenvalues, spectral_determinant, ChannelSpec, InteractionSpec, Parity,
    ParticleSpec, RadialSystem, SolverSettings,
};

/// Largest number of radial samples returned per eigenfunction.
const MAX_SAMPLES: usize = 400;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Particle {
    spin: Spin,
    mass: f64,
    #[serde(default = "one")]
    kappa: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Model {
    first: Particle,
    second: Particle,
    alpha: f64,
    #[serde(default)]
    sigma: f64,
    kind: ChannelKind,
    /// ℓ for SS, j for SF and FF.
    j: f64,
    #[serde(default = "parity_one")]
    parity: Parity,
}

fn parity_one() -> Parity {
    Parity::I
}

impl Model {
    fn system(&self) -> Result<RadialSystem, String> {
        let first = ParticleSpec::new(self.first.mass, self.first.spin, self.first.kappa).map_err(|e| e.to_string())?;
        let second = ParticleSpec::new(self.second.mass, self.second.spin, self.second.kappa).map_err(|e| e.to_string())?;
        let inter = InteractionSpec::new(self.alpha, self.sigma, 0.0).map_err(|e| e.to_string())?;
        let two_j = 2.0 * self.j;
        if !(two_j >= 0.0 && two_j.fract() == 0.0 && two_j < 1e6) {
            return Err(format!("j = {} is not a non-negative multiple of 1/2", self.j));
        }
        let spec = ChannelSpec { kind: self.kind, two_j: two_j as u32, parity: self.parity };
        spec.validate(&first, &second).map_err(|e| e.to_string())?;
        build_system(spec, first, second, inter).map_err(|e| e.to_string())
    }
}

fn parse_model(model: &str) -> Result<Model, String> {
    serde_json::from_str(model).map_err(|e| format!("model: {e}"))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
struct ScanPoint {
    binding: f64,
    lambda: f64,
    determinant: Option<f64>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct Scan {
    points: Vec<ScanPoint>,
    /// Indices i where the determinant changes sign between points i and i+1.
    sign_changes: Vec<usize>,
}

/// Matching determinant on `n` evenly spaced binding energies in [lo, hi].
pub fn determinant_scan_json(model: &str, lo: f64, hi: f64, n: usize) -> Result<String, String> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) || n == 0 || n > 100_000 {
        return Err("scan needs finite lo <= hi and 1 <= n <= 100000".into());
    }
    let sys = parse_model(model)?.system()?;
    let settings = SolverSettings::default();
    let n = if lo == hi { 1 } else { n };
    let threshold = sys.threshold();
    let points: Vec<ScanPoint> = (0..n)
        .map(|i| {
            let e = if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
            let (determinant, error) = match spectral_determinant(&sys, e, &settings) {
                Ok(m) => (Some(m.determinant), None),
                Err(err) => (None, Some(err.to_string())),
            };
            ScanPoint { binding: e, lambda: threshold + e, determinant, error }
        })
        .collect();
    let sign_changes = points
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| match (w[0].determinant, w[1].determinant) {
            (Some(a), Some(b)) if a * b < 0.0 => Some(i),
            _ => None,
        })
        .collect();
    to_json(&Scan { points, sign_changes })
}

#[derive(Debug, Serialize)]
struct Level {
    binding: f64,
    lambda: f64,
    nodes: usize,
    names: Vec<String>,
    r: Vec<f64>,
    /// values[i][k] is component i at r[k].
    values: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct Solve {
    levels: Vec<Level>,
    warnings: Vec<String>,
}

/// Lowest `count` levels of the channel, each with its full component set.
pub fn solve_json(model: &str, count: usize) -> Result<String, String> {
    if count == 0 || count > 50 {
        return Err("count must lie in 1..=50".into());
    }
    let sys = parse_model(model)?.system()?;
    let settings = SolverSettings::default();
    let spectrum = find_eigenvalues(&sys, default_bracket(&sys, count), count, &settings).map_err(|e| e.to_string())?;
    let mut levels = vec![];
    for res in &spectrum.levels {
        let full = eigenfunction_full(res, &sys).map_err(|e| e.to_string())?;
        let step = full.r.len().div_ceil(MAX_SAMPLES).max(1);
        let pick = |v: &[f64]| v.iter().step_by(step).copied().collect::<Vec<_>>();
        levels.push(Level {
            binding: res.binding,
            lambda: res.lambda,
            nodes: res.nodes,
            names: full.names.clone(),
            r: pick(&full.r),
            values: full.values.iter().map(|c| pick(c)).collect(),
        });
    }
    to_json(&Solve { levels, warnings: spectrum.warnings })
}

#[derive(Debug, Serialize)]
struct Orbit {
    regime: Regime,
    turning_points: Vec<f64>,
    period_angle: Option<f64>,
    points: Vec<OrbitPoint>,
}

/// Classical orbit between the turning points of a bound trajectory, or over
/// [r_min, r_max] when `r_max > r_min > 0` is given.
pub fn orbit_json(lambda: f64, l: f64, alpha: f64, m1: f64, m2: f64, samples: usize, r_min: f64, r_max: f64) -> Result<String, String> {
    let p = OrbitParams::new(lambda, l, alpha, m1, m2).map_err(|e| e.to_string())?;
    let regime = classify(&p);
    let tps = turning_points(&p);
    let explicit = r_min > 0.0 && r_max > r_min;
    let range = match tps.as_slice() {
        _ if explicit => (r_min, r_max),
        [a, b, ..] => (*a, *b),
        _ => return Err(format!("{regime:?} orbit has turning points {tps:?}; give a radial range")),
    };
    let samples = samples.clamp(2, 20_000);
    let sample = integrate_trajectory(&p, range, samples).map_err(|e| e.to_string())?;
    let period_angle = if tps.len() >= 2 && !explicit { Some(radial_period_angle(&p).map_err(|e| e.to_string())?) } else { None };
    to_json(&Orbit { regime, turning_points: tps, period_angle, points: sample.points })
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = determinantScan)]
pub fn determinant_scan(model: &str, lo: f64, hi: f64, n: usize) -> Result<String, JsError> {
    js(determinant_scan_json(model, lo, hi, n))
}

#[wasm_bindgen]
pub fn solve(model: &str, count: usize) -> Result<String, JsError> {
    js(solve_json(model, count))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn orbit(lambda: f64, l: f64, alpha: f64, m1: f64, m2: f64, samples: usize, r_min: f64, r_max: f64) -> Result<String, JsError> {
    js(orbit_json(lambda, l, alpha, m1, m2, samples, r_min, r_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const SS: &str = r#"{"first":{"spin":"scalar","mass":1},"second":{"spin":"scalar","mass":1},
        "alpha":0.0072973525698,"kind":"SS","j":0}"#;

    #[test]
    fn scan_brackets_ground_state() {
        let e = -1.331323e-5;
        let v: Value = serde_json::from_str(&determinant_scan_json(SS, e - 1e-6, e + 1e-6, 11).unwrap()).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 11);
        assert_eq!(v["sign_changes"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn solve_returns_eigenfunction() {
        let v: Value = serde_json::from_str(&solve_json(SS, 2).unwrap()).unwrap();
        let levels = v["levels"].as_array().unwrap();
        assert_eq!(levels.len(), 2);
        let e = levels[0]["binding"].as_f64().unwrap();
        assert!(((e + 1.331323e-5) / 1.331323e-5).abs() < 5e-5);
        assert_eq!(levels[1]["nodes"], 1);
        let r = levels[0]["r"].as_array().unwrap();
        assert!(r.len() <= MAX_SAMPLES && r.len() > 50);
        assert_eq!(levels[0]["values"][0].as_array().unwrap().len(), r.len());
    }

    #[test]
    fn fermion_pair_has_eight_components() {
        let ff = r#"{"first":{"spin":"fermion","mass":1836.15267245},"second":{"spin":"fermion","mass":1},
            "alpha":0.0072973525698,"kind":"FF","j":0}"#;
        let v: Value = serde_json::from_str(&solve_json(ff, 1).unwrap()).unwrap();
        assert_eq!(v["levels"][0]["names"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn orbit_period_angle() {
        let v: Value = serde_json::from_str(&orbit_json(1.95, 0.18, 0.3, 1.0, 1.0, 50, 0.0, 0.0).unwrap()).unwrap();
        let exact = 2.0 * std::f64::consts::PI / (1.0f64 - 0.09 / (4.0 * 0.0324)).sqrt();
        assert!((v["period_angle"].as_f64().unwrap() - exact).abs() < 1e-9);
        assert_eq!(v["points"].as_array().unwrap().len(), 50);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(solve_json(&SS.replace("\"j\":0", "\"j\":0.3"), 1).is_err());
        assert!(solve_json(&SS.replace("alpha", "alhpa"), 1).is_err());
        assert!(determinant_scan_json(SS, 1.0, 0.0, 3).is_err());
        assert!(orbit_json(1.95, 0.1, 0.3, 1.0, 1.0, 50, 0.0, 0.0).is_err());
    }
}
