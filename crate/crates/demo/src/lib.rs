//! Browser bindings for three photon-spinor operations. Every export returns
//! a JSON string so the page needs no generated type definitions.

use photon_spinor::algebra::build_operators;
use photon_spinor::fields::{state_to_grid, to_position, GridSpec};
use photon_spinor::lorentz::{boost_mode, covariance_check, longitudinal_probe, Boost};
use photon_spinor::modes::{make_mode, ModeState};
use photon_spinor::observables::{
    probability_density_variants, spin_density_variants, spin_expectation, DensityVariants, SpinMethod,
};
use photon_spinor::{Complex64, Units};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// One z-plane through the origin of the three density variants.
#[derive(Debug, Serialize)]
pub struct DensitySlice {
    pub n: usize,
    pub plain: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub integral_discrepancy: f64,
    pub spread_fraction: f64,
}

fn plane(grid: &GridSpec, values: &[f64], components: usize) -> Vec<f64> {
    let n = grid.n();
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let idx = grid.linear(i, j, n / 2);
            // spin variants: the z component
            out.push(values[idx * components + components - 1]);
        }
    }
    out
}

/// Two plane waves of wavenumber 4Δk with `angle_deg` between them. `mix`
/// moves the second wave from pure positive to pure negative helicity.
pub fn density_slice_json(n: usize, angle_deg: f64, mix: f64, spin: bool) -> Result<String, String> {
    let grid = GridSpec::new(n, 1.0).map_err(|e| e.to_string())?;
    let k = 4.0 * grid.dk();
    let (s, c) = angle_deg.to_radians().sin_cos();
    let mix = mix.clamp(0.0, 1.0);
    let modes = vec![
        make_mode([k, 0.0, 0.0], Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 1.0),
        make_mode(
            [k * c, k * s, 0.0],
            Complex64::new((1.0 - mix).sqrt(), 0.0),
            Complex64::new(0.0, mix.sqrt()),
            1.0,
        ),
    ];
    let state = ModeState::new(modes.into_iter().collect::<Result<_, _>>().map_err(|e| e.to_string())?);
    let x = to_position(&state_to_grid(&state, &grid).map_err(|e| e.to_string())?);
    let ops = build_operators();
    let d: DensityVariants = if spin {
        spin_density_variants(&x, &ops)
    } else {
        probability_density_variants(&x, &ops)
    }
    .map_err(|e| e.to_string())?;
    let slice = DensitySlice {
        n,
        plain: plane(&grid, &d.d_plain, d.components),
        plus: plane(&grid, &d.d_plus, d.components),
        minus: plane(&grid, &d.d_minus, d.components),
        integral_discrepancy: d.integral_discrepancy,
        spread_fraction: if d.peak > 0.0 {
            d.max_pointwise_spread / d.peak
        } else {
            0.0
        },
    };
    serde_json::to_string(&slice).map_err(|e| e.to_string())
}

/// Covariance residuals of a seeded random state boosted along x, and where
/// its first mode lands.
pub fn boost_report_json(beta: f64, seed: u64) -> Result<String, String> {
    let ops = build_operators();
    let units = Units::natural();
    let b = Boost::new(beta).map_err(|e| e.to_string())?;
    let state = ModeState::random(seed, 4, 0.5, 2.0);
    let probe = longitudinal_probe(GridSpec::new(16, 1.0).map_err(|e| e.to_string())?);
    let report = covariance_check(&ops, &state, &probe, &b, &units).map_err(|e| e.to_string())?;
    let first = &state.modes[0];
    let boosted = boost_mode(&ops, first, &b, &units).map_err(|e| e.to_string())?;
    let value = serde_json::json!({
        "report": report,
        "k": first.k.components(),
        "omega": first.k.omega(&units),
        "k_boosted": boosted.k.components(),
        "omega_boosted": boosted.k.omega(&units),
    });
    Ok(value.to_string())
}

/// The three spin expectation forms for a seeded random state.
pub fn spin_methods_json(seed: u64, count: usize) -> Result<String, String> {
    let ops = build_operators();
    let state = ModeState::random(seed, count.clamp(1, 64), 0.2, 5.0).normalize();
    let mut out = serde_json::Map::new();
    for (name, m) in [
        ("omega", SpinMethod::Omega),
        ("reduced", SpinMethod::Reduced),
        ("cross", SpinMethod::Cross),
    ] {
        let v = spin_expectation(&state, m, &ops).map_err(|e| e.to_string())?;
        out.insert(name.into(), serde_json::json!(v));
    }
    Ok(serde_json::Value::Object(out).to_string())
}

fn to_js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn density_slice(n: usize, angle_deg: f64, mix: f64, spin: bool) -> Result<String, JsError> {
    to_js(density_slice_json(n, angle_deg, mix, spin))
}

#[wasm_bindgen]
pub fn boost_report(beta: f64, seed: u32) -> Result<String, JsError> {
    to_js(boost_report_json(beta, seed as u64))
}

#[wasm_bindgen]
pub fn spin_methods(seed: u32, count: usize) -> Result<String, JsError> {
    to_js(spin_methods_json(seed as u64, count))
}
