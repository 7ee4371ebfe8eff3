use num_complex::Complex64;
use photon_spinor::algebra::build_operators;
use photon_spinor::fields::{GridSpec, SpectralField};
use photon_spinor::observables::{orbital_am_expectation, spin_expectation, total_probability, SpinMethod};
use photon_spinor::vector::*;
use photon_spinor::Error;

/// Transverse projection of (x̂+iŷ)(k_x+ik_y)·G(k): an exact J_z = 2 eigenstate.
fn vortex(n: usize, k0: f64, sigma: f64) -> SpectralField {
    let grid = GridSpec::new(n, std::f64::consts::TAU / n as f64).unwrap();
    SpectralField::from_fn(grid, move |k| {
        let kn = norm_r3(k);
        let w = scale_r3(1.0 / kn, k);
        let r2 = k[0] * k[0] + k[1] * k[1] + (k[2] - k0).powi(2);
        let g = (-r2 / (2.0 * sigma * sigma)).exp() / sigma;
        let charge = Complex64::new(k[0], k[1]) * g / sigma;
        let circ: C3 = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ];
        let along = dot_rc(w, circ);
        let fu: C3 = std::array::from_fn(|i| (circ[i] - along * w[i]) * charge);
        let fl = cross_rc(w, &fu);
        spinor_from_parts(&fu, &fl)
    })
}

#[test]
fn vortex_orbital_matches_total_minus_spin() {
    let f = vortex(64, 20.0, 3.0);
    let ops = build_operators();
    let p = total_probability(&f);
    let s = spin_expectation(&f, SpinMethod::Cross, &ops).unwrap();
    let oracle = (2.0 * p - s[2]) / p;
    let r = orbital_am_expectation(&f).unwrap();
    let lz = r.value[2] / p;
    assert!((lz - 1.0).abs() < 5e-2, "L_z/P = {lz}");
    assert!((lz - oracle).abs() < 5e-3, "L_z/P = {lz}, oracle {oracle}");
    assert!((r.position_form[2] / p - oracle).abs() < 1e-4);
    assert!(r.discrepancy < 1e-4);
    assert!(r.value[0].abs() < 1e-8 * p && r.value[1].abs() < 1e-8 * p);
}

#[test]
fn coarse_grid_reports_error() {
    // a beam crowding the k = 0 node, where the finite differences break down
    let f = vortex(16, 1.0, 1.5);
    assert!(matches!(orbital_am_expectation(&f), Err(Error::GridTooCoarse { .. })));
}
