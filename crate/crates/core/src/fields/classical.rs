use num_complex::Complex64;
use rustfft::FftDirection;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::fields::grid::GridSpec;
use crate::fields::spectral::{transform_components, SpectralField};
use crate::numeric::{for_each_mut, CompensatedSum, CompensatedVec};
use crate::units::Units;
use crate::vector::*;

/// Tolerance on |w·ε|/max|ε| for the transversality precondition.
pub const TRANSVERSE_TOL: f64 = 1e-8;

/// Real electric (V/m) and magnetic (A/m) fields on the x-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RealFieldPair {
    grid: GridSpec,
    pub e: Vec<R3>,
    pub h: Vec<R3>,
    pub time: f64,
}

/// Positive-frequency complex fields, stored as k-space coefficients e(k), h(k).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFieldPair {
    grid: GridSpec,
    pub e: Vec<C3>,
    pub h: Vec<C3>,
    pub time: f64,
}

fn transform_real(grid: &GridSpec, v: &[R3], direction: FftDirection, pre: f64) -> Vec<C3> {
    let c: Vec<C3> = v.iter().map(|x| real_to_c3(*x)).collect();
    transform_components(grid, &c, direction, pre)
}

fn inverse(grid: &GridSpec, v: &[C3]) -> Vec<C3> {
    transform_components(grid, v, FftDirection::Inverse, TAU.powf(-1.5) * grid.k_cell_volume())
}

fn max_norm(v: &[C3]) -> f64 {
    v.iter().map(norm_c3).fold(0.0, f64::max)
}

impl RealFieldPair {
    pub fn new(grid: GridSpec, e: Vec<R3>, h: Vec<R3>, time: f64) -> Result<Self> {
        if e.len() != grid.nodes() || h.len() != grid.nodes() {
            return Err(Error::GridMismatch);
        }
        Ok(RealFieldPair { grid, e, h, time })
    }

    /// Sample (𝓔, 𝓗) at every x-node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(R3) -> (R3, R3)) -> Self {
        let (e, h) = (0..grid.nodes()).map(|i| f(grid.x_at(i))).unzip();
        RealFieldPair { grid, e, h, time: 0.0 }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Spectral coefficients (ε(k), η(k)).
    pub fn spectrum(&self) -> (Vec<C3>, Vec<C3>) {
        let pre = TAU.powf(-1.5) * self.grid.cell_volume();
        (
            transform_real(&self.grid, &self.e, FftDirection::Forward, pre),
            transform_real(&self.grid, &self.h, FftDirection::Forward, pre),
        )
    }

    /// ½∫(ε0|𝓔|² + μ0|𝓗|²) d³x.
    pub fn energy(&self, units: &Units) -> f64 {
        let s: CompensatedSum = self
            .e
            .iter()
            .zip(&self.h)
            .map(|(e, h)| units.eps0 * dot_r3(*e, *e) + units.mu0 * dot_r3(*h, *h))
            .collect();
        0.5 * s.value() * self.grid.cell_volume()
    }
}

impl ComplexFieldPair {
    pub fn new(grid: GridSpec, e: Vec<C3>, h: Vec<C3>, time: f64) -> Result<Self> {
        if e.len() != grid.nodes() || h.len() != grid.nodes() {
            return Err(Error::GridMismatch);
        }
        Ok(ComplexFieldPair { grid, e, h, time })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// E(x) on the x-grid.
    pub fn electric_position(&self) -> Vec<C3> {
        inverse(&self.grid, &self.e)
    }

    /// H(x) on the x-grid.
    pub fn magnetic_position(&self) -> Vec<C3> {
        inverse(&self.grid, &self.h)
    }

    /// Real fields √2·Re(E), √2·Re(H).
    pub fn to_real(&self) -> RealFieldPair {
        let s = std::f64::consts::SQRT_2;
        let real = |v: Vec<C3>| v.into_iter().map(|c| c.map(|z| s * z.re)).collect();
        RealFieldPair {
            grid: self.grid,
            e: real(self.electric_position()),
            h: real(self.magnetic_position()),
            time: self.time,
        }
    }
}

fn check_transverse(grid: &GridSpec, eps: &[C3], eta: &[C3]) -> Result<()> {
    let worst = |v: &[C3]| {
        let scale = max_norm(v);
        if scale == 0.0 {
            return 0.0;
        }
        let mut r: f64 = 0.0;
        for (idx, c) in v.iter().enumerate().skip(1) {
            let k = grid.k_at(idx);
            r = r.max(dot_rc(scale_r3(1.0 / norm_r3(k), k), *c).norm());
        }
        r / scale
    };
    let residual = worst(eps).max(worst(eta));
    if residual > TRANSVERSE_TOL {
        return Err(Error::NotTransverse { residual });
    }
    Ok(())
}

/// Positive-frequency complex fields of a transverse real pair:
/// `e = (ε − μ0c w×η)/√2`, `h = (η + ε0c w×ε)/√2`. The k = 0 node and the
/// Nyquist planes are zeroed.
pub fn analytic_signal(real: &RealFieldPair, units: &Units) -> Result<ComplexFieldPair> {
    let grid = real.grid;
    let (eps, eta) = real.spectrum();
    check_transverse(&grid, &eps, &eta)?;
    let z0 = units.impedance();
    let y0 = units.eps0 * units.c;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut e = vec![ZERO_C3; grid.nodes()];
    let mut h = vec![ZERO_C3; grid.nodes()];
    let pairs: Vec<(C3, C3)> = (0..grid.nodes())
        .map(|idx| {
            if grid.is_excluded_k(idx) {
                return (ZERO_C3, ZERO_C3);
            }
            let k = grid.k_at(idx);
            let w = scale_r3(1.0 / norm_r3(k), k);
            let ei = sub_c3(&eps[idx], &scale_c3(z0.into(), &cross_rc(w, &eta[idx])));
            let hi = add_c3(&eta[idx], &scale_c3(y0.into(), &cross_rc(w, &eps[idx])));
            (scale_c3(s.into(), &ei), scale_c3(s.into(), &hi))
        })
        .collect();
    for (idx, (a, b)) in pairs.into_iter().enumerate() {
        e[idx] = a;
        h[idx] = b;
    }
    Ok(ComplexFieldPair {
        grid,
        e,
        h,
        time: real.time,
    })
}

/// f_u = (ε0/ħck)^{1/2} e(k), f_l = (μ0/ħck)^{1/2} h(k).
pub fn classical_to_wavefunction(cpair: &ComplexFieldPair, units: &Units) -> SpectralField {
    let grid = cpair.grid;
    let mut psi = vec![ZERO_SPINOR; grid.nodes()];
    for_each_mut(&mut psi, |idx, p| {
        if idx == 0 {
            return;
        }
        let hck = units.hbar * units.c * norm_r3(grid.k_at(idx));
        let fu = scale_c3((units.eps0 / hck).sqrt().into(), &cpair.e[idx]);
        let fl = scale_c3((units.mu0 / hck).sqrt().into(), &cpair.h[idx]);
        *p = spinor_from_parts(&fu, &fl);
    });
    let mut f = SpectralField::from_nodes(grid, psi, cpair.time).expect("grid sizes match");
    f.time = cpair.time;
    f
}

/// Exact nodewise inverse of [`classical_to_wavefunction`].
pub fn wavefunction_to_classical(spectral: &SpectralField, units: &Units) -> ComplexFieldPair {
    let grid = *spectral.grid();
    let nodes = spectral.nodes();
    let mut e = vec![ZERO_C3; grid.nodes()];
    let mut h = vec![ZERO_C3; grid.nodes()];
    for idx in 1..grid.nodes() {
        let hck = units.hbar * units.c * norm_r3(grid.k_at(idx));
        let (fu, fl) = spinor_parts(&nodes[idx]);
        e[idx] = scale_c3((hck / units.eps0).sqrt().into(), &fu);
        h[idx] = scale_c3((hck / units.mu0).sqrt().into(), &fl);
    }
    ComplexFieldPair {
        grid,
        e,
        h,
        time: spectral.time,
    }
}

/// Classical spin −i∫(ε0/ħck) e*×e d³k, in units of ħ.
pub fn classical_spin(cpair: &ComplexFieldPair, units: &Units) -> R3 {
    let grid = cpair.grid;
    let mut acc = CompensatedVec::<3>::new();
    for idx in 1..grid.nodes() {
        let hck = units.hbar * units.c * norm_r3(grid.k_at(idx));
        let e = &cpair.e[idx];
        let c = cross_cc(&conj_c3(e), e);
        let f = units.eps0 / hck;
        // −i·(purely imaginary) is real
        acc.add([f * c[0].im, f * c[1].im, f * c[2].im]);
    }
    acc.value().map(|v| v * grid.k_cell_volume())
}

/// Advance a transverse real pair by Δt with the exact spectral solution of
/// the source-free Maxwell equations. The uniform (k = 0) part is static;
/// Nyquist planes are dropped.
pub fn maxwell_evolve(real: &RealFieldPair, dt: f64, units: &Units) -> Result<RealFieldPair> {
    let grid = real.grid;
    // unnormalized forward transform, exact 1/n³ on the way back
    let mut eps = transform_real(&grid, &real.e, FftDirection::Forward, 1.0);
    let mut eta = transform_real(&grid, &real.h, FftDirection::Forward, 1.0);
    check_transverse(&grid, &eps, &eta)?;
    let z0 = units.impedance();
    let i = Complex64::i();
    for idx in 1..grid.nodes() {
        if grid.is_excluded_k(idx) {
            eps[idx] = ZERO_C3;
            eta[idx] = ZERO_C3;
            continue;
        }
        let k = grid.k_at(idx);
        let kn = norm_r3(k);
        let w = scale_r3(1.0 / kn, k);
        let (c, s) = ((units.c * kn * dt).cos(), (units.c * kn * dt).sin());
        let b = scale_c3(z0.into(), &eta[idx]);
        let e0 = eps[idx];
        let e1 = add_c3(&scale_c3(c.into(), &e0), &scale_c3(i * s, &cross_rc(w, &b)));
        let b1 = sub_c3(&scale_c3(c.into(), &b), &scale_c3(i * s, &cross_rc(w, &e0)));
        eps[idx] = e1;
        eta[idx] = scale_c3((1.0 / z0).into(), &b1);
    }
    let inv = 1.0 / grid.nodes() as f64;
    let real_part = |v: &[C3]| -> Vec<R3> {
        transform_components(&grid, v, FftDirection::Inverse, inv)
            .into_iter()
            .map(|c| c.map(|z| z.re))
            .collect()
    };
    Ok(RealFieldPair {
        grid,
        e: real_part(&eps),
        h: real_part(&eta),
        time: real.time + dt,
    })
}

/// Largest relative difference between (evolve classically, then map to a
/// wavefunction) and (map, then evolve the wavefunction). Zero fields give 0.
pub fn darwin_consistency(real: &RealFieldPair, dt: f64, units: &Units) -> Result<f64> {
    let a = classical_to_wavefunction(&analytic_signal(&maxwell_evolve(real, dt, units)?, units)?, units);
    let b = classical_to_wavefunction(&analytic_signal(real, units)?, units).evolve(dt, units);
    let scale = b.nodes().iter().map(|p| spinor_norm_sqr(p).sqrt()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let diff = a
        .nodes()
        .iter()
        .zip(b.nodes())
        .map(|(x, y)| spinor_max_abs_diff(x, y))
        .fold(0.0, f64::max);
    Ok(diff / scale)
}
