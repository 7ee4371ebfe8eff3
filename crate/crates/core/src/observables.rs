//! Conserved quantities, the three spin-expectation formulas, orbital angular
//! momentum and the local-density variants.
//!
//! Mode lists and gridded spectral fields share one code path through
//! [`MomentumSamples`]: a mode contributes `weight·ψ†Aψ`, a grid node
//! `dk³·ψ†Aψ`. All sums are compensated and run in a fixed order, so results
//! do not depend on the thread count.
//!
//! Angular momenta are reported in units of ħ.

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::algebra::OperatorSet;
use crate::error::{Error, Result};
use crate::fields::{to_momentum, transform_components, GridSpec, PositionField, SpectralField};
use crate::modes::ModeState;
use crate::numeric::{CompensatedSum, CompensatedVec};
use crate::units::Units;
use crate::vector::*;

/// Largest relativistic-condition residual accepted by the density variants.
pub const DENSITY_CONSTRAINT_TOL: f64 = 1e-6;
/// Per-unit-probability agreement expected between the f_u and f_l orbital
/// sums; ten times this raises `GridTooCoarse`.
pub const ORBITAL_GRID_TOL: f64 = 1e-3;
/// Agreement demanded of the two cross-product spin forms, relative to the
/// total probability.
pub const CROSS_FORM_TOL: f64 = 1e-8;

/// Anything that can be enumerated as weighted momentum samples (k, ψ, w).
pub trait MomentumSamples {
    fn visit_samples(&self, f: &mut dyn FnMut(R3, &Spinor, f64));

    /// True when the producer has normalized the state to unit probability.
    fn is_normalized(&self) -> bool {
        false
    }
}

impl MomentumSamples for ModeState {
    fn visit_samples(&self, f: &mut dyn FnMut(R3, &Spinor, f64)) {
        for m in &self.modes {
            f(m.k.components(), &m.spinor(), m.weight);
        }
    }

    fn is_normalized(&self) -> bool {
        self.normalized
    }
}

impl MomentumSamples for SpectralField {
    fn visit_samples(&self, f: &mut dyn FnMut(R3, &Spinor, f64)) {
        let g = self.grid();
        let dv = g.k_cell_volume();
        for (idx, p) in self.nodes().iter().enumerate().skip(1) {
            f(g.k_at(idx), p, dv);
        }
    }
}

/// Σ w ψ†ψ.
pub fn total_probability(state: &dyn MomentumSamples) -> f64 {
    let mut s = CompensatedSum::new();
    state.visit_samples(&mut |_, p, w| s.add(w * spinor_norm_sqr(p)));
    s.value()
}

/// Σ Ψ†Ψ dx³.
pub fn position_probability(field: &PositionField) -> f64 {
    field.total_probability()
}

/// Σ w ħc|k| ψ†ψ (J).
pub fn energy(state: &dyn MomentumSamples, units: &Units) -> f64 {
    let mut s = CompensatedSum::new();
    state.visit_samples(&mut |k, p, w| s.add(w * units.hbar * units.c * norm_r3(k) * spinor_norm_sqr(p)));
    s.value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinMethod {
    /// ψ†Ωψ
    Omega,
    /// ψ†(Ω·w)w ψ
    Reduced,
    /// −i f*×f
    Cross,
}

fn quadratic(m: &crate::algebra::Matrix6, p: &Spinor) -> f64 {
    spinor_dot(p, &m.apply(p)).re
}

/// −i a*×a, which is real.
fn cross_spin(a: &C3) -> R3 {
    let c = cross_cc(&conj_c3(a), a);
    [c[0].im, c[1].im, c[2].im]
}

/// Both cross-product forms, from f_u and from f_l.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSpin {
    pub upper: R3,
    pub lower: R3,
}

pub fn cross_spin_forms(state: &dyn MomentumSamples) -> CrossSpin {
    let mut up = CompensatedVec::<3>::new();
    let mut lo = CompensatedVec::<3>::new();
    state.visit_samples(&mut |_, p, w| {
        let (fu, fl) = spinor_parts(p);
        up.add(scale_r3(w, cross_spin(&fu)));
        lo.add(scale_r3(w, cross_spin(&fl)));
    });
    CrossSpin {
        upper: up.value(),
        lower: lo.value(),
    }
}

fn max_diff(a: R3, b: R3) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}

/// Spin integral by one of the three formulas. The cross method returns the
/// f_u form and fails with `ConstraintViolated` if the f_l form disagrees by
/// more than `CROSS_FORM_TOL` of the total probability.
pub fn spin_expectation(state: &dyn MomentumSamples, method: SpinMethod, ops: &OperatorSet) -> Result<R3> {
    let mut acc = CompensatedVec::<3>::new();
    match method {
        SpinMethod::Omega => {
            let om: [_; 3] = std::array::from_fn(|i| ops.omega[i].to_complex());
            state.visit_samples(&mut |_, p, w| {
                acc.add(std::array::from_fn(|i| w * quadratic(&om[i], p)));
            });
        }
        SpinMethod::Reduced => {
            state.visit_samples(&mut |k, p, w| {
                let s = ops.reduced_spin(k).expect("samples have nonzero k");
                acc.add(std::array::from_fn(|i| w * quadratic(&s[i], p)));
            });
        }
        SpinMethod::Cross => {
            let forms = cross_spin_forms(state);
            let scale = total_probability(state).max(f64::MIN_POSITIVE);
            let residual = max_diff(forms.upper, forms.lower) / scale;
            if residual > CROSS_FORM_TOL {
                return Err(Error::ConstraintViolated { residual });
            }
            return Ok(forms.upper);
        }
    }
    Ok(acc.value())
}

/// Pairwise maximum-component differences between the spin formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinDiscrepancies {
    pub omega_reduced: f64,
    pub omega_cross: f64,
    pub reduced_cross: f64,
    pub cross_upper_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub total_probability: f64,
    pub normalized: bool,
    /// Set for empty or zero states, where expectation values are vacuous.
    pub degenerate: bool,
    pub energy: f64,
    pub spin_omega: R3,
    pub spin_reduced: R3,
    pub spin_cross: R3,
    pub spin_cross_lower: R3,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbital: Option<R3>,
    pub pairwise_discrepancies: SpinDiscrepancies,
}

/// All momentum-space observables of a state. Values are unnormalized
/// integrals; `normalized` tells whether they are expectation values.
pub fn observable_report(state: &dyn MomentumSamples, ops: &OperatorSet, units: &Units) -> Result<ObservableReport> {
    let p = total_probability(state);
    let omega = spin_expectation(state, SpinMethod::Omega, ops)?;
    let reduced = spin_expectation(state, SpinMethod::Reduced, ops)?;
    let forms = cross_spin_forms(state);
    Ok(ObservableReport {
        total_probability: p,
        normalized: state.is_normalized() || (p - 1.0).abs() <= 1e-12,
        degenerate: p == 0.0,
        energy: energy(state, units),
        spin_omega: omega,
        spin_reduced: reduced,
        spin_cross: forms.upper,
        spin_cross_lower: forms.lower,
        orbital: None,
        pairwise_discrepancies: SpinDiscrepancies {
            omega_reduced: max_diff(omega, reduced),
            omega_cross: max_diff(omega, forms.upper),
            reduced_cross: max_diff(reduced, forms.upper),
            cross_upper_lower: max_diff(forms.upper, forms.lower),
        },
    })
}

/// Orbital angular momentum of a gridded field by both k-space forms and the
/// position-space form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitalReport {
    /// Mean of the f_u and f_l k-space sums.
    pub value: R3,
    pub upper: R3,
    pub lower: R3,
    /// −i∫F_u†(x×∇)F_u d³x with spectral gradients.
    pub position_form: R3,
    /// max |upper − lower| per unit probability.
    pub discrepancy: f64,
}

/// Derivative of `f(m)` along one signed-index axis: fourth-order central
/// away from the band edges, second-order central or one-sided near them.
fn axis_derivative(get: &dyn Fn(i64) -> Complex64, m: i64, lo: i64, hi: i64, h: f64) -> Complex64 {
    if m - 2 >= lo && m + 2 <= hi {
        (get(m - 2) - get(m - 1) * 8.0 + get(m + 1) * 8.0 - get(m + 2)) / (12.0 * h)
    } else if m > lo && m < hi {
        (get(m + 1) - get(m - 1)) / (2.0 * h)
    } else if m + 2 <= hi {
        (get(m) * -3.0 + get(m + 1) * 4.0 - get(m + 2)) / (2.0 * h)
    } else {
        (get(m) * 3.0 - get(m - 1) * 4.0 + get(m - 2)) / (2.0 * h)
    }
}

/// −i Σ f†(k×∇_k)f dk³ for one three-component k-space field.
fn orbital_k_form(grid: &GridSpec, f: &[C3]) -> R3 {
    let n = grid.n() as i64;
    let (lo, hi) = (-n / 2, n / 2 - 1);
    let dk = grid.dk();
    let mut acc = CompensatedVec::<3>::new();
    for idx in 0..grid.nodes() {
        let here = &f[idx];
        if norm_sqr_c3(here) == 0.0 {
            continue;
        }
        let m = grid.signed_indices(idx);
        let k = grid.k_at(idx);
        // grad[a][c] = ∂_a f_c
        let grad: [C3; 3] = std::array::from_fn(|a| {
            std::array::from_fn(|c| {
                let get = |t: i64| {
                    let mut mm = m;
                    mm[a] = t;
                    f[grid.k_index(mm)][c]
                };
                axis_derivative(&get, m[a], lo, hi, dk)
            })
        });
        // (k×∇)_i = ε_ijl k_j ∂_l
        let mut l = [0.0; 3];
        for (i, li) in l.iter_mut().enumerate() {
            let (j, q) = ((i + 1) % 3, (i + 2) % 3);
            let mut s = Complex64::new(0.0, 0.0);
            for c in 0..3 {
                let d = grad[q][c] * k[j] - grad[j][c] * k[q];
                s += here[c].conj() * d;
            }
            // −i·s; s is imaginary up to discretization error
            *li = s.im;
        }
        acc.add(l);
    }
    acc.value().map(|v| v * grid.k_cell_volume())
}

fn orbital_position_form(grid: &GridSpec, fu: &[C3]) -> R3 {
    let pre = TAU.powf(-1.5) * grid.k_cell_volume();
    let field = transform_components(grid, fu, FftDirection::Inverse, pre);
    let grads: [Vec<C3>; 3] = std::array::from_fn(|a| {
        let dk: Vec<C3> = fu
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let ka = grid.k_at(idx)[a];
                scale_c3(Complex64::new(0.0, ka), v)
            })
            .collect();
        transform_components(grid, &dk, FftDirection::Inverse, pre)
    });
    let mut acc = CompensatedVec::<3>::new();
    for idx in 0..grid.nodes() {
        let x = grid.x_at(idx);
        let mut l = [0.0; 3];
        for (i, li) in l.iter_mut().enumerate() {
            let (j, q) = ((i + 1) % 3, (i + 2) % 3);
            let mut s = Complex64::new(0.0, 0.0);
            for c in 0..3 {
                let d = grads[q][idx][c] * x[j] - grads[j][idx][c] * x[q];
                s += field[idx][c].conj() * d;
            }
            *li = s.im;
        }
        acc.add(l);
    }
    acc.value().map(|v| v * grid.cell_volume())
}

/// Orbital angular momentum of a spectral field. The k = 0 node is a zero of
/// the field, so content near the origin degrades the finite differences.
pub fn orbital_am_expectation(spectral: &SpectralField) -> Result<OrbitalReport> {
    let grid = *spectral.grid();
    let (fu, fl): (Vec<C3>, Vec<C3>) = spectral.nodes().iter().map(spinor_parts).unzip();
    let upper = orbital_k_form(&grid, &fu);
    let lower = orbital_k_form(&grid, &fl);
    let p = spectral.total_probability();
    let discrepancy = if p > 0.0 { max_diff(upper, lower) / p } else { 0.0 };
    if discrepancy > 10.0 * ORBITAL_GRID_TOL {
        return Err(Error::GridTooCoarse { discrepancy });
    }
    Ok(OrbitalReport {
        value: std::array::from_fn(|i| 0.5 * (upper[i] + lower[i])),
        upper,
        lower,
        position_form: orbital_position_form(&grid, &fu),
        discrepancy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Spin,
    Probability,
}

/// Three candidate local densities for one quantity; node-major values with
/// `components` entries per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityVariants {
    pub kind: DensityKind,
    pub grid: GridSpec,
    pub components: usize,
    #[serde(skip)]
    pub d_plain: Vec<f64>,
    #[serde(skip)]
    pub d_plus: Vec<f64>,
    #[serde(skip)]
    pub d_minus: Vec<f64>,
    pub integral_plain: Vec<f64>,
    pub integral_plus: Vec<f64>,
    pub integral_minus: Vec<f64>,
    /// Largest pairwise integral difference over the total probability.
    pub integral_discrepancy: f64,
    /// Largest pairwise pointwise difference (Euclidean over components).
    pub max_pointwise_spread: f64,
    /// Largest |d_plain|.
    pub peak: f64,
}

impl DensityVariants {
    /// Named per-component columns for CSV export.
    pub fn columns(&self) -> Vec<(String, Vec<f64>)> {
        let names = ["plain", "plus", "minus"];
        let mut out = Vec::new();
        for (name, d) in names.iter().zip([&self.d_plain, &self.d_plus, &self.d_minus]) {
            for c in 0..self.components {
                let label = if self.components == 1 {
                    name.to_string()
                } else {
                    format!("{name}_{}", ["x", "y", "z"][c])
                };
                out.push((label, d.iter().skip(c).step_by(self.components).copied().collect()));
            }
        }
        out
    }

    fn build(kind: DensityKind, grid: GridSpec, components: usize, rows: Vec<[Vec<f64>; 3]>, probability: f64) -> Self {
        let mut sums = vec![CompensatedSum::new(); 3 * components];
        let mut spread: f64 = 0.0;
        let mut peak: f64 = 0.0;
        let mut d = [Vec::new(), Vec::new(), Vec::new()];
        for row in rows {
            for (v, r) in row.iter().enumerate() {
                for (c, x) in r.iter().enumerate() {
                    sums[v * components + c].add(*x);
                }
            }
            let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            spread = spread
                .max(dist(&row[0], &row[1]))
                .max(dist(&row[0], &row[2]))
                .max(dist(&row[1], &row[2]));
            peak = peak.max(row[0].iter().map(|x| x * x).sum::<f64>().sqrt());
            for (dv, r) in d.iter_mut().zip(row) {
                dv.extend(r);
            }
        }
        let dv = grid.cell_volume();
        let integral =
            |v: usize| -> Vec<f64> { (0..components).map(|c| sums[v * components + c].value() * dv).collect() };
        let (ip, iu, il) = (integral(0), integral(1), integral(2));
        let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let worst = diff(&ip, &iu).max(diff(&ip, &il)).max(diff(&iu, &il));
        let [d_plain, d_plus, d_minus] = d;
        DensityVariants {
            kind,
            grid,
            components,
            d_plain,
            d_plus,
            d_minus,
            integral_plain: ip,
            integral_plus: iu,
            integral_minus: il,
            integral_discrepancy: if probability > 0.0 { worst / probability } else { 0.0 },
            max_pointwise_spread: spread,
            peak,
        }
    }
}

fn check_density_constraint(field: &PositionField) -> Result<()> {
    let residual = to_momentum(field).constraint_residual().max();
    if residual > DENSITY_CONSTRAINT_TOL {
        return Err(Error::ConstraintViolated { residual });
    }
    Ok(())
}

/// Ψ†ΩΨ, Ψ†(1+Γ0)ΩΨ = F_u†ΣF_u and Ψ†(1−Γ0)ΩΨ = F_l†ΣF_l.
pub fn spin_density_variants(field: &PositionField, ops: &OperatorSet) -> Result<DensityVariants> {
    check_density_constraint(field)?;
    let om: [_; 3] = std::array::from_fn(|i| ops.omega[i].to_complex());
    let g0 = ops.gamma0_c();
    let rows = field
        .nodes()
        .iter()
        .map(|p| {
            let g0p = g0.apply(p);
            let plus: Spinor = std::array::from_fn(|i| p[i] + g0p[i]);
            let minus: Spinor = std::array::from_fn(|i| p[i] - g0p[i]);
            let form = |q: &Spinor| -> Vec<f64> { (0..3).map(|i| spinor_dot(p, &om[i].apply(q)).re).collect() };
            [form(p), form(&plus), form(&minus)]
        })
        .collect();
    Ok(DensityVariants::build(
        DensityKind::Spin,
        *field.grid(),
        3,
        rows,
        field.total_probability(),
    ))
}

/// Ψ†Ψ, Ψ†(1+Γ0)Ψ = F_u†F_u and Ψ†(1−Γ0)Ψ = F_l†F_l.
pub fn probability_density_variants(field: &PositionField, ops: &OperatorSet) -> Result<DensityVariants> {
    check_density_constraint(field)?;
    let g0 = ops.gamma0_c();
    let rows = field
        .nodes()
        .iter()
        .map(|p| {
            let g0p = g0.apply(p);
            let plain = spinor_norm_sqr(p);
            let odd = spinor_dot(p, &g0p).re;
            [vec![plain], vec![plain + odd], vec![plain - odd]]
        })
        .collect();
    Ok(DensityVariants::build(
        DensityKind::Probability,
        *field.grid(),
        1,
        rows,
        field.total_probability(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_operators;
    use crate::fields::{state_to_grid, to_position};
    use crate::modes::make_mode;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(k: R3, ap: Complex64, am: Complex64) -> ModeState {
        ModeState::new(vec![make_mode(k, ap, am, 1.0).unwrap()])
    }

    #[test]
    fn probability_and_energy_basics() {
        let u = Units::natural();
        let s = single([0.0, 0.0, 1.0], c(1.0, 0.0), c(0.0, 0.0));
        assert!((total_probability(&s) - 1.0).abs() < 1e-14);
        assert!((total_probability(&s.scaled(2.0)) - 4.0).abs() < 1e-14);
        assert!((energy(&s, &u) - 1.0).abs() < 1e-14);
        let two = ModeState::new(vec![
            make_mode([0.0, 0.0, 1.0], c(1.0, 0.0), c(0.0, 0.0), 1.0).unwrap(),
            make_mode([0.0, 0.0, 2.0], c(1.0, 0.0), c(0.0, 0.0), 1.0).unwrap(),
        ]);
        assert!((energy(&two, &u) / total_probability(&two) - 1.5).abs() < 1e-14);
        let empty = ModeState::new(vec![]);
        let r = observable_report(&empty, &build_operators(), &u).unwrap();
        assert_eq!(r.energy, 0.0);
        assert!(r.degenerate);
    }

    #[test]
    fn spin_single_mode_all_methods() {
        let ops = build_operators();
        let s = single([0.0, 0.0, 1.0], c(1.0, 0.0), c(0.0, 0.0));
        for m in [SpinMethod::Omega, SpinMethod::Reduced, SpinMethod::Cross] {
            let v = spin_expectation(&s, m, &ops).unwrap();
            assert!(max_diff(v, [0.0, 0.0, 1.0]) < 1e-15, "{m:?} {v:?}");
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mixed = single([0.0, 0.0, 1.0], c(h, 0.0), c(h, 0.0));
        for m in [SpinMethod::Omega, SpinMethod::Reduced, SpinMethod::Cross] {
            assert!(norm_r3(spin_expectation(&mixed, m, &ops).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn methods_agree_for_two_directions() {
        let ops = build_operators();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = ModeState::new(vec![
            make_mode([0.0, 0.0, 1.0], c(h, 0.0), c(0.0, 0.0), 1.0).unwrap(),
            make_mode([1.0, 0.0, 0.0], c(h, 0.0), c(0.0, 0.0), 1.0).unwrap(),
        ]);
        let r = observable_report(&s, &ops, &Units::natural()).unwrap();
        let d = r.pairwise_discrepancies;
        assert!(d.omega_reduced.max(d.omega_cross).max(d.reduced_cross) < 1e-12);
        assert!(max_diff(r.spin_omega, [0.5, 0.0, 0.5]) < 1e-12);
    }

    #[test]
    fn zero_field_densities_vanish() {
        let ops = build_operators();
        let g = GridSpec::new(8, 1.0).unwrap();
        let x = to_position(&SpectralField::zeros(g));
        let d = spin_density_variants(&x, &ops).unwrap();
        assert_eq!(d.peak, 0.0);
        assert_eq!(d.max_pointwise_spread, 0.0);
        let p = probability_density_variants(&x, &ops).unwrap();
        assert!(p.d_plain.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn plane_wave_densities() {
        let ops = build_operators();
        let g = GridSpec::new(8, 1.0).unwrap();
        let k = g.k_at(g.k_index([0, 0, 2]));
        let x = to_position(&state_to_grid(&single(k, c(1.0, 0.0), c(0.0, 0.0)), &g).unwrap());
        let p = probability_density_variants(&x, &ops).unwrap();
        let v0 = p.d_plain[0];
        for i in 0..g.nodes() {
            for d in [&p.d_plain, &p.d_plus, &p.d_minus] {
                assert!((d[i] - v0).abs() < 1e-12 * v0);
            }
        }
        let s = spin_density_variants(&x, &ops).unwrap();
        assert!(s.max_pointwise_spread < 1e-12 * s.peak);
    }

    #[test]
    fn unconstrained_field_rejected() {
        let ops = build_operators();
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = SpectralField::from_fn(g, |_| {
            let mut p = ZERO_SPINOR;
            p[0] = c(1.0, 0.0);
            p
        });
        assert!(matches!(
            spin_density_variants(&to_position(&f), &ops),
            Err(Error::ConstraintViolated { .. })
        ));
    }

    #[test]
    fn grid_and_mode_spin_agree() {
        let ops = build_operators();
        let g = GridSpec::new(8, 0.5).unwrap();
        let modes = vec![
            make_mode(g.k_at(g.k_index([1, 0, 2])), c(0.6, 0.0), c(0.0, 0.2), 1.0).unwrap(),
            make_mode(g.k_at(g.k_index([-2, 1, 0])), c(0.0, 0.3), c(0.5, 0.1), 1.0).unwrap(),
        ];
        let st = ModeState::new(modes);
        let f = state_to_grid(&st, &g).unwrap();
        for m in [SpinMethod::Omega, SpinMethod::Reduced, SpinMethod::Cross] {
            let a = spin_expectation(&st, m, &ops).unwrap();
            let b = spin_expectation(&f, m, &ops).unwrap();
            assert!(max_diff(a, b) < 1e-12);
        }
    }
}
