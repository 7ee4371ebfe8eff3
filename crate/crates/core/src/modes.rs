//! Momentum-space photon states as weighted lists of helicity plane-wave modes.
//!
//! A mode stores helicity amplitudes (a₊, a₋) on a wavevector; the six-component
//! spinor ψ = (f_u; f_l)/√2 is derived with `f_u = a₊e₊ + a₋e₋` and
//! `f_l = w × f_u`, so the relativistic condition holds by construction.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Units;
use crate::vector::*;

/// Nonzero wavevector (rad/m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct WaveVector([f64; 3]);

impl WaveVector {
    pub fn new(k: R3) -> Result<Self> {
        let n = norm_r3(k);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroWavevector);
        }
        Ok(WaveVector(k))
    }

    pub fn components(&self) -> R3 {
        self.0
    }

    pub fn magnitude(&self) -> f64 {
        norm_r3(self.0)
    }

    /// Unit propagation direction w = k/|k|.
    pub fn direction(&self) -> R3 {
        scale_r3(1.0 / self.magnitude(), self.0)
    }

    /// Angular frequency ω = c|k|.
    pub fn omega(&self, units: &Units) -> f64 {
        units.c * self.magnitude()
    }
}

impl TryFrom<[f64; 3]> for WaveVector {
    type Error = Error;
    fn try_from(k: [f64; 3]) -> Result<Self> {
        WaveVector::new(k)
    }
}

impl From<WaveVector> for [f64; 3] {
    fn from(k: WaveVector) -> Self {
        k.0
    }
}

/// Transverse circular polarization vectors for one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelicityBasis {
    pub w: R3,
    pub e_plus: C3,
    pub e_minus: C3,
}

/// Deterministic helicity basis: `u = ẑ×w` (normalized) away from the poles,
/// `u = ŷ×w` within 1e−6 of them; `v = w×u`; `e± = (u ± iv)/√2`.
pub fn helicity_basis(k: &WaveVector) -> HelicityBasis {
    let w = k.direction();
    let axis = if w[2].abs() < 1.0 - 1e-6 {
        [0.0, 0.0, 1.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let u = cross_r3(axis, w);
    let u = scale_r3(1.0 / norm_r3(u), u);
    let v = cross_r3(w, u);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let e_plus = std::array::from_fn(|i| Complex64::new(s * u[i], s * v[i]));
    let e_minus = std::array::from_fn(|i| Complex64::new(s * u[i], -s * v[i]));
    HelicityBasis { w, e_plus, e_minus }
}

/// One plane-wave mode with quadrature weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveMode {
    pub k: WaveVector,
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub weight: f64,
}

pub fn make_mode(k: R3, a_plus: Complex64, a_minus: Complex64, weight: f64) -> Result<PlaneWaveMode> {
    let k = WaveVector::new(k)?;
    if !(weight > 0.0) || !weight.is_finite() {
        return Err(Error::InvalidWeight(weight));
    }
    Ok(PlaneWaveMode {
        k,
        a_plus,
        a_minus,
        weight,
    })
}

impl PlaneWaveMode {
    pub fn basis(&self) -> HelicityBasis {
        helicity_basis(&self.k)
    }

    /// (f_u, f_l).
    pub fn parts(&self) -> (C3, C3) {
        let b = self.basis();
        let fu = add_c3(&scale_c3(self.a_plus, &b.e_plus), &scale_c3(self.a_minus, &b.e_minus));
        let fl = cross_rc(b.w, &fu);
        (fu, fl)
    }

    pub fn spinor(&self) -> Spinor {
        let (fu, fl) = self.parts();
        spinor_from_parts(&fu, &fl)
    }

    /// |a₊|² + |a₋|², equal to ψ†ψ.
    pub fn amplitude_norm_sqr(&self) -> f64 {
        self.a_plus.norm_sqr() + self.a_minus.norm_sqr()
    }

    /// Rebuild a mode by projecting the upper part of `psi` onto the helicity
    /// basis of `k`.
    pub fn from_spinor(k: R3, psi: &Spinor, weight: f64) -> Result<Self> {
        let kv = WaveVector::new(k)?;
        let b = helicity_basis(&kv);
        let (fu, _) = spinor_parts(psi);
        make_mode(k, cdot(&b.e_plus, &fu), cdot(&b.e_minus, &fu), weight)
    }
}

pub fn spinor_of(mode: &PlaneWaveMode) -> Spinor {
    mode.spinor()
}

/// Orthonormal eigenvectors of H(k): two of energy +ħck, two of zero energy
/// (longitudinal), two of energy −ħck.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEigenbasis {
    pub positive: [Spinor; 2],
    pub zero: [Spinor; 2],
    pub negative: [Spinor; 2],
}

pub fn energy_eigenbasis(k: R3) -> Result<EnergyEigenbasis> {
    let kv = WaveVector::new(k)?;
    let b = helicity_basis(&kv);
    let i = Complex64::i();
    let wc = real_to_c3(b.w);
    // w × e± = ∓i e±
    let pos = [
        spinor_from_parts(&b.e_plus, &scale_c3(-i, &b.e_plus)),
        spinor_from_parts(&b.e_minus, &scale_c3(i, &b.e_minus)),
    ];
    let neg = [
        spinor_from_parts(&b.e_plus, &scale_c3(i, &b.e_plus)),
        spinor_from_parts(&b.e_minus, &scale_c3(-i, &b.e_minus)),
    ];
    let zero = [join(&wc, &ZERO_C3), join(&ZERO_C3, &wc)];
    Ok(EnergyEigenbasis {
        positive: pos,
        zero,
        negative: neg,
    })
}

/// Orthogonal projection onto the positive-energy eigenspace of H(k).
pub fn positive_energy_project(raw: &Spinor, k: R3) -> Result<Spinor> {
    let basis = energy_eigenbasis(k)?;
    let mut out = ZERO_SPINOR;
    for v in &basis.positive {
        let c = spinor_dot(v, raw);
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    Ok(out)
}

/// A list of modes at a common time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ModeState {
    pub modes: Vec<PlaneWaveMode>,
    pub time: f64,
    pub normalized: bool,
}

impl ModeState {
    pub fn new(modes: Vec<PlaneWaveMode>) -> Self {
        let mut s = ModeState {
            modes,
            time: 0.0,
            normalized: false,
        };
        s.normalized = (s.probability() - 1.0).abs() <= 1e-12;
        s
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Σ weight·ψ†ψ.
    pub fn probability(&self) -> f64 {
        crate::numeric::compensated_sum(self.modes.iter().map(|m| m.weight * m.amplitude_norm_sqr()))
    }

    /// Rescale amplitudes so that the total probability is one. Empty or
    /// zero states are returned unchanged and stay unnormalized.
    pub fn normalize(&self) -> ModeState {
        let p = self.probability();
        if p <= 0.0 {
            return self.clone();
        }
        let s = Complex64::from(1.0 / p.sqrt());
        let modes = self
            .modes
            .iter()
            .map(|m| PlaneWaveMode {
                a_plus: m.a_plus * s,
                a_minus: m.a_minus * s,
                ..*m
            })
            .collect();
        ModeState {
            modes,
            time: self.time,
            normalized: true,
        }
    }

    pub fn scaled(&self, factor: f64) -> ModeState {
        let s = Complex64::from(factor);
        let modes: Vec<_> = self
            .modes
            .iter()
            .map(|m| PlaneWaveMode {
                a_plus: m.a_plus * s,
                a_minus: m.a_minus * s,
                ..*m
            })
            .collect();
        let mut out = ModeState::new(modes);
        out.time = self.time;
        out
    }

    /// Deterministic random state: `count` modes with |k| in [k_min, k_max],
    /// isotropic directions, complex Gaussian amplitudes, unit weights,
    /// normalized to total probability one.
    pub fn random(seed: u64, count: usize, k_min: f64, k_max: f64) -> ModeState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes = (0..count)
            .map(|_| {
                let k = random_wavevector(&mut rng, k_min, k_max);
                let a_plus = random_complex(&mut rng);
                let a_minus = random_complex(&mut rng);
                make_mode(k, a_plus, a_minus, 1.0).expect("nonzero k by construction")
            })
            .collect();
        ModeState::new(modes).normalize()
    }

    /// Advance by Δt: amplitudes pick up exp(−iωΔt), ω = c|k|.
    pub fn evolve(&self, dt: f64, units: &Units) -> ModeState {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let phase = Complex64::from_polar(1.0, -m.k.omega(units) * dt);
                PlaneWaveMode {
                    a_plus: m.a_plus * phase,
                    a_minus: m.a_minus * phase,
                    ..*m
                }
            })
            .collect();
        ModeState {
            modes,
            time: self.time + dt,
            normalized: self.normalized,
        }
    }
}

pub fn evolve(state: &ModeState, dt: f64, units: &Units) -> ModeState {
    state.evolve(dt, units)
}

/// Uniformly oriented wavevector with magnitude uniform in [k_min, k_max].
pub fn random_wavevector(rng: &mut ChaCha8Rng, k_min: f64, k_max: f64) -> R3 {
    loop {
        let v: R3 = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = norm_r3(v);
        if n > 1e-3 && n <= 1.0 {
            let mag = rng.gen_range(k_min..=k_max);
            return scale_r3(mag / n, v);
        }
    }
}

/// Uniformly oriented unit vector.
pub fn random_unit(rng: &mut ChaCha8Rng) -> R3 {
    let v = random_wavevector(rng, 1.0, 1.0);
    scale_r3(1.0 / norm_r3(v), v)
}

/// Standard complex Gaussian sample.
pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box–Muller; the two uniforms are drawn in a fixed order for determinism.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    Complex64::from_polar(r, std::f64::consts::TAU * u2)
}

/// Largest relativistic-condition residuals over a set of modes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstraintResidual {
    /// max |w·f_u|
    pub transverse_upper: f64,
    /// max |w·f_l|
    pub transverse_lower: f64,
    /// max |w×f_l + f_u|
    pub coupling_lower: f64,
    /// max |w×f_u − f_l|
    pub coupling_upper: f64,
}

impl ConstraintResidual {
    pub fn max(&self) -> f64 {
        self.transverse_upper
            .max(self.transverse_lower)
            .max(self.coupling_lower)
            .max(self.coupling_upper)
    }

    pub(crate) fn merge(&mut self, o: &ConstraintResidual) {
        self.transverse_upper = self.transverse_upper.max(o.transverse_upper);
        self.transverse_lower = self.transverse_lower.max(o.transverse_lower);
        self.coupling_lower = self.coupling_lower.max(o.coupling_lower);
        self.coupling_upper = self.coupling_upper.max(o.coupling_upper);
    }
}

/// Residuals of one raw spinor against the constraint at `k`.
pub fn spinor_constraint_residual(k: R3, psi: &Spinor) -> Result<ConstraintResidual> {
    let w = WaveVector::new(k)?.direction();
    let (fu, fl) = spinor_parts(psi);
    Ok(ConstraintResidual {
        transverse_upper: dot_rc(w, fu).norm(),
        transverse_lower: dot_rc(w, fl).norm(),
        coupling_lower: norm_c3(&add_c3(&cross_rc(w, &fl), &fu)),
        coupling_upper: norm_c3(&sub_c3(&cross_rc(w, &fu), &fl)),
    })
}

/// Maximum residuals over raw (k, ψ) pairs; zero for an empty list.
pub fn constraint_residual_raw(samples: &[(R3, Spinor)]) -> Result<ConstraintResidual> {
    let mut acc = ConstraintResidual::default();
    for (k, psi) in samples {
        acc.merge(&spinor_constraint_residual(*k, psi)?);
    }
    Ok(acc)
}

pub fn constraint_residual(state: &ModeState) -> ConstraintResidual {
    let mut acc = ConstraintResidual::default();
    for m in &state.modes {
        let r = spinor_constraint_residual(m.k.components(), &m.spinor()).expect("mode wavevectors are nonzero");
        acc.merge(&r);
    }
    acc
}

/// JSON record for one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeRecord {
    pub k: [f64; 3],
    pub a_plus: [f64; 2],
    pub a_minus: [f64; 2],
    pub weight: f64,
}

impl From<&PlaneWaveMode> for ModeRecord {
    fn from(m: &PlaneWaveMode) -> Self {
        ModeRecord {
            k: m.k.components(),
            a_plus: [m.a_plus.re, m.a_plus.im],
            a_minus: [m.a_minus.re, m.a_minus.im],
            weight: m.weight,
        }
    }
}

impl TryFrom<ModeRecord> for PlaneWaveMode {
    type Error = Error;
    fn try_from(r: ModeRecord) -> Result<Self> {
        make_mode(
            r.k,
            Complex64::new(r.a_plus[0], r.a_plus[1]),
            Complex64::new(r.a_minus[0], r.a_minus[1]),
            r.weight,
        )
    }
}

impl Serialize for ModeState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<ModeRecord> = self.modes.iter().map(ModeRecord::from).collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModeState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<ModeRecord>::deserialize(d)?;
        let modes = records
            .into_iter()
            .map(PlaneWaveMode::try_from)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(ModeState::new(modes))
    }
}
