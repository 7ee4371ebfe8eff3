//! Boosts along the first axis acting on events, wavevectors, spinors and
//! modes, with numerical covariance residuals.
//!
//! Four-vectors are stored in real Minkowski form `(ct, x)`. The imaginary-time
//! form `(ict, x)` with matrix `a = [[γ, −iβγ], [iβγ, γ]]` on (x0, x1) is kept
//! only for cross-checking; both give `ct' = γ(ct − βx₁)`, `x₁' = γ(x₁ − βct)`.
//!
//! The rapidity χ = atanh β carries the sign of β, so `cosh χ = γ` and
//! `sinh χ = βγ`. A boost with negative velocity is then the inverse of the
//! positive one, and rapidities add under composition.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{hermitian_eigenvalues, Matrix6, OperatorSet};
use crate::error::{Error, Result};
use crate::fields::SpectralField;
use crate::modes::{helicity_basis, make_mode, spinor_constraint_residual, PlaneWaveMode, WaveVector};
use crate::numeric::CompensatedComplex;
use crate::observables::MomentumSamples;
use crate::units::Units;
use crate::vector::*;

/// Relative tolerance on ω = c|k| accepted by [`boost_wavevector`].
pub const LIGHT_CONE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boost {
    pub beta: f64,
    pub gamma: f64,
    /// Signed rapidity.
    pub chi: f64,
}

impl Boost {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.abs() < 1.0) {
            return Err(Error::InvalidBeta(beta));
        }
        Ok(Boost {
            beta,
            gamma: 1.0 / (1.0 - beta * beta).sqrt(),
            chi: beta.atanh(),
        })
    }

    pub fn identity() -> Self {
        Boost {
            beta: 0.0,
            gamma: 1.0,
            chi: 0.0,
        }
    }

    pub fn inverse(&self) -> Self {
        Boost::new(-self.beta).expect("|β| < 1")
    }

    /// Boost equivalent to applying `self` after `first` (velocity addition).
    pub fn compose(&self, first: &Boost) -> Self {
        Boost::new((self.beta + first.beta) / (1.0 + self.beta * first.beta)).expect("|β| < 1")
    }

    /// The complex matrix a_{μν} acting on (ict, x₁, x₂, x₃).
    pub fn imaginary_time_matrix(&self) -> [[Complex64; 4]; 4] {
        let (g, bg) = (self.gamma, self.beta * self.gamma);
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        [
            [g.into(), Complex64::new(0.0, -bg), z, z],
            [Complex64::new(0.0, bg), g.into(), z, z],
            [z, z, one, z],
            [z, z, z, one],
        ]
    }
}

/// (x0, x) with x0 = ct for events or ω/c for wavevectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourVector {
    pub x0: f64,
    pub x: R3,
}

impl FourVector {
    pub fn new(x0: f64, x: R3) -> Self {
        FourVector { x0, x }
    }

    pub fn boost(&self, b: &Boost) -> FourVector {
        FourVector {
            x0: b.gamma * (self.x0 - b.beta * self.x[0]),
            x: [b.gamma * (self.x[0] - b.beta * self.x0), self.x[1], self.x[2]],
        }
    }

    /// |x|² − x0².
    pub fn interval(&self) -> f64 {
        dot_r3(self.x, self.x) - self.x0 * self.x0
    }

    pub fn to_imaginary(&self) -> [Complex64; 4] {
        [
            Complex64::new(0.0, self.x0),
            self.x[0].into(),
            self.x[1].into(),
            self.x[2].into(),
        ]
    }

    /// Inverse of [`FourVector::to_imaginary`]; ignores any real part of x0
    /// and imaginary parts of the spatial entries.
    pub fn from_imaginary(v: [Complex64; 4]) -> Self {
        FourVector {
            x0: v[0].im,
            x: [v[1].re, v[2].re, v[3].re],
        }
    }
}

/// Λ = 1 − iΓ0Γ1 sinh χ − Γ1²(1 − cosh χ).
pub fn spinor_boost_matrix(ops: &OperatorSet, b: &Boost) -> Matrix6 {
    let g0 = ops.gamma0_c();
    let g1 = ops.gamma[0].to_complex();
    let g0g1 = g0 * g1;
    let g1sq = g1 * g1;
    Matrix6::identity() - g0g1.scale(Complex64::new(0.0, b.chi.sinh())) - g1sq.scale_real(1.0 - b.chi.cosh())
}

/// Blockwise form of Λ on (F_u, F_v): the component formulas that coincide
/// with the field transformation of free radiation.
pub fn boost_parts(fu: &C3, fv: &C3, b: &Boost) -> (C3, C3) {
    let (c, s) = (b.chi.cosh(), b.chi.sinh());
    (
        [fu[0], fu[1] * c - fv[2] * s, fu[2] * c + fv[1] * s],
        [fv[0], fv[1] * c + fu[2] * s, fv[2] * c - fu[1] * s],
    )
}

/// (k', ω') under the boost; requires ω = c|k|.
pub fn boost_wavevector(k: R3, omega: f64, b: &Boost, units: &Units) -> Result<(R3, f64)> {
    let on_shell = units.c * norm_r3(k);
    let residual = (omega - on_shell).abs() / on_shell.max(f64::MIN_POSITIVE);
    if !(residual <= LIGHT_CONE_TOL) {
        return Err(Error::OffLightCone { residual });
    }
    let p = FourVector::new(omega / units.c, k).boost(b);
    Ok((p.x, p.x0 * units.c))
}

/// Boost one mode: k by [`boost_wavevector`], ψ by Λ, then re-expressed in
/// the primed helicity basis. The weight scales by ω'/ω so that weight/ω,
/// the invariant measure d³k/ω, is unchanged.
pub fn boost_mode(ops: &OperatorSet, mode: &PlaneWaveMode, b: &Boost, units: &Units) -> Result<PlaneWaveMode> {
    let k = mode.k.components();
    let omega = mode.k.omega(units);
    let (kp, wp) = boost_wavevector(k, omega, b, units)?;
    let psi = spinor_boost_matrix(ops, b).apply(&mode.spinor());
    let (fu, _) = spinor_parts(&psi);
    let basis = helicity_basis(&WaveVector::new(kp)?);
    make_mode(
        kp,
        cdot(&basis.e_plus, &fu),
        cdot(&basis.e_minus, &fu),
        mode.weight * wp / omega,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub beta: f64,
    pub gamma: f64,
    /// max |H(k')Λψ − ħω'Λψ| / (ħω'|Λψ|) over samples.
    pub darwin_residual: f64,
    /// Relativistic-condition residual of Λψ at k', relative to |Λψ|.
    pub rc_residual: f64,
    /// Least-squares ratio of primed to unprimed divergence of the probe.
    pub rc_scaling_observed: f64,
    pub rc_scaling_expected: f64,
    /// max |∇'·F' − γ∇·F| over max |γ∇·F|, worst of the u and v parts.
    pub divergence_residual: f64,
}

/// Static longitudinal probe field F_u = ∇φ, F_v = ∇χ from a few Gaussian
/// bumps in k: it solves the wave equation but violates the relativistic
/// condition, so its divergence is nonzero.
pub fn longitudinal_probe(grid: crate::fields::GridSpec) -> SpectralField {
    let dk = grid.dk();
    let centres = [
        ([2.0, 1.0, -1.0], 0.8, 0.3),
        ([-1.0, 3.0, 2.0], -0.5, 0.9),
        ([1.0, -2.0, 3.0], 0.4, -0.6),
    ];
    SpectralField::from_fn(grid, move |k| {
        let w = scale_r3(1.0 / norm_r3(k), k);
        let mut u = Complex64::new(0.0, 0.0);
        let mut v = Complex64::new(0.0, 0.0);
        for (c, au, av) in centres {
            // F_u = i k φ with φ even, F_v odd and real: both real in position space
            for sign in [1.0, -1.0] {
                let d2: f64 = (0..3).map(|i| (k[i] / dk - sign * c[i]).powi(2)).sum();
                let g = (-d2).exp();
                u += Complex64::new(0.0, au * g);
                v += Complex64::new(sign * av * g, 0.0);
            }
        }
        let fu = real_to_c3(w).map(|x| x * u);
        let fv = real_to_c3(w).map(|x| x * v);
        spinor_from_parts(&fu, &fv)
    })
}

/// Divergence scaling of a static field: at t' = 0 a node at k sits at
/// k' = (γk₁, k₂, k₃) in the primed frame, carrying ΛF.
fn divergence_scaling(ops: &OperatorSet, probe: &SpectralField, b: &Boost) -> (f64, f64) {
    let lam = spinor_boost_matrix(ops, b);
    let grid = probe.grid();
    let mut num = CompensatedComplex::default();
    let mut den = 0.0_f64;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut pairs = Vec::new();
    for (idx, psi) in probe.nodes().iter().enumerate() {
        let k = grid.k_at(idx);
        let kp = [b.gamma * k[0], k[1], k[2]];
        let (fu, fv) = spinor_parts(psi);
        let (gu, gv) = spinor_parts(&lam.apply(psi));
        let i = Complex64::i();
        let d = [i * dot_rc(k, fu), i * dot_rc(k, fv)];
        let dp = [i * dot_rc(kp, gu), i * dot_rc(kp, gv)];
        for part in 0..2 {
            num.add(dp[part] * d[part].conj());
            den += d[part].norm_sqr();
            scale = scale.max(b.gamma * d[part].norm());
            pairs.push((dp[part], d[part]));
        }
    }
    for (dp, d) in pairs {
        worst = worst.max((dp - d * b.gamma).norm());
    }
    let observed = if den > 0.0 { num.value().re / den } else { b.gamma };
    let residual = if scale > 0.0 { worst / scale } else { 0.0 };
    (observed, residual)
}

/// Covariance residuals of a state (mode list or spectral grid) under a
/// boost, plus the divergence scaling of a longitudinal probe.
pub fn covariance_check(
    ops: &OperatorSet,
    state: &dyn MomentumSamples,
    probe: &SpectralField,
    b: &Boost,
    units: &Units,
) -> Result<CovarianceReport> {
    let lam = spinor_boost_matrix(ops, b);
    let mut darwin: f64 = 0.0;
    let mut rc: f64 = 0.0;
    let mut failure = None;
    state.visit_samples(&mut |k, psi, _| {
        if failure.is_some() || spinor_norm_sqr(psi) == 0.0 {
            return;
        }
        let (kp, wp) = match boost_wavevector(k, units.c * norm_r3(k), b, units) {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let h = crate::algebra::hamiltonian_matrix(ops, kp, units).expect("k' is nonzero on the light cone");
        let phi = lam.apply(psi);
        let norm = spinor_norm_sqr(&phi).sqrt();
        let hphi = h.apply(&phi);
        let e = units.hbar * wp;
        let diff: Spinor = std::array::from_fn(|i| hphi[i] - phi[i] * e);
        darwin = darwin.max(spinor_norm_sqr(&diff).sqrt() / (e * norm));
        let r = spinor_constraint_residual(kp, &spinor_scale((1.0 / norm).into(), &phi)).expect("nonzero k'");
        rc = rc.max(r.max());
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (observed, residual) = divergence_scaling(ops, probe, b);
    Ok(CovarianceReport {
        beta: b.beta,
        gamma: b.gamma,
        darwin_residual: darwin,
        rc_residual: rc,
        rc_scaling_observed: observed,
        rc_scaling_expected: b.gamma,
        divergence_residual: residual,
    })
}

/// Λ⁻¹(Γ0Γ_j)Λ for j = 1, 2, 3, used to check the conjugation identities.
pub fn conjugated_alphas(ops: &OperatorSet, b: &Boost) -> [Matrix6; 3] {
    let lam = spinor_boost_matrix(ops, b);
    let inv = spinor_boost_matrix(ops, &b.inverse());
    let g0 = ops.gamma0_c();
    std::array::from_fn(|j| inv * (g0 * ops.gamma[j].to_complex()) * lam)
}

/// Spectrum of Λ, {e^{χ}, e^{−χ} each twice, 1 twice}; Λ is Hermitian.
pub fn boost_spectrum(ops: &OperatorSet, b: &Boost) -> [f64; 6] {
    hermitian_eigenvalues(&spinor_boost_matrix(ops, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_operators;
    use crate::modes::{constraint_residual, ModeState};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_superluminal() {
        assert!(matches!(Boost::new(1.0), Err(Error::InvalidBeta(_))));
        assert!(matches!(Boost::new(-1.5), Err(Error::InvalidBeta(_))));
        assert!(Boost::new(f64::NAN).is_err());
    }

    #[test]
    fn identity_at_zero_velocity() {
        let ops = build_operators();
        let lam = spinor_boost_matrix(&ops, &Boost::new(0.0).unwrap());
        assert_eq!(lam.max_abs_diff(&Matrix6::identity()), 0.0);
    }

    #[test]
    fn mixing_coefficients_at_three_fifths() {
        let b = Boost::new(0.6).unwrap();
        assert!((b.gamma - 1.25).abs() < 1e-15);
        assert!((b.chi.cosh() - 1.25).abs() < 1e-15);
        assert!((b.chi.sinh() - 0.75).abs() < 1e-15);
        let lam = spinor_boost_matrix(&build_operators(), &b);
        // F'_u2 = F_u2 cosh χ − F_v3 sinh χ, with ψ = F/√2 on both sides
        assert!((lam.get(1, 1) - c(1.25, 0.0)).norm() < 1e-15);
        assert!((lam.get(1, 5) - c(-0.75, 0.0)).norm() < 1e-15);
        assert!((lam.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn imaginary_time_matrix_matches_real_form() {
        let b = Boost::new(0.35).unwrap();
        let a = b.imaginary_time_matrix();
        for ev in [
            FourVector::new(1.0, [0.2, -0.3, 0.7]),
            FourVector::new(-0.4, [1.5, 0.0, 2.0]),
        ] {
            let v = ev.to_imaginary();
            let out: [Complex64; 4] = std::array::from_fn(|m| (0..4).map(|n| a[m][n] * v[n]).sum());
            let via_a = FourVector::from_imaginary(out);
            let real = ev.boost(&b);
            assert!((via_a.x0 - real.x0).abs() < 1e-15);
            assert!(max_abs(sub_r3(via_a.x, real.x)) < 1e-15);
            // x0 stays purely imaginary, spatial entries real
            assert!(out[0].re.abs() < 1e-15 && out[1].im.abs() < 1e-15);
            assert!((real.interval() - ev.interval()).abs() < 1e-13);
        }
    }

    fn sub_r3(a: R3, b: R3) -> R3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    fn max_abs(a: R3) -> f64 {
        a.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn conjugation_identities() {
        let ops = build_operators();
        let b = Boost::new(0.45).unwrap();
        let conj = conjugated_alphas(&ops, &b);
        let g0 = ops.gamma0_c();
        let g: [Matrix6; 3] = std::array::from_fn(|j| ops.gamma[j].to_complex());
        assert!(conj[0].max_abs_diff(&(g0 * g[0])) < 1e-13);
        for j in 1..3 {
            let comm = g[0] * g[j] - g[j] * g[0];
            let expect = (g0 * g[j]).scale_real(b.gamma) - comm.scale(c(0.0, b.beta * b.gamma));
            assert!(conj[j].max_abs_diff(&expect) < 1e-13);
        }
    }

    #[test]
    fn doppler_and_aberration() {
        let u = Units::natural();
        let b = Boost::new(0.5).unwrap();
        let (kp, wp) = boost_wavevector([1.0, 0.0, 0.0], 1.0, &b, &u).unwrap();
        assert!((wp - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((norm_r3(kp) - wp).abs() < 1e-12);
        let (kp, wp) = boost_wavevector([0.0, 0.0, 1.0], 1.0, &b, &u).unwrap();
        assert!((wp - b.gamma).abs() < 1e-15);
        assert!((kp[0] + b.gamma * 0.5).abs() < 1e-15);
        assert!(matches!(
            boost_wavevector([0.0, 0.0, 1.0], 1.1, &b, &u),
            Err(Error::OffLightCone { .. })
        ));
    }

    #[test]
    fn axial_mode_keeps_helicity() {
        let ops = build_operators();
        let u = Units::natural();
        let b = Boost::new(0.6).unwrap();
        let m = make_mode([2.0, 0.0, 0.0], c(0.6, 0.8), c(0.0, 0.0), 1.0).unwrap();
        let out = boost_mode(&ops, &m, &b, &u).unwrap();
        assert!(out.a_minus.norm() < 1e-15);
        let expect = m.a_plus * (-b.chi).exp();
        assert!((out.a_plus - expect).norm() < 1e-15);
        let same = boost_mode(&ops, &m, &Boost::identity(), &u).unwrap();
        assert_eq!(same.k, m.k);
        assert!((same.a_plus - m.a_plus).norm() < 1e-15 && same.a_minus.norm() < 1e-15);
    }

    #[test]
    fn darwin_residual_for_random_state() {
        let ops = build_operators();
        let u = Units::natural();
        let st = ModeState::random(17, 3, 0.5, 2.0);
        let probe = longitudinal_probe(crate::fields::GridSpec::new(8, 1.0).unwrap());
        let r = covariance_check(&ops, &st, &probe, &Boost::new(0.7).unwrap(), &u).unwrap();
        assert!(r.darwin_residual < 1e-10, "{r:?}");
        assert!(r.divergence_residual < 1e-10, "{r:?}");
        assert!((r.rc_scaling_observed - r.gamma).abs() < 1e-10);
        for mode in &st.modes {
            let bm = boost_mode(&ops, mode, &Boost::new(-0.9).unwrap(), &u).unwrap();
            assert!(constraint_residual(&ModeState::new(vec![bm])).max() < 1e-12);
        }
    }

    #[test]
    fn identity_boost_matches_self_check() {
        let ops = build_operators();
        let st = ModeState::random(5, 3, 0.5, 2.0);
        let probe = longitudinal_probe(crate::fields::GridSpec::new(8, 1.0).unwrap());
        let r = covariance_check(&ops, &st, &probe, &Boost::identity(), &Units::natural()).unwrap();
        assert!(r.darwin_residual < 1e-14);
        assert_eq!(r.divergence_residual, 0.0);
        assert!((r.rc_scaling_observed - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spectrum_of_lambda() {
        let b = Boost::new(0.3).unwrap();
        let ev = boost_spectrum(&build_operators(), &b);
        let expect = [b.chi.exp(), b.chi.exp(), 1.0, 1.0, (-b.chi).exp(), (-b.chi).exp()];
        for (a, e) in ev.iter().zip(expect) {
            assert!((a - e).abs() < 1e-13);
        }
    }
}
