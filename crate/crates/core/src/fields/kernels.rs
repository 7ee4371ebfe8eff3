//! Radial checks of the two fractional kernel pairs.
//!
//! For a spherically symmetric f(r) the 3-D transform with the (2π)^{-3/2}
//! convention reduces to
//! `F(k) = (2π)^{-3/2} (4π/k) ∫₀^∞ r f(r) sin(kr) dr`.
//! With `f = √(2/π)/r²` this gives `1/k`; with `f = 1/(2 r^{5/2})` it gives
//! `1/√k`. The oscillatory integral is split at the zeros of sin(kr), each
//! half-period is integrated with Gauss–Legendre, and the resulting
//! alternating series of partial sums is accelerated by repeated averaging.
//!
//! Composing the two pairs fixes the position-space wavefunction kernel:
//! `Ψ(x) = √(ε0/ħc) / (2(2π)^{3/2}) ∫ |x−x'|^{-5/2} E(x') d³x'`, which equals
//! the form `√(ε0/2πħc) (1/4π) ∫ …` with the 1/(4π) included.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// √(2/π)/r² ↔ 1/k
    InvK,
    /// 1/(2 r^{5/2}) ↔ 1/√k
    InvSqrtK,
}

impl Kernel {
    pub fn exact(self, k: f64) -> f64 {
        match self {
            Kernel::InvK => 1.0 / k,
            Kernel::InvSqrtK => 1.0 / k.sqrt(),
        }
    }

    /// r·f(r), the weight multiplying sin(kr).
    fn radial_weight(self, r: f64) -> f64 {
        match self {
            Kernel::InvK => (2.0 / PI).sqrt() / r,
            Kernel::InvSqrtK => 0.5 * r.powf(-1.5),
        }
    }
}

/// How the tail of the alternating half-period series is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Accelerator {
    /// Plain truncated sum.
    None,
    /// Mean of the last two partial sums (first Cesàro mean).
    Average,
    /// Repeated averaging of the partial sums, `levels` times.
    Euler { levels: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub half_periods: usize,
    pub order: usize,
    pub accelerator: Accelerator,
    /// Accepted relative change between `half_periods` and half as many.
    pub tolerance: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            half_periods: 48,
            order: 24,
            accelerator: Accelerator::Euler { levels: 20 },
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub k: f64,
    pub numeric: f64,
    pub exact: f64,
    pub relative_error: f64,
}

/// Integrals of r f(r) sin(kr) over consecutive half-periods.
fn half_period_terms(kernel: Kernel, k: f64, count: usize, rule: &GaussLegendre) -> Vec<f64> {
    let h = PI / k;
    (0..count)
        .map(|j| {
            let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
            if j == 0 {
                // r = t² removes the r^{-1/2} behaviour at the origin
                rule.integrate(0.0, b.sqrt(), |t| {
                    let r = t * t;
                    2.0 * t * kernel.radial_weight(r) * (k * r).sin()
                })
            } else {
                rule.integrate(a, b, |r| kernel.radial_weight(r) * (k * r).sin())
            }
        })
        .collect()
}

fn accelerate(terms: &[f64], acc: Accelerator) -> f64 {
    let mut partial = Vec::with_capacity(terms.len());
    let mut s = 0.0;
    for t in terms {
        s += t;
        partial.push(s);
    }
    let levels = match acc {
        Accelerator::None => return s,
        Accelerator::Average => 1,
        Accelerator::Euler { levels } => levels.min(partial.len() - 1),
    };
    let mut row = partial[partial.len() - 1 - levels..].to_vec();
    for _ in 0..levels {
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    row[0]
}

fn evaluate(kernel: Kernel, k: f64, settings: &QuadratureSettings, half_periods: usize) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(settings.order.max(2)).unwrap());
    let terms = half_period_terms(kernel, k, half_periods.max(2), &rule);
    let integral = accelerate(&terms, settings.accelerator);
    (2.0 * PI).powf(-1.5) * 4.0 * PI / k * integral
}

/// Numerical radial transform of the kernel at one wavenumber.
pub fn radial_transform(kernel: Kernel, k: f64, settings: &QuadratureSettings) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::ZeroWavevector);
    }
    let n = settings.half_periods;
    let fine = evaluate(kernel, k, settings, n);
    let coarse = evaluate(kernel, k, settings, n / 2);
    let change = ((fine - coarse) / fine).abs();
    if !(change <= settings.tolerance) {
        return Err(Error::QuadratureFailure { change });
    }
    Ok(fine)
}

pub fn kernel_pair_check(kernel: Kernel, k_samples: &[f64]) -> Result<Vec<KernelSample>> {
    kernel_pair_check_with(kernel, k_samples, &QuadratureSettings::default())
}

pub fn kernel_pair_check_with(
    kernel: Kernel,
    k_samples: &[f64],
    settings: &QuadratureSettings,
) -> Result<Vec<KernelSample>> {
    k_samples
        .iter()
        .map(|&k| {
            let numeric = radial_transform(kernel, k, settings)?;
            let exact = kernel.exact(k);
            Ok(KernelSample {
                k,
                numeric,
                exact,
                relative_error: ((numeric - exact) / exact).abs(),
            })
        })
        .collect()
}

/// Error against the closed form for each half-period count, without the
/// change-between-levels acceptance test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub half_periods: Vec<usize>,
    pub errors: Vec<f64>,
    /// Least-squares slope of −log(error) against log(half_periods).
    pub observed_order: f64,
}

pub fn convergence_study(kernel: Kernel, k: f64, half_periods: &[usize], accelerator: Accelerator) -> ConvergenceStudy {
    let settings = QuadratureSettings {
        accelerator,
        ..QuadratureSettings::default()
    };
    let errors: Vec<f64> = half_periods
        .iter()
        .map(|&n| ((evaluate(kernel, k, &settings, n) - kernel.exact(k)) / kernel.exact(k)).abs())
        .collect();
    let xs: Vec<f64> = half_periods.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| -e.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    ConvergenceStudy {
        half_periods: half_periods.to_vec(),
        errors,
        observed_order: num / den,
    }
}
