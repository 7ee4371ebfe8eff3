//! Physical constants used throughout the crate.

use serde::{Deserialize, Serialize};

/// Constant set (ħ, c, ε0, μ0). `c = 1/√(ε0 μ0)` holds for both presets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub hbar: f64,
    pub c: f64,
    pub eps0: f64,
    pub mu0: f64,
}

impl Units {
    /// SI values. ħ and c are exact; μ0 is derived from ε0 and c.
    pub const fn si() -> Self {
        const C: f64 = 299_792_458.0;
        const EPS0: f64 = 8.854_187_812_8e-12;
        Units {
            hbar: 1.054_571_817e-34,
            c: C,
            eps0: EPS0,
            mu0: 1.0 / (EPS0 * C * C),
        }
    }

    /// ħ = c = ε0 = μ0 = 1.
    pub const fn natural() -> Self {
        Units {
            hbar: 1.0,
            c: 1.0,
            eps0: 1.0,
            mu0: 1.0,
        }
    }

    /// Vacuum impedance μ0 c.
    pub fn impedance(&self) -> f64 {
        self.mu0 * self.c
    }
}

impl Default for Units {
    fn default() -> Self {
        Units::si()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn light_speed_consistent() {
        for u in [Units::si(), Units::natural()] {
            let c = 1.0 / (u.eps0 * u.mu0).sqrt();
            assert!((c - u.c).abs() / u.c < 1e-15);
        }
    }
}
