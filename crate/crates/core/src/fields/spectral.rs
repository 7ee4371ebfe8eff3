use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fields::grid::{Fft3, GridSpec};
use crate::modes::{helicity_basis, spinor_constraint_residual, ConstraintResidual, ModeState, WaveVector};
use crate::numeric::{for_each_mut, CompensatedSum};
use crate::units::Units;
use crate::vector::*;

/// Wavefunction sampled on the k-grid. The k = 0 node is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    psi: Vec<Spinor>,
    pub time: f64,
}

/// Wavefunction sampled on the x-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionField {
    grid: GridSpec,
    psi: Vec<Spinor>,
    pub time: f64,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            grid,
            psi: vec![ZERO_SPINOR; grid.nodes()],
            time: 0.0,
        }
    }

    /// Wrap node data; the k = 0 node is cleared.
    pub fn from_nodes(grid: GridSpec, mut psi: Vec<Spinor>, time: f64) -> Result<Self> {
        if psi.len() != grid.nodes() {
            return Err(Error::GridMismatch);
        }
        psi[0] = ZERO_SPINOR;
        Ok(SpectralField { grid, psi, time })
    }

    /// Sample `f(k)` at every node except k = 0.
    pub fn from_fn(grid: GridSpec, f: impl Fn(R3) -> Spinor + Sync + Send) -> Self {
        let mut psi = vec![ZERO_SPINOR; grid.nodes()];
        for_each_mut(&mut psi, |idx, v| {
            if idx != 0 {
                *v = f(grid.k_at(idx));
            }
        });
        SpectralField { grid, psi, time: 0.0 }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn nodes(&self) -> &[Spinor] {
        &self.psi
    }

    pub fn into_nodes(self) -> Vec<Spinor> {
        self.psi
    }

    /// Σ|ψ|² dk³.
    pub fn total_probability(&self) -> f64 {
        let s: CompensatedSum = self.psi.iter().map(spinor_norm_sqr).collect();
        s.value() * self.grid.k_cell_volume()
    }

    /// Exact free evolution: ψ(k) ← e^{−ic|k|Δt} ψ(k).
    pub fn evolve(&self, dt: f64, units: &Units) -> SpectralField {
        let grid = self.grid;
        let mut psi = self.psi.clone();
        for_each_mut(&mut psi, |idx, v| {
            let omega = units.c * norm_r3(grid.k_at(idx));
            let ph = Complex64::from_polar(1.0, -omega * dt);
            *v = spinor_scale(ph, v);
        });
        SpectralField {
            grid,
            psi,
            time: self.time + dt,
        }
    }

    /// Maximum relativistic-condition residual over nonzero nodes, relative to
    /// the largest nodal norm |ψ|. Zero for an empty field.
    pub fn constraint_residual(&self) -> ConstraintResidual {
        let scale = self.psi.iter().map(|p| spinor_norm_sqr(p).sqrt()).fold(0.0, f64::max);
        let mut acc = ConstraintResidual::default();
        if scale == 0.0 {
            return acc;
        }
        for (idx, p) in self.psi.iter().enumerate().skip(1) {
            let r = spinor_constraint_residual(self.grid.k_at(idx), &spinor_scale((1.0 / scale).into(), p))
                .expect("nonzero node");
            acc.merge(&r);
        }
        acc
    }
}

impl PositionField {
    pub fn from_nodes(grid: GridSpec, psi: Vec<Spinor>, time: f64) -> Result<Self> {
        if psi.len() != grid.nodes() {
            return Err(Error::GridMismatch);
        }
        Ok(PositionField { grid, psi, time })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn nodes(&self) -> &[Spinor] {
        &self.psi
    }

    /// Σ|Ψ|² dx³.
    pub fn total_probability(&self) -> f64 {
        let s: CompensatedSum = self.psi.iter().map(spinor_norm_sqr).collect();
        s.value() * self.grid.cell_volume()
    }
}

/// Split AoS 6-vectors into per-component arrays and transform each.
pub(crate) fn transform_components<const C: usize>(
    grid: &GridSpec,
    data: &[[Complex64; C]],
    direction: FftDirection,
    prefactor: f64,
) -> Vec<[Complex64; C]> {
    let fft = Fft3::new(grid.n());
    let mut out = vec![[Complex64::new(0.0, 0.0); C]; data.len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
    for c in 0..C {
        // the (−1)^m phase moves the origin to the centre node on both sides
        for_each_mut(&mut buf, |idx, v| {
            *v = data[idx][c]
                * match direction {
                    FftDirection::Inverse => grid.origin_phase(idx),
                    FftDirection::Forward => 1.0,
                };
        });
        fft.transform(&mut buf, direction);
        for (idx, (o, v)) in out.iter_mut().zip(&buf).enumerate() {
            let ph = match direction {
                FftDirection::Forward => grid.origin_phase(idx),
                FftDirection::Inverse => 1.0,
            };
            o[c] = v * (prefactor * ph);
        }
    }
    out
}

/// Continuum normalization (2π)^{-3/2} carried onto the grid.
fn norm_factor() -> f64 {
    TAU.powf(-1.5)
}

/// Ψ(x_j) = (2π)^{-3/2} Σ_m ψ(k_m) e^{ik_m·x_j} dk³.
pub fn to_position(spectral: &SpectralField) -> PositionField {
    let g = spectral.grid;
    let psi = transform_components(
        &g,
        &spectral.psi,
        FftDirection::Inverse,
        norm_factor() * g.k_cell_volume(),
    );
    PositionField {
        grid: g,
        psi,
        time: spectral.time,
    }
}

/// ψ(k_m) = (2π)^{-3/2} Σ_j Ψ(x_j) e^{−ik_m·x_j} dx³, with k = 0 cleared.
pub fn to_momentum(position: &PositionField) -> SpectralField {
    let g = position.grid;
    let mut psi = transform_components(
        &g,
        &position.psi,
        FftDirection::Forward,
        norm_factor() * g.cell_volume(),
    );
    psi[0] = ZERO_SPINOR;
    SpectralField {
        grid: g,
        psi,
        time: position.time,
    }
}

/// Deposit every mode at its nearest k-node with density `sqrt(weight/dk³)`.
///
/// The helicity amplitudes are re-expressed in the node's own helicity basis,
/// so the deposited spinor satisfies the relativistic condition at the node
/// wavevector exactly. Modes landing on the same node add coherently.
pub fn state_to_grid(state: &ModeState, grid: &GridSpec) -> Result<SpectralField> {
    let dk = grid.dk();
    let lim = grid.max_index();
    let mut field = SpectralField::zeros(*grid);
    field.time = state.time;
    for mode in &state.modes {
        let k = mode.k.components();
        let m = k.map(|c| (c / dk).round());
        if m.iter().any(|c| c.abs() > lim as f64) || m == [0.0; 3] {
            return Err(Error::OffGridMode { k });
        }
        let m = m.map(|c| c as i64);
        let idx = grid.k_index(m);
        let kn = WaveVector::new(grid.k_at(idx))?;
        let b = helicity_basis(&kn);
        let scale = (mode.weight / grid.k_cell_volume()).sqrt();
        let fu = add_c3(
            &scale_c3(mode.a_plus * scale, &b.e_plus),
            &scale_c3(mode.a_minus * scale, &b.e_minus),
        );
        let fl = cross_rc(b.w, &fu);
        let add = spinor_from_parts(&fu, &fl);
        for (o, a) in field.psi[idx].iter_mut().zip(add) {
            *o += a;
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::make_mode;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: GridSpec, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = (0..grid.nodes())
            .map(|_| std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        SpectralField::from_nodes(grid, psi, 0.0).unwrap()
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = GridSpec::new(16, 0.3).unwrap();
        let s = random_field(g, 3);
        let x = to_position(&s);
        let back = to_momentum(&x);
        let scale = s.nodes().iter().map(|p| spinor_norm_sqr(p).sqrt()).fold(0.0, f64::max);
        let err = s
            .nodes()
            .iter()
            .zip(back.nodes())
            .map(|(a, b)| spinor_max_abs_diff(a, b))
            .fold(0.0, f64::max);
        assert!(err / scale < 1e-12, "{err}");
        let (p, q) = (s.total_probability(), x.total_probability());
        assert!(((p - q) / p).abs() < 1e-12);
    }

    #[test]
    fn single_node_is_plane_wave() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let mut s = SpectralField::zeros(g);
        let idx = g.k_index([1, 2, -1]);
        s.psi[idx][0] = Complex64::new(1.0, 0.0);
        let x = to_position(&s);
        let amp = TAU.powf(-1.5) * g.k_cell_volume();
        let k = g.k_at(idx);
        for (j, v) in x.nodes().iter().enumerate() {
            let expect = Complex64::from_polar(amp, dot_r3(k, g.x_at(j)));
            assert!((v[0] - expect).norm() < 1e-14 * amp.max(1.0));
            assert!(v[1].norm() < 1e-15);
        }
    }

    #[test]
    fn deposit_exact_node() {
        let g = GridSpec::new(16, 0.5).unwrap();
        let k = g.k_at(g.k_index([2, 0, 1]));
        let st = ModeState::new(vec![make_mode(
            k,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            1.0,
        )
        .unwrap()]);
        let f = state_to_grid(&st, &g).unwrap();
        let nonzero = f.nodes().iter().filter(|p| spinor_norm_sqr(p) > 0.0).count();
        assert_eq!(nonzero, 1);
        assert!((f.total_probability() - 1.0).abs() < 1e-12);
        assert!(f.constraint_residual().max() < 1e-13);
    }

    #[test]
    fn off_grid_rejected() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let far = g.dk() * 4.0;
        let st = ModeState::new(vec![make_mode([far, 0.0, 0.0], 1.0.into(), 0.0.into(), 1.0).unwrap()]);
        assert!(matches!(state_to_grid(&st, &g), Err(Error::OffGridMode { .. })));
        let tiny = g.dk() * 0.3;
        let st = ModeState::new(vec![make_mode([tiny, 0.0, 0.0], 1.0.into(), 0.0.into(), 1.0).unwrap()]);
        assert!(matches!(state_to_grid(&st, &g), Err(Error::OffGridMode { .. })));
    }

    #[test]
    fn evolution_is_phase_only() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let s = random_field(g, 9);
        let units = Units::natural();
        let e = s.evolve(0.7, &units);
        assert!((e.total_probability() - s.total_probability()).abs() < 1e-12 * s.total_probability());
        let back = e.evolve(-0.7, &units);
        let err = s
            .nodes()
            .iter()
            .zip(back.nodes())
            .map(|(a, b)| spinor_max_abs_diff(a, b))
            .fold(0.0, f64::max);
        assert!(err < 1e-14);
    }
}
