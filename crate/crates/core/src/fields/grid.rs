use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::for_each_chunk_mut;
use crate::vector::R3;

/// Periodic cubic grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    dx: f64,
}

impl GridSpec {
    pub fn new(n: usize, dx: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two and at least 8"
            )));
        }
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::InvalidGrid(format!("dx = {dx} must be positive")));
        }
        Ok(GridSpec { n, dx })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn nodes(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Box side `n·dx`.
    pub fn length(&self) -> f64 {
        self.n as f64 * self.dx
    }

    pub fn dk(&self) -> f64 {
        TAU / self.length()
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(3)
    }

    pub fn k_cell_volume(&self) -> f64 {
        self.dk().powi(3)
    }

    /// Largest representable |m| per axis.
    pub fn max_index(&self) -> i64 {
        self.n as i64 / 2 - 1
    }

    #[inline]
    pub fn linear(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n + j) * self.n + l
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Signed FFT index of an unsigned one.
    #[inline]
    pub fn signed(&self, m: usize) -> i64 {
        if m < self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// Unsigned storage index of a signed one.
    #[inline]
    pub fn unsigned(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn signed_indices(&self, idx: usize) -> [i64; 3] {
        let u = self.unravel(idx);
        [self.signed(u[0]), self.signed(u[1]), self.signed(u[2])]
    }

    /// Wavevector of a k-node.
    #[inline]
    pub fn k_at(&self, idx: usize) -> R3 {
        let m = self.signed_indices(idx);
        let dk = self.dk();
        [m[0] as f64 * dk, m[1] as f64 * dk, m[2] as f64 * dk]
    }

    /// Position of an x-node.
    #[inline]
    pub fn x_at(&self, idx: usize) -> R3 {
        let u = self.unravel(idx);
        let h = (self.n / 2) as f64;
        [
            (u[0] as f64 - h) * self.dx,
            (u[1] as f64 - h) * self.dx,
            (u[2] as f64 - h) * self.dx,
        ]
    }

    /// Linear index of the k-node with signed indices `m`.
    pub fn k_index(&self, m: [i64; 3]) -> usize {
        self.linear(self.unsigned(m[0]), self.unsigned(m[1]), self.unsigned(m[2]))
    }

    /// Linear index of the node holding −k.
    pub fn mirror_index(&self, idx: usize) -> usize {
        let m = self.signed_indices(idx);
        self.k_index([-m[0], -m[1], -m[2]])
    }

    /// True for k = 0 or any node on a Nyquist plane.
    pub fn is_excluded_k(&self, idx: usize) -> bool {
        let m = self.signed_indices(idx);
        let nyq = -(self.n as i64) / 2;
        m == [0, 0, 0] || m.contains(&nyq)
    }

    /// (−1)^(m_x + m_y + m_z): phase from placing the origin at node n/2.
    #[inline]
    pub fn origin_phase(&self, idx: usize) -> f64 {
        let u = self.unravel(idx);
        if (u[0] + u[1] + u[2]).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

/// Cached 1-D plans for a 3-D transform on one grid size.
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Unnormalized in-place transform of one scalar component stored
    /// row-major. Forward uses e^{−2πi mj/n}, inverse e^{+2πi mj/n}.
    pub fn transform(&self, data: &mut [Complex64], direction: FftDirection) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let plan = match direction {
            FftDirection::Forward => &self.forward,
            FftDirection::Inverse => &self.inverse,
        };
        // contiguous axis
        for_each_chunk_mut(data, n, |_, line| plan.process(line));
        // middle and outer axes: gather into contiguous lines, transform, scatter
        let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
        for axis in [1usize, 0] {
            let stride = if axis == 1 { n } else { n * n };
            let src: &[Complex64] = data;
            for_each_chunk_mut(&mut lines, n, |line_id, line| {
                let base = line_base(n, axis, line_id);
                for (t, v) in line.iter_mut().enumerate() {
                    *v = src[base + t * stride];
                }
                plan.process(line);
            });
            for (line_id, line) in lines.chunks(n).enumerate() {
                let base = line_base(n, axis, line_id);
                for (t, v) in line.iter().enumerate() {
                    data[base + t * stride] = *v;
                }
            }
        }
    }
}

/// Start offset of the `line_id`-th line running along `axis`.
fn line_base(n: usize, axis: usize, line_id: usize) -> usize {
    let a = line_id / n;
    let b = line_id % n;
    match axis {
        // lines along j: fixed (i, l)
        1 => a * n * n + b,
        // lines along i: fixed (j, l)
        _ => a * n + b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(4, 1.0).is_err());
        assert!(GridSpec::new(12, 1.0).is_err());
        assert!(GridSpec::new(16, 0.0).is_err());
        assert!(GridSpec::new(16, 0.5).is_ok());
    }

    #[test]
    fn index_round_trips() {
        let g = GridSpec::new(8, 0.25).unwrap();
        for idx in 0..g.nodes() {
            let m = g.signed_indices(idx);
            assert_eq!(g.k_index(m), idx);
            assert_eq!(g.mirror_index(g.mirror_index(idx)), idx);
        }
        assert_eq!(g.x_at(g.linear(4, 4, 4)), [0.0, 0.0, 0.0]);
        assert!(g.is_excluded_k(0));
        assert!(g.is_excluded_k(g.k_index([-4, 1, 0])));
        assert!(!g.is_excluded_k(g.k_index([3, -3, 1])));
    }

    #[test]
    fn fft_matches_direct_dft() {
        let n = 8;
        let g = GridSpec::new(n, 1.0).unwrap();
        let data: Vec<Complex64> = (0..g.nodes())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        Fft3::new(n).transform(&mut fast, FftDirection::Forward);
        for probe in [0usize, 1, 77, 300, 511] {
            let m = g.unravel(probe);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in data.iter().enumerate() {
                let x = g.unravel(j);
                let phase = -TAU * ((m[0] * x[0] + m[1] * x[1] + m[2] * x[2]) as f64) / n as f64;
                acc += v * Complex64::from_polar(1.0, phase);
            }
            assert!((acc - fast[probe]).norm() < 1e-10);
        }
    }
}
