//! Gridded fields, the unitary 3-D transform and classical-field correspondence.
//!
//! Grids are periodic with `n` points per axis (power of two, n ≥ 8) and
//! nodes at `x_j = (j − n/2)·dx`, so the origin is a node. Wavevectors follow
//! the standard FFT ordering `k = 2π m/(n dx)`, m ∈ [−n/2, n/2). The
//! continuum transform `Ψ(x) = (2π)^{-3/2} ∫ ψ(k) e^{ik·x} d³k` is replaced
//! by the Riemann sum over k-nodes, which makes the discrete pair unitary in
//! the sense `Σ|Ψ|² dx³ = Σ|ψ|² dk³`.
//!
//! The k = 0 node is always zero in wavefunction fields. The Nyquist planes
//! (m = −n/2 on any axis) have no ±k partner and are treated as outside the
//! representable band.

mod classical;
mod grid;
pub mod io;
pub mod kernels;
mod spectral;

pub use classical::*;
pub use grid::*;
pub use spectral::*;
