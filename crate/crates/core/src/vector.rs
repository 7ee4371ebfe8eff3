//! Small fixed-size vector helpers for real and complex 3-vectors and 6-spinors.

use num_complex::Complex64;

pub type R3 = [f64; 3];
pub type C3 = [Complex64; 3];
pub type Spinor = [Complex64; 6];

pub const ZERO_C3: C3 = [Complex64::new(0.0, 0.0); 3];
pub const ZERO_SPINOR: Spinor = [Complex64::new(0.0, 0.0); 6];

#[inline]
pub fn norm_r3(v: R3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub fn dot_r3(a: R3, b: R3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross_r3(a: R3, b: R3) -> R3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn scale_r3(s: f64, v: R3) -> R3 {
    [s * v[0], s * v[1], s * v[2]]
}

#[inline]
pub fn real_to_c3(v: R3) -> C3 {
    [v[0].into(), v[1].into(), v[2].into()]
}

/// Bilinear `a · b` (no conjugation).
#[inline]
pub fn dot_rc(a: R3, b: C3) -> Complex64 {
    b[0] * a[0] + b[1] * a[1] + b[2] * a[2]
}

/// Hermitian product `a† b`.
#[inline]
pub fn cdot(a: &C3, b: &C3) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

#[inline]
pub fn norm_sqr_c3(a: &C3) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()
}

#[inline]
pub fn norm_c3(a: &C3) -> f64 {
    norm_sqr_c3(a).sqrt()
}

#[inline]
pub fn cross_rc(a: R3, b: &C3) -> C3 {
    [
        b[2] * a[1] - b[1] * a[2],
        b[0] * a[2] - b[2] * a[0],
        b[1] * a[0] - b[0] * a[1],
    ]
}

#[inline]
pub fn cross_cc(a: &C3, b: &C3) -> C3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn conj_c3(a: &C3) -> C3 {
    [a[0].conj(), a[1].conj(), a[2].conj()]
}

#[inline]
pub fn add_c3(a: &C3, b: &C3) -> C3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub_c3(a: &C3, b: &C3) -> C3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale_c3(s: Complex64, a: &C3) -> C3 {
    [s * a[0], s * a[1], s * a[2]]
}

/// Split a spinor into its upper and lower 3-blocks, without the 1/√2 factor.
#[inline]
pub fn blocks(psi: &Spinor) -> (C3, C3) {
    ([psi[0], psi[1], psi[2]], [psi[3], psi[4], psi[5]])
}

#[inline]
pub fn join(upper: &C3, lower: &C3) -> Spinor {
    [upper[0], upper[1], upper[2], lower[0], lower[1], lower[2]]
}

/// (F_u, F_l) with ψ = (F_u; F_l)/√2.
#[inline]
pub fn spinor_parts(psi: &Spinor) -> (C3, C3) {
    let s = Complex64::new(std::f64::consts::SQRT_2, 0.0);
    let (u, l) = blocks(psi);
    (scale_c3(s, &u), scale_c3(s, &l))
}

#[inline]
pub fn spinor_from_parts(fu: &C3, fl: &C3) -> Spinor {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    join(&scale_c3(s, fu), &scale_c3(s, fl))
}

#[inline]
pub fn spinor_norm_sqr(psi: &Spinor) -> f64 {
    psi.iter().map(|z| z.norm_sqr()).sum()
}

#[inline]
pub fn spinor_dot(a: &Spinor, b: &Spinor) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn spinor_max_abs_diff(a: &Spinor, b: &Spinor) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn spinor_scale(s: Complex64, a: &Spinor) -> Spinor {
    let mut out = *a;
    for z in out.iter_mut() {
        *z *= s;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_products_agree() {
        let a = [0.3, -1.2, 2.0];
        let b = [1.5, 0.25, -0.7];
        let rc = cross_rc(a, &real_to_c3(b));
        let rr = cross_r3(a, b);
        for i in 0..3 {
            assert!((rc[i].re - rr[i]).abs() < 1e-15 && rc[i].im == 0.0);
        }
        let cc = cross_cc(&real_to_c3(a), &real_to_c3(b));
        for i in 0..3 {
            assert!((cc[i].re - rr[i]).abs() < 1e-15);
        }
    }
}
