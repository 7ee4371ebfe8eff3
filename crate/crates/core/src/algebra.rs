//! The fixed 6×6 operators Γ0, Γ, Σ, Ω and the identities they satisfy.
//!
//! The formalism's operators only contain entries from {0, ±1, ±i}, so they are
//! stored as Gaussian-integer matrices and every identity below is checked
//! with exact equality. Momentum-dependent matrices such as the Hamiltonian
//! are built in double precision from the exact set.
//!
//! Block convention: rows/columns 0..3 form the upper block, 3..6 the lower.
//! The cross product of matrix vectors is fixed as
//! `(Γ×Γ)_i = ε_ijk Γ_j Γ_k` (summed over j, k), which gives
//! `Ω = −iΓ×Γ = blockdiag(Σ, Σ)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, SMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Units;
use crate::vector::{norm_r3, Spinor, R3};

/// Tolerance on |n| for direction arguments.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// A Gaussian integer `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussInt { re, im }
    }

    pub fn modulus(self) -> f64 {
        ((self.re * self.re + self.im * self.im) as f64).sqrt()
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (r, 0) => write!(f, "{r}"),
            (0, i) => write!(f, "{i}i"),
            (r, i) if i < 0 => write!(f, "{r}-{}i", -i),
            (r, i) => write!(f, "{r}+{i}i"),
        }
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-self.re, -self.im)
    }
}

/// Ring operations needed by [`SquareMatrix`].
pub trait Scalar:
    Copy + PartialEq + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn conj(self) -> Self;
    fn magnitude(self) -> f64;
    fn from_int(n: i64) -> Self;
}

impl Scalar for GaussInt {
    fn zero() -> Self {
        GaussInt::ZERO
    }
    fn one() -> Self {
        GaussInt::ONE
    }
    fn conj(self) -> Self {
        GaussInt::new(self.re, -self.im)
    }
    fn magnitude(self) -> f64 {
        self.modulus()
    }
    fn from_int(n: i64) -> Self {
        GaussInt::new(n, 0)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
}

/// Dense `N × N` matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareMatrix<T, const N: usize>(pub [[T; N]; N]);

pub type ExactMatrix3 = SquareMatrix<GaussInt, 3>;
pub type ExactMatrix6 = SquareMatrix<GaussInt, 6>;
pub type Matrix3 = SquareMatrix<Complex64, 3>;
pub type Matrix6 = SquareMatrix<Complex64, 6>;

impl<T: Scalar, const N: usize> SquareMatrix<T, N> {
    pub fn zero() -> Self {
        SquareMatrix([[T::zero(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = T::one();
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.0[i][j]
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| s * self.0[i][j])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|x| x.magnitude())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn apply(&self, v: &[T; N]) -> [T; N] {
        let mut out = [T::zero(); N];
        for i in 0..N {
            let mut acc = T::zero();
            for j in 0..N {
                acc = acc + self.0[i][j] * v[j];
            }
            out[i] = acc;
        }
        out
    }
}

impl<const N: usize> SquareMatrix<GaussInt, N> {
    pub fn to_complex(&self) -> SquareMatrix<Complex64, N> {
        SquareMatrix::from_fn(|i, j| self.0[i][j].to_complex())
    }
}

impl<const N: usize> SquareMatrix<Complex64, N> {
    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }
}

impl<T: Scalar, const N: usize> Add for SquareMatrix<T, N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + o.0[i][j])
    }
}

impl<T: Scalar, const N: usize> Sub for SquareMatrix<T, N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - o.0[i][j])
    }
}

impl<T: Scalar, const N: usize> Neg for SquareMatrix<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl<T: Scalar, const N: usize> Mul for SquareMatrix<T, N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::from_fn(|i, j| {
            let mut acc = T::zero();
            for k in 0..N {
                acc = acc + self.0[i][k] * o.0[k][j];
            }
            acc
        })
    }
}

/// `AB − BA`.
pub fn commutator<T: Scalar, const N: usize>(a: &SquareMatrix<T, N>, b: &SquareMatrix<T, N>) -> SquareMatrix<T, N> {
    *a * *b - *b * *a
}

pub fn anticommutator<T: Scalar, const N: usize>(a: &SquareMatrix<T, N>, b: &SquareMatrix<T, N>) -> SquareMatrix<T, N> {
    *a * *b + *b * *a
}

/// Levi-Civita symbol on indices 0..3.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

fn delta(i: usize, j: usize) -> i64 {
    i64::from(i == j)
}

/// Place 3×3 blocks into a 6×6 matrix `[[ul, ur], [ll, lr]]`.
pub fn from_blocks<T: Scalar>(
    ul: &SquareMatrix<T, 3>,
    ur: &SquareMatrix<T, 3>,
    ll: &SquareMatrix<T, 3>,
    lr: &SquareMatrix<T, 3>,
) -> SquareMatrix<T, 6> {
    SquareMatrix::from_fn(|i, j| match (i < 3, j < 3) {
        (true, true) => ul.0[i][j],
        (true, false) => ur.0[i][j - 3],
        (false, true) => ll.0[i - 3][j],
        (false, false) => lr.0[i - 3][j - 3],
    })
}

/// The exact operator set of the formalism.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSet {
    pub gamma0: ExactMatrix6,
    pub gamma: [ExactMatrix6; 3],
    pub sigma: [ExactMatrix3; 3],
    pub omega: [ExactMatrix6; 3],
}

/// Build Γ0, Γ_i, Σ_i and Ω_i. `(Σ_k)_ij = −i ε_ijk`; Ω is computed from
/// `−i ε_ijk Γ_j Γ_k`, not written down directly.
pub fn build_operators() -> OperatorSet {
    let sigma: [ExactMatrix3; 3] =
        std::array::from_fn(|k| SquareMatrix::from_fn(|i, j| GaussInt::new(0, -levi_civita(i, j, k))));
    let zero = ExactMatrix3::zero();
    let id3 = ExactMatrix3::identity();
    let gamma0 = from_blocks(&id3, &zero, &zero, &(-id3));
    let gamma: [ExactMatrix6; 3] = std::array::from_fn(|i| from_blocks(&zero, &sigma[i], &sigma[i], &zero));
    let omega = std::array::from_fn(|i| omega_from_gamma(&gamma, i));
    OperatorSet {
        gamma0,
        gamma,
        sigma,
        omega,
    }
}

/// `−i (Γ×Γ)_i = −i ε_ijk Γ_j Γ_k`.
pub fn omega_from_gamma(gamma: &[ExactMatrix6; 3], i: usize) -> ExactMatrix6 {
    let mut acc = ExactMatrix6::zero();
    for j in 0..3 {
        for k in 0..3 {
            let e = levi_civita(i, j, k);
            if e != 0 {
                acc = acc + (gamma[j] * gamma[k]).scale(GaussInt::from_int(e));
            }
        }
    }
    acc.scale(-GaussInt::I)
}

impl OperatorSet {
    pub fn gamma0_c(&self) -> Matrix6 {
        self.gamma0.to_complex()
    }

    /// Γ·v in floating point.
    pub fn gamma_dot(&self, v: R3) -> Matrix6 {
        dot_ops(&self.gamma, v)
    }

    /// Ω·v in floating point.
    pub fn omega_dot(&self, v: R3) -> Matrix6 {
        dot_ops(&self.omega, v)
    }

    /// Σ·v (3×3) in floating point.
    pub fn sigma_dot(&self, v: R3) -> Matrix3 {
        let mut acc = Matrix3::zero();
        for (s, &c) in self.sigma.iter().zip(v.iter()) {
            acc = acc + s.to_complex().scale_real(c);
        }
        acc
    }

    /// Components of the reduced spin operator `S_i = (Ω·w) w_i` for the
    /// direction of `k`.
    pub fn reduced_spin(&self, k: R3) -> Result<[Matrix6; 3]> {
        let kn = norm_r3(k);
        if kn == 0.0 || !kn.is_finite() {
            return Err(Error::ZeroWavevector);
        }
        let w = [k[0] / kn, k[1] / kn, k[2] / kn];
        let ow = self.omega_dot(w);
        Ok(std::array::from_fn(|i| ow.scale_real(w[i])))
    }
}

fn dot_ops<const N: usize>(ops: &[SquareMatrix<GaussInt, N>; 3], v: R3) -> SquareMatrix<Complex64, N> {
    let mut acc = SquareMatrix::<Complex64, N>::zero();
    for (m, &c) in ops.iter().zip(v.iter()) {
        acc = acc + m.to_complex().scale_real(c);
    }
    acc
}

/// One named identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    pub max_abs_deviation: f64,
}

/// Outcome of [`identity_report`]; serializes as a JSON list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn first_failure(&self) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

struct Tally {
    name: &'static str,
    dev: f64,
    exact: bool,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            dev: 0.0,
            exact: true,
        }
    }

    fn record<const N: usize>(&mut self, diff: SquareMatrix<GaussInt, N>) {
        let d = diff.max_abs();
        self.exact &= diff == SquareMatrix::zero();
        self.dev = self.dev.max(d);
    }

    fn finish(self) -> IdentityCheck {
        IdentityCheck {
            name: self.name.to_string(),
            passed: self.exact,
            max_abs_deviation: self.dev,
        }
    }
}

pub const CHECK_SIGMA_DEFINITION: &str = "sigma_levi_civita";
pub const CHECK_HERMITIAN: &str = "hermitian";
pub const CHECK_GAMMA0_SQUARED: &str = "gamma0_squared";
pub const CHECK_GAMMA0_ANTICOMMUTES: &str = "gamma0_gamma_anticommute";
pub const CHECK_TRIPLE_PRODUCT: &str = "gamma_triple_product";
pub const CHECK_SIGMA_COMMUTATION: &str = "sigma_commutation";
pub const CHECK_OMEGA_COMMUTATION: &str = "omega_commutation";
pub const CHECK_OMEGA_SQUARED: &str = "omega_squared";
pub const CHECK_OMEGA_CROSS: &str = "omega_from_gamma_cross";
pub const CHECK_OMEGA_BLOCKS: &str = "omega_block_form";

/// Evaluate every identity of the operator set exactly. Never fails; see
/// [`verify_identities`] for the erroring variant.
pub fn identity_report(ops: &OperatorSet) -> IdentityReport {
    let id6 = ExactMatrix6::identity();
    let zero3 = ExactMatrix3::zero();
    let i_unit = GaussInt::I;

    let mut def = Tally::new(CHECK_SIGMA_DEFINITION);
    for k in 0..3 {
        let expect = SquareMatrix::from_fn(|i, j| GaussInt::new(0, -levi_civita(i, j, k)));
        def.record(ops.sigma[k] - expect);
    }

    let mut herm = Tally::new(CHECK_HERMITIAN);
    herm.record(ops.gamma0 - ops.gamma0.adjoint());
    for i in 0..3 {
        herm.record(ops.gamma[i] - ops.gamma[i].adjoint());
        herm.record(ops.omega[i] - ops.omega[i].adjoint());
        herm.record(ops.sigma[i] - ops.sigma[i].adjoint());
    }

    let mut g0sq = Tally::new(CHECK_GAMMA0_SQUARED);
    g0sq.record(ops.gamma0 * ops.gamma0 - id6);

    let mut anti = Tally::new(CHECK_GAMMA0_ANTICOMMUTES);
    for g in &ops.gamma {
        anti.record(anticommutator(&ops.gamma0, g));
    }

    let mut triple = Tally::new(CHECK_TRIPLE_PRODUCT);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let (gi, gj, gk) = (ops.gamma[i], ops.gamma[j], ops.gamma[k]);
                let lhs = gi * gj * gk + gk * gj * gi;
                let rhs = gi.scale(GaussInt::from_int(delta(j, k))) + gk.scale(GaussInt::from_int(delta(i, j)));
                triple.record(lhs - rhs);
            }
        }
    }

    let mut sig = Tally::new(CHECK_SIGMA_COMMUTATION);
    let mut omg = Tally::new(CHECK_OMEGA_COMMUTATION);
    for i in 0..3 {
        for j in 0..3 {
            let mut s_rhs = ExactMatrix3::zero();
            let mut o_rhs = ExactMatrix6::zero();
            for k in 0..3 {
                let e = GaussInt::from_int(levi_civita(i, j, k)) * i_unit;
                s_rhs = s_rhs + ops.sigma[k].scale(e);
                o_rhs = o_rhs + ops.omega[k].scale(e);
            }
            sig.record(commutator(&ops.sigma[i], &ops.sigma[j]) - s_rhs);
            omg.record(commutator(&ops.omega[i], &ops.omega[j]) - o_rhs);
        }
    }

    let mut osq = Tally::new(CHECK_OMEGA_SQUARED);
    let total = ops.omega.iter().fold(ExactMatrix6::zero(), |acc, o| acc + *o * *o);
    osq.record(total - id6.scale(GaussInt::from_int(2)));

    let mut cross = Tally::new(CHECK_OMEGA_CROSS);
    for i in 0..3 {
        cross.record(ops.omega[i] - omega_from_gamma(&ops.gamma, i));
    }

    let mut blocks = Tally::new(CHECK_OMEGA_BLOCKS);
    for i in 0..3 {
        blocks.record(ops.omega[i] - from_blocks(&ops.sigma[i], &zero3, &zero3, &ops.sigma[i]));
    }

    IdentityReport {
        checks: [def, herm, g0sq, anti, triple, sig, omg, osq, cross, blocks]
            .into_iter()
            .map(Tally::finish)
            .collect(),
    }
}

/// Like [`identity_report`], but an exact failure is an error.
pub fn verify_identities(ops: &OperatorSet) -> Result<IdentityReport> {
    let report = identity_report(ops);
    match report.first_failure() {
        Some(c) => Err(Error::IdentityViolation(c.name.clone())),
        None => Ok(report),
    }
}

fn to_nalgebra(m: &Matrix6) -> SMatrix<Complex<f64>, 6, 6> {
    SMatrix::from_fn(|i, j| m.0[i][j])
}

/// Eigenvalues of a Hermitian 6×6 matrix, sorted descending.
pub fn hermitian_eigenvalues(m: &Matrix6) -> [f64; 6] {
    let eig = SymmetricEigen::new(to_nalgebra(m));
    let mut vals: [f64; 6] = std::array::from_fn(|i| eig.eigenvalues[i]);
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Eigenpairs of a Hermitian 6×6 matrix, sorted by descending eigenvalue.
pub fn hermitian_eigenpairs(m: &Matrix6) -> Vec<(f64, Spinor)> {
    let eig = SymmetricEigen::new(to_nalgebra(m));
    let mut pairs: Vec<(f64, Spinor)> = (0..6)
        .map(|c| {
            let v = eig.eigenvectors.column(c);
            (eig.eigenvalues[c], std::array::from_fn(|r| v[r]))
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

/// Ω·n and its eigenvalues (descending). `n` must be a unit vector.
pub fn spin_component_along(ops: &OperatorSet, n: R3) -> Result<(Matrix6, [f64; 6])> {
    let norm = norm_r3(n);
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotUnitVector { norm });
    }
    let m = ops.omega_dot(n);
    let vals = hermitian_eigenvalues(&m);
    Ok((m, vals))
}

/// Momentum-space Hamiltonian `H(k) = iħc Γ0 (Γ·k)`.
pub fn hamiltonian_matrix(ops: &OperatorSet, k: R3, units: &Units) -> Result<Matrix6> {
    let kn = norm_r3(k);
    if kn == 0.0 || !kn.is_finite() {
        return Err(Error::ZeroWavevector);
    }
    let g0 = ops.gamma0_c();
    let gk = ops.gamma_dot(k);
    Ok((g0 * gk).scale(Complex64::new(0.0, units.hbar * units.c)))
}
