//! Dense 2×2 complex matrices.
//!
//! Every matrix-valued quantity of the two-cavity problem lives in this
//! type: the propagating function, the photon-number and two-photon moment
//! matrices, the memory kernel and the master-equation coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2×2 complex matrix indexed by `(row, col)` with `0` for cavity 1 and `1`
/// for cavity 2.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix2 {
    m: [[Complex64; 2]; 2],
}

impl ComplexMatrix2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub const fn from_rows(rows: [[Complex64; 2]; 2]) -> Self {
        Self { m: rows }
    }

    /// Builds a matrix with real entries.
    pub fn from_real(rows: [[f64; 2]; 2]) -> Self {
        Self::new(rows[0][0].into(), rows[0][1].into(), rows[1][0].into(), rows[1][1].into())
    }

    pub const fn zeros() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn rows(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    pub fn scale(&self, k: Complex64) -> Self {
        self.map(|z| z * k)
    }

    pub fn scale_re(&self, k: f64) -> Self {
        self.map(|z| z * k)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::new(f(self.m[0][0]), f(self.m[0][1]), f(self.m[1][0]), f(self.m[1][1]))
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Inverse, or `None` when the determinant vanishes to machine precision
    /// relative to the entries.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        let scale = self.max_abs().powi(2);
        if !det.is_finite() || det.norm() <= f64::EPSILON * scale || scale == 0.0 {
            return None;
        }
        let inv = det.inv();
        Some(Self::new(self.m[1][1] * inv, -self.m[0][1] * inv, -self.m[1][0] * inv, self.m[0][0] * inv))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.m[0][1] - self.m[1][0]).norm() <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.max_abs_diff(&Self::identity()) <= tol
    }

    /// Singular values `(largest, smallest)`.
    ///
    /// Computed from the eigenvalues of the Hermitian matrix `A†A`, which for a
    /// 2×2 matrix are `(tr ± sqrt(tr² - 4 det)) / 2` with `det = |det A|²`.
    pub fn singular_values(&self) -> (f64, f64) {
        let [a, b, c, d] = self.entries();
        // Gram matrix M†M = [[p, q], [q*, r]].
        let p = a.norm_sqr() + c.norm_sqr();
        let r = b.norm_sqr() + d.norm_sqr();
        let q = a.conj() * b + c.conj() * d;
        let det2 = self.det().norm_sqr();
        let big = 0.5 * (p + r) + (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
        // Recover the small one from the product to avoid cancellation.
        let small = if big > 0.0 { det2 / big } else { 0.0 };
        (big.sqrt(), small.max(0.0).sqrt())
    }

    /// Matrix exponential `exp(self)`.
    ///
    /// Uses the Cayley–Hamilton form `e^{m}[cosh(q) I + sinh(q)/q (A - m I)]`
    /// with `m = tr/2` and `q² = ((a-d)/2)² + bc`; the `sinh(q)/q` factor is
    /// taken from its series when `q` is small.
    pub fn exp(&self) -> Self {
        let half_tr = 0.5 * self.trace();
        let shifted = *self - Self::identity().scale(half_tr);
        let q2 = 0.25 * (self.m[0][0] - self.m[1][1]).powi(2) + self.m[0][1] * self.m[1][0];
        let q = q2.sqrt();
        let (cosh_q, sinhc_q) = if q.norm() < 1e-4 {
            // cosh q = 1 + q²/2 + q⁴/24, sinh q / q = 1 + q²/6 + q⁴/120
            (
                ONE + q2 * 0.5 + q2 * q2 / 24.0 + q2 * q2 * q2 / 720.0,
                ONE + q2 / 6.0 + q2 * q2 / 120.0 + q2 * q2 * q2 / 5040.0,
            )
        } else {
            (q.cosh(), q.sinh() / q)
        };
        (Self::identity().scale(cosh_q) + shifted.scale(sinhc_q)).scale(half_tr.exp())
    }
}

impl Default for ComplexMatrix2 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl fmt::Debug for ComplexMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

impl Index<(usize, usize)> for ComplexMatrix2 {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.m[i][j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.m[i][j]
    }
}

impl Add for ComplexMatrix2 {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.m[0][0] + rhs.m[0][0],
            self.m[0][1] + rhs.m[0][1],
            self.m[1][0] + rhs.m[1][0],
            self.m[1][1] + rhs.m[1][1],
        )
    }
}

impl AddAssign for ComplexMatrix2 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for ComplexMatrix2 {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.m[0][0] - rhs.m[0][0],
            self.m[0][1] - rhs.m[0][1],
            self.m[1][0] - rhs.m[1][0],
            self.m[1][1] - rhs.m[1][1],
        )
    }
}

impl SubAssign for ComplexMatrix2 {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl Neg for ComplexMatrix2 {
    type Output = Self;

    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<Complex64> for ComplexMatrix2 {
    type Output = Self;

    fn mul(self, k: Complex64) -> Self {
        self.scale(k)
    }
}

impl Mul<f64> for ComplexMatrix2 {
    type Output = Self;

    fn mul(self, k: f64) -> Self {
        self.scale_re(k)
    }
}
