use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A 2×2 complex matrix, stored row-major.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, ZERO, ZERO, d)
    }

    pub fn off_diag(b: C64, c: C64) -> Self {
        Mat2::new(ZERO, b, c, ZERO)
    }

    /// Pauli matrices σ₁, σ₂, σ₃.
    pub fn pauli() -> [Mat2; 3] {
        let i = C64::i();
        [
            Mat2::new(ZERO, ONE, ONE, ZERO),
            Mat2::new(ZERO, -i, i, ZERO),
            Mat2::new(ONE, ZERO, ZERO, -ONE),
        ]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[row][col]
    }

    #[inline]
    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    #[inline]
    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse, or `None` when the determinant vanishes (or is not finite).
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == ZERO || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        let s = d.inv();
        Some(Mat2::new(m[1][1] * s, -m[0][1] * s, -m[1][0] * s, m[0][0] * s))
    }

    /// Conjugate transpose.
    #[inline]
    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    /// Entrywise complex conjugate.
    #[inline]
    pub fn conj(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[0][1].conj(), m[1][0].conj(), m[1][1].conj())
    }

    #[inline]
    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    #[inline]
    pub fn scale(&self, s: C64) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Induced ∞-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let m = &self.0;
        (m[0][0].norm() + m[0][1].norm()).max(m[1][0].norm() + m[1][1].norm())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    /// ‖X X* − I‖∞.
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.adjoint() - Mat2::identity()).norm_inf()
    }

    /// Matrix exponential.
    ///
    /// Splits off the scalar part and uses the closed form for trace-free
    /// 2×2 matrices, `exp(X₀) = cosh(s) I + sinh(s)/s X₀` with `s² = −det X₀`.
    pub fn exp(&self) -> Mat2 {
        let half_tr = self.trace() * 0.5;
        let x0 = *self - Mat2::identity().scale(half_tr);
        let s = (-x0.det()).sqrt();
        let (ch, shc) = if s.norm() < 1e-4 {
            let s2 = s * s;
            (
                ONE + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0,
                ONE + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0,
            )
        } else {
            (s.cosh(), s.sinh() / s)
        };
        (Mat2::identity().scale(ch) + x0.scale(shc)).scale(half_tr.exp())
    }

    /// Coordinates `(x₁, x₂, x₃)` of `X = Σ xᵢ σᵢ` for a Hermitian trace-free
    /// matrix. The imaginary parts are dropped; see [`Mat2::hermitian_defect`].
    pub fn pauli_coordinates(&self) -> [f64; 3] {
        let m = &self.0;
        [
            0.5 * (m[0][1] + m[1][0]).re,
            0.5 * (m[1][0] - m[0][1]).im,
            0.5 * (m[0][0] - m[1][1]).re,
        ]
    }

    pub fn from_pauli_coordinates(x: [f64; 3]) -> Mat2 {
        let p = Mat2::pauli();
        p[0].scale(x[0].into()) + p[1].scale(x[1].into()) + p[2].scale(x[2].into())
    }

    /// Distance from the Hermitian trace-free matrices: `‖X − X*‖∞ + |tr X|`.
    pub fn hermitian_defect(&self) -> f64 {
        (*self - self.adjoint()).norm_inf() + self.trace().norm()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    #[inline]
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    #[inline]
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(
            a[0][0] - b[0][0],
            a[0][1] - b[0][1],
            a[1][0] - b[1][0],
            a[1][1] - b[1][1],
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    #[inline]
    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    #[inline]
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    #[inline]
    fn mul(self, s: C64) -> Mat2 {
        self.scale(s)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    #[inline]
    fn mul(self, s: f64) -> Mat2 {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }
}

impl AddAssign for Mat2 {
    #[inline]
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl SubAssign for Mat2 {
    #[inline]
    fn sub_assign(&mut self, o: Mat2) {
        *self = *self - o;
    }
}

impl MulAssign for Mat2 {
    #[inline]
    fn mul_assign(&mut self, o: Mat2) {
        *self = *self * o;
    }
}

impl std::iter::Sum for Mat2 {
    fn sum<I: Iterator<Item = Mat2>>(iter: I) -> Mat2 {
        iter.fold(Mat2::zero(), |a, b| a + b)
    }
}
