use num_complex::Complex64 as C64;

use super::{LoopError, Mat2};

/// Truncation policy for loop products: exponents outside `±degree` are
/// dropped, and the dropped mass must stay below `tail_tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    pub degree: usize,
    pub tail_tol: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            degree: 32,
            tail_tol: 1e-10,
        }
    }
}

/// A truncated Laurent series `Σ_{k=lo}^{hi} X_k λ^k` with 2×2 complex
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentLoop {
    lo: i32,
    coeffs: Vec<Mat2>,
}

impl LaurentLoop {
    /// Builds a loop from coefficients for exponents `lo, lo+1, …`.
    pub fn new(lo: i32, coeffs: Vec<Mat2>) -> Self {
        if coeffs.is_empty() {
            return LaurentLoop::zero();
        }
        LaurentLoop { lo, coeffs }
    }

    pub fn zero() -> Self {
        LaurentLoop {
            lo: 0,
            coeffs: vec![Mat2::zero()],
        }
    }

    pub fn constant(m: Mat2) -> Self {
        LaurentLoop {
            lo: 0,
            coeffs: vec![m],
        }
    }

    pub fn identity() -> Self {
        LaurentLoop::constant(Mat2::identity())
    }

    pub fn monomial(k: i32, m: Mat2) -> Self {
        LaurentLoop {
            lo: k,
            coeffs: vec![m],
        }
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[Mat2] {
        &self.coeffs
    }

    /// Coefficient of `λ^k` (zero outside the stored range).
    pub fn coeff(&self, k: i32) -> Mat2 {
        if k < self.lo || k > self.hi() {
            Mat2::zero()
        } else {
            self.coeffs[(k - self.lo) as usize]
        }
    }

    /// Evaluates `Σ X_k λ^k`.
    pub fn eval(&self, lambda: C64) -> Result<Mat2, LoopError> {
        if lambda == C64::new(0.0, 0.0) {
            if self.lo < 0 {
                return Err(LoopError::PoleAtZero);
            }
            return Ok(self.coeff(0));
        }
        // Horner in λ over the stored block, then shift by λ^lo.
        let mut acc = Mat2::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * lambda + *c;
        }
        Ok(acc * lambda.powi(self.lo))
    }

    /// `d/dλ` evaluated at `λ`.
    pub fn derivative_at(&self, lambda: C64) -> Result<Mat2, LoopError> {
        if lambda == C64::new(0.0, 0.0) && self.lo < 0 {
            return Err(LoopError::PoleAtZero);
        }
        let mut acc = Mat2::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.lo + i as i32;
            if k != 0 {
                acc += *c * (C64::from(k as f64) * lambda.powi(k - 1));
            }
        }
        Ok(acc)
    }

    /// Exact Cauchy product, no truncation.
    pub fn mul_exact(&self, other: &LaurentLoop) -> LaurentLoop {
        let mut out = vec![Mat2::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += *a * *b;
            }
        }
        LaurentLoop::new(self.lo + other.lo, out)
    }

    /// Cauchy product truncated to `±trunc.degree`.
    ///
    /// Fails with [`LoopError::TruncationOverflow`] when the discarded
    /// coefficients carry more than `trunc.tail_tol` in max-entry norm.
    pub fn mul(&self, other: &LaurentLoop, trunc: Truncation) -> Result<LaurentLoop, LoopError> {
        let (out, discarded) = self.mul_exact(other).truncated(trunc.degree);
        if discarded > trunc.tail_tol {
            return Err(LoopError::TruncationOverflow {
                discarded,
                tolerance: trunc.tail_tol,
            });
        }
        Ok(out)
    }

    /// Drops exponents outside `±degree`; returns the loop and the largest
    /// discarded coefficient norm.
    pub fn truncated(&self, degree: usize) -> (LaurentLoop, f64) {
        let n = degree as i32;
        let lo = self.lo.max(-n);
        let hi = self.hi().min(n);
        let discarded = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let k = self.lo + *i as i32;
                k < -n || k > n
            })
            .fold(0.0_f64, |acc, (_, c)| acc.max(c.max_abs()));
        if lo > hi {
            return (LaurentLoop::zero(), discarded);
        }
        let coeffs = (lo..=hi).map(|k| self.coeff(k)).collect();
        (LaurentLoop::new(lo, coeffs), discarded)
    }

    /// `x*(λ) = x(1/λ̄)ᴴ`, coefficientwise `(x*)_k = (x_{−k})ᴴ`.
    pub fn star(&self) -> LaurentLoop {
        let coeffs = self.coeffs.iter().rev().map(Mat2::adjoint).collect();
        LaurentLoop::new(-self.hi(), coeffs)
    }

    pub fn add(&self, other: &LaurentLoop) -> LaurentLoop {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        LaurentLoop::new(lo, (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn scale(&self, s: C64) -> LaurentLoop {
        LaurentLoop::new(self.lo, self.coeffs.iter().map(|c| c.scale(s)).collect())
    }

    /// Largest coefficient norm over strictly negative exponents.
    pub fn negative_tail(&self) -> f64 {
        (self.lo..0).fold(0.0_f64, |acc, k| acc.max(self.coeff(k).max_abs()))
    }

    /// Largest coefficient difference against another loop.
    pub fn max_coeff_diff(&self, other: &LaurentLoop) -> f64 {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        (lo..=hi).fold(0.0_f64, |acc, k| acc.max((self.coeff(k) - other.coeff(k)).max_abs()))
    }
}
