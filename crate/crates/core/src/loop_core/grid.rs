use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use super::{LaurentLoop, LoopError, Mat2};

/// `m` equispaced points `λ_j = exp(2πi j/m)` on the unit circle, with
/// cached FFT plans for moving between samples and Fourier coefficients.
#[derive(Clone)]
pub struct LambdaGrid {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for LambdaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LambdaGrid").field("m", &self.m).finish()
    }
}

impl PartialEq for LambdaGrid {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
    }
}

impl LambdaGrid {
    pub fn new(m: usize) -> Result<Self, LoopError> {
        if m < 4 || !m.is_power_of_two() {
            return Err(LoopError::BadGridSize(m));
        }
        let mut planner = FftPlanner::new();
        Ok(LambdaGrid {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, j: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * j as f64 / self.m as f64)
    }

    pub fn points(&self) -> Vec<C64> {
        (0..self.m).map(|j| self.point(j)).collect()
    }

    /// Index of `λ = −1` (always present since `m` is even).
    pub fn index_of_minus_one(&self) -> usize {
        self.m / 2
    }

    fn check_len(&self, n: usize) -> Result<(), LoopError> {
        if n != self.m {
            return Err(LoopError::SampleCount {
                expected: self.m,
                got: n,
            });
        }
        Ok(())
    }

    /// Applies a length-`m` FFT to each of the four matrix entries.
    fn transform(&self, values: &[Mat2], plan: &Arc<dyn Fft<f64>>, scale: f64) -> Vec<Mat2> {
        let mut out = vec![Mat2::zero(); self.m];
        let mut buf = vec![C64::new(0.0, 0.0); self.m];
        for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for (b, v) in buf.iter_mut().zip(values) {
                *b = v.0[r][c];
            }
            plan.process(&mut buf);
            for (o, b) in out.iter_mut().zip(&buf) {
                o.0[r][c] = *b * scale;
            }
        }
        out
    }

    /// All `m` Fourier coefficients in FFT order: slot `k` holds exponent
    /// `k` for `k < m/2` and exponent `k − m` otherwise.
    pub fn fourier(&self, values: &[Mat2]) -> Result<Vec<Mat2>, LoopError> {
        self.check_len(values.len())?;
        Ok(self.transform(values, &self.forward, 1.0 / self.m as f64))
    }

    /// Inverse of [`LambdaGrid::fourier`].
    pub fn synthesize(&self, coeffs: &[Mat2]) -> Result<Vec<Mat2>, LoopError> {
        self.check_len(coeffs.len())?;
        Ok(self.transform(coeffs, &self.inverse, 1.0))
    }

    /// Signed exponent held in FFT slot `k`.
    pub fn exponent(&self, k: usize) -> i32 {
        if k < self.m / 2 {
            k as i32
        } else {
            k as i32 - self.m as i32
        }
    }

    /// FFT slot holding exponent `k` (exponents fold modulo `m`).
    pub fn slot(&self, k: i32) -> usize {
        k.rem_euclid(self.m as i32) as usize
    }

    /// Converts samples to a Laurent loop truncated to `±degree`.
    ///
    /// Returns the loop and the largest dropped coefficient norm.
    pub fn samples_to_coeffs(
        &self,
        values: &[Mat2],
        degree: usize,
    ) -> Result<(LaurentLoop, f64), LoopError> {
        if self.m < 2 * degree + 2 {
            return Err(LoopError::GridTooSmall { m: self.m, degree });
        }
        let hat = self.fourier(values)?;
        let n = degree as i32;
        let coeffs = (-n..=n).map(|k| hat[self.slot(k)]).collect();
        let dropped = (0..self.m)
            .filter(|&k| self.exponent(k).abs() > n)
            .fold(0.0_f64, |acc, k| acc.max(hat[k].max_abs()));
        Ok((LaurentLoop::new(-n, coeffs), dropped))
    }

    /// Samples a Laurent loop on the grid.
    pub fn coeffs_to_samples(&self, x: &LaurentLoop) -> Result<Vec<Mat2>, LoopError> {
        let half = (self.m / 2) as i32;
        if x.lo() < -half || x.hi() >= half {
            let degree = x.lo().unsigned_abs().max(x.hi().unsigned_abs()) as usize;
            return Err(LoopError::GridTooSmall { m: self.m, degree });
        }
        let mut hat = vec![Mat2::zero(); self.m];
        for k in x.lo()..=x.hi() {
            hat[self.slot(k)] += x.coeff(k);
        }
        self.synthesize(&hat)
    }

    /// `∂λX` at `λ = 1` from samples: `Σ k X̂_k`, Nyquist term dropped.
    pub fn derivative_at_one(&self, values: &[Mat2]) -> Result<Mat2, LoopError> {
        let hat = self.fourier(values)?;
        Ok(self.derivative_at_one_from_fourier(&hat))
    }

    pub fn derivative_at_one_from_fourier(&self, hat: &[Mat2]) -> Mat2 {
        let nyquist = self.m / 2;
        hat.iter()
            .enumerate()
            .filter(|(k, _)| *k != nyquist)
            .map(|(k, c)| *c * self.exponent(k) as f64)
            .sum()
    }

    /// `∂λX` at every grid point: samples of `Σ k X̂_k λ^{k−1}`.
    pub fn derivative_samples(&self, values: &[Mat2]) -> Result<Vec<Mat2>, LoopError> {
        let hat = self.fourier(values)?;
        let nyquist = self.m / 2;
        let d: Vec<Mat2> = hat
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k == nyquist {
                    Mat2::zero()
                } else {
                    *c * self.exponent(k) as f64
                }
            })
            .collect();
        // Σ k X̂_k λ^k, then divide by λ.
        let mut out = self.synthesize(&d)?;
        for (j, o) in out.iter_mut().enumerate() {
            *o = *o * self.point(j).conj();
        }
        Ok(out)
    }
}
