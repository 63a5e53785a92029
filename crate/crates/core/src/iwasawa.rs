//! Pointwise Iwasawa splitting `Φ = F·B` of a loop sampled on the circle.
//!
//! The positive factor comes from the spectral factorization `B*B = Φ*Φ`:
//! with `X = B⁻¹ = Σ_{j≥0} X_j λ^j` the condition `F*F = I` for `F = ΦX`
//! reads `H X = B*`, a minus-loop. Projected onto exponents `0..n` this is the
//! block Toeplitz system `Σ_j Ĥ_{k−j} X_j = δ_{k0} B₀*`, solved by the block
//! Levinson–Whittle recursion in `O(n²)` block operations.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::exec::{self, Parallelism};
use crate::loop_core::{LambdaGrid, LaurentLoop, LoopError, Mat2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IwasawaError {
    #[error("det Φ deviates from 1 by {0:.3e}; renormalize first")]
    NotSpecial(f64),
    #[error("Toeplitz section lost positive definiteness at block {0} (Φ*Φ not positive on the grid, or degree overflow)")]
    NotPositiveDefinite(usize),
    #[error("finite section did not converge: unitarity defect {defect:.3e} above {tol:.3e}; increase N")]
    NonConvergent { defect: f64, tol: f64 },
    #[error(transparent)]
    Loop(#[from] LoopError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IwasawaConfig {
    /// Truncation degree `N`.
    pub degree: usize,
    /// Number of block rows in the Toeplitz section (default `4N + 2`).
    /// Always capped at `m/2` so the solution does not alias on the grid.
    pub section: Option<usize>,
    /// Target for the unitarity residual.
    pub tol: f64,
    /// Re-factorizations of `F` allowed when the first pass misses `tol`.
    pub refine: usize,
    /// Accepted deviation of `det Φ` from 1.
    pub det_tol: f64,
}

impl Default for IwasawaConfig {
    fn default() -> Self {
        IwasawaConfig {
            degree: 32,
            section: None,
            tol: 1e-9,
            refine: 3,
            det_tol: 1e-8,
        }
    }
}

impl IwasawaConfig {
    pub fn with_degree(degree: usize) -> Self {
        IwasawaConfig {
            degree,
            ..IwasawaConfig::default()
        }
    }

    pub fn section_size(&self) -> usize {
        self.section.unwrap_or(4 * self.degree + 2)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IwasawaResiduals {
    /// `max_λ ‖F F* − I‖∞`
    pub unitarity: f64,
    /// Largest Fourier coefficient of `B` at a negative exponent.
    pub plus_loop_tail: f64,
    /// `max_λ ‖F B − Φ‖∞ / max(1, ‖Φ‖∞)`
    pub reconstruction: f64,
}

impl IwasawaResiduals {
    pub fn max(&self, other: &IwasawaResiduals) -> IwasawaResiduals {
        IwasawaResiduals {
            unitarity: self.unitarity.max(other.unitarity),
            plus_loop_tail: self.plus_loop_tail.max(other.plus_loop_tail),
            reconstruction: self.reconstruction.max(other.reconstruction),
        }
    }
}

/// `F` unitary on the circle and `B` a plus-loop with `B(0)` upper
/// triangular with positive diagonal; both held as samples on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct IwasawaPair {
    pub f: Vec<Mat2>,
    pub b: Vec<Mat2>,
    /// `B(0)`.
    pub b0: Mat2,
    pub residuals: IwasawaResiduals,
    /// Factorization passes used (1 + refinements).
    pub passes: usize,
}

impl IwasawaPair {
    /// `F` as a Laurent loop truncated to `±degree`.
    pub fn f_loop(&self, grid: &LambdaGrid, degree: usize) -> Result<LaurentLoop, LoopError> {
        Ok(grid.samples_to_coeffs(&self.f, degree)?.0)
    }

    /// `B` as a Laurent loop truncated to `±degree`.
    pub fn b_loop(&self, grid: &LambdaGrid, degree: usize) -> Result<LaurentLoop, LoopError> {
        Ok(grid.samples_to_coeffs(&self.b, degree)?.0)
    }
}

/// Upper Cholesky factor `R` (`R*R = V`, positive diagonal) of a 2×2
/// Hermitian positive-definite matrix.
fn upper_cholesky(v: &Mat2) -> Option<Mat2> {
    let v00 = v.get(0, 0).re;
    if v00 <= 0.0 || !v00.is_finite() {
        return None;
    }
    let r11 = v00.sqrt();
    let r12 = v.get(0, 1) / r11;
    let d = v.get(1, 1).re - r12.norm_sqr();
    if d <= 0.0 {
        return None;
    }
    let zero = C64::new(0.0, 0.0);
    Some(Mat2::new(r11.into(), r12, zero, d.sqrt().into()))
}

fn positive_definite(v: &Mat2) -> bool {
    v.get(0, 0).re > 0.0 && v.det().re > 0.0
}

/// Block Levinson–Whittle recursion for `Σ_j Ĥ_{k−j} A_j = δ_{k0} V`,
/// `A_0 = I`, `k, j = 0..n`. `h(k)` returns `Ĥ_k`.
fn levinson(h: impl Fn(i32) -> Mat2, n: usize) -> Result<(Vec<Mat2>, Mat2), IwasawaError> {
    let h0 = h(0);
    if !positive_definite(&h0) {
        return Err(IwasawaError::NotPositiveDefinite(0));
    }
    let mut a = Vec::with_capacity(n);
    let mut bw = Vec::with_capacity(n);
    a.push(Mat2::identity());
    bw.push(Mat2::identity());
    let mut v = h0;
    let mut u = h0;
    for p in 0..n.saturating_sub(1) {
        let mut delta = Mat2::zero();
        let mut nabla = Mat2::zero();
        for j in 0..=p {
            delta += h((p + 1 - j) as i32) * a[j];
            nabla += h(-1 - j as i32) * bw[j];
        }
        let (vi, ui) = match (v.inverse(), u.inverse()) {
            (Some(vi), Some(ui)) => (vi, ui),
            _ => return Err(IwasawaError::NotPositiveDefinite(p + 1)),
        };
        let gamma = -(ui * delta);
        let gamma_b = -(vi * nabla);
        // A' = [A, 0] + [0, Bw]Γ and Bw' = [0, Bw] + [A, 0]Γ'
        let mut a_next = Vec::with_capacity(p + 2);
        let mut b_next = Vec::with_capacity(p + 2);
        for j in 0..=p + 1 {
            let aj = if j <= p { a[j] } else { Mat2::zero() };
            let bj = if j >= 1 { bw[j - 1] } else { Mat2::zero() };
            a_next.push(aj + bj * gamma);
            b_next.push(bj + aj * gamma_b);
        }
        v += nabla * gamma;
        u += delta * gamma_b;
        if !positive_definite(&v) || !positive_definite(&u) {
            return Err(IwasawaError::NotPositiveDefinite(p + 1));
        }
        a = a_next;
        bw = b_next;
    }
    Ok((a, v))
}

/// One factorization pass: returns samples of `X = B⁻¹` and `B(0)`.
fn factor_pass(
    grid: &LambdaGrid,
    phi: &[Mat2],
    n: usize,
) -> Result<(Vec<Mat2>, Mat2), IwasawaError> {
    let m = grid.len();
    let h_samples: Vec<Mat2> = phi.iter().map(|p| p.adjoint() * *p).collect();
    let hat = grid.fourier(&h_samples)?;
    let half = (m / 2) as i32;
    let h = |k: i32| {
        if k.abs() >= half {
            Mat2::zero()
        } else {
            hat[grid.slot(k)]
        }
    };
    let (a, v) = levinson(h, n)?;
    // V is Hermitian up to rounding; symmetrize before the Cholesky step
    let v = (v + v.adjoint()) * 0.5;
    let r = upper_cholesky(&v).ok_or(IwasawaError::NotPositiveDefinite(n))?;
    let r_inv = r.inverse().ok_or(IwasawaError::NotPositiveDefinite(n))?;
    let mut x_hat = vec![Mat2::zero(); m];
    for (j, aj) in a.iter().enumerate() {
        x_hat[j % m] += *aj * r_inv;
    }
    let x = grid.synthesize(&x_hat)?;
    Ok((x, r))
}

/// Iwasawa factorization of `Φ` sampled on `grid`.
pub fn iwasawa_factor(
    grid: &LambdaGrid,
    phi: &[Mat2],
    cfg: &IwasawaConfig,
) -> Result<IwasawaPair, IwasawaError> {
    if phi.len() != grid.len() {
        return Err(LoopError::SampleCount {
            expected: grid.len(),
            got: phi.len(),
        }
        .into());
    }
    let det_dev = phi.iter().fold(0.0_f64, |acc, p| acc.max((p.det() - 1.0).norm()));
    if det_dev > cfg.det_tol {
        return Err(IwasawaError::NotSpecial(det_dev));
    }
    let n = cfg.section_size().min(grid.len() / 2);
    let mut f = phi.to_vec();
    let mut x_total = vec![Mat2::identity(); phi.len()];
    let mut b0 = Mat2::identity();
    let mut passes = 0;
    let mut defect = f64::INFINITY;
    while passes <= cfg.refine {
        let (x, r) = factor_pass(grid, &f, n)?;
        for ((fj, xt), xj) in f.iter_mut().zip(x_total.iter_mut()).zip(&x) {
            *fj *= *xj;
            *xt *= *xj;
        }
        b0 = r * b0;
        passes += 1;
        defect = f.iter().fold(0.0_f64, |acc, x| acc.max(x.unitarity_defect()));
        if defect <= cfg.tol {
            break;
        }
    }
    if defect > cfg.tol {
        return Err(IwasawaError::NonConvergent {
            defect,
            tol: cfg.tol,
        });
    }
    let b: Vec<Mat2> = x_total
        .iter()
        .map(|x| x.inverse().unwrap_or_else(|| Mat2::identity() * f64::NAN))
        .collect();
    let b_hat = grid.fourier(&b)?;
    let plus_loop_tail = (0..grid.len())
        .filter(|&k| grid.exponent(k) < 0)
        .fold(0.0_f64, |acc, k| acc.max(b_hat[k].max_abs()));
    let reconstruction = f
        .iter()
        .zip(&b)
        .zip(phi)
        .fold(0.0_f64, |acc, ((fj, bj), pj)| {
            acc.max((*fj * *bj - *pj).norm_inf() / pj.norm_inf().max(1.0))
        });
    Ok(IwasawaPair {
        f,
        b,
        b0,
        residuals: IwasawaResiduals {
            unitarity: defect,
            plus_loop_tail,
            reconstruction,
        },
        passes,
    })
}

/// Per-node results of a batch factorization over a `rows × cols` z-grid.
#[derive(Clone, Debug)]
pub struct GridFactorization {
    pub rows: usize,
    pub cols: usize,
    pub pairs: Vec<Result<IwasawaPair, IwasawaError>>,
    /// Worst residuals over the successful nodes.
    pub summary: IwasawaResiduals,
    /// `(row, col, error)` for every failed node.
    pub failures: Vec<(usize, usize, IwasawaError)>,
}

/// Factorizes every node independently; failures are collected, not fatal.
/// `frames[i * cols + j]` holds the λ-samples of node `(i, j)`.
pub fn iwasawa_grid(
    grid: &LambdaGrid,
    frames: &[Vec<Mat2>],
    cols: usize,
    cfg: &IwasawaConfig,
    par: Parallelism,
) -> GridFactorization {
    let cols = cols.max(1);
    let pairs = exec::map_slice(par, frames, |phi| iwasawa_factor(grid, phi, cfg));
    let mut summary = IwasawaResiduals::default();
    let mut failures = Vec::new();
    for (idx, p) in pairs.iter().enumerate() {
        match p {
            Ok(pair) => summary = summary.max(&pair.residuals),
            Err(e) => failures.push((idx / cols, idx % cols, e.clone())),
        }
    }
    GridFactorization {
        rows: frames.len().div_ceil(cols),
        cols,
        pairs,
        summary,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Gram–Schmidt on the columns: Φ = Q R with R upper triangular,
    /// positive diagonal.
    fn gram_schmidt(p: &Mat2) -> (Mat2, Mat2) {
        let c0 = [p.get(0, 0), p.get(1, 0)];
        let c1 = [p.get(0, 1), p.get(1, 1)];
        let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
        let q0 = [c0[0] / n0, c0[1] / n0];
        let r01 = q0[0].conj() * c1[0] + q0[1].conj() * c1[1];
        let w = [c1[0] - q0[0] * r01, c1[1] - q0[1] * r01];
        let n1 = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        let q1 = [w[0] / n1, w[1] / n1];
        (
            Mat2::new(q0[0], q1[0], q0[1], q1[1]),
            Mat2::new(n0.into(), r01, c(0.0, 0.0), n1.into()),
        )
    }

    #[test]
    fn unitary_loop_is_fixed() {
        let g = LambdaGrid::new(32).unwrap();
        let phi: Vec<Mat2> = g.points().iter().map(|&l| Mat2::diag(l, 1.0 / l)).collect();
        let pair = iwasawa_factor(&g, &phi, &IwasawaConfig::with_degree(4)).unwrap();
        for (f, (b, p)) in pair.f.iter().zip(pair.b.iter().zip(&phi)) {
            assert!((*f - *p).max_abs() < 1e-10);
            assert!((*b - Mat2::identity()).max_abs() < 1e-10);
        }
    }

    #[test]
    fn constant_diagonal() {
        let g = LambdaGrid::new(16).unwrap();
        let d = Mat2::from_real(2.0, 0.0, 0.0, 0.5);
        let pair = iwasawa_factor(&g, &vec![d; 16], &IwasawaConfig::with_degree(4)).unwrap();
        assert!((pair.b0 - d).max_abs() < 1e-12);
        assert!((pair.f[3] - Mat2::identity()).max_abs() < 1e-12);
    }

    #[test]
    fn constant_generic_matches_gram_schmidt() {
        let g = LambdaGrid::new(16).unwrap();
        let mut p = Mat2::new(c(1.0, 0.5), c(-0.3, 2.0), c(0.7, -1.0), c(0.2, 0.1));
        let s = p.det().sqrt();
        p = p * (1.0 / s);
        let (q, r) = gram_schmidt(&p);
        let pair = iwasawa_factor(&g, &vec![p; 16], &IwasawaConfig::with_degree(4)).unwrap();
        assert!((pair.b0 - r).max_abs() < 1e-10);
        assert!((pair.f[5] - q).max_abs() < 1e-10);
    }

    #[test]
    fn rejects_non_special_input() {
        let g = LambdaGrid::new(16).unwrap();
        let p = Mat2::from_real(2.0, 0.0, 0.0, 2.0);
        assert!(matches!(
            iwasawa_factor(&g, &vec![p; 16], &IwasawaConfig::with_degree(4)),
            Err(IwasawaError::NotSpecial(_))
        ));
    }

    #[test]
    fn negative_power_loop() {
        // Φ = [[1, λ⁻¹ s], [0, 1]] has a nontrivial plus factor
        let g = LambdaGrid::new(64).unwrap();
        let s = 0.8;
        let phi: Vec<Mat2> = g
            .points()
            .iter()
            .map(|&l| Mat2::new(c(1.0, 0.0), s / l, c(0.0, 0.0), c(1.0, 0.0)))
            .collect();
        let pair = iwasawa_factor(&g, &phi, &IwasawaConfig::with_degree(8)).unwrap();
        let r = pair.residuals;
        assert!(r.unitarity < 1e-9 && r.reconstruction < 1e-9 && r.plus_loop_tail < 1e-9, "{r:?}");
        assert!(pair.b0.get(1, 0).norm() < 1e-12);
        assert!(pair.b0.get(0, 0).re > 0.0 && pair.b0.get(1, 1).re > 0.0);
    }

    #[test]
    fn grid_collects_failures() {
        let g = LambdaGrid::new(16).unwrap();
        let good = vec![Mat2::identity(); 16];
        let bad = vec![Mat2::identity() * 2.0; 16];
        let out = iwasawa_grid(&g, &[good.clone(), bad, good], 2, &IwasawaConfig::with_degree(4), Parallelism::Sequential);
        assert_eq!(out.failures.len(), 1);
        assert_eq!((out.failures[0].0, out.failures[0].1), (0, 1));
        assert!(out.pairs[2].is_ok());
    }
}
