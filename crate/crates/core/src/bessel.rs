//! Scalar Bessel equation `z²y″ + zy′ + (z² − α²)y = 0` as an independent
//! oracle for the matrix flow of the Bessel potential.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::flow::{self, FlowConfig, FlowError, PathSpec};
use crate::loop_core::Mat2;
use crate::ode::{self, OdeConfig, OdeError};
use crate::potential::{BesselPotential, Pole};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BesselError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("integration failed near z = {z}: {source}")]
    Integration {
        z: C64,
        #[source]
        source: OdeError,
    },
    #[error("degenerate fundamental system (Wronskian {0:.3e})")]
    Degenerate(f64),
    #[error("solutions are not evaluated at the same point and order")]
    Mismatch,
}

/// One scalar solution, with its value at every path checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSolution {
    pub alpha: C64,
    pub z: C64,
    pub y: C64,
    pub dy: C64,
    /// `y″` reconstructed from the Bessel equation at `z`.
    pub ddy: C64,
    /// `(z, y, y′)` at the start and after every segment.
    pub history: Vec<(C64, C64, C64)>,
}

/// `y″ = −y′/z − (1 − α²/z²) y`
pub fn bessel_second_derivative(alpha: C64, z: C64, y: C64, dy: C64) -> C64 {
    -dy / z - (1.0 - alpha * alpha / (z * z)) * y
}

impl ScalarSolution {
    /// A bare point value (no path history).
    pub fn at_point(alpha: C64, z: C64, y: C64, dy: C64, ddy: C64) -> Self {
        ScalarSolution {
            alpha,
            z,
            y,
            dy,
            ddy,
            history: vec![(z, y, dy)],
        }
    }
}

/// Integrates the first-order system `(y, y′)` along `path`.
pub fn bessel_integrate(
    alpha: C64,
    path: &PathSpec,
    y0: C64,
    dy0: C64,
    cfg: &OdeConfig,
) -> Result<ScalarSolution, BesselError> {
    path.check_poles(
        &[Pole {
            z: C64::new(0.0, 0.0),
            order: 1,
        }],
        1e-8,
    )?;
    let mut state = [y0, dy0];
    let mut history = vec![(path.start_w().exp(), y0, dy0)];
    let mut h = None;
    for seg in path.segments() {
        let dw = seg.w1 - seg.w0;
        let rhs = |s: f64, v: &[C64; 2]| {
            let z = seg.z_at(s);
            let dz = z * dw;
            [v[1] * dz, bessel_second_derivative(alpha, z, v[0], v[1]) * dz]
        };
        let (next, h_last, _) = ode::integrate(rhs, 0.0, 1.0, state, h, cfg).map_err(|source| {
            let t = match &source {
                OdeError::StepUnderflow { t, .. }
                | OdeError::TooManySteps { t, .. }
                | OdeError::NonFinite { t } => *t,
            };
            BesselError::Integration {
                z: seg.z_at(t),
                source,
            }
        })?;
        h = Some(h_last);
        state = next;
        history.push((seg.w1.exp(), state[0], state[1]));
    }
    let z = path.end_w().exp();
    Ok(ScalarSolution {
        alpha,
        z,
        y: state[0],
        dy: state[1],
        ddy: bessel_second_derivative(alpha, z, state[0], state[1]),
        history,
    })
}

/// Wronskian `y₁′y₂ − y₂′y₁`.
pub fn wronskian(y1: C64, dy1: C64, y2: C64, dy2: C64) -> C64 {
    dy1 * y2 - dy2 * y1
}

/// `[[y₁′/ν, y₁], [y₂′/ν, y₂]]`, a solution of `dΦ = Φ [[0, ν], [ρ, 0]]`.
pub fn frame_from_scalar(
    y1: &ScalarSolution,
    y2: &ScalarSolution,
    nu: impl Fn(C64) -> C64,
) -> Result<Mat2, BesselError> {
    if (y1.z - y2.z).norm() > 1e-12 || y1.alpha != y2.alpha {
        return Err(BesselError::Mismatch);
    }
    frame_from_values(y1.z, (y1.y, y1.dy), (y2.y, y2.dy), nu)
}

fn frame_from_values(
    z: C64,
    (y1, dy1): (C64, C64),
    (y2, dy2): (C64, C64),
    nu: impl Fn(C64) -> C64,
) -> Result<Mat2, BesselError> {
    let w = wronskian(y1, dy1, y2, dy2).norm();
    if w < 1e-12 {
        return Err(BesselError::Degenerate(w));
    }
    let n = nu(z);
    Ok(Mat2::new(dy1 / n, y1, dy2 / n, y2))
}

/// Coefficients `ν`, `ν′`, `ρ` of `y″ − (ν′/ν) y′ − ρν y = 0`.
#[derive(Clone)]
pub struct ScalarEquation {
    pub nu: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
    pub dnu: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
    pub rho: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
}

impl ScalarEquation {
    /// `ν = 1/z`, `ρ = −z + α²/z`.
    pub fn bessel(alpha: C64) -> Self {
        ScalarEquation {
            nu: Arc::new(|z| 1.0 / z),
            dnu: Arc::new(|z| -1.0 / (z * z)),
            rho: Arc::new(move |z| -z + alpha * alpha / z),
        }
    }
}

/// `y″ − (ν′/ν) y′ − ρν y` at the solution's endpoint.
pub fn scalar_residual(eq: &ScalarEquation, y: &ScalarSolution) -> C64 {
    let z = y.z;
    let nu = (eq.nu)(z);
    y.ddy - (eq.dnu)(z) / nu * y.dy - (eq.rho)(z) * nu * y.y
}

/// `√(2/(πz)) sin z` and its derivative, the order-½ solution.
pub fn half_order_sine(z: C64) -> (C64, C64) {
    let c = (2.0 / PI).sqrt();
    let s = z.sqrt();
    let y = c * z.sin() / s;
    let dy = c * (z.cos() / s - 0.5 * z.sin() / (s * z));
    (y, dy)
}

/// Taylor polynomial of degree `degree` about `z = 1` for the solution
/// with `y(1) = y0`, `y′(1) = dy0`; returns `(y, y′)` at `z`.
///
/// In `x = z − 1` the coefficients satisfy
/// `(n+2)(n+1)a_{n+2} = −[(n+1)(2n+1)a_{n+1} + (n²+1−α²)a_n + 2a_{n−1} + a_{n−2}]`.
pub fn taylor_about_one(alpha: C64, y0: C64, dy0: C64, degree: usize, z: C64) -> (C64, C64) {
    let mut a = vec![C64::new(0.0, 0.0); degree.max(1) + 1];
    a[0] = y0;
    a[1] = dy0;
    let get = |a: &Vec<C64>, k: isize| if k < 0 { C64::new(0.0, 0.0) } else { a[k as usize] };
    for n in 0..degree.saturating_sub(1) {
        let nf = n as f64;
        let ni = n as isize;
        let s = (nf + 1.0) * (2.0 * nf + 1.0) * a[n + 1]
            + (nf * nf + 1.0 - alpha * alpha) * a[n]
            + 2.0 * get(&a, ni - 1)
            + get(&a, ni - 2);
        a[n + 2] = -s / ((nf + 2.0) * (nf + 1.0));
    }
    let x = z - 1.0;
    let mut y = C64::new(0.0, 0.0);
    let mut dy = C64::new(0.0, 0.0);
    for k in (0..=degree).rev() {
        y = y * x + a[k];
        if k > 0 {
            dy = dy * x + a[k] * k as f64;
        }
    }
    (y, dy)
}

/// Agreement between the scalar-built frame and the matrix flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrespondenceReport {
    /// Max entry gap between `frame_from_scalar` and the matrix flow over
    /// all checkpoints.
    pub frame_error: f64,
    /// Max `|z W(z) − z₀ W(z₀)|` over the checkpoints.
    pub wronskian_drift: f64,
}

/// Integrates the fundamental pair `y₁(z₀) = 1, y₁′ = 0` and
/// `y₂(z₀) = 0, y₂′ = 1` and, independently, the matrix flow of the
/// Bessel potential from the matching initial frame; compares them at every
/// checkpoint of `path`.
pub fn scalar_matrix_correspondence(
    alpha: C64,
    path: &PathSpec,
    cfg: &FlowConfig,
) -> Result<CorrespondenceReport, BesselError> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let s1 = bessel_integrate(alpha, path, one, zero, &cfg.ode)?;
    let s2 = bessel_integrate(alpha, path, zero, one, &cfg.ode)?;
    let nu = |z: C64| 1.0 / z;
    let (z0, _, _) = s1.history[0];
    let phi0 = frame_from_values(z0, (one, zero), (zero, one), nu)?;
    let xi = BesselPotential::new(alpha);
    // the potential is λ-independent; one λ sample suffices
    let sol = flow::integrate_frame(&xi, path, &[phi0], &[one], cfg)?;
    let zw0 = z0 * wronskian(one, zero, zero, one);
    let mut frame_error = 0.0_f64;
    let mut wronskian_drift = 0.0_f64;
    for (c, (&(z, y1, dy1), &(_, y2, dy2))) in s1.history.iter().zip(&s2.history).enumerate() {
        let f = frame_from_values(z, (y1, dy1), (y2, dy2), nu)?;
        frame_error = frame_error.max((f - sol.frames[c][0]).max_abs());
        wronskian_drift = wronskian_drift.max((z * wronskian(y1, dy1, y2, dy2) - zw0).norm());
    }
    Ok(CorrespondenceReport {
        frame_error,
        wronskian_drift,
    })
}

/// Trace of the monodromy of the scalar equation around the origin,
/// obtained by continuing the fundamental pair once around `|z| = 1`.
pub fn scalar_monodromy_trace(alpha: C64, cfg: &OdeConfig) -> Result<C64, BesselError> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let path = PathSpec::loop_around_origin(one, 1.0);
    let s1 = bessel_integrate(alpha, &path, one, zero, cfg)?;
    let s2 = bessel_integrate(alpha, &path, zero, one, cfg)?;
    // rows (y, y′) of the continued pair against the identity start
    Ok(s1.y + s2.dy)
}
